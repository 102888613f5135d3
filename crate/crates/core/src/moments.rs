//! Second moments of the stationary iARMA process.

use crate::error::{Error, Result};
use crate::math;
use crate::params::ModelParams;

/// Variance `gamma_0 = sigma2 c_1`.
pub fn gamma0(params: &ModelParams) -> f64 {
    params.sigma2() * params.c1()
}

/// Covariance of neighbours separated by `gap`:
/// `sigma2 (phi^gap c_1 + theta^gap)`.
pub fn gamma1(params: &ModelParams, gap: f64) -> Result<f64> {
    check_gap(gap)?;
    Ok(params.sigma2() * (pow(params.phi(), gap) * params.c1() + pow(params.theta(), gap)))
}

/// Lag-one autocorrelation `phi^gap + theta^gap / c_1`.
pub fn rho1(params: &ModelParams, gap: f64) -> Result<f64> {
    check_gap(gap)?;
    Ok(pow(params.phi(), gap) + pow(params.theta(), gap) / params.c1())
}

/// `Cov(X_{t_n}, X_{t_{n+k}})` given the observation time `t_n`, the next
/// observation time `t_next = t_{n+1}` and the target time `t_{n+k}`.
///
/// `target == t_n` is lag zero, `target == t_next` lag one; a later target
/// decays the lag-one covariance by `phi^(target - t_next)`.
pub fn autocov(params: &ModelParams, t_n: f64, t_next: f64, target: f64) -> Result<f64> {
    autocorr_factor(params, t_n, t_next, target).map(|(f, lag0)| {
        if lag0 {
            gamma0(params)
        } else {
            f * gamma0(params)
        }
    })
}

/// `Cor(X_{t_n}, X_{t_{n+k}})`; same argument conventions as [`autocov`].
pub fn autocorr(params: &ModelParams, t_n: f64, t_next: f64, target: f64) -> Result<f64> {
    autocorr_factor(params, t_n, t_next, target).map(|(f, lag0)| if lag0 { 1.0 } else { f })
}

fn autocorr_factor(
    params: &ModelParams,
    t_n: f64,
    t_next: f64,
    target: f64,
) -> Result<(f64, bool)> {
    if !(t_n.is_finite() && t_next.is_finite() && target.is_finite()) {
        return Err(Error::NonFinite {
            what: "time",
            index: 0,
        });
    }
    if target == t_n {
        return Ok((1.0, true));
    }
    if !(t_next > t_n) {
        return Err(Error::UnsortedTimes { index: 1 });
    }
    if target < t_next {
        return Err(Error::UnsortedTimes { index: 2 });
    }
    let r = rho1(params, t_next - t_n)?;
    Ok((pow(params.phi(), target - t_next) * r, false))
}

fn check_gap(gap: f64) -> Result<()> {
    if gap > 0.0 && gap.is_finite() {
        Ok(())
    } else {
        Err(Error::UnsortedTimes { index: 1 })
    }
}

/// `base^e` with `0^0 = 1` and `0^e = 0` for `e > 0`.
fn pow(base: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        math::pow_gap(base, math::ln(base), e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(phi: f64, theta: f64) -> ModelParams {
        ModelParams::new(phi, theta, 1.0).unwrap()
    }

    #[test]
    fn hand_values() {
        assert_eq!(gamma0(&p(0.0, 0.0)), 1.0);
        assert!((gamma1(&p(0.5, 0.5), 1.0).unwrap() - 5.0 / 3.0).abs() < 1e-14);
        assert!((gamma1(&p(0.0, 0.5), 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((rho1(&p(0.5, 0.5), 2.0).unwrap() - 5.0 / 14.0).abs() < 1e-14);
        assert_eq!(rho1(&p(0.0, 0.0), 3.3).unwrap(), 0.0);
    }

    #[test]
    fn unit_gap_matches_arma11_acf() {
        for i in 0..10 {
            for j in 0..10 {
                let (phi, theta) = (i as f64 / 10.0, j as f64 / 10.0 + 0.05);
                let expected = (phi + theta) * (1.0 + phi * theta) / (1.0 + 2.0 * phi * theta + theta * theta);
                let got = rho1(&p(phi, theta), 1.0).unwrap();
                assert!((got - expected).abs() < 1e-14, "{phi} {theta}");
            }
        }
    }

    #[test]
    fn autocov_lags() {
        let params = ModelParams::new(0.6, 0.3, 2.0).unwrap();
        assert_eq!(autocov(&params, 1.0, 2.5, 1.0).unwrap(), gamma0(&params));
        let g1 = gamma1(&params, 1.5).unwrap();
        assert!((autocov(&params, 1.0, 2.5, 2.5).unwrap() - g1).abs() < 1e-14);
        let g3 = autocov(&params, 1.0, 2.5, 6.0).unwrap();
        assert!((g3 - libm::pow(0.6, 3.5) * g1).abs() < 1e-14);
        assert!(autocov(&params, 2.0, 1.0, 3.0).is_err());
        assert!(autocov(&params, 1.0, 3.0, 2.0).is_err());
        assert!(autocorr(&params, 1.0, 3.0, 2.0).is_err());
        assert_eq!(autocorr(&params, 1.0, 3.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn correlation_below_one() {
        for &(phi, theta) in &[(0.999, 0.999), (0.0, 0.999), (0.999, 0.0), (0.5, 0.9)] {
            for &gap in &[1.0, 1.5, 7.0] {
                let r = rho1(&p(phi, theta), gap).unwrap();
                assert!(r.abs() < 1.0);
            }
        }
    }
}
