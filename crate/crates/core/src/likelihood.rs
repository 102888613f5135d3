//! Exact Gaussian log-likelihood by prediction-error decomposition, and the
//! profile (reduced) likelihood with `sigma2` concentrated out.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::params::ModelParams;
use crate::predict::innovations_pass;
use crate::series::IrregularSeries;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Sufficient sums of one innovations pass.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Sums {
    pub n: usize,
    /// `Σ (y_n - ŷ_n)^2 / c_n`
    pub scaled_sq: f64,
    /// `Σ ln c_n`
    pub ln_c: f64,
}

pub(crate) fn sums(phi: f64, theta: f64, gaps: &[f64], y: &[f64]) -> Result<Sums> {
    let mut scaled_sq = 0.0;
    let mut ln_c = 0.0;
    innovations_pass(phi, theta, gaps, y, |_, c, _, r| {
        scaled_sq += r * r / c;
        ln_c += math::ln(c);
    })?;
    Ok(Sums {
        n: y.len(),
        scaled_sq,
        ln_c,
    })
}

impl Sums {
    pub fn loglik(&self, sigma2: f64) -> f64 {
        let n = self.n as f64;
        -0.5 * n * LN_2PI - 0.5 * n * math::ln(sigma2) - 0.5 * self.ln_c - 0.5 * self.scaled_sq / sigma2
    }

    pub fn reduced(&self) -> Result<ReducedLikelihood> {
        let n = self.n as f64;
        let sigma2 = self.scaled_sq / n;
        if !(sigma2 > 0.0) {
            return Err(Error::DegenerateData);
        }
        let q = math::ln(sigma2) + self.ln_c / n;
        if !q.is_finite() {
            return Err(Error::NonFiniteLikelihood);
        }
        Ok(ReducedLikelihood { q, sigma2 })
    }
}

pub(crate) fn demean(series: &IrregularSeries, mu: f64) -> Vec<f64> {
    series.values().iter().map(|x| x - mu).collect()
}

/// Full Gaussian log-likelihood of `series` under `params`.
pub fn loglik(params: &ModelParams, series: &IrregularSeries) -> Result<f64> {
    let y = demean(series, params.mu());
    let s = sums(params.phi(), params.theta(), series.gaps(), &y)?;
    let ll = s.loglik(params.sigma2());
    if ll.is_finite() {
        Ok(ll)
    } else {
        Err(Error::NonFiniteLikelihood)
    }
}

/// Value of the reduced likelihood and the profile variance at `(phi, theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedLikelihood {
    /// `q = ln σ̂² + (1/N) Σ ln c_n`
    pub q: f64,
    /// `σ̂² = (1/N) Σ (x_n - x̂_n)^2 / c_n`
    pub sigma2: f64,
}

/// Reduced likelihood of `series` with the level fixed at `mu`.
pub fn reduced_likelihood(
    phi: f64,
    theta: f64,
    series: &IrregularSeries,
    mu: f64,
) -> Result<ReducedLikelihood> {
    // validates phi and theta
    ModelParams::new(phi, theta, 1.0)?;
    let y = demean(series, mu);
    sums(phi, theta, series.gaps(), &y)?.reduced()
}

/// `-(N/2)(ln 2π + 1) - (N/2) q`: the log-likelihood at the profile variance.
pub fn profile_loglik(reduced: &ReducedLikelihood, n: usize) -> f64 {
    let n = n as f64;
    -0.5 * n * (LN_2PI + 1.0) - 0.5 * n * reduced.q
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn standard_normal_at_zero() {
        let params = ModelParams::new(0.0, 0.0, 1.0).unwrap();
        let s = IrregularSeries::new(vec![1.0], vec![0.0]).unwrap();
        let ll = loglik(&params, &s).unwrap();
        assert!((ll + 0.5 * LN_2PI).abs() < 1e-15);
    }

    #[test]
    fn single_point_reduced() {
        let s = IrregularSeries::new(vec![1.0], vec![1.7]).unwrap();
        let r = reduced_likelihood(0.4, 0.3, &s, 0.0).unwrap();
        let c1 = crate::params::c1(0.4, 0.3);
        assert!((r.sigma2 - 1.7 * 1.7 / c1).abs() < 1e-14);
        assert!((r.q - libm::log(1.7 * 1.7)).abs() < 1e-14);
    }

    #[test]
    fn white_noise_reduced() {
        let xs = vec![0.5, -1.0, 2.0, 0.25];
        let s = IrregularSeries::new(vec![1.0, 2.5, 4.0, 9.0], xs.clone()).unwrap();
        let r = reduced_likelihood(0.0, 0.0, &s, 0.0).unwrap();
        let mean_sq = xs.iter().map(|x| x * x).sum::<f64>() / 4.0;
        assert!((r.q - libm::log(mean_sq)).abs() < 1e-15);
    }

    #[test]
    fn location_shift_invariance() {
        let times = vec![1.0, 2.0, 3.5, 5.0, 6.2];
        let xs = vec![10.5, 9.0, 12.0, 10.25, 11.0];
        let s = IrregularSeries::new(times.clone(), xs.clone()).unwrap();
        let shifted = IrregularSeries::new(times, xs.iter().map(|x| x - 10.0).collect()).unwrap();
        let p = ModelParams::new(0.5, 0.3, 1.2).unwrap();
        let a = loglik(&p.with_mu(10.0).unwrap(), &s).unwrap();
        let b = loglik(&p, &shifted).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn degenerate_zero_residuals() {
        let s = IrregularSeries::new(vec![1.0, 2.0, 3.0], vec![0.0; 3]).unwrap();
        assert_eq!(reduced_likelihood(0.2, 0.2, &s, 0.0).unwrap_err(), Error::DegenerateData);
    }

    #[test]
    fn rejects_bad_coefficients() {
        let s = IrregularSeries::new(vec![1.0, 2.0], vec![0.0, 1.0]).unwrap();
        assert!(reduced_likelihood(1.0, 0.2, &s, 0.0).is_err());
        assert!(reduced_likelihood(0.2, -0.2, &s, 0.0).is_err());
    }
}
