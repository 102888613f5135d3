//! Whiteness and normality checks for standardized residuals.
//!
//! The residuals are treated as an equally indexed sample: under a correct
//! model they are i.i.d. whatever the spacing of the original observations.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::special::{chi2_sf, normal_quantile};

/// Sample autocorrelations for lags `1..=max_lag`.
#[derive(Debug, Clone, PartialEq)]
pub struct AcfEstimate {
    pub rho: Vec<f64>,
    /// Half-width `z_{0.975} / sqrt(N)` of the white-noise band.
    pub band: f64,
    pub n: usize,
}

impl AcfEstimate {
    pub fn max_lag(&self) -> usize {
        self.rho.len()
    }

    /// Autocorrelation at `lag` (`1.0` at lag zero).
    pub fn at(&self, lag: usize) -> Option<f64> {
        if lag == 0 {
            Some(1.0)
        } else {
            self.rho.get(lag - 1).copied()
        }
    }

    /// Number of lags whose estimate falls outside the band.
    pub fn outside_band(&self) -> usize {
        self.rho.iter().filter(|r| r.abs() > self.band).count()
    }
}

fn centered(resid: &[f64], max_lag: usize) -> Result<(Vec<f64>, f64)> {
    let n = resid.len();
    if max_lag == 0 || max_lag >= n {
        return Err(Error::InvalidLag { max_lag, n });
    }
    let mean = resid.iter().sum::<f64>() / n as f64;
    let e: Vec<f64> = resid.iter().map(|r| r - mean).collect();
    let denom: f64 = e.iter().map(|v| v * v).sum();
    if !(denom > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok((e, denom))
}

/// Mean-corrected sample autocorrelations normalized by the lag-zero sum.
pub fn acf(resid: &[f64], max_lag: usize) -> Result<AcfEstimate> {
    let (e, denom) = centered(resid, max_lag)?;
    let rho = (1..=max_lag)
        .map(|k| e.iter().zip(&e[k..]).map(|(a, b)| a * b).sum::<f64>() / denom)
        .collect();
    let n = resid.len();
    Ok(AcfEstimate {
        rho,
        band: normal_quantile(0.975) / math::sqrt(n as f64),
        n,
    })
}

/// Ljung-Box portmanteau statistic over lags `1..=lag`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LjungBoxResult {
    pub lag: usize,
    pub statistic: f64,
    pub df: usize,
    /// `None` when the degrees of freedom are exhausted by `fitted_params`.
    pub p_value: Option<f64>,
}

impl LjungBoxResult {
    /// Fails to reject whiteness at `level`.
    pub fn passes(&self, level: f64) -> bool {
        self.p_value.is_none_or(|p| p >= level)
    }
}

/// `Q_h = N (N + 2) Σ_{k<=h} rho_k^2 / (N - k)` for every `h` in `1..=max_lag`,
/// referred to chi-square with `h - fitted_params` degrees of freedom.
pub fn ljung_box(resid: &[f64], max_lag: usize, fitted_params: usize) -> Result<Vec<LjungBoxResult>> {
    let est = acf(resid, max_lag)?;
    let n = est.n as f64;
    let mut q = 0.0;
    Ok(est
        .rho
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let lag = i + 1;
            q += r * r / (n - lag as f64);
            let statistic = n * (n + 2.0) * q;
            let df = lag.saturating_sub(fitted_params);
            let p_value = (df > 0).then(|| chi2_sf(statistic, df as f64).clamp(0.0, 1.0));
            LjungBoxResult {
                lag,
                statistic,
                df,
                p_value,
            }
        })
        .collect())
}

/// Ljung-Box statistic from given autocorrelations (`rho[k-1]` at lag `k`).
pub fn ljung_box_statistic(rho: &[f64], n: usize) -> f64 {
    let n = n as f64;
    n * (n + 2.0)
        * rho
            .iter()
            .enumerate()
            .map(|(i, r)| r * r / (n - (i + 1) as f64))
            .sum::<f64>()
}

/// `(theoretical, sample)` quantile pairs: sorted residuals against standard
/// normal quantiles at plotting positions `(i - 0.5) / N`.
pub fn qq_data(resid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = resid.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let mut sorted = resid.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, v)| (normal_quantile((i as f64 + 0.5) / n as f64), v))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn alternating_has_negative_lag_one() {
        let r = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let a = acf(&r, 2).unwrap();
        assert!(a.rho[0] < 0.0);
        assert_eq!(a.at(0), Some(1.0));
        assert_eq!(a.max_lag(), 2);
    }

    #[test]
    fn acf_errors() {
        assert_eq!(acf(&[1.0; 5], 2).unwrap_err(), Error::ZeroVariance);
        assert_eq!(
            acf(&[1.0, 2.0, 3.0], 3).unwrap_err(),
            Error::InvalidLag { max_lag: 3, n: 3 }
        );
        assert!(acf(&[1.0, 2.0, 3.0], 0).is_err());
    }

    #[test]
    fn ljung_box_hand_value() {
        let q = ljung_box_statistic(&[0.3], 100);
        assert!((q - 100.0 * 102.0 * 0.09 / 99.0).abs() < 1e-12);
        assert!((q - 9.272_727_272_727_273).abs() < 1e-12);
        assert_eq!(ljung_box_statistic(&[0.0; 5], 50), 0.0);
    }

    #[test]
    fn ljung_box_monotone_and_bounded() {
        let r = [0.3, -1.2, 0.5, 2.2, -0.7, 0.1, 0.9, -1.5, 0.4, 0.0, 1.1, -0.2];
        let lb = ljung_box(&r, 8, 0).unwrap();
        assert_eq!(lb.len(), 8);
        for w in lb.windows(2) {
            assert!(w[1].statistic >= w[0].statistic);
        }
        for t in &lb {
            let p = t.p_value.unwrap();
            assert!((0.0..=1.0).contains(&p));
            assert_eq!(t.df, t.lag);
        }
        let adj = ljung_box(&r, 4, 2).unwrap();
        assert_eq!(adj[1].df, 0);
        assert!(adj[1].p_value.is_none());
        assert_eq!(adj[3].df, 2);
    }

    #[test]
    fn qq_symmetric() {
        let pairs = qq_data(&[1.5, -1.5, 0.0]).unwrap();
        assert_eq!(pairs[1], (0.0, 0.0));
        assert!((pairs[0].0 + pairs[2].0).abs() < 1e-15);
        assert_eq!(pairs[0].1, -pairs[2].1);
        assert!(qq_data(&[1.0]).is_err());
        let v = vec![3.0, 1.0, 2.0, 5.0, 4.0];
        let p = qq_data(&v).unwrap();
        assert_eq!(p.iter().map(|x| x.1).collect::<Vec<_>>(), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(p[2].0, 0.0);
    }
}
