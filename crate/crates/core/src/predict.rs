//! One-step prediction: the innovations recursion, the equivalent minimal
//! state-space filter, standardized residuals and prediction bands.
//!
//! On the demeaned data `y_n = x_n - mu`:
//!
//! ```text
//! ŷ_1     = 0
//! ŷ_{n+1} = phi^Δ y_n + theta^Δ / c_n (y_n - ŷ_n)
//! ```
//!
//! with mean squared error `sigma2 c_n`.

use alloc::vec::Vec;

use crate::cf::Recursion;
use crate::error::{Error, Result};
use crate::math;
use crate::params::ModelParams;
use crate::series::IrregularSeries;
use crate::special::normal_quantile;

/// Where the variance scale used for standardizing came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleSource {
    /// `sigma2` of the parameters handed to the predictor.
    Supplied,
    /// Profile maximum-likelihood estimate `σ̂²(phi, theta)`.
    Profile,
}

/// Per-observation output of the one-step predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct InnovationTrace {
    pub xhat: Vec<f64>,
    /// Mean squared error factors; the MSE of `xhat[n]` is `sigma2 * c[n]`.
    pub c: Vec<f64>,
    pub resid: Vec<f64>,
    pub std_resid: Vec<f64>,
    /// Variance scale the standardized residuals were divided by.
    pub scale: f64,
    pub scale_source: ScaleSource,
}

impl InnovationTrace {
    /// Recomputes `std_resid` as `resid / sqrt(sigma2 c_n)`.
    pub fn standardize(&mut self, sigma2: f64, source: ScaleSource) {
        self.scale = sigma2;
        self.scale_source = source;
        self.std_resid = self
            .resid
            .iter()
            .zip(&self.c)
            .map(|(r, c)| r / math::sqrt(sigma2 * c))
            .collect();
    }

    pub fn mse(&self) -> impl Iterator<Item = f64> + '_ {
        self.c.iter().map(move |c| self.scale * c)
    }

    pub fn len(&self) -> usize {
        self.xhat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xhat.is_empty()
    }
}

/// State sequence of the minimal (scalar) state-space form
/// `X_n = α_n + ε_n`, `α_1 = 0`,
/// `α_{n+1} = (phi^Δ + theta^Δ / c_n) X_n - theta^Δ / c_n α_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTrace {
    /// States on the demeaned scale.
    pub alpha: Vec<f64>,
}

/// Core pass shared with the likelihood: calls `visit(n, c_n, resid_n)` for
/// every observation of the demeaned data `y`.
#[inline]
pub(crate) fn innovations_pass<F>(
    phi: f64,
    theta: f64,
    gaps: &[f64],
    y: &[f64],
    mut visit: F,
) -> Result<()>
where
    F: FnMut(usize, f64, f64, f64),
{
    debug_assert_eq!(gaps.len() + 1, y.len());
    let rec = Recursion::new(phi, theta);
    let mut c = rec.c1();
    let mut yhat = 0.0;
    let last = y.len() - 1;
    for (n, &yn) in y.iter().enumerate() {
        let resid = yn - yhat;
        visit(n, c, yhat, resid);
        if n < last {
            let step = rec.step(c, gaps[n], n + 1)?;
            yhat = step.ar * yn + step.ma * resid;
            c = step.c_next;
        }
    }
    Ok(())
}

/// One-step predictions by the innovations recursion.
///
/// Residuals are standardized with `params.sigma2()`.
pub fn predict_innovations(params: &ModelParams, series: &IrregularSeries) -> Result<InnovationTrace> {
    let mu = params.mu();
    let y: Vec<f64> = series.values().iter().map(|x| x - mu).collect();
    let n = y.len();
    let mut xhat = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    let mut resid = Vec::with_capacity(n);
    innovations_pass(params.phi(), params.theta(), series.gaps(), &y, |_, cn, yhat, r| {
        xhat.push(yhat + mu);
        c.push(cn);
        resid.push(r);
    })?;
    let mut trace = InnovationTrace {
        xhat,
        c,
        resid,
        std_resid: Vec::new(),
        scale: params.sigma2(),
        scale_source: ScaleSource::Supplied,
    };
    trace.standardize(params.sigma2(), ScaleSource::Supplied);
    Ok(trace)
}

/// One-step predictions by the state-space recursion; the prediction of
/// `X_{t_n}` is `α_n + mu`.
pub fn predict_statespace(
    params: &ModelParams,
    series: &IrregularSeries,
) -> Result<(StateTrace, InnovationTrace)> {
    let mu = params.mu();
    let rec = Recursion::new(params.phi(), params.theta());
    let n = series.len();
    let mut alpha = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    let mut a = 0.0;
    let mut cn = rec.c1();
    for (i, &x) in series.values().iter().enumerate() {
        alpha.push(a);
        c.push(cn);
        if i + 1 < n {
            let step = rec.step(cn, series.gaps()[i], i + 1)?;
            a = (step.ar + step.ma) * (x - mu) - step.ma * a;
            cn = step.c_next;
        }
    }
    let xhat: Vec<f64> = alpha.iter().map(|a| a + mu).collect();
    let resid = series.values().iter().zip(&xhat).map(|(x, p)| x - p).collect();
    let mut trace = InnovationTrace {
        xhat,
        c,
        resid,
        std_resid: Vec::new(),
        scale: params.sigma2(),
        scale_source: ScaleSource::Supplied,
    };
    trace.standardize(params.sigma2(), ScaleSource::Supplied);
    Ok((StateTrace { alpha }, trace))
}

/// A symmetric Gaussian prediction interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

/// `xhat_n ± z_{(1 + coverage)/2} sqrt(sigma2 c_n)` for `coverage` in `[0, 1)`.
pub fn forecast_bands(trace: &InnovationTrace, params: &ModelParams, coverage: f64) -> Result<Vec<Band>> {
    if !(0.0..1.0).contains(&coverage) {
        return Err(Error::InvalidCoverage(coverage));
    }
    let z = normal_quantile(0.5 + 0.5 * coverage);
    Ok(trace
        .xhat
        .iter()
        .zip(&trace.c)
        .map(|(&x, &c)| {
            let half = z * math::sqrt(params.sigma2() * c);
            Band {
                lo: x - half,
                hi: x + half,
            }
        })
        .collect())
}
