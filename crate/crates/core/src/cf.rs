//! The backward continued-fraction recursion for the innovation variance
//! factors `c_n(phi, theta)`.
//!
//! With `d = Δ_{n+1}`:
//!
//! ```text
//! c_1     = (1 + 2 phi theta + theta^2) / (1 - phi^2)
//! c_{n+1} = c_1 (1 - phi^(2d)) - 2 phi^d theta^d - theta^(2d) / c_n
//! ```
//!
//! Every `c_n` is positive as long as all gaps are at least one.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::params::{self, ModelParams};
use crate::series::check_gaps;

/// Smallest admissible variance factor; anything below signals a numerical fault.
pub const C_FLOOR: f64 = 1e-12;

/// One transition of the recursion across a gap.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Step {
    /// `phi^d`
    pub ar: f64,
    /// `theta^d / c_n`
    pub ma: f64,
    /// `c_{n+1}`
    pub c_next: f64,
}

/// Precomputed per-parameter constants shared by every pass over a grid.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Recursion {
    phi: f64,
    theta: f64,
    ln_phi: f64,
    ln_theta: f64,
    c1: f64,
}

impl Recursion {
    /// Caller guarantees `phi, theta` in `[0, 1)`.
    pub fn new(phi: f64, theta: f64) -> Self {
        Self {
            phi,
            theta,
            ln_phi: math::ln(phi),
            ln_theta: math::ln(theta),
            c1: params::c1(phi, theta),
        }
    }

    #[inline]
    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// Advances from `c_n` across a gap `gap` (already validated `>= 1`).
    /// `index` is the 0-based position of `c_{n+1}`, used for error reporting.
    #[inline]
    pub fn step(&self, c: f64, gap: f64, index: usize) -> Result<Step> {
        let ar = math::pow_gap(self.phi, self.ln_phi, gap);
        let ma_pow = math::pow_gap(self.theta, self.ln_theta, gap);
        let decay = math::one_minus_pow2_gap(self.phi, self.ln_phi, gap);
        let c_next = self.c1 * decay - 2.0 * ar * ma_pow - ma_pow * ma_pow / c;
        // NaN fails this comparison too
        if !(c_next >= C_FLOOR) {
            return Err(Error::VarianceFactorUnderflow {
                index,
                value: c_next,
            });
        }
        Ok(Step {
            ar,
            ma: ma_pow / c,
            c_next,
        })
    }
}

/// Output of the recursion over a full grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CfSequence {
    /// `c_1 .. c_N`
    pub c: Vec<f64>,
    /// `υ_n = sigma2 c_n`
    pub upsilon: Vec<f64>,
    /// `ϖ_n = sigma2 theta^{Δ_{n+1}} / υ_n`, for `n = 1 .. N-1`
    pub varpi: Vec<f64>,
}

/// Runs the recursion over `gaps` (length `N - 1`), producing `N` factors.
pub fn cf_sequence(params: &ModelParams, gaps: &[f64]) -> Result<CfSequence> {
    check_gaps(gaps)?;
    let rec = Recursion::new(params.phi(), params.theta());
    let n = gaps.len() + 1;
    let mut c = Vec::with_capacity(n);
    let mut varpi = Vec::with_capacity(gaps.len());
    let mut cur = rec.c1();
    c.push(cur);
    for (i, &gap) in gaps.iter().enumerate() {
        let step = rec.step(cur, gap, i + 1)?;
        varpi.push(step.ma);
        cur = step.c_next;
        c.push(cur);
    }
    let upsilon = c.iter().map(|&v| params.sigma2() * v).collect();
    Ok(CfSequence { c, upsilon, varpi })
}

/// The theta-only sequence `c_1(theta) = 1 + theta^2`,
/// `c_{n+1}(theta) = 1 + theta^2 - theta^(2d) / c_n(theta)`, which bounds
/// `c_n(phi, theta)` from below.
pub fn theta_lower_bound(theta: f64, gaps: &[f64]) -> Result<Vec<f64>> {
    params::check_coefficient("theta", theta)?;
    check_gaps(gaps)?;
    let ln_theta = math::ln(theta);
    let base = 1.0 + theta * theta;
    let mut out = Vec::with_capacity(gaps.len() + 1);
    let mut cur = base;
    out.push(cur);
    for &gap in gaps {
        let p = math::pow_gap(theta, ln_theta, gap);
        cur = base - p * p / cur;
        out.push(cur);
    }
    Ok(out)
}
