//! Gap laws and exact Gaussian simulation of iARMA paths.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::cf::cf_sequence;
use crate::error::{Error, Result};
use crate::math;
use crate::params::ModelParams;
use crate::series::{IrregularSeries, Rescale};

/// Distribution of the gaps between consecutive observation times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapLaw {
    /// Every gap equals one.
    Regular,
    /// `1 + Exp(rate)`.
    ShiftedExponential { rate: f64 },
}

impl GapLaw {
    pub fn shifted_exponential(rate: f64) -> Result<Self> {
        if rate > 0.0 && rate.is_finite() {
            Ok(Self::ShiftedExponential { rate })
        } else {
            Err(Error::InvalidParameter {
                name: "rate",
                value: rate,
                range: "(0, inf)",
            })
        }
    }
}

/// Draws `count` gaps; every gap is at least one.
pub fn sample_gaps<R: Rng + ?Sized>(law: GapLaw, count: usize, rng: &mut R) -> Result<Vec<f64>> {
    match law {
        GapLaw::Regular => Ok(alloc::vec![1.0; count]),
        GapLaw::ShiftedExponential { rate } => {
            let exp = Exp::new(rate).map_err(|_| Error::InvalidParameter {
                name: "rate",
                value: rate,
                range: "(0, inf)",
            })?;
            Ok((0..count).map(|_| 1.0 + exp.sample(rng)).collect())
        }
    }
}

/// Observation times `t_1 = 1, t_{n+1} = t_n + Δ_{n+1}` for `n` points.
pub fn time_grid<R: Rng + ?Sized>(law: GapLaw, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    let gaps = sample_gaps(law, n - 1, rng)?;
    let mut times = Vec::with_capacity(n);
    let mut t = 1.0;
    times.push(t);
    for g in gaps {
        t += g;
        times.push(t);
    }
    Ok(times)
}

/// Simulates `X_{t_1} = ε_1`,
/// `X_{t_{n+1}} = phi^Δ X_{t_n} + ε_{n+1} + theta^Δ / c_n ε_n`, with
/// independent `ε_n ~ N(0, sigma2 c_n)`, then shifts by `mu`.
///
/// `times` must already be on a normalized grid (all gaps `>= 1`).
pub fn simulate<R: Rng + ?Sized>(
    params: &ModelParams,
    times: &[f64],
    rng: &mut R,
) -> Result<IrregularSeries> {
    let grid = IrregularSeries::with_rescale(times.to_vec(), alloc::vec![0.0; times.len()], Rescale::Forbid)?;
    let values = simulate_values(params, grid.gaps(), rng)?;
    grid.with_values(values)
}

/// Zero-based path generation on a gap sequence; returns `gaps.len() + 1` values.
pub fn simulate_values<R: Rng + ?Sized>(
    params: &ModelParams,
    gaps: &[f64],
    rng: &mut R,
) -> Result<Vec<f64>> {
    let cf = cf_sequence(params, gaps)?;
    let mut eps_prev: f64 = math::sqrt(cf.upsilon[0]) * rng.sample::<f64, _>(StandardNormal);
    let mut x = eps_prev;
    let mut out = Vec::with_capacity(cf.c.len());
    out.push(x + params.mu());
    for (n, &gap) in gaps.iter().enumerate() {
        let ar = if params.phi() == 0.0 {
            0.0
        } else {
            math::exp(gap * math::ln(params.phi()))
        };
        let eps = math::sqrt(cf.upsilon[n + 1]) * rng.sample::<f64, _>(StandardNormal);
        x = ar * x + eps + cf.varpi[n] * eps_prev;
        eps_prev = eps;
        out.push(x + params.mu());
    }
    Ok(out)
}
