//! Maximum-likelihood fitting on the reduced likelihood, numerical-Hessian
//! standard errors and Wald tests.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::likelihood::{demean, sums};
use crate::math;
use crate::optimize::{minimize_box, BoxOptions, Termination};
use crate::params::{check_coefficient, ModelParams};
use crate::series::IrregularSeries;
use crate::special::normal_sf;

/// `phi` and `theta` are searched over `[0, 1 - BOUND_EPS]`.
pub const BOUND_EPS: f64 = 1e-6;

/// Relative step of the central differences used for the Hessian.
pub const HESSIAN_STEP: f64 = 1e-4;

/// How the level `mu` is chosen before fitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanHandling {
    /// Subtract the sample mean.
    SampleMean,
    /// Use the given level (zero for an uncentred fit).
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub mean: MeanHandling,
    /// Hold `phi` at this value instead of estimating it.
    pub fix_phi: Option<f64>,
    /// Hold `theta` at this value instead of estimating it.
    pub fix_theta: Option<f64>,
    pub optimizer: BoxOptions,
    /// Starting points `(phi, theta)`.
    pub starts: Vec<(f64, f64)>,
    pub standard_errors: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            mean: MeanHandling::SampleMean,
            fix_phi: None,
            fix_theta: None,
            optimizer: BoxOptions::default(),
            starts: vec![(0.2, 0.2), (0.2, 0.7), (0.7, 0.2), (0.7, 0.7)],
            standard_errors: true,
        }
    }
}

/// Which coefficients are free (estimated) rather than held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeParams {
    pub phi: bool,
    pub theta: bool,
}

impl FreeParams {
    pub const ALL: Self = Self {
        phi: true,
        theta: true,
    };
}

/// Standard errors of `(phi, theta, sigma2)`; `None` when fixed or unavailable.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StandardErrors {
    pub phi: Option<f64>,
    pub theta: Option<f64>,
    pub sigma2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BoundFlags {
    pub phi: bool,
    pub theta: bool,
}

/// Result of one optimizer start.
#[derive(Debug, Clone, PartialEq)]
pub struct StartOutcome {
    pub start: (f64, f64),
    pub phi: f64,
    pub theta: f64,
    pub q: f64,
    pub converged: bool,
    pub iterations: usize,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Estimates; `sigma2` is the profile variance and `mu` the level used.
    pub params: ModelParams,
    pub se: StandardErrors,
    pub loglik: f64,
    pub q: f64,
    pub converged: bool,
    pub iterations: usize,
    pub at_bound: BoundFlags,
    pub free: FreeParams,
    pub starts: Vec<StartOutcome>,
    pub n: usize,
}

impl FitResult {
    /// Fewer than three observations: the fit is formally defined but uninformative.
    pub fn short_series(&self) -> bool {
        self.n < 3
    }
}

struct Objective<'a> {
    gaps: &'a [f64],
    y: Vec<f64>,
}

impl Objective<'_> {
    fn q(&self, phi: f64, theta: f64) -> f64 {
        match sums(phi, theta, self.gaps, &self.y).and_then(|s| s.reduced()) {
            Ok(r) => r.q,
            Err(_) => f64::INFINITY,
        }
    }
}

/// Fits `phi` and `theta` by minimizing the reduced likelihood from every
/// start in `options.starts`, keeping the lowest `q` (ties go to the smaller
/// `phi + theta`).
pub fn fit_ml(series: &IrregularSeries, options: &FitOptions) -> Result<FitResult> {
    if let Some(v) = options.fix_phi {
        check_coefficient("phi", v)?;
    }
    if let Some(v) = options.fix_theta {
        check_coefficient("theta", v)?;
    }
    let mu = match options.mean {
        MeanHandling::SampleMean => series.sample_mean(),
        MeanHandling::Fixed(m) => m,
    };
    let y = demean(series, mu);
    if y.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateData);
    }
    let objective = Objective {
        gaps: series.gaps(),
        y,
    };
    let free = FreeParams {
        phi: options.fix_phi.is_none(),
        theta: options.fix_theta.is_none(),
    };
    let upper = 1.0 - BOUND_EPS;

    let assemble = |v: &[f64]| -> (f64, f64) {
        let mut it = v.iter().copied();
        let phi = options.fix_phi.unwrap_or_else(|| it.next().unwrap());
        let theta = options.fix_theta.unwrap_or_else(|| it.next().unwrap());
        (phi, theta)
    };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    for &(p0, t0) in &options.starts {
        let mut v = Vec::with_capacity(2);
        if free.phi {
            v.push(p0);
        }
        if free.theta {
            v.push(t0);
        }
        if !starts.contains(&v) {
            starts.push(v);
        }
    }
    if starts.is_empty() {
        starts.push(Vec::new());
    }

    let dim = free.phi as usize + free.theta as usize;
    let lower = vec![0.0; dim];
    let upper_v = vec![upper; dim];
    let mut outcomes = Vec::with_capacity(starts.len());
    for v0 in &starts {
        let (p0, t0) = assemble(v0);
        let outcome = if dim == 0 {
            StartOutcome {
                start: (p0, t0),
                phi: p0,
                theta: t0,
                q: objective.q(p0, t0),
                converged: true,
                iterations: 0,
                termination: Termination::ProjectedGradient,
            }
        } else {
            let m = minimize_box(
                |v: &[f64]| {
                    let (p, t) = assemble(v);
                    objective.q(p, t)
                },
                v0,
                &lower,
                &upper_v,
                &options.optimizer,
            );
            let (phi, theta) = assemble(&m.x);
            StartOutcome {
                start: (p0, t0),
                phi,
                theta,
                q: m.f,
                converged: m.converged,
                iterations: m.iterations,
                termination: m.termination,
            }
        };
        outcomes.push(outcome);
    }

    let best = outcomes
        .iter()
        .filter(|o| o.q.is_finite())
        .fold(None::<&StartOutcome>, |best, o| match best {
            None => Some(o),
            Some(b) => {
                let tol = 1e-10 * b.q.abs().max(1.0);
                if o.q < b.q - tol || ((o.q - b.q).abs() <= tol && o.phi + o.theta < b.phi + b.theta) {
                    Some(o)
                } else {
                    Some(b)
                }
            }
        })
        .cloned();
    let Some(best) = best else {
        let detail: Vec<String> = outcomes
            .iter()
            .map(|o| format!("start {:?}: {:?}", o.start, o.termination))
            .collect();
        return Err(Error::OptimizerFailed {
            detail: detail.join("; "),
        });
    };

    let reduced = sums(best.phi, best.theta, objective.gaps, &objective.y)?.reduced()?;
    let params = ModelParams::new(best.phi, best.theta, reduced.sigma2)?.with_mu(mu)?;
    let loglik = sums(best.phi, best.theta, objective.gaps, &objective.y)?.loglik(reduced.sigma2);
    let se = if options.standard_errors {
        standard_errors(&params, series, free).unwrap_or_default()
    } else {
        StandardErrors::default()
    };
    let near = |v: f64| v <= 1e-10 || v >= upper - 1e-10;
    Ok(FitResult {
        params,
        se,
        loglik,
        q: reduced.q,
        converged: best.converged,
        iterations: best.iterations,
        at_bound: BoundFlags {
            phi: free.phi && near(best.phi),
            theta: free.theta && near(best.theta),
        },
        free,
        starts: outcomes,
        n: series.len(),
    })
}

#[derive(Clone, Copy)]
enum Stencil {
    Central,
    /// Second-order one-sided stencil in direction `+1` or `-1`.
    OneSided(f64),
}

/// Standard errors from the inverse of the central-difference Hessian of the
/// negative log-likelihood in `(phi, theta, sigma2)` (fixed coefficients
/// dropped). Coordinates too close to a bound for a central stencil use a
/// one-sided one.
pub fn standard_errors(
    params: &ModelParams,
    series: &IrregularSeries,
    free: FreeParams,
) -> Result<StandardErrors> {
    let y = demean(series, params.mu());
    let gaps = series.gaps();
    let (phi0, theta0) = (params.phi(), params.theta());

    let mut x = Vec::with_capacity(3);
    let mut lo = Vec::with_capacity(3);
    let mut hi = Vec::with_capacity(3);
    let upper = 1.0 - BOUND_EPS;
    if free.phi {
        x.push(phi0);
        lo.push(0.0);
        hi.push(upper);
    }
    if free.theta {
        x.push(theta0);
        lo.push(0.0);
        hi.push(upper);
    }
    x.push(params.sigma2());
    lo.push(f64::MIN_POSITIVE);
    hi.push(f64::INFINITY);
    let m = x.len();

    let nll = |v: &[f64]| -> f64 {
        let mut k = 0;
        let phi = if free.phi {
            k += 1;
            v[k - 1]
        } else {
            phi0
        };
        let theta = if free.theta {
            k += 1;
            v[k - 1]
        } else {
            theta0
        };
        let sigma2 = v[k];
        match sums(phi, theta, gaps, &y) {
            Ok(s) => -s.loglik(sigma2),
            Err(_) => f64::NAN,
        }
    };

    let steps: Vec<f64> = x.iter().map(|v| HESSIAN_STEP * v.abs().max(1.0)).collect();
    let stencils: Vec<Stencil> = (0..m)
        .map(|i| {
            let h = steps[i];
            if x[i] - h >= lo[i] && x[i] + h <= hi[i] {
                Stencil::Central
            } else if x[i] + 2.0 * h <= hi[i] {
                Stencil::OneSided(1.0)
            } else {
                Stencil::OneSided(-1.0)
            }
        })
        .collect();

    // first-derivative stencil points (offset, weight)
    let first = |i: usize| -> Vec<(f64, f64)> {
        let h = steps[i];
        match stencils[i] {
            Stencil::Central => vec![(h, 0.5 / h), (-h, -0.5 / h)],
            Stencil::OneSided(s) => {
                let sh = s * h;
                vec![(0.0, -1.5 / sh), (sh, 2.0 / sh), (2.0 * sh, -0.5 / sh)]
            }
        }
    };

    let f0 = nll(&x);
    if !f0.is_finite() {
        return Err(Error::NonFiniteLikelihood);
    }
    let mut probe = x.clone();
    let mut hess = vec![0.0; m * m];
    for i in 0..m {
        let h = steps[i];
        let d2 = match stencils[i] {
            Stencil::Central => {
                probe[i] = x[i] + h;
                let fp = nll(&probe);
                probe[i] = x[i] - h;
                let fm = nll(&probe);
                (fp - 2.0 * f0 + fm) / (h * h)
            }
            Stencil::OneSided(s) => {
                probe[i] = x[i] + s * h;
                let f1 = nll(&probe);
                probe[i] = x[i] + 2.0 * s * h;
                let f2 = nll(&probe);
                (f0 - 2.0 * f1 + f2) / (h * h)
            }
        };
        probe[i] = x[i];
        hess[i * m + i] = d2;
        for j in 0..i {
            let mut acc = 0.0;
            for &(a, wa) in &first(i) {
                for &(b, wb) in &first(j) {
                    probe[i] = x[i] + a;
                    probe[j] = x[j] + b;
                    acc += wa * wb * nll(&probe);
                }
            }
            probe[i] = x[i];
            probe[j] = x[j];
            hess[i * m + j] = acc;
            hess[j * m + i] = acc;
        }
    }
    if hess.iter().any(|v| !v.is_finite()) {
        return Err(Error::StandardErrorUnavailable);
    }

    let inv = spd_inverse(&hess, m).ok_or(Error::StandardErrorUnavailable)?;
    let mut se = StandardErrors::default();
    let mut k = 0;
    if free.phi {
        se.phi = Some(math::sqrt(inv[k * m + k]));
        k += 1;
    }
    if free.theta {
        se.theta = Some(math::sqrt(inv[k * m + k]));
        k += 1;
    }
    se.sigma2 = Some(math::sqrt(inv[k * m + k]));
    Ok(se)
}

/// Inverse of a symmetric positive definite matrix via Cholesky.
fn spd_inverse(a: &[f64], m: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..=i {
            let mut s = a[i * m + j];
            for k in 0..j {
                s -= l[i * m + k] * l[j * m + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * m + i] = math::sqrt(s);
            } else {
                l[i * m + j] = s / l[j * m + j];
            }
        }
    }
    let mut inv = vec![0.0; m * m];
    for col in 0..m {
        let mut z = vec![0.0; m];
        z[col] = 1.0;
        for i in 0..m {
            for k in 0..i {
                z[i] -= l[i * m + k] * z[k];
            }
            z[i] /= l[i * m + i];
        }
        for i in (0..m).rev() {
            for k in i + 1..m {
                z[i] -= l[k * m + i] * z[k];
            }
            z[i] /= l[i * m + i];
        }
        for i in 0..m {
            inv[i * m + col] = z[i];
        }
    }
    Some(inv)
}

/// Two-sided Wald test of a zero coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaldTest {
    pub z: f64,
    pub p_value: f64,
    pub significant: bool,
}

pub fn wald_test(estimate: f64, se: Option<f64>, level: f64) -> Result<WaldTest> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidLevel(level));
    }
    let se = se
        .filter(|s| *s > 0.0 && s.is_finite())
        .ok_or(Error::StandardErrorUnavailable)?;
    let z = estimate / se;
    let p_value = 2.0 * normal_sf(z.abs());
    Ok(WaldTest {
        z,
        p_value,
        significant: p_value < level,
    })
}
