//! Bound-constrained quasi-Newton minimization with finite-difference
//! gradients.
//!
//! Each iteration fixes the variables held at a bound by the gradient,
//! solves the BFGS model on the remaining ones and backtracks along the
//! projected path until the Armijo condition holds.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxOptions {
    pub max_iter: usize,
    /// Stop when `‖P(x - g) - x‖∞` falls below this.
    pub grad_tol: f64,
    /// Stop when an accepted step changes `f` by less than `rel_tol · max(1, |f|)`.
    pub rel_tol: f64,
}

impl Default for BoxOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            grad_tol: 1e-8,
            rel_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ProjectedGradient,
    RelativeChange,
    LineSearch,
    MaxIterations,
    NonFiniteStart,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub termination: Termination,
    /// Infinity norm of the projected gradient at `x`.
    pub projected_grad: f64,
}

// A line-search stall is still accepted as convergence below this gradient size.
const STALL_GRAD_TOL: f64 = 1e-6;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACK: usize = 60;

struct Counted<F> {
    f: F,
    calls: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.calls += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

/// Central-difference step `cbrt(ε) max(1, |x|)`.
pub fn fd_step(x: f64) -> f64 {
    math::cbrt(f64::EPSILON) * x.abs().max(1.0)
}

fn gradient<F: FnMut(&[f64]) -> f64>(
    f: &mut Counted<F>,
    x: &[f64],
    fx: f64,
    lower: &[f64],
    upper: &[f64],
    g: &mut [f64],
) {
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let h = fd_step(x[i]);
        let xi = x[i];
        g[i] = if xi - h >= lower[i] && xi + h <= upper[i] {
            probe[i] = xi + h;
            let fp = f.eval(&probe);
            probe[i] = xi - h;
            let fm = f.eval(&probe);
            (fp - fm) / (2.0 * h)
        } else {
            // one-sided second-order stencil pointing into the box
            let s = if xi + 2.0 * h <= upper[i] { h } else { -h };
            probe[i] = xi + s;
            let f1 = f.eval(&probe);
            probe[i] = xi + 2.0 * s;
            let f2 = f.eval(&probe);
            (-3.0 * fx + 4.0 * f1 - f2) / (2.0 * s)
        };
        probe[i] = xi;
    }
}

fn project(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lower[i], upper[i]);
    }
}

fn projected_grad_norm(x: &[f64], g: &[f64], lower: &[f64], upper: &[f64]) -> f64 {
    (0..x.len())
        .map(|i| ((x[i] - g[i]).clamp(lower[i], upper[i]) - x[i]).abs())
        .fold(0.0, f64::max)
}

/// Solves `A z = b` for a small symmetric positive definite `A` (row-major,
/// dimension `m`); `None` if `A` is not positive definite.
fn cholesky_solve(a: &[f64], b: &[f64], m: usize) -> Option<Vec<f64>> {
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
    let mut z = b.to_vec();
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
    Some(z)
}

/// Minimizes `f` over the box `[lower, upper]` starting from `x0` (projected
/// into the box). Non-finite function values are treated as `+inf`.
pub fn minimize_box<F>(f: F, x0: &[f64], lower: &[f64], upper: &[f64], opts: &BoxOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    assert!(lower.len() == n && upper.len() == n, "bound dimension mismatch");
    let mut f = Counted { f, calls: 0 };

    let mut x = x0.to_vec();
    project(&mut x, lower, upper);
    let mut fx = f.eval(&x);
    if !fx.is_finite() {
        return Minimum {
            x,
            f: fx,
            iterations: 0,
            evaluations: f.calls,
            converged: false,
            termination: Termination::NonFiniteStart,
            projected_grad: f64::INFINITY,
        };
    }

    let mut g = vec![0.0; n];
    gradient(&mut f, &x, fx, lower, upper, &mut g);
    let mut b = identity(n);
    let mut b_is_identity = true;
    let mut scaled = false;
    let mut pg = projected_grad_norm(&x, &g, lower, upper);

    let mut iterations = 0;
    let termination = loop {
        if pg < opts.grad_tol {
            break Termination::ProjectedGradient;
        }
        if iterations >= opts.max_iter {
            break Termination::MaxIterations;
        }
        iterations += 1;

        let free: Vec<usize> = (0..n)
            .filter(|&i| {
                let at_lower = x[i] <= lower[i] && g[i] > 0.0;
                let at_upper = x[i] >= upper[i] && g[i] < 0.0;
                !(at_lower || at_upper)
            })
            .collect();
        let m = free.len();
        let mut d = vec![0.0; n];
        if m > 0 {
            let sub: Vec<f64> = free
                .iter()
                .flat_map(|&i| free.iter().map(move |&j| (i, j)))
                .map(|(i, j)| b[i * n + j])
                .collect();
            let rhs: Vec<f64> = free.iter().map(|&i| -g[i]).collect();
            match cholesky_solve(&sub, &rhs, m) {
                Some(z) => {
                    for (k, &i) in free.iter().enumerate() {
                        d[i] = z[k];
                    }
                }
                None => {
                    b = identity(n);
                    b_is_identity = true;
                    scaled = false;
                    for &i in &free {
                        d[i] = -g[i];
                    }
                }
            }
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACK {
            let mut trial: Vec<f64> = (0..n).map(|i| x[i] + alpha * d[i]).collect();
            project(&mut trial, lower, upper);
            let decrease: f64 = (0..n).map(|i| g[i] * (trial[i] - x[i])).sum();
            if decrease >= 0.0 {
                // projection removed the descent component
                alpha *= 0.5;
                continue;
            }
            let ft = f.eval(&trial);
            if ft <= fx + ARMIJO * decrease {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }

        let Some((x_new, f_new)) = accepted else {
            if b_is_identity {
                break Termination::LineSearch;
            }
            b = identity(n);
            b_is_identity = true;
            scaled = false;
            continue;
        };

        let mut g_new = vec![0.0; n];
        gradient(&mut f, &x_new, f_new, lower, upper, &mut g_new);
        let s: Vec<f64> = (0..n).map(|i| x_new[i] - x[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| g_new[i] - g[i]).collect();
        let sy: f64 = dot(&s, &y);
        if sy > 1e-10 * math::sqrt(dot(&s, &s) * dot(&y, &y)) {
            if !scaled {
                let gamma = dot(&y, &y) / sy;
                b = identity(n);
                b.iter_mut().for_each(|v| *v *= gamma);
                scaled = true;
            }
            let bs: Vec<f64> = (0..n).map(|i| (0..n).map(|j| b[i * n + j] * s[j]).sum()).collect();
            let sbs = dot(&s, &bs);
            if sbs > 0.0 {
                for i in 0..n {
                    for j in 0..n {
                        b[i * n + j] += y[i] * y[j] / sy - bs[i] * bs[j] / sbs;
                    }
                }
                b_is_identity = false;
            }
        }

        let change = (fx - f_new).abs();
        x = x_new;
        fx = f_new;
        g = g_new;
        pg = projected_grad_norm(&x, &g, lower, upper);
        if pg < opts.grad_tol {
            break Termination::ProjectedGradient;
        }
        if change <= opts.rel_tol * fx.abs().max(1.0) {
            break Termination::RelativeChange;
        }
    };

    let converged = match termination {
        Termination::ProjectedGradient | Termination::RelativeChange => true,
        Termination::LineSearch => pg < STALL_GRAD_TOL,
        Termination::MaxIterations | Termination::NonFiniteStart => false,
    };
    Minimum {
        x,
        f: fx,
        iterations,
        evaluations: f.calls,
        converged,
        termination,
        projected_grad: pg,
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
