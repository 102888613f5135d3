//! Brute-force reference computations for cross-checking the iARMA
//! recursions: dense Gaussian densities and the general innovations
//! algorithm on an explicit covariance matrix.

use nalgebra::{DMatrix, DVector};

/// Builds the symmetric `n x n` matrix with entries `cov(i, j)` for `i <= j`.
pub fn covariance_matrix(n: usize, cov: impl Fn(usize, usize) -> f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = cov(i, j);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Log-density of `N(0, cov)` at `x`, via Cholesky.
pub fn dense_gaussian_loglik(cov: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len();
    let chol = cov.clone().cholesky().expect("covariance not positive definite");
    let l = chol.l();
    let log_det: f64 = 2.0 * (0..n).map(|i| l[(i, i)].ln()).sum::<f64>();
    let z = chol.solve(&DVector::from_column_slice(x));
    let quad = DVector::from_column_slice(x).dot(&z);
    -0.5 * (n as f64) * (2.0 * std::f64::consts::PI).ln() - 0.5 * log_det - 0.5 * quad
}

/// Reduced likelihood `ln(x' R^{-1} x / N) + ln det(R) / N` for a unit-scale
/// correlation-type matrix `r` (covariance divided by `sigma2`).
pub fn dense_reduced_likelihood(r: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let chol = r.clone().cholesky().expect("matrix not positive definite");
    let l = chol.l();
    let log_det: f64 = 2.0 * (0..x.len()).map(|i| l[(i, i)].ln()).sum::<f64>();
    let xv = DVector::from_column_slice(x);
    let quad = xv.dot(&chol.solve(&xv));
    (quad / n).ln() + log_det / n
}

/// Classical ARMA(1,1) autocovariance `γ(h)` for
/// `X_t = phi X_{t-1} + Z_t + theta Z_{t-1}`, `Var Z = sigma2`.
pub fn arma11_autocov(phi: f64, theta: f64, sigma2: f64, lag: usize) -> f64 {
    let denom = 1.0 - phi * phi;
    match lag {
        0 => sigma2 * (1.0 + 2.0 * phi * theta + theta * theta) / denom,
        _ => sigma2 * (phi + theta) * (1.0 + phi * theta) / denom * phi.powi(lag as i32 - 1),
    }
}

/// Covariance of the observations at `times[i]` and `times[j]` of a
/// stationary iARMA process: `sigma2 c_1` on the diagonal and, for `i < j`,
/// `phi^(t_j - t_{i+1}) sigma2 (phi^Δ c_1 + theta^Δ)` with `Δ = t_{i+1} - t_i`.
pub fn iarma_autocov(phi: f64, theta: f64, sigma2: f64, times: &[f64], i: usize, j: usize) -> f64 {
    let (i, j) = (i.min(j), i.max(j));
    let c1 = (1.0 + 2.0 * phi * theta + theta * theta) / (1.0 - phi * phi);
    if i == j {
        return sigma2 * c1;
    }
    let d = times[i + 1] - times[i];
    let lag_one = sigma2 * (phi.powf(d) * c1 + theta.powf(d));
    lag_one * phi.powf(times[j] - times[i + 1])
}

/// Output of the general innovations algorithm.
pub struct Innovations {
    /// `v[n]` is the MSE of the prediction of `x[n]` (0-based).
    pub v: Vec<f64>,
    /// One-step predictions `x̂[n]`.
    pub xhat: Vec<f64>,
}

/// Innovations algorithm for a zero-mean series with covariance
/// `kappa(i, j)` (0-based indices), `O(N^2)` coefficients.
pub fn innovations_algorithm(x: &[f64], kappa: impl Fn(usize, usize) -> f64) -> Innovations {
    let n = x.len();
    // theta[m][j] holds θ_{m, j} for j in 1..=m
    let mut theta: Vec<Vec<f64>> = vec![vec![]; n];
    let mut v = vec![0.0; n];
    v[0] = kappa(0, 0);
    for m in 1..n {
        theta[m] = vec![0.0; m + 1];
        for k in 0..m {
            let mut s = kappa(m, k);
            for j in 0..k {
                s -= theta[k][k - j] * theta[m][m - j] * v[j];
            }
            theta[m][m - k] = s / v[k];
        }
        let mut vm = kappa(m, m);
        for j in 0..m {
            vm -= theta[m][m - j].powi(2) * v[j];
        }
        v[m] = vm;
    }
    let mut xhat = vec![0.0; n];
    for m in 1..n {
        let mut s = 0.0;
        for j in 1..=m {
            s += theta[m][j] * (x[m - j] - xhat[m - j]);
        }
        xhat[m] = s;
    }
    Innovations { v, xhat }
}
