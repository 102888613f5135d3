//! Cross-checks of the recursions against brute-force dense computations.

mod common;

use common::{dense_covariance, random_params, random_times, rng};
use iarma_core::optimize::{minimize_box, BoxOptions};
use iarma_core::rng::{stream, Purpose};
use iarma_core::{
    cf_sequence, fit_ml, loglik, predict_innovations, predict_statespace, profile_loglik,
    reduced_likelihood, simulate, time_grid, FitOptions, GapLaw, IrregularSeries, MeanHandling,
    ModelParams,
};
use iarma_testkit::{
    arma11_autocov, covariance_matrix, dense_gaussian_loglik, dense_reduced_likelihood,
    iarma_autocov, innovations_algorithm,
};
use rand::Rng;

#[test]
fn loglik_matches_dense_covariance() {
    let mut r = rng(1);
    for _ in 0..200 {
        let n = r.random_range(1..=50);
        let params = random_params(&mut r, 0.95);
        let times = random_times(&mut r, n);
        let values: Vec<f64> = (0..n).map(|_| params.mu() + r.random_range(-3.0..3.0)).collect();
        let series = IrregularSeries::new(times.clone(), values.clone()).unwrap();
        let ll = loglik(&params, &series).unwrap();

        let cov = dense_covariance(&params, &times);
        let centred: Vec<f64> = values.iter().map(|v| v - params.mu()).collect();
        let oracle = dense_gaussian_loglik(&cov, &centred);
        assert!((ll - oracle).abs() < 1e-8, "n={n} {params:?}: {ll} vs {oracle}");
    }
}

#[test]
fn autocovariance_matches_reference() {
    let mut r = rng(7);
    for _ in 0..200 {
        let n = r.random_range(1..=30);
        let params = random_params(&mut r, 0.99);
        let times = random_times(&mut r, n);
        let lib = dense_covariance(&params, &times);
        let reference = covariance_matrix(n, |i, j| {
            iarma_autocov(params.phi(), params.theta(), params.sigma2(), &times, i, j)
        });
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (lib[(i, j)], reference[(i, j)]);
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "({i},{j}): {a} vs {b}");
            }
        }
    }
}

#[test]
fn unit_grid_matches_classical_innovations() {
    let mut r = rng(2);
    for _ in 0..20 {
        let phi = r.random_range(0.0..0.95);
        let theta = r.random_range(0.0..0.95);
        let sigma2 = r.random_range(0.5..2.0);
        let params = ModelParams::new(phi, theta, sigma2).unwrap();
        let n = 100;
        let values: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let series = IrregularSeries::regular(values.clone()).unwrap();
        let cf = cf_sequence(&params, series.gaps()).unwrap();
        let trace = predict_innovations(&params, &series).unwrap();
        let inn = innovations_algorithm(&values, |i, j| {
            arma11_autocov(phi, theta, sigma2, i.abs_diff(j))
        });
        for k in 0..n {
            assert!((cf.c[k] - inn.v[k] / sigma2).abs() < 1e-10, "c_{k}");
            assert!((trace.xhat[k] - inn.xhat[k]).abs() < 1e-10, "xhat_{k}");
        }
    }
}

#[test]
fn irregular_grid_matches_general_innovations() {
    let mut r = rng(3);
    for _ in 0..50 {
        let n = r.random_range(2..=60);
        let params = random_params(&mut r, 0.95);
        let times = random_times(&mut r, n);
        let values: Vec<f64> = (0..n).map(|_| params.mu() + r.random_range(-2.0..2.0)).collect();
        let series = IrregularSeries::new(times.clone(), values.clone()).unwrap();
        let cov = dense_covariance(&params, &times);
        let centred: Vec<f64> = values.iter().map(|v| v - params.mu()).collect();
        let inn = innovations_algorithm(&centred, |i, j| cov[(i, j)]);
        let trace = predict_innovations(&params, &series).unwrap();
        for k in 0..n {
            assert!((trace.c[k] * params.sigma2() - inn.v[k]).abs() < 1e-9 * inn.v[k].max(1.0));
            assert!((trace.xhat[k] - params.mu() - inn.xhat[k]).abs() < 1e-9);
        }
    }
}

#[test]
fn state_space_agrees_with_innovations() {
    let mut r = rng(4);
    for _ in 0..1000 {
        let n = r.random_range(1..=80);
        let params = random_params(&mut r, 0.999);
        let times = random_times(&mut r, n);
        let values: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
        let series = IrregularSeries::new(times, values).unwrap();
        let a = predict_innovations(&params, &series).unwrap();
        let (_, b) = predict_statespace(&params, &series).unwrap();
        for k in 0..n {
            assert!((a.xhat[k] - b.xhat[k]).abs() < 1e-10);
        }
        assert_eq!(a.c, b.c);
    }
}

#[test]
fn simulated_state_space_equivalence() {
    let params = ModelParams::new(0.5, 0.5, 1.0).unwrap();
    let law = GapLaw::shifted_exponential(1.0).unwrap();
    for rep in 0..20 {
        let times = time_grid(law, 200, &mut stream(9, 0, rep, Purpose::Gaps)).unwrap();
        let series = simulate(&params, &times, &mut stream(9, 0, rep, Purpose::Innovations)).unwrap();
        let a = predict_innovations(&params, &series).unwrap();
        let (_, b) = predict_statespace(&params, &series).unwrap();
        let max = a.xhat.iter().zip(&b.xhat).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(max < 1e-10);
    }
}

/// Kalman filter on the correlated-disturbance form
/// `X_n = α_n + ε_n`, `α_{n+1} = φ^Δ α_n + (φ^Δ + θ^Δ/c_n) ε_n`: the state
/// variance stays at zero and the predictions coincide with the scalar recursion.
#[test]
fn correlated_disturbance_kalman_filter() {
    let mut r = rng(5);
    for _ in 0..100 {
        let n = r.random_range(2..=60);
        let params = random_params(&mut r, 0.95);
        let times = random_times(&mut r, n);
        let values: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
        let series = IrregularSeries::new(times, values).unwrap();
        let cf = cf_sequence(&params, series.gaps()).unwrap();
        let (phi, theta, s2) = (params.phi(), params.theta(), params.sigma2());

        let (mut a, mut p) = (0.0, 0.0);
        let mut preds = vec![];
        for k in 0..n {
            preds.push(a + params.mu());
            let v = series.values()[k] - params.mu() - a;
            let f = p + s2 * cf.c[k];
            if k + 1 < n {
                let d = series.gaps()[k];
                let ar = phi.powf(d);
                let g = ar + theta.powf(d) / cf.c[k];
                let gain = (ar * p + g * s2 * cf.c[k]) / f;
                a = ar * a + gain * v;
                p = ar * ar * p + g * g * s2 * cf.c[k] - gain * gain * f;
                assert!(p.abs() < 1e-9 * (1.0 + g * g * s2 * cf.c[k]));
            }
        }
        let trace = predict_innovations(&params, &series).unwrap();
        for k in 0..n {
            assert!((preds[k] - trace.xhat[k]).abs() < 1e-9);
        }
    }
}

#[test]
fn profile_identity() {
    let params = ModelParams::new(0.6, 0.4, 2.0).unwrap();
    let law = GapLaw::shifted_exponential(1.0).unwrap();
    let times = time_grid(law, 120, &mut stream(3, 0, 0, Purpose::Gaps)).unwrap();
    let series = simulate(&params, &times, &mut stream(3, 0, 0, Purpose::Innovations)).unwrap();
    for i in 0..20 {
        for j in 0..20 {
            let (phi, theta) = (i as f64 * 0.05, j as f64 * 0.05);
            let red = reduced_likelihood(phi, theta, &series, 0.0).unwrap();
            let p = ModelParams::new(phi, theta, red.sigma2).unwrap();
            let ll = loglik(&p, &series).unwrap();
            let expected = profile_loglik(&red, series.len());
            assert!((ll - expected).abs() < 1e-10 * expected.abs().max(1.0), "{phi} {theta}");
        }
    }
}

#[test]
fn reduced_likelihood_matches_dense() {
    let mut r = rng(6);
    for _ in 0..50 {
        let n = r.random_range(2..=40);
        let params = random_params(&mut r, 0.9);
        let times = random_times(&mut r, n);
        let values: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let series = IrregularSeries::new(times.clone(), values.clone()).unwrap();
        let unit = ModelParams::new(params.phi(), params.theta(), 1.0).unwrap();
        let red = reduced_likelihood(params.phi(), params.theta(), &series, 0.0).unwrap();
        let oracle = dense_reduced_likelihood(&dense_covariance(&unit, &times), &values);
        assert!((red.q - oracle).abs() < 1e-9);
    }
}

/// Minimizes the dense classical-ARMA(1,1) reduced likelihood with the same
/// optimizer and starts as `fit_ml`.
fn dense_arma11_fit(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let q = |v: &[f64]| {
        let r = covariance_matrix(n, |i, j| arma11_autocov(v[0], v[1], 1.0, j - i));
        dense_reduced_likelihood(&r, values)
    };
    let upper = 1.0 - iarma_core::estimate::BOUND_EPS;
    let mut best: Option<(f64, f64, f64)> = None;
    for start in [[0.2, 0.2], [0.2, 0.7], [0.7, 0.2], [0.7, 0.7]] {
        let m = minimize_box(q, &start, &[0.0, 0.0], &[upper, upper], &BoxOptions::default());
        if best.is_none_or(|b| m.f < b.2 - 1e-10) {
            best = Some((m.x[0], m.x[1], m.f));
        }
    }
    let b = best.unwrap();
    (b.0, b.1)
}

#[test]
fn unit_grid_fit_matches_dense_arma11_fit() {
    let params = ModelParams::new(0.5, 0.4, 1.0).unwrap();
    for rep in 0..3 {
        let times = time_grid(GapLaw::Regular, 150, &mut stream(21, 0, rep, Purpose::Gaps)).unwrap();
        let series = simulate(&params, &times, &mut stream(21, 0, rep, Purpose::Innovations)).unwrap();
        let opts = FitOptions {
            mean: MeanHandling::Fixed(0.0),
            standard_errors: false,
            ..FitOptions::default()
        };
        let fit = fit_ml(&series, &opts).unwrap();
        let (phi, theta) = dense_arma11_fit(series.values());
        assert!((fit.params.phi() - phi).abs() < 1e-5, "{} vs {phi}", fit.params.phi());
        assert!((fit.params.theta() - theta).abs() < 1e-5, "{} vs {theta}", fit.params.theta());
    }
}
