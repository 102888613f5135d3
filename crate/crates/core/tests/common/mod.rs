#![allow(dead_code)]

use iarma_core::{autocov, ModelParams};
use iarma_testkit::covariance_matrix;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random increasing times with gaps >= 1: a mix of unit, integer and
/// continuous gaps.
pub fn random_times<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut t = rng.random_range(0.0..10.0);
    let mut out = vec![t];
    for _ in 1..n {
        let g = match rng.random_range(0..3) {
            0 => 1.0,
            1 => rng.random_range(1..5) as f64,
            _ => 1.0 - rng.random::<f64>().ln(),
        };
        t += g;
        out.push(t);
    }
    out
}

pub fn random_params<R: Rng>(rng: &mut R, max_coef: f64) -> ModelParams {
    ModelParams::new(
        rng.random_range(0.0..max_coef),
        rng.random_range(0.0..max_coef),
        rng.random_range(0.1..5.0),
    )
    .unwrap()
    .with_mu(rng.random_range(-3.0..3.0))
    .unwrap()
}

/// Dense covariance matrix assembled entrywise from `autocov`.
pub fn dense_covariance(params: &ModelParams, times: &[f64]) -> DMatrix<f64> {
    covariance_matrix(times.len(), |i, j| {
        let next = if i + 1 < times.len() { times[i + 1] } else { times[i] + 1.0 };
        autocov(params, times[i], next, times[j]).unwrap()
    })
}
