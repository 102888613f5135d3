//! First-order autoregressive moving average model for series observed at
//! irregularly spaced times (iARMA).
//!
//! The crate is `no_std` (with `alloc`); enable the `std` feature to use the
//! platform math library instead of `libm`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cf;
pub mod diagnostics;
mod error;
pub mod estimate;
pub mod likelihood;
mod math;
pub mod moments;
pub mod optimize;
mod params;
pub mod predict;
pub mod rng;
pub mod series;
pub mod simulate;
pub mod special;

pub use cf::{cf_sequence, theta_lower_bound, CfSequence};
pub use diagnostics::{acf, ljung_box, qq_data, AcfEstimate, LjungBoxResult};
pub use error::{Error, Result};
pub use estimate::{
    fit_ml, standard_errors, wald_test, FitOptions, FitResult, FreeParams, MeanHandling,
    StandardErrors, WaldTest,
};
pub use likelihood::{loglik, profile_loglik, reduced_likelihood, ReducedLikelihood};
pub use moments::{autocorr, autocov, gamma0, gamma1, rho1};
pub use params::ModelParams;
pub use predict::{
    forecast_bands, predict_innovations, predict_statespace, Band, InnovationTrace, ScaleSource,
    StateTrace,
};
pub use series::{IrregularSeries, Rescale};
pub use simulate::{sample_gaps, simulate, simulate_values, time_grid, GapLaw};
