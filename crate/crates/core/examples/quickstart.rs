//! Simulate an irregularly observed path, fit it and forecast one step.

use iarma_core::rng::{stream, Purpose};
use iarma_core::{fit_ml, predict_innovations, simulate, time_grid, FitOptions, GapLaw, ModelParams};

fn main() -> Result<(), iarma_core::Error> {
    let truth = ModelParams::new(0.5, 0.5, 1.0)?;
    let times = time_grid(GapLaw::ShiftedExponential { rate: 1.0 }, 500, &mut stream(1, 0, 0, Purpose::Gaps))?;
    let series = simulate(&truth, &times, &mut stream(1, 0, 0, Purpose::Innovations))?;

    let fit = fit_ml(&series, &FitOptions::default())?;
    println!(
        "phi = {:.3} (se {:.3}), theta = {:.3} (se {:.3}), sigma2 = {:.3}",
        fit.params.phi(),
        fit.se.phi.unwrap_or(f64::NAN),
        fit.params.theta(),
        fit.se.theta.unwrap_or(f64::NAN),
        fit.params.sigma2(),
    );

    let trace = predict_innovations(&fit.params, &series)?;
    let last = series.len() - 1;
    println!("last prediction {:.3}, observed {:.3}", trace.xhat[last], series.values()[last]);
    Ok(())
}
