//! Monte Carlo harness, file formats and command-line driver for the
//! irregularly observed ARMA(1,1) model in [`iarma_core`].

pub mod cli;
pub mod io;
pub mod montecarlo;
