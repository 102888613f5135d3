//! Monte Carlo study of the maximum-likelihood estimator: simulate `M`
//! replicates per design cell, fit each, and aggregate.
//!
//! Replicate `m` of cell `c` draws its gaps and innovations from the streams
//! `(seed, c, m)` (see [`iarma_core::rng`]), so every cell and replicate is
//! reproducible on its own and results do not depend on thread scheduling.
//! Aggregates are summed in replicate order.

use iarma_core::rng::{stream, Purpose};
use iarma_core::{
    estimate::BoundFlags, fit_ml, sample_gaps, simulate_values, Error, FitOptions, GapLaw,
    IrregularSeries,
    MeanHandling, ModelParams, StandardErrors,
};
use rayon::prelude::*;

/// Whether replicates share one time grid or draw their own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridMode {
    /// Fresh gaps for every replicate.
    #[default]
    Redraw,
    /// Gaps drawn once from replicate 0's stream and reused.
    Fixed,
}

/// One cell of the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub n: usize,
    pub phi: f64,
    pub theta: f64,
    pub sigma2: f64,
    pub gaps: GapLaw,
    pub m: usize,
    pub seed: u64,
    pub mean: MeanHandling,
    pub grid: GridMode,
}

impl Design {
    pub fn new(n: usize, phi: f64, theta: f64, gaps: GapLaw, m: usize, seed: u64) -> Self {
        Self {
            n,
            phi,
            theta,
            sigma2: 1.0,
            gaps,
            m,
            seed,
            mean: MeanHandling::SampleMean,
            grid: GridMode::Redraw,
        }
    }

    fn validate(&self) -> Result<ModelParams, Error> {
        let params = ModelParams::new(self.phi, self.theta, self.sigma2)?;
        if self.m < 2 {
            return Err(Error::TooShort {
                needed: 2,
                got: self.m,
            });
        }
        if self.n < 3 {
            return Err(Error::TooShort {
                needed: 3,
                got: self.n,
            });
        }
        if let GapLaw::ShiftedExponential { rate } = self.gaps {
            GapLaw::shifted_exponential(rate)?;
        }
        Ok(params)
    }
}

/// The experiment grid with `phi = 0.5`, `theta ∈ {0.1, 0.5, 0.9}`,
/// `N ∈ {100, 500, 1500}` and gaps `1 + Exp(1)`, ordered by `N` then `theta`.
pub fn reference_grid(m: usize, seed: u64) -> Vec<Design> {
    let law = GapLaw::ShiftedExponential { rate: 1.0 };
    [100, 500, 1500]
        .into_iter()
        .flat_map(|n| [0.1, 0.5, 0.9].map(|theta| Design::new(n, 0.5, theta, law, m, seed)))
        .collect()
}

/// Estimates from one replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateFit {
    pub phi: f64,
    pub theta: f64,
    pub sigma2: f64,
    pub se: StandardErrors,
    pub at_bound: BoundFlags,
    pub converged: bool,
}

/// Simulates and fits replicate `replicate` of cell `cell`.
pub fn run_replicate(design: &Design, cell: u64, replicate: u64) -> Result<ReplicateFit, Error> {
    let params = design.validate()?;
    let gap_replicate = match design.grid {
        GridMode::Redraw => replicate,
        GridMode::Fixed => 0,
    };
    let gaps = sample_gaps(
        design.gaps,
        design.n - 1,
        &mut stream(design.seed, cell, gap_replicate, Purpose::Gaps),
    )?;
    let values = simulate_values(
        &params,
        &gaps,
        &mut stream(design.seed, cell, replicate, Purpose::Innovations),
    )?;
    let mut times = Vec::with_capacity(design.n);
    let mut t = 1.0;
    times.push(t);
    for g in &gaps {
        t += g;
        times.push(t);
    }
    let series = IrregularSeries::new(times, values)?;
    let fit = fit_ml(
        &series,
        &FitOptions {
            mean: design.mean,
            ..FitOptions::default()
        },
    )?;
    Ok(ReplicateFit {
        phi: fit.params.phi(),
        theta: fit.params.theta(),
        sigma2: fit.params.sigma2(),
        se: fit.se,
        at_bound: fit.at_bound,
        converged: fit.converged,
    })
}

/// Aggregates for one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSummary {
    pub truth: f64,
    /// Mean estimate over replicates.
    pub mean: f64,
    /// Mean of the estimated standard errors.
    pub se_hat: f64,
    /// Standard deviation of the estimates (divisor `M - 1`).
    pub se_emp: f64,
    pub bias: f64,
    /// `sqrt(se_hat^2 + bias^2)`
    pub rmse: f64,
    /// `se_hat / |mean|`
    pub cv: f64,
    /// Monte Carlo error `se_emp / sqrt(M)`.
    pub mce: f64,
    /// Replicates whose standard error was unavailable.
    pub se_missing: usize,
}

/// Aggregates estimates and their standard errors, summing in slice order.
pub fn summarize(truth: f64, estimates: &[f64], ses: &[Option<f64>]) -> ParamSummary {
    let m = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / m;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let se_emp = var.sqrt();
    let available: Vec<f64> = ses.iter().flatten().copied().collect();
    let se_hat = available.iter().sum::<f64>() / available.len() as f64;
    let bias = mean - truth;
    ParamSummary {
        truth,
        mean,
        se_hat,
        se_emp,
        bias,
        rmse: (se_hat * se_hat + bias * bias).sqrt(),
        cv: se_hat / mean.abs(),
        mce: se_emp / m.sqrt(),
        se_missing: ses.len() - available.len(),
    }
}

/// Aggregated results of one design cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MCCell {
    pub design: Design,
    pub cell: u64,
    pub phi: ParamSummary,
    pub theta: ParamSummary,
    pub sigma2: ParamSummary,
    /// Replicates entering the aggregates.
    pub used: usize,
    /// Replicates that errored or did not converge.
    pub failures: usize,
    /// More than 1% of replicates failed.
    pub flagged: bool,
}

/// Builds a cell from replicate outcomes listed in replicate order;
/// errored and non-converged fits are excluded and counted. A coefficient
/// estimated on a bound contributes its estimate but not its standard error.
pub fn aggregate(
    design: &Design,
    cell: u64,
    replicates: &[Result<ReplicateFit, Error>],
) -> Result<MCCell, Error> {
    let ok: Vec<&ReplicateFit> = replicates
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .filter(|r| r.converged)
        .collect();
    let failures = replicates.len() - ok.len();
    if ok.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: ok.len(),
        });
    }
    let pick = |f: fn(&ReplicateFit) -> f64, s: fn(&StandardErrors) -> Option<f64>| {
        let est: Vec<f64> = ok.iter().map(|r| f(r)).collect();
        let se: Vec<Option<f64>> = ok.iter().map(|r| s(&r.se)).collect();
        (est, se)
    };
    let (pe, mut ps) = pick(|r| r.phi, |s| s.phi);
    let (te, mut ts) = pick(|r| r.theta, |s| s.theta);
    let (se_, ss) = pick(|r| r.sigma2, |s| s.sigma2);
    for (k, r) in ok.iter().enumerate() {
        if r.at_bound.phi {
            ps[k] = None;
        }
        if r.at_bound.theta {
            ts[k] = None;
        }
    }
    Ok(MCCell {
        design: design.clone(),
        cell,
        phi: summarize(design.phi, &pe, &ps),
        theta: summarize(design.theta, &te, &ts),
        sigma2: summarize(design.sigma2, &se_, &ss),
        used: ok.len(),
        failures,
        flagged: failures * 100 > replicates.len(),
    })
}

/// Runs all replicates of a cell in parallel.
pub fn run_cell(design: &Design, cell: u64) -> Result<MCCell, Error> {
    design.validate()?;
    let replicates: Vec<Result<ReplicateFit, Error>> = (0..design.m as u64)
        .into_par_iter()
        .map(|m| run_replicate(design, cell, m))
        .collect();
    aggregate(design, cell, &replicates)
}

/// Outcome of one grid entry; an error affects only its own cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub design: Design,
    pub result: Result<MCCell, Error>,
}

/// Runs every design; cell `i` uses cell index `i` for its seed streams.
pub fn run_grid(designs: &[Design]) -> Vec<CellOutcome> {
    designs
        .iter()
        .enumerate()
        .map(|(i, d)| CellOutcome {
            design: d.clone(),
            result: run_cell(d, i as u64),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold() {
        let est = [0.4, 0.55, 0.61, 0.47, 0.52];
        let se = [Some(0.1), Some(0.12), None, Some(0.09), Some(0.11)];
        let s = summarize(0.5, &est, &se);
        assert!((s.rmse.powi(2) - (s.se_hat.powi(2) + s.bias.powi(2))).abs() < 1e-12);
        assert!((s.mce - s.se_emp / 5f64.sqrt()).abs() < 1e-15);
        assert!((s.cv - s.se_hat / s.mean.abs()).abs() < 1e-15);
        assert_eq!(s.se_missing, 1);
        assert!((s.se_hat - 0.105).abs() < 1e-15);
    }

    #[test]
    fn identical_replicates_have_zero_spread() {
        let d = Design::new(50, 0.5, 0.5, GapLaw::ShiftedExponential { rate: 1.0 }, 2, 3);
        let rep = run_replicate(&d, 0, 0).unwrap();
        let cell = aggregate(&d, 0, &[Ok(rep), Ok(rep)]).unwrap();
        assert_eq!(cell.theta.se_emp, 0.0);
        assert_eq!(cell.theta.mce, 0.0);
        assert_eq!(cell.phi.mce, 0.0);
    }

    #[test]
    fn invalid_designs() {
        let law = GapLaw::Regular;
        assert!(run_cell(&Design::new(50, 1.0, 0.5, law, 10, 1), 0).is_err());
        assert!(run_cell(&Design::new(50, 0.5, -0.1, law, 10, 1), 0).is_err());
        assert!(run_cell(&Design::new(50, 0.5, 0.5, law, 1, 1), 0).is_err());
        assert!(run_grid(&[]).is_empty());
    }

    #[test]
    fn failures_are_counted_and_flagged() {
        let d = Design::new(50, 0.5, 0.5, GapLaw::Regular, 3, 3);
        let rep = run_replicate(&d, 0, 0).unwrap();
        let bad = ReplicateFit {
            converged: false,
            ..rep
        };
        let cell = aggregate(&d, 0, &[Ok(rep), Ok(rep), Ok(bad), Err(Error::DegenerateData)]).unwrap();
        assert_eq!(cell.used, 2);
        assert_eq!(cell.failures, 2);
        assert!(cell.flagged);
    }

    #[test]
    fn fixed_grid_shares_gaps() {
        let mut d = Design::new(30, 0.5, 0.5, GapLaw::ShiftedExponential { rate: 1.0 }, 2, 3);
        d.grid = GridMode::Fixed;
        let a = run_replicate(&d, 0, 0).unwrap();
        let b = run_replicate(&d, 0, 1).unwrap();
        assert_ne!(a.phi, b.phi);
    }

    #[test]
    fn bound_estimates_drop_their_standard_error() {
        let d = Design::new(50, 0.5, 0.5, GapLaw::Regular, 2, 3);
        let rep = ReplicateFit {
            phi: 0.5,
            theta: 0.4,
            sigma2: 1.0,
            se: StandardErrors {
                phi: Some(0.1),
                theta: Some(0.2),
                sigma2: Some(0.3),
            },
            at_bound: BoundFlags::default(),
            converged: true,
        };
        let edge = ReplicateFit {
            theta: 0.0,
            se: StandardErrors {
                theta: Some(0.01),
                ..rep.se
            },
            at_bound: BoundFlags {
                phi: false,
                theta: true,
            },
            ..rep
        };
        let cell = aggregate(&d, 0, &[Ok(rep), Ok(edge)]).unwrap();
        assert_eq!(cell.theta.se_missing, 1);
        assert_eq!(cell.theta.se_hat, 0.2);
        assert_eq!(cell.theta.mean, 0.2);
        assert_eq!(cell.phi.se_missing, 0);
    }
}
