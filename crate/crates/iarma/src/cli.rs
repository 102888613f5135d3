//! Command-line driver.
//!
//! Exit codes: 0 success, 2 validation (bad flags, malformed or invalid
//! input), 3 I/O, 4 numerical failure.
//!
//! `--config FILE` supplies flags as `key=value` lines (`key` is the long
//! flag name; booleans take `true`/`false`). Flags on the command line win.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use iarma_core::rng::{stream, Purpose};
use iarma_core::{
    acf, fit_ml, forecast_bands, ljung_box, predict_innovations, qq_data, simulate_values, time_grid,
    wald_test, Error as ModelError, FitOptions, FitResult, IrregularSeries, MeanHandling,
    ModelParams, Rescale, ScaleSource,
};

use crate::io::{self, FileError, GridDefaults, GridEntry};
use crate::montecarlo::{run_cell, Design, GridMode};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        use ModelError::*;
        match e {
            VarianceFactorUnderflow { .. }
            | DegenerateData
            | NonFiniteLikelihood
            | OptimizerFailed { .. }
            | StandardErrorUnavailable
            | ZeroVariance => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Io { .. } => CliError::Io(e.to_string()),
            FileError::Format { .. } => CliError::Validation(e.to_string()),
        }
    }
}

fn write_failed(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "iarma", version, about = "Irregularly observed ARMA(1,1) models: simulate, fit, forecast, diagnose")]
pub struct Cli {
    /// key=value file supplying default flags
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a path and write it as a t,x CSV
    Simulate(SimulateArgs),
    /// Fit by maximum likelihood
    Fit(FitArgs),
    /// One-step predictions with prediction bands
    Forecast(ForecastArgs),
    /// Residual diagnostics: ACF, Ljung-Box, QQ data
    Diagnose(DiagnoseArgs),
    /// Monte Carlo study of the estimator
    Mc(McArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    /// Number of observations (with --gaps)
    #[arg(long, required_unless_present = "times")]
    pub n: Option<usize>,
    /// Gap law: `regular` or `exp:<rate>` (gaps 1 + Exp(rate))
    #[arg(long, default_value = "regular")]
    pub gaps: String,
    /// CSV whose `t` column gives the observation times
    #[arg(long, conflicts_with = "n", value_name = "FILE")]
    pub times: Option<PathBuf>,
    /// Random seed; drawn from the clock when absent and echoed to the sidecar
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV; metadata goes to `<out>.meta`
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Kv,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// Input t,x CSV
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Level handling: `sample`, `zero` or a number
    #[arg(long, default_value = "sample", allow_hyphen_values = true)]
    pub mean: String,
    /// Reject time grids with a gap below 1 instead of rescaling them
    #[arg(long)]
    pub no_rescale: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Hold phi at this value
    #[arg(long)]
    pub fix_phi: Option<f64>,
    /// Hold theta at this value
    #[arg(long)]
    pub fix_theta: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Significance level of the Wald tests
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
}

/// Parameters supplied on the command line; anything missing is estimated.
#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Requires --phi and --theta
    #[arg(long)]
    pub sigma2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Coverage of the prediction bands
    #[arg(long, default_value_t = 0.95)]
    pub coverage: f64,
    /// Output CSV (stdout when absent)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Directory receiving residuals.csv, acf.csv, ljung_box.csv and qq.csv
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    /// Largest lag of the ACF and Ljung-Box tables
    #[arg(long, default_value_t = 10)]
    pub lags: usize,
    /// Significance level of the Ljung-Box test
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    /// Degrees of freedom subtracted for fitted coefficients
    #[arg(long, default_value_t = 0)]
    pub fitdf: usize,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Grid CSV with columns n,phi,theta and optional sigma2,gaps
    #[arg(long, value_name = "FILE")]
    pub grid: Option<PathBuf>,
    /// Sample sizes (comma separated)
    #[arg(long, value_delimiter = ',', default_values_t = [100usize, 500, 1500])]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5])]
    pub phi: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.5, 0.9])]
    pub theta: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    /// Gap law: `regular` or `exp:<rate>`
    #[arg(long, default_value = "exp:1")]
    pub gaps: String,
    /// Replicates per cell
    #[arg(long, default_value_t = 1000)]
    pub m: usize,
    /// Quick run with 10 replicates per cell
    #[arg(long)]
    pub m_small: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Level handling: `sample`, `zero` or a number
    #[arg(long, default_value = "sample", allow_hyphen_values = true)]
    pub mean: String,
    /// Reuse one time grid for all replicates of a cell
    #[arg(long)]
    pub fixed_grid: bool,
    /// Output CSV; metadata goes to `<out>.meta`
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

/// Parses arguments (including any `--config` file) and runs the command,
/// writing reports to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match parse(args)? {
        Some(cli) => cli,
        None => return Ok(()),
    };
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a, stdout),
        Command::Fit(a) => cmd_fit(&a, stdout),
        Command::Forecast(a) => cmd_forecast(&a, stdout),
        Command::Diagnose(a) => cmd_diagnose(&a, stdout),
        Command::Mc(a) => cmd_mc(&a, stdout),
    }
}

fn command() -> clap::Command {
    Cli::command().mut_subcommands(|s| s.args_override_self(true))
}

/// `Ok(None)` when help or version was printed.
fn parse(args: Vec<OsString>) -> Result<Option<Cli>, CliError> {
    let args = splice_config(args)?;
    match command().try_get_matches_from(args) {
        Ok(m) => Cli::from_arg_matches(&m)
            .map(Some)
            .map_err(|e| CliError::Validation(e.to_string())),
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            Ok(None)
        }
        Err(e) => Err(CliError::Validation(e.render().to_string().trim_end().to_owned())),
    }
}

fn config_path(args: &[OsString]) -> Result<Option<PathBuf>, CliError> {
    let mut found = None;
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            let v = it
                .next()
                .ok_or_else(|| CliError::Validation("--config needs a file".into()))?;
            found = Some(PathBuf::from(v));
        } else if let Some(v) = s.strip_prefix("--config=") {
            found = Some(PathBuf::from(v));
        }
    }
    Ok(found)
}

/// Inserts the config file's flags right after the subcommand name so that
/// explicit flags, which come later, override them.
fn splice_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args)? else {
        return Ok(args);
    };
    let pairs = io::read_kv(&path)?;
    let cmd = command();
    let names: Vec<&str> = cmd.get_subcommands().map(|s| s.get_name()).collect();
    let Some(pos) = args
        .iter()
        .position(|a| names.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(args);
    };
    let sub = cmd
        .find_subcommand(args[pos].to_string_lossy().as_ref())
        .expect("listed above");
    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in pairs {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && a.get_id() != "config")
            .ok_or_else(|| {
                CliError::Validation(format!(
                    "{}: unknown option {key:?} for {}",
                    path.display(),
                    sub.get_name()
                ))
            })?;
        if arg.get_action().takes_values() {
            injected.push(format!("--{key}={value}").into());
        } else {
            match value.as_str() {
                "true" => injected.push(format!("--{key}").into()),
                "false" => {}
                _ => {
                    return Err(CliError::Validation(format!(
                        "{}: option {key} takes true or false",
                        path.display()
                    )))
                }
            }
        }
    }
    let mut out = args[..=pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

fn rescale_mode(no_rescale: bool) -> Rescale {
    if no_rescale {
        Rescale::Forbid
    } else {
        Rescale::Auto
    }
}

fn load_series(args: &SeriesArgs) -> Result<IrregularSeries, CliError> {
    let file = io::read_series(&args.input)?;
    let series = IrregularSeries::with_rescale(file.times, file.values, rescale_mode(args.no_rescale))?;
    if series.time_scale() != 1.0 {
        eprintln!(
            "iarma: times divided by {} so that the smallest gap is 1",
            series.time_scale()
        );
    }
    Ok(series)
}

fn mean_handling(s: &str) -> Result<MeanHandling, CliError> {
    io::parse_mean(s).map_err(CliError::Validation)
}

fn check_level(level: f64) -> Result<(), CliError> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidLevel(level).into())
    }
}

fn clock_seed() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}

pub fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let params = ModelParams::new(a.phi, a.theta, a.sigma2)?.with_mu(a.mu)?;
    let law = io::parse_gap_law(&a.gaps).map_err(CliError::Validation)?;
    let seed = a.seed.unwrap_or_else(clock_seed);
    let times = match (&a.times, a.n) {
        (Some(path), _) => io::read_times(path)?,
        (None, Some(n)) => time_grid(law, n, &mut stream(seed, 0, 0, Purpose::Gaps))?,
        (None, None) => return Err(CliError::Validation("either --n or --times is required".into())),
    };
    let grid = IrregularSeries::new(times.clone(), vec![0.0; times.len()])?;
    let values = simulate_values(&params, grid.gaps(), &mut stream(seed, 0, 0, Purpose::Innovations))?;

    let out = &a.out;
    let w = io::create(out)?;
    io::write_series(w, &times, &values).map_err(write_failed(out))?;
    let meta = io::sidecar_path(out);
    let mut pairs: Vec<(&str, String)> = vec![
        ("command", "simulate".into()),
        ("phi", a.phi.to_string()),
        ("theta", a.theta.to_string()),
        ("sigma2", a.sigma2.to_string()),
        ("mu", a.mu.to_string()),
        ("n", times.len().to_string()),
        ("seed", seed.to_string()),
        ("time_scale", grid.time_scale().to_string()),
    ];
    match &a.times {
        Some(p) => pairs.push(("times", p.display().to_string())),
        None => pairs.push(("gaps", io::format_gap_law(law))),
    }
    pairs.push(("version", env!("CARGO_PKG_VERSION").into()));
    io::write_kv(io::create(&meta)?, &pairs).map_err(write_failed(&meta))?;
    writeln!(stdout, "wrote {} observations to {} (seed {seed})", times.len(), out.display())
        .map_err(|e| CliError::Io(e.to_string()))
}

fn fit(series: &IrregularSeries, mean: MeanHandling, fix_phi: Option<f64>, fix_theta: Option<f64>) -> Result<FitResult, CliError> {
    let fit = fit_ml(
        series,
        &FitOptions {
            mean,
            fix_phi,
            fix_theta,
            ..FitOptions::default()
        },
    )?;
    if !fit.converged {
        eprintln!("iarma: warning: the optimizer stopped before meeting its convergence tolerance");
    }
    Ok(fit)
}

fn opt_str(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_owned(), |v| v.to_string())
}

pub fn cmd_fit(a: &FitArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    check_level(a.level)?;
    let mean = mean_handling(&a.series.mean)?;
    let series = load_series(&a.series)?;
    let f = fit(&series, mean, a.fix_phi, a.fix_theta)?;
    let p = &f.params;

    struct Row {
        name: &'static str,
        est: f64,
        se: Option<f64>,
        fixed: bool,
        at_bound: bool,
    }
    let rows = [
        Row {
            name: "phi",
            est: p.phi(),
            se: f.se.phi,
            fixed: !f.free.phi,
            at_bound: f.at_bound.phi,
        },
        Row {
            name: "theta",
            est: p.theta(),
            se: f.se.theta,
            fixed: !f.free.theta,
            at_bound: f.at_bound.theta,
        },
    ];
    let tests: Vec<Option<iarma_core::WaldTest>> = rows
        .iter()
        .map(|r| (!r.fixed).then(|| wald_test(r.est, r.se, a.level).ok()).flatten())
        .collect();

    let out = (|| -> std::io::Result<()> {
        match a.format {
            Format::Kv => {
                let mut kv: Vec<(String, String)> = Vec::new();
                for (r, t) in rows.iter().zip(&tests) {
                    kv.push((r.name.into(), r.est.to_string()));
                    kv.push((format!("{}_fixed", r.name), r.fixed.to_string()));
                    kv.push((format!("{}_se", r.name), opt_str(r.se)));
                    kv.push((format!("{}_z", r.name), opt_str(t.map(|t| t.z))));
                    kv.push((format!("{}_p", r.name), opt_str(t.map(|t| t.p_value))));
                    kv.push((format!("{}_at_bound", r.name), r.at_bound.to_string()));
                }
                kv.push(("sigma2".into(), p.sigma2().to_string()));
                kv.push(("sigma2_se".into(), opt_str(f.se.sigma2)));
                kv.push(("mu".into(), p.mu().to_string()));
                kv.push(("loglik".into(), f.loglik.to_string()));
                kv.push(("q".into(), f.q.to_string()));
                kv.push(("n".into(), f.n.to_string()));
                kv.push(("time_scale".into(), series.time_scale().to_string()));
                kv.push(("converged".into(), f.converged.to_string()));
                kv.push(("iterations".into(), f.iterations.to_string()));
                kv.push(("level".into(), a.level.to_string()));
                io::write_kv(&mut *stdout, &kv)
            }
            Format::Text => {
                writeln!(stdout, "iARMA fit, N = {}", f.n)?;
                if series.time_scale() != 1.0 {
                    writeln!(stdout, "time axis divided by {}", series.time_scale())?;
                }
                writeln!(
                    stdout,
                    "{:<8}{:>12}{:>12}{:>10}{:>10}",
                    "", "estimate", "std.err", "z", "p"
                )?;
                for (r, t) in rows.iter().zip(&tests) {
                    let se = r.se.map_or("-".into(), |s| format!("{s:.4}"));
                    let (z, pv) = t.map_or(("-".into(), "-".into()), |t| {
                        (format!("{:.3}", t.z), format!("{:.4}", t.p_value))
                    });
                    let note = if r.fixed {
                        "  (fixed)"
                    } else if r.at_bound {
                        "  (on bound)"
                    } else {
                        ""
                    };
                    writeln!(stdout, "{:<8}{:>12.4}{:>12}{:>10}{:>10}{note}", r.name, r.est, se, z, pv)?;
                }
                let se = f.se.sigma2.map_or("-".into(), |s| format!("{s:.4}"));
                writeln!(stdout, "{:<8}{:>12.4}{:>12}", "sigma2", p.sigma2(), se)?;
                writeln!(stdout, "{:<8}{:>12.4}", "mu", p.mu())?;
                writeln!(stdout, "log-likelihood {:.4}", f.loglik)?;
                writeln!(
                    stdout,
                    "converged {} after {} iterations; tests at level {}",
                    f.converged, f.iterations, a.level
                )
            }
        }
    })();
    out.map_err(|e| CliError::Io(e.to_string()))
}

/// Supplied parameters when `phi`, `theta` and `sigma2` are all given;
/// otherwise a fit holding whichever coefficients were given.
fn resolve_params(series: &IrregularSeries, model: &ModelArgs, mean: MeanHandling) -> Result<(ModelParams, bool), CliError> {
    let mu = match mean {
        MeanHandling::SampleMean => series.sample_mean(),
        MeanHandling::Fixed(m) => m,
    };
    match (model.phi, model.theta, model.sigma2) {
        (Some(phi), Some(theta), Some(sigma2)) => Ok((ModelParams::new(phi, theta, sigma2)?.with_mu(mu)?, false)),
        (_, _, Some(_)) => Err(CliError::Validation("--sigma2 needs both --phi and --theta".into())),
        (phi, theta, None) => Ok((fit(series, mean, phi, theta)?.params, true)),
    }
}

pub fn cmd_forecast(a: &ForecastArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mean = mean_handling(&a.series.mean)?;
    if !(0.0..1.0).contains(&a.coverage) {
        return Err(ModelError::InvalidCoverage(a.coverage).into());
    }
    let series = load_series(&a.series)?;
    let (params, _) = resolve_params(&series, &a.model, mean)?;
    let trace = predict_innovations(&params, &series)?;
    let bands = forecast_bands(&trace, &params, a.coverage)?;
    let rows = series
        .original_times()
        .zip(series.values())
        .zip(trace.xhat.iter().zip(trace.mse()))
        .zip(&bands)
        .map(|(((t, x), (xhat, mse)), b)| {
            vec![
                t.to_string(),
                x.to_string(),
                xhat.to_string(),
                mse.to_string(),
                b.lo.to_string(),
                b.hi.to_string(),
            ]
        });
    let header = ["t", "x", "xhat", "mse", "lo", "hi"];
    match &a.out {
        Some(path) => io::write_table(io::create(path)?, &header, rows).map_err(write_failed(path)),
        None => io::write_table(&mut *stdout, &header, rows).map_err(|e| CliError::Io(e.to_string())),
    }
}

pub fn cmd_diagnose(a: &DiagnoseArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    check_level(a.level)?;
    let mean = mean_handling(&a.series.mean)?;
    let series = load_series(&a.series)?;
    if a.lags == 0 || a.lags >= series.len() {
        return Err(ModelError::InvalidLag {
            max_lag: a.lags,
            n: series.len(),
        }
        .into());
    }
    let (params, fitted) = resolve_params(&series, &a.model, mean)?;
    let mut trace = predict_innovations(&params, &series)?;
    if fitted {
        trace.standardize(params.sigma2(), ScaleSource::Profile);
    }
    let z = &trace.std_resid;
    let est = acf(z, a.lags)?;
    let lb = ljung_box(z, a.lags, a.fitdf)?;
    let qq = qq_data(z)?;

    let dir = &a.out_dir;
    std::fs::create_dir_all(dir).map_err(write_failed(dir))?;
    let put = |name: &str, header: &[&str], rows: Vec<Vec<String>>| -> Result<(), CliError> {
        let path = dir.join(name);
        io::write_table(io::create(&path)?, header, rows).map_err(write_failed(&path))
    };
    put(
        "residuals.csv",
        &["t", "x", "xhat", "resid", "std_resid"],
        series
            .original_times()
            .enumerate()
            .map(|(i, t)| {
                vec![
                    t.to_string(),
                    series.values()[i].to_string(),
                    trace.xhat[i].to_string(),
                    trace.resid[i].to_string(),
                    z[i].to_string(),
                ]
            })
            .collect(),
    )?;
    put(
        "acf.csv",
        &["lag", "acf", "lo", "hi"],
        est.rho
            .iter()
            .enumerate()
            .map(|(i, r)| {
                vec![
                    (i + 1).to_string(),
                    r.to_string(),
                    (-est.band).to_string(),
                    est.band.to_string(),
                ]
            })
            .collect(),
    )?;
    put(
        "ljung_box.csv",
        &["lag", "statistic", "df", "p_value"],
        lb.iter()
            .map(|r| {
                vec![
                    r.lag.to_string(),
                    r.statistic.to_string(),
                    r.df.to_string(),
                    opt_str(r.p_value),
                ]
            })
            .collect(),
    )?;
    put(
        "qq.csv",
        &["theoretical", "sample"],
        qq.iter().map(|(t, s)| vec![t.to_string(), s.to_string()]).collect(),
    )?;

    let last = lb.last().expect("at least one lag");
    let pass = last.passes(a.level);
    let summary: Vec<(&str, String)> = vec![
        ("n", series.len().to_string()),
        ("phi", params.phi().to_string()),
        ("theta", params.theta().to_string()),
        ("sigma2", params.sigma2().to_string()),
        ("params", if fitted { "fitted" } else { "supplied" }.into()),
        ("lags", a.lags.to_string()),
        ("acf_band", est.band.to_string()),
        ("acf_outside_band", est.outside_band().to_string()),
        ("ljung_box_statistic", last.statistic.to_string()),
        ("ljung_box_df", last.df.to_string()),
        ("ljung_box_p", opt_str(last.p_value)),
        ("level", a.level.to_string()),
        ("result", if pass { "pass" } else { "fail" }.into()),
    ];
    io::write_kv(&mut *stdout, &summary).map_err(|e| CliError::Io(e.to_string()))
}

pub fn cmd_mc(a: &McArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let m = if a.m_small { 10 } else { a.m };
    let defaults = GridDefaults {
        sigma2: a.sigma2,
        gaps: io::parse_gap_law(&a.gaps).map_err(CliError::Validation)?,
        m,
        seed: a.seed,
        mean: mean_handling(&a.mean)?,
        grid: if a.fixed_grid { GridMode::Fixed } else { GridMode::Redraw },
    };
    let entries: Vec<GridEntry> = match &a.grid {
        Some(path) => io::read_grid(path, &defaults)?,
        None => flag_grid(a, &defaults),
    };

    let header = io::mc_header();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut rows = Vec::with_capacity(entries.len());
    let mut errors = 0;
    for (i, entry) in entries.iter().enumerate() {
        let (design, result) = match entry {
            Ok(d) => (Some(d), run_cell(d, i as u64).map_err(|e| e.to_string())),
            Err(e) => (None, Err(e.clone())),
        };
        match &result {
            Ok(c) => eprintln!(
                "iarma: cell {i}: N={} phi={} theta={} done ({} used, {} failed)",
                c.design.n, c.design.phi, c.design.theta, c.used, c.failures
            ),
            Err(e) => {
                errors += 1;
                eprintln!("iarma: cell {i} skipped: {e}");
            }
        }
        rows.push(io::mc_row(i, design, &result));
    }
    let out = &a.out;
    io::write_table(io::create(out)?, &header, rows).map_err(write_failed(out))?;
    let meta = io::sidecar_path(out);
    let pairs: Vec<(&str, String)> = vec![
        ("command", "mc".into()),
        ("m", m.to_string()),
        ("seed", a.seed.to_string()),
        ("cells", entries.len().to_string()),
        ("skipped", errors.to_string()),
        ("version", env!("CARGO_PKG_VERSION").into()),
    ];
    io::write_kv(io::create(&meta)?, &pairs).map_err(write_failed(&meta))?;
    writeln!(stdout, "wrote {} cells to {} ({errors} skipped)", entries.len(), out.display())
        .map_err(|e| CliError::Io(e.to_string()))
}

/// Cross product of the `--n`, `--phi` and `--theta` lists, ordered by `n`,
/// then `phi`, then `theta`.
fn flag_grid(a: &McArgs, defaults: &GridDefaults) -> Vec<GridEntry> {
    let mut out = Vec::new();
    for &n in &a.n {
        for &phi in &a.phi {
            for &theta in &a.theta {
                let mut d = Design::new(n, phi, theta, defaults.gaps, defaults.m, defaults.seed);
                d.sigma2 = defaults.sigma2;
                d.mean = defaults.mean;
                d.grid = defaults.grid;
                out.push(Ok(d));
            }
        }
    }
    out
}
