//! File formats: the `t,x` series CSV, key=value text (metadata sidecars and
//! config files), Monte Carlo grid specs and reports.
//!
//! Floats are written with the shortest representation that parses back to
//! the same value, so every written series round-trips exactly.

use std::fmt::Display;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use iarma_core::{Error as ModelError, GapLaw, MeanHandling};

use crate::montecarlo::{Design, GridMode, MCCell, ParamSummary};

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{source_name}, line {line}: {message}")]
    Format {
        source_name: String,
        line: u64,
        message: String,
    },
}

fn format_error(source_name: &str, line: u64, message: impl Into<String>) -> FileError {
    FileError::Format {
        source_name: source_name.to_owned(),
        line,
        message: message.into(),
    }
}

pub fn open(path: &Path) -> Result<BufReader<File>, FileError> {
    File::open(path).map(BufReader::new).map_err(|source| FileError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn create(path: &Path) -> Result<BufWriter<File>, FileError> {
    File::create(path).map(BufWriter::new).map_err(|source| FileError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Contents of a series CSV: strictly increasing times and their values.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader)
}

fn parse_number(field: &str, what: &str, source_name: &str, line: u64) -> Result<f64, FileError> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format_error(
            source_name,
            line,
            format!("{what} {field:?} is not a finite number"),
        )),
    }
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn check_increasing(times: &[f64], lines: &[u64], source_name: &str) -> Result<(), FileError> {
    for i in 1..times.len() {
        if times[i] == times[i - 1] {
            return Err(format_error(
                source_name,
                lines[i],
                format!("duplicate time {} (also on line {})", times[i], lines[i - 1]),
            ));
        }
        if times[i] < times[i - 1] {
            return Err(format_error(
                source_name,
                lines[i],
                format!("time {} is earlier than the previous row", times[i]),
            ));
        }
    }
    Ok(())
}

/// Reads a `t,x` CSV. Blank lines and lines starting with `#` are skipped;
/// times must be strictly increasing.
pub fn parse_series<R: Read>(reader: R, source_name: &str) -> Result<SeriesFile, FileError> {
    read_columns(reader, source_name, true)
}

/// Reads the `t` column of a CSV whose first header is `t`; other columns are ignored.
pub fn parse_times<R: Read>(reader: R, source_name: &str) -> Result<Vec<f64>, FileError> {
    read_columns(reader, source_name, false).map(|s| s.times)
}

fn read_columns<R: Read>(reader: R, source_name: &str, with_values: bool) -> Result<SeriesFile, FileError> {
    let mut rdr = csv_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| format_error(source_name, 1, e.to_string()))?
        .clone();
    let ok = if with_values {
        headers.len() == 2 && &headers[0] == "t" && &headers[1] == "x"
    } else {
        headers.get(0) == Some("t")
    };
    if !ok {
        let expected = if with_values { "t,x" } else { "t" };
        return Err(format_error(
            source_name,
            record_line(&headers).max(1),
            format!("expected header {expected}, found {:?}", headers.iter().collect::<Vec<_>>()),
        ));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut lines = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            format_error(source_name, line, e.to_string())
        })?;
        let line = record_line(&record);
        let width = if with_values { 2 } else { 1 };
        if record.len() < width || (with_values && record.len() != 2) {
            return Err(format_error(
                source_name,
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        times.push(parse_number(&record[0], "time", source_name, line)?);
        if with_values {
            values.push(parse_number(&record[1], "value", source_name, line)?);
        }
        lines.push(line);
    }
    if times.is_empty() {
        return Err(format_error(source_name, 1, "no observations"));
    }
    check_increasing(&times, &lines, source_name)?;
    Ok(SeriesFile { times, values })
}

pub fn read_series(path: &Path) -> Result<SeriesFile, FileError> {
    parse_series(open(path)?, &path.display().to_string())
}

pub fn read_times(path: &Path) -> Result<Vec<f64>, FileError> {
    parse_times(open(path)?, &path.display().to_string())
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(w)
}

fn csv_io(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => std::io::Error::other(format!("{other:?}")),
    }
}

/// Writes a CSV table whose cells are already formatted.
pub fn write_table<W: Write>(w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> std::io::Result<()> {
    let mut wtr = csv_writer(w);
    wtr.write_record(header).map_err(csv_io)?;
    for row in rows {
        wtr.write_record(&row).map_err(csv_io)?;
    }
    wtr.flush()
}

pub fn write_series<W: Write>(w: W, times: &[f64], values: &[f64]) -> std::io::Result<()> {
    write_table(
        w,
        &["t", "x"],
        times.iter().zip(values).map(|(t, x)| vec![t.to_string(), x.to_string()]),
    )
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped and
/// surrounding whitespace is trimmed.
pub fn parse_kv(text: &str, source_name: &str) -> Result<Vec<(String, String)>, FileError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format_error(source_name, i as u64 + 1, "expected key=value"));
        };
        let k = k.trim();
        if k.is_empty() {
            return Err(format_error(source_name, i as u64 + 1, "empty key"));
        }
        out.push((k.to_owned(), v.trim().to_owned()));
    }
    Ok(out)
}

pub fn read_kv(path: &Path) -> Result<Vec<(String, String)>, FileError> {
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|source| FileError::Io {
            path: path.to_owned(),
            source,
        })?;
    parse_kv(&text, &path.display().to_string())
}

pub fn write_kv<W: Write, K: Display, V: Display>(mut w: W, pairs: &[(K, V)]) -> std::io::Result<()> {
    for (k, v) in pairs {
        writeln!(w, "{k}={v}")?;
    }
    w.flush()
}

/// Path of the metadata sidecar written next to `out`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// `regular` or `exp:<rate>`.
pub fn parse_gap_law(s: &str) -> Result<GapLaw, String> {
    let s = s.trim();
    if s == "regular" {
        return Ok(GapLaw::Regular);
    }
    let rate = s
        .strip_prefix("exp:")
        .ok_or_else(|| format!("gap law {s:?} is neither `regular` nor `exp:<rate>`"))?;
    let rate: f64 = rate
        .trim()
        .parse()
        .map_err(|_| format!("exponential rate {rate:?} is not a number"))?;
    GapLaw::shifted_exponential(rate).map_err(|e: ModelError| e.to_string())
}

pub fn format_gap_law(law: GapLaw) -> String {
    match law {
        GapLaw::Regular => "regular".to_owned(),
        GapLaw::ShiftedExponential { rate } => format!("exp:{rate}"),
    }
}

/// `sample`, `zero` or a number.
pub fn parse_mean(s: &str) -> Result<MeanHandling, String> {
    match s.trim() {
        "sample" => Ok(MeanHandling::SampleMean),
        "zero" => Ok(MeanHandling::Fixed(0.0)),
        other => match other.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(MeanHandling::Fixed(v)),
            _ => Err(format!("mean {other:?} is not `sample`, `zero` or a finite number")),
        },
    }
}

pub fn format_mean(mean: MeanHandling) -> String {
    match mean {
        MeanHandling::SampleMean => "sample".to_owned(),
        MeanHandling::Fixed(v) => v.to_string(),
    }
}

/// Defaults for grid-file columns that are absent.
#[derive(Debug, Clone, Copy)]
pub struct GridDefaults {
    pub sigma2: f64,
    pub gaps: GapLaw,
    pub m: usize,
    pub seed: u64,
    pub mean: MeanHandling,
    pub grid: GridMode,
}

/// One row of a grid file: a design, or the reason it was rejected.
pub type GridEntry = Result<Design, String>;

/// Reads a grid CSV with required columns `n,phi,theta` and optional
/// `sigma2,gaps`. Rows that do not parse are returned as errors so they can
/// be recorded without stopping the run.
pub fn parse_grid<R: Read>(reader: R, source_name: &str, defaults: &GridDefaults) -> Result<Vec<GridEntry>, FileError> {
    let mut rdr = csv_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| format_error(source_name, 1, e.to_string()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(cn), Some(cp), Some(ct)) = (col("n"), col("phi"), col("theta")) else {
        return Err(format_error(source_name, 1, "grid header must contain n, phi and theta"));
    };
    let cs = col("sigma2");
    let cg = col("gaps");
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            format_error(source_name, line, e.to_string())
        })?;
        let line = record_line(&record);
        let get = |i: usize| record.get(i).unwrap_or("");
        let entry = (|| -> Result<Design, String> {
            let n: usize = get(cn).parse().map_err(|_| format!("n {:?} is not a count", get(cn)))?;
            let num = |i: usize, what: &str| -> Result<f64, String> {
                get(i)
                    .parse::<f64>()
                    .map_err(|_| format!("{what} {:?} is not a number", get(i)))
            };
            let phi = num(cp, "phi")?;
            let theta = num(ct, "theta")?;
            let sigma2 = match cs {
                Some(i) if !get(i).is_empty() => num(i, "sigma2")?,
                _ => defaults.sigma2,
            };
            let gaps = match cg {
                Some(i) if !get(i).is_empty() => parse_gap_law(get(i))?,
                _ => defaults.gaps,
            };
            let mut d = Design::new(n, phi, theta, gaps, defaults.m, defaults.seed);
            d.sigma2 = sigma2;
            d.mean = defaults.mean;
            d.grid = defaults.grid;
            Ok(d)
        })()
        .map_err(|e| format!("{source_name}, line {line}: {e}"));
        out.push(entry);
    }
    Ok(out)
}

pub fn read_grid(path: &Path, defaults: &GridDefaults) -> Result<Vec<GridEntry>, FileError> {
    parse_grid(open(path)?, &path.display().to_string(), defaults)
}

const DESIGN_COLUMNS: [&str; 10] = [
    "cell", "n", "phi", "theta", "sigma2", "gaps", "m", "seed", "mean", "grid",
];
const SUMMARY_COLUMNS: [&str; 8] = ["mean", "se_hat", "se_emp", "bias", "rmse", "cv", "mce", "se_missing"];
const PARAMS: [&str; 3] = ["phi", "theta", "sigma2"];

/// Header of the Monte Carlo report.
pub fn mc_header() -> Vec<String> {
    let mut h: Vec<String> = DESIGN_COLUMNS.iter().map(|s| s.to_string()).collect();
    h.extend(["used", "failures", "flagged"].map(String::from));
    for p in PARAMS {
        h.extend(SUMMARY_COLUMNS.iter().map(|c| format!("{p}_{c}")));
    }
    h.push("error".to_owned());
    h
}

fn summary_cells(s: &ParamSummary) -> [String; 8] {
    [
        s.mean.to_string(),
        s.se_hat.to_string(),
        s.se_emp.to_string(),
        s.bias.to_string(),
        s.rmse.to_string(),
        s.cv.to_string(),
        s.mce.to_string(),
        s.se_missing.to_string(),
    ]
}

/// One report row: a cell index, its design when it parsed, and the result.
pub fn mc_row(cell: usize, design: Option<&Design>, result: &Result<MCCell, String>) -> Vec<String> {
    let mut row = vec![cell.to_string()];
    match design {
        Some(d) => row.extend([
            d.n.to_string(),
            d.phi.to_string(),
            d.theta.to_string(),
            d.sigma2.to_string(),
            format_gap_law(d.gaps),
            d.m.to_string(),
            d.seed.to_string(),
            format_mean(d.mean),
            match d.grid {
                GridMode::Redraw => "redraw".to_owned(),
                GridMode::Fixed => "fixed".to_owned(),
            },
        ]),
        None => row.extend(std::iter::repeat_n(String::new(), DESIGN_COLUMNS.len() - 1)),
    }
    match result {
        Ok(c) => {
            row.extend([c.used.to_string(), c.failures.to_string(), c.flagged.to_string()]);
            for s in [&c.phi, &c.theta, &c.sigma2] {
                row.extend(summary_cells(s));
            }
            row.push(String::new());
        }
        Err(e) => {
            row.extend(std::iter::repeat_n(String::new(), 3 + 3 * SUMMARY_COLUMNS.len()));
            row.push(e.clone());
        }
    }
    row
}
