use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Whether a grid whose smallest gap is below one may be rescaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rescale {
    /// Divide all times by the smallest gap when it is below one.
    #[default]
    Auto,
    /// Reject grids with a gap below one.
    Forbid,
}

/// Observations at strictly increasing times, stored on a normalized grid
/// whose gaps are all at least one.
#[derive(Debug, Clone, PartialEq)]
pub struct IrregularSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    gaps: Vec<f64>,
    time_scale: f64,
}

impl IrregularSeries {
    /// Builds a series, rescaling the time axis if its smallest gap is below one.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::with_rescale(times, values, Rescale::Auto)
    }

    pub fn with_rescale(times: Vec<f64>, values: Vec<f64>, rescale: Rescale) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::LengthMismatch {
                times: times.len(),
                values: values.len(),
            });
        }
        if times.is_empty() {
            return Err(Error::EmptySeries);
        }
        check_finite("time", &times)?;
        check_finite("value", &values)?;

        let mut duplicates = Vec::new();
        for i in 1..times.len() {
            if times[i] < times[i - 1] {
                return Err(Error::UnsortedTimes { index: i });
            }
            if times[i] == times[i - 1] {
                if duplicates.last() != Some(&(i - 1)) {
                    duplicates.push(i - 1);
                }
                duplicates.push(i);
            }
        }
        if !duplicates.is_empty() {
            return Err(Error::DuplicateTimes {
                indices: duplicates,
            });
        }

        let raw: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
        let (min_index, min_gap) = raw
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, g)| if g < acc.1 { (i, g) } else { acc });

        let time_scale = if min_gap < 1.0 {
            match rescale {
                Rescale::Auto => min_gap,
                Rescale::Forbid => {
                    return Err(Error::GapTooSmall {
                        index: min_index + 1,
                        gap: min_gap,
                    })
                }
            }
        } else {
            1.0
        };

        let (times, gaps) = if time_scale == 1.0 {
            (times, raw)
        } else {
            (
                times.iter().map(|t| t / time_scale).collect(),
                raw.iter().map(|g| g / time_scale).collect(),
            )
        };
        Ok(Self {
            times,
            values,
            gaps,
            time_scale,
        })
    }

    /// A unit-gap series with times `1, 2, ..., N`.
    pub fn regular(values: Vec<f64>) -> Result<Self> {
        let times = (1..=values.len()).map(|i| i as f64).collect();
        Self::with_rescale(times, values, Rescale::Forbid)
    }

    /// Same time grid, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.times.len() {
            return Err(Error::LengthMismatch {
                times: self.times.len(),
                values: values.len(),
            });
        }
        check_finite("value", &values)?;
        Ok(Self {
            values,
            ..self.clone()
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Normalized observation times.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `gaps()[i] = times()[i + 1] - times()[i]`, length `N - 1`.
    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// Factor the input times were divided by (1 when no rescaling happened).
    pub fn time_scale(&self) -> f64 {
        self.time_scale
    }

    /// Times in the units they were supplied in.
    pub fn original_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.times.iter().map(move |t| t * self.time_scale)
    }

    pub fn sample_mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

fn check_finite(what: &'static str, xs: &[f64]) -> Result<()> {
    match xs.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFinite { what, index }),
        None => Ok(()),
    }
}

/// Validates that every gap is at least one.
pub(crate) fn check_gaps(gaps: &[f64]) -> Result<()> {
    for (i, &g) in gaps.iter().enumerate() {
        if !(g >= 1.0) || !g.is_finite() {
            return Err(Error::GapTooSmall { index: i + 1, gap: g });
        }
    }
    Ok(())
}
