//! Time profiles of the external load.

use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoadError {
    Empty,
    NonIncreasing { index: usize },
    NonFinite { index: usize },
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Empty => write!(f, "tabulated load needs at least one sample"),
            LoadError::NonIncreasing { index } => {
                write!(f, "tabulated load times must be strictly increasing (sample {index})")
            }
            LoadError::NonFinite { index } => write!(f, "tabulated load sample {index} is not finite"),
        }
    }
}

impl core::error::Error for LoadError {}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadSignal {
    /// `F(t) = amplitude` for `t >= 0`.
    Step { amplitude: f64 },
    /// `F(t) = amplitude * sin(omega * t)`.
    Harmonic { amplitude: f64, omega: f64 },
    /// Piecewise-linear through the samples, held constant outside them.
    Tabulated(Tabulated),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    samples: Vec<(f64, f64)>,
}

impl Tabulated {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self, LoadError> {
        if samples.is_empty() {
            return Err(LoadError::Empty);
        }
        for (index, &(t, value)) in samples.iter().enumerate() {
            if !t.is_finite() || !value.is_finite() {
                return Err(LoadError::NonFinite { index });
            }
            if index > 0 && t <= samples[index - 1].0 {
                return Err(LoadError::NonIncreasing { index });
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn value(&self, t: f64) -> f64 {
        let s = &self.samples;
        let first = s[0];
        let last = s[s.len() - 1];
        if t <= first.0 {
            return first.1;
        }
        if t >= last.0 {
            return last.1;
        }
        // first index with sample time > t; lies in 1..len
        let hi = s.partition_point(|&(ts, _)| ts <= t);
        let (t0, f0) = s[hi - 1];
        let (t1, f1) = s[hi];
        f0 + (f1 - f0) * (t - t0) / (t1 - t0)
    }
}

impl LoadSignal {
    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self, LoadError> {
        Tabulated::new(samples).map(LoadSignal::Tabulated)
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            LoadSignal::Step { amplitude } => *amplitude,
            LoadSignal::Harmonic { amplitude, omega } => amplitude * libm::sin(omega * t),
            LoadSignal::Tabulated(table) => table.value(t),
        }
    }

    /// Identically zero for all `t`.
    pub fn is_zero(&self) -> bool {
        match self {
            LoadSignal::Step { amplitude } | LoadSignal::Harmonic { amplitude, .. } => *amplitude == 0.0,
            LoadSignal::Tabulated(table) => table.samples.iter().all(|&(_, v)| v == 0.0),
        }
    }
}
