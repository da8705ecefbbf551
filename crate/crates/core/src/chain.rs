//! Generalized Maxwell chain: an elastic spring in parallel with `P`
//! spring-dashpot cells.
//!
//! The same numbers serve as spring stiffnesses for the lumped model and as
//! shear moduli for the continuum model. Units are never checked; a run must
//! pick one consistent system.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use crate::math::{exp_remainder, one_minus_exp_neg};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainError {
    NonPositiveStiffness(f64),
    NonPositiveRelaxationTime(f64),
    NonPositiveLongTermStiffness(f64),
    InvalidTimeStep(f64),
}

impl fmt::Display for ChainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainError::NonPositiveStiffness(k) => {
                write!(f, "cell stiffness must be positive and finite, got {k}")
            }
            ChainError::NonPositiveRelaxationTime(t) => {
                write!(f, "cell relaxation time must be positive and finite, got {t}")
            }
            ChainError::NonPositiveLongTermStiffness(k) => {
                write!(f, "long-term stiffness must be positive and finite, got {k}")
            }
            ChainError::InvalidTimeStep(dt) => {
                write!(f, "time step must be finite and non-negative, got {dt}")
            }
        }
    }
}

impl core::error::Error for ChainError {}

/// One spring-dashpot cell, keyed by stiffness and relaxation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxwellCell {
    stiffness: f64,
    relaxation_time: f64,
}

impl MaxwellCell {
    pub fn new(stiffness: f64, relaxation_time: f64) -> Result<Self, ChainError> {
        if !(stiffness.is_finite() && stiffness > 0.0) {
            return Err(ChainError::NonPositiveStiffness(stiffness));
        }
        if !(relaxation_time.is_finite() && relaxation_time > 0.0) {
            return Err(ChainError::NonPositiveRelaxationTime(relaxation_time));
        }
        Ok(Self {
            stiffness,
            relaxation_time,
        })
    }

    #[inline]
    pub fn stiffness(&self) -> f64 {
        self.stiffness
    }

    #[inline]
    pub fn relaxation_time(&self) -> f64 {
        self.relaxation_time
    }

    /// Dashpot viscosity `k * theta`.
    #[inline]
    pub fn viscosity(&self) -> f64 {
        self.stiffness * self.relaxation_time
    }

    /// Per-step coefficients of this cell for a step `dt >= 0`.
    pub fn coefficients(&self, dt: f64) -> CellCoefficients {
        let theta = self.relaxation_time;
        let x = dt / theta;
        let effective_relaxation_time = theta * one_minus_exp_neg(x);
        // dt - theta_hat = theta * (x - 1 + e^-x)
        let lag = theta * exp_remainder(x);
        CellCoefficients {
            effective_relaxation_time,
            decay_factor: libm::exp(-x),
            velocity_gain: self.stiffness * effective_relaxation_time,
            acceleration_factor: 0.5 * self.viscosity() * lag,
        }
    }
}

/// Long-term spring plus an ordered list of Maxwell cells.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxwellChain {
    long_term_stiffness: f64,
    cells: Vec<MaxwellCell>,
}

impl MaxwellChain {
    pub fn new(long_term_stiffness: f64, cells: Vec<MaxwellCell>) -> Result<Self, ChainError> {
        if !(long_term_stiffness.is_finite() && long_term_stiffness > 0.0) {
            return Err(ChainError::NonPositiveLongTermStiffness(long_term_stiffness));
        }
        Ok(Self {
            long_term_stiffness,
            cells,
        })
    }

    /// A chain with no cells, i.e. a single linear spring.
    pub fn elastic(long_term_stiffness: f64) -> Result<Self, ChainError> {
        Self::new(long_term_stiffness, Vec::new())
    }

    /// Builds a chain from `(stiffness, relaxation_time)` pairs.
    pub fn from_pairs(long_term_stiffness: f64, pairs: &[(f64, f64)]) -> Result<Self, ChainError> {
        let cells = pairs
            .iter()
            .map(|&(k, theta)| MaxwellCell::new(k, theta))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(long_term_stiffness, cells)
    }

    #[inline]
    pub fn long_term_stiffness(&self) -> f64 {
        self.long_term_stiffness
    }

    #[inline]
    pub fn cells(&self) -> &[MaxwellCell] {
        &self.cells
    }

    /// Number of Maxwell cells `P`.
    #[inline]
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `k_inf + sum(k_p)`, the stiffness seen by an instantaneous load.
    pub fn instantaneous_stiffness(&self) -> f64 {
        self.long_term_stiffness + self.cells.iter().map(|c| c.stiffness).sum::<f64>()
    }

    /// Multiplies every stiffness by `factor` (unit conversion).
    pub fn scaled(&self, factor: f64) -> Result<Self, ChainError> {
        let cells = self
            .cells
            .iter()
            .map(|c| MaxwellCell::new(c.stiffness * factor, c.relaxation_time))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.long_term_stiffness * factor, cells)
    }

    pub fn step_coefficients(&self, dt: f64) -> Result<StepCoefficients, ChainError> {
        if !(dt.is_finite() && dt >= 0.0) {
            return Err(ChainError::InvalidTimeStep(dt));
        }
        let cells: Vec<CellCoefficients> = self.cells.iter().map(|c| c.coefficients(dt)).collect();
        let sum_acceleration_factor = cells.iter().map(|c| c.acceleration_factor).sum();
        let sum_velocity_gain = cells.iter().map(|c| c.velocity_gain).sum();
        Ok(StepCoefficients {
            dt,
            cells,
            sum_acceleration_factor,
            sum_velocity_gain,
        })
    }

    /// Parses the Prony text format.
    ///
    /// ```text
    /// # comment
    /// k_inf = 682.18
    /// 6933.9, 1e-9
    /// 3898.6, 1e-8
    /// ```
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        let mut long_term = None;
        let mut cells = Vec::new();
        for (index, raw) in source.lines().enumerate() {
            let line = index + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if content.is_empty() {
                continue;
            }
            match long_term {
                None => {
                    let (key, value) = content
                        .split_once('=')
                        .ok_or(ParseError::new(line, ParseErrorKind::MissingLongTermStiffness))?;
                    if key.trim() != "k_inf" {
                        return Err(ParseError::new(line, ParseErrorKind::MissingLongTermStiffness));
                    }
                    let k = parse_number(value, line)?;
                    if !(k.is_finite() && k > 0.0) {
                        return Err(ParseError::new(
                            line,
                            ParseErrorKind::Invalid(ChainError::NonPositiveLongTermStiffness(k)),
                        ));
                    }
                    long_term = Some(k);
                }
                Some(_) => {
                    if content.contains('=') {
                        return Err(ParseError::new(line, ParseErrorKind::UnexpectedHeader));
                    }
                    let mut fields = content.split(',');
                    let (Some(k), Some(theta), None) = (fields.next(), fields.next(), fields.next())
                    else {
                        return Err(ParseError::new(line, ParseErrorKind::MalformedRow));
                    };
                    let k = parse_number(k, line)?;
                    let theta = parse_number(theta, line)?;
                    let cell = MaxwellCell::new(k, theta)
                        .map_err(|e| ParseError::new(line, ParseErrorKind::Invalid(e)))?;
                    cells.push(cell);
                }
            }
        }
        let k_inf = long_term.ok_or(ParseError::new(0, ParseErrorKind::MissingLongTermStiffness))?;
        Ok(Self {
            long_term_stiffness: k_inf,
            cells,
        })
    }

    /// Writes the chain in the Prony text format. Values use the shortest
    /// representation that parses back to the same `f64`.
    pub fn to_prony_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "k_inf = {:e}", self.long_term_stiffness);
        for cell in &self.cells {
            let _ = writeln!(out, "{:e}, {:e}", cell.stiffness, cell.relaxation_time);
        }
        out
    }
}

fn parse_number(text: &str, line: usize) -> Result<f64, ParseError> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| ParseError::new(line, ParseErrorKind::InvalidNumber(String::from(text.trim()))))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    MissingLongTermStiffness,
    UnexpectedHeader,
    MalformedRow,
    InvalidNumber(String),
    Invalid(ChainError),
}

/// Prony-file parse failure. `line` is 1-based; 0 means end of input.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(line: usize, kind: ParseErrorKind) -> Self {
        Self { line, kind }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "end of input: ")?;
        } else {
            write!(f, "line {}: ", self.line)?;
        }
        match &self.kind {
            ParseErrorKind::MissingLongTermStiffness => {
                write!(f, "expected `k_inf = <value>` before any cell rows")
            }
            ParseErrorKind::UnexpectedHeader => write!(f, "unexpected key-value line after header"),
            ParseErrorKind::MalformedRow => write!(f, "expected a row `<k_p>, <theta_p>`"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number `{s}`"),
            ParseErrorKind::Invalid(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ParseError {}

/// Coefficients of one cell for a fixed step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellCoefficients {
    /// `theta * (1 - exp(-dt / theta))`.
    pub effective_relaxation_time: f64,
    /// `exp(-dt / theta)`.
    pub decay_factor: f64,
    /// `k * effective_relaxation_time`.
    pub velocity_gain: f64,
    /// `eta / 2 * (dt - effective_relaxation_time)`.
    pub acceleration_factor: f64,
}

impl CellCoefficients {
    /// Exact end-of-step cell force for a velocity that varies linearly
    /// from `velocity` with slope `acceleration_sum / 2`.
    #[inline]
    pub fn advance(&self, force: f64, velocity: f64, acceleration_sum: f64) -> f64 {
        self.decay_factor * force + self.velocity_gain * velocity + self.acceleration_factor * acceleration_sum
    }
}

/// Step coefficients of a whole chain for one `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCoefficients {
    pub dt: f64,
    pub cells: Vec<CellCoefficients>,
    /// Sum of the cells' acceleration factors.
    pub sum_acceleration_factor: f64,
    /// Sum of `k_p * effective_relaxation_time_p`.
    pub sum_velocity_gain: f64,
}
