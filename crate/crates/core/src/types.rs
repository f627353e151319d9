//! Value types shared by the model, solver, region and I/O layers.
//!
//! Errors are always carried as probabilities in `[0, 1]`; percentages only
//! appear at the CLI and CSV boundary.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One measured point of a learning curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationPoint {
    /// Number of training examples; integral and >= 1.
    pub n: f64,
    /// Number of model parameters, when the point belongs to a model/data grid.
    pub m: Option<f64>,
    /// Test error probability.
    pub error: f64,
    /// Standard deviation of `error` across replicates.
    pub std: Option<f64>,
    pub replicates: u32,
}

impl ObservationPoint {
    pub fn new(n: f64, error: f64) -> Self {
        ObservationPoint {
            n,
            m: None,
            error,
            std: None,
            replicates: 1,
        }
    }

    pub fn with_model_size(mut self, m: f64) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_std(mut self, std: f64) -> Self {
        self.std = Some(std);
        self
    }

    pub fn with_replicates(mut self, replicates: u32) -> Self {
        self.replicates = replicates;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_size(self.n, "dataset size n")?;
        if let Some(m) = self.m {
            check_size(m, "model size m")?;
        }
        if !(0.0..=1.0).contains(&self.error) {
            return Err(Error::ErrorOutOfRange { value: self.error });
        }
        if let Some(std) = self.std {
            if !(std >= 0.0 && std.is_finite()) {
                return Err(Error::Validation(format!(
                    "std must be a finite nonnegative number, got {std}"
                )));
            }
        }
        if self.replicates == 0 {
            return Err(Error::Validation("replicates must be >= 1".into()));
        }
        Ok(())
    }
}

fn check_size(x: f64, what: &str) -> Result<()> {
    if x >= 1.0 && x.is_finite() && x.fract() == 0.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "{what} must be an integer >= 1, got {x}"
        )))
    }
}

/// A non-empty list of valid observations sorted ascending by `n`.
///
/// Points sharing the same `n` keep their relative input order.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet(Vec<ObservationPoint>);

impl ObservationSet {
    pub fn points(&self) -> &[ObservationPoint] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<ObservationPoint> {
        self.0
    }

    pub fn min_error(&self) -> f64 {
        self.0.iter().map(|p| p.error).fold(f64::INFINITY, f64::min)
    }
}

impl Deref for ObservationSet {
    type Target = [ObservationPoint];

    fn deref(&self) -> &[ObservationPoint] {
        &self.0
    }
}

impl<'a> IntoIterator for &'a ObservationSet {
    type Item = &'a ObservationPoint;
    type IntoIter = std::slice::Iter<'a, ObservationPoint>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Checks every point and returns them sorted by dataset size.
pub fn validate_points(points: Vec<ObservationPoint>) -> Result<ObservationSet> {
    if points.is_empty() {
        return Err(Error::EmptyObservations);
    }
    for p in &points {
        p.validate()?;
    }
    let mut points = points;
    points.sort_by(|a, b| a.n.total_cmp(&b.n));
    Ok(ObservationSet(points))
}

fn check_probability(x: f64, what: &str) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::Validation(format!("{what} {x} is outside [0, 1]")))
    }
}

pub fn error_from_accuracy(accuracy: f64) -> Result<f64> {
    Ok(1.0 - check_probability(accuracy, "accuracy")?)
}

pub fn accuracy_from_error(error: f64) -> Result<f64> {
    Ok(1.0 - check_probability(error, "error")?)
}

fn positive(x: f64, name: &str) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Validation(format!(
            "{name} must be finite and > 0, got {x}"
        )))
    }
}

fn nonnegative(x: f64, name: &str) -> Result<f64> {
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Validation(format!(
            "{name} must be finite and >= 0, got {x}"
        )))
    }
}

/// Parameters of the data-scaling law `a * n^-alpha + c_inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDataLaw")]
pub struct DataLawParams {
    a: f64,
    alpha: f64,
    c_inf: f64,
}

#[derive(Deserialize)]
struct RawDataLaw {
    a: f64,
    alpha: f64,
    c_inf: f64,
}

impl TryFrom<RawDataLaw> for DataLawParams {
    type Error = Error;

    fn try_from(raw: RawDataLaw) -> Result<Self> {
        DataLawParams::new(raw.a, raw.alpha, raw.c_inf)
    }
}

impl DataLawParams {
    pub fn new(a: f64, alpha: f64, c_inf: f64) -> Result<Self> {
        Ok(DataLawParams {
            a: positive(a, "a")?,
            alpha: positive(alpha, "alpha")?,
            c_inf: nonnegative(c_inf, "c_inf")?,
        })
    }

    /// Caller guarantees the invariants (used after projection in the solver).
    pub(crate) fn new_unchecked(a: f64, alpha: f64, c_inf: f64) -> Self {
        debug_assert!(a > 0.0 && alpha > 0.0 && c_inf >= 0.0);
        DataLawParams { a, alpha, c_inf }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c_inf(&self) -> f64 {
        self.c_inf
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.a, self.alpha, self.c_inf]
    }
}

/// Parameters of the joint law `a * n^-alpha + b * m^-beta + c_inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJointLaw")]
pub struct JointLawParams {
    a: f64,
    alpha: f64,
    b: f64,
    beta: f64,
    c_inf: f64,
}

#[derive(Deserialize)]
struct RawJointLaw {
    a: f64,
    alpha: f64,
    b: f64,
    beta: f64,
    c_inf: f64,
}

impl TryFrom<RawJointLaw> for JointLawParams {
    type Error = Error;

    fn try_from(raw: RawJointLaw) -> Result<Self> {
        JointLawParams::new(raw.a, raw.alpha, raw.b, raw.beta, raw.c_inf)
    }
}

impl JointLawParams {
    pub fn new(a: f64, alpha: f64, b: f64, beta: f64, c_inf: f64) -> Result<Self> {
        Ok(JointLawParams {
            a: positive(a, "a")?,
            alpha: positive(alpha, "alpha")?,
            b: positive(b, "b")?,
            beta: positive(beta, "beta")?,
            c_inf: nonnegative(c_inf, "c_inf")?,
        })
    }

    pub(crate) fn new_unchecked(a: f64, alpha: f64, b: f64, beta: f64, c_inf: f64) -> Self {
        debug_assert!(a > 0.0 && alpha > 0.0 && b > 0.0 && beta > 0.0 && c_inf >= 0.0);
        JointLawParams {
            a,
            alpha,
            b,
            beta,
            c_inf,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn c_inf(&self) -> f64 {
        self.c_inf
    }

    /// The data-size slice of the law, i.e. the limit `m -> inf`.
    pub fn data_part(&self) -> DataLawParams {
        DataLawParams::new_unchecked(self.a, self.alpha, self.c_inf)
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.a, self.alpha, self.b, self.beta, self.c_inf]
    }
}

/// Random-guess envelope: `eps0` is the error of a blind guess (1/2 for a
/// balanced binary task) and `eta` sets where the transition happens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeParams {
    eps0: f64,
    eta: f64,
}

impl EnvelopeParams {
    pub fn new(eps0: f64, eta: f64) -> Result<Self> {
        if !(eps0 > 0.0 && eps0 <= 1.0) {
            return Err(Error::Validation(format!("eps0 must lie in (0, 1], got {eps0}")));
        }
        Ok(EnvelopeParams {
            eps0,
            eta: positive(eta, "eta")?,
        })
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Mean squared residual fell to or below the threshold.
    MseBelowThreshold,
    /// Relative parameter step fell to or below the threshold.
    StepBelowThreshold,
    MaxIterations,
    /// Damping grew without finding a decreasing step.
    Stalled,
}

impl StopReason {
    pub fn is_converged(self) -> bool {
        matches!(
            self,
            StopReason::MseBelowThreshold | StopReason::StepBelowThreshold
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult<P> {
    pub params: P,
    pub sse: f64,
    pub mse: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stop: StopReason,
    /// `model(point) - observed` for every point, in set order.
    pub residuals: Vec<f64>,
    /// Index of the winning start (0 is the configured initial point).
    pub start_index: usize,
}
