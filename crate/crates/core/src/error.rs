use num_complex::Complex64;
use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("point {point} (radius {radius}) leaves the domain {domain}")]
    DomainViolation {
        point: Complex64,
        radius: f64,
        domain: String,
    },
    #[error("evaluation failed at {point}: {reason}")]
    Evaluation { point: Complex64, reason: String },
    #[error("derivative vanishes at {point} (|f'| = {magnitude:e})")]
    SingularDerivative { point: Complex64, magnitude: f64 },
    #[error("no limit at infinity: {0}")]
    NoLimit(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("integration left the half-plane at t = {time}: w = {value}")]
    Integration { time: f64, value: Complex64 },
    #[error("step size underflow at t = {time} (h = {step:e})")]
    Stiffness { time: f64, step: f64 },
    #[error("pole at {point}: {reason}")]
    Pole { point: Complex64, reason: String },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("stencil at {point} with step {step:e} crosses the seam x = {seam}")]
    Stencil { point: Complex64, step: f64, seam: f64 },
    #[error("degenerate differential at {point}")]
    Degenerate { point: Complex64 },
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("domain mismatch: expected {expected}, found {found}")]
    DomainMismatch { expected: String, found: String },
    #[error(transparent)]
    Parse(#[from] crate::expr::ParseError),
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("{function} evaluated at its singular point 0")]
    Singularity { function: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
