use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain of the construction (parity, ranges).
    Domain(String),
    /// A constructor would exceed the dense-matrix node budget.
    Size { nodes: u128, limit: usize },
    /// A graph, map or curve violates one of its invariants.
    Validation(String),
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// The symmetric eigensolver hit its sweep cap.
    NoConvergence { sweeps: usize, residual: f64 },
    /// Trace drift of the master-equation integrator exceeded tolerance.
    Integration { time: f64, drift: f64, step: f64 },
    NumericalFailure(String),
    Config(String),
    Disconnected { from: usize, to: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Size { nodes, limit } => {
                write!(f, "graph of {nodes} nodes exceeds the {limit}-node limit")
            }
            Error::Validation(msg) => write!(f, "validation error: {msg}"),
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "{what}: expected {expected}, found {found}"),
            Error::NoConvergence { sweeps, residual } => write!(
                f,
                "eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})"
            ),
            Error::Integration { time, drift, step } => write!(
                f,
                "trace drift {drift:e} at t = {time} exceeds tolerance; retry with a step smaller than {step}"
            ),
            Error::NumericalFailure(msg) => write!(f, "numerical failure: {msg}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Disconnected { from, to } => {
                write!(f, "node {to} is unreachable from node {from}")
            }
        }
    }
}

impl core::error::Error for Error {}
