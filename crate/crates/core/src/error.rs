use thiserror::Error;

use crate::lattice::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("model violates {} axiom(s): {}", .0.len(), join(.0))]
    InvalidModel(Vec<Violation>),

    #[error("no representation: {0}")]
    NoRepresentation(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    /// The arithmetic step failed: the gap could not be represented.
    #[error("no witness: {0}")]
    NoWitness(String),

    /// The arithmetic succeeded but the Reider inequalities did not hold.
    #[error("certification failed: {0}")]
    CertificationFailed(String),

    /// A freshly assembled witness failed its own re-validation.
    #[error("witness invariant broken: {0}")]
    WitnessInvariant(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
