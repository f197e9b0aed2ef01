use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two twist angles coincide where a construction divides by their difference.
    /// Labels are 1-based.
    #[error("singular twist: labels {a} and {b} carry coincident angles (|e^(i dPhi) - 1| = {gap:.3e})")]
    SingularTwist { a: usize, b: usize, gap: f64 },

    /// A symbolic oscillator exponent ran past the hard cap, which signals
    /// runaway growth rather than a legitimate computation.
    #[error("oscillator exponent {exponent} exceeds cap {cap} (family {family})")]
    DegreeCap {
        family: usize,
        exponent: u32,
        cap: u32,
    },

    #[error("oracle failure: {0}")]
    OracleFailure(String),

    /// An occupation sector could not be resolved into a joint eigenbasis.
    #[error("unresolved degeneracy in sector {sector:?}: {detail}")]
    Degeneracy { sector: Vec<usize>, detail: String },

    /// An internal consistency check failed; indicates a defect, not bad input.
    #[error("construction defect: {0}")]
    ConstructionBug(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
