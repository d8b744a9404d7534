use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported series or family `{0}`")]
    UnsupportedSeries(String),

    #[error("rank {rank} is below the minimum {min} for {family}: {reason}")]
    RankTooSmall {
        family: String,
        rank: usize,
        min: usize,
        reason: String,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("malformed rational `{0}`")]
    InvalidRational(String),

    #[error("matrix is not skew-symmetric at ({0}, {1})")]
    NotSkew(usize, usize),

    #[error("root {root} is not in layer {layer}")]
    NotInLayer { root: String, layer: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parameter is singular: {0}")]
    Singular(String),

    #[error("degenerate polarization pairing in layer {0}")]
    DegeneratePairing(usize),

    #[error("earlier layer {earlier} does not normalize the polarization of layer {layer}")]
    PolarizationNotNormalized { earlier: usize, layer: usize },

    #[error("incompatible parameters: {0}")]
    Incompatible(String),

    #[error("unknown harness `{0}`")]
    UnknownHarness(String),

    #[error("quadrature did not converge: {0}")]
    NonConvergent(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("element is not in the algebra: {0}")]
    NotInAlgebra(String),
}

pub type Result<T> = std::result::Result<T, Error>;
