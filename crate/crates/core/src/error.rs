use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero vector has no primitive direction")]
    ZeroVector,

    #[error("vector length {found} does not match ambient rank {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("sublattice is not saturated; its quotient has torsion")]
    NotSaturated,

    #[error("cone contains a line (not strongly convex): rays {rays}")]
    NotStronglyConvex { rays: String },

    #[error("not a fan: cones {first} and {second} do not meet in a common face")]
    NotAFan { first: String, second: String },

    #[error("cone {0} is not in the fan")]
    ConeNotInFan(String),

    #[error("cone {0} is not a ray of the fan")]
    NotARay(String),

    #[error("fan is not {0}")]
    Hypothesis(String),

    #[error("degree p = {p} is outside 0..={rank}")]
    DegreeOutOfRange { p: usize, rank: usize },

    #[error("contraction image does not lie in the target wedge space ({0})")]
    CoordinateSolve(String),

    #[error("coboundary squares to a nonzero map at degree {q}, through {sigma} -> {tau} -> {upsilon}")]
    CoboundarySquare { q: usize, sigma: String, tau: String, upsilon: String },

    #[error("internal identity failed: {0}")]
    Identity(String),

    #[error("rank disagreement between Smith form ({smith}) and Gaussian elimination ({gauss})")]
    RankDisagreement { smith: usize, gauss: usize },

    #[error("fan file: {0}")]
    Format(String),
}
