use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("atom {index}: mass must be positive, got {mass}")]
    NonPositiveMass { index: usize, mass: f64 },
    #[error("segment {index}: density must be nonnegative, got {density}")]
    NegativeDensity { index: usize, density: f64 },
    #[error("position {x} lies beyond the right endpoint x = 1")]
    PositionBeyondEnd { x: f64 },
    #[error("non-finite coordinate in string data")]
    NonFiniteInput,
    #[error("segment {index}: left end {left} is not strictly below right end {right}")]
    EmptySegment { index: usize, left: f64, right: f64 },
    #[error("segments {index} and {} overlap", index + 1)]
    OverlappingSegments { index: usize },
    #[error("duplicate atom position {x}")]
    DuplicateAtom { x: f64 },
    #[error("atom at {x} sits in the interior of a density segment")]
    AtomInsideSegment { x: f64 },

    #[error("characteristic function is exposed only away from kappa = 0")]
    ZeroKappa,
    #[error("operation requires a purely atomic string")]
    NotAtomic,

    #[error("invalid search box: need re_min < re_max and 0 < im_min < im_max")]
    InvalidBox,
    #[error("|F| = {min_abs:.3e} on the contour: a zero is too close to the box boundary, perturb the box")]
    ZeroNearContour { min_abs: f64 },
    #[error("root search exceeded its iteration cap")]
    IterationCap,
    #[error("root polishing diverged (residual {residual:.3e} at {kappa})")]
    SolverDiverged {
        kappa: num_complex::Complex64,
        residual: f64,
    },

    #[error("constraint bounds must be positive, got m = {m}, s = {s}")]
    NonPositiveConstraint { m: f64, s: f64 },
    #[error("feasibility is defined on the open upper half-plane (Im kappa > 0)")]
    ImKappaNotPositive,
    #[error("|alpha| < S^(-1/2): the infimum is attained, use optimal_string")]
    AlphaAttained,
    #[error("|alpha| >= S^(-1/2): no optimal string, use optimizing_sequence")]
    AlphaNotAttained,
    #[error("beta = {beta} yields an inadmissible string for these constraints")]
    BetaInadmissible { beta: f64 },
}
