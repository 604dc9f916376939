use crate::C64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("grid is {nx}x{ny}; at least 3x3 samples are required")]
    GridTooSmall { nx: usize, ny: usize },
    #[error("grid spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),
    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },
    #[error("unmasked samples do not form a connected set")]
    DisconnectedMask,
    #[error("right-hand side could not be evaluated at {0}")]
    RhsFailed(C64),
    #[error("no unmasked interior samples")]
    NoInteriorPoints,
    #[error("rectangle must lie strictly inside the grid and avoid masked samples")]
    BadRectangle,
    #[error("need at least two unmasked samples")]
    TooFewPoints,
    #[error("all sampled pairs coincide")]
    CoincidentPairs,
    #[error("source grid has no unmasked cells")]
    EmptySupport,
    #[error("target {0} lies inside a source cell but away from its center")]
    OffCenterTarget(C64),
    #[error("series centers differ ({0} vs {1})")]
    CenterMismatch(C64, C64),
    #[error("inner series must start at the outer center, constant term offset is {0}")]
    NonzeroConstantTerm(C64),
    #[error("series vanishes through its truncation order")]
    ZeroSeries,
    #[error("stated vanishing order {stated}, actual order {actual}")]
    WrongOrder { stated: usize, actual: usize },
    #[error("residue q = {0} is nonzero, no single-valued primitive exists")]
    NonzeroResidue(C64),
    #[error("zero is not simple: f'(w0) = 0")]
    NotSimpleZero,
    #[error("series has no zero at its center: f(w0) = {0}")]
    NotAZero(C64),
    #[error("local inverse left its injectivity region while solving F(w) = {0}")]
    InversionFailed(C64),
    #[error("{0} lies on the logarithm's branch cut")]
    OnBranchCut(C64),
    #[error("{0} is outside the series radius guard")]
    OutsideRadius(C64),
    #[error("function is undefined at {0}")]
    Undefined(C64),
    #[error("parameter out of range: {0}")]
    Domain(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("no admissible exponent M in the scanned range")]
    NoAdmissibleExponent,
}
