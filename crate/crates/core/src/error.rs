use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("chart radius {radius} exceeds the bound {bound} for this surface")]
    RadiusTooLarge { radius: f64, bound: f64 },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("degenerate spacing at vertex {index}: consecutive points {distance:e} apart")]
    DegenerateSpacing { index: usize, distance: f64 },

    #[error("curve is not contractible on the torus (winding {winding:?})")]
    NonContractible { winding: [i64; 2] },

    #[error("curve has a self-intersection")]
    SelfIntersection,

    #[error("region to the left of the curve is unbounded")]
    UnboundedRegion,

    #[error("target spacing {spacing} is too coarse for a curve of length {length}")]
    SpacingTooCoarse { spacing: f64, length: f64 },

    #[error("field has {got} values but the region has {expected} boundary vertices")]
    LengthMismatch { expected: usize, got: usize },

    #[error("regions are not nested")]
    NotNested,

    #[error("curves do not pass through the comparison point")]
    NoTouch,

    #[error("wedge angle {angle} is too large to round")]
    AngleTooLarge { angle: f64 },

    #[error("epsilon {epsilon} is too large: tangency points fall off the arcs")]
    EpsilonTooLarge { epsilon: f64 },

    #[error("corner rounding could not be certified: {0}")]
    CertificationFailed(String),

    #[error("lens curve is infeasible for c = {c}")]
    InfeasibleC { c: f64 },

    #[error("trajectory has insufficient history around step {step}")]
    InsufficientHistory { step: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("curvature {curvature} is unresolved at spacing {spacing}")]
    BlowUp { curvature: f64, spacing: f64 },
}

impl Error {
    /// Stable kebab-case identifier, printed by the command-line tool.
    pub fn name(&self) -> &'static str {
        match self {
            Error::RadiusTooLarge { .. } => "radius-too-large",
            Error::InvalidCurve(_) => "invalid-curve",
            Error::Parse(_) => "parse-error",
            Error::DegenerateSpacing { .. } => "degenerate-spacing",
            Error::NonContractible { .. } => "non-contractible",
            Error::SelfIntersection => "self-intersection",
            Error::UnboundedRegion => "unbounded-region",
            Error::SpacingTooCoarse { .. } => "spacing-too-coarse",
            Error::LengthMismatch { .. } => "length-mismatch",
            Error::NotNested => "not-nested",
            Error::NoTouch => "no-touch",
            Error::AngleTooLarge { .. } => "angle-too-large",
            Error::EpsilonTooLarge { .. } => "epsilon-too-large",
            Error::CertificationFailed(_) => "certification-failure",
            Error::InfeasibleC { .. } => "infeasible-c",
            Error::InsufficientHistory { .. } => "insufficient-history",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::Unsupported(_) => "unsupported",
            Error::BlowUp { .. } => "blow-up",
        }
    }

    /// True for errors caused by the geometry of the input rather than its format.
    pub fn is_geometric(&self) -> bool {
        matches!(
            self,
            Error::NonContractible { .. }
                | Error::SelfIntersection
                | Error::UnboundedRegion
                | Error::DegenerateSpacing { .. }
                | Error::InvalidCurve(_)
        )
    }
}
