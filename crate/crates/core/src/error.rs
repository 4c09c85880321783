use thiserror::Error;

/// Every failure the library reports. Variants map onto two exit classes:
/// precondition/domain problems and numerical non-convergence.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SliceError {
    #[error("division by a zero quaternion")]
    ZeroDivision,
    #[error("not a unit imaginary quaternion")]
    NotImaginaryUnit,
    #[error("point {0} is not in the domain")]
    NotInDomain(String),
    #[error("point {0} lies on the boundary collar of the domain")]
    OnBoundary(String),
    #[error("cap around {0} has fewer than two usable units")]
    CapTooSmall(String),
    #[error("the two imaginary units coincide")]
    UnitsEqual,
    #[error("slice data disagree on the real axis (gap {0:e})")]
    RealTraceMismatch(f64),
    #[error("no cap information for point {0}")]
    NoCapInfo(String),
    #[error("the symmetrization vanishes identically (zero divisor)")]
    ZeroDivisorOnDomain,
    #[error("operation needs a symmetric domain")]
    NotSymmetric,
    #[error("region does not meet the real axis")]
    NotSliceDomain,
    #[error("point is not on the sphere of the given cap")]
    CapMismatch,
    #[error("function is not divisible by the requested factor near the cap")]
    NotADivisor,
    #[error("function does not vanish on the cap")]
    NotVanishingOnCap,
    #[error("spherical derivative undefined on the real axis")]
    OnRealAxis,
    #[error("degenerate pair for the reciprocal kernel")]
    DegeneratePair,
    #[error("function is identically zero")]
    IdenticallyZero,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("domains of the operands are incompatible")]
    DomainMismatch,
    #[error("symmetrization vanishes at the point")]
    SymmetrizationZero,
    #[error("cap cannot be resolved on the sphere")]
    CapNotResolvable,
    #[error("point is not an isolated singularity")]
    NotIsolatedSingularity,
    #[error("contour is not closed")]
    OpenContour,
    #[error("probe lies outside the integration region")]
    ProbeOutside,
    #[error("parameter out of range")]
    ParamOutOfRange,
    #[error("point lies on a branch cut")]
    OnCut,
    #[error("imaginary unit choice violates the construction's requirements")]
    BadUnitChoice,
    #[error("point lies outside the region of convergence")]
    OutsideConvergenceRegion,
    #[error("no annulus around the centre fits in the domain")]
    NoAnnulus,
    #[error("series did not reach tolerance within the available terms")]
    MaxTermsExceeded,
    #[error("probe lies outside the validated cone")]
    ProbeOutsideValidated,
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl SliceError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            SliceError::MaxTermsExceeded | SliceError::NonConvergence(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, SliceError>;
