//! Named numerical tolerances. Call sites refer to these instead of literals.

/// Collar width around domain boundaries and branch cuts.
pub const BOUNDARY_COLLAR: f64 = 1e-9;

/// Relative threshold below which a spherical derivative counts as zero.
pub const CAP_ZERO: f64 = 1e-8;

/// Decisions within this factor of [`CAP_ZERO`] are flagged as marginal.
pub const MARGINAL_FACTOR: f64 = 10.0;

/// Root clustering radius for the companion-matrix solver.
pub const ROOT_CLUSTER: f64 = 1e-7;

/// Relative tolerance for the singular-differential test.
pub const DIFFERENTIAL_SINGULAR: f64 = 1e-9;

/// Residual allowed by `divides_near`.
pub const DIVIDES_NEAR: f64 = 1e-8;

/// Minimum number of cap probes used by `divides_near`.
pub const DIVIDES_PROBES: usize = 20;

/// Relative noise floor for Laurent coefficients.
pub const LAURENT_FLOOR: f64 = 1e-12;

/// Consecutive deep coefficients above the floor that signal an essential singularity.
pub const ESSENTIAL_RUN: usize = 8;

/// Nodes on the trapezoidal Laurent contour.
pub const LAURENT_NODES: usize = 2048;

/// Default depth of spherical expansions.
pub const SPHERICAL_DEPTH: usize = 32;

/// Default angular step of the cap grid, in degrees.
pub const CAP_STEP_DEG: f64 = 0.5;

/// Target accuracy of the volume Cauchy quadrature.
pub const VOLUME_TARGET: f64 = 1e-7;

/// Relative tolerance used when matching a real trace or a same-plane test.
pub const REAL_TRACE: f64 = 1e-10;
