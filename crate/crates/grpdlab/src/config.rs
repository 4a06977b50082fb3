//! Central numeric configuration. Every tolerance used by the crate lives
//! here so that tests and documentation can state them exactly once.

/// Slack on operator-norm comparisons: `‖u‖ ≤ 1 + NORM_SLACK` counts as
/// norm at most one.
pub const NORM_SLACK: f64 = 1e-6;

/// Slack on exact algebra identities checked in floating point
/// (convolution identities, uvu = u, admissible-pair conditions).
pub const IDENTITY_SLACK: f64 = 1e-9;

/// Imaginary parts below this count as zero in positivity checks.
pub const POSITIVITY_IMAG_SLACK: f64 = 1e-12;

/// Maximum entrywise error promised by [`crate::pnorm::matrix_exp`] for
/// inputs of 1-norm up to [`EXP_NORM_CAP`].
pub const EXP_TOL: f64 = 1e-10;
pub const EXP_NORM_CAP: f64 = 100.0;

/// Default t-grid for the hermitian test: `T_POINTS` points on
/// `[T_MIN, T_MAX]`, plus golden-section refinement around the maximum.
pub const T_MIN: f64 = -10.0;
pub const T_MAX: f64 = 10.0;
pub const T_POINTS: usize = 400;

/// Multi-restart projected ascent parameters for the p-operator norm.
pub const ASCENT_RESTARTS: usize = 32;
pub const ASCENT_MAX_ITERS: usize = 10_000;
pub const ASCENT_TOL: f64 = 1e-10;

/// Reduced restart budget for the per-grid-point norm bounds inside the
/// hermitian scan; the final verdict at the arg-max t uses the full budget.
pub const SCAN_RESTARTS: usize = 6;

/// Golden-section iterations refining the worst t of the hermitian scan.
pub const GOLDEN_ITERS: usize = 40;

/// Witness consistency required of a PNormReport: the stored witness must
/// reproduce the reported value to this accuracy.
pub const WITNESS_SLACK: f64 = 1e-9;

/// Off-diagonal mass threshold for "is essentially a real diagonal" in the
/// core rigidity check.
pub const DIAGONAL_MASS_TOL: f64 = 1e-4;

/// Tolerance for "conjugation by an accepted isometry keeps real
/// diagonals real diagonal" in the classification check.
pub const CONJUGATION_TOL: f64 = 1e-6;

/// Default seed for every sampling-based routine.
pub const DEFAULT_SEED: u64 = 0;

/// Words serialize as digit strings; alphabets larger than this have no
/// single-character digits and are rejected at construction.
pub const MAX_ALPHABET: u32 = 10;
