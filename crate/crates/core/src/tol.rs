//! Numerical tolerances shared by every module.

/// Hermiticity check on inputs to the eigensolver and state constructors.
pub const HERMITIAN: f64 = 1e-10;
/// Eigenvalues above `-PSD_CLIP` are clipped to zero before taking roots.
pub const PSD_CLIP: f64 = 1e-10;
/// Off-diagonal Frobenius norm at which Jacobi sweeps stop (relative to max(1, ||m||_F)).
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Norm of a pure state must be 1 within this.
pub const STATE_NORM: f64 = 1e-10;
/// Trace of a density matrix must be 1 within this.
pub const DENSITY_TRACE: f64 = 1e-10;
/// Smallest admissible density-matrix eigenvalue.
pub const DENSITY_EIGENVALUE: f64 = -1e-9;
/// Gates passed to wire-addressed application must be unitary within this.
pub const GATE_UNITARY: f64 = 1e-10;

/// Postselection with probability below this is reported as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-14;
/// Norm / trace below which normalized evolution is undefined.
pub const VANISHING: f64 = 1e-14;

/// Relative tolerance used to classify |omega| = gamma as an exceptional point.
pub const EXCEPTIONAL_POINT: f64 = 1e-12;
