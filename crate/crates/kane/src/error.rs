use thiserror::Error;

/// Errors produced by the calibration solvers and propagators.
#[derive(Debug, Clone, Error)]
pub enum KaneError {
    /// The Z-rotation ratio equation has no sign change over a ∈ (0, 1).
    #[error("no Z-rotation solution in (0,1) for windings (m, n) = ({m}, {n})")]
    NoZSolution { m: i32, n: i32 },

    /// Bisection was given a bracket without a sign change.
    #[error("bisection bracket [{lo}, {hi}] has no sign change")]
    NoSignChange { lo: f64, hi: f64 },

    /// An iterative solver ran out of iterations.
    #[error("{solver} did not converge after {iterations} iterations (residual {residual:.3e})")]
    MaxIterations {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// Newton-Raphson met a numerically singular Jacobian.
    #[error("singular Jacobian at iterate {iterate:?} (residual {residual:.3e})")]
    SingularJacobian { iterate: Vec<f64>, residual: f64 },

    /// A Newton iterate left the admissible domain.
    #[error("iterate {iterate:?} left the solver domain")]
    LeftDomain { iterate: Vec<f64> },

    /// The damped Newton residual stalled above the requested tolerance.
    #[error(
        "residual floor {residual:.3e} above tolerance {tol:.3e} at iterate {iterate:?}"
    )]
    ResidualFloor {
        iterate: Vec<f64>,
        residual: f64,
        tol: f64,
    },

    /// A matrix that must be Hermitian was not.
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    /// Requested evolution time lies outside the schedule horizon.
    #[error("time {t} ps outside schedule horizon [0, {horizon}] ps")]
    OutOfHorizon { t: f64, horizon: f64 },

    /// Step-halving certification failed at the smallest allowed step.
    #[error("propagation not converged: halving test difference {diff:.3e} at dt = {dt} ps")]
    StepNotConverged { diff: f64, dt: f64 },

    /// Pulse or profile parameter outside its admissible range.
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A state was expected to lie in the computational span.
    #[error("state lies outside the computational subspace (leakage {leakage:.3e})")]
    OutsideComputationalSpan { leakage: f64 },

    /// No cubic root produced a spectrally valid eigenvalue set.
    #[error("no real cubic root yields a valid eigenvalue set (best residual {residual:.3e})")]
    NoValidRoot { residual: f64 },

    /// Rotating-frame eigenvector denominators underflowed.
    #[error("ill-conditioned rotating-frame eigenvectors: {denominator} underflowed")]
    IllConditioned { denominator: &'static str },
}
