use thiserror::Error;

/// A parameter, state or schedule value that violates its invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("`{field}` must be {requirement} (got {value})")]
    Invalid {
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("polygon patch needs at least 3 vertices (got {0})")]
    TooFewVertices(usize),
    #[error("polygon patch has zero area")]
    DegeneratePolygon,
    #[error("annulus needs 0 < inner radius < outer radius (got {inner}, {outer})")]
    BadAnnulus { inner: f64, outer: f64 },
    #[error("wrench table timestamps must be strictly increasing (sample {0})")]
    NonIncreasingTable(usize),
}

impl ModelError {
    pub(crate) fn invalid(field: &'static str, requirement: &'static str, value: f64) -> Self {
        ModelError::Invalid {
            field,
            requirement,
            value,
        }
    }
}

/// Failure of the per-step friction solve.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("Newton iteration did not converge after {attempts} starts (best residual {best_residual:e})")]
    NoConvergence { attempts: usize, best_residual: f64 },
    #[error("slip velocity is zero; friction direction undefined")]
    ZeroSlip,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    /// Net downward load `m g - f_z` is not positive: the slider would lift off.
    #[error("contact lost: net normal load {normal_load} N is not positive")]
    ContactLoss { normal_load: f64 },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("ECP ({x}, {y}) left the convex hull of the contact patch")]
    ToppleRisk { x: f64, y: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("step {step}: {source}")]
pub struct SimulateError {
    /// Zero-based index of the failing step.
    pub step: usize,
    pub source: StepError,
}
