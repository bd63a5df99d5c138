use num_complex::Complex64;

/// Errors produced by the numerical and I/O layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller passed a value outside the mathematical domain of an
    /// operation (non-finite mass, v ≥ 1, negative mass, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural parameter is invalid (Γ ≤ 0, M ≤ μ₀, empty grid, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The adaptive engine exhausted its panel budget.  Carries the best
    /// estimate and the associated error bound so callers can annotate
    /// instead of aborting.
    #[error("quadrature failed to converge: error bound {bound:.3e} after {panels} panels")]
    Convergence {
        best: Complex64,
        bound: f64,
        panels: usize,
    },

    /// The brute-force oracle refuses to run below its sampling floor.
    #[error("oracle refusal: {0}")]
    OracleRefusal(String),

    /// Run-configuration problems (unknown keys, invariant violations).
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
