//! Survival probabilities of unstable particles, at rest and in motion.
//!
//! An unstable state is described by a normalized mass distribution ω(m).
//! Its survival amplitude is the Fourier transform of ω with the
//! relativistic phase e^{-it·E_m(p)}, E_m(p) = √(m²+p²).  The crate
//! computes the rest-frame amplitude A₀(t), the definite-momentum
//! amplitude A_p(t), and the velocity-frame amplitude A_v(t;x) under
//! exact and approximated energy–momentum relations, and compares the
//! resulting decay laws against the classical dilation P₀(t/γ) and the
//! contracted alternative P₀(γt).

// `!(x > 0.0)` is used deliberately throughout: unlike `x <= 0.0` it also
// rejects NaN, which is exactly what the validation sites want.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplitudes;
pub mod analysis;
pub mod config;
pub mod error;
pub mod kinematics;
pub mod massdist;
pub mod quadrature;
pub mod runner;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
