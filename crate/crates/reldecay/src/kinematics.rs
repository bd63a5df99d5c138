//! Exact relativistic energy–momentum relations, boosts to the moving
//! frame, and the approximation schemes under comparison.
//!
//! Geometry is one parallel axis plus a scalar perpendicular magnitude:
//! the perpendicular momentum passes through a boost unchanged, so full
//! 3-vectors carry no extra information here.

use crate::analysis::ConsistencyRecord;
use crate::{Error, Result};

/// A (M, p, v, γ) bundle with γ derived, never stored independently, so
/// the identity γ = E_M(p)/M = 1/√(1−v²) holds by construction.
#[derive(Debug, Clone, Copy)]
pub struct Kinematics {
    mass: f64,
    momentum: f64,
    velocity: f64,
    gamma: f64,
}

impl Kinematics {
    /// Build from the reference mass and the momentum measured in the
    /// observer rest frame.
    pub fn from_momentum(mass: f64, momentum: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Parameter(format!("reference mass must be positive, got {mass}")));
        }
        if !momentum.is_finite() || momentum < 0.0 {
            return Err(Error::Domain(format!("momentum must be finite and ≥ 0, got {momentum}")));
        }
        let energy = energy_rest(mass, momentum)?;
        Ok(Self {
            mass,
            momentum,
            velocity: momentum / energy,
            gamma: energy / mass,
        })
    }

    /// Build from the boost speed v ∈ [0, 1).
    pub fn from_velocity(mass: f64, velocity: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Parameter(format!("reference mass must be positive, got {mass}")));
        }
        check_speed(velocity)?;
        let gamma = 1.0 / (1.0 - velocity * velocity).sqrt();
        Ok(Self {
            mass,
            momentum: gamma * velocity * mass,
            velocity,
            gamma,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn momentum(&self) -> f64 {
        self.momentum
    }
    pub fn velocity(&self) -> f64 {
        self.velocity
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Selects the energy–momentum relation used inside the velocity-frame
/// amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseModel {
    /// Full Lorentz transforms of (E_m(p), p).
    Exact,
    /// E ≈ γ(m + v·p∥), k∥ ≈ γ(p∥ + v·m): the approximation chain under
    /// scrutiny, which keeps v·p∥ while dropping p²/m² in E_m(p).
    CarloApprox,
    /// E ≈ γm, k∥ ≈ γvm: the chain with p∥ dropped at the same order.
    CorrectedApprox,
}

impl PhaseModel {
    pub fn label(&self) -> &'static str {
        match self {
            PhaseModel::Exact => "exact",
            PhaseModel::CarloApprox => "carlo",
            PhaseModel::CorrectedApprox => "corrected",
        }
    }
}

fn check_speed(v: f64) -> Result<()> {
    if !v.is_finite() || !(0.0..1.0).contains(&v) {
        return Err(Error::Domain(format!("boost speed must satisfy 0 ≤ v < 1, got {v}")));
    }
    Ok(())
}

/// E_m(p) = √(m² + p²).
pub fn energy_rest(m: f64, p: f64) -> Result<f64> {
    if !(m >= 0.0) {
        return Err(Error::Domain(format!("mass must be ≥ 0, got {m}")));
    }
    Ok(m.hypot(p))
}

/// γ = √(M² + p²)/M, the Lorentz factor expressed through momentum.
pub fn gamma_from_p(mass: f64, p: f64) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::Parameter(format!("mass must be positive, got {mass}")));
    }
    Ok(mass.hypot(p) / mass)
}

fn gamma_v(v: f64) -> f64 {
    1.0 / (1.0 - v * v).sqrt()
}

/// Boosted energy E_m(k_m) = γ(E_m(p) + v·p∥).
pub fn boost_energy_exact(m: f64, p_par: f64, p_perp: f64, v: f64) -> Result<f64> {
    check_speed(v)?;
    let e = energy_rest(m, p_par.hypot(p_perp))?;
    Ok(gamma_v(v) * (e + v * p_par))
}

/// Boosted parallel momentum k_m∥ = γ(p∥ + v·E_m(p)); the perpendicular
/// component passes through unchanged.
pub fn boost_momentum_exact(m: f64, p_par: f64, p_perp: f64, v: f64) -> Result<f64> {
    check_speed(v)?;
    let e = energy_rest(m, p_par.hypot(p_perp))?;
    Ok(gamma_v(v) * (p_par + v * e))
}

/// Boosted energy under the selected approximation scheme.
pub fn boost_energy_model(model: PhaseModel, m: f64, p_par: f64, p_perp: f64, v: f64) -> Result<f64> {
    check_speed(v)?;
    match model {
        PhaseModel::Exact => boost_energy_exact(m, p_par, p_perp, v),
        PhaseModel::CarloApprox => Ok(gamma_v(v) * (m + v * p_par)),
        PhaseModel::CorrectedApprox => Ok(gamma_v(v) * m),
    }
}

/// Boosted parallel momentum under the selected approximation scheme.
pub fn boost_momentum_model(model: PhaseModel, m: f64, p_par: f64, v: f64) -> Result<f64> {
    check_speed(v)?;
    match model {
        PhaseModel::Exact => boost_momentum_exact(m, p_par, 0.0, v),
        PhaseModel::CarloApprox => Ok(gamma_v(v) * (p_par + v * m)),
        PhaseModel::CorrectedApprox => Ok(gamma_v(v) * v * m),
    }
}

/// Residuals of the γ-identity and of the two approximation schemes at one
/// (m, p∥, v) point, with p⊥ = 0.
///
/// r_identity = |γ(m + v·p∥)/m − γ| measures how far the kept v·p∥ term
/// pushes the boosted energy off the mass-shell identity γ = E_m(k_m)/m;
/// it vanishes only on the v = 0 and p∥ = 0 branches.
pub fn consistency_residual(m: f64, p_par: f64, v: f64) -> Result<ConsistencyRecord> {
    if !(m > 0.0) {
        return Err(Error::Parameter(format!("mass must be positive, got {m}")));
    }
    check_speed(v)?;
    let g = gamma_v(v);
    let e_exact = boost_energy_exact(m, p_par, 0.0, v)?;
    Ok(ConsistencyRecord {
        m,
        p_par,
        v,
        r_identity: (g * (m + v * p_par) / m - g).abs(),
        r_carlo: (e_exact - g * (m + v * p_par)).abs(),
        r_corrected: (e_exact - g * m).abs(),
    })
}
