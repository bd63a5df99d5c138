//! The three survival amplitudes: A₀(t) at rest, A_p(t) at definite
//! momentum, and A_v(t;x) in the frame moving with velocity v.
//!
//! Everything funnels through one oscillatory kernel: amplitudes are
//! computed in the energy variable E, where the phase is exactly
//! e^{−iEt}, with f(E) = ω(√(E²−p²))·E/√(E²−p²) carrying the Jacobian.
//! In the velocity frame the double (m, p) integral is arranged so the
//! momentum integral is the outer, smooth one (a weighted Gauss–Hermite
//! sum over |φ(p)|²) and the mass integral stays on the oscillatory
//! engine.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::kinematics::PhaseModel;
use crate::massdist::MassDistribution;
use crate::quadrature::{
    fourier_transform_fast, fourier_transform_oracle, gauss::gauss_hermite, Amplitude,
    FourierIntegrand,
};
use crate::{Error, Result};

/// |φ(p)|², the momentum density of the wave packet along the boost axis.
#[derive(Debug, Clone, Copy)]
pub struct MomentumSmearing {
    pub p_bar: f64,
    pub sigma_p: f64,
    pub shape: SmearingShape,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmearingShape {
    Gaussian,
}

impl MomentumSmearing {
    pub fn gaussian(p_bar: f64, sigma_p: f64) -> Result<Self> {
        if !(sigma_p > 0.0) || !sigma_p.is_finite() || !p_bar.is_finite() {
            return Err(Error::Parameter(format!(
                "momentum smearing needs finite p̄ and σ_p > 0, got ({p_bar}, {sigma_p})"
            )));
        }
        Ok(Self {
            p_bar,
            sigma_p,
            shape: SmearingShape::Gaussian,
        })
    }

    /// Whether the Γ ≪ σ_p ≪ M separation holds, reading "≪" as a factor
    /// of ten.
    pub fn regime_ok(&self, width: f64, mass: f64) -> bool {
        width <= self.sigma_p / 10.0 && self.sigma_p <= mass / 10.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// Evaluation times, all ≥ 0 and strictly increasing, capped at 10⁵
/// lifetimes.
#[derive(Debug, Clone)]
pub struct TimeGrid {
    tau: f64,
    points: Vec<f64>,
    spacing: Spacing,
}

impl TimeGrid {
    pub fn linear(tau: f64, t_max_tau: f64, n: usize) -> Result<Self> {
        Self::validate(tau, t_max_tau, n)?;
        let t_max = t_max_tau * tau;
        let points = (0..n)
            .map(|i| t_max * i as f64 / (n - 1) as f64)
            .collect();
        Ok(Self {
            tau,
            points,
            spacing: Spacing::Linear,
        })
    }

    /// Log-spaced grid from `t_min_tau` to `t_max_tau` lifetimes.
    pub fn log(tau: f64, t_min_tau: f64, t_max_tau: f64, n: usize) -> Result<Self> {
        Self::validate(tau, t_max_tau, n)?;
        if !(t_min_tau > 0.0 && t_min_tau < t_max_tau) {
            return Err(Error::Parameter(format!(
                "log grid needs 0 < t_min < t_max, got ({t_min_tau}, {t_max_tau})"
            )));
        }
        let (lo, hi) = (t_min_tau.ln(), t_max_tau.ln());
        let points = (0..n)
            .map(|i| tau * (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
            .collect();
        Ok(Self {
            tau,
            points,
            spacing: Spacing::Log,
        })
    }

    pub fn from_points(tau: f64, points: Vec<f64>, spacing: Spacing) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Parameter("time grid must be non-empty".into()));
        }
        if points[0] < 0.0 || points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter(
                "time grid must be strictly increasing and ≥ 0".into(),
            ));
        }
        if points[points.len() - 1] > 1e5 * tau {
            return Err(Error::Parameter(
                "time grid exceeds the 10⁵ τ horizon".into(),
            ));
        }
        Ok(Self { tau, points, spacing })
    }

    fn validate(tau: f64, t_max_tau: f64, n: usize) -> Result<()> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::Parameter(format!("lifetime τ must be positive, got {tau}")));
        }
        if n < 2 {
            return Err(Error::Parameter(format!("grid needs at least 2 points, got {n}")));
        }
        if !(t_max_tau > 0.0 && t_max_tau <= 1e5) {
            return Err(Error::Parameter(format!(
                "horizon must satisfy 0 < t_max ≤ 10⁵ τ, got {t_max_tau} τ"
            )));
        }
        Ok(())
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn points(&self) -> &[f64] {
        &self.points
    }
    pub fn spacing(&self) -> Spacing {
        self.spacing
    }
    pub fn horizon_tau(&self) -> f64 {
        self.points[self.points.len() - 1] / self.tau
    }
}

/// Complex amplitudes and probabilities P(t) = |A(t)|² over a time grid.
#[derive(Debug, Clone)]
pub struct AmplitudeSeries {
    pub grid: TimeGrid,
    pub amplitudes: Vec<Complex64>,
    pub probabilities: Vec<f64>,
    pub error_bounds: Vec<f64>,
    pub converged: Vec<bool>,
    pub label: String,
}

impl AmplitudeSeries {
    fn from_amplitudes(grid: TimeGrid, amps: Vec<(Complex64, f64, bool)>, label: String) -> Self {
        let amplitudes: Vec<Complex64> = amps.iter().map(|a| a.0).collect();
        let probabilities = amplitudes.iter().map(|a| a.norm_sqr()).collect();
        let error_bounds = amps
            .iter()
            .map(|(a, e, _)| 2.0 * a.norm() * e + e * e)
            .collect();
        let converged = amps.iter().map(|a| a.2).collect();
        AmplitudeSeries {
            grid,
            amplitudes,
            probabilities,
            error_bounds,
            converged,
            label,
        }
    }

    pub fn fully_failed(&self) -> bool {
        self.converged.iter().all(|c| !c)
    }

    /// CSV rows: t, t_over_tau, re_A, im_A, P, err_bound, label.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,t_over_tau,re_A,im_A,P,err_bound,label\n");
        for (i, t) in self.grid.points().iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                t,
                t / self.grid.tau(),
                self.amplitudes[i].re,
                self.amplitudes[i].im,
                self.probabilities[i],
                self.error_bounds[i],
                self.label
            ));
        }
        out
    }
}

/// Truncation tail mass used for all amplitude integrands.
pub const DEFAULT_TAIL_EPS: f64 = 1e-10;

/// Builds the energy-variable envelope for the A_p(t) integral:
/// f(E) = ω(√(E²−p²))·E/√(E²−p²) on the truncated support.
///
/// At p = 0 the substitution is the identity and f(E) = ω(E).  The lower
/// limit sticks to the threshold whenever ω(μ₀) > 0, which is also the
/// condition for the inverse-square-root edge at p > 0.
pub fn to_energy_representation(
    dist: &MassDistribution,
    p: f64,
    eps: f64,
) -> Result<FourierIntegrand> {
    if !dist.is_normalized() {
        return Err(Error::Parameter(
            "distribution must be normalized before amplitude evaluation".into(),
        ));
    }
    let p = p.abs(); // isotropy
    let (mut m_lo, m_hi) = dist.effective_support(eps)?;
    let mu0 = dist.mu0();
    let edge_density = if mu0.is_finite() { dist.density(mu0) } else { 0.0 };
    if edge_density > 0.0 {
        m_lo = mu0;
    }
    // the lower limit is a hard spectral edge (nothing beneath it) when
    // it coincides with the threshold; only genuinely trimmed tails
    // count toward the truncation bound
    let lo_is_threshold = mu0.is_finite() && m_lo <= mu0;
    let discarded = ((if lo_is_threshold { 0.0 } else { dist.cdf(m_lo) })
        + (1.0 - dist.cdf(m_hi)))
    .max(0.0);
    let seeds_m = dist.structure_points();
    if p == 0.0 {
        let d = dist.clone();
        let seeds = seeds_m;
        let mut g = FourierIntegrand::new(
            Box::new(move |e: f64| d.density(e)),
            m_lo,
            m_hi,
            false,
            discarded,
            seeds,
        )?;
        if lo_is_threshold {
            g.mark_lo_untrimmed();
        }
        return Ok(g);
    }
    if m_lo < 0.0 {
        return Err(Error::Parameter(
            "momentum-frame evaluation requires nonnegative mass support".into(),
        ));
    }
    let e_lo = m_lo.hypot(p);
    let e_hi = m_hi.hypot(p);
    let singular = edge_density > 0.0;
    let d = dist.clone();
    let seeds = seeds_m.iter().map(|m| m.hypot(p)).collect();
    let mut g = FourierIntegrand::new(
        Box::new(move |e: f64| {
            // m = √((E−p)(E+p)), stable near the edge where E ≈ p
            let m = ((e - p) * (e + p)).max(0.0).sqrt();
            if m == 0.0 {
                return 0.0;
            }
            d.density(m) * e / m
        }),
        e_lo,
        e_hi,
        singular,
        discarded,
        seeds,
    )?;
    if lo_is_threshold {
        g.mark_lo_untrimmed();
    }
    Ok(g)
}

fn eval_series(
    grid: TimeGrid,
    label: String,
    eval: impl Fn(f64) -> Result<Amplitude> + Sync,
) -> AmplitudeSeries {
    let amps: Vec<(Complex64, f64, bool)> = grid
        .points()
        .par_iter()
        .map(|&t| match eval(t) {
            Ok(a) => (a.value, a.error_bound, true),
            Err(Error::Convergence { best, bound, .. }) => (best, bound, false),
            Err(_) => (Complex64::new(f64::NAN, f64::NAN), f64::INFINITY, false),
        })
        .collect();
    AmplitudeSeries::from_amplitudes(grid, amps, label)
}

/// A₀(t) = ∫ ω(m) e^{−imt} dm.
pub fn survival_rest(dist: &MassDistribution, grid: &TimeGrid) -> Result<AmplitudeSeries> {
    survival_momentum(dist, 0.0, grid)
}

/// A_p(t) = ∫ ω(m) e^{−it√(m²+p²)} dm.
pub fn survival_momentum(dist: &MassDistribution, p: f64, grid: &TimeGrid) -> Result<AmplitudeSeries> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("momentum must be finite and ≥ 0, got {p}")));
    }
    let integrand = to_energy_representation(dist, p, DEFAULT_TAIL_EPS)?;
    let label = if p == 0.0 {
        "rest".to_string()
    } else {
        format!("momentum p={p}")
    };
    Ok(eval_series(grid.clone(), label, |t| {
        fourier_transform_fast(&integrand, t)
    }))
}

/// Single-point convenience used by the analysis layer to evaluate the
/// rest-frame law at rescaled times without interpolation.
pub fn rest_amplitude_at(dist: &MassDistribution, t: f64) -> Result<Amplitude> {
    let integrand = to_energy_representation(dist, 0.0, DEFAULT_TAIL_EPS)?;
    fourier_transform_fast(&integrand, t)
}

/// Position rule for the velocity-frame amplitude A_v(t;x).
///
/// The interpretation of A_v(t;x) is contested, so the evaluation point
/// is a caller-visible choice, never hard-coded:
/// * `Comoving` tracks x = v·t;
/// * `Fixed(x)` holds the position still;
/// * `Auto` evaluates each phase model at the position where its packet
///   actually sits — x = v·t for Exact and CarloApprox, whose boosted
///   dispersion moves the packet at speed v, and x = 0 for
///   CorrectedApprox, whose boosted momentum γvm carries no p-dependence
///   and therefore no packet motion.  This is the assignment under which
///   each approximation chain exhibits its characteristic decay law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XRule {
    Comoving,
    Fixed(f64),
    Auto,
}

impl XRule {
    fn position(&self, model: PhaseModel, v: f64, t: f64) -> f64 {
        match self {
            XRule::Comoving => v * t,
            XRule::Fixed(x) => *x,
            XRule::Auto => match model {
                PhaseModel::CorrectedApprox => 0.0,
                _ => v * t,
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            XRule::Comoving => "x=vt".into(),
            XRule::Fixed(x) => format!("x={x}"),
            XRule::Auto => "x=auto".into(),
        }
    }
}

/// A_v(t;x) = ∫dm ω(m) ∫dp |φ(p)|² e^{−iE(m,p,v)t + ik(m,p,v)x} with
/// (E, k) supplied by the chosen phase model and p⊥ = 0.
///
/// For every model the exponent is linear in the combination actually
/// integrated over m, so the double integral factors into Gauss–Hermite
/// momentum nodes times oscillatory mass transforms evaluated at the
/// effective time T = γ(t − vx):
///
/// * Exact:     Σ_j w_j e^{ip_j γ(x−vt)} ∫ω(m) e^{−iT√(m²+p_j²)} dm
/// * Carlo:     Σ_j w_j e^{ip_j γ(x−vt)} · ∫ω(m) e^{−imT} dm
/// * Corrected: ∫ω(m) e^{−imT} dm
///
/// The node sum is doubled from 64 points until two successive levels
/// agree to 1e−8.
pub fn survival_velocity_frame(
    dist: &MassDistribution,
    smear: &MomentumSmearing,
    v: f64,
    x_rule: XRule,
    model: PhaseModel,
    grid: &TimeGrid,
) -> Result<AmplitudeSeries> {
    if !v.is_finite() || !(0.0..1.0).contains(&v) {
        return Err(Error::Domain(format!("boost speed must satisfy 0 ≤ v < 1, got {v}")));
    }
    if !dist.is_normalized() {
        return Err(Error::Parameter("distribution must be normalized".into()));
    }
    let gamma = 1.0 / (1.0 - v * v).sqrt();
    let rest_integrand = to_energy_representation(dist, 0.0, DEFAULT_TAIL_EPS)?;
    let label = format!(
        "velocity v={v} gamma={gamma:.6} model={} {}",
        model.label(),
        x_rule.label()
    );

    let series = eval_series(grid.clone(), label, |t| {
        let x = x_rule.position(model, v, t);
        let t_eff = gamma * (t - v * x);
        let s_phase = gamma * (x - v * t); // momentum-phase coefficient

        match model {
            PhaseModel::CorrectedApprox => fourier_transform_fast(&rest_integrand, t_eff),
            PhaseModel::CarloApprox => {
                let base = fourier_transform_fast(&rest_integrand, t_eff)?;
                let (chi, chi_err, ok) = smearing_characteristic(smear, s_phase);
                let value = chi * base.value;
                let bound = chi.norm() * base.error_bound + base.value.norm() * chi_err;
                if ok {
                    Ok(Amplitude {
                        value,
                        error_bound: bound,
                        panels: base.panels,
                    })
                } else {
                    Err(Error::Convergence {
                        best: value,
                        bound,
                        panels: base.panels,
                    })
                }
            }
            PhaseModel::Exact => exact_velocity_point(dist, smear, t_eff, s_phase),
        }
    });
    Ok(series)
}

/// ∫ |φ(p)|² e^{isp} dp by doubled Gauss–Hermite.
fn smearing_characteristic(smear: &MomentumSmearing, s: f64) -> (Complex64, f64, bool) {
    let mut prev: Option<Complex64> = None;
    let mut n = 64usize;
    let root_pi = std::f64::consts::PI.sqrt();
    while n <= 1024 {
        let nw = gauss_hermite(n);
        let mut sum = Complex64::new(0.0, 0.0);
        for (x, w) in nw.0.iter().zip(&nw.1) {
            let p = smear.p_bar + std::f64::consts::SQRT_2 * smear.sigma_p * x;
            let (si, co) = (s * p).sin_cos();
            sum += w * Complex64::new(co, si);
        }
        sum /= root_pi;
        if let Some(prev) = prev {
            let diff = (sum - prev).norm();
            if diff <= 1e-8 * sum.norm().max(1.0) {
                return (sum, diff, true);
            }
            // a characteristic function this far into its Gaussian tail is
            // numerically zero; report it as such rather than failing
            if sum.norm() < 1e-12 && prev.norm() < 1e-12 {
                return (Complex64::new(0.0, 0.0), 1e-12, true);
            }
        }
        prev = Some(sum);
        n *= 2;
    }
    (prev.unwrap(), f64::INFINITY, false)
}

/// One velocity-frame point under exact kinematics: Gauss–Hermite over
/// the momentum density, an oscillatory mass transform per node.
fn exact_velocity_point(
    dist: &MassDistribution,
    smear: &MomentumSmearing,
    t_eff: f64,
    s_phase: f64,
) -> Result<Amplitude> {
    let root_pi = std::f64::consts::PI.sqrt();
    let mut prev: Option<(Complex64, f64, usize)> = None;
    let mut n = 64usize;
    while n <= 512 {
        let nw = gauss_hermite(n);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        let mut panels = 0usize;
        for (x, w) in nw.0.iter().zip(&nw.1) {
            let p = smear.p_bar + std::f64::consts::SQRT_2 * smear.sigma_p * x;
            let integrand = to_energy_representation(dist, p.abs(), DEFAULT_TAIL_EPS)?;
            let a = match fourier_transform_fast(&integrand, t_eff) {
                Ok(a) => a,
                Err(Error::Convergence { best, bound, panels }) => Amplitude {
                    value: best,
                    error_bound: bound,
                    panels,
                },
                Err(e) => return Err(e),
            };
            let (si, co) = (s_phase * p).sin_cos();
            sum += w * Complex64::new(co, si) * a.value;
            err += w * a.error_bound;
            panels += a.panels;
        }
        sum /= root_pi;
        err /= root_pi;
        if let Some((prev_sum, prev_err, prev_panels)) = prev {
            let diff = (sum - prev_sum).norm();
            if diff <= 1e-8 * sum.norm().max(1.0) {
                return Ok(Amplitude {
                    value: sum,
                    error_bound: err + diff,
                    panels: panels + prev_panels,
                });
            }
            let _ = prev_err;
        }
        prev = Some((sum, err, panels));
        n *= 2;
    }
    let (value, bound, panels) = prev.unwrap();
    Err(Error::Convergence {
        best: value,
        bound: bound.max(1e-6),
        panels,
    })
}

/// Exposes the oracle engine across the same series interface, for
/// cross-checking runs (`--oracle`).
pub fn survival_momentum_oracle(
    dist: &MassDistribution,
    p: f64,
    grid: &TimeGrid,
    max_points: usize,
) -> Result<AmplitudeSeries> {
    // a fixed-step midpoint rule must resolve both the oscillation and
    // the envelope peak, so the support is truncated more aggressively
    // than in the adaptive path (1e-3 tail mass) to keep n feasible
    let integrand = to_energy_representation(dist, p, 1e-3)?;
    let (e_lo, e_hi) = integrand.bounds();
    let span = e_hi - e_lo;
    let n_envelope = (100.0 * span / integrand.min_feature_scale()).ceil() as usize;
    let label = if p == 0.0 {
        "rest (oracle)".to_string()
    } else {
        format!("momentum p={p} (oracle)")
    };
    Ok(eval_series(grid.clone(), label, |t| {
        let phase = t.abs() * span;
        let n = ((10.0 * phase / std::f64::consts::PI).ceil() as usize)
            .max(n_envelope)
            .max(200_000)
            .min(max_points);
        let value = fourier_transform_oracle(&integrand, t, n)?;
        Ok(Amplitude {
            value,
            error_bound: integrand.tail_eps() + phase.powi(2) / (24.0 * (n * n) as f64),
            panels: n,
        })
    }))
}
