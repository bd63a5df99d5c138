//! Mass (energy) distributions ω(m) of the unstable state.
//!
//! ω(m) = |ρ(m)|² is a nonnegative density on [μ₀, ∞) normalized to unit
//! mass.  The Breit–Wigner member uses the FWHM convention
//! ω(m) = N·(Γ/2π)/((m−M)² + Γ²/4), truncated below the threshold μ₀.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    BreitWigner,
    Gaussian,
    Tabulated,
}

/// A normalized mass density with threshold μ₀.
///
/// Immutable after [`MassDistribution::normalize`]; safe to share across
/// evaluation workers.
#[derive(Debug, Clone)]
pub struct MassDistribution {
    kind: Kind,
    /// Peak/central mass (natural units ħ = c = 1).
    mass: f64,
    /// FWHM for Breit–Wigner, standard deviation for Gaussian.
    width: f64,
    /// Lower mass threshold; ω(m) = 0 for m < μ₀.  May be −∞ for the
    /// untruncated Lorentzian used as an analytic reference.
    mu0: f64,
    /// Normalization constant fixed by `normalize`.
    norm: f64,
    /// (m, ω) samples, strictly increasing in m (Tabulated only).
    table: Option<Vec<(f64, f64)>>,
    normalized: bool,
}

impl MassDistribution {
    /// Raw (un-normalized) Breit–Wigner with threshold.
    pub fn breit_wigner(mass: f64, width: f64, mu0: f64) -> Result<Self> {
        validate_params(mass, width, mu0)?;
        Ok(Self {
            kind: Kind::BreitWigner,
            mass,
            width,
            mu0,
            norm: 1.0,
            table: None,
            normalized: false,
        })
    }

    /// Raw truncated Gaussian; `width` is the standard deviation.
    pub fn gaussian(mass: f64, width: f64, mu0: f64) -> Result<Self> {
        validate_params(mass, width, mu0)?;
        Ok(Self {
            kind: Kind::Gaussian,
            mass,
            width,
            mu0,
            norm: 1.0,
            table: None,
            normalized: false,
        })
    }

    /// Raw tabulated density; linear interpolation between samples, zero
    /// outside the table range.
    pub fn tabulated(table: Vec<(f64, f64)>) -> Result<Self> {
        if table.len() < 2 {
            return Err(Error::Parameter(
                "tabulated density needs at least 2 samples".into(),
            ));
        }
        for w in table.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Parameter(format!(
                    "table abscissae must be strictly increasing (got {} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        for &(m, om) in &table {
            if !m.is_finite() || !om.is_finite() || om < 0.0 {
                return Err(Error::Parameter(format!(
                    "table entries must be finite with ω ≥ 0 (got ({m}, {om}))"
                )));
            }
        }
        let mu0 = table[0].0;
        let mass = table
            .iter()
            .cloned()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0;
        let width = table.last().unwrap().0 - table[0].0;
        Ok(Self {
            kind: Kind::Tabulated,
            mass,
            width,
            mu0,
            norm: 1.0,
            table: Some(table),
            normalized: false,
        })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }
    pub fn kind_label(&self) -> &'static str {
        match self.kind {
            Kind::BreitWigner => "breit_wigner",
            Kind::Gaussian => "gaussian",
            Kind::Tabulated => "tabulated",
        }
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn width(&self) -> f64 {
        self.width
    }
    pub fn mu0(&self) -> f64 {
        self.mu0
    }
    pub fn norm(&self) -> f64 {
        self.norm
    }
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Fixes the normalization constant so that ∫ω = 1 within 1e−8.
    ///
    /// Breit–Wigner uses the closed form
    /// N⁻¹ = (1/π)[π/2 + arctan(2(M−μ₀)/Γ)]; Gaussian uses the normal CDF;
    /// Tabulated uses the exact trapezoid integral of the piecewise-linear
    /// density.
    pub fn normalize(mut self) -> Result<Self> {
        let raw_mass = match self.kind {
            Kind::BreitWigner => {
                let a = if self.mu0 == f64::NEG_INFINITY {
                    -std::f64::consts::FRAC_PI_2
                } else {
                    (2.0 * (self.mu0 - self.mass) / self.width).atan()
                };
                (std::f64::consts::FRAC_PI_2 - a) / std::f64::consts::PI
            }
            Kind::Gaussian => {
                let n = Normal::new(self.mass, self.width)
                    .map_err(|e| Error::Parameter(format!("bad gaussian parameters: {e}")))?;
                if self.mu0 == f64::NEG_INFINITY {
                    1.0
                } else {
                    1.0 - n.cdf(self.mu0)
                }
            }
            Kind::Tabulated => {
                let t = self.table.as_ref().unwrap();
                let mut s = 0.0;
                for w in t.windows(2) {
                    s += 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
                }
                s
            }
        };
        if !(raw_mass > 0.0) || !raw_mass.is_finite() {
            return Err(Error::Parameter(format!(
                "distribution has non-positive raw mass {raw_mass}"
            )));
        }
        self.norm = 1.0 / raw_mass;
        self.normalized = true;
        Ok(self)
    }

    /// ω(m) for a validated, finite m.
    ///
    /// Errors on non-finite input; use [`Self::density`] inside tight
    /// quadrature loops where m is known to be finite.
    pub fn omega_eval(&self, m: f64) -> Result<f64> {
        if !m.is_finite() {
            return Err(Error::Domain(format!("mass argument must be finite, got {m}")));
        }
        if !self.normalized {
            return Err(Error::Parameter(
                "distribution must be normalized before evaluation".into(),
            ));
        }
        Ok(self.density(m))
    }

    /// ω(m), assuming the distribution is normalized and m finite.
    #[inline]
    pub fn density(&self, m: f64) -> f64 {
        if m < self.mu0 {
            return 0.0;
        }
        match self.kind {
            Kind::BreitWigner => {
                let d = m - self.mass;
                self.norm * (self.width / (2.0 * std::f64::consts::PI))
                    / (d * d + 0.25 * self.width * self.width)
            }
            Kind::Gaussian => {
                let z = (m - self.mass) / self.width;
                self.norm * (-0.5 * z * z).exp()
                    / (self.width * (2.0 * std::f64::consts::PI).sqrt())
            }
            Kind::Tabulated => {
                let t = self.table.as_ref().unwrap();
                if m < t[0].0 || m > t[t.len() - 1].0 {
                    return 0.0;
                }
                let idx = t.partition_point(|&(x, _)| x <= m);
                if idx == 0 {
                    return self.norm * t[0].1;
                }
                if idx == t.len() {
                    return self.norm * t[t.len() - 1].1;
                }
                let (m0, w0) = t[idx - 1];
                let (m1, w1) = t[idx];
                let s = (m - m0) / (m1 - m0);
                self.norm * (w0 + s * (w1 - w0))
            }
        }
    }

    /// CDF of the normalized density, P(mass ≤ m).
    pub fn cdf(&self, m: f64) -> f64 {
        if m <= self.mu0 {
            return 0.0;
        }
        match self.kind {
            Kind::BreitWigner => {
                let lo = if self.mu0 == f64::NEG_INFINITY {
                    -std::f64::consts::FRAC_PI_2
                } else {
                    (2.0 * (self.mu0 - self.mass) / self.width).atan()
                };
                let u = (2.0 * (m - self.mass) / self.width).atan();
                (self.norm * (u - lo) / std::f64::consts::PI).min(1.0)
            }
            Kind::Gaussian => {
                let n = Normal::new(self.mass, self.width).expect("validated");
                let base = if self.mu0 == f64::NEG_INFINITY {
                    0.0
                } else {
                    n.cdf(self.mu0)
                };
                (self.norm * (n.cdf(m) - base)).clamp(0.0, 1.0)
            }
            Kind::Tabulated => {
                let t = self.table.as_ref().unwrap();
                let mut s = 0.0;
                for w in t.windows(2) {
                    if m >= w[1].0 {
                        s += 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
                    } else if m > w[0].0 {
                        let wm = self.density(m) / self.norm;
                        s += 0.5 * (m - w[0].0) * (w[0].1 + wm);
                        break;
                    } else {
                        break;
                    }
                }
                (self.norm * s).min(1.0)
            }
        }
    }

    /// Quantile q ∈ (0,1) of the normalized density.
    fn quantile(&self, q: f64) -> f64 {
        match self.kind {
            Kind::BreitWigner => {
                let lo = if self.mu0 == f64::NEG_INFINITY {
                    -std::f64::consts::FRAC_PI_2
                } else {
                    (2.0 * (self.mu0 - self.mass) / self.width).atan()
                };
                let u = lo + q * std::f64::consts::PI / self.norm;
                self.mass + 0.5 * self.width * u.tan()
            }
            Kind::Gaussian => {
                let n = Normal::new(self.mass, self.width).expect("validated");
                let base = if self.mu0 == f64::NEG_INFINITY {
                    0.0
                } else {
                    n.cdf(self.mu0)
                };
                n.inverse_cdf(base + q * (1.0 - base))
            }
            Kind::Tabulated => unreachable!("tabulated support is compact"),
        }
    }

    /// Interval [m_lo, m_hi] outside of which the density carries less
    /// than `eps` total mass.  Used for quadrature truncation.
    pub fn effective_support(&self, eps: f64) -> Result<(f64, f64)> {
        if !self.normalized {
            return Err(Error::Parameter(
                "distribution must be normalized before support queries".into(),
            ));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Parameter(format!(
                "tail mass eps must lie in (0,1), got {eps}"
            )));
        }
        if self.kind == Kind::Tabulated {
            let t = self.table.as_ref().unwrap();
            return Ok((t[0].0, t[t.len() - 1].0));
        }
        let m_lo = self.quantile(0.5 * eps).max(self.mu0);
        let m_hi = self.quantile(1.0 - 0.5 * eps);
        Ok((m_lo, m_hi))
    }

    /// Mass abscissae marking the density's structure (peak and wing
    /// scales), used to seed adaptive quadrature so that no panel can
    /// silently skip the resonance.
    pub fn structure_points(&self) -> Vec<f64> {
        match self.kind {
            Kind::Tabulated => self.table.as_ref().unwrap().iter().map(|p| p.0).collect(),
            _ => {
                let mut pts = Vec::new();
                for k in [-1000.0, -100.0, -30.0, -10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0, 30.0, 100.0, 1000.0]
                {
                    pts.push(self.mass + k * self.width);
                }
                pts
            }
        }
    }
}

fn validate_params(mass: f64, width: f64, mu0: f64) -> Result<()> {
    if !mass.is_finite() || !width.is_finite() {
        return Err(Error::Parameter(format!(
            "mass and width must be finite, got M={mass}, width={width}"
        )));
    }
    if !(width > 0.0) {
        return Err(Error::Parameter(format!("width must be positive, got {width}")));
    }
    if mu0.is_nan() || mu0 == f64::INFINITY {
        return Err(Error::Parameter(format!("threshold μ₀ must be finite or −∞, got {mu0}")));
    }
    if !(mass > mu0) {
        return Err(Error::Parameter(format!(
            "peak mass must exceed the threshold (M={mass}, μ₀={mu0})"
        )));
    }
    Ok(())
}

/// Loads a tabulated density from two-column CSV with the required header
/// row `m,omega`.
pub fn load_table_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines();
    match lines.next().map(str::trim) {
        Some("m,omega") => {}
        other => {
            return Err(Error::Config(format!(
                "tabulated CSV must start with header 'm,omega', got {other:?}"
            )))
        }
    }
    let mut table = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let parse = |s: Option<&str>| -> Result<f64> {
            s.ok_or_else(|| Error::Config(format!("line {}: missing column", i + 2)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 2)))
        };
        let m = parse(cols.next())?;
        let om = parse(cols.next())?;
        if cols.next().is_some() {
            return Err(Error::Config(format!("line {}: expected exactly 2 columns", i + 2)));
        }
        table.push((m, om));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Banded Simpson integral of the density, independent of the
    /// closed-form normalization path.
    pub(crate) fn integral_oracle(dist: &MassDistribution) -> f64 {
        match dist.kind() {
            Kind::Tabulated => {
                // midpoint resampling of the piecewise-linear density
                let (a, b) = dist.effective_support(1e-12).unwrap();
                let n = 2_000_000;
                let h = (b - a) / n as f64;
                (0..n).map(|i| dist.density(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
            }
            Kind::Gaussian => {
                let lo = dist.mu0().max(dist.mass() - 12.0 * dist.width());
                let hi = dist.mass() + 12.0 * dist.width();
                simpson(&|m| dist.density(m), lo, hi, 40_000)
            }
            Kind::BreitWigner => {
                let m0 = dist.mass();
                let g = dist.width();
                let mut total = 0.0;
                // fine core, then dyadic bands out to 409600·Γ on each side
                let core = 50.0 * g;
                let lo_edge = |x: f64| x.max(dist.mu0());
                total += simpson(&|m| dist.density(m), lo_edge(m0 - core), m0 + core, 20_000);
                let mut inner = core;
                for _ in 0..13 {
                    let outer = 2.0 * inner;
                    // upper band
                    total += simpson(&|m| dist.density(m), m0 + inner, m0 + outer, 2_000);
                    // lower band, clipped at the threshold
                    let a = lo_edge(m0 - outer);
                    let b = lo_edge(m0 - inner);
                    if b > a {
                        total += simpson(&|m| dist.density(m), a, b, 2_000);
                    }
                    inner = outer;
                }
                // two-term asymptotic Lorentzian tails beyond ±409600 Γ
                let norm = dist.norm();
                let tail = |delta: f64| {
                    norm * (g / (2.0 * std::f64::consts::PI))
                        * (1.0 / delta - g * g / (12.0 * delta.powi(3)))
                };
                total += tail(inner);
                if dist.mu0() < m0 - inner {
                    total += tail(inner)
                        - if dist.mu0() == f64::NEG_INFINITY {
                            0.0
                        } else {
                            tail(m0 - dist.mu0())
                        };
                }
                total
            }
        }
    }

    pub(crate) fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn untruncated_lorentzian_peak() {
        let d = MassDistribution::breit_wigner(1.0, 0.01, f64::NEG_INFINITY)
            .unwrap()
            .normalize()
            .unwrap();
        assert_relative_eq!(d.norm(), 1.0, max_relative = 1e-14);
        let peak = d.density(1.0);
        assert_relative_eq!(peak, 2.0 / (std::f64::consts::PI * 0.01), max_relative = 1e-13);
    }

    #[test]
    fn below_threshold_is_zero() {
        let d = MassDistribution::breit_wigner(1.0, 0.2, 0.3)
            .unwrap()
            .normalize()
            .unwrap();
        assert_eq!(d.density(0.3 - 1.0), 0.0);
        assert_eq!(d.density(0.2999999), 0.0);
        assert!(d.density(0.3) > 0.0);
    }

    #[test]
    fn truncated_norm_closed_form() {
        // N = 1 / ((1/π)(π/2 + arctan(200))) for M=1, Γ=0.01, μ₀=0
        let d = MassDistribution::breit_wigner(1.0, 0.01, 0.0)
            .unwrap()
            .normalize()
            .unwrap();
        let expect = std::f64::consts::PI
            / (std::f64::consts::FRAC_PI_2 + (200.0_f64).atan());
        assert_relative_eq!(d.norm(), expect, max_relative = 1e-14);
        assert!((d.norm() - 1.00159).abs() < 1e-4);
    }

    #[test]
    fn normalize_matches_quadrature_oracle() {
        let d = MassDistribution::breit_wigner(1.0, 0.2, 0.0)
            .unwrap()
            .normalize()
            .unwrap();
        let total = integral_oracle(&d);
        assert!((total - 1.0).abs() < 1e-8, "∫ω = {total}");
        // peak density pinned by the oracle-backed normalization
        let peak = d.density(1.0);
        assert_relative_eq!(peak, d.norm() * 2.0 / (std::f64::consts::PI * 0.2), max_relative = 1e-14);
    }

    #[test]
    fn tabulated_uniform_already_normalized() {
        let d = MassDistribution::tabulated(vec![(0.5, 1.0), (1.5, 1.0)])
            .unwrap()
            .normalize()
            .unwrap();
        assert_relative_eq!(d.norm(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(d.density(0.7), 1.0, max_relative = 1e-14);
        assert_eq!(d.density(1.6), 0.0);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(MassDistribution::breit_wigner(1.0, 0.0, 0.0).is_err());
        assert!(MassDistribution::breit_wigner(0.5, 0.1, 0.5).is_err());
        assert!(MassDistribution::breit_wigner(0.2, 0.1, 0.5).is_err());
        assert!(MassDistribution::tabulated(vec![(0.0, 1.0), (0.0, 1.0)]).is_err());
        assert!(MassDistribution::tabulated(vec![(0.0, -1.0), (1.0, 1.0)]).is_err());
        let d = MassDistribution::breit_wigner(1.0, 0.1, 0.0).unwrap().normalize().unwrap();
        assert!(d.omega_eval(f64::NAN).is_err());
        assert!(d.omega_eval(f64::INFINITY).is_err());
    }

    #[test]
    fn effective_support_tail_mass() {
        let d = MassDistribution::breit_wigner(1.0, 0.01, 0.0)
            .unwrap()
            .normalize()
            .unwrap();
        let (lo, hi) = d.effective_support(1e-6).unwrap();
        assert!(lo >= 0.0);
        let outside = d.cdf(lo) + (1.0 - d.cdf(hi));
        assert!(outside < 1e-6 * 1.01, "tail mass {outside}");
        // CDF-inverse shape: m_hi ≈ M + (Γ/2) tan(π/2 − π ε′) with ε′ the
        // upper-tail share of N⁻¹·eps
        let eps_share = 0.5e-6 / d.norm();
        let expect = 1.0 + 0.005 * (std::f64::consts::FRAC_PI_2 - std::f64::consts::PI * eps_share).tan();
        assert_relative_eq!(hi, expect, max_relative = 1e-8);
    }

    #[test]
    fn gaussian_support_within_seven_sigma() {
        let d = MassDistribution::gaussian(1.0, 0.05, 0.0)
            .unwrap()
            .normalize()
            .unwrap();
        let (lo, hi) = d.effective_support(1e-8).unwrap();
        assert!(lo >= 1.0 - 7.0 * 0.05, "lo = {lo}");
        assert!(hi <= 1.0 + 7.0 * 0.05, "hi = {hi}");
    }

    #[test]
    fn tabulated_support_is_table_range() {
        let d = MassDistribution::tabulated(vec![(0.2, 0.5), (0.9, 2.0), (1.4, 0.1)])
            .unwrap()
            .normalize()
            .unwrap();
        for eps in [1e-2, 1e-6, 1e-10] {
            assert_eq!(d.effective_support(eps).unwrap(), (0.2, 1.4));
        }
    }

    #[test]
    fn enlarging_eps_never_widens_support() {
        let d = MassDistribution::breit_wigner(1.3, 0.07, 0.2)
            .unwrap()
            .normalize()
            .unwrap();
        let mut prev = d.effective_support(1e-12).unwrap();
        for eps in [1e-10, 1e-8, 1e-6, 1e-4, 1e-2] {
            let cur = d.effective_support(eps).unwrap();
            assert!(cur.0 >= prev.0 && cur.1 <= prev.1, "eps={eps}: {cur:?} vs {prev:?}");
            prev = cur;
        }
    }

    #[test]
    fn csv_loading() {
        let t = load_table_csv("m,omega\n0.5,1.0\n1.5,1.0\n").unwrap();
        assert_eq!(t, vec![(0.5, 1.0), (1.5, 1.0)]);
        assert!(load_table_csv("mass,omega\n0.5,1.0\n").is_err());
        assert!(load_table_csv("m,omega\n0.5\n").is_err());
        assert!(load_table_csv("m,omega\n0.5,1.0,2.0\n").is_err());
    }
}
