//! Oscillatory Fourier-type integrals A(t) = ∫ f(E) e^{−iEt} dE.
//!
//! Two engines share one integrand description:
//!
//! * a fast adaptive evaluator — Gauss–Legendre panels while the phase
//!   swing per panel is small, Filon-type Chebyshev panels with exact
//!   oscillatory moments once it is not, so panel width is limited by the
//!   smoothness of f rather than by t;
//! * a deliberately dumb composite-midpoint oracle used only to validate
//!   the fast engine.
//!
//! An inverse-square-root edge singularity (a mass threshold seen through
//! the energy variable at p > 0) is removed by the substitution
//! E = E_lo + u², which turns the edge factor into a bounded function and
//! the kernel into a short chirp handled by phase-limited panels.

pub mod gauss;

use num_complex::Complex64;

use crate::{Error, Result};
use gauss::GL15;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Phase swing per panel below which plain Gauss–Legendre is exact to
/// machine precision; above it the Filon–Chebyshev rule takes over (its
/// moment recurrence is stable there because the Chebyshev degree stays
/// below the phase).
const THETA_SWITCH: f64 = 8.0;

/// Default absolute tolerance, measured against the unit-normalized
/// t = 0 amplitude.
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_PANEL_BUDGET: usize = 60_000;

/// A truncated envelope f on [E_lo, E_hi] to be transformed against
/// e^{−iEt}.
pub struct FourierIntegrand {
    envelope: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    e_lo: f64,
    e_hi: f64,
    singular_lo: bool,
    tail_eps: f64,
    /// whether the lower limit discards envelope mass below it (false
    /// when E_lo is a hard spectral threshold with nothing beneath)
    trimmed_lo: bool,
    seeds: Vec<f64>,
}

impl FourierIntegrand {
    /// `tail_eps` is the envelope mass discarded by truncation; it
    /// enters every reported error bound through [`Self::tail_bound`].
    /// `seeds` are interior
    /// abscissae the adaptive engine must place panel boundaries at
    /// (peaks, wing scales), so that no localized feature can be skipped.
    pub fn new(
        envelope: Box<dyn Fn(f64) -> f64 + Send + Sync>,
        e_lo: f64,
        e_hi: f64,
        singular_lo: bool,
        tail_eps: f64,
        mut seeds: Vec<f64>,
    ) -> Result<Self> {
        if !e_lo.is_finite() || !e_hi.is_finite() || !(e_lo < e_hi) {
            return Err(Error::Parameter(format!(
                "integration limits must be finite with E_lo < E_hi, got [{e_lo}, {e_hi}]"
            )));
        }
        if !(tail_eps >= 0.0) {
            return Err(Error::Parameter(format!("tail_eps must be ≥ 0, got {tail_eps}")));
        }
        seeds.retain(|s| *s > e_lo && *s < e_hi);
        seeds.sort_by(f64::total_cmp);
        seeds.dedup();
        Ok(Self {
            envelope,
            e_lo,
            e_hi,
            singular_lo,
            tail_eps,
            trimmed_lo: true,
            seeds,
        })
    }

    /// Declares the lower limit a hard spectral edge: no envelope mass
    /// was discarded below it, so it contributes nothing to the
    /// truncation bound.
    pub fn mark_lo_untrimmed(&mut self) {
        self.trimmed_lo = false;
    }

    /// Truncation contribution to the amplitude error at time t.
    ///
    /// The discarded tails are monotone, so integration by parts bounds
    /// their oscillatory integrals by 2·f(edge)/|t| each; the trivial
    /// bound by the discarded mass itself applies at all t.
    pub fn tail_bound(&self, t: f64) -> f64 {
        if self.tail_eps == 0.0 {
            return 0.0;
        }
        if t == 0.0 {
            return self.tail_eps;
        }
        let f_lo = if self.trimmed_lo && !self.singular_lo {
            self.eval(self.e_lo)
        } else {
            0.0
        };
        let f_hi = self.eval(self.e_hi);
        self.tail_eps.min(2.0 * (f_lo + f_hi) / t.abs())
    }

    #[inline]
    pub fn eval(&self, e: f64) -> f64 {
        (self.envelope)(e)
    }
    pub fn bounds(&self) -> (f64, f64) {
        (self.e_lo, self.e_hi)
    }
    pub fn singular_lo(&self) -> bool {
        self.singular_lo
    }
    pub fn tail_eps(&self) -> f64 {
        self.tail_eps
    }
    pub fn seeds(&self) -> &[f64] {
        &self.seeds
    }

    /// Smallest gap between adjacent structure abscissae (seeds and
    /// endpoints) — the finest envelope length scale a fixed-step rule
    /// has to resolve.
    pub fn min_feature_scale(&self) -> f64 {
        let mut pts = Vec::with_capacity(self.seeds.len() + 2);
        pts.push(self.e_lo);
        pts.extend_from_slice(&self.seeds);
        pts.push(self.e_hi);
        pts.windows(2)
            .map(|w| w[1] - w[0])
            .filter(|g| *g > 0.0)
            .fold(self.e_hi - self.e_lo, f64::min)
    }
}

/// A computed transform value with its accumulated error bound.
#[derive(Debug, Clone, Copy)]
pub struct Amplitude {
    pub value: Complex64,
    pub error_bound: f64,
    pub panels: usize,
}

// ---------------------------------------------------------------------------
// panel rules

/// (sin, cos) of the product a·b, compensating the product's own
/// rounding error.
///
/// At phases around 10¹² rad the f64 product a·b is off by up to
/// ~10⁻⁴ rad — fatal where panels cancel to many digits.  `mul_add`
/// recovers the exact product residual, which is applied as a
/// small-angle rotation (third order in the residual, ≤ 1e−12 rad).
#[inline]
pub fn sincos_prod(a: f64, b: f64) -> (f64, f64) {
    let hi = a * b;
    let lo = a.mul_add(b, -hi);
    let (s, c) = hi.sin_cos();
    let (sl, cl) = (lo - lo * lo * lo / 6.0, 1.0 - 0.5 * lo * lo);
    (s * cl + c * sl, c * cl - s * sl)
}

fn gl15_complex(g: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> Complex64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let (x, w) = (&GL15.0, &GL15.1);
    let mut s = Complex64::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(w) {
        s += wi * g(c + h * xi);
    }
    s * h
}

/// ∫_{-1}^{1} T_k(x) e^{−iθx} dx for k = 0..8, by the integration-by-parts
/// recurrence.  Stable forward for |θ| above the Chebyshev degree, which
/// is the only regime this is called in.
fn cheb_moments(theta: f64) -> [Complex64; 9] {
    let (s, c) = theta.sin_cos();
    // boundary terms [T_n e^{−iθx}]₋₁¹
    let b = |n: usize| -> Complex64 {
        if n.is_multiple_of(2) {
            Complex64::new(0.0, -2.0 * s)
        } else {
            Complex64::new(2.0 * c, 0.0)
        }
    };
    let inv_i_theta = Complex64::new(0.0, -1.0 / theta); // 1/(iθ)
    let mut mu = [Complex64::new(0.0, 0.0); 9];
    mu[0] = Complex64::new(2.0 * s / theta, 0.0);
    mu[1] = Complex64::new(0.0, 2.0 * (theta * c - s) / (theta * theta));
    mu[2] = (4.0 * mu[1] - b(2)) * inv_i_theta;
    for k in 2..8 {
        let kf = k as f64;
        let prev = (b(k - 1) + I * theta * mu[k - 1]) / (kf - 1.0);
        mu[k + 1] = ((kf + 1.0) * (2.0 * mu[k] + prev) - b(k + 1)) * inv_i_theta;
    }
    mu
}

/// Degree-8 Filon panel: Chebyshev interpolation of f on 9 Lobatto nodes,
/// contracted against the exact oscillatory moments.
fn cheb_filon(f: &dyn Fn(f64) -> f64, a: f64, b: f64, t: f64) -> Complex64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let theta = h * t;
    // Lobatto nodes cos(jπ/8), j = 0..8, descending from +1 to −1
    let mut fv = [0.0; 9];
    for (j, fj) in fv.iter_mut().enumerate() {
        let x = (j as f64 * std::f64::consts::PI / 8.0).cos();
        *fj = f(c + h * x);
    }
    // DCT-I: a_k = (1/4)·Σ″_j f_j cos(jkπ/8), endpoints halved
    let mut coef = [0.0; 9];
    for (k, ck) in coef.iter_mut().enumerate() {
        let mut s = 0.5 * (fv[0] + fv[8] * if k % 2 == 0 { 1.0 } else { -1.0 });
        for (j, fj) in fv.iter().enumerate().take(8).skip(1) {
            s += fj * ((j * k) as f64 * std::f64::consts::PI / 8.0).cos();
        }
        *ck = s / 4.0;
    }
    let mu = cheb_moments(theta);
    let mut sum = 0.5 * (coef[0] * mu[0] + coef[8] * mu[8]);
    for k in 1..8 {
        sum += coef[k] * mu[k];
    }
    let (ps, pc) = sincos_prod(c, t);
    h * Complex64::new(pc, -ps) * sum
}

fn osc_rule(f: &dyn Fn(f64) -> f64, a: f64, b: f64, t: f64) -> Complex64 {
    let theta = 0.5 * (b - a) * t.abs();
    if theta <= THETA_SWITCH {
        gl15_complex(
            &|e| {
                let (s, c) = sincos_prod(e, t);
                f(e) * Complex64::new(c, -s)
            },
            a,
            b,
        )
    } else {
        cheb_filon(f, a, b, t)
    }
}

// ---------------------------------------------------------------------------
// adaptive driver

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl Panel {
    fn estimate(rule: &dyn Fn(f64, f64) -> Complex64, a: f64, b: f64) -> Self {
        let whole = rule(a, b);
        let m = 0.5 * (a + b);
        let halves = rule(a, m) + rule(m, b);
        Panel {
            a,
            b,
            value: halves,
            err: (whole - halves).norm(),
        }
    }
}

struct AdaptiveOutcome {
    value: Complex64,
    err: f64,
    panels: usize,
    converged: bool,
}

/// Worst-first bisection over an initial seeded partition.
fn adaptive(
    rule: &dyn Fn(f64, f64) -> Complex64,
    a: f64,
    b: f64,
    seeds: &[f64],
    tol: f64,
    budget: usize,
) -> AdaptiveOutcome {
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    struct Entry(Panel);
    impl PartialEq for Entry {
        fn eq(&self, o: &Self) -> bool {
            self.cmp(o) == Ordering::Equal
        }
    }
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, o: &Self) -> Ordering {
            // max-heap on error, deterministic tiebreak on position
            self.0
                .err
                .total_cmp(&o.0.err)
                .then_with(|| o.0.a.total_cmp(&self.0.a))
        }
    }

    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut boundaries = Vec::with_capacity(seeds.len() + 2);
    boundaries.push(a);
    boundaries.extend(seeds.iter().copied());
    boundaries.push(b);
    let mut total_err = 0.0;
    let mut count = 0usize;
    for w in boundaries.windows(2) {
        let p = Panel::estimate(rule, w[0], w[1]);
        total_err += p.err;
        count += 1;
        heap.push(Entry(p));
    }
    let min_width = 16.0 * f64::EPSILON * (b - a).max(a.abs()).max(b.abs());
    while total_err > tol && count < budget {
        let Some(Entry(worst)) = heap.pop() else { break };
        if worst.b - worst.a <= min_width || worst.err == 0.0 {
            // width at roundoff; its error is irreducible.  Keep it in the
            // final bound but stop letting it drive refinement.
            total_err -= worst.err;
            frozen.push(worst);
            continue;
        }
        total_err -= worst.err;
        let m = 0.5 * (worst.a + worst.b);
        for (lo, hi) in [(worst.a, m), (m, worst.b)] {
            let p = Panel::estimate(rule, lo, hi);
            total_err += p.err;
            heap.push(Entry(p));
        }
        count += 1;
    }
    // deterministic final summation: sort all panels by position
    let mut all: Vec<Panel> = heap.into_iter().map(|e| e.0).collect();
    all.extend(frozen);
    all.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for p in &all {
        value += p.value;
        err += p.err;
    }
    AdaptiveOutcome {
        value,
        err,
        panels: count,
        converged: err <= tol,
    }
}

// ---------------------------------------------------------------------------
// public engines

/// Fast evaluation of A(t) = ∫ f(E) e^{−iEt} dE with the default
/// tolerance and budget.
pub fn fourier_transform_fast(g: &FourierIntegrand, t: f64) -> Result<Amplitude> {
    fourier_transform_fast_with(g, t, DEFAULT_TOL, DEFAULT_PANEL_BUDGET)
}

pub fn fourier_transform_fast_with(
    g: &FourierIntegrand,
    t: f64,
    tol: f64,
    budget: usize,
) -> Result<Amplitude> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite, got {t}")));
    }
    let span = g.e_hi - g.e_lo;
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = g.tail_bound(t);
    let mut panels = 0usize;
    let mut converged = true;

    if g.singular_lo {
        // chirp region [E_lo, E_lo + δ] in the u = √(E − E_lo) variable
        let delta = (0.25 * span).min(20.0 * std::f64::consts::PI / t.abs().max(80.0 * std::f64::consts::PI / span));
        let split = g.e_lo + delta;
        let u_max = delta.sqrt();
        let e_lo = g.e_lo;
        let chirp = |u: f64| -> Complex64 {
            let (s, c) = (u * u * t).sin_cos();
            2.0 * u * g.eval(e_lo + u * u) * Complex64::new(c, -s)
        };
        // seed boundaries every ~2π of chirp phase
        let mut useeds = Vec::new();
        if t != 0.0 {
            let mut k = 1.0;
            loop {
                let u = (2.0 * std::f64::consts::PI * k / t.abs()).sqrt();
                if u >= u_max {
                    break;
                }
                useeds.push(u);
                k += 1.0;
            }
        }
        let out = adaptive(
            &|a, b| gl15_complex(&chirp, a, b),
            0.0,
            u_max,
            &useeds,
            0.5 * tol,
            budget,
        );
        let (ps, pc) = sincos_prod(e_lo, t);
        value += Complex64::new(pc, -ps) * out.value;
        err += out.err;
        panels += out.panels;
        converged &= out.converged;

        // smooth oscillatory remainder [split, E_hi]
        let seeds: Vec<f64> = g.seeds.iter().copied().filter(|s| *s > split).collect();
        let f = |e: f64| g.eval(e);
        let out = adaptive(
            &|a, b| osc_rule(&f, a, b, t),
            split,
            g.e_hi,
            &seeds,
            0.5 * tol,
            budget.saturating_sub(panels),
        );
        value += out.value;
        err += out.err;
        panels += out.panels;
        converged &= out.converged;
    } else {
        let f = |e: f64| g.eval(e);
        let out = adaptive(&|a, b| osc_rule(&f, a, b, t), g.e_lo, g.e_hi, &g.seeds, tol, budget);
        value = out.value;
        err += out.err;
        panels = out.panels;
        converged = out.converged;
    }

    if converged {
        Ok(Amplitude {
            value,
            error_bound: err,
            panels,
        })
    } else {
        Err(Error::Convergence {
            best: value,
            bound: err,
            panels,
        })
    }
}

/// Non-adaptive variant with `n` uniform panels; exposes the raw
/// embedded error estimate so refinement behaviour can be observed
/// directly.  Does not special-case the edge singularity.
pub fn fourier_transform_fixed(g: &FourierIntegrand, t: f64, n: usize) -> Amplitude {
    let f = |e: f64| g.eval(e);
    let h = (g.e_hi - g.e_lo) / n as f64;
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = g.tail_bound(t);
    for i in 0..n {
        let a = g.e_lo + i as f64 * h;
        let p = Panel::estimate(&|a, b| osc_rule(&f, a, b, t), a, a + h);
        value += p.value;
        err += p.err;
    }
    Amplitude {
        value,
        error_bound: err,
        panels: n,
    }
}

/// Brute-force composite midpoint rule with `n_points` uniform panels.
///
/// Deterministic, non-adaptive, and refuses to run with fewer than ten
/// points per oscillation rather than returning silent garbage.  With a
/// singular lower edge the midpoint sampling runs in the u = √(E − E_lo)
/// variable, where the integrand is bounded.
pub fn fourier_transform_oracle(g: &FourierIntegrand, t: f64, n_points: usize) -> Result<Complex64> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite, got {t}")));
    }
    let span = g.e_hi - g.e_lo;
    let phase = t.abs() * span;
    let min_n = if g.singular_lo {
        // the chirp frequency in u peaks at twice the mean rate
        (10.0 * phase / std::f64::consts::PI).ceil() as usize
    } else {
        (10.0 * phase / (2.0 * std::f64::consts::PI)).ceil() as usize
    }
    .max(10);
    if n_points < min_n {
        return Err(Error::OracleRefusal(format!(
            "{n_points} points is below the 10-per-oscillation floor of {min_n}"
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    if g.singular_lo {
        let u_max = span.sqrt();
        let h = u_max / n_points as f64;
        for i in 0..n_points {
            let u = (i as f64 + 0.5) * h;
            let e = g.e_lo + u * u;
            let (s, c) = sincos_prod(e, t);
            sum += 2.0 * u * g.eval(e) * Complex64::new(c, -s);
        }
        Ok(sum * h)
    } else {
        let h = span / n_points as f64;
        for i in 0..n_points {
            let e = g.e_lo + (i as f64 + 0.5) * h;
            let (s, c) = sincos_prod(e, t);
            sum += g.eval(e) * Complex64::new(c, -s);
        }
        Ok(sum * h)
    }
}
