//! Run configuration: a flat key–value document with dotted section
//! prefixes (`distribution.M = 1.0`), chosen for diff-friendliness and
//! trivial parsing.  All times are given in lifetime units τ = 1/Γ.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::amplitudes::{MomentumSmearing, Spacing, XRule};
use crate::kinematics::PhaseModel;
use crate::massdist::MassDistribution;
use crate::{Error, Result};

/// How the moving particle is specified: sharp momentum or a boosted
/// wave packet at velocity v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameSpec {
    Momentum(f64),
    Velocity(f64),
}

/// Axis of the consistency scan: `n` evenly spaced values on [lo, hi].
#[derive(Debug, Clone, Copy)]
pub struct ScanAxis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl ScanAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        (0..self.n)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct GridSpec {
    pub spacing: Spacing,
    /// lower edge in τ for log grids
    pub t_min_tau: f64,
    pub t_max_tau: f64,
    pub points: usize,
}

/// A fully validated run description.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub distribution: MassDistribution,
    pub frame: Option<FrameSpec>,
    pub smearing: Option<MomentumSmearing>,
    pub phase_models: Vec<PhaseModel>,
    pub x_rule: XRule,
    pub grid: GridSpec,
    pub compare: bool,
    pub compare_window_tau: (f64, f64),
    pub transition: bool,
    pub transition_threshold: f64,
    pub scan: bool,
    pub scan_m: ScanAxis,
    pub scan_p: ScanAxis,
    pub scan_v: ScanAxis,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// non-fatal validation notes, echoed by the CLI
    pub warnings: Vec<String>,
}

impl RunConfig {
    /// Lifetime τ = 1/Γ of the configured distribution.
    pub fn tau(&self) -> Result<f64> {
        let w = self.distribution.width();
        if !(w > 0.0) {
            return Err(Error::Config(
                "distribution has no width; lifetime undefined".into(),
            ));
        }
        Ok(1.0 / w)
    }

    /// Lorentz factor implied by the frame spec, if one is given.
    pub fn gamma(&self) -> Option<f64> {
        let m = self.distribution.mass();
        match self.frame? {
            FrameSpec::Momentum(p) => Some(p.hypot(m) / m),
            FrameSpec::Velocity(v) => Some(1.0 / (1.0 - v * v).sqrt()),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let s = v.trim();
    let x = match s {
        "-inf" | "-INF" => f64::NEG_INFINITY,
        "inf" | "INF" => f64::INFINITY,
        _ => s
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("{key}: expected a number, got '{v}'")))?,
    };
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("{key}: expected a nonnegative integer, got '{v}'")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::Config(format!(
            "{key}: expected true/false, got '{other}'"
        ))),
    }
}

fn parse_axis(key: &str, v: &str) -> Result<ScanAxis> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "{key}: expected 'lo,hi,n', got '{v}'"
        )));
    }
    let lo = parse_f64(key, parts[0])?;
    let hi = parse_f64(key, parts[1])?;
    let n = parse_usize(key, parts[2])?;
    if !(lo <= hi) || n == 0 {
        return Err(Error::Config(format!(
            "{key}: need lo ≤ hi and n ≥ 1, got '{v}'"
        )));
    }
    Ok(ScanAxis { lo, hi, n })
}

const KNOWN_KEYS: &[&str] = &[
    "distribution.kind",
    "distribution.M",
    "distribution.Gamma",
    "distribution.sigma",
    "distribution.mu0",
    "distribution.file",
    "kinematics.p",
    "kinematics.v",
    "smearing.p_bar",
    "smearing.sigma_p",
    "models",
    "frame.x_rule",
    "grid.spacing",
    "grid.t_min",
    "grid.t_max",
    "grid.points",
    "analysis.compare",
    "analysis.window",
    "analysis.transition",
    "analysis.threshold",
    "analysis.scan",
    "scan.m",
    "scan.p",
    "scan.v",
    "seed",
];

/// Parses and validates a configuration document.  `base_dir` anchors
/// relative paths (e.g. a tabulated-distribution CSV).
pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig> {
    let mut kv: BTreeMap<String, String> = BTreeMap::new();
    let mut unknown: Vec<String> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected 'key = value', got '{raw}'",
                lineno + 1
            )));
        };
        let key = k.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            unknown.push(key.clone());
        }
        if kv.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Config(format!("duplicate key '{key}'")));
        }
    }
    if !unknown.is_empty() {
        return Err(Error::Config(format!(
            "unknown keys: {}",
            unknown.join(", ")
        )));
    }
    let get = |k: &str| kv.get(k).map(String::as_str);

    // --- distribution ---
    let kind = get("distribution.kind").unwrap_or("breit_wigner");
    let mu0 = match get("distribution.mu0") {
        Some(v) => parse_f64("distribution.mu0", v)?,
        None => 0.0,
    };
    let distribution = match kind {
        "breit_wigner" | "gaussian" => {
            let m = parse_f64(
                "distribution.M",
                get("distribution.M")
                    .ok_or_else(|| Error::Config("distribution.M is required".into()))?,
            )?;
            if kind == "breit_wigner" {
                let g = parse_f64(
                    "distribution.Gamma",
                    get("distribution.Gamma")
                        .ok_or_else(|| Error::Config("distribution.Gamma is required".into()))?,
                )?;
                MassDistribution::breit_wigner(m, g, mu0)?
            } else {
                let s = parse_f64(
                    "distribution.sigma",
                    get("distribution.sigma")
                        .ok_or_else(|| Error::Config("distribution.sigma is required".into()))?,
                )?;
                MassDistribution::gaussian(m, s, mu0)?
            }
        }
        "tabulated" => {
            let file = get("distribution.file")
                .ok_or_else(|| Error::Config("distribution.file is required".into()))?;
            let path = base_dir.join(file);
            let text = std::fs::read_to_string(&path)?;
            MassDistribution::tabulated(crate::massdist::load_table_csv(&text)?)?
        }
        other => {
            return Err(Error::Config(format!(
                "distribution.kind: expected breit_wigner, gaussian, or tabulated, got '{other}'"
            )))
        }
    }
    .normalize()?;

    // --- kinematics (exclusive) ---
    let frame = match (get("kinematics.p"), get("kinematics.v")) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "kinematics.p and kinematics.v are mutually exclusive; give exactly one".into(),
            ))
        }
        (Some(p), None) => {
            let p = parse_f64("kinematics.p", p)?;
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::Config(format!(
                    "kinematics.p must be finite and ≥ 0, got {p}"
                )));
            }
            Some(FrameSpec::Momentum(p))
        }
        (None, Some(v)) => {
            let v = parse_f64("kinematics.v", v)?;
            if !v.is_finite() || !(0.0..1.0).contains(&v) {
                return Err(Error::Config(format!(
                    "kinematics.v must satisfy 0 ≤ v < 1 (superluminal or malformed speeds are caller bugs), got {v}"
                )));
            }
            Some(FrameSpec::Velocity(v))
        }
        (None, None) => None,
    };

    // --- smearing ---
    let smearing = match (get("smearing.sigma_p"), get("smearing.p_bar")) {
        (None, None) => None,
        (sig, pb) => {
            let sigma_p = parse_f64(
                "smearing.sigma_p",
                sig.ok_or_else(|| Error::Config("smearing.sigma_p is required with smearing.p_bar".into()))?,
            )?;
            let p_bar = match pb {
                Some(v) => parse_f64("smearing.p_bar", v)?,
                None => 0.0,
            };
            Some(MomentumSmearing::gaussian(p_bar, sigma_p).map_err(|e| Error::Config(e.to_string()))?)
        }
    };

    // --- phase models ---
    let phase_models = match get("models") {
        None => vec![PhaseModel::Exact],
        Some(list) => {
            let mut out = Vec::new();
            for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                out.push(match item {
                    "exact" => PhaseModel::Exact,
                    "carlo" => PhaseModel::CarloApprox,
                    "corrected" => PhaseModel::CorrectedApprox,
                    other => {
                        return Err(Error::Config(format!(
                            "models: expected exact, carlo, or corrected, got '{other}'"
                        )))
                    }
                });
            }
            if out.is_empty() {
                return Err(Error::Config("models: list is empty".into()));
            }
            out
        }
    };

    let x_rule = match get("frame.x_rule") {
        None | Some("auto") => XRule::Auto,
        Some("comoving") => XRule::Comoving,
        Some(other) => {
            if let Some(x) = other.strip_prefix("fixed:") {
                XRule::Fixed(parse_f64("frame.x_rule", x)?)
            } else {
                return Err(Error::Config(format!(
                    "frame.x_rule: expected comoving, auto, or fixed:<x>, got '{other}'"
                )));
            }
        }
    };

    // --- grid ---
    let spacing = match get("grid.spacing") {
        None | Some("log") => Spacing::Log,
        Some("linear") => Spacing::Linear,
        Some(other) => {
            return Err(Error::Config(format!(
                "grid.spacing: expected linear or log, got '{other}'"
            )))
        }
    };
    let t_min_tau = match get("grid.t_min") {
        Some(v) => parse_f64("grid.t_min", v)?,
        None => 1e-2,
    };
    let t_max_tau = match get("grid.t_max") {
        Some(v) => parse_f64("grid.t_max", v)?,
        None => 100.0,
    };
    let points = match get("grid.points") {
        Some(v) => parse_usize("grid.points", v)?,
        None => 200,
    };
    if points < 2 {
        return Err(Error::Config(format!("grid.points must be ≥ 2, got {points}")));
    }
    if !(t_max_tau > 0.0 && t_max_tau <= 1e5) {
        return Err(Error::Config(format!(
            "grid.t_max must satisfy 0 < t_max ≤ 1e5 (lifetimes), got {t_max_tau}"
        )));
    }
    if spacing == Spacing::Log && !(t_min_tau > 0.0 && t_min_tau < t_max_tau) {
        return Err(Error::Config(format!(
            "grid.t_min must satisfy 0 < t_min < t_max for log spacing, got {t_min_tau}"
        )));
    }

    // --- analyses ---
    let compare = match get("analysis.compare") {
        Some(v) => parse_bool("analysis.compare", v)?,
        None => frame.is_some(),
    };
    let compare_window_tau = match get("analysis.window") {
        None => (0.0, 5.0),
        Some(v) => {
            let parts: Vec<&str> = v.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::Config(format!(
                    "analysis.window: expected 't_min,t_max' in lifetimes, got '{v}'"
                )));
            }
            let lo = parse_f64("analysis.window", parts[0])?;
            let hi = parse_f64("analysis.window", parts[1])?;
            if !(lo < hi) || lo < 0.0 {
                return Err(Error::Config(format!(
                    "analysis.window: need 0 ≤ t_min < t_max, got '{v}'"
                )));
            }
            (lo, hi)
        }
    };
    let transition = match get("analysis.transition") {
        Some(v) => parse_bool("analysis.transition", v)?,
        None => t_max_tau >= 100.0,
    };
    let transition_threshold = match get("analysis.threshold") {
        Some(v) => parse_f64("analysis.threshold", v)?,
        None => 2.0,
    };
    if !(transition_threshold > 1.0) {
        return Err(Error::Config(format!(
            "analysis.threshold must exceed 1, got {transition_threshold}"
        )));
    }
    let scan = match get("analysis.scan") {
        Some(v) => parse_bool("analysis.scan", v)?,
        None => false,
    };
    let scan_m = match get("scan.m") {
        Some(v) => parse_axis("scan.m", v)?,
        None => ScanAxis { lo: 0.5, hi: 2.0, n: 20 },
    };
    let scan_p = match get("scan.p") {
        Some(v) => parse_axis("scan.p", v)?,
        None => ScanAxis { lo: -1.0, hi: 1.0, n: 20 },
    };
    let scan_v = match get("scan.v") {
        Some(v) => parse_axis("scan.v", v)?,
        None => ScanAxis { lo: 0.0, hi: 0.95, n: 20 },
    };
    if scan_m.lo <= 0.0 {
        return Err(Error::Config(format!(
            "scan.m: masses must be positive, got lower edge {}",
            scan_m.lo
        )));
    }
    if scan_v.lo < 0.0 || scan_v.hi >= 1.0 {
        return Err(Error::Config(format!(
            "scan.v: speeds must satisfy 0 ≤ v < 1, got [{}, {}]",
            scan_v.lo, scan_v.hi
        )));
    }
    let seed = match get("seed") {
        Some(v) => v
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::Config(format!("seed: expected an integer, got '{v}'")))?,
        None => 0,
    };

    // --- cross-field validation and regime warnings ---
    if frame.is_none() && !scan {
        return Err(Error::Config(
            "give kinematics.p or kinematics.v, or enable analysis.scan".into(),
        ));
    }
    if matches!(frame, Some(FrameSpec::Velocity(_))) && smearing.is_none() {
        return Err(Error::Config(
            "velocity-frame runs need smearing.sigma_p (the wave-packet momentum width)".into(),
        ));
    }
    let mut warnings = Vec::new();
    if let Some(s) = &smearing {
        let (m, w) = (distribution.mass(), distribution.width());
        if !s.regime_ok(w, m) {
            warnings.push(format!(
                "width/smearing separation violated: the approximation chain assumes Γ ≪ σ_p ≪ M \
                 (operationally Γ ≤ σ_p/10 and σ_p ≤ M/10); got Γ={w}, σ_p={}, M={m}. \
                 Results remain exact integrals but the model dichotomy need not appear.",
                s.sigma_p
            ));
        }
    }
    if transition && t_max_tau < 100.0 {
        warnings.push(format!(
            "transition detection requested but horizon is {t_max_tau} τ < 100 τ; it will be skipped"
        ));
    }

    Ok(RunConfig {
        distribution,
        frame,
        smearing,
        phase_models,
        x_rule,
        grid: GridSpec {
            spacing,
            t_min_tau,
            t_max_tau,
            points,
        },
        compare,
        compare_window_tau,
        transition,
        transition_threshold,
        scan,
        scan_m,
        scan_p,
        scan_v,
        seed,
        output_dir: base_dir.to_path_buf(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        parse_config(text, Path::new("."))
    }

    #[test]
    fn minimal_momentum_config() {
        let c = parse(
            "distribution.M = 1\n\
             distribution.Gamma = 0.01\n\
             kinematics.p = 1.7320508075688772\n\
             grid.t_max = 100\n\
             grid.points = 200\n\
             grid.spacing = log\n",
        )
        .unwrap();
        assert_eq!(c.frame, Some(FrameSpec::Momentum(3.0f64.sqrt())));
        assert!((c.gamma().unwrap() - 2.0).abs() < 1e-12);
        assert!((c.tau().unwrap() - 100.0).abs() < 1e-12);
        assert!(c.compare);
        assert!(c.transition);
        assert!(c.warnings.is_empty());
    }

    #[test]
    fn both_p_and_v_rejected() {
        let err = parse(
            "distribution.M = 1\ndistribution.Gamma = 0.01\nkinematics.p = 1\nkinematics.v = 0.5\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
        assert!(err.to_string().contains("mutually exclusive"));
    }

    #[test]
    fn unknown_keys_listed() {
        let err = parse(
            "distribution.M = 1\ndistribution.Gamma = 0.01\nkinematics.p = 1\nfoo.bar = 1\nbaz = 2\n",
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("foo.bar") && msg.contains("baz"), "{msg}");
    }

    #[test]
    fn regime_warning_emitted() {
        let c = parse(
            "distribution.M = 1\n\
             distribution.Gamma = 1e-4\n\
             kinematics.v = 0.5\n\
             smearing.sigma_p = 0.5\n",
        )
        .unwrap();
        assert_eq!(c.warnings.len(), 1);
        assert!(c.warnings[0].contains("σ_p"));
    }

    #[test]
    fn scan_only_config() {
        let c = parse("analysis.scan = true\ndistribution.M = 1\ndistribution.Gamma = 0.01\n").unwrap();
        assert!(c.scan && c.frame.is_none());
        assert_eq!(c.scan_m.values().len(), 20);
    }

    #[test]
    fn velocity_requires_smearing() {
        let err =
            parse("distribution.M = 1\ndistribution.Gamma = 0.01\nkinematics.v = 0.5\n").unwrap_err();
        assert!(err.to_string().contains("sigma_p"));
    }

    #[test]
    fn comments_and_untruncated_threshold() {
        let c = parse(
            "# a comment\n\
             distribution.M = 1   # trailing comment\n\
             distribution.Gamma = 0.01\n\
             distribution.mu0 = -inf\n\
             kinematics.p = 0\n",
        )
        .unwrap();
        assert_eq!(c.distribution.mu0(), f64::NEG_INFINITY);
    }

    #[test]
    fn bad_superluminal_speed() {
        let err =
            parse("distribution.M = 1\ndistribution.Gamma = 0.01\nkinematics.v = 1.2\nsmearing.sigma_p = 0.01\n")
                .unwrap_err();
        assert!(err.to_string().contains("kinematics.v"));
    }

    #[test]
    fn x_rule_variants() {
        for (s, want) in [
            ("comoving", XRule::Comoving),
            ("auto", XRule::Auto),
            ("fixed:0.25", XRule::Fixed(0.25)),
        ] {
            let c = parse(&format!(
                "distribution.M = 1\ndistribution.Gamma = 0.01\nkinematics.p = 1\nframe.x_rule = {s}\n"
            ))
            .unwrap();
            assert_eq!(c.x_rule, want);
        }
    }
}
