//! Orchestration: takes a validated [`RunConfig`], computes the
//! requested series and reports, and writes the output files.
//!
//! Output writing is strictly sequential and all numbers are formatted
//! with Rust's shortest-roundtrip float `Display`, so reruns with the
//! same config produce byte-identical files regardless of worker count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::amplitudes::{
    survival_momentum, survival_momentum_oracle, survival_rest, survival_velocity_frame,
    AmplitudeSeries, Spacing, TimeGrid,
};
use crate::analysis::{
    consistency_scan, dilation_compare, effective_rate, transition_time, DeviationReport,
};
use crate::config::{FrameSpec, RunConfig};
use crate::kinematics::PhaseModel;
use crate::{Error, Result};

/// Upper bound on oracle points per evaluation when `--oracle` is set.
const ORACLE_MAX_POINTS: usize = 20_000_000;

/// What a run produced, for the CLI to report and map to an exit code.
#[derive(Debug)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub summary: String,
    /// true when any requested series failed to converge at every point
    pub numerical_failure: bool,
}

fn build_grid(cfg: &RunConfig) -> Result<TimeGrid> {
    let tau = cfg.tau()?;
    match cfg.grid.spacing {
        Spacing::Linear => TimeGrid::linear(tau, cfg.grid.t_max_tau, cfg.grid.points),
        Spacing::Log => TimeGrid::log(tau, cfg.grid.t_min_tau, cfg.grid.t_max_tau, cfg.grid.points),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str, files: &mut Vec<PathBuf>) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents)?;
    files.push(path.clone());
    Ok(path)
}

fn compare_csv_row(label: &str, rep: &DeviationReport) -> String {
    format!(
        "{},{},{},{},{},{},{}\n",
        label,
        rep.gamma,
        rep.window_tau.0,
        rep.window_tau.1,
        rep.dev_dilated,
        rep.dev_contracted,
        rep.verdict.label()
    )
}

fn rate_csv(series: &AmplitudeSeries) -> String {
    let rates = effective_rate(series);
    let tau = series.grid.tau();
    let mut out = String::from("t,t_over_tau,rate,label\n");
    for (t, r) in series.grid.points().iter().zip(&rates) {
        let _ = writeln!(out, "{},{},{},{}", t, t / tau, r, series.label);
    }
    out
}

/// Executes the scan part of a config; shared by `run` and the
/// scan-only subcommand.
pub fn run_scan(cfg: &RunConfig, out_dir: &Path, files: &mut Vec<PathBuf>) -> Result<String> {
    let records = consistency_scan(
        &cfg.scan_m.values(),
        &cfg.scan_p.values(),
        &cfg.scan_v.values(),
    )?;
    let mut csv = String::from(crate::analysis::ConsistencyRecord::csv_header());
    csv.push('\n');
    for r in &records {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    write_file(out_dir, "consistency_scan.csv", &csv, files)?;
    let worst = &records[0];
    Ok(format!(
        "consistency scan: {} points, worst identity residual {:.6} at (m={}, p={}, v={})",
        records.len(),
        worst.r_identity,
        worst.m,
        worst.p_par,
        worst.v
    ))
}

/// Full run: series, comparisons, transition detection, scan, manifest,
/// and plot script, per the configuration flags.
pub fn run(cfg: &RunConfig, out_dir: &Path, use_oracle: bool) -> Result<RunReport> {
    fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    let mut summary = String::new();
    let mut numerical_failure = false;
    for w in &cfg.warnings {
        let _ = writeln!(summary, "warning: {w}");
    }

    let mut compare_rows =
        String::from("label,gamma,window_lo_tau,window_hi_tau,dev_dilated,dev_contracted,verdict\n");
    let mut any_compare = false;
    let mut transition_rows = String::from("label,t_star_tau,ratio_at_horizon\n");
    let mut any_transition = false;
    let mut rate_blocks: Vec<String> = Vec::new();

    if cfg.frame.is_some() || !cfg.scan {
        let grid = build_grid(cfg)?;

        let rest = if use_oracle {
            survival_momentum_oracle(&cfg.distribution, 0.0, &grid, ORACLE_MAX_POINTS)?
        } else {
            survival_rest(&cfg.distribution, &grid)?
        };
        numerical_failure |= rest.fully_failed();
        write_file(out_dir, "rest.csv", &rest.to_csv(), &mut files)?;
        rate_blocks.push(rate_csv(&rest));
        let _ = writeln!(
            summary,
            "rest series: {} points to {} τ, P(horizon) = {:e}",
            grid.points().len(),
            grid.horizon_tau(),
            rest.probabilities[rest.probabilities.len() - 1]
        );

        match cfg.frame {
            Some(FrameSpec::Momentum(p)) => {
                let series = if use_oracle {
                    survival_momentum_oracle(&cfg.distribution, p, &grid, ORACLE_MAX_POINTS)?
                } else {
                    survival_momentum(&cfg.distribution, p, &grid)?
                };
                numerical_failure |= series.fully_failed();
                write_file(out_dir, "momentum.csv", &series.to_csv(), &mut files)?;
                rate_blocks.push(rate_csv(&series));
                if cfg.compare {
                    let gamma = cfg.gamma().expect("frame present");
                    let rep =
                        dilation_compare(&cfg.distribution, &series, gamma, cfg.compare_window_tau)?;
                    let _ = writeln!(
                        summary,
                        "momentum vs rescaled rest laws (γ={gamma}): dilated dev {:.3e}, contracted dev {:.3e} → {}",
                        rep.dev_dilated,
                        rep.dev_contracted,
                        rep.verdict.label()
                    );
                    compare_rows.push_str(&compare_csv_row(&series.label, &rep));
                    any_compare = true;
                }
            }
            Some(FrameSpec::Velocity(v)) => {
                let smear = cfg
                    .smearing
                    .as_ref()
                    .ok_or_else(|| Error::Config("velocity run without smearing".into()))?;
                if use_oracle {
                    return Err(Error::Config(
                        "--oracle supports rest/momentum runs only; velocity-frame series \
                         always use the adaptive engine"
                            .into(),
                    ));
                }
                let gamma = cfg.gamma().expect("frame present");
                for &model in &cfg.phase_models {
                    let series = survival_velocity_frame(
                        &cfg.distribution,
                        smear,
                        v,
                        cfg.x_rule,
                        model,
                        &grid,
                    )?;
                    numerical_failure |= series.fully_failed();
                    write_file(
                        out_dir,
                        &format!("velocity_{}.csv", model.label()),
                        &series.to_csv(),
                        &mut files,
                    )?;
                    rate_blocks.push(rate_csv(&series));
                    if cfg.compare {
                        let rep = dilation_compare(
                            &cfg.distribution,
                            &series,
                            gamma,
                            cfg.compare_window_tau,
                        )?;
                        let _ = writeln!(
                            summary,
                            "{} vs rescaled rest laws (γ={gamma}): dilated dev {:.3e}, contracted dev {:.3e} → {}",
                            model.label(),
                            rep.dev_dilated,
                            rep.dev_contracted,
                            rep.verdict.label()
                        );
                        compare_rows.push_str(&compare_csv_row(&series.label, &rep));
                        any_compare = true;
                    }
                }
            }
            None => {}
        }

        if cfg.transition && grid.horizon_tau() >= 100.0 {
            let rep = transition_time(&rest, cfg.transition_threshold)?;
            match rep.t_star_tau {
                Some(ts) => {
                    let _ = writeln!(
                        summary,
                        "late-time transition at t* = {ts:.2} τ; P/exponential at horizon = {:.3e}",
                        rep.ratio_at_horizon
                    );
                }
                None => {
                    let _ = writeln!(summary, "no late-time transition within the horizon");
                }
            }
            let _ = writeln!(
                transition_rows,
                "{},{},{}",
                rest.label,
                rep.t_star_tau.map_or(String::from(""), |t| t.to_string()),
                rep.ratio_at_horizon
            );
            any_transition = true;
        }
    }

    if any_compare {
        write_file(out_dir, "compare.csv", &compare_rows, &mut files)?;
    }
    if any_transition {
        write_file(out_dir, "transition.csv", &transition_rows, &mut files)?;
    }
    if !rate_blocks.is_empty() {
        // one file, blocks concatenated with a single header
        let mut rates = String::new();
        for (i, block) in rate_blocks.iter().enumerate() {
            if i == 0 {
                rates.push_str(block);
            } else if let Some(body) = block.split_once('\n') {
                rates.push_str(body.1);
            }
        }
        write_file(out_dir, "rates.csv", &rates, &mut files)?;
    }

    if cfg.scan {
        let line = run_scan(cfg, out_dir, &mut files)?;
        let _ = writeln!(summary, "{line}");
    }

    write_file(out_dir, "plot.py", PLOT_SCRIPT, &mut files)?;

    let manifest = manifest_text(cfg, &files, use_oracle);
    write_file(out_dir, "manifest.txt", &manifest, &mut files)?;

    Ok(RunReport {
        files,
        summary,
        numerical_failure,
    })
}

fn manifest_text(cfg: &RunConfig, files: &[PathBuf], use_oracle: bool) -> String {
    let mut m = String::from("# run manifest\n\n[parameters]\n");
    let d = &cfg.distribution;
    let _ = writeln!(m, "distribution.kind = {}", d.kind_label());
    let _ = writeln!(m, "distribution.M = {}", d.mass());
    let _ = writeln!(m, "distribution.width = {}", d.width());
    let _ = writeln!(m, "distribution.mu0 = {}", d.mu0());
    match cfg.frame {
        Some(FrameSpec::Momentum(p)) => {
            let _ = writeln!(m, "kinematics.p = {p}");
        }
        Some(FrameSpec::Velocity(v)) => {
            let _ = writeln!(m, "kinematics.v = {v}");
        }
        None => {}
    }
    if let Some(g) = cfg.gamma() {
        let _ = writeln!(m, "gamma = {g}");
    }
    if let Some(s) = &cfg.smearing {
        let _ = writeln!(m, "smearing.p_bar = {}", s.p_bar);
        let _ = writeln!(m, "smearing.sigma_p = {}", s.sigma_p);
    }
    let _ = writeln!(
        m,
        "models = {}",
        cfg.phase_models
            .iter()
            .map(PhaseModel::label)
            .collect::<Vec<_>>()
            .join(",")
    );
    let _ = writeln!(m, "frame.x_rule = {}", cfg.x_rule.label());
    let _ = writeln!(
        m,
        "grid = {} points, {} spacing, t ∈ [{}, {}] τ",
        cfg.grid.points,
        match cfg.grid.spacing {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        },
        if cfg.grid.spacing == Spacing::Log {
            cfg.grid.t_min_tau
        } else {
            0.0
        },
        cfg.grid.t_max_tau
    );
    let _ = writeln!(m, "engine = {}", if use_oracle { "oracle" } else { "adaptive" });
    let _ = writeln!(m, "seed = {}", cfg.seed);
    m.push_str("\n[files]\n");
    for f in files {
        let _ = writeln!(m, "{}", f.file_name().unwrap().to_string_lossy());
    }
    m.push_str("manifest.txt\n");
    m
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plots survival probabilities from the CSVs next to this script."""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def load(name):
    path = os.path.join(HERE, name)
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return rows


def main():
    fig, ax = plt.subplots(figsize=(7, 5))
    names = ["rest.csv", "momentum.csv"] + [
        f for f in sorted(os.listdir(HERE)) if f.startswith("velocity_")
    ]
    plotted = False
    for name in names:
        rows = load(name)
        if not rows:
            continue
        ts = [float(r["t_over_tau"]) for r in rows]
        ps = [float(r["P"]) for r in rows]
        pts = [(t, p) for t, p in zip(ts, ps) if t > 0 and p > 0]
        if not pts:
            continue
        ax.loglog([t for t, _ in pts], [p for _, p in pts], label=rows[0]["label"])
        plotted = True
    if not plotted:
        print("no series CSVs found", file=sys.stderr)
        return 1
    ax.set_xlabel("t / tau")
    ax.set_ylabel("P(t)")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    out = os.path.join(HERE, "survival.png")
    fig.savefig(out, dpi=150, bbox_inches="tight")
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
"#;
