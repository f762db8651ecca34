//! Plot-ready CSV renderings of analysis results.
//!
//! Values are written with Rust's shortest round-trip float formatting and
//! rows follow deterministic orders, so a rerun with the same seed yields
//! byte-identical payloads. No timestamps.

use std::fmt::Write;

use crate::sensitivity::{MonteCarloResult, SobolResult, SweepResult, TornadoTable};

/// `value,ers` rows in grid order.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from("value,ers\n");
    for (value, score) in &result.samples {
        let _ = writeln!(out, "{value},{score}");
    }
    out
}

/// `factor,level_pct,down_pct,up_pct` rows, most influential factor first.
pub fn tornado_csv(table: &TornadoTable) -> String {
    let mut out = String::from("factor,level_pct,down_pct,up_pct\n");
    for entry in &table.entries {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            entry.factor,
            entry.level * 100.0,
            entry.down_pct,
            entry.up_pct
        );
    }
    out
}

/// One row per sample: weights then scores, labeled per criterion.
pub fn mc_csv(result: &MonteCarloResult, labels: &[String]) -> String {
    let mut out = String::from("sample");
    for label in labels {
        let _ = write!(out, ",w_{label}");
    }
    for label in labels {
        let _ = write!(out, ",ers_{label}");
    }
    out.push('\n');
    for (i, (w, e)) in result
        .weight_samples
        .iter()
        .zip(&result.ers_samples)
        .enumerate()
    {
        let _ = write!(out, "{i}");
        for v in w {
            let _ = write!(out, ",{v}");
        }
        for v in e {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

/// `input,s1,st` rows in input order.
pub fn sobol_csv(result: &SobolResult) -> String {
    let mut out = String::from("input,s1,st\n");
    for (i, name) in result.inputs.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", name, result.s1[i], result.st[i]);
    }
    out
}
