//! Command-line front end: assessment, weight derivation, and the
//! sensitivity/validation analyses, with plot-ready CSV and JSON reports.
//!
//! Exit codes: 0 success, 1 validation error, 2 I/O error, 64 usage error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ethrisk::fahp::CrMode;
use ethrisk::reports;
use ethrisk::scenario::{
    assess, load_builtin_inputs, load_file, load_str, scenario_weights, AssessMode, AssessOptions,
    Assessment, InputReading, Scenario,
};
use ethrisk::sensitivity::{
    antecedent_sweep, axiom_suite, fahp_monte_carlo, oat_sweep, rule_cf_sweep, sobol_indices,
    tornado, uniform_grid, AxiomOptions, AxiomStatus, PipelineModel,
};
use ethrisk::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ethrisk",
    version,
    about = "Fuzzy ethical-risk scoring and sensitivity analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every risk and write assessment.json with the full trace
    Assess(AssessArgs),
    /// Derive fuzzy/crisp weights and both consistency checks
    Weights(WeightsArgs),
    /// Local and global sensitivity analyses and the axiom suite
    Sensitivity(SensitivityArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Scenario JSON file, or the id of a bundled scenario
    #[arg(long, default_value = "patient-dilemma")]
    scenario: String,
    /// Crisp inputs JSON file (defaults to the bundled baseline readings)
    #[arg(long)]
    inputs: Option<PathBuf>,
    /// Directory report files are written into
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Defuzzification sample count
    #[arg(long, default_value_t = 1001)]
    resolution: usize,
}

#[derive(Args)]
struct AssessArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Inject the scenario's pinned intermediate values
    #[arg(long = "paper-mode")]
    paper_mode: bool,
    /// Print the per-risk trace after the ranking table
    #[arg(long)]
    trace: bool,
    #[arg(long = "cr-mode", value_enum, default_value_t = CrModeArg::Eigen)]
    cr_mode: CrModeArg,
}

#[derive(Args)]
struct WeightsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long = "cr-mode", value_enum, default_value_t = CrModeArg::Eigen)]
    cr_mode: CrModeArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CrModeArg {
    Eigen,
    Weights,
}

impl From<CrModeArg> for CrMode {
    fn from(value: CrModeArg) -> Self {
        match value {
            CrModeArg::Eigen => CrMode::Eigenvector,
            CrModeArg::Weights => CrMode::GivenWeights,
        }
    }
}

#[derive(Args)]
struct SensitivityArgs {
    #[command(subcommand)]
    analysis: Analysis,
}

#[derive(Subcommand)]
enum Analysis {
    /// Sweep one input factor over its range, all else at baseline
    Oat {
        #[command(flatten)]
        common: CommonArgs,
        /// Risk id (defaults to the scenario's first risk)
        #[arg(long)]
        risk: Option<String>,
        /// Factor to sweep
        #[arg(long)]
        factor: String,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Fixed certainty factor
        #[arg(long, default_value_t = 0.632)]
        cf: f64,
        /// Fixed weight of importance
        #[arg(long, default_value_t = 0.573)]
        woi: f64,
    },
    /// Sweep a rule confidence over [0, 1]; the score is linear in it
    Cf {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 0.573)]
        woi: f64,
        /// Fixed risk magnitude the confidence scales
        #[arg(long = "risk-level", default_value_t = 78.0)]
        risk_level: f64,
    },
    /// Sweep one antecedent belief of a disjunctive rule
    Antecedent {
        #[command(flatten)]
        common: CommonArgs,
        /// Baseline antecedent beliefs
        #[arg(long, value_delimiter = ',', default_values_t = [0.62, 0.25, 0.75])]
        baselines: Vec<f64>,
        /// Which belief to sweep (0-based)
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = 0.8)]
        beta: f64,
        #[arg(long, default_value_t = 0.573)]
        woi: f64,
        #[arg(long = "risk-level", default_value_t = 78.0)]
        risk_level: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Sweep the belief up to its baseline instead of up to 1
        #[arg(long = "to-baseline")]
        to_baseline: bool,
    },
    /// Percentage perturbations of every factor, tabulated by influence
    Tornado {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        risk: Option<String>,
        /// Perturbation levels in percent
        #[arg(long, value_delimiter = ',', default_values_t = [10.0, 20.0, 30.0, 50.0])]
        levels: Vec<f64>,
        #[arg(long, default_value_t = 0.632)]
        cf: f64,
        #[arg(long, default_value_t = 0.573)]
        woi: f64,
    },
    /// Monte-Carlo noise on the expert comparisons, weights re-extracted
    Mc {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 0.2)]
        sigma: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Fixed certainty factors, one per risk
        #[arg(long, value_delimiter = ',', default_values_t = [0.632, 0.648, 0.525])]
        cf: Vec<f64>,
        /// Fixed risk magnitudes, one per risk
        #[arg(long, value_delimiter = ',', default_values_t = [78.0, 25.0, 65.0])]
        erm: Vec<f64>,
    },
    /// Variance-based first/total-order indices over one risk's pipeline
    Sobol {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        risk: Option<String>,
        /// Base sample size (a power of two keeps the design balanced)
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Certainty-factor range as lo,hi
        #[arg(long = "cf-range", value_delimiter = ',', default_values_t = [0.5, 1.0])]
        cf_range: Vec<f64>,
        /// Weight range as lo,hi
        #[arg(long = "woi-range", value_delimiter = ',', default_values_t = [0.4, 0.7])]
        woi_range: Vec<f64>,
    },
    /// Run the five-axiom validation suite
    Axioms {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        probes: usize,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(64);
        }
    };
    if let Err(err) = run(cli.command) {
        eprintln!("error: {err}");
        std::process::exit(if err.is_io() { 2 } else { 1 });
    }
}

fn load_scenario(name: &str) -> Result<Scenario> {
    if let Some(text) = ethrisk::scenario::builtin_json(name) {
        return load_str(text);
    }
    load_file(name)
}

fn load_inputs(common: &CommonArgs) -> Result<InputReading> {
    match &common.inputs {
        Some(path) => InputReading::from_file(path),
        None => load_builtin_inputs(&common.scenario).map_err(|_| {
            Error::validation(
                "inputs",
                "no --inputs file given and the scenario has no bundled baseline readings",
            )
        }),
    }
}

fn write_report(dir: &Path, name: &str, payload: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io_at(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, payload).map_err(|e| Error::io_at(&path, e))?;
    Ok(path)
}

fn default_risk(scenario: &Scenario, requested: Option<&String>) -> Result<String> {
    match requested {
        Some(id) => {
            if scenario.risk(id).is_none() {
                return Err(Error::validation(
                    "sensitivity",
                    format!("unknown risk '{id}'"),
                ));
            }
            Ok(id.clone())
        }
        None => Ok(scenario.risks[0].id.clone()),
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Assess(args) => cmd_assess(args),
        Command::Weights(args) => cmd_weights(args),
        Command::Sensitivity(args) => cmd_sensitivity(args.analysis),
    }
}

fn cmd_assess(args: AssessArgs) -> Result<()> {
    let scenario = load_scenario(&args.common.scenario)?;
    let inputs = load_inputs(&args.common)?;
    let options = AssessOptions {
        mode: if args.paper_mode {
            AssessMode::Overrides
        } else {
            AssessMode::Recompute
        },
        resolution: args.common.resolution,
        cr_mode: args.cr_mode.into(),
    };
    let assessment = assess(&scenario, &inputs, &options)?;
    let path = write_report(
        &args.common.out,
        "assessment.json",
        &serde_json::to_string_pretty(&assessment)?,
    )?;
    print_ranking(&assessment);
    if args.trace {
        print_trace(&assessment);
    }
    println!("\nwrote {}", path.display());
    Ok(())
}

fn print_ranking(assessment: &Assessment) {
    println!("scenario: {}", assessment.scenario);
    println!(
        "{:<22} {:>8} {:>8} {:>8} {:>9}",
        "risk", "ERM", "CF", "WoI", "ERS"
    );
    for a in &assessment.ranking {
        println!(
            "{:<22} {:>8.2} {:>8.3} {:>8.3} {:>9.2}",
            a.risk, a.erm, a.cf, a.woi, a.ers
        );
    }
    let cr = &assessment.consistency_eigenvector;
    println!(
        "consistency (eigenvector): lambda_max {:.3}, CR {:.3} -> {}",
        cr.lambda_max,
        cr.cr,
        if cr.consistent {
            "consistent"
        } else {
            "inconsistent"
        }
    );
}

fn print_trace(assessment: &Assessment) {
    for t in &assessment.trace {
        println!("\n[{}]", t.risk);
        for (variable, degrees) in &t.fuzzified {
            let rendered: Vec<String> = degrees
                .iter()
                .map(|(term, d)| format!("{term} {d:.2}"))
                .collect();
            println!(
                "  {variable} = {} -> {}",
                t.inputs.get(variable).copied().unwrap_or(f64::NAN),
                rendered.join(", ")
            );
        }
        for (rule, strength) in &t.firing {
            println!("  {rule}: firing {strength:.3}");
        }
        let acts: Vec<String> = t
            .activations
            .entries()
            .iter()
            .map(|(term, s)| format!("{term} {s:.2}"))
            .collect();
        println!("  activations: {}", acts.join(", "));
        println!(
            "  erm {:.2} * cf {:.3} ({}) * woi {:.3} = ers {:.2}",
            t.erm, t.cf, t.cf_rule, t.woi, t.ers
        );
    }
}

fn cmd_weights(args: WeightsArgs) -> Result<()> {
    let scenario = load_scenario(&args.common.scenario)?;
    let weights = scenario_weights(&scenario, AssessMode::Recompute)?;
    let chosen = match CrMode::from(args.cr_mode) {
        CrMode::Eigenvector => &weights.consistency_eigenvector,
        CrMode::GivenWeights => &weights.consistency_given_weights,
    };
    let payload = json!({
        "scenario": scenario.name,
        "weights": weights.report,
        "consistency_eigenvector": weights.consistency_eigenvector,
        "consistency_given_weights": weights.consistency_given_weights,
        "verdict": if chosen.consistent { "consistent" } else { "inconsistent" },
    });
    let path = write_report(
        &args.common.out,
        "weights.json",
        &serde_json::to_string_pretty(&payload)?,
    )?;
    println!(
        "{:<22} {:>30} {:>10}",
        "risk", "fuzzy weight (l, m, u)", "crisp"
    );
    for (risk, (fuzzy, crisp)) in scenario.risks.iter().zip(
        weights
            .report
            .fuzzy_weights
            .iter()
            .zip(&weights.report.crisp_weights),
    ) {
        println!(
            "{:<22} {:>30} {:>10.3}",
            risk.id,
            format!("({:.3}, {:.3}, {:.3})", fuzzy.l(), fuzzy.m(), fuzzy.u()),
            crisp
        );
    }
    for report in [
        &weights.consistency_eigenvector,
        &weights.consistency_given_weights,
    ] {
        println!(
            "{:?}: lambda_max {:.4}, CI {:.4}, RI {:.2}, CR {:.4} -> {}",
            report.mode,
            report.lambda_max,
            report.ci,
            report.ri,
            report.cr,
            if report.consistent {
                "consistent"
            } else {
                "inconsistent"
            }
        );
    }
    println!("\nwrote {}", path.display());
    Ok(())
}

fn cmd_sensitivity(analysis: Analysis) -> Result<()> {
    match analysis {
        Analysis::Oat {
            common,
            risk,
            factor,
            steps,
            cf,
            woi,
        } => {
            let scenario = load_scenario(&common.scenario)?;
            let inputs = load_inputs(&common)?;
            let risk = default_risk(&scenario, risk.as_ref())?;
            let sweep = oat_sweep(
                &scenario,
                &inputs,
                &risk,
                &factor,
                None,
                steps,
                cf,
                woi,
                common.resolution,
            )?;
            let csv = write_report(
                &common.out,
                &format!("sweep_{factor}.csv"),
                &reports::sweep_csv(&sweep),
            )?;
            let summary = json!({
                "analysis": "oat",
                "risk": risk,
                "factor": factor,
                "steps": steps,
                "cf": cf,
                "woi": woi,
                "resolution": common.resolution,
                "min_ers": sweep.min_score(),
                "max_ers": sweep.max_score(),
                "segments": sweep.segments,
            });
            write_report(
                &common.out,
                "oat_summary.json",
                &serde_json::to_string_pretty(&summary)?,
            )?;
            println!("swept {factor} over {steps} steps; wrote {}", csv.display());
        }
        Analysis::Cf {
            common,
            steps,
            woi,
            risk_level,
        } => {
            let grid = uniform_grid(0.0, 1.0, steps)?;
            let sweep = rule_cf_sweep(woi, risk_level, &grid)?;
            let csv = write_report(&common.out, "sweep_beta.csv", &reports::sweep_csv(&sweep))?;
            let summary = json!({
                "analysis": "rule-cf",
                "steps": steps,
                "woi": woi,
                "risk_level": risk_level,
                "max_ers": sweep.max_score(),
            });
            write_report(
                &common.out,
                "cf_summary.json",
                &serde_json::to_string_pretty(&summary)?,
            )?;
            println!(
                "swept rule confidence over {steps} steps; wrote {}",
                csv.display()
            );
        }
        Analysis::Antecedent {
            common,
            baselines,
            index,
            beta,
            woi,
            risk_level,
            steps,
            to_baseline,
        } => {
            let hi = if to_baseline {
                *baselines.get(index).ok_or_else(|| {
                    Error::validation("antecedent", format!("index {index} out of range"))
                })?
            } else {
                1.0
            };
            let grid = uniform_grid(0.0, hi, steps)?;
            let sweep = antecedent_sweep(&baselines, index, beta, woi, risk_level, &grid)?;
            let csv = write_report(
                &common.out,
                &format!("sweep_alpha_{index}.csv"),
                &reports::sweep_csv(&sweep),
            )?;
            let summary = json!({
                "analysis": "antecedent",
                "baselines": baselines,
                "index": index,
                "beta": beta,
                "woi": woi,
                "risk_level": risk_level,
                "steps": steps,
                "segments": sweep.segments,
            });
            write_report(
                &common.out,
                "antecedent_summary.json",
                &serde_json::to_string_pretty(&summary)?,
            )?;
            println!("swept antecedent belief {index}; wrote {}", csv.display());
        }
        Analysis::Tornado {
            common,
            risk,
            levels,
            cf,
            woi,
        } => {
            let scenario = load_scenario(&common.scenario)?;
            let inputs = load_inputs(&common)?;
            let risk = default_risk(&scenario, risk.as_ref())?;
            let fractions: Vec<f64> = levels.iter().map(|l| l / 100.0).collect();
            let table = tornado(
                &scenario,
                &inputs,
                &risk,
                &fractions,
                cf,
                woi,
                common.resolution,
            )?;
            let csv = write_report(&common.out, "tornado.csv", &reports::tornado_csv(&table))?;
            let summary = json!({
                "analysis": "tornado",
                "risk": risk,
                "levels_pct": levels,
                "cf": cf,
                "woi": woi,
                "baseline_ers": table.baseline_ers,
                "factor_order": table.factor_order,
            });
            write_report(
                &common.out,
                "tornado_summary.json",
                &serde_json::to_string_pretty(&summary)?,
            )?;
            println!(
                "tornado over {} factors; most influential: {}; wrote {}",
                table.factor_order.len(),
                table.factor_order.first().cloned().unwrap_or_default(),
                csv.display()
            );
        }
        Analysis::Mc {
            common,
            n,
            sigma,
            seed,
            cf,
            erm,
        } => {
            let scenario = load_scenario(&common.scenario)?;
            let aggregated = ethrisk::fahp::aggregate_experts(&scenario.expert_matrices)?;
            let base = aggregated.midpoints();
            let result = fahp_monte_carlo(&base, sigma, n, seed, &cf, &erm)?;
            let labels: Vec<String> = scenario.risks.iter().map(|r| r.id.clone()).collect();
            let csv = write_report(
                &common.out,
                "mc_samples.csv",
                &reports::mc_csv(&result, &labels),
            )?;
            let summary = json!({
                "analysis": "monte-carlo",
                "n": n,
                "sigma": sigma,
                "seed": seed,
                "cf": cf,
                "erm": erm,
                "risks": labels,
                "weight_mean": result.weight_mean,
                "weight_std": result.weight_std,
                "ers_mean": result.ers_mean,
                "ers_std": result.ers_std,
                "dominance_counts": result.dominance_counts,
            });
            write_report(
                &common.out,
                "mc_summary.json",
                &serde_json::to_string_pretty(&summary)?,
            )?;
            println!(
                "{} samples, sigma {sigma}, seed {seed}; dominant weight share {:.1}%; wrote {}",
                n,
                100.0 * result.dominance_counts[0] as f64 / n as f64,
                csv.display()
            );
        }
        Analysis::Sobol {
            common,
            risk,
            n,
            seed,
            cf_range,
            woi_range,
        } => {
            let scenario = load_scenario(&common.scenario)?;
            let risk = default_risk(&scenario, risk.as_ref())?;
            let range = |v: &[f64], what: &str| -> Result<(f64, f64)> {
                if v.len() != 2 {
                    return Err(Error::validation("sobol", format!("--{what} takes lo,hi")));
                }
                Ok((v[0], v[1]))
            };
            let model = PipelineModel::new(&scenario, &risk, common.resolution)?;
            let inputs = model.uniform_inputs(
                range(&cf_range, "cf-range")?,
                range(&woi_range, "woi-range")?,
            );
            let result = sobol_indices(|x| model.score(x), &inputs, n, seed)?;
            if let Some(warning) = &result.warning {
                eprintln!("warning: {warning}");
            }
            let csv = write_report(&common.out, "sobol.csv", &reports::sobol_csv(&result))?;
            let summary = json!({
                "analysis": "sobol",
                "risk": risk,
                "n_base": result.n_base,
                "evaluations": result.evaluations,
                "seed": result.seed,
                "inputs": result.inputs,
                "s1": result.s1,
                "st": result.st,
                "variance": result.variance,
                "warning": result.warning,
            });
            write_report(
                &common.out,
                "sobol_summary.json",
                &serde_json::to_string_pretty(&summary)?,
            )?;
            println!(
                "{} evaluations (base {n}, seed {seed}); wrote {}",
                result.evaluations,
                csv.display()
            );
        }
        Analysis::Axioms {
            common,
            seed,
            probes,
        } => {
            let scenario = load_scenario(&common.scenario)?;
            let inputs = load_inputs(&common)?;
            let options = AxiomOptions {
                seed,
                probes,
                resolution: common.resolution,
                ..Default::default()
            };
            let report = axiom_suite(&scenario, &inputs, &options)?;
            let path = write_report(
                &common.out,
                "axioms.json",
                &serde_json::to_string_pretty(&report)?,
            )?;
            for check in &report.checks {
                let status = match check.status {
                    AxiomStatus::Pass => "pass",
                    AxiomStatus::Fail => "FAIL",
                    AxiomStatus::Vacuous => "vacuous",
                };
                println!(
                    "axiom {} ({}): {} [{} checks]",
                    check.axiom, check.name, status, check.checked
                );
            }
            println!(
                "{}; wrote {}",
                if report.all_pass {
                    "all axioms pass"
                } else {
                    "axiom violations found"
                },
                path.display()
            );
        }
    }
    Ok(())
}
