//! Command-line driver.
//!
//! Exit status: 0 when every check passed (or no cancellation witness was
//! found), 1 when a check failed, a witness was found, or the requested
//! operation is impossible for the model, 2 for usage and spec errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::Error;
use crate::harness::{
    cancellation_propagation, cancellation_search, check_convex_space_axioms, check_gamma_axioms, check_metric_axiom,
    CancellationWitness,
};
use crate::norm::{boundedness_check, recover_norm, verify_isometry, BoundednessReport, IsometryReport, NormProbe};
use crate::rational::Rational;
use crate::report::{CheckReport, Failure};
use crate::spec::{self, LoadedSpec};
use crate::stone::{embed, EmbeddingReport, EmbeddingVerification, generate_carrier};

pub const TOOL: &str = "convexity";
/// Overrides the spec's seed when set; `--seed` overrides both.
pub const SEED_ENV: &str = "CONVEXITY_SEED";
/// Upward steps checked when a cancellation witness is propagated.
pub const PROPAGATION_STEPS: usize = 20;
/// Base points compared per norm probe.
pub const NORM_BASES: usize = 8;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = TOOL, version, about = "Exact checks for convex spaces")]
struct Cli {
    /// Seed for all sampling; overrides the spec and the environment.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convex-space, barycentric, and metric axioms.
    CheckAxioms { spec: PathBuf },
    /// Embed a sampled carrier into a rational vector space.
    Embed { spec: PathBuf },
    /// Search for a cancellation failure and propagate it.
    CancelSearch { spec: PathBuf },
    /// Recover the norm of a direction from the metric.
    RecoverNorm {
        spec: PathBuf,
        /// Comma-separated rationals, e.g. "1/2,1/4".
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
    },
    /// Embedding plus recovered norm must reproduce the metric.
    VerifyIsometry { spec: PathBuf },
    /// Boundedness and the first metric condition.
    Bounded {
        spec: PathBuf,
        /// Constant to test instead of the recovered bound.
        #[arg(long)]
        constant: Option<String>,
    },
    /// Replay every failure recorded in a report against its spec.
    Replay { spec: PathBuf, report: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckAxioms { .. } => "check-axioms",
            Command::Embed { .. } => "embed",
            Command::CancelSearch { .. } => "cancel-search",
            Command::RecoverNorm { .. } => "recover-norm",
            Command::VerifyIsometry { .. } => "verify-isometry",
            Command::Bounded { .. } => "bounded",
            Command::Replay { .. } => "replay",
        }
    }

    fn spec_path(&self) -> &PathBuf {
        match self {
            Command::CheckAxioms { spec }
            | Command::Embed { spec }
            | Command::CancelSearch { spec }
            | Command::RecoverNorm { spec, .. }
            | Command::VerifyIsometry { spec }
            | Command::Bounded { spec, .. }
            | Command::Replay { spec, .. } => spec,
        }
    }
}

#[derive(Serialize, Default)]
struct Cancellation {
    found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<CancellationWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    propagation: Option<CheckReport>,
}

#[derive(Serialize, Default)]
struct ReplaySummary {
    failures: usize,
    reproduced: usize,
}

#[derive(Serialize, Default)]
struct Sections {
    #[serde(skip_serializing_if = "Option::is_none")]
    convex_space_axioms: Option<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_axioms: Option<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metric_axiom: Option<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    embedding: Option<EmbeddingReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    embedding_verification: Option<EmbeddingVerification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cancellation: Option<Cancellation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    norm_probe: Option<NormProbe>,
    #[serde(skip_serializing_if = "Option::is_none")]
    isometry: Option<IsometryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    boundedness: Option<BoundednessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    replay: Option<ReplaySummary>,
}

/// The document printed on standard output.
#[derive(Serialize)]
struct RunReport {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    spec_digest: String,
    seed: u64,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
    sections: Sections,
}

/// Runs the tool with diagnostics on standard error.
pub fn run(args: &[String], out: &mut dyn Write) -> u8 {
    run_with(args, out, &mut std::io::stderr())
}

pub fn run_with(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_PASS
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };

    let path = cli.command.spec_path();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "{TOOL}: cannot read {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    let loaded = match spec::parse(&text) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(err, "{TOOL}: {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    let env_seed = match std::env::var(SEED_ENV) {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(s) => Some(s),
            Err(_) => {
                let _ = writeln!(err, "{TOOL}: {SEED_ENV} must be an unsigned integer, got {v:?}");
                return EXIT_USAGE;
            }
        },
        Err(_) => None,
    };
    let seed = cli.seed.or(env_seed).unwrap_or(loaded.seed);
    let loaded = loaded.with_seed(seed);

    let mut report = RunReport {
        tool: TOOL,
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        spec_digest: spec::digest(&loaded.spec),
        seed,
        passed: false,
        error: None,
        notes: Vec::new(),
        sections: Sections::default(),
    };

    let outcome = match &cli.command {
        Command::CheckAxioms { .. } => check_axioms(&loaded, &mut report),
        Command::Embed { .. } => run_embed(&loaded, &mut report),
        Command::CancelSearch { .. } => cancel_search(&loaded, &mut report),
        Command::RecoverNorm { direction, .. } => match parse_vector(direction) {
            Ok(v) => run_recover_norm(&loaded, &v, &mut report),
            Err(msg) => {
                let _ = writeln!(err, "{TOOL}: --direction: {msg}");
                return EXIT_USAGE;
            }
        },
        Command::VerifyIsometry { .. } => run_verify_isometry(&loaded, &mut report),
        Command::Bounded { constant, .. } => {
            let constant = match constant.as_deref().map(str::parse::<Rational>).transpose() {
                Ok(c) => c,
                Err(e) => {
                    let _ = writeln!(err, "{TOOL}: --constant: {e}");
                    return EXIT_USAGE;
                }
            };
            run_bounded(&loaded, constant.as_ref(), &mut report)
        }
        Command::Replay { report: report_path, .. } => {
            let doc = match std::fs::read_to_string(report_path)
                .map_err(|e| e.to_string())
                .and_then(|t| serde_json::from_str::<serde_json::Value>(&t).map_err(|e| e.to_string()))
            {
                Ok(d) => d,
                Err(e) => {
                    let _ = writeln!(err, "{TOOL}: cannot read report {}: {e}", report_path.display());
                    return EXIT_USAGE;
                }
            };
            run_replay(&loaded, &doc, &mut report)
        }
    };

    match outcome {
        Ok(passed) => report.passed = passed,
        Err(e) => {
            report.passed = false;
            report.error = Some(e.to_string());
        }
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if writeln!(out, "{json}").is_err() {
        return EXIT_USAGE;
    }
    if report.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn parse_vector(s: &str) -> Result<Vec<Rational>, String> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    s.split(',')
        .map(|part| part.trim().trim_matches('"').parse::<Rational>().map_err(|e| e.to_string()))
        .collect()
}

fn check_axioms(l: &LoadedSpec, r: &mut RunReport) -> Result<bool, Error> {
    let sampler = l.sampler();
    let cs = check_convex_space_axioms(&l.model, &sampler)?;
    let gamma = check_gamma_axioms(&l.model, &sampler)?;
    let mut passed = cs.passed() && gamma.passed();
    r.sections.convex_space_axioms = Some(cs);
    r.sections.gamma_axioms = Some(gamma);
    if l.model.has_metric() {
        let metric = check_metric_axiom(&l.model, &sampler)?;
        passed &= metric.passed();
        r.sections.metric_axiom = Some(metric);
    } else {
        r.notes.push("metric checks skipped: model has no metric".into());
    }
    Ok(passed)
}

fn run_embed(l: &LoadedSpec, r: &mut RunReport) -> Result<bool, Error> {
    let e = embed(&l.model, &l.sampler(), l.depth)?;
    let passed = e.verification.passed();
    r.sections.embedding = Some(e.report);
    r.sections.embedding_verification = Some(e.verification);
    Ok(passed)
}

fn cancel_search(l: &LoadedSpec, r: &mut RunReport) -> Result<bool, Error> {
    let sampler = l.sampler();
    let witness = cancellation_search(&l.model, &sampler)?;
    let propagation = match &witness {
        Some(w) => Some(cancellation_propagation(&l.model, w, PROPAGATION_STEPS, &sampler)?),
        None => None,
    };
    if witness.is_none() {
        r.notes.push("no cancellation witness within budget".into());
    }
    let found = witness.is_some();
    r.sections.cancellation = Some(Cancellation { found, witness, propagation });
    Ok(!found)
}

fn run_recover_norm(l: &LoadedSpec, v: &[Rational], r: &mut RunReport) -> Result<bool, Error> {
    let carrier = generate_carrier(&l.model, &l.model.generators(), &l.grid, l.depth)?;
    let probe = recover_norm(&l.model, carrier.points(), v, NORM_BASES)?;
    let passed = probe.well_defined();
    r.sections.norm_probe = Some(probe);
    Ok(passed)
}

fn run_verify_isometry(l: &LoadedSpec, r: &mut RunReport) -> Result<bool, Error> {
    let iso = verify_isometry(&l.model, &l.sampler(), l.depth)?;
    let passed = iso.passed();
    r.sections.isometry = Some(iso);
    Ok(passed)
}

fn run_bounded(l: &LoadedSpec, constant: Option<&Rational>, r: &mut RunReport) -> Result<bool, Error> {
    let b = boundedness_check(&l.model, &l.sampler(), constant)?;
    let passed = b.passed();
    r.sections.boundedness = Some(b);
    Ok(passed)
}

/// Collects every failure object found anywhere in a report document.
pub fn collect_failures(doc: &serde_json::Value) -> Result<Vec<Failure>, serde_json::Error> {
    let mut out = Vec::new();
    let mut stack = vec![doc];
    while let Some(v) = stack.pop() {
        match v {
            serde_json::Value::Object(map) => {
                if let Some(serde_json::Value::Array(fs)) = map.get("failures") {
                    for f in fs {
                        out.push(serde_json::from_value(f.clone())?);
                    }
                }
                stack.extend(map.iter().filter(|(k, _)| *k != "failures").map(|(_, v)| v));
            }
            serde_json::Value::Array(items) => stack.extend(items),
            _ => {}
        }
    }
    Ok(out)
}

fn run_replay(l: &LoadedSpec, doc: &serde_json::Value, r: &mut RunReport) -> Result<bool, Error> {
    let failures = collect_failures(doc).map_err(|e| Error::InvalidModel(format!("report: {e}")))?;
    let reproduced = failures.iter().filter(|f| f.replays(&l.model)).count();
    let summary = ReplaySummary { failures: failures.len(), reproduced };
    let passed = summary.failures == summary.reproduced;
    r.sections.replay = Some(summary);
    Ok(passed)
}
