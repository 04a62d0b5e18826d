//! The `monocf` command line: argument definitions and report assembly.
//! `main.rs` only parses, dispatches to [`run`], and maps errors to exit
//! codes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::baselines::{ball_search, brute_force_optimal, BRUTE_FORCE_MAX_D};
use crate::bench::{run_bench, BenchConfig};
use crate::certificates::{certificate_complexity, find_certificate_with, sensitivity, Polarity};
use crate::counterfactual::{
    find_optimal, is_minimal_counterfactual, CounterfactualReport, Region, SearchConfig, MINIMALITY_MAX_DELTA,
};
use crate::error::{usage, Result};
use crate::general::{find_optimal_general, GeneralInstance, GeneralModelSpec, GeneralOracle};
use crate::idt::{depth_cap_for, materialize, Idt, MATERIALIZE_MAX_D};
use crate::model_core::{delta, one_based, Instance, Model, ModelSpec, Oracle, Restriction, SharedModel, TreeNode, TreeNodeRepr};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0x6d6f_6e6f;

/// Largest dimension for which `explain` measures `S(f)` to cap the tree
/// depth when `--s-bound` is absent.
pub const AUTO_SENSITIVITY_MAX_D: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "monocf", version, about = "All optimal counterfactuals for monotone black-box classifiers")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Seed for every random choice (monotonicity sampling, benchmarks).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Include the full oracle query trace in the report.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Compact JSON output (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    pub json: bool,
    /// Indented JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Memoize oracle answers and also report the distinct-query count.
    #[arg(long, global = true)]
    pub dedupe_queries: bool,
    /// Upper bound on S(f), used to cap the implicit tree depth.
    #[arg(long, global = true)]
    pub s_bound: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Idt,
    Ball,
    Brute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolarityArg {
    Minterm,
    Maxterm,
}

impl From<PolarityArg> for Polarity {
    fn from(p: PolarityArg) -> Self {
        match p {
            PolarityArg::Minterm => Polarity::Minterm,
            PolarityArg::Maxterm => Polarity::Maxterm,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All optimal counterfactuals for a Boolean instance.
    Explain {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        instance: String,
        #[arg(long, value_enum, default_value = "idt")]
        algo: AlgoArg,
        #[arg(long, value_enum, default_value = "minterm")]
        polarity: PolarityArg,
    },
    /// Optimal difference sets for an instance over ordered features.
    ExplainGeneral {
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated feature values.
        #[arg(long, allow_hyphen_values = true)]
        instance: String,
    },
    /// Check a candidate counterfactual against the model.
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        instance: String,
        #[arg(long)]
        candidate: String,
    },
    /// Sensitivity, certificate complexity, and the root certificate.
    Inspect {
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated subset of sensitivity,certcomplexity,cert.
        #[arg(long, value_delimiter = ',', default_value = "sensitivity,certcomplexity,cert")]
        report: Vec<InspectPart>,
        #[arg(long, value_enum, default_value = "minterm")]
        polarity: PolarityArg,
    },
    /// Materialize the whole implicit decision tree.
    InspectTree {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value = "minterm")]
        polarity: PolarityArg,
    },
    /// Run a query-complexity benchmark.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Write the benchmark report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InspectPart {
    Sensitivity,
    Certcomplexity,
    Cert,
}

impl GlobalOpts {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    fn oracle<'m>(&self, model: &'m dyn Model) -> Oracle<'m> {
        let mut o = Oracle::new(model);
        if self.trace {
            o = o.with_trace();
        }
        if self.dedupe_queries {
            o = o.with_dedupe();
        }
        o
    }
}

/// Render a report according to `--pretty`.
pub fn render(report: &Value, global: &GlobalOpts) -> String {
    if global.pretty {
        serde_json::to_string_pretty(report).expect("json values serialize")
    } else {
        serde_json::to_string(report).expect("json values serialize")
    }
}

fn load_model(path: &Path, global: &GlobalOpts) -> Result<SharedModel> {
    let spec = ModelSpec::load(path)?;
    let mut rng = ChaCha8Rng::seed_from_u64(global.seed());
    spec.build_checked(&mut rng)
}

fn parse_instance(text: &str, d: usize, what: &str) -> Result<Instance> {
    let x: Instance = text.parse()?;
    if x.len() != d {
        return Err(usage(format!("{what} has length {}, model dimension is {d}", x.len())));
    }
    Ok(x)
}

fn depth_cap(model: &dyn Model, global: &GlobalOpts) -> Result<Option<usize>> {
    if let Some(s) = global.s_bound {
        return Ok(Some(depth_cap_for(s)));
    }
    if model.dimension() <= AUTO_SENSITIVITY_MAX_D {
        return Ok(Some(depth_cap_for(sensitivity(model)?)));
    }
    Ok(None)
}

fn ledger_json(oracle: &Oracle) -> Value {
    let ledger = oracle.ledger();
    let mut m = Map::new();
    m.insert("queries".into(), json!(ledger.count()));
    if let Some(n) = ledger.distinct() {
        m.insert("distinct_queries".into(), json!(n));
    }
    Value::Object(m)
}

fn strings<T: ToString>(items: &[T]) -> Vec<String> {
    items.iter().map(T::to_string).collect()
}

/// Execute one command and return its report. Wall time is added by the
/// caller-facing wrapper in [`run`].
fn dispatch(command: &Command, global: &GlobalOpts) -> Result<(Value, Value, Value)> {
    match command {
        Command::Explain {
            model,
            instance,
            algo,
            polarity,
        } => {
            let f = load_model(model, global)?;
            let x = parse_instance(instance, f.dimension(), "instance")?;
            let oracle = global.oracle(f.as_ref());
            let report: CounterfactualReport = match algo {
                AlgoArg::Idt => {
                    let config = SearchConfig {
                        depth_cap: depth_cap(f.as_ref(), global)?,
                        polarity: (*polarity).into(),
                    };
                    find_optimal(&oracle, &x, &config)?
                }
                AlgoArg::Ball => ball_search(&oracle, &x)?,
                AlgoArg::Brute => brute_force_optimal(&oracle, &x)?,
            };
            let inputs = json!({
                "model": model.display().to_string(),
                "instance": x.to_string(),
                "algo": format!("{algo:?}").to_lowercase(),
            });
            let mut results = json!({
                "distance": report.distance,
                "optima": strings(&report.optima),
                "diff_sets": report.diff_sets_one_based(),
            });
            if global.trace {
                results["trace"] = json!(strings(&oracle.trace()));
            }
            Ok((inputs, results, ledger_json(&oracle)))
        }
        Command::ExplainGeneral { model, instance } => {
            let spec = GeneralModelSpec::load(model)?;
            let f = spec.build_checked()?;
            let x: GeneralInstance = instance.parse()?;
            let oracle = GeneralOracle::new(f.as_ref());
            let config = SearchConfig {
                depth_cap: global.s_bound.map(depth_cap_for),
                ..SearchConfig::default()
            };
            let report = find_optimal_general(&oracle, &x, &config)?;
            let inputs = json!({"model": model.display().to_string(), "instance": x.to_string()});
            let results = json!({
                "distance": report.distance,
                "diff_sets": report.diff_sets_one_based(),
                "representatives": strings(&report.representatives),
            });
            Ok((inputs, results, json!({"queries": oracle.count()})))
        }
        Command::Verify {
            model,
            instance,
            candidate,
        } => {
            let f = load_model(model, global)?;
            let d = f.dimension();
            let x = parse_instance(instance, d, "instance")?;
            let y = parse_instance(candidate, d, "candidate")?;
            let oracle = global.oracle(f.as_ref());
            let fx = oracle.query(&x);
            let fy = oracle.query(&y);
            let diff = delta(&x, &y)?;
            let counterfactual = fx != fy;
            let minimal = if !counterfactual {
                json!(false)
            } else if diff.len() <= MINIMALITY_MAX_DELTA {
                json!(is_minimal_counterfactual(&oracle, &x, &y, &Region::Cube)?)
            } else {
                json!("unknown")
            };
            let optimal = if !counterfactual {
                json!(false)
            } else if d <= BRUTE_FORCE_MAX_D {
                let best = brute_force_optimal(&oracle, &x)?;
                json!(best.distance == diff.len())
            } else {
                json!("unknown")
            };
            let inputs = json!({
                "model": model.display().to_string(),
                "instance": x.to_string(),
                "candidate": y.to_string(),
            });
            let results = json!({
                "f_instance": fx as u8,
                "f_candidate": fy as u8,
                "delta": one_based(&diff),
                "counterfactual": counterfactual,
                "minimal": minimal,
                "optimal": optimal,
            });
            Ok((inputs, results, ledger_json(&oracle)))
        }
        Command::Inspect {
            model,
            report,
            polarity,
        } => {
            let f = load_model(model, global)?;
            let oracle = global.oracle(f.as_ref());
            let mut results = Map::new();
            if report.contains(&InspectPart::Sensitivity) {
                results.insert("S".into(), json!(sensitivity(f.as_ref())?));
            }
            if report.contains(&InspectPart::Certcomplexity) {
                let c = certificate_complexity(f.as_ref())?;
                results.insert("C".into(), json!(c.c));
                results.insert("C0".into(), json!(c.c0));
                results.insert("C1".into(), json!(c.c1));
            }
            if report.contains(&InspectPart::Cert) {
                let cert = find_certificate_with(&oracle, &Restriction::empty(f.dimension()), (*polarity).into())?;
                results.insert(
                    "cert".into(),
                    json!({
                        "features": one_based(&cert.features),
                        "witness": cert.witness.to_string(),
                        "value": cert.value as u8,
                    }),
                );
            }
            let inputs = json!({"model": model.display().to_string()});
            Ok((inputs, Value::Object(results), ledger_json(&oracle)))
        }
        Command::InspectTree { model, polarity } => {
            let f = load_model(model, global)?;
            if f.dimension() > MATERIALIZE_MAX_D {
                return Err(crate::error::Error::Capability(format!(
                    "materialization needs d <= {MATERIALIZE_MAX_D}"
                )));
            }
            let oracle = global.oracle(f.as_ref());
            let idt = Idt::new(&oracle)
                .with_polarity((*polarity).into())
                .with_depth_cap(depth_cap(f.as_ref(), global)?);
            let tree = materialize(&idt)?;
            let mut blocks = Vec::new();
            collect_blocks(tree.root(), &mut blocks);
            let inputs = json!({"model": model.display().to_string()});
            let results = json!({
                "tree": TreeNodeRepr::from(tree.root()),
                "depth": tree.depth(),
                "blocks": blocks,
            });
            Ok((inputs, results, ledger_json(&oracle)))
        }
        Command::Bench { config, out, csv } => {
            let mut cfg = BenchConfig::from_json(&std::fs::read_to_string(config)?)?;
            if let Some(seed) = global.seed {
                cfg.seed = seed;
            }
            let report = run_bench(&cfg)?;
            let body = render(&serde_json::to_value(&report)?, global);
            let inputs = json!({
                "config": config.display().to_string(),
                "out": out.as_ref().map(|p| p.display().to_string()),
                "csv": csv.as_ref().map(|p| p.display().to_string()),
            });
            if let Some(path) = csv {
                std::fs::write(path, report.to_csv())?;
            }
            let results = match out {
                Some(path) => {
                    std::fs::write(path, body + "\n")?;
                    json!({"cells": report.cells.len()})
                }
                None => serde_json::to_value(&report)?,
            };
            Ok((inputs, results, Value::Null))
        }
    }
}

fn collect_blocks(node: &TreeNode, out: &mut Vec<Vec<usize>>) {
    if let TreeNode::Internal { lo, hi, block, .. } = node {
        if let Some(b) = block {
            out.push(one_based(b));
        }
        collect_blocks(lo, out);
        collect_blocks(hi, out);
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Explain { .. } => "explain",
        Command::ExplainGeneral { .. } => "explain-general",
        Command::Verify { .. } => "verify",
        Command::Inspect { .. } => "inspect",
        Command::InspectTree { .. } => "inspect-tree",
        Command::Bench { .. } => "bench",
    }
}

/// Run a parsed command line and build the full report.
pub fn run(cli: &Cli) -> Result<Value> {
    let start = Instant::now();
    let (inputs, results, ledger) = dispatch(&cli.command, &cli.global)?;
    let mut report = json!({
        "command": command_name(&cli.command),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": cli.global.seed(),
        "inputs": inputs,
        "results": results,
    });
    if !ledger.is_null() {
        report["ledger"] = ledger;
    }
    report["wall_time_ms"] = json!(start.elapsed().as_secs_f64() * 1000.0);
    Ok(report)
}
