//! Batch experiment driver. Grammar:
//! `cliffordlab <experiment-id> [--config path | inline flags] [--out path]`
//! plus `cliffordlab --list`. Exit codes: 0 all checks pass, 1 at least
//! one check failed, 2 usage / configuration / I/O error.

use cliffordlab_cli::{experiments, report};

use clap::{CommandFactory, Parser, Subcommand};
use report::Report;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "cliffordlab", version, about = "Numerical laboratory for Clifford analysis on R^n")]
struct Cli {
    /// Enumerate experiments with their parameter schemas and exit
    #[arg(long, exclusive = true)]
    list: bool,
    #[command(subcommand)]
    command: Option<Command>,
    /// Write the JSON report here instead of stdout
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Read the experiment configuration from a JSON file; replaces all
    /// inline parameter flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact algebra laws on randomized instances
    AlgebraCheck(experiments::AlgebraCheckConfig),
    /// Discrete D^2 = -Laplacian residuals and convergence order
    Factorization(experiments::FactorizationConfig),
    /// Left/right product-rule residuals on polynomial pairs
    ProductRule(experiments::ProductRuleConfig),
    /// Reproduction constant c_n from probe test functions
    EstimateCn(experiments::EstimateCnConfig),
    /// Uniform approximation on a measure-zero set by a monogenic field
    ApproxNull(experiments::ApproxNullConfig),
    /// Generate fractal point clouds (CSV + JSON sidecar)
    FractalGen(experiments::FractalGenConfig),
    /// Per-point chord-direction rank of a point cloud
    Rigidity(experiments::RigidityConfig),
    /// Integrate prescribed differentials along a chord-arc curve
    JetIntegrate(experiments::JetIntegrateConfig),
    /// Difference-quotient kernels and diagonal behavior
    Commutator(experiments::CommutatorConfig),
    /// Monogenic extension of linear data from a hyperplane
    HyperplaneExtend(experiments::HyperplaneExtendConfig),
}

impl Command {
    fn id(&self) -> &'static str {
        match self {
            Command::AlgebraCheck(_) => "algebra-check",
            Command::Factorization(_) => "factorization",
            Command::ProductRule(_) => "product-rule",
            Command::EstimateCn(_) => "estimate-cn",
            Command::ApproxNull(_) => "approx-null",
            Command::FractalGen(_) => "fractal-gen",
            Command::Rigidity(_) => "rigidity",
            Command::JetIntegrate(_) => "jet-integrate",
            Command::Commutator(_) => "commutator",
            Command::HyperplaneExtend(_) => "hyperplane-extend",
        }
    }
}

fn usage_error(msg: &str) -> ! {
    eprintln!("error: {msg}");
    std::process::exit(2);
}

/// Use the config file when given, otherwise the inline flags.
fn effective<C: Clone + Serialize + DeserializeOwned>(inline: &C, path: &Option<PathBuf>) -> C {
    match path {
        None => inline.clone(),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .unwrap_or_else(|e| usage_error(&format!("cannot read config {}: {e}", p.display())));
            serde_json::from_str(&text)
                .unwrap_or_else(|e| usage_error(&format!("bad config {}: {e}", p.display())))
        }
    }
}

fn print_list() {
    let root = Cli::command();
    let mut entries = Vec::new();
    for sub in root.get_subcommands() {
        let params: Vec<serde_json::Value> = sub
            .get_arguments()
            .filter(|a| !a.is_global_set() && a.get_id() != "help")
            .map(|a| {
                serde_json::json!({
                    "name": format!("--{}", a.get_id()),
                    "required": a.is_required_set(),
                    "default": a.get_default_values().first().map(|v| v.to_string_lossy().to_string()),
                    "help": a.get_help().map(|h| h.to_string()),
                })
            })
            .collect();
        entries.push(serde_json::json!({
            "experiment": sub.get_name(),
            "about": sub.get_about().map(|a| a.to_string()),
            "parameters": params,
        }));
    }
    println!("{}", serde_json::to_string_pretty(&entries).expect("static schema serializes"));
}

fn main() {
    let cli = Cli::parse();
    if cli.list {
        print_list();
        return;
    }
    let Some(command) = cli.command else {
        usage_error("an experiment id is required (see --list)");
    };
    let started = Instant::now();
    let id = command.id();
    let (config_echo, result) = match &command {
        Command::AlgebraCheck(c) => {
            let c = effective(c, &cli.config);
            (serde_json::to_value(&c), experiments::algebra_check(&c))
        }
        Command::Factorization(c) => {
            let c = effective(c, &cli.config);
            (serde_json::to_value(&c), experiments::factorization(&c))
        }
        Command::ProductRule(c) => {
            let c = effective(c, &cli.config);
            (serde_json::to_value(&c), experiments::product_rule(&c))
        }
        Command::EstimateCn(c) => {
            let c = effective(c, &cli.config);
            (serde_json::to_value(&c), experiments::estimate_cn_experiment(&c))
        }
        Command::ApproxNull(c) => {
            let c = effective(c, &cli.config);
            (serde_json::to_value(&c), experiments::approx_null(&c))
        }
        Command::FractalGen(c) => {
            let c = effective(c, &cli.config);
            (serde_json::to_value(&c), experiments::fractal_gen(&c))
        }
        Command::Rigidity(c) => {
            let c = effective(c, &cli.config);
            (serde_json::to_value(&c), experiments::rigidity(&c))
        }
        Command::JetIntegrate(c) => {
            let c = effective(c, &cli.config);
            (serde_json::to_value(&c), experiments::jet_integrate(&c))
        }
        Command::Commutator(c) => {
            let c = effective(c, &cli.config);
            (serde_json::to_value(&c), experiments::commutator(&c))
        }
        Command::HyperplaneExtend(c) => {
            let c = effective(c, &cli.config);
            (serde_json::to_value(&c), experiments::hyperplane_extend(&c))
        }
    };
    let config_echo = config_echo.unwrap_or_else(|e| usage_error(&format!("config echo failed: {e}")));
    let (checks, details, artifacts) = match result {
        Ok(r) => r,
        Err(msg) => usage_error(&msg),
    };
    let report = Report {
        experiment: id.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config_echo,
        checks,
        details,
        artifacts,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match &cli.report {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                usage_error(&format!("cannot write {}: {e}", path.display()));
            }
        }
        None => println!("{text}"),
    }
    std::process::exit(if report.all_pass() { 0 } else { 1 });
}
