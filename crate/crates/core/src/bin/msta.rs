//! Command-line front end: generate, solve, verify, sweep and bench.
//!
//! Exit codes: 0 success, 1 audit failure, 2 usage or input error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use msta::experiment::{
    bench_scaling, emit_report, render_report, run_method, run_sweep, summarize, BenchConfig,
    Method, ReportFormat, ScalingAxis, SweepConfig,
};
use msta::scenario::{gen_synthetic, load_snapshot, save_snapshot, ScenarioParams};
use msta::{verify_allocation, Allocation, Error, InnerSolver, OracleLimits, Seed, SolverConfig};

#[derive(Parser)]
#[command(name = "msta", version, about = "Multi-slot tag assignment for billboard slots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ceg,
    Random,
    Topk,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum InnerArg {
    GreedyDensity,
    ExactSmall,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    K,
    L,
    M,
    T,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance snapshot.
    Generate {
        /// TOML file of scenario parameters; defaults apply to missing keys.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a snapshot and print the allocation as JSON.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "ceg")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "greedy-density")]
        inner_solver: InnerArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the allocation here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit an allocation against an instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        allocation: PathBuf,
    },
    /// Run a parameter sweep and write per-run metrics.
    Sweep {
        /// TOML sweep configuration; defaults apply to missing keys.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Time CEG while doubling one problem dimension at a time.
    Bench {
        /// Axes to double; all four when omitted.
        #[arg(long, value_enum)]
        scaling_axis: Vec<AxisArg>,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
    },
}

enum Outcome {
    Ok,
    AuditFailed,
}

fn read_toml<T: serde::de::DeserializeOwned>(path: &PathBuf) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Generate {
            params,
            seed,
            theta,
            out,
        } => {
            let mut p: ScenarioParams = match &params {
                Some(path) => read_toml(path)?,
                None => ScenarioParams::default(),
            };
            if let Some(s) = seed {
                p.seed = s;
            }
            if let Some(t) = theta {
                p.theta = t;
            }
            let instance = gen_synthetic(&p)?;
            save_snapshot(&instance, &out)?;
            eprintln!(
                "wrote {} ({} slots, {} tags, budget {})",
                out.display(),
                instance.slot_count(),
                instance.tag_count(),
                instance.budget()
            );
        }
        Command::Solve {
            instance,
            method,
            inner_solver,
            seed,
            out,
        } => {
            let instance = load_snapshot(&instance)?;
            let method = match method {
                MethodArg::Ceg => Method::Ceg,
                MethodArg::Random => Method::Random,
                MethodArg::Topk => Method::Topk,
                MethodArg::Oracle => Method::Oracle,
            };
            let solver = SolverConfig {
                inner_solver: match inner_solver {
                    InnerArg::GreedyDensity => InnerSolver::GreedyDensity,
                    InnerArg::ExactSmall => InnerSolver::ExactSmall,
                },
                ..SolverConfig::default()
            };
            let allocation =
                run_method(&instance, method, &solver, &OracleLimits::default(), Seed(seed))?;
            let json = serde_json::to_string_pretty(&allocation)? + "\n";
            match out {
                Some(path) => fs::write(path, json)?,
                None => print!("{json}"),
            }
            eprintln!(
                "{method}: {} of {} tags handled, cost {} of {}",
                allocation.handled_count(),
                instance.tag_count(),
                allocation.total_cost,
                instance.budget()
            );
            if !verify_allocation(&instance, &allocation).is_feasible() {
                return Ok(Outcome::AuditFailed);
            }
        }
        Command::Verify {
            instance,
            allocation,
        } => {
            let instance = load_snapshot(&instance)?;
            let text = fs::read_to_string(&allocation)
                .with_context(|| format!("reading {}", allocation.display()))?;
            let allocation: Allocation = serde_json::from_str(&text)?;
            let report = verify_allocation(&instance, &allocation);
            for v in &report.violations {
                println!("{v}");
            }
            println!("aggregate slack: {}", report.aggregate_slack);
            if !report.is_feasible() {
                return Ok(Outcome::AuditFailed);
            }
            println!("feasible");
        }
        Command::Sweep {
            config,
            out,
            format,
        } => {
            let config = match &config {
                Some(path) => SweepConfig::load(path)?,
                None => SweepConfig::default(),
            };
            let format = match format {
                FormatArg::Csv => ReportFormat::Csv,
                FormatArg::Json => ReportFormat::Json,
            };
            let records = match run_sweep(&config) {
                Ok(r) => r,
                Err(e @ Error::AuditFailed { .. }) => {
                    eprintln!("{e}");
                    return Ok(Outcome::AuditFailed);
                }
                Err(e) => return Err(e.into()),
            };
            for &method in &config.methods {
                for s in summarize(&records, method) {
                    eprintln!(
                        "{method:>6} theta {:.2}: handled {:.2}, cost {:.1}, {:.2} ms",
                        s.theta, s.mean_handled, s.mean_cost, s.mean_runtime_ms
                    );
                }
            }
            match out {
                Some(path) => emit_report(&records, format, path)?,
                None => print!("{}", String::from_utf8(render_report(&records, format)?)?),
            }
        }
        Command::Bench {
            scaling_axis,
            repetitions,
        } => {
            let mut config = BenchConfig {
                repetitions,
                ..BenchConfig::default()
            };
            if !scaling_axis.is_empty() {
                config.axes = scaling_axis
                    .into_iter()
                    .map(|a| match a {
                        AxisArg::K => ScalingAxis::Tags,
                        AxisArg::L => ScalingAxis::Zones,
                        AxisArg::M => ScalingAxis::Slots,
                        AxisArg::T => ScalingAxis::Trajectories,
                    })
                    .collect();
            }
            println!("axis,base_size,doubled_size,base_ms,doubled_ms,ratio,exponent");
            for r in bench_scaling(&config)? {
                println!(
                    "{},{},{},{:.3},{:.3},{:.3},{:.3}",
                    r.axis.name(),
                    r.base_size,
                    r.doubled_size,
                    r.base_ms,
                    r.doubled_ms,
                    r.ratio,
                    r.exponent
                );
            }
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::AuditFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
