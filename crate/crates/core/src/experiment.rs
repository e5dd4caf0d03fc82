//! Parameter sweeps, metric reports and runtime scaling measurements.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{random_assign, topk_assign, Seed};
use crate::ceg::{ceg_assign, SolverConfig};
use crate::error::{Error, Result};
use crate::influence::influence;
use crate::model::{Allocation, Instance};
use crate::oracle::{exact_optimal, verify_allocation, OracleLimits};
use crate::scenario::{derive_seed, gen_synthetic, ScenarioParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ceg,
    Random,
    Topk,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Ceg, Method::Random, Method::Topk, Method::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ceg => "ceg",
            Method::Random => "random",
            Method::Topk => "topk",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown method `{s}`")))
    }
}

/// Runs one method. `seed` only matters for [`Method::Random`]. The oracle
/// returns its witness allocation.
pub fn run_method(
    instance: &Instance,
    method: Method,
    solver: &SolverConfig,
    limits: &OracleLimits,
    seed: Seed,
) -> Result<Allocation> {
    Ok(match method {
        Method::Ceg => ceg_assign(instance, solver),
        Method::Random => random_assign(instance, seed),
        Method::Topk => topk_assign(instance),
        Method::Oracle => exact_optimal(instance, limits)?.witness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    /// Demand–supply ratios, as fractions (0.4 = 40%).
    pub theta_list: Vec<f64>,
    /// (δ, |𝒯|) pairs swept jointly.
    pub delta_tag_pairs: Vec<(f64, usize)>,
    pub lambda_list: Vec<f64>,
    pub methods: Vec<Method>,
    pub repetitions: usize,
    pub seed: u64,
    /// Everything not swept.
    pub base: ScenarioParams,
    pub solver: SolverConfig,
    pub oracle_limits: OracleLimits,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            theta_list: vec![0.4, 0.6, 0.8, 1.0, 1.2],
            delta_tag_pairs: vec![(0.05, 20)],
            lambda_list: vec![100.0],
            methods: vec![Method::Ceg, Method::Random, Method::Topk],
            repetitions: 50,
            seed: 0,
            base: ScenarioParams::default(),
            solver: SolverConfig::default(),
            oracle_limits: OracleLimits::default(),
        }
    }
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: SweepConfig = toml::from_str(text)?;
        config.check()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn check(&self) -> Result<()> {
        if self.theta_list.is_empty()
            || self.delta_tag_pairs.is_empty()
            || self.lambda_list.is_empty()
            || self.methods.is_empty()
        {
            return Err(Error::InvalidParams("sweep lists must be non-empty".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidParams("repetitions must be at least 1".into()));
        }
        self.base.check()
    }

    /// Number of (θ, δ/|𝒯|, λ, repetition) instances.
    pub fn cell_count(&self) -> usize {
        self.theta_list.len() * self.delta_tag_pairs.len() * self.lambda_list.len() * self.repetitions
    }

    fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::with_capacity(self.cell_count());
        for &theta in &self.theta_list {
            for (p, &(delta, tag_count)) in self.delta_tag_pairs.iter().enumerate() {
                for (l, &lambda_m) in self.lambda_list.iter().enumerate() {
                    for rep in 0..self.repetitions {
                        // θ is left out so every θ sees the same cities
                        let stream = ((p * self.lambda_list.len() + l) * self.repetitions + rep) as u64;
                        cells.push(Cell {
                            theta,
                            delta,
                            tag_count,
                            lambda_m,
                            seed: derive_seed(self.seed, stream),
                        });
                    }
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    theta: f64,
    delta: f64,
    tag_count: usize,
    lambda_m: f64,
    seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub method: Method,
    pub theta: f64,
    pub delta: f64,
    pub tag_count: usize,
    pub lambda: f64,
    pub seed: u64,
    pub handled_tags: usize,
    pub utilized_cost: u64,
    pub runtime_ms: f64,
    pub total_influence: f64,
}

impl MetricsRecord {
    fn sort_key(&self, other: &Self) -> std::cmp::Ordering {
        self.theta
            .total_cmp(&other.theta)
            .then(self.delta.total_cmp(&other.delta))
            .then(self.tag_count.cmp(&other.tag_count))
            .then(self.lambda.total_cmp(&other.lambda))
            .then(self.seed.cmp(&other.seed))
            .then(self.method.cmp(&other.method))
    }
}

fn run_cell(config: &SweepConfig, cell: Cell) -> Result<Vec<MetricsRecord>> {
    let params = ScenarioParams {
        theta: cell.theta,
        delta: cell.delta,
        tag_count: cell.tag_count,
        lambda_m: cell.lambda_m,
        seed: cell.seed,
        ..config.base.clone()
    };
    let instance = gen_synthetic(&params)?;
    let mut out = Vec::with_capacity(config.methods.len());
    for &method in &config.methods {
        if method == Method::Oracle && !config.oracle_limits.admits(&instance) {
            log::warn!(
                "skipping oracle for theta {} seed {}: instance exceeds oracle limits",
                cell.theta,
                cell.seed
            );
            continue;
        }
        let method_seed = Seed(derive_seed(cell.seed, 0x5eed));
        let start = Instant::now();
        let allocation = run_method(&instance, method, &config.solver, &config.oracle_limits, method_seed)?;
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;

        let audit = verify_allocation(&instance, &allocation);
        if !audit.is_feasible() {
            let detail = audit
                .violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ");
            return Err(Error::AuditFailed {
                method: method.to_string(),
                theta: cell.theta,
                seed: cell.seed,
                detail,
            });
        }
        out.push(MetricsRecord {
            method,
            theta: cell.theta,
            delta: cell.delta,
            tag_count: cell.tag_count,
            lambda: cell.lambda_m,
            seed: cell.seed,
            handled_tags: allocation.handled_count(),
            utilized_cost: allocation.total_cost,
            runtime_ms,
            total_influence: influence(&instance, allocation.used_slots())?,
        });
    }
    Ok(out)
}

/// Generates every cell's instance, runs each method on it and audits the
/// result. Records come back in canonical order regardless of scheduling.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<MetricsRecord>> {
    config.check()?;
    let per_cell: Vec<Vec<MetricsRecord>> = config
        .cells()
        .into_par_iter()
        .map(|cell| run_cell(config, cell))
        .collect::<Result<_>>()?;
    let mut records: Vec<MetricsRecord> = per_cell.into_iter().flatten().collect();
    records.sort_by(MetricsRecord::sort_key);
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::InvalidParams(format!("unknown report format `{s}`"))),
        }
    }
}

/// Renders records with a fixed column order.
pub fn render_report(records: &[MetricsRecord], format: ReportFormat) -> Result<Vec<u8>> {
    if records.is_empty() {
        return Err(Error::InvalidParams("no records to report".into()));
    }
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in records {
                w.serialize(r)?;
            }
            w.into_inner()
                .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
        }
        ReportFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(records)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

pub fn emit_report(records: &[MetricsRecord], format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, render_report(records, format)?)?;
    Ok(())
}

/// Per-θ means of one method's records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaSummary {
    pub theta: f64,
    pub count: usize,
    pub mean_handled: f64,
    pub mean_cost: f64,
    pub mean_runtime_ms: f64,
}

pub fn summarize(records: &[MetricsRecord], method: Method) -> Vec<ThetaSummary> {
    let mut out: Vec<ThetaSummary> = Vec::new();
    let mut mine: Vec<&MetricsRecord> = records.iter().filter(|r| r.method == method).collect();
    mine.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    for r in mine {
        match out.last_mut() {
            Some(s) if s.theta == r.theta => {
                s.count += 1;
                s.mean_handled += r.handled_tags as f64;
                s.mean_cost += r.utilized_cost as f64;
                s.mean_runtime_ms += r.runtime_ms;
            }
            _ => out.push(ThetaSummary {
                theta: r.theta,
                count: 1,
                mean_handled: r.handled_tags as f64,
                mean_cost: r.utilized_cost as f64,
                mean_runtime_ms: r.runtime_ms,
            }),
        }
    }
    for s in &mut out {
        let n = s.count as f64;
        s.mean_handled /= n;
        s.mean_cost /= n;
        s.mean_runtime_ms /= n;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingAxis {
    /// k, the number of tags.
    Tags,
    /// ℓ, the number of zones.
    Zones,
    /// m, the number of slots (via the billboard count).
    Slots,
    /// t, the number of trajectories.
    Trajectories,
}

impl ScalingAxis {
    pub const ALL: [ScalingAxis; 4] = [
        ScalingAxis::Tags,
        ScalingAxis::Zones,
        ScalingAxis::Slots,
        ScalingAxis::Trajectories,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScalingAxis::Tags => "tags",
            ScalingAxis::Zones => "zones",
            ScalingAxis::Slots => "slots",
            ScalingAxis::Trajectories => "trajectories",
        }
    }

    fn size(self, p: &ScenarioParams) -> usize {
        match self {
            ScalingAxis::Tags => p.tag_count,
            ScalingAxis::Zones => p.zone_count,
            ScalingAxis::Slots => {
                p.billboard_count * p.horizon.slots_per_billboard().unwrap_or(0)
            }
            ScalingAxis::Trajectories => p.trajectory_count,
        }
    }

    fn doubled(self, p: &ScenarioParams) -> ScenarioParams {
        let mut q = p.clone();
        match self {
            ScalingAxis::Tags => q.tag_count *= 2,
            ScalingAxis::Zones => q.zone_count *= 2,
            ScalingAxis::Slots => q.billboard_count *= 2,
            ScalingAxis::Trajectories => q.trajectory_count *= 2,
        }
        q
    }
}

impl FromStr for ScalingAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        let axis = match s.as_str() {
            "k" | "tags" => ScalingAxis::Tags,
            "l" | "zones" => ScalingAxis::Zones,
            "m" | "slots" => ScalingAxis::Slots,
            "t" | "trajectories" => ScalingAxis::Trajectories,
            _ => return Err(Error::InvalidParams(format!("unknown scaling axis `{s}`"))),
        };
        Ok(axis)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub base: ScenarioParams,
    pub axes: Vec<ScalingAxis>,
    pub repetitions: usize,
    pub solver: SolverConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            base: ScenarioParams {
                billboard_count: 100,
                trajectory_count: 2_000,
                ..ScenarioParams::default()
            },
            axes: ScalingAxis::ALL.to_vec(),
            repetitions: 5,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub axis: ScalingAxis,
    pub base_size: usize,
    pub doubled_size: usize,
    pub base_ms: f64,
    pub doubled_ms: f64,
    /// doubled_ms / base_ms.
    pub ratio: f64,
    /// log2 of the ratio: the fitted power of the axis.
    pub exponent: f64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

fn time_ceg(instance: &Instance, solver: &SolverConfig) -> f64 {
    let start = Instant::now();
    let allocation = ceg_assign(instance, solver);
    let ms = start.elapsed().as_secs_f64() * 1e3;
    std::hint::black_box(allocation);
    ms
}

/// Median CEG wall time on the base instance and on one with a single axis
/// doubled. Timings alternate between the two instances to share noise.
pub fn bench_scaling(config: &BenchConfig) -> Result<Vec<ScalingRow>> {
    if config.repetitions == 0 {
        return Err(Error::InvalidParams("repetitions must be at least 1".into()));
    }
    let base = gen_synthetic(&config.base)?;
    let mut rows = Vec::new();
    for &axis in &config.axes {
        let doubled_params = axis.doubled(&config.base);
        let doubled = gen_synthetic(&doubled_params)?;
        time_ceg(&base, &config.solver);
        time_ceg(&doubled, &config.solver);
        let mut base_ms = Vec::new();
        let mut doubled_ms = Vec::new();
        for _ in 0..config.repetitions {
            base_ms.push(time_ceg(&base, &config.solver));
            doubled_ms.push(time_ceg(&doubled, &config.solver));
        }
        let (b, d) = (median(base_ms), median(doubled_ms));
        let ratio = d / b.max(1e-6);
        rows.push(ScalingRow {
            axis,
            base_size: axis.size(&config.base),
            doubled_size: axis.size(&doubled_params),
            base_ms: b,
            doubled_ms: d,
            ratio,
            exponent: ratio.log2(),
        });
    }
    Ok(rows)
}
