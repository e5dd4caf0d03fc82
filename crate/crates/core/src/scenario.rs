//! Instance construction: CSV ingestion, a seeded synthetic city, and the
//! cost, demand and budget models used by the experiments.
//!
//! Every generator is a pure function of its inputs and seed. Sub-seeds for
//! the individual stages come from [`derive_seed`].

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rand::distributions::{Distribution, Uniform};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::Seed;
use crate::error::{Error, Result};
use crate::influence::{probability_matrix_for, singleton_influences, InfluenceKind, InfluenceModel};
use crate::model::{
    validate_instance, Billboard, BillboardId, CostMatrix, DemandMatrix, Horizon, Instance,
    InstanceParts, Interval, LatLon, ProbabilityKey, ProbabilityMatrix, Slot, SlotId, TagId,
    Trajectory, TrajectoryId, TrajectoryPoint, ZoneId, ZoneMap,
};

/// SplitMix64 step over `master ^ stream`: independent seeds per stream.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

mod stream {
    pub const CITY: u64 = 1;
    pub const TRAJECTORIES: u64 = 2;
    pub const COSTS: u64 = 3;
    pub const TAG_ZONES: u64 = 4;
    pub const DEMANDS: u64 = 5;
    pub const BUDGET: u64 = 6;
}

fn uniform(range: (f64, f64)) -> Uniform<f64> {
    Uniform::new_inclusive(range.0, range.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioParams {
    /// Demand–supply ratio σ^𝒯 / σ*.
    pub theta: f64,
    /// Rescale demands so the realized θ hits `theta`.
    pub rescale_to_theta: bool,
    /// Average individual demand ratio.
    pub delta: f64,
    pub tag_count: usize,
    pub lambda_m: f64,
    pub influence_kind: InfluenceKind,
    pub temporal_gating: bool,
    pub omega_range: (f64, f64),
    pub beta_range: (f64, f64),
    pub alpha_range: (f64, f64),
    pub zone_count: usize,
    pub billboard_count: usize,
    pub trajectory_count: usize,
    pub points_per_trajectory: usize,
    pub walk_step_m: f64,
    /// Center and side length of the square synthetic city.
    pub center: LatLon,
    pub region_m: f64,
    pub horizon: Horizon,
    pub seed: u64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            theta: 1.0,
            rescale_to_theta: true,
            delta: 0.05,
            tag_count: 20,
            lambda_m: 100.0,
            influence_kind: InfluenceKind::Indicator,
            temporal_gating: false,
            omega_range: (0.8, 1.2),
            beta_range: (0.8, 1.1),
            alpha_range: (0.9, 1.1),
            zone_count: 3,
            billboard_count: 50,
            trajectory_count: 500,
            points_per_trajectory: 20,
            walk_step_m: 100.0,
            center: LatLon::new(40.75, -73.98),
            region_m: 2_500.0,
            horizon: Horizon::new(0, 4, 1),
            seed: 0,
        }
    }
}

impl ScenarioParams {
    pub fn model(&self) -> InfluenceModel {
        InfluenceModel {
            kind: self.influence_kind,
            lambda_m: self.lambda_m,
            temporal_gating: self.temporal_gating,
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        let ordered = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && 0.0 <= r.0 && r.0 <= r.1;
        if !(self.theta > 0.0 && self.delta > 0.0) {
            return bad("theta and delta must be positive");
        }
        if !(ordered(self.omega_range) && ordered(self.beta_range) && ordered(self.alpha_range)) {
            return bad("omega, beta and alpha ranges must be ordered and non-negative");
        }
        if self.zone_count == 0 || self.tag_count == 0 {
            return bad("need at least one zone and one tag");
        }
        if !self.model().is_valid() {
            return bad("lambda must be positive");
        }
        if !(self.region_m > 0.0 && self.walk_step_m >= 0.0) || self.points_per_trajectory == 0 {
            return bad("region, walk step and points per trajectory must be positive");
        }
        if self.horizon.slots_per_billboard().is_none() {
            return bad("horizon must divide into whole slots");
        }
        Ok(())
    }
}

/// Supply side of the market: σ* and its split over zones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupplySummary {
    /// Σ over all slots of the slot's own influence.
    pub sigma_star: f64,
    /// Global demand σ^𝒯 = Σ_i σ_i (zero before demands exist).
    pub sigma_t: f64,
    pub per_zone: Vec<f64>,
}

impl SupplySummary {
    pub fn of(instance: &Instance) -> Self {
        let singles = singleton_influences(instance);
        let mut per_zone = vec![0.0; instance.zone_count()];
        for (i, s) in singles.iter().enumerate() {
            if let Some(z) = instance.slot_zone(SlotId::from(i)) {
                per_zone[z.index()] += s;
            }
        }
        SupplySummary {
            sigma_star: singles.iter().sum(),
            sigma_t: instance.demand().total(),
            per_zone,
        }
    }

    /// Realized demand–supply ratio.
    pub fn theta(&self) -> f64 {
        self.sigma_t / self.sigma_star
    }
}

// ---------------------------------------------------------------------------
// ingestion

fn check_header(path: &Path, reader: &mut csv::Reader<fs::File>, expected: &[&str]) -> Result<()> {
    let found = reader.headers()?.clone();
    if found.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::BadHeader {
            path: path.to_path_buf(),
            expected: expected.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    Ok(())
}

fn field<T: std::str::FromStr>(
    path: &Path,
    record: &csv::StringRecord,
    i: usize,
    name: &str,
) -> Result<T> {
    let line = record.position().map_or(0, |p| p.line());
    let raw = record.get(i).ok_or_else(|| Error::Row {
        path: path.to_path_buf(),
        line,
        message: format!("missing `{name}`"),
    })?;
    raw.trim().parse().map_err(|_| Error::Row {
        path: path.to_path_buf(),
        line,
        message: format!("cannot parse `{name}` from {raw:?}"),
    })
}

fn row_error(path: &Path, record: &csv::StringRecord, message: String) -> Error {
    Error::Row {
        path: path.to_path_buf(),
        line: record.position().map_or(0, |p| p.line()),
        message,
    }
}

/// Reads an `id,lat,lon` billboard inventory and places each billboard in
/// the zone containing it. Billboards get dense ids in file order; the file's
/// id is kept as `external_id`.
pub fn ingest_billboards(path: impl AsRef<Path>, zones: &ZoneMap) -> Result<Vec<Billboard>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    check_header(path, &mut reader, &["id", "lat", "lon"])?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let external_id: u64 = field(path, &record, 0, "id")?;
        let location = LatLon::new(
            field(path, &record, 1, "lat")?,
            field(path, &record, 2, "lon")?,
        );
        if !location.is_valid() {
            return Err(row_error(
                path,
                &record,
                format!("coordinates ({}, {}) out of range", location.lat, location.lon),
            ));
        }
        if !seen.insert(external_id) {
            return Err(row_error(path, &record, format!("duplicate id {external_id}")));
        }
        let zone = zones
            .locate(location)
            .ok_or_else(|| row_error(path, &record, "billboard lies outside every zone".into()))?;
        out.push(Billboard {
            id: BillboardId::from(out.len()),
            external_id,
            location,
            zone,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Grouping {
    #[default]
    ByUser,
    ByUserDay,
}

/// Reads `user_id,timestamp,lat,lon` check-ins (timestamps in epoch seconds)
/// and groups them into time-sorted trajectories. Ticks are
/// `timestamp / tick_seconds`, rounded down.
pub fn ingest_checkins(
    path: impl AsRef<Path>,
    grouping: Grouping,
    tick_seconds: i64,
) -> Result<Vec<Trajectory>> {
    let path = path.as_ref();
    if tick_seconds <= 0 {
        return Err(Error::InvalidParams("tick length must be positive".into()));
    }
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    check_header(path, &mut reader, &["user_id", "timestamp", "lat", "lon"])?;
    let mut groups: BTreeMap<(String, i64), Vec<(i64, LatLon)>> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let user: String = field(path, &record, 0, "user_id")?;
        let timestamp: i64 = field(path, &record, 1, "timestamp")?;
        let location = LatLon::new(
            field(path, &record, 2, "lat")?,
            field(path, &record, 3, "lon")?,
        );
        if !location.is_valid() {
            return Err(row_error(
                path,
                &record,
                format!("coordinates ({}, {}) out of range", location.lat, location.lon),
            ));
        }
        let day = match grouping {
            Grouping::ByUser => 0,
            Grouping::ByUserDay => timestamp.div_euclid(86_400),
        };
        groups.entry((user, day)).or_default().push((timestamp, location));
    }
    Ok(groups
        .into_values()
        .enumerate()
        .map(|(i, mut pts)| {
            pts.sort_by_key(|&(ts, _)| ts);
            Trajectory {
                id: TrajectoryId::from(i),
                points: pts
                    .into_iter()
                    .map(|(ts, location)| TrajectoryPoint {
                        location,
                        tick: ts.div_euclid(tick_seconds),
                    })
                    .collect(),
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// generators

/// Cuts every billboard's horizon into consecutive slots. Slots of one
/// billboard get consecutive ids.
pub fn enumerate_slots(billboards: &[Billboard], horizon: Horizon) -> Result<Vec<Slot>> {
    let per = horizon
        .slots_per_billboard()
        .ok_or(Error::HorizonNotDivisible {
            start: horizon.start,
            end: horizon.end,
            slot_len: horizon.slot_len,
        })?;
    let mut slots = Vec::with_capacity(per * billboards.len());
    for b in billboards {
        for i in 0..per as i64 {
            let start = horizon.start + i * horizon.slot_len;
            slots.push(Slot {
                id: SlotId::from(slots.len()),
                billboard: b.id,
                interval: Interval::new(start, start + horizon.slot_len),
            });
        }
    }
    Ok(slots)
}

/// `Cost(bs) = ⌊β · I(bs) / 10⌋` with one β per slot, shared by all tags.
pub fn gen_costs(
    slot_influence: &[f64],
    tag_count: usize,
    beta_range: (f64, f64),
    seed: Seed,
) -> CostMatrix {
    let mut rng = seed.rng();
    let beta = uniform(beta_range);
    let costs: Vec<u64> = slot_influence
        .iter()
        .map(|&inf| (beta.sample(&mut rng) * inf / 10.0).floor().max(0.0) as u64)
        .collect();
    CostMatrix::uniform_per_slot(&costs, tag_count)
}

/// Draws each tag's demanded zones: a uniform-size, uniformly chosen subset of
/// the zones that have any supply.
pub fn draw_tag_zones(tag_count: usize, supply: &SupplySummary, seed: Seed) -> Vec<Vec<ZoneId>> {
    let mut rng = seed.rng();
    let live: Vec<ZoneId> = supply
        .per_zone
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0.0)
        .map(|(z, _)| ZoneId::from(z))
        .collect();
    (0..tag_count)
        .map(|_| {
            if live.is_empty() {
                return Vec::new();
            }
            let size = rng.gen_range(1..=live.len());
            let mut zones: Vec<ZoneId> = live.choose_multiple(&mut rng, size).copied().collect();
            zones.sort();
            zones
        })
        .collect()
}

/// Splits `total` over `weights` in integers, largest remainder first.
fn split_integer(total: u64, weights: &[f64]) -> Vec<u64> {
    let sum: f64 = weights.iter().sum();
    if total == 0 || sum <= 0.0 {
        return vec![0; weights.len()];
    }
    let exact: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut parts: Vec<u64> = exact.iter().map(|x| x.floor() as u64).collect();
    let assigned: u64 = parts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(total.saturating_sub(assigned) as usize) {
        parts[i] += 1;
    }
    parts
}

/// Per-tag demand `σ_i = ⌊ω_i · σ* · δ⌋`, optionally rescaled so that
/// `Σ σ_i = ⌊θ σ*⌋` up to one unit per tag, then split over the tag's zones
/// in proportion to their supply.
pub fn gen_demands(
    params: &ScenarioParams,
    supply: &SupplySummary,
    tag_zones: &[Vec<ZoneId>],
    seed: Seed,
) -> DemandMatrix {
    let mut rng = seed.rng();
    let omega = uniform(params.omega_range);
    let zones = supply.per_zone.len();
    let raw: Vec<u64> = tag_zones
        .iter()
        .map(|_| (omega.sample(&mut rng) * supply.sigma_star * params.delta).floor() as u64)
        .collect();
    let raw_total: u64 = raw.iter().sum();
    let totals: Vec<u64> = if params.rescale_to_theta && raw_total > 0 {
        let scale = params.theta * supply.sigma_star / raw_total as f64;
        raw.iter().map(|&r| (r as f64 * scale).floor() as u64).collect()
    } else {
        raw
    };

    let mut demand = DemandMatrix::zeros(tag_zones.len(), zones);
    for (t, (zs, &total)) in tag_zones.iter().zip(&totals).enumerate() {
        let weights: Vec<f64> = zs.iter().map(|z| supply.per_zone[z.index()]).collect();
        for (z, part) in zs.iter().zip(split_integer(total, &weights)) {
            demand.set(TagId::from(t), *z, part as f64);
        }
    }
    demand
}

/// `ℬ = Σ_i ⌊α_i · σ_i⌋`.
pub fn gen_budget(demand: &DemandMatrix, alpha_range: (f64, f64), seed: Seed) -> u64 {
    let mut rng = seed.rng();
    let alpha = uniform(alpha_range);
    (0..demand.tag_count())
        .map(|t| (alpha.sample(&mut rng) * demand.tag_total(TagId::from(t))).floor() as u64)
        .sum()
}

/// Raw geography an instance is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct City {
    pub zones: ZoneMap,
    pub billboards: Vec<Billboard>,
    pub trajectories: Vec<Trajectory>,
}

fn offset(center: LatLon, north_m: f64, east_m: f64) -> LatLon {
    const M_PER_DEG: f64 = 111_194.926_644_558_74;
    LatLon::new(
        center.lat + north_m / M_PER_DEG,
        center.lon + east_m / (M_PER_DEG * center.lat.to_radians().cos()),
    )
}

/// Square city cut into `zone_count` vertical strips, billboards spread
/// round-robin over the zones, trajectories as bounded random walks.
pub fn gen_city(params: &ScenarioParams) -> City {
    let half = params.region_m / 2.0;
    let sw = offset(params.center, -half, -half);
    let ne = offset(params.center, half, half);
    let zones = ZoneMap::grid((sw.lat, ne.lat), (sw.lon, ne.lon), 1, params.zone_count);

    let mut rng = Seed(derive_seed(params.seed, stream::CITY)).rng();
    let billboards = (0..params.billboard_count)
        .map(|i| {
            let zone = zones.zones[i % zones.len()];
            // keep clear of the box edges so containment is unambiguous
            let pad_lat = (zone.lat_max - zone.lat_min) * 1e-6;
            let pad_lon = (zone.lon_max - zone.lon_min) * 1e-6;
            let location = LatLon::new(
                rng.gen_range(zone.lat_min + pad_lat..zone.lat_max - pad_lat),
                rng.gen_range(zone.lon_min + pad_lon..zone.lon_max - pad_lon),
            );
            Billboard {
                id: BillboardId::from(i),
                external_id: i as u64,
                location,
                zone: zone.id,
            }
        })
        .collect();

    let mut rng = Seed(derive_seed(params.seed, stream::TRAJECTORIES)).rng();
    let h = params.horizon;
    let trajectories = (0..params.trajectory_count)
        .map(|j| {
            let mut north = rng.gen_range(-half..half);
            let mut east = rng.gen_range(-half..half);
            let mut ticks: Vec<i64> = (0..params.points_per_trajectory)
                .map(|_| rng.gen_range(h.start..h.end))
                .collect();
            ticks.sort_unstable();
            let points = ticks
                .into_iter()
                .map(|tick| {
                    let pt = TrajectoryPoint {
                        location: offset(params.center, north, east),
                        tick,
                    };
                    let heading = rng.gen_range(0.0..std::f64::consts::TAU);
                    north = (north + params.walk_step_m * heading.cos()).clamp(-half, half);
                    east = (east + params.walk_step_m * heading.sin()).clamp(-half, half);
                    pt
                })
                .collect();
            Trajectory {
                id: TrajectoryId::from(j),
                points,
            }
        })
        .collect();

    City {
        zones,
        billboards,
        trajectories,
    }
}

/// Runs the full pipeline on a city: slots, probabilities, costs, demands,
/// budget. Fails if the result does not validate.
pub fn instantiate(city: City, params: &ScenarioParams) -> Result<Instance> {
    params.check()?;
    let model = params.model();
    let slots = enumerate_slots(&city.billboards, params.horizon)?;
    let probabilities = probability_matrix_for(&city.billboards, &slots, &city.trajectories, &model);
    let k = params.tag_count;
    let mut parts = InstanceParts {
        cost: CostMatrix::zeros(slots.len(), k),
        billboards: city.billboards,
        horizon: params.horizon,
        slots,
        trajectories: city.trajectories,
        probabilities,
        zones: city.zones,
        tags: (0..k).map(TagId::from).collect(),
        demand: DemandMatrix::zeros(k, params.zone_count),
        budget: 0,
    };
    let draft = Instance::from_parts(parts.clone());
    let singles = singleton_influences(&draft);
    let supply = SupplySummary::of(&draft);
    if supply.sigma_star <= 0.0 {
        return Err(Error::InvalidInstance("no slot reaches any trajectory".into()));
    }
    let seed = params.seed;
    parts.cost = gen_costs(&singles, k, params.beta_range, Seed(derive_seed(seed, stream::COSTS)));
    let tag_zones = draw_tag_zones(k, &supply, Seed(derive_seed(seed, stream::TAG_ZONES)));
    parts.demand = gen_demands(params, &supply, &tag_zones, Seed(derive_seed(seed, stream::DEMANDS)));
    parts.budget = gen_budget(&parts.demand, params.alpha_range, Seed(derive_seed(seed, stream::BUDGET)));

    let instance = Instance::from_parts(parts);
    let report = validate_instance(&instance);
    if let Some(v) = report.first() {
        return Err(Error::InvalidInstance(format!(
            "{v} ({} violation(s))",
            report.len()
        )));
    }
    Ok(instance)
}

/// Seeded synthetic instance.
pub fn gen_synthetic(params: &ScenarioParams) -> Result<Instance> {
    params.check()?;
    instantiate(gen_city(params), params)
}

/// Shape of a [`gen_compact`] instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompactParams {
    pub billboards: usize,
    pub slots_per_billboard: usize,
    pub zones: usize,
    pub tags: usize,
    pub trajectories: usize,
    /// Chance that a billboard reaches a given trajectory.
    pub density: f64,
    /// Draw probabilities in (0, 1] instead of fixing them at 1.
    pub fractional: bool,
    /// Let each tag pay its own price per slot.
    pub per_tag_costs: bool,
    pub max_cost: u64,
    pub seed: u64,
}

impl Default for CompactParams {
    fn default() -> Self {
        CompactParams {
            billboards: 6,
            slots_per_billboard: 2,
            zones: 2,
            tags: 3,
            trajectories: 12,
            density: 0.3,
            fractional: true,
            per_tag_costs: false,
            max_cost: 6,
            seed: 0,
        }
    }
}

/// Small random instance defined directly by its probability and cost
/// matrices, skipping geography. Demands are a random fraction of what each
/// zone could supply; the budget covers a random share of the demand.
pub fn gen_compact(p: &CompactParams) -> Instance {
    let mut rng = Seed(p.seed).rng();
    let zones = ZoneMap::grid((0.0, 1.0), (0.0, p.zones as f64), 1, p.zones);
    let billboards: Vec<Billboard> = (0..p.billboards)
        .map(|i| {
            let z = if i < p.zones { i } else { rng.gen_range(0..p.zones) };
            Billboard {
                id: BillboardId::from(i),
                external_id: i as u64,
                location: LatLon::new(0.5, z as f64 + 0.5),
                zone: ZoneId::from(z),
            }
        })
        .collect();
    let horizon = Horizon::new(0, p.slots_per_billboard as i64, 1);
    let slots = enumerate_slots(&billboards, horizon).expect("unit slots always divide");
    let trajectories: Vec<Trajectory> = (0..p.trajectories)
        .map(|j| Trajectory {
            id: TrajectoryId::from(j),
            points: vec![TrajectoryPoint {
                location: LatLon::new(0.5, 0.5),
                tick: 0,
            }],
        })
        .collect();
    let mut probabilities = ProbabilityMatrix::new(ProbabilityKey::Billboard);
    for b in 0..p.billboards {
        for t in 0..p.trajectories {
            if rng.gen_bool(p.density) {
                let pr = if p.fractional { rng.gen_range(0.05..=1.0) } else { 1.0 };
                probabilities.set(b as u32, TrajectoryId::from(t), pr);
            }
        }
    }
    let mut cost = CostMatrix::zeros(slots.len(), p.tags);
    let shared: Vec<u64> = (0..slots.len()).map(|_| rng.gen_range(0..=p.max_cost)).collect();
    for s in 0..slots.len() {
        for t in 0..p.tags {
            let c = if p.per_tag_costs { rng.gen_range(0..=p.max_cost) } else { shared[s] };
            cost.set(SlotId::from(s), TagId::from(t), c);
        }
    }
    let mut parts = InstanceParts {
        billboards,
        horizon,
        slots,
        trajectories,
        probabilities,
        zones,
        tags: (0..p.tags).map(TagId::from).collect(),
        demand: DemandMatrix::zeros(p.tags, p.zones),
        cost,
        budget: 0,
    };
    let draft = Instance::from_parts(parts.clone());
    let zone_max: Vec<f64> = (0..p.zones)
        .map(|z| {
            crate::influence::influence(&draft, draft.zone_slots(ZoneId::from(z)).iter().copied())
                .expect("zone slots exist")
        })
        .collect();
    let mut demand = DemandMatrix::zeros(p.tags, p.zones);
    for t in 0..p.tags {
        let tag = TagId::from(t);
        let first = rng.gen_range(0..p.zones);
        for (z, &max) in zone_max.iter().enumerate() {
            if z == first || rng.gen_bool(0.35) {
                let d = if max > 0.0 { max * rng.gen_range(0.1..0.9) } else { 1.0 };
                demand.set(tag, ZoneId::from(z), d);
            }
        }
    }
    let avg_cost = p.max_cost as f64 / 2.0;
    parts.budget = (rng.gen_range(0.5..3.0) * avg_cost * p.tags as f64).round() as u64;
    parts.demand = demand;
    Instance::from_parts(parts)
}

/// Instance given directly by its matrices, one single-slot billboard per row
/// of `probabilities`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MatrixSpec {
    /// Zone of each billboard.
    pub zone_of: Vec<u32>,
    /// Pr per billboard (rows) and trajectory (columns).
    pub probabilities: Vec<Vec<f64>>,
    /// Cost per slot (rows) and tag (columns).
    pub costs: Vec<Vec<u64>>,
    /// Demand per tag (rows) and zone (columns).
    pub demand: Vec<Vec<f64>>,
    pub budget: u64,
}

pub fn matrix_instance(spec: &MatrixSpec) -> Instance {
    let zone_count = spec
        .zone_of
        .iter()
        .map(|&z| z as usize + 1)
        .chain(spec.demand.iter().map(Vec::len))
        .max()
        .unwrap_or(1);
    let zones = ZoneMap::grid((0.0, 1.0), (0.0, zone_count as f64), 1, zone_count);
    let billboards: Vec<Billboard> = spec
        .zone_of
        .iter()
        .enumerate()
        .map(|(i, &z)| Billboard {
            id: BillboardId::from(i),
            external_id: i as u64,
            location: LatLon::new(0.5, z as f64 + 0.5),
            zone: ZoneId(z),
        })
        .collect();
    let horizon = Horizon::new(0, 1, 1);
    let slots = enumerate_slots(&billboards, horizon).expect("unit horizon divides");
    let n_traj = spec.probabilities.iter().map(Vec::len).max().unwrap_or(0);
    let trajectories = (0..n_traj)
        .map(|j| Trajectory {
            id: TrajectoryId::from(j),
            points: vec![TrajectoryPoint {
                location: LatLon::new(0.5, 0.5),
                tick: 0,
            }],
        })
        .collect();
    let mut probabilities = ProbabilityMatrix::new(ProbabilityKey::Billboard);
    for (b, row) in spec.probabilities.iter().enumerate() {
        for (t, &p) in row.iter().enumerate() {
            probabilities.set(b as u32, TrajectoryId::from(t), p);
        }
    }
    let tags = spec.demand.len();
    let mut cost = CostMatrix::zeros(slots.len(), tags);
    for (s, row) in spec.costs.iter().enumerate().take(slots.len()) {
        for (t, &c) in row.iter().enumerate().take(tags) {
            cost.set(SlotId::from(s), TagId::from(t), c);
        }
    }
    let mut demand = DemandMatrix::zeros(tags, zone_count);
    for (t, row) in spec.demand.iter().enumerate() {
        for (z, &d) in row.iter().enumerate() {
            demand.set(TagId::from(t), ZoneId::from(z), d);
        }
    }
    Instance::from_parts(InstanceParts {
        billboards,
        horizon,
        slots,
        trajectories,
        probabilities,
        zones,
        tags: (0..tags).map(TagId::from).collect(),
        demand,
        cost,
        budget: spec.budget,
    })
}

// ---------------------------------------------------------------------------
// snapshots

pub const SNAPSHOT_FORMAT: &str = "msta-instance";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Snapshot<T> {
    format: String,
    version: u32,
    instance: T,
}

pub fn snapshot_to_string(instance: &Instance) -> Result<String> {
    let snap = Snapshot {
        format: SNAPSHOT_FORMAT.to_string(),
        version: SNAPSHOT_VERSION,
        instance: instance.parts(),
    };
    let mut s = serde_json::to_string_pretty(&snap)?;
    s.push('\n');
    Ok(s)
}

pub fn snapshot_from_str(s: &str) -> Result<Instance> {
    let snap: Snapshot<InstanceParts> = serde_json::from_str(s)?;
    if snap.format != SNAPSHOT_FORMAT || snap.version != SNAPSHOT_VERSION {
        return Err(Error::SnapshotVersion {
            format: snap.format,
            version: snap.version,
        });
    }
    Ok(Instance::from_parts(snap.instance))
}

pub fn save_snapshot(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, snapshot_to_string(instance)?)?;
    Ok(())
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<Instance> {
    snapshot_from_str(&fs::read_to_string(path)?)
}
