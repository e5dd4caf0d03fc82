//! Domain types for the multi-slot tag assignment problem.
//!
//! Every entity is addressed by a dense positional id: billboard `i` lives at
//! `billboards[i]`, slot `i` at `slots[i]`, and so on. [`validate_instance`]
//! reports any instance that breaks this convention.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! dense_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl From<usize> for $name {
            fn from(i: usize) -> Self {
                $name(i as u32)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }
    };
}

dense_id!(BillboardId);
dense_id!(SlotId);
dense_id!(TrajectoryId);
dense_id!(TagId);
dense_id!(ZoneId);

/// A point on the sphere, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

impl LatLon {
    pub fn new(lat: f64, lon: f64) -> Self {
        LatLon { lat, lon }
    }

    pub fn is_valid(&self) -> bool {
        (-90.0..=90.0).contains(&self.lat) && (-180.0..=180.0).contains(&self.lon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Billboard {
    pub id: BillboardId,
    /// Identifier from the source inventory, if it came from one.
    pub external_id: u64,
    pub location: LatLon,
    pub zone: ZoneId,
}

/// A half-open interval of ticks `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub start: i64,
    pub end: i64,
}

impl Interval {
    pub fn new(start: i64, end: i64) -> Self {
        Interval { start, end }
    }

    pub fn len(&self) -> i64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, tick: i64) -> bool {
        self.start <= tick && tick < self.end
    }
}

/// The operating horizon `[T1, T2]` cut into slots of `slot_len` ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Horizon {
    pub start: i64,
    pub end: i64,
    pub slot_len: i64,
}

impl Horizon {
    pub fn new(start: i64, end: i64, slot_len: i64) -> Self {
        Horizon {
            start,
            end,
            slot_len,
        }
    }

    /// Slots per billboard, if the horizon divides evenly.
    pub fn slots_per_billboard(&self) -> Option<usize> {
        let span = self.end - self.start;
        if self.slot_len <= 0 || span <= 0 || span % self.slot_len != 0 {
            None
        } else {
            Some((span / self.slot_len) as usize)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub id: SlotId,
    pub billboard: BillboardId,
    pub interval: Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub location: LatLon,
    pub tick: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub id: TrajectoryId,
    pub points: Vec<TrajectoryPoint>,
}

/// What the first coordinate of a [`ProbabilityMatrix`] entry refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbabilityKey {
    /// `Pr(b, t)`: every slot inherits its billboard's row.
    Billboard,
    /// Per-slot rows, used when influence is gated by the slot's time window.
    Slot,
}

/// Sparse influence probabilities. Absent entries are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ProbabilityMatrixRepr", from = "ProbabilityMatrixRepr")]
pub struct ProbabilityMatrix {
    key: ProbabilityKey,
    entries: BTreeMap<(u32, TrajectoryId), f64>,
}

#[derive(Serialize, Deserialize)]
struct ProbabilityMatrixRepr {
    key: ProbabilityKey,
    entries: Vec<(u32, TrajectoryId, f64)>,
}

impl From<ProbabilityMatrix> for ProbabilityMatrixRepr {
    fn from(m: ProbabilityMatrix) -> Self {
        ProbabilityMatrixRepr {
            key: m.key,
            entries: m.entries.into_iter().map(|((s, t), p)| (s, t, p)).collect(),
        }
    }
}

impl From<ProbabilityMatrixRepr> for ProbabilityMatrix {
    fn from(r: ProbabilityMatrixRepr) -> Self {
        ProbabilityMatrix {
            key: r.key,
            entries: r.entries.into_iter().map(|(s, t, p)| ((s, t), p)).collect(),
        }
    }
}

impl ProbabilityMatrix {
    pub fn new(key: ProbabilityKey) -> Self {
        ProbabilityMatrix {
            key,
            entries: BTreeMap::new(),
        }
    }

    pub fn key(&self) -> ProbabilityKey {
        self.key
    }

    /// Stores `p` for `(source, trajectory)`. Zero removes the entry.
    pub fn set(&mut self, source: u32, trajectory: TrajectoryId, p: f64) {
        if p == 0.0 {
            self.entries.remove(&(source, trajectory));
        } else {
            self.entries.insert((source, trajectory), p);
        }
    }

    pub fn get(&self, source: u32, trajectory: TrajectoryId) -> f64 {
        self.entries
            .get(&(source, trajectory))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, TrajectoryId, f64)> + '_ {
        self.entries.iter().map(|(&(s, t), &p)| (s, t, p))
    }
}

/// Axis-aligned box, half-open on the upper edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneBox {
    pub id: ZoneId,
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
}

impl ZoneBox {
    pub fn contains(&self, p: LatLon) -> bool {
        self.lat_min <= p.lat && p.lat < self.lat_max && self.lon_min <= p.lon && p.lon < self.lon_max
    }

    fn overlaps(&self, other: &ZoneBox) -> bool {
        self.lat_min < other.lat_max
            && other.lat_min < self.lat_max
            && self.lon_min < other.lon_max
            && other.lon_min < self.lon_max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneMap {
    pub zones: Vec<ZoneBox>,
}

impl ZoneMap {
    pub fn new(zones: Vec<ZoneBox>) -> Self {
        ZoneMap { zones }
    }

    /// `rows × cols` grid of equal boxes over the given bounds, ids row-major.
    pub fn grid(lat: (f64, f64), lon: (f64, f64), rows: usize, cols: usize) -> Self {
        let dlat = (lat.1 - lat.0) / rows as f64;
        let dlon = (lon.1 - lon.0) / cols as f64;
        let mut zones = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                zones.push(ZoneBox {
                    id: ZoneId::from(zones.len()),
                    lat_min: lat.0 + dlat * r as f64,
                    lat_max: if r + 1 == rows { lat.1 } else { lat.0 + dlat * (r + 1) as f64 },
                    lon_min: lon.0 + dlon * c as f64,
                    lon_max: if c + 1 == cols { lon.1 } else { lon.0 + dlon * (c + 1) as f64 },
                });
            }
        }
        ZoneMap { zones }
    }

    pub fn len(&self) -> usize {
        self.zones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    pub fn locate(&self, p: LatLon) -> Option<ZoneId> {
        self.zones.iter().find(|z| z.contains(p)).map(|z| z.id)
    }
}

/// Per-tag, per-zone influence demands, `tags × zones`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandMatrix {
    tags: usize,
    zones: usize,
    values: Vec<f64>,
}

impl DemandMatrix {
    pub fn zeros(tags: usize, zones: usize) -> Self {
        DemandMatrix {
            tags,
            zones,
            values: vec![0.0; tags * zones],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let tags = rows.len();
        let zones = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == zones), "ragged demand rows");
        DemandMatrix {
            tags,
            zones,
            values: rows.into_iter().flatten().collect(),
        }
    }

    pub fn tag_count(&self) -> usize {
        self.tags
    }

    pub fn zone_count(&self) -> usize {
        self.zones
    }

    pub fn get(&self, tag: TagId, zone: ZoneId) -> f64 {
        self.values[tag.index() * self.zones + zone.index()]
    }

    pub fn set(&mut self, tag: TagId, zone: ZoneId, value: f64) {
        self.values[tag.index() * self.zones + zone.index()] = value;
    }

    pub fn row(&self, tag: TagId) -> &[f64] {
        let start = tag.index() * self.zones;
        &self.values[start..start + self.zones]
    }

    /// Zones in which `tag` has positive demand, ascending.
    pub fn demanded_zones(&self, tag: TagId) -> impl Iterator<Item = ZoneId> + '_ {
        self.row(tag)
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0.0)
            .map(|(z, _)| ZoneId::from(z))
    }

    /// σ_i, the total demand of one tag.
    pub fn tag_total(&self, tag: TagId) -> f64 {
        self.row(tag).iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `c_ij`: cost of assigning tag `j` to slot `i`, `slots × tags`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostMatrix {
    slots: usize,
    tags: usize,
    values: Vec<u64>,
}

impl CostMatrix {
    pub fn zeros(slots: usize, tags: usize) -> Self {
        CostMatrix {
            slots,
            tags,
            values: vec![0; slots * tags],
        }
    }

    /// Every tag pays the same price for a given slot.
    pub fn uniform_per_slot(slot_costs: &[u64], tags: usize) -> Self {
        let values = slot_costs
            .iter()
            .flat_map(|&c| std::iter::repeat_n(c, tags))
            .collect();
        CostMatrix {
            slots: slot_costs.len(),
            tags,
            values,
        }
    }

    pub fn slot_count(&self) -> usize {
        self.slots
    }

    pub fn tag_count(&self) -> usize {
        self.tags
    }

    pub fn get(&self, slot: SlotId, tag: TagId) -> u64 {
        self.values[slot.index() * self.tags + tag.index()]
    }

    pub fn set(&mut self, slot: SlotId, tag: TagId, cost: u64) {
        self.values[slot.index() * self.tags + tag.index()] = cost;
    }

    /// Σ c_ij over `slots` for one tag.
    pub fn set_cost<'a>(&self, tag: TagId, slots: impl IntoIterator<Item = &'a SlotId>) -> u64 {
        slots.into_iter().map(|&s| self.get(s, tag)).sum()
    }
}

/// The raw, serializable content of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceParts {
    pub billboards: Vec<Billboard>,
    pub horizon: Horizon,
    pub slots: Vec<Slot>,
    pub trajectories: Vec<Trajectory>,
    pub probabilities: ProbabilityMatrix,
    pub zones: ZoneMap,
    pub tags: Vec<TagId>,
    pub demand: DemandMatrix,
    pub cost: CostMatrix,
    pub budget: u64,
}

/// A complete problem instance plus lookup tables derived from it.
///
/// Immutable once built. Lookups tolerate dangling references (they are
/// dropped from the tables); [`validate_instance`] reports them.
#[derive(Debug, Clone)]
pub struct Instance {
    parts: InstanceParts,
    /// Sparse `(trajectory index, Pr)` list per probability source.
    columns: Vec<Vec<(u32, f64)>>,
    /// Σ Pr per column: the influence of a lone slot.
    column_mass: Vec<f64>,
    slot_column: Vec<usize>,
    slot_zone: Vec<Option<ZoneId>>,
    zone_slots: Vec<Vec<SlotId>>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts
    }
}

impl Instance {
    pub fn from_parts(parts: InstanceParts) -> Self {
        let n_traj = parts.trajectories.len();
        let n_sources = match parts.probabilities.key() {
            ProbabilityKey::Billboard => parts.billboards.len(),
            ProbabilityKey::Slot => parts.slots.len(),
        };
        let mut columns = vec![Vec::new(); n_sources];
        for (source, t, p) in parts.probabilities.iter() {
            if (source as usize) < n_sources && t.index() < n_traj {
                columns[source as usize].push((t.0, p));
            }
        }
        let empty = columns.len();
        columns.push(Vec::new());
        let column_mass = columns
            .iter()
            .map(|c| c.iter().map(|&(_, p)| p).sum())
            .collect();

        let zone_count = parts.zones.len();
        let mut zone_slots = vec![Vec::new(); zone_count];
        let mut slot_column = Vec::with_capacity(parts.slots.len());
        let mut slot_zone = Vec::with_capacity(parts.slots.len());
        for (i, slot) in parts.slots.iter().enumerate() {
            let billboard = parts.billboards.get(slot.billboard.index());
            let column = match parts.probabilities.key() {
                ProbabilityKey::Billboard => billboard.map_or(empty, |_| slot.billboard.index()),
                ProbabilityKey::Slot => i,
            };
            slot_column.push(column.min(empty));
            let zone = billboard
                .map(|b| b.zone)
                .filter(|z| z.index() < zone_count);
            if let Some(z) = zone {
                zone_slots[z.index()].push(SlotId::from(i));
            }
            slot_zone.push(zone);
        }

        Instance {
            parts,
            columns,
            column_mass,
            slot_column,
            slot_zone,
            zone_slots,
        }
    }

    pub fn parts(&self) -> &InstanceParts {
        &self.parts
    }

    pub fn into_parts(self) -> InstanceParts {
        self.parts
    }

    pub fn billboards(&self) -> &[Billboard] {
        &self.parts.billboards
    }

    pub fn slots(&self) -> &[Slot] {
        &self.parts.slots
    }

    pub fn trajectories(&self) -> &[Trajectory] {
        &self.parts.trajectories
    }

    pub fn probabilities(&self) -> &ProbabilityMatrix {
        &self.parts.probabilities
    }

    pub fn zones(&self) -> &ZoneMap {
        &self.parts.zones
    }

    pub fn tags(&self) -> &[TagId] {
        &self.parts.tags
    }

    pub fn demand(&self) -> &DemandMatrix {
        &self.parts.demand
    }

    pub fn cost(&self) -> &CostMatrix {
        &self.parts.cost
    }

    pub fn budget(&self) -> u64 {
        self.parts.budget
    }

    pub fn horizon(&self) -> Horizon {
        self.parts.horizon
    }

    pub fn slot_count(&self) -> usize {
        self.parts.slots.len()
    }

    pub fn tag_count(&self) -> usize {
        self.parts.tags.len()
    }

    pub fn zone_count(&self) -> usize {
        self.parts.zones.len()
    }

    pub fn trajectory_count(&self) -> usize {
        self.parts.trajectories.len()
    }

    pub fn has_slot(&self, slot: SlotId) -> bool {
        slot.index() < self.parts.slots.len()
    }

    pub fn has_tag(&self, tag: TagId) -> bool {
        tag.index() < self.parts.tags.len() && tag.index() < self.parts.demand.tag_count()
    }

    pub fn has_zone(&self, zone: ZoneId) -> bool {
        zone.index() < self.parts.zones.len()
    }

    /// Non-zero `(trajectory index, Pr)` pairs reached by one slot.
    pub fn slot_probabilities(&self, slot: SlotId) -> &[(u32, f64)] {
        &self.columns[self.slot_column[slot.index()]]
    }

    /// `I({slot})`, the sum of the slot's probabilities.
    pub fn singleton_influence(&self, slot: SlotId) -> f64 {
        self.column_mass[self.slot_column[slot.index()]]
    }

    pub fn slot_zone(&self, slot: SlotId) -> Option<ZoneId> {
        self.slot_zone[slot.index()]
    }

    /// Slots whose billboard lies in `zone`, ascending.
    pub fn zone_slots(&self, zone: ZoneId) -> &[SlotId] {
        &self.zone_slots[zone.index()]
    }
}

/// The vector of per-tag slot sets together with handled flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    pub assignments: BTreeMap<TagId, BTreeSet<SlotId>>,
    pub handled: Vec<bool>,
    pub total_cost: u64,
}

impl Allocation {
    pub fn empty(tag_count: usize) -> Self {
        Allocation {
            assignments: BTreeMap::new(),
            handled: vec![false; tag_count],
            total_cost: 0,
        }
    }

    /// Records `slots` for `tag` and marks the tag handled.
    pub fn commit(&mut self, tag: TagId, slots: BTreeSet<SlotId>, cost: u64) {
        self.handled[tag.index()] = true;
        self.total_cost += cost;
        self.assignments.entry(tag).or_default().extend(slots);
    }

    pub fn is_handled(&self, tag: TagId) -> bool {
        self.handled.get(tag.index()).copied().unwrap_or(false)
    }

    pub fn handled_count(&self) -> usize {
        self.handled.iter().filter(|&&h| h).count()
    }

    pub fn slots_of(&self, tag: TagId) -> Option<&BTreeSet<SlotId>> {
        self.assignments.get(&tag)
    }

    /// 𝒫*: the largest slot set held by a handled tag (0 if none).
    pub fn max_slots_per_tag(&self) -> usize {
        self.assignments
            .iter()
            .filter(|(t, _)| self.is_handled(**t))
            .map(|(_, s)| s.len())
            .max()
            .unwrap_or(0)
    }

    pub fn used_slots(&self) -> impl Iterator<Item = SlotId> + '_ {
        self.assignments.values().flatten().copied()
    }
}

/// A broken invariant found by [`validate_instance`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoZones,
    MisnumberedId { kind: &'static str, position: usize, id: u32 },
    DegenerateZone(ZoneId),
    OverlappingZones(ZoneId, ZoneId),
    BillboardOutOfRange(BillboardId),
    BillboardZoneUnknown(BillboardId),
    BillboardOutsideZone { billboard: BillboardId, zone: ZoneId },
    BadHorizon(Horizon),
    SlotUnknownBillboard(SlotId),
    SlotLength { slot: SlotId, len: i64, expected: i64 },
    OverlappingSlots { billboard: BillboardId, first: SlotId, second: SlotId },
    IncompleteTiling { billboard: BillboardId },
    EmptyTrajectory(TrajectoryId),
    UnorderedTrajectory(TrajectoryId),
    TrajectoryPointOutOfRange(TrajectoryId),
    ProbabilityOutOfRange { source: u32, trajectory: TrajectoryId, value: f64 },
    ProbabilityDangling { source: u32, trajectory: TrajectoryId },
    DemandShape { tags: usize, zones: usize },
    DemandValue { tag: TagId, zone: ZoneId, value: f64 },
    NoDemandedZone(TagId),
    CostShape { slots: usize, tags: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoZones => write!(f, "zone map is empty"),
            MisnumberedId { kind, position, id } => {
                write!(f, "{kind} at position {position} has id {id}")
            }
            DegenerateZone(z) => write!(f, "zone {z} has an empty box"),
            OverlappingZones(a, b) => write!(f, "zones {a} and {b} overlap"),
            BillboardOutOfRange(b) => write!(f, "billboard {b} has out-of-range coordinates"),
            BillboardZoneUnknown(b) => write!(f, "billboard {b} refers to an unknown zone"),
            BillboardOutsideZone { billboard, zone } => {
                write!(f, "billboard {billboard} lies outside its zone {zone}")
            }
            BadHorizon(h) => write!(
                f,
                "horizon [{}, {}) cannot be tiled by slots of {} ticks",
                h.start, h.end, h.slot_len
            ),
            SlotUnknownBillboard(s) => write!(f, "slot {s} refers to an unknown billboard"),
            SlotLength { slot, len, expected } => {
                write!(f, "slot {slot} spans {len} ticks, expected {expected}")
            }
            OverlappingSlots {
                billboard,
                first,
                second,
            } => write!(f, "billboard {billboard}: slots {first} and {second} overlap"),
            IncompleteTiling { billboard } => {
                write!(f, "billboard {billboard}: slots do not tile the horizon")
            }
            EmptyTrajectory(t) => write!(f, "trajectory {t} has no points"),
            UnorderedTrajectory(t) => write!(f, "trajectory {t} has decreasing timestamps"),
            TrajectoryPointOutOfRange(t) => {
                write!(f, "trajectory {t} has out-of-range coordinates")
            }
            ProbabilityOutOfRange {
                source,
                trajectory,
                value,
            } => write!(f, "Pr({source}, {trajectory}) = {value} is outside (0, 1]"),
            ProbabilityDangling { source, trajectory } => {
                write!(f, "Pr({source}, {trajectory}) refers to an unknown entity")
            }
            DemandShape { tags, zones } => {
                write!(f, "demand matrix is {tags}x{zones}, does not match tags x zones")
            }
            DemandValue { tag, zone, value } => {
                write!(f, "demand of tag {tag} in zone {zone} is {value}")
            }
            NoDemandedZone(t) => write!(f, "tag {t} demands no zone"),
            CostShape { slots, tags } => {
                write!(f, "cost matrix is {slots}x{tags}, does not match slots x tags")
            }
        }
    }
}

/// Lists every violated invariant; an empty list means the instance is valid.
pub fn validate_instance(instance: &Instance) -> Vec<Violation> {
    let p = instance.parts();
    let mut out = Vec::new();

    macro_rules! dense {
        ($kind:expr, $items:expr) => {
            for (i, item) in $items.iter().enumerate() {
                if item.id.index() != i {
                    out.push(Violation::MisnumberedId {
                        kind: $kind,
                        position: i,
                        id: item.id.0,
                    });
                }
            }
        };
    }

    // zones
    if p.zones.is_empty() {
        out.push(Violation::NoZones);
    }
    dense!("zone", p.zones.zones);
    for (i, a) in p.zones.zones.iter().enumerate() {
        if !(a.lat_min < a.lat_max && a.lon_min < a.lon_max) {
            out.push(Violation::DegenerateZone(a.id));
            continue;
        }
        for b in &p.zones.zones[i + 1..] {
            if a.overlaps(b) {
                out.push(Violation::OverlappingZones(a.id, b.id));
            }
        }
    }

    // billboards
    dense!("billboard", p.billboards);
    for b in &p.billboards {
        if !b.location.is_valid() {
            out.push(Violation::BillboardOutOfRange(b.id));
        }
        match p.zones.zones.get(b.zone.index()) {
            None => out.push(Violation::BillboardZoneUnknown(b.id)),
            Some(z) if !z.contains(b.location) => out.push(Violation::BillboardOutsideZone {
                billboard: b.id,
                zone: b.zone,
            }),
            Some(_) => {}
        }
    }

    // slots
    let horizon = p.horizon;
    if horizon.slots_per_billboard().is_none() {
        out.push(Violation::BadHorizon(horizon));
    }
    dense!("slot", p.slots);
    let mut per_billboard: Vec<Vec<&Slot>> = vec![Vec::new(); p.billboards.len()];
    for s in &p.slots {
        if s.interval.len() != horizon.slot_len {
            out.push(Violation::SlotLength {
                slot: s.id,
                len: s.interval.len(),
                expected: horizon.slot_len,
            });
        }
        match per_billboard.get_mut(s.billboard.index()) {
            Some(v) => v.push(s),
            None => out.push(Violation::SlotUnknownBillboard(s.id)),
        }
    }
    for (b, slots) in per_billboard.iter_mut().enumerate() {
        slots.sort_by_key(|s| (s.interval.start, s.id));
        let billboard = BillboardId::from(b);
        let overlap = slots
            .windows(2)
            .find(|w| w[1].interval.start < w[0].interval.end);
        if let Some(w) = overlap {
            out.push(Violation::OverlappingSlots {
                billboard,
                first: w[0].id,
                second: w[1].id,
            });
            continue;
        }
        let mut cursor = horizon.start;
        let mut tiles = true;
        for s in slots.iter() {
            if s.interval.start != cursor {
                tiles = false;
                break;
            }
            cursor = s.interval.end;
        }
        if !tiles || cursor != horizon.end {
            out.push(Violation::IncompleteTiling { billboard });
        }
    }

    // trajectories
    dense!("trajectory", p.trajectories);
    for t in &p.trajectories {
        if t.points.is_empty() {
            out.push(Violation::EmptyTrajectory(t.id));
        }
        if t.points.windows(2).any(|w| w[1].tick < w[0].tick) {
            out.push(Violation::UnorderedTrajectory(t.id));
        }
        if t.points.iter().any(|pt| !pt.location.is_valid()) {
            out.push(Violation::TrajectoryPointOutOfRange(t.id));
        }
    }

    // probabilities
    let n_sources = match p.probabilities.key() {
        ProbabilityKey::Billboard => p.billboards.len(),
        ProbabilityKey::Slot => p.slots.len(),
    };
    for (source, trajectory, value) in p.probabilities.iter() {
        if !(value > 0.0 && value <= 1.0) {
            out.push(Violation::ProbabilityOutOfRange {
                source,
                trajectory,
                value,
            });
        }
        if source as usize >= n_sources || trajectory.index() >= p.trajectories.len() {
            out.push(Violation::ProbabilityDangling { source, trajectory });
        }
    }

    // tags, demand, cost
    for (i, t) in p.tags.iter().enumerate() {
        if t.index() != i {
            out.push(Violation::MisnumberedId {
                kind: "tag",
                position: i,
                id: t.0,
            });
        }
    }
    let demand = &p.demand;
    if demand.tag_count() != p.tags.len() || demand.zone_count() != p.zones.len() {
        out.push(Violation::DemandShape {
            tags: demand.tag_count(),
            zones: demand.zone_count(),
        });
    } else {
        for t in 0..demand.tag_count() {
            let tag = TagId::from(t);
            for (z, &value) in demand.row(tag).iter().enumerate() {
                if !value.is_finite() || value < 0.0 {
                    out.push(Violation::DemandValue {
                        tag,
                        zone: ZoneId::from(z),
                        value,
                    });
                }
            }
            if demand.demanded_zones(tag).next().is_none() {
                out.push(Violation::NoDemandedZone(tag));
            }
        }
    }
    if p.cost.slot_count() != p.slots.len() || p.cost.tag_count() != p.tags.len() {
        out.push(Violation::CostShape {
            slots: p.cost.slot_count(),
            tags: p.cost.tag_count(),
        });
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_slot_instance() -> InstanceParts {
        let zones = ZoneMap::grid((40.0, 41.0), (-74.0, -73.0), 1, 1);
        let billboards = vec![Billboard {
            id: BillboardId(0),
            external_id: 7,
            location: LatLon::new(40.5, -73.5),
            zone: ZoneId(0),
        }];
        let slots = vec![
            Slot {
                id: SlotId(0),
                billboard: BillboardId(0),
                interval: Interval::new(0, 2),
            },
            Slot {
                id: SlotId(1),
                billboard: BillboardId(0),
                interval: Interval::new(2, 4),
            },
        ];
        let trajectories = vec![Trajectory {
            id: TrajectoryId(0),
            points: vec![TrajectoryPoint {
                location: LatLon::new(40.5, -73.5),
                tick: 1,
            }],
        }];
        let mut probabilities = ProbabilityMatrix::new(ProbabilityKey::Billboard);
        probabilities.set(0, TrajectoryId(0), 1.0);
        InstanceParts {
            billboards,
            horizon: Horizon::new(0, 4, 2),
            slots,
            trajectories,
            probabilities,
            zones,
            tags: vec![TagId(0)],
            demand: DemandMatrix::from_rows(vec![vec![1.0]]),
            cost: CostMatrix::uniform_per_slot(&[1, 2], 1),
            budget: 3,
        }
    }

    #[test]
    fn well_formed_instance_has_empty_report() {
        let inst = Instance::from_parts(two_slot_instance());
        assert_eq!(validate_instance(&inst), vec![]);
    }

    #[test]
    fn overlapping_slots_name_the_billboard() {
        let mut parts = two_slot_instance();
        parts.slots[1].interval = Interval::new(1, 3);
        let report = validate_instance(&Instance::from_parts(parts));
        assert_eq!(
            report,
            vec![Violation::OverlappingSlots {
                billboard: BillboardId(0),
                first: SlotId(0),
                second: SlotId(1),
            }]
        );
        assert!(report[0].to_string().contains("billboard 0"));
    }

    #[test]
    fn all_zero_demand_row_is_one_violation() {
        let mut parts = two_slot_instance();
        parts.demand = DemandMatrix::from_rows(vec![vec![0.0]]);
        let report = validate_instance(&Instance::from_parts(parts));
        assert_eq!(report, vec![Violation::NoDemandedZone(TagId(0))]);
    }

    #[test]
    fn billboard_outside_its_zone_is_rejected() {
        let mut parts = two_slot_instance();
        parts.billboards[0].location = LatLon::new(42.0, -73.5);
        let report = validate_instance(&Instance::from_parts(parts));
        assert!(matches!(
            report.as_slice(),
            [Violation::BillboardOutsideZone { .. }]
        ));
    }

    #[test]
    fn gap_in_tiling_is_reported() {
        let mut parts = two_slot_instance();
        parts.horizon = Horizon::new(0, 6, 2);
        let report = validate_instance(&Instance::from_parts(parts));
        assert_eq!(
            report,
            vec![Violation::IncompleteTiling {
                billboard: BillboardId(0)
            }]
        );
    }

    #[test]
    fn grid_zones_are_disjoint_and_cover_interior() {
        let zones = ZoneMap::grid((0.0, 1.0), (0.0, 3.0), 2, 3);
        assert_eq!(zones.len(), 6);
        assert_eq!(zones.locate(LatLon::new(0.75, 2.5)), Some(ZoneId(5)));
        assert_eq!(zones.locate(LatLon::new(1.5, 2.5)), None);
    }

    #[test]
    fn allocation_tracks_cost_and_pstar() {
        let mut a = Allocation::empty(3);
        a.commit(TagId(1), [SlotId(0), SlotId(2)].into(), 5);
        a.commit(TagId(2), [SlotId(1)].into(), 4);
        assert_eq!(a.total_cost, 9);
        assert_eq!(a.handled_count(), 2);
        assert_eq!(a.max_slots_per_tag(), 2);
    }
}
