//! Coverage-style influence of slot sets over a trajectory database.
//!
//! The influence of a slot set `S` is `Σ_t [1 − Π_{s∈S} (1 − Pr(s, t))]`,
//! with `I(∅) = 0`. Every selected slot contributes its own factor, so two
//! slots of one billboard count as independent exposures.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Billboard, Instance, Interval, LatLon, ProbabilityKey, ProbabilityMatrix, Slot, SlotId,
    Trajectory, ZoneId,
};

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Great-circle distance in meters on a spherical Earth.
pub fn haversine_m(a: LatLon, b: LatLon) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (b.lon - a.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InfluenceKind {
    /// Reached (Pr = 1) iff some point lies within λ.
    #[default]
    Indicator,
    /// Each point within λ independently reaches with probability `e^{−d/λ}`.
    ExponentialDecay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfluenceModel {
    pub kind: InfluenceKind,
    /// Influence radius in meters.
    pub lambda_m: f64,
    /// Count only points that fall inside a slot's time window.
    pub temporal_gating: bool,
}

impl Default for InfluenceModel {
    fn default() -> Self {
        InfluenceModel {
            kind: InfluenceKind::Indicator,
            lambda_m: 100.0,
            temporal_gating: false,
        }
    }
}

impl InfluenceModel {
    pub fn indicator(lambda_m: f64) -> Self {
        InfluenceModel {
            lambda_m,
            ..Default::default()
        }
    }

    pub fn decay(lambda_m: f64) -> Self {
        InfluenceModel {
            kind: InfluenceKind::ExponentialDecay,
            lambda_m,
            temporal_gating: false,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.lambda_m > 0.0 && self.lambda_m.is_finite()
    }
}

/// `Pr(b, t)` under `model`, ignoring time.
pub fn influence_prob(billboard: &Billboard, trajectory: &Trajectory, model: &InfluenceModel) -> f64 {
    prob_over_points(billboard.location, trajectory, model, None)
}

/// `Pr(b, t)` restricted to points whose tick falls in `window`.
pub fn influence_prob_in_window(
    billboard: &Billboard,
    trajectory: &Trajectory,
    model: &InfluenceModel,
    window: Interval,
) -> f64 {
    prob_over_points(billboard.location, trajectory, model, Some(window))
}

fn prob_over_points(
    at: LatLon,
    trajectory: &Trajectory,
    model: &InfluenceModel,
    window: Option<Interval>,
) -> f64 {
    let lambda = model.lambda_m;
    let mut miss = 1.0;
    for pt in &trajectory.points {
        if window.is_some_and(|w| !w.contains(pt.tick)) {
            continue;
        }
        let d = haversine_m(at, pt.location);
        if d > lambda {
            continue;
        }
        match model.kind {
            InfluenceKind::Indicator => return 1.0,
            InfluenceKind::ExponentialDecay => miss *= 1.0 - (-d / lambda).exp(),
        }
    }
    1.0 - miss
}

/// Lat/lon bounding box of a trajectory, for cheap rejection.
struct Bounds {
    lat: (f64, f64),
    lon: (f64, f64),
}

impl Bounds {
    fn of(t: &Trajectory) -> Bounds {
        let mut b = Bounds {
            lat: (f64::INFINITY, f64::NEG_INFINITY),
            lon: (f64::INFINITY, f64::NEG_INFINITY),
        };
        for p in &t.points {
            b.lat = (b.lat.0.min(p.location.lat), b.lat.1.max(p.location.lat));
            b.lon = (b.lon.0.min(p.location.lon), b.lon.1.max(p.location.lon));
        }
        b
    }

    /// Conservative: may keep far pairs, never drops near ones.
    fn may_reach(&self, at: LatLon, radius_m: f64) -> bool {
        let dlat = (radius_m / EARTH_RADIUS_M).to_degrees() * 1.01;
        let coslat = at.lat.to_radians().cos().abs().max(1e-6);
        let dlon = (dlat / coslat).min(360.0);
        at.lat + dlat >= self.lat.0
            && at.lat - dlat <= self.lat.1
            && at.lon + dlon >= self.lon.0
            && at.lon - dlon <= self.lon.1
    }
}

/// Billboard-keyed sparse matrix of all non-zero `Pr(b, t)`.
pub fn build_probability_matrix(
    billboards: &[Billboard],
    trajectories: &[Trajectory],
    model: &InfluenceModel,
) -> ProbabilityMatrix {
    let bounds: Vec<Bounds> = trajectories.iter().map(Bounds::of).collect();
    let mut m = ProbabilityMatrix::new(ProbabilityKey::Billboard);
    for b in billboards {
        for (t, bb) in trajectories.iter().zip(&bounds) {
            if !bb.may_reach(b.location, model.lambda_m) {
                continue;
            }
            let p = influence_prob(b, t, model);
            if p > 0.0 {
                m.set(b.id.0, t.id, p);
            }
        }
    }
    m
}

/// Slot-keyed sparse matrix where each slot only sees points in its window.
pub fn build_slot_probability_matrix(
    billboards: &[Billboard],
    slots: &[Slot],
    trajectories: &[Trajectory],
    model: &InfluenceModel,
) -> ProbabilityMatrix {
    let bounds: Vec<Bounds> = trajectories.iter().map(Bounds::of).collect();
    let mut m = ProbabilityMatrix::new(ProbabilityKey::Slot);
    for s in slots {
        let b = &billboards[s.billboard.index()];
        for (t, bb) in trajectories.iter().zip(&bounds) {
            if !bb.may_reach(b.location, model.lambda_m) {
                continue;
            }
            let p = influence_prob_in_window(b, t, model, s.interval);
            if p > 0.0 {
                m.set(s.id.0, t.id, p);
            }
        }
    }
    m
}

/// Builds whichever matrix `model.temporal_gating` calls for.
pub fn probability_matrix_for(
    billboards: &[Billboard],
    slots: &[Slot],
    trajectories: &[Trajectory],
    model: &InfluenceModel,
) -> ProbabilityMatrix {
    if model.temporal_gating {
        build_slot_probability_matrix(billboards, slots, trajectories, model)
    } else {
        build_probability_matrix(billboards, trajectories, model)
    }
}

fn collect_slots(
    instance: &Instance,
    slots: impl IntoIterator<Item = SlotId>,
) -> Result<BTreeSet<SlotId>> {
    let mut set = BTreeSet::new();
    for s in slots {
        if !instance.has_slot(s) {
            return Err(Error::UnknownSlot(s));
        }
        set.insert(s);
    }
    Ok(set)
}

pub(crate) fn influence_of_set(instance: &Instance, set: &BTreeSet<SlotId>) -> f64 {
    if set.is_empty() {
        return 0.0;
    }
    let mut residual = vec![1.0f64; instance.trajectory_count()];
    let mut touched = Vec::new();
    for &s in set {
        for &(t, p) in instance.slot_probabilities(s) {
            let r = &mut residual[t as usize];
            if *r == 1.0 {
                touched.push(t);
            }
            *r *= 1.0 - p;
        }
    }
    touched.sort_unstable();
    touched.dedup();
    touched.iter().map(|&t| 1.0 - residual[t as usize]).sum()
}

/// Influence of a slot set. Duplicate ids count once.
pub fn influence(instance: &Instance, slots: impl IntoIterator<Item = SlotId>) -> Result<f64> {
    let set = collect_slots(instance, slots)?;
    Ok(influence_of_set(instance, &set))
}

/// Influence of the part of `slots` whose billboards lie in `zone`.
pub fn zonal_influence(
    instance: &Instance,
    slots: impl IntoIterator<Item = SlotId>,
    zone: ZoneId,
) -> Result<f64> {
    if !instance.has_zone(zone) {
        return Err(Error::UnknownZone(zone));
    }
    let mut set = collect_slots(instance, slots)?;
    set.retain(|&s| instance.slot_zone(s) == Some(zone));
    Ok(influence_of_set(instance, &set))
}

/// Individual influence `I({s})` of every slot, indexed by slot id.
pub fn singleton_influences(instance: &Instance) -> Vec<f64> {
    (0..instance.slot_count())
        .map(|i| instance.singleton_influence(SlotId::from(i)))
        .collect()
}

/// Incrementally maintained influence of a growing slot set.
#[derive(Debug, Clone)]
pub struct CoverageState<'a> {
    instance: &'a Instance,
    residual: Vec<f64>,
    current: f64,
    added: Vec<bool>,
    members: Vec<SlotId>,
}

/// Fresh coverage with no slots selected.
pub fn open_coverage(instance: &Instance) -> CoverageState<'_> {
    CoverageState {
        instance,
        residual: vec![1.0; instance.trajectory_count()],
        current: 0.0,
        added: vec![false; instance.slot_count()],
        members: Vec::new(),
    }
}

impl<'a> CoverageState<'a> {
    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn current_influence(&self) -> f64 {
        self.current
    }

    /// `Π (1 − Pr)` per trajectory over the slots added so far.
    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    pub fn contains(&self, slot: SlotId) -> bool {
        self.added.get(slot.index()).copied().unwrap_or(false)
    }

    /// Slots in the order they were added.
    pub fn slots(&self) -> &[SlotId] {
        &self.members
    }

    /// Marginal gain of `slot` without adding it. Zero for slots already in.
    pub fn gain(&self, slot: SlotId) -> f64 {
        if self.contains(slot) {
            return 0.0;
        }
        self.instance
            .slot_probabilities(slot)
            .iter()
            .map(|&(t, p)| self.residual[t as usize] * p)
            .sum()
    }

    /// Adds `slot` and returns its marginal gain.
    pub fn add_slot(&mut self, slot: SlotId) -> Result<f64> {
        if !self.instance.has_slot(slot) {
            return Err(Error::UnknownSlot(slot));
        }
        if self.added[slot.index()] {
            return Err(Error::DuplicateSlot(slot));
        }
        let mut gain = 0.0;
        for &(t, p) in self.instance.slot_probabilities(slot) {
            let r = &mut self.residual[t as usize];
            gain += *r * p;
            *r *= 1.0 - p;
        }
        self.added[slot.index()] = true;
        self.members.push(slot);
        self.current += gain;
        Ok(gain)
    }
}
