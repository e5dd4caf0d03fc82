//! Cost-Effective Greedy assignment of tags to slots.
//!
//! Each round, every unhandled tag gets a candidate slot set: the union of a
//! minimum-cost cover of each zone it demands, drawn from the slots still
//! free. The cheapest candidate is committed if it fits the remaining
//! budget. Otherwise the run stops, because every other candidate costs at
//! least as much.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::influence::{influence_of_set, open_coverage, CoverageState};
use crate::model::{Allocation, Instance, SlotId, TagId, ZoneId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InnerSolver {
    /// Lazy greedy on marginal zonal influence per unit cost. Zones with at
    /// most `exact_threshold` free slots are still solved exactly.
    #[default]
    GreedyDensity,
    /// Exact minimum-cost cover for every zone, whatever its size.
    ExactSmall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub inner_solver: InnerSolver,
    pub exact_threshold: usize,
    /// Build candidates for distinct tags on the rayon pool.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            inner_solver: InnerSolver::GreedyDensity,
            exact_threshold: 15,
            parallel: false,
        }
    }
}

impl SolverConfig {
    pub fn greedy_only() -> Self {
        SolverConfig {
            exact_threshold: 0,
            ..Default::default()
        }
    }

    pub fn exact() -> Self {
        SolverConfig {
            inner_solver: InnerSolver::ExactSmall,
            ..Default::default()
        }
    }

    fn use_exact(&self, free_slots: usize) -> bool {
        match self.inner_solver {
            InnerSolver::ExactSmall => true,
            InnerSolver::GreedyDensity => free_slots <= self.exact_threshold,
        }
    }
}

/// Slots not yet committed to any tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotPool {
    free: Vec<bool>,
}

impl SlotPool {
    pub fn full(instance: &Instance) -> Self {
        SlotPool {
            free: vec![true; instance.slot_count()],
        }
    }

    pub fn is_free(&self, slot: SlotId) -> bool {
        self.free.get(slot.index()).copied().unwrap_or(false)
    }

    pub fn take<'a>(&mut self, slots: impl IntoIterator<Item = &'a SlotId>) {
        for s in slots {
            self.free[s.index()] = false;
        }
    }

    pub fn free_in_zone(&self, instance: &Instance, zone: ZoneId) -> Vec<SlotId> {
        instance
            .zone_slots(zone)
            .iter()
            .copied()
            .filter(|&s| self.is_free(s))
            .collect()
    }
}

/// `𝒞(t_j, 𝒮_j)`, with `Infinite` for tags that cannot be covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CandidateCost {
    Finite(u64),
    Infinite,
}

impl CandidateCost {
    pub fn finite(self) -> Option<u64> {
        match self {
            CandidateCost::Finite(c) => Some(c),
            CandidateCost::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagCandidate {
    pub tag: TagId,
    pub slots: BTreeSet<SlotId>,
    pub cost: CandidateCost,
}

/// One zone's cover: the chosen slots and what they cost the tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZoneCover {
    pub slots: BTreeSet<SlotId>,
    pub cost: u64,
}

/// A minimum-cost subset of `available` reaching `demand` zonal influence in
/// `zone`, or `None` when even all of `available` falls short.
///
/// Slots of other zones in `available` are ignored.
pub fn min_cost_zone_cover(
    instance: &Instance,
    zone: ZoneId,
    available: &[SlotId],
    demand: f64,
    tag: TagId,
    config: &SolverConfig,
) -> Result<Option<ZoneCover>> {
    if !instance.has_zone(zone) {
        return Err(Error::UnknownZone(zone));
    }
    if !instance.has_tag(tag) {
        return Err(Error::UnknownTag(tag));
    }
    let mut pool = BTreeSet::new();
    for &s in available {
        if !instance.has_slot(s) {
            return Err(Error::UnknownSlot(s));
        }
        if instance.slot_zone(s) == Some(zone) {
            pool.insert(s);
        }
    }
    if demand <= 0.0 {
        return Ok(Some(ZoneCover {
            slots: BTreeSet::new(),
            cost: 0,
        }));
    }
    let exact = config.use_exact(pool.len());
    // the greedy reports an unreachable demand itself once its heap runs dry
    if exact && influence_of_set(instance, &pool) < demand {
        return Ok(None);
    }
    let pool: Vec<SlotId> = pool.into_iter().collect();
    let slots = if exact {
        exact_cover(instance, &pool, demand, tag)
    } else {
        greedy_cover(instance, &pool, demand, tag)
    };
    Ok(slots.map(|slots| ZoneCover {
        cost: instance.cost().set_cost(tag, &slots),
        slots,
    }))
}

/// Density order: higher gain per cost first, then lower slot id.
#[derive(Debug, Clone, Copy)]
struct Scored {
    density: f64,
    slot: SlotId,
    /// Number of slots in the cover when `density` was computed.
    round: usize,
}

impl PartialEq for Scored {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scored {}

impl PartialOrd for Scored {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scored {
    fn cmp(&self, other: &Self) -> Ordering {
        self.density
            .total_cmp(&other.density)
            .then_with(|| other.slot.cmp(&self.slot))
    }
}

fn density(gain: f64, cost: u64) -> f64 {
    if gain <= 0.0 {
        0.0
    } else if cost == 0 {
        f64::INFINITY
    } else {
        gain / cost as f64
    }
}

/// Lazy evaluation is exact here: gains only shrink as the cover grows, so a
/// fresh entry on top of the heap beats every stale upper bound below it.
fn greedy_cover(
    instance: &Instance,
    pool: &[SlotId],
    demand: f64,
    tag: TagId,
) -> Option<BTreeSet<SlotId>> {
    let costs = instance.cost();
    let mut cov = open_coverage(instance);
    let mut heap: BinaryHeap<Scored> = pool
        .iter()
        .map(|&slot| Scored {
            density: density(instance.singleton_influence(slot), costs.get(slot, tag)),
            slot,
            round: 0,
        })
        .collect();
    let mut chosen = BTreeSet::new();
    while let Some(top) = heap.pop() {
        if top.round != chosen.len() {
            heap.push(Scored {
                density: density(cov.gain(top.slot), costs.get(top.slot, tag)),
                round: chosen.len(),
                ..top
            });
            continue;
        }
        if top.density <= 0.0 {
            break;
        }
        cov.add_slot(top.slot).expect("pool slots are distinct");
        chosen.insert(top.slot);
        if cov.current_influence() >= demand && influence_of_set(instance, &chosen) >= demand {
            return Some(chosen);
        }
    }
    None
}

/// Best cover found so far, ordered by (cost, size, sorted ids).
struct Best {
    cost: u64,
    slots: Vec<SlotId>,
}

struct ExactSearch<'a> {
    instance: &'a Instance,
    pool: &'a [SlotId],
    costs: Vec<u64>,
    /// Σ of singleton influences of `pool[i..]`, an upper bound on what the
    /// remaining slots can add.
    suffix_bound: Vec<f64>,
    demand: f64,
    best: Option<Best>,
}

impl ExactSearch<'_> {
    fn search(&mut self, i: usize, cov: &mut CoverageState<'_>, picked: &mut Vec<SlotId>, cost: u64) {
        if let Some(best) = &self.best {
            if cost > best.cost || (cost == best.cost && picked.len() >= best.slots.len()) {
                return;
            }
        }
        if i == self.pool.len() {
            return;
        }
        let slack = 1e-9 * self.demand.max(1.0);
        if cov.current_influence() + self.suffix_bound[i] < self.demand - slack {
            return;
        }

        // include pool[i]
        let slot = self.pool[i];
        let mut with = cov.clone();
        let gain = with.add_slot(slot).expect("pool slots are distinct");
        picked.push(slot);
        let new_cost = cost + self.costs[i];
        if gain > 0.0 {
            if with.current_influence() >= self.demand && self.verified(picked) {
                self.offer(picked, new_cost);
            } else {
                self.search(i + 1, &mut with, picked, new_cost);
            }
        }
        picked.pop();

        // exclude pool[i]
        self.search(i + 1, cov, picked, cost);
    }

    fn verified(&self, picked: &[SlotId]) -> bool {
        let set: BTreeSet<SlotId> = picked.iter().copied().collect();
        influence_of_set(self.instance, &set) >= self.demand
    }

    fn offer(&mut self, picked: &[SlotId], cost: u64) {
        let better = match &self.best {
            None => true,
            Some(b) => (cost, picked.len(), picked) < (b.cost, b.slots.len(), b.slots.as_slice()),
        };
        if better {
            self.best = Some(Best {
                cost,
                slots: picked.to_vec(),
            });
        }
    }
}

/// Branch and bound over subsets of `pool` (sorted ascending).
fn exact_cover(
    instance: &Instance,
    pool: &[SlotId],
    demand: f64,
    tag: TagId,
) -> Option<BTreeSet<SlotId>> {
    let singles: Vec<f64> = pool
        .iter()
        .map(|&s| instance.singleton_influence(s))
        .collect();
    let mut suffix_bound = vec![0.0; pool.len() + 1];
    for i in (0..pool.len()).rev() {
        suffix_bound[i] = suffix_bound[i + 1] + singles[i];
    }
    let mut search = ExactSearch {
        instance,
        pool,
        costs: pool.iter().map(|&s| instance.cost().get(s, tag)).collect(),
        suffix_bound,
        demand,
        best: None,
    };
    let mut cov = open_coverage(instance);
    search.search(0, &mut cov, &mut Vec::new(), 0);
    search.best.map(|b| b.slots.into_iter().collect())
}

/// Candidate for `tag`: union of per-zone covers over its demanded zones.
pub fn build_candidate(
    instance: &Instance,
    tag: TagId,
    pool: &SlotPool,
    config: &SolverConfig,
) -> Result<TagCandidate> {
    if !instance.has_tag(tag) {
        return Err(Error::UnknownTag(tag));
    }
    let mut slots = BTreeSet::new();
    let mut feasible = true;
    for zone in instance.demand().demanded_zones(tag) {
        let free = pool.free_in_zone(instance, zone);
        let demand = instance.demand().get(tag, zone);
        match min_cost_zone_cover(instance, zone, &free, demand, tag, config)? {
            Some(cover) => slots.extend(cover.slots),
            None => {
                feasible = false;
                break;
            }
        }
    }
    let cost = if feasible && !slots.is_empty() {
        CandidateCost::Finite(instance.cost().set_cost(tag, &slots))
    } else {
        CandidateCost::Infinite
    };
    Ok(TagCandidate { tag, slots, cost })
}

/// One committed `(tag, slots)` pair, in commit order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commit {
    pub tag: TagId,
    pub slots: BTreeSet<SlotId>,
    pub cost: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CegRun {
    pub allocation: Allocation,
    pub commits: Vec<Commit>,
}

pub fn ceg_assign(instance: &Instance, config: &SolverConfig) -> Allocation {
    ceg_assign_traced(instance, config).allocation
}

/// Cached cover of one demanded zone of one tag.
#[derive(Debug, Clone)]
enum ZoneState {
    Stale,
    /// Stays infeasible: the free pool only shrinks.
    Infeasible,
    Cover { slots: BTreeSet<SlotId>, exact: bool },
}

#[derive(Debug, Clone)]
struct TagState {
    tag: TagId,
    zones: Vec<(ZoneId, ZoneState)>,
    candidate: Option<TagCandidate>,
}

impl TagState {
    /// Recomputes stale zone covers in zone order, stopping at the first
    /// infeasible zone exactly as [`build_candidate`] does.
    fn refresh(&mut self, instance: &Instance, pool: &SlotPool, config: &SolverConfig) {
        let mut slots = BTreeSet::new();
        let mut feasible = true;
        for (zone, state) in &mut self.zones {
            if let ZoneState::Stale = state {
                let free = pool.free_in_zone(instance, *zone);
                let demand = instance.demand().get(self.tag, *zone);
                let exact = config.use_exact(free.len());
                *state = match min_cost_zone_cover(instance, *zone, &free, demand, self.tag, config)
                    .expect("ids come from the instance")
                {
                    Some(cover) => ZoneState::Cover {
                        slots: cover.slots,
                        exact,
                    },
                    None => ZoneState::Infeasible,
                };
            }
            match state {
                ZoneState::Cover { slots: c, .. } => slots.extend(c.iter().copied()),
                _ => {
                    feasible = false;
                    break;
                }
            }
        }
        let cost = if feasible && !slots.is_empty() {
            CandidateCost::Finite(instance.cost().set_cost(self.tag, &slots))
        } else {
            CandidateCost::Infinite
        };
        self.candidate = Some(TagCandidate {
            tag: self.tag,
            slots,
            cost,
        });
    }
}

/// Runs the greedy and keeps the commit sequence.
///
/// Zone covers are cached per tag. A commit only changes the free pool of the
/// zones it touches, and a cover there stays valid while it is disjoint from
/// the committed slots and the zone keeps its inner solver mode: the greedy
/// never picked the removed slots, and the exact cover minimizes over a family
/// that still contains its previous optimum.
pub fn ceg_assign_traced(instance: &Instance, config: &SolverConfig) -> CegRun {
    let k = instance.tag_count().min(instance.demand().tag_count());
    let mut allocation = Allocation::empty(instance.tag_count());
    let mut commits = Vec::new();
    let mut pool = SlotPool::full(instance);
    let mut open: Vec<TagState> = (0..k)
        .map(|t| {
            let tag = TagId::from(t);
            TagState {
                tag,
                zones: instance
                    .demand()
                    .demanded_zones(tag)
                    .map(|z| (z, ZoneState::Stale))
                    .collect(),
                candidate: None,
            }
        })
        .collect();
    let mut free_count: Vec<usize> = (0..instance.zone_count())
        .map(|z| instance.zone_slots(ZoneId::from(z)).len())
        .collect();

    while !open.is_empty() {
        let refresh = |s: &mut TagState| {
            if s.candidate.is_none() {
                s.refresh(instance, &pool, config);
            }
        };
        if config.parallel {
            open.par_iter_mut().for_each(refresh);
        } else {
            open.iter_mut().for_each(refresh);
        }

        let (at, cost) = open
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.candidate.as_ref().expect("refreshed above")))
            .min_by_key(|(_, c)| (c.cost, c.tag))
            .map(|(i, c)| (i, c.cost))
            .expect("open is non-empty");
        let Some(cost) = cost.finite() else { break };
        if allocation.total_cost + cost > instance.budget() {
            break;
        }

        let best = open.swap_remove(at).candidate.expect("present");
        pool.take(&best.slots);
        let mut touched = BTreeSet::new();
        for &s in &best.slots {
            if let Some(z) = instance.slot_zone(s) {
                free_count[z.index()] -= 1;
                touched.insert(z);
            }
        }
        for state in &mut open {
            let mut dirty = false;
            for (zone, zs) in &mut state.zones {
                if !touched.contains(zone) {
                    continue;
                }
                if let ZoneState::Cover { slots, exact } = zs {
                    if !slots.is_disjoint(&best.slots)
                        || *exact != config.use_exact(free_count[zone.index()])
                    {
                        *zs = ZoneState::Stale;
                        dirty = true;
                    }
                }
            }
            if dirty {
                state.candidate = None;
            }
        }
        // swap_remove reorders; the argmin above only depends on (cost, tag)
        allocation.commit(best.tag, best.slots.clone(), cost);
        commits.push(Commit {
            tag: best.tag,
            slots: best.slots,
            cost,
        });
    }

    CegRun {
        allocation,
        commits,
    }
}

/// Σ c_ij over every (slot, tag) pair in the allocation.
pub fn allocation_cost(instance: &Instance, allocation: &Allocation) -> Result<u64> {
    let mut total = 0;
    for (&tag, slots) in &allocation.assignments {
        if !instance.has_tag(tag) {
            return Err(Error::UnknownTag(tag));
        }
        for &s in slots {
            if !instance.has_slot(s) {
                return Err(Error::UnknownSlot(s));
            }
            total += instance.cost().get(s, tag);
        }
    }
    Ok(total)
}
