//! Exact solution of the assignment integer program on desk-scale instances,
//! and an auditor that checks any allocation against its constraints.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::influence::influence_of_set;
use crate::model::{Allocation, Instance, SlotId, TagId, ZoneId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleLimits {
    pub max_slots: usize,
    pub max_tags: usize,
    /// Search nodes before giving up with `timed_out`.
    pub node_budget: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_slots: 12,
            max_tags: 4,
            node_budget: 20_000_000,
        }
    }
}

impl OracleLimits {
    pub fn admits(&self, instance: &Instance) -> bool {
        instance.slot_count() <= self.max_slots && instance.tag_count() <= self.max_tags
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Largest number of simultaneously handled tags found.
    pub optimum: usize,
    pub witness: Allocation,
    pub nodes_explored: u64,
    /// The node budget ran out; `optimum` is then only a lower bound.
    pub timed_out: bool,
}

/// A minimal cover of one zone for one tag, as a slot bitmask.
#[derive(Debug, Clone, Copy)]
struct Cover {
    mask: u64,
    cost: u64,
}

struct Search<'a> {
    covers: &'a [Vec<Vec<Cover>>],
    cheapest: &'a [Vec<u64>],
    budget: u64,
    node_budget: u64,
    nodes: u64,
    timed_out: bool,
}

impl Search<'_> {
    /// Tries to give every `(tag, zone)` in `pairs[i..]` a disjoint cover.
    fn assign(
        &mut self,
        pairs: &[(usize, usize)],
        i: usize,
        used: u64,
        cost: u64,
        chosen: &mut Vec<u64>,
    ) -> bool {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            self.timed_out = true;
            return false;
        }
        let Some(&(t, z)) = pairs.get(i) else {
            return true;
        };
        let rest: u64 = pairs[i + 1..]
            .iter()
            .map(|&(t, z)| self.cheapest[t][z])
            .sum();
        for c in &self.covers[t][z] {
            if cost + c.cost + rest > self.budget {
                // sorted by cost
                break;
            }
            if c.mask & used != 0 {
                continue;
            }
            chosen.push(c.mask);
            if self.assign(pairs, i + 1, used | c.mask, cost + c.cost, chosen) {
                return true;
            }
            chosen.pop();
            if self.timed_out {
                return false;
            }
        }
        false
    }
}

/// Lexicographic `size`-combinations of `items`.
fn combinations(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < size - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, size, 0, &mut Vec::new(), &mut out);
    out
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |b| mask >> b & 1 == 1)
}

/// Maximum number of handled tags, found by exhaustive search.
///
/// Every feasible assignment can be shrunk to one where each tag holds a
/// minimal cover of each zone it demands, so the search only branches over
/// those. Tag subsets are tried by increasing size; the first size with no
/// feasible subset ends the search. The witness is the lexicographically
/// first feasible tag set of optimal size.
#[allow(clippy::type_complexity)]
pub fn exact_optimal(instance: &Instance, limits: &OracleLimits) -> Result<OracleResult> {
    let m = instance.slot_count();
    let k = instance.tag_count();
    if !limits.admits(instance) || m > 64 {
        return Err(Error::LimitsExceeded(format!(
            "{m} slots / {k} tags, limits {} / {}",
            limits.max_slots, limits.max_tags
        )));
    }
    let zones = instance.zone_count();
    if let Some(z) = (0..zones).find(|&z| instance.zone_slots(ZoneId::from(z)).len() > 24) {
        return Err(Error::LimitsExceeded(format!(
            "zone {z} has {} slots, too many to enumerate",
            instance.zone_slots(ZoneId::from(z)).len()
        )));
    }

    // covers[tag][zone], sorted by (cost, mask)
    let mut covers = vec![vec![Vec::new(); zones]; k];
    for z in 0..zones {
        let zone_slots = instance.zone_slots(ZoneId::from(z));
        let n = zone_slots.len();
        let influence: Vec<f64> = (0u64..1 << n)
            .map(|local| {
                let set: BTreeSet<SlotId> = bits(local).map(|b| zone_slots[b]).collect();
                influence_of_set(instance, &set)
            })
            .collect();
        for t in 0..k {
            let tag = TagId::from(t);
            let demand = instance.demand().get(tag, ZoneId::from(z));
            if demand <= 0.0 {
                continue;
            }
            let list = &mut covers[t][z];
            for local in 0u64..1 << n {
                if influence[local as usize] < demand {
                    continue;
                }
                let minimal = bits(local).all(|b| influence[(local & !(1 << b)) as usize] < demand);
                if !minimal {
                    continue;
                }
                let mask = bits(local).fold(0u64, |acc, b| acc | 1 << zone_slots[b].index());
                let cost = bits(mask).map(|s| instance.cost().get(SlotId::from(s), tag)).sum();
                list.push(Cover { mask, cost });
            }
            list.sort_by_key(|c| (c.cost, c.mask));
        }
    }

    let demanded: Vec<Vec<usize>> = (0..k)
        .map(|t| {
            instance
                .demand()
                .demanded_zones(TagId::from(t))
                .map(ZoneId::index)
                .collect()
        })
        .collect();
    let cheapest: Vec<Vec<u64>> = covers
        .iter()
        .map(|per_zone| {
            per_zone
                .iter()
                .map(|c| c.first().map_or(u64::MAX / 4, |c| c.cost))
                .collect()
        })
        .collect();
    // Tags that could be handled on their own.
    let viable: Vec<usize> = (0..k)
        .filter(|&t| {
            !demanded[t].is_empty()
                && demanded[t].iter().all(|&z| !covers[t][z].is_empty())
                && demanded[t].iter().map(|&z| cheapest[t][z]).sum::<u64>() <= instance.budget()
        })
        .collect();

    let mut search = Search {
        covers: &covers,
        cheapest: &cheapest,
        budget: instance.budget(),
        node_budget: limits.node_budget,
        nodes: 0,
        timed_out: false,
    };
    // (tag subset, (tag, zone) pairs, chosen cover mask per pair)
    let mut best: Option<(Vec<usize>, Vec<(usize, usize)>, Vec<u64>)> = None;
    'sizes: for size in 1..=viable.len() {
        let mut found = false;
        for subset in combinations(&viable, size) {
            let lower: u64 = subset
                .iter()
                .map(|&t| demanded[t].iter().map(|&z| cheapest[t][z]).sum::<u64>())
                .sum();
            if lower > instance.budget() {
                continue;
            }
            // most constrained pairs first
            let mut pairs: Vec<(usize, usize)> = subset
                .iter()
                .flat_map(|&t| demanded[t].iter().map(move |&z| (t, z)))
                .collect();
            pairs.sort_by_key(|&(t, z)| (covers[t][z].len(), t, z));
            let mut chosen = Vec::new();
            if search.assign(&pairs, 0, 0, 0, &mut chosen) {
                best = Some((subset, pairs, chosen));
                found = true;
                break;
            }
            if search.timed_out {
                break 'sizes;
            }
        }
        if !found {
            break;
        }
    }

    let mut witness = Allocation::empty(k);
    let optimum = match best {
        None => 0,
        Some((subset, pairs, chosen)) => {
            let mut per_tag: BTreeMap<usize, BTreeSet<SlotId>> = BTreeMap::new();
            for (&(t, _), &mask) in pairs.iter().zip(&chosen) {
                per_tag
                    .entry(t)
                    .or_default()
                    .extend(bits(mask).map(SlotId::from));
            }
            for (t, slots) in per_tag {
                let tag = TagId::from(t);
                let cost = instance.cost().set_cost(tag, &slots);
                witness.commit(tag, slots, cost);
            }
            subset.len()
        }
    };

    Ok(OracleResult {
        optimum,
        witness,
        nodes_explored: search.nodes,
        timed_out: search.timed_out,
    })
}

/// A broken constraint of the assignment program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AuditViolation {
    /// Constraint 1.
    BudgetExceeded { total_cost: u64, budget: u64 },
    /// Constraint 1: the recorded total disagrees with Σ c_ij.
    CostMismatch { recorded: u64, recomputed: u64 },
    /// Constraint 2, per tag and zone.
    ZonalDemandUnmet {
        tag: TagId,
        zone: ZoneId,
        required: f64,
        achieved: f64,
        deficit: f64,
    },
    /// Constraint 3.
    SlotReused { slot: SlotId, tags: Vec<TagId> },
    /// Constraints 4–5: ids or flags outside their domain.
    UnknownTag { tag: TagId },
    UnknownSlot { tag: TagId, slot: SlotId },
    FlagCount { expected: usize, found: usize },
}

impl AuditViolation {
    /// Which numbered constraint this violates.
    pub fn constraint(&self) -> u8 {
        match self {
            AuditViolation::BudgetExceeded { .. } | AuditViolation::CostMismatch { .. } => 1,
            AuditViolation::ZonalDemandUnmet { .. } => 2,
            AuditViolation::SlotReused { .. } => 3,
            AuditViolation::UnknownTag { .. }
            | AuditViolation::UnknownSlot { .. }
            | AuditViolation::FlagCount { .. } => 4,
        }
    }
}

impl fmt::Display for AuditViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditViolation::BudgetExceeded { total_cost, budget } => {
                write!(f, "(1) total cost {total_cost} exceeds budget {budget}")
            }
            AuditViolation::CostMismatch {
                recorded,
                recomputed,
            } => write!(f, "(1) recorded cost {recorded} but slots cost {recomputed}"),
            AuditViolation::ZonalDemandUnmet {
                tag,
                zone,
                required,
                achieved,
                deficit,
            } => write!(
                f,
                "(2) tag {tag} zone {zone}: influence {achieved} < demand {required} (deficit {deficit})"
            ),
            AuditViolation::SlotReused { slot, tags } => {
                write!(f, "(3) slot {slot} assigned to tags {tags:?}")
            }
            AuditViolation::UnknownTag { tag } => write!(f, "(4) unknown tag {tag}"),
            AuditViolation::UnknownSlot { tag, slot } => {
                write!(f, "(4) tag {tag} holds unknown slot {slot}")
            }
            AuditViolation::FlagCount { expected, found } => {
                write!(f, "(5) {found} handled flags for {expected} tags")
            }
        }
    }
}

/// Result of [`verify_allocation`]. Feasible iff `violations` is empty.
///
/// Demand is checked per handled tag and per demanded zone. The program's
/// aggregate form, `Σ I(p_i) ≥ Σ_i Σ_z demand(i, z)` over handled tags, is
/// weaker; its slack is reported in `aggregate_slack` for information only
/// and never produces a violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub violations: Vec<AuditViolation>,
    pub aggregate_slack: f64,
}

impl AuditReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_allocation(instance: &Instance, allocation: &Allocation) -> AuditReport {
    let mut violations = Vec::new();
    let k = instance.tag_count();

    if allocation.handled.len() != k {
        violations.push(AuditViolation::FlagCount {
            expected: k,
            found: allocation.handled.len(),
        });
    }

    let mut owners: BTreeMap<SlotId, Vec<TagId>> = BTreeMap::new();
    let mut recomputed = 0u64;
    for (&tag, slots) in &allocation.assignments {
        if !instance.has_tag(tag) {
            violations.push(AuditViolation::UnknownTag { tag });
            continue;
        }
        for &slot in slots {
            if !instance.has_slot(slot) {
                violations.push(AuditViolation::UnknownSlot { tag, slot });
                continue;
            }
            recomputed += instance.cost().get(slot, tag);
            owners.entry(slot).or_default().push(tag);
        }
    }
    for (slot, tags) in owners {
        if tags.len() > 1 {
            violations.push(AuditViolation::SlotReused { slot, tags });
        }
    }

    if recomputed != allocation.total_cost {
        violations.push(AuditViolation::CostMismatch {
            recorded: allocation.total_cost,
            recomputed,
        });
    }
    let total_cost = recomputed.max(allocation.total_cost);
    if total_cost > instance.budget() {
        violations.push(AuditViolation::BudgetExceeded {
            total_cost,
            budget: instance.budget(),
        });
    }

    let mut aggregate_slack = 0.0;
    for (t, &handled) in allocation.handled.iter().enumerate() {
        let tag = TagId::from(t);
        if !handled || !instance.has_tag(tag) {
            continue;
        }
        let held: BTreeSet<SlotId> = allocation
            .slots_of(tag)
            .map(|s| s.iter().copied().filter(|&s| instance.has_slot(s)).collect())
            .unwrap_or_default();
        aggregate_slack += influence_of_set(instance, &held) - instance.demand().tag_total(tag);
        for zone in instance.demand().demanded_zones(tag) {
            let required = instance.demand().get(tag, zone);
            let in_zone: BTreeSet<SlotId> = held
                .iter()
                .copied()
                .filter(|&s| instance.slot_zone(s) == Some(zone))
                .collect();
            let achieved = influence_of_set(instance, &in_zone);
            if achieved < required {
                violations.push(AuditViolation::ZonalDemandUnmet {
                    tag,
                    zone,
                    required,
                    achieved,
                    deficit: required - achieved,
                });
            }
        }
    }

    AuditReport {
        violations,
        aggregate_slack,
    }
}
