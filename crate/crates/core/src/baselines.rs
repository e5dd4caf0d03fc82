//! Random and Top-k allocation baselines.
//!
//! Both walk the tags in ascending id order and fill each demanded zone from
//! the slots still free. A tag is committed only if every demanded zone is met
//! and the budget allows it. Otherwise its slots go back to the pool.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ceg::SlotPool;
use crate::influence::{open_coverage, singleton_influences};
use crate::model::{Allocation, Instance, SlotId, TagId, ZoneId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// Takes slots from `order` until the zone's demand is met.
fn fill_zone(
    instance: &Instance,
    order: impl IntoIterator<Item = SlotId>,
    demand: f64,
) -> Option<BTreeSet<SlotId>> {
    let mut cov = open_coverage(instance);
    let mut taken = BTreeSet::new();
    if demand <= 0.0 {
        return Some(taken);
    }
    for slot in order {
        cov.add_slot(slot).expect("order yields distinct slots");
        taken.insert(slot);
        if cov.current_influence() >= demand
            && crate::influence::influence_of_set(instance, &taken) >= demand
        {
            return Some(taken);
        }
    }
    None
}

fn assign_in_order<F>(instance: &Instance, mut zone_order: F) -> Allocation
where
    F: FnMut(ZoneId, Vec<SlotId>) -> Vec<SlotId>,
{
    let k = instance.tag_count().min(instance.demand().tag_count());
    let mut allocation = Allocation::empty(instance.tag_count());
    let mut pool = SlotPool::full(instance);
    for tag in (0..k).map(TagId::from) {
        let mut picked = BTreeSet::new();
        let mut met = true;
        let mut any_zone = false;
        for zone in instance.demand().demanded_zones(tag) {
            any_zone = true;
            let order = zone_order(zone, pool.free_in_zone(instance, zone));
            match fill_zone(instance, order, instance.demand().get(tag, zone)) {
                Some(slots) => picked.extend(slots),
                None => {
                    met = false;
                    break;
                }
            }
        }
        if !met || !any_zone {
            continue;
        }
        let cost = instance.cost().set_cost(tag, &picked);
        if allocation.total_cost + cost <= instance.budget() {
            pool.take(&picked);
            allocation.commit(tag, picked, cost);
        }
    }
    allocation
}

/// Fills each demanded zone with slots drawn uniformly without replacement.
pub fn random_assign(instance: &Instance, seed: Seed) -> Allocation {
    let mut rng = seed.rng();
    assign_in_order(instance, |_, mut free| {
        free.shuffle(&mut rng);
        free
    })
}

/// Fills each demanded zone with its most influential free slots first.
pub fn topk_assign(instance: &Instance) -> Allocation {
    let singles = singleton_influences(instance);
    assign_in_order(instance, |_, mut free| {
        free.sort_by(|a, b| {
            singles[b.index()]
                .total_cmp(&singles[a.index()])
                .then(a.cmp(b))
        });
        free
    })
}
