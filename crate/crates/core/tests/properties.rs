use std::collections::BTreeSet;

use proptest::prelude::*;

use msta::ceg::{build_candidate, SlotPool};
use msta::influence::open_coverage;
use msta::scenario::{matrix_instance, MatrixSpec};
use msta::{
    ceg_assign, ceg_assign_traced, exact_optimal, gen_compact, influence, random_assign,
    topk_assign, verify_allocation, Allocation, CompactParams, Instance, OracleLimits, Seed,
    SlotId, SolverConfig, TagId,
};

fn compact(seed: u64, zones: usize, per_tag_costs: bool) -> Instance {
    gen_compact(&CompactParams {
        billboards: 8,
        slots_per_billboard: 2,
        zones,
        tags: 4,
        per_tag_costs,
        seed,
        ..Default::default()
    })
}

/// Recomputes every candidate every round.
fn reference_ceg(instance: &Instance, config: &SolverConfig) -> Allocation {
    let mut pool = SlotPool::full(instance);
    let mut open: Vec<TagId> = (0..instance.tag_count()).map(TagId::from).collect();
    let mut allocation = Allocation::empty(instance.tag_count());
    while !open.is_empty() {
        let best = open
            .iter()
            .map(|&t| build_candidate(instance, t, &pool, config).unwrap())
            .min_by_key(|c| (c.cost, c.tag))
            .unwrap();
        let Some(cost) = best.cost.finite() else { break };
        if allocation.total_cost + cost > instance.budget() {
            break;
        }
        pool.take(&best.slots);
        open.retain(|&t| t != best.tag);
        allocation.commit(best.tag, best.slots, cost);
    }
    allocation
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn influence_is_bounded_monotone_and_submodular(
        seed in any::<u64>(),
        a in prop::collection::btree_set(0u32..16, 0..8),
        b in prop::collection::btree_set(0u32..16, 0..8),
        e in 0u32..16,
    ) {
        let inst = compact(seed, 2, false);
        let small: BTreeSet<u32> = a.clone();
        let large: BTreeSet<u32> = a.union(&b).copied().collect();
        let f = |s: &BTreeSet<u32>| influence(&inst, s.iter().map(|&i| SlotId(i))).unwrap();
        let (fs, fl) = (f(&small), f(&large));
        prop_assert!(fs >= 0.0 && fl <= inst.trajectory_count() as f64 + 1e-9);
        prop_assert!(fs <= fl + 1e-9);
        if !large.contains(&e) {
            let with = |s: &BTreeSet<u32>| {
                let mut t = s.clone();
                t.insert(e);
                f(&t) - f(s)
            };
            prop_assert!(with(&small) >= with(&large) - 1e-9);
        }
    }

    #[test]
    fn incremental_matches_batch(seed in any::<u64>(), order in Just((0u32..16).collect::<Vec<_>>()).prop_shuffle()) {
        let inst = compact(seed, 2, false);
        let mut cov = open_coverage(&inst);
        for (i, &s) in order.iter().enumerate() {
            let before = cov.current_influence();
            let gain = cov.gain(SlotId(s));
            let added = cov.add_slot(SlotId(s)).unwrap();
            prop_assert!((gain - added).abs() < 1e-12);
            prop_assert!((cov.current_influence() - before - added).abs() < 1e-12);
            let batch = influence(&inst, order[..=i].iter().map(|&x| SlotId(x))).unwrap();
            prop_assert!((cov.current_influence() - batch).abs() < 1e-9);
        }
    }

    #[test]
    fn every_method_passes_the_audit(seed in any::<u64>(), zones in 1usize..4, per_tag in any::<bool>()) {
        let inst = compact(seed, zones, per_tag);
        for a in [
            ceg_assign(&inst, &SolverConfig::default()),
            ceg_assign(&inst, &SolverConfig::greedy_only()),
            random_assign(&inst, Seed(seed)),
            topk_assign(&inst),
        ] {
            let report = verify_allocation(&inst, &a);
            prop_assert!(report.is_feasible(), "{:?}", report.violations);
            prop_assert!(a.total_cost <= inst.budget());
        }
    }

    #[test]
    fn cached_ceg_matches_reference(seed in any::<u64>(), zones in 1usize..4, per_tag in any::<bool>(), threshold in 0usize..10) {
        let inst = compact(seed, zones, per_tag);
        // thresholds inside the zone sizes make zones switch to exact mid-run
        let config = SolverConfig { exact_threshold: threshold, ..SolverConfig::default() };
        prop_assert_eq!(ceg_assign(&inst, &config), reference_ceg(&inst, &config));
    }

    #[test]
    fn solvers_are_deterministic(seed in any::<u64>()) {
        let inst = compact(seed, 2, true);
        let parallel = SolverConfig { parallel: true, ..SolverConfig::default() };
        prop_assert_eq!(ceg_assign(&inst, &SolverConfig::default()), ceg_assign(&inst, &parallel));
        prop_assert_eq!(random_assign(&inst, Seed(seed)), random_assign(&inst, Seed(seed)));
        prop_assert_eq!(gen_compact(&CompactParams { seed, ..Default::default() }),
                        gen_compact(&CompactParams { seed, ..Default::default() }));
    }

    #[test]
    fn exact_commit_costs_never_decrease(seed in any::<u64>(), zones in 1usize..4, per_tag in any::<bool>()) {
        let inst = compact(seed, zones, per_tag);
        let run = ceg_assign_traced(&inst, &SolverConfig::exact());
        prop_assert!(run.commits.windows(2).all(|w| w[0].cost <= w[1].cost));
    }

    #[test]
    fn oracle_ignores_slot_numbering(
        seed in 0u64..1000,
        perm in Just((0usize..10).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let zone_of: Vec<u32> = (0..10).map(|i| if i < 2 { i } else { rng.gen_range(0..2) }).collect();
        let probabilities: Vec<Vec<f64>> = (0..10)
            .map(|_| (0..6).map(|_| if rng.gen_bool(0.4) { rng.gen_range(0.1..1.0) } else { 0.0 }).collect())
            .collect();
        let costs: Vec<Vec<u64>> = (0..10).map(|_| (0..3).map(|_| rng.gen_range(0..5)).collect()).collect();
        let demand: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..2).map(|_| if rng.gen_bool(0.6) { rng.gen_range(0.2..1.5) } else { 0.0 }).collect())
            .map(|mut row: Vec<f64>| { if row.iter().all(|&d| d == 0.0) { row[0] = 0.5; } row })
            .collect();
        let budget = rng.gen_range(0..15);
        let spec = MatrixSpec { zone_of, probabilities, costs, demand, budget };
        let permuted = MatrixSpec {
            zone_of: perm.iter().map(|&i| spec.zone_of[i]).collect(),
            probabilities: perm.iter().map(|&i| spec.probabilities[i].clone()).collect(),
            costs: perm.iter().map(|&i| spec.costs[i].clone()).collect(),
            ..spec.clone()
        };
        let a = exact_optimal(&matrix_instance(&spec), &OracleLimits::default()).unwrap();
        let b = exact_optimal(&matrix_instance(&permuted), &OracleLimits::default()).unwrap();
        prop_assert_eq!(a.optimum, b.optimum);
    }
}
