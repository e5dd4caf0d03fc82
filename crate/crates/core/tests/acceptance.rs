//! Acceptance gate: every criterion runs in sequence and reports one line.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use msta::experiment::{bench_scaling, run_sweep, summarize, BenchConfig, Method, ScalingAxis, SweepConfig};
use msta::influence::open_coverage;
use msta::model::{Billboard, BillboardId, Horizon, LatLon};
use msta::scenario::{
    enumerate_slots, gen_budget, gen_costs, matrix_instance, snapshot_to_string, MatrixSpec,
    SupplySummary,
};
use msta::{
    ceg_assign, exact_optimal, gen_compact, gen_synthetic, influence, min_cost_zone_cover,
    random_assign, topk_assign, verify_allocation, CompactParams, InfluenceKind, Instance,
    OracleLimits, ScenarioParams, Seed, SlotId, SolverConfig, TagId, ZoneId,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    if ok {
        Ok(detail.into())
    } else {
        Err(detail.into())
    }
}

fn approximation_bound() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let limits = OracleLimits::default();
    let mut worst_margin = i64::MAX;
    for seed in 0..250u64 {
        let slots_per_billboard = rng.gen_range(1..=2);
        let params = CompactParams {
            billboards: rng.gen_range(3..=12 / slots_per_billboard),
            slots_per_billboard,
            zones: rng.gen_range(1..=3),
            tags: rng.gen_range(1..=4),
            trajectories: rng.gen_range(4..16),
            density: rng.gen_range(0.15..0.6),
            fractional: rng.gen_bool(0.7),
            per_tag_costs: rng.gen_bool(0.5),
            max_cost: rng.gen_range(1..10),
            seed,
        };
        let params = CompactParams {
            zones: params.zones.min(params.billboards),
            ..params
        };
        let inst = gen_compact(&params);
        let greedy = ceg_assign(&inst, &SolverConfig::default());
        let audit = verify_allocation(&inst, &greedy);
        if !audit.is_feasible() {
            return Err(format!("seed {seed}: {:?}", audit.violations));
        }
        let opt = exact_optimal(&inst, &limits).map_err(|e| format!("seed {seed}: {e}"))?;
        if opt.timed_out {
            return Err(format!("seed {seed}: oracle ran out of nodes"));
        }
        let floor = opt.optimum.div_ceil(greedy.max_slots_per_tag() + 1);
        worst_margin = worst_margin.min(greedy.handled_count() as i64 - floor as i64);
        if greedy.handled_count() < floor {
            return Err(format!(
                "seed {seed}: handled {} < ceil({}/(P*+1)) = {floor}",
                greedy.handled_count(),
                opt.optimum
            ));
        }
    }
    let elapsed = start.elapsed();
    check(
        elapsed < Duration::from_secs(120),
        format!("250 instances, min slack {worst_margin}, {:.2?}", elapsed),
    )
}

fn feasibility_audit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut n = 0;
    let mut audit = |inst: &Instance, seed: u64| -> Result<(), String> {
        for (name, a) in [
            ("ceg", ceg_assign(inst, &SolverConfig::default())),
            ("random", random_assign(inst, Seed(seed))),
            ("topk", topk_assign(inst)),
        ] {
            let report = verify_allocation(inst, &a);
            if !report.is_feasible() {
                return Err(format!("{name} seed {seed}: {:?}", report.violations));
            }
        }
        n += 1;
        Ok(())
    };
    for seed in 0..600u64 {
        let inst = gen_compact(&CompactParams {
            billboards: rng.gen_range(2..20),
            slots_per_billboard: rng.gen_range(1..4),
            zones: rng.gen_range(1..3),
            tags: rng.gen_range(1..8),
            per_tag_costs: rng.gen_bool(0.5),
            seed,
            ..Default::default()
        });
        audit(&inst, seed)?;
    }
    for seed in 0..400u64 {
        let params = ScenarioParams {
            theta: rng.gen_range(0.3..1.5),
            tag_count: rng.gen_range(2..25),
            zone_count: rng.gen_range(1..5),
            billboard_count: rng.gen_range(10..40),
            trajectory_count: rng.gen_range(50..300),
            influence_kind: if rng.gen_bool(0.5) {
                InfluenceKind::Indicator
            } else {
                InfluenceKind::ExponentialDecay
            },
            temporal_gating: rng.gen_bool(0.3),
            seed,
            ..Default::default()
        };
        let inst = gen_synthetic(&params).map_err(|e| format!("synthetic seed {seed}: {e}"))?;
        audit(&inst, seed)?;
    }
    check(n >= 1000, format!("{n} instances x 3 methods, zero violations"))
}

fn influence_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let instances: Vec<Instance> = (0..20)
        .map(|seed| {
            gen_synthetic(&ScenarioParams {
                billboard_count: 15,
                trajectory_count: 200,
                influence_kind: if seed % 2 == 0 {
                    InfluenceKind::Indicator
                } else {
                    InfluenceKind::ExponentialDecay
                },
                region_m: 1_200.0,
                seed,
                ..Default::default()
            })
            .expect("valid params")
        })
        .collect();
    let batch = |inst: &Instance, s: &BTreeSet<SlotId>| influence(inst, s.iter().copied()).expect("known slots");
    let random_set = |rng: &mut ChaCha8Rng, m: usize, max: usize| -> BTreeSet<SlotId> {
        let n = rng.gen_range(0..=max);
        (0..n).map(|_| SlotId(rng.gen_range(0..m as u32))).collect()
    };
    let mut worst = 0.0f64;
    for i in 0..10_000 {
        let inst = &instances[i % instances.len()];
        let m = inst.slot_count();
        let mut order: Vec<SlotId> = (0..m).map(SlotId::from).collect();
        order.shuffle(&mut rng);
        order.truncate(rng.gen_range(1..=20));
        let mut cov = open_coverage(inst);
        let mut so_far = BTreeSet::new();
        for s in order {
            cov.add_slot(s).map_err(|e| e.to_string())?;
            so_far.insert(s);
        }
        let diff = (cov.current_influence() - batch(inst, &so_far)).abs();
        worst = worst.max(diff);
        if diff > 1e-9 {
            return Err(format!("sequence {i}: incremental differs by {diff:e}"));
        }
    }
    for i in 0..10_000 {
        let inst = &instances[i % instances.len()];
        let small = random_set(&mut rng, inst.slot_count(), 15);
        let extra = random_set(&mut rng, inst.slot_count(), 15);
        let large: BTreeSet<SlotId> = small.union(&extra).copied().collect();
        let (fs, fl) = (batch(inst, &small), batch(inst, &large));
        if fs > fl + 1e-9 || fs < 0.0 || fl > inst.trajectory_count() as f64 + 1e-9 {
            return Err(format!("pair {i}: I(S) = {fs}, I(S') = {fl}"));
        }
    }
    let mut i = 0;
    while i < 10_000 {
        let inst = &instances[i % instances.len()];
        let small = random_set(&mut rng, inst.slot_count(), 15);
        let extra = random_set(&mut rng, inst.slot_count(), 15);
        let large: BTreeSet<SlotId> = small.union(&extra).copied().collect();
        let e = SlotId(rng.gen_range(0..inst.slot_count() as u32));
        if large.contains(&e) {
            continue;
        }
        i += 1;
        let gain = |s: &BTreeSet<SlotId>| {
            let mut t = s.clone();
            t.insert(e);
            batch(inst, &t) - batch(inst, s)
        };
        let (gs, gl) = (gain(&small), gain(&large));
        if gs < gl - 1e-9 {
            return Err(format!("triple {i}: gain {gs} on S < {gl} on S'"));
        }
    }
    Ok(format!("10k sequences (max diff {worst:.1e}), 10k pairs, 10k triples"))
}

/// From-scratch influence over the raw probability rows.
fn raw_influence(probs: &[Vec<f64>], members: &[usize]) -> f64 {
    let t = probs.first().map_or(0, Vec::len);
    (0..t)
        .map(|j| 1.0 - members.iter().map(|&i| 1.0 - probs[i][j]).product::<f64>())
        .sum()
}

fn inner_solver_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut zones = 0;
    let mut strictly_worse = 0;
    while zones < 500 {
        let n = rng.gen_range(1..=12);
        let t = rng.gen_range(3..10);
        let probs: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..t).map(|_| if rng.gen_bool(0.4) { rng.gen_range(0.05..1.0) } else { 0.0 }).collect())
            .collect();
        let costs: Vec<Vec<u64>> = (0..n).map(|_| vec![rng.gen_range(0..12)]).collect();
        let all: Vec<usize> = (0..n).collect();
        let max = raw_influence(&probs, &all);
        if max <= 0.0 {
            continue;
        }
        let demand = max * rng.gen_range(0.1..0.95);
        let inst = matrix_instance(&MatrixSpec {
            zone_of: vec![0; n],
            probabilities: probs.clone(),
            costs: costs.clone(),
            demand: vec![vec![demand]],
            budget: 1_000,
        });
        let free: Vec<SlotId> = (0..n).map(SlotId::from).collect();
        let solve = |config: SolverConfig| {
            min_cost_zone_cover(&inst, ZoneId(0), &free, demand, TagId(0), &config)
                .map_err(|e| e.to_string())?
                .ok_or_else(|| format!("zone {zones}: reachable demand reported infeasible"))
        };
        let greedy = solve(SolverConfig::greedy_only())?;
        let exact = solve(SolverConfig::exact())?;
        let members = |s: &BTreeSet<SlotId>| s.iter().map(|x| x.index()).collect::<Vec<_>>();
        if raw_influence(&probs, &members(&greedy.slots)) < demand
            || raw_influence(&probs, &members(&exact.slots)) < demand
        {
            return Err(format!("zone {zones}: a cover misses the demand"));
        }
        if greedy.cost < exact.cost {
            return Err(format!("zone {zones}: greedy {} < exact {}", greedy.cost, exact.cost));
        }
        let best = (0u32..1 << n)
            .filter_map(|mask| {
                let m: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                (raw_influence(&probs, &m) >= demand).then(|| m.iter().map(|&i| costs[i][0]).sum::<u64>())
            })
            .min()
            .expect("the full set covers");
        if exact.cost != best {
            return Err(format!("zone {zones}: exact {} but enumeration finds {best}", exact.cost));
        }
        strictly_worse += usize::from(greedy.cost > exact.cost);
        zones += 1;
    }
    Ok(format!("{zones} zones, greedy strictly costlier on {strictly_worse}"))
}

fn trend_reproduction() -> Outcome {
    let start = Instant::now();
    let config = SweepConfig {
        repetitions: 60,
        seed: 2024,
        ..SweepConfig::default()
    };
    let records = run_sweep(&config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let ceg = summarize(&records, Method::Ceg);
    let random = summarize(&records, Method::Random);
    let topk = summarize(&records, Method::Topk);
    let mut problems = Vec::new();
    for (name, rows) in [("ceg", &ceg), ("random", &random), ("topk", &topk)] {
        for w in rows.windows(2) {
            if w[1].mean_handled > w[0].mean_handled {
                problems.push(format!("{name} handled rises from theta {} to {}", w[0].theta, w[1].theta));
            }
        }
    }
    for ((c, r), t) in ceg.iter().zip(&random).zip(&topk) {
        if c.mean_handled < t.mean_handled || c.mean_handled < r.mean_handled {
            problems.push(format!("theta {}: ceg handled below a baseline", c.theta));
        }
        if t.mean_cost < c.mean_cost {
            problems.push(format!("theta {}: topk cost below ceg", c.theta));
        }
    }
    if elapsed >= Duration::from_secs(600) {
        problems.push(format!("sweep took {elapsed:.2?}"));
    }
    let table: Vec<String> = ceg
        .iter()
        .zip(&random)
        .zip(&topk)
        .map(|((c, r), t)| {
            format!(
                "θ={:.1}: {:.2}/{:.2}/{:.2}",
                c.theta, c.mean_handled, r.mean_handled, t.mean_handled
            )
        })
        .collect();
    let detail = format!(
        "{} records in {:.2?}; handled ceg/random/topk {}",
        records.len(),
        elapsed,
        table.join(", ")
    );
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", problems.join("; ")))
    }
}

fn scaling_sanity() -> Outcome {
    let rows = bench_scaling(&BenchConfig {
        axes: vec![ScalingAxis::Trajectories, ScalingAxis::Slots, ScalingAxis::Tags],
        repetitions: 5,
        ..BenchConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = Vec::new();
    for r in &rows {
        let limit = match r.axis {
            ScalingAxis::Tags => 5.0,
            _ => 2.5,
        };
        ok &= r.ratio <= limit;
        parts.push(format!("{} x{:.2} (limit {limit})", r.axis.name(), r.ratio));
    }
    check(ok, parts.join(", "))
}

fn generation_fidelity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_theta = 0.0f64;
    for seed in 0..40u64 {
        for theta in [0.4, 0.6, 0.8, 1.0, 1.2] {
            let params = ScenarioParams {
                theta,
                tag_count: rng.gen_range(5..40),
                seed,
                ..Default::default()
            };
            let inst = gen_synthetic(&params).map_err(|e| e.to_string())?;
            let supply = SupplySummary::of(&inst);
            let gap = (supply.theta() - theta).abs();
            worst_theta = worst_theta.max(gap * supply.sigma_star / params.tag_count as f64);
            if gap > params.tag_count as f64 / supply.sigma_star {
                return Err(format!("seed {seed} theta {theta}: realized {}", supply.theta()));
            }
            for s in 0..inst.slot_count() {
                let slot = SlotId::from(s);
                let single = inst.singleton_influence(slot);
                let lo = (0.8 * single / 10.0).floor() as u64;
                let hi = (1.1 * single / 10.0).floor() as u64;
                for t in 0..inst.tag_count() {
                    let c = inst.cost().get(slot, TagId::from(t));
                    if c < lo || c > hi {
                        return Err(format!("seed {seed}: cost {c} outside [{lo}, {hi}]"));
                    }
                }
            }
        }
    }

    for _ in 0..1000 {
        let n = rng.gen_range(1..30);
        let delta = rng.gen_range(1..10i64);
        let t1 = rng.gen_range(-50..50i64);
        let t2 = t1 + delta * rng.gen_range(1..20i64);
        let bbs: Vec<Billboard> = (0..n)
            .map(|i| Billboard {
                id: BillboardId::from(i),
                external_id: i as u64,
                location: LatLon::new(0.0, 0.0),
                zone: ZoneId(0),
            })
            .collect();
        let m = enumerate_slots(&bbs, Horizon::new(t1, t2, delta)).map_err(|e| e.to_string())?.len();
        if m as i64 != (t2 - t1) / delta * n as i64 {
            return Err(format!("n={n}, [{t1}, {t2}), delta={delta}: {m} slots"));
        }
    }

    for seed in 0..5u64 {
        let params = ScenarioParams {
            seed,
            influence_kind: InfluenceKind::ExponentialDecay,
            temporal_gating: seed % 2 == 1,
            ..Default::default()
        };
        let a = snapshot_to_string(&gen_synthetic(&params).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let b = snapshot_to_string(&gen_synthetic(&params).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let compact = |s| snapshot_to_string(&gen_compact(&CompactParams { seed: s, ..Default::default() }));
        if a != b || compact(seed).map_err(|e| e.to_string())? != compact(seed).map_err(|e| e.to_string())? {
            return Err(format!("seed {seed}: generation is not byte-reproducible"));
        }
        let singles: Vec<f64> = (0..50).map(|i| i as f64 * 3.7).collect();
        if gen_costs(&singles, 3, (0.8, 1.1), Seed(seed)) != gen_costs(&singles, 3, (0.8, 1.1), Seed(seed)) {
            return Err("cost generation is not reproducible".into());
        }
        let inst = gen_synthetic(&params).map_err(|e| e.to_string())?;
        if gen_budget(inst.demand(), (0.9, 1.1), Seed(seed)) != gen_budget(inst.demand(), (0.9, 1.1), Seed(seed)) {
            return Err("budget generation is not reproducible".into());
        }
    }
    Ok(format!(
        "200 instances within k/σ* (worst {worst_theta:.2} of the allowance), 1000 slot triples, byte-identical reruns"
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        ("approximation bound vs exact optimum", approximation_bound),
        ("feasibility audit of all methods", feasibility_audit),
        ("influence correctness", influence_correctness),
        ("inner solver sanity", inner_solver_sanity),
        ("trend reproduction", trend_reproduction),
        ("scaling sanity", scaling_sanity),
        ("generation fidelity", generation_fidelity),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        writeln!(err, "{tag} criterion {}: {name} [{took:.2?}]: {detail}", i + 1).unwrap();
        if outcome.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
