// Exact optimum on small instances and the greedy's guarantee against it.

use msta::{ceg_assign, exact_optimal, gen_compact, CompactParams, OracleLimits, SolverConfig};

pub fn run_example() -> anyhow::Result<()> {
    for seed in 0..8 {
        let instance = gen_compact(&CompactParams {
            billboards: 6,
            slots_per_billboard: 2,
            zones: 2,
            tags: 4,
            seed,
            ..Default::default()
        });
        let opt = exact_optimal(&instance, &OracleLimits::default())?;
        let greedy = ceg_assign(&instance, &SolverConfig::default());
        let p = greedy.max_slots_per_tag();
        let floor = opt.optimum.div_ceil(p + 1);
        println!(
            "seed {seed}: opt {} ({} nodes), ceg {}, P* {p}, guaranteed >= {floor}",
            opt.optimum,
            opt.nodes_explored,
            greedy.handled_count()
        );
        anyhow::ensure!(greedy.handled_count() >= floor);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
