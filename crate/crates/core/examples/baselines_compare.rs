// CEG against the Random and Top-k baselines on the same instances.

use msta::{ceg_assign, gen_synthetic, random_assign, topk_assign, ScenarioParams, Seed, SolverConfig};

pub fn run_example() -> anyhow::Result<()> {
    println!("{:>5} {:>14} {:>14} {:>14}", "theta", "ceg", "random", "topk");
    for theta in [0.4, 0.8, 1.2] {
        let mut totals = [(0usize, 0u64); 3];
        for seed in 0..5 {
            let instance = gen_synthetic(&ScenarioParams {
                theta,
                seed,
                ..Default::default()
            })?;
            let runs = [
                ceg_assign(&instance, &SolverConfig::default()),
                random_assign(&instance, Seed(seed)),
                topk_assign(&instance),
            ];
            for (t, a) in totals.iter_mut().zip(&runs) {
                t.0 += a.handled_count();
                t.1 += a.total_cost;
            }
        }
        let cell = |(h, c): (usize, u64)| format!("{h:>3} tags/{c:>5}");
        println!(
            "{theta:>5.1} {:>14} {:>14} {:>14}",
            cell(totals[0]),
            cell(totals[1]),
            cell(totals[2])
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
