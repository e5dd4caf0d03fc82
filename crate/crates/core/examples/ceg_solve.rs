// Solve a synthetic city with the cost-effective greedy and audit the result.

use msta::scenario::{snapshot_from_str, snapshot_to_string};
use msta::{ceg_assign_traced, gen_synthetic, verify_allocation, ScenarioParams, SolverConfig};

pub fn run_example() -> anyhow::Result<()> {
    let params = ScenarioParams {
        theta: 0.8,
        seed: 7,
        ..Default::default()
    };
    let instance = gen_synthetic(&params)?;
    println!(
        "{} slots, {} trajectories, {} tags, budget {}",
        instance.slot_count(),
        instance.trajectory_count(),
        instance.tag_count(),
        instance.budget()
    );

    let run = ceg_assign_traced(&instance, &SolverConfig::default());
    for c in &run.commits {
        println!("commit {} with {} slots at cost {}", c.tag, c.slots.len(), c.cost);
    }
    let a = &run.allocation;
    println!(
        "handled {} of {}, spent {} of {}",
        a.handled_count(),
        instance.tag_count(),
        a.total_cost,
        instance.budget()
    );
    let report = verify_allocation(&instance, a);
    anyhow::ensure!(report.is_feasible(), "audit failed: {:?}", report.violations);
    println!("audit clean, aggregate slack {:.1}", report.aggregate_slack);

    // snapshots reload to the same instance
    let text = snapshot_to_string(&instance)?;
    anyhow::ensure!(snapshot_from_str(&text)? == instance);
    println!("snapshot: {} bytes", text.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
