// Runtime growth of the greedy when one problem dimension doubles.

use msta::experiment::{bench_scaling, BenchConfig};

pub fn run_example() -> anyhow::Result<()> {
    let rows = bench_scaling(&BenchConfig {
        repetitions: 3,
        ..BenchConfig::default()
    })?;
    for r in rows {
        println!(
            "{:>12} {:>5} -> {:<5} {:8.2} ms -> {:8.2} ms  x{:.2} (exponent {:.2})",
            r.axis.name(),
            r.base_size,
            r.doubled_size,
            r.base_ms,
            r.doubled_ms,
            r.ratio,
            r.exponent
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
