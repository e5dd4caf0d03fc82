// A small demand-supply sweep written out as CSV.

use msta::experiment::{emit_report, run_sweep, summarize, ReportFormat, SweepConfig};

pub fn run_example() -> anyhow::Result<()> {
    let config = SweepConfig::from_toml(
        r#"
        theta_list = [0.4, 0.8, 1.2]
        methods = ["ceg", "random", "topk"]
        repetitions = 4
        seed = 42
        "#,
    )?;
    let records = run_sweep(&config)?;
    for &method in &config.methods {
        for s in summarize(&records, method) {
            println!(
                "{method:>6} theta {:.1}: handled {:5.2}, cost {:6.1}",
                s.theta, s.mean_handled, s.mean_cost
            );
        }
    }
    let out = std::env::temp_dir().join("msta_sweep_example.csv");
    emit_report(&records, ReportFormat::Csv, &out)?;
    println!("{} rows -> {}", records.len(), out.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
