// Build an instance from a billboard inventory and raw check-ins.

use std::path::PathBuf;

use msta::model::ZoneMap;
use msta::scenario::{ingest_billboards, ingest_checkins, instantiate, City, Grouping, SupplySummary};
use msta::{ceg_assign, ScenarioParams, SolverConfig};

pub fn run_example() -> anyhow::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let zones = ZoneMap::grid((40.70, 40.80), (-74.02, -73.92), 1, 5);
    let billboards = ingest_billboards(fixtures.join("billboards_nyc.csv"), &zones)?;
    let trajectories = ingest_checkins(fixtures.join("checkins_nyc.csv"), Grouping::ByUserDay, 3600)?;
    println!("{} billboards, {} trajectories", billboards.len(), trajectories.len());

    // one week of hourly ticks cut into 12-hour slots
    let first = trajectories.iter().flat_map(|t| &t.points).map(|p| p.tick).min().unwrap_or(0);
    let params = ScenarioParams {
        zone_count: zones.len(),
        tag_count: 8,
        theta: 0.5,
        lambda_m: 1_000.0,
        temporal_gating: true,
        horizon: msta::model::Horizon::new(first, first + 7 * 24, 12),
        ..Default::default()
    };
    let instance = instantiate(
        City {
            zones,
            billboards,
            trajectories,
        },
        &params,
    )?;
    let supply = SupplySummary::of(&instance);
    println!(
        "{} slots, sigma* {:.1}, realized theta {:.3}",
        instance.slot_count(),
        supply.sigma_star,
        supply.theta()
    );
    let a = ceg_assign(&instance, &SolverConfig::default());
    println!("ceg handled {} of {} tags", a.handled_count(), instance.tag_count());
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
