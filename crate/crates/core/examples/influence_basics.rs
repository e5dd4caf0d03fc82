// Influence of slot sets: exposure probabilities from trajectories, the
// coverage function over slots, and its incremental form.

use msta::influence::{haversine_m, influence_prob, open_coverage, InfluenceModel};
use msta::model::{Billboard, BillboardId, LatLon, Trajectory, TrajectoryId, TrajectoryPoint, ZoneId};
use msta::scenario::{matrix_instance, MatrixSpec};
use msta::{influence, zonal_influence, SlotId};

pub fn run_example() -> anyhow::Result<()> {
    let times_square = LatLon::new(40.7580, -73.9855);
    let billboard = Billboard {
        id: BillboardId(0),
        external_id: 17,
        location: times_square,
        zone: ZoneId(0),
    };
    let walk = Trajectory {
        id: TrajectoryId(0),
        points: [(40.7570, -73.9860), (40.7585, -73.9850), (40.7600, -73.9840)]
            .iter()
            .enumerate()
            .map(|(i, &(lat, lon))| TrajectoryPoint {
                location: LatLon::new(lat, lon),
                tick: i as i64,
            })
            .collect(),
    };
    let nearest = walk
        .points
        .iter()
        .map(|p| haversine_m(times_square, p.location))
        .fold(f64::INFINITY, f64::min);
    println!("nearest approach: {nearest:.1} m");
    for model in [InfluenceModel::indicator(100.0), InfluenceModel::decay(100.0)] {
        println!("{:?}: Pr = {:.4}", model.kind, influence_prob(&billboard, &walk, &model));
    }

    // three billboards, two zones, four trajectories
    let inst = matrix_instance(&MatrixSpec {
        zone_of: vec![0, 0, 1],
        probabilities: vec![
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.5, 0.0, 0.9, 0.0],
            vec![0.0, 0.0, 0.3, 1.0],
        ],
        costs: vec![vec![1], vec![1], vec![1]],
        demand: vec![vec![1.0, 1.0]],
        budget: 3,
    });
    let all = [SlotId(0), SlotId(1), SlotId(2)];
    println!("I(all) = {:.4}", influence(&inst, all)?);
    println!("I(all) restricted to zone 0 = {:.4}", zonal_influence(&inst, all, ZoneId(0))?);

    let mut cov = open_coverage(&inst);
    for s in all {
        let gain = cov.add_slot(s)?;
        println!("add {s}: gain {gain:.4}, total {:.4}", cov.current_influence());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
