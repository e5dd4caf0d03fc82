use msta::experiment::{
    bench_scaling, emit_report, render_report, run_sweep, BenchConfig, Method, MetricsRecord,
    ReportFormat, ScalingAxis, SweepConfig,
};
use msta::{gen_synthetic, ScenarioParams};

fn small_base() -> ScenarioParams {
    ScenarioParams {
        billboard_count: 12,
        trajectory_count: 80,
        tag_count: 4,
        region_m: 800.0,
        ..Default::default()
    }
}

fn without_runtime(records: &[MetricsRecord]) -> Vec<MetricsRecord> {
    records
        .iter()
        .map(|r| MetricsRecord { runtime_ms: 0.0, ..r.clone() })
        .collect()
}

#[test]
fn one_cell_one_record() {
    let config = SweepConfig {
        theta_list: vec![0.8],
        delta_tag_pairs: vec![(0.05, 4)],
        methods: vec![Method::Ceg],
        repetitions: 1,
        base: small_base(),
        ..Default::default()
    };
    let records = run_sweep(&config).unwrap();
    assert_eq!(records.len(), 1);
    let inst = gen_synthetic(&ScenarioParams {
        theta: 0.8,
        tag_count: 4,
        seed: records[0].seed,
        ..small_base()
    })
    .unwrap();
    assert!(records[0].utilized_cost <= inst.budget());
    assert!(records[0].handled_tags <= 4);
}

#[test]
fn repetitions_are_reproducible() {
    let config = SweepConfig {
        theta_list: vec![0.6],
        repetitions: 5,
        base: small_base(),
        ..Default::default()
    };
    let a = run_sweep(&config).unwrap();
    let b = run_sweep(&config).unwrap();
    assert_eq!(a.iter().filter(|r| r.method == Method::Ceg).count(), 5);
    assert_eq!(without_runtime(&a), without_runtime(&b));
    let csv = |r: &[MetricsRecord]| render_report(&without_runtime(r), ReportFormat::Csv).unwrap();
    assert_eq!(csv(&a), csv(&b));
}

#[test]
fn row_count_is_cells_times_methods() {
    let config = SweepConfig {
        theta_list: vec![0.4, 1.2],
        delta_tag_pairs: vec![(0.05, 4), (0.1, 3)],
        lambda_list: vec![80.0, 120.0],
        repetitions: 2,
        base: small_base(),
        ..Default::default()
    };
    let records = run_sweep(&config).unwrap();
    assert_eq!(records.len(), 2 * 2 * 2 * 2 * 3);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    emit_report(&records, ReportFormat::Csv, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), records.len() + 1);
    assert!(emit_report(&records, ReportFormat::Json, dir.path().join("missing/x.json")).is_err());
}

#[test]
fn oracle_runs_when_admitted_and_is_skipped_otherwise() {
    let tiny = ScenarioParams {
        billboard_count: 6,
        trajectory_count: 40,
        zone_count: 2,
        tag_count: 3,
        horizon: msta::model::Horizon::new(0, 2, 1),
        region_m: 500.0,
        ..Default::default()
    };
    let config = SweepConfig {
        theta_list: vec![0.6],
        delta_tag_pairs: vec![(0.1, 3)],
        methods: vec![Method::Ceg, Method::Oracle],
        repetitions: 3,
        base: tiny,
        ..Default::default()
    };
    let records = run_sweep(&config).unwrap();
    assert_eq!(records.len(), 6);
    for pair in records.chunks(2) {
        assert_eq!(pair[0].method, Method::Ceg);
        assert_eq!(pair[1].method, Method::Oracle);
        assert!(pair[1].handled_tags >= pair[0].handled_tags);
    }

    let config = SweepConfig {
        base: small_base(),
        ..config
    };
    let records = run_sweep(&config).unwrap();
    assert!(records.iter().all(|r| r.method == Method::Ceg));
}

#[test]
fn trivial_bench_is_fast() {
    let config = BenchConfig {
        base: ScenarioParams {
            billboard_count: 3,
            trajectory_count: 10,
            tag_count: 1,
            zone_count: 1,
            region_m: 300.0,
            ..Default::default()
        },
        axes: vec![ScalingAxis::Trajectories],
        repetitions: 3,
        ..Default::default()
    };
    let rows = bench_scaling(&config).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].doubled_size, 20);
    assert!(rows[0].base_ms < 1.0, "{} ms", rows[0].base_ms);
}
