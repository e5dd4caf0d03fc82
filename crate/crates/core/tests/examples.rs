#[allow(dead_code)]
mod influence_basics {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/influence_basics.rs"));
}

#[allow(dead_code)]
mod ceg_solve {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ceg_solve.rs"));
}

#[allow(dead_code)]
mod baselines_compare {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/baselines_compare.rs"));
}

#[allow(dead_code)]
mod exact_oracle {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/exact_oracle.rs"));
}

#[allow(dead_code)]
mod ingest_csv {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ingest_csv.rs"));
}

#[allow(dead_code)]
mod sweep {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sweep.rs"));
}

#[allow(dead_code)]
mod scaling {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scaling.rs"));
}

#[test]
fn influence_basics_runs() {
    influence_basics::run_example().expect("influence_basics example should run");
}

#[test]
fn ceg_solve_runs() {
    ceg_solve::run_example().expect("ceg_solve example should run");
}

#[test]
fn baselines_compare_runs() {
    baselines_compare::run_example().expect("baselines_compare example should run");
}

#[test]
fn exact_oracle_runs() {
    exact_oracle::run_example().expect("exact_oracle example should run");
}

#[test]
fn ingest_csv_runs() {
    ingest_csv::run_example().expect("ingest_csv example should run");
}

#[test]
fn sweep_runs() {
    sweep::run_example().expect("sweep example should run");
}

#[test]
fn scaling_runs() {
    scaling::run_example().expect("scaling example should run");
}
