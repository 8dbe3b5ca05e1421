use std::path::PathBuf;

use planar_slide::trajectory::{
    observed_steps, read_csv, write_csv, write_plot_data, TrajectoryError,
};
use planar_slide::{load_scenario, COLUMNS};
use planar_slide_core::simulate;
use planar_slide_core::sysid::{batch_estimate, SysidError, DEFAULT_FLOOR};

fn example(name: &str) -> planar_slide_core::Scenario {
    load_scenario(
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("scenarios")
            .join(name),
    )
    .unwrap()
}

fn csv_bytes(name: &str) -> Vec<u8> {
    let traj = simulate(&example(name)).unwrap();
    let mut out = Vec::new();
    write_csv(&mut out, &traj.records).unwrap();
    out
}

#[test]
fn header_and_row_count() {
    let text = String::from_utf8(csv_bytes("example1.toml")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
    assert_eq!(lines.count(), 45);
}

#[test]
fn values_round_trip_exactly() {
    let scen = example("example3.toml");
    let traj = simulate(&scen).unwrap();
    let mut out = Vec::new();
    write_csv(&mut out, &traj.records).unwrap();
    let rows = read_csv(out.as_slice()).unwrap();
    assert_eq!(rows.len(), traj.records.len());
    for (row, rec) in rows.iter().zip(&traj.records) {
        assert_eq!(row.state, rec.state);
        assert_eq!(row.normal, rec.impulse.normal);
        assert_eq!(row.applied.angular, rec.applied.angular);
        assert_eq!(&row.applied.linear[..2], &rec.applied.linear[..2]);
    }
}

#[test]
fn output_is_bit_stable() {
    assert_eq!(csv_bytes("example3.toml"), csv_bytes("example3.toml"));
}

#[test]
fn forced_trajectory_sysid_from_csv() {
    let scen = example("example3.toml");
    let rows = read_csv(csv_bytes("example3.toml").as_slice()).unwrap();
    let s = &scen.slider;
    let est = batch_estimate(
        &observed_steps(&rows),
        s.mass,
        s.inertia_z,
        s.cm_height,
        DEFAULT_FLOOR,
    )
    .unwrap();
    assert!(((est.et_mu - 0.31) / 0.31).abs() <= 1e-6);
    assert!((est.ratio_o - 1.0).abs() <= 1e-6);
    assert!(((est.ratio_r - 1e-4) / 1e-4).abs() <= 1e-6);
}

#[test]
fn header_only_is_all_degenerate() {
    let header = COLUMNS.join(",") + "\n";
    let rows = read_csv(header.as_bytes()).unwrap();
    assert!(rows.is_empty());
    assert_eq!(
        batch_estimate(&observed_steps(&rows), 0.5, 2e-4, 0.08, DEFAULT_FLOOR),
        Err(SysidError::AllDegenerate { skipped: 0 })
    );
}

#[test]
fn schema_mismatch_rejected() {
    let text = "t,q_x\n0.1,0.2\n";
    assert!(matches!(
        read_csv(text.as_bytes()),
        Err(TrajectoryError::Header { .. })
    ));

    let mut bad = String::from_utf8(csv_bytes("example1.toml")).unwrap();
    bad = bad.replacen("e-2,", "e-2x,", 1);
    assert!(matches!(
        read_csv(bad.as_bytes()),
        Err(TrajectoryError::Value { .. })
    ));
}

#[test]
fn plot_data_has_one_file_per_column() {
    let traj = simulate(&example("example1.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_plot_data(dir.path(), &traj.records).unwrap();
    for name in &COLUMNS[1..] {
        let text = std::fs::read_to_string(dir.path().join(format!("{name}.dat"))).unwrap();
        assert_eq!(text.lines().count(), 46, "{name}");
    }
}
