mod common;

use planar_slide_core::geometry::rotate;
use planar_slide_core::{simulate, Scenario, SliderState, Termination, TopplePolicy};

fn all_examples() -> [Scenario; 3] {
    [common::example1(), common::example2(), common::example3()]
}

#[test]
fn example_lengths() {
    assert_eq!(simulate(&common::example1()).unwrap().records.len(), 45);
    assert_eq!(simulate(&common::example3()).unwrap().records.len(), 300);
    let ex2 = simulate(&common::example2()).unwrap();
    assert!(matches!(
        ex2.termination,
        Termination::Rest { settled: true, .. }
    ));
}

#[test]
fn ellipsoid_and_slip_identity_every_step() {
    for scen in all_examples() {
        let traj = simulate(&scen).unwrap();
        let inputs = common::record_inputs(&scen, &traj);
        for (r, inp) in traj.records.iter().zip(&inputs) {
            if r.diagnostics.sticking {
                continue;
            }
            let p = &r.impulse;
            let mn = scen.friction.mu * p.normal;
            let gap = scen
                .friction
                .ellipsoid_gap(p.along_x, p.along_y, p.about_z, p.normal);
            assert!(gap.abs() <= 1e-9 * mn * mn, "t = {}", r.state.t);
            let slip = inp.end_slip(&p.unknowns());
            assert!((p.slip_speed - slip.weighted_norm(&scen.friction)).abs() <= 1e-8);
        }
    }
}

#[test]
fn unforced_energy_never_increases() {
    for scen in [common::example1(), common::example2()] {
        let traj = simulate(&scen).unwrap();
        let (m, i) = (scen.slider.mass, scen.slider.inertia_z);
        let mut e = traj.initial.kinetic_energy(m, i);
        for r in &traj.records {
            let next = r.state.kinetic_energy(m, i);
            assert!(next <= e, "energy rose at t = {}", r.state.t);
            e = next;
        }
    }
}

fn rotated(s: &SliderState, a: f64) -> SliderState {
    let [q_x, q_y] = rotate([s.q_x, s.q_y], a);
    let [v_x, v_y] = rotate([s.v_x, s.v_y], a);
    SliderState {
        q_x,
        q_y,
        theta_z: s.theta_z + a,
        v_x,
        v_y,
        ..*s
    }
}

#[test]
fn rotating_the_setup_rotates_the_trajectory() {
    // The pusher is body-fixed, so example 3 is equivariant as well.
    for scen in [common::example1(), common::example3()] {
        let base = simulate(&scen).unwrap();
        for a in [0.3, -1.1, 2.5] {
            let turned = Scenario {
                initial: rotated(&scen.initial, a),
                ..scen.clone()
            };
            let traj = simulate(&turned).unwrap();
            assert_eq!(traj.records.len(), base.records.len());
            for (r, b) in traj.records.iter().zip(&base.records) {
                let want = rotated(&b.state, a);
                let got = r.state;
                let d = [
                    got.q_x - want.q_x,
                    got.q_y - want.q_y,
                    got.theta_z - want.theta_z,
                    got.v_x - want.v_x,
                    got.v_y - want.v_y,
                    got.w_z - want.w_z,
                ];
                assert!(d.iter().all(|x| x.abs() <= 1e-8), "{d:?}");
                let ecp = rotate([b.ecp.x, b.ecp.y], a);
                assert!((r.ecp.x - ecp[0]).abs() <= 1e-8 && (r.ecp.y - ecp[1]).abs() <= 1e-8);
            }
        }
    }
}

#[test]
fn halving_the_step_halves_the_error() {
    let finals: Vec<[f64; 6]> = [0.01, 0.005, 0.0025]
        .iter()
        .map(|&h| {
            let scen = Scenario {
                step: h,
                duration: 0.2,
                ..common::example1()
            };
            let s = simulate(&scen).unwrap().records.last().unwrap().state;
            [s.q_x, s.q_y, s.theta_z, s.v_x, s.v_y, s.w_z]
        })
        .collect();
    let diff = |a: &[f64; 6], b: &[f64; 6]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let ratio = diff(&finals[0], &finals[1]) / diff(&finals[1], &finals[2]);
    assert!((1.5..=3.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn example1_ecp_stays_in_hull_and_off_the_cm() {
    let scen = common::example1();
    let traj = simulate(&scen).unwrap();
    for r in &traj.records {
        assert!(r.ecp.in_hull && r.ecp.in_patch);
        assert!(r.ecp.offset_from(&r.state) > 1e-6);
    }
}

#[test]
fn example2_ecp_settles_under_the_cm() {
    let traj = simulate(&common::example2()).unwrap();
    let Termination::Rest { ecp_offset, .. } = traj.termination else {
        panic!("example 2 did not come to rest");
    };
    assert!(ecp_offset <= 1e-3);
    // The ring's hole contains the CM, so the resting ECP is outside the material.
    let last = traj.records.last().unwrap();
    assert!(last.ecp.in_hull && !last.ecp.in_patch);
}

#[test]
fn example3_spin_follows_the_forcing_period() {
    let traj = simulate(&common::example3()).unwrap();
    let w: Vec<f64> = traj.records.iter().map(|r| r.state.w_z).collect();
    // Angular acceleration per step: its sign pattern repeats every 10 steps.
    let acc: Vec<f64> = w.windows(2).map(|p| p[1] - p[0]).collect();
    let lag = |k: usize| {
        let n = acc.len() - k;
        let mean = acc.iter().sum::<f64>() / acc.len() as f64;
        (0..n)
            .map(|i| (acc[i] - mean) * (acc[i + k] - mean))
            .sum::<f64>()
            / n as f64
    };
    let best = (5..16).max_by(|&a, &b| lag(a).total_cmp(&lag(b))).unwrap();
    assert_eq!(best, 10);
}

#[test]
fn topple_abort_policy() {
    let mut scen = common::example1();
    scen.slider.cm_height = 2.0;
    scen.options.topple_policy = TopplePolicy::Abort;
    let err = simulate(&scen).unwrap_err();
    assert_eq!(err.step, 0);
    scen.options.topple_policy = TopplePolicy::Warn;
    let traj = simulate(&scen).unwrap();
    assert!(traj.records.iter().any(|r| !r.ecp.in_hull));
}

#[test]
fn zero_duration_has_no_records() {
    let scen = Scenario {
        duration: 0.0,
        ..common::example1()
    };
    let traj = simulate(&scen).unwrap();
    assert!(traj.records.is_empty());
    assert_eq!(traj.termination, Termination::Completed);
}

#[test]
fn repeated_runs_are_identical() {
    let scen = common::example3();
    assert_eq!(simulate(&scen).unwrap(), simulate(&scen).unwrap());
}
