#![allow(dead_code)]

use planar_slide_core::{
    AppliedImpulse, BodyPusher, ContactPatch, FrictionParams, MassProperties, RunOptions, Scenario,
    SliderParams, SliderState, StepInputs, WrenchSchedule,
};
use rand::Rng;

pub const SIDE: f64 = 0.05;

pub fn friction() -> FrictionParams {
    FrictionParams {
        mu: 0.31,
        e_t: 1.0,
        e_o: 1.0,
        e_r: 0.01,
    }
}

pub fn square_slider() -> SliderParams {
    SliderParams {
        mass: 0.5,
        inertia_z: 0.5 * 2.0 * SIDE * SIDE / 12.0,
        cm_height: 0.08,
        gravity: 9.8,
        patch: ContactPatch::square(SIDE),
    }
}

pub fn example1() -> Scenario {
    Scenario {
        slider: square_slider(),
        friction: friction(),
        initial: SliderState {
            v_x: 0.7,
            v_y: 0.9,
            w_z: 10.0,
            ..SliderState::default()
        },
        schedule: WrenchSchedule::default(),
        step: 0.01,
        duration: 0.45,
        options: RunOptions::default(),
    }
}

pub fn example2() -> Scenario {
    let (inner, outer) = (0.05, 0.1);
    Scenario {
        slider: SliderParams {
            mass: 1.0,
            inertia_z: 0.5 * (inner * inner + outer * outer),
            cm_height: 0.08,
            gravity: 9.8,
            patch: ContactPatch::Annulus { inner, outer },
        },
        friction: friction(),
        initial: SliderState {
            v_x: 1.3,
            v_y: 0.8,
            w_z: 11.0,
            ..SliderState::default()
        },
        schedule: WrenchSchedule::default(),
        step: 0.01,
        duration: 3.0,
        options: RunOptions::default(),
    }
}

pub fn example3() -> Scenario {
    Scenario {
        initial: SliderState {
            v_x: 0.2,
            v_y: 0.3,
            ..SliderState::default()
        },
        schedule: WrenchSchedule::BodyPusher(BodyPusher {
            point: [-0.5 * SIDE, -0.0025, 0.0],
            direction: [1.0, 0.0],
            mean: 2.2,
            amplitude: 2.0,
            period: 0.1,
        }),
        duration: 3.0,
        ..example1()
    }
}

/// Random step inputs with a moving slider and modest applied loads.
pub fn random_inputs<R: Rng>(rng: &mut R) -> StepInputs {
    let mass = rng.gen_range(0.2..2.0);
    let r = rng.gen_range(0.02..0.1);
    let friction = FrictionParams {
        mu: rng.gen_range(0.1..0.8),
        e_t: rng.gen_range(0.5..1.5),
        e_o: rng.gen_range(0.5..1.5),
        e_r: rng.gen_range(0.005..0.05),
    };
    let h = 0.01;
    let normal = mass * 9.8 * h;
    let body = MassProperties {
        mass,
        inertia_z: 0.5 * mass * r * r,
        cm_height: rng.gen_range(0.0..0.1),
    };
    let start = SliderState {
        v_x: rng.gen_range(-1.5..1.5),
        v_y: rng.gen_range(-1.5..1.5),
        w_z: rng.gen_range(-20.0..20.0),
        ..SliderState::default()
    };
    let load = 0.2 * normal;
    let applied = AppliedImpulse {
        linear: [rng.gen_range(-load..load), rng.gen_range(-load..load), 0.0],
        angular: [
            rng.gen_range(-load..load) * 0.02,
            rng.gen_range(-load..load) * 0.02,
            rng.gen_range(-load..load) * 0.02,
        ],
    };
    StepInputs {
        start,
        applied,
        normal,
        body,
        friction,
        h,
    }
}

/// Step inputs that produced each record of a trajectory.
pub fn record_inputs(scen: &Scenario, traj: &planar_slide_core::Trajectory) -> Vec<StepInputs> {
    let mut before = traj.initial;
    traj.records
        .iter()
        .map(|r| {
            let w = planar_slide_core::wrench_at(&scen.schedule, &before, before.t);
            let inputs = StepInputs {
                start: before,
                applied: planar_slide_core::to_impulse(&w, scen.step),
                normal: planar_slide_core::normal_impulse(&scen.slider, &w, scen.step).unwrap(),
                body: scen.slider.mass_properties(),
                friction: scen.friction,
                h: scen.step,
            };
            before = r.state;
            inputs
        })
        .collect()
}
