//! Applied loads: world-frame wrenches, their time schedules, and impulses.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{ModelError, StepError};
use crate::geometry::rotate;
use crate::model::{positive, SliderParams, SliderState};

/// World-frame force (N) and moment about the CM (N·m).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AppliedWrench {
    pub force: [f64; 3],
    pub torque: [f64; 3],
}

/// Wrench integrated over one step: `h * wrench`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AppliedImpulse {
    /// N·s
    pub linear: [f64; 3],
    /// N·m·s
    pub angular: [f64; 3],
}

impl AppliedWrench {
    pub const ZERO: AppliedWrench = AppliedWrench {
        force: [0.0; 3],
        torque: [0.0; 3],
    };

    pub fn is_finite(&self) -> bool {
        self.force.iter().chain(&self.torque).all(|c| c.is_finite())
    }

    pub fn scaled(&self, k: f64) -> AppliedWrench {
        AppliedWrench {
            force: self.force.map(|c| c * k),
            torque: self.torque.map(|c| c * k),
        }
    }
}

impl AppliedImpulse {
    pub const ZERO: AppliedImpulse = AppliedImpulse {
        linear: [0.0; 3],
        angular: [0.0; 3],
    };
}

/// A force of periodic magnitude `mean + amplitude * cos(2πt/period)` applied
/// at a point fixed in the body, along a body-fixed horizontal direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyPusher {
    /// Application point relative to the CM, body frame (m).
    pub point: [f64; 3],
    /// Unit direction in the slider plane, body frame.
    pub direction: [f64; 2],
    /// N
    pub mean: f64,
    /// N
    pub amplitude: f64,
    /// s
    pub period: f64,
}

impl BodyPusher {
    pub fn magnitude(&self, t: f64) -> f64 {
        self.mean + self.amplitude * libm::cos(2.0 * PI * t / self.period)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WrenchSchedule {
    Constant(AppliedWrench),
    BodyPusher(BodyPusher),
    /// Time-stamped samples with zero-order hold; zero before the first sample.
    Table(Vec<(f64, AppliedWrench)>),
}

impl Default for WrenchSchedule {
    fn default() -> Self {
        WrenchSchedule::Constant(AppliedWrench::ZERO)
    }
}

impl WrenchSchedule {
    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            WrenchSchedule::Constant(w) => {
                if !w.is_finite() {
                    return Err(ModelError::invalid("schedule", "finite", f64::NAN));
                }
            }
            WrenchSchedule::BodyPusher(p) => {
                positive("schedule.period", p.period)?;
                if !p.point.iter().all(|c| c.is_finite())
                    || !p.mean.is_finite()
                    || !p.amplitude.is_finite()
                {
                    return Err(ModelError::invalid("schedule", "finite", f64::NAN));
                }
                let norm = libm::hypot(p.direction[0], p.direction[1]);
                if !((norm - 1.0).abs() <= 1e-9) {
                    return Err(ModelError::invalid(
                        "schedule.direction",
                        "a unit vector",
                        norm,
                    ));
                }
            }
            WrenchSchedule::Table(samples) => {
                for (i, pair) in samples.windows(2).enumerate() {
                    if !(pair[1].0 > pair[0].0) {
                        return Err(ModelError::NonIncreasingTable(i + 1));
                    }
                }
                if samples
                    .iter()
                    .any(|(t, w)| !t.is_finite() || !w.is_finite())
                {
                    return Err(ModelError::invalid("schedule.samples", "finite", f64::NAN));
                }
            }
        }
        Ok(())
    }
}

/// World-frame wrench applied at time `t` with the slider in `state`.
///
/// For a body pusher, both the application point and the force direction
/// rotate with `theta_z`; the moment is `r × f` with `r` the world-frame
/// lever arm from the CM, so a vertical offset of the point produces
/// horizontal moment components.
pub fn wrench_at(schedule: &WrenchSchedule, state: &SliderState, t: f64) -> AppliedWrench {
    match schedule {
        WrenchSchedule::Constant(w) => *w,
        WrenchSchedule::BodyPusher(p) => {
            let mag = p.magnitude(t);
            let [rx, ry] = rotate([p.point[0], p.point[1]], state.theta_z);
            let r = [rx, ry, p.point[2]];
            let [dx, dy] = rotate(p.direction, state.theta_z);
            let f = [mag * dx, mag * dy, 0.0];
            AppliedWrench {
                force: f,
                torque: cross3(r, f),
            }
        }
        WrenchSchedule::Table(samples) => {
            let idx = samples.partition_point(|(ts, _)| *ts <= t);
            if idx == 0 {
                AppliedWrench::ZERO
            } else {
                samples[idx - 1].1
            }
        }
    }
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn to_impulse(w: &AppliedWrench, h: f64) -> AppliedImpulse {
    AppliedImpulse {
        linear: w.force.map(|c| c * h),
        angular: w.torque.map(|c| c * h),
    }
}

/// Normal impulse over one step with contact maintained: `h (m g - f_z)`.
pub fn normal_impulse(params: &SliderParams, w: &AppliedWrench, h: f64) -> Result<f64, StepError> {
    let load = params.mass * params.gravity - w.force[2];
    if load > 0.0 {
        Ok(h * load)
    } else {
        Err(StepError::ContactLoss { normal_load: load })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ContactPatch;

    fn pusher(mean: f64, amplitude: f64) -> BodyPusher {
        BodyPusher {
            point: [-0.025, 0.0, -0.0025],
            direction: [1.0, 0.0],
            mean,
            amplitude,
            period: 0.1,
        }
    }

    fn params(mass: f64) -> SliderParams {
        SliderParams {
            mass,
            inertia_z: 1e-3,
            cm_height: 0.08,
            gravity: 9.8,
            patch: ContactPatch::square(0.05),
        }
    }

    // Independent 3D cross product written out via the Levi-Civita sum.
    fn levi_civita_cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..3 {
                for k in 0..3 {
                    let eps = match (i, j, k) {
                        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
                        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
                        _ => 0.0,
                    };
                    *o += eps * a[j] * b[k];
                }
            }
        }
        out
    }

    #[test]
    fn zero_constant_schedule() {
        let s = WrenchSchedule::Constant(AppliedWrench::ZERO);
        assert_eq!(
            wrench_at(&s, &SliderState::default(), 3.7),
            AppliedWrench::ZERO
        );
    }

    #[test]
    fn pusher_magnitude_follows_cosine() {
        let s = WrenchSchedule::BodyPusher(pusher(2.2, 2.0));
        let st = SliderState::default();
        let w0 = wrench_at(&s, &st, 0.0);
        assert!((w0.force[0] - 4.2).abs() < 1e-12);
        let w1 = wrench_at(&s, &st, 0.05);
        assert!((w1.force[0] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn pusher_below_cm_gives_pitch_moment() {
        let s = WrenchSchedule::BodyPusher(pusher(1.0, 0.0));
        let w = wrench_at(&s, &SliderState::default(), 0.0);
        let expected = levi_civita_cross([-0.025, 0.0, -0.0025], [1.0, 0.0, 0.0]);
        assert_eq!(w.force, [1.0, 0.0, 0.0]);
        assert!((w.torque[1] - (-0.0025)).abs() < 1e-15);
        assert_eq!(w.torque[2], 0.0);
        for i in 0..3 {
            assert!((w.torque[i] - expected[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn pusher_rotates_with_body() {
        let p = BodyPusher {
            point: [-0.025, -0.0025, 0.01],
            ..pusher(1.5, 0.0)
        };
        let s = WrenchSchedule::BodyPusher(p);
        let st = SliderState {
            theta_z: 0.7,
            ..SliderState::default()
        };
        let w = wrench_at(&s, &st, 0.0);
        let r = rotate([p.point[0], p.point[1]], 0.7);
        let d = rotate(p.direction, 0.7);
        let f = [1.5 * d[0], 1.5 * d[1], 0.0];
        let expected = levi_civita_cross([r[0], r[1], 0.01], f);
        for i in 0..3 {
            assert!((w.force[i] - f[i]).abs() < 1e-15);
            assert!((w.torque[i] - expected[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn table_zero_order_hold() {
        let a = AppliedWrench {
            force: [1.0, 0.0, 0.0],
            torque: [0.0; 3],
        };
        let b = AppliedWrench {
            force: [0.0, 2.0, 0.0],
            torque: [0.0, 0.0, 0.1],
        };
        let s = WrenchSchedule::Table(alloc::vec![(0.1, a), (0.2, b)]);
        let st = SliderState::default();
        assert_eq!(wrench_at(&s, &st, 0.05), AppliedWrench::ZERO);
        assert_eq!(wrench_at(&s, &st, 0.1), a);
        assert_eq!(wrench_at(&s, &st, 0.19), a);
        assert_eq!(wrench_at(&s, &st, 5.0), b);
        let bad = WrenchSchedule::Table(alloc::vec![(0.2, a), (0.2, b)]);
        assert_eq!(bad.validate(), Err(ModelError::NonIncreasingTable(1)));
    }

    #[test]
    fn impulse_scaling() {
        assert_eq!(to_impulse(&AppliedWrench::ZERO, 0.01), AppliedImpulse::ZERO);
        let w = AppliedWrench {
            force: [2.2, 0.0, 0.0],
            torque: [0.0, 0.0, 0.5],
        };
        assert!((to_impulse(&w, 0.01).linear[0] - 0.022).abs() < 1e-15);
        assert!((to_impulse(&w, 0.02).angular[2] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn normal_impulse_and_lift_off() {
        let h = 0.01;
        assert!(
            (normal_impulse(&params(0.5), &AppliedWrench::ZERO, h).unwrap() - 0.049).abs() < 1e-15
        );
        assert!(
            (normal_impulse(&params(1.0), &AppliedWrench::ZERO, h).unwrap() - 0.098).abs() < 1e-15
        );
        let lift = AppliedWrench {
            force: [0.0, 0.0, 0.5 * 9.8],
            torque: [0.0; 3],
        };
        assert!(matches!(
            normal_impulse(&params(0.5), &lift, h),
            Err(StepError::ContactLoss { .. })
        ));
    }

    proptest::proptest! {
        #[test]
        fn impulse_is_linear(alpha in -5.0f64..5.0, fx in -3.0f64..3.0, tz in -1.0f64..1.0, h in 1e-4f64..0.1) {
            let w = AppliedWrench { force: [fx, 0.3, -0.2], torque: [0.01, -0.02, tz] };
            let lhs = to_impulse(&w.scaled(alpha), h);
            let rhs = to_impulse(&w, h);
            for i in 0..3 {
                proptest::prop_assert!((lhs.linear[i] - alpha * rhs.linear[i]).abs() <= 1e-14);
                proptest::prop_assert!((lhs.angular[i] - alpha * rhs.angular[i]).abs() <= 1e-14);
            }
        }

        #[test]
        fn pusher_is_periodic(t in 0.0f64..3.0, k in 1u32..20, theta in -3.0f64..3.0) {
            let s = WrenchSchedule::BodyPusher(pusher(2.2, 2.0));
            let st = SliderState { theta_z: theta, ..SliderState::default() };
            let a = wrench_at(&s, &st, t);
            let b = wrench_at(&s, &st, t + k as f64 * 0.1);
            for i in 0..3 {
                proptest::prop_assert!((a.force[i] - b.force[i]).abs() < 1e-9);
                proptest::prop_assert!((a.torque[i] - b.torque[i]).abs() < 1e-9);
            }
        }

        #[test]
        fn normal_ignores_tangential_load(fx in -10.0f64..10.0, fy in -10.0f64..10.0, tz in -1.0f64..1.0) {
            let w = AppliedWrench { force: [fx, fy, 0.3], torque: [0.1, 0.2, tz] };
            let w0 = AppliedWrench { force: [0.0, 0.0, 0.3], torque: [0.0; 3] };
            let p = params(0.5);
            proptest::prop_assert_eq!(normal_impulse(&p, &w, 0.01), normal_impulse(&p, &w0, 0.01));
        }
    }
}
