//! Time stepping: applied loads, friction solve, state update and ECP.

use alloc::vec::Vec;

use crate::error::{SimulateError, StepError};
use crate::friction::{solve_step, ContactImpulse, SlipVelocity, SolverSettings, StepInputs};
use crate::geometry::rotate;
use crate::model::{ContactPatch, SliderParams, SliderState};
use crate::scenario::{Scenario, TopplePolicy};
use crate::wrench::{normal_impulse, to_impulse, wrench_at, AppliedImpulse};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl From<&SliderState> for Pose {
    fn from(s: &SliderState) -> Self {
        Pose {
            x: s.q_x,
            y: s.q_y,
            theta: s.theta_z,
        }
    }
}

/// Equivalent contact point in world coordinates with patch containment.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Ecp {
    pub x: f64,
    pub y: f64,
    pub in_hull: bool,
    pub in_patch: bool,
}

impl Ecp {
    /// Distance from the CM projection `(q_x, q_y)`.
    pub fn offset_from(&self, state: &SliderState) -> f64 {
        libm::hypot(self.x - state.q_x, self.y - state.q_y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepDiagnostics {
    pub newton_iters: usize,
    pub residual_norm: f64,
    pub rest: bool,
    pub sticking: bool,
    /// Multi-start found a second admissible root.
    pub alternate_root: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    /// End-of-step state.
    pub state: SliderState,
    pub impulse: ContactImpulse,
    pub ecp: Ecp,
    pub applied: AppliedImpulse,
    pub diagnostics: StepDiagnostics,
}

/// Contact-point velocity for a rigid body: `v + ω × r`, plus the spin.
pub fn slip_velocity(state: &SliderState, ecp_offset: [f64; 2]) -> SlipVelocity {
    SlipVelocity {
        x: state.v_x - state.w_z * ecp_offset[1],
        y: state.v_y + state.w_z * ecp_offset[0],
        spin: state.w_z,
    }
}

/// ECP from the moment balance about the horizontal axes through the CM.
///
/// The support plane is `z = 0`, so the CM sits `cm_height` above the ECP.
pub fn ecp(
    params: &SliderParams,
    imp: &ContactImpulse,
    applied: &AppliedImpulse,
    pose: Pose,
) -> Ecp {
    let qz = params.cm_height;
    let x = (applied.angular[1] - imp.along_x * qz) / imp.normal + pose.x;
    let y = (-applied.angular[0] - imp.along_y * qz) / imp.normal + pose.y;
    let (in_hull, in_patch) = validate_patch([x, y], &params.patch, pose);
    Ecp {
        x,
        y,
        in_hull,
        in_patch,
    }
}

/// `(in_hull, in_patch)` for a world-frame point against the patch placed at `pose`.
pub fn validate_patch(point: [f64; 2], patch: &ContactPatch, pose: Pose) -> (bool, bool) {
    let local = rotate([point[0] - pose.x, point[1] - pose.y], -pose.theta);
    (patch.hull_contains(local), patch.material_contains(local))
}

/// Inputs of the friction solve for the step starting at `state_u`. The
/// applied wrench is sampled at the start of the step.
pub fn step_inputs(state_u: &SliderState, scen: &Scenario) -> Result<StepInputs, StepError> {
    let h = scen.step;
    let wrench = wrench_at(&scen.schedule, state_u, state_u.t);
    Ok(StepInputs {
        start: *state_u,
        applied: to_impulse(&wrench, h),
        normal: normal_impulse(&scen.slider, &wrench, h)?,
        body: scen.slider.mass_properties(),
        friction: scen.friction,
        h,
    })
}

fn advance(
    state_u: &SliderState,
    t_next: f64,
    scen: &Scenario,
    settings: &SolverSettings,
    guess: Option<&ContactImpulse>,
) -> Result<TrajectoryRecord, StepError> {
    let h = scen.step;
    let inputs = step_inputs(state_u, scen)?;
    let (applied, normal) = (inputs.applied, inputs.normal);
    let sol = solve_step(&inputs, guess, settings)?;

    let (state, ecp_impulse) = if sol.sticking {
        // At rest the friction only has to hold the applied load.
        let hold = ContactImpulse {
            along_x: -applied.linear[0],
            along_y: -applied.linear[1],
            about_z: -applied.angular[2],
            slip_speed: 0.0,
            normal,
        };
        let state = SliderState {
            v_x: 0.0,
            v_y: 0.0,
            w_z: 0.0,
            t: t_next,
            ..*state_u
        };
        (state, hold)
    } else {
        let [v_x, v_y, w_z] = inputs.end_velocity(&sol.impulse.unknowns());
        let state = SliderState {
            q_x: state_u.q_x + h * v_x,
            q_y: state_u.q_y + h * v_y,
            theta_z: state_u.theta_z + h * w_z,
            v_x,
            v_y,
            w_z,
            t: t_next,
        };
        (state, sol.impulse)
    };

    let ecp = ecp(&scen.slider, &ecp_impulse, &applied, Pose::from(&state));
    if !ecp.in_hull && scen.options.topple_policy == TopplePolicy::Abort {
        return Err(StepError::ToppleRisk { x: ecp.x, y: ecp.y });
    }
    Ok(TrajectoryRecord {
        state,
        impulse: sol.impulse,
        ecp,
        applied,
        diagnostics: StepDiagnostics {
            newton_iters: sol.iterations,
            residual_norm: sol.residual_norm,
            rest: sol.rest,
            sticking: sol.sticking,
            alternate_root: sol.alternate_root.is_some(),
        },
    })
}

/// One backward-Euler step from `state_u`, warm-started from `guess`.
pub fn step(
    state_u: &SliderState,
    scen: &Scenario,
    guess: Option<&ContactImpulse>,
) -> Result<TrajectoryRecord, StepError> {
    advance(
        state_u,
        state_u.t + scen.step,
        scen,
        &scen.solver_settings(),
        guess,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// Ran for the full duration.
    Completed,
    /// Stopped early: step `step` (zero-based) ended at rest.
    Rest {
        step: usize,
        /// ECP distance from the CM projection in the final record (m).
        ecp_offset: f64,
        /// `ecp_offset` is within the scenario's rest tolerance.
        settled: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub initial: SliderState,
    pub records: Vec<TrajectoryRecord>,
    pub termination: Termination,
}

/// Step-by-step rollout of a scenario, warm-starting each solve from the
/// previous one. Stops after the last step or after a resting step.
pub struct Simulator<'a> {
    scen: &'a Scenario,
    settings: SolverSettings,
    state: SliderState,
    guess: Option<ContactImpulse>,
    next: usize,
    total: usize,
    finished: bool,
}

impl<'a> Simulator<'a> {
    pub fn new(scen: &'a Scenario) -> Self {
        Simulator {
            scen,
            settings: scen.solver_settings(),
            state: scen.initial,
            guess: None,
            next: 0,
            total: scen.step_count(),
            finished: false,
        }
    }

    /// Replace the solver settings derived from the scenario.
    pub fn with_settings(mut self, settings: SolverSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn state(&self) -> &SliderState {
        &self.state
    }

    /// Index of the step the next call to `next` will take.
    pub fn step_index(&self) -> usize {
        self.next
    }
}

impl Iterator for Simulator<'_> {
    type Item = Result<TrajectoryRecord, SimulateError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished || self.next >= self.total {
            return None;
        }
        let k = self.next;
        let t_next = self.scen.initial.t + (k + 1) as f64 * self.scen.step;
        match advance(
            &self.state,
            t_next,
            self.scen,
            &self.settings,
            self.guess.as_ref(),
        ) {
            Ok(rec) => {
                self.next += 1;
                self.state = rec.state;
                self.guess = (!rec.diagnostics.sticking).then_some(rec.impulse);
                if rec.diagnostics.rest {
                    self.finished = true;
                }
                Some(Ok(rec))
            }
            Err(source) => {
                self.finished = true;
                Some(Err(SimulateError { step: k, source }))
            }
        }
    }
}

/// Run a scenario to completion or rest.
pub fn simulate(scen: &Scenario) -> Result<Trajectory, SimulateError> {
    let records = Simulator::new(scen).collect::<Result<Vec<_>, _>>()?;
    let termination = match records.last() {
        Some(last) if last.diagnostics.rest => {
            let ecp_offset = last.ecp.offset_from(&last.state);
            Termination::Rest {
                step: records.len() - 1,
                ecp_offset,
                settled: ecp_offset <= scen.options.rest_ecp_tolerance,
            }
        }
        _ => Termination::Completed,
    };
    Ok(Trajectory {
        initial: scen.initial,
        records,
        termination,
    })
}
