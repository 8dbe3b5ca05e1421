//! Planar sliding of a rigid body with distributed patch contact.
//!
//! The contact patch is replaced by a single equivalent contact point (ECP)
//! carrying the net friction force and moment. With backward-Euler time
//! stepping, each step reduces to four quadratic equations in the two
//! tangential friction impulses, the friction moment impulse and the slip
//! speed. Once those are known, the end-of-step velocities, the pose and the
//! ECP follow from linear relations.
//!
//! Modules:
//!
//! - [`model`], [`wrench`]: parameters, state, patch geometry, applied loads.
//! - [`friction`]: residual, Jacobian and damped Newton solve for one step.
//! - [`stepper`]: time stepping, ECP recovery, patch validation, rollout.
//! - [`closed_form`]: quasi-static pushing and pure translation.
//! - [`sysid`]: friction-parameter identification from trajectories.
//! - [`oracle`]: slow, independent reference solver used for cross-checks.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod closed_form;
pub mod error;
pub mod friction;
pub mod geometry;
mod linalg;
pub mod model;
pub mod oracle;
pub mod scenario;
pub mod stepper;
pub mod sysid;
pub mod wrench;

pub use error::{ModelError, SimulateError, SolveError, StepError};
pub use friction::{
    jacobian, max_dissipation_impulse, residual, solve_step, ContactImpulse, SlipVelocity,
    SolverSettings, StepInputs, StepSolution,
};
pub use model::{ContactPatch, FrictionParams, MassProperties, SliderParams, SliderState};
pub use scenario::{RunOptions, Scenario, TopplePolicy};
pub use stepper::{
    ecp, simulate, slip_velocity, step, step_inputs, validate_patch, Ecp, Pose, Simulator,
    StepDiagnostics, Termination, Trajectory, TrajectoryRecord,
};
pub use wrench::{
    normal_impulse, to_impulse, wrench_at, AppliedImpulse, AppliedWrench, BodyPusher,
    WrenchSchedule,
};
