use alloc::string::String;

use crate::error::ModelError;
use crate::friction::SolverSettings;
use crate::model::{positive, FrictionParams, SliderParams, SliderState};
use crate::wrench::WrenchSchedule;

/// What to do when the ECP leaves the convex hull of the patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TopplePolicy {
    /// Keep going; the record's `in_hull` flag is cleared.
    #[default]
    Warn,
    /// Stop with [`crate::StepError::ToppleRisk`].
    Abort,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Slip speed below which a step counts as resting (m/s).
    pub sigma_min: f64,
    pub topple_policy: TopplePolicy,
    /// Largest ECP offset from the CM projection accepted as "settled" once
    /// the slider rests (m).
    pub rest_ecp_tolerance: f64,
    /// Newton residual tolerance, before scaling.
    pub solver_tolerance: f64,
    pub output_path: Option<String>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            sigma_min: 1e-6,
            topple_policy: TopplePolicy::Warn,
            rest_ecp_tolerance: 1e-3,
            solver_tolerance: 1e-12,
            output_path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub slider: SliderParams,
    pub friction: FrictionParams,
    pub initial: SliderState,
    pub schedule: WrenchSchedule,
    /// Time step `h` (s).
    pub step: f64,
    /// s
    pub duration: f64,
    pub options: RunOptions,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.slider.validate()?;
        self.friction.validate()?;
        self.initial.validate()?;
        self.schedule.validate()?;
        positive("run.step", self.step)?;
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return Err(ModelError::invalid(
                "run.duration",
                "finite and >= 0",
                self.duration,
            ));
        }
        if !(self.options.sigma_min >= 0.0) {
            return Err(ModelError::invalid(
                "run.sigma_min",
                ">= 0",
                self.options.sigma_min,
            ));
        }
        positive("run.rest_ecp_tolerance", self.options.rest_ecp_tolerance)?;
        positive("run.solver_tolerance", self.options.solver_tolerance)?;
        Ok(())
    }

    /// Number of whole steps in `duration`.
    pub fn step_count(&self) -> usize {
        libm::floor(self.duration / self.step + 1e-9) as usize
    }

    pub fn solver_settings(&self) -> SolverSettings {
        SolverSettings {
            tolerance: self.options.solver_tolerance,
            sigma_min: self.options.sigma_min,
            ..SolverSettings::default()
        }
    }
}
