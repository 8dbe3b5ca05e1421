//! Scenario files (TOML). See `scenarios/SCHEMA.md` for the key reference.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use planar_slide_core::{
    AppliedWrench, BodyPusher, ContactPatch, FrictionParams, ModelError, RunOptions, Scenario,
    SliderParams, SliderState, TopplePolicy, WrenchSchedule,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{location}: {message}")]
    Parse {
        path: PathBuf,
        location: Location,
        message: String,
    },
    #[error("{path}: invalid scenario: {source}")]
    Validation { path: PathBuf, source: ModelError },
}

/// 1-based line and column of a parse error; `0:0` when unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

fn location(text: &str, offset: usize) -> Location {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    Location { line, column }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub slider: SliderSection,
    pub friction: FrictionSection,
    pub patch: PatchSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub schedule: ScheduleSection,
    pub run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliderSection {
    pub mass: f64,
    pub inertia_z: f64,
    pub cm_height: f64,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
}

fn default_gravity() -> f64 {
    9.8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrictionSection {
    pub mu: f64,
    pub e_t: f64,
    pub e_o: f64,
    pub e_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PatchSection {
    Polygon { vertices: Vec<[f64; 2]> },
    Annulus { inner: f64, outer: f64 },
    Disk { radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSection {
    pub q_x: f64,
    pub q_y: f64,
    pub theta_z: f64,
    pub v_x: f64,
    pub v_y: f64,
    pub w_z: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScheduleSection {
    #[default]
    None,
    Constant {
        #[serde(default)]
        force: [f64; 3],
        #[serde(default)]
        torque: [f64; 3],
    },
    Pusher {
        point: [f64; 3],
        direction: [f64; 2],
        mean: f64,
        #[serde(default)]
        amplitude: f64,
        period: f64,
    },
    Table {
        samples: Vec<TableSample>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSample {
    pub t: f64,
    #[serde(default)]
    pub force: [f64; 3],
    #[serde(default)]
    pub torque: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToppleSetting {
    #[default]
    Warn,
    Abort,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub h: f64,
    pub duration: f64,
    #[serde(default = "defaults::sigma_min")]
    pub sigma_min: f64,
    #[serde(default)]
    pub topple_policy: ToppleSetting,
    #[serde(default = "defaults::rest_ecp_tolerance")]
    pub rest_ecp_tolerance: f64,
    #[serde(default = "defaults::solver_tolerance")]
    pub solver_tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

mod defaults {
    use planar_slide_core::RunOptions;

    pub fn sigma_min() -> f64 {
        RunOptions::default().sigma_min
    }

    pub fn rest_ecp_tolerance() -> f64 {
        RunOptions::default().rest_ecp_tolerance
    }

    pub fn solver_tolerance() -> f64 {
        RunOptions::default().solver_tolerance
    }
}

impl From<&ScenarioFile> for Scenario {
    fn from(f: &ScenarioFile) -> Scenario {
        let patch = match &f.patch {
            PatchSection::Polygon { vertices } => ContactPatch::Polygon(vertices.clone()),
            PatchSection::Annulus { inner, outer } => ContactPatch::Annulus {
                inner: *inner,
                outer: *outer,
            },
            PatchSection::Disk { radius } => ContactPatch::Disk { radius: *radius },
        };
        let schedule = match &f.schedule {
            ScheduleSection::None => WrenchSchedule::Constant(AppliedWrench::ZERO),
            ScheduleSection::Constant { force, torque } => {
                WrenchSchedule::Constant(AppliedWrench {
                    force: *force,
                    torque: *torque,
                })
            }
            ScheduleSection::Pusher {
                point,
                direction,
                mean,
                amplitude,
                period,
            } => WrenchSchedule::BodyPusher(BodyPusher {
                point: *point,
                direction: *direction,
                mean: *mean,
                amplitude: *amplitude,
                period: *period,
            }),
            ScheduleSection::Table { samples } => WrenchSchedule::Table(
                samples
                    .iter()
                    .map(|s| {
                        (
                            s.t,
                            AppliedWrench {
                                force: s.force,
                                torque: s.torque,
                            },
                        )
                    })
                    .collect(),
            ),
        };
        let i = &f.initial;
        Scenario {
            slider: SliderParams {
                mass: f.slider.mass,
                inertia_z: f.slider.inertia_z,
                cm_height: f.slider.cm_height,
                gravity: f.slider.gravity,
                patch,
            },
            friction: FrictionParams {
                mu: f.friction.mu,
                e_t: f.friction.e_t,
                e_o: f.friction.e_o,
                e_r: f.friction.e_r,
            },
            initial: SliderState {
                q_x: i.q_x,
                q_y: i.q_y,
                theta_z: i.theta_z,
                v_x: i.v_x,
                v_y: i.v_y,
                w_z: i.w_z,
                t: i.t,
            },
            schedule,
            step: f.run.h,
            duration: f.run.duration,
            options: RunOptions {
                sigma_min: f.run.sigma_min,
                topple_policy: match f.run.topple_policy {
                    ToppleSetting::Warn => TopplePolicy::Warn,
                    ToppleSetting::Abort => TopplePolicy::Abort,
                },
                rest_ecp_tolerance: f.run.rest_ecp_tolerance,
                solver_tolerance: f.run.solver_tolerance,
                output_path: f.run.output.clone(),
            },
        }
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> ScenarioFile {
        let patch = match &s.slider.patch {
            ContactPatch::Polygon(v) => PatchSection::Polygon {
                vertices: v.clone(),
            },
            ContactPatch::Annulus { inner, outer } => PatchSection::Annulus {
                inner: *inner,
                outer: *outer,
            },
            ContactPatch::Disk { radius } => PatchSection::Disk { radius: *radius },
        };
        let schedule = match &s.schedule {
            WrenchSchedule::Constant(w) if *w == AppliedWrench::ZERO => ScheduleSection::None,
            WrenchSchedule::Constant(w) => ScheduleSection::Constant {
                force: w.force,
                torque: w.torque,
            },
            WrenchSchedule::BodyPusher(p) => ScheduleSection::Pusher {
                point: p.point,
                direction: p.direction,
                mean: p.mean,
                amplitude: p.amplitude,
                period: p.period,
            },
            WrenchSchedule::Table(samples) => ScheduleSection::Table {
                samples: samples
                    .iter()
                    .map(|(t, w)| TableSample {
                        t: *t,
                        force: w.force,
                        torque: w.torque,
                    })
                    .collect(),
            },
        };
        let i = &s.initial;
        ScenarioFile {
            slider: SliderSection {
                mass: s.slider.mass,
                inertia_z: s.slider.inertia_z,
                cm_height: s.slider.cm_height,
                gravity: s.slider.gravity,
            },
            friction: FrictionSection {
                mu: s.friction.mu,
                e_t: s.friction.e_t,
                e_o: s.friction.e_o,
                e_r: s.friction.e_r,
            },
            patch,
            initial: InitialSection {
                q_x: i.q_x,
                q_y: i.q_y,
                theta_z: i.theta_z,
                v_x: i.v_x,
                v_y: i.v_y,
                w_z: i.w_z,
                t: i.t,
            },
            schedule,
            run: RunSection {
                h: s.step,
                duration: s.duration,
                sigma_min: s.options.sigma_min,
                topple_policy: match s.options.topple_policy {
                    TopplePolicy::Warn => ToppleSetting::Warn,
                    TopplePolicy::Abort => ToppleSetting::Abort,
                },
                rest_ecp_tolerance: s.options.rest_ecp_tolerance,
                solver_tolerance: s.options.solver_tolerance,
                output: s.options.output_path.clone(),
            },
        }
    }
}

/// Parse and validate scenario text. `path` is only used in error messages.
pub fn parse_scenario(text: &str, path: &Path) -> Result<Scenario, LoadError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| LoadError::Parse {
        path: path.to_path_buf(),
        location: e
            .span()
            .map(|s| location(text, s.start))
            .unwrap_or_default(),
        message: e.message().to_string(),
    })?;
    let scen = Scenario::from(&file);
    scen.validate().map_err(|source| LoadError::Validation {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(scen)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, LoadError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text, path)
}

pub fn scenario_to_toml(scen: &Scenario) -> String {
    toml::to_string(&ScenarioFile::from(scen)).expect("scenario fields are all serializable")
}

pub fn save_scenario(scen: &Scenario, path: impl AsRef<Path>) -> std::io::Result<()> {
    fs::write(path, scenario_to_toml(scen))
}
