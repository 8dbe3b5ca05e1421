//! Simulation with timing statistics, and the solver-versus-oracle comparison.

use std::fmt;
use std::time::{Duration, Instant};

use planar_slide_core::oracle::{oracle_solve_step, OracleError};
use planar_slide_core::{
    simulate, solve_step, step_inputs, ContactImpulse, Scenario, SimulateError, SliderState,
    SolveError, SolverSettings, StepError, StepInputs, Termination, Trajectory,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

/// Deviation threshold for `compare`, per component.
pub const COMPARE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub steps: usize,
    pub termination: Termination,
    /// Records whose ECP left the patch hull.
    pub off_hull: usize,
    pub iterations_min: usize,
    pub iterations_mean: f64,
    pub iterations_max: usize,
    pub wall_time: Duration,
}

impl Summary {
    pub fn wall_per_step(&self) -> Duration {
        if self.steps == 0 {
            Duration::ZERO
        } else {
            self.wall_time / self.steps as u32
        }
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let end = match self.termination {
            Termination::Completed => "completed".to_string(),
            Termination::Rest {
                step,
                ecp_offset,
                settled,
            } => format!(
                "rest at step {} (ecp offset {ecp_offset:.3e} m{})",
                step + 1,
                if settled { "" } else { ", not settled" }
            ),
        };
        write!(
            f,
            "steps {} | {end} | off-hull steps {} | newton iters min/mean/max {}/{:.2}/{} | {:.3} us/step",
            self.steps,
            self.off_hull,
            self.iterations_min,
            self.iterations_mean,
            self.iterations_max,
            self.wall_per_step().as_secs_f64() * 1e6,
        )
    }
}

pub fn run_simulation(scen: &Scenario) -> Result<(Trajectory, Summary), SimulateError> {
    let start = Instant::now();
    let traj = simulate(scen)?;
    let wall_time = start.elapsed();
    let iters: Vec<usize> = traj
        .records
        .iter()
        .map(|r| r.diagnostics.newton_iters)
        .collect();
    let summary = Summary {
        steps: traj.records.len(),
        termination: traj.termination,
        off_hull: traj.records.iter().filter(|r| !r.ecp.in_hull).count(),
        iterations_min: iters.iter().copied().min().unwrap_or(0),
        iterations_mean: if iters.is_empty() {
            0.0
        } else {
            iters.iter().sum::<usize>() as f64 / iters.len() as f64
        },
        iterations_max: iters.iter().copied().max().unwrap_or(0),
        wall_time,
    };
    Ok((traj, summary))
}

#[derive(Debug, Error)]
pub enum CompareError {
    #[error(transparent)]
    Simulate(#[from] SimulateError),
    #[error("{context}: oracle failed: {source}")]
    Oracle {
        context: String,
        source: OracleError,
    },
    #[error("{context}: {source}")]
    Step { context: String, source: StepError },
}

/// Largest absolute difference over `(v_x, v_y, w_z, p_t, p_o, p_r)`.
fn deviation(v: [f64; 3], p: &ContactImpulse, ov: [f64; 3], op: &ContactImpulse) -> f64 {
    let a = [v[0], v[1], v[2], p.along_x, p.along_y, p.about_z];
    let b = [ov[0], ov[1], ov[2], op.along_x, op.along_y, op.about_z];
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    /// Deviation for each trajectory step.
    pub per_step: Vec<f64>,
    /// Deviation for each random sample.
    pub random: Vec<f64>,
}

impl CompareReport {
    pub fn worst_step(&self) -> Option<(usize, f64)> {
        self.per_step
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn worst(&self) -> f64 {
        self.per_step
            .iter()
            .chain(&self.random)
            .fold(0.0f64, |m, d| m.max(*d))
    }

    pub fn passed(&self) -> bool {
        self.worst() <= COMPARE_TOLERANCE
    }
}

fn oracle_deviation(
    inputs: &StepInputs,
    v: [f64; 3],
    p: &ContactImpulse,
    context: impl Fn() -> String,
) -> Result<f64, CompareError> {
    let o = oracle_solve_step(inputs).map_err(|source| CompareError::Oracle {
        context: context(),
        source,
    })?;
    Ok(deviation(v, p, o.velocity, &o.impulse))
}

/// Random start states around the scenario's, for off-trajectory checks.
fn random_state(scen: &Scenario, rng: &mut StdRng) -> SliderState {
    let i = &scen.initial;
    let v = i.v_x.hypot(i.v_y).max(0.1);
    let w = i.w_z.abs().max(1.0);
    SliderState {
        q_x: i.q_x,
        q_y: i.q_y,
        theta_z: rng.gen_range(-3.2..3.2),
        v_x: rng.gen_range(-v..v),
        v_y: rng.gen_range(-v..v),
        w_z: rng.gen_range(-w..w),
        t: i.t + rng.gen_range(0.0..scen.duration.max(scen.step)),
    }
}

/// Run the scenario with `settings`, check every step against the oracle,
/// then check `samples` random start states drawn with `seed`.
pub fn compare(
    scen: &Scenario,
    settings: SolverSettings,
    samples: usize,
    seed: u64,
) -> Result<CompareReport, CompareError> {
    let records = planar_slide_core::Simulator::new(scen)
        .with_settings(settings)
        .collect::<Result<Vec<_>, _>>()?;
    let mut before = scen.initial;
    let mut per_step = Vec::with_capacity(records.len());
    for (k, r) in records.iter().enumerate() {
        let inputs = step_inputs(&before, scen).map_err(|source| CompareError::Step {
            context: format!("step {k}"),
            source,
        })?;
        let v = [r.state.v_x, r.state.v_y, r.state.w_z];
        per_step.push(oracle_deviation(&inputs, v, &r.impulse, || {
            format!("step {k}")
        })?);
        before = r.state;
    }

    let mut rng = StdRng::seed_from_u64(seed);
    let mut random = Vec::with_capacity(samples);
    for n in 0..samples {
        let context = || format!("random sample {n}");
        let state = random_state(scen, &mut rng);
        let inputs = step_inputs(&state, scen).map_err(|source| CompareError::Step {
            context: context(),
            source,
        })?;
        let sol =
            solve_step(&inputs, None, &settings).map_err(|e: SolveError| CompareError::Step {
                context: context(),
                source: e.into(),
            })?;
        let v = if sol.sticking {
            [0.0; 3]
        } else {
            inputs.end_velocity(&sol.impulse.unknowns())
        };
        random.push(oracle_deviation(&inputs, v, &sol.impulse, context)?);
    }
    Ok(CompareReport { per_step, random })
}
