use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use planar_slide_core::closed_form::{
    pure_translation_rollout, quasi_static_velocity, QuasiStaticInput,
};
use planar_slide_core::sysid::{batch_estimate, DEFAULT_FLOOR};
use planar_slide_core::{Scenario, WrenchSchedule};

use crate::config::load_scenario;
use crate::run::{compare, run_simulation, COMPARE_TOLERANCE};
use crate::trajectory::{load_csv, observed_steps, write_csv, write_plot_data};

#[derive(Debug, Parser)]
#[command(
    name = "planar-slide",
    version,
    about = "Planar sliding with patch contact"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a scenario and write the trajectory CSV.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output CSV (default: `run.output` from the scenario, else stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write one `t value` file per column into this directory.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Check every step, and random extra steps, against the oracle solver.
    Compare {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Seed for the random extra steps.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random extra steps.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Override the Newton tolerance (before scaling by (μ p_n)²).
        #[arg(long)]
        solver_tolerance: Option<f64>,
    },
    /// Estimate friction parameters from a trajectory CSV.
    Sysid {
        trajectory: PathBuf,
        /// Take mass, inertia and CM height from this scenario.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        mass: Option<f64>,
        #[arg(long)]
        inertia_z: Option<f64>,
        #[arg(long)]
        cm_height: Option<f64>,
        /// Smallest usable |velocity| or |p_t| in a step.
        #[arg(long, default_value_t = DEFAULT_FLOOR)]
        floor: f64,
    },
    /// Closed-form rollout of pure translation (isotropic friction, no spin).
    Translate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quasi-static slider velocity for a pusher contact.
    Quasistatic {
        /// Contact point `x,y` (m).
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        contact: Vec<f64>,
        /// Contact point velocity `x,y` (m/s).
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        velocity: Vec<f64>,
        /// CM projection `x,y` (m).
        #[arg(long, value_delimiter = ',',
            allow_hyphen_values = true, default_values_t = [0.0, 0.0])]
        cm: Vec<f64>,
        /// `e_r / e_t` (m).
        #[arg(long, conflicts_with = "scenario")]
        c: Option<f64>,
        /// Take `e_r / e_t` from this scenario.
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Override `run.duration` (s).
    #[arg(long)]
    pub duration: Option<f64>,
    /// Override `run.h` (s).
    #[arg(long)]
    pub h: Option<f64>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<Scenario, Failure> {
        let mut scen = load_scenario(&self.scenario).map_err(|e| Failure::Validation(e.into()))?;
        if let Some(d) = self.duration {
            scen.duration = d;
        }
        if let Some(h) = self.h {
            scen.step = h;
        }
        scen.validate()
            .map_err(|e| Failure::Validation(anyhow!(e).context("after command-line overrides")))?;
        Ok(scen)
    }
}

/// Command failure, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: scenario, trajectory file or arguments. Exit 1.
    Validation(anyhow::Error),
    /// Simulation, oracle or estimation failure. Exit 2.
    Solver(anyhow::Error),
    /// `compare` found a deviation above tolerance. Exit 3.
    Comparison(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Comparison(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Validation(e) => write!(f, "invalid input: {e:#}"),
            Failure::Solver(e) => write!(f, "solver failure: {e:#}"),
            Failure::Comparison(m) => write!(f, "comparison failed: {m}"),
        }
    }
}

fn io_failure(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Validation(e.into())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .with_context(|| format!("cannot create {}", p.display()))
                .map_err(io_failure)?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

/// Execute a parsed command. Reports go to stdout unless stdout carries data.
pub fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            scenario,
            out,
            plot_data,
        } => {
            let scen = scenario.load()?;
            let (traj, summary) = run_simulation(&scen).map_err(|e| Failure::Solver(e.into()))?;
            let out = out.or_else(|| scen.options.output_path.as_ref().map(PathBuf::from));
            write_csv(output(out.as_deref())?, &traj.records).map_err(io_failure)?;
            if let Some(dir) = plot_data {
                write_plot_data(&dir, &traj.records)
                    .with_context(|| format!("cannot write plot data to {}", dir.display()))
                    .map_err(io_failure)?;
            }
            eprintln!("{summary}");
            Ok(())
        }
        Command::Compare {
            scenario,
            seed,
            samples,
            solver_tolerance,
        } => {
            let scen = scenario.load()?;
            let mut settings = scen.solver_settings();
            if let Some(t) = solver_tolerance {
                settings.tolerance = t;
            }
            let report =
                compare(&scen, settings, samples, seed).map_err(|e| Failure::Solver(e.into()))?;
            let worst_random = report.random.iter().fold(0.0f64, |m, d| m.max(*d));
            match report.worst_step() {
                Some((k, d)) => println!(
                    "trajectory: {} steps, max deviation {d:.3e} at step {}",
                    report.per_step.len(),
                    k + 1
                ),
                None => println!("trajectory: 0 steps"),
            }
            println!(
                "random: {} samples (seed {seed}), max deviation {worst_random:.3e}",
                report.random.len()
            );
            if report.passed() {
                println!("PASS (tolerance {COMPARE_TOLERANCE:e})");
                Ok(())
            } else {
                Err(Failure::Comparison(format!(
                    "max deviation {:.3e} exceeds {COMPARE_TOLERANCE:e}",
                    report.worst()
                )))
            }
        }
        Command::Sysid {
            trajectory,
            scenario,
            mass,
            inertia_z,
            cm_height,
            floor,
        } => {
            let base = match &scenario {
                Some(p) => Some(load_scenario(p).map_err(|e| Failure::Validation(e.into()))?),
                None => None,
            };
            let pick = |given: Option<f64>, name: &str, from: fn(&Scenario) -> f64| {
                given.or_else(|| base.as_ref().map(from)).ok_or_else(|| {
                    Failure::Validation(anyhow!("--{name} or --scenario is required"))
                })
            };
            let m = pick(mass, "mass", |s| s.slider.mass)?;
            let iz = pick(inertia_z, "inertia-z", |s| s.slider.inertia_z)?;
            let qz = pick(cm_height, "cm-height", |s| s.slider.cm_height)?;
            let rows = load_csv(&trajectory)
                .with_context(|| format!("reading {}", trajectory.display()))
                .map_err(io_failure)?;
            let est = batch_estimate(&observed_steps(&rows), m, iz, qz, floor)
                .map_err(|e| Failure::Solver(e.into()))?;
            println!(
                "steps used {} | skipped {}",
                est.per_step.len(),
                est.skipped
            );
            println!(
                "e_t*mu       = {:.12e}  (MAD {:.3e})",
                est.et_mu, est.dispersion[0]
            );
            println!(
                "(e_o/e_t)^2  = {:.12e}  (MAD {:.3e})  e_o/e_t = {:.12e}",
                est.ratio_o,
                est.dispersion[1],
                est.eo_over_et()
            );
            println!(
                "(e_r/e_t)^2  = {:.12e}  (MAD {:.3e})  e_r/e_t = {:.12e} m",
                est.ratio_r,
                est.dispersion[2],
                est.er_over_et()
            );
            Ok(())
        }
        Command::Translate { scenario, out } => {
            let scen = scenario.load()?;
            translate(&scen, output(out.as_deref())?)
        }
        Command::Quasistatic {
            contact,
            velocity,
            cm,
            c,
            scenario,
        } => {
            let c = match (c, scenario) {
                (Some(c), _) => c,
                (None, Some(p)) => {
                    let s = load_scenario(&p).map_err(|e| Failure::Validation(e.into()))?;
                    s.friction.e_r / s.friction.e_t
                }
                (None, None) => return Err(invalid("--c or --scenario is required")),
            };
            if !(c > 0.0 && c.is_finite()) {
                return Err(Failure::Validation(anyhow!("c must be positive (got {c})")));
            }
            let v = quasi_static_velocity(&QuasiStaticInput {
                contact_point: pair(&contact, "contact")?,
                contact_velocity: pair(&velocity, "velocity")?,
                cm: pair(&cm, "cm")?,
                c,
            });
            println!("v_x = {:.16e}", v[0] + 0.0);
            println!("v_y = {:.16e}", v[1] + 0.0);
            // `+ 0.0` turns -0 into 0.
            println!("w_z = {:.16e}", v[2] + 0.0);
            Ok(())
        }
    }
}

fn translate(scen: &Scenario, out: Box<dyn Write>) -> Result<(), Failure> {
    let force = match &scen.schedule {
        WrenchSchedule::Constant(w) => {
            if w.torque != [0.0; 3] {
                return Err(invalid("translate needs zero applied torque"));
            }
            w.force
        }
        _ => return Err(invalid("translate needs a constant (or no) applied wrench")),
    };
    if scen.initial.w_z != 0.0 {
        return Err(invalid("translate needs w_z = 0 initially"));
    }
    let h = scen.step;
    let s = &scen.slider;
    let normal = (s.mass * s.gravity - force[2]) * h;
    if normal <= 0.0 {
        return Err(invalid("net normal load is not positive"));
    }
    let steps = pure_translation_rollout(
        [scen.initial.v_x, scen.initial.v_y],
        [force[0] * h, force[1] * h],
        normal,
        &scen.friction,
        s.mass,
        scen.step_count(),
    )
    .map_err(|e| Failure::Validation(e.into()))?;
    let mut w = csv::Writer::from_writer(out);
    let res: Result<(), csv::Error> = (|| {
        w.write_record(["t", "v_x", "v_y", "p_x", "p_y", "rest"])?;
        for (k, st) in steps.iter().enumerate() {
            w.write_record([
                format!("{:.16e}", scen.initial.t + (k + 1) as f64 * h),
                format!("{:.16e}", st.velocity[0]),
                format!("{:.16e}", st.velocity[1]),
                format!("{:.16e}", st.impulse[0]),
                format!("{:.16e}", st.impulse[1]),
                u8::from(st.rest).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    })();
    res.map_err(io_failure)
}

fn pair(v: &[f64], name: &str) -> Result<[f64; 2], Failure> {
    match v {
        [x, y] if x.is_finite() && y.is_finite() => Ok([*x, *y]),
        _ => Err(Failure::Validation(anyhow!(
            "--{name} takes two finite numbers `x,y` (got {v:?})"
        ))),
    }
}

fn invalid(msg: &'static str) -> Failure {
    Failure::Validation(anyhow!(msg))
}
