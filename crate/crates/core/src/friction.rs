//! Per-step friction solve.
//!
//! With backward-Euler stepping and the contact wrench placed at the ECP, one
//! step is fully determined by four unknowns: the friction impulses along x
//! and y, the friction moment impulse about z, and the slip speed `σ`. They
//! satisfy
//!
//! ```text
//! F1 = μ p_n e_t² v_t + p_t σ = 0
//! F2 = μ p_n e_o² v_o + p_o σ = 0
//! F3 = μ p_n e_r² w   + p_r σ = 0
//! F4 = μ² p_n² − (p_t/e_t)² − (p_o/e_o)² − (p_r/e_r)² = 0
//! ```
//!
//! where the end-of-step quantities are linear in the unknowns:
//!
//! ```text
//! w   = w⁰ + (p_r + τ_z)/I_z
//! v_t = v_x⁰ + (p_t + p_x)/m + (τ_x + p_o q_z) w / p_n
//! v_o = v_y⁰ + (p_o + p_y)/m + (τ_y − p_t q_z) w / p_n
//! ```
//!
//! The `(τ_x + p_o q_z)/p_n` and `(τ_y − p_t q_z)/p_n` factors are the ECP
//! offsets from the CM, so every residual is at most quadratic in the
//! unknowns. The system is solved with damped Newton on `½‖F‖²` using the
//! exact Jacobian.
//!
//! `σ = 0` roots do not exist while sliding. A step in which the slider can
//! be brought to rest by a friction impulse inside the ellipsoid is reported
//! as sticking instead; see [`solve_step`].

use crate::error::SolveError;
use crate::linalg::solve4;
use crate::model::{sq, FrictionParams, MassProperties, SliderState};
use crate::wrench::AppliedImpulse;

/// Everything one step of the friction solve depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInputs {
    /// State at the start of the step.
    pub start: SliderState,
    pub applied: AppliedImpulse,
    /// Normal impulse over the step (N·s), strictly positive.
    pub normal: f64,
    pub body: MassProperties,
    pub friction: FrictionParams,
    pub h: f64,
}

/// Friction impulses at the ECP over one step and the slip speed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ContactImpulse {
    /// N·s
    pub along_x: f64,
    /// N·s
    pub along_y: f64,
    /// N·m·s
    pub about_z: f64,
    /// m/s
    pub slip_speed: f64,
    /// N·s
    pub normal: f64,
}

impl ContactImpulse {
    pub fn from_unknowns(z: [f64; 4], normal: f64) -> Self {
        ContactImpulse {
            along_x: z[0],
            along_y: z[1],
            about_z: z[2],
            slip_speed: z[3],
            normal,
        }
    }

    pub fn unknowns(&self) -> [f64; 4] {
        [self.along_x, self.along_y, self.about_z, self.slip_speed]
    }
}

/// Sliding velocity of the contact at the ECP.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlipVelocity {
    /// m/s
    pub x: f64,
    /// m/s
    pub y: f64,
    /// rad/s
    pub spin: f64,
}

impl SlipVelocity {
    /// `sqrt(e_t² v_t² + e_o² v_o² + e_r² v_r²)`.
    pub fn weighted_norm(&self, f: &FrictionParams) -> f64 {
        libm::sqrt(sq(f.e_t * self.x) + sq(f.e_o * self.y) + sq(f.e_r * self.spin))
    }
}

impl StepInputs {
    /// End-of-step `(v_x, v_y, w_z)` implied by the friction impulses in `z`.
    pub fn end_velocity(&self, z: &[f64; 4]) -> [f64; 3] {
        let m = self.body.mass;
        [
            self.start.v_x + (z[0] + self.applied.linear[0]) / m,
            self.start.v_y + (z[1] + self.applied.linear[1]) / m,
            self.start.w_z + (z[2] + self.applied.angular[2]) / self.body.inertia_z,
        ]
    }

    /// ECP offset from the CM projection, `(a_x − q_x, a_y − q_y)`.
    pub fn ecp_offset(&self, z: &[f64; 4]) -> [f64; 2] {
        let qz = self.body.cm_height;
        [
            (self.applied.angular[1] - z[0] * qz) / self.normal,
            (-self.applied.angular[0] - z[1] * qz) / self.normal,
        ]
    }

    /// End-of-step slip velocity at the ECP for the impulses in `z`.
    pub fn end_slip(&self, z: &[f64; 4]) -> SlipVelocity {
        let [vx, vy, w] = self.end_velocity(z);
        let [ox, oy] = self.ecp_offset(z);
        SlipVelocity {
            x: vx - w * oy,
            y: vy + w * ox,
            spin: w,
        }
    }

    /// Residual scale used by the convergence test: `max(1, (μ p_n)²)`.
    pub fn residual_scale(&self) -> f64 {
        sq(self.friction.mu * self.normal).max(1.0)
    }

    /// Friction impulse that would stop the slider exactly in this step.
    pub fn stopping_impulse(&self) -> [f64; 3] {
        [
            -(self.body.mass * self.start.v_x + self.applied.linear[0]),
            -(self.body.mass * self.start.v_y + self.applied.linear[1]),
            -(self.body.inertia_z * self.start.w_z + self.applied.angular[2]),
        ]
    }
}

/// The four residuals at `z = (p_t, p_o, p_r, σ)`.
pub fn residual(z: &[f64; 4], inputs: &StepInputs) -> [f64; 4] {
    let f = &inputs.friction;
    let slip = inputs.end_slip(z);
    let mpn = f.mu * inputs.normal;
    [
        mpn * f.e_t * f.e_t * slip.x + z[0] * z[3],
        mpn * f.e_o * f.e_o * slip.y + z[1] * z[3],
        mpn * f.e_r * f.e_r * slip.spin + z[2] * z[3],
        f.ellipsoid_gap(z[0], z[1], z[2], inputs.normal),
    ]
}

/// Exact Jacobian `∂F_i/∂z_j` of [`residual`].
pub fn jacobian(z: &[f64; 4], inputs: &StepInputs) -> [[f64; 4]; 4] {
    let f = &inputs.friction;
    let b = &inputs.body;
    let mpn = f.mu * inputs.normal;
    let mu = f.mu;
    let qz = b.cm_height;
    let w = inputs.end_velocity(z)[2];
    let (et2, eo2, er2) = (f.e_t * f.e_t, f.e_o * f.e_o, f.e_r * f.e_r);
    let tau_x = inputs.applied.angular[0];
    let tau_y = inputs.applied.angular[1];
    [
        [
            mpn * et2 / b.mass + z[3],
            mu * et2 * qz * w,
            mu * et2 * (tau_x + z[1] * qz) / b.inertia_z,
            z[0],
        ],
        [
            -mu * eo2 * qz * w,
            mpn * eo2 / b.mass + z[3],
            mu * eo2 * (tau_y - z[0] * qz) / b.inertia_z,
            z[1],
        ],
        [0.0, 0.0, mpn * er2 / b.inertia_z + z[3], z[2]],
        [-2.0 * z[0] / et2, -2.0 * z[1] / eo2, -2.0 * z[2] / er2, 0.0],
    ]
}

/// Maximiser of the dissipated power `−v·p` over the friction ellipsoid.
///
/// `p_i = −μ p_n e_i² v_i / σ` with `σ = sqrt(Σ e_i² v_i²)`; the returned
/// impulse lies on the ellipsoid boundary.
pub fn max_dissipation_impulse(
    v: &SlipVelocity,
    normal: f64,
    f: &FrictionParams,
) -> Result<ContactImpulse, SolveError> {
    let sigma = v.weighted_norm(f);
    if !(sigma > 0.0) {
        return Err(SolveError::ZeroSlip);
    }
    let k = -f.mu * normal / sigma;
    Ok(ContactImpulse {
        along_x: k * f.e_t * f.e_t * v.x,
        along_y: k * f.e_o * f.e_o * v.y,
        about_z: k * f.e_r * f.e_r * v.spin,
        slip_speed: sigma,
        normal,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Absolute residual tolerance before scaling by `max(1, (μ p_n)²)`.
    pub tolerance: f64,
    /// Newton iterations per start.
    pub max_iterations: usize,
    /// Converged slip speeds below this flag the step as resting (m/s).
    pub sigma_min: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tolerance: 1e-12,
            max_iterations: 100,
            sigma_min: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSolution {
    pub impulse: ContactImpulse,
    /// Newton iterations summed over all starts.
    pub iterations: usize,
    /// `‖F‖∞` at the returned point.
    pub residual_norm: f64,
    /// Slip speed below `sigma_min`, or the slider sticks in this step.
    pub rest: bool,
    /// The friction impulse stops the slider inside the ellipsoid; no
    /// sliding root exists and `slip_speed` is zero.
    pub sticking: bool,
    /// A second, distinct `σ ≥ 0` root met during multi-start, if any.
    pub alternate_root: Option<ContactImpulse>,
}

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-12;

struct Converged {
    z: [f64; 4],
    iterations: usize,
    residual_norm: f64,
}

struct Failed {
    iterations: usize,
    residual_norm: f64,
}

fn inf_norm(v: &[f64; 4]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn half_sq_norm(v: &[f64; 4]) -> f64 {
    0.5 * v.iter().map(|x| x * x).sum::<f64>()
}

fn newton(
    z0: [f64; 4],
    inputs: &StepInputs,
    settings: &SolverSettings,
) -> Result<Converged, Failed> {
    let tol = settings.tolerance * inputs.residual_scale();
    let mut z = z0;
    let mut fz = residual(&z, inputs);
    let mut norm = inf_norm(&fz);
    let mut iterations = 0;
    while iterations < settings.max_iterations {
        if norm <= tol {
            return Ok(polish(z, norm, iterations, inputs));
        }
        if !norm.is_finite() {
            break;
        }
        let j = jacobian(&z, inputs);
        let Some(dir) = solve4(j, fz.map(|v| -v)) else {
            break;
        };
        iterations += 1;
        let phi = half_sq_norm(&fz);
        let mut alpha = 1.0;
        loop {
            let trial = core::array::from_fn(|i| z[i] + alpha * dir[i]);
            let ft = residual(&trial, inputs);
            if half_sq_norm(&ft) <= (1.0 - 2.0 * ARMIJO * alpha) * phi {
                z = trial;
                fz = ft;
                norm = inf_norm(&fz);
                break;
            }
            alpha *= 0.5;
            if alpha < MIN_STEP {
                // No descent left: the residual sits at its rounding floor.
                return if norm <= 1e3 * tol {
                    Ok(Converged {
                        z,
                        iterations,
                        residual_norm: norm,
                    })
                } else {
                    Err(Failed {
                        iterations,
                        residual_norm: norm,
                    })
                };
            }
        }
    }
    if norm <= tol {
        Ok(polish(z, norm, iterations, inputs))
    } else {
        Err(Failed {
            iterations,
            residual_norm: norm,
        })
    }
}

/// One extra full Newton step once the tolerance is met, kept if it does not
/// raise the residual. The tolerance is absolute, so for small `μ p_n` this
/// is what takes the impulses to full precision.
fn polish(z: [f64; 4], norm: f64, iterations: usize, inputs: &StepInputs) -> Converged {
    let done = Converged {
        z,
        iterations,
        residual_norm: norm,
    };
    if norm == 0.0 {
        return done;
    }
    let fz = residual(&z, inputs);
    let Some(dir) = solve4(jacobian(&z, inputs), fz.map(|v| -v)) else {
        return done;
    };
    let trial = core::array::from_fn(|i| z[i] + dir[i]);
    let trial_norm = inf_norm(&residual(&trial, inputs));
    if trial_norm <= norm {
        Converged {
            z: trial,
            iterations: iterations + 1,
            residual_norm: trial_norm,
        }
    } else {
        done
    }
}

/// Max-dissipation impulse at the start-of-step velocities with the ECP
/// offsets dropped. Falls back to the velocities after the applied impulse
/// when the slider starts from rest.
pub fn default_guess(inputs: &StepInputs) -> Option<ContactImpulse> {
    let s = &inputs.start;
    let start = SlipVelocity {
        x: s.v_x,
        y: s.v_y,
        spin: s.w_z,
    };
    let predicted = SlipVelocity {
        x: s.v_x + inputs.applied.linear[0] / inputs.body.mass,
        y: s.v_y + inputs.applied.linear[1] / inputs.body.mass,
        spin: s.w_z + inputs.applied.angular[2] / inputs.body.inertia_z,
    };
    max_dissipation_impulse(&start, inputs.normal, &inputs.friction)
        .or_else(|_| max_dissipation_impulse(&predicted, inputs.normal, &inputs.friction))
        .ok()
}

/// Deterministic restarts: sign flips and ±10 % scalings of a base guess.
fn perturbations(base: [f64; 4]) -> [[f64; 4]; 8] {
    let [t, o, r, s] = base;
    [
        [-t, o, r, s],
        [t, -o, r, s],
        [t, o, -r, s],
        [-t, -o, -r, s],
        [0.9 * t, 0.9 * o, 0.9 * r, 1.1 * s],
        [1.1 * t, 1.1 * o, 1.1 * r, 0.9 * s],
        [-t, -o, r, 1.1 * s],
        [0.9 * t, -0.9 * o, -0.9 * r, 0.9 * s],
    ]
}

fn distinct(a: &[f64; 4], b: &[f64; 4]) -> bool {
    let scale = a
        .iter()
        .chain(b.iter())
        .fold(1e-300f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).any(|(x, y)| (x - y).abs() > 1e-8 * scale)
}

/// Solve one step for the friction impulses and slip speed.
///
/// If the impulse needed to stop the slider within the step lies inside the
/// friction ellipsoid, no sliding (`σ > 0`) root exists; the step is
/// returned as sticking with that impulse and `σ = 0`.
///
/// Otherwise Newton starts from `guess` (the previous step's solution, if
/// any) or from [`default_guess`]. Roots with `σ < 0` are rejected. If the
/// first start fails, eight deterministic perturbations are tried; the first
/// accepted root is returned and any other distinct root met along the way
/// is reported in [`StepSolution::alternate_root`].
pub fn solve_step(
    inputs: &StepInputs,
    guess: Option<&ContactImpulse>,
    settings: &SolverSettings,
) -> Result<StepSolution, SolveError> {
    let normal = inputs.normal;
    let stop = inputs.stopping_impulse();
    if inputs
        .friction
        .ellipsoid_gap(stop[0], stop[1], stop[2], normal)
        >= 0.0
    {
        return Ok(StepSolution {
            impulse: ContactImpulse {
                along_x: stop[0],
                along_y: stop[1],
                about_z: stop[2],
                slip_speed: 0.0,
                normal,
            },
            iterations: 0,
            residual_norm: 0.0,
            rest: true,
            sticking: true,
            alternate_root: None,
        });
    }

    let base = guess
        .filter(|g| g.slip_speed > 0.0 && g.unknowns().iter().all(|v| v.is_finite()))
        .map(|g| g.unknowns())
        .or_else(|| default_guess(inputs).map(|g| g.unknowns()))
        .ok_or(SolveError::ZeroSlip)?;

    let mut iterations = 0;
    let mut best_residual = f64::INFINITY;
    let mut accepted: Option<Converged> = None;
    let mut alternate = None;
    let mut attempts = 0;

    let starts = core::iter::once(base).chain(perturbations(base));
    for (k, z0) in starts.enumerate() {
        attempts += 1;
        match newton(z0, inputs, settings) {
            Ok(c) => {
                iterations += c.iterations;
                best_residual = best_residual.min(c.residual_norm);
                if c.z[3] < 0.0 {
                    continue;
                }
                match &accepted {
                    None => {
                        accepted = Some(c);
                        if k == 0 {
                            break;
                        }
                    }
                    Some(a) => {
                        if alternate.is_none() && distinct(&a.z, &c.z) {
                            alternate = Some(ContactImpulse::from_unknowns(c.z, normal));
                        }
                    }
                }
            }
            Err(f) => {
                iterations += f.iterations;
                best_residual = best_residual.min(f.residual_norm);
            }
        }
    }

    let Some(c) = accepted else {
        return Err(SolveError::NoConvergence {
            attempts,
            best_residual,
        });
    };
    Ok(StepSolution {
        impulse: ContactImpulse::from_unknowns(c.z, normal),
        iterations,
        residual_norm: c.residual_norm,
        rest: c.z[3] < settings.sigma_min,
        sticking: false,
        alternate_root: alternate,
    })
}
