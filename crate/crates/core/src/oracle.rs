//! Slow reference solver for the per-step equations, independent of the
//! Newton path in [`crate::friction`].
//!
//! Primary method: relaxed fixed-point iteration in end-of-step velocity
//! space. From the current velocities and impulses, the slip at the ECP is
//! formed, the maximum-dissipation impulse for that slip is taken, and the
//! velocities are updated from the momentum balance.
//!
//! Fallback: exhaustive search over the impulse box
//! `|p_t| <= e_t μ p_n, |p_o| <= e_o μ p_n, |p_r| <= e_r μ p_n`, with the
//! slip speed fitted in closed form for each candidate, then repeated
//! zooming around the incumbent.
//!
//! Only [`crate::friction::residual`] is shared, for reporting.

use alloc::vec::Vec;

use thiserror::Error;

use crate::friction::{residual, ContactImpulse, StepInputs};
use crate::model::sq;

/// Under-relaxation of the fixed-point update.
pub const RELAXATION: f64 = 0.5;
const FIXED_POINT_ITERS: usize = 20_000;
const COARSE_CELLS: usize = 64;
const FINE_CELLS: usize = 16;
/// Grid spacing to reach, in units of the impulse-box half-widths.
const GRID_RESOLUTION: f64 = 1e-8;
/// Residual floor an oracle answer must meet, scaled like the solver tolerance.
pub const RESIDUAL_FLOOR: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum OracleError {
    #[error("oracle residual {residual:e} above floor")]
    Fail { residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    FixedPoint {
        iterations: usize,
    },
    Grid {
        stages: usize,
    },
    /// The slider can be stopped within the step.
    Rest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSolution {
    pub impulse: ContactImpulse,
    /// End-of-step `(v_x, v_y, w_z)`.
    pub velocity: [f64; 3],
    pub method: OracleMethod,
    pub residual_norm: f64,
}

impl OracleSolution {
    pub fn rest(&self) -> bool {
        self.method == OracleMethod::Rest
    }
}

struct Problem {
    v0: [f64; 3],
    applied: [f64; 3],
    tau_x: f64,
    tau_y: f64,
    inv_mass: [f64; 3],
    normal: f64,
    qz: f64,
    mu_pn: f64,
    e2: [f64; 3],
    radius: [f64; 3],
}

impl Problem {
    fn new(inputs: &StepInputs) -> Self {
        let f = &inputs.friction;
        let b = &inputs.body;
        let mu_pn = f.mu * inputs.normal;
        Problem {
            v0: [inputs.start.v_x, inputs.start.v_y, inputs.start.w_z],
            applied: [
                inputs.applied.linear[0],
                inputs.applied.linear[1],
                inputs.applied.angular[2],
            ],
            tau_x: inputs.applied.angular[0],
            tau_y: inputs.applied.angular[1],
            inv_mass: [1.0 / b.mass, 1.0 / b.mass, 1.0 / b.inertia_z],
            normal: inputs.normal,
            qz: b.cm_height,
            mu_pn,
            e2: [f.e_t * f.e_t, f.e_o * f.e_o, f.e_r * f.e_r],
            radius: [f.e_t * mu_pn, f.e_o * mu_pn, f.e_r * mu_pn],
        }
    }

    fn velocity(&self, p: &[f64; 3]) -> [f64; 3] {
        core::array::from_fn(|i| self.v0[i] + (p[i] + self.applied[i]) * self.inv_mass[i])
    }

    /// Slip at the ECP for velocities `v`, the ECP placed by impulses `p`.
    fn slip(&self, v: &[f64; 3], p: &[f64; 3]) -> [f64; 3] {
        let lever_y = -(self.tau_x + p[1] * self.qz) / self.normal;
        let lever_x = (self.tau_y - p[0] * self.qz) / self.normal;
        [v[0] - v[2] * lever_y, v[1] + v[2] * lever_x, v[2]]
    }

    fn slip_norm(&self, s: &[f64; 3]) -> f64 {
        libm::sqrt((0..3).map(|i| self.e2[i] * s[i] * s[i]).sum())
    }

    /// Boundary impulse maximising `−s·p`.
    fn dissipative(&self, s: &[f64; 3]) -> Option<[f64; 3]> {
        let n = self.slip_norm(s);
        (n > 0.0).then(|| core::array::from_fn(|i| -self.mu_pn * self.e2[i] * s[i] / n))
    }

    fn can_stop(&self) -> Option<[f64; 3]> {
        let stop: [f64; 3] =
            core::array::from_fn(|i| -(self.v0[i] / self.inv_mass[i] + self.applied[i]));
        let load: f64 = (0..3).map(|i| sq(stop[i] / self.radius[i])).sum();
        (load <= 1.0).then_some(stop)
    }

    /// Normalised residual for impulse `p` with the best admissible `σ`.
    /// Row `i` is divided by `μ p_n e_i` so all rows have unit sensitivity
    /// to the normalised impulse coordinates.
    fn misfit(&self, p: &[f64; 3]) -> (f64, f64) {
        let v = self.velocity(p);
        let s = self.slip(&v, p);
        let a: [f64; 3] = core::array::from_fn(|i| self.mu_pn * self.e2[i] * s[i]);
        let pp: f64 = (0..3).map(|i| p[i] * p[i] / self.e2[i]).sum();
        let sigma = if pp > 0.0 {
            (-(0..3).map(|i| a[i] * p[i] / self.e2[i]).sum::<f64>() / pp).max(0.0)
        } else {
            0.0
        };
        let mut m = 0.0;
        for i in 0..3 {
            let r = (a[i] + p[i] * sigma) / self.radius[i];
            m += r * r;
        }
        let u: f64 = (0..3).map(|i| sq(p[i] / self.radius[i])).sum();
        m += (1.0 - u) * (1.0 - u);
        (m, sigma)
    }
}

fn fixed_point(pb: &Problem) -> Option<([f64; 3], usize)> {
    let mut v = pb.velocity(&[0.0; 3]);
    let mut p = pb.dissipative(&pb.slip(&v, &[0.0; 3]))?;
    for k in 0..FIXED_POINT_ITERS {
        let s = pb.slip(&v, &p);
        let p_new = pb.dissipative(&s)?;
        let v_new = pb.velocity(&p_new);
        let dp = (0..3).fold(0.0f64, |m, i| m.max((p_new[i] - p[i]).abs() / pb.radius[i]));
        let dv = (0..3).fold(0.0f64, |m, i| {
            m.max((v_new[i] - v[i]).abs() / (1.0 + v[i].abs()))
        });
        for i in 0..3 {
            p[i] += RELAXATION * (p_new[i] - p[i]);
            v[i] += RELAXATION * (v_new[i] - v[i]);
        }
        if dp < 1e-15 && dv < 1e-15 {
            return Some((p, k + 1));
        }
    }
    None
}

fn grid_search(pb: &Problem) -> ([f64; 3], usize) {
    let mut center = [0.0; 3];
    let mut half = [1.0f64; 3];
    let mut cells = COARSE_CELLS;
    let mut stages = 0;
    let mut best_u = [0.0; 3];
    loop {
        stages += 1;
        let spacing = 2.0 / (cells - 1) as f64;
        let mut best = f64::INFINITY;
        for i in 0..cells {
            for j in 0..cells {
                for k in 0..cells {
                    let u = [
                        center[0] + half[0] * (-1.0 + spacing * i as f64),
                        center[1] + half[1] * (-1.0 + spacing * j as f64),
                        center[2] + half[2] * (-1.0 + spacing * k as f64),
                    ];
                    let p = core::array::from_fn(|d| u[d] * pb.radius[d]);
                    let (m, _) = pb.misfit(&p);
                    if m < best {
                        best = m;
                        best_u = u;
                    }
                }
            }
        }
        let step = half[0] * spacing;
        if step <= GRID_RESOLUTION {
            break;
        }
        center = best_u;
        half = [4.0 * step; 3];
        cells = FINE_CELLS;
    }
    (core::array::from_fn(|d| best_u[d] * pb.radius[d]), stages)
}

/// Solve one step by fixed-point iteration, falling back to grid search.
pub fn oracle_solve_step(inputs: &StepInputs) -> Result<OracleSolution, OracleError> {
    let pb = Problem::new(inputs);
    let normal = inputs.normal;
    let scale = (pb.mu_pn * pb.mu_pn).max(1.0);

    if let Some(stop) = pb.can_stop() {
        return Ok(OracleSolution {
            impulse: ContactImpulse {
                along_x: stop[0],
                along_y: stop[1],
                about_z: stop[2],
                slip_speed: 0.0,
                normal,
            },
            velocity: [0.0; 3],
            method: OracleMethod::Rest,
            residual_norm: 0.0,
        });
    }

    let finish = |p: [f64; 3], method| {
        let v = pb.velocity(&p);
        let sigma = pb.slip_norm(&pb.slip(&v, &p));
        let impulse = ContactImpulse {
            along_x: p[0],
            along_y: p[1],
            about_z: p[2],
            slip_speed: sigma,
            normal,
        };
        let r = residual(&impulse.unknowns(), inputs);
        let residual_norm = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        OracleSolution {
            impulse,
            velocity: v,
            method,
            residual_norm,
        }
    };

    if let Some((p, iterations)) = fixed_point(&pb) {
        let sol = finish(p, OracleMethod::FixedPoint { iterations });
        if sol.residual_norm <= 1e-12 * scale {
            return Ok(sol);
        }
    }
    let (p, stages) = grid_search(&pb);
    let sol = finish(p, OracleMethod::Grid { stages });
    if sol.residual_norm <= RESIDUAL_FLOOR * scale {
        Ok(sol)
    } else {
        Err(OracleError::Fail {
            residual: sol.residual_norm,
        })
    }
}

/// Grid-only variant of [`oracle_solve_step`], for exercising the fallback.
pub fn oracle_grid_solve(inputs: &StepInputs) -> Result<OracleSolution, OracleError> {
    let pb = Problem::new(inputs);
    let (p, stages) = grid_search(&pb);
    let v = pb.velocity(&p);
    let sigma = pb.slip_norm(&pb.slip(&v, &p));
    let impulse = ContactImpulse {
        along_x: p[0],
        along_y: p[1],
        about_z: p[2],
        slip_speed: sigma,
        normal: inputs.normal,
    };
    let r = residual(&impulse.unknowns(), inputs);
    let residual_norm = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = (pb.mu_pn * pb.mu_pn).max(1.0);
    if residual_norm <= RESIDUAL_FLOOR * scale {
        Ok(OracleSolution {
            impulse,
            velocity: v,
            method: OracleMethod::Grid { stages },
            residual_norm,
        })
    } else {
        Err(OracleError::Fail {
            residual: residual_norm,
        })
    }
}

/// Direct check of the friction optimality conditions for a candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktReport {
    /// `‖F‖∞` of the four step equations.
    pub residual_norm: f64,
    /// `|μ²p_n² − Σ(p_i/e_i)²| / (μ p_n)²`.
    pub ellipsoid_gap: f64,
    /// `|σ − sqrt(Σ e_i² v_i²)|` at the end-of-step slip (m/s).
    pub sigma_identity_gap: f64,
    /// Each friction component opposes its slip component.
    pub opposes_slip: bool,
    /// No sampled admissible impulse dissipates more power.
    pub dissipation_optimal: bool,
}

impl KktReport {
    pub fn max_gap(&self) -> f64 {
        self.residual_norm
            .max(self.ellipsoid_gap)
            .max(self.sigma_identity_gap)
    }
}

/// Evaluate the optimality conditions for `sol`. `samples` are points in the
/// closed unit ball, mapped onto the friction ellipsoid for the sampled
/// maximum-dissipation test.
pub fn verify_kkt(sol: &ContactImpulse, inputs: &StepInputs, samples: &[[f64; 3]]) -> KktReport {
    let pb = Problem::new(inputs);
    let p = [sol.along_x, sol.along_y, sol.about_z];
    let r = residual(&sol.unknowns(), inputs);
    let residual_norm = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let load: f64 = (0..3).map(|i| sq(p[i] / pb.radius[i])).sum();
    let ellipsoid_gap = (1.0 - load).abs();
    let v = pb.velocity(&p);
    let s = pb.slip(&v, &p);
    let sigma_identity_gap = (sol.slip_speed - pb.slip_norm(&s)).abs();
    let slack = 1e-12 * pb.mu_pn * pb.slip_norm(&s);
    let opposes_slip = (0..3).all(|i| p[i] * s[i] <= slack);
    let power = |q: &[f64; 3]| -(s[0] * q[0] + s[1] * q[1] + s[2] * q[2]);
    let own = power(&p);
    let tol = 1e-9 * pb.mu_pn * pb.slip_norm(&s);
    let dissipation_optimal = samples.iter().all(|u| {
        let q = core::array::from_fn(|i| u[i] * pb.radius[i]);
        own >= power(&q) - tol
    });
    KktReport {
        residual_norm,
        ellipsoid_gap,
        sigma_identity_gap,
        opposes_slip,
        dissipation_optimal,
    }
}

/// Deterministic unit-ball samples: a Fibonacci lattice on the sphere plus
/// the same directions scaled to half radius.
pub fn fibonacci_samples(n_surface: usize) -> Vec<[f64; 3]> {
    let golden = core::f64::consts::PI * (3.0 - libm::sqrt(5.0));
    let mut out = Vec::with_capacity(2 * n_surface);
    for i in 0..n_surface {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n_surface as f64;
        let r = libm::sqrt((1.0 - z * z).max(0.0));
        let (s, c) = libm::sincos(golden * i as f64);
        out.push([r * c, r * s, z]);
    }
    let interior: Vec<[f64; 3]> = out.iter().map(|u| u.map(|c| 0.5 * c)).collect();
    out.extend(interior);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FrictionParams, MassProperties, SliderState};
    use crate::wrench::AppliedImpulse;

    fn inputs(v: [f64; 3]) -> StepInputs {
        StepInputs {
            start: SliderState {
                v_x: v[0],
                v_y: v[1],
                w_z: v[2],
                ..SliderState::default()
            },
            applied: AppliedImpulse::ZERO,
            normal: 0.049,
            body: MassProperties {
                mass: 0.5,
                inertia_z: 0.5 * 0.005 / 12.0,
                cm_height: 0.08,
            },
            friction: FrictionParams {
                mu: 0.31,
                e_t: 1.0,
                e_o: 1.0,
                e_r: 0.01,
            },
            h: 0.01,
        }
    }

    #[test]
    fn rest_inputs() {
        let sol = oracle_solve_step(&inputs([0.0; 3])).unwrap();
        assert!(sol.rest());
    }

    #[test]
    fn pure_translation_matches_closed_form() {
        let inp = inputs([0.3, -0.4, 0.0]);
        let sol = oracle_solve_step(&inp).unwrap();
        let lim = 0.31 * 0.049;
        assert!((sol.impulse.along_x - (-lim * 0.6)).abs() < 1e-7);
        assert!((sol.impulse.along_y - (lim * 0.8)).abs() < 1e-7);
        assert_eq!(sol.impulse.about_z, 0.0);
    }

    #[test]
    fn grid_fallback_reaches_floor() {
        let inp = inputs([0.7, 0.9, 10.0]);
        let grid = oracle_grid_solve(&inp).unwrap();
        let fp = oracle_solve_step(&inp).unwrap();
        assert!(matches!(fp.method, OracleMethod::FixedPoint { .. }));
        for (a, b) in grid.velocity.iter().zip(fp.velocity.iter()) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn deterministic() {
        let inp = inputs([0.7, 0.9, 10.0]);
        assert_eq!(oracle_solve_step(&inp), oracle_solve_step(&inp));
    }

    #[test]
    fn kkt_flags_constructed_violations() {
        let inp = inputs([0.7, 0.9, 10.0]);
        let sol = oracle_solve_step(&inp).unwrap().impulse;
        let samples = fibonacci_samples(500);
        let ok = verify_kkt(&sol, &inp, &samples);
        assert!(ok.max_gap() < 1e-8, "{ok:?}");
        assert!(ok.dissipation_optimal && ok.opposes_slip);

        let scaled = ContactImpulse {
            along_x: 1.01 * sol.along_x,
            ..sol
        };
        assert!(verify_kkt(&scaled, &inp, &samples).ellipsoid_gap > 0.0);

        let flipped = ContactImpulse {
            along_x: -sol.along_x,
            ..sol
        };
        let r = verify_kkt(&flipped, &inp, &samples);
        assert!(!r.dissipation_optimal);
        assert!(!r.opposes_slip);
    }
}
