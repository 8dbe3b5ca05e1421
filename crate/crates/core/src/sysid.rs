//! Friction-parameter identification from a trajectory.
//!
//! Each step of a trajectory determines the friction impulses (from the
//! momentum change and the applied impulses) and the end-of-step slip
//! velocity at the ECP. Eliminating `σ` and the ellipsoid radius from the
//! step equations gives, per step,
//!
//! ```text
//! (e_t μ)²    = [p_t² + p_t p_o v_o / v_t + p_t p_r v_r / v_t] / p_n²
//! (e_o/e_t)²  = p_o v_t / (p_t v_o)
//! (e_r/e_t)²  = p_r v_t / (p_t v_r)
//! ```
//!
//! `μ` and `e_t` only appear as the product `e_t μ` and are not separately
//! identifiable. Per-step values are aggregated by their median.

use alloc::vec::Vec;

use thiserror::Error;

use crate::friction::SlipVelocity;
use crate::model::SliderState;
use crate::wrench::AppliedImpulse;

pub const DEFAULT_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SysidError {
    #[error("degenerate step: |{quantity}| = {value:e} below floor")]
    Degenerate { quantity: &'static str, value: f64 },
    #[error("no usable step ({skipped} skipped as degenerate)")]
    AllDegenerate { skipped: usize },
}

/// Two consecutive states and the loads acting between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedStep {
    pub before: SliderState,
    pub after: SliderState,
    pub applied: AppliedImpulse,
    /// N·s
    pub normal: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Reconstruction {
    /// Friction impulses `(p_t, p_o, p_r)`.
    pub impulse: [f64; 3],
    pub slip: SlipVelocity,
}

/// Friction impulses and end-of-step slip velocity implied by one step.
pub fn reconstruct(
    step: &ObservedStep,
    mass: f64,
    inertia_z: f64,
    cm_height: f64,
) -> Reconstruction {
    let (b, a, ap) = (&step.before, &step.after, &step.applied);
    let p_t = mass * (a.v_x - b.v_x) - ap.linear[0];
    let p_o = mass * (a.v_y - b.v_y) - ap.linear[1];
    let p_r = inertia_z * (a.w_z - b.w_z) - ap.angular[2];
    let off_x = (ap.angular[1] - p_t * cm_height) / step.normal;
    let off_y = (-ap.angular[0] - p_o * cm_height) / step.normal;
    Reconstruction {
        impulse: [p_t, p_o, p_r],
        slip: SlipVelocity {
            x: a.v_x - a.w_z * off_y,
            y: a.v_y + a.w_z * off_x,
            spin: a.w_z,
        },
    }
}

/// Identified parameters from one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneStepEstimate {
    /// `e_t μ`
    pub et_mu: f64,
    /// `(e_o/e_t)²`
    pub ratio_o: f64,
    /// `(e_r/e_t)²` (m²)
    pub ratio_r: f64,
}

pub fn one_step_estimate(
    rec: &Reconstruction,
    normal: f64,
    floor: f64,
) -> Result<OneStepEstimate, SysidError> {
    let [p_t, p_o, p_r] = rec.impulse;
    let SlipVelocity {
        x: v_t,
        y: v_o,
        spin: v_r,
    } = rec.slip;
    for (quantity, value) in [("v_t", v_t), ("v_o", v_o), ("v_r", v_r), ("p_t", p_t)] {
        if !(value.abs() >= floor) {
            return Err(SysidError::Degenerate { quantity, value });
        }
    }
    let pn2 = normal * normal;
    let et_mu_sq = (p_t * p_t + p_t * p_o * v_o / v_t + p_t * p_r * v_r / v_t) / pn2;
    if !(et_mu_sq > 0.0) {
        return Err(SysidError::Degenerate {
            quantity: "(e_t mu)^2",
            value: et_mu_sq,
        });
    }
    Ok(OneStepEstimate {
        et_mu: libm::sqrt(et_mu_sq),
        ratio_o: p_o * v_t / (p_t * v_o),
        ratio_r: p_r * v_t / (p_t * v_r),
    })
}

/// Median-aggregated estimate over a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct FrictionEstimate {
    pub et_mu: f64,
    pub ratio_o: f64,
    pub ratio_r: f64,
    pub per_step: Vec<OneStepEstimate>,
    /// Median absolute deviation of `(et_mu, ratio_o, ratio_r)`.
    pub dispersion: [f64; 3],
    pub skipped: usize,
}

impl FrictionEstimate {
    /// `e_o / e_t`
    pub fn eo_over_et(&self) -> f64 {
        libm::sqrt(self.ratio_o)
    }

    /// `e_r / e_t` (m)
    pub fn er_over_et(&self) -> f64 {
        libm::sqrt(self.ratio_r)
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn median_and_mad(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut v: Vec<f64> = values.collect();
    let m = median(&mut v);
    let mut dev: Vec<f64> = v.iter().map(|x| (x - m).abs()).collect();
    (m, median(&mut dev))
}

pub fn batch_estimate(
    steps: &[ObservedStep],
    mass: f64,
    inertia_z: f64,
    cm_height: f64,
    floor: f64,
) -> Result<FrictionEstimate, SysidError> {
    let mut per_step = Vec::with_capacity(steps.len());
    let mut skipped = 0;
    for s in steps {
        let rec = reconstruct(s, mass, inertia_z, cm_height);
        match one_step_estimate(&rec, s.normal, floor) {
            Ok(e) => per_step.push(e),
            Err(_) => skipped += 1,
        }
    }
    if per_step.is_empty() {
        return Err(SysidError::AllDegenerate { skipped });
    }
    let (et_mu, d0) = median_and_mad(per_step.iter().map(|e| e.et_mu));
    let (ratio_o, d1) = median_and_mad(per_step.iter().map(|e| e.ratio_o));
    let (ratio_r, d2) = median_and_mad(per_step.iter().map(|e| e.ratio_r));
    Ok(FrictionEstimate {
        et_mu,
        ratio_o,
        ratio_r,
        per_step,
        dispersion: [d0, d1, d2],
        skipped,
    })
}

/// Observed steps from a start state and the records that follow it.
pub fn observed_steps(
    initial: &SliderState,
    records: &[crate::stepper::TrajectoryRecord],
) -> Vec<ObservedStep> {
    let mut before = *initial;
    records
        .iter()
        .map(|r| {
            let s = ObservedStep {
                before,
                after: r.state,
                applied: r.applied,
                normal: r.impulse.normal,
            };
            before = r.state;
            s
        })
        .collect()
}
