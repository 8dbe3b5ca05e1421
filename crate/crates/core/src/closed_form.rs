//! Closed-form special cases: quasi-static pushing and pure translation.

use alloc::vec::Vec;

use thiserror::Error;

use crate::model::FrictionParams;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ClosedFormError {
    #[error("pure translation needs isotropic friction (e_t = {e_t}, e_o = {e_o})")]
    Anisotropic { e_t: f64, e_o: f64 },
    #[error("momentum plus applied impulse is zero; sliding direction undefined")]
    ZeroMotion,
}

/// Pusher contact on the slider boundary and its velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiStaticInput {
    /// Contact point (m).
    pub contact_point: [f64; 2],
    /// Velocity of the contact point (m/s).
    pub contact_velocity: [f64; 2],
    /// CM projection (m).
    pub cm: [f64; 2],
    /// `e_r / e_t` (m), strictly positive.
    pub c: f64,
}

/// Slider velocity under quasi-static pushing, with the ECP beneath the CM
/// and isotropic friction.
pub fn quasi_static_velocity(input: &QuasiStaticInput) -> [f64; 3] {
    let dx = input.contact_point[0] - input.cm[0];
    let dy = input.contact_point[1] - input.cm[1];
    let [vcx, vcy] = input.contact_velocity;
    let c2 = input.c * input.c;
    let den = c2 + dx * dx + dy * dy;
    // Equivalent to v_x = [(c² + dx²) v_cx + dx dy v_cy]/D, v_y likewise, and
    // w = (dx v_y − dy v_x)/c², rearranged so that no 1/c² appears.
    let w_z = (dx * vcy - dy * vcx) / den;
    [vcx + w_z * dy, vcy - w_z * dx, w_z]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationStep {
    /// Friction impulse (N·s).
    pub impulse: [f64; 2],
    /// End-of-step velocity (m/s).
    pub velocity: [f64; 2],
    /// The friction impulse was enough to stop the slider in this step.
    pub rest: bool,
}

/// One backward-Euler step of pure translation with isotropic friction.
///
/// With `M = m v + p_applied`, the friction impulse is `−e_t μ p_n M/‖M‖`.
/// When `‖M‖ <= e_t μ p_n` that impulse would reverse the motion, so the
/// step ends at rest with friction cancelling `M` exactly.
pub fn pure_translation_step(
    velocity: [f64; 2],
    applied: [f64; 2],
    normal: f64,
    friction: &FrictionParams,
    mass: f64,
) -> Result<TranslationStep, ClosedFormError> {
    if friction.e_t != friction.e_o {
        return Err(ClosedFormError::Anisotropic {
            e_t: friction.e_t,
            e_o: friction.e_o,
        });
    }
    let mx = mass * velocity[0] + applied[0];
    let my = mass * velocity[1] + applied[1];
    let momentum = libm::hypot(mx, my);
    if momentum == 0.0 {
        return Err(ClosedFormError::ZeroMotion);
    }
    let limit = friction.e_t * friction.mu * normal;
    if momentum <= limit {
        return Ok(TranslationStep {
            impulse: [-mx, -my],
            velocity: [0.0, 0.0],
            rest: true,
        });
    }
    let k = -limit / momentum;
    let impulse = [k * mx, k * my];
    Ok(TranslationStep {
        impulse,
        velocity: [
            velocity[0] + (impulse[0] + applied[0]) / mass,
            velocity[1] + (impulse[1] + applied[1]) / mass,
        ],
        rest: false,
    })
}

/// Roll out pure translation with a constant applied impulse per step until
/// rest or `max_steps`. The returned steps include the resting one.
pub fn pure_translation_rollout(
    velocity: [f64; 2],
    applied: [f64; 2],
    normal: f64,
    friction: &FrictionParams,
    mass: f64,
    max_steps: usize,
) -> Result<Vec<TranslationStep>, ClosedFormError> {
    let mut out = Vec::new();
    let mut v = velocity;
    for _ in 0..max_steps {
        let s = pure_translation_step(v, applied, normal, friction, mass)?;
        out.push(s);
        if s.rest {
            break;
        }
        v = s.velocity;
    }
    Ok(out)
}
