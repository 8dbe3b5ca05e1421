//! Slider and friction parameters, state, and contact patch geometry.
//!
//! Units are SI throughout and angles are in radians. The support plane is
//! `z = 0`, the contact-frame axes are aligned with the world axes, and the
//! centre of mass sits at height `cm_height` above the plane.

use alloc::vec::Vec;

use crate::error::ModelError;
use crate::geometry;

/// Smallest accepted torsional friction constant `e_r` (m). Below this the
/// spin equation becomes too stiff for the Newton solve.
pub const MIN_E_R: f64 = 1e-6;

/// Region of contact between slider and support, in body coordinates (m).
#[derive(Debug, Clone, PartialEq)]
pub enum ContactPatch {
    /// Simple polygon; may be non-convex.
    Polygon(Vec<[f64; 2]>),
    /// Ring centred on the body origin.
    Annulus {
        inner: f64,
        outer: f64,
    },
    Disk {
        radius: f64,
    },
}

impl ContactPatch {
    /// Axis-aligned square of the given side length centred on the body origin.
    pub fn square(side: f64) -> Self {
        let h = 0.5 * side;
        ContactPatch::Polygon(alloc::vec![[-h, -h], [h, -h], [h, h], [-h, h]])
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            ContactPatch::Polygon(vertices) => {
                if vertices.len() < 3 {
                    return Err(ModelError::TooFewVertices(vertices.len()));
                }
                if vertices.iter().flatten().any(|c| !c.is_finite()) {
                    return Err(ModelError::invalid("patch.vertices", "finite", f64::NAN));
                }
                let area = geometry::signed_area(vertices);
                if !(area.abs() > 0.0) {
                    return Err(ModelError::DegeneratePolygon);
                }
                Ok(())
            }
            ContactPatch::Annulus { inner, outer } => {
                if !(*inner > 0.0 && inner < outer && outer.is_finite()) {
                    return Err(ModelError::BadAnnulus {
                        inner: *inner,
                        outer: *outer,
                    });
                }
                Ok(())
            }
            ContactPatch::Disk { radius } => positive("patch.radius", *radius),
        }
    }

    /// Is the body-frame point inside the convex hull of the patch?
    pub fn hull_contains(&self, p: [f64; 2]) -> bool {
        match self {
            ContactPatch::Polygon(vertices) => {
                let hull = geometry::convex_hull(vertices);
                geometry::convex_polygon_contains(&hull, p)
            }
            ContactPatch::Annulus { outer, .. } => geometry::within_radius(p, *outer),
            ContactPatch::Disk { radius } => geometry::within_radius(p, *radius),
        }
    }

    /// Is the body-frame point on the material of the patch?
    pub fn material_contains(&self, p: [f64; 2]) -> bool {
        match self {
            ContactPatch::Polygon(vertices) => geometry::polygon_contains(vertices, p),
            ContactPatch::Annulus { inner, outer } => {
                geometry::within_radius(p, *outer) && !geometry::strictly_within_radius(p, *inner)
            }
            ContactPatch::Disk { radius } => geometry::within_radius(p, *radius),
        }
    }
}

/// Rigid slider resting on the support plane.
#[derive(Debug, Clone, PartialEq)]
pub struct SliderParams {
    /// kg
    pub mass: f64,
    /// Moment of inertia about the vertical axis through the CM (kg·m²).
    pub inertia_z: f64,
    /// Height of the CM above the support plane (m).
    pub cm_height: f64,
    /// m/s²
    pub gravity: f64,
    pub patch: ContactPatch,
}

/// The subset of [`SliderParams`] that enters the per-step equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassProperties {
    pub mass: f64,
    pub inertia_z: f64,
    pub cm_height: f64,
}

impl SliderParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        positive("slider.mass", self.mass)?;
        positive("slider.inertia_z", self.inertia_z)?;
        if !(self.cm_height >= 0.0 && self.cm_height.is_finite()) {
            return Err(ModelError::invalid(
                "slider.cm_height",
                "finite and >= 0",
                self.cm_height,
            ));
        }
        positive("slider.gravity", self.gravity)?;
        self.patch.validate()
    }

    pub fn mass_properties(&self) -> MassProperties {
        MassProperties {
            mass: self.mass,
            inertia_z: self.inertia_z,
            cm_height: self.cm_height,
        }
    }
}

/// Friction ellipsoid: `(f_x/e_t)² + (f_y/e_o)² + (m_z/e_r)² <= (mu f_n)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionParams {
    pub mu: f64,
    pub e_t: f64,
    pub e_o: f64,
    /// m
    pub e_r: f64,
}

impl FrictionParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        positive("friction.mu", self.mu)?;
        positive("friction.e_t", self.e_t)?;
        positive("friction.e_o", self.e_o)?;
        if !(self.e_r >= MIN_E_R && self.e_r.is_finite()) {
            return Err(ModelError::invalid("friction.e_r", ">= 1e-6 m", self.e_r));
        }
        Ok(())
    }

    pub fn is_isotropic(&self) -> bool {
        self.e_t == self.e_o
    }

    /// Ellipsoid constraint value `mu² p_n² - Σ (p_i/e_i)²`; zero on the boundary.
    pub fn ellipsoid_gap(&self, along_x: f64, along_y: f64, about_z: f64, normal: f64) -> f64 {
        let lim = self.mu * normal;
        lim * lim - sq(along_x / self.e_t) - sq(along_y / self.e_o) - sq(about_z / self.e_r)
    }
}

/// Planar configuration and velocity at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SliderState {
    pub q_x: f64,
    pub q_y: f64,
    pub theta_z: f64,
    pub v_x: f64,
    pub v_y: f64,
    pub w_z: f64,
    pub t: f64,
}

impl SliderState {
    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("initial.q_x", self.q_x),
            ("initial.q_y", self.q_y),
            ("initial.theta_z", self.theta_z),
            ("initial.v_x", self.v_x),
            ("initial.v_y", self.v_y),
            ("initial.w_z", self.w_z),
            ("initial.t", self.t),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(ModelError::invalid(name, "finite", v));
            }
        }
        Ok(())
    }

    pub fn kinetic_energy(&self, mass: f64, inertia_z: f64) -> f64 {
        0.5 * mass * (self.v_x * self.v_x + self.v_y * self.v_y)
            + 0.5 * inertia_z * self.w_z * self.w_z
    }

    pub fn is_at_rest(&self) -> bool {
        self.v_x == 0.0 && self.v_y == 0.0 && self.w_z == 0.0
    }
}

pub(crate) fn positive(field: &'static str, value: f64) -> Result<(), ModelError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::invalid(field, "finite and > 0", value))
    }
}

#[inline]
pub(crate) fn sq(x: f64) -> f64 {
    x * x
}
