use planar_slide_core::closed_form::{quasi_static_velocity, QuasiStaticInput};
use proptest::prelude::*;

/// Solves the quasi-static balance directly as a 3×3 linear system.
///
/// Unknowns `(v_x, v_y, w)`. Rows: the contact point moves with the pusher
/// (two rows), and the pusher moment about the CM balances the friction
/// moment, `dx v_y − dy v_x = c² w`.
fn balance_solution(d: [f64; 2], vc: [f64; 2], c: f64) -> [f64; 3] {
    let a = [[1.0, 0.0, -d[1]], [0.0, 1.0, d[0]], [-d[1], d[0], -c * c]];
    let b = [vc[0], vc[1], 0.0];
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d0 = det(a);
    core::array::from_fn(|k| {
        let mut m = a;
        for (row, rhs) in m.iter_mut().zip(b) {
            row[k] = rhs;
        }
        det(m) / d0
    })
}

proptest! {
    #[test]
    fn matches_balance_equations(
        dx in -0.1f64..0.1, dy in -0.1f64..0.1, cx in -1.0f64..1.0, cy in -1.0f64..1.0,
        vcx in -1.0f64..1.0, vcy in -1.0f64..1.0, c in 0.005f64..0.1,
    ) {
        let got = quasi_static_velocity(&QuasiStaticInput {
            contact_point: [cx + dx, cy + dy], contact_velocity: [vcx, vcy], cm: [cx, cy], c,
        });
        let want = balance_solution([dx, dy], [vcx, vcy], c);
        for i in 0..3 {
            prop_assert!((got[i] - want[i]).abs() <= 1e-9 * (1.0 + want[i].abs()));
        }
    }

    #[test]
    fn contact_point_velocity_reconstructed(
        xc in -0.2f64..0.2, yc in -0.2f64..0.2, qx in -0.2f64..0.2, qy in -0.2f64..0.2,
        vcx in -1.0f64..1.0, vcy in -1.0f64..1.0, c in 0.001f64..0.1,
    ) {
        let [vx, vy, w] = quasi_static_velocity(&QuasiStaticInput {
            contact_point: [xc, yc], contact_velocity: [vcx, vcy], cm: [qx, qy], c,
        });
        prop_assert!((vx - w * (yc - qy) - vcx).abs() <= 1e-12);
        prop_assert!((vy + w * (xc - qx) - vcy).abs() <= 1e-12);
    }

    #[test]
    fn contact_at_cm_is_exact(x in -1.0f64..1.0, y in -1.0f64..1.0, vcx in -1.0f64..1.0, vcy in -1.0f64..1.0) {
        let v = quasi_static_velocity(&QuasiStaticInput {
            contact_point: [x, y], contact_velocity: [vcx, vcy], cm: [x, y], c: 0.01,
        });
        prop_assert_eq!(v, [vcx, vcy, 0.0]);
    }
}
