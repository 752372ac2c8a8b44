mod support {
    pub mod hyperdual;
}

use fold_dynamics_core::model;
use fold_dynamics_core::singular::{self, InOut, LocusClass};
use fold_dynamics_core::{OscillatorParams, PolarState};
use proptest::prelude::*;
use std::f64::consts::PI;
use support::hyperdual;

fn params() -> impl Strategy<Value = OscillatorParams> {
    (0.2f64..5.0, 0.2f64..5.0, 0.2f64..5.0).prop_map(|(m, c, r0)| OscillatorParams::new(m, c, r0).unwrap())
}

fn bisect(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn hessian_factorisation_matches_hyperdual() {
    let p = OscillatorParams::new(1.3, 0.8, 1.7).unwrap();
    let vmax = p.c() * 0.99f64.sqrt();
    for i in 0..100 {
        let r = 3.0 * p.r0() * i as f64 / 99.0;
        for j in 0..100 {
            let a = 2.0 * PI * j as f64 / 100.0;
            let speed = vmax * ((j * 37 + i * 11) % 100) as f64 / 99.0;
            let v = [speed * a.cos(), speed * a.sin()];
            let h = hyperdual::velocity_hessian(p.m(), p.c(), p.r0(), r, v);
            let det = hyperdual::det2(&h);
            let x = (v[0] * v[0] + v[1] * v[1]) / (p.c() * p.c());
            let factored = singular::hessian(&p, r, x).unwrap();
            // Entries are differences of terms of size m((1-x)^(-3/2) + ρ²).
            let rho = r / p.r0();
            let entry = 2.0 * p.m() * ((1.0 - x).powf(-1.5) + rho * rho);
            let scale = (h[0][0] * h[1][1]).abs() + h[0][1] * h[0][1];
            let floor = 16.0 * f64::EPSILON * entry * entry;
            assert!((det - factored).abs() <= 1e-10 * scale + floor, "r={r} v={v:?}: {det} vs {factored}");
        }
    }
}

#[test]
fn velocity_hessian_matches_hyperdual() {
    let p = OscillatorParams::new(0.7, 1.9, 0.6).unwrap();
    for (r, v) in [(0.3, [0.4, -1.1]), (1.2, [1.5, 0.2]), (0.0, [0.0, 0.0])] {
        let a = singular::velocity_hessian(&p, r, v).unwrap();
        let b = hyperdual::velocity_hessian(p.m(), p.c(), p.r0(), r, v);
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[i][j] - b[i][j]).abs() < 1e-12 * (1.0 + b[i][j].abs()));
            }
        }
    }
}

proptest! {
    #[test]
    fn kernel_is_annihilated_on_the_fold(p in params(), x in 0.01f64..0.95, phi in -3.0f64..3.0, u in -3.0f64..3.0) {
        let r = singular::r1_of_x(&p, x).unwrap();
        let s = PolarState::new(r, phi, x, u).unwrap();
        let k = singular::kernel_direction(&p, r, x, u).unwrap();
        let w = singular::chart_to_cartesian_tangent(&p, &s, k);
        let b = [w[2], w[3]];
        let cart = model::to_cartesian(&p, &s);
        let h = hyperdual::velocity_hessian(p.m(), p.c(), p.r0(), r, [cart.v1, cart.v2]);
        let hb = [h[0][0] * b[0] + h[0][1] * b[1], h[1][0] * b[0] + h[1][1] * b[1]];
        let norm_h = (h[0][0].powi(2) + h[0][1].powi(2) + h[1][0].powi(2) + h[1][1].powi(2)).sqrt();
        let norm_b = b[0].hypot(b[1]);
        prop_assert!(norm_b > 0.0);
        prop_assert!(hb[0].hypot(hb[1]) < 1e-8 * norm_h * norm_b);
        prop_assert!(w[0] == 0.0 && w[1] == 0.0);
    }

    #[test]
    fn fold_curve_round_trip(p in params(), x in 0.0f64..0.99) {
        let r = singular::r1_of_x(&p, x).unwrap();
        prop_assert!((singular::x1_of_r(&p, r).unwrap() - x).abs() < 1e-10);
        prop_assert_eq!(singular::classify_locus(&p, r, x, 1e-9 * (1.0 - x).powf(-1.5)).unwrap(), if x == 0.0 { LocusClass::GammaSing } else { LocusClass::S1Fold });
    }

    #[test]
    fn region_sign_law(p in params(), rho in 0.0f64..4.0, x in 0.0f64..0.99) {
        let r = rho * p.r0();
        let d = model::derivatives(&p, r, x).unwrap();
        let r1 = singular::r1_of_x(&p, x).unwrap();
        let r2 = singular::r2_of_x(&p, x).unwrap();
        if (r - r1).abs() > 1e-9 * r1 {
            prop_assert_eq!(d.e_x > 0.0, r < r1);
        }
        if (r - r2).abs() > 1e-9 * r2 {
            prop_assert_eq!(d.l_x > 0.0, r < r2);
        }
        prop_assert!(r2 <= r1);
        let h = singular::hessian(&p, r, x).unwrap();
        prop_assert!(h == 0.0 || h.signum() == (d.l_x * d.e_x).signum());
    }

    #[test]
    fn fold_image_bounds_momentum_near_fold(p in params(), rho in 1.01f64..4.0, t in 0.02f64..0.98) {
        let r = rho * p.r0();
        let x1 = singular::x1_of_r(&p, r).unwrap();
        let x_s2 = 1.0 - rho.powi(-4);
        let x = t * x_s2;
        let y = model::psi(&p, r, x).unwrap();
        let g = singular::g_surface(&p, r, y).unwrap();
        prop_assert!(g >= -1e-12 * y.max(1.0), "x={x} x1={x1} g={g}");
        prop_assert!(singular::g_surface(&p, r, model::psi(&p, r, x1).unwrap()).unwrap().abs() < 1e-12 * y.max(1.0));
    }

    #[test]
    fn inout_swaps_under_reversal(p in params(), x in 1e-4f64..0.99, u in -PI..PI) {
        let a = singular::classify_inout(&p, x, u).unwrap();
        let b = singular::classify_inout(&p, x, PI - u).unwrap();
        let expected = match a {
            InOut::InPoint => InOut::OutPoint,
            InOut::OutPoint => InOut::InPoint,
            InOut::Tangent => InOut::Tangent,
        };
        prop_assert_eq!(b, expected);
        let field = singular::relative_field_on_s1(&p, x, u).unwrap();
        match a {
            InOut::InPoint => prop_assert!(field > 0.0),
            InOut::OutPoint => prop_assert!(field < 0.0),
            InOut::Tangent => {}
        }
    }
}

#[test]
fn torus_abscissae_match_bisection() {
    let p = OscillatorParams::new(2.0, 1.5, 0.5).unwrap();
    let scale = p.energy_scale();
    for lambda in [2.001, 2.2, 2.5, 3.0, 4.0, 7.5, 20.0] {
        let on_s1 = |x: f64| model::energy(&p, singular::r1_of_x(&p, x).unwrap(), x).unwrap() / scale - lambda;
        let on_s2 = |x: f64| model::energy(&p, singular::r2_of_x(&p, x).unwrap(), x).unwrap() / scale - lambda;
        let x1 = bisect(on_s1, 0.0, 0.999);
        let x2 = bisect(on_s2, 0.0, 0.999);
        assert!((singular::x1_of_lambda(&p, lambda).unwrap() - x1).abs() < 1e-10, "x1 at {lambda}");
        assert!((singular::x2_of_lambda(&p, lambda).unwrap() - x2).abs() < 1e-10, "x2 at {lambda}");
        assert!(x1 < x2);
    }
    assert_eq!(singular::x1_of_lambda(&p, 1.9), None);
    assert_eq!(singular::x2_of_lambda(&p, 1.5), None);
}

#[test]
fn fold_energy_is_increasing() {
    let p = OscillatorParams::unit();
    let mut prev = 0.0;
    for i in 0..=2000 {
        let x = 0.999 * i as f64 / 2000.0;
        let e = model::energy(&p, singular::r1_of_x(&p, x).unwrap(), x).unwrap();
        assert!(e > prev);
        prev = e;
    }
}
