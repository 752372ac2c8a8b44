use fold_dynamics_core::math::angle_diff;
use fold_dynamics_core::model::{self, PostGalilean, RadialLagrangian};
use fold_dynamics_core::{CartesianState, OscillatorParams, PolarState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Four ulps of the uncancelled term magnitudes.
const ULP4: f64 = 4.0 * f64::EPSILON;

fn params() -> impl Strategy<Value = OscillatorParams> {
    (0.1f64..10.0, 0.1f64..10.0, 0.1f64..10.0).prop_map(|(m, c, r0)| OscillatorParams::new(m, c, r0).unwrap())
}

proptest! {
    #[test]
    fn energy_identity(p in params(), rho in 0.0f64..3.0, x in 0.0f64..0.999) {
        let r = rho * p.r0();
        let d = model::derivatives(&p, r, x).unwrap();
        let rebuilt = 2.0 * x * d.l_x - d.l;
        let scale = p.energy_scale() * (1.0 / (1.0 - x).sqrt() + 2.0 * rho * rho);
        prop_assert!((d.e - rebuilt).abs() <= ULP4 * scale, "{} vs {}", d.e, rebuilt);
        let e = model::energy(&p, r, x).unwrap();
        prop_assert!((e - d.e).abs() <= ULP4 * d.e.abs());
    }

    #[test]
    fn hessian_identity(p in params(), rho in 0.0f64..3.0, x in 0.0f64..0.999) {
        let d = model::derivatives(&p, rho * p.r0(), x).unwrap();
        let lhs = d.l_x + 2.0 * x * d.l_xx;
        let scale = p.energy_scale() * ((1.0 - x).powf(-1.5) + rho * rho);
        prop_assert!((lhs - d.e_x).abs() <= ULP4 * scale);
    }

    #[test]
    fn legendre_image_is_nonnegative(p in params(), rho in 0.0f64..5.0, x in 0.0f64..0.999, phi in -4.0f64..4.0, u in -4.0f64..4.0) {
        let s = PolarState::new(rho * p.r0(), phi, x, u).unwrap();
        let img = model::legendre_map(&p, &s).unwrap();
        prop_assert!(img.y >= 0.0);
        prop_assert_eq!(img.alpha, s.theta());
    }

    #[test]
    fn angular_momentum_two_forms(p in params(), rho in 0.0f64..3.0, x in 0.0f64..0.99, u in -4.0f64..4.0) {
        let r = rho * p.r0();
        let d = model::derivatives(&p, r, x).unwrap();
        let via_lx = 2.0 / p.c() * r * x.sqrt() * d.l_x * u.sin();
        let i = model::angular_momentum(&p, r, x, u).unwrap();
        prop_assert!((i - via_lx).abs() <= 1e-13 * (i.abs() + p.momentum_scale() * rho * x.sqrt()));
    }
}

#[test]
fn partials_match_central_differences() {
    let h = 1e-6;
    let f = |rho: f64, x: f64| PostGalilean.bundle(rho, x);
    let check = |name: &str, exact: f64, fd: f64, rho: f64, x: f64| {
        let err = (exact - fd).abs() / exact.abs().max(1.0);
        assert!(err < 1e-6, "{name} at ({rho}, {x}): {exact} vs {fd}");
    };
    for i in 0..=30 {
        let rho = 3.0 * i as f64 / 30.0;
        for j in 0..=94 {
            let x = 0.01 + 0.94 * j as f64 / 94.0;
            let d = f(rho, x);
            let (xp, xm) = (f(rho, x + h), f(rho, x - h));
            let (rp, rm) = (f(rho + h, x), f(rho - h, x));
            check("L_r", d.l_r, (rp.l - rm.l) / (2.0 * h), rho, x);
            check("L_x", d.l_x, (xp.l - xm.l) / (2.0 * h), rho, x);
            check("L_xx", d.l_xx, (xp.l_x - xm.l_x) / (2.0 * h), rho, x);
            check("L_xr", d.l_xr, (rp.l_x - rm.l_x) / (2.0 * h), rho, x);
            check("E_r", d.e_r, (rp.e - rm.e) / (2.0 * h), rho, x);
            check("E_x", d.e_x, (xp.e - xm.e) / (2.0 * h), rho, x);
            check("E_xx", d.e_xx, (xp.e_x - xm.e_x) / (2.0 * h), rho, x);
            check("E_xr", d.e_xr, (rp.e_x - rm.e_x) / (2.0 * h), rho, x);
        }
    }
}

#[test]
fn physical_bundle_matches_finite_differences() {
    let p = OscillatorParams::new(2.0, 3.0, 0.7).unwrap();
    let (r, x, h) = (0.9, 0.4, 1e-6);
    let d = model::derivatives(&p, r, x).unwrap();
    let e = |r: f64, x: f64| model::energy(&p, r, x).unwrap();
    let fd = (e(r, x + h) - e(r, x - h)) / (2.0 * h);
    assert!((fd - d.e_x).abs() < 1e-6 * d.e_x.abs());
    let fd = (e(r + h, x) - e(r - h, x)) / (2.0 * h);
    assert!((fd - d.e_r).abs() < 1e-6 * d.e_r.abs());
}

#[test]
fn polar_round_trip() {
    let p = OscillatorParams::new(1.0, 2.0, 1.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let s = PolarState::new(
            rng.gen_range(1e-3..5.0),
            rng.gen_range(-3.1..3.1),
            rng.gen_range(1e-4..0.99),
            rng.gen_range(-3.1..3.1),
        )
        .unwrap();
        let back = model::to_polar(&p, &model::to_cartesian(&p, &s)).unwrap();
        assert!((back.r - s.r).abs() < 1e-12 * s.r.max(1.0));
        assert!((back.x - s.x).abs() < 1e-12);
        assert!(angle_diff(back.phi, s.phi).abs() < 1e-12);
        assert!(angle_diff(back.u, s.u).abs() < 1e-12);
    }
}

#[test]
fn cartesian_round_trip() {
    let p = OscillatorParams::unit();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let c = CartesianState {
            q1: rng.gen_range(-3.0..3.0),
            q2: rng.gen_range(-3.0..3.0),
            v1: rng.gen_range(-0.7..0.7),
            v2: rng.gen_range(-0.7..0.7),
        };
        let back = model::to_cartesian(&p, &model::to_polar(&p, &c).unwrap());
        for (a, b) in [(c.q1, back.q1), (c.q2, back.q2), (c.v1, back.v1), (c.v2, back.v2)] {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}
