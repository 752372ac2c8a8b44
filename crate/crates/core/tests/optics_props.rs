use fold_dynamics_core::optics::{self, MediumPair, RayState, Side};
use proptest::prelude::*;

fn direction() -> impl Strategy<Value = [f64; 3]> {
    // incoming from the + side: p3 > 0
    (0.001f64..1.5697, -3.2f64..3.2, 0.1f64..10.0).prop_map(|(phi, az, k)| {
        [k * phi.sin() * az.cos(), k * phi.sin() * az.sin(), k * phi.cos()]
    })
}

fn arrival(p: [f64; 3], q: (f64, f64)) -> RayState {
    RayState::new([q.0, q.1, 0.0], p).unwrap()
}

proptest! {
    #[test]
    fn impact_conserves_energy(p in direction(), q in (-5.0f64..5.0, -5.0f64..5.0), np in 0.3f64..3.0, nm in 0.3f64..3.0, c in 0.5f64..3.0) {
        let m = MediumPair::new(np, nm, c).unwrap();
        let a = arrival(p, q);
        let out = optics::impact(&m, &a).unwrap();
        let h = optics::optical_hamiltonian(&m, Side::Plus, &a.q, &a.p).unwrap();
        let hr = optics::optical_hamiltonian(&m, Side::Plus, &out.reflected.q, &out.reflected.p).unwrap();
        prop_assert!((h - hr).abs() <= 1e-12 * h);
        if let Some(r) = out.refracted {
            let ht = optics::optical_hamiltonian(&m, Side::Minus, &r.q, &r.p).unwrap();
            prop_assert!((h - ht).abs() <= 1e-12 * h, "{h} vs {ht}");
        }
    }

    #[test]
    fn transverse_momentum_and_position_unchanged(p in direction(), q in (-5.0f64..5.0, -5.0f64..5.0), nb in 0.2f64..3.0) {
        let m = MediumPair::new(1.0, nb, 1.0).unwrap();
        let a = arrival(p, q);
        let out = optics::impact(&m, &a).unwrap();
        let mut outs = vec![out.reflected];
        outs.extend(out.refracted);
        for r in outs {
            prop_assert_eq!(r.q, a.q);
            prop_assert_eq!((r.p[0], r.p[1]), (a.p[0], a.p[1]));
            // decisive points lie on the characteristic line through the arrival
            let line = optics::characteristic_line(&a).unwrap();
            let pt = line.at(r.p[2] - a.p[2]);
            prop_assert_eq!(&pt[3..5], &r.p[0..2]);
            prop_assert!((pt[5] - r.p[2]).abs() <= 1e-15 * a.momentum_norm());
        }
        prop_assert!(out.reflected.p[2] < 0.0);
        if let Some(r) = out.refracted {
            prop_assert!(r.p[2] >= 0.0);
        }
    }

    #[test]
    fn snell_law(phi in 0.001f64..1.5697, nb in 0.2f64..3.0) {
        let m = MediumPair::new(1.3, 1.3 * nb, 2.0).unwrap();
        let a = arrival([phi.sin(), 0.0, phi.cos()], (0.0, 0.0));
        let out = optics::impact(&m, &a).unwrap();
        prop_assert!((out.psi_plus - phi).abs() <= 1e-12);
        prop_assert!((out.phi - phi).abs() <= 1e-12);
        let critical = if nb < 1.0 { nb.asin() } else { f64::INFINITY };
        if phi < critical - 1e-9 {
            let psi = out.psi_minus.unwrap();
            prop_assert!((phi.sin() / psi.sin() - nb).abs() <= 1e-12 * nb.max(1.0));
            prop_assert!(!out.total_reflection);
        } else if phi > critical + 1e-9 {
            prop_assert!(out.total_reflection);
            prop_assert!(out.refracted.is_none() && out.psi_minus.is_none());
        }
    }

    #[test]
    fn mirror_is_an_involution(q in prop::array::uniform3(-5.0f64..5.0), p in direction()) {
        let r = RayState::new(q, p).unwrap();
        prop_assert_eq!(optics::mirror(&optics::mirror(&r)), r);
        let m = optics::mirror(&r);
        prop_assert_eq!(m.momentum_norm(), r.momentum_norm());
    }

    #[test]
    fn characteristic_is_skew_orthogonal_to_interface(p in direction(), eta in prop::array::uniform6(-10.0f64..10.0)) {
        let a = arrival(p, (0.4, -1.1));
        let line = optics::characteristic_line(&a).unwrap();
        let xi = line.direction();
        let mut tangent = eta;
        tangent[2] = 0.0;
        prop_assert_eq!(optics::omega(&xi, &tangent), 0.0);
        // a transversal vector pairs nontrivially
        let mut transversal = [0.0; 6];
        transversal[2] = 1.0;
        prop_assert!(optics::omega(&xi, &transversal) != 0.0);
        prop_assert_eq!(optics::omega(&eta, &eta), 0.0);
        prop_assert_eq!(optics::omega(&xi, &eta), -optics::omega(&eta, &xi));
    }

    #[test]
    fn propagation_is_reversible(p in direction(), t in 0.0f64..10.0) {
        let m = MediumPair::new(1.5, 1.0, 1.0).unwrap();
        let r = RayState::new([0.0, 0.0, -1.0], p).unwrap();
        let there = optics::propagate(&m, Side::Plus, &r, t).unwrap();
        let back = optics::propagate(&m, Side::Plus, &there, -t).unwrap();
        for i in 0..3 {
            prop_assert!((back.q[i] - r.q[i]).abs() < 1e-12 * (1.0 + t));
        }
        let v = optics::ray_velocity(&m, Side::Plus, &p).unwrap();
        let speed = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        prop_assert!((speed - m.speed(Side::Plus)).abs() < 1e-14);
    }
}

#[test]
fn critical_angle_boundary() {
    for nb in [0.5, 2.0 / 3.0, 0.9] {
        let m = MediumPair::new(1.0, nb, 1.0).unwrap();
        let crit = f64::asin(nb);
        let at = |phi: f64| optics::impact(&m, &arrival([phi.sin(), 0.0, phi.cos()], (0.0, 0.0))).unwrap();
        assert!(!at(crit - 1e-6).total_reflection);
        assert!(at(crit + 1e-6).total_reflection);
        let grazing = at(crit);
        assert!(!grazing.total_reflection);
        assert!((grazing.psi_minus.unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-5);
    }
}

#[test]
fn rejected_arrivals() {
    let m = MediumPair::new(1.0, 1.5, 1.0).unwrap();
    assert!(optics::impact(&m, &arrival([1.0, 0.0, 0.0], (0.0, 0.0))).is_err());
    assert!(optics::impact(&m, &arrival([0.3, 0.0, -1.0], (0.0, 0.0))).is_err());
    assert!(optics::impact(&m, &RayState::new([0.0, 0.0, 0.1], [0.0, 0.0, 1.0]).unwrap()).is_err());
    assert!(RayState::new([0.0; 3], [0.0; 3]).is_err());
}
