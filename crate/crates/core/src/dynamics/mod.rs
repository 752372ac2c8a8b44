//! Reduced Euler–Lagrange flow, fold impacts and hybrid trajectories.
//!
//! The flow in `(r, x, u)` with `φ` recovered by quadrature:
//!
//! ```text
//! ṙ = c √x cos u
//! ẋ = -c (E_r/E_x) √x cos u
//! u̇ = -c sin u (2x L_x + r L_r) / (2 r √x L_x)
//! φ̇ = c √x sin u / r
//! ```
//!
//! `ẋ` blows up on the fold `E_x = 0`, so arcs are integrated in a fictive
//! time `τ` with `dt/dτ = |E_x| / mc²`, in which the field is smooth
//! through the fold.

mod arc;
mod hybrid;
mod level;

pub use arc::{integrate_arc, integrate_arc_from, Termination, TrajectoryArc};
pub use hybrid::{
    apply_transition, apply_transition_with, simulate, ArcNode, BranchFailure, BranchPolicy,
    Departure, HybridTrajectory, JumpEvent, JumpRecord, Sheet, SimulationConfig,
    DEFAULT_EPS_RESTART, DEFAULT_MAX_JUMPS,
};
pub use level::{
    closed_orbit_check, level_topology, orbit_profile, r_en, start_state, state_on_level,
    ClosedOrbit, Component, Components, LevelTopology,
};

use crate::model::{self, OscillatorParams};
use crate::singular::LOCUS_TOL;
use crate::{math, Error, Result};

/// Distance (nondimensional) at which arcs halt near `S2`, `γ` and `x = 1`.
pub const HALT_TOL: f64 = 1e-6;

/// Radial arcs halt when `x` drops below this.
pub const REST_TOL: f64 = 1e-10;

fn check_regular(params: &OscillatorParams, r: f64, x: f64) -> Result<model::DerivativeBundle> {
    params.check_x(x)?;
    if !(r > 0.0) {
        return Err(Error::NegativeRadius(r));
    }
    if !(x > 0.0) {
        return Err(Error::SingularChart("velocity direction undefined at rest"));
    }
    Ok(model::nd(r / params.r0(), x))
}

/// `(ṙ, ẋ, u̇)` of the Euler–Lagrange flow, off the singular locus.
pub fn el_rhs(params: &OscillatorParams, r: f64, x: f64, u: f64) -> Result<[f64; 3]> {
    let d = check_regular(params, r, x)?;
    if d.e_x.abs() <= LOCUS_TOL {
        return Err(Error::SingularLocus("E_x = 0"));
    }
    if d.l_x.abs() <= LOCUS_TOL {
        return Err(Error::SingularLocus("L_x = 0"));
    }
    let rate = params.c() / params.r0();
    let rho = r / params.r0();
    let sqx = math::sqrt(x);
    let (su, cu) = (math::sin(u), math::cos(u));
    Ok([
        params.c() * sqx * cu,
        -rate * d.e_r / d.e_x * sqx * cu,
        -rate * su * (2.0 * x * d.l_x + rho * d.l_r) / (2.0 * rho * sqx * d.l_x),
    ])
}

/// `φ̇ = c √x sin u / r`.
pub fn phi_rate(params: &OscillatorParams, r: f64, x: f64, u: f64) -> Result<f64> {
    params.check_x(x)?;
    if !(r > 0.0) {
        return Err(Error::NegativeRadius(r));
    }
    Ok(params.c() * math::sqrt(x) * math::sin(u) / r)
}

/// `(dr, dx, du, dt)` per unit fictive time, with `dt/dτ = |E_x| / mc²`.
pub fn rescaled_rhs(params: &OscillatorParams, r: f64, x: f64, u: f64) -> Result<[f64; 4]> {
    let d = check_regular(params, r, x)?;
    if d.l_x.abs() <= LOCUS_TOL {
        return Err(Error::SingularLocus("L_x = 0"));
    }
    let s = if d.e_x < 0.0 { -1.0 } else { 1.0 };
    let y = rescaled_nd(s, &[r / params.r0(), x, u, 0.0, 0.0]);
    let ts = params.time_scale();
    Ok([y[0] * params.r0(), y[1], y[2], y[4] * ts])
}

/// Nondimensional fictive-time field on `[ρ, x, u, φ, t]`, `d/dτ = s E_x d/dt`.
pub(crate) fn rescaled_nd(s: f64, y: &[f64; 5]) -> [f64; 5] {
    let (rho, x, u) = (y[0], y[1].max(0.0), y[2]);
    let d = model::nd(rho, x);
    let sqx = math::sqrt(x);
    let (su, cu) = (math::sin(u), math::cos(u));
    let w = s * d.e_x;
    let du = if su == 0.0 {
        0.0
    } else {
        -w * su * (2.0 * x * d.l_x + rho * d.l_r) / (2.0 * rho * sqx * d.l_x)
    };
    [
        w * sqx * cu,
        -s * d.e_r * sqx * cu,
        du,
        w * sqx * su / rho,
        w,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    #[test]
    fn circular_instant() {
        let p = OscillatorParams::unit();
        let f = el_rhs(&p, 0.5, 0.3, FRAC_PI_2).unwrap();
        assert!(f[0].abs() < 1e-16 && f[1].abs() < 1e-16);
        assert_eq!(phi_rate(&p, 0.5, 0.3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn integrals_are_annihilated() {
        let p = OscillatorParams::new(1.3, 0.8, 2.0).unwrap();
        for &(r, x, u) in &[(0.7, 0.2, 0.4), (3.1, 0.5, -2.0), (1.0, 0.8, 2.5)] {
            let f = el_rhs(&p, r, x, u).unwrap();
            let h = 1e-6;
            let de = |dr: f64, dx: f64| {
                (model::energy(&p, r + dr * h, x + dx * h).unwrap()
                    - model::energy(&p, r - dr * h, x - dx * h).unwrap())
                    / (2.0 * h)
            };
            let grad_e = [de(1.0, 0.0), de(0.0, 1.0)];
            let e_rate = grad_e[0] * f[0] + grad_e[1] * f[1];
            let i = |r: f64, x: f64, u: f64| model::angular_momentum(&p, r, x, u).unwrap();
            let i_rate = (i(r + h, x, u) - i(r - h, x, u)) / (2.0 * h) * f[0]
                + (i(r, x + h, u) - i(r, x - h, u)) / (2.0 * h) * f[1]
                + (i(r, x, u + h) - i(r, x, u - h)) / (2.0 * h) * f[2];
            let scale = p.energy_scale() * (f[0].abs() + f[1].abs());
            assert!(e_rate.abs() < 1e-8 * scale, "{e_rate}");
            assert!(i_rate.abs() < 1e-8 * p.momentum_scale() * (f[0].abs() + f[1].abs() + f[2].abs()), "{i_rate}");
        }
    }

    #[test]
    fn rescaled_is_finite_on_fold() {
        let p = OscillatorParams::unit();
        let x = 0.3;
        let r1 = crate::singular::r1_of_x(&p, x).unwrap();
        let f = rescaled_rhs(&p, r1, x, 0.5).unwrap();
        assert!(f.iter().all(|v| v.is_finite()));
        assert!(f[1].abs() > 0.1);
        assert!(el_rhs(&p, r1, x, 0.5).is_err());
    }

    #[test]
    fn rescaled_parallels_el() {
        let p = OscillatorParams::new(2.0, 3.0, 0.5).unwrap();
        let (r, x, u) = (0.2, 0.4, 1.1);
        let f = el_rhs(&p, r, x, u).unwrap();
        let g = rescaled_rhs(&p, r, x, u).unwrap();
        let k = g[3];
        for i in 0..3 {
            assert!((g[i] - k * f[i]).abs() < 1e-12 * g[i].abs().max(1e-300), "{i}");
        }
    }
}
