//! Geometry of the energy levels `Σ_λ` and the orbits `Γ_{λ,μ}` in them.
//!
//! On `Σ_λ` the radius is `r_en(x, λ)² = (λ - (1-x)^(-1/2)) / (1 - x/2)`,
//! and an orbit of angular momentum `μ` is `sin u = μ / f(x)` with
//! `f = 2 r_en √x L_x(r_en, x)`.

use super::rescaled_nd;
use crate::model::{self, OscillatorParams, PolarState};
use crate::numerics::{find_root, rk_integrate, Direction, Event, SolverConfig};
use crate::singular::{x1_of_lambda, x2_of_lambda};
use crate::{math, Error, Result};

/// A connected component of `Σ_λ ∖ S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    /// `Σ_λ¹`, below the first torus: `E_x < 0`, `L_x < 0`.
    Inner,
    /// `Σ_λ²`, between the tori: `E_x > 0`, `L_x < 0`.
    Middle,
    /// `Σ_λ³`, beyond the second torus, or the whole level for `λ ≤ 2`.
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Components {
    One,
    Three,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelTopology {
    pub lambda: f64,
    pub components: Components,
    /// Torus abscissae; both zero at the contact level `λ = 2`.
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    /// Abscissa of the precession centre, where `2x L_x + r L_r = 0`.
    pub x_c: Option<f64>,
    /// Largest `x` on the level (`r_en = 0`).
    pub x_end: f64,
}

/// Nondimensional `r_en(x, λ)`.
pub(crate) fn r_en_nd(x: f64, lambda: f64) -> Option<f64> {
    let num = lambda - 1.0 / math::sqrt(1.0 - x);
    if num < 0.0 {
        return None;
    }
    Some(math::sqrt(num / (1.0 - 0.5 * x)))
}

/// Radius at which `(r, x)` lies on `Σ_λ`, or `None` past `x_end`.
pub fn r_en(params: &OscillatorParams, x: f64, lambda: f64) -> Option<f64> {
    params.check_x(x).ok()?;
    r_en_nd(x, lambda).map(|r| r * params.r0())
}

fn f_nd(x: f64, lambda: f64) -> Option<f64> {
    let r = r_en_nd(x, lambda)?;
    Some(r * math::sqrt(x) * (1.0 / math::sqrt(1.0 - x) - r * r))
}

/// `f(x) = 2 r_en √x L_x / (m c r0)`: the angular momentum of the point of
/// `Σ_λ` at `x` moving with `u = π/2`.
pub fn orbit_profile(params: &OscillatorParams, lambda: f64, x: f64) -> Option<f64> {
    params.check_x(x).ok()?;
    f_nd(x, lambda)
}

fn x_end_nd(params: &OscillatorParams, lambda: f64) -> f64 {
    (1.0 - 1.0 / (lambda * lambda)).min(params.x_max())
}

fn centre_fn(x: f64, lambda: f64) -> f64 {
    let r = r_en_nd(x, lambda).unwrap_or(0.0);
    let d = model::nd(r, x);
    2.0 * x * d.l_x + r * d.l_r
}

pub fn level_topology(params: &OscillatorParams, lambda: f64) -> Result<LevelTopology> {
    if !(lambda >= 1.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter { name: "lambda", value: lambda });
    }
    let x_end = x_end_nd(params, lambda);
    let x1 = x1_of_lambda(params, lambda);
    let x2 = x2_of_lambda(params, lambda);
    let three = matches!((x1, x2), (Some(a), Some(b)) if b > a && a > 0.0);
    let lo = if three { x2.unwrap_or(0.0) } else { 0.0 };
    let x_c = if x_end > lo && centre_fn(lo, lambda) < 0.0 {
        find_root(|x| centre_fn(x, lambda), (lo, x_end), 0.0).ok()
    } else {
        None
    };
    Ok(LevelTopology {
        lambda,
        components: if three { Components::Three } else { Components::One },
        x1,
        x2,
        x_c,
        x_end,
    })
}

/// Point of `Γ_{λ,μ}` at abscissa `x` with `sign(cos u) = cos_sign`.
pub fn state_on_level(
    params: &OscillatorParams,
    lambda: f64,
    mu: f64,
    x: f64,
    cos_sign: f64,
    phi: f64,
) -> Result<PolarState> {
    params.check_x(x)?;
    let r = r_en_nd(x, lambda).ok_or(Error::BranchConstruction { x, sin_u: f64::NAN })?;
    let f = r * math::sqrt(x) * (1.0 / math::sqrt(1.0 - x) - r * r);
    let s = if mu == 0.0 { 0.0 } else { mu / f };
    if !(s.abs() <= 1.0 + 1e-12) {
        return Err(Error::BranchConstruction { x, sin_u: s });
    }
    let s = s.clamp(-1.0, 1.0);
    let c = if cos_sign < 0.0 { -1.0 } else { 1.0 } * math::sqrt(1.0 - s * s);
    PolarState::new(r * params.r0(), phi, x, math::atan2(s, c))
}

/// Start state inside `component` on `Γ_{λ,μ}`, with `φ = 0`.
///
/// `Inner` and `Middle` starts sit halfway between the turning point of the
/// orbit and the fold; `Outer` starts sit at the centre abscissa.
pub fn start_state(
    params: &OscillatorParams,
    lambda: f64,
    mu: f64,
    component: Component,
    cos_sign: f64,
) -> Result<PolarState> {
    let topo = level_topology(params, lambda)?;
    let too_large = Error::InvalidParameter { name: "mu", value: mu };
    let turning = |a: f64, b: f64| -> Result<f64> {
        if mu == 0.0 {
            return Ok(a);
        }
        let g = |x: f64| f_nd(x, lambda).unwrap_or(0.0).abs() - mu.abs();
        find_root(g, (a, b), 0.0).map_err(|_| too_large)
    };
    let x0 = match (component, topo.components) {
        (Component::Outer, _) => {
            let xc = topo.x_c.ok_or(Error::InvalidParameter { name: "lambda", value: lambda })?;
            if f_nd(xc, lambda).unwrap_or(0.0).abs() < mu.abs() {
                return Err(too_large);
            }
            xc
        }
        (Component::Inner, Components::Three) => {
            let x1 = topo.x1.unwrap_or(0.0);
            0.5 * (turning(0.0, x1)? + x1)
        }
        (Component::Middle, Components::Three) => {
            let (x1, x2) = (topo.x1.unwrap_or(0.0), topo.x2.unwrap_or(0.0));
            if mu == 0.0 {
                0.5 * (x1 + x2)
            } else {
                0.5 * (x1 + turning(x1, x2)?)
            }
        }
        _ => return Err(Error::InvalidParameter { name: "lambda", value: lambda }),
    };
    state_on_level(params, lambda, mu, x0, cos_sign, 0.0)
}

/// First-return data of a precession orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedOrbit {
    pub period: f64,
    /// Distance in `(x, u)` between start and first return.
    pub residual: f64,
    pub x_c: f64,
    pub x_min: f64,
    pub x_max: f64,
    /// `x_min - x2`; positive when the orbit stays clear of `S2`.
    pub gap_to_s2: f64,
}

/// Integrates one loop of `Γ_{λ,μ}` in `Σ_λ³` from `(x_C, u0)`, `cos u0 > 0`.
pub fn closed_orbit_check(params: &OscillatorParams, lambda: f64, mu: f64, cfg: &SolverConfig) -> Result<ClosedOrbit> {
    if mu == 0.0 {
        return Err(Error::InvalidParameter { name: "mu", value: mu });
    }
    let topo = level_topology(params, lambda)?;
    let start = start_state(params, lambda, mu, Component::Outer, 1.0)?;
    let x_c = start.x;
    let x2 = topo.x2.unwrap_or(0.0);
    let y0 = [start.r / params.r0(), start.x, start.u, 0.0, 0.0];
    let back = |_: f64, y: &[f64; 5]| y[1] - x_c;
    let near_s2 = |_: f64, y: &[f64; 5]| model::nd(y[0], y[1]).l_x.abs() - super::HALT_TOL;
    let events = [
        Event::terminal(&back).direction(Direction::Falling),
        Event::terminal(&near_s2).direction(Direction::Falling),
    ];
    let sol = rk_integrate(|_, y| rescaled_nd(1.0, y), 0.0, y0, 1e15, cfg, &events)?;
    let hit = match sol.terminal_hit() {
        Some(h) if h.index == 0 => h,
        _ => return Err(Error::NonClosure { residual: f64::INFINITY }),
    };
    let residual = math::hypot(hit.y[1] - x_c, math::angle_diff(hit.y[2], start.u));
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (_, y) in sol.nodes() {
        x_min = x_min.min(y[1]);
        x_max = x_max.max(y[1]);
    }
    if residual > 1e-6 {
        return Err(Error::NonClosure { residual });
    }
    Ok(ClosedOrbit {
        period: hit.y[4] * params.time_scale(),
        residual,
        x_c,
        x_min,
        x_max,
        gap_to_s2: x_min - x2,
    })
}
