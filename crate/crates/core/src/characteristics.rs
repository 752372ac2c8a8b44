//! Characteristic flow on the fold `S1`, its first integral and the jump
//! partner of a fold arrival.
//!
//! With `q(x) = r1(x) √x L_x(r1(x), x)` the characteristic field is
//! `(q cos u, -q' sin u, q (r1'/r1) sin u)` in `(x, u, φ)` and `q sin u` is
//! constant along it.

use crate::model::OscillatorParams;
use crate::numerics::{
    find_root, integrate_singular, rk_integrate, Direction, Event, SingularEndpoint, Solution,
    SolverConfig,
};
use crate::singular::{self, InOut};
use crate::{math, Error, Result};
use core::f64::consts::PI;

/// Arrivals with `|sin ū|` below this are radial.
pub const TOL_RADIAL: f64 = 1e-8;

/// Absolute tolerance of the jump-angle quadrature.
pub const QUAD_TOL: f64 = 1e-10;

#[inline]
pub(crate) fn q_nd(x: f64) -> f64 {
    -0.5 * x * math::sqrt(x) * math::powf(1.0 - x, -2.25)
}

#[inline]
pub(crate) fn dq_nd(x: f64) -> f64 {
    q_nd(x) * (1.5 / x + 2.25 / (1.0 - x))
}

/// `r1'(x) / r1(x)`.
#[inline]
pub(crate) fn log_dr1_nd(x: f64) -> f64 {
    0.75 / (1.0 - x)
}

fn q_scale(params: &OscillatorParams) -> f64 {
    params.energy_scale() * params.r0()
}

fn check_open(params: &OscillatorParams, x: f64) -> Result<()> {
    params.check_x(x)?;
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { x, x_max: params.x_max() })
    }
}

/// `q(x)`, in units of `mc² r0`. Negative on `(0, 1)`.
pub fn q_of_x(params: &OscillatorParams, x: f64) -> Result<f64> {
    check_open(params, x)?;
    Ok(q_scale(params) * q_nd(x))
}

pub fn dq_of_x(params: &OscillatorParams, x: f64) -> Result<f64> {
    check_open(params, x)?;
    Ok(q_scale(params) * dq_nd(x))
}

/// Characteristic constant `a = q(x) sin u` of the fold point `(x, u)`.
pub fn characteristic_constant(params: &OscillatorParams, x: f64, u: f64) -> Result<f64> {
    Ok(q_of_x(params, x)? * math::sin(u))
}

/// Coefficients of the pulled-back symplectic form on `S1` (up to the
/// common factor `2/c`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharCoeffs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub fn char_coeffs(params: &OscillatorParams, x: f64, u: f64) -> Result<CharCoeffs> {
    check_open(params, x)?;
    let s = q_scale(params);
    let q = q_nd(x);
    let (su, cu) = (math::sin(u), math::cos(u));
    Ok(CharCoeffs {
        // √x L_x r1' = q r1'/r1
        alpha: s * q * log_dr1_nd(x) * su,
        beta: s * dq_nd(x) * su,
        gamma: s * q * cu,
    })
}

/// `(dx, du, dφ)` of the characteristic field at `(x, u)`.
pub fn characteristic_rhs(params: &OscillatorParams, x: f64, u: f64, _phi: f64) -> Result<[f64; 3]> {
    let c = char_coeffs(params, x, u)?;
    Ok([c.gamma, -c.beta, c.alpha])
}

fn rhs_nd(sigma: f64, y: &[f64; 3]) -> [f64; 3] {
    let (x, u) = (y[0], y[1]);
    let q = q_nd(x);
    let su = math::sin(u);
    [
        sigma * q * math::cos(u),
        -sigma * dq_nd(x) * su,
        sigma * q * log_dr1_nd(x) * su,
    ]
}

/// Turning point `x*` of the characteristic `q sin u = a`: the unique root
/// of `|q(x)| = |a|` in `(0, 1)`.
pub fn x_star(params: &OscillatorParams, a: f64) -> Result<f64> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::DegenerateRadial { sin_u: a, tol: 0.0 });
    }
    x_star_nd((a / q_scale(params)).abs())
}

fn x_star_nd(abs_a: f64) -> Result<f64> {
    // ½ x^{3/2} (1-x)^{-9/4} = |a|, cleared of the pole at x = 1
    let f = |x: f64| x * math::sqrt(x) - 2.0 * abs_a * math::powf(1.0 - x, 2.25);
    find_root(f, (0.0, 1.0), 0.0)
}

/// Jump angle in both raw and `(-π, π]` form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaPhi {
    pub raw: f64,
    pub wrapped: f64,
    pub x_star: f64,
}

/// Jump angle `Δφ(x̄, ū)` between the fold point `(x̄, ū)` and its partner
/// `(x̄, π - ū)`, by quadrature along the characteristic.
///
/// The sign is `-sign(tan ū)`; for `ū ∈ [0, π]` this is `-` below `π/2`
/// and `+` above, and `Δφ(x̄, -ū) = -Δφ(x̄, ū)`.
pub fn delta_phi(params: &OscillatorParams, x_bar: f64, u_bar: f64) -> Result<DeltaPhi> {
    check_open(params, x_bar)?;
    let u = math::wrap_angle(u_bar);
    let (su, cu) = (math::sin(u), math::cos(u));
    if su.abs() < TOL_RADIAL {
        return Err(Error::DegenerateRadial { sin_u: su, tol: TOL_RADIAL });
    }
    if cu.abs() <= singular::TANGENT_TOL {
        return Ok(DeltaPhi { raw: 0.0, wrapped: 0.0, x_star: x_bar });
    }
    let abs_a = (q_nd(x_bar) * su).abs();
    let xs = x_star_nd(abs_a)?.min(x_bar);
    let magnitude = jump_integral(xs, x_bar)?;
    let raw = -math::signum(su * cu) * magnitude;
    Ok(DeltaPhi { raw, wrapped: math::wrap_angle(raw), x_star: xs })
}

/// `2|a| ∫_{x*}^{x̄} r1'/(r1 √(q² - a²)) dx` with `|a| = |q(x*)|`.
fn jump_integral(xs: f64, x_bar: f64) -> Result<f64> {
    if x_bar <= xs {
        return Ok(0.0);
    }
    let inv_1mxs = 1.0 / (1.0 - xs);
    let integrand = |x: f64, off: f64| {
        // |q(x)|/|a| - 1 without cancellation
        let e = math::exp_m1(1.5 * math::ln_1p(off / xs) - 2.25 * math::ln_1p(-off * inv_1mxs));
        // 2|a| / √(q² - a²)
        2.0 / math::sqrt(e * (2.0 + e)) * log_dr1_nd(x)
    };
    integrate_singular(integrand, xs, x_bar, SingularEndpoint::Lower, QUAD_TOL)
}

/// Jump angle by direct integration of the characteristic field from
/// `(x̄, ū)` to `(x̄, π - ū)`. Independent of [`delta_phi`]; used as a
/// cross-check.
pub fn delta_phi_by_ode(params: &OscillatorParams, x_bar: f64, u_bar: f64, cfg: &SolverConfig) -> Result<f64> {
    check_open(params, x_bar)?;
    let u = math::wrap_angle(u_bar);
    let (su, cu) = (math::sin(u), math::cos(u));
    if su.abs() < TOL_RADIAL {
        return Err(Error::DegenerateRadial { sin_u: su, tol: TOL_RADIAL });
    }
    if cu.abs() <= singular::TANGENT_TOL {
        return Ok(0.0);
    }
    // orient so that x decreases first
    let sigma = math::signum(cu);
    let back = |_t: f64, y: &[f64; 3]| y[0] - x_bar;
    let events = [Event::terminal(&back).direction(Direction::Rising)];
    let sol = rk_integrate(|_, y| rhs_nd(sigma, y), 0.0, [x_bar, u, 0.0], 1e12, cfg, &events)?;
    match sol.terminal_hit() {
        Some(hit) => Ok(hit.y[2]),
        None => Err(Error::NonConvergence { achieved: sol.y_final[0] - x_bar, requested: cfg.event_tol }),
    }
}

/// Traces the characteristic through `(x0, u0, φ0)` in the nondimensional
/// parameter, stopping near `x = 0` or `x = x_max`.
pub fn trace_characteristic(
    params: &OscillatorParams,
    x0: f64,
    u0: f64,
    phi0: f64,
    t_end: f64,
    cfg: &SolverConfig,
) -> Result<Solution<3>> {
    check_open(params, x0)?;
    let lo = |_t: f64, y: &[f64; 3]| y[0] - 1e-6;
    let x_hi = params.x_max();
    let hi = |_t: f64, y: &[f64; 3]| x_hi - y[0];
    let events = [
        Event::terminal(&lo).direction(Direction::Falling),
        Event::terminal(&hi).direction(Direction::Falling),
    ];
    rk_integrate(|_, y| rhs_nd(1.0, y), 0.0, [x0, u0, phi0], t_end, cfg, &events)
}

/// A level curve `q(x) sin u = a` of the characteristic flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicArc {
    /// Characteristic constant, units of `mc² r0`.
    pub a: f64,
    /// `+1` when `u` increases along the flow, `-1` otherwise.
    pub orientation: f64,
    /// The arc lives on `[x_min, x_max]`; `x_min = x*`.
    pub x_min: f64,
    pub x_max: f64,
}

impl CharacteristicArc {
    pub fn through(params: &OscillatorParams, x: f64, u: f64) -> Result<Self> {
        let a = characteristic_constant(params, x, u)?;
        let x_min = if a == 0.0 { 0.0 } else { x_star(params, a)? };
        // du = -q' sin u with q' < 0
        let orientation = if math::sin(u) >= 0.0 { 1.0 } else { -1.0 };
        Ok(Self { a, orientation, x_min, x_max: params.x_max() })
    }

    /// `u ∈ [0, π/2]` branch value of `|u|` at `x`, or `None` below `x*`.
    pub fn abs_u_at(&self, params: &OscillatorParams, x: f64) -> Option<f64> {
        let q = q_of_x(params, x).ok()?;
        let s = (self.a / q).abs();
        if s > 1.0 {
            return None;
        }
        Some(math::asin(s))
    }

    /// Samples both branches `u` and `π - u` (mirrored to negative `u` when
    /// `a > 0`) on `n` points of `[x_min, x_end]`.
    pub fn sample(&self, params: &OscillatorParams, x_end: f64, n: usize) -> Vec<(f64, f64)> {
        let sign = if self.a > 0.0 { -1.0 } else { 1.0 };
        let mut lower = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n);
        let n = n.max(2);
        for k in 0..n {
            let x = self.x_min + (x_end - self.x_min) * k as f64 / (n - 1) as f64;
            let Some(w) = self.abs_u_at(params, x).or(if k == 0 { Some(PI / 2.0) } else { None }) else {
                continue;
            };
            lower.push((x, sign * w));
            upper.push((x, sign * (PI - w)));
        }
        lower.reverse();
        lower.extend(upper);
        lower
    }
}

use alloc::vec::Vec;

/// Handling of radial arrivals (`|sin ū| < TOL_RADIAL`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadialMode {
    /// Report [`Error::DegenerateRadial`].
    #[default]
    Halt,
    /// Pair `(x̄, 0)` with `(x̄, π)` using the limit of `Δφ` as `a → 0`.
    ContinuityLimit,
}

/// Arrival and decisive partner on one characteristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpSolution {
    pub x_bar: f64,
    pub u_bar: f64,
    /// `π - ū`, wrapped.
    pub u_tilde: f64,
    pub phi_bar: f64,
    /// `φ̄ + Δφ`, unwrapped.
    pub phi_tilde: f64,
    pub delta_phi: f64,
    pub delta_phi_wrapped: f64,
    pub x_star: f64,
    /// Sign branch of the jump formula; `+1` when `Δφ = 0`.
    pub branch_sign: i8,
    /// Characteristic constant, units of `mc² r0`.
    pub a: f64,
    pub arrival_class: InOut,
}

/// Decisive partner of a fold arrival under the default [`RadialMode`].
pub fn decisive_partner(params: &OscillatorParams, x_bar: f64, u_bar: f64, phi_bar: f64) -> Result<Option<JumpSolution>> {
    decisive_partner_with(params, x_bar, u_bar, phi_bar, RadialMode::Halt)
}

/// Decisive partner `(x̄, π - ū, φ̄ + Δφ)` of the arrival `(x̄, ū, φ̄)`.
///
/// `Ok(None)` for an in-point arrival, which no trajectory reaches from the
/// regular region. Tangent arrivals return the point itself with `Δφ = 0`.
pub fn decisive_partner_with(
    params: &OscillatorParams,
    x_bar: f64,
    u_bar: f64,
    phi_bar: f64,
    mode: RadialMode,
) -> Result<Option<JumpSolution>> {
    check_open(params, x_bar)?;
    let u = math::wrap_angle(u_bar);
    let arrival_class = singular::classify_inout(params, x_bar, u)?;
    if arrival_class == InOut::InPoint {
        return Ok(None);
    }
    let u_tilde = math::wrap_angle(PI - u);
    let a = characteristic_constant(params, x_bar, u)?;
    let dphi = if arrival_class == InOut::Tangent {
        DeltaPhi { raw: 0.0, wrapped: 0.0, x_star: x_bar }
    } else if math::sin(u).abs() < TOL_RADIAL {
        match mode {
            RadialMode::Halt => {
                return Err(Error::DegenerateRadial { sin_u: math::sin(u), tol: TOL_RADIAL })
            }
            RadialMode::ContinuityLimit => radial_limit(params, x_bar, u)?,
        }
    } else {
        delta_phi(params, x_bar, u)?
    };
    let partner_class = singular::classify_inout(params, x_bar, u_tilde)?;
    if arrival_class == InOut::OutPoint && partner_class != InOut::InPoint {
        return Err(Error::NoDecisivePoint { x: x_bar, u });
    }
    Ok(Some(JumpSolution {
        x_bar,
        u_bar: u,
        u_tilde,
        phi_bar,
        phi_tilde: phi_bar + dphi.raw,
        delta_phi: dphi.raw,
        delta_phi_wrapped: dphi.wrapped,
        x_star: dphi.x_star,
        branch_sign: if dphi.raw < 0.0 { -1 } else { 1 },
        a,
        arrival_class,
    }))
}

/// Richardson extrapolation of `Δφ` to `a = 0`, using `Δφ ~ C |a|^(2/3)`.
fn radial_limit(params: &OscillatorParams, x_bar: f64, u: f64) -> Result<DeltaPhi> {
    let side = if math::cos(u) >= 0.0 { 0.0 } else { PI };
    let probe = |h: f64| -> Result<f64> {
        let uh = if side == 0.0 { h } else { PI - h };
        Ok(delta_phi(params, x_bar, uh)?.raw)
    };
    let (h1, h2) = (1e-6, 5e-7);
    let (d1, d2) = (probe(h1)?, probe(h2)?);
    let (w1, w2) = (math::powf(h1, 2.0 / 3.0), math::powf(h2, 2.0 / 3.0));
    let raw = (d2 * w1 - d1 * w2) / (w1 - w2);
    Ok(DeltaPhi { raw, wrapped: math::wrap_angle(raw), x_star: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn unit() -> OscillatorParams {
        OscillatorParams::unit()
    }

    #[test]
    fn q_matches_composition() {
        let p = OscillatorParams::new(2.0, 3.0, 0.5).unwrap();
        for x in [0.01, 0.2, 0.5, 0.9] {
            let r1 = singular::r1_of_x(&p, x).unwrap();
            let lx = model::derivatives(&p, r1, x).unwrap().l_x;
            let composed = r1 * libm::sqrt(x) * lx;
            assert!((q_of_x(&p, x).unwrap() - composed).abs() < 1e-13 * composed.abs());
            assert!(composed < 0.0);
        }
    }

    #[test]
    fn printed_specialization() {
        let p = OscillatorParams::new(1.5, 2.0, 0.7).unwrap();
        let mc2r0 = 1.5 * 4.0 * 0.7;
        let a = -0.01;
        for x in [0.3, 0.5, 0.8] {
            let s = a / q_of_x(&p, x).unwrap();
            let printed = -(2.0 * a / mc2r0) * libm::pow(1.0 - x, 2.25) / libm::pow(x, 1.5);
            assert!((s - printed).abs() < 1e-12);
        }
    }

    #[test]
    fn coeff_zeros() {
        let c = char_coeffs(&unit(), 0.4, FRAC_PI_2).unwrap();
        assert!(c.gamma.abs() < 1e-16);
        let c = char_coeffs(&unit(), 0.4, 0.0).unwrap();
        assert_eq!((c.alpha, c.beta), (0.0, 0.0));
        let r = characteristic_rhs(&unit(), 0.4, 0.0, 0.0).unwrap();
        assert_eq!((r[1], r[2]), (0.0, 0.0));
    }

    #[test]
    fn x_star_inverts_q() {
        let a = q_of_x(&unit(), 0.5).unwrap();
        let xs = x_star(&unit(), a).unwrap();
        assert!((xs - 0.5).abs() < 1e-14);
        let xs = x_star(&unit(), 1e-9).unwrap();
        assert!(xs > 0.0 && xs < 1e-5);
        assert!(x_star(&unit(), 0.0).is_err());
    }

    #[test]
    fn delta_phi_zero_at_tangency() {
        let d = delta_phi(&unit(), 0.4, FRAC_PI_2).unwrap();
        assert_eq!(d.raw, 0.0);
        assert_eq!(d.x_star, 0.4);
    }

    #[test]
    fn delta_phi_matches_ode() {
        let cfg = SolverConfig::default();
        let q = delta_phi(&unit(), 0.4, FRAC_PI_4).unwrap();
        let o = delta_phi_by_ode(&unit(), 0.4, FRAC_PI_4, &cfg).unwrap();
        assert!(q.raw < 0.0);
        assert!((q.raw - o).abs() < 1e-8, "{} vs {}", q.raw, o);
    }

    #[test]
    fn delta_phi_sign_rules() {
        let p = unit();
        let d = |u: f64| delta_phi(&p, 0.5, u).unwrap().raw;
        assert!(d(1.0) < 0.0);
        assert!(d(2.0) > 0.0);
        assert!(d(-1.0) > 0.0);
        assert!(d(-2.0) < 0.0);
        assert!((d(1.0) + d(PI - 1.0)).abs() < 1e-12);
        assert!((d(1.0) + d(-1.0)).abs() < 1e-15);
    }

    #[test]
    fn partner_examples() {
        let p = unit();
        let j = decisive_partner(&p, 0.4, FRAC_PI_4, 0.3).unwrap().unwrap();
        assert!((j.u_tilde - 3.0 * FRAC_PI_4).abs() < 1e-15);
        assert_eq!(j.arrival_class, InOut::OutPoint);
        assert_eq!(j.branch_sign, -1);
        assert_eq!(j.phi_tilde, 0.3 + j.delta_phi);
        let r1 = singular::r1_of_x(&p, 0.4).unwrap();
        let i0 = model::angular_momentum(&p, r1, 0.4, j.u_bar).unwrap();
        let i1 = model::angular_momentum(&p, r1, 0.4, j.u_tilde).unwrap();
        assert!((i0 - i1).abs() < 1e-15);

        let t = decisive_partner(&p, 0.4, FRAC_PI_2, 0.3).unwrap().unwrap();
        assert_eq!((t.delta_phi, t.arrival_class), (0.0, InOut::Tangent));
        assert!((t.u_tilde - FRAC_PI_2).abs() < 1e-15);

        assert!(decisive_partner(&p, 0.4, 3.0 * FRAC_PI_4, 0.0).unwrap().is_none());
    }

    #[test]
    fn radial_arrival() {
        let p = unit();
        assert!(matches!(
            decisive_partner(&p, 0.4, 1e-12, 0.0),
            Err(Error::DegenerateRadial { .. })
        ));
        let j = decisive_partner_with(&p, 0.4, 1e-12, 0.0, RadialMode::ContinuityLimit)
            .unwrap()
            .unwrap();
        assert!(j.delta_phi.abs() < 1e-5, "{}", j.delta_phi);
        assert!((j.u_tilde - (PI - 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn arc_sampling_satisfies_invariant() {
        let p = unit();
        let arc = CharacteristicArc::through(&p, 0.6, 1.0).unwrap();
        for (x, u) in arc.sample(&p, 0.9, 50) {
            let v = q_of_x(&p, x).unwrap() * libm::sin(u);
            assert!((v - arc.a).abs() < 1e-12, "{x} {u}");
        }
    }
}
