//! Singular locus of the Legendre map and in/out classification on the fold.
//!
//! For `L(r, x)` the Hessian factors as `det L_vv = (4/c⁴) L_x E_x`, so the
//! locus splits into the fold `S1 = {E_x = 0}` and `S2 = {L_x = 0}`. For the
//! oscillator they meet only on the circle `γ = {r = r0, x = 0}`.

use crate::model::{self, OscillatorParams, PolarState};
use crate::numerics::find_root;
use crate::{math, Error, Result};

/// Tolerance on `|E_x|`, `|L_x|` (units of `mc²`) for locus membership.
pub const LOCUS_TOL: f64 = 1e-9;

/// Band on `|cos u|` inside which a fold point counts as tangent.
pub const TANGENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocusClass {
    Regular,
    S1Fold,
    S2,
    GammaSing,
}

pub fn classify_locus(params: &OscillatorParams, r: f64, x: f64, tol: f64) -> Result<LocusClass> {
    params.check_x(x)?;
    let d = model::nd(r / params.r0(), x);
    Ok(match (d.e_x.abs() <= tol, d.l_x.abs() <= tol) {
        (true, true) => LocusClass::GammaSing,
        (true, false) => LocusClass::S1Fold,
        (false, true) => LocusClass::S2,
        (false, false) => LocusClass::Regular,
    })
}

/// `H(r, x) = (4/c⁴) L_x E_x`.
pub fn hessian(params: &OscillatorParams, r: f64, x: f64) -> Result<f64> {
    let d = model::derivatives(params, r, x)?;
    let c2 = params.c() * params.c();
    Ok(4.0 / (c2 * c2) * d.l_x * d.e_x)
}

/// `‖L_{v_i v_j}‖ = (2/c²) L_x δ_ij + (4/c⁴) L_xx v_i v_j` at a Cartesian
/// velocity `v` and radius `r`.
pub fn velocity_hessian(params: &OscillatorParams, r: f64, v: [f64; 2]) -> Result<[[f64; 2]; 2]> {
    let c2 = params.c() * params.c();
    let x = (v[0] * v[0] + v[1] * v[1]) / c2;
    let d = model::derivatives(params, r, x)?;
    let a = 2.0 / c2 * d.l_x;
    let b = 4.0 / (c2 * c2) * d.l_xx;
    Ok([
        [a + b * v[0] * v[0], b * v[0] * v[1]],
        [b * v[0] * v[1], a + b * v[1] * v[1]],
    ])
}

/// Pushes a chart tangent `(dr, dφ, dx, du)` at `s` to Cartesian
/// components `(dq1, dq2, dv1, dv2)`.
pub fn chart_to_cartesian_tangent(params: &OscillatorParams, s: &PolarState, w: [f64; 4]) -> [f64; 4] {
    let [dr, dphi, dx, du] = w;
    let (sp, cp) = (math::sin(s.phi), math::cos(s.phi));
    let theta = s.phi + s.u;
    let (st, ct) = (math::sin(theta), math::cos(theta));
    let sqx = math::sqrt(s.x);
    let c = params.c();
    let radial = if dx == 0.0 { 0.0 } else { c / (2.0 * sqx) * dx };
    let angular = c * sqx * (dphi + du);
    [
        dr * cp - s.r * dphi * sp,
        dr * sp + s.r * dphi * cp,
        radial * ct - angular * st,
        radial * st + angular * ct,
    ]
}

/// Fold curve `r1(x) = r0 (1-x)^(-3/4)`, the solution of `E_x(r, x) = 0`.
pub fn r1_of_x(params: &OscillatorParams, x: f64) -> Result<f64> {
    params.check_x(x)?;
    Ok(params.r0() * r1_nd(x))
}

#[inline]
pub(crate) fn r1_nd(x: f64) -> f64 {
    let inv_s = 1.0 / math::sqrt(1.0 - x);
    inv_s * math::sqrt(inv_s)
}

/// Inverse of [`r1_of_x`]: `x1(r) = 1 - (r/r0)^(-4/3)` for `r ≥ r0`.
pub fn x1_of_r(params: &OscillatorParams, r: f64) -> Result<f64> {
    let rho = r / params.r0();
    if !(rho >= 1.0) {
        return Err(Error::InvalidParameter { name: "r", value: r });
    }
    Ok(x1_of_rho(rho))
}

#[inline]
fn x1_of_rho(rho: f64) -> f64 {
    let c = math::cbrt(rho);
    1.0 - 1.0 / (c * c * c * c)
}

/// `C2 = {L_x = 0}`: `r2(x) = r0 (1-x)^(-1/4)`.
pub fn r2_of_x(params: &OscillatorParams, x: f64) -> Result<f64> {
    params.check_x(x)?;
    Ok(params.r0() / math::sqrt(math::sqrt(1.0 - x)))
}

/// Energy (units of `mc²`) along the fold curve.
#[inline]
pub(crate) fn fold_energy_nd(x: f64) -> f64 {
    let inv_s = 1.0 / math::sqrt(1.0 - x);
    inv_s + inv_s * inv_s * inv_s * (1.0 - 0.5 * x)
}

/// Energy (units of `mc²`) along `C2`.
#[inline]
pub(crate) fn s2_energy_nd(x: f64) -> f64 {
    (2.0 - 0.5 * x) / math::sqrt(1.0 - x)
}

const LEVEL_TOL: f64 = 1e-12;

fn level_crossing(params: &OscillatorParams, lambda: f64, energy_on_curve: fn(f64) -> f64) -> Option<f64> {
    if lambda < 2.0 - LEVEL_TOL || lambda.is_nan() {
        return None;
    }
    if lambda <= 2.0 + LEVEL_TOL {
        return Some(0.0);
    }
    let hi = params.x_max();
    if energy_on_curve(hi) < lambda {
        return None;
    }
    find_root(|x| energy_on_curve(x) - lambda, (0.0, hi), 0.0).ok()
}

/// `x1(λ)`: abscissa of the torus `Σ_λ ∩ S1`. `Some(0)` at `λ = 2`, `None`
/// below.
pub fn x1_of_lambda(params: &OscillatorParams, lambda: f64) -> Option<f64> {
    level_crossing(params, lambda, fold_energy_nd)
}

/// `x2(λ)`: abscissa of the torus `Σ_λ ∩ S2`, same trichotomy as
/// [`x1_of_lambda`].
pub fn x2_of_lambda(params: &OscillatorParams, lambda: f64) -> Option<f64> {
    level_crossing(params, lambda, s2_energy_nd)
}

/// Equation of the fold image: `g(r, y) = 4 x1(r) L̃_x(r)² / (m²c⁴) - y`.
/// Defined for `r ≥ r0`.
pub fn g_surface(params: &OscillatorParams, r: f64, y: f64) -> Result<f64> {
    let rho = r / params.r0();
    if !(rho >= 1.0) {
        return Err(Error::InvalidParameter { name: "r", value: r });
    }
    let x1 = x1_of_rho(rho);
    let lx = model::nd(rho, x1).l_x;
    Ok(4.0 * x1 * lx * lx - y)
}

/// Signed rate of `g` along the relative Hamiltonian field at the fold point
/// `(r1(x), x, u)`: `4/(m²c³) √x cos u L̃_x Ẽ_r`.
pub fn relative_field_on_s1(params: &OscillatorParams, x: f64, u: f64) -> Result<f64> {
    params.check_x(x)?;
    Ok(params.c() / params.r0() * relative_field_nd(x, u))
}

fn relative_field_nd(x: f64, u: f64) -> f64 {
    let d = model::nd(r1_nd(x), x);
    4.0 * math::sqrt(x) * math::cos(u) * d.l_x * d.e_r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InOut {
    InPoint,
    OutPoint,
    /// On `W = S1 ∩ {u = ±π/2}`; the field points toward `S1⁻`.
    Tangent,
}

/// In/out class of a fold point.
///
/// `L̃_x < 0` and `Ẽ_r > 0` on the fold, so the sign of the relative field
/// is `-sign(cos u)`, so in-points have `cos u < 0`. The comparison is done on
/// `cos u` itself with [`TANGENT_TOL`].
pub fn classify_inout(params: &OscillatorParams, x: f64, u: f64) -> Result<InOut> {
    params.check_x(x)?;
    if !(x > 0.0) {
        return Err(Error::SingularLocus("fold point on the circle γ"));
    }
    let d = model::nd(r1_nd(x), x);
    let sign = math::signum(d.l_x * d.e_r);
    let cu = math::cos(u);
    Ok(if cu.abs() <= TANGENT_TOL {
        InOut::Tangent
    } else if sign * cu > 0.0 {
        InOut::InPoint
    } else {
        InOut::OutPoint
    })
}

/// Data attached to a point of the fold curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldGeometry {
    pub x: f64,
    pub r1: f64,
    /// Unit kernel vector of the Legendre differential in `(r, φ, x, u)`.
    pub kernel_direction: [f64; 4],
    pub l_x: f64,
    pub e_r: f64,
}

pub fn fold_geometry(params: &OscillatorParams, x: f64) -> Result<FoldGeometry> {
    let r1 = r1_of_x(params, x)?;
    let kernel_direction = kernel_direction(params, r1, x, 0.0)?;
    let d = model::derivatives(params, r1, x)?;
    Ok(FoldGeometry {
        x,
        r1,
        kernel_direction,
        l_x: d.l_x,
        e_r: d.e_r,
    })
}

/// Kernel of `dL` in the chart `(r, φ, x, u)`: `∂/∂x` on `S1 ∖ S2`,
/// `-∂/∂u` on `S2 ∖ S1`.
pub fn kernel_direction(params: &OscillatorParams, r: f64, x: f64, _u: f64) -> Result<[f64; 4]> {
    match classify_locus(params, r, x, LOCUS_TOL)? {
        LocusClass::S1Fold => Ok([0.0, 0.0, 1.0, 0.0]),
        LocusClass::S2 => {
            if x == 0.0 {
                Err(Error::SingularChart("velocity direction undefined at rest"))
            } else {
                Ok([0.0, 0.0, 0.0, -1.0])
            }
        }
        LocusClass::GammaSing => Err(Error::UndefinedKernel),
        LocusClass::Regular => Err(Error::NotSingular),
    }
}
