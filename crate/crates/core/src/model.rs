//! The rotationally symmetric Lagrangian family `L(r, x)`, `x = v²/c²`,
//! and the post-Galilean relativistic oscillator
//! `L = -mc²[√(1-x) + (r/r0)²(1 + x/2)]`.
//!
//! Closed forms are evaluated in the unit system `m = c = r0 = 1`; the
//! public functions take [`OscillatorParams`] and return physical values.

use crate::{math, Error, Result};

/// Largest admissible squared speed ratio.
pub const DEFAULT_X_MAX: f64 = 1.0 - 1e-9;

/// Mass, speed of light and characteristic length of the oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    m: f64,
    c: f64,
    r0: f64,
    x_max: f64,
}

impl OscillatorParams {
    pub fn new(m: f64, c: f64, r0: f64) -> Result<Self> {
        for (name, value) in [("m", m), ("c", c), ("r0", r0)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(Self {
            m,
            c,
            r0,
            x_max: DEFAULT_X_MAX,
        })
    }

    /// `m = c = r0 = 1`.
    pub fn unit() -> Self {
        Self {
            m: 1.0,
            c: 1.0,
            r0: 1.0,
            x_max: DEFAULT_X_MAX,
        }
    }

    pub fn with_x_max(mut self, x_max: f64) -> Result<Self> {
        if !(x_max > 0.0 && x_max < 1.0) {
            return Err(Error::InvalidParameter {
                name: "x_max",
                value: x_max,
            });
        }
        self.x_max = x_max;
        Ok(self)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Elastic constant `k = m c² / r0²`.
    pub fn k(&self) -> f64 {
        self.m * self.c * self.c / (self.r0 * self.r0)
    }

    /// `m c²`.
    pub fn energy_scale(&self) -> f64 {
        self.m * self.c * self.c
    }

    /// `m c r0`, the unit of angular momentum.
    pub fn momentum_scale(&self) -> f64 {
        self.m * self.c * self.r0
    }

    /// `r0 / c`.
    pub fn time_scale(&self) -> f64 {
        self.r0 / self.c
    }

    pub fn check_x(&self, x: f64) -> Result<()> {
        if x >= 0.0 && x <= self.x_max {
            Ok(())
        } else {
            Err(Error::Domain {
                x,
                x_max: self.x_max,
            })
        }
    }

    pub(crate) fn check_r(&self, r: f64) -> Result<()> {
        if r >= 0.0 && r.is_finite() {
            Ok(())
        } else {
            Err(Error::NegativeRadius(r))
        }
    }
}

impl Default for OscillatorParams {
    fn default() -> Self {
        Self::unit()
    }
}

/// Phase point in the chart `(r, φ, x, u)` with `u = θ - φ` the angle from
/// the radius vector to the velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarState {
    pub r: f64,
    pub phi: f64,
    pub x: f64,
    pub u: f64,
}

impl PolarState {
    /// Validates `r ≥ 0`, `0 ≤ x < 1` and wraps both angles into `(-π, π]`.
    pub fn new(r: f64, phi: f64, x: f64, u: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::NegativeRadius(r));
        }
        if !(0.0..1.0).contains(&x) {
            return Err(Error::Domain { x, x_max: 1.0 });
        }
        Ok(Self {
            r,
            phi: math::wrap_angle(phi),
            x,
            u: math::wrap_angle(u),
        })
    }

    /// Direction of the velocity, `θ = φ + u`.
    pub fn theta(&self) -> f64 {
        math::wrap_angle(self.phi + self.u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianState {
    pub q1: f64,
    pub q2: f64,
    pub v1: f64,
    pub v2: f64,
}

/// `L`, `E = 2x L_x - L` and the partial derivatives used downstream, all
/// at one `(r, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeBundle {
    pub l: f64,
    pub l_r: f64,
    pub l_x: f64,
    pub l_xx: f64,
    pub l_xr: f64,
    pub e: f64,
    pub e_r: f64,
    pub e_x: f64,
    pub e_xx: f64,
    pub e_xr: f64,
}

impl DerivativeBundle {
    /// Rescales a bundle computed with `m = c = r0 = 1`.
    pub fn to_physical(self, params: &OscillatorParams) -> Self {
        let e = params.energy_scale();
        let er = e / params.r0;
        Self {
            l: self.l * e,
            l_r: self.l_r * er,
            l_x: self.l_x * e,
            l_xx: self.l_xx * e,
            l_xr: self.l_xr * er,
            e: self.e * e,
            e_r: self.e_r * er,
            e_x: self.e_x * e,
            e_xx: self.e_xx * e,
            e_xr: self.e_xr * er,
        }
    }
}

/// A Lagrangian depending only on `r` and `x`, evaluated in units with
/// `m = c = r0 = 1`.
pub trait RadialLagrangian {
    /// Caller guarantees `rho ≥ 0` and `0 ≤ x < 1`.
    fn bundle(&self, rho: f64, x: f64) -> DerivativeBundle;
}

/// The post-Galilean oscillator of tensor rank 2.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PostGalilean;

impl RadialLagrangian for PostGalilean {
    fn bundle(&self, rho: f64, x: f64) -> DerivativeBundle {
        let s = math::sqrt(1.0 - x);
        let inv_s = 1.0 / s;
        let inv_s3 = inv_s * inv_s * inv_s;
        let rho2 = rho * rho;
        DerivativeBundle {
            l: -(s + rho2 * (1.0 + 0.5 * x)),
            l_r: -2.0 * rho * (1.0 + 0.5 * x),
            l_x: 0.5 * (inv_s - rho2),
            l_xx: 0.25 * inv_s3,
            l_xr: -rho,
            e: inv_s + rho2 * (1.0 - 0.5 * x),
            e_r: 2.0 * rho * (1.0 - 0.5 * x),
            e_x: 0.5 * (inv_s3 - rho2),
            e_xx: 0.75 * inv_s3 * inv_s * inv_s,
            e_xr: -rho,
        }
    }
}

/// Dimensionless oscillator bundle without domain checks.
#[inline]
pub(crate) fn nd(rho: f64, x: f64) -> DerivativeBundle {
    PostGalilean.bundle(rho, x)
}

/// Evaluates any [`RadialLagrangian`] in physical units.
pub fn derivatives_of<Lg: RadialLagrangian>(
    lagrangian: &Lg,
    params: &OscillatorParams,
    r: f64,
    x: f64,
) -> Result<DerivativeBundle> {
    params.check_x(x)?;
    params.check_r(r)?;
    Ok(lagrangian.bundle(r / params.r0, x).to_physical(params))
}

pub fn lagrangian(params: &OscillatorParams, r: f64, x: f64) -> Result<f64> {
    params.check_x(x)?;
    params.check_r(r)?;
    let rho = r / params.r0;
    Ok(-params.energy_scale() * (math::sqrt(1.0 - x) + rho * rho * (1.0 + 0.5 * x)))
}

pub fn derivatives(params: &OscillatorParams, r: f64, x: f64) -> Result<DerivativeBundle> {
    derivatives_of(&PostGalilean, params, r, x)
}

/// `E = mc²[1/√(1-x) + (r/r0)²(1 - x/2)]`.
pub fn energy(params: &OscillatorParams, r: f64, x: f64) -> Result<f64> {
    params.check_x(x)?;
    params.check_r(r)?;
    let rho = r / params.r0;
    Ok(params.energy_scale() * (1.0 / math::sqrt(1.0 - x) + rho * rho * (1.0 - 0.5 * x)))
}

/// `I = m c r √x [1/√(1-x) - (r/r0)²] sin u`.
pub fn angular_momentum(params: &OscillatorParams, r: f64, x: f64, u: f64) -> Result<f64> {
    params.check_x(x)?;
    params.check_r(r)?;
    Ok(params.momentum_scale() * angular_momentum_nd(r / params.r0, x, u))
}

#[inline]
pub(crate) fn angular_momentum_nd(rho: f64, x: f64, u: f64) -> f64 {
    rho * math::sqrt(x) * (1.0 / math::sqrt(1.0 - x) - rho * rho) * math::sin(u)
}

/// Energy and angular momentum in units of `mc²` and `m c r0`.
pub fn lambda_mu(params: &OscillatorParams, state: &PolarState) -> Result<(f64, f64)> {
    params.check_x(state.x)?;
    params.check_r(state.r)?;
    let rho = state.r / params.r0;
    Ok((nd(rho, state.x).e, angular_momentum_nd(rho, state.x, state.u)))
}

pub fn to_polar(params: &OscillatorParams, s: &CartesianState) -> Result<PolarState> {
    let r = math::hypot(s.q1, s.q2);
    if r == 0.0 {
        return Err(Error::SingularChart("polar angle undefined at the origin"));
    }
    let speed = math::hypot(s.v1, s.v2);
    if speed == 0.0 {
        return Err(Error::SingularChart("velocity direction undefined at rest"));
    }
    let beta = speed / params.c;
    let x = beta * beta;
    if x >= 1.0 {
        return Err(Error::Domain { x, x_max: 1.0 });
    }
    let phi = math::atan2(s.q2, s.q1);
    let theta = math::atan2(s.v2, s.v1);
    PolarState::new(r, phi, x, theta - phi)
}

pub fn to_cartesian(params: &OscillatorParams, s: &PolarState) -> CartesianState {
    let speed = params.c * math::sqrt(s.x);
    let theta = s.phi + s.u;
    CartesianState {
        q1: s.r * math::cos(s.phi),
        q2: s.r * math::sin(s.phi),
        v1: speed * math::cos(theta),
        v2: speed * math::sin(theta),
    }
}

/// Image of a phase point in the momentum chart `(r, φ, y, α)`, with
/// `y = |p|²/(m²c²)` and `α` the direction of `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumChart {
    pub r: f64,
    pub phi: f64,
    pub y: f64,
    pub alpha: f64,
}

/// `ψ(r, x) = 4 x L_x² / (m²c⁴)`.
pub fn psi(params: &OscillatorParams, r: f64, x: f64) -> Result<f64> {
    params.check_x(x)?;
    params.check_r(r)?;
    Ok(psi_nd(r / params.r0, x))
}

#[inline]
pub(crate) fn psi_nd(rho: f64, x: f64) -> f64 {
    let lx = nd(rho, x).l_x;
    4.0 * x * lx * lx
}

/// The Legendre map `p = ∂L/∂v` written in polar charts: `y = ψ(r, x)`,
/// `α = θ`.
pub fn legendre_map(params: &OscillatorParams, s: &PolarState) -> Result<MomentumChart> {
    Ok(MomentumChart {
        r: s.r,
        phi: s.phi,
        y: psi(params, s.r, s.x)?,
        alpha: s.theta(),
    })
}
