//! Hyper-dual numbers `a + b ε1 + c ε2 + d ε1ε2` for exact second
//! derivatives, and the Cartesian velocity Hessian of the oscillator
//! Lagrangian computed with them.

#![allow(dead_code)]

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperDual {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl HyperDual {
    pub fn constant(a: f64) -> Self {
        Self { a, b: 0.0, c: 0.0, d: 0.0 }
    }

    fn lift(self, f: f64, df: f64, d2f: f64) -> Self {
        Self {
            a: f,
            b: df * self.b,
            c: df * self.c,
            d: df * self.d + d2f * self.b * self.c,
        }
    }

    pub fn sqrt(self) -> Self {
        let s = self.a.sqrt();
        self.lift(s, 0.5 / s, -0.25 / (s * self.a))
    }
}

impl Add for HyperDual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { a: self.a + o.a, b: self.b + o.b, c: self.c + o.c, d: self.d + o.d }
    }
}

impl Sub for HyperDual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { a: self.a - o.a, b: self.b - o.b, c: self.c - o.c, d: self.d - o.d }
    }
}

impl Mul for HyperDual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            a: self.a * o.a,
            b: self.a * o.b + self.b * o.a,
            c: self.a * o.c + self.c * o.a,
            d: self.a * o.d + self.b * o.c + self.c * o.b + self.d * o.a,
        }
    }
}

impl Mul<f64> for HyperDual {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self { a: self.a * k, b: self.b * k, c: self.c * k, d: self.d * k }
    }
}

/// `L(q, v) = -m c² [√(1 - v²/c²) + (r/r0)² (1 + v²/(2c²))]` written
/// directly in Cartesian velocity components.
pub fn lagrangian(m: f64, c: f64, r0: f64, r: f64, v: [HyperDual; 2]) -> HyperDual {
    let c2 = c * c;
    let v2 = v[0] * v[0] + v[1] * v[1];
    let beta2 = v2 * (1.0 / c2);
    let rho2 = (r / r0) * (r / r0);
    let one = HyperDual::constant(1.0);
    let root = (one - beta2).sqrt();
    let pot = (one + beta2 * 0.5) * rho2;
    (root + pot) * (-m * c2)
}

/// `∂²L / ∂v_i ∂v_j` at radius `r` and velocity `v`.
pub fn velocity_hessian(m: f64, c: f64, r0: f64, r: f64, v: [f64; 2]) -> [[f64; 2]; 2] {
    let mut h = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut w = [HyperDual::constant(v[0]), HyperDual::constant(v[1])];
            w[i].b = 1.0;
            w[j].c = 1.0;
            h[i][j] = lagrangian(m, c, r0, r, w).d;
        }
    }
    h
}

pub fn det2(h: &[[f64; 2]; 2]) -> f64 {
    h[0][0] * h[1][1] - h[0][1] * h[1][0]
}
