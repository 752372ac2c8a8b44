use alloc::vec::Vec;

use crate::{math, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_PANELS: usize = 500;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Globally adaptive 15-point Gauss–Kronrod quadrature.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below `tol`.
pub fn integrate_adaptive<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let mut panels: Vec<Panel> = Vec::with_capacity(64);
    panels.push(gauss_kronrod(&mut f, a, b));
    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        let total: f64 = panels.iter().map(|p| p.value).sum();
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::NonConvergence {
                achieved: f64::INFINITY,
                requested: tol,
            });
        }
        if total_err <= tol {
            return Ok(total);
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::NonConvergence {
                achieved: total_err,
                requested: tol,
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a.min(p.b) || mid >= p.a.max(p.b) {
            return Err(Error::NonConvergence {
                achieved: total_err,
                requested: tol,
            });
        }
        panels.push(gauss_kronrod(&mut f, p.a, mid));
        panels.push(gauss_kronrod(&mut f, mid, p.b));
    }
}

/// Which end of the interval carries the inverse-square-root blow-up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularEndpoint {
    Lower,
    Upper,
}

/// Integrates `f` over `[a, b]` when `f` behaves like `1/sqrt(distance)` at
/// one endpoint.
///
/// The substitution `x = a + s²` (or `x = b - s²`) turns the integrand into
/// the smooth function `2 s f(x)`. `f` receives both `x` and the exact
/// offset `s²` from the singular endpoint, so callers can evaluate
/// differences like `g(x) - g(a)` without cancellation.
pub fn integrate_singular<F>(
    mut f: F,
    a: f64,
    b: f64,
    endpoint: SingularEndpoint,
    tol: f64,
) -> Result<f64>
where
    F: FnMut(f64, f64) -> f64,
{
    if b < a {
        let flipped = match endpoint {
            SingularEndpoint::Lower => SingularEndpoint::Upper,
            SingularEndpoint::Upper => SingularEndpoint::Lower,
        };
        return integrate_singular(f, b, a, flipped, tol).map(|v| -v);
    }
    let span = math::sqrt(b - a);
    match endpoint {
        SingularEndpoint::Lower => {
            integrate_adaptive(|s| 2.0 * s * f(a + s * s, s * s), 0.0, span, tol)
        }
        SingularEndpoint::Upper => {
            integrate_adaptive(|s| 2.0 * s * f(b - s * s, s * s), 0.0, span, tol)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn polynomial_exact() {
        let v = integrate_adaptive(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-14).unwrap();
        assert!((v - 0.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_sqrt_at_lower_end() {
        let v =
            integrate_singular(|x, _| 1.0 / math::sqrt(x), 0.0, 1.0, SingularEndpoint::Lower, 1e-13)
                .unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn arcsine_kernel_at_upper_end() {
        let v = integrate_singular(
            |x, off| 1.0 / math::sqrt(off * (1.0 + x)),
            0.0,
            1.0,
            SingularEndpoint::Upper,
            1e-13,
        )
        .unwrap();
        assert!((v - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn reversed_interval_changes_sign() {
        let f = |x: f64, _: f64| 1.0 / math::sqrt(x);
        let fwd = integrate_singular(f, 0.0, 1.0, SingularEndpoint::Lower, 1e-13).unwrap();
        let rev = integrate_singular(f, 1.0, 0.0, SingularEndpoint::Upper, 1e-13).unwrap();
        assert!((fwd + rev).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_integrand_needs_subdivision() {
        let v = integrate_adaptive(|x| math::sin(20.0 * x), 0.0, PI, 1e-12).unwrap();
        assert!(v.abs() < 1e-12);
    }
}
