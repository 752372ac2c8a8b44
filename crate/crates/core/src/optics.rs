//! Reflection and refraction of light rays as impacts with the separating
//! hypersurface `Γ = T*_S M` of a bivalued Hamiltonian `H± = V±‖p‖`.
//!
//! Adapted coordinates: the interface is `{q3 = 0}` and the `q3` axis points
//! into the `-` medium, so the `+` medium is `q3 < 0`.

use crate::{math, Error, Result};
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `q3 < 0`.
    Plus,
    /// `q3 > 0`.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumPair {
    n_plus: f64,
    n_minus: f64,
    c: f64,
}

impl MediumPair {
    pub fn new(n_plus: f64, n_minus: f64, c: f64) -> Result<Self> {
        for (name, value) in [("n_plus", n_plus), ("n_minus", n_minus), ("c", c)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(Self { n_plus, n_minus, c })
    }

    pub fn n(&self, side: Side) -> f64 {
        match side {
            Side::Plus => self.n_plus,
            Side::Minus => self.n_minus,
        }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `V = c / n`.
    pub fn speed(&self, side: Side) -> f64 {
        self.c / self.n(side)
    }

    /// `n̄ = n₋ / n₊`.
    pub fn n_bar(&self) -> f64 {
        self.n_minus / self.n_plus
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayState {
    pub q: [f64; 3],
    pub p: [f64; 3],
}

fn norm(v: &[f64; 3]) -> f64 {
    math::hypot(math::hypot(v[0], v[1]), v[2])
}

impl RayState {
    pub fn new(q: [f64; 3], p: [f64; 3]) -> Result<Self> {
        let n = norm(&p);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroMomentum);
        }
        Ok(Self { q, p })
    }

    pub fn momentum_norm(&self) -> f64 {
        norm(&self.p)
    }

    /// `|(p1, p2)|`.
    pub fn transverse(&self) -> f64 {
        math::hypot(self.p[0], self.p[1])
    }
}

/// Reflection through the interface: `(q3, p3) ↦ (-q3, -p3)`.
pub fn mirror(ray: &RayState) -> RayState {
    RayState {
        q: [ray.q[0], ray.q[1], -ray.q[2]],
        p: [ray.p[0], ray.p[1], -ray.p[2]],
    }
}

/// `H = V ‖p‖`.
pub fn optical_hamiltonian(medium: &MediumPair, side: Side, _q: &[f64; 3], p: &[f64; 3]) -> Result<f64> {
    let n = norm(p);
    if !(n > 0.0) {
        return Err(Error::ZeroMomentum);
    }
    Ok(medium.speed(side) * n)
}

/// Ray velocity `∂H/∂p = V p / ‖p‖`.
pub fn ray_velocity(medium: &MediumPair, side: Side, p: &[f64; 3]) -> Result<[f64; 3]> {
    let n = norm(p);
    if !(n > 0.0) {
        return Err(Error::ZeroMomentum);
    }
    let k = medium.speed(side) / n;
    Ok([k * p[0], k * p[1], k * p[2]])
}

/// Straight-line flow of `H` inside one homogeneous medium.
pub fn propagate(medium: &MediumPair, side: Side, ray: &RayState, t: f64) -> Result<RayState> {
    let v = ray_velocity(medium, side, &ray.p)?;
    Ok(RayState {
        q: [ray.q[0] + v[0] * t, ray.q[1] + v[1] * t, ray.q[2] + v[2] * t],
        p: ray.p,
    })
}

/// Canonical form `Ω = Σ dp_i ∧ dq_i` on vectors ordered `(q1, q2, q3, p1, p2, p3)`.
pub fn omega(xi: &[f64; 6], eta: &[f64; 6]) -> f64 {
    (0..3).map(|i| xi[3 + i] * eta[i] - xi[i] * eta[3 + i]).sum()
}

const INTERFACE_TOL: f64 = 1e-12;

fn check_interface(ray: &RayState) -> Result<()> {
    let scale = norm(&ray.q).max(1.0);
    if ray.q[2].abs() > INTERFACE_TOL * scale {
        return Err(Error::NotOnInterface(ray.q[2]));
    }
    Ok(())
}

/// Characteristic of `Γ` through a point: the fibre line `p3 ↦ p3 + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicLine {
    pub base: RayState,
}

impl CharacteristicLine {
    pub fn at(&self, t: f64) -> [f64; 6] {
        let b = &self.base;
        [b.q[0], b.q[1], b.q[2], b.p[0], b.p[1], b.p[2] + t]
    }

    /// `∂/∂p3`.
    pub fn direction(&self) -> [f64; 6] {
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]
    }
}

pub fn characteristic_line(x_bar: &RayState) -> Result<CharacteristicLine> {
    check_interface(x_bar)?;
    Ok(CharacteristicLine { base: *x_bar })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpactOutcome {
    pub reflected: RayState,
    pub refracted: Option<RayState>,
    pub total_reflection: bool,
    /// Angle of incidence.
    pub phi: f64,
    pub psi_plus: f64,
    pub psi_minus: Option<f64>,
}

/// Allowance on the refraction discriminant, relative to `‖p̄‖²`.
const CRITICAL_TOL: f64 = 1e-12;

/// Decisive points of a ray arriving on the interface from the `+` side.
pub fn impact(medium: &MediumPair, arrival: &RayState) -> Result<ImpactOutcome> {
    check_interface(arrival)?;
    let p = arrival.p;
    let p_norm = arrival.momentum_norm();
    if !(p_norm > 0.0) {
        return Err(Error::ZeroMomentum);
    }
    if p[2] == 0.0 {
        return Err(Error::GrazingIncidence);
    }
    if p[2] < 0.0 {
        return Err(Error::WrongSide(p[2]));
    }
    let pt = arrival.transverse();
    let phi = math::atan2(pt, p[2]);
    let reflected = RayState { q: arrival.q, p: [p[0], p[1], -p[2]] };
    let psi_plus = math::atan2(reflected.transverse(), reflected.p[2].abs());

    // t² + 2 p̄3 t + (1 - n̄²)‖p̄‖² = 0 has roots t = -p̄3 ± p̃3
    let nb = medium.n_bar();
    let disc = p[2] * p[2] + (nb * nb - 1.0) * p_norm * p_norm;
    let (refracted, psi_minus) = if disc >= -CRITICAL_TOL * p_norm * p_norm {
        let roots = [math::sqrt(disc.max(0.0)), -math::sqrt(disc.max(0.0))];
        let candidates: Vec<RayState> =
            roots.iter().map(|&p3| RayState { q: arrival.q, p: [p[0], p[1], p3] }).collect();
        let kept = decisive_filter(&candidates, Side::Minus);
        match kept.first() {
            Some(r) => (Some(*r), Some(math::atan2(r.transverse(), r.p[2]))),
            // critical angle: the refracted ray runs along the interface
            None => (Some(candidates[0]), Some(math::atan2(pt, 0.0))),
        }
    } else {
        (None, None)
    };
    Ok(ImpactOutcome {
        reflected,
        total_reflection: refracted.is_none(),
        refracted,
        phi,
        psi_plus,
        psi_minus,
    })
}

/// In-points for `side`: candidates whose ray velocity leaves the interface
/// into that side.
pub fn decisive_filter(candidates: &[RayState], side: Side) -> Vec<RayState> {
    candidates
        .iter()
        .filter(|r| match side {
            Side::Plus => r.p[2] < 0.0,
            Side::Minus => r.p[2] > 0.0,
        })
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn incident(phi_deg: f64) -> RayState {
        let a = phi_deg.to_radians();
        RayState::new([0.3, -0.2, 0.0], [libm::sin(a), 0.0, libm::cos(a)]).unwrap()
    }

    #[test]
    fn hamiltonian_basics() {
        let m = MediumPair::new(1.0, 1.5, 3.0).unwrap();
        let p = [0.3, -0.4, 1.2];
        let h = optical_hamiltonian(&m, Side::Plus, &[0.0; 3], &p).unwrap();
        assert!((h - 3.0 * 1.3).abs() < 1e-14);
        let h2 = optical_hamiltonian(&m, Side::Plus, &[0.0; 3], &[0.6, -0.8, 2.4]).unwrap();
        assert!((h2 - 2.0 * h).abs() < 1e-14);
        let v = ray_velocity(&m, Side::Minus, &p).unwrap();
        assert!((norm(&v) - 2.0).abs() < 1e-14);
        assert_eq!(optical_hamiltonian(&m, Side::Plus, &[0.0; 3], &[0.0; 3]), Err(Error::ZeroMomentum));
    }

    #[test]
    fn normal_incidence() {
        let m = MediumPair::new(1.0, 1.5, 1.0).unwrap();
        let o = impact(&m, &incident(0.0)).unwrap();
        assert_eq!(o.reflected.p, [0.0, 0.0, -1.0]);
        let r = o.refracted.unwrap();
        assert_eq!((r.p[0], r.p[1]), (0.0, 0.0));
        assert!((r.p[2] - 1.5).abs() < 1e-15);
        assert_eq!(o.psi_minus, Some(0.0));
    }

    #[test]
    fn snell_thirty_degrees() {
        let m = MediumPair::new(1.0, 1.5, 1.0).unwrap();
        let o = impact(&m, &incident(30.0)).unwrap();
        assert!((libm::sin(o.psi_minus.unwrap()) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(o.phi, o.psi_plus);
        let h0 = optical_hamiltonian(&m, Side::Plus, &[0.0; 3], &incident(30.0).p).unwrap();
        let h1 = optical_hamiltonian(&m, Side::Minus, &[0.0; 3], &o.refracted.unwrap().p).unwrap();
        assert!((h0 - h1).abs() < 1e-15);
    }

    #[test]
    fn total_reflection() {
        let m = MediumPair::new(1.5, 1.0, 1.0).unwrap();
        let o = impact(&m, &incident(60.0)).unwrap();
        assert!(o.total_reflection && o.refracted.is_none() && o.psi_minus.is_none());
    }

    #[test]
    fn misuse_errors() {
        let m = MediumPair::new(1.0, 1.5, 1.0).unwrap();
        let off = RayState::new([0.0, 0.0, 0.1], [0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(impact(&m, &off), Err(Error::NotOnInterface(_))));
        let graze = RayState::new([0.0; 3], [1.0, 0.0, 0.0]).unwrap();
        assert_eq!(impact(&m, &graze), Err(Error::GrazingIncidence));
        let back = RayState::new([0.0; 3], [0.0, 0.0, -1.0]).unwrap();
        assert!(matches!(impact(&m, &back), Err(Error::WrongSide(_))));
    }

    #[test]
    fn filter_keeps_decisive() {
        let x = incident(20.0);
        let star = mirror(&x);
        assert_eq!(decisive_filter(&[x, star], Side::Plus), alloc::vec![star]);
        assert!(decisive_filter(&[], Side::Minus).is_empty());
    }

    #[test]
    fn reflection_involution() {
        let m = MediumPair::new(1.0, 1.0, 1.0).unwrap();
        let x = incident(40.0);
        let once = impact(&m, &x).unwrap().reflected;
        let twice = impact(&m, &mirror(&once)).unwrap().reflected;
        assert_eq!(mirror(&twice), x);
    }

    #[test]
    fn characteristic_is_fibre_line() {
        let line = characteristic_line(&incident(10.0)).unwrap();
        let a = line.at(0.0);
        let b = line.at(2.5);
        assert_eq!(&a[..3], &b[..3]);
        assert_eq!(b[5] - a[5], 2.5);
        let eta = [0.3, -1.0, 0.0, 0.7, 0.1, -2.0];
        assert_eq!(omega(&line.direction(), &eta), 0.0);
    }
}
