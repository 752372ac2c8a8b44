//! Hybrid dynamics of mechanical systems whose Legendre map folds along a
//! hypersurface.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: Dormand–Prince 5(4) integration with dense output and
//!   event localisation, bracketed root finding, and quadrature with an
//!   endpoint square-root singularity.
//! * [`model`]: the rotationally symmetric Lagrangian family `L(r, x)` with
//!   the post-Galilean oscillator as the shipped instance.
//! * [`singular`]: the singular locus `S = S1 ∪ S2`, the fold curve
//!   `r1(x)`, and in/out classification on the fold.
//! * [`characteristics`]: characteristic curves on the fold and the jump
//!   (`Δφ`, partner point) they induce.
//! * [`dynamics`]: Euler–Lagrange arcs, impact detection, transitions and
//!   the branching hybrid trajectory.
//! * [`optics`]: reflection and refraction of light rays as an impact
//!   problem with a discontinuous Hamiltonian.
//!
//! All quantities are `f64`. The library is `no_std` (with `alloc`) and uses
//! `libm` for elementary functions so results do not depend on the host
//! math library.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod characteristics;
pub mod dynamics;
mod error;
pub mod math;
pub mod model;
pub mod numerics;
pub mod optics;
pub mod singular;

pub use error::{Error, Result};
pub use model::{CartesianState, DerivativeBundle, OscillatorParams, PolarState};
