//! Numerical kernels shared by the mechanics modules.
//!
//! Every kernel is a pure function of its inputs; there is no global state
//! and identical inputs produce bit-identical outputs.

mod quad;
mod rk;
mod root;

pub use quad::{integrate_adaptive, integrate_singular, SingularEndpoint};
pub use rk::{
    rk_integrate, DenseArc, DenseStep, Direction, Event, EventHit, HitKind, Solution,
    SolverConfig,
};
pub use root::find_root;
