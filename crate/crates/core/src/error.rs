use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Error {
    #[error("squared speed ratio x = {x} outside [0, {x_max}]")]
    Domain { x: f64, x_max: f64 },
    #[error("radius r = {0} is negative")]
    NegativeRadius(f64),
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("polar chart is singular here ({0})")]
    SingularChart(&'static str),
    #[error("no sign change on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("step limit of {steps} reached at t = {t}")]
    MaxStepsExceeded { steps: usize, t: f64 },
    #[error("step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },
    #[error("quadrature did not converge: estimated error {achieved:e} > {requested:e}")]
    NonConvergence { achieved: f64, requested: f64 },
    #[error("state lies on the singular locus ({0})")]
    SingularLocus(&'static str),
    #[error("kernel of the Legendre map is undefined at the circle r = r0, x = 0")]
    UndefinedKernel,
    #[error("point is not on the singular locus")]
    NotSingular,
    #[error("degenerate radial impact: |sin u| = {sin_u:e} below {tol:e}")]
    DegenerateRadial { sin_u: f64, tol: f64 },
    #[error("no decisive point for arrival (x = {x}, u = {u})")]
    NoDecisivePoint { x: f64, u: f64 },
    #[error("cannot restore (E, I) on fold sheet at x = {x}: |sin u| would be {sin_u}")]
    BranchConstruction { x: f64, sin_u: f64 },
    #[error("orbit did not close: first-return residual {residual:e}")]
    NonClosure { residual: f64 },
    #[error("momentum covector is zero")]
    ZeroMomentum,
    #[error("ray is not on the separating surface (q3 = {0})")]
    NotOnInterface(f64),
    #[error("grazing incidence: the ray is tangent to the separating surface")]
    GrazingIncidence,
    #[error("ray does not arrive from the + side (p3 = {0})")]
    WrongSide(f64),
}
