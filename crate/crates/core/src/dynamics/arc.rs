use super::{rescaled_nd, HALT_TOL, REST_TOL};
use crate::model::{self, OscillatorParams, PolarState};
use crate::numerics::{rk_integrate, DenseArc, Direction, Event, SolverConfig};
use crate::{math, Error, Result};
use alloc::vec::Vec;

/// Why an arc stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    TimeLimit,
    ImpactS1,
    NearS2,
    NearGamma,
    NearLightSpeed,
    /// `x` reached zero on a radial arc, where the direction `u` is undefined.
    NearRest,
}

impl Termination {
    /// Diagnostic halts, as opposed to the time limit or a fold impact.
    pub fn is_halt(self) -> bool {
        !matches!(self, Termination::TimeLimit | Termination::ImpactS1)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Termination::TimeLimit => "TimeLimit",
            Termination::ImpactS1 => "ImpactS1",
            Termination::NearS2 => "NearS2",
            Termination::NearGamma => "NearGamma",
            Termination::NearLightSpeed => "NearLightSpeed",
            Termination::NearRest => "NearRest",
        }
    }
}

/// A smooth arc of the Euler–Lagrange flow between events.
#[derive(Debug, Clone)]
pub struct TrajectoryArc {
    /// `(t, state)` at every accepted step, physical units, `φ` unwrapped in
    /// [`Self::phi_unwrapped`].
    pub samples: Vec<(f64, PolarState)>,
    /// Unwrapped polar angle at each sample.
    pub phi_unwrapped: Vec<f64>,
    /// `E / mc²` at the start.
    pub lambda: f64,
    /// `I / (m c r0)` at the start.
    pub mu: f64,
    pub termination: Termination,
    pub max_lambda_drift: f64,
    pub max_mu_drift: f64,
    /// Sign of `E_x` on the arc.
    pub sheet_sign: f64,
    pub accepted_steps: usize,
    params: OscillatorParams,
    dense: DenseArc<5>,
}

impl TrajectoryArc {
    pub fn t_start(&self) -> f64 {
        self.samples.first().map_or(0.0, |s| s.0)
    }

    pub fn t_end(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.0)
    }

    pub fn final_state(&self) -> &PolarState {
        &self.samples.last().expect("arc has at least one sample").1
    }

    pub fn final_phi_unwrapped(&self) -> f64 {
        *self.phi_unwrapped.last().expect("arc has at least one sample")
    }

    /// State at physical time `t` from the dense output, with `φ` unwrapped.
    pub fn state_at(&self, t: f64) -> Option<(PolarState, f64)> {
        let (t0, t1) = (self.t_start(), self.t_end());
        if !(t >= t0 && t <= t1) {
            return None;
        }
        let ts = self.params.time_scale();
        let tn = t / ts;
        let (mut a, mut b) = (self.dense.t_start()?, self.dense.t_end()?);
        let time = |tau: f64| self.dense.eval(tau).map(|y| y[4]);
        // physical time is monotone in τ
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if time(m)? < tn {
                a = m;
            } else {
                b = m;
            }
        }
        let y = self.dense.eval(0.5 * (a + b))?;
        let s = to_state(&self.params, &y).ok()?;
        Some((s, y[3]))
    }
}

fn to_state(params: &OscillatorParams, y: &[f64; 5]) -> Result<PolarState> {
    PolarState::new(y[0] * params.r0(), y[3], y[1].max(0.0), y[2])
}

fn nd_state(params: &OscillatorParams, s: &PolarState, t: f64) -> [f64; 5] {
    [s.r / params.r0(), s.x, s.u, s.phi, t / params.time_scale()]
}

/// [`integrate_arc_from`] starting at `t = 0`.
pub fn integrate_arc(params: &OscillatorParams, state0: &PolarState, t_max: f64, cfg: &SolverConfig) -> Result<TrajectoryArc> {
    integrate_arc_from(params, state0, 0.0, t_max, cfg)
}

const LIGHT_LIMIT: f64 = 1.0 - HALT_TOL;

fn start_halt(rho: f64, x: f64, l_x: f64) -> Option<Termination> {
    if math::hypot(rho - 1.0, x) < HALT_TOL {
        Some(Termination::NearGamma)
    } else if l_x.abs() < HALT_TOL {
        Some(Termination::NearS2)
    } else if x > LIGHT_LIMIT {
        Some(Termination::NearLightSpeed)
    } else if x < REST_TOL {
        Some(Termination::NearRest)
    } else {
        None
    }
}

/// Integrates one arc from `(t0, state0)` until `t_max` or the first fold
/// impact or halt condition. The start must be off the fold.
pub fn integrate_arc_from(
    params: &OscillatorParams,
    state0: &PolarState,
    t0: f64,
    t_max: f64,
    cfg: &SolverConfig,
) -> Result<TrajectoryArc> {
    integrate_unwrapped(params, state0, state0.phi, t0, t_max, cfg)
}

/// As [`integrate_arc_from`], with the unwrapped start angle `phi0`.
pub(crate) fn integrate_unwrapped(
    params: &OscillatorParams,
    state0: &PolarState,
    phi0: f64,
    t0: f64,
    t_max: f64,
    cfg: &SolverConfig,
) -> Result<TrajectoryArc> {
    cfg.validate()?;
    params.check_x(state0.x)?;
    if !(state0.r > 0.0) {
        return Err(Error::NegativeRadius(state0.r));
    }
    if !(t_max >= t0) {
        return Err(Error::InvalidParameter { name: "t_max", value: t_max });
    }
    let mut y0 = nd_state(params, state0, t0);
    y0[3] = phi0;
    let d0 = model::nd(y0[0], y0[1]);
    if d0.e_x.abs() <= crate::singular::LOCUS_TOL {
        return Err(Error::SingularLocus("arc starts on the fold"));
    }
    let s = if d0.e_x < 0.0 { -1.0 } else { 1.0 };
    let (lambda, mu) = model::lambda_mu(params, state0)?;

    let mut arc = TrajectoryArc {
        samples: Vec::new(),
        phi_unwrapped: Vec::new(),
        lambda,
        mu,
        termination: Termination::TimeLimit,
        max_lambda_drift: 0.0,
        max_mu_drift: 0.0,
        sheet_sign: s,
        accepted_steps: 0,
        params: *params,
        dense: DenseArc::default(),
    };
    if let Some(h) = start_halt(y0[0], y0[1], d0.l_x) {
        arc.termination = h;
        arc.samples.push((t0, *state0));
        arc.phi_unwrapped.push(phi0);
        return Ok(arc);
    }

    let t_lim = t_max / params.time_scale();
    let impact = |_: f64, y: &[f64; 5]| model::nd(y[0], y[1].max(0.0)).e_x;
    let time_up = |_: f64, y: &[f64; 5]| y[4] - t_lim;
    let near_s2 = |_: f64, y: &[f64; 5]| model::nd(y[0], y[1].max(0.0)).l_x.abs() - HALT_TOL;
    let near_gamma = |_: f64, y: &[f64; 5]| math::hypot(y[0] - 1.0, y[1]) - HALT_TOL;
    let near_light = |_: f64, y: &[f64; 5]| LIGHT_LIMIT - y[1];
    let near_rest = |_: f64, y: &[f64; 5]| y[1] - REST_TOL;
    let events = [
        Event::terminal(&impact),
        Event::terminal(&time_up).direction(Direction::Rising),
        Event::terminal(&near_s2).direction(Direction::Falling),
        Event::terminal(&near_gamma).direction(Direction::Falling),
        Event::terminal(&near_light).direction(Direction::Falling),
        Event::terminal(&near_rest).direction(Direction::Falling),
    ];
    const KINDS: [Termination; 6] = [
        Termination::ImpactS1,
        Termination::TimeLimit,
        Termination::NearS2,
        Termination::NearGamma,
        Termination::NearLightSpeed,
        Termination::NearRest,
    ];

    if t_lim <= y0[4] {
        arc.samples.push((t0, *state0));
        arc.phi_unwrapped.push(phi0);
        return Ok(arc);
    }
    let sol = rk_integrate(|_, y| rescaled_nd(s, y), 0.0, y0, 1e15, cfg, &events)?;
    arc.accepted_steps = sol.accepted;
    arc.termination = match sol.terminal_hit() {
        Some(hit) => KINDS[hit.index],
        None => {
            return Err(Error::MaxStepsExceeded { steps: sol.accepted + sol.rejected, t: sol.t_final })
        }
    };

    let ts = params.time_scale();
    let mu_scale = mu.abs().max(1e-300);
    for (_, y) in sol.nodes() {
        let st = to_state(params, &y)?;
        let (l, m) = model::lambda_mu(params, &st)?;
        arc.max_lambda_drift = arc.max_lambda_drift.max((l - lambda).abs() / lambda);
        let dm = if mu == 0.0 { (m - mu).abs() } else { (m - mu).abs() / mu_scale };
        arc.max_mu_drift = arc.max_mu_drift.max(dm);
        arc.samples.push((y[4] * ts, st));
        arc.phi_unwrapped.push(y[3]);
    }
    if arc.termination == Termination::TimeLimit {
        // the reported event state sits just before t_max
        if let Some(last) = arc.samples.last_mut() {
            if (last.0 - t_max).abs() <= 1e-9 * t_max.abs().max(ts) {
                last.0 = t_max;
            }
        }
    }
    arc.dense = sol.arc;
    Ok(arc)
}
