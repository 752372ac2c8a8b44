//! Dormand–Prince 5(4) with Hairer's fourth-order dense output, a PI step
//! controller and event localisation on the interpolant.

use alloc::vec::Vec;

use crate::{math, Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const MIN_RATIO: f64 = 0.2;
const MAX_RATIO: f64 = 5.0;
const PI_BETA: f64 = 0.04;

/// Integrator tolerances and limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Events are localised until `|g| < event_tol` or the bracket collapses
    /// to adjacent floating-point numbers.
    pub event_tol: f64,
    pub max_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            event_tol: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("event_tol", self.event_tol),
        ];
        for (name, value) in positive {
            if !(value > 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "max_steps",
                value: 0.0,
            });
        }
        if self.event_tol > self.abs_tol {
            return Err(Error::InvalidParameter {
                name: "event_tol",
                value: self.event_tol,
            });
        }
        Ok(())
    }
}

/// Crossing direction an event reacts to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Any,
    Rising,
    Falling,
}

/// A scalar event functional `g(t, y)`.
pub struct Event<'a, const N: usize> {
    pub func: &'a dyn Fn(f64, &[f64; N]) -> f64,
    pub direction: Direction,
    pub terminal: bool,
    /// When set, a step in which `|g|` dips below this value without a sign
    /// change is reported as a grazing contact.
    pub graze_tol: Option<f64>,
}

impl<'a, const N: usize> Event<'a, N> {
    pub fn terminal(func: &'a dyn Fn(f64, &[f64; N]) -> f64) -> Self {
        Self {
            func,
            direction: Direction::Any,
            terminal: true,
            graze_tol: None,
        }
    }

    pub fn direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn non_terminal(mut self) -> Self {
        self.terminal = false;
        self
    }

    pub fn graze_tol(mut self, tol: f64) -> Self {
        self.graze_tol = Some(tol);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitKind {
    Crossing,
    Grazing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventHit<const N: usize> {
    pub index: usize,
    pub kind: HitKind,
    pub t: f64,
    pub y: [f64; N],
    pub value: f64,
}

/// One accepted step together with its interpolation coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    coeffs: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn start(&self) -> [f64; N] {
        self.coeffs[0]
    }

    pub fn end(&self) -> [f64; N] {
        let mut y = self.coeffs[0];
        for (yi, di) in y.iter_mut().zip(self.coeffs[1].iter()) {
            *yi += di;
        }
        y
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let [c0, c1, c2, c3, c4] = &self.coeffs;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = c0[i] + theta * (c1[i] + theta1 * (c2[i] + theta * (c3[i] + theta1 * c4[i])));
        }
        y
    }
}

/// Continuous representation of an integrated arc.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DenseArc<const N: usize> {
    steps: Vec<DenseStep<N>>,
}

impl<const N: usize> DenseArc<N> {
    pub fn steps(&self) -> &[DenseStep<N>] {
        &self.steps
    }

    pub fn t_start(&self) -> Option<f64> {
        self.steps.first().map(|s| s.t0)
    }

    pub fn t_end(&self) -> Option<f64> {
        self.steps.last().map(|s| s.t1())
    }

    /// State at `t`, or `None` outside the covered interval.
    pub fn eval(&self, t: f64) -> Option<[f64; N]> {
        let first = self.steps.first()?;
        let last = self.steps.last()?;
        if t < first.t0 || t > last.t1() {
            return None;
        }
        let idx = self.steps.partition_point(|s| s.t1() < t);
        self.steps.get(idx.min(self.steps.len() - 1)).map(|s| s.eval(t))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<const N: usize> {
    pub arc: DenseArc<N>,
    /// Time-ordered event hits up to `t_final`.
    pub hits: Vec<EventHit<N>>,
    pub t_final: f64,
    pub y_final: [f64; N],
    /// Index into `hits` of the terminal event that stopped integration.
    pub stopped_by: Option<usize>,
    pub accepted: usize,
    pub rejected: usize,
}

impl<const N: usize> Solution<N> {
    pub fn terminal_hit(&self) -> Option<&EventHit<N>> {
        self.stopped_by.map(|i| &self.hits[i])
    }

    /// Accepted step boundaries `(t, y)`, truncated at `t_final`.
    pub fn nodes(&self) -> Vec<(f64, [f64; N])> {
        let mut out = Vec::with_capacity(self.arc.steps.len() + 1);
        if let Some(first) = self.arc.steps.first() {
            out.push((first.t0, first.start()));
        }
        for s in &self.arc.steps {
            if s.t1() < self.t_final {
                out.push((s.t1(), s.end()));
            }
        }
        if out.last().map(|(t, _)| *t) != Some(self.t_final) {
            out.push((self.t_final, self.y_final));
        }
        out
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

fn all_finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

fn initial_step<const N: usize, F>(
    rhs: &mut F,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    cfg: &SolverConfig,
    span: f64,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..N {
        let sk = cfg.abs_tol + cfg.rel_tol * y0[i].abs();
        dnf += (f0[i] / sk) * (f0[i] / sk);
        dny += (y0[i] / sk) * (y0[i] / sk);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        0.01 * math::sqrt(dny / dnf)
    };
    h = h.min(cfg.max_step).min(span);
    let y1 = axpy(y0, h, &[(1.0, f0)]);
    let f1 = rhs(t0 + h, &y1);
    if !all_finite(&f1) {
        return (0.1 * h).max(1e-12 * span);
    }
    let mut der2 = 0.0;
    for i in 0..N {
        let sk = cfg.abs_tol + cfg.rel_tol * y0[i].abs();
        let d = (f1[i] - f0[i]) / sk;
        der2 += d * d;
    }
    let der2 = math::sqrt(der2) / h;
    let der12 = der2.abs().max(math::sqrt(dnf));
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        math::powf(0.01 / der12, 0.2)
    };
    (100.0 * h).min(h1).min(cfg.max_step).min(span)
}

fn crosses(direction: Direction, ga: f64, gb: f64) -> bool {
    if ga == 0.0 {
        return false;
    }
    match direction {
        Direction::Any => gb == 0.0 || (ga > 0.0) != (gb > 0.0),
        Direction::Rising => ga < 0.0 && gb >= 0.0,
        Direction::Falling => ga > 0.0 && gb <= 0.0,
    }
}

/// Bisection on the interpolant; returns the last pre-crossing point.
fn localize<const N: usize>(
    step: &DenseStep<N>,
    g: &dyn Fn(f64, &[f64; N]) -> f64,
    mut ta: f64,
    mut ga: f64,
    mut tb: f64,
    event_tol: f64,
) -> (f64, [f64; N], f64) {
    let mut ya = step.eval(ta);
    for _ in 0..200 {
        if ga.abs() < event_tol && tb - ta <= 4.0 * f64::EPSILON * ta.abs().max(1.0) {
            break;
        }
        let tm = 0.5 * (ta + tb);
        if tm <= ta || tm >= tb {
            break;
        }
        let ym = step.eval(tm);
        let gm = g(tm, &ym);
        if gm != 0.0 && (gm > 0.0) == (ga > 0.0) {
            ta = tm;
            ga = gm;
            ya = ym;
        } else {
            tb = tm;
        }
    }
    (ta, ya, ga)
}

/// Golden-section search for the minimum of `|g|` inside `[a, b]`.
fn graze_min<const N: usize>(
    step: &DenseStep<N>,
    g: &dyn Fn(f64, &[f64; N]) -> f64,
    mut a: f64,
    mut b: f64,
) -> (f64, [f64; N], f64) {
    const INV_PHI: f64 = 0.618_033_988_749_895;
    let f = |t: f64| g(t, &step.eval(t)).abs();
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    let y = step.eval(t);
    (t, y, g(t, &y))
}

const INTERIOR: [f64; 3] = [0.25, 0.5, 0.75];

/// Scans one accepted step for event crossings and grazing contacts.
fn scan_step<const N: usize>(
    step: &DenseStep<N>,
    events: &[Event<'_, N>],
    g_start: &[f64],
    g_end: &[f64],
    event_tol: f64,
    hits: &mut Vec<EventHit<N>>,
) {
    for (index, ev) in events.iter().enumerate() {
        let mut ts = [0.0; 5];
        let mut gs = [0.0; 5];
        ts[0] = step.t0;
        gs[0] = g_start[index];
        for (k, theta) in INTERIOR.iter().enumerate() {
            let t = step.t0 + theta * step.h;
            ts[k + 1] = t;
            gs[k + 1] = (ev.func)(t, &step.eval(t));
        }
        ts[4] = step.t1();
        gs[4] = g_end[index];

        let mut crossed = false;
        for k in 0..4 {
            if crosses(ev.direction, gs[k], gs[k + 1]) {
                let (t, y, value) = localize(step, ev.func, ts[k], gs[k], ts[k + 1], event_tol);
                hits.push(EventHit {
                    index,
                    kind: HitKind::Crossing,
                    t,
                    y,
                    value,
                });
                crossed = true;
                break;
            }
        }
        if crossed {
            continue;
        }
        if let Some(gtol) = ev.graze_tol {
            // interior local minimum of |g| without a sign change
            for k in 1..4 {
                let m = gs[k].abs();
                if m < gs[k - 1].abs() && m <= gs[k + 1].abs() {
                    let (t, y, value) = graze_min(step, ev.func, ts[k - 1], ts[k + 1]);
                    if value.abs() < gtol {
                        hits.push(EventHit {
                            index,
                            kind: HitKind::Grazing,
                            t,
                            y,
                            value,
                        });
                    }
                    break;
                }
            }
        }
    }
}

/// Integrates `dy/dt = rhs(t, y)` from `t0` to `t_end` (`t_end > t0`).
///
/// Integration stops at `t_end` or at the earliest terminal event. The
/// reported event state is on the pre-crossing side of the event surface.
pub fn rk_integrate<const N: usize, F>(
    mut rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    cfg: &SolverConfig,
    events: &[Event<'_, N>],
) -> Result<Solution<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    cfg.validate()?;
    if !(t_end > t0) {
        return Err(Error::InvalidParameter {
            name: "t_end",
            value: t_end,
        });
    }
    if !all_finite(&y0) {
        return Err(Error::NonFinite { t: t0 });
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    if !all_finite(&k1) {
        return Err(Error::NonFinite { t });
    }
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.func)(t, &y)).collect();
    let mut g_next: Vec<f64> = g_prev.clone();

    let mut h = initial_step(&mut rhs, t, &y, &k1, cfg, t_end - t0);
    let mut err_old: f64 = 1e-4;
    let mut last_rejected = false;

    let mut arc = DenseArc { steps: Vec::new() };
    let mut hits: Vec<EventHit<N>> = Vec::new();
    let mut accepted = 0usize;
    let mut rejected = 0usize;

    loop {
        if accepted + rejected >= cfg.max_steps {
            return Err(Error::MaxStepsExceeded {
                steps: cfg.max_steps,
                t,
            });
        }
        if h.abs() < 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, h });
        }
        let mut last = false;
        if t + h >= t_end {
            h = t_end - t;
            last = true;
        }

        let k2 = rhs(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(t + h, &y1);

        let finite = [&k2, &k3, &k4, &k5, &k6, &k7, &y1].iter().all(|v| all_finite(v));
        if !finite {
            rejected += 1;
            h *= MIN_RATIO;
            last_rejected = true;
            continue;
        }

        let mut err = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y1[i].abs());
            err += (e / sk) * (e / sk);
        }
        let err = math::sqrt(err / N as f64);

        if err > 1.0 {
            rejected += 1;
            let fac = (SAFETY * math::powf(err, -0.2)).max(MIN_RATIO);
            h *= fac;
            last_rejected = true;
            continue;
        }

        // accepted
        let mut coeffs = [[0.0; N]; 5];
        for i in 0..N {
            let ydiff = y1[i] - y[i];
            let bspl = h * k1[i] - ydiff;
            coeffs[0][i] = y[i];
            coeffs[1][i] = ydiff;
            coeffs[2][i] = bspl;
            coeffs[3][i] = ydiff - h * k7[i] - bspl;
            coeffs[4][i] =
                h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        let step = DenseStep { t0: t, h, coeffs };
        arc.steps.push(step);
        accepted += 1;

        let t1 = if last { t_end } else { t + h };
        for (g, ev) in g_next.iter_mut().zip(events.iter()) {
            *g = (ev.func)(t1, &y1);
        }
        let before = hits.len();
        scan_step(&step, events, &g_prev, &g_next, cfg.event_tol, &mut hits);
        if hits.len() > before {
            hits[before..].sort_by(|a, b| a.t.total_cmp(&b.t));
            if let Some(pos) = hits[before..].iter().position(|h| events[h.index].terminal) {
                let stop = before + pos;
                hits.truncate(stop + 1);
                let hit = hits[stop];
                return Ok(Solution {
                    arc,
                    t_final: hit.t,
                    y_final: hit.y,
                    stopped_by: Some(stop),
                    hits,
                    accepted,
                    rejected,
                });
            }
        }

        t = t1;
        y = y1;
        k1 = k7;
        core::mem::swap(&mut g_prev, &mut g_next);

        if last {
            return Ok(Solution {
                arc,
                hits,
                t_final: t,
                y_final: y,
                stopped_by: None,
                accepted,
                rejected,
            });
        }

        let fac11 = math::powf(err.max(1e-300), 0.2 - 0.75 * PI_BETA);
        let mut ratio = SAFETY / (fac11 / math::powf(err_old, PI_BETA));
        ratio = ratio.clamp(MIN_RATIO, MAX_RATIO);
        if last_rejected {
            ratio = ratio.min(1.0);
        }
        err_old = err.max(1e-4);
        last_rejected = false;
        h = (h * ratio).min(cfg.max_step);
    }
}
