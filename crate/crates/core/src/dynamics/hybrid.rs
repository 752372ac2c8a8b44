//! Fold transitions and the branching hybrid trajectory.

use super::arc::integrate_unwrapped;
use super::level::state_on_level;
use super::{Termination, TrajectoryArc};
use crate::characteristics::{decisive_partner_with, JumpSolution, RadialMode};
use crate::model::{self, OscillatorParams, PolarState};
use crate::numerics::SolverConfig;
use crate::singular::InOut;
use crate::{math, Error, Result};
use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

pub const DEFAULT_EPS_RESTART: f64 = 1e-7;
pub const DEFAULT_MAX_JUMPS: usize = 8;

/// Side of the fold a departure restarts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sheet {
    /// `E_x < 0`, `x < x̄`.
    Sheet1,
    /// `E_x > 0`, `x > x̄`.
    Sheet2,
}

impl Sheet {
    pub fn index(self) -> u8 {
        match self {
            Sheet::Sheet1 => 1,
            Sheet::Sheet2 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Departure {
    pub sheet: Sheet,
    /// Decisive point on the fold, `(r̄, φ̄ + Δφ, x̄, π - ū)`.
    pub on_fold: PolarState,
    /// Restart state at `x̄ ∓ ε` on the arrival's `(λ, μ)` orbit.
    pub restart: PolarState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpEvent {
    pub t: f64,
    pub arrival: PolarState,
    pub departures: Vec<Departure>,
    pub jump: JumpSolution,
    /// `(λ, μ)` of the arrival, imposed on every restart.
    pub lambda: f64,
    pub mu: f64,
}

/// Transition at a fold arrival with the default restart offset.
pub fn apply_transition(params: &OscillatorParams, arrival: &PolarState, t: f64) -> Result<JumpEvent> {
    apply_transition_with(params, arrival, arrival.phi, t, DEFAULT_EPS_RESTART, RadialMode::Halt)
}

/// Builds the decisive point of `arrival` and one restart per fold sheet.
///
/// `phi_bar` is the unwrapped arrival angle. Tangent arrivals produce a
/// single departure on the arrival's own sheet.
pub fn apply_transition_with(
    params: &OscillatorParams,
    arrival: &PolarState,
    phi_bar: f64,
    t: f64,
    eps: f64,
    radial: RadialMode,
) -> Result<JumpEvent> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter { name: "eps_restart", value: eps });
    }
    let (lambda, mu) = model::lambda_mu(params, arrival)?;
    let jump = decisive_partner_with(params, arrival.x, arrival.u, phi_bar, radial)?
        .ok_or(Error::NoDecisivePoint { x: arrival.x, u: arrival.u })?;
    let on_fold = PolarState::new(arrival.r, jump.phi_tilde, arrival.x, jump.u_tilde)?;

    let arrival_sheet = if model::derivatives(params, arrival.r, arrival.x)?.e_x < 0.0 {
        Sheet::Sheet1
    } else {
        Sheet::Sheet2
    };
    let (sheets, cos_sign): (&[Sheet], f64) = if jump.arrival_class == InOut::Tangent {
        (
            if arrival_sheet == Sheet::Sheet1 { &[Sheet::Sheet1] } else { &[Sheet::Sheet2] },
            1.0,
        )
    } else {
        (&[Sheet::Sheet1, Sheet::Sheet2], math::signum(math::cos(jump.u_tilde)))
    };
    let mut departures = Vec::with_capacity(sheets.len());
    for &sheet in sheets {
        let x = match sheet {
            Sheet::Sheet1 => arrival.x - eps,
            Sheet::Sheet2 => arrival.x + eps,
        };
        let restart = state_on_level(params, lambda, mu, x, cos_sign, jump.phi_tilde)?;
        departures.push(Departure { sheet, on_fold, restart });
    }
    Ok(JumpEvent { t, arrival: *arrival, departures, jump, lambda, mu })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BranchPolicy {
    #[default]
    FollowBoth,
    FollowSheet1,
    FollowSheet2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub t_max: f64,
    pub max_jumps: usize,
    pub policy: BranchPolicy,
    pub solver: SolverConfig,
    pub eps_restart: f64,
    pub radial: RadialMode,
    /// Upper bound on the number of arcs in the tree.
    pub max_arcs: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            t_max: 100.0,
            max_jumps: DEFAULT_MAX_JUMPS,
            policy: BranchPolicy::FollowBoth,
            solver: SolverConfig::default(),
            eps_restart: DEFAULT_EPS_RESTART,
            radial: RadialMode::Halt,
            max_arcs: 4096,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ArcNode {
    /// Path label: `"0"` for the root, then one digit per jump naming the
    /// restart sheet, e.g. `"0.1.2"`.
    pub label: String,
    /// Index into [`HybridTrajectory::jumps`] of the jump that started this
    /// arc.
    pub parent_jump: Option<usize>,
    pub sheet: Option<Sheet>,
    pub depth: usize,
    pub arc: TrajectoryArc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpRecord {
    pub from_arc: usize,
    pub event: JumpEvent,
    /// Indices into [`HybridTrajectory::arcs`].
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchFailure {
    pub label: String,
    pub depth: usize,
    pub error: Error,
}

/// Tree of arcs joined by jumps.
#[derive(Debug, Clone, Default)]
pub struct HybridTrajectory {
    pub arcs: Vec<ArcNode>,
    pub jumps: Vec<JumpRecord>,
    pub failures: Vec<BranchFailure>,
    /// True when `max_arcs` stopped the expansion.
    pub budget_exhausted: bool,
}

impl HybridTrajectory {
    pub fn jump_count(&self) -> usize {
        self.jumps.len()
    }

    /// Arcs without children.
    pub fn leaves(&self) -> impl Iterator<Item = &ArcNode> {
        let mut has_child = alloc::vec![false; self.arcs.len()];
        for j in &self.jumps {
            has_child[j.from_arc] = !j.children.is_empty();
        }
        self.arcs.iter().zip(has_child).filter(|(_, c)| !c).map(|(a, _)| a)
    }

    /// First diagnostic halt among the arcs, if any.
    pub fn halt(&self) -> Option<Termination> {
        self.arcs.iter().map(|a| a.arc.termination).find(|t| t.is_halt())
    }

    /// Root-to-leaf chain following the first child at every jump.
    pub fn first_path(&self) -> Vec<usize> {
        let mut path = Vec::new();
        let mut at = 0;
        while at < self.arcs.len() {
            path.push(at);
            match self.jumps.iter().find(|j| j.from_arc == at).and_then(|j| j.children.first()) {
                Some(&c) => at = c,
                None => break,
            }
        }
        path
    }
}

struct Pending {
    state: PolarState,
    phi: f64,
    t0: f64,
    label: String,
    parent_jump: Option<usize>,
    sheet: Option<Sheet>,
    depth: usize,
}

/// Alternates arc integration and fold transitions, breadth first.
///
/// Failures on one branch are recorded and do not stop its siblings.
pub fn simulate(params: &OscillatorParams, state0: &PolarState, cfg: &SimulationConfig) -> Result<HybridTrajectory> {
    cfg.solver.validate()?;
    let mut out = HybridTrajectory::default();
    let mut queue = VecDeque::new();
    queue.push_back(Pending {
        state: *state0,
        phi: state0.phi,
        t0: 0.0,
        label: String::from("0"),
        parent_jump: None,
        sheet: None,
        depth: 0,
    });
    while let Some(p) = queue.pop_front() {
        if out.arcs.len() >= cfg.max_arcs {
            out.budget_exhausted = true;
            break;
        }
        let arc = match integrate_unwrapped(params, &p.state, p.phi, p.t0, cfg.t_max, &cfg.solver) {
            Ok(a) => a,
            Err(error) => {
                if out.arcs.is_empty() {
                    return Err(error);
                }
                out.failures.push(BranchFailure { label: p.label, depth: p.depth, error });
                continue;
            }
        };
        let index = out.arcs.len();
        if let Some(j) = p.parent_jump {
            out.jumps[j].children.push(index);
        }
        let impact = arc.termination == Termination::ImpactS1 && p.depth < cfg.max_jumps;
        let arrival = *arc.final_state();
        let (t_hit, phi_hit) = (arc.t_end(), arc.final_phi_unwrapped());
        out.arcs.push(ArcNode {
            label: p.label.clone(),
            parent_jump: p.parent_jump,
            sheet: p.sheet,
            depth: p.depth,
            arc,
        });
        if !impact {
            continue;
        }
        let event = match apply_transition_with(params, &arrival, phi_hit, t_hit, cfg.eps_restart, cfg.radial) {
            Ok(e) => e,
            Err(error) => {
                out.failures.push(BranchFailure { label: p.label, depth: p.depth, error });
                continue;
            }
        };
        let jump_index = out.jumps.len();
        for d in select(&event.departures, cfg.policy) {
            let mut label = p.label.clone();
            let _ = write!(label, ".{}", d.sheet.index());
            queue.push_back(Pending {
                state: d.restart,
                phi: event.jump.phi_tilde,
                t0: t_hit,
                label,
                parent_jump: Some(jump_index),
                sheet: Some(d.sheet),
                depth: p.depth + 1,
            });
        }
        out.jumps.push(JumpRecord { from_arc: index, event, children: Vec::new() });
    }
    Ok(out)
}

fn select(departures: &[Departure], policy: BranchPolicy) -> Vec<Departure> {
    let want = match policy {
        BranchPolicy::FollowBoth => return departures.to_vec(),
        BranchPolicy::FollowSheet1 => Sheet::Sheet1,
        BranchPolicy::FollowSheet2 => Sheet::Sheet2,
    };
    match departures.iter().find(|d| d.sheet == want) {
        Some(d) => alloc::vec![*d],
        None => departures.iter().take(1).copied().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{start_state, Component};
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn fold_state(x: f64, u: f64) -> PolarState {
        let p = OscillatorParams::unit();
        PolarState::new(crate::singular::r1_of_x(&p, x).unwrap(), 0.2, x, u).unwrap()
    }

    #[test]
    fn transition_keeps_integrals() {
        let p = OscillatorParams::unit();
        let arrival = fold_state(0.3, FRAC_PI_4);
        let ev = apply_transition(&p, &arrival, 1.0).unwrap();
        assert_eq!(ev.departures.len(), 2);
        let (l0, m0) = model::lambda_mu(&p, &arrival).unwrap();
        for d in &ev.departures {
            assert!((d.on_fold.u - 3.0 * FRAC_PI_4).abs() < 1e-15);
            assert_eq!((d.on_fold.r, d.on_fold.x), (arrival.r, arrival.x));
            for s in [d.on_fold, d.restart] {
                let (l, m) = model::lambda_mu(&p, &s).unwrap();
                assert!((l - l0).abs() < 1e-10 && (m - m0).abs() < 1e-10);
            }
        }
        let expect = crate::characteristics::delta_phi(&p, 0.3, FRAC_PI_4).unwrap().raw;
        assert!((ev.jump.delta_phi - expect).abs() < 1e-15);
    }

    #[test]
    fn tangent_transition_is_single() {
        let p = OscillatorParams::unit();
        let ev = apply_transition(&p, &fold_state(0.3, FRAC_PI_2), 0.0).unwrap();
        assert_eq!(ev.departures.len(), 1);
        assert_eq!(ev.jump.delta_phi, 0.0);
    }

    #[test]
    fn inpoint_arrival_is_rejected() {
        let p = OscillatorParams::unit();
        let r = apply_transition(&p, &fold_state(0.3, PI - 0.5), 0.0);
        assert!(matches!(r, Err(Error::NoDecisivePoint { .. })));
    }

    #[test]
    fn binary_tree_bound() {
        let p = OscillatorParams::unit();
        let s = start_state(&p, 2.5, -0.02, Component::Inner, -1.0).unwrap();
        let cfg = SimulationConfig { t_max: 15.0, max_jumps: 3, ..Default::default() };
        let h = simulate(&p, &s, &cfg).unwrap();
        assert!(h.failures.is_empty(), "{:?}", h.failures);
        assert!(h.leaves().count() <= 8);
        assert!(h.arcs.iter().all(|a| a.depth <= 3));
        assert!(h.jump_count() >= 1);
    }
}
