use crate::config::Scenario;
use crate::failure::{error_kind, Failure, EXIT_HALT, EXIT_NUMERICAL, EXIT_OK};
use crate::output::{num, scenario_hash, Sink, VERSION};
use fold_dynamics_core::dynamics::{simulate, HybridTrajectory, Sheet};
use fold_dynamics_core::{model, OscillatorParams, PolarState};
use serde::Serialize;
use std::path::Path;
use std::time::Instant;

pub const TRAJECTORY_COLUMNS: [&str; 8] = ["t", "r", "phi", "x", "u", "lambda", "mu", "branch_id"];

#[derive(Debug, Serialize)]
pub struct StateRecord {
    pub r: f64,
    pub phi: f64,
    pub x: f64,
    pub u: f64,
}

impl StateRecord {
    fn new(s: &PolarState, phi: f64, sink: &Sink) -> Self {
        Self { r: s.r, phi: sink.angle(phi), x: s.x, u: sink.angle(s.u) }
    }
}

#[derive(Debug, Serialize)]
pub struct ArcRecord {
    pub label: String,
    pub depth: usize,
    pub sheet: Option<u8>,
    pub t_start: f64,
    pub t_end: f64,
    pub termination: &'static str,
    pub samples: usize,
    pub lambda: f64,
    pub mu: f64,
    pub max_lambda_drift: f64,
    pub max_mu_drift: f64,
}

#[derive(Debug, Serialize)]
pub struct DepartureRecord {
    pub sheet: u8,
    pub on_fold: StateRecord,
    pub restart: StateRecord,
    pub child_arc: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct JumpRecordOut {
    pub index: usize,
    pub from_arc: usize,
    pub t: f64,
    pub arrival: StateRecord,
    pub arrival_class: String,
    pub delta_phi: f64,
    pub delta_phi_wrapped: f64,
    pub x_star: f64,
    pub a: f64,
    pub lambda: f64,
    pub mu: f64,
    /// Largest relative change of `(λ, μ)` from arrival to any departure.
    pub max_lambda_change: f64,
    pub max_mu_change: f64,
    pub departures: Vec<DepartureRecord>,
}

#[derive(Debug, Serialize)]
pub struct BranchRecord {
    pub branch_id: String,
    pub file: String,
    pub rows: usize,
    pub arcs: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct FailureRecord {
    pub label: String,
    pub depth: usize,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct Conservation {
    pub max_lambda_drift: f64,
    pub max_mu_drift: f64,
    pub max_jump_lambda_change: f64,
    pub max_jump_mu_change: f64,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub name: String,
    pub scenario_sha256: String,
    pub params: [f64; 3],
    pub angles: &'static str,
    pub initial: StateRecord,
    pub lambda: f64,
    pub mu: f64,
    pub exit_code: u8,
    pub halt: Option<&'static str>,
    pub budget_exhausted: bool,
    pub conservation: Conservation,
    pub arcs: Vec<ArcRecord>,
    pub jumps: Vec<JumpRecordOut>,
    pub branches: Vec<BranchRecord>,
    pub failures: Vec<FailureRecord>,
    pub elapsed_seconds: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// Arc indices from the root to `leaf`.
fn path_to(traj: &HybridTrajectory, leaf: usize) -> Vec<usize> {
    let mut path = vec![leaf];
    let mut at = leaf;
    while let Some(j) = traj.arcs[at].parent_jump {
        at = traj.jumps[j].from_arc;
        path.push(at);
    }
    path.reverse();
    path
}

fn file_name(label: &str) -> String {
    format!("branch_{}.csv", label.replace('.', "_"))
}

/// Runs one scenario and writes its files into `dir`.
pub fn run(scenario: &Scenario, dir: &Path) -> Result<RunReport, Failure> {
    let clock = Instant::now();
    let params = scenario.params()?;
    let cfg = scenario.simulation()?;
    let state0 = scenario.initial_state(&params)?;
    let sink = Sink::new(dir, scenario)?;
    let traj = simulate(&params, &state0, &cfg)?;
    let (lambda, mu) = model::lambda_mu(&params, &state0)?;

    let branches = write_branches(&params, &traj, &sink)?;
    let report = build_report(scenario, &params, &state0, (lambda, mu), &traj, branches, &sink, clock);
    sink.json("summary.json", &report)?;
    Ok(report)
}

fn write_branches(params: &OscillatorParams, traj: &HybridTrajectory, sink: &Sink) -> Result<Vec<BranchRecord>, Failure> {
    let mut has_child = vec![false; traj.arcs.len()];
    for j in &traj.jumps {
        has_child[j.from_arc] |= !j.children.is_empty();
    }
    let mut out = Vec::new();
    for leaf in (0..traj.arcs.len()).filter(|&i| !has_child[i]) {
        let label = traj.arcs[leaf].label.clone();
        let file = file_name(&label);
        let path = path_to(traj, leaf);
        let mut csv = sink.csv(&file, &TRAJECTORY_COLUMNS)?;
        for &i in &path {
            let arc = &traj.arcs[i].arc;
            for ((t, s), phi) in arc.samples.iter().zip(&arc.phi_unwrapped) {
                let (l, m) = model::lambda_mu(params, s)?;
                csv.row([
                    num(*t),
                    num(s.r),
                    num(sink.angle(*phi)),
                    num(s.x),
                    num(sink.angle(s.u)),
                    num(l),
                    num(m),
                    label.clone(),
                ])?;
            }
        }
        let rows = csv.finish()?;
        out.push(BranchRecord { branch_id: label, file, rows, arcs: path });
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn build_report(
    scenario: &Scenario,
    params: &OscillatorParams,
    state0: &PolarState,
    (lambda, mu): (f64, f64),
    traj: &HybridTrajectory,
    branches: Vec<BranchRecord>,
    sink: &Sink,
    clock: Instant,
) -> RunReport {
    let arcs: Vec<ArcRecord> = traj
        .arcs
        .iter()
        .map(|n| ArcRecord {
            label: n.label.clone(),
            depth: n.depth,
            sheet: n.sheet.map(Sheet::index),
            t_start: n.arc.t_start(),
            t_end: n.arc.t_end(),
            termination: n.arc.termination.as_str(),
            samples: n.arc.samples.len(),
            lambda: n.arc.lambda,
            mu: n.arc.mu,
            max_lambda_drift: n.arc.max_lambda_drift,
            max_mu_drift: n.arc.max_mu_drift,
        })
        .collect();

    let mut jumps = Vec::with_capacity(traj.jumps.len());
    for (index, j) in traj.jumps.iter().enumerate() {
        let ev = &j.event;
        let (mut dl, mut dm) = (0.0f64, 0.0f64);
        let departures = ev
            .departures
            .iter()
            .map(|d| {
                for s in [d.on_fold, d.restart] {
                    if let Ok((l, m)) = model::lambda_mu(params, &s) {
                        dl = dl.max(rel(l, ev.lambda));
                        dm = dm.max(rel(m, ev.mu));
                    }
                }
                DepartureRecord {
                    sheet: d.sheet.index(),
                    on_fold: StateRecord::new(&d.on_fold, ev.jump.phi_tilde, sink),
                    restart: StateRecord::new(&d.restart, ev.jump.phi_tilde, sink),
                    child_arc: j.children.iter().copied().find(|&c| traj.arcs[c].sheet == Some(d.sheet)),
                }
            })
            .collect();
        jumps.push(JumpRecordOut {
            index,
            from_arc: j.from_arc,
            t: ev.t,
            arrival: StateRecord::new(&ev.arrival, ev.jump.phi_bar, sink),
            arrival_class: format!("{:?}", ev.jump.arrival_class),
            delta_phi: sink.angle(ev.jump.delta_phi),
            delta_phi_wrapped: sink.angle(ev.jump.delta_phi_wrapped),
            x_star: ev.jump.x_star,
            a: ev.jump.a,
            lambda: ev.lambda,
            mu: ev.mu,
            max_lambda_change: dl,
            max_mu_change: dm,
            departures,
        });
    }

    let failures: Vec<FailureRecord> = traj
        .failures
        .iter()
        .map(|f| FailureRecord {
            label: f.label.clone(),
            depth: f.depth,
            kind: error_kind(&f.error),
            message: f.error.to_string(),
        })
        .collect();

    let conservation = Conservation {
        max_lambda_drift: arcs.iter().map(|a| a.max_lambda_drift).fold(0.0, f64::max),
        max_mu_drift: arcs.iter().map(|a| a.max_mu_drift).fold(0.0, f64::max),
        max_jump_lambda_change: jumps.iter().map(|j| j.max_lambda_change).fold(0.0, f64::max),
        max_jump_mu_change: jumps.iter().map(|j| j.max_mu_change).fold(0.0, f64::max),
    };
    let halt = traj.halt().map(|h| h.as_str());
    let exit_code = if traj.failures.iter().any(|f| Failure::from(f.error).code == EXIT_NUMERICAL) {
        EXIT_NUMERICAL
    } else if halt.is_some() || !traj.failures.is_empty() {
        EXIT_HALT
    } else {
        EXIT_OK
    };
    RunReport {
        version: VERSION,
        name: scenario.name.clone(),
        scenario_sha256: scenario_hash(scenario),
        params: [params.m(), params.c(), params.r0()],
        angles: if sink.degrees { "degrees" } else { "radians" },
        initial: StateRecord::new(state0, state0.phi, sink),
        lambda,
        mu,
        exit_code,
        halt,
        budget_exhausted: traj.budget_exhausted,
        conservation,
        arcs,
        jumps,
        branches,
        failures,
        elapsed_seconds: clock.elapsed().as_secs_f64(),
    }
}
