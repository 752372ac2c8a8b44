use crate::config::Scenario;
use crate::failure::Failure;
use crate::output::{num, Sink};
use fold_dynamics_core::optics::{self, MediumPair, RayState};
use serde::Serialize;
use std::path::Path;

pub const OPTICS_COLUMNS: [&str; 4] = ["phi", "psi_plus", "psi_minus", "snell_residual"];

#[derive(Debug, Serialize)]
pub struct OpticsRow {
    pub phi: f64,
    pub psi_plus: f64,
    /// `None` under total reflection.
    pub psi_minus: Option<f64>,
    pub snell_residual: Option<f64>,
}

pub fn run(scenario: &Scenario, dir: &Path) -> Result<Vec<OpticsRow>, Failure> {
    let sec = &scenario.optics;
    let medium = MediumPair::new(sec.n_plus, sec.n_minus, sec.c).map_err(|e| Failure::config(format!("optics: {e}")))?;
    if let Some(bad) = sec.phi.iter().find(|p| !(**p > 0.0 && **p < std::f64::consts::FRAC_PI_2)) {
        return Err(Failure::config(format!("optics.phi entries must lie in (0, π/2), got {bad}")));
    }
    let sink = Sink::new(dir, scenario)?;
    let nb = medium.n_bar();
    let mut csv = sink.csv("optics.csv", &OPTICS_COLUMNS)?;
    let mut rows = Vec::with_capacity(sec.phi.len());
    for &phi in &sec.phi {
        let arrival = RayState::new([0.0, 0.0, 0.0], [phi.sin(), 0.0, phi.cos()])?;
        let out = optics::impact(&medium, &arrival)?;
        let residual = out.psi_minus.map(|psi| out.phi.sin() / psi.sin() - nb);
        csv.row([
            num(sink.angle(out.phi)),
            num(sink.angle(out.psi_plus)),
            out.psi_minus.map_or("TOTAL".to_string(), |p| num(sink.angle(p))),
            residual.map_or(String::new(), num),
        ])?;
        rows.push(OpticsRow { phi: out.phi, psi_plus: out.psi_plus, psi_minus: out.psi_minus, snell_residual: residual });
    }
    csv.finish()?;
    Ok(rows)
}
