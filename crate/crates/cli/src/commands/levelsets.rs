use crate::config::Scenario;
use crate::failure::Failure;
use crate::output::{num, Sink};
use fold_dynamics_core::dynamics::{level_topology, orbit_profile, r_en, Components};
use fold_dynamics_core::singular;
use serde::Serialize;
use std::path::Path;

pub const SURFACE_COLUMNS: [&str; 2] = ["x", "r"];
pub const LEVEL_COLUMNS: [&str; 3] = ["x", "r", "f"];
pub const ORBIT_COLUMNS: [&str; 4] = ["mu", "x", "u", "branch"];

#[derive(Debug, Serialize)]
pub struct TopologyRow {
    pub lambda: f64,
    pub components: u8,
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    pub x_c: Option<f64>,
    pub x_end: f64,
    /// Single point where the level touches both surfaces (`λ = 2`).
    pub contact_point: Option<[f64; 2]>,
    /// The level has shrunk to the point `r = 0, x = 0` (`λ = 1`).
    pub degenerate: bool,
    pub level_file: String,
    pub orbit_file: String,
}

pub fn run(scenario: &Scenario, dir: &Path) -> Result<Vec<TopologyRow>, Failure> {
    let params = scenario.params()?;
    let sec = &scenario.levelsets;
    if let Some(bad) = sec.lambdas.iter().find(|l| !(**l >= 1.0) || !l.is_finite()) {
        return Err(Failure::config(format!("levelsets.lambdas entries must be >= 1, got {bad}")));
    }
    if sec.samples < 2 {
        return Err(Failure::config("levelsets.samples must be at least 2"));
    }
    let sink = Sink::new(dir, scenario)?;
    let n = sec.samples;
    let x_top = params.x_max().min(0.99);

    for (name, curve) in [("curve_C1.csv", singular::r1_of_x as fn(_, _) -> _), ("curve_C2.csv", singular::r2_of_x)] {
        let mut csv = sink.csv(name, &SURFACE_COLUMNS)?;
        for k in 0..n {
            let x = x_top * k as f64 / (n - 1) as f64;
            csv.row([num(x), num(curve(&params, x)?)])?;
        }
        csv.finish()?;
    }

    let mut rows = Vec::with_capacity(sec.lambdas.len());
    for (idx, &lambda) in sec.lambdas.iter().enumerate() {
        let topo = level_topology(&params, lambda)?;
        let xs: Vec<f64> = (0..n).map(|k| topo.x_end * k as f64 / (n - 1) as f64).collect();
        let degenerate = topo.x_end == 0.0;

        let level_file = format!("level_{idx:02}.csv");
        let mut csv = sink.csv(&level_file, &LEVEL_COLUMNS)?;
        let mut f_max = 0.0f64;
        let pts: &[f64] = if degenerate { &xs[..1] } else { &xs };
        for &x in pts {
            let r = r_en(&params, x, lambda).unwrap_or(0.0);
            let f = orbit_profile(&params, lambda, x).unwrap_or(0.0);
            f_max = f_max.max(f.abs());
            csv.row([num(x), num(r), num(f)])?;
        }
        csv.finish()?;

        let orbit_file = format!("orbits_{idx:02}.csv");
        let mut csv = sink.csv(&orbit_file, &ORBIT_COLUMNS)?;
        for &frac in &sec.mu_fractions {
            let mu = frac * f_max;
            for &x in pts {
                let Some(f) = orbit_profile(&params, lambda, x) else { continue };
                let s = if mu == 0.0 { 0.0 } else { mu / f };
                if !(s.abs() <= 1.0) {
                    continue;
                }
                let u = s.asin();
                for (branch, value) in [("0", u), ("1", std::f64::consts::PI - u)] {
                    csv.row([num(mu), num(x), num(sink.angle(value)), branch.to_string()])?;
                }
            }
        }
        csv.finish()?;

        let contact = matches!((topo.x1, topo.x2), (Some(a), Some(b)) if a == 0.0 && b == 0.0);
        rows.push(TopologyRow {
            lambda,
            components: match topo.components {
                Components::One => 1,
                Components::Three => 3,
            },
            x1: topo.x1,
            x2: topo.x2,
            x_c: topo.x_c,
            x_end: topo.x_end,
            contact_point: contact.then(|| [params.r0(), 0.0]),
            degenerate,
            level_file,
            orbit_file,
        });
    }
    sink.json("topology.json", &rows)?;
    Ok(rows)
}
