use crate::config::Scenario;
use crate::failure::Failure;
use crate::output::{num, Sink};
use fold_dynamics_core::characteristics::{self, CharacteristicArc};
use serde::Serialize;
use std::f64::consts::PI;
use std::path::Path;

pub const CURVE_COLUMNS: [&str; 5] = ["curve_id", "a", "x", "u", "degenerate"];
pub const PROFILE_COLUMNS: [&str; 3] = ["x", "q", "dq"];

#[derive(Debug, Serialize)]
pub struct CurveRecord {
    pub curve_id: usize,
    pub a: f64,
    pub x_star: Option<f64>,
    pub degenerate: bool,
    pub rows: usize,
    /// `max |q sin u - a|` over the emitted samples.
    pub max_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct CharacteristicsReport {
    pub x_end: f64,
    pub curves: Vec<CurveRecord>,
}

pub fn run(scenario: &Scenario, dir: &Path) -> Result<CharacteristicsReport, Failure> {
    let params = scenario.params()?;
    let sec = &scenario.characteristics;
    if !(sec.x_end > 0.0 && sec.x_end <= params.x_max()) {
        return Err(Failure::config(format!("characteristics.x_end must lie in (0, x_max], got {}", sec.x_end)));
    }
    if sec.samples < 2 {
        return Err(Failure::config("characteristics.samples must be at least 2"));
    }
    let sink = Sink::new(dir, scenario)?;
    let n = sec.samples;
    let xs: Vec<f64> = (1..=n).map(|k| sec.x_end * k as f64 / n as f64).collect();

    let mut profile = sink.csv("q_profile.csv", &PROFILE_COLUMNS)?;
    for &x in &xs {
        profile.row([num(x), num(characteristics::q_of_x(&params, x)?), num(characteristics::dq_of_x(&params, x)?)])?;
    }
    profile.finish()?;

    let mut csv = sink.csv("characteristics.csv", &CURVE_COLUMNS)?;
    let mut curves = Vec::with_capacity(sec.a.len());
    for (id, &a) in sec.a.iter().enumerate() {
        let before = csv.rows;
        let mut residual = 0.0f64;
        let mut emit = |csv: &mut crate::output::CsvFile, x: f64, u: f64, flag: &str| -> Result<(), Failure> {
            residual = residual.max((characteristics::characteristic_constant(&params, x, u)? - a).abs());
            csv.row([id.to_string(), num(a), num(x), num(sink.angle(u)), flag.to_string()])
        };
        let x_star = if a == 0.0 {
            // sin u = 0: the two radial lines
            for u in [0.0, PI] {
                for &x in &xs {
                    emit(&mut csv, x, u, "1")?;
                }
            }
            None
        } else {
            let x_star = characteristics::x_star(&params, a)?;
            let arc = CharacteristicArc {
                a,
                orientation: if a < 0.0 { 1.0 } else { -1.0 },
                x_min: x_star,
                x_max: params.x_max(),
            };
            if x_star < sec.x_end {
                for (x, u) in arc.sample(&params, sec.x_end, n) {
                    emit(&mut csv, x, u, "0")?;
                }
            }
            Some(x_star)
        };
        curves.push(CurveRecord {
            curve_id: id,
            a,
            x_star,
            degenerate: a == 0.0,
            rows: csv.rows - before,
            max_residual: residual,
        });
    }
    csv.finish()?;
    let report = CharacteristicsReport { x_end: sec.x_end, curves };
    sink.json("characteristics.json", &report)?;
    Ok(report)
}
