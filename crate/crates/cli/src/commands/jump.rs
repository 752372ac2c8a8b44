use crate::config::Scenario;
use crate::failure::Failure;
use crate::output::Sink;
use fold_dynamics_core::characteristics::{self, RadialMode};
use fold_dynamics_core::singular;
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Serialize)]
pub struct JumpReport {
    pub x_bar: f64,
    pub u_bar: f64,
    pub phi_bar: f64,
    pub r_bar: f64,
    pub arrival_class: String,
    pub partner: Option<Partner>,
}

#[derive(Debug, Serialize)]
pub struct Partner {
    pub u_tilde: f64,
    pub phi_tilde: f64,
    pub partner_class: String,
    pub delta_phi: f64,
    pub delta_phi_wrapped: f64,
    pub x_star: f64,
    pub a: f64,
    /// `Δφ` from integrating the characteristic field between the partners.
    pub delta_phi_ode: f64,
    /// `|Δφ - Δφ_ode|`, radians.
    pub residual: f64,
}

pub fn run(scenario: &Scenario, dir: Option<&Path>) -> Result<JumpReport, Failure> {
    let params = scenario.params()?;
    let j = &scenario.jump;
    let solver = scenario.simulation()?.solver;
    let radial = match scenario.run.radial {
        crate::config::RadialSpec::Halt => RadialMode::Halt,
        crate::config::RadialSpec::ContinuityLimit => RadialMode::ContinuityLimit,
    };
    let arrival_class = singular::classify_inout(&params, j.x_bar, j.u_bar)?;
    let r_bar = singular::r1_of_x(&params, j.x_bar)?;
    let sink = match dir {
        Some(d) => Some(Sink::new(d, scenario)?),
        None => None,
    };
    let deg = |a: f64| if scenario.output.degrees { a.to_degrees() } else { a };

    let partner = match characteristics::decisive_partner_with(&params, j.x_bar, j.u_bar, j.phi_bar, radial)? {
        None => None,
        Some(js) => {
            let ode = if js.delta_phi == 0.0 {
                0.0
            } else if js.u_bar.sin().abs() < characteristics::TOL_RADIAL {
                f64::NAN
            } else {
                characteristics::delta_phi_by_ode(&params, js.x_bar, js.u_bar, &solver)?
            };
            Some(Partner {
                u_tilde: deg(js.u_tilde),
                phi_tilde: deg(js.phi_tilde),
                partner_class: format!("{:?}", singular::classify_inout(&params, j.x_bar, js.u_tilde)?),
                delta_phi: deg(js.delta_phi),
                delta_phi_wrapped: deg(js.delta_phi_wrapped),
                x_star: js.x_star,
                a: js.a,
                delta_phi_ode: deg(ode),
                residual: (js.delta_phi - ode).abs(),
            })
        }
    };
    let report = JumpReport {
        x_bar: j.x_bar,
        u_bar: deg(j.u_bar),
        phi_bar: deg(j.phi_bar),
        r_bar,
        arrival_class: format!("{arrival_class:?}"),
        partner,
    };
    if let Some(sink) = sink {
        sink.json("jump.json", &report)?;
    }
    Ok(report)
}
