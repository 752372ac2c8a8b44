//! Declarative scenario files.
//!
//! A scenario is a TOML document in which every field has a default. A file
//! may also carry a `[[runs]]` array; each entry is merged over the
//! top-level tables and executed as its own run.

use crate::failure::Failure;
use fold_dynamics_core::characteristics::RadialMode;
use fold_dynamics_core::dynamics::{self, BranchPolicy, Component, SimulationConfig};
use fold_dynamics_core::numerics::SolverConfig;
use fold_dynamics_core::{OscillatorParams, PolarState};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    /// Use `m = c = r0 = 1`; explicit values are then rejected.
    pub nondimensional: bool,
    pub m: f64,
    pub c: f64,
    pub r0: f64,
    /// Upper bound on `x = v²/c²` accepted by the model.
    pub x_max: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { nondimensional: false, m: 1.0, c: 1.0, r0: 1.0, x_max: 1.0 - 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub r: f64,
    pub phi: f64,
    pub x: f64,
    pub u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentSpec {
    Inner,
    Middle,
    Outer,
}

impl From<ComponentSpec> for Component {
    fn from(c: ComponentSpec) -> Self {
        match c {
            ComponentSpec::Inner => Component::Inner,
            ComponentSpec::Middle => Component::Middle,
            ComponentSpec::Outer => Component::Outer,
        }
    }
}

/// Initial condition: either `state`, or `lambda` with `mu`, `component`
/// and `cos_sign`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<ComponentSpec>,
    /// Sign of `cos u0`, selecting the branch of `sin u = μ / f(x)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cos_sign: Option<f64>,
}

impl InitialSection {
    fn level_default() -> Self {
        Self {
            state: None,
            lambda: Some(2.5),
            mu: Some(-0.05),
            component: Some(ComponentSpec::Inner),
            cos_sign: Some(-1.0),
        }
    }

    fn is_empty(&self) -> bool {
        self == &Self::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicySpec {
    Both,
    Sheet1,
    Sheet2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialSpec {
    Halt,
    ContinuityLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub t_max: f64,
    pub max_jumps: usize,
    pub branch_policy: PolicySpec,
    pub eps_restart: f64,
    pub radial: RadialSpec,
    pub max_arcs: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            t_max: 5.0,
            max_jumps: dynamics::DEFAULT_MAX_JUMPS,
            branch_policy: PolicySpec::Both,
            eps_restart: dynamics::DEFAULT_EPS_RESTART,
            radial: RadialSpec::Halt,
            max_arcs: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// `0` means unbounded.
    pub max_step: f64,
    pub event_tol: f64,
    pub max_steps: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            max_step: 0.0,
            event_tol: d.event_tol,
            max_steps: d.max_steps,
        }
    }
}

impl SolverSection {
    pub fn to_config(&self) -> SolverConfig {
        SolverConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: if self.max_step > 0.0 { self.max_step } else { f64::INFINITY },
            event_tol: self.event_tol,
            max_steps: self.max_steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    pub degrees: bool,
    pub plot_stubs: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "out".into(), degrees: false, plot_stubs: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CharacteristicsSection {
    /// Characteristic constants, units of `mc² r0`.
    pub a: Vec<f64>,
    pub samples: usize,
    pub x_end: f64,
}

impl Default for CharacteristicsSection {
    fn default() -> Self {
        Self {
            a: vec![-0.5, -0.1, -0.02, -0.004, 0.0, 0.004, 0.02, 0.1, 0.5],
            samples: 200,
            x_end: 0.95,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LevelsetsSection {
    pub lambdas: Vec<f64>,
    /// Orbit family per level, as fractions of `max |f|` on the level.
    pub mu_fractions: Vec<f64>,
    pub samples: usize,
}

impl Default for LevelsetsSection {
    fn default() -> Self {
        Self {
            lambdas: vec![1.0, 1.5, 2.0, 2.5, 3.0, 5.0],
            mu_fractions: vec![0.0, 0.25, 0.5, 0.75],
            samples: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JumpSection {
    pub x_bar: f64,
    pub u_bar: f64,
    pub phi_bar: f64,
}

impl Default for JumpSection {
    fn default() -> Self {
        Self { x_bar: 0.4, u_bar: PI / 4.0, phi_bar: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpticsSection {
    pub n_plus: f64,
    pub n_minus: f64,
    pub c: f64,
    /// Angles of incidence, radians.
    pub phi: Vec<f64>,
}

impl Default for OpticsSection {
    fn default() -> Self {
        Self {
            n_plus: 1.0,
            n_minus: 1.5,
            c: 1.0,
            phi: (0..22).map(|k| ((1 + 4 * k) as f64).to_radians()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub model: ModelSection,
    pub initial: InitialSection,
    pub run: RunSection,
    pub solver: SolverSection,
    pub output: OutputSection,
    pub characteristics: CharacteristicsSection,
    pub levelsets: LevelsetsSection,
    pub jump: JumpSection,
    pub optics: OpticsSection,
}

fn config_err(msg: impl Into<String>) -> Failure {
    Failure::config(msg)
}

impl Scenario {
    /// The effective configuration with the default initial condition
    /// filled in.
    pub fn defaults() -> Self {
        Self { initial: InitialSection::level_default(), ..Self::default() }
    }

    pub fn params(&self) -> Result<OscillatorParams, Failure> {
        let m = &self.model;
        let (mm, c, r0) = if m.nondimensional {
            let d = ModelSection::default();
            if (m.m, m.c, m.r0) != (d.m, d.c, d.r0) {
                return Err(config_err("model.nondimensional = true excludes explicit m, c, r0"));
            }
            (1.0, 1.0, 1.0)
        } else {
            (m.m, m.c, m.r0)
        };
        OscillatorParams::new(mm, c, r0)
            .and_then(|p| p.with_x_max(m.x_max))
            .map_err(|e| config_err(format!("model: {e}")))
    }

    pub fn simulation(&self) -> Result<SimulationConfig, Failure> {
        let solver = self.solver.to_config();
        solver.validate().map_err(|e| config_err(format!("solver: {e}")))?;
        let r = &self.run;
        if !(r.t_max > 0.0 && r.t_max.is_finite()) {
            return Err(config_err(format!("run.t_max must be positive, got {}", r.t_max)));
        }
        if !(r.eps_restart > 0.0) {
            return Err(config_err(format!("run.eps_restart must be positive, got {}", r.eps_restart)));
        }
        Ok(SimulationConfig {
            t_max: r.t_max,
            max_jumps: r.max_jumps,
            policy: match r.branch_policy {
                PolicySpec::Both => BranchPolicy::FollowBoth,
                PolicySpec::Sheet1 => BranchPolicy::FollowSheet1,
                PolicySpec::Sheet2 => BranchPolicy::FollowSheet2,
            },
            solver,
            eps_restart: r.eps_restart,
            radial: match r.radial {
                RadialSpec::Halt => RadialMode::Halt,
                RadialSpec::ContinuityLimit => RadialMode::ContinuityLimit,
            },
            max_arcs: r.max_arcs.max(1),
        })
    }

    /// Checks that exactly one initial-condition form is present.
    pub fn validate_initial(&self) -> Result<(), Failure> {
        let i = &self.initial;
        let level = i.lambda.is_some() || i.mu.is_some() || i.component.is_some() || i.cos_sign.is_some();
        match (i.state.is_some(), level) {
            (true, true) => Err(config_err("initial: give either `state` or the (lambda, mu) form, not both")),
            (false, false) => Err(config_err("initial: no initial condition given")),
            (true, false) => Ok(()),
            (false, true) => {
                let lambda = i.lambda.ok_or_else(|| config_err("initial: `lambda` is required with `mu`"))?;
                if !(lambda >= 1.0) || !lambda.is_finite() {
                    return Err(config_err(format!("initial.lambda must be >= 1, got {lambda}")));
                }
                if let Some(s) = i.cos_sign {
                    if s != 1.0 && s != -1.0 {
                        return Err(config_err(format!("initial.cos_sign must be 1 or -1, got {s}")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn initial_state(&self, params: &OscillatorParams) -> Result<PolarState, Failure> {
        self.validate_initial()?;
        let i = &self.initial;
        if let Some(s) = i.state {
            return PolarState::new(s.r, s.phi, s.x, s.u).map_err(|e| config_err(format!("initial.state: {e}")));
        }
        let lambda = i.lambda.unwrap_or(2.5);
        let mu = i.mu.unwrap_or(0.0);
        let component = i.component.unwrap_or(ComponentSpec::Outer);
        dynamics::start_state(params, lambda, mu, component.into(), i.cos_sign.unwrap_or(1.0))
            .map_err(|e| config_err(format!("initial: no start state on level {lambda} with mu {mu}: {e}")))
    }

    /// Hash over the scenario with output placement removed.
    pub fn payload_key(&self) -> Scenario {
        let mut s = self.clone();
        s.output.dir = String::new();
        s
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serialises")
    }
}

/// Scenarios described by a file, or the defaults without one.
pub fn load(path: Option<&Path>) -> Result<Vec<Scenario>, Failure> {
    let Some(path) = path else {
        return Ok(vec![Scenario::defaults()]);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Vec<Scenario>, Failure> {
    let mut root: toml::Table = text.parse().map_err(|e| config_err(format!("{e}")))?;
    let runs = match root.remove("runs") {
        None => None,
        Some(toml::Value::Array(items)) => Some(items),
        Some(_) => return Err(config_err("`runs` must be an array of tables")),
    };
    let Some(runs) = runs else {
        return Ok(vec![finish(root)?]);
    };
    if runs.is_empty() {
        return Err(config_err("`runs` is empty"));
    }
    let mut out = Vec::with_capacity(runs.len());
    for (k, item) in runs.into_iter().enumerate() {
        let toml::Value::Table(overlay) = item else {
            return Err(config_err(format!("runs[{k}] is not a table")));
        };
        let mut merged = root.clone();
        merge(&mut merged, overlay);
        let mut s = finish(merged)?;
        if s.name.is_empty() {
            s.name = format!("run{k:03}");
        }
        out.push(s);
    }
    let mut names: Vec<&str> = out.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(config_err("run names must be unique"));
    }
    Ok(out)
}

fn finish(table: toml::Table) -> Result<Scenario, Failure> {
    let mut s: Scenario = toml::Value::Table(table).try_into().map_err(|e| config_err(format!("{e}")))?;
    if s.initial.is_empty() {
        s.initial = InitialSection::level_default();
    }
    s.validate_initial()?;
    Ok(s)
}

/// Overlays `top` on `base`; an `initial` table replaces rather than merges,
/// so a run can switch initial-condition forms.
fn merge(base: &mut toml::Table, top: toml::Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) if k != "initial" => merge(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let s = Scenario::defaults();
        let back = parse(&s.to_toml()).unwrap();
        assert_eq!(back, vec![s]);
    }

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(parse("").unwrap(), vec![Scenario::defaults()]);
    }

    #[test]
    fn both_initial_forms_rejected() {
        let text = "[initial]\nlambda = 2.5\nstate = { r = 1.0, phi = 0.0, x = 0.1, u = 0.2 }\n";
        assert_eq!(parse(text).unwrap_err().code, 64);
    }

    #[test]
    fn low_lambda_rejected() {
        assert_eq!(parse("[initial]\nlambda = 0.9\nmu = 0.0\n").unwrap_err().code, 64);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse("[run]\nt_maxx = 3.0\n").is_err());
    }

    #[test]
    fn runs_merge_over_base() {
        let text = r#"
            [run]
            t_max = 2.0
            [[runs]]
            name = "a"
            [[runs]]
            name = "b"
            run = { max_jumps = 1 }
            initial = { state = { r = 0.5, phi = 0.0, x = 0.1, u = 1.0 } }
        "#;
        let runs = parse(text).unwrap();
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[0].run.t_max, 2.0);
        assert_eq!(runs[1].run.t_max, 2.0);
        assert_eq!(runs[1].run.max_jumps, 1);
        assert!(runs[1].initial.state.is_some() && runs[1].initial.lambda.is_none());
    }

    #[test]
    fn nondimensional_excludes_scales() {
        let s = parse("[model]\nnondimensional = true\nm = 2.0\n").unwrap();
        assert!(s[0].params().is_err());
    }
}
