use clap::{error::ErrorKind, Args, Parser, Subcommand};
use fold_dynamics::commands::{self, characteristics, jump, levelsets, optics, simulate};
use fold_dynamics::config::{self, Scenario};
use fold_dynamics::failure::{Failure, EXIT_CONFIG, EXIT_OK};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fold-dynamics", version, about = "Hybrid dynamics with fold-singular Legendre maps")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Scenario file (TOML). Without one, the defaults are used.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Write angles in degrees.
    #[arg(long, global = true)]
    degrees: bool,
    /// Reserved: no random numbers are drawn anywhere.
    #[arg(long, global = true)]
    seedless: bool,
    /// Emit a matplotlib script next to every CSV file.
    #[arg(long, global = true)]
    plot_stubs: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the hybrid trajectory of each scenario.
    Simulate,
    /// Sample characteristic curves on the fold.
    Characteristics {
        /// Characteristic constants, overriding `characteristics.a`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        a: Option<Vec<f64>>,
    },
    /// Level-set geometry and topology table.
    Levelsets {
        /// Energy levels, overriding `levelsets.lambdas`.
        #[arg(long, value_delimiter = ',')]
        lambda: Option<Vec<f64>>,
    },
    /// Decisive partner and jump angle of one fold point.
    Jump {
        #[arg(long, allow_negative_numbers = true)]
        x_bar: Option<f64>,
        /// Radians.
        #[arg(long, allow_negative_numbers = true)]
        u_bar: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        phi_bar: Option<f64>,
    },
    /// Reflection and refraction table.
    Optics {
        #[arg(long)]
        n_plus: Option<f64>,
        #[arg(long)]
        n_minus: Option<f64>,
        /// Angles of incidence in radians.
        #[arg(long, value_delimiter = ',')]
        phi: Option<Vec<f64>>,
    },
    /// Print the effective configuration.
    PrintConfig,
}

fn load(global: &Global) -> Result<Vec<Scenario>, Failure> {
    let mut scenarios = config::load(global.config.as_deref())?;
    for s in &mut scenarios {
        if let Some(out) = &global.out {
            s.output.dir = out.to_string_lossy().into_owned();
        }
        s.output.degrees |= global.degrees;
        s.output.plot_stubs |= global.plot_stubs;
    }
    Ok(scenarios)
}

fn report(failure: &Failure) {
    eprintln!("{}", failure.to_json());
}

fn finish(results: Vec<Result<u8, Failure>>) -> u8 {
    commands::combine(results.into_iter().map(|r| match r {
        Ok(code) => code,
        Err(f) => {
            report(&f);
            f.code
        }
    }))
}

fn execute(cli: Cli) -> Result<u8, Failure> {
    let mut scenarios = load(&cli.global)?;
    match cli.command {
        Command::PrintConfig => {
            for s in &scenarios {
                print!("{}", s.to_toml());
            }
            Ok(EXIT_OK)
        }
        Command::Simulate => {
            for s in &scenarios {
                s.params()?;
                s.simulation()?;
            }
            let results = commands::batch(&scenarios, |s, dir| {
                let r = simulate::run(s, dir)?;
                println!(
                    "{}: {} arcs, {} jumps, {} branches, halt {}, exit {} -> {}",
                    if s.name.is_empty() { "run" } else { &s.name },
                    r.arcs.len(),
                    r.jumps.len(),
                    r.branches.len(),
                    r.halt.unwrap_or("none"),
                    r.exit_code,
                    dir.display()
                );
                Ok(r.exit_code)
            })?;
            Ok(finish(results))
        }
        Command::Characteristics { a } => {
            if let Some(a) = a {
                scenarios.iter_mut().for_each(|s| s.characteristics.a = a.clone());
            }
            let results = commands::batch(&scenarios, |s, dir| {
                let r = characteristics::run(s, dir)?;
                let worst = r.curves.iter().map(|c| c.max_residual).fold(0.0, f64::max);
                println!("{} curves, max |q sin u - a| = {worst:e} -> {}", r.curves.len(), dir.display());
                Ok(EXIT_OK)
            })?;
            Ok(finish(results))
        }
        Command::Levelsets { lambda } => {
            if let Some(l) = lambda {
                scenarios.iter_mut().for_each(|s| s.levelsets.lambdas = l.clone());
            }
            let results = commands::batch(&scenarios, |s, dir| {
                for row in levelsets::run(s, dir)? {
                    println!(
                        "lambda {}: {} component(s), x1 {:?}, x2 {:?}, x_C {:?}",
                        row.lambda, row.components, row.x1, row.x2, row.x_c
                    );
                }
                Ok(EXIT_OK)
            })?;
            Ok(finish(results))
        }
        Command::Jump { x_bar, u_bar, phi_bar } => {
            let explicit_out = cli.global.out.is_some();
            let mut code = Vec::new();
            for s in &mut scenarios {
                s.jump.x_bar = x_bar.unwrap_or(s.jump.x_bar);
                s.jump.u_bar = u_bar.unwrap_or(s.jump.u_bar);
                s.jump.phi_bar = phi_bar.unwrap_or(s.jump.phi_bar);
                let dir = PathBuf::from(&s.output.dir);
                code.push(jump::run(s, explicit_out.then_some(dir.as_path())).map(|r| {
                    println!("{}", serde_json::to_string_pretty(&r).expect("report serialises"));
                    EXIT_OK
                }));
            }
            Ok(finish(code))
        }
        Command::Optics { n_plus, n_minus, phi } => {
            for s in &mut scenarios {
                s.optics.n_plus = n_plus.unwrap_or(s.optics.n_plus);
                s.optics.n_minus = n_minus.unwrap_or(s.optics.n_minus);
                if let Some(p) = &phi {
                    s.optics.phi = p.clone();
                }
            }
            let results = commands::batch(&scenarios, |s, dir| {
                let rows = optics::run(s, dir)?;
                let total = rows.iter().filter(|r| r.psi_minus.is_none()).count();
                println!("{} angles, {total} total reflections -> {}", rows.len(), dir.display());
                Ok(EXIT_OK)
            })?;
            Ok(finish(results))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            report(&f);
            ExitCode::from(f.code)
        }
    }
}
