use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cmcvol_cli::commands::{execute, Command};
use cmcvol_cli::config::{parse_config, ConfigError, Location, RunConfig};
use cmcvol_cli::record::write_records;

/// Willmore energy, volume and Chern-Simons holonomy of CMC surfaces in the 3-sphere.
#[derive(Parser)]
#[command(name = "cmcvol", version)]
struct Cli {
    /// Config file of `key = value` lines; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Angle in (0, pi/2); accepts literals such as pi/4
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi: Option<String>,
    #[arg(long, global = true)]
    genus: Option<String>,
    /// Highest lambda power kept by the solver
    #[arg(long, global = true)]
    degree: Option<String>,
    /// Collocation samples on the unit circle
    #[arg(long, global = true)]
    samples: Option<String>,
    #[arg(long, global = true)]
    ode_tol: Option<String>,
    #[arg(long, global = true)]
    quad_tol: Option<String>,
    #[arg(long, global = true)]
    solver_tol: Option<String>,
    #[arg(long, global = true)]
    max_iter: Option<String>,
    /// lev, regularizing or darboux
    #[arg(long, global = true)]
    method: Option<String>,
    /// taylor or solved
    #[arg(long, global = true)]
    data: Option<String>,
    /// json-lines or csv
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write records here instead of stdout
    #[arg(long, global = true)]
    output: Option<String>,
    /// Comma separated angles for `sweep`
    #[arg(long, global = true)]
    sweep_phi: Option<String>,
    /// Comma separated genera for `sweep`
    #[arg(long, global = true)]
    sweep_genus: Option<String>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Round-sphere holonomy and volume checks
    SphereCheck,
    /// Homogeneous torus with r^2 + s^2 = 1
    Torus {
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
    },
    /// Volume expansion of the Lawson surface
    LawsonVolume,
    /// Holonomy of the Lawson surface by the selected method
    LawsonHolonomy,
    /// Solve the monodromy problem at the configured genus
    SolveMonodromy,
    /// Run the acceptance suite
    Verify,
    /// Lawson invariants over a grid of angles and genera
    Sweep,
}

fn config_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("cmcvol: config error: {e}");
    ExitCode::from(2)
}

fn build_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
                location: Location::Flag("config".into()),
                key: "config".into(),
                kind: cmcvol_cli::config::ErrorKind::Malformed,
                message: format!("{}: {e}", path.display()),
            })?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    let flags = [
        ("phi", &cli.phi),
        ("genus", &cli.genus),
        ("degree", &cli.degree),
        ("samples", &cli.samples),
        ("ode_tol", &cli.ode_tol),
        ("quad_tol", &cli.quad_tol),
        ("solver_tol", &cli.solver_tol),
        ("max_iter", &cli.max_iter),
        ("method", &cli.method),
        ("data", &cli.data),
        ("format", &cli.format),
        ("output", &cli.output),
        ("sweep_phi", &cli.sweep_phi),
        ("sweep_genus", &cli.sweep_genus),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v.trim(), Location::Flag(key.replace('_', "-")))?;
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    let command = match (&cli.command, &cfg.command) {
        (Some(Cmd::SphereCheck), _) => Command::SphereCheck,
        (Some(Cmd::Torus { r, s }), _) => Command::Torus { r: *r, s: *s },
        (Some(Cmd::LawsonVolume), _) => Command::LawsonVolume,
        (Some(Cmd::LawsonHolonomy), _) => Command::LawsonHolonomy,
        (Some(Cmd::SolveMonodromy), _) => Command::SolveMonodromy,
        (Some(Cmd::Verify), _) => Command::Verify,
        (Some(Cmd::Sweep), _) => Command::Sweep,
        (None, Some(name)) => Command::from_name(name).expect("validated by the parser"),
        (None, None) => return config_error("no command given on the command line or in the config file"),
    };
    let records = match execute(&command, &cfg) {
        Ok(r) => r,
        Err(e) => return config_error(e),
    };
    let written = match &cfg.output {
        Some(path) => File::create(path).and_then(|f| write_records(f, &records, cfg.format)),
        None => write_records(std::io::stdout().lock(), &records, cfg.format),
    };
    if let Err(e) = written {
        eprintln!("cmcvol: cannot write records: {e}");
        return ExitCode::from(1);
    }
    let failed: Vec<&str> = records.iter().filter(|r| r.failed()).map(|r| r.detail.as_str()).collect();
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        for d in &failed {
            eprintln!("cmcvol: {}: {d}", command.name());
        }
        ExitCode::from(1)
    }
}
