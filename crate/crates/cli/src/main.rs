//! Command-line front end: parses arguments, resolves scenario presets,
//! config files, and flag overrides, then hands off to the scenario's
//! executor.  Exit codes: 0 success, 2 config error, 3 numeric-contract
//! violation, 4 i/o failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qlga_cli::config::{parse_angle, parse_config_file, ExperimentConfig, InitialKind,
    OutputKind, PotentialKind};
use qlga_cli::error::CliError;
use qlga_cli::output::{Format, RunSink};
use qlga_cli::runner::run_standard;
use qlga_cli::scenarios::registry;

#[derive(Parser)]
#[command(
    name = "qlga",
    version,
    about = "Simulate the one-particle quantum lattice gas automaton and emit its spectra, \
             dispersion tables, and wave-packet trajectories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory to place run outputs under (one subdirectory per run)
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    /// Output file format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Seed recorded with the run (reserved for randomized configs)
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario or a TOML config file (flags override both)
    Run {
        /// Scenario name (see list-scenarios) or path to a config file
        config: String,
        #[arg(long)]
        sites: Option<usize>,
        /// Rule angle theta, radians or a pi-rational like "pi/3"
        #[arg(long)]
        theta: Option<String>,
        /// Rule angle rho
        #[arg(long)]
        rho: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
        /// Replace the potential with a square well of this depth
        #[arg(long)]
        depth: Option<String>,
    },
    /// Emit the dispersion relation as a (k, +omega, -omega) table
    Dispersion {
        #[arg(long, default_value = "pi/3")]
        theta: String,
        #[arg(long, default_value = "pi/4")]
        rho: String,
        /// Number of k samples over (-pi, pi]
        #[arg(long, default_value_t = 256)]
        resolution: usize,
    },
    /// Evolve a plane wave and emit its trajectory
    Planewave {
        #[arg(long, default_value_t = 32)]
        sites: usize,
        #[arg(long, default_value = "pi/3")]
        theta: String,
        #[arg(long, default_value = "pi/4")]
        rho: String,
        /// Wave index n (k = 2 pi n / N)
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Branch: +1 or -1
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        epsilon: i8,
        /// Step count; defaults to one lattice period (N)
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Evolve a binomial wave packet and emit trajectory, density, spectrum
    Packet {
        #[arg(long, default_value_t = 64)]
        sites: usize,
        #[arg(long, default_value = "pi/3")]
        theta: String,
        #[arg(long, default_value = "pi/4")]
        rho: String,
        /// Carrier wave number, e.g. "pi/4"
        #[arg(long, default_value = "pi/4")]
        k0: String,
        #[arg(long, default_value_t = 31)]
        x0: usize,
        /// Even width parameter
        #[arg(long, default_value_t = 32)]
        s: usize,
        #[arg(long, default_value_t = 49)]
        steps: usize,
        /// Square-well depth; omit for free propagation
        #[arg(long)]
        depth: Option<String>,
    },
    /// Eigendecompose the one-step operator and emit all eigenpairs
    Spectrum {
        #[arg(long, default_value_t = 32)]
        sites: usize,
        #[arg(long, default_value = "pi/3")]
        theta: String,
        #[arg(long, default_value = "pi/4")]
        rho: String,
        /// Square-well depth; omit for the homogeneous operator
        #[arg(long)]
        depth: Option<String>,
    },
    /// List the registered scenario presets
    ListScenarios,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let format: Format = cli.format.into();
    match cli.command {
        Command::Run {
            config,
            sites,
            theta,
            rho,
            steps,
            depth,
        } => {
            let mut resolved = resolve_config(&config)?;
            if let Some(sites) = sites {
                resolved.sites = sites;
            }
            if let Some(theta) = theta {
                resolved.theta = parse_angle(&theta)?;
            }
            if let Some(rho) = rho {
                resolved.rho = parse_angle(&rho)?;
            }
            if let Some(steps) = steps {
                resolved.steps = steps;
            }
            if let Some(depth) = depth {
                resolved.potential = PotentialKind::SquareWell {
                    depth: parse_angle(&depth)?,
                };
            }
            if let Some(seed) = cli.seed {
                resolved.seed = seed;
            }
            resolved.validate()?;
            let scenario = registry()
                .get(resolved.scenario.as_str())
                .ok_or_else(|| {
                    CliError::Config(format!("unknown scenario {:?}", resolved.scenario))
                })?;
            let dir = cli.out_dir.join(&resolved.scenario);
            let mut sink = RunSink::create(&dir, format)?;
            scenario.execute(&resolved, &mut sink)?;
            let files = sink.finish(&resolved.scenario, &resolved)?;
            println!("wrote {} file(s) under {}", files.len() + 1, dir.display());
            Ok(())
        }
        Command::Dispersion {
            theta,
            rho,
            resolution,
        } => {
            let mut config = ExperimentConfig::default_custom();
            config.scenario = "dispersion".into();
            config.theta = parse_angle(&theta)?;
            config.rho = parse_angle(&rho)?;
            config.outputs = vec![OutputKind::Dispersion];
            config.dispersion_resolution = resolution;
            finish_simple(config, &cli.out_dir, format, cli.seed)
        }
        Command::Planewave {
            sites,
            theta,
            rho,
            n,
            epsilon,
            steps,
        } => {
            let mut config = ExperimentConfig::default_custom();
            config.scenario = "planewave".into();
            config.sites = sites;
            config.theta = parse_angle(&theta)?;
            config.rho = parse_angle(&rho)?;
            config.initial = InitialKind::PlaneWave { n, epsilon };
            config.steps = steps.unwrap_or(sites);
            config.outputs = vec![OutputKind::Trajectory];
            finish_simple(config, &cli.out_dir, format, cli.seed)
        }
        Command::Packet {
            sites,
            theta,
            rho,
            k0,
            x0,
            s,
            steps,
            depth,
        } => {
            let mut config = ExperimentConfig::default_custom();
            config.scenario = "packet".into();
            config.sites = sites;
            config.theta = parse_angle(&theta)?;
            config.rho = parse_angle(&rho)?;
            config.initial = InitialKind::Packet {
                k0: parse_angle(&k0)?,
                x0,
                s,
            };
            config.steps = steps;
            if let Some(depth) = depth {
                config.potential = PotentialKind::SquareWell {
                    depth: parse_angle(&depth)?,
                };
            }
            config.outputs = vec![
                OutputKind::Trajectory,
                OutputKind::Density,
                OutputKind::Spectrum,
            ];
            finish_simple(config, &cli.out_dir, format, cli.seed)
        }
        Command::Spectrum {
            sites,
            theta,
            rho,
            depth,
        } => {
            let mut config = ExperimentConfig::default_custom();
            config.scenario = "spectrum".into();
            config.sites = sites;
            config.theta = parse_angle(&theta)?;
            config.rho = parse_angle(&rho)?;
            if let Some(depth) = depth {
                config.potential = PotentialKind::SquareWell {
                    depth: parse_angle(&depth)?,
                };
            }
            config.outputs = vec![OutputKind::Eigenpairs];
            finish_simple(config, &cli.out_dir, format, cli.seed)
        }
        Command::ListScenarios => {
            for (name, scenario) in registry() {
                println!("{name:12} {}", scenario.summary());
            }
            Ok(())
        }
    }
}

/// Resolve the `run` argument: a registered scenario name, or a path to a
/// TOML file that may itself name a scenario to start from.
fn resolve_config(arg: &str) -> Result<ExperimentConfig, CliError> {
    if let Some(scenario) = registry().get(arg) {
        return Ok(scenario.base_config());
    }
    let path = PathBuf::from(arg);
    if !path.exists() {
        return Err(CliError::Config(format!(
            "{arg:?} is neither a registered scenario nor a config file"
        )));
    }
    let text = std::fs::read_to_string(&path)?;
    let raw = parse_config_file(&text)?;
    let scenario_name = raw.scenario.clone().unwrap_or_else(|| "custom".into());
    let mut config = registry()
        .get(scenario_name.as_str())
        .ok_or_else(|| CliError::Config(format!("unknown scenario {scenario_name:?}")))?
        .base_config();
    config.apply_raw(raw)?;
    Ok(config)
}

fn finish_simple(
    mut config: ExperimentConfig,
    out_dir: &std::path::Path,
    format: Format,
    seed: Option<u64>,
) -> Result<(), CliError> {
    if let Some(seed) = seed {
        config.seed = seed;
    }
    config.validate()?;
    let dir = out_dir.join(&config.scenario);
    let mut sink = RunSink::create(&dir, format)?;
    run_standard(&config, &mut sink)?;
    let files = sink.finish(&config.scenario.clone(), &config)?;
    println!("wrote {} file(s) under {}", files.len() + 1, dir.display());
    Ok(())
}
