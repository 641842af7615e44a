use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use mtf_core::csvio::{read_profile, write_profile};
use mtf_core::profile::{mass, RadialProfile};
use mtf_core::verify::{emit_report, run_scenario, ScenarioConfig, ScenarioReport, SCENARIOS};
use mtf_core::{
    default_density_grid, energy_mtf, energy_tf, make_grid, minimizer_density,
    minimizer_momentum, solve_tf_ode, transform_s, transform_t, AtomConfig, EnergyBreakdown,
    GridScheme, RepulsionPath,
};
use serde_json::json;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

/// Momentum-space and position-space Thomas-Fermi functionals on radial
/// grids, the level-set transforms between them, minimizer solvers, and
/// named verification scenarios.
#[derive(Parser)]
#[command(name = "mtf", version)]
struct Cli {
    /// Spin-state count q (q = 6 pi^2 is the gamma = 1 gauge)
    #[arg(long, global = true, default_value_t = 2.0)]
    q: f64,

    /// Nuclear charge Z
    #[arg(long = "Z", global = true, default_value_t = 1.0)]
    z: f64,

    /// Electron number N
    #[arg(long = "N", global = true, default_value_t = 1.0)]
    n_electrons: f64,

    /// Base node count of generated grids
    #[arg(long, global = true, default_value_t = 2048)]
    grid_n: usize,

    /// Smallest node of generated grids (scenario default 1e-2)
    #[arg(long, global = true)]
    r_min: Option<f64>,

    /// Largest node of generated grids (scenario default 12; solve
    /// defaults to covering the minimizer support)
    #[arg(long, global = true)]
    r_max: Option<f64>,

    /// Node placement of generated grids
    #[arg(long, global = true, value_enum, default_value_t = SchemeArg::Log)]
    scheme: SchemeArg,

    /// Solver tolerance
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    /// Seed for randomized corpora
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Log,
    Linear,
}

impl From<SchemeArg> for GridScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Log => GridScheme::Log,
            SchemeArg::Linear => GridScheme::Linear,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    /// Momentum to position
    S,
    /// Position to momentum
    T,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the position-space functional on a profile CSV
    EnergyTf {
        /// Profile CSV (position space)
        input: PathBuf,
    },
    /// Evaluate the momentum-space functional on a profile CSV
    EnergyMtf {
        /// Profile CSV (momentum space)
        input: PathBuf,
        /// Repulsion evaluation route
        #[arg(long, default_value = "direct")]
        repulsion: String,
    },
    /// Apply a level-set transform to a profile CSV
    Transform {
        direction: Direction,
        input: PathBuf,
        /// Output CSV path
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Solve the Thomas-Fermi minimizer for N <= Z and emit both densities
    Solve {
        /// Where to write the position density CSV
        #[arg(long, default_value = "rho_m.csv")]
        out_rho: PathBuf,
        /// Where to write the momentum density CSV
        #[arg(long, default_value = "tau_m.csv")]
        out_tau: PathBuf,
    },
    /// Run one named verification scenario, or `all`
    Verify {
        /// isometry | duality | roundtrip | rearrangement | convexity |
        /// infimum-equality | minimizer-map | repulsion-paths | saturation | all
        scenario: String,
    },
}

fn atom_config(cli: &Cli) -> Result<AtomConfig> {
    Ok(AtomConfig::new(cli.z, cli.n_electrons, cli.q)?)
}

fn load_profile(path: &Path, cfg: &AtomConfig) -> Result<RadialProfile> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let (profile, gamma) =
        read_profile(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))?;
    if (gamma - cfg.gamma()).abs() > 1e-9 * cfg.gamma() {
        eprintln!(
            "warning: {} was written under gamma = {gamma}, evaluating under gamma = {}",
            path.display(),
            cfg.gamma()
        );
    }
    Ok(profile)
}

fn save_profile(path: &Path, profile: &RadialProfile, gamma: f64) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    write_profile(&mut out, profile, gamma)?;
    out.flush()?;
    Ok(())
}

fn print_energy(cli: &Cli, e: &EnergyBreakdown, extra: Option<(&str, &str)>) {
    match cli.format {
        FormatArg::Json => {
            let mut value = serde_json::to_value(e).expect("serializable");
            if let Some((k, v)) = extra {
                value[k] = json!(v);
            }
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
        }
        FormatArg::Text => {
            println!("{e}");
            if let Some((k, v)) = extra {
                println!("{k}: {v}");
            }
        }
    }
}

fn scenario_config(cli: &Cli) -> Result<ScenarioConfig> {
    Ok(ScenarioConfig {
        cfg: atom_config(cli)?,
        n: cli.grid_n,
        r_min: cli.r_min.unwrap_or(1e-2),
        r_max: cli.r_max.unwrap_or(12.0),
        scheme: cli.scheme.into(),
        seed: cli.seed,
    })
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = atom_config(cli)?;
    match &cli.command {
        Command::EnergyTf { input } => {
            let profile = load_profile(input, &cfg)?;
            let e = energy_tf(&profile, &cfg)?;
            print_energy(cli, &e, None);
            Ok(true)
        }
        Command::EnergyMtf { input, repulsion } => {
            let path = RepulsionPath::from_str(repulsion)?;
            let profile = load_profile(input, &cfg)?;
            let e = mtf_core::momentum::energy_mtf_with(&profile, &cfg, path)?;
            print_energy(cli, &e, Some(("repulsion_path", repulsion)));
            Ok(true)
        }
        Command::Transform {
            direction,
            input,
            output,
        } => {
            let profile = load_profile(input, &cfg)?;
            let image = match direction {
                Direction::S => transform_s(&profile, &cfg)?,
                Direction::T => transform_t(&profile, &cfg)?,
            };
            save_profile(output, &image, cfg.gamma())?;
            let summary = json!({
                "input_mass": mass(&profile)?,
                "output_mass": mass(&image)?,
                "output_nodes": image.grid().len(),
                "output": output.display().to_string(),
            });
            match cli.format {
                FormatArg::Json => println!("{}", serde_json::to_string_pretty(&summary).unwrap()),
                FormatArg::Text => println!(
                    "wrote {} ({} nodes); mass {} -> {}",
                    output.display(),
                    image.grid().len(),
                    summary["input_mass"],
                    summary["output_mass"]
                ),
            }
            Ok(true)
        }
        Command::Solve { out_rho, out_tau } => {
            let sol = solve_tf_ode(&cfg, cli.tol)?;
            let grid = match cli.r_max {
                // an explicit extent must still cover the ionic cutoff;
                // minimizer_density reports the mismatch otherwise
                Some(r_max) => {
                    let b = cfg.length_scale();
                    make_grid(GridScheme::Log, cli.grid_n.max(64), b * 1e-8, r_max)?
                }
                None => default_density_grid(&sol, &cfg, cli.grid_n.max(64))?,
            };
            let rho = minimizer_density(&sol, &cfg, &grid)?;
            let tau = minimizer_momentum(&sol, &cfg, &grid)?;
            save_profile(out_rho, &rho, cfg.gamma())?;
            save_profile(out_tau, &tau, cfg.gamma())?;
            let e_rho = energy_tf(&rho, &cfg)?;
            let e_tau = energy_mtf(&tau, &cfg)?;
            let summary = json!({
                "slope0": sol.slope0(),
                "x0": if sol.is_neutral() { None } else { Some(sol.x0()) },
                "b": cfg.length_scale(),
                "mass": mass(&rho)?,
                "energy_tf": e_rho,
                "energy_mtf": e_tau,
                "rho_csv": out_rho.display().to_string(),
                "tau_csv": out_tau.display().to_string(),
            });
            println!("{}", serde_json::to_string_pretty(&summary).unwrap());
            Ok(true)
        }
        Command::Verify { scenario } => {
            let sc = scenario_config(cli)?;
            let names: Vec<&str> = if scenario == "all" {
                SCENARIOS.to_vec()
            } else {
                vec![scenario.as_str()]
            };
            let mut reports: Vec<ScenarioReport> = Vec::with_capacity(names.len());
            for name in names {
                reports.push(run_scenario(name, &sc)?);
            }
            let all_passed = reports.iter().all(|r| r.passed);
            match cli.format {
                FormatArg::Json => {
                    if reports.len() == 1 {
                        println!("{}", emit_report(&reports[0], mtf_core::ReportFormat::Json));
                    } else {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&reports).expect("serializable")
                        );
                    }
                }
                FormatArg::Text => {
                    for r in &reports {
                        print!("{}", emit_report(r, mtf_core::ReportFormat::Text));
                    }
                    println!(
                        "verify: {} of {} scenarios passed",
                        reports.iter().filter(|r| r.passed).count(),
                        reports.len()
                    );
                }
            }
            Ok(all_passed)
        }
    }
}

/// Exit codes: 0 everything passed, 1 a verification failed, 2 the run
/// itself could not be carried out.
fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
