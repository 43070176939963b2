use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use graphnls::config::read_config;
use graphnls::discretization::{write_profile_csv, DiscretizationError};
use graphnls::experiment::{
    bracket_mass_threshold, preset, run_stability, scan, scan_csv, solve, BracketOutcome, ExperimentError,
    GridPolicy, ParamGrid, RunManifest, ScanParam, Target, PRESET_NAMES,
};
use graphnls::graph::ProblemSpec;
use graphnls::oracle::{thresholds, thresholds_csv};
use graphnls::solver::{InitialGuess, SolverOptions, Status};
use graphnls::stability::BranchSelector;

/// Ground states of the nonlinear Schrödinger equation on metric graphs.
#[derive(Parser)]
#[command(name = "graphnls", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one ground state at fixed mass or frequency.
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: TargetArgs,
        /// Starting profile family.
        #[arg(long, value_enum, default_value_t = Guess::Soliton)]
        initial_guess: Guess,
        /// Restrict iterates to edge-permutation symmetric functions (star graphs).
        #[arg(long)]
        symmetrize: bool,
    },
    /// Solve along a grid of one parameter and tabulate the results.
    Scan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: TargetArgs,
        /// omega, mu, alpha, beta, tau, v or N.
        #[arg(long)]
        param: String,
        /// Values as lo:hi:count.
        #[arg(long)]
        grid: String,
    },
    /// Bracket the mass at which ground states appear or disappear.
    Bracket {
        #[command(flatten)]
        common: Common,
        /// Mass range and bisection steps as lo:hi:steps.
        #[arg(long)]
        grid: String,
    },
    /// Print the table of threshold constants.
    Thresholds {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a branch from its action curve d(omega).
    Stability {
        #[command(flatten)]
        common: Common,
        /// Frequencies as lo:hi:count.
        #[arg(long)]
        grid: String,
        /// ground, even, odd, asymmetric or n-tail.
        #[arg(long, default_value = "ground")]
        branch: String,
    },
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct Common {
    /// Problem description file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in problem (see `graphnls presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Output directory; without it results go to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TargetArgs {
    #[arg(long, conflicts_with = "omega")]
    mass: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
}

impl TargetArgs {
    fn target(&self) -> Option<Target> {
        self.mass.map(Target::Mass).or(self.omega.map(Target::Omega))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Guess {
    Soliton,
    RandomBump,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        let code = match e {
            ExperimentError::Usage(_)
            | ExperimentError::Config(_)
            | ExperimentError::Discretization(DiscretizationError::InvalidGrid(_))
            | ExperimentError::Discretization(DiscretizationError::InvalidProblem(_)) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Problem, default grid and default target from `--config` or `--preset`.
struct Loaded {
    problem: ProblemSpec,
    policy: GridPolicy,
    target: Option<Target>,
}

fn load(common: &Common) -> Result<Loaded, Failure> {
    match (&common.config, &common.preset) {
        (Some(path), None) => {
            let config = read_config(path).map_err(ExperimentError::from)?;
            let policy = match config.grid {
                Some(g) => GridPolicy::Fixed(g),
                None => GridPolicy::Adapted {
                    h_ref: GridPolicy::DEFAULT_H_REF,
                },
            };
            Ok(Loaded {
                problem: config.problem,
                policy,
                target: None,
            })
        }
        (None, Some(name)) => {
            let p = preset(name).ok_or_else(|| {
                Failure::usage(format!("unknown preset `{name}`; known: {}", PRESET_NAMES.join(", ")))
            })?;
            Ok(Loaded {
                problem: p.problem,
                policy: p.grid,
                target: Some(p.target),
            })
        }
        _ => Err(Failure::usage("give exactly one of --config and --preset")),
    }
}

fn manifest(common: &Common, subcommand: &str) -> RunManifest {
    RunManifest {
        tool: "graphnls".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: subcommand.into(),
        config: common.config.as_ref().map(|p| p.display().to_string()),
        preset: common.preset.clone(),
        parameter: None,
        grid: None,
        target: None,
        discretization: String::new(),
        output_dir: common.out.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
        seed: common.seed,
    }
}

/// Writes every file or, without an output directory, prints the first one.
fn emit(out: Option<&Path>, files: &[(&str, String)]) -> Result<(), Failure> {
    let Some(dir) = out else {
        if let Some((_, text)) = files.first() {
            print!("{text}");
        }
        return Ok(());
    };
    let io = |e: std::io::Error| Failure {
        code: 1,
        message: format!("cannot write to {}: {e}", dir.display()),
    };
    fs::create_dir_all(dir).map_err(io)?;
    for (name, text) in files {
        fs::write(dir.join(name), text).map_err(io)?;
    }
    Ok(())
}

fn options(seed: u64) -> SolverOptions {
    SolverOptions {
        seed,
        ..SolverOptions::default()
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Solve {
            common,
            target,
            initial_guess,
            symmetrize,
        } => {
            let loaded = load(&common)?;
            let target = target
                .target()
                .or(loaded.target)
                .ok_or_else(|| Failure::usage("solve needs --mass or --omega"))?;
            let opts = SolverOptions {
                initial_guess: match initial_guess {
                    Guess::Soliton => InitialGuess::Soliton,
                    Guess::RandomBump => InitialGuess::RandomBump,
                },
                symmetrize,
                ..options(common.seed)
            };
            let (disc, report) = solve(&loaded.problem, &loaded.policy, target, &opts)?;
            let mut m = manifest(&common, "solve");
            m.target = Some(target.to_string());
            m.discretization = format!(
                "h={} L={}",
                disc.grid().params().h(),
                disc.grid().params().halfline_length()
            );
            emit(
                common.out.as_deref(),
                &[
                    ("report.txt", report.to_key_value()),
                    ("profile.csv", write_profile_csv(&disc, &report.profile)),
                    ("manifest.json", m.to_json()),
                ],
            )?;
            Ok(match report.status {
                Status::Converged => 0,
                Status::NotConverged => 1,
                Status::UnboundedSuspected => 3,
            })
        }
        Command::Scan {
            common,
            target,
            param,
            grid,
        } => {
            let loaded = load(&common)?;
            let param: ScanParam = param.parse()?;
            let values: ParamGrid = grid.parse()?;
            let base = target.target().or(loaded.target);
            let rows = scan(&loaded.problem, &loaded.policy, param, &values, base, &options(common.seed))?;
            let mut m = manifest(&common, "scan");
            m.parameter = Some(param.to_string());
            m.grid = Some(values.to_string());
            m.target = base.filter(|_| !matches!(param, ScanParam::Omega | ScanParam::Mass)).map(|t| t.to_string());
            m.discretization = loaded.policy.describe();
            emit(
                common.out.as_deref(),
                &[("scan.csv", scan_csv(param, &rows)), ("manifest.json", m.to_json())],
            )?;
            Ok(0)
        }
        Command::Bracket { common, grid } => {
            let loaded = load(&common)?;
            let range: ParamGrid = grid.parse()?;
            let outcome = bracket_mass_threshold(
                &loaded.problem,
                &loaded.policy,
                (range.lo, range.hi),
                range.count,
                &options(common.seed),
            )?;
            let mut m = manifest(&common, "bracket");
            m.grid = Some(range.to_string());
            m.discretization = loaded.policy.describe();
            emit(
                common.out.as_deref(),
                &[("bracket.txt", outcome.to_key_value()), ("manifest.json", m.to_json())],
            )?;
            match outcome {
                BracketOutcome::Threshold { .. } => Ok(0),
                BracketOutcome::NoThreshold { .. } => {
                    eprintln!("no threshold in range");
                    Ok(1)
                }
            }
        }
        Command::Thresholds { out } => {
            let m = RunManifest {
                tool: "graphnls".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                subcommand: "thresholds".into(),
                config: None,
                preset: None,
                parameter: None,
                grid: None,
                target: None,
                discretization: String::new(),
                output_dir: out.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
                seed: 0,
            };
            emit(
                out.as_deref(),
                &[("thresholds.csv", thresholds_csv(&thresholds())), ("manifest.json", m.to_json())],
            )?;
            Ok(0)
        }
        Command::Stability { common, grid, branch } => {
            let loaded = load(&common)?;
            let values: ParamGrid = grid.parse()?;
            let selector: BranchSelector = branch.parse().map_err(|e| Failure::usage(format!("{e}")))?;
            let run = run_stability(&loaded.problem, &loaded.policy, selector, &values, &options(common.seed))?;
            let mut m = manifest(&common, "stability");
            m.parameter = Some("omega".into());
            m.grid = Some(values.to_string());
            m.discretization = loaded.policy.describe();
            emit(
                common.out.as_deref(),
                &[
                    ("stability.txt", run.to_key_value()),
                    ("curve.csv", run.csv()),
                    ("manifest.json", m.to_json()),
                ],
            )?;
            Ok(0)
        }
        Command::Presets => {
            for name in PRESET_NAMES {
                let p = preset(name).expect("listed preset exists");
                println!("{name:22} {} [{}]", p.summary, p.target);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("graphnls: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
