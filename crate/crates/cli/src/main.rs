use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qudit_teleport::noise::ComparisonModel;
use qudit_teleport::SchemeParams;

mod commands;
mod format;
mod grid;
mod verify;

use commands::TeleportInput;
use grid::{parse_real_grid, parse_usize_grid};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "qudit-teleport",
    version,
    about = "Sweeps and checks for qudit-mediated CV teleportation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Deterministic,
    LinearOptics,
    QuartitInterferometer,
}

impl From<Model> for ComparisonModel {
    fn from(m: Model) -> Self {
        match m {
            Model::Deterministic => ComparisonModel::Deterministic,
            Model::LinearOptics => ComparisonModel::LinearOptics,
            Model::QuartitInterferometer => ComparisonModel::QuartitInterferometer,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fock-state gains for (d, N) pairs with a common d·N.
    Gains {
        /// Per-mode photon cutoffs.
        #[arg(long, default_value = "1,2,4,5,10,20")]
        d: String,
        /// Mode counts paired with --d; defaults to 20/d.
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fidelity and success probability for one teleported EPR arm.
    EprSweep {
        /// Two-mode squeezing V_s = (1+χ)/(1−χ).
        #[arg(long, default_value_t = 10.0)]
        vs: f64,
        #[arg(long, default_value = "1..5")]
        d: String,
        #[arg(long, default_value = "1..25")]
        n: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Detection-limited success of the qubit and qudit schemes.
    Compare {
        #[arg(long, default_value = "0..1@21")]
        eta: String,
        #[arg(long, default_value = "0..1@21")]
        xi: String,
        #[arg(long, value_enum, default_value = "quartit-interferometer")]
        model: Model,
        /// Modes per scheme for the deterministic and linear-optics models.
        #[arg(long, default_value_t = 11)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Teleport a Fock-basis state read from a file (`re,im` per line) or a coherent state.
    Teleport {
        /// Amplitude file; one `re,im` pair per line.
        input: Option<PathBuf>,
        /// Coherent amplitude `re[,im]` instead of a file.
        #[arg(long, conflicts_with = "input")]
        alpha: Option<String>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Photon-counting POVM weights for an imperfect detector.
    Povm {
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 0.0)]
        nu: f64,
        /// Highest Fock level.
        #[arg(long, default_value_t = 10)]
        cutoff: usize,
        /// Resolve up to this many clicks and lump the rest.
        #[arg(long)]
        resolve: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the self-check suites and report the largest deviations.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0.0, hide = true)]
        perturb_gain: f64,
    },
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gains { d, n, out } => {
            let d = parse_usize_grid(&d)?;
            let n = n.as_deref().map(parse_usize_grid).transpose()?;
            commands::gains(&d, n.as_deref())?.write(out.as_deref())?;
        }
        Command::EprSweep { vs, d, n, out } => {
            commands::epr_sweep(vs, &parse_usize_grid(&d)?, &parse_usize_grid(&n)?)?
                .write(out.as_deref())?;
        }
        Command::Compare {
            eta,
            xi,
            model,
            n,
            out,
        } => {
            commands::compare(
                &parse_real_grid(&eta)?,
                &parse_real_grid(&xi)?,
                model.into(),
                n,
            )?
            .write(out.as_deref())?;
        }
        Command::Teleport {
            input,
            alpha,
            n,
            d,
            out,
        } => {
            let source = match (input, alpha) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    TeleportInput::Amplitudes(commands::parse_amplitudes(&text)?)
                }
                (None, Some(a)) => TeleportInput::Coherent(commands::parse_complex(&a)?),
                _ => bail!("give either an amplitude file or --alpha"),
            };
            commands::teleport(source, SchemeParams::new(n, d)?)?.write(out.as_deref())?;
        }
        Command::Povm {
            eta,
            nu,
            cutoff,
            resolve,
            out,
        } => {
            commands::povm(eta, nu, cutoff, resolve)?.write(out.as_deref())?;
        }
        Command::Verify {
            seed,
            trials,
            perturb_gain,
        } => {
            let reports = verify::run(&verify::VerifyConfig {
                seed,
                trials,
                gain_perturbation: perturb_gain,
            });
            for r in &reports {
                println!("{r}");
            }
            if reports.iter().any(|r| !r.passed()) {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
