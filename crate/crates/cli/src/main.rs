//! Experiment-runner CLI for the qitsim library.
//!
//! Every subcommand builds a run specification (the same JSON document that
//! `--config` accepts, schema in `docs/runspec.schema.json`), executes it,
//! and writes deterministic result files plus a `.meta.json` sidecar into
//! the output directory. Exit code 0 means every requested check passed.

mod commands;
mod parse;
mod runspec;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use parse::parse_amplitudes;
use runspec::{
    CommandSpec, Direction, GateName, ModeSpec, OrderName, ProtocolName, RunSpec, SuiteName,
    RUNSPEC_VERSION, SCHEMA_JSON,
};

#[derive(Parser)]
#[command(
    name = "qitsim",
    about = "Hybrid qubit/qudit information-transfer experiments",
    version
)]
struct Cli {
    /// Output directory (falls back to $QITSIM_OUT, then ./qitsim-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for every stochastic step of the run.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overlap quality of interfering photon pairs, in [0, 1].
    #[arg(long, global = true)]
    q: Option<f64>,

    /// Detected events per second for counting statistics.
    #[arg(long, global = true)]
    rate: Option<f64>,

    /// Collection time per measurement setting, seconds.
    #[arg(long, global = true)]
    duration: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an information-transfer protocol on given input amplitudes.
    Protocol(ProtocolArgs),
    /// Run the optical pipeline for one direction of transfer.
    Optical(OpticalArgs),
    /// Tabulate two-photon coincidence and visibility over q values.
    HomScan(HomArgs),
    /// Reconstruct a four-level state from analyzer counts.
    Tomo(TomoArgs),
    /// Compile an n-qubit gate into merge → unitary → split and optionally
    /// check it against direct application.
    Synthesize(SynthesizeArgs),
    /// Reproduce the demonstration tables (fig4, fig5, hom, cx4).
    PaperSuite(SuiteArgs),
    /// Execute a run-specification JSON file; explicit flags override it.
    Run(RunArgs),
    /// Print the JSON schema of the run-specification format.
    Schema,
}

#[derive(Args)]
struct ProtocolArgs {
    /// One of: qit2to2, qit4to2, qit2to4, merge, split.
    name: String,
    /// Input amplitudes over the protocol register (comma-separated complex
    /// numbers such as `0.5,0.5,0.5i,-0.5`).
    #[arg(long)]
    state: String,
    /// feedforward or postselect.
    #[arg(long, default_value = "feedforward")]
    mode: String,
    /// Outcome labels kept in postselect mode.
    #[arg(long, value_delimiter = ',')]
    kept: Vec<usize>,
    /// Qudit dimension for merge.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args)]
struct OpticalArgs {
    /// 4to2 or 2to4.
    #[arg(long)]
    direction: String,
    /// Ququart amplitudes for 4to2.
    #[arg(long)]
    state: Option<String>,
    /// Control-pair amplitudes (ε, ζ) for 2to4.
    #[arg(long)]
    a: Option<String>,
    /// Target amplitudes (η, κ) for 2to4.
    #[arg(long)]
    b: Option<String>,
}

#[derive(Args)]
struct HomArgs {
    /// Comma-separated overlap qualities to scan.
    #[arg(long, value_delimiter = ',', default_value = "0.0,0.5,1.0")]
    q_values: Vec<f64>,
}

#[derive(Args)]
struct TomoArgs {
    /// Four-level state to prepare and reconstruct.
    #[arg(long)]
    state: String,
    /// Use exact probabilities instead of Poisson counts.
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct SynthesizeArgs {
    /// Number of qubits (2..=4).
    #[arg(long)]
    n: usize,
    /// identity, ccz, ccx, cnot, cz or random.
    #[arg(long)]
    gate: String,
    /// first-least (qubit 1 least significant) or first-most.
    #[arg(long, default_value = "first-least")]
    order: String,
    /// Compare the pipeline against direct matrix application.
    #[arg(long)]
    check: bool,
    /// Random inputs for the check.
    #[arg(long, default_value_t = 25)]
    check_inputs: usize,
}

#[derive(Args)]
struct SuiteArgs {
    /// fig4, fig5, hom or cx4.
    #[arg(long)]
    which: String,
}

#[derive(Args)]
struct RunArgs {
    /// Run-specification JSON file.
    #[arg(long)]
    config: PathBuf,
}

fn build_spec(cli: &Cli) -> Result<RunSpec> {
    let command = match &cli.command {
        Command::Protocol(a) => {
            let protocol = match a.name.as_str() {
                "qit2to2" | "qit_2to2" => ProtocolName::Qit2to2,
                "qit4to2" | "qit_4to2" => ProtocolName::Qit4to2,
                "qit2to4" | "qit_2to4" => ProtocolName::Qit2to4,
                "merge" => ProtocolName::Merge,
                "split" => ProtocolName::Split,
                other => bail!("unknown protocol {other}"),
            };
            let amps = parse_amplitudes(&a.state)?;
            let mode = match a.mode.as_str() {
                "feedforward" | "feed_forward" => ModeSpec::FeedForward,
                "postselect" | "post_select" => ModeSpec::PostSelect {
                    kept: a.kept.clone(),
                },
                other => bail!("unknown mode {other}"),
            };
            CommandSpec::Protocol {
                protocol,
                amps: amps.iter().map(|c| (c.re, c.im)).collect(),
                mode,
                d: a.d,
            }
        }
        Command::Optical(a) => {
            let direction = match a.direction.as_str() {
                "4to2" => Direction::FourToTwo,
                "2to4" => Direction::TwoToFour,
                other => bail!("unknown direction {other}"),
            };
            let pairs = |s: &Option<String>| -> Result<Option<Vec<(f64, f64)>>> {
                Ok(match s {
                    Some(text) => Some(
                        parse_amplitudes(text)?
                            .iter()
                            .map(|c| (c.re, c.im))
                            .collect(),
                    ),
                    None => None,
                })
            };
            let two = |v: Option<Vec<(f64, f64)>>, what: &str| -> Result<Option<[(f64, f64); 2]>> {
                match v {
                    None => Ok(None),
                    Some(v) if v.len() == 2 => Ok(Some([v[0], v[1]])),
                    Some(v) => bail!("{what} needs two amplitudes, got {}", v.len()),
                }
            };
            CommandSpec::Optical {
                direction,
                b_state: pairs(&a.state)?,
                a_coeffs: two(pairs(&a.a)?, "--a")?,
                b_coeffs: two(pairs(&a.b)?, "--b")?,
            }
        }
        Command::HomScan(a) => CommandSpec::HomScan {
            q_values: a.q_values.clone(),
        },
        Command::Tomo(a) => CommandSpec::Tomo {
            state: parse_amplitudes(&a.state)?
                .iter()
                .map(|c| (c.re, c.im))
                .collect(),
            exact: a.exact,
        },
        Command::Synthesize(a) => {
            let gate = match a.gate.as_str() {
                "identity" => GateName::Identity,
                "ccz" => GateName::Ccz,
                "ccx" | "toffoli" => GateName::Ccx,
                "cnot" => GateName::Cnot,
                "cz" => GateName::Cz,
                "random" => GateName::Random,
                other => bail!("unknown gate {other}"),
            };
            let order = match a.order.as_str() {
                "first-least" => OrderName::FirstLeast,
                "first-most" => OrderName::FirstMost,
                other => bail!("unknown order {other}"),
            };
            CommandSpec::Synthesize {
                n: a.n,
                gate,
                order,
                check: a.check,
                check_inputs: a.check_inputs,
            }
        }
        Command::PaperSuite(a) => {
            let which = match a.which.as_str() {
                "fig4" => SuiteName::Fig4,
                "fig5" => SuiteName::Fig5,
                "hom" => SuiteName::Hom,
                "cx4" => SuiteName::Cx4,
                other => bail!("unknown table {other}"),
            };
            CommandSpec::PaperSuite { which }
        }
        Command::Run(_) | Command::Schema => unreachable!("handled by caller"),
    };
    Ok(RunSpec {
        version: RUNSPEC_VERSION,
        command,
        q: cli.q.unwrap_or(1.0),
        seed: cli.seed.unwrap_or(0),
        rate: cli.rate.unwrap_or(0.22),
        duration: cli.duration.unwrap_or(600.0),
    })
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| {
        std::env::var_os("QITSIM_OUT")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("qitsim-out"))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| -> Result<bool> {
        match &cli.command {
            Command::Schema => {
                println!("{SCHEMA_JSON}");
                Ok(true)
            }
            Command::Run(args) => {
                let text = std::fs::read_to_string(&args.config)
                    .with_context(|| format!("reading {:?}", args.config))?;
                let mut spec = RunSpec::from_json(&text)?;
                // explicit flags override file values
                if let Some(q) = cli.q {
                    spec.q = q;
                }
                if let Some(seed) = cli.seed {
                    spec.seed = seed;
                }
                if let Some(rate) = cli.rate {
                    spec.rate = rate;
                }
                if let Some(duration) = cli.duration {
                    spec.duration = duration;
                }
                spec.validate()?;
                let outcome = commands::execute(&spec, &out_dir(&cli))?;
                for p in &outcome.written {
                    println!("wrote {}", p.display());
                }
                Ok(outcome.all_checks_passed)
            }
            _ => {
                let spec = build_spec(&cli)?;
                spec.validate()?;
                let outcome = commands::execute(&spec, &out_dir(&cli))?;
                for p in &outcome.written {
                    println!("wrote {}", p.display());
                }
                Ok(outcome.all_checks_passed)
            }
        }
    })();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
