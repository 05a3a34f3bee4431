use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use mmt::dot::{gmmt_to_dot, mmt_to_dot};
use mmt::equiv::{symbolic_equiv, EquivResult};
use mmt::gmmt::{gmmt_to_mmt, validate_gmmt};
use mmt::io::{model_to_json, parse_model, Model};
use mmt::learner::{learn, Hypothesis, LearnStats, LearnerConfig};
use mmt::random::{random_mmt, RandomSpec};
use mmt::timed::{run_timed_input, TimedWord};
use mmt::zones::{build_zone_mmt, is_complete};
use mmt::{LearnError, Mmt};

const EXIT_INEQUIVALENT: u8 = 1;
const EXIT_LIMIT: u8 = 2;
const EXIT_INVALID: u8 = 3;

/// Learn, check and simulate Mealy machines with timers.
///
/// Model arguments are JSON files or built-in names (two-timer, one-timer,
/// two-timer-minimal, shared-timer, renaming, fddi, echo). Generalized models
/// are converted to MMTs where an MMT is required.
#[derive(Parser, Debug)]
#[command(name = "mmt", version)]
struct Cli {
    /// Print progress to standard error.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Learn a model through symbolic queries to a teacher simulating it.
    Learn {
        model: String,
        #[command(flatten)]
        out: OutputArgs,
        /// Write query statistics here instead of standard output.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Maximum number of equivalence queries.
        #[arg(long, default_value_t = 50)]
        max_rounds: usize,
        /// Maximum depth of the observation tree frontier.
        #[arg(long)]
        max_depth: Option<usize>,
        /// Report zero elapsed milliseconds so that statistics are reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Decide symbolic equivalence; exit 1 with a counterexample if they differ.
    Check { first: String, second: String },
    /// Run a timed input word and print the timed trace.
    Simulate {
        model: String,
        /// Alternating delays and inputs, e.g. `0.5 i 1 i 3.5`.
        #[arg(long, allow_hyphen_values = true)]
        timed_word: String,
    },
    /// Print a model as JSON or DOT without converting it.
    Show {
        model: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build the zone MMT of a model.
    Zone {
        model: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Convert a generalized MMT to an MMT.
    Convert {
        model: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Generate a random complete MMT.
    Random {
        #[arg(long, default_value_t = 4)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        timers: usize,
        #[arg(long, default_value_t = 2)]
        inputs: usize,
        #[arg(long, default_value_t = 2)]
        outputs: usize,
        #[arg(long, default_value_t = 3)]
        max_constant: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Emit Graphviz DOT instead of JSON.
    #[arg(long)]
    dot: bool,
}

/// An error carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn invalid(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_INVALID,
            error: error.into(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn load(source: &str) -> CliResult<Model> {
    let path = Path::new(source);
    if path.exists() {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(Failure::invalid)?;
        return parse_model(&text)
            .with_context(|| format!("parsing {}", path.display()))
            .map_err(Failure::invalid);
    }
    mmt::models::builtin(source)
        .ok_or_else(|| Failure::invalid(anyhow!("no such file or built-in model `{source}`")))
}

fn to_mmt(model: Model, source: &str) -> CliResult<Mmt> {
    let m = match model {
        Model::Mmt(m) => m,
        Model::Gmmt(g) => gmmt_to_mmt(&g)
            .with_context(|| format!("converting {source}"))
            .map_err(Failure::invalid)?,
    };
    let report = m.validate();
    if !report.is_valid() {
        let lines: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(Failure::invalid(anyhow!("{source}: {}", lines.join("; "))));
    }
    Ok(m)
}

fn load_mmt(source: &str) -> CliResult<Mmt> {
    to_mmt(load(source)?, source)
}

fn load_complete(source: &str) -> CliResult<Mmt> {
    let m = load_mmt(source)?;
    if !is_complete(&m) {
        return Err(Failure::invalid(anyhow!("{source}: machine is not complete")));
    }
    Ok(m)
}

fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(Failure::invalid),
        None => {
            let mut stdout = io::stdout().lock();
            let newline = if text.ends_with('\n') { "" } else { "\n" };
            match write!(stdout, "{text}{newline}").and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure::invalid(e)),
                _ => Ok(()),
            }
        }
    }
}

fn emit_model(model: &Model, out: &OutputArgs) -> CliResult<()> {
    let text = match (model, out.dot) {
        (Model::Mmt(m), true) => mmt_to_dot(m),
        (Model::Gmmt(g), true) => gmmt_to_dot(g),
        (_, false) => model_to_json(model),
    };
    emit(&text, out.output.as_deref())
}

fn stats_json(stats: &LearnStats) -> String {
    serde_json::to_string_pretty(stats).expect("serializable")
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Learn {
            model,
            out,
            stats,
            max_rounds,
            max_depth,
            no_timing,
        } => {
            let target = load_complete(&model)?;
            let config = LearnerConfig {
                max_rounds,
                max_depth,
                verbose: cli.verbose,
            };
            let res = match learn(&target, &config) {
                Ok(res) => res,
                Err(e @ LearnError::Model(_)) => return Err(Failure::invalid(e)),
                Err(e) => {
                    return Err(Failure {
                        code: EXIT_LIMIT,
                        error: anyhow::Error::from(e).context("learning failed"),
                    })
                }
            };
            let mut s = res.stats;
            if no_timing {
                s.ms = 0;
            }
            if cli.verbose {
                eprintln!(
                    "learned {} states ({} tree nodes)",
                    s.hypothesis_states, res.tree_size
                );
            }
            let hypothesis = match res.hypothesis {
                Hypothesis::Mmt(m) => Model::Mmt(m),
                Hypothesis::Gmmt(g) => Model::Gmmt(g),
            };
            if out.output.is_some() {
                emit_model(&hypothesis, &out)?;
            }
            emit(&stats_json(&s), stats.as_deref())?;
            Ok(0)
        }
        Command::Check { first, second } => {
            let a = load_complete(&first)?;
            let b = load_complete(&second)?;
            match symbolic_equiv(&a, &b).map_err(Failure::invalid)? {
                EquivResult::Equivalent => {
                    println!("equivalent");
                    Ok(0)
                }
                EquivResult::Counterexample(cex) => {
                    println!("{}", cex.word);
                    eprintln!("counterexample: {cex}");
                    Ok(EXIT_INEQUIVALENT)
                }
            }
        }
        Command::Simulate { model, timed_word } => {
            let m = load_complete(&model)?;
            let w = TimedWord::parse(&timed_word)
                .and_then(|w| w.resolve_inputs(&m))
                .map_err(Failure::invalid)?;
            let r = run_timed_input(&m, &w).map_err(Failure::invalid)?;
            println!("{}", r.display(&m));
            if cli.verbose {
                eprintln!("final state {}", m.state_name(r.end().state));
            }
            Ok(0)
        }
        Command::Show { model, out } => {
            emit_model(&load(&model)?, &out)?;
            Ok(0)
        }
        Command::Zone { model, out } => {
            let m = load_mmt(&model)?;
            let z = build_zone_mmt(&m);
            if cli.verbose {
                eprintln!(
                    "{} states -> {} zone states",
                    m.num_states(),
                    z.mmt.num_states()
                );
            }
            emit_model(&Model::Mmt(z.mmt), &out)?;
            Ok(0)
        }
        Command::Convert { model, out } => {
            let g = match load(&model)? {
                Model::Gmmt(g) => g,
                Model::Mmt(m) => {
                    emit_model(&Model::Mmt(m), &out)?;
                    return Ok(0);
                }
            };
            let violations = validate_gmmt(&g);
            if !violations.is_empty() {
                let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                return Err(Failure::invalid(anyhow!("{model}: {}", lines.join("; "))));
            }
            let m = gmmt_to_mmt(&g).map_err(Failure::invalid)?;
            if cli.verbose {
                eprintln!("{} locations -> {} states", g.num_states(), m.num_states());
            }
            emit_model(&Model::Mmt(m), &out)?;
            Ok(0)
        }
        Command::Random {
            states,
            timers,
            inputs,
            outputs,
            max_constant,
            seed,
            out,
        } => {
            if states == 0 || inputs == 0 || outputs == 0 || max_constant == 0 {
                return Err(Failure::invalid(anyhow!(
                    "states, inputs, outputs and max-constant must be positive"
                )));
            }
            let m = random_mmt(&RandomSpec {
                states,
                timers,
                inputs,
                outputs,
                max_constant,
                seed,
            });
            emit_model(&Model::Mmt(m), &out)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
