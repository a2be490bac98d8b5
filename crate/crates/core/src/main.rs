use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rera::cli::{self, BenchConfig, CliError, RunConfig};
use rera::learner::Limits;
use rera::rera::random::RandomSpec;
use rera::teacher::{protocol, SimulatedTeacher};

/// Active learning of reset-free event-recording automata.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = Limits::default().max_queries)]
    max_queries: u64,
    #[arg(long, default_value_t = Limits::default().max_iterations)]
    max_iterations: usize,
    #[arg(long, default_value_t = Limits::default().max_strategies)]
    max_strategies: usize,
}

impl LimitArgs {
    fn limits(&self) -> Limits {
        Limits {
            max_queries: self.max_queries,
            max_iterations: self.max_iterations,
            max_strategies: self.max_strategies,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Learn a target automaton through a simulated teacher.
    Learn {
        #[arg(long)]
        target: PathBuf,
        #[arg(short = 'K', long = "K")]
        k: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        output_dir: PathBuf,
        /// Write the TDG and TOG of every iteration as Graphviz files.
        #[arg(long)]
        emit_dot: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Print accept or reject for a word such as "1.5:a 0:b 1/3:a".
    Member { target: PathBuf, word: String },
    /// Decide language equivalence of two automata.
    Equiv { first: PathBuf, second: PathBuf },
    /// Print an automaton as Graphviz.
    ExportDot { file: PathBuf },
    /// Learn random targets and print a table of query counts.
    Bench {
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        locations: usize,
        #[arg(long, default_value_t = 2)]
        actions: usize,
        #[arg(short = 'K', long = "K", default_value_t = 3)]
        k: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 20_000)]
        max_queries: u64,
        #[arg(long, default_value_t = 40)]
        max_iterations: usize,
        #[arg(long, default_value_t = Limits::default().max_strategies)]
        max_strategies: usize,
    },
    /// Answer membership and equivalence requests on stdin.
    Serve { target: PathBuf },
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Learn {
            target,
            k,
            seed,
            output_dir,
            emit_dot,
            limits,
        } => {
            let config = RunConfig {
                target_file: target,
                k,
                seed,
                limits: limits.limits(),
                output_dir,
                emit_dot,
            };
            let success = cli::cmd_learn(&config)?;
            println!("{}", if success { "learned" } else { "limits exhausted" });
            Ok(ExitCode::from(if success { 0 } else { 2 }))
        }
        Command::Member { target, word } => {
            println!("{}", cli::verdict(cli::cmd_member(&target, &word)?));
            Ok(ExitCode::SUCCESS)
        }
        Command::Equiv { first, second } => {
            match cli::cmd_equiv(&first, &second)? {
                None => println!("equivalent"),
                Some(ce) => println!("counterexample {ce}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportDot { file } => {
            print!("{}", cli::cmd_export_dot(&file)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            n,
            locations,
            actions,
            k,
            seed,
            max_queries,
            max_iterations,
            max_strategies,
        } => {
            let config = BenchConfig {
                n,
                spec: RandomSpec {
                    locations,
                    actions,
                    max_constant: k,
                },
                seed,
                limits: Limits {
                    max_queries,
                    max_iterations,
                    max_strategies,
                },
            };
            print!("{}", cli::bench_table(&config, &cli::bench(&config)));
            Ok(ExitCode::SUCCESS)
        }
        Command::Serve { target } => {
            let rera = cli::load(&target)?;
            let teacher = SimulatedTeacher::new(rera);
            let base = std::env::current_dir().map_err(|source| CliError::Io {
                path: PathBuf::from("."),
                source,
            })?;
            protocol::serve(&teacher, io::stdin().lock(), io::stdout().lock(), &base).map_err(|source| {
                CliError::Io {
                    path: PathBuf::from("<stdio>"),
                    source,
                }
            })?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
