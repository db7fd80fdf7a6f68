use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use flac::principal::Axis;
use flac_cli::config::Config;
use flac_cli::suite::Kind;
use flac_cli::{cmd_check, cmd_corpus, cmd_fuzz, cmd_observe, cmd_run, cmd_suite, CliError, Overrides};

#[derive(Parser)]
#[command(
    name = "flac",
    version,
    about = "Type checker, interpreter and security harness for the flow-limited authorization calculus"
)]
struct Cli {
    /// Configuration file (default: ./flac.toml when present).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Proj {
    Conf,
    Integ,
}

impl From<Proj> for Axis {
    fn from(p: Proj) -> Axis {
        match p {
            Proj::Conf => Axis::Conf,
            Proj::Integ => Axis::Integ,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Type check a program and print its type.
    Check {
        file: PathBuf,
        /// Program counter label (overrides the `pc:` header).
        #[arg(long)]
        pc: Option<String>,
        /// Delegation context, e.g. "[Alice |> Bob]" (overrides `context:`).
        #[arg(long)]
        context: Option<String>,
        /// Typing context, e.g. "[x : Alice says unit]" (overrides `gamma:`).
        #[arg(long)]
        gamma: Option<String>,
        /// pc at which `where` annotations are checked (default top<-).
        #[arg(long)]
        pcmost: Option<String>,
        /// Accept brackets and holes, checked for this principal.
        #[arg(long)]
        harness: Option<String>,
        /// Axis used with --harness.
        #[arg(long, value_enum, default_value = "conf")]
        axis: Proj,
    },
    /// Evaluate a program.
    Run {
        file: PathBuf,
        /// Print every step as `#k [RULE] term`.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        fuel: Option<usize>,
    },
    /// Print the trace of a program as seen by an observer.
    Observe {
        file: PathBuf,
        #[arg(long = "as")]
        observer: String,
        #[arg(long, value_enum, default_value = "conf")]
        proj: Proj,
    },
    /// Run a noninterference suite.
    Ni { suite: PathBuf },
    /// Run a robust-declassification suite.
    Rd { suite: PathBuf },
    /// Check preservation, progress and determinism on generated terms.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Seed (default: the configured seed).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 5)]
        depth: usize,
    },
    /// Check the golden corpus in a directory holding `manifest.toml`.
    Corpus { dir: PathBuf },
}

fn dispatch(cli: Cli, out: &mut impl Write) -> Result<bool, CliError> {
    let config = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Check { file, pc, context, gamma, pcmost, harness, axis } => {
            let o = Overrides { pc, context, gamma, pcmost, harness: harness.map(|h| (h, axis.into())) };
            cmd_check(&file, &o, &config, out)
        }
        Command::Run { file, trace, fuel } => cmd_run(&file, trace, fuel, &config, out),
        Command::Observe { file, observer, proj } => cmd_observe(&file, &observer, proj.into(), &config, out),
        Command::Ni { suite } => cmd_suite(&suite, Kind::Ni, &config, out),
        Command::Rd { suite } => cmd_suite(&suite, Kind::Rd, &config, out),
        Command::Fuzz { count, seed, depth } => cmd_fuzz(count, seed.unwrap_or(config.seed), depth, &config, out),
        Command::Corpus { dir } => cmd_corpus(&dir, &config, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    match dispatch(cli, &mut out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
