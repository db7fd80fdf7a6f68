//! Command-line front end: type checking, running and observing programs,
//! security check suites, fuzzing and the golden corpus.
//!
//! Every command writes its report to a caller-supplied writer and returns
//! whether the check passed, so the binary only maps results to exit codes:
//! 0 for pass, 1 for a failed check, 2 for usage, parse or input errors.

pub mod config;
pub mod corpus;
pub mod suite;

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use flac::delegation::Delegations;
use flac::eval::{run, Outcome, Run};
use flac::generate::Generator;
use flac::principal::{Axis, Principal};
use flac::security::Observer;
use flac::syntax::{parse_principal, parse_program, Context, ParseError, Program};
use flac::typecheck::{typecheck, typecheck_with, CheckOptions, Harness};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use config::Config;
use suite::{Kind, Suite};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("configuration: {0}")]
    Config(String),
    #[error("suite: {0}")]
    Suite(String),
    #[error("{0}")]
    Usage(String),
    #[error("output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub(crate) fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Header overrides given on the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub pc: Option<String>,
    pub context: Option<String>,
    pub gamma: Option<String>,
    pub pcmost: Option<String>,
    /// Enables brackets and holes, checked for this principal and axis.
    pub harness: Option<(String, Axis)>,
}

/// A loaded program with its effective pc and checker options.
pub struct Loaded {
    pub program: Program,
    pub pc: Principal,
    pub opts: CheckOptions,
}

fn principal(what: &str, s: &str) -> Result<Principal, CliError> {
    parse_principal(s).map_err(|e| CliError::Usage(format!("{what}: {e}")))
}

/// Read a program and apply command-line overrides.
pub fn load(path: &Path, o: &Overrides, config: &Config) -> Result<Loaded, CliError> {
    let src = read(path)?;
    let mut program = parse_program(&src, o.harness.is_some())?;
    if let Some(c) = &o.context {
        program.delegations = parse_program(&format!("context: {c}\n()"), false)?.delegations;
    }
    if let Some(g) = &o.gamma {
        let gamma: Context = parse_program(&format!("gamma: {g}\n()"), false)?.gamma;
        program.gamma = gamma;
    }
    let pc = match &o.pc {
        Some(s) => principal("--pc", s)?,
        None => program.pc.clone().unwrap_or_else(|| Principal::Top.integ()),
    };
    let mut opts = config.check_options()?;
    if let Some(s) = &o.pcmost {
        opts.pc_lowest = principal("--pcmost", s)?;
    }
    if let Some((h, axis)) = &o.harness {
        opts.harness = Some(Harness { h: principal("--harness", h)?, axis: *axis });
    }
    Ok(Loaded { program, pc, opts })
}

/// `flac check`: print the type of a program or the premise it fails.
pub fn cmd_check(path: &Path, o: &Overrides, config: &Config, out: &mut impl Write) -> Result<bool, CliError> {
    let l = load(path, o, config)?;
    let p = &l.program;
    match typecheck_with(&l.opts, &p.delegations, &p.gamma, &l.pc, &p.term, Some(&p.spans)) {
        Ok(t) => {
            writeln!(out, "{t}")?;
            Ok(true)
        }
        Err(e) => {
            writeln!(out, "{e}")?;
            Ok(false)
        }
    }
}

fn write_trace(r: &Run, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "#0 [start] {}", r.trace[0])?;
    for (k, (rule, e)) in r.rules.iter().zip(&r.trace[1..]).enumerate() {
        writeln!(out, "#{} [{rule}] {e}", k + 1)?;
    }
    Ok(())
}

fn finished(r: &Run, out: &mut impl Write) -> Result<bool, CliError> {
    match &r.outcome {
        Outcome::Value => {
            writeln!(out, "{}", r.last())?;
            Ok(true)
        }
        Outcome::Stuck(reason) => {
            writeln!(out, "stuck after {} steps: {reason}", r.rules.len())?;
            Ok(false)
        }
        Outcome::OutOfFuel => {
            writeln!(out, "out of fuel after {} steps", r.rules.len())?;
            Ok(false)
        }
    }
}

/// `flac run`: evaluate a closed program, optionally printing every step.
pub fn cmd_run(
    path: &Path,
    trace: bool,
    fuel: Option<usize>,
    config: &Config,
    out: &mut impl Write,
) -> Result<bool, CliError> {
    let l = load(path, &Overrides::default(), config)?;
    let r = run(&l.program.term, fuel.unwrap_or(config.fuel));
    if trace {
        write_trace(&r, out)?;
    }
    finished(&r, out)
}

/// `flac observe`: run a program and print what `observer` sees of it.
pub fn cmd_observe(
    path: &Path,
    observer: &str,
    axis: Axis,
    config: &Config,
    out: &mut impl Write,
) -> Result<bool, CliError> {
    let l = load(path, &Overrides::default(), config)?;
    let observer = principal("--as", observer)?;
    let r = run(&l.program.term, config.fuel);
    let obs = Observer::new(&l.program.delegations, &observer, axis);
    for (k, e) in obs.trace(&r.trace).iter().enumerate() {
        writeln!(out, "#{k} {e}")?;
    }
    Ok(r.outcome == Outcome::Value)
}

/// `flac ni` and `flac rd`: run a suite and print one line per case.
pub fn cmd_suite(path: &Path, kind: Kind, config: &Config, out: &mut impl Write) -> Result<bool, CliError> {
    let (suite, base) = Suite::load(path)?;
    if suite.kind != kind {
        return Err(CliError::Usage(format!("{} is a {:?} suite", path.display(), suite.kind)));
    }
    let results = suite.run(&base, config)?;
    for r in &results {
        writeln!(out, "{r}")?;
    }
    let passed = results.iter().filter(|r| r.ok()).count();
    writeln!(out, "{passed}/{} cases as expected", results.len())?;
    Ok(passed == results.len())
}

/// Outcome of fuzzing the type checker and evaluator together.
#[derive(Clone, Debug, Default)]
pub struct FuzzReport {
    pub terms: usize,
    pub steps: usize,
    /// Candidates the generator gave up on.
    pub skipped: usize,
    pub failures: Vec<String>,
}

/// Generate well-typed closed terms and check that every step keeps the
/// type, that runs end in a value and that evaluation is deterministic.
pub fn fuzz(count: usize, seed: u64, depth: usize, fuel: usize) -> FuzzReport {
    let mut g = Generator::new(ChaCha8Rng::seed_from_u64(seed));
    let pi = Delegations::new();
    let gamma = Context::new();
    let mut report = FuzzReport::default();
    while report.terms < count {
        let Some((pc, e, t)) = g.well_typed(&pi, depth, 100) else {
            report.skipped += 1;
            continue;
        };
        report.terms += 1;
        let r = run(&e, fuel);
        report.steps += r.rules.len();
        if r.outcome != Outcome::Value {
            report.failures.push(format!("progress: {e} ended with {:?}", r.outcome));
        }
        for s in &r.trace {
            match typecheck(&pi, &gamma, &pc, s) {
                Ok(t2) if t2.equiv(&t) => {}
                Ok(t2) => report.failures.push(format!("preservation: {s} has {t2}, expected {t}")),
                Err(err) => report.failures.push(format!("preservation: {s} is ill-typed: {err}")),
            }
        }
        let again = run(&e, fuel);
        if again.trace != r.trace || again.rules != r.rules {
            report.failures.push(format!("determinism: {e}"));
        }
    }
    report
}

/// `flac fuzz`.
pub fn cmd_fuzz(
    count: usize,
    seed: u64,
    depth: usize,
    config: &Config,
    out: &mut impl Write,
) -> Result<bool, CliError> {
    let report = fuzz(count, seed, depth, config.fuel);
    for f in &report.failures {
        writeln!(out, "{f}")?;
    }
    writeln!(out, "{} terms, {} steps, {} failures (seed {seed})", report.terms, report.steps, report.failures.len())?;
    Ok(report.failures.is_empty())
}

/// `flac corpus`: check every entry of the golden corpus.
pub fn cmd_corpus(dir: &Path, config: &Config, out: &mut impl Write) -> Result<bool, CliError> {
    let results = corpus::check_corpus(dir, config)?;
    for r in &results {
        writeln!(out, "{r}")?;
    }
    let passed = results.iter().filter(|r| r.ok).count();
    writeln!(out, "{passed}/{} corpus entries as expected", results.len())?;
    Ok(passed == results.len())
}
