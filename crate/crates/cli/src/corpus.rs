//! The golden corpus: programs with their expected types, type errors or
//! results, and the security suites, listed in `manifest.toml`.

use std::fmt;
use std::path::{Path, PathBuf};

use flac::eval::{run, Outcome};
use flac::syntax::{parse_extended, parse_program, parse_type};
use flac::typecheck::typecheck_with;
use serde::Deserialize;

use crate::config::Config;
use crate::suite::Suite;
use crate::CliError;

pub const MANIFEST: &str = "manifest.toml";

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub file: PathBuf,
    /// What the entry demonstrates.
    pub about: String,
    /// Expected type.
    #[serde(rename = "type")]
    pub ty: Option<String>,
    /// Expected type error as `Rule.premise`.
    pub error: Option<String>,
    /// Expected final value of a run.
    pub value: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEntry {
    pub file: PathBuf,
    pub about: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(rename = "entry", default)]
    pub entries: Vec<Entry>,
    #[serde(rename = "suite", default)]
    pub suites: Vec<SuiteEntry>,
}

/// One line of the corpus report.
#[derive(Clone, Debug)]
pub struct EntryResult {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl fmt::Display for EntryResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.ok { "ok  " } else { "FAIL" };
        write!(f, "{mark} {:<44} {}", self.name, self.detail)
    }
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Manifest, CliError> {
        let path = dir.join(MANIFEST);
        toml::from_str(&crate::read(&path)?).map_err(|e| CliError::Suite(format!("{}: {e}", path.display())))
    }
}

/// Check one program entry against its expectations.
pub fn check_entry(dir: &Path, e: &Entry, config: &Config) -> Result<EntryResult, CliError> {
    let name = e.file.display().to_string();
    let src = crate::read(&dir.join(&e.file))?;
    let fail = |detail: String| Ok(EntryResult { name: name.clone(), ok: false, detail });
    let program = match parse_program(&src, false) {
        Ok(p) => p,
        Err(err) => return fail(format!("parse error: {err}")),
    };
    let pc = program.pc.clone().unwrap_or_else(|| flac::principal::Principal::Top.integ());
    let opts = config.check_options()?;
    let found = typecheck_with(&opts, &program.delegations, &program.gamma, &pc, &program.term, Some(&program.spans));
    let mut detail = Vec::new();
    match (&found, &e.ty, &e.error) {
        (Ok(t), Some(want), None) => {
            let want = parse_type(want).map_err(|err| CliError::Suite(format!("{name}: expected type: {err}")))?;
            if !t.equiv(&want) {
                return fail(format!("type {t}, expected {want}"));
            }
            detail.push(format!(": {t}"));
        }
        (Err(err), None, Some(want)) => {
            let got = format!("{}.{}", err.rule, err.premise);
            if got != *want {
                return fail(format!("rejected at {got}, expected {want}"));
            }
            detail.push(format!("rejected: {err}"));
        }
        (Ok(t), None, Some(want)) => return fail(format!("accepted at {t}, expected rejection at {want}")),
        (Err(err), Some(_), None) => return fail(format!("rejected: {err}")),
        _ => return Err(CliError::Suite(format!("{name}: give exactly one of type or error"))),
    }
    if let Some(want) = &e.value {
        let want = parse_extended(want).map_err(|err| CliError::Suite(format!("{name}: expected value: {err}")))?;
        let r = run(&program.term, config.fuel);
        if r.outcome != Outcome::Value {
            return fail(format!("run ended with {:?}", r.outcome));
        }
        if !r.last().alpha_eq(&want) {
            return fail(format!("ran to {}, expected {want}", r.last()));
        }
        detail.push(format!("; runs to {} in {} steps", r.last(), r.rules.len()));
    }
    Ok(EntryResult { name, ok: true, detail: detail.concat() })
}

/// Check every entry and suite of the corpus in `dir`.
pub fn check_corpus(dir: &Path, config: &Config) -> Result<Vec<EntryResult>, CliError> {
    let manifest = Manifest::load(dir)?;
    let mut out = Vec::new();
    for e in &manifest.entries {
        out.push(check_entry(dir, e, config)?);
    }
    for s in &manifest.suites {
        let (suite, base) = Suite::load(&dir.join(&s.file))?;
        for r in suite.run(&base, config)? {
            out.push(EntryResult {
                name: format!("{}: {}", s.file.display(), r.name),
                ok: r.ok(),
                detail: r.summary(),
            });
        }
    }
    Ok(out)
}
