//! Security check suites (`.flactest` files).
//!
//! A suite is a TOML document fixing the roles of a noninterference or
//! robust-declassification check, followed by one `[[case]]` per program:
//!
//! ```toml
//! kind = "ni"
//! context = "[Alice |> k]"
//! pc = "p<-"
//! gamma = "[y : k says unit]"
//! x = "x"
//! input_type = "p says unit"
//! inputs = ["sealed[p] ()", "sealed[p] ()"]
//! h = "p-> /\\ q<-"
//! observer = "q-> /\\ p<-"
//! axis = "conf"
//!
//! [subst]
//! y = "sealed[k] ()"
//!
//! [[case]]
//! name = "constant"
//! program = "eta[q->] ()"
//! expect = "pass"
//! ```
//!
//! Terms may be given inline or as `{ file = "path" }`, resolved relative
//! to the suite. Robust-declassification suites set `kind = "rd"`, give
//! `pi_h` and list two attack vectors per case.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use flac::delegation::Delegations;
use flac::principal::{Axis, Principal};
use flac::security::{ni_check, rd_check, NiOptions, NiProblem, NiVerdict, RdOptions, RdProblem, RdVerdict};
use flac::syntax::{parse_principal, parse_program, parse_type, Context, Program, Term};
use serde::Deserialize;

use crate::config::Config;
use crate::CliError;

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Ni,
    Rd,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum AxisName {
    Conf,
    Integ,
}

impl From<AxisName> for Axis {
    fn from(a: AxisName) -> Axis {
        match a {
            AxisName::Conf => Axis::Conf,
            AxisName::Integ => Axis::Integ,
        }
    }
}

/// A term given inline or by path.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Source {
    Inline(String),
    File { file: PathBuf },
}

impl Source {
    fn text(&self, base: &Path) -> Result<String, CliError> {
        match self {
            Source::Inline(s) => Ok(s.clone()),
            Source::File { file } => crate::read(&base.join(file)),
        }
    }
}

/// Expected verdict of a case.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Pass,
    Fail,
    Inapplicable,
    /// The attack vectors are rejected as unfair.
    Unfair,
}

impl fmt::Display for Expect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expect::Pass => "pass",
            Expect::Fail => "fail",
            Expect::Inapplicable => "inapplicable",
            Expect::Unfair => "unfair",
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub name: String,
    pub program: Option<String>,
    pub file: Option<PathBuf>,
    pub expect: Expect,
    /// Two attack vectors, one term per hole (robust declassification).
    #[serde(default)]
    pub attacks: Option<[Vec<String>; 2]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    pub kind: Kind,
    #[serde(default)]
    pub context: String,
    pub pc: String,
    #[serde(default)]
    pub gamma: String,
    #[serde(default)]
    pub subst: BTreeMap<String, Source>,
    pub x: String,
    pub input_type: String,
    pub inputs: [Source; 2],
    pub h: String,
    pub observer: Option<String>,
    pub axis: Option<AxisName>,
    /// Delegations the attacker is judged under.
    pub pi_h: Option<String>,
    #[serde(default)]
    pub multi_step: bool,
    #[serde(rename = "case")]
    pub cases: Vec<Case>,
}

/// The verdict of one case, rendered for the report.
#[derive(Clone, Debug)]
pub struct CaseResult {
    pub name: String,
    pub expect: Expect,
    /// What happened, or the error that stopped the check.
    pub outcome: Result<Expect, String>,
    pub detail: String,
}

impl CaseResult {
    pub fn ok(&self) -> bool {
        self.outcome.as_ref().is_ok_and(|o| *o == self.expect)
    }

    /// Expected and actual verdicts with the check's own detail.
    pub fn summary(&self) -> String {
        let mut s = match &self.outcome {
            Ok(o) => format!("expected {}, got {o}", self.expect),
            Err(e) => format!("expected {}, error: {e}", self.expect),
        };
        if !self.detail.is_empty() {
            s.push_str(&format!(" ({})", self.detail));
        }
        s
    }
}

impl fmt::Display for CaseResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.ok() { "ok  " } else { "FAIL" };
        write!(f, "{mark} {:<40} {}", self.name, self.summary())
    }
}

fn principal(what: &str, s: &str) -> Result<Principal, CliError> {
    parse_principal(s).map_err(|e| CliError::Suite(format!("{what}: {e}")))
}

impl Suite {
    pub fn load(path: &Path) -> Result<(Suite, PathBuf), CliError> {
        let text = crate::read(path)?;
        let suite: Suite = toml::from_str(&text).map_err(|e| CliError::Suite(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((suite, base))
    }

    fn headers(&self) -> String {
        let mut h = String::new();
        if !self.context.trim().is_empty() {
            h.push_str(&format!("context: {}\n", self.context));
        }
        h.push_str(&format!("pc: {}\n", self.pc));
        if !self.gamma.trim().is_empty() {
            h.push_str(&format!("gamma: {}\n", self.gamma));
        }
        h
    }

    /// Parse `body` under the suite headers.
    fn program(&self, body: &str, extended: bool) -> Result<Program, CliError> {
        parse_program(&format!("{}{body}", self.headers()), extended).map_err(CliError::Parse)
    }

    fn term(&self, what: &str, src: &Source, base: &Path) -> Result<Term, CliError> {
        let text = src.text(base)?;
        let p = self.program(&text, true).map_err(|e| CliError::Suite(format!("{what}: {e}")))?;
        Ok(p.term)
    }

    /// Run every case.
    pub fn run(&self, base: &Path, config: &Config) -> Result<Vec<CaseResult>, CliError> {
        let header = self.program("()", false)?;
        let pi = header.delegations.clone();
        let pc = header.pc.clone().expect("pc header is always written");
        let gamma = header.gamma.clone();
        let h = principal("h", &self.h)?;
        let input_type = parse_type(&self.input_type).map_err(|e| CliError::Suite(format!("input_type: {e}")))?;
        let inputs = [self.term("input 1", &self.inputs[0], base)?, self.term("input 2", &self.inputs[1], base)?];
        let mut subst = Vec::new();
        for (y, src) in &self.subst {
            subst.push((y.clone(), self.term(&format!("substitution `{y}`"), src, base)?));
        }
        let check = config.check_options()?;

        let mut results = Vec::new();
        for case in &self.cases {
            let body = match (&case.program, &case.file) {
                (Some(p), None) => p.clone(),
                (None, Some(f)) => crate::read(&base.join(f))?,
                _ => return Err(CliError::Suite(format!("case `{}` needs exactly one of program or file", case.name))),
            };
            let roles = Roles { pi: &pi, pc: &pc, gamma: &gamma, h: &h, input_type: &input_type, inputs: &inputs };
            let (outcome, detail) = match self.kind {
                Kind::Ni => self.ni_case(&roles, &subst, &body, config, &check)?,
                Kind::Rd => self.rd_case(&roles, case, &body, config, &check)?,
            };
            results.push(CaseResult { name: case.name.clone(), expect: case.expect, outcome, detail });
        }
        Ok(results)
    }

    fn ni_case(
        &self,
        r: &Roles,
        subst: &[(String, Term)],
        body: &str,
        config: &Config,
        check: &flac::typecheck::CheckOptions,
    ) -> Result<(Result<Expect, String>, String), CliError> {
        let observer = principal("observer", self.observer.as_deref().ok_or_else(|| missing("observer"))?)?;
        let axis = self.axis.ok_or_else(|| missing("axis"))?.into();
        let term = match self.program(body, false) {
            Ok(p) => p.term,
            Err(e) => return Ok((Err(e.to_string()), String::new())),
        };
        let problem = NiProblem {
            pi: r.pi.clone(),
            gamma: r.gamma.clone(),
            pc: r.pc.clone(),
            term,
            x: self.x.clone(),
            input_type: r.input_type.clone(),
            inputs: r.inputs.clone(),
            subst: subst.to_vec(),
            h: r.h.clone(),
            observer,
            axis,
        };
        let opts = NiOptions { fuel: config.fuel, factor_bound: config.factor_bound, check: check.clone() };
        Ok(match ni_check(&problem, &opts) {
            Ok(NiVerdict::Pass(report)) => (
                Ok(Expect::Pass),
                format!(
                    "{} observed, {}/{} steps, {} bracketed",
                    report.observed.len(),
                    report.steps[0],
                    report.steps[1],
                    report.bracket_steps
                ),
            ),
            Ok(NiVerdict::Fail(v)) => (Ok(Expect::Fail), v.to_string()),
            Ok(NiVerdict::Inapplicable(c)) => (Ok(Expect::Inapplicable), c.to_string()),
            Err(e) => (Err(e.to_string()), String::new()),
        })
    }

    fn rd_case(
        &self,
        r: &Roles,
        case: &Case,
        body: &str,
        config: &Config,
        check: &flac::typecheck::CheckOptions,
    ) -> Result<(Result<Expect, String>, String), CliError> {
        let pi_h = match &self.pi_h {
            Some(s) => self.program_context(s)?,
            None => return Err(missing("pi_h")),
        };
        let term = match self.program(body, true) {
            Ok(p) => p.term,
            Err(e) => return Ok((Err(e.to_string()), String::new())),
        };
        let vectors =
            case.attacks.as_ref().ok_or_else(|| CliError::Suite(format!("case `{}` needs attacks", case.name)))?;
        let mut attacks: [Vec<Term>; 2] = [Vec::new(), Vec::new()];
        for (j, v) in vectors.iter().enumerate() {
            for a in v {
                match flac::syntax::parse_term(a) {
                    Ok(t) => attacks[j].push(t),
                    Err(e) => return Ok((Err(format!("attack {}: {e}", j + 1)), String::new())),
                }
            }
        }
        let problem = RdProblem {
            pi: r.pi.clone(),
            pi_h,
            gamma: r.gamma.clone(),
            pc: r.pc.clone(),
            term,
            x: self.x.clone(),
            input_type: r.input_type.clone(),
            inputs: r.inputs.clone(),
            attacks,
            h: r.h.clone(),
        };
        let opts = RdOptions { fuel: config.fuel, multi_step: self.multi_step, check: check.clone() };
        Ok(match rd_check(&problem, &opts) {
            Ok(RdVerdict::Pass { first, second }) => {
                (Ok(Expect::Pass), format!("alike under attacks: {first}, {second}"))
            }
            Ok(RdVerdict::Fail { first, second }) => {
                (Ok(Expect::Fail), format!("alike under attacks: {first}, {second}"))
            }
            Ok(RdVerdict::Inapplicable(c)) => (Ok(Expect::Inapplicable), c.to_string()),
            Err(flac::security::HarnessError::Unfair(u)) => (Ok(Expect::Unfair), u.to_string()),
            Err(e) => (Err(e.to_string()), String::new()),
        })
    }

    fn program_context(&self, list: &str) -> Result<Delegations, CliError> {
        parse_program(&format!("context: {list}\n()"), false)
            .map(|p| p.delegations)
            .map_err(|e| CliError::Suite(format!("pi_h: {e}")))
    }
}

struct Roles<'a> {
    pi: &'a Delegations,
    pc: &'a Principal,
    gamma: &'a Context,
    h: &'a Principal,
    input_type: &'a flac::syntax::Type,
    inputs: &'a [Term; 2],
}

fn missing(field: &str) -> CliError {
    CliError::Suite(format!("missing field `{field}`"))
}
