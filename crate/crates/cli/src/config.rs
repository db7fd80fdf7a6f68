//! Defaults read from `flac.toml`.

use std::path::Path;

use flac::delegation::DEFAULT_FACTOR_BOUND;
use flac::eval::DEFAULT_FUEL;
use flac::principal::Principal;
use flac::syntax::parse_principal;
use flac::typecheck::CheckOptions;
use serde::Deserialize;

use crate::CliError;

/// Name of the configuration file looked up in the working directory.
pub const CONFIG_FILE: &str = "flac.toml";

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// pc at which `where` annotations are checked.
    pub pcmost: String,
    pub fuel: usize,
    pub seed: u64,
    /// Atom bound for principal subtraction.
    pub factor_bound: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { pcmost: "top<-".into(), fuel: DEFAULT_FUEL, seed: 0, factor_bound: DEFAULT_FACTOR_BOUND }
    }
}

impl Config {
    /// Load `path`, or `flac.toml` in the working directory when present.
    pub fn load(path: Option<&Path>) -> Result<Config, CliError> {
        let text = match path {
            Some(p) => crate::read(p)?,
            None if Path::new(CONFIG_FILE).exists() => crate::read(Path::new(CONFIG_FILE))?,
            None => return Ok(Config::default()),
        };
        Config::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Config, CliError> {
        let config: Config = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.pcmost()?;
        Ok(config)
    }

    pub fn pcmost(&self) -> Result<Principal, CliError> {
        parse_principal(&self.pcmost).map_err(|e| CliError::Config(format!("pcmost: {e}")))
    }

    pub fn check_options(&self) -> Result<CheckOptions, CliError> {
        Ok(CheckOptions { pc_lowest: self.pcmost()?, harness: None })
    }
}
