//! `key=value` run configuration: file parsing, flag/file/default
//! resolution, and resolved-sidecar output.
//!
//! Settings resolve with the precedence command-line flag > config file >
//! built-in default. Config keys are spelled exactly like the long flags
//! but with underscores (`learning_rate=0.01`). After a subcommand has
//! consumed its keys, anything left over in the file is an error, so typos
//! and keys meant for a different subcommand cannot pass silently.

use capbm::{Error, Result};
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Pairs read from a `--config` file, consumed key by key.
pub struct FileValues {
    pairs: Vec<(String, String)>,
}

impl FileValues {
    fn empty() -> Self {
        FileValues { pairs: Vec::new() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{}:{}: expected key=value, got {line:?}",
                    path.display(),
                    idx + 1
                )));
            };
            let key = key.trim().to_string();
            if pairs.iter().any(|(k, _)| *k == key) {
                return Err(Error::Config(format!(
                    "{}:{}: duplicate key {key:?}",
                    path.display(),
                    idx + 1
                )));
            }
            pairs.push((key, value.trim().to_string()));
        }
        Ok(FileValues { pairs })
    }

    pub fn load_opt(path: Option<&PathBuf>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::empty()),
        }
    }

    fn take_raw(&mut self, key: &str) -> Option<String> {
        let i = self.pairs.iter().position(|(k, _)| k == key)?;
        Some(self.pairs.remove(i).1)
    }

    /// Resolves one setting: a present flag wins (consuming any file entry),
    /// then the file entry, then the default.
    pub fn resolve<T: FromStr>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        if let Some(v) = flag {
            self.take_raw(key);
            return Ok(v);
        }
        match self.take_raw(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| Error::Config(format!("key {key:?} has unparsable value {raw:?}"))),
            None => Ok(default),
        }
    }

    /// Like [`FileValues::resolve`] but with no default: the setting must
    /// come from a flag or the config file.
    pub fn resolve_required<T: FromStr>(&mut self, key: &str, flag: Option<T>) -> Result<T> {
        if let Some(v) = flag {
            self.take_raw(key);
            return Ok(v);
        }
        match self.take_raw(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| Error::Config(format!("key {key:?} has unparsable value {raw:?}"))),
            None => Err(Error::Config(format!(
                "missing required setting {key:?}: pass --{} or add {key}=... to the config file",
                key.replace('_', "-")
            ))),
        }
    }

    /// Errors on unconsumed keys.
    pub fn finish(self) -> Result<()> {
        if self.pairs.is_empty() {
            return Ok(());
        }
        let keys: Vec<&str> = self.pairs.iter().map(|(k, _)| k.as_str()).collect();
        Err(Error::Config(format!("unknown config keys: {}", keys.join(", "))))
    }
}

/// Fully resolved settings of one run, written next to the run's outputs.
pub struct Resolved {
    pairs: Vec<(&'static str, String)>,
}

impl Resolved {
    pub fn new() -> Self {
        Resolved { pairs: Vec::new() }
    }

    pub fn push(&mut self, key: &'static str, value: impl Display) {
        self.pairs.push((key, value.to_string()));
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text =
            String::from("# resolved run configuration; rerun with --config <this file>\n");
        for (k, v) in &self.pairs {
            text.push_str(k);
            text.push('=');
            text.push_str(v);
            text.push('\n');
        }
        std::fs::write(path, text)?;
        Ok(())
    }
}
