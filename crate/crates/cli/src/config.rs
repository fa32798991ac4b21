//! Settings from a TOML file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;

/// Keys mirror the long flags, with underscores.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub provider: Option<String>,
    pub src_lang: Option<String>,
    pub tgt_lang: Option<String>,
    pub translit: Option<String>,
    pub iterations: Option<usize>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub aligner: Option<String>,
    pub max_tokens: Option<usize>,
    pub alignments: Option<PathBuf>,
    pub drop_report: Option<PathBuf>,
    pub drop_punctuation_only: Option<bool>,
    pub jobs: Option<usize>,
    pub batch_size: Option<usize>,
    pub lexicon: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub english: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new("config", 2, format!("{}: {e}", path.display())))?;
        Ok(toml::from_str(&text)?)
    }
}

/// Flag value, else config-file value, else the default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

pub fn require<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T, CliError> {
    flag.or(file)
        .ok_or_else(|| CliError::usage(format!("missing required setting --{name}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick(None, None, 3), 3);
        assert!(require::<u8>(None, None, "input").is_err());
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(toml::from_str::<FileConfig>("iterations = 3\nalpha = 0.01").is_ok());
        assert!(toml::from_str::<FileConfig>("iteration = 3").is_err());
    }
}
