//! Plain-text defaults file: one `key = value` per line, `#` starts a comment.
//!
//! Recognised keys: `n_simplex`, `n_sphere`, `gamma_steps`, `seed`,
//! `omega_steps`, `m0_steps`, `format` (`csv` or `json`), `out_dir`.
//! Command-line flags take precedence over the file.

use std::path::{Path, PathBuf};

use clap::ValueEnum;

use crate::error::{CliError, CliResult};
use crate::output::Format;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub n_simplex: Option<usize>,
    pub n_sphere: Option<usize>,
    pub gamma_steps: Option<usize>,
    pub seed: Option<u64>,
    pub omega_steps: Option<usize>,
    pub m0_steps: Option<usize>,
    pub format: Option<Format>,
    pub out_dir: Option<PathBuf>,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("config line {line}: invalid value for {key}: {value:?}")))
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {line_no}: expected key = value")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n_simplex" => c.n_simplex = Some(parse_num(key, value, line_no)?),
                "n_sphere" => c.n_sphere = Some(parse_num(key, value, line_no)?),
                "gamma_steps" => c.gamma_steps = Some(parse_num(key, value, line_no)?),
                "seed" => c.seed = Some(parse_num(key, value, line_no)?),
                "omega_steps" => c.omega_steps = Some(parse_num(key, value, line_no)?),
                "m0_steps" => c.m0_steps = Some(parse_num(key, value, line_no)?),
                "format" => {
                    c.format = Some(
                        Format::from_str(value, true)
                            .map_err(|_| CliError::Usage(format!("config line {line_no}: unknown format {value:?}")))?,
                    )
                }
                "out_dir" => c.out_dir = Some(PathBuf::from(value)),
                _ => return Err(CliError::Usage(format!("config line {line_no}: unknown key {key:?}"))),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let c =
            Config::parse("# defaults\nn_sphere = 40\nseed=7  # fixed\n\nformat = JSON\nout_dir = /tmp/o\n").unwrap();
        assert_eq!(c.n_sphere, Some(40));
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.format, Some(Format::Json));
        assert_eq!(c.out_dir, Some(PathBuf::from("/tmp/o")));
        assert_eq!(c.n_simplex, None);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Config::parse("colour = red").is_err());
        assert!(Config::parse("seed = -1").is_err());
        assert!(Config::parse("seed").is_err());
    }
}
