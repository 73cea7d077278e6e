// SPDX-License-Identifier: Apache-2.0
//! Run configuration in a line-oriented `key = value` format.
//!
//! ```text
//! # alphabets are written as letter runs
//! sigma = ab
//! gamma = cd#
//! max_len = 6
//! seed = 0x5eed2026
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Keys may appear once.

use std::collections::BTreeSet;

use crate::expr::Alphabet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub sigma: Alphabet,
    pub gamma: Alphabet,
    /// Longest input word enumerated by checks.
    pub max_len: usize,
    pub seed: u64,
    /// Expressions drawn for a random corpus.
    pub corpus: usize,
    pub depth: u32,
    /// Cap on outputs enumerated per word.
    pub max_outputs: usize,
    /// Cap on consecutive ε-moves per enumerated run.
    pub max_eps_run: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            sigma: ['a', 'b'].into(),
            gamma: ['c', 'd'].into(),
            max_len: 6,
            seed: 0x5eed_2026,
            corpus: 200,
            depth: 3,
            max_outputs: 512,
            max_eps_run: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {msg}")]
    Value { line: usize, key: String, msg: String },
}

fn letters(v: &str) -> Result<Alphabet, String> {
    let set: Alphabet = v.chars().filter(|c| !c.is_whitespace() && *c != ',').collect();
    if set.is_empty() {
        return Err("empty alphabet".into());
    }
    Ok(set)
}

fn integer(v: &str) -> Result<u64, String> {
    let v = v.replace('_', "");
    let parsed = match v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => v.parse(),
    };
    parsed.map_err(|e| e.to_string())
}

fn small(v: &str) -> Result<usize, String> {
    usize::try_from(integer(v)?).map_err(|e| e.to_string())
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut c = Config::default();
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::Duplicate { line, key: key.into() });
            }
            let bad = |msg: String| ConfigError::Value { line, key: key.into(), msg };
            match key {
                "sigma" => c.sigma = letters(value).map_err(bad)?,
                "gamma" => c.gamma = letters(value).map_err(bad)?,
                "max_len" => c.max_len = small(value).map_err(bad)?,
                "seed" => c.seed = integer(value).map_err(bad)?,
                "corpus" => c.corpus = small(value).map_err(bad)?,
                "depth" => c.depth = u32::try_from(integer(value).map_err(bad)?).map_err(|e| bad(e.to_string()))?,
                "max_outputs" => c.max_outputs = small(value).map_err(bad)?,
                "max_eps_run" => c.max_eps_run = small(value).map_err(bad)?,
                _ => return Err(ConfigError::UnknownKey { line, key: key.into() }),
            }
        }
        Ok(c)
    }

    /// Canonical text form; parsing it gives back `self`.
    pub fn render(&self) -> String {
        let s: String = self.sigma.iter().collect();
        let g: String = self.gamma.iter().collect();
        format!(
            "sigma = {s}\ngamma = {g}\nmax_len = {}\nseed = {:#x}\ncorpus = {}\ndepth = {}\nmax_outputs = {}\nmax_eps_run = {}\n",
            self.max_len, self.seed, self.corpus, self.depth, self.max_outputs, self.max_eps_run
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_keys_and_comments() {
        let c = Config::parse("# demo\n\nsigma = a b\nmax_len=4\nseed = 0x10\n").unwrap();
        assert_eq!(c.sigma, ['a', 'b'].into());
        assert_eq!(c.max_len, 4);
        assert_eq!(c.seed, 16);
        assert_eq!(c.gamma, Config::default().gamma);
    }

    #[test]
    fn rejects_bad_lines() {
        assert_eq!(Config::parse("sigma").unwrap_err(), ConfigError::Syntax { line: 1 });
        assert!(matches!(Config::parse("colour = red"), Err(ConfigError::UnknownKey { .. })));
        assert!(matches!(Config::parse("seed = 1\nseed = 2"), Err(ConfigError::Duplicate { line: 2, .. })));
        assert!(matches!(Config::parse("max_len = -3"), Err(ConfigError::Value { .. })));
        assert!(matches!(Config::parse("sigma = ,"), Err(ConfigError::Value { .. })));
    }

    #[test]
    fn render_round_trips() {
        let c = Config { seed: 99, sigma: ['x', 'y', 'z'].into(), ..Config::default() };
        assert_eq!(Config::parse(&c.render()).unwrap(), c);
    }
}
