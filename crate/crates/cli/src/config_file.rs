//! Config files are TOML. Plain `key = value` lines with unquoted strings
//! are accepted too: any value that is not valid TOML is read as a string.

use std::path::Path;

use anyhow::{Context, Result};
use ewlr::harness::RunConfig;

pub fn load(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("in config file {}", path.display()))
}

pub fn parse(text: &str) -> Result<RunConfig> {
    Ok(toml::from_str(&normalize(text))?)
}

fn normalize(text: &str) -> String {
    text.lines()
        .map(|line| {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('[') {
                return line.to_owned();
            }
            match trimmed.split_once('=') {
                Some((key, value)) if !is_toml_value(value.trim()) => {
                    format!("{} = {}", key.trim(), toml::Value::String(value.trim().to_owned()))
                }
                _ => line.to_owned(),
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn is_toml_value(v: &str) -> bool {
    toml::from_str::<toml::Table>(&format!("v = {v}")).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ewlr::harness::PredictorKind;

    #[test]
    fn plain_key_value_lines() {
        let cfg = parse("# comment\ndata = gen:hazan:n=50,chi=1,seed=2\npredictor = ogd\nB = 2.5\nn = 40\nrepeats = 3\n").unwrap();
        assert_eq!(cfg.data, "gen:hazan:n=50,chi=1,seed=2");
        assert_eq!(cfg.predictor, PredictorKind::Ogd);
        assert_eq!(cfg.b, 2.5);
        assert_eq!(cfg.n, Some(40));
        assert_eq!(cfg.repeats, 3);
    }

    #[test]
    fn structured_toml() {
        let cfg = parse("data = \"x.libsvm\"\n[practical]\nburn_in = 12\nretain = 30\n").unwrap();
        assert_eq!(cfg.practical.burn_in, 12);
        assert_eq!(cfg.practical.retain, 30);
        assert_eq!(cfg.practical.thin, 1);
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(parse("bogus = 1\n").is_err());
    }
}
