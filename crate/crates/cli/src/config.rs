//! Flat `key = value` documents: run configuration and scene manifests.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are matched with
//! `-` and `_` treated alike. Later duplicates win.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

pub const CONFIG_ENV: &str = "RADIOMAP_CONFIG";

#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
    origin: Option<PathBuf>,
}

fn norm_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected `key = value`", n + 1))?;
            if k.trim().is_empty() {
                bail!("line {}: empty key", n + 1);
            }
            entries.insert(norm_key(k), v.trim().to_string());
        }
        Ok(Self { entries, origin: None })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut kv = Self::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
        kv.origin = Some(path.to_path_buf());
        Ok(kv)
    }

    /// Explicit path, else the path in `RADIOMAP_CONFIG`, else empty.
    pub fn load_run_config(explicit: Option<&Path>) -> Result<Self> {
        match explicit {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(&norm_key(key)).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        self.get_str(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("config key `{key}` = `{v}`: {e}")))
            .transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: Display,
    {
        self.get(key)?.ok_or_else(|| anyhow!("missing key `{key}`"))
    }

    /// Path value resolved against the document's directory.
    pub fn get_path(&self, key: &str) -> Option<PathBuf> {
        let raw = PathBuf::from(self.get_str(key)?);
        match (&self.origin, raw.is_relative()) {
            (Some(origin), true) => Some(origin.parent().unwrap_or(Path::new(".")).join(raw)),
            _ => Some(raw),
        }
    }

    pub fn insert(&mut self, key: &str, value: impl Display) {
        self.entries.insert(norm_key(key), value.to_string());
    }

    pub fn render(&self, header: &str) -> String {
        let mut out = format!("# {header}\n");
        for (k, v) in &self.entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    /// Flag value, else config value, else default.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        Ok(match flag {
            Some(v) => v,
            None => self.get(key)?.unwrap_or(default),
        })
    }

    /// Flag value, else config value.
    pub fn pick_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        Ok(match flag {
            Some(v) => Some(v),
            None => self.get(key)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_normalizes() {
        let kv = KeyValues::parse("# c\nalpha-los = 3\n\n seed=7 \nseed = 9\n").unwrap();
        assert_eq!(kv.get::<f64>("alpha_los").unwrap(), Some(3.0));
        assert_eq!(kv.get::<u64>("seed").unwrap(), Some(9));
        assert!(KeyValues::parse("novalue\n").is_err());
    }

    #[test]
    fn flag_beats_config_beats_default() {
        let kv = KeyValues::parse("jobs = 3\n").unwrap();
        assert_eq!(kv.pick(Some(5usize), "jobs", 1).unwrap(), 5);
        assert_eq!(kv.pick(None, "jobs", 1usize).unwrap(), 3);
        assert_eq!(kv.pick(None, "seed", 42u64).unwrap(), 42);
        assert!(kv.pick::<usize>(None, "jobs", 1).is_ok());
        let bad = KeyValues::parse("jobs = many\n").unwrap();
        assert!(bad.pick::<usize>(None, "jobs", 1).is_err());
    }
}
