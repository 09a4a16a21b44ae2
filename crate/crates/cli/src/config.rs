//! Run configuration: defaults, then a `key=value` file, then the environment,
//! then command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use diophant_core::recint::RrConfig;

pub const CACHE_ENV: &str = "DIOPHANT_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub bits: u32,
    pub depth: usize,
    pub horizon: f64,
    pub k0: Option<u64>,
    pub n_min: u64,
    pub n_max: u64,
    pub blowup: f64,
    pub qmax: f64,
    pub trials: usize,
    pub grid_step: f64,
    pub terms: usize,
    pub seed: u64,
    pub format: Option<Format>,
    /// Not part of the result, so two runs differing only here agree byte for byte.
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let rr = RrConfig::default();
        RunConfig {
            bits: 256,
            depth: 20,
            horizon: rr.horizon,
            k0: None,
            n_min: rr.n_min,
            n_max: rr.n_max,
            blowup: rr.blowup,
            qmax: 1e6,
            trials: 1000,
            grid_step: 1e-3,
            terms: 25,
            seed: 0,
            format: None,
            cache_dir: None,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("config key '{key}': cannot parse '{v}'"))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "bits" => self.bits = num(key, v)?,
            "depth" => self.depth = num(key, v)?,
            "horizon" => self.horizon = num(key, v)?,
            "k0" => self.k0 = Some(num(key, v)?),
            "n_min" => self.n_min = num(key, v)?,
            "n_max" => self.n_max = num(key, v)?,
            "blowup" => self.blowup = num(key, v)?,
            "qmax" => self.qmax = num(key, v)?,
            "trials" => self.trials = num(key, v)?,
            "grid_step" => self.grid_step = num(key, v)?,
            "terms" => self.terms = num(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "format" => self.format = Some(Format::from_str(v, true)?),
            "cache_dir" => self.cache_dir = Some(PathBuf::from(v)),
            other => return Err(format!("unknown config key '{other}'")),
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<(), String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        for (key, value) in parse_pairs(&text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("bits", self.bits as f64),
            ("depth", self.depth as f64),
            ("horizon", self.horizon),
            ("n_min", self.n_min as f64),
            ("n_max", self.n_max as f64),
            ("blowup", self.blowup),
            ("qmax", self.qmax),
            ("trials", self.trials as f64),
            ("grid_step", self.grid_step),
            ("terms", self.terms as f64),
        ];
        for (k, v) in positive {
            if v.is_nan() || v <= 0.0 {
                return Err(format!("{k} must be positive"));
            }
        }
        if self.n_min > self.n_max {
            return Err("n_min exceeds n_max".into());
        }
        Ok(())
    }

    pub fn rr(&self) -> RrConfig {
        RrConfig {
            horizon: self.horizon,
            k0: self.k0,
            n_min: self.n_min,
            n_max: self.n_max,
            blowup: self.blowup,
            ..RrConfig::default()
        }
    }
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_and_overrides() {
        let mut c = RunConfig::default();
        for (k, v) in parse_pairs("# comment\nbits = 512\nn-max=4096 # inline\n\nformat=csv").unwrap() {
            c.set(&k, &v).unwrap();
        }
        assert_eq!(c.bits, 512);
        assert_eq!(c.n_max, 4096);
        assert_eq!(c.format, Some(Format::Csv));
        assert!(c.set("colour", "red").is_err());
        assert!(parse_pairs("novalue").is_err());
    }

    #[test]
    fn validation() {
        let c = RunConfig { horizon: -1.0, ..RunConfig::default() };
        assert!(c.validate().is_err());
        assert!(RunConfig::default().validate().is_ok());
    }
}
