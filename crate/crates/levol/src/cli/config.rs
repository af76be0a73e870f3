//! Run configuration shared by the pipeline subcommands.
//!
//! A config file holds `key=value` lines (# starts a comment). Flags given
//! on the command line override file values; `--dump-config` writes the
//! merged, fully resolved configuration so the dumped file alone
//! reproduces the run.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::integrate::BoundaryPolicy;

/// Every tunable of the edge / ftle / ridges / bench subcommands. `None`
/// means "not set"; defaults are applied by the consumer after merging.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub dataset: Option<String>,
    pub field: Option<String>,
    pub t0: Option<f64>,
    pub duration: Option<f64>,
    pub intervals: Option<usize>,
    pub substeps: Option<usize>,
    pub boundary: Option<BoundaryPolicy>,
    pub moments: Option<Vec<u8>>,
    pub include_space: Option<bool>,
    pub normalize: Option<bool>,
    pub sigma: Option<f64>,
    pub strength_min: Option<f64>,
    pub eig_max: Option<f64>,
    pub min_vertices: Option<usize>,
    pub threads: Option<usize>,
    pub out: Option<String>,
    pub pgm: Option<String>,
    pub reps: Option<usize>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::MalformedRow {
                path: path.to_path_buf(),
                line: idx + 1,
                reason: format!("'{line}' is not 'key=value'"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            cfg.set(key, value).map_err(|e| Error::MalformedRow {
                path: path.to_path_buf(),
                line: idx + 1,
                reason: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str, v: &str| {
            Error::InvalidConfig(format!("bad {what} value '{v}'"))
        };
        match key {
            "dataset" => self.dataset = Some(value.to_string()),
            "field" => self.field = Some(value.to_string()),
            "t0" => self.t0 = Some(value.parse().map_err(|_| bad(key, value))?),
            "T" => self.duration = Some(value.parse().map_err(|_| bad(key, value))?),
            "M" => self.intervals = Some(value.parse().map_err(|_| bad(key, value))?),
            "substeps" => self.substeps = Some(value.parse().map_err(|_| bad(key, value))?),
            "boundary" => {
                self.boundary =
                    Some(BoundaryPolicy::parse(value).ok_or_else(|| bad(key, value))?)
            }
            "moments" => self.moments = Some(parse_moments(value)?),
            "include_space" => {
                self.include_space = Some(value.parse().map_err(|_| bad(key, value))?)
            }
            "normalize" => self.normalize = Some(value.parse().map_err(|_| bad(key, value))?),
            "sigma" => self.sigma = Some(value.parse().map_err(|_| bad(key, value))?),
            "strength_min" => {
                self.strength_min = Some(value.parse().map_err(|_| bad(key, value))?)
            }
            "eig_max" => self.eig_max = Some(value.parse().map_err(|_| bad(key, value))?),
            "min_vertices" => {
                self.min_vertices = Some(value.parse().map_err(|_| bad(key, value))?)
            }
            "threads" => self.threads = Some(value.parse().map_err(|_| bad(key, value))?),
            "out" => self.out = Some(value.to_string()),
            "pgm" => self.pgm = Some(value.to_string()),
            "reps" => self.reps = Some(value.parse().map_err(|_| bad(key, value))?),
            _ => return Err(Error::InvalidConfig(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Overlay `other` (command-line flags) on top of this config.
    pub fn merged_with(mut self, other: RunConfig) -> RunConfig {
        macro_rules! take {
            ($($f:ident),*) => {
                $(if other.$f.is_some() { self.$f = other.$f; })*
            };
        }
        take!(
            dataset, field, t0, duration, intervals, substeps, boundary, moments,
            include_space, normalize, sigma, strength_min, eig_max, min_vertices,
            threads, out, pgm, reps
        );
        self
    }

    /// Serialize every set key in a fixed order.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                let _ = writeln!(out, "{k}={v}");
            }
        };
        kv("dataset", self.dataset.clone());
        kv("field", self.field.clone());
        kv("t0", self.t0.map(|v| v.to_string()));
        kv("T", self.duration.map(|v| v.to_string()));
        kv("M", self.intervals.map(|v| v.to_string()));
        kv("substeps", self.substeps.map(|v| v.to_string()));
        kv("boundary", self.boundary.map(|b| b.name().to_string()));
        kv("moments", self.moments.as_ref().map(|m| moments_string(m)));
        kv("include_space", self.include_space.map(|v| v.to_string()));
        kv("normalize", self.normalize.map(|v| v.to_string()));
        kv("sigma", self.sigma.map(|v| v.to_string()));
        kv("strength_min", self.strength_min.map(|v| v.to_string()));
        kv("eig_max", self.eig_max.map(|v| v.to_string()));
        kv("min_vertices", self.min_vertices.map(|v| v.to_string()));
        kv("threads", self.threads.map(|v| v.to_string()));
        kv("out", self.out.clone());
        kv("pgm", self.pgm.clone());
        kv("reps", self.reps.map(|v| v.to_string()));
        out
    }

    pub fn dump(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.emit()).map_err(|e| Error::io(path, e))
    }
}

pub fn parse_moments(value: &str) -> Result<Vec<u8>> {
    value
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<u8>()
                .map_err(|_| Error::InvalidConfig(format!("bad moment order '{p}'")))
        })
        .collect()
}

pub fn moments_string(orders: &[u8]) -> String {
    orders
        .iter()
        .map(|o| o.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        let cfg = RunConfig {
            dataset: Some("out/dg".into()),
            t0: Some(15.0),
            duration: Some(-10.0),
            intervals: Some(50),
            substeps: Some(4),
            boundary: Some(BoundaryPolicy::Freeze),
            moments: Some(vec![1, 2]),
            include_space: Some(false),
            normalize: Some(false),
            sigma: Some(1.0 / 128.0),
            threads: Some(4),
            out: Some("edge.levol".into()),
            ..Default::default()
        };
        cfg.dump(&path).unwrap();
        let back = RunConfig::from_file(&path).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig {
            t0: Some(1.0),
            intervals: Some(10),
            ..Default::default()
        };
        let flags = RunConfig {
            t0: Some(2.0),
            ..Default::default()
        };
        let merged = file.merged_with(flags);
        assert_eq!(merged.t0, Some(2.0));
        assert_eq!(merged.intervals, Some(10));
    }

    #[test]
    fn unknown_keys_and_bad_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.cfg");
        std::fs::write(&path, "wibble=1\n").unwrap();
        assert!(RunConfig::from_file(&path).is_err());
        std::fs::write(&path, "t0=abc\n").unwrap();
        assert!(RunConfig::from_file(&path).is_err());
        std::fs::write(&path, "# comment\n\nmoments=1,2,3\n").unwrap();
        let cfg = RunConfig::from_file(&path).unwrap();
        assert_eq!(cfg.moments, Some(vec![1, 2, 3]));
    }
}
