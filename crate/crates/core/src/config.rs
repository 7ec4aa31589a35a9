//! Run settings shared by the verification suites and the CLI.
//!
//! Precedence is command-line flags, then a `key=value` file, then the
//! defaults.

use std::path::Path;

use crate::error::{Error, Result};
use crate::patch::DEFAULT_GRID;
use crate::scalar::Backend;

#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub seed: u64,
    /// Sample count for property suites.
    pub samples: usize,
    pub tolerance_numeric: f64,
    /// Residual budget for the curved float examples.
    pub tolerance_exactness_proxy: f64,
    /// Per-axis grid resolution.
    pub grid: usize,
    pub backend: Backend,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            seed: 0,
            samples: 100,
            tolerance_numeric: 1e-6,
            tolerance_exactness_proxy: 1e-8,
            grid: DEFAULT_GRID,
            backend: Backend::Rational,
        }
    }
}

/// Values given explicitly by one source. `None` defers to the next source.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tolerance_numeric: Option<f64>,
    pub tolerance_exactness_proxy: Option<f64>,
    pub grid: Option<usize>,
    pub backend: Option<Backend>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| Error::Parse(format!("line {line}: bad value {value:?} for {key}")))
}

impl Overrides {
    /// Parses `key=value` lines. Blank lines and `#` comments are skipped;
    /// unknown keys are errors.
    pub fn parse(text: &str) -> Result<Overrides> {
        let mut out = Overrides::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "seed" => out.seed = Some(parse_value(key, value, n + 1)?),
                "samples" => out.samples = Some(parse_value(key, value, n + 1)?),
                "tolerance_numeric" | "tol" => out.tolerance_numeric = Some(parse_value(key, value, n + 1)?),
                "tolerance_exactness_proxy" => out.tolerance_exactness_proxy = Some(parse_value(key, value, n + 1)?),
                "grid" => out.grid = Some(parse_value(key, value, n + 1)?),
                "backend" => out.backend = Some(parse_backend(value)?),
                _ => return Err(Error::Parse(format!("line {}: unknown key {key:?}", n + 1))),
            }
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Overrides> {
        Overrides::parse(&std::fs::read_to_string(path)?)
    }

    fn apply(&self, s: &mut Settings) {
        if let Some(v) = self.seed {
            s.seed = v;
        }
        if let Some(v) = self.samples {
            s.samples = v;
        }
        if let Some(v) = self.tolerance_numeric {
            s.tolerance_numeric = v;
        }
        if let Some(v) = self.tolerance_exactness_proxy {
            s.tolerance_exactness_proxy = v;
        }
        if let Some(v) = self.grid {
            s.grid = v;
        }
        if let Some(v) = self.backend {
            s.backend = v;
        }
    }
}

pub fn parse_backend(s: &str) -> Result<Backend> {
    match s {
        "rational" => Ok(Backend::Rational),
        "float" => Ok(Backend::Float),
        other => Err(Error::Parse(format!("unknown backend {other:?}"))),
    }
}

impl Settings {
    /// Layers `file` over the defaults and `flags` over both, then
    /// validates.
    pub fn resolve(flags: &Overrides, file: Option<&Overrides>) -> Result<Settings> {
        let mut s = Settings::default();
        if let Some(f) = file {
            f.apply(&mut s);
        }
        flags.apply(&mut s);
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Parse("samples must be at least 1".into()));
        }
        if self.grid == 0 {
            return Err(Error::Parse("grid must be at least 1".into()));
        }
        for (name, t) in [("tolerance_numeric", self.tolerance_numeric), ("tolerance_exactness_proxy", self.tolerance_exactness_proxy)] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Parse(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file = Overrides::parse("# run\nseed = 9\nsamples=5\n\ngrid=3\ntolerance_numeric=1e-4\n").unwrap();
        let flags = Overrides { seed: Some(2), ..Default::default() };
        let s = Settings::resolve(&flags, Some(&file)).unwrap();
        assert_eq!((s.seed, s.samples, s.grid, s.tolerance_numeric), (2, 5, 3, 1e-4));
        assert_eq!(s.tolerance_exactness_proxy, 1e-8);
        assert_eq!(Settings::resolve(&Overrides::default(), None).unwrap(), Settings::default());
    }

    #[test]
    fn rejects_bad_files_and_values() {
        assert!(Overrides::parse("seed").is_err());
        assert!(Overrides::parse("colour=red").is_err());
        assert!(Overrides::parse("seed=-1").is_err());
        assert!(Overrides::parse("backend=complex").is_err());
        let zero = Overrides { samples: Some(0), ..Default::default() };
        assert!(Settings::resolve(&zero, None).is_err());
        let neg = Overrides { tolerance_numeric: Some(-1.0), ..Default::default() };
        assert!(Settings::resolve(&neg, None).is_err());
    }
}
