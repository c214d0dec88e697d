//! Flat `key = value` run configuration.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config file `{0}` does not exist")]
    MissingFile(PathBuf),
    #[error("cannot read config file `{path}`: {reason}")]
    Unreadable { path: PathBuf, reason: String },
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}` (first set on line {first})")]
    DuplicateKey { line: usize, key: String, first: usize },
    #[error("key `{key}`: cannot read `{value}` as {expected}")]
    TypeMismatch { key: String, value: String, expected: &'static str },
    #[error("key `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Canonical,
    Variance,
    Correlation,
    FdtDrift,
    NonMarkovian,
    StarAlgebra,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Canonical,
        Scenario::Variance,
        Scenario::Correlation,
        Scenario::FdtDrift,
        Scenario::NonMarkovian,
        Scenario::StarAlgebra,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Canonical => "canonical",
            Scenario::Variance => "variance",
            Scenario::Correlation => "correlation",
            Scenario::FdtDrift => "fdt_drift",
            Scenario::NonMarkovian => "nonmarkovian",
            Scenario::StarAlgebra => "star_algebra",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Scenario::ALL.into_iter().find(|sc| sc.name() == s).ok_or(())
    }
}

/// `auto` picks `ħ = k_BT / (100 ω_max)`, deep in the hot regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hbar {
    Auto,
    Fixed(f64),
}

/// Recognized keys, in documentation order.
pub const KEYS: [&str; 14] = [
    "scenario", "gamma", "Gamma", "m", "kBT", "hbar", "F0", "N", "omega_max", "t_max", "t_steps", "n_samples", "seed",
    "out_dir",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub gamma: f64,
    pub cutoff: f64,
    pub mass: f64,
    pub kbt: f64,
    pub hbar: Hbar,
    pub force: f64,
    pub n_modes: usize,
    pub omega_max: f64,
    pub t_max: f64,
    pub t_steps: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl RunConfig {
    /// Defaults for a scenario; second-moment scenarios run longer with more samples.
    pub fn defaults(scenario: Scenario) -> Self {
        let second_moments = matches!(scenario, Scenario::Variance | Scenario::FdtDrift);
        Self {
            scenario,
            gamma: 1.0,
            cutoff: 50.0,
            mass: 1.0,
            kbt: 10.0,
            hbar: Hbar::Auto,
            force: if scenario == Scenario::FdtDrift { 1.0 } else { 0.0 },
            n_modes: 4000,
            omega_max: 2000.0,
            t_max: if second_moments { 6.0 } else { 5.0 },
            t_steps: 50,
            n_samples: if second_moments { 40_000 } else { 10_000 },
            seed: 42,
            out_dir: PathBuf::from("out"),
        }
    }

    pub fn hbar_value(&self) -> f64 {
        match self.hbar {
            Hbar::Fixed(h) => h,
            Hbar::Auto => {
                let scale = if self.kbt > 0.0 { self.kbt } else { 1.0 };
                scale / (100.0 * self.omega_max)
            }
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        if !path.exists() {
            return Err(ConfigError::MissingFile(path.to_owned()));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Unreadable { path: path.to_owned(), reason: e.to_string() })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: HashMap<String, (usize, String)> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .filter(|(k, v)| !k.is_empty() && !v.is_empty())
                .ok_or_else(|| ConfigError::Syntax { line, text: content.to_owned() })?;
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey { line, key: key.to_owned() });
            }
            if let Some((first, _)) = entries.get(key) {
                return Err(ConfigError::DuplicateKey { line, key: key.to_owned(), first: *first });
            }
            entries.insert(key.to_owned(), (line, value.to_owned()));
        }

        let scenario = match entries.get("scenario") {
            Some((_, v)) => v.parse().map_err(|_| ConfigError::Invalid {
                key: "scenario".into(),
                reason: format!(
                    "`{v}` is not one of {}",
                    Scenario::ALL.map(|s| s.name()).join(", ")
                ),
            })?,
            None => Scenario::Canonical,
        };
        let mut cfg = Self::defaults(scenario);
        let get = |k: &str| entries.get(k).map(|(_, v)| v.as_str());
        if let Some(v) = get("gamma") {
            cfg.gamma = number(v, "gamma")?;
        }
        if let Some(v) = get("Gamma") {
            cfg.cutoff = number(v, "Gamma")?;
        }
        if let Some(v) = get("m") {
            cfg.mass = number(v, "m")?;
        }
        if let Some(v) = get("kBT") {
            cfg.kbt = number(v, "kBT")?;
        }
        if let Some(v) = get("hbar") {
            cfg.hbar = if v == "auto" { Hbar::Auto } else { Hbar::Fixed(number(v, "hbar")?) };
        }
        if let Some(v) = get("F0") {
            cfg.force = number(v, "F0")?;
        }
        if let Some(v) = get("N") {
            cfg.n_modes = integer(v, "N")?;
        }
        if let Some(v) = get("omega_max") {
            cfg.omega_max = number(v, "omega_max")?;
        }
        if let Some(v) = get("t_max") {
            cfg.t_max = number(v, "t_max")?;
        }
        if let Some(v) = get("t_steps") {
            cfg.t_steps = integer(v, "t_steps")?;
        }
        if let Some(v) = get("n_samples") {
            cfg.n_samples = integer(v, "n_samples")?;
        }
        if let Some(v) = get("seed") {
            cfg.seed = integer(v, "seed")?;
        }
        if let Some(v) = get("out_dir") {
            cfg.out_dir = PathBuf::from(v);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, reason: &str| Err(ConfigError::Invalid { key: key.into(), reason: reason.into() });
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad("gamma", "must be positive");
        }
        if !(self.cutoff > self.gamma && self.cutoff.is_finite()) {
            return bad("Gamma", "must exceed gamma");
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return bad("m", "must be positive");
        }
        if !(self.kbt >= 0.0 && self.kbt.is_finite()) {
            return bad("kBT", "must be non-negative");
        }
        if let Hbar::Fixed(h) = self.hbar {
            if !(h > 0.0 && h.is_finite()) {
                return bad("hbar", "must be positive or `auto`");
            }
        }
        if !self.force.is_finite() {
            return bad("F0", "must be finite");
        }
        if self.n_modes < 100 {
            return bad("N", "must be at least 100");
        }
        if !(self.omega_max >= 10.0 * self.cutoff && self.omega_max.is_finite()) {
            return bad("omega_max", "must be at least 10 * Gamma");
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad("t_max", "must be positive");
        }
        if self.t_steps < 2 {
            return bad("t_steps", "must be at least 2");
        }
        let min_samples = if self.scenario == Scenario::Correlation { 1000 } else { 100 };
        if self.n_samples < min_samples {
            return bad("n_samples", &format!("must be at least {min_samples} for this scenario"));
        }
        Ok(())
    }

    /// `key = value` lines for reports; round-trips through [`RunConfig::parse`].
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let hbar = match self.hbar {
            Hbar::Auto => format!("auto ({:e})", self.hbar_value()),
            Hbar::Fixed(h) => h.to_string(),
        };
        vec![
            ("scenario", self.scenario.to_string()),
            ("gamma", self.gamma.to_string()),
            ("Gamma", self.cutoff.to_string()),
            ("m", self.mass.to_string()),
            ("kBT", self.kbt.to_string()),
            ("hbar", hbar),
            ("F0", self.force.to_string()),
            ("N", self.n_modes.to_string()),
            ("omega_max", self.omega_max.to_string()),
            ("t_max", self.t_max.to_string()),
            ("t_steps", self.t_steps.to_string()),
            ("n_samples", self.n_samples.to_string()),
            ("seed", self.seed.to_string()),
            ("out_dir", self.out_dir.display().to_string()),
        ]
    }
}

fn number(value: &str, key: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|x| !x.is_nan())
        .ok_or_else(|| ConfigError::TypeMismatch { key: key.into(), value: value.into(), expected: "a real number" })
}

fn integer<I: FromStr>(value: &str, key: &str) -> Result<I, ConfigError> {
    value.parse().map_err(|_| ConfigError::TypeMismatch {
        key: key.into(),
        value: value.into(),
        expected: "a non-negative integer",
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = RunConfig::parse("scenario = canonical\n").unwrap();
        assert_eq!(cfg, RunConfig::defaults(Scenario::Canonical));
        assert_eq!((cfg.gamma, cfg.cutoff, cfg.mass, cfg.kbt), (1.0, 50.0, 1.0, 10.0));
        assert_eq!((cfg.n_modes, cfg.omega_max, cfg.t_max, cfg.t_steps), (4000, 2000.0, 5.0, 50));
        assert_eq!((cfg.n_samples, cfg.seed), (10_000, 42));
        assert_eq!(cfg.hbar_value(), 10.0 / 200_000.0);
    }

    #[test]
    fn comments_whitespace_and_overrides() {
        let text = "# run\n  scenario=fdt_drift   # drift\n\nGamma = 5\ngamma = 1\nhbar = 0.5\nseed = 7\nout_dir = res/a\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.scenario, Scenario::FdtDrift);
        assert_eq!(cfg.force, 1.0);
        assert_eq!(cfg.cutoff, 5.0);
        assert_eq!(cfg.hbar, Hbar::Fixed(0.5));
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.out_dir, PathBuf::from("res/a"));
    }

    #[test]
    fn errors_are_distinct() {
        let unknown = RunConfig::parse("scenario = canonical\nbeta = 2\n").unwrap_err();
        assert_eq!(unknown, ConfigError::UnknownKey { line: 2, key: "beta".into() });
        assert!(unknown.to_string().contains("`beta`"));

        let dup = RunConfig::parse("gamma = 1\ngamma = 2\n").unwrap_err();
        assert_eq!(dup, ConfigError::DuplicateKey { line: 2, key: "gamma".into(), first: 1 });

        let ty = RunConfig::parse("N = many\n").unwrap_err();
        assert!(matches!(ty, ConfigError::TypeMismatch { ref key, .. } if key == "N"));
        assert!(matches!(RunConfig::parse("N = 4000.5\n"), Err(ConfigError::TypeMismatch { .. })));

        let missing = RunConfig::from_file(Path::new("/definitely/not/here.cfg")).unwrap_err();
        assert!(matches!(missing, ConfigError::MissingFile(_)));

        let syntax = RunConfig::parse("gamma 1\n").unwrap_err();
        assert!(matches!(syntax, ConfigError::Syntax { line: 1, .. }));

        let messages: Vec<String> = [unknown, dup, ty, missing, syntax].iter().map(|e| e.to_string()).collect();
        for (i, a) in messages.iter().enumerate() {
            for b in &messages[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn validation() {
        assert!(matches!(RunConfig::parse("scenario = bogus\n"), Err(ConfigError::Invalid { .. })));
        assert!(matches!(RunConfig::parse("Gamma = 0.5\n"), Err(ConfigError::Invalid { ref key, .. }) if key == "Gamma"));
        assert!(RunConfig::parse("t_steps = 1\n").is_err());
        assert!(RunConfig::parse("omega_max = 100\n").is_err());
        assert!(RunConfig::parse("scenario = correlation\nn_samples = 500\n").is_err());
        assert!(RunConfig::parse("Gamma = 5\ngamma = 1\n").is_ok());
    }

    #[test]
    fn pairs_cover_every_key() {
        let cfg = RunConfig::defaults(Scenario::Variance);
        let keys: Vec<&str> = cfg.to_pairs().iter().map(|(k, _)| *k).collect();
        assert_eq!(keys, KEYS);
    }
}
