//! Pass/fail records and their text rendering.

use std::fmt::Write as _;

/// One judged comparison. `score` is the worst deviation divided by the
/// allowed deviation at the same point, so `score ≤ 1` passes.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub claim: String,
    pub tolerance: String,
    pub max_deviation: f64,
    pub score: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, claim: &str, tolerance: impl Into<String>, max_deviation: f64, score: f64) -> Self {
        Self {
            name: name.to_owned(),
            claim: claim.to_owned(),
            tolerance: tolerance.into(),
            max_deviation,
            score,
            pass: score.is_finite() && score <= 1.0,
        }
    }

    /// Absolute threshold: `score = deviation / tol`.
    pub fn absolute(name: &str, claim: &str, deviation: f64, tol: f64) -> Self {
        Self::new(name, claim, format!("{tol:e} absolute"), deviation, deviation / tol)
    }

    /// Worst point of `|observed − expected| ≤ allowed` over a set.
    pub fn pointwise(
        name: &str,
        claim: &str,
        tolerance: impl Into<String>,
        points: impl IntoIterator<Item = (f64, f64)>,
    ) -> Self {
        let (mut dev, mut score) = (0.0f64, 0.0f64);
        let mut any = false;
        for (d, allowed) in points {
            any = true;
            dev = dev.max(d.abs());
            let r = if d == 0.0 { 0.0 } else { d.abs() / allowed };
            score = if r.is_nan() { f64::INFINITY } else { score.max(r) };
        }
        if !any {
            score = f64::INFINITY;
        }
        Self::new(name, claim, tolerance, dev, score)
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: max deviation {:.3e}, score {:.3} ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.max_deviation,
            self.score,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub parameters: Vec<(&'static str, String)>,
    pub flags: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    /// Flat `key = value` lines.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario = {}", self.scenario);
        let _ = writeln!(s, "pass = {}", self.pass());
        for (k, v) in &self.parameters {
            let _ = writeln!(s, "param.{k} = {v}");
        }
        for (k, v) in &self.flags {
            let _ = writeln!(s, "flag.{k} = {v}");
        }
        for c in &self.checks {
            let p = format!("check.{}", c.name);
            let _ = writeln!(s, "{p}.claim = {}", c.claim);
            let _ = writeln!(s, "{p}.tolerance = {}", c.tolerance);
            let _ = writeln!(s, "{p}.max_deviation = {:e}", c.max_deviation);
            let _ = writeln!(s, "{p}.score = {:e}", c.score);
            let _ = writeln!(s, "{p}.pass = {}", c.pass);
        }
        s
    }
}
