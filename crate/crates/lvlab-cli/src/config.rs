use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::failure::Failure;

/// Run settings: compiled defaults, then the config file, then flags.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Truncation exponent for the Poisson split.
    pub eps: f64,
    /// Work units allowed for the trace split.
    pub work_budget: f64,
    /// Bytes allowed for the largest single allocation a command plans.
    pub memory_budget: f64,
    /// Largest N accepted by trace-verify.
    pub max_n: u64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    /// Relative tolerance of the trace identity.
    pub trace_tolerance: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            eps: 0.1,
            work_budget: 1e9,
            memory_budget: 2e9,
            max_n: 1 << 10,
            seed: 0,
            output_path: None,
            trace_tolerance: 1e-6,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, Failure> {
    value.parse().map_err(|_| Failure::Usage(format!("bad value for {key}: {value}")))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), Failure> {
        match key {
            "eps" => self.eps = parse(key, value)?,
            "work_budget" => self.work_budget = parse(key, value)?,
            "memory_budget" => self.memory_budget = parse(key, value)?,
            "max_n" => self.max_n = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "output_path" => self.output_path = Some(PathBuf::from(value)),
            "trace_tolerance" => self.trace_tolerance = parse(key, value)?,
            _ => return Err(Failure::Usage(format!("unknown config key {key}"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), Failure> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("config line {}: expected key = value", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if !(self.eps > 0.0 && self.eps <= 0.5) {
            return Err(Failure::Usage(format!("eps = {} outside (0, 0.5]", self.eps)));
        }
        if !(self.work_budget > 0.0 && self.memory_budget > 0.0 && self.trace_tolerance > 0.0) {
            return Err(Failure::Usage("budgets and tolerances must be positive".into()));
        }
        Ok(())
    }

    /// One `key=value` list, keys in fixed order; the output path is left out so reruns match byte for byte.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "eps={} work_budget={:e} memory_budget={:e} max_n={} seed={} trace_tolerance={:e}",
            self.eps, self.work_budget, self.memory_budget, self.max_n, self.seed, self.trace_tolerance
        );
        s
    }
}
