//! Flat JSON run configuration: flags override the file, the file overrides
//! built-in defaults, and every value actually used is recorded.

use super::CliError;
use crate::spectral::parse_rational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::path::Path;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub command: Option<String>,
    pub preset: Option<String>,
    /// Mobility exponent as a number or an exact "p/q" string.
    pub n: Option<Value>,
    #[serde(alias = "N")]
    pub dim: Option<usize>,
    pub m: Option<usize>,
    pub p: Option<f64>,
    pub tol: Option<f64>,
    pub points: Option<usize>,
    pub k_max: Option<usize>,
    pub grid: Option<usize>,
    pub range: Option<String>,
    pub period_cap: Option<f64>,
    pub tau_max: Option<f64>,
    pub spacing: Option<f64>,
    pub amplitude: Option<f64>,
    pub dt_max: Option<f64>,
    pub formats: Option<Vec<String>>,
    pub out: Option<String>,
}

macro_rules! merge_fields {
    ($hi:expr, $lo:expr, $($f:ident),*) => {
        Settings { $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl Settings {
    /// Field-wise `self` over `lower`.
    pub fn over(self, lower: Settings) -> Settings {
        merge_fields!(
            self, lower, command, preset, n, dim, m, p, tol, points, k_max, grid, range, period_cap, tau_max, spacing,
            amplitude, dt_max, formats, out
        )
    }

    /// Reads a flat config, or the `config` object of a previous manifest.
    pub fn load(path: &Path) -> Result<Settings, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let mut value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config {} is not JSON: {e}", path.display())))?;
        if let Some(inner) = value.get("config").filter(|_| value.get("artifacts").is_some()) {
            value = inner.clone();
        }
        serde_json::from_value(value).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }
}

/// Resolves settings and records what each command used.
pub struct Resolver {
    pub settings: Settings,
    pub used: Map<String, Value>,
}

impl Resolver {
    pub fn new(settings: Settings, command: &str) -> Result<Self, CliError> {
        if let Some(c) = settings.command.as_deref().filter(|c| *c != command) {
            return Err(CliError::Validation(format!("config is for command '{c}', not '{command}'")));
        }
        let mut used = Map::new();
        used.insert("command".into(), command.into());
        Ok(Self { settings, used })
    }

    pub fn take<T: Serialize>(&mut self, key: &str, value: Option<T>, default: T) -> T {
        let v = value.unwrap_or(default);
        self.used.insert(key.into(), serde_json::to_value(&v).unwrap_or(Value::Null));
        v
    }

    /// `n` as exact text and as a float.
    pub fn n(&mut self, default: &str) -> Result<(String, f64), CliError> {
        let text = match self.settings.n.clone() {
            None => default.to_string(),
            Some(Value::String(s)) => s,
            Some(Value::Number(x)) => x.to_string(),
            Some(other) => return Err(CliError::Validation(format!("n must be a number or a \"p/q\" string, got {other}"))),
        };
        let r = parse_rational(text.trim()).map_err(|e| CliError::Validation(format!("n = {text}: {e}")))?;
        let x = r.to_f64().ok_or_else(|| CliError::Validation(format!("n = {text} is not representable")))?;
        self.used.insert("n".into(), Value::String(text.trim().to_string()));
        Ok((text.trim().to_string(), x))
    }

    /// `lo:hi` range.
    pub fn range(&mut self, default: &str) -> Result<(f64, f64), CliError> {
        let text = self.take("range", self.settings.range.clone(), default.to_string());
        let bad = || CliError::Validation(format!("range '{text}' must be lo:hi with lo < hi"));
        let (a, b) = text.split_once(':').ok_or_else(bad)?;
        let lo: f64 = a.trim().parse().map_err(|_| bad())?;
        let hi: f64 = b.trim().parse().map_err(|_| bad())?;
        if !(lo < hi) {
            return Err(bad());
        }
        Ok((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let flags = Settings { dim: Some(2), ..Default::default() };
        let file = Settings { dim: Some(3), tol: Some(1e-9), ..Default::default() };
        let s = flags.over(file);
        assert_eq!((s.dim, s.tol), (Some(2), Some(1e-9)));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<Settings>(r#"{"n": 1, "bogus": 2}"#).is_err());
        let s: Settings = serde_json::from_str(r#"{"n": "1/2", "N": 2}"#).unwrap();
        assert_eq!(s.dim, Some(2));
    }
}
