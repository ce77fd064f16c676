use serde::{Deserialize, Serialize};
use std::str::FromStr;

use sp4_core::decay::{PExponent, SettingKind};
use sp4_core::localfield::{is_prime, Backend, FieldConfig};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(CliError::Config(format!("unknown format {s:?} (json, csv, text)"))),
        }
    }
}

/// Decay settings by name; `group-char2` is the local group over F_2((t)).
pub const DECAY_SETTINGS: [&str; 4] = ["group", "group-char2", "lattice-lp", "lattice-schatten"];

/// Everything a run depends on. Every key is optional in the file; `init`
/// prints the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub backend: Backend,
    /// Residue characteristics to sweep.
    pub p: Vec<u32>,
    /// Absolute precision for the mixed-characteristic backend.
    pub precision: u32,
    /// Coset families use 0 <= j <= jmax, j <= i <= imax.
    pub imax: u32,
    pub jmax: u32,
    /// Lattice coset families stop at this i.
    pub lattice_imax: u32,
    /// Gauss instances are (n+1, 1) for n = 0 ..= gap_max.
    pub gap_max: u32,
    /// Exhaustive sweeps run when the tuple count is at most this.
    pub budget: u64,
    /// Tuples drawn when a family exceeds the budget.
    pub samples: u64,
    /// Required whenever anything is sampled.
    pub seed: Option<u64>,
    /// Replace the second coset fiber offset by the first one.
    pub negative_control: bool,
    pub h2_pairs: Vec<[u32; 2]>,
    /// Largest Heisenberg group accepted.
    pub h2_budget: u64,
    /// Power iteration cross-checks run when |supp| * |H| is at most this.
    pub power_cells: u64,
    pub lp_elements: usize,
    pub lp_max_order: u64,
    pub decay_settings: Vec<String>,
    pub decay_exponents: Vec<String>,
    pub decay_imax: u32,
    pub tail_cycles: usize,
    pub bound_tolerance: f64,
    pub tail_tolerance: f64,
    pub format: Format,
    /// Report path; standard output when absent.
    pub out: Option<String>,
    /// Optional CSV path for the decay tables (setting, p, i, j, phi, source).
    pub table: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: Backend::EqualChar,
            p: vec![3],
            precision: 40,
            imax: 4,
            jmax: 4,
            lattice_imax: 3,
            gap_max: 4,
            budget: 10_000_000,
            samples: 100_000,
            seed: None,
            negative_control: false,
            h2_pairs: vec![[1, 1], [2, 1], [2, 2], [3, 3]],
            h2_budget: 20_000_000,
            power_cells: 4_000_000,
            lp_elements: 500,
            lp_max_order: 729,
            decay_settings: DECAY_SETTINGS.iter().map(|s| s.to_string()).collect(),
            decay_exponents: ["4.5", "5", "8", "inf"].iter().map(|s| s.to_string()).collect(),
            decay_imax: 40,
            tail_cycles: 1000,
            bound_tolerance: 1e-9,
            tail_tolerance: 1e-9,
            format: Format::Json,
            out: None,
            table: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Defaults as printed by `init`, with an explicit seed.
    pub fn template() -> RunConfig {
        RunConfig { seed: Some(1), ..RunConfig::default() }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn field(&self, p: u32) -> Result<FieldConfig, CliError> {
        FieldConfig::new(self.backend, p, self.precision).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn exponents(&self) -> Result<Vec<PExponent>, CliError> {
        self.decay_exponents
            .iter()
            .map(|s| s.parse().map_err(|e: sp4_core::Error| CliError::Config(e.to_string())))
            .collect()
    }

    pub fn decay_kinds(&self) -> Result<Vec<(String, SettingKind, bool)>, CliError> {
        self.decay_settings
            .iter()
            .map(|name| match name.as_str() {
                "group" => Ok((name.clone(), SettingKind::GroupSchatten, false)),
                "group-char2" => Ok((name.clone(), SettingKind::GroupSchatten, true)),
                "lattice-lp" => Ok((name.clone(), SettingKind::LatticeLp, false)),
                "lattice-schatten" => Ok((name.clone(), SettingKind::LatticeSchatten, false)),
                _ => Err(CliError::Config(format!("unknown decay setting {name:?} (expected one of {DECAY_SETTINGS:?})"))),
            })
            .collect()
    }

    /// Checks everything that does not depend on which suite runs.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.p.is_empty() {
            return bad("p must list at least one prime".into());
        }
        for &p in &self.p {
            if !is_prime(p) {
                return bad(format!("p = {p} is not prime"));
            }
            self.field(p)?;
        }
        if self.imax == 0 {
            return bad(format!("imax must be at least 1, got {}", self.imax));
        }
        if self.h2_pairs.iter().any(|[i, j]| j > i || *j == 0) {
            return bad("h2_pairs need 1 <= j <= i".into());
        }
        if !(self.bound_tolerance >= 0.0 && self.tail_tolerance >= 0.0) {
            return bad("tolerances must be nonnegative".into());
        }
        if self.tail_cycles == 0 {
            return bad("tail_cycles must be positive".into());
        }
        self.exponents()?;
        self.decay_kinds()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = RunConfig::template();
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn partial_and_invalid_files() {
        let c = RunConfig::from_toml("p = [3, 5]\nimax = 6\n").unwrap();
        assert_eq!((c.p.clone(), c.imax, c.jmax), (vec![3, 5], 6, 4));
        assert!(RunConfig::from_toml("colour = 1").is_err());
        let c = RunConfig::from_toml("p = [4]").unwrap();
        assert!(c.validate().is_err());
        let c = RunConfig::from_toml("decay_exponents = [\"3.5\", \"x\"]").unwrap();
        assert!(c.validate().is_err());
    }
}
