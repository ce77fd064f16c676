use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Which local field is being modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Laurent series F_p((t)) with exact finite support.
    EqualChar,
    /// The p-adic numbers Q_p at a fixed absolute precision.
    MixedChar,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::EqualChar => "equal-char",
            Backend::MixedChar => "mixed-char",
        })
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal-char" | "equal" | "laurent" => Ok(Backend::EqualChar),
            "mixed-char" | "mixed" | "padic" => Ok(Backend::MixedChar),
            other => Err(Error::Parse(format!("unknown backend {other:?}"))),
        }
    }
}

/// Largest residue characteristic accepted; digits are stored as `u16`.
pub const MAX_PRIME: u32 = 65521;

/// Default support guard for the equal-characteristic backend.
pub const DEFAULT_SUPPORT_GUARD: u32 = 4096;

/// Parameters of a local field.
///
/// For `MixedChar`, `precision` is the absolute precision N: every element is
/// known modulo p^N when freshly constructed. For `EqualChar` it bounds the
/// width of the coefficient window and only guards against runaway growth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldConfig {
    pub backend: Backend,
    pub p: u32,
    pub precision: u32,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldConfig {
    pub fn new(backend: Backend, p: u32, precision: u32) -> Result<Self> {
        if !is_prime(p) || p > MAX_PRIME {
            return Err(Error::Domain(format!("p = {p} is not a supported prime")));
        }
        if precision == 0 {
            return Err(Error::Domain("precision must be at least 1".into()));
        }
        Ok(FieldConfig { backend, p, precision })
    }

    /// F_p((t)) with the default support guard.
    pub fn equal_char(p: u32) -> Result<Self> {
        Self::new(Backend::EqualChar, p, DEFAULT_SUPPORT_GUARD)
    }

    /// Q_p known modulo p^precision.
    pub fn mixed_char(p: u32, precision: u32) -> Result<Self> {
        Self::new(Backend::MixedChar, p, precision)
    }

    /// Cardinality of the residue field.
    pub fn q(&self) -> u32 {
        self.p
    }

    /// Valuation of 2; `None` in characteristic 2 where 2 = 0.
    pub fn v0(&self) -> Option<u32> {
        match (self.backend, self.p) {
            (Backend::EqualChar, 2) => None,
            (Backend::MixedChar, 2) => Some(1),
            _ => Some(0),
        }
    }

    /// Characteristic of the field itself (0 for Q_p).
    pub fn characteristic(&self) -> u32 {
        match self.backend {
            Backend::EqualChar => self.p,
            Backend::MixedChar => 0,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.backend == Backend::EqualChar
    }
}

impl fmt::Display for FieldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.backend {
            Backend::EqualChar => write!(f, "F_{}((t))", self.p),
            Backend::MixedChar => write!(f, "Q_{} mod p^{}", self.p, self.precision),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let ps: Vec<u32> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(FieldConfig::equal_char(4).is_err());
        assert!(FieldConfig::mixed_char(3, 0).is_err());
    }

    #[test]
    fn v0_table() {
        assert_eq!(FieldConfig::equal_char(3).unwrap().v0(), Some(0));
        assert_eq!(FieldConfig::equal_char(2).unwrap().v0(), None);
        assert_eq!(FieldConfig::mixed_char(2, 20).unwrap().v0(), Some(1));
        assert_eq!(FieldConfig::mixed_char(5, 20).unwrap().v0(), Some(0));
    }

    #[test]
    fn backend_names_round_trip() {
        for b in [Backend::EqualChar, Backend::MixedChar] {
            assert_eq!(b.to_string().parse::<Backend>().unwrap(), b);
        }
    }
}
