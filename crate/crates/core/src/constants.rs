use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for "within tolerance" checks on unit-scaled problems.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Physical constants and the global check tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub hbar: f64,
    pub kb: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            kb: 1.0,
            tol: DEFAULT_TOL,
        }
    }
}

impl Constants {
    pub fn new(hbar: f64, kb: f64) -> Result<Self> {
        let c = Self {
            hbar,
            kb,
            tol: DEFAULT_TOL,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::Validation(format!("hbar must be > 0, got {}", self.hbar)));
        }
        if !(self.kb.is_finite() && self.kb > 0.0) {
            return Err(Error::Validation(format!("kb must be > 0, got {}", self.kb)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Validation(format!("tol must be > 0, got {}", self.tol)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_unit() {
        let c = Constants::default();
        assert_eq!(c.hbar, 1.0);
        assert_eq!(c.kb, 1.0);
        assert_eq!(c.tol, 1e-9);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(Constants::new(0.0, 1.0).is_err());
        assert!(Constants::new(1.0, -2.0).is_err());
        assert!(Constants::new(f64::NAN, 1.0).is_err());
    }
}
