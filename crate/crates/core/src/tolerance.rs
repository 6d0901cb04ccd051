use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every check in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Max-abs deviation from Hermiticity.
    pub herm: f64,
    /// Eigenvalues in `[-psd, 0)` are clipped; also the support threshold.
    pub psd: f64,
    /// Deviation of the trace from one.
    pub trace: f64,
    /// Reconstruction and identity checks (usually scaled by the dimension).
    pub recon: f64,
    /// Entropy equality and trace/unitality residuals.
    pub eq: f64,
    /// Fixed-point residuals and the eigenvalue-one cut of a fixed-point space.
    pub fix: f64,
    /// Relative gap used to group eigenvalues.
    pub group: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            herm: 1e-9,
            psd: 1e-10,
            trace: 1e-9,
            recon: 1e-10,
            eq: 1e-8,
            fix: 1e-7,
            group: 1e-6,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("herm", self.herm),
            ("psd", self.psd),
            ("trace", self.trace),
            ("recon", self.recon),
            ("eq", self.eq),
            ("fix", self.fix),
            ("group", self.group),
        ];
        for (name, value) in fields {
            if !(0.0..1.0).contains(&value) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} = {value} must lie in [0, 1)"
                )));
            }
        }
        Ok(())
    }

    pub fn with_eq(mut self, eq: f64) -> Self {
        self.eq = eq;
        self
    }

    pub fn with_fix(mut self, fix: f64) -> Self {
        self.fix = fix;
        self
    }

    pub fn with_psd(mut self, psd: f64) -> Self {
        self.psd = psd;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ToleranceConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(ToleranceConfig::default().with_eq(1.0).validate().is_err());
        assert!(ToleranceConfig::default().with_fix(-1e-3).validate().is_err());
        assert!(ToleranceConfig::default().with_psd(f64::NAN).validate().is_err());
    }
}
