use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by the criteria, the oracle and the tracer.
///
/// All values are relative unless noted. The config is an immutable value
/// handed to each operation; nothing here is global.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Imaginary-part and negativity allowance for secular roots, relative to
    /// the root scale `max(1, max |s|)`.
    pub real_tol: f64,
    /// Half-width of the Boundary band around a zero margin.
    pub boundary_tol: f64,
    /// Relative gap at which secular roots are merged into one cluster.
    pub cluster_tol: f64,
    /// Margin band inside which criteria and oracle may legitimately disagree.
    pub band_tol: f64,
    /// `B` counts as degenerate below `eps_b * max(1, P^2)`.
    pub eps_b: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            real_tol: 1e-9,
            boundary_tol: 1e-9,
            cluster_tol: 1e-6,
            band_tol: 1e-6,
            eps_b: 1e-10,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("real_tol", self.real_tol),
            ("boundary_tol", self.boundary_tol),
            ("cluster_tol", self.cluster_tol),
            ("band_tol", self.band_tol),
            ("eps_b", self.eps_b),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must be a positive finite number, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Sets a field by its serialized name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "real_tol" => self.real_tol = value,
            "boundary_tol" => self.boundary_tol = value,
            "cluster_tol" => self.cluster_tol = value,
            "band_tol" => self.band_tol = value,
            "eps_b" => self.eps_b = value,
            other => {
                return Err(Error::InvalidTolerance(format!(
                    "unknown tolerance field {other}"
                )))
            }
        }
        self.validate()
    }

    pub const FIELDS: [&'static str; 5] =
        ["real_tol", "boundary_tol", "cluster_tol", "band_tol", "eps_b"];
}
