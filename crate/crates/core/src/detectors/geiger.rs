use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geiger-mode parameters of one single-photon detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeigerParams {
    /// Overall detection efficiency per photon.
    pub efficiency: f64,
    /// Background (dark + afterpulse) click probability per gate slot.
    pub background: f64,
    #[serde(default = "default_gated")]
    pub gated: bool,
}

fn default_gated() -> bool {
    true
}

impl GeigerParams {
    pub fn new(efficiency: f64, background: f64) -> Result<Self> {
        let p = Self {
            efficiency,
            background,
            gated: true,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn ideal() -> Self {
        Self {
            efficiency: 1.0,
            background: 0.0,
            gated: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::domain("efficiency", self.efficiency, "[0, 1]"));
        }
        if !(0.0..1.0).contains(&self.background) {
            return Err(Error::domain("background", self.background, "[0, 1)"));
        }
        Ok(())
    }

    /// Click probability for a pulse carrying `mean_photons` on average; no domain check.
    #[inline]
    pub fn click_probability(&self, mean_photons: f64) -> f64 {
        (self.background - (-self.efficiency * mean_photons).exp_m1()).clamp(0.0, 1.0)
    }
}

/// `c + 1 − exp(−η·μ_eff)`, clamped to [0, 1].
pub fn geiger_click_probability(params: &GeigerParams, mean_photons: f64) -> Result<f64> {
    if !(mean_photons >= 0.0) {
        return Err(Error::domain("mean photon number", mean_photons, "[0, ∞)"));
    }
    Ok(params.click_probability(mean_photons))
}
