use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::TimeBinState;
use crate::qmath::{waveplate, JonesVector, PolarizationState, WaveplateKind};

mod degrees {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(rad: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(rad.to_degrees())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(f64::deserialize(d)?.to_radians())
    }
}

/// Eve's three-stage source: a vertically polarized laser, HWP1 plus an incoherent PMZI
/// to set the purity, then HWP2 and a QWP to rotate the polarization.
///
/// Angles are held in radians and written to config files in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EveSourceConfig {
    #[serde(rename = "theta1_deg", with = "degrees", default)]
    pub theta1: f64,
    #[serde(rename = "theta2_deg", with = "degrees", default)]
    pub theta2: f64,
    #[serde(rename = "qwp_deg", with = "degrees", default = "default_qwp")]
    pub qwp_angle: f64,
    /// Phase encoded on the time-bin qubit.
    #[serde(rename = "phi_e_deg", with = "degrees", default)]
    pub phi_e: f64,
    /// Trigger pulse energy `E_T` in pJ.
    #[serde(rename = "pulse_energy_pj", default)]
    pub pulse_energy: f64,
}

fn default_qwp() -> f64 {
    (-45.0f64).to_radians()
}

impl Default for EveSourceConfig {
    fn default() -> Self {
        Self {
            theta1: 0.0,
            theta2: 0.0,
            qwp_angle: default_qwp(),
            phi_e: 0.0,
            pulse_energy: 0.0,
        }
    }
}

impl EveSourceConfig {
    pub fn with_purity_angle(theta1: f64) -> Self {
        Self {
            theta1,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("theta1", self.theta1),
            ("theta2", self.theta2),
            ("qwp_angle", self.qwp_angle),
            ("phi_e", self.phi_e),
        ] {
            if !v.is_finite() {
                return Err(Error::domain(name, v, "finite angle"));
            }
        }
        if !(self.pulse_energy >= 0.0) || !self.pulse_energy.is_finite() {
            return Err(Error::domain(
                "pulse_energy",
                self.pulse_energy,
                "[0, ∞) pJ",
            ));
        }
        Ok(())
    }

    /// Weight of the laser's own polarization |V⟩ after HWP1 and the incoherent PMZI.
    pub fn mixing_weight(&self) -> f64 {
        (2.0 * self.theta1).cos().powi(2)
    }

    /// `1 − ½ sin²(4θ₁)`
    pub fn purity(&self) -> f64 {
        1.0 - 0.5 * (4.0 * self.theta1).sin().powi(2)
    }
}

/// Polarization and time-bin state produced by Eve's source.
pub fn eve_source_state(config: &EveSourceConfig) -> Result<(PolarizationState, TimeBinState)> {
    config.validate()?;
    let mixed = PolarizationState::mixture(config.mixing_weight(), &JonesVector::vertical())?;
    let rotate = waveplate(WaveplateKind::Quarter, config.qwp_angle)
        * waveplate(WaveplateKind::Half, config.theta2);
    Ok((
        mixed.conjugated(&rotate),
        TimeBinState::encoded(config.phi_e),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn purity_follows_theta1() {
        for (deg, expected) in [
            (0.0, 1.0),
            (10.4, 0.7796),
            (15.0, 0.625),
            (18.9, 0.5309),
            (22.5, 0.5),
        ] {
            let cfg = EveSourceConfig::with_purity_angle(f64::to_radians(deg));
            let (rho, tb) = eve_source_state(&cfg).unwrap();
            assert!((rho.purity() - cfg.purity()).abs() < 1e-12);
            assert!(
                (rho.purity() - expected).abs() < 5e-4,
                "{deg}: {}",
                rho.purity()
            );
            assert!(tb.coherent);
        }
    }

    #[test]
    fn rotation_plates_keep_purity() {
        let mut cfg = EveSourceConfig::with_purity_angle(0.2);
        let p0 = eve_source_state(&cfg).unwrap().0.purity();
        for (t2, q) in [(0.3, 0.1), (1.7, -0.9), (3.0, 2.2)] {
            cfg.theta2 = t2;
            cfg.qwp_angle = q;
            assert!((eve_source_state(&cfg).unwrap().0.purity() - p0).abs() < 1e-12);
        }
    }

    #[test]
    fn degree_serde() {
        let cfg: EveSourceConfig =
            serde_json::from_str(r#"{"theta1_deg": 22.5, "pulse_energy_pj": 3.2}"#).unwrap();
        assert!((cfg.theta1 - std::f64::consts::FRAC_PI_8).abs() < 1e-15);
        assert!((cfg.qwp_angle + std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let back: EveSourceConfig =
            serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert!((back.theta1 - cfg.theta1).abs() < 1e-15);
    }
}
