use serde::{Deserialize, Serialize};

use super::{GeigerParams, ThresholdCurve};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorRole {
    Alert,
    Secure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateVariant {
    Gated,
    Ungated,
}

impl GateVariant {
    pub const BOTH: [GateVariant; 2] = [GateVariant::Gated, GateVariant::Ungated];

    pub fn as_str(self) -> &'static str {
        match self {
            GateVariant::Gated => "gated",
            GateVariant::Ungated => "ungated",
        }
    }
}

/// Never/always thresholds resolved at one blinding power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampThreshold {
    pub e_never: f64,
    pub e_always: f64,
}

impl RampThreshold {
    /// Ramp-step click probability for a pulse of `energy_pj`.
    #[inline]
    pub fn click_probability(&self, energy_pj: f64) -> f64 {
        if energy_pj >= self.e_always {
            1.0
        } else if energy_pj < self.e_never {
            0.0
        } else {
            (energy_pj - self.e_never) / (self.e_always - self.e_never)
        }
    }
}

/// One detector: Geiger-mode parameters plus its blinded-mode thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct DetectorModel {
    pub label: String,
    pub role: DetectorRole,
    pub gate_variant: GateVariant,
    pub geiger: GeigerParams,
    e_never: ThresholdCurve,
    e_always: ThresholdCurve,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    label: String,
    role: DetectorRole,
    gate_variant: GateVariant,
    geiger: GeigerParams,
    e_never: ThresholdCurve,
    e_always: ThresholdCurve,
}

impl TryFrom<ModelRepr> for DetectorModel {
    type Error = Error;

    fn try_from(r: ModelRepr) -> Result<Self> {
        Self::new(
            r.label,
            r.role,
            r.gate_variant,
            r.geiger,
            r.e_never,
            r.e_always,
        )
    }
}

impl From<DetectorModel> for ModelRepr {
    fn from(m: DetectorModel) -> Self {
        ModelRepr {
            label: m.label,
            role: m.role,
            gate_variant: m.gate_variant,
            geiger: m.geiger,
            e_never: m.e_never,
            e_always: m.e_always,
        }
    }
}

impl DetectorModel {
    pub fn new(
        label: impl Into<String>,
        role: DetectorRole,
        gate_variant: GateVariant,
        geiger: GeigerParams,
        e_never: ThresholdCurve,
        e_always: ThresholdCurve,
    ) -> Result<Self> {
        geiger.validate()?;
        let label = label.into();
        for &(i, _) in e_never.points().iter().chain(e_always.points()) {
            if !(e_never.covers(i) && e_always.covers(i)) {
                continue;
            }
            let (n, a) = (e_never.eval(i)?, e_always.eval(i)?);
            if a < n {
                return Err(Error::Schema {
                    source_name: label,
                    row: 0,
                    message: format!("E_always {a} pJ < E_never {n} pJ at {i} mW"),
                });
            }
        }
        Ok(Self {
            label,
            role,
            gate_variant,
            geiger,
            e_never,
            e_always,
        })
    }

    pub fn e_never(&self) -> &ThresholdCurve {
        &self.e_never
    }

    pub fn e_always(&self) -> &ThresholdCurve {
        &self.e_always
    }

    pub fn thresholds_at(&self, power_mw: f64) -> Result<RampThreshold> {
        Ok(RampThreshold {
            e_never: self.e_never.eval(power_mw)?,
            e_always: self.e_always.eval(power_mw)?,
        })
    }

    pub fn with_role(mut self, role: DetectorRole) -> Self {
        self.role = role;
        self
    }
}

/// Ramp-step click probability of a blinded detector: 0 below `E_never(I)`, 1 at or above
/// `E_always(I)`, linear in between.
pub fn blinded_click_probability(
    model: &DetectorModel,
    energy_pj: f64,
    power_mw: f64,
) -> Result<f64> {
    if !(energy_pj >= 0.0) {
        return Err(Error::domain("pulse energy", energy_pj, "[0, ∞) pJ"));
    }
    Ok(model.thresholds_at(power_mw)?.click_probability(energy_pj))
}

/// Bob's six detectors: two on the alert path and four on the secure path.
///
/// Index order everywhere in the crate is `[a1, a2, b1, b2, b3, b4]`; on the secure path
/// b1/b2 measure D/A and b3/b4 measure R/L.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSet {
    pub alert: [DetectorModel; 2],
    pub secure: [DetectorModel; 4],
}

impl DetectorSet {
    pub fn new(alert: [DetectorModel; 2], secure: [DetectorModel; 4]) -> Result<Self> {
        let set = Self { alert, secure };
        set.validate()?;
        Ok(set)
    }

    /// Two copies of `alert` and four of `secure`, labelled a1..b4.
    pub fn uniform(alert: &DetectorModel, secure: &DetectorModel) -> Self {
        let tag = |m: &DetectorModel, role, name: &str| {
            let mut m = m.clone().with_role(role);
            m.label = format!("{name}:{}", m.label);
            m
        };
        Self {
            alert: [
                tag(alert, DetectorRole::Alert, "a1"),
                tag(alert, DetectorRole::Alert, "a2"),
            ],
            secure: [
                tag(secure, DetectorRole::Secure, "b1"),
                tag(secure, DetectorRole::Secure, "b2"),
                tag(secure, DetectorRole::Secure, "b3"),
                tag(secure, DetectorRole::Secure, "b4"),
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (k, m) in self.alert.iter().enumerate() {
            if m.role != DetectorRole::Alert {
                return Err(Error::config(
                    format!("detectors.alert[{k}].role"),
                    "expected `alert`",
                ));
            }
        }
        for (k, m) in self.secure.iter().enumerate() {
            if m.role != DetectorRole::Secure {
                return Err(Error::config(
                    format!("detectors.secure[{k}].role"),
                    "expected `secure`",
                ));
            }
        }
        Ok(())
    }

    pub fn all(&self) -> impl Iterator<Item = &DetectorModel> {
        self.alert.iter().chain(self.secure.iter())
    }

    pub fn geiger(&self) -> [GeigerParams; 6] {
        let mut out = [GeigerParams::ideal(); 6];
        for (slot, m) in out.iter_mut().zip(self.all()) {
            *slot = m.geiger;
        }
        out
    }

    /// The gate variant shared by all six detectors, if they agree.
    pub fn gate_variant(&self) -> Option<GateVariant> {
        let first = self.alert[0].gate_variant;
        self.all().all(|m| m.gate_variant == first).then_some(first)
    }

    /// Thresholds for each detector at its received blinding power. Unpolarized blinding of
    /// total power `I_B` puts `I_B/4` on each alert detector and `I_B/8` on each secure one.
    pub fn thresholds_unpolarized(&self, blinding_mw: f64) -> Result<[RampThreshold; 6]> {
        self.thresholds_at(&[
            blinding_mw / 4.0,
            blinding_mw / 4.0,
            blinding_mw / 8.0,
            blinding_mw / 8.0,
            blinding_mw / 8.0,
            blinding_mw / 8.0,
        ])
    }

    pub fn thresholds_at(&self, powers_mw: &[f64; 6]) -> Result<[RampThreshold; 6]> {
        let mut out = [RampThreshold {
            e_never: 0.0,
            e_always: 0.0,
        }; 6];
        for ((slot, m), &p) in out.iter_mut().zip(self.all()).zip(powers_mw) {
            *slot = m.thresholds_at(p)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(never: f64, always: f64) -> DetectorModel {
        DetectorModel::new(
            "t",
            DetectorRole::Alert,
            GateVariant::Gated,
            GeigerParams::ideal(),
            ThresholdCurve::new(vec![(0.0, never), (1.0, never + 0.5)]).unwrap(),
            ThresholdCurve::new(vec![(0.0, always), (1.0, always + 0.5)]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn ramp_examples() {
        let m = model(1.0, 2.0);
        assert_eq!(blinded_click_probability(&m, 0.0, 0.0).unwrap(), 0.0);
        assert!((blinded_click_probability(&m, 1.5, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(blinded_click_probability(&m, 2.0, 0.0).unwrap(), 1.0);
        assert!((blinded_click_probability(&m, 1.75, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(blinded_click_probability(&m, -1.0, 0.0).is_err());
        assert!(blinded_click_probability(&m, 1.0, 2.0).is_err());
    }

    #[test]
    fn always_below_never_rejected() {
        let r = DetectorModel::new(
            "bad",
            DetectorRole::Alert,
            GateVariant::Gated,
            GeigerParams::ideal(),
            ThresholdCurve::constant(2.0, 0.0, 1.0).unwrap(),
            ThresholdCurve::constant(1.0, 0.0, 1.0).unwrap(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn uniform_set_roles() {
        let s = DetectorSet::uniform(&model(1.0, 2.0), &model(0.5, 0.7));
        assert!(s.validate().is_ok());
        assert_eq!(s.gate_variant(), Some(GateVariant::Gated));
        let t = s.thresholds_unpolarized(0.8).unwrap();
        assert!((t[0].e_never - 1.1).abs() < 1e-12);
        assert!((t[2].e_never - 0.55).abs() < 1e-12);
    }
}
