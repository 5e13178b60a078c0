use serde::{Deserialize, Serialize};

use crate::adversary::EveMeasurementParams;
use crate::detectors::{GeigerParams, DETECTOR_COUNT};
use crate::error::{Error, Result};
use crate::protocol::{faked_state_routing, inbound_operator, BasisSelection, DetectionContext};
use crate::qmath::{overlap_bounds, JonesUnitary, PolarizationState};

/// Physical parameters of the link, Bob's receiver, and Eve's measurement apparatus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemRepr", into = "SystemRepr")]
pub struct SystemParams {
    /// `[a1, a2, b1, b2, b3, b4]`
    pub detectors: [GeigerParams; DETECTOR_COUNT],
    /// Fidelity `F` of Bob's phase measurement.
    pub fidelity: f64,
    /// Mean photon number of the pulses Bob receives in an honest run.
    pub mu: f64,
    pub eve: EveMeasurementParams,
    /// Mean photon number of Eve's forwarded pulses.
    pub mu_e: f64,
    /// Fraction of rounds in which Bob swaps the alert and secure paths.
    pub switch_rate: f64,
    pub selection: BasisSelection,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EveRepr {
    /// Defaults to the system's `mu`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    fidelity: f64,
    efficiency: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemRepr {
    fidelity: f64,
    mu: f64,
    mu_e: f64,
    #[serde(default)]
    switch_rate: f64,
    #[serde(default)]
    selection: BasisSelection,
    eve: EveRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alert_detector: Option<GeigerParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    secure_detector: Option<GeigerParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    detectors: Option<Vec<GeigerParams>>,
}

impl TryFrom<SystemRepr> for SystemParams {
    type Error = String;

    fn try_from(r: SystemRepr) -> std::result::Result<Self, String> {
        let detectors = match (r.detectors, r.alert_detector, r.secure_detector) {
            (Some(list), None, None) => <[GeigerParams; DETECTOR_COUNT]>::try_from(list)
                .map_err(|l| format!("`detectors` needs {DETECTOR_COUNT} entries, got {}", l.len()))?,
            (None, Some(a), Some(b)) => [a, a, b, b, b, b],
            _ => return Err("give either `detectors` (six entries) or both `alert_detector` and `secure_detector`".into()),
        };
        Ok(Self {
            detectors,
            fidelity: r.fidelity,
            mu: r.mu,
            eve: EveMeasurementParams {
                mu: r.eve.mu.unwrap_or(r.mu),
                fidelity: r.eve.fidelity,
                efficiency: r.eve.efficiency,
            },
            mu_e: r.mu_e,
            switch_rate: r.switch_rate,
            selection: r.selection,
        })
    }
}

impl From<SystemParams> for SystemRepr {
    fn from(p: SystemParams) -> Self {
        Self {
            fidelity: p.fidelity,
            mu: p.mu,
            mu_e: p.mu_e,
            switch_rate: p.switch_rate,
            selection: p.selection,
            eve: EveRepr {
                mu: Some(p.eve.mu),
                fidelity: p.eve.fidelity,
                efficiency: p.eve.efficiency,
            },
            alert_detector: None,
            secure_detector: None,
            detectors: Some(p.detectors.to_vec()),
        }
    }
}

impl SystemParams {
    /// Identical alert detectors and identical secure detectors.
    pub fn uniform(
        alert: GeigerParams,
        secure: GeigerParams,
        fidelity: f64,
        eve: EveMeasurementParams,
        mu_e: f64,
    ) -> Self {
        Self {
            detectors: [alert, alert, secure, secure, secure, secure],
            fidelity,
            mu: eve.mu,
            eve,
            mu_e,
            switch_rate: 0.0,
            selection: BasisSelection::Passive,
        }
    }

    /// Perfect detectors and measurements everywhere, one photon per pulse on average.
    pub fn ideal() -> Self {
        let eve = EveMeasurementParams {
            mu: 1.0,
            fidelity: 1.0,
            efficiency: 1.0,
        };
        Self::uniform(GeigerParams::ideal(), GeigerParams::ideal(), 1.0, eve, 1.0)
    }

    /// A laboratory-scale parameter set used throughout the tests and examples.
    pub fn desk() -> Self {
        let det = GeigerParams {
            efficiency: 0.25,
            background: 1e-4,
            gated: true,
        };
        let eve = EveMeasurementParams {
            mu: 0.5,
            fidelity: 0.98,
            efficiency: 0.6,
        };
        Self::uniform(det, det, 0.97, eve, 1.0)
    }

    pub fn context(&self) -> DetectionContext {
        DetectionContext {
            fidelity: self.fidelity,
            selection: self.selection,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, d) in self.detectors.iter().enumerate() {
            d.validate()
                .map_err(|e| Error::config(format!("system.detectors[{i}]"), e.to_string()))?;
        }
        if !(0.5..=1.0).contains(&self.fidelity) {
            return Err(Error::config(
                "system.fidelity",
                format!("must lie in [0.5, 1], got {}", self.fidelity),
            ));
        }
        for (name, v) in [("system.mu", self.mu), ("system.mu_e", self.mu_e)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::config(
                    name,
                    format!("must be a finite number ≥ 0, got {v}"),
                ));
            }
        }
        if !(0.0..=1.0).contains(&self.switch_rate) {
            return Err(Error::config(
                "system.switch_rate",
                format!("must lie in [0, 1], got {}", self.switch_rate),
            ));
        }
        self.eve.validate().map_err(|e| match e {
            Error::Config { field, message } => {
                Error::config(format!("system.eve.{field}"), message)
            }
            other => other,
        })
    }
}

/// How Bob's randomizer is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomizerModel {
    /// Fresh Haar-random unitary every round.
    #[default]
    Haar,
    /// One unitary held for the whole run.
    Fixed(JonesUnitary),
}

/// Distribution of `p_a`, the fraction of injected light routed to the alert path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlertFraction {
    /// Uniform on `[lo, hi]`: the Haar case, with the interval set by the purity.
    Uniform {
        lo: f64,
        hi: f64,
    },
    Point(f64),
}

impl AlertFraction {
    /// For a Haar randomizer `p_a` is uniform between the two eigenvalues of `ρ`.
    pub fn haar(purity: f64) -> Result<Self> {
        let b = overlap_bounds(purity)?;
        Ok(Self::Uniform {
            lo: b.min,
            hi: b.max,
        })
    }

    pub fn for_randomizer(model: &RandomizerModel, trigger: &PolarizationState) -> Result<Self> {
        match model {
            RandomizerModel::Haar => Self::haar(trigger.purity().clamp(0.5, 1.0)),
            RandomizerModel::Fixed(u) => Ok(Self::Point(
                faked_state_routing(trigger, &inbound_operator(u, false)).p_alert,
            )),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::Point(p) => p,
        }
    }
}
