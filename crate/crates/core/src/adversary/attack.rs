use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    eve_measurement_outcome, eve_source_state, EveMeasurementParams, EveOutcome, EveSourceConfig,
    OutcomeProbabilities,
};
use crate::detectors::{
    DetectorModel, DetectorRole, DetectorSet, GateVariant, GeigerParams, RampThreshold,
    ThresholdCurve, ThresholdData, DETECTOR_COUNT,
};
use crate::error::{Error, Result};
use crate::protocol::{
    detector_energies, faked_state_routing, inbound_operator, secure_detector, Basis,
    BasisSelection, ClickRecord, DetectionContext, Phase, RoutingOutcome,
};
use crate::qmath::{JonesUnitary, JonesVector, PolarizationState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    /// Conventional BB84 intercept-resend: the quantum attack with ideal outcome statistics.
    InterceptResend,
    Quantum,
    Blinding,
    WavelengthBlinding,
    Integrated,
}

impl AttackKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttackKind::InterceptResend => "intercept_resend",
            AttackKind::Quantum => "quantum",
            AttackKind::Blinding => "blinding",
            AttackKind::WavelengthBlinding => "wavelength_blinding",
            AttackKind::Integrated => "integrated",
        }
    }
}

/// Polarization of Eve's continuous blinding light.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlindingLight {
    #[default]
    Unpolarized,
    /// Bloch vector `(x, y, z)`; +z is |H⟩.
    Polarized { bloch: [f64; 3] },
}

impl BlindingLight {
    pub fn state(&self) -> Result<PolarizationState> {
        match self {
            BlindingLight::Unpolarized => Ok(PolarizationState::maximally_mixed()),
            BlindingLight::Polarized { bloch } => PolarizationState::from_bloch(*bloch),
        }
    }
}

/// Probabilities with which Eve picks each attack in an integrated attack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureWeights {
    pub quantum: f64,
    pub blinding: f64,
    pub wavelength: f64,
}

impl MixtureWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("quantum", self.quantum),
            ("blinding", self.blinding),
            ("wavelength", self.wavelength),
        ] {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::config(
                    format!("weights.{name}"),
                    format!("must lie in [0, 1], got {w}"),
                ));
            }
        }
        let sum = self.quantum + self.blinding + self.wavelength;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::WeightSum(sum));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.quantum, self.blinding, self.wavelength]
    }
}

/// Where the blinded-mode thresholds of Bob's detectors come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ThresholdSource {
    /// Threshold CSVs for the detector type on each path.
    Csv {
        alert: PathBuf,
        secure: PathBuf,
        #[serde(default = "default_gate")]
        gate: GateVariant,
        #[serde(default)]
        clamp: bool,
    },
    /// Thresholds independent of blinding power.
    Flat {
        alert_never_pj: f64,
        alert_always_pj: f64,
        secure_never_pj: f64,
        secure_always_pj: f64,
    },
}

fn default_gate() -> GateVariant {
    GateVariant::Gated
}

impl ThresholdSource {
    /// Builds the six-detector set, resolving relative CSV paths against `base`.
    pub fn detector_set(
        &self,
        geiger: &[GeigerParams; DETECTOR_COUNT],
        base: Option<&Path>,
    ) -> Result<DetectorSet> {
        let (alert, secure) = match self {
            ThresholdSource::Csv {
                alert,
                secure,
                gate,
                clamp,
            } => {
                let resolve = |p: &PathBuf| match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p.clone(),
                };
                let policy = if *clamp {
                    crate::detectors::Extrapolation::Clamp
                } else {
                    crate::detectors::Extrapolation::Error
                };
                let load = |p: &PathBuf, role| -> Result<DetectorModel> {
                    let data = ThresholdData::load(resolve(p))?;
                    let pair = data.curves(*gate)?;
                    DetectorModel::new(
                        data.label.clone(),
                        role,
                        *gate,
                        GeigerParams::ideal(),
                        pair.e_never.clone().with_extrapolation(policy),
                        pair.e_always.clone().with_extrapolation(policy),
                    )
                };
                (
                    load(alert, DetectorRole::Alert)?,
                    load(secure, DetectorRole::Secure)?,
                )
            }
            ThresholdSource::Flat {
                alert_never_pj,
                alert_always_pj,
                secure_never_pj,
                secure_always_pj,
            } => {
                let flat = |label: &str, role, never: f64, always: f64| -> Result<DetectorModel> {
                    let curve = |e: f64| {
                        ThresholdCurve::constant(e, 0.0, f64::MAX)
                            .map(|c| c.with_extrapolation(crate::detectors::Extrapolation::Clamp))
                    };
                    DetectorModel::new(
                        label,
                        role,
                        GateVariant::Gated,
                        GeigerParams::ideal(),
                        curve(never)?,
                        curve(always)?,
                    )
                };
                (
                    flat(
                        "flat-alert",
                        DetectorRole::Alert,
                        *alert_never_pj,
                        *alert_always_pj,
                    )?,
                    flat(
                        "flat-secure",
                        DetectorRole::Secure,
                        *secure_never_pj,
                        *secure_always_pj,
                    )?,
                )
            }
        };
        let mut set = DetectorSet::uniform(&alert, &secure);
        for (m, g) in set
            .alert
            .iter_mut()
            .chain(set.secure.iter_mut())
            .zip(geiger)
        {
            m.geiger = *g;
        }
        Ok(set)
    }
}

/// One attack strategy and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackConfig {
    pub kind: AttackKind,
    /// Eve's source; sets the trigger polarization `ρ_T` and pulse energy `E_T`.
    #[serde(default)]
    pub source: EveSourceConfig,
    /// Total blinding power `I_B` entering Bob's receiver, mW.
    #[serde(default)]
    pub blinding_power_mw: f64,
    #[serde(default)]
    pub blinding_light: BlindingLight,
    /// Eve fires exactly the targeted secure detector instead of relying on the ramp.
    #[serde(default)]
    pub perfect_control: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<MixtureWeights>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdSource>,
}

impl AttackConfig {
    pub fn new(kind: AttackKind) -> Self {
        Self {
            kind,
            source: EveSourceConfig::default(),
            blinding_power_mw: 0.0,
            blinding_light: BlindingLight::Unpolarized,
            perfect_control: false,
            weights: None,
            thresholds: None,
        }
    }

    /// Intercept-resend with a pure trigger state.
    pub fn intercept_resend() -> Self {
        Self::new(AttackKind::InterceptResend)
    }

    /// Eve's measurement statistics: ideal BB84 for intercept-resend, `eve` otherwise.
    pub fn outcome_probabilities(&self, eve: &EveMeasurementParams) -> OutcomeProbabilities {
        match self.kind {
            AttackKind::InterceptResend => OutcomeProbabilities::ideal_bb84(),
            _ => eve.outcome_probabilities(),
        }
    }

    pub fn trigger_state(&self) -> Result<PolarizationState> {
        Ok(eve_source_state(&self.source)?.0)
    }

    pub fn validate(&self) -> Result<()> {
        self.source
            .validate()
            .map_err(|e| Error::config("attack.source", e.to_string()))?;
        if !(self.blinding_power_mw >= 0.0) || !self.blinding_power_mw.is_finite() {
            return Err(Error::config(
                "attack.blinding_power_mw",
                "must be a finite number ≥ 0",
            ));
        }
        self.blinding_light
            .state()
            .map_err(|e| Error::config("attack.blinding_light", e.to_string()))?;
        let needs_thresholds = matches!(self.kind, AttackKind::Blinding)
            || (self.kind == AttackKind::Integrated
                && self.weights.is_some_and(|w| w.blinding > 0.0));
        if needs_thresholds && self.thresholds.is_none() {
            return Err(Error::config(
                "attack.thresholds",
                "blinding attacks need detector thresholds",
            ));
        }
        if self.kind == AttackKind::Integrated {
            match &self.weights {
                None => {
                    return Err(Error::config(
                        "attack.weights",
                        "integrated attacks need mixture weights",
                    ))
                }
                Some(w) => w.validate()?,
            }
        }
        Ok(())
    }
}

/// A pulse Eve sends on to Bob.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForwardedPulse {
    pub outcome: EveOutcome,
    pub phase: Phase,
    pub mean_photons: f64,
    pub polarization: PolarizationState,
}

/// Eve measures Alice's pulse and, on a click, forwards a faked state of mean photon number
/// `mu_e` with her source polarization and the phase she measured.
pub fn run_quantum_attack<R: Rng + ?Sized>(
    alice: Phase,
    probs: &OutcomeProbabilities,
    trigger: &PolarizationState,
    mu_e: f64,
    rng: &mut R,
) -> (EveOutcome, Option<ForwardedPulse>) {
    let outcome = eve_measurement_outcome(probs, rng);
    let pulse = outcome.resent_phase(alice).map(|phase| ForwardedPulse {
        outcome,
        phase,
        mean_photons: mu_e,
        polarization: *trigger,
    });
    (outcome, pulse)
}

/// Blinded-mode thresholds of Bob's detectors during an attack.
#[derive(Debug, Clone, PartialEq)]
pub enum BlindingThresholds {
    /// Unpolarized blinding: fixed thresholds at `I_B/4` (alert) and `I_B/8` (secure).
    Fixed([RampThreshold; DETECTOR_COUNT]),
    /// Polarized blinding: the received powers follow the randomizer every round.
    Polarized {
        set: DetectorSet,
        light: PolarizationState,
        blinding_mw: f64,
    },
}

impl BlindingThresholds {
    pub fn new(set: &DetectorSet, light: &BlindingLight, blinding_mw: f64) -> Result<Self> {
        match light {
            BlindingLight::Unpolarized => Ok(Self::Fixed(set.thresholds_unpolarized(blinding_mw)?)),
            BlindingLight::Polarized { .. } => Ok(Self::Polarized {
                set: set.clone(),
                light: light.state()?,
                blinding_mw,
            }),
        }
    }

    /// Thresholds for one round. With polarized light a fraction `r_a` of the blinding power
    /// reaches the alert path: each alert detector gets `½ r_a I_B`, each secure one `¼ r_b I_B`.
    pub fn for_round(&self, inbound: &JonesUnitary) -> Result<[RampThreshold; DETECTOR_COUNT]> {
        match self {
            Self::Fixed(t) => Ok(*t),
            Self::Polarized {
                set,
                light,
                blinding_mw,
            } => {
                let r_a = light
                    .conjugated(inbound)
                    .population(&JonesVector::horizontal());
                let (ia, ib) = (0.5 * r_a * blinding_mw, 0.25 * (1.0 - r_a) * blinding_mw);
                set.thresholds_at(&[ia, ia, ib, ib, ib, ib])
            }
        }
    }
}

/// Fixed inputs of a blinding attack.
#[derive(Debug, Clone, PartialEq)]
pub struct BlindingSetup {
    pub probs: OutcomeProbabilities,
    pub trigger: PolarizationState,
    pub pulse_energy_pj: f64,
    pub thresholds: BlindingThresholds,
    pub perfect_control: bool,
    pub selection: BasisSelection,
}

/// One round of a blinding attack as seen by Bob.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlindingRound {
    pub outcome: EveOutcome,
    pub forwarded: Option<Phase>,
    pub routing: Option<RoutingOutcome>,
    pub record: ClickRecord,
}

/// Eve blinds all six detectors, measures Alice's pulse, and on a click sends a bright
/// trigger pulse of energy `E_T` encoding her result. The trigger reaches the detectors in
/// the energy fractions of [`detector_energies`]; each detector clicks per its ramp.
pub fn run_blinding_attack<R: Rng + ?Sized>(
    alice: Phase,
    randomizer: &JonesUnitary,
    switched: bool,
    setup: &BlindingSetup,
    rng: &mut R,
) -> Result<BlindingRound> {
    let outcome = eve_measurement_outcome(&setup.probs, rng);
    let alert_basis = Basis::random(rng);
    let mut record = ClickRecord {
        switched,
        ..ClickRecord::none(alert_basis)
    };
    let Some(phase) = outcome.resent_phase(alice) else {
        return Ok(BlindingRound {
            outcome,
            forwarded: None,
            routing: None,
            record,
        });
    };

    let inbound = inbound_operator(randomizer, switched);
    let routing = faked_state_routing(&setup.trigger, &inbound);
    let thresholds = setup.thresholds.for_round(&inbound)?;
    // A bright classical pulse: the matched detector receives the whole share.
    let ctx = DetectionContext {
        fidelity: 1.0,
        selection: setup.selection,
    };
    let energies = detector_energies(setup.pulse_energy_pj, &routing, phase, alert_basis, &ctx);
    for k in 0..DETECTOR_COUNT {
        record.clicks[k] = rng.random::<f64>() < thresholds[k].click_probability(energies[k]);
    }
    if setup.perfect_control {
        let target = secure_detector(phase);
        for k in 2..DETECTOR_COUNT {
            record.clicks[k] = k == target;
        }
    }
    Ok(BlindingRound {
        outcome,
        forwarded: Some(phase),
        routing: Some(routing),
        record,
    })
}

/// Wavelength-dependent blinding, granted to Eve in its strongest form: every forwarded
/// pulse fires exactly the secure detector she targets and never an alert detector. Bob's
/// switch still remaps that click to an alert when applied.
pub fn run_wavelength_blinding_attack<R: Rng + ?Sized>(
    alice: Phase,
    switched: bool,
    probs: &OutcomeProbabilities,
    rng: &mut R,
) -> (EveOutcome, Option<Phase>, ClickRecord) {
    let outcome = eve_measurement_outcome(probs, rng);
    let alert_basis = Basis::random(rng);
    let mut record = ClickRecord {
        switched,
        ..ClickRecord::none(alert_basis)
    };
    let forwarded = outcome.resent_phase(alice);
    if let Some(phase) = forwarded {
        record.clicks[secure_detector(phase)] = true;
    }
    (outcome, forwarded, record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::haar_random_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn flat_set() -> DetectorSet {
        ThresholdSource::Flat {
            alert_never_pj: 1.0,
            alert_always_pj: 1.2,
            secure_never_pj: 0.6,
            secure_always_pj: 0.7,
        }
        .detector_set(&[GeigerParams::ideal(); 6], None)
        .unwrap()
    }

    fn setup(e_t: f64) -> BlindingSetup {
        let set = flat_set();
        BlindingSetup {
            probs: OutcomeProbabilities::ideal_bb84(),
            trigger: PolarizationState::pure(&JonesVector::horizontal()),
            pulse_energy_pj: e_t,
            thresholds: BlindingThresholds::new(&set, &BlindingLight::Unpolarized, 1.0).unwrap(),
            perfect_control: false,
            selection: BasisSelection::Passive,
        }
    }

    #[test]
    fn weak_trigger_never_clicks() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = setup(0.5);
        for _ in 0..5000 {
            let u = haar_random_unitary(&mut rng);
            let r = run_blinding_attack(Phase::Zero, &u, false, &s, &mut rng).unwrap();
            assert!(r.record.clicks.iter().all(|c| !c));
        }
    }

    #[test]
    fn bright_trigger_into_alert_path_fires_matched_alert() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = setup(1e6);
        // U = identity and an H trigger: everything lands on the alert path.
        let mut matched = 0;
        for _ in 0..2000 {
            let r =
                run_blinding_attack(Phase::Zero, &JonesUnitary::identity(), false, &s, &mut rng)
                    .unwrap();
            assert_eq!(r.routing.unwrap().p_alert, 1.0);
            if r.record.alert_basis == Phase::Zero.basis() {
                matched += 1;
                assert!(r.record.clicks[0]);
            }
        }
        assert!(matched > 0);
    }

    #[test]
    fn wavelength_attack_alerts_only_when_switched() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let probs = EveMeasurementParams {
            mu: 1.0,
            fidelity: 0.95,
            efficiency: 0.5,
        }
        .outcome_probabilities();
        for k in 0..4000 {
            let switched = k % 3 == 0;
            let (_, fwd, rec) =
                run_wavelength_blinding_attack(Phase::HalfPi, switched, &probs, &mut rng);
            assert_eq!(rec.alert(), switched && fwd.is_some());
        }
    }

    #[test]
    fn weights_validation() {
        let w = MixtureWeights {
            quantum: 0.5,
            blinding: 0.3,
            wavelength: 0.3,
        };
        assert!(matches!(w.validate(), Err(Error::WeightSum(_))));
        let mut cfg = AttackConfig::new(AttackKind::Integrated);
        assert!(cfg.validate().is_err());
        cfg.weights = Some(MixtureWeights {
            quantum: 1.0,
            blinding: 0.0,
            wavelength: 0.0,
        });
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn polarized_blinding_follows_randomizer() {
        let set = flat_set();
        let light = BlindingLight::Polarized {
            bloch: [0.0, 0.0, 1.0],
        };
        let t = BlindingThresholds::new(&set, &light, 2.0).unwrap();
        // Flat curves: the thresholds do not move, but the call must succeed for any U.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = t.for_round(&haar_random_unitary(&mut rng)).unwrap();
        assert_eq!(r[0].e_never, 1.0);
    }
}
