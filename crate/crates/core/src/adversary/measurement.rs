use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::Phase;

/// Eve's measurement of Alice's pulses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EveMeasurementParams {
    /// Mean photon number of Alice's pulses where Eve intercepts them.
    pub mu: f64,
    /// Fidelity `F_e` of Eve's phase measurement.
    pub fidelity: f64,
    /// Eve's detection efficiency `η_e`.
    pub efficiency: f64,
}

impl EveMeasurementParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(Error::config(
                "mu",
                format!("must be a finite number ≥ 0, got {}", self.mu),
            ));
        }
        if !(0.5..=1.0).contains(&self.fidelity) {
            return Err(Error::config(
                "fidelity",
                format!("must lie in [0.5, 1], got {}", self.fidelity),
            ));
        }
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::config(
                "efficiency",
                format!("must lie in [0, 1], got {}", self.efficiency),
            ));
        }
        Ok(())
    }

    pub fn outcome_probabilities(&self) -> OutcomeProbabilities {
        let (mu, f, eta) = (self.mu, self.fidelity, self.efficiency);
        let half = |x: f64| 0.5 * x;
        let correct = half((-mu * (1.0 - f) * eta).exp() * -(-mu * f * eta).exp_m1());
        let wrong = half((-mu * f * eta).exp() * -(-mu * (1.0 - f) * eta).exp_m1());
        let incompatible = half((-mu * eta / 2.0).exp() * -(-mu * eta / 2.0).exp_m1());
        OutcomeProbabilities {
            correct,
            wrong,
            incompatible,
            no_click: (1.0 - correct - wrong - 2.0 * incompatible).max(0.0),
        }
    }
}

/// Probabilities of Eve's measurement outcomes for one Alice pulse. `incompatible` is the
/// probability for each of the two phases of the conjugate basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbabilities {
    pub correct: f64,
    pub wrong: f64,
    pub incompatible: f64,
    pub no_click: f64,
}

impl OutcomeProbabilities {
    /// Ideal BB84 intercept-resend: a random basis and perfect single-photon detection.
    pub fn ideal_bb84() -> Self {
        Self {
            correct: 0.5,
            wrong: 0.0,
            incompatible: 0.25,
            no_click: 0.0,
        }
    }

    /// Probability that Eve forwards a pulse.
    pub fn forwarded(&self) -> f64 {
        self.correct + self.wrong + 2.0 * self.incompatible
    }

    /// `P_c + P_w`
    pub fn compatible(&self) -> f64 {
        self.correct + self.wrong
    }

    /// `P_w / (P_c + P_w)`, zero when Eve never measures in the compatible basis.
    pub fn compatible_error(&self) -> f64 {
        let c = self.compatible();
        if c > 0.0 {
            self.wrong / c
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EveOutcome {
    Correct,
    Wrong,
    /// A click in the conjugate basis; the index picks one of its two phases.
    Incompatible(u8),
    NoClick,
}

impl EveOutcome {
    /// The phase Eve re-encodes, if she forwards anything.
    pub fn resent_phase(self, alice: Phase) -> Option<Phase> {
        match self {
            EveOutcome::Correct => Some(alice),
            EveOutcome::Wrong => Some(alice.flipped()),
            EveOutcome::Incompatible(k) => Some(alice.incompatible()[k as usize & 1]),
            EveOutcome::NoClick => None,
        }
    }
}

/// Samples one outcome with a single uniform draw.
pub fn eve_measurement_outcome<R: Rng + ?Sized>(
    probs: &OutcomeProbabilities,
    rng: &mut R,
) -> EveOutcome {
    let u: f64 = rng.random();
    let mut edge = probs.correct;
    if u < edge {
        return EveOutcome::Correct;
    }
    edge += probs.wrong;
    if u < edge {
        return EveOutcome::Wrong;
    }
    edge += probs.incompatible;
    if u < edge {
        return EveOutcome::Incompatible(0);
    }
    edge += probs.incompatible;
    if u < edge {
        return EveOutcome::Incompatible(1);
    }
    EveOutcome::NoClick
}
