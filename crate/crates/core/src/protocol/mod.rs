//! Bob's transceiver: the genuine-photon roundtrip, routing of injected light, gated
//! detection on six detectors, and BB84 sifting with squashing.
//!
//! The key is a time-bin qubit `(|t_l⟩ + e^{iφ}|t_s⟩)/√2`. Bob's PMZI maps it onto the
//! polarization `(|H⟩ + e^{iφ}|V⟩)/√2` on whichever output path the returning polarization
//! selects: `|V⟩` after the inbound randomizer pass leads to the secure path b, `|H⟩` to the
//! alert path a. Phases 0/π form the D/A basis and π/2, 3π/2 the R/L basis; 0 and π/2 carry
//! bit 0.

mod detection;
mod roundtrip;

pub use detection::{
    bob_measurement, detector_energies, secure_detector, sift_and_squash, BasisSelection,
    ClickRecord, DetectionContext, Measurement, SiftTally,
};
pub use roundtrip::{
    faked_state_path_operator, faked_state_routing, genuine_roundtrip, inbound_operator,
    trace_genuine, GenuineTrace, PhotonRound, RoutingOutcome, TimeBinState, GATED_WINDOW_FRACTION,
};

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Diagonal/antidiagonal: phases 0 and π.
    Da,
    /// Right/left circular: phases π/2 and 3π/2.
    Rl,
}

impl Basis {
    pub fn other(self) -> Self {
        match self {
            Basis::Da => Basis::Rl,
            Basis::Rl => Basis::Da,
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.random::<bool>() {
            Basis::Rl
        } else {
            Basis::Da
        }
    }
}

/// One of the four BB84 phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Zero,
    Pi,
    HalfPi,
    ThreeHalvesPi,
}

impl Phase {
    /// In the order 0, π, π/2, 3π/2.
    pub const ALL: [Phase; 4] = [Phase::Zero, Phase::Pi, Phase::HalfPi, Phase::ThreeHalvesPi];

    pub fn radians(self) -> f64 {
        match self {
            Phase::Zero => 0.0,
            Phase::Pi => PI,
            Phase::HalfPi => FRAC_PI_2,
            Phase::ThreeHalvesPi => 3.0 * FRAC_PI_2,
        }
    }

    pub fn basis(self) -> Basis {
        match self {
            Phase::Zero | Phase::Pi => Basis::Da,
            Phase::HalfPi | Phase::ThreeHalvesPi => Basis::Rl,
        }
    }

    pub fn bit(self) -> bool {
        matches!(self, Phase::Pi | Phase::ThreeHalvesPi)
    }

    pub fn from_basis_bit(basis: Basis, bit: bool) -> Self {
        match (basis, bit) {
            (Basis::Da, false) => Phase::Zero,
            (Basis::Da, true) => Phase::Pi,
            (Basis::Rl, false) => Phase::HalfPi,
            (Basis::Rl, true) => Phase::ThreeHalvesPi,
        }
    }

    /// The other phase of the same basis.
    pub fn flipped(self) -> Self {
        Self::from_basis_bit(self.basis(), !self.bit())
    }

    /// The two phases of the conjugate basis.
    pub fn incompatible(self) -> [Phase; 2] {
        let b = self.basis().other();
        [
            Self::from_basis_bit(b, false),
            Self::from_basis_bit(b, true),
        ]
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::ALL[rng.random_range(0..4)]
    }
}
