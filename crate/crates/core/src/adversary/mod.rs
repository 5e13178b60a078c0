//! The eavesdropper: her faked-state source, her measurement of Alice's pulses, and the
//! per-round logic of each attack in the catalog.

mod attack;
mod measurement;
mod source;

pub use attack::{
    run_blinding_attack, run_quantum_attack, run_wavelength_blinding_attack, AttackConfig,
    AttackKind, BlindingLight, BlindingRound, BlindingSetup, BlindingThresholds, ForwardedPulse,
    MixtureWeights, ThresholdSource,
};
pub use measurement::{
    eve_measurement_outcome, EveMeasurementParams, EveOutcome, OutcomeProbabilities,
};
pub use source::{eve_source_state, EveSourceConfig};
