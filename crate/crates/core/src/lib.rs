//! Simulation and security analysis for a two-way, phase-encoded QKD link whose receiver
//! guards its entrance with a per-round random polarization transformation.
//!
//! Bob's own photons pass the randomizer twice (out and back, with a Faraday mirror at
//! Alice's end) and always return in the polarization that routes them to the secure
//! detectors. Light injected by an eavesdropper passes only once, so its routing is
//! randomized and part of it lands on alert detectors.
//!
//! Modules, bottom-up:
//!
//! * [`qmath`]: 2×2 density operators, unitaries, Haar sampling, waveplates.
//! * [`detectors`]: Geiger-mode click law, blinded threshold curves, and the
//!   detector-assignment auditor.
//! * [`protocol`]: the genuine roundtrip, faked-state routing, detection and sifting.
//! * [`adversary`]: the eavesdropper's source and attack catalog.
//! * [`analysis`]: closed-form alert rate, sifted rate and QBER for each attack.
//! * [`simengine`]: seeded, parallel Monte Carlo runs and parameter sweeps.
//! * [`cli`]: the `polgate` command-line front end.

// `!(x >= 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod analysis;
pub mod cli;
pub mod detectors;
pub mod error;
pub mod protocol;
pub mod qmath;
pub mod report;
pub mod simengine;
pub mod stats;

pub use error::{Error, Result};
