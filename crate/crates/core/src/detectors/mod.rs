//! Single-photon detector models: the Geiger-mode click law, blinded (linear-mode)
//! threshold curves, threshold CSV files, and the detector-assignment audit.

mod audit;
mod geiger;
mod model;
mod table;
mod threshold;

pub use audit::{
    attack_energy_window, audit_assignment, check_conditions_ab, p_max_trigger, AuditReport,
    AuditVerdict, CamouflageRegion, ConditionsAB, IntersectionPoint, AUDIT_CSV_HEADER,
    BLINDING_GRID_MW,
};
pub use geiger::{geiger_click_probability, GeigerParams};
pub use model::{
    blinded_click_probability, DetectorModel, DetectorRole, DetectorSet, GateVariant, RampThreshold,
};
pub use table::{CurvePair, ThresholdData, THRESHOLD_HEADER};
pub use threshold::{Extrapolation, ThresholdCurve};

/// Number of detectors in Bob's receiver, ordered `[a1, a2, b1, b2, b3, b4]`.
pub const DETECTOR_COUNT: usize = 6;
pub const DETECTOR_NAMES: [&str; DETECTOR_COUNT] = ["a1", "a2", "b1", "b2", "b3", "b4"];
