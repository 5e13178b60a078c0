use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Basis, Phase, RoutingOutcome};
use crate::detectors::{GeigerParams, DETECTOR_COUNT};

/// How Bob's secure path picks the D/A or R/L measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisSelection {
    /// A 50/50 splitter sends half the secure-path light to each basis.
    #[default]
    Passive,
    /// All secure-path light goes to one basis.
    Active(Basis),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionContext {
    /// Fidelity `F` of Bob's phase measurement.
    pub fidelity: f64,
    #[serde(default)]
    pub selection: BasisSelection,
}

impl DetectionContext {
    pub fn new(fidelity: f64) -> Self {
        Self {
            fidelity,
            selection: BasisSelection::Passive,
        }
    }
}

/// Index in `[a1, a2, b1, b2, b3, b4]` of the secure detector that fires for `phase`.
pub fn secure_detector(phase: Phase) -> usize {
    secure_index(phase.basis(), phase.bit())
}

fn secure_index(basis: Basis, bit: bool) -> usize {
    2 + match basis {
        Basis::Da => 0,
        Basis::Rl => 2,
    } + bit as usize
}

/// Mean photon number (or pulse energy; the split is linear) reaching each detector,
/// in the order `[a1, a2, b1, b2, b3, b4]`.
///
/// The alert path measures in `alert_basis`: a matched phase puts `F` of the light on the
/// correct detector and `1 − F` on the other, a mismatched one splits it evenly. The secure
/// path does the same per basis arm, with the arms fed according to `ctx.selection`.
pub fn detector_energies(
    total: f64,
    routing: &RoutingOutcome,
    phase: Phase,
    alert_basis: Basis,
    ctx: &DetectionContext,
) -> [f64; DETECTOR_COUNT] {
    let window = total * routing.window_fraction;
    let e_alert = window * routing.p_alert;
    let e_secure = window * routing.p_secure;
    let f = ctx.fidelity;
    let mut out = [0.0; DETECTOR_COUNT];

    let (right, wrong) = (phase.bit() as usize, !phase.bit() as usize);
    if phase.basis() == alert_basis {
        out[right] = f * e_alert;
        out[wrong] = (1.0 - f) * e_alert;
    } else {
        out[0] = 0.5 * e_alert;
        out[1] = 0.5 * e_alert;
    }

    let arm_share = |b: Basis| match ctx.selection {
        BasisSelection::Passive => 0.5,
        BasisSelection::Active(chosen) if chosen == b => 1.0,
        BasisSelection::Active(_) => 0.0,
    };
    for basis in [Basis::Da, Basis::Rl] {
        let e = e_secure * arm_share(basis);
        let (i0, i1) = (secure_index(basis, false), secure_index(basis, true));
        if basis == phase.basis() {
            out[secure_index(basis, phase.bit())] = f * e;
            out[secure_index(basis, !phase.bit())] = (1.0 - f) * e;
        } else {
            out[i0] = 0.5 * e;
            out[i1] = 0.5 * e;
        }
    }
    out
}

/// Clicks of all six detectors in one gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClickRecord {
    /// `[a1, a2, b1, b2, b3, b4]` by physical position.
    pub clicks: [bool; DETECTOR_COUNT],
    /// Bob swapped the roles of the two paths this round.
    pub switched: bool,
    /// Basis measured on the physical alert path.
    pub alert_basis: Basis,
}

/// Bob's squashed single-qubit outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub basis: Basis,
    pub bit: bool,
}

impl ClickRecord {
    pub fn none(alert_basis: Basis) -> Self {
        Self {
            clicks: [false; DETECTOR_COUNT],
            switched: false,
            alert_basis,
        }
    }

    /// Number of clicks on detectors that act as alert detectors this round. Alert clicks
    /// are counted raw, without squashing.
    pub fn alert_clicks(&self) -> u32 {
        if self.switched {
            self.clicks[2..].iter().filter(|&&c| c).count() as u32
        } else {
            self.clicks[..2].iter().filter(|&&c| c).count() as u32
        }
    }

    pub fn alert(&self) -> bool {
        self.alert_clicks() > 0
    }

    /// Squashes the key-measuring detectors to at most one outcome: clicks in both bases are
    /// discarded, a double click within one basis yields a random bit.
    pub fn squash<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Measurement> {
        let pick = |basis: Basis, zero: bool, one: bool, rng: &mut R| match (zero, one) {
            (false, false) => None,
            (true, false) => Some(Measurement { basis, bit: false }),
            (false, true) => Some(Measurement { basis, bit: true }),
            (true, true) => Some(Measurement {
                basis,
                bit: rng.random::<bool>(),
            }),
        };
        if self.switched {
            return pick(self.alert_basis, self.clicks[0], self.clicks[1], rng);
        }
        let c = &self.clicks;
        let da = c[2] || c[3];
        let rl = c[4] || c[5];
        match (da, rl) {
            (true, true) | (false, false) => None,
            (true, false) => pick(Basis::Da, c[2], c[3], rng),
            (false, true) => pick(Basis::Rl, c[4], c[5], rng),
        }
    }
}

/// Samples Geiger-mode clicks for light of mean photon number `mean_photons` arriving with
/// `routing` and time-bin `phase`. The alert-path basis is drawn uniformly.
pub fn bob_measurement<R: Rng + ?Sized>(
    routing: &RoutingOutcome,
    phase: Phase,
    mean_photons: f64,
    detectors: &[GeigerParams; DETECTOR_COUNT],
    ctx: &DetectionContext,
    switched: bool,
    rng: &mut R,
) -> ClickRecord {
    let alert_basis = Basis::random(rng);
    let energies = detector_energies(mean_photons, routing, phase, alert_basis, ctx);
    let mut clicks = [false; DETECTOR_COUNT];
    for ((click, det), &mu) in clicks.iter_mut().zip(detectors).zip(&energies) {
        *click = rng.random::<f64>() < det.click_probability(mu);
    }
    ClickRecord {
        clicks,
        switched,
        alert_basis,
    }
}

/// Running sifting tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiftTally {
    pub rounds: u64,
    pub sifted: u64,
    pub errors: u64,
    pub alert_clicks: u64,
    pub alert_rounds: u64,
}

impl SiftTally {
    /// Adds one round; returns Bob's sifted bit if the round survives sifting.
    pub fn record<R: Rng + ?Sized>(
        &mut self,
        rec: &ClickRecord,
        sender: Phase,
        rng: &mut R,
    ) -> Option<bool> {
        self.rounds += 1;
        let a = rec.alert_clicks() as u64;
        self.alert_clicks += a;
        self.alert_rounds += (a > 0) as u64;
        let m = rec.squash(rng)?;
        if m.basis != sender.basis() {
            return None;
        }
        self.sifted += 1;
        self.errors += (m.bit != sender.bit()) as u64;
        Some(m.bit)
    }

    pub fn merge(&mut self, other: &SiftTally) {
        self.rounds += other.rounds;
        self.sifted += other.sifted;
        self.errors += other.errors;
        self.alert_clicks += other.alert_clicks;
        self.alert_rounds += other.alert_rounds;
    }

    pub fn qber(&self) -> f64 {
        if self.sifted == 0 {
            0.0
        } else {
            self.errors as f64 / self.sifted as f64
        }
    }
}

/// Sifts a batch of records tagged with the sender's phase (Alice's, or Eve's for a
/// resend). Returns the sifted bits and the tallies, which hold the error count and the raw
/// alert-click count.
pub fn sift_and_squash<R: Rng + ?Sized>(
    records: &[(ClickRecord, Phase)],
    rng: &mut R,
) -> (Vec<bool>, SiftTally) {
    let mut tally = SiftTally::default();
    let bits = records
        .iter()
        .filter_map(|(rec, sender)| tally.record(rec, *sender, rng))
        .collect();
    (bits, tally)
}
