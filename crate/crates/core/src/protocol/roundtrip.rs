use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Phase;
use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix2, JonesUnitary, JonesVector, PolarizationState, TOLERANCE};

/// Share of a one-way pulse that lands in the gated superposition window. A balanced PMZI
/// spreads a single pass over early, middle and late windows as ¼, ½, ¼.
pub const GATED_WINDOW_FRACTION: f64 = 0.5;

/// Amplitudes over the long and short time bins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeBinState {
    /// `[a_l, a_s]`
    pub amplitudes: [Complex64; 2],
    /// False for an incoherent mixture of the two bins.
    pub coherent: bool,
}

impl TimeBinState {
    pub fn new(amplitudes: [Complex64; 2], coherent: bool) -> Result<Self> {
        let norm = amplitudes[0].norm_sqr() + amplitudes[1].norm_sqr();
        if coherent && (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidOperator {
                kind: "time-bin state",
                reason: format!("norm {norm} != 1"),
            });
        }
        Ok(Self {
            amplitudes,
            coherent,
        })
    }

    /// `(|t_l⟩ + e^{iφ}|t_s⟩)/√2`
    pub fn encoded(phi: f64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: [Complex64::new(s, 0.0), Complex64::from_polar(s, phi)],
            coherent: true,
        }
    }

    /// Multiplies the short-bin amplitude by `e^{iφ}`.
    pub fn phase_shifted(&self, phi: f64) -> Self {
        Self {
            amplitudes: [
                self.amplitudes[0],
                self.amplitudes[1] * Complex64::from_polar(1.0, phi),
            ],
            coherent: self.coherent,
        }
    }

    /// arg(a_s / a_l)
    pub fn relative_phase(&self) -> f64 {
        (self.amplitudes[1] / self.amplitudes[0]).arg()
    }

    /// The polarization `a_l|H⟩ + a_s|V⟩` produced when the PMZI swaps the bins back.
    pub fn to_polarization(&self) -> JonesVector {
        JonesVector::new(self.amplitudes[0], self.amplitudes[1])
    }
}

/// One roundtrip of Bob's photon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonRound {
    pub alice_phase: Phase,
    /// Inbound randomizer setting `U`; the outbound pass sees `Uᵀ`.
    pub randomizer: JonesUnitary,
    /// Birefringence of the link from Bob to Alice; the return trip sees its transpose.
    #[serde(default = "JonesUnitary::identity")]
    pub channel: JonesUnitary,
    pub switch_applied: bool,
    pub mean_photon_number: f64,
}

impl PhotonRound {
    pub fn new(alice_phase: Phase, randomizer: JonesUnitary) -> Self {
        Self {
            alice_phase,
            randomizer,
            channel: JonesUnitary::identity(),
            switch_applied: false,
            mean_photon_number: 1.0,
        }
    }
}

/// Which-path probabilities inside the gated window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoutingOutcome {
    pub p_alert: f64,
    pub p_secure: f64,
    /// Fraction of the pulse energy that falls inside the gated window.
    pub window_fraction: f64,
}

/// The operator applied on re-entry: `U`, or `X·U` when Bob switches the paths this round.
pub fn inbound_operator(randomizer: &JonesUnitary, switched: bool) -> JonesUnitary {
    if switched {
        JonesUnitary::not() * *randomizer
    } else {
        *randomizer
    }
}

/// Intermediate states of the genuine roundtrip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenuineTrace {
    /// Polarization launched towards Alice after the PMZI swap (ψ2).
    pub launched: JonesVector,
    pub launched_time_bin: TimeBinState,
    /// Polarization after the inbound randomizer pass (ψ3).
    pub returned: JonesVector,
    pub returned_time_bin: TimeBinState,
    /// Polarization on the output path after the PMZI swaps back (ψ4).
    pub output: JonesVector,
    pub routing: RoutingOutcome,
}

pub fn trace_genuine(round: &PhotonRound) -> GenuineTrace {
    // ψ1 = (|H⟩ + |V⟩)|a⟩/√2; the PC in the short arm turns V into H, giving ψ2.
    let launched = JonesVector::horizontal();
    let launched_time_bin = TimeBinState::encoded(0.0);

    let outbound = *round.channel.matrix() * *round.randomizer.transpose().matrix();
    let inbound = *inbound_operator(&round.randomizer, round.switch_applied).matrix()
        * *round.channel.transpose().matrix();
    let roundtrip = inbound * ComplexMatrix2::FARADAY * outbound;
    let returned = roundtrip.apply(&launched);
    let returned_time_bin = launched_time_bin.phase_shifted(round.alice_phase.radians());

    let p_alert = returned.h().norm_sqr();
    let p_secure = returned.v().norm_sqr();
    GenuineTrace {
        launched,
        launched_time_bin,
        returned,
        returned_time_bin,
        output: returned_time_bin.to_polarization(),
        routing: RoutingOutcome {
            p_alert,
            p_secure,
            window_fraction: GATED_WINDOW_FRACTION,
        },
    }
}

/// Routing of Bob's own photon. The Faraday mirror undoes the randomizer and the channel,
/// so the photon reaches the secure path for every setting, or the alert path when the
/// switch is applied.
pub fn genuine_roundtrip(round: &PhotonRound) -> RoutingOutcome {
    trace_genuine(round).routing
}

/// Routing of light injected by a third party with polarization `pol`, which passes the
/// randomizer once: `p_alert = ⟨H|UρU†|H⟩`, `p_secure = ⟨V|UρU†|V⟩`.
pub fn faked_state_routing(pol: &PolarizationState, randomizer: &JonesUnitary) -> RoutingOutcome {
    let m = randomizer.matrix();
    let sigma = *m * *pol.rho() * m.adjoint();
    let p_alert = sigma[(0, 0)].re.clamp(0.0, 1.0);
    RoutingOutcome {
        p_alert,
        p_secure: 1.0 - p_alert,
        window_fraction: GATED_WINDOW_FRACTION,
    }
}

/// Reduced density operator over the paths `(|a⟩, |b⟩)` for injected light with
/// polarization `pol` and time-bin phase `phi`, inside the gated window and normalised to it.
///
/// Built from the full post-PMZI expression including the PC's NOT operator:
/// `½ Σ_P ⟨P| K_P σ K_P† |P⟩` with `σ = UρU†`, `K_H = |b⟩X + e^{iφ}|a⟩`,
/// `K_V = |a⟩X + e^{iφ}|b⟩`. The diagonal reproduces [`faked_state_routing`].
pub fn faked_state_path_operator(
    pol: &PolarizationState,
    phi: f64,
    randomizer: &JonesUnitary,
) -> ComplexMatrix2 {
    let m = randomizer.matrix();
    let sigma = *m * *pol.rho() * m.adjoint();
    let x = ComplexMatrix2::NOT;
    let shift = ComplexMatrix2::IDENTITY.scale(Complex64::from_polar(1.0, phi));
    let h = JonesVector::horizontal();
    let v = JonesVector::vertical();

    // Polarization operator attached to each path, for the H and V output projections.
    let arms = [(h, [shift, x]), (v, [x, shift])];
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (proj, ops) in arms {
        for (r, a) in ops.iter().enumerate() {
            for (c, b) in ops.iter().enumerate() {
                let block = *a * sigma * b.adjoint();
                out[r][c] += 0.5 * proj.inner(&block.apply(&proj));
            }
        }
    }
    ComplexMatrix2::new(out).expect("finite inputs give finite output")
}
