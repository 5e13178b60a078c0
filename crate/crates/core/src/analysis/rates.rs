use std::path::Path;

use super::quadrature::expect;
use super::{AlertFraction, RandomizerModel, SystemParams};
use crate::adversary::{
    AttackConfig, AttackKind, BlindingLight, MixtureWeights, OutcomeProbabilities,
};
use crate::detectors::{DetectorSet, DETECTOR_COUNT};
use crate::error::Result;
use crate::protocol::{
    detector_energies, secure_detector, Basis, BasisSelection, Phase, RoutingOutcome,
    GATED_WINDOW_FRACTION,
};
use crate::report::{Diagnostic, RatesReport};

fn click_probs(
    params: &SystemParams,
    mean: f64,
    routing: &RoutingOutcome,
    k: Phase,
    alert_basis: Basis,
) -> [f64; 6] {
    let e = detector_energies(mean, routing, k, alert_basis, &params.context());
    std::array::from_fn(|i| params.detectors[i].click_probability(e[i]))
}

fn injected(p_b: f64) -> RoutingOutcome {
    RoutingOutcome {
        p_alert: 1.0 - p_b,
        p_secure: p_b,
        window_fraction: GATED_WINDOW_FRACTION,
    }
}

/// Raw click probabilities of `[a1, a2, b1, b2, b3, b4]` when Eve forwards phase `k` and a
/// fraction `p_b` of her pulse enters the secure path.
///
/// The secure entries are `c + 1 − exp(−μ_e p_b F η/4)` for the matched detector,
/// `(1 − F)` in place of `F` for its partner, and `μ_e p_b η/8` for the other basis. The alert
/// entries are for Bob's alert basis equal to the basis of `k`, with `½ p_a` of the pulse.
pub fn raw_click_probs(params: &SystemParams, p_b: f64, k: Phase) -> [f64; DETECTOR_COUNT] {
    click_probs(params, params.mu_e, &injected(p_b), k, k.basis())
}

/// Squashed secure-path outcome probabilities for a sender encoding `bit` in `basis`:
/// `(P_basis, P_wrong)`, e.g. `P_DA(k)` and `P_b2(k)` for bit 0 in D/A.
fn squashed(p: &[f64; 6], basis: Basis, bit: bool) -> (f64, f64) {
    let r = secure_detector(Phase::from_basis_bit(basis, bit));
    let w = secure_detector(Phase::from_basis_bit(basis, !bit));
    let o = secure_detector(Phase::from_basis_bit(basis.other(), false));
    let quiet = (1.0 - p[o]) * (1.0 - p[o + 1]);
    (
        (p[r] + p[w] - p[r] * p[w]) * quiet,
        p[w] * (1.0 - 0.5 * p[r]) * quiet,
    )
}

/// Same, for the alert detectors reading the key after a path switch.
fn squashed_alert(p: &[f64; 6], bit: bool) -> (f64, f64) {
    let (r, w) = (bit as usize, !bit as usize);
    (p[r] + p[w] - p[r] * p[w], p[w] * (1.0 - 0.5 * p[r]))
}

fn phase_index(k: Phase) -> usize {
    Phase::ALL.iter().position(|&p| p == k).unwrap_or(0)
}

/// Rates under the quantum attack: Eve measures each pulse and forwards a faked state of
/// mean photon number `μ_e` carrying her result.
///
/// The sifted rate and QBER compose the raw click probabilities through Bob's squashing and
/// average over Alice's four phases and over `p_b`. The alert rate is the closed-form
/// unsquashed expression per forwarded pulse,
/// `c_a1 + c_a2 + 2 − ½[e^{−x F η_a1/2} + e^{−x F η_a2/2} + e^{−x η_a1/4} + e^{−x η_a2/4}]`
/// with `x = μ_e p_a`. The expected number of alert clicks that follows from the same energy
/// split is attached as the `alert_energy_consistent` diagnostic. Path switching is not part of
/// these expressions.
pub fn quantum_attack_rates(
    params: &SystemParams,
    probs: &OutcomeProbabilities,
    pa: &AlertFraction,
) -> RatesReport {
    let bg = |i: usize| params.detectors[i].background;
    let eff = |i: usize| params.detectors[i].efficiency;
    let p_none = 1.0 - probs.correct - probs.wrong - 2.0 * probs.incompatible;
    let f = params.fidelity;

    let v = expect::<9>(pa, |p_a| {
        let p_b = 1.0 - p_a;
        let raw = Phase::ALL.map(|k| raw_click_probs(params, p_b, k));
        let (mut r, mut e) = (0.0, 0.0);
        for a in Phase::ALL {
            let [i0, i1] = a.incompatible();
            let sent = [
                (probs.correct, a),
                (probs.wrong, a.flipped()),
                (probs.incompatible, i0),
                (probs.incompatible, i1),
            ];
            for (w, s) in sent {
                let (ps, pe) = squashed(&raw[phase_index(s)], a.basis(), a.bit());
                r += w * ps;
                e += w * pe;
            }
            let (cr, cw) = (bg(secure_detector(a)), bg(secure_detector(a.flipped())));
            r += p_none * (cr + cw - cr * cw);
            e += p_none * (cw - cr * cw / 2.0);
        }

        let x = params.mu_e * p_a;
        let alert = bg(0) + bg(1) + 2.0
            - 0.5
                * ((-x * f * eff(0) / 2.0).exp()
                    + (-x * f * eff(1) / 2.0).exp()
                    + (-x * eff(0) / 4.0).exp()
                    + (-x * eff(1) / 4.0).exp());

        let mut det = [0.0; 6];
        for k in Phase::ALL {
            for ab in [Basis::Da, Basis::Rl] {
                let p = click_probs(params, params.mu_e, &injected(p_b), k, ab);
                det.iter_mut().zip(p).for_each(|(d, p)| *d += p / 8.0);
            }
        }
        [
            r / 4.0,
            e / 4.0,
            alert,
            det[0],
            det[1],
            det[2],
            det[3],
            det[4],
            det[5],
        ]
    });

    let [r, e, alert, det @ ..] = v;
    let det: [f64; 6] = det;
    let qber = if r > 0.0 { e / r } else { 0.0 };
    let mut report = RatesReport::analytic(
        alert.clamp(0.0, 2.0),
        r.clamp(0.0, 1.0),
        qber.clamp(0.0, 1.0),
        det,
    );
    report.diagnostics.push(
        Diagnostic::new(
            "alert_energy_consistent",
            "expected alert clicks per forwarded pulse from the per-detector energy split; the \
             closed-form alert rate counts the matched-basis term with weight ½ per detector where \
             the split gives ¼, and drops the (1 − F) term",
        )
        .with_value(det[0] + det[1]),
    );
    if params.switch_rate > 0.0 {
        report.diagnostics.push(
            Diagnostic::new(
                "switching_ignored",
                "the quantum-attack expressions assume no path switching",
            )
            .with_value(params.switch_rate),
        );
    }
    report
}

/// Exact expected rates of an honest run: Bob's own pulses of mean photon number `μ` return
/// to the secure path, or to the alert path in switched rounds.
pub fn honest_rates(params: &SystemParams) -> RatesReport {
    let (mut sifted, mut errors, mut alert) = (0.0, 0.0, 0.0);
    let mut det = [0.0; 6];
    let rsw = params.switch_rate;
    for (weight, switched) in [(1.0 - rsw, false), (rsw, true)] {
        if weight == 0.0 {
            continue;
        }
        let routing = RoutingOutcome {
            p_alert: if switched { 1.0 } else { 0.0 },
            p_secure: if switched { 0.0 } else { 1.0 },
            window_fraction: GATED_WINDOW_FRACTION,
        };
        for a in Phase::ALL {
            for ab in [Basis::Da, Basis::Rl] {
                let w = weight / 8.0;
                let p = click_probs(params, params.mu, &routing, a, ab);
                det.iter_mut().zip(p).for_each(|(d, p)| *d += w * p);
                let (s, e) = if switched {
                    alert += w * p[2..].iter().sum::<f64>();
                    if ab == a.basis() {
                        squashed_alert(&p, a.bit())
                    } else {
                        (0.0, 0.0)
                    }
                } else {
                    alert += w * (p[0] + p[1]);
                    squashed(&p, a.basis(), a.bit())
                };
                sifted += w * s;
                errors += w * e;
            }
        }
    }
    let qber = if sifted > 0.0 { errors / sifted } else { 0.0 };
    RatesReport::analytic(alert, sifted, qber, det)
}

/// Options of the blinding attack that the closed-form rates do not model directly; each one
/// that is set attaches a diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlindingOptions {
    /// Eve fires the targeted secure detector with certainty.
    pub perfect_control: bool,
    pub polarized_light: bool,
    /// Purity of the trigger pulse, if below one.
    pub trigger_purity: Option<f64>,
}

/// Rates under the blinding attack with trigger energy `e_t` pJ and blinding power `i_b` mW.
///
/// With `S = E_never + E_always` at the split blinding powers,
/// `R_ai = ½ max{1 − S_ai/E_T, 0}` and `R_bj = max{1 − 2 S_bj/E_T, 0}`; the alert and secure
/// rates mix them according to the switch rate, the sifted rate is `(P_c + P_w) R_secure` and
/// the QBER `P_w/(P_c + P_w)`. Blinded detectors have no background clicks.
pub fn blinding_attack_rates(
    params: &SystemParams,
    probs: &OutcomeProbabilities,
    set: &DetectorSet,
    e_t: f64,
    i_b: f64,
    opts: &BlindingOptions,
) -> Result<RatesReport> {
    let t = set.thresholds_unpolarized(i_b)?;
    let rate = |s: f64, scale: f64| {
        if e_t > 0.0 {
            (1.0 - scale * s / e_t).clamp(0.0, 1.0)
        } else {
            0.0
        }
    };
    let r_a: [f64; 2] = std::array::from_fn(|i| 0.5 * rate(t[i].e_never + t[i].e_always, 1.0));
    let r_b: [f64; 4] = std::array::from_fn(|j| {
        if opts.perfect_control {
            1.0
        } else {
            rate(t[j + 2].e_never + t[j + 2].e_always, 2.0)
        }
    });
    let (sum_a, sum_b): (f64, f64) = (r_a.iter().sum(), r_b.iter().sum());
    let rsw = params.switch_rate;
    let alert = 0.5 * (1.0 - rsw) * sum_a + 0.25 * rsw * sum_b;
    let secure = 0.5 * rsw * sum_a + 0.25 * (1.0 - rsw) * sum_b;
    let det = [
        0.5 * r_a[0],
        0.5 * r_a[1],
        0.25 * r_b[0],
        0.25 * r_b[1],
        0.25 * r_b[2],
        0.25 * r_b[3],
    ];
    let mut report = RatesReport::analytic(
        alert,
        probs.compatible() * secure,
        probs.compatible_error(),
        det,
    );
    report.diagnostics.push(
        Diagnostic::new(
            "secure_rate",
            "secure-path clicks per blinded round, after path switching",
        )
        .with_value(secure),
    );

    if e_t > 0.0 {
        let mut issues = Vec::new();
        let ramp_resolved = |half: f64, n: f64, a: f64| half >= a || half <= n;
        for (i, th) in t[..2].iter().enumerate() {
            if !ramp_resolved(e_t / 2.0, th.e_never, th.e_always) {
                issues.push(format!("a{}: E_T/2 falls inside the ramp", i + 1));
            }
            if e_t / 4.0 > th.e_never {
                issues.push(format!(
                    "a{}: mismatched-basis share E_T/4 exceeds E_never",
                    i + 1
                ));
            }
        }
        if !opts.perfect_control {
            for (j, th) in t[2..].iter().enumerate() {
                if !ramp_resolved(e_t / 4.0, th.e_never, th.e_always) {
                    issues.push(format!("b{}: E_T/4 falls inside the ramp", j + 1));
                }
                if e_t / 8.0 > th.e_never {
                    issues.push(format!(
                        "b{}: other-basis share E_T/8 exceeds E_never",
                        j + 1
                    ));
                }
            }
        }
        if !issues.is_empty() {
            report.diagnostics.push(Diagnostic::new(
                "outside_exact_regime",
                format!("ramp averages are approximate here: {}", issues.join("; ")),
            ));
        }
    }
    if let Some(p) = opts.trigger_purity.filter(|&p| p < 1.0) {
        report.diagnostics.push(
            Diagnostic::new(
                "mixed_trigger",
                "p_a is not uniform on [0, 1] for a mixed trigger",
            )
            .with_value(p),
        );
    }
    if opts.polarized_light {
        report.diagnostics.push(Diagnostic::new(
            "polarized_blinding",
            "thresholds evaluated at the unpolarized split I_B/4, I_B/8",
        ));
    }
    if params.selection != BasisSelection::Passive {
        report.diagnostics.push(Diagnostic::new(
            "active_selection",
            "the closed-form rates assume a passive basis choice",
        ));
    }
    Ok(report)
}

/// Rates under wavelength-dependent blinding: every forwarded pulse fires the targeted secure
/// detector and never an alert detector, so only switched rounds raise alerts.
pub fn wavelength_blinding_rates(
    params: &SystemParams,
    probs: &OutcomeProbabilities,
) -> RatesReport {
    let rsw = params.switch_rate;
    RatesReport::analytic(
        rsw,
        probs.compatible() * (1.0 - rsw),
        probs.compatible_error(),
        [0.0, 0.0, 0.25, 0.25, 0.25, 0.25],
    )
}

/// Eve picks the quantum, blinding or wavelength attack at random with the given weights.
/// Reports are given in that order. Every rate, including the QBER, is the weighted sum of
/// the per-attack values.
pub fn integrated_attack_rates(
    reports: [&RatesReport; 3],
    weights: &MixtureWeights,
) -> Result<RatesReport> {
    weights.validate()?;
    let w = weights.as_array();
    let mix =
        |f: &dyn Fn(&RatesReport) -> f64| reports.iter().zip(w).map(|(r, w)| w * f(r)).sum::<f64>();
    let det = std::array::from_fn(|i| mix(&|r| r.detector_click_probs[i]));
    let mut report = RatesReport::analytic(
        mix(&|r| r.alert_rate),
        mix(&|r| r.sifted_rate),
        mix(&|r| r.qber),
        det,
    );
    const CONSISTENT: &str = "alert_energy_consistent";
    for (r, w) in reports.iter().zip(w) {
        if w > 0.0 {
            for d in &r.diagnostics {
                if report.diagnostic(&d.code).is_none() {
                    report.diagnostics.push(d.clone());
                }
            }
        }
    }
    if let Some(d) = report.diagnostics.iter_mut().find(|d| d.code == CONSISTENT) {
        // components without the diagnostic contribute their own alert rate
        d.value = Some(mix(&|r| {
            r.diagnostic(CONSISTENT)
                .and_then(|d| d.value)
                .unwrap_or(r.alert_rate)
        }));
    }
    Ok(report)
}

/// Analytic rates for any attack configuration. Relative threshold CSV paths resolve against
/// `base_dir`.
pub fn attack_rates(
    params: &SystemParams,
    attack: &AttackConfig,
    randomizer: &RandomizerModel,
    base_dir: Option<&Path>,
) -> Result<RatesReport> {
    attack.validate()?;
    let probs = attack.outcome_probabilities(&params.eve);
    let quantum = || -> Result<RatesReport> {
        let trigger = attack.trigger_state()?;
        let pa = AlertFraction::for_randomizer(randomizer, &trigger)?;
        Ok(quantum_attack_rates(params, &probs, &pa))
    };
    let blinding = || -> Result<RatesReport> {
        let Some(source) = &attack.thresholds else {
            return Ok(RatesReport::analytic(0.0, 0.0, 0.0, [0.0; 6]));
        };
        let set = source.detector_set(&params.detectors, base_dir)?;
        let purity = attack.trigger_state()?.purity();
        let opts = BlindingOptions {
            perfect_control: attack.perfect_control,
            polarized_light: matches!(attack.blinding_light, BlindingLight::Polarized { .. }),
            trigger_purity: (purity < 1.0 - 1e-12).then_some(purity),
        };
        let mut r = blinding_attack_rates(
            params,
            &probs,
            &set,
            attack.source.pulse_energy,
            attack.blinding_power_mw,
            &opts,
        )?;
        if matches!(randomizer, RandomizerModel::Fixed(_)) {
            r.diagnostics.push(Diagnostic::new(
                "fixed_randomizer",
                "the blinding rates average over a Haar-random randomizer",
            ));
        }
        Ok(r)
    };
    match attack.kind {
        AttackKind::InterceptResend | AttackKind::Quantum => quantum(),
        AttackKind::Blinding => blinding(),
        AttackKind::WavelengthBlinding => Ok(wavelength_blinding_rates(params, &probs)),
        AttackKind::Integrated => {
            let weights = attack.weights.unwrap_or(MixtureWeights {
                quantum: 1.0,
                blinding: 0.0,
                wavelength: 0.0,
            });
            let q = quantum()?;
            let b = if weights.blinding > 0.0 {
                blinding()?
            } else {
                RatesReport::analytic(0.0, 0.0, 0.0, [0.0; 6])
            };
            let w = wavelength_blinding_rates(params, &probs);
            integrated_attack_rates([&q, &b, &w], &weights)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{EveMeasurementParams, ThresholdSource};
    use crate::detectors::GeigerParams;

    fn zero_detectors() -> SystemParams {
        let mut p = SystemParams::desk();
        p.detectors = [GeigerParams {
            efficiency: 0.0,
            background: 0.0,
            gated: true,
        }; 6];
        p
    }

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

    #[test]
    fn raw_probabilities() {
        let mut p = SystemParams::desk();
        p.mu_e = 0.0;
        let raw = raw_click_probs(&p, 0.7, Phase::Pi);
        assert!(raw.iter().all(|&x| (x - 1e-4).abs() < 1e-15));

        let mut p = SystemParams::desk();
        p.fidelity = 1.0;
        assert!((raw_click_probs(&p, 0.4, Phase::Zero)[3] - 1e-4).abs() < 1e-15);

        let mut p = SystemParams::desk();
        p.detectors = [GeigerParams::new(0.25, 0.0).unwrap(); 6];
        p.fidelity = 0.98;
        let raw = raw_click_probs(&p, 1.0, Phase::Zero);
        assert!((raw[2] - 0.0594119).abs() < 1e-7);
        assert!((raw[4] - (1.0 - (-0.25f64 / 8.0).exp())).abs() < 1e-15);
    }

    #[test]
    fn zero_efficiency_gives_zero_rates() {
        let p = zero_detectors();
        let r = quantum_attack_rates(
            &p,
            &p.eve.outcome_probabilities(),
            &AlertFraction::haar(1.0).unwrap(),
        );
        assert_eq!(r.sifted_rate, 0.0);
        assert_eq!(r.alert_rate, 0.0);
    }

    #[test]
    fn quantum_qber_vanishes_for_perfect_fidelities() {
        let mut p = SystemParams::ideal();
        p.detectors = [GeigerParams::new(0.2, 0.0).unwrap(); 6];
        let probs = OutcomeProbabilities {
            correct: 0.3,
            wrong: 0.0,
            incompatible: 0.0,
            no_click: 0.7,
        };
        let r = quantum_attack_rates(&p, &probs, &AlertFraction::haar(1.0).unwrap());
        assert!(r.qber < 1e-15);
        assert!(r.sifted_rate > 0.0);
    }

    #[test]
    fn intercept_resend_qber_is_a_quarter() {
        let p = SystemParams::ideal();
        let r = quantum_attack_rates(
            &p,
            &OutcomeProbabilities::ideal_bb84(),
            &AlertFraction::haar(1.0).unwrap(),
        );
        assert!((r.qber - 0.25).abs() < 1e-12);
    }

    #[test]
    fn honest_qber_tracks_fidelity() {
        let mut p = SystemParams::desk();
        p.detectors = [GeigerParams::new(0.25, 0.0).unwrap(); 6];
        p.mu = 0.01;
        let r = honest_rates(&p);
        assert!((r.qber - 0.03).abs() < 1e-3);
        assert_eq!(r.alert_rate, 0.0);
        p.switch_rate = 0.3;
        let r = honest_rates(&p);
        assert!((r.qber - 0.03).abs() < 1e-3);
        assert!(r.alert_rate == 0.0);
    }

    #[test]
    fn blinding_desk_values() {
        let p = SystemParams::desk();
        let probs = p.eve.outcome_probabilities();
        let set = flat_set();
        let r =
            blinding_attack_rates(&p, &probs, &set, 3.2, 1.0, &BlindingOptions::default()).unwrap();
        assert!((r.alert_rate - 0.15625).abs() < 1e-15);
        assert!((r.sifted_rate - probs.compatible() * 0.1875).abs() < 1e-15);
        assert!(r.diagnostic("outside_exact_regime").is_none());
        assert_eq!(r.qber, probs.compatible_error());

        let zero =
            blinding_attack_rates(&p, &probs, &set, 0.0, 1.0, &BlindingOptions::default()).unwrap();
        assert_eq!((zero.alert_rate, zero.sifted_rate), (0.0, 0.0));
        let low =
            blinding_attack_rates(&p, &probs, &set, 1.0, 1.0, &BlindingOptions::default()).unwrap();
        assert_eq!((low.alert_rate, low.sifted_rate), (0.0, 0.0));
    }

    #[test]
    fn blinding_half_switch_equalizes() {
        let mut p = SystemParams::desk();
        p.switch_rate = 0.5;
        let probs = p.eve.outcome_probabilities();
        for e_t in [2.0, 3.2, 5.0, 20.0] {
            let r = blinding_attack_rates(
                &p,
                &probs,
                &flat_set(),
                e_t,
                1.0,
                &BlindingOptions::default(),
            )
            .unwrap();
            assert!((r.alert_rate - r.sifted_rate / probs.compatible()).abs() < 1e-12);
        }
    }

    #[test]
    fn wavelength_relations() {
        let mut p = SystemParams::desk();
        p.switch_rate = 0.25;
        let probs = p.eve.outcome_probabilities();
        let r = wavelength_blinding_rates(&p, &probs);
        assert_eq!(r.alert_rate, 0.25);
        p.switch_rate = 1.0;
        assert_eq!(wavelength_blinding_rates(&p, &probs).sifted_rate, 0.0);
        p.eve = EveMeasurementParams {
            fidelity: 1.0,
            ..p.eve
        };
        assert_eq!(
            wavelength_blinding_rates(&p, &p.eve.outcome_probabilities()).qber,
            0.0
        );
    }

    #[test]
    fn integrated_corners() {
        let p = SystemParams::desk();
        let probs = p.eve.outcome_probabilities();
        let q = quantum_attack_rates(&p, &probs, &AlertFraction::haar(1.0).unwrap());
        let b = blinding_attack_rates(
            &p,
            &probs,
            &flat_set(),
            3.2,
            1.0,
            &BlindingOptions::default(),
        )
        .unwrap();
        let w = wavelength_blinding_rates(&p, &probs);
        let only = |a, b, c| MixtureWeights {
            quantum: a,
            blinding: b,
            wavelength: c,
        };
        let r = integrated_attack_rates([&q, &b, &w], &only(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(
            (r.alert_rate, r.sifted_rate, r.qber),
            (q.alert_rate, q.sifted_rate, q.qber)
        );
        let r = integrated_attack_rates([&q, &b, &w], &only(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(
            (r.alert_rate, r.sifted_rate, r.qber),
            (w.alert_rate, w.sifted_rate, w.qber)
        );
        let third = 1.0 / 3.0;
        let r = integrated_attack_rates([&q, &b, &w], &only(third, third, third)).unwrap();
        let printed = third * q.qber + 2.0 * third * probs.compatible_error();
        assert!((r.qber - printed).abs() < 1e-15);
        assert!(integrated_attack_rates([&q, &b, &w], &only(0.5, 0.5, 0.5)).is_err());
    }
}
