use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Mode, Scenario};
use crate::adversary::{
    run_blinding_attack, run_quantum_attack, run_wavelength_blinding_attack, AttackConfig,
    AttackKind, BlindingLight, BlindingSetup, BlindingThresholds, OutcomeProbabilities,
};
use crate::detectors::DETECTOR_COUNT;
use crate::error::{Error, Result};
use crate::protocol::{
    bob_measurement, faked_state_routing, genuine_roundtrip, inbound_operator, ClickRecord, Phase,
    PhotonRound, RoutingOutcome, SiftTally, GATED_WINDOW_FRACTION,
};
use crate::qmath::{haar_random_unitary, JonesUnitary, PolarizationState};
use crate::report::{Diagnostic, Provenance, RatesReport, SCHEMA_VERSION};
use crate::stats::{binomial_se, Moments};

/// Rounds per random-stream block. Block `k` draws from ChaCha8 seeded with the scenario
/// seed on stream `k`, so results do not depend on how blocks are spread over workers.
pub const BLOCK_ROUNDS: u64 = 4096;

/// Attack families of an integrated run, in mixture-weight order.
const FAMILIES: [&str; 3] = ["quantum", "blinding", "wavelength"];

/// Counts for one stratum of rounds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub sift: SiftTally,
    /// Rounds in which light reached Bob's receiver.
    pub forwarded: u64,
    /// Alert clicks per forwarded pulse.
    pub alert_per_pulse: Moments,
    /// Alert clicks per round.
    pub alert_per_round: Moments,
    /// Clicks of each physical detector in rounds with a forwarded pulse.
    pub detector_clicks: [u64; DETECTOR_COUNT],
    /// Share of each forwarded pulse inside the gate on the alert path, `p_a·½`.
    pub arrival: Moments,
    /// `½ p_a E_T`, the energy reaching a matched alert detector.
    pub energy_alert: Moments,
    /// `¼ p_b E_T`, the energy reaching a matched secure detector.
    pub energy_secure: Moments,
}

impl Tally {
    pub fn merge(&mut self, o: &Tally) {
        self.sift.merge(&o.sift);
        self.forwarded += o.forwarded;
        self.alert_per_pulse.merge(&o.alert_per_pulse);
        self.alert_per_round.merge(&o.alert_per_round);
        for (a, b) in self.detector_clicks.iter_mut().zip(o.detector_clicks) {
            *a += b;
        }
        self.arrival.merge(&o.arrival);
        self.energy_alert.merge(&o.energy_alert);
        self.energy_secure.merge(&o.energy_secure);
    }

    fn record<R: Rng + ?Sized>(
        &mut self,
        rec: &ClickRecord,
        sender: Phase,
        delivered: Option<&RoutingOutcome>,
        pulse_energy: f64,
        rng: &mut R,
    ) {
        let before = self.sift.alert_clicks;
        self.sift.record(rec, sender, rng);
        let alerts = (self.sift.alert_clicks - before) as f64;
        self.alert_per_round.push(alerts);
        if let Some(routing) = delivered {
            self.forwarded += 1;
            self.alert_per_pulse.push(alerts);
            for (n, &c) in self.detector_clicks.iter_mut().zip(&rec.clicks) {
                *n += c as u64;
            }
            self.arrival.push(routing.p_alert * routing.window_fraction);
            self.energy_alert.push(0.5 * routing.p_alert * pulse_energy);
            self.energy_secure
                .push(0.25 * routing.p_secure * pulse_energy);
        }
    }
}

/// Tallies of one block, one entry per stratum (a single stratum unless the attack is integrated).
pub type BlockTally = Vec<Tally>;

/// Per-stratum estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub family: String,
    pub weight: f64,
    pub rounds: u64,
    pub alert_rate: f64,
    pub alert_se: f64,
    pub sifted_rate: f64,
    pub sifted_se: f64,
    pub qber: f64,
    pub qber_se: f64,
}

/// Elapsed wall time in seconds. Never affects equality of results.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WallTime(pub f64);

impl PartialEq for WallTime {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

/// Estimates from one Monte Carlo run.
///
/// `rates.alert_rate` is alert clicks per forwarded pulse and `rates.sifted_rate` sifted bits
/// per round, matching the analytic reports; `alert_per_round` normalizes alerts per round.
/// `rates.detector_click_probs` are clicks per forwarded pulse. For integrated attacks the
/// three rates are weighted sums of the per-attack estimates in `strata`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub schema_version: u32,
    pub mode: String,
    pub seed: u64,
    pub workers: usize,
    pub rounds: u64,
    pub fixed_u: bool,
    pub rates: RatesReport,
    pub alert_se: f64,
    pub sifted_se: f64,
    pub qber_se: f64,
    pub alert_per_round: f64,
    pub alert_per_round_se: f64,
    pub forwarded: u64,
    pub sifted: u64,
    pub errors: u64,
    pub alert_clicks: u64,
    pub detector_clicks: [u64; DETECTOR_COUNT],
    /// Mean gated share of a forwarded pulse on the alert path.
    pub alert_arrival_mean: f64,
    pub alert_arrival_se: f64,
    /// Mean trigger energy on a matched alert detector, pJ.
    pub energy_a1_pj: f64,
    /// Mean trigger energy on a matched secure detector, pJ.
    pub energy_b1_pj: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strata: Vec<Stratum>,
    pub wall_time_s: WallTime,
}

/// Everything a round needs that does not change during the run.
struct Plan {
    mode: PlanMode,
    fixed_u: Option<JonesUnitary>,
    switch_rate: f64,
}

enum PlanMode {
    Honest,
    Attack {
        kind: AttackKind,
        probs: OutcomeProbabilities,
        trigger: PolarizationState,
        pulse_energy: f64,
        blinding: Option<Box<BlindingSetup>>,
        /// Cumulative mixture weights of an integrated attack.
        cumulative: [f64; 3],
    },
}

fn plan(scenario: &Scenario) -> Result<Plan> {
    let system = &scenario.system;
    let mode = match &scenario.mode {
        Mode::Honest => PlanMode::Honest,
        Mode::Attack(attack) => {
            let probs = attack.outcome_probabilities(&system.eve);
            let trigger = attack.trigger_state()?;
            let weights = attack
                .weights
                .map(|w| w.as_array())
                .unwrap_or([1.0, 0.0, 0.0]);
            let needs_blinding = attack.kind == AttackKind::Blinding
                || (attack.kind == AttackKind::Integrated && weights[1] > 0.0);
            let blinding = if needs_blinding {
                Some(Box::new(blinding_setup(scenario, attack, probs, trigger)?))
            } else {
                None
            };
            PlanMode::Attack {
                kind: attack.kind,
                probs,
                trigger,
                pulse_energy: attack.source.pulse_energy,
                blinding,
                cumulative: [weights[0], weights[0] + weights[1], 1.0],
            }
        }
    };
    Ok(Plan {
        mode,
        fixed_u: scenario.fixed_u.then(JonesUnitary::bench_randomizer),
        switch_rate: system.switch_rate,
    })
}

fn blinding_setup(
    scenario: &Scenario,
    attack: &AttackConfig,
    probs: OutcomeProbabilities,
    trigger: PolarizationState,
) -> Result<BlindingSetup> {
    let source = attack.thresholds.as_ref().ok_or_else(|| {
        Error::config(
            "attack.thresholds",
            "blinding attacks need detector thresholds",
        )
    })?;
    let set = source.detector_set(&scenario.system.detectors, scenario.base_dir.as_deref())?;
    Ok(BlindingSetup {
        probs,
        trigger,
        pulse_energy_pj: attack.source.pulse_energy,
        thresholds: BlindingThresholds::new(
            &set,
            &attack.blinding_light,
            attack.blinding_power_mw,
        )?,
        perfect_control: attack.perfect_control,
        selection: scenario.system.selection,
    })
}

fn strata_count(plan: &Plan) -> usize {
    match plan.mode {
        PlanMode::Attack {
            kind: AttackKind::Integrated,
            ..
        } => 3,
        _ => 1,
    }
}

fn run_block(scenario: &Scenario, plan: &Plan, block: u64) -> Result<BlockTally> {
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    rng.set_stream(block);
    let start = block * BLOCK_ROUNDS;
    let n = BLOCK_ROUNDS.min(scenario.rounds - start);
    let mut tallies = vec![Tally::default(); strata_count(plan)];
    let system = &scenario.system;
    let ctx = system.context();
    let vacuum = RoutingOutcome {
        p_alert: 0.0,
        p_secure: 0.0,
        window_fraction: GATED_WINDOW_FRACTION,
    };

    for _ in 0..n {
        let u = match plan.fixed_u {
            Some(u) => u,
            None => haar_random_unitary(&mut rng),
        };
        let alice = Phase::random(&mut rng);
        let switched = rng.random::<f64>() < plan.switch_rate;

        match &plan.mode {
            PlanMode::Honest => {
                let round = PhotonRound {
                    switch_applied: switched,
                    mean_photon_number: system.mu,
                    ..PhotonRound::new(alice, u)
                };
                let routing = genuine_roundtrip(&round);
                let rec = bob_measurement(
                    &routing,
                    alice,
                    system.mu,
                    &system.detectors,
                    &ctx,
                    switched,
                    &mut rng,
                );
                tallies[0].record(&rec, alice, Some(&routing), 0.0, &mut rng);
            }
            PlanMode::Attack {
                kind,
                probs,
                trigger,
                pulse_energy,
                blinding,
                cumulative,
            } => {
                let (family, stratum) = match kind {
                    AttackKind::Integrated => {
                        let x: f64 = rng.random();
                        let f = cumulative.iter().position(|&c| x < c).unwrap_or(2);
                        (f, f)
                    }
                    AttackKind::Blinding => (1, 0),
                    AttackKind::WavelengthBlinding => (2, 0),
                    _ => (0, 0),
                };
                let routing = faked_state_routing(trigger, &inbound_operator(&u, switched));
                let (rec, delivered) = match family {
                    0 => match run_quantum_attack(alice, probs, trigger, system.mu_e, &mut rng).1 {
                        Some(pulse) => {
                            let rec = bob_measurement(
                                &routing,
                                pulse.phase,
                                system.mu_e,
                                &system.detectors,
                                &ctx,
                                switched,
                                &mut rng,
                            );
                            (rec, true)
                        }
                        None => {
                            let rec = bob_measurement(
                                &vacuum,
                                alice,
                                0.0,
                                &system.detectors,
                                &ctx,
                                switched,
                                &mut rng,
                            );
                            (rec, false)
                        }
                    },
                    1 => {
                        let setup = blinding.as_deref().expect("blinding setup is planned");
                        let r = run_blinding_attack(alice, &u, switched, setup, &mut rng)?;
                        (r.record, r.forwarded.is_some())
                    }
                    _ => {
                        let (_, fwd, rec) =
                            run_wavelength_blinding_attack(alice, switched, probs, &mut rng);
                        (rec, fwd.is_some())
                    }
                };
                tallies[stratum].record(
                    &rec,
                    alice,
                    delivered.then_some(&routing),
                    *pulse_energy,
                    &mut rng,
                );
            }
        }
    }
    Ok(tallies)
}

/// Runs every block and returns the per-block tallies in block order.
pub fn block_tallies(scenario: &Scenario) -> Result<Vec<BlockTally>> {
    scenario.validate()?;
    let plan = plan(scenario)?;
    let blocks = scenario.rounds.div_ceil(BLOCK_ROUNDS);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(scenario.workers)
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))?;
    pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| run_block(scenario, &plan, b))
            .collect::<Result<Vec<_>>>()
    })
}

fn stratum(family: &str, weight: f64, t: &Tally) -> Stratum {
    let s = &t.sift;
    Stratum {
        family: family.to_string(),
        weight,
        rounds: s.rounds,
        alert_rate: t.alert_per_pulse.mean(),
        alert_se: t.alert_per_pulse.standard_error(),
        sifted_rate: if s.rounds > 0 {
            s.sifted as f64 / s.rounds as f64
        } else {
            0.0
        },
        sifted_se: binomial_se(s.sifted, s.rounds),
        qber: s.qber(),
        qber_se: binomial_se(s.errors, s.sifted),
    }
}

/// Executes the scenario. Output is identical for a given seed whatever the worker count.
pub fn run(scenario: &Scenario) -> Result<SimResult> {
    let started = Instant::now();
    let blocks = block_tallies(scenario)?;
    let n_strata = blocks.first().map_or(1, Vec::len);
    let mut strata = vec![Tally::default(); n_strata];
    for block in &blocks {
        for (acc, t) in strata.iter_mut().zip(block) {
            acc.merge(t);
        }
    }
    let mut total = Tally::default();
    for t in &strata {
        total.merge(t);
    }

    let weights = match &scenario.mode {
        Mode::Attack(a) if a.kind == AttackKind::Integrated => {
            a.weights.map(|w| w.as_array()).unwrap_or([1.0, 0.0, 0.0])
        }
        _ => [1.0, 0.0, 0.0],
    };
    let parts: Vec<Stratum> = strata
        .iter()
        .enumerate()
        .map(|(i, t)| {
            stratum(
                if n_strata == 1 {
                    scenario.mode.label()
                } else {
                    FAMILIES[i]
                },
                weights[i],
                t,
            )
        })
        .collect();

    let combine = |f: &dyn Fn(&Stratum) -> f64| parts.iter().map(|p| p.weight * f(p)).sum::<f64>();
    let combine_se = |f: &dyn Fn(&Stratum) -> f64| {
        parts
            .iter()
            .map(|p| (p.weight * f(p)).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let det_probs: [f64; DETECTOR_COUNT] = if n_strata == 1 {
        std::array::from_fn(|i| ratio(total.detector_clicks[i], total.forwarded))
    } else {
        std::array::from_fn(|i| {
            strata
                .iter()
                .zip(weights)
                .map(|(t, w)| w * ratio(t.detector_clicks[i], t.forwarded))
                .sum()
        })
    };

    let mut rates = RatesReport {
        provenance: Provenance::MonteCarlo,
        alert_rate: combine(&|p| p.alert_rate),
        sifted_rate: combine(&|p| p.sifted_rate),
        qber: combine(&|p| p.qber),
        detector_click_probs: det_probs,
        diagnostics: Vec::new(),
    };
    if total.forwarded == 0 {
        rates.diagnostics.push(Diagnostic::new(
            "no_forwarded_pulses",
            "no light reached Bob's receiver",
        ));
    }
    if let Some(a) = scenario.attack_config() {
        if matches!(a.kind, AttackKind::Blinding | AttackKind::Integrated) {
            rates.diagnostics.push(Diagnostic::new(
                "bright_trigger",
                "trigger pulses are classical: energy splits with fidelity 1",
            ));
        }
        if let BlindingLight::Polarized { .. } = a.blinding_light {
            rates.diagnostics.push(Diagnostic::new(
                "polarized_blinding",
                "blinding power per detector follows the randomizer each round",
            ));
        }
    }

    Ok(SimResult {
        schema_version: SCHEMA_VERSION,
        mode: scenario.mode.label().to_string(),
        seed: scenario.seed,
        workers: scenario.workers,
        rounds: total.sift.rounds,
        fixed_u: scenario.fixed_u,
        rates,
        alert_se: combine_se(&|p| p.alert_se),
        sifted_se: combine_se(&|p| p.sifted_se),
        qber_se: combine_se(&|p| p.qber_se),
        alert_per_round: total.alert_per_round.mean(),
        alert_per_round_se: total.alert_per_round.standard_error(),
        forwarded: total.forwarded,
        sifted: total.sift.sifted,
        errors: total.sift.errors,
        alert_clicks: total.sift.alert_clicks,
        detector_clicks: total.detector_clicks,
        alert_arrival_mean: total.arrival.mean(),
        alert_arrival_se: total.arrival.standard_error(),
        energy_a1_pj: total.energy_alert.mean(),
        energy_b1_pj: total.energy_secure.mean(),
        strata: if n_strata > 1 { parts } else { Vec::new() },
        wall_time_s: WallTime(started.elapsed().as_secs_f64()),
    })
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::AttackConfig;
    use crate::analysis::SystemParams;

    #[test]
    fn block_boundaries() {
        let s = Scenario::honest(SystemParams::desk(), 2 * BLOCK_ROUNDS + 17, 3);
        let blocks = block_tallies(&s).unwrap();
        assert_eq!(blocks.len(), 3);
        assert_eq!(blocks[2][0].sift.rounds, 17);
        assert_eq!(run(&s).unwrap().rounds, 2 * BLOCK_ROUNDS + 17);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let s = Scenario::attack(
            SystemParams::desk(),
            AttackConfig::new(AttackKind::Quantum),
            20_000,
            11,
        );
        let a = run(&s).unwrap();
        let b = run(&s.clone().with_workers(3)).unwrap();
        assert_eq!(a.rates, b.rates);
        assert_eq!(a.detector_clicks, b.detector_clicks);
    }

    #[test]
    fn counts_are_consistent() {
        let s = Scenario::attack(
            SystemParams::desk(),
            AttackConfig::new(AttackKind::Quantum),
            30_000,
            5,
        );
        let r = run(&s).unwrap();
        assert!(r.forwarded <= r.rounds);
        assert!(r.errors <= r.sifted && r.sifted <= r.rounds);
        assert!(r.detector_clicks[..2].iter().sum::<u64>() <= r.alert_clicks);
    }

    #[test]
    fn zero_rounds_rejected() {
        let s = Scenario::honest(SystemParams::desk(), 0, 1);
        assert!(matches!(run(&s), Err(Error::Config { .. })));
    }
}
