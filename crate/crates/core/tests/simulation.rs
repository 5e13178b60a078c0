use polgate::adversary::{AttackConfig, AttackKind, ThresholdSource};
use polgate::analysis::{attack_rates, honest_rates, RandomizerModel, SystemParams};
use polgate::report::to_json_string;
use polgate::simengine::{block_tallies, run, sweep, Scenario, SimResult, SweepParameter};
use polgate::stats::{ks_critical_1pct, ks_two_sample};

fn flat_blinding() -> AttackConfig {
    let mut a = AttackConfig::new(AttackKind::Blinding);
    a.source.pulse_energy = 3.2;
    a.blinding_power_mw = 1.0;
    a.thresholds = Some(ThresholdSource::Flat {
        alert_never_pj: 1.0,
        alert_always_pj: 1.2,
        secure_never_pj: 0.6,
        secure_always_pj: 0.7,
    });
    a
}

fn json_without_wall_time(r: &SimResult) -> String {
    let mut v: serde_json::Value = serde_json::from_str(&to_json_string(r).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("wall_time_s");
    v.to_string()
}

#[test]
fn same_seed_same_bytes() {
    let s = Scenario::attack(SystemParams::desk(), flat_blinding(), 50_000, 17).with_workers(3);
    assert_eq!(
        json_without_wall_time(&run(&s).unwrap()),
        json_without_wall_time(&run(&s).unwrap())
    );
}

#[test]
fn worker_count_only_changes_speed() {
    let s = Scenario::attack(
        SystemParams::desk(),
        AttackConfig::new(AttackKind::Quantum),
        40_000,
        3,
    );
    let one = run(&s.clone().with_workers(1)).unwrap();
    let many = run(&s.with_workers(7)).unwrap();
    assert_eq!(one.rates, many.rates);
    assert_eq!(one.detector_clicks, many.detector_clicks);
}

#[test]
fn different_seeds_differ() {
    let a = run(&Scenario::honest(SystemParams::desk(), 20_000, 1)).unwrap();
    let b = run(&Scenario::honest(SystemParams::desk(), 20_000, 2)).unwrap();
    assert_ne!(a.detector_clicks, b.detector_clicks);
}

#[test]
fn blocks_from_two_seeds_share_a_distribution() {
    let blocks = |seed| {
        let s = Scenario::honest(SystemParams::desk(), 4096 * 400, seed).with_workers(4);
        block_tallies(&s)
            .unwrap()
            .iter()
            .map(|b| b[0].sift.sifted as f64)
            .collect::<Vec<_>>()
    };
    let (mut a, mut b) = (blocks(11), blocks(12));
    let d = ks_two_sample(&mut a, &mut b);
    assert!(d < ks_critical_1pct(a.len(), b.len()), "KS {d}");
}

#[test]
fn standard_errors_are_calibrated() {
    let sys = SystemParams::desk();
    let truth = honest_rates(&sys).sifted_rate;
    let inside = (0..100)
        .filter(|&seed| {
            let r = run(&Scenario::honest(sys, 20_000, seed)).unwrap();
            (r.rates.sifted_rate - truth).abs() < r.sifted_se
        })
        .count();
    assert!((55..=81).contains(&inside), "{inside}/100 within one SE");
}

#[test]
fn honest_run_tracks_fidelity() {
    let mut sys = SystemParams::ideal();
    sys.fidelity = 0.95;
    sys.mu = 0.5;
    let r = run(&Scenario::honest(sys, 1_000_000, 4).with_workers(8)).unwrap();
    assert_eq!(r.rates.alert_rate, 0.0);
    let a = honest_rates(&sys);
    assert!(
        (r.rates.qber - a.qber).abs() < 3.0 * r.qber_se,
        "{} vs {}",
        r.rates.qber,
        a.qber
    );
    assert!((r.rates.sifted_rate - a.sifted_rate).abs() < 3.0 * r.sifted_se);
}

#[test]
fn wavelength_alert_equals_switch_rate() {
    let mut sys = SystemParams::desk();
    sys.switch_rate = 0.1;
    let r = run(&Scenario::attack(
        sys,
        AttackConfig::new(AttackKind::WavelengthBlinding),
        200_000,
        5,
    )
    .with_workers(4))
    .unwrap();
    assert!((r.rates.alert_rate - 0.1).abs() < 3.0 * r.alert_se);
}

#[test]
fn blinding_alert_rate_grows_with_switching() {
    let s = Scenario::attack(SystemParams::desk(), flat_blinding(), 100_000, 6).with_workers(4);
    let rows = sweep(&s, SweepParameter::RSw, &[0.0, 0.25, 0.5]).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].result.rates.alert_rate >= w[0].result.rates.alert_rate);
    }
    let mut sys = SystemParams::desk();
    let mut last = 0.0;
    for r_sw in [0.0, 0.25, 0.5] {
        sys.switch_rate = r_sw;
        let a = attack_rates(&sys, &flat_blinding(), &RandomizerModel::Haar, None).unwrap();
        assert!(a.alert_rate >= last);
        last = a.alert_rate;
    }
}

#[test]
fn blinding_in_exact_regime_matches_closed_form() {
    let sys = SystemParams::desk();
    let a = attack_rates(&sys, &flat_blinding(), &RandomizerModel::Haar, None).unwrap();
    let m = run(&Scenario::attack(sys, flat_blinding(), 300_000, 8).with_workers(4)).unwrap();
    assert!((a.alert_rate - m.rates.alert_rate).abs() < 3.0 * m.alert_se);
    assert!((a.sifted_rate - m.rates.sifted_rate).abs() < 3.0 * m.sifted_se);
    assert!((a.qber - m.rates.qber).abs() < 3.0 * m.qber_se);
}

#[test]
fn intercept_resend_arrival_is_a_quarter() {
    let s = Scenario::attack(
        SystemParams::ideal(),
        AttackConfig::intercept_resend(),
        200_000,
        10,
    )
    .with_workers(4);
    let r = run(&s).unwrap();
    assert!((r.alert_arrival_mean - 0.25).abs() < 0.003);
    assert!((r.rates.qber - 0.25).abs() < 0.01);
}

#[test]
fn fixed_randomizer_with_theta2_sweep_is_sinusoidal() {
    let mut s = Scenario::attack(
        SystemParams::ideal(),
        AttackConfig::new(AttackKind::Quantum),
        2_000,
        1,
    );
    s.fixed_u = true;
    let rows = sweep(&s, SweepParameter::Theta2, &[0.0, 22.5, 67.5, 90.0]).unwrap();
    let y: Vec<f64> = rows.iter().map(|r| r.result.alert_arrival_mean).collect();
    assert!((y[0] - y[3]).abs() < 1e-12);
    assert!((y[1] + y[2] - 0.5).abs() < 1e-12);
}
