//! Closed-form and simulated rates of the detector-blinding attack.

use polgate::adversary::{AttackConfig, AttackKind, ThresholdSource};
use polgate::analysis::{attack_rates, RandomizerModel, SystemParams};
use polgate::simengine::{run, Scenario};

fn main() {
    let mut attack = AttackConfig::new(AttackKind::Blinding);
    attack.source.pulse_energy = 3.2;
    attack.blinding_power_mw = 1.0;
    attack.thresholds = Some(ThresholdSource::Flat {
        alert_never_pj: 1.0,
        alert_always_pj: 1.2,
        secure_never_pj: 0.6,
        secure_always_pj: 0.7,
    });

    println!(
        "{:>5} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "R_sw", "R_a", "R_a MC", "R_sec", "sifted", "QBER"
    );
    for r_sw in [0.0, 0.1, 0.25, 0.5] {
        let mut sys = SystemParams::desk();
        sys.switch_rate = r_sw;
        let a = attack_rates(&sys, &attack, &RandomizerModel::Haar, None).unwrap();
        let m = run(&Scenario::attack(sys, attack.clone(), 200_000, 4).with_workers(4)).unwrap();
        let r_sec = a.diagnostic("secure_rate").and_then(|d| d.value).unwrap();
        println!(
            "{r_sw:>5.2} {:>9.5} {:>9.5} {r_sec:>9.5} {:>9.5} {:>9.5}",
            a.alert_rate, m.rates.alert_rate, a.sifted_rate, a.qber
        );
    }
}
