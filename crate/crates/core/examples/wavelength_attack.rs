//! Wavelength-selective blinding: only the switch exposes Eve.

use polgate::adversary::{AttackConfig, AttackKind};
use polgate::analysis::{attack_rates, RandomizerModel, SystemParams};
use polgate::simengine::{run, Scenario};

fn main() {
    let attack = AttackConfig::new(AttackKind::WavelengthBlinding);
    for r_sw in [0.0, 0.05, 0.25] {
        let mut sys = SystemParams::desk();
        sys.switch_rate = r_sw;
        let a = attack_rates(&sys, &attack, &RandomizerModel::Haar, None).unwrap();
        let m = run(&Scenario::attack(sys, attack.clone(), 200_000, 6).with_workers(4)).unwrap();
        println!(
            "R_sw = {r_sw:.2}: alert {:.4} (MC {:.4} ± {:.4}), sifted {:.5}, QBER {:.4}",
            a.alert_rate, m.rates.alert_rate, m.alert_se, a.sifted_rate, a.qber
        );
    }
}
