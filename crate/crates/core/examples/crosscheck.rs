//! Closed-form rates against Monte Carlo for every attack at the desk parameter set.

use polgate::adversary::{AttackConfig, AttackKind, MixtureWeights, ThresholdSource};
use polgate::analysis::{attack_rates, honest_rates, RandomizerModel, SystemParams};
use polgate::simengine::{run, Scenario};

fn main() {
    let mut sys = SystemParams::desk();
    sys.switch_rate = 0.1;
    let flat = ThresholdSource::Flat {
        alert_never_pj: 1.0,
        alert_always_pj: 1.2,
        secure_never_pj: 0.6,
        secure_always_pj: 0.7,
    };
    let mut blinding = AttackConfig::new(AttackKind::Blinding);
    blinding.source.pulse_energy = 3.2;
    blinding.blinding_power_mw = 1.0;
    blinding.thresholds = Some(flat);
    let mut integrated = blinding.clone();
    integrated.kind = AttackKind::Integrated;
    integrated.weights = Some(MixtureWeights {
        quantum: 0.5,
        blinding: 0.25,
        wavelength: 0.25,
    });
    let attacks = [
        AttackConfig::new(AttackKind::Quantum),
        blinding,
        AttackConfig::new(AttackKind::WavelengthBlinding),
        integrated,
    ];

    let z = |a: f64, m: f64, se: f64| (m - a) / se;
    let h = honest_rates(&sys);
    let m = run(&Scenario::honest(sys, 1_000_000, 1).with_workers(8)).unwrap();
    println!(
        "honest               sifted z = {:+.2}  qber z = {:+.2}",
        z(h.sifted_rate, m.rates.sifted_rate, m.sifted_se),
        z(h.qber, m.rates.qber, m.qber_se)
    );
    for attack in attacks {
        let a = attack_rates(&sys, &attack, &RandomizerModel::Haar, None).unwrap();
        let m = run(&Scenario::attack(sys, attack.clone(), 1_000_000, 1).with_workers(8)).unwrap();
        println!(
            "{:<20} alert z = {:+.2}  sifted z = {:+.2}  qber z = {:+.2}",
            attack.kind.as_str(),
            z(a.alert_rate, m.rates.alert_rate, m.alert_se),
            z(a.sifted_rate, m.rates.sifted_rate, m.sifted_se),
            z(a.qber, m.rates.qber, m.qber_se)
        );
        if let Some(d) = a.diagnostic("alert_energy_consistent") {
            let v = d.value.unwrap_or(f64::NAN);
            println!(
                "{:<20} energy-consistent alert z = {:+.2}",
                "",
                z(v, m.rates.alert_rate, m.alert_se)
            );
        }
    }
}
