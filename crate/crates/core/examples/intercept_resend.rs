//! The textbook intercept-resend attack is caught on path a a quarter of the time.

use polgate::adversary::AttackConfig;
use polgate::analysis::SystemParams;
use polgate::simengine::{run, Scenario};

fn main() {
    let s = Scenario::attack(
        SystemParams::ideal(),
        AttackConfig::intercept_resend(),
        1_000_000,
        2,
    )
    .with_workers(4);
    let r = run(&s).unwrap();
    println!(
        "gated alert probability {:.4} ± {:.4}",
        r.alert_arrival_mean, r.alert_arrival_se
    );
    println!(
        "QBER on the key qubit   {:.4} ± {:.4}",
        r.rates.qber, r.qber_se
    );
    println!(
        "alert click rate        {:.4} (coherent resend, mu_e = 1)",
        r.rates.alert_rate
    );
}
