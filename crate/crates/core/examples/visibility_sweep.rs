//! Sweeps the second half-wave plate with the randomizer fixed and fits the fringe.

use polgate::adversary::{AttackConfig, AttackKind, EveSourceConfig};
use polgate::analysis::{fit_sinusoid, SystemParams};
use polgate::simengine::{sweep, Scenario, SweepParameter};

fn main() {
    let grid: Vec<f64> = (0..=36).map(|i| i as f64 * 5.0).collect();
    for theta1 in [0.0, 10.4, 15.0, 18.9] {
        let mut attack = AttackConfig::new(AttackKind::Quantum);
        attack.source = EveSourceConfig::with_purity_angle(f64::to_radians(theta1));
        let purity = attack.source.purity();
        let mut s = Scenario::attack(SystemParams::ideal(), attack, 50_000, 8).with_workers(4);
        s.fixed_u = true;
        let rows = sweep(&s, SweepParameter::Theta2, &grid).unwrap();
        let y: Vec<f64> = rows.iter().map(|r| r.result.alert_arrival_mean).collect();
        let fit = fit_sinusoid(&grid, &y).unwrap();
        println!(
            "theta1 = {theta1:>4.1}  P = {purity:.3}  visibility {:.3} (expected {:.3}), R^2 = {:.4}",
            fit.visibility,
            (2.0 * purity - 1.0).sqrt(),
            fit.r_squared
        );
    }
}
