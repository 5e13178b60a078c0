//! Eve's source: the first half-wave plate sets the trigger purity.

use polgate::adversary::{eve_source_state, EveSourceConfig};

fn main() {
    for deg in [0.0, 10.4, 15.0, 18.9, 22.5] {
        let cfg = EveSourceConfig::with_purity_angle(f64::to_radians(deg));
        let (rho, tb) = eve_source_state(&cfg).unwrap();
        let [x, y, z] = rho.bloch_vector();
        println!(
            "theta1 = {deg:>4.1} deg  purity = {:.4}  bloch = ({x:+.3}, {y:+.3}, {z:+.3})  phi_e = {:.2}",
            rho.purity(),
            tb.relative_phase()
        );
    }
}
