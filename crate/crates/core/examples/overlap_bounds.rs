//! How far a partly mixed trigger can be steered into one path.

use polgate::qmath::{overlap_bounds, sample_overlap_extremes, JonesVector, PolarizationState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "P", "p_max", "sampled", "p_min", "sampled"
    );
    for p in [1.0, 0.78, 0.63, 0.53, 0.5] {
        let bounds = overlap_bounds(p).unwrap();
        let state = PolarizationState::from_bloch([(2.0 * p - 1.0_f64).sqrt(), 0.0, 0.0]).unwrap();
        let s = sample_overlap_extremes(&state, &JonesVector::horizontal(), 200_000, &mut rng);
        println!(
            "{p:>6.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            bounds.max, s.max, bounds.min, s.min
        );
    }
}
