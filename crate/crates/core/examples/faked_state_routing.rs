//! Injected light passes the randomizer once, so its path is random.

use polgate::adversary::{eve_source_state, EveSourceConfig};
use polgate::protocol::faked_state_routing;
use polgate::qmath::{haar_random_unitary, JonesUnitary};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let (trigger, _) = eve_source_state(&EveSourceConfig::default()).unwrap();
    let bench = faked_state_routing(&trigger, &JonesUnitary::bench_randomizer());
    println!(
        "bench randomizer: p_alert = {:.4}, p_secure = {:.4}",
        bench.p_alert, bench.p_secure
    );

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut hist = [0usize; 10];
    let n = 50_000;
    for _ in 0..n {
        let p = faked_state_routing(&trigger, &haar_random_unitary(&mut rng)).p_alert;
        hist[((p * 10.0) as usize).min(9)] += 1;
    }
    println!("p_alert over Haar draws (a pure trigger gives a flat histogram):");
    for (i, c) in hist.iter().enumerate() {
        println!(
            "  [{:.1}, {:.1})  {:>5.3}",
            i as f64 / 10.0,
            (i + 1) as f64 / 10.0,
            *c as f64 / n as f64
        );
    }
}
