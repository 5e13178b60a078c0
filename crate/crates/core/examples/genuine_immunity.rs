//! Bob's own photon always returns to the secure path, whatever the randomizer does.

use polgate::protocol::{genuine_roundtrip, Phase, PhotonRound};
use polgate::qmath::haar_random_unitary;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draws = 100_000;
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let u = haar_random_unitary(&mut rng);
        for phase in Phase::ALL {
            let r = genuine_roundtrip(&PhotonRound::new(phase, u));
            worst = worst.max(r.p_alert);
        }
    }
    println!("{draws} randomizer draws x 4 phases: max p_alert = {worst:.3e}");

    let mut round = PhotonRound::new(Phase::Zero, haar_random_unitary(&mut rng));
    round.switch_applied = true;
    println!(
        "with the switch applied: p_alert = {:.6}",
        genuine_roundtrip(&round).p_alert
    );
}
