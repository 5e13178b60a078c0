//! Seeded, parallel Monte Carlo runs of the protocol under an honest or attacked channel.
//!
//! A run is cut into blocks of [`BLOCK_ROUNDS`] rounds. Block `k` uses a ChaCha8 generator
//! seeded with the scenario seed and switched to stream `k`, and the per-block tallies are
//! merged in block order. The worker count therefore only changes how fast a run finishes.
//!
//! Each round draws, in order: the randomizer (unless fixed), Alice's phase, the switch flag,
//! the attack family for integrated attacks, then whatever the round logic needs.

mod run;
mod scenario;
mod sweep;

pub use run::{block_tallies, run, BlockTally, SimResult, Stratum, Tally, WallTime, BLOCK_ROUNDS};
pub use scenario::{Mode, Scenario, SweepSpec};
pub use sweep::{sweep, sweep_csv_header, write_sweep_csv, SweepParameter, SweepRow};
