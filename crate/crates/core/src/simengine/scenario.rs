use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::adversary::AttackConfig;
use crate::analysis::{RandomizerModel, SystemParams};
use crate::error::{Error, Result};
use crate::qmath::JonesUnitary;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Honest,
    Attack(AttackConfig),
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Honest => "honest",
            Mode::Attack(a) => a.kind.as_str(),
        }
    }
}

/// Values of one swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    /// `[start, stop, points]`, inclusive, used when `values` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linspace: Option<(f64, f64, usize)>,
}

impl SweepSpec {
    pub fn grid(&self) -> Result<Vec<f64>> {
        match (&self.values, self.linspace) {
            (Some(v), None) => Ok(v.clone()),
            (None, Some((a, b, n))) => Ok(match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n)
                    .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                    .collect(),
            }),
            _ => Err(Error::config(
                "sweep",
                "give exactly one of `values` and `linspace`",
            )),
        }
    }
}

/// A Monte Carlo run: what happens each round, the physical parameters, and the run size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub mode: Mode,
    pub system: SystemParams,
    #[serde(default = "default_rounds")]
    pub rounds: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Hold Bob's randomizer at the bench setting instead of drawing it every round.
    #[serde(default)]
    pub fixed_u: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    /// Directory that relative file paths in the scenario are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_rounds() -> u64 {
    100_000
}

fn default_workers() -> usize {
    1
}

impl Scenario {
    pub fn honest(system: SystemParams, rounds: u64, seed: u64) -> Self {
        Self {
            mode: Mode::Honest,
            system,
            rounds,
            seed,
            workers: 1,
            fixed_u: false,
            sweep: None,
            base_dir: None,
        }
    }

    pub fn attack(system: SystemParams, attack: AttackConfig, rounds: u64, seed: u64) -> Self {
        Self {
            mode: Mode::Attack(attack),
            ..Self::honest(system, rounds, seed)
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn randomizer(&self) -> RandomizerModel {
        if self.fixed_u {
            RandomizerModel::Fixed(JonesUnitary::bench_randomizer())
        } else {
            RandomizerModel::Haar
        }
    }

    pub fn attack_config(&self) -> Option<&AttackConfig> {
        match &self.mode {
            Mode::Attack(a) => Some(a),
            Mode::Honest => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::config("rounds", "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::config("workers", "must be at least 1"));
        }
        self.system.validate()?;
        if let Mode::Attack(a) = &self.mode {
            a.validate()?;
        }
        Ok(())
    }
}
