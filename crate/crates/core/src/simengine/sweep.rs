use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{run, Mode, Scenario, SimResult};
use crate::detectors::DETECTOR_NAMES;
use crate::error::{Error, Result};
use crate::report::{sig9, SCHEMA_VERSION};

/// A scenario parameter that a sweep can vary. Angles are in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Theta1,
    Theta2,
    Qwp,
    /// Trigger purity, set through the HWP1 angle.
    Purity,
    /// Trigger pulse energy, pJ.
    ET,
    /// Blinding power, mW.
    IB,
    RSw,
    /// Alice's mean photon number, both at Bob and where Eve intercepts.
    Mu,
    MuE,
    F,
    FE,
    EtaE,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 12] = [
        Self::Theta1,
        Self::Theta2,
        Self::Qwp,
        Self::Purity,
        Self::ET,
        Self::IB,
        Self::RSw,
        Self::Mu,
        Self::MuE,
        Self::F,
        Self::FE,
        Self::EtaE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Theta1 => "theta1",
            Self::Theta2 => "theta2",
            Self::Qwp => "qwp",
            Self::Purity => "purity",
            Self::ET => "e_t",
            Self::IB => "i_b",
            Self::RSw => "r_sw",
            Self::Mu => "mu",
            Self::MuE => "mu_e",
            Self::F => "f",
            Self::FE => "f_e",
            Self::EtaE => "eta_e",
        }
    }

    /// Sets the parameter on `scenario`.
    pub fn apply(self, scenario: &mut Scenario, value: f64) -> Result<()> {
        let sys = &mut scenario.system;
        match self {
            Self::RSw => sys.switch_rate = value,
            Self::Mu => {
                sys.mu = value;
                sys.eve.mu = value;
            }
            Self::MuE => sys.mu_e = value,
            Self::F => sys.fidelity = value,
            Self::FE => sys.eve.fidelity = value,
            Self::EtaE => sys.eve.efficiency = value,
            _ => {
                let Mode::Attack(attack) = &mut scenario.mode else {
                    return Err(Error::config(
                        "sweep.parameter",
                        format!("`{}` needs an attack scenario", self.name()),
                    ));
                };
                match self {
                    Self::Theta1 => attack.source.theta1 = value.to_radians(),
                    Self::Theta2 => attack.source.theta2 = value.to_radians(),
                    Self::Qwp => attack.source.qwp_angle = value.to_radians(),
                    Self::Purity => {
                        if !(0.5..=1.0).contains(&value) {
                            return Err(Error::domain("purity", value, "[1/2, 1]"));
                        }
                        // 1 − ½ sin²4θ₁ = P
                        attack.source.theta1 = (2.0 * (1.0 - value)).sqrt().min(1.0).asin() / 4.0;
                    }
                    Self::ET => attack.source.pulse_energy = value,
                    Self::IB => attack.blinding_power_mw = value,
                    _ => unreachable!(),
                }
            }
        }
        Ok(())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownParameter(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: SweepParameter,
    pub value: f64,
    pub result: SimResult,
}

/// Runs `template` once per grid value with the same seed.
pub fn sweep(
    template: &Scenario,
    parameter: SweepParameter,
    grid: &[f64],
) -> Result<Vec<SweepRow>> {
    grid.iter()
        .map(|&value| {
            let mut s = template.clone();
            parameter.apply(&mut s, value)?;
            Ok(SweepRow {
                parameter,
                value,
                result: run(&s)?,
            })
        })
        .collect()
}

pub fn sweep_csv_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "schema_version",
        "parameter",
        "value",
        "rounds",
        "alert_rate",
        "alert_se",
        "sifted_rate",
        "sifted_se",
        "qber",
        "qber_se",
        "alert_arrival",
        "alert_arrival_se",
    ]
    .map(String::from)
    .to_vec();
    h.extend(DETECTOR_NAMES.iter().map(|d| format!("d_{d}")));
    h.push("energy_a1_pj".into());
    h.push("energy_b1_pj".into());
    h
}

/// Writes one row per grid point; `d_*` columns hold raw click counts.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(sweep_csv_header())?;
    for row in rows {
        let r = &row.result;
        let mut rec = vec![
            SCHEMA_VERSION.to_string(),
            row.parameter.name().to_string(),
            sig9(row.value),
            r.rounds.to_string(),
            sig9(r.rates.alert_rate),
            sig9(r.alert_se),
            sig9(r.rates.sifted_rate),
            sig9(r.sifted_se),
            sig9(r.rates.qber),
            sig9(r.qber_se),
            sig9(r.alert_arrival_mean),
            sig9(r.alert_arrival_se),
        ];
        rec.extend(r.detector_clicks.iter().map(u64::to_string));
        rec.push(sig9(r.energy_a1_pj));
        rec.push(sig9(r.energy_b1_pj));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<sweep output>", e))?;
    Ok(())
}
