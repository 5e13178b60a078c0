//! Threshold-curve CSV files.
//!
//! One file per physical detector, header `I_mW,E_never_pJ,E_always_pJ,gated`, rows for the
//! gated and ungated variants may be interleaved. Rows of each variant must have strictly
//! increasing `I_mW`.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DetectorModel, DetectorRole, GateVariant, GeigerParams, ThresholdCurve};
use crate::error::{Error, Result};

pub const THRESHOLD_HEADER: [&str; 4] = ["I_mW", "E_never_pJ", "E_always_pJ", "gated"];

/// Never/always curves of one detector in one gate variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePair {
    pub e_never: ThresholdCurve,
    pub e_always: ThresholdCurve,
}

/// Everything read from one threshold CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdData {
    pub label: String,
    pub variants: BTreeMap<GateVariant, CurvePair>,
}

impl ThresholdData {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Self::from_reader(file, &label)
    }

    pub fn from_reader<R: Read>(reader: R, label: &str) -> Result<Self> {
        let schema = |row: usize, message: String| Error::Schema {
            source_name: label.to_string(),
            row,
            message,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers().map_err(|e| schema(1, e.to_string()))?.clone();
        if header.iter().ne(THRESHOLD_HEADER) {
            return Err(schema(
                1,
                format!(
                    "expected header `{}`, found `{}`",
                    THRESHOLD_HEADER.join(","),
                    header.iter().collect::<Vec<_>>().join(",")
                ),
            ));
        }

        let mut rows: BTreeMap<GateVariant, (Vec<(f64, f64)>, Vec<(f64, f64)>, Vec<usize>)> =
            BTreeMap::new();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
                schema(row, e.to_string())
            })?;
            let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
            let num = |k: usize| -> Result<f64> {
                let field = &record[k];
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| {
                        schema(
                            row,
                            format!(
                                "column `{}`: cannot parse `{field}` as a number",
                                THRESHOLD_HEADER[k]
                            ),
                        )
                    })
            };
            let (i, never, always) = (num(0)?, num(1)?, num(2)?);
            let variant = match record[3].to_ascii_lowercase().as_str() {
                "true" | "1" | "gated" => GateVariant::Gated,
                "false" | "0" | "ungated" => GateVariant::Ungated,
                other => {
                    return Err(schema(
                        row,
                        format!("column `gated`: expected true/false, found `{other}`"),
                    ))
                }
            };
            if never < 0.0 || always < never {
                return Err(schema(
                    row,
                    format!("need 0 ≤ E_never ≤ E_always, found {never} and {always}"),
                ));
            }
            let entry = rows.entry(variant).or_default();
            if let Some(&(prev, _)) = entry.0.last() {
                if i <= prev {
                    return Err(schema(
                        row,
                        format!(
                            "{} rows: I_mW {i} does not increase (previous {prev})",
                            variant.as_str()
                        ),
                    ));
                }
                if never < entry.0.last().unwrap().1 || always < entry.1.last().unwrap().1 {
                    return Err(schema(
                        row,
                        format!(
                            "{} rows: threshold energy decreases with blinding power",
                            variant.as_str()
                        ),
                    ));
                }
            }
            entry.0.push((i, never));
            entry.1.push((i, always));
            entry.2.push(row);
        }
        if rows.is_empty() {
            return Err(schema(2, "no data rows".into()));
        }

        let mut variants = BTreeMap::new();
        for (variant, (never, always, _)) in rows {
            variants.insert(
                variant,
                CurvePair {
                    e_never: ThresholdCurve::new(never)?,
                    e_always: ThresholdCurve::new(always)?,
                },
            );
        }
        Ok(Self {
            label: label.to_string(),
            variants,
        })
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(THRESHOLD_HEADER)?;
        for (variant, pair) in &self.variants {
            for (&(i, n), &(_, a)) in pair.e_never.points().iter().zip(pair.e_always.points()) {
                let gated = if *variant == GateVariant::Gated {
                    "true"
                } else {
                    "false"
                };
                w.write_record([
                    i.to_string(),
                    n.to_string(),
                    a.to_string(),
                    gated.to_string(),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn curves(&self, variant: GateVariant) -> Result<&CurvePair> {
        self.variants.get(&variant).ok_or_else(|| Error::Schema {
            source_name: self.label.clone(),
            row: 0,
            message: format!("no {} rows", variant.as_str()),
        })
    }

    pub fn model(
        &self,
        role: DetectorRole,
        variant: GateVariant,
        geiger: GeigerParams,
    ) -> Result<DetectorModel> {
        let pair = self.curves(variant)?;
        DetectorModel::new(
            self.label.clone(),
            role,
            variant,
            geiger,
            pair.e_never.clone(),
            pair.e_always.clone(),
        )
    }
}
