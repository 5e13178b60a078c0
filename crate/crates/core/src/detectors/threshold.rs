use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What to do when a curve is evaluated outside its tabulated power range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extrapolation {
    #[default]
    Error,
    /// Hold the end value constant.
    Clamp,
}

/// A blinded-detector threshold energy as a function of blinding power.
///
/// Points are `(I [mW], E [pJ])` with strictly increasing `I` and non-decreasing `E`.
/// Evaluation interpolates linearly between neighbours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveRepr", into = "CurveRepr")]
pub struct ThresholdCurve {
    points: Vec<(f64, f64)>,
    extrapolation: Extrapolation,
}

#[derive(Serialize, Deserialize)]
struct CurveRepr {
    points: Vec<(f64, f64)>,
    #[serde(default)]
    extrapolation: Extrapolation,
}

impl TryFrom<CurveRepr> for ThresholdCurve {
    type Error = Error;

    fn try_from(r: CurveRepr) -> Result<Self> {
        Ok(Self::new(r.points)?.with_extrapolation(r.extrapolation))
    }
}

impl From<ThresholdCurve> for CurveRepr {
    fn from(c: ThresholdCurve) -> Self {
        CurveRepr {
            points: c.points,
            extrapolation: c.extrapolation,
        }
    }
}

impl ThresholdCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(curve_error(0, "curve has no points"));
        }
        for (k, &(i, e)) in points.iter().enumerate() {
            if !i.is_finite() || !e.is_finite() || e < 0.0 {
                return Err(curve_error(k, format!("invalid point ({i}, {e})")));
            }
            if k > 0 {
                let (pi, pe) = points[k - 1];
                if i <= pi {
                    return Err(curve_error(
                        k,
                        format!("power {i} mW does not increase (previous {pi} mW)"),
                    ));
                }
                if e < pe {
                    return Err(curve_error(
                        k,
                        format!("energy {e} pJ decreases (previous {pe} pJ)"),
                    ));
                }
            }
        }
        Ok(Self {
            points,
            extrapolation: Extrapolation::Error,
        })
    }

    /// A threshold that does not depend on blinding power over `[lo, hi]` mW.
    pub fn constant(energy_pj: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, energy_pj), (hi, energy_pj)])
    }

    pub fn with_extrapolation(mut self, policy: Extrapolation) -> Self {
        self.extrapolation = policy;
        self
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn extrapolation(&self) -> Extrapolation {
        self.extrapolation
    }

    /// Tabulated power range `[min, max]` in mW.
    pub fn domain(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    pub fn covers(&self, power_mw: f64) -> bool {
        let (lo, hi) = self.domain();
        (lo..=hi).contains(&power_mw)
    }

    pub fn eval(&self, power_mw: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !self.covers(power_mw) {
            return match self.extrapolation {
                Extrapolation::Clamp if power_mw < lo => Ok(self.points[0].1),
                Extrapolation::Clamp if power_mw > hi => Ok(self.points[self.points.len() - 1].1),
                _ => Err(Error::OutOfDomain {
                    power_mw,
                    min_mw: lo,
                    max_mw: hi,
                }),
            };
        }
        let k = self.points.partition_point(|&(i, _)| i <= power_mw);
        if k == self.points.len() {
            return Ok(self.points[k - 1].1);
        }
        let (i0, e0) = self.points[k - 1];
        let (i1, e1) = self.points[k];
        Ok(e0 + (e1 - e0) * (power_mw - i0) / (i1 - i0))
    }

    /// Slopes of consecutive segments.
    pub fn secant_slopes(&self) -> Vec<f64> {
        self.points
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect()
    }

    /// True when secant slopes never increase (concave, "compressive" growth).
    pub fn is_compressive(&self) -> bool {
        self.secant_slopes()
            .windows(2)
            .all(|w| w[1] <= w[0] + 1e-12)
    }
}

fn curve_error(index: usize, message: impl Into<String>) -> Error {
    Error::Schema {
        source_name: "threshold curve".into(),
        row: index + 1,
        message: message.into(),
    }
}
