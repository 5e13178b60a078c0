//! Detector-assignment audit.
//!
//! Eve's trigger pulse reaches an alert detector with at most `½·p_max·E_T` and a
//! matched secure detector with at most `¼·p_max·E_T`, so the two maximum energies sit on
//! the line `Ê_b = ½·Ê_a`. A blinded threshold pair `(E_never^a, E_never^b)` leaves Eve a
//! traceless window exactly when part of that line falls inside the camouflage rectangle
//! `Ê_a < E_never^a, Ê_b > E_never^b`, i.e. when `E_never^b / E_never^a < ½`.

use serde::{Deserialize, Serialize};

use super::{DetectorSet, GateVariant};
use crate::error::{Error, Result};
use crate::qmath::overlap_bounds;

/// Largest fraction of a trigger pulse of purity `P_T` that Bob's randomizer can send to
/// the alert path: `½(1 + √(2P_T − 1))`.
pub fn p_max_trigger(purity: f64) -> Result<f64> {
    Ok(overlap_bounds(purity)?.max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionsAB {
    /// No alert detector can fire: `½·p_max·E_T < min_i E_never^ai(I_B/4)`.
    pub a_holds: bool,
    /// Some secure detector can fire: `¼·p_max·E_T > min_j E_never^bj(I_B/8)`.
    pub b_holds: bool,
}

impl ConditionsAB {
    pub fn attack_possible(&self) -> bool {
        self.a_holds && self.b_holds
    }
}

fn min_thresholds(set: &DetectorSet, blinding_mw: f64) -> Result<(f64, f64)> {
    let t = set.thresholds_unpolarized(blinding_mw)?;
    let min_a = t[..2]
        .iter()
        .map(|r| r.e_never)
        .fold(f64::INFINITY, f64::min);
    let min_b = t[2..]
        .iter()
        .map(|r| r.e_never)
        .fold(f64::INFINITY, f64::min);
    Ok((min_a, min_b))
}

pub fn check_conditions_ab(
    set: &DetectorSet,
    e_t: f64,
    purity_t: f64,
    blinding_mw: f64,
) -> Result<ConditionsAB> {
    if !(e_t >= 0.0) {
        return Err(Error::domain("E_T", e_t, "[0, ∞) pJ"));
    }
    let p = p_max_trigger(purity_t)?;
    let (min_a, min_b) = min_thresholds(set, blinding_mw)?;
    Ok(ConditionsAB {
        a_holds: 0.5 * p * e_t < min_a,
        b_holds: 0.25 * p * e_t > min_b,
    })
}

/// Open interval of trigger energies `(lo, hi)` pJ for which both conditions hold, if any.
pub fn attack_energy_window(
    set: &DetectorSet,
    purity_t: f64,
    blinding_mw: f64,
) -> Result<Option<(f64, f64)>> {
    let p = p_max_trigger(purity_t)?;
    let (min_a, min_b) = min_thresholds(set, blinding_mw)?;
    let (lo, hi) = (4.0 * min_b / p, 2.0 * min_a / p);
    Ok((lo < hi).then_some((lo, hi)))
}

/// Region of maximum-energy pairs `(Ê_a, Ê_b)` with `Ê_a < x` and `Ê_b > y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CamouflageRegion {
    pub alert_energy_below_pj: f64,
    pub secure_energy_above_pj: f64,
    /// Range of `Ê_a` over which the operational line `Ê_b = ½Ê_a` runs inside the region.
    pub operational_overlap_pj: Option<[f64; 2]>,
}

impl CamouflageRegion {
    pub fn new(x: f64, y: f64) -> Self {
        Self {
            alert_energy_below_pj: x,
            secure_energy_above_pj: y,
            operational_overlap_pj: (2.0 * y < x).then_some([2.0 * y, x]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionPoint {
    pub gate: Option<GateVariant>,
    pub i_b_mw: f64,
    pub alert_detector: String,
    pub secure_detector: String,
    pub e_never_alert_pj: f64,
    pub e_never_secure_pj: f64,
    /// `E_never^b(I_B/8) / E_never^a(I_B/4)`
    pub ratio: f64,
    /// True when `ratio ≤ ½`; the boundary counts as a violation.
    pub violates: bool,
    pub camouflage: CamouflageRegion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditVerdict {
    pub gate: Option<GateVariant>,
    pub points: Vec<IntersectionPoint>,
    pub min_ratio: f64,
    pub secure: bool,
}

impl AuditVerdict {
    pub fn violations(&self) -> impl Iterator<Item = &IntersectionPoint> {
        self.points.iter().filter(|p| p.violates)
    }
}

/// Audits every (alert i, secure j, I_B) threshold intersection of one detector set.
pub fn audit_assignment(set: &DetectorSet, blinding_powers_mw: &[f64]) -> Result<AuditVerdict> {
    let missing: Vec<f64> = blinding_powers_mw
        .iter()
        .copied()
        .filter(|&ib| set.thresholds_unpolarized(ib).is_err())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Coverage { powers_mw: missing });
    }

    let gate = set.gate_variant();
    let mut points = Vec::with_capacity(blinding_powers_mw.len() * 8);
    for &ib in blinding_powers_mw {
        let t = set.thresholds_unpolarized(ib)?;
        for (i, a) in set.alert.iter().enumerate() {
            for (j, b) in set.secure.iter().enumerate() {
                let x = t[i].e_never;
                let y = t[2 + j].e_never;
                let ratio = y / x;
                points.push(IntersectionPoint {
                    gate,
                    i_b_mw: ib,
                    alert_detector: a.label.clone(),
                    secure_detector: b.label.clone(),
                    e_never_alert_pj: x,
                    e_never_secure_pj: y,
                    ratio,
                    violates: !(ratio > 0.5),
                    camouflage: CamouflageRegion::new(x, y),
                });
            }
        }
    }
    let min_ratio = points.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    let secure = points.iter().all(|p| !p.violates);
    Ok(AuditVerdict {
        gate,
        points,
        min_ratio,
        secure,
    })
}

/// Verdicts for several gate variants; secure only if every variant is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub schema_version: u32,
    pub blinding_powers_mw: Vec<f64>,
    pub verdicts: Vec<AuditVerdict>,
    pub secure: bool,
}

pub const AUDIT_CSV_HEADER: [&str; 9] = [
    "schema_version",
    "gate",
    "i_b_mw",
    "alert_detector",
    "secure_detector",
    "e_never_alert_pj",
    "e_never_secure_pj",
    "ratio",
    "violates",
];

impl AuditReport {
    pub fn new(sets: &[DetectorSet], blinding_powers_mw: &[f64]) -> Result<Self> {
        let verdicts = sets
            .iter()
            .map(|s| audit_assignment(s, blinding_powers_mw))
            .collect::<Result<Vec<_>>>()?;
        let secure = verdicts.iter().all(|v| v.secure);
        Ok(Self {
            schema_version: crate::report::SCHEMA_VERSION,
            blinding_powers_mw: blinding_powers_mw.to_vec(),
            verdicts,
            secure,
        })
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        use crate::report::sig9;
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(AUDIT_CSV_HEADER)?;
        for p in self.verdicts.iter().flat_map(|v| &v.points) {
            w.write_record([
                self.schema_version.to_string(),
                p.gate.map(|g| g.as_str()).unwrap_or("mixed").to_string(),
                sig9(p.i_b_mw),
                p.alert_detector.clone(),
                p.secure_detector.clone(),
                sig9(p.e_never_alert_pj),
                sig9(p.e_never_secure_pj),
                sig9(p.ratio),
                p.violates.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

/// Total blinding powers (mW) at which the shipped threshold data is audited.
pub const BLINDING_GRID_MW: [f64; 11] = [
    0.72, 0.78, 0.86, 1.02, 1.09, 1.27, 1.51, 1.78, 2.02, 2.26, 2.5,
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::{DetectorModel, DetectorRole, GeigerParams, ThresholdCurve};

    fn linear(k: f64) -> DetectorModel {
        DetectorModel::new(
            "lin",
            DetectorRole::Alert,
            GateVariant::Gated,
            GeigerParams::ideal(),
            ThresholdCurve::new(vec![(0.0, 0.0), (1.0, k)]).unwrap(),
            ThresholdCurve::new(vec![(0.0, 0.0), (1.0, 1.4 * k)]).unwrap(),
        )
        .unwrap()
    }

    fn flat(e: f64) -> DetectorModel {
        DetectorModel::new(
            "flat",
            DetectorRole::Alert,
            GateVariant::Gated,
            GeigerParams::ideal(),
            ThresholdCurve::constant(e, 0.0, 1.0).unwrap(),
            ThresholdCurve::constant(1.4 * e, 0.0, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn p_max_examples() {
        assert_eq!(p_max_trigger(1.0).unwrap(), 1.0);
        assert_eq!(p_max_trigger(0.5).unwrap(), 0.5);
        assert!((p_max_trigger(0.78).unwrap() - 0.874166).abs() < 1e-6);
        assert!(p_max_trigger(0.4).is_err());
    }

    #[test]
    fn zero_trigger_energy() {
        let set = DetectorSet::uniform(&flat(1.0), &flat(0.3));
        let c = check_conditions_ab(&set, 0.0, 1.0, 0.8).unwrap();
        assert!(c.a_holds && !c.b_holds);
    }

    #[test]
    fn ratio_point_four_opens_window() {
        // E_never^b / E_never^a = 0.4: need 4·0.4 < E_T·p < 2·1.
        let set = DetectorSet::uniform(&flat(1.0), &flat(0.4));
        let (lo, hi) = attack_energy_window(&set, 1.0, 0.8).unwrap().unwrap();
        assert!((lo - 1.6).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);
        assert!(check_conditions_ab(&set, 1.8, 1.0, 0.8)
            .unwrap()
            .attack_possible());
        assert!(!check_conditions_ab(&set, 1.5, 1.0, 0.8)
            .unwrap()
            .attack_possible());
        assert!(!check_conditions_ab(&set, 2.1, 1.0, 0.8)
            .unwrap()
            .attack_possible());
        assert!(!audit_assignment(&set, &[0.8]).unwrap().secure);
    }

    #[test]
    fn linear_through_origin_is_boundary_insecure() {
        let m = linear(2.0);
        let set = DetectorSet::uniform(&m, &m);
        let v = audit_assignment(&set, &[0.4, 0.8]).unwrap();
        assert!(v.points.iter().all(|p| (p.ratio - 0.5).abs() < 1e-12));
        assert!(!v.secure);
        assert!(attack_energy_window(&set, 1.0, 0.8).unwrap().is_none());
    }

    #[test]
    fn coverage_error_lists_powers() {
        let m = flat(1.0);
        let set = DetectorSet::uniform(&m, &m);
        match audit_assignment(&set, &[0.8, 5.0, 9.0]) {
            Err(Error::Coverage { powers_mw }) => assert_eq!(powers_mw, vec![5.0, 9.0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn camouflage_overlap_segment() {
        let r = CamouflageRegion::new(1.0, 0.3);
        assert_eq!(r.operational_overlap_pj, Some([0.6, 1.0]));
        assert_eq!(CamouflageRegion::new(1.0, 0.5).operational_overlap_pj, None);
    }
}
