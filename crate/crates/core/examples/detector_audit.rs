//! Audits both ways of placing two detector types on the alert and secure paths.

use polgate::detectors::{
    AuditReport, DetectorRole, DetectorSet, GateVariant, GeigerParams, ThresholdData,
    BLINDING_GRID_MW,
};

fn set(alert: &ThresholdData, secure: &ThresholdData, gate: GateVariant) -> DetectorSet {
    DetectorSet::uniform(
        &alert
            .model(DetectorRole::Alert, gate, GeigerParams::ideal())
            .unwrap(),
        &secure
            .model(DetectorRole::Secure, gate, GeigerParams::ideal())
            .unwrap(),
    )
}

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let d0 = ThresholdData::load(format!("{dir}/D0.csv")).unwrap();
    let d1 = ThresholdData::load(format!("{dir}/D1.csv")).unwrap();

    for (name, a, s) in [("D1 on path a", &d1, &d0), ("D0 on path a", &d0, &d1)] {
        let sets: Vec<_> = GateVariant::BOTH.iter().map(|&g| set(a, s, g)).collect();
        let report = AuditReport::new(&sets, &BLINDING_GRID_MW).unwrap();
        println!(
            "{name}: {}",
            if report.secure { "secure" } else { "INSECURE" }
        );
        for v in &report.verdicts {
            let n = v.violations().count();
            println!(
                "  {:<8} min E_never(a)/E_never(b) = {:.3}, violating points = {n}",
                v.gate.map(|g| g.as_str()).unwrap_or("mixed"),
                v.min_ratio
            );
        }
    }
}
