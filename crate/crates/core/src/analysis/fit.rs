use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares fit of `y = offset + amplitude·cos(4θ − phase)`.
///
/// The period is 90° in the angle of a rotating half-wave plate, which turns linear
/// polarization by twice its own rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinusoidFit {
    pub offset: f64,
    pub amplitude: f64,
    pub phase_deg: f64,
    /// `amplitude / offset`, i.e. `(max − min)/(max + min)` of the fitted curve.
    pub visibility: f64,
    pub r_squared: f64,
}

pub fn fit_sinusoid(angles_deg: &[f64], values: &[f64]) -> Result<SinusoidFit> {
    if angles_deg.len() != values.len() {
        return Err(Error::domain(
            "sample count",
            values.len() as f64,
            "equal to the angle count",
        ));
    }
    if values.len() < 3 {
        return Err(Error::domain("sample count", values.len() as f64, "≥ 3"));
    }
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for (&t, &y) in angles_deg.iter().zip(values) {
        let a = 4.0 * t.to_radians();
        let row = [1.0, a.cos(), a.sin()];
        for i in 0..3 {
            aty[i] += row[i] * y;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let [c0, c1, c2] =
        solve3(ata, aty).ok_or(Error::domain("angle spread", 0.0, "enough distinct angles"))?;

    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for (&t, &y) in angles_deg.iter().zip(values) {
        let a = 4.0 * t.to_radians();
        let fit = c0 + c1 * a.cos() + c2 * a.sin();
        ss_res += (y - fit).powi(2);
        ss_tot += (y - mean).powi(2);
    }
    let amplitude = c1.hypot(c2);
    Ok(SinusoidFit {
        offset: c0,
        amplitude,
        phase_deg: c2.atan2(c1).to_degrees(),
        visibility: if c0 != 0.0 { amplitude / c0 } else { 0.0 },
        r_squared: if ss_tot > 0.0 {
            1.0 - ss_res / ss_tot
        } else {
            1.0
        },
    })
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            for c in col..3 {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_known_curve() {
        let t: Vec<f64> = (0..=36).map(|k| 5.0 * k as f64).collect();
        let y: Vec<f64> = t
            .iter()
            .map(|&d| 2.0 + 0.6 * (4.0 * d.to_radians() - 0.3).cos())
            .collect();
        let f = fit_sinusoid(&t, &y).unwrap();
        assert!((f.offset - 2.0).abs() < 1e-12);
        assert!((f.amplitude - 0.6).abs() < 1e-12);
        assert!((f.phase_deg - 0.3f64.to_degrees()).abs() < 1e-9);
        assert!((f.visibility - 0.3).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_curve_has_zero_visibility() {
        let t = [0.0, 20.0, 45.0, 70.0];
        let f = fit_sinusoid(&t, &[1.0; 4]).unwrap();
        assert!(f.visibility.abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(fit_sinusoid(&[0.0, 90.0, 180.0], &[1.0, 1.0, 1.0]).is_err());
        assert!(fit_sinusoid(&[0.0, 10.0], &[1.0, 1.0]).is_err());
    }
}
