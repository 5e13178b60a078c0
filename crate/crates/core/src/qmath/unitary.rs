use std::ops::Mul;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{ComplexMatrix2, JonesVector, TOLERANCE};
use crate::error::{Error, Result};

/// A 2×2 unitary acting on polarization amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix2", into = "ComplexMatrix2")]
pub struct JonesUnitary {
    matrix: ComplexMatrix2,
}

impl JonesUnitary {
    pub fn new(matrix: ComplexMatrix2) -> Result<Self> {
        let defect = unitarity_defect(&matrix);
        if defect > TOLERANCE {
            return Err(Error::InvalidOperator {
                kind: "unitary",
                reason: format!("‖UU† − I‖ = {defect:e}"),
            });
        }
        Ok(Self { matrix })
    }

    pub fn identity() -> Self {
        Self {
            matrix: ComplexMatrix2::IDENTITY,
        }
    }

    /// H ↔ V swap.
    pub fn not() -> Self {
        Self {
            matrix: ComplexMatrix2::NOT,
        }
    }

    pub fn faraday_mirror() -> Self {
        Self {
            matrix: ComplexMatrix2::FARADAY,
        }
    }

    /// The fixed randomizer setting `(1/√2)[[i, i], [1, −1]]` used for the fixed-U bench measurements.
    pub fn bench_randomizer() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            matrix: ComplexMatrix2::from_entries([
                [Complex64::new(0.0, s), Complex64::new(0.0, s)],
                [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
            ]),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix2 {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Transpose in the (H, V) basis; the operator seen by light travelling backwards.
    pub fn transpose(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
        }
    }

    pub fn det(&self) -> Complex64 {
        self.matrix.det()
    }

    pub fn apply(&self, v: &JonesVector) -> JonesVector {
        self.matrix.apply(v)
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }
}

impl Mul for JonesUnitary {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self {
            matrix: self.matrix * rhs.matrix,
        }
    }
}

impl TryFrom<ComplexMatrix2> for JonesUnitary {
    type Error = Error;

    fn try_from(m: ComplexMatrix2) -> Result<Self> {
        Self::new(m)
    }
}

impl From<JonesUnitary> for ComplexMatrix2 {
    fn from(u: JonesUnitary) -> Self {
        u.matrix
    }
}

fn unitarity_defect(m: &ComplexMatrix2) -> f64 {
    (*m * m.adjoint()).max_abs_diff(&ComplexMatrix2::IDENTITY)
}

/// Draws a unitary from the Haar measure on U(2).
///
/// A complex Ginibre matrix is orthonormalized column by column (Gram–Schmidt).
/// The implied R factor then has a real positive diagonal, which is the phase
/// normalization that makes the Q factor exactly Haar distributed.
pub fn haar_random_unitary<R: Rng + ?Sized>(rng: &mut R) -> JonesUnitary {
    let mut gaussian = || {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    };
    let c0 = [gaussian(), gaussian()];
    let c1 = [gaussian(), gaussian()];

    let n0 = (c0[0].norm_sqr() + c0[1].norm_sqr()).sqrt();
    let q0 = [c0[0] / n0, c0[1] / n0];
    let proj = q0[0].conj() * c1[0] + q0[1].conj() * c1[1];
    let r1 = [c1[0] - proj * q0[0], c1[1] - proj * q0[1]];
    let n1 = (r1[0].norm_sqr() + r1[1].norm_sqr()).sqrt();
    let q1 = [r1[0] / n1, r1[1] / n1];

    JonesUnitary {
        matrix: ComplexMatrix2::from_entries([[q0[0], q1[0]], [q0[1], q1[1]]]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveplateKind {
    Half,
    Quarter,
}

impl WaveplateKind {
    fn retardance(self) -> f64 {
        match self {
            WaveplateKind::Half => std::f64::consts::PI,
            WaveplateKind::Quarter => std::f64::consts::FRAC_PI_2,
        }
    }
}

/// Jones matrix of an ideal waveplate whose fast axis sits `angle` radians from the
/// vertical axis (counter-clockwise, so 0 is vertical and π/2 is horizontal).
///
/// Global phase is fixed by taking the symmetric retardance split
/// `diag(e^{−iδ/2}, e^{iδ/2})` in the axis frame, so every waveplate has determinant 1.
/// Light passing plate A then plate B is described by `B · A`.
pub fn waveplate(kind: WaveplateKind, angle: f64) -> JonesUnitary {
    let axis = angle + std::f64::consts::FRAC_PI_2;
    let (s, c) = axis.sin_cos();
    let half = 0.5 * kind.retardance();
    let rot = ComplexMatrix2::from_real([[c, s], [-s, c]]);
    let rot_back = ComplexMatrix2::from_real([[c, -s], [s, c]]);
    let retarder = ComplexMatrix2::diag(
        Complex64::from_polar(1.0, -half),
        Complex64::from_polar(1.0, half),
    );
    JonesUnitary {
        matrix: rot_back * retarder * rot,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    #[test]
    fn hwp_on_vertical_axis_is_diag() {
        let hwp = waveplate(WaveplateKind::Half, 0.0);
        let expected = ComplexMatrix2::from_real([[1.0, 0.0], [0.0, -1.0]]);
        assert!(hwp.matrix().equals_up_to_phase(&expected, 1e-12));
    }

    #[test]
    fn bench_randomizer_from_waveplates() {
        // QWP at 45° first in the beam, then HWP at 112.5°.
        let u = waveplate(WaveplateKind::Half, deg(112.5))
            * waveplate(WaveplateKind::Quarter, deg(45.0));
        assert!(u
            .matrix()
            .equals_up_to_phase(JonesUnitary::bench_randomizer().matrix(), 1e-12));
    }

    #[test]
    fn hwp_squared_is_identity_up_to_phase() {
        for a in [0.0, 0.3, 1.1, -2.0, 7.5] {
            let h = waveplate(WaveplateKind::Half, a);
            assert!((h * h)
                .matrix()
                .equals_up_to_phase(&ComplexMatrix2::IDENTITY, 1e-12));
        }
    }

    #[test]
    fn waveplates_have_unit_determinant() {
        for a in [0.0, 0.4, 2.2] {
            for k in [WaveplateKind::Half, WaveplateKind::Quarter] {
                assert!((waveplate(k, a).det() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn haar_draws_are_unitary_and_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(11);
        let mut b = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let u = haar_random_unitary(&mut a);
            assert!(u.unitarity_defect() < 1e-12);
            assert_eq!(u, haar_random_unitary(&mut b));
        }
    }

    #[test]
    fn new_rejects_non_unitary() {
        assert!(JonesUnitary::new(ComplexMatrix2::from_real([[1.0, 0.1], [0.0, 1.0]])).is_err());
    }
}
