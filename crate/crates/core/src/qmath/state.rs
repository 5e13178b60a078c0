use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexMatrix2, JonesUnitary, JonesVector, TOLERANCE};
use crate::error::{Error, Result};

/// A qubit density operator over the (H, V) polarization basis.
///
/// Construction validates Hermiticity, unit trace and positivity to [`TOLERANCE`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix2", into = "ComplexMatrix2")]
pub struct PolarizationState {
    rho: ComplexMatrix2,
}

impl PolarizationState {
    pub fn new(rho: ComplexMatrix2) -> Result<Self> {
        let herm = rho.max_abs_diff(&rho.adjoint());
        if herm > TOLERANCE {
            return Err(invalid(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = rho.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TOLERANCE {
            return Err(invalid(format!("trace {tr} != 1")));
        }
        let [lo, _] = hermitian_eigenvalues(&rho);
        if lo < -TOLERANCE {
            return Err(invalid(format!("negative eigenvalue {lo:e}")));
        }
        Ok(Self { rho })
    }

    pub fn pure(v: &JonesVector) -> Self {
        let v = v.normalized();
        Self { rho: v.outer(&v) }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: ComplexMatrix2::from_real([[0.5, 0.0], [0.0, 0.5]]),
        }
    }

    /// `weight·|v⟩⟨v| + (1 − weight)·|v⊥⟩⟨v⊥|`
    pub fn mixture(weight: f64, v: &JonesVector) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::domain("weight", weight, "[0, 1]"));
        }
        let v = v.normalized();
        let w = v.orthogonal();
        let rho = v.outer(&v).scale(Complex64::new(weight, 0.0))
            + w.outer(&w).scale(Complex64::new(1.0 - weight, 0.0));
        Ok(Self { rho })
    }

    /// State with Bloch vector `(x, y, z)`; +x is |D⟩, +y is |R⟩, +z is |H⟩.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if !len.is_finite() || len > 1.0 + TOLERANCE {
            return Err(Error::domain("|bloch vector|", len, "[0, 1]"));
        }
        let [x, y, z] = r;
        let rho = ComplexMatrix2::from_entries([
            [
                Complex64::new(0.5 * (1.0 + z), 0.0),
                Complex64::new(0.5 * x, -0.5 * y),
            ],
            [
                Complex64::new(0.5 * x, 0.5 * y),
                Complex64::new(0.5 * (1.0 - z), 0.0),
            ],
        ]);
        Ok(Self { rho })
    }

    pub fn rho(&self) -> &ComplexMatrix2 {
        &self.rho
    }

    /// tr(ρ²)
    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        hermitian_eigenvalues(&self.rho)
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        let off = self.rho[(1, 0)];
        [
            2.0 * off.re,
            2.0 * off.im,
            (self.rho[(0, 0)] - self.rho[(1, 1)]).re,
        ]
    }

    /// ⟨v|ρ|v⟩ for a normalized `v`.
    pub fn population(&self, v: &JonesVector) -> f64 {
        v.inner(&self.rho.apply(v)).re
    }

    /// U ρ U†
    pub fn conjugated(&self, u: &JonesUnitary) -> Self {
        let m = u.matrix();
        Self {
            rho: *m * self.rho * m.adjoint(),
        }
    }
}

impl TryFrom<ComplexMatrix2> for PolarizationState {
    type Error = Error;

    fn try_from(rho: ComplexMatrix2) -> Result<Self> {
        Self::new(rho)
    }
}

impl From<PolarizationState> for ComplexMatrix2 {
    fn from(s: PolarizationState) -> Self {
        s.rho
    }
}

fn invalid(reason: String) -> Error {
    Error::InvalidOperator {
        kind: "density operator",
        reason,
    }
}

fn hermitian_eigenvalues(m: &ComplexMatrix2) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - half_gap, mean + half_gap]
}

/// Extremes of ⟨ψ|UρU†|ψ⟩ over all unitaries, for a fixed pure ψ and a state of the given purity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapBounds {
    pub max: f64,
    pub min: f64,
}

/// `(½(1 + √(2P − 1)), ½(1 − √(2P − 1)))`; the two eigenvalues of any state with purity `P`.
pub fn overlap_bounds(purity: f64) -> Result<OverlapBounds> {
    if !(0.5..=1.0).contains(&purity) {
        return Err(Error::domain("purity", purity, "[1/2, 1]"));
    }
    let spread = (2.0 * purity - 1.0).sqrt();
    Ok(OverlapBounds {
        max: 0.5 * (1.0 + spread),
        min: 0.5 * (1.0 - spread),
    })
}

/// Smallest and largest `⟨ψ|UρU†|ψ⟩` seen over `draws` Haar-random unitaries.
pub fn sample_overlap_extremes<R: rand::Rng + ?Sized>(
    state: &PolarizationState,
    target: &JonesVector,
    draws: usize,
    rng: &mut R,
) -> OverlapBounds {
    let mut out = OverlapBounds {
        max: f64::NEG_INFINITY,
        min: f64::INFINITY,
    };
    for _ in 0..draws {
        let p = state
            .conjugated(&super::haar_random_unitary(rng))
            .population(target);
        out.max = out.max.max(p);
        out.min = out.min.min(p);
    }
    out
}

pub fn purity(state: &PolarizationState) -> f64 {
    state.purity()
}

pub fn conjugate_state(u: &JonesUnitary, state: &PolarizationState) -> PolarizationState {
    state.conjugated(u)
}
