use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense 2×2 complex matrix in the (H, V) basis, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix2 {
    entries: [[Complex64; 2]; 2],
}

impl ComplexMatrix2 {
    pub const IDENTITY: Self = Self {
        entries: [[ONE, ZERO], [ZERO, ONE]],
    };
    pub const ZERO: Self = Self {
        entries: [[ZERO, ZERO], [ZERO, ZERO]],
    };
    /// Pauli X: swaps H and V.
    pub const NOT: Self = Self {
        entries: [[ZERO, ONE], [ONE, ZERO]],
    };
    /// `[[0, 1], [-1, 0]]`, the reflection operator of a Faraday mirror.
    pub const FARADAY: Self = Self {
        entries: [[ZERO, ONE], [Complex64::new(-1.0, 0.0), ZERO]],
    };

    /// Builds a matrix, rejecting NaN or infinite entries.
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let finite = entries
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(Error::InvalidOperator {
                kind: "matrix",
                reason: "non-finite entry".into(),
            });
        }
        Ok(Self { entries })
    }

    pub(crate) const fn from_entries(entries: [[Complex64; 2]; 2]) -> Self {
        Self { entries }
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Self::from_entries([
            [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
            [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
        ])
    }

    pub fn diag(a: Complex64, b: Complex64) -> Self {
        Self::from_entries([[a, ZERO], [ZERO, b]])
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let e = &self.entries;
        Self::from_entries([
            [e[0][0].conj(), e[1][0].conj()],
            [e[0][1].conj(), e[1][1].conj()],
        ])
    }

    pub fn transpose(&self) -> Self {
        let e = &self.entries;
        Self::from_entries([[e[0][0], e[1][0]], [e[0][1], e[1][1]]])
    }

    pub fn det(&self) -> Complex64 {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let e = &self.entries;
        Self::from_entries([[e[0][0] * s, e[0][1] * s], [e[1][0] * s, e[1][1] * s]])
    }

    pub fn apply(&self, v: &JonesVector) -> JonesVector {
        let e = &self.entries;
        let [a, b] = v.amplitudes();
        JonesVector::from_amplitudes([e[0][0] * a + e[0][1] * b, e[1][0] * a + e[1][1] * b])
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other)
            .entries
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// True if `self = e^{iφ} other` for some φ, to within `tol` entry-wise.
    pub fn equals_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        // Align on the largest entry of `other`.
        let (mut best, mut idx) = (0.0, (0, 0));
        for r in 0..2 {
            for c in 0..2 {
                let n = other.entries[r][c].norm();
                if n > best {
                    best = n;
                    idx = (r, c);
                }
            }
        }
        if best == 0.0 {
            return self.max_abs_diff(other) <= tol;
        }
        let ratio = self.entries[idx.0][idx.1] / other.entries[idx.0][idx.1];
        if (ratio.norm() - 1.0).abs() > tol {
            return false;
        }
        let phase = ratio / ratio.norm();
        self.max_abs_diff(&other.scale(phase)) <= tol
    }
}

impl Index<(usize, usize)> for ComplexMatrix2 {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.entries[r][c]
    }
}

impl Mul for ComplexMatrix2 {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let a = &self.entries;
        let b = &rhs.entries;
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Self::from_entries(out)
    }
}

impl Add for ComplexMatrix2 {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let a = &self.entries;
        let b = &rhs.entries;
        Self::from_entries([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for ComplexMatrix2 {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ComplexMatrix2 {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// Two-component polarization amplitude vector over (H, V).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JonesVector {
    amplitudes: [Complex64; 2],
}

impl JonesVector {
    pub const fn from_amplitudes(amplitudes: [Complex64; 2]) -> Self {
        Self { amplitudes }
    }

    pub fn new(h: Complex64, v: Complex64) -> Self {
        Self::from_amplitudes([h, v])
    }

    pub fn horizontal() -> Self {
        Self::new(ONE, ZERO)
    }

    pub fn vertical() -> Self {
        Self::new(ZERO, ONE)
    }

    /// (H + V)/√2
    pub fn diagonal() -> Self {
        Self::with_relative_phase(0.0)
    }

    /// (H − V)/√2
    pub fn antidiagonal() -> Self {
        Self::with_relative_phase(std::f64::consts::PI)
    }

    /// (H + iV)/√2
    pub fn right_circular() -> Self {
        Self::with_relative_phase(std::f64::consts::FRAC_PI_2)
    }

    /// (H − iV)/√2
    pub fn left_circular() -> Self {
        Self::with_relative_phase(3.0 * std::f64::consts::FRAC_PI_2)
    }

    /// (H + e^{iφ} V)/√2
    pub fn with_relative_phase(phi: f64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(Complex64::new(s, 0.0), Complex64::from_polar(s, phi))
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.amplitudes
    }

    pub fn h(&self) -> Complex64 {
        self.amplitudes[0]
    }

    pub fn v(&self) -> Complex64 {
        self.amplitudes[1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes[0].norm_sqr() + self.amplitudes[1].norm_sqr()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self::new(self.amplitudes[0] / n, self.amplitudes[1] / n)
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes[0].conj() * other.amplitudes[0]
            + self.amplitudes[1].conj() * other.amplitudes[1]
    }

    /// |self⟩⟨other|
    pub fn outer(&self, other: &Self) -> ComplexMatrix2 {
        let a = self.amplitudes;
        let b = other.amplitudes;
        ComplexMatrix2::from_entries([
            [a[0] * b[0].conj(), a[0] * b[1].conj()],
            [a[1] * b[0].conj(), a[1] * b[1].conj()],
        ])
    }

    /// Vector orthogonal to `self` with the same norm.
    pub fn orthogonal(&self) -> Self {
        Self::new(-self.amplitudes[1].conj(), self.amplitudes[0].conj())
    }

    /// |⟨self|other⟩|² for normalized inputs.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }
}
