//! Exact 2×2 complex linear algebra for polarization states.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * Column vectors are ordered (H, V).
//! * |D⟩ = (H + V)/√2, |A⟩ = (H − V)/√2, |R⟩ = (H + iV)/√2, |L⟩ = (H − iV)/√2.
//! * Bloch vectors are `(x, y, z)` with +x = |D⟩, +y = |R⟩, +z = |H⟩.
//! * Light travelling backwards through a reciprocal element `T` sees `Tᵀ`, with the
//!   transpose taken in the (H, V) basis. The Faraday-mirror reflection is
//!   `J = [[0, 1], [−1, 0]]`, and `Tᵀ J T = det(T) J` for every 2×2 `T`.
//! * Waveplate angles are measured from the vertical axis; see [`waveplate`].

mod matrix;
mod state;
mod unitary;

pub use matrix::{ComplexMatrix2, JonesVector};
pub use state::{
    conjugate_state, overlap_bounds, purity, sample_overlap_extremes, OverlapBounds,
    PolarizationState,
};
pub use unitary::{haar_random_unitary, waveplate, JonesUnitary, WaveplateKind};

/// Tolerance for algebraic identities on 2×2 operators.
pub const TOLERANCE: f64 = 1e-12;
