//! Closed-form alert rate, sifted key rate and QBER for the honest protocol and for each
//! attack, plus the sinusoid fit used on polarization-rotation sweeps.
//!
//! Rates that depend on where the randomizer sends Eve's light are averaged over the alert
//! fraction `p_a` with Gauss–Legendre quadrature. For a Haar randomizer `p_a` is uniform
//! between the two eigenvalues of her pulse's density operator.

mod fit;
mod params;
mod quadrature;
mod rates;

pub use fit::{fit_sinusoid, SinusoidFit};
pub use params::{AlertFraction, RandomizerModel, SystemParams};
pub use quadrature::gauss_legendre;
pub use rates::{
    attack_rates, blinding_attack_rates, honest_rates, integrated_attack_rates,
    quantum_attack_rates, raw_click_probs, wavelength_blinding_rates, BlindingOptions,
};
