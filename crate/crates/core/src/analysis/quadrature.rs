use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

use super::AlertFraction;

/// Nodes and weights of `n`-point Gauss–Legendre quadrature on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    match NonZeroUsize::new(n) {
        Some(n) => GaussLegendre::new(n)
            .as_node_weight_pairs()
            .iter()
            .copied()
            .unzip(),
        None => (Vec::new(), Vec::new()),
    }
}

fn default_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(QUADRATURE_NODES))
}

pub(crate) const QUADRATURE_NODES: usize = 64;

/// Expectation of a vector-valued `f(p_a)` under `dist`.
pub(crate) fn expect<const N: usize>(
    dist: &AlertFraction,
    mut f: impl FnMut(f64) -> [f64; N],
) -> [f64; N] {
    match *dist {
        AlertFraction::Point(p) => f(p),
        AlertFraction::Uniform { lo, hi } if hi - lo < 1e-15 => f(0.5 * (lo + hi)),
        AlertFraction::Uniform { lo, hi } => {
            let (x, w) = default_rule();
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            let mut acc = [0.0; N];
            for (xi, wi) in x.iter().zip(w) {
                let v = f(mid + half * xi);
                for (a, vi) in acc.iter_mut().zip(v) {
                    *a += 0.5 * wi * vi;
                }
            }
            acc
        }
    }
}
