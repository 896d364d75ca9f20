//! Oscillator eigenfunctions and Laguerre polynomials in the
//! vacuum-variance-one quadrature convention.

use crate::math::{exp, sqrt, PI};

/// Standard normal density, the vacuum quadrature distribution.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    exp(-0.5 * x * x) / sqrt(2.0 * PI)
}

/// Fills `out[k] = He_k(x) / sqrt(k!)` for `k < out.len()`.
///
/// With these the Fock-state quadrature density is
/// `|ψ_k(x)|² = normal_pdf(x) · out[k]²`.
pub fn scaled_hermite(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = x;
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = (x * out[k] - sqrt(kf) * out[k - 1]) / sqrt(kf + 1.0);
    }
}

/// Quadrature density of the Fock state `|k⟩`.
pub fn fock_density(k: usize, x: f64) -> f64 {
    let mut h = [0.0; 32];
    if k < h.len() {
        scaled_hermite(x, &mut h[..=k]);
        normal_pdf(x) * h[k] * h[k]
    } else {
        let mut h = alloc::vec![0.0; k + 1];
        scaled_hermite(x, &mut h);
        normal_pdf(x) * h[k] * h[k]
    }
}

/// Laguerre polynomial `L_k(t)` by the three-term recursion.
pub fn laguerre(k: usize, t: f64) -> f64 {
    let mut l0 = 1.0;
    if k == 0 {
        return l0;
    }
    let mut l1 = 1.0 - t;
    for n in 1..k {
        let nf = n as f64;
        let l2 = ((2.0 * nf + 1.0 - t) * l1 - nf * l0) / (nf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}
