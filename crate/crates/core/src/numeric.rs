//! Quadrature rules and interpolation shared by the filter, pattern and
//! oracle modules.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{cos, PI};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, z);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]` split into `panels` equal panels.
    pub fn composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + h * p as f64;
            let mid = lo + 0.5 * h;
            let mut s = 0.0;
            for (t, w) in self.nodes.iter().zip(&self.weights) {
                s += w * f(mid + 0.5 * h * t);
            }
            total += 0.5 * h * s;
        }
        total
    }

    /// Appends the composite nodes and weights for `[a, b]` to `out`.
    pub fn push_composite(&self, a: f64, b: f64, panels: usize, out: &mut Vec<(f64, f64)>) {
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let mid = a + h * (p as f64 + 0.5);
            for (t, w) in self.nodes.iter().zip(&self.weights) {
                out.push((mid + 0.5 * h * t, 0.5 * h * w));
            }
        }
    }
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Fourth-order finite-difference slopes of samples `y` on the uniform
/// grid `0, h, 2h, …` of a function that is even about the origin.
///
/// With these slopes cubic Hermite interpolation is fourth-order accurate.
pub fn even_function_slopes(h: f64, y: &[f64]) -> Vec<f64> {
    let n = y.len();
    assert!(n >= 5, "need at least five samples");
    let at = |i: isize| y[i.unsigned_abs()];
    let mut d = vec![0.0; n];
    for i in 0..n - 2 {
        let i = i as isize;
        d[i as usize] = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h);
    }
    for i in n - 2..n {
        // one-sided five-point stencils
        let (a, b, c, e, f) = (y[n - 5], y[n - 4], y[n - 3], y[n - 2], y[n - 1]);
        d[i] = if i == n - 1 {
            (3.0 * a - 16.0 * b + 36.0 * c - 48.0 * e + 25.0 * f) / (12.0 * h)
        } else {
            (-a + 6.0 * b - 18.0 * c + 10.0 * e + 3.0 * f) / (12.0 * h)
        };
    }
    d
}

/// Cubic Hermite basis on the unit interval: `(h00, h10, h01, h11)`.
#[inline]
pub fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}
