//! Exact, order-independent summation of `f64` values.
//!
//! Every finite double is an integer multiple of `2^-1074`, so a long
//! enough fixed-point integer holds any sum exactly. Sums therefore do not
//! depend on the order of additions or on how the input is partitioned
//! and merged, which keeps estimates bit-identical across thread counts.

use crate::math::sqrt;

const LIMB_BITS: u32 = 32;
const LIMB_MASK: i64 = (1 << LIMB_BITS) - 1;
const LIMBS: usize = 68;
// Each add moves less than 2^32 into a limb; renormalize well before i64 overflow.
const RENORMALIZE_EVERY: u32 = 1 << 30;

/// Exact accumulator for sums of finite doubles.
#[derive(Clone)]
pub struct ExactSum {
    limbs: [i64; LIMBS],
    pending: u32,
    non_finite: bool,
}

impl core::fmt::Debug for ExactSum {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ExactSum").field("value", &self.value()).finish()
    }
}

impl Default for ExactSum {
    fn default() -> Self {
        Self::new()
    }
}

impl ExactSum {
    pub const fn new() -> Self {
        Self { limbs: [0; LIMBS], pending: 0, non_finite: false }
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let bits = v.to_bits();
        let biased = ((bits >> 52) & 0x7ff) as u32;
        if biased == 0x7ff {
            self.non_finite = true;
            return;
        }
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if biased == 0 { (frac, 0) } else { (frac | (1u64 << 52), biased - 1) };
        if mant == 0 {
            return;
        }
        let idx = (e / LIMB_BITS) as usize;
        let wide = (mant as u128) << (e % LIMB_BITS);
        let c0 = (wide as i64) & LIMB_MASK;
        let c1 = ((wide >> 32) as i64) & LIMB_MASK;
        let c2 = (wide >> 64) as i64;
        if bits >> 63 == 1 {
            self.limbs[idx] -= c0;
            self.limbs[idx + 1] -= c1;
            self.limbs[idx + 2] -= c2;
        } else {
            self.limbs[idx] += c0;
            self.limbs[idx + 1] += c1;
            self.limbs[idx + 2] += c2;
        }
        self.pending += 1;
        if self.pending >= RENORMALIZE_EVERY {
            self.carry();
        }
    }

    pub fn merge(&mut self, other: &ExactSum) {
        self.carry();
        let mut o = other.clone();
        o.carry();
        for (a, b) in self.limbs.iter_mut().zip(o.limbs.iter()) {
            *a += b;
        }
        self.non_finite |= o.non_finite;
        self.carry();
    }

    fn carry(&mut self) {
        for i in 0..LIMBS - 1 {
            let c = self.limbs[i] >> LIMB_BITS;
            self.limbs[i] -= c << LIMB_BITS;
            self.limbs[i + 1] += c;
        }
        self.pending = 0;
    }

    /// Correctly rounded value of the exact sum.
    pub fn value(&self) -> f64 {
        if self.non_finite {
            return f64::NAN;
        }
        let mut s = self.clone();
        s.carry();
        let negative = s.limbs[LIMBS - 1] < 0;
        if negative {
            for l in s.limbs.iter_mut() {
                *l = -*l;
            }
            s.carry();
        }
        let Some(top) = s.limbs.iter().rposition(|&l| l != 0) else {
            return 0.0;
        };
        let limb = |i: isize| if i >= 0 { s.limbs[i as usize] as u128 } else { 0 };
        let t = top as isize;
        let mut m = (limb(t) << 64) | (limb(t - 1) << 32) | limb(t - 2);
        if t >= 3 && s.limbs[..(t - 2) as usize].iter().any(|&l| l != 0) {
            m |= 1;
        }
        let scale = LIMB_BITS as i32 * (t as i32 - 2) - 1074;
        let v = libm::scalbn(m as f64, scale);
        if negative {
            -v
        } else {
            v
        }
    }
}

/// Exact running sums of values and squared values.
#[derive(Debug, Clone, Default)]
pub struct MomentSums {
    sum: ExactSum,
    sum_sq: ExactSum,
    count: u64,
}

impl MomentSums {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        self.sum.add(v);
        self.sum_sq.add(v * v);
        self.count += 1;
    }

    pub fn merge(&mut self, other: &MomentSums) {
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.sum.value() / self.count as f64
    }

    /// Standard error of the mean, `sqrt(Σ(f - f̄)² / (N (N - 1)))`.
    pub fn stderr(&self) -> f64 {
        let n = self.count as f64;
        if self.count < 2 {
            return f64::NAN;
        }
        let s = self.sum.value();
        let centered = (self.sum_sq.value() - s * (s / n)).max(0.0);
        sqrt(centered / (n * (n - 1.0)))
    }
}
