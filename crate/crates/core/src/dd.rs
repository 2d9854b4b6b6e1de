//! Double-double arithmetic, just enough to resum power series whose terms
//! cancel heavily.

use core::ops::{Add, Mul};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

// Dekker splitting; avoids relying on a hardware fma in no_std builds.
#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub(crate) const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub(crate) fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact sum of two doubles.
    pub(crate) fn sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    pub(crate) fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub(crate) fn scale(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub(crate) fn recip(self) -> Self {
        let q1 = 1.0 / self.hi;
        // r = 1 - q1 * self
        let r = Dd::new(1.0) + self.scale(-q1);
        let q2 = r.hi / self.hi;
        let r = r + self.scale(-q2);
        let q3 = r.hi / self.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

impl Add for Dd {
    type Output = Dd;

    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Mul for Dd {
    type Output = Dd;

    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * b.lo + self.lo * b.hi));
        Dd { hi, lo }
    }
}

/// Complex number with double-double parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DdComplex {
    pub(crate) re: Dd,
    pub(crate) im: Dd,
}

impl DdComplex {
    pub(crate) const ZERO: DdComplex = DdComplex {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    pub(crate) fn from_real(x: Dd) -> Self {
        DdComplex { re: x, im: Dd::ZERO }
    }

    /// Product with a double-precision complex factor `(a + ib)`.
    pub(crate) fn mul_c64(self, a: f64, b: f64) -> Self {
        DdComplex {
            re: self.re.scale(a) + self.im.scale(-b),
            im: self.re.scale(b) + self.im.scale(a),
        }
    }

    pub(crate) fn mul_dd(self, s: Dd) -> Self {
        DdComplex {
            re: self.re * s,
            im: self.im * s,
        }
    }

    pub(crate) fn scale(self, s: f64) -> Self {
        DdComplex {
            re: self.re.scale(s),
            im: self.im.scale(s),
        }
    }

    pub(crate) fn add(self, o: DdComplex) -> Self {
        DdComplex {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }

    pub(crate) fn to_parts(self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_bits_lost_in_plain_arithmetic() {
        let a = Dd::new(1.0) + Dd::new(1e-20);
        let b = a + Dd::new(-1.0);
        assert_eq!(b.to_f64(), 1e-20);
    }

    #[test]
    fn reciprocal_of_three() {
        let r = Dd::sum(3.0, 0.0).recip();
        let back = r * Dd::new(3.0) + Dd::new(-1.0);
        assert!(back.to_f64().abs() < 1e-30);
    }

    #[test]
    fn product_is_exact_for_split_doubles() {
        let x = 1.0 + f64::EPSILON;
        let p = Dd::new(x) * Dd::new(x) + Dd::new(-1.0);
        assert_eq!(p.to_f64(), 2.0 * f64::EPSILON + f64::EPSILON * f64::EPSILON);
    }
}
