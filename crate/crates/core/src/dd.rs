//! Double-double real and complex arithmetic (about 32 significant digits).
//!
//! Used where monomial coefficients of an interpolating polynomial are
//! reconstructed from Newton form: cancellation there eats most of the
//! `f64` mantissa already at moderate degree.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
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

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        // one Newton step from the f64 root
        let x = self.hi.sqrt();
        let xx = Dd::new(x) * Dd::new(x);
        let corr = (self - xx).hi / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, corr);
        Dd { hi, lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::new(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

/// Complex number with double-double parts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: DdComplex = DdComplex {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    pub fn new(re: Dd, im: Dd) -> Self {
        DdComplex { re, im }
    }

    pub fn from_c64(z: Complex64) -> Self {
        DdComplex::new(Dd::new(z.re), Dd::new(z.im))
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(self) -> Self {
        DdComplex::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }

    pub fn norm(self) -> Dd {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, x: Dd) -> Self {
        DdComplex::new(self.re * x, self.im * x)
    }

    pub fn powu(self, e: u32) -> Self {
        let mut acc = DdComplex::ONE;
        for _ in 0..e {
            acc = acc * self;
        }
        acc
    }

    /// Principal square root.
    pub fn sqrt(self) -> Self {
        let r = self.norm();
        if r.hi == 0.0 {
            return DdComplex::ZERO;
        }
        let half = Dd::new(0.5);
        if self.re.hi >= 0.0 {
            let s = ((r + self.re) * half).sqrt();
            DdComplex::new(s, self.im / (s + s))
        } else {
            let t = ((r - self.re) * half).sqrt();
            let t = if self.im.hi < 0.0 { -t } else { t };
            DdComplex::new(self.im / (t + t), t)
        }
    }

    /// `e^{i2πr/period}` refined by Newton iteration on `z^period = 1`.
    pub fn root_of_unity(r: i64, period: i64) -> Self {
        let r = r.rem_euclid(period);
        let mut z = DdComplex::from_c64(crate::laurent::root_of_unity(r, period));
        if r == 0 || 2 * r == period || 4 * r == period || 4 * r == 3 * period {
            return z;
        }
        let p = period as u32;
        let pd = Dd::new(period as f64);
        for _ in 0..2 {
            // z ← z − (z^p − 1)/(p z^{p−1})
            let zp1 = z.powu(p - 1);
            let f = zp1 * z - DdComplex::ONE;
            let df = zp1.scale(pd);
            z = z - f / df;
        }
        z
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, o: DdComplex) -> DdComplex {
        DdComplex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    fn sub(self, o: DdComplex) -> DdComplex {
        DdComplex::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for DdComplex {
    type Output = DdComplex;
    fn neg(self) -> DdComplex {
        DdComplex::new(-self.re, -self.im)
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    fn mul(self, o: DdComplex) -> DdComplex {
        DdComplex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl Div for DdComplex {
    type Output = DdComplex;
    fn div(self, o: DdComplex) -> DdComplex {
        let d = o.norm_sqr();
        let num = self * o.conj();
        DdComplex::new(num.re / d, num.im / d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_is_more_precise_than_f64() {
        let third = Dd::ONE / Dd::new(3.0);
        let back = third * Dd::new(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-30);
    }

    #[test]
    fn sqrt_two_squared() {
        let s = Dd::new(2.0).sqrt();
        assert!((s * s - Dd::new(2.0)).to_f64().abs() < 1e-30);
    }

    #[test]
    fn complex_sqrt_principal() {
        let z = DdComplex::from_c64(Complex64::new(-4.0, 0.0)).sqrt();
        assert_eq!(z.to_c64(), Complex64::new(0.0, 2.0));
        let w = DdComplex::from_c64(Complex64::new(0.0, -2.0)).sqrt();
        let c = w.to_c64();
        assert!((c - Complex64::new(1.0, -1.0)).norm() < 1e-15);
        let back = w * w - DdComplex::from_c64(Complex64::new(0.0, -2.0));
        assert!(back.norm().to_f64() < 1e-30);
    }

    #[test]
    fn roots_of_unity_refined() {
        for period in [3i64, 5, 7, 17] {
            let z = DdComplex::root_of_unity(1, period);
            let err = z.powu(period as u32) - DdComplex::ONE;
            assert!(err.norm().to_f64() < 1e-29, "period {period}");
            assert!((z.norm() - Dd::ONE).to_f64().abs() < 1e-30);
        }
    }
}
