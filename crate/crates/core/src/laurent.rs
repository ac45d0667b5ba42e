//! Exact Laurent polynomials in a formal phase `q` with rational coefficients.
//!
//! `q` stands for the phase `e^{i2π/(n+1)}` but is kept formal: no relation
//! `q^{n+1} = 1` is imposed. Specialization to a concrete `n` (or to `q = ±1`)
//! happens only at evaluation time.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A finite sum `Σ c_k q^k`, `k ∈ ℤ`, `c_k ∈ ℚ`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentScalar {
    coeffs: BTreeMap<i32, BigRational>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigRational::one(), 0)
    }

    /// The formal phase `q`.
    pub fn q() -> Self {
        Self::q_pow(1)
    }

    pub fn q_pow(k: i32) -> Self {
        Self::monomial(BigRational::one(), k)
    }

    pub fn monomial(c: BigRational, k: i32) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        Self { coeffs }
    }

    pub fn from_int(c: i64) -> Self {
        Self::monomial(BigRational::from_integer(BigInt::from(c)), 0)
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::monomial(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            0,
        )
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }

    /// The q-integer `1 + q + … + q^{k-1}` (zero for `k = 0`).
    pub fn q_integer(k: u32) -> Self {
        let mut out = Self::zero();
        for j in 0..k {
            out.add_term(j as i32, BigRational::one());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|c| c.is_one())
    }

    /// Coefficient of `q^k`.
    pub fn coeff(&self, k: i32) -> BigRational {
        self.coeffs.get(&k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigRational)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_term(&mut self, k: i32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(k).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Multiply by `q^shift`.
    pub fn shift(&self, shift: i32) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(k, v)| (k + shift, v.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitute a rational value for `q` (used for `q = 1` and `q = -1`).
    /// Panics if `value` is zero and a negative exponent is present.
    pub fn specialize(&self, value: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (k, c) in &self.coeffs {
            let p = if *k >= 0 {
                num_traits::pow(value.clone(), *k as usize)
            } else {
                num_traits::pow(value.recip(), (-*k) as usize)
            };
            acc += c * p;
        }
        acc
    }

    /// Evaluate at `q = e^{i2π/(n+1)}`, reducing exponents modulo `n+1` before
    /// taking the exponential.
    pub fn eval(&self, n: usize) -> Complex64 {
        assert!(n >= 1, "laurent_eval needs n >= 1");
        let period = (n + 1) as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &self.coeffs {
            let r = (*k as i64).rem_euclid(period);
            acc += root_of_unity(r, period) * rational_to_f64(c);
        }
        acc
    }

    /// Evaluate at an arbitrary complex `q`.
    pub fn eval_at(&self, q: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &self.coeffs {
            acc += q.powi(*k) * rational_to_f64(c);
        }
        acc
    }
}

/// `e^{i2πr/period}` with exact values on the axes.
pub fn root_of_unity(r: i64, period: i64) -> Complex64 {
    let r = r.rem_euclid(period);
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * r == period {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * r == period {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * r == 3 * period {
        return Complex64::new(0.0, -1.0);
    }
    let theta = 2.0 * PI * r as f64 / period as f64;
    Complex64::new(theta.cos(), theta.sin())
}

pub(crate) fn rational_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for the direct path
        let n = c.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = c.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Sign and coefficient prefix for a polynomial term: `(negative, "3/2 ")`,
/// `(false, "")` for a unit coefficient, `(false, "(1 - q) ")` for a sum.
pub(crate) fn term_prefix(c: &LaurentScalar) -> (bool, String) {
    if c.len() != 1 {
        return (false, format!("({c}) "));
    }
    let neg = c.terms().all(|(_, v)| v.is_negative());
    let mag = if neg { -c } else { c.clone() };
    if mag.is_one() {
        (neg, String::new())
    } else {
        (neg, format!("{mag} "))
    }
}

/// Free function form of [`LaurentScalar::eval`].
pub fn laurent_eval(s: &LaurentScalar, n: usize) -> Complex64 {
    s.eval(n)
}

impl Add for &LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentScalar {
    type Output = LaurentScalar;
    fn add(mut self, rhs: LaurentScalar) -> LaurentScalar {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentScalar> for LaurentScalar {
    fn add_assign(&mut self, rhs: &LaurentScalar) {
        for (k, c) in &rhs.coeffs {
            self.add_term(*k, c.clone());
        }
    }
}

impl SubAssign<&LaurentScalar> for LaurentScalar {
    fn sub_assign(&mut self, rhs: &LaurentScalar) {
        for (k, c) in &rhs.coeffs {
            self.add_term(*k, -c.clone());
        }
    }
}

impl Sub for &LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LaurentScalar {
    type Output = LaurentScalar;
    fn sub(mut self, rhs: LaurentScalar) -> LaurentScalar {
        self -= &rhs;
        self
    }
}

impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        LaurentScalar {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c.clone())).collect(),
        }
    }
}

impl Neg for LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        -&self
    }
}

impl Mul for &LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = LaurentScalar::zero();
        for (ka, ca) in &self.coeffs {
            for (kb, cb) in &rhs.coeffs {
                out.add_term(ka + kb, ca * cb);
            }
        }
        out
    }
}

impl Mul for LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: LaurentScalar) -> LaurentScalar {
        &self * &rhs
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = mag.is_one();
            match (*k, unit) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "{}", q_power_str(*k))?,
                (_, false) => write!(f, "{mag} {}", q_power_str(*k))?,
            }
        }
        Ok(())
    }
}

fn q_power_str(k: i32) -> String {
    match k {
        1 => "q".to_string(),
        k => format!("q^{k}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn approx(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn q_at_n1_is_minus_one() {
        assert_eq!(LaurentScalar::q().eval(1), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn q_times_inverse_is_unit() {
        let s = &LaurentScalar::q() * &LaurentScalar::q_pow(-1);
        assert!(s.is_one());
        for n in 1..10 {
            assert_eq!(s.eval(n), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn one_plus_q_at_n3() {
        let s = LaurentScalar::one() + LaurentScalar::q();
        assert!(approx(s.eval(3), Complex64::new(1.0, 1.0), 1e-15));
    }

    #[test]
    fn zero_polynomial_evaluates_exactly_to_zero() {
        let s = LaurentScalar::q() - LaurentScalar::q();
        assert!(s.is_zero());
        assert_eq!(s.eval(7), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn specialization_at_plus_minus_one() {
        // (1 - q)^2 at q = 1 vanishes, at q = -1 gives 4
        let one_minus_q = LaurentScalar::one() - LaurentScalar::q();
        let sq = one_minus_q.pow(2);
        assert!(sq.specialize(&BigRational::one()).is_zero());
        assert_eq!(
            sq.specialize(&-BigRational::one()),
            BigRational::from_integer(4.into())
        );
        let inv = LaurentScalar::q_pow(-3);
        assert_eq!(inv.specialize(&-BigRational::one()), -BigRational::one());
    }

    #[test]
    fn display_is_ascending() {
        let s = LaurentScalar::q_pow(2) - LaurentScalar::q();
        assert_eq!(s.to_string(), "-q + q^2");
        let t = LaurentScalar::from_ratio(3, 2) + LaurentScalar::q_pow(-1);
        assert_eq!(t.to_string(), "q^-1 + 3/2");
    }

    fn laurent() -> impl Strategy<Value = LaurentScalar> {
        prop::collection::vec((-4i32..=4, -6i64..=6, 1i64..=4), 0..5).prop_map(|terms| {
            let mut s = LaurentScalar::zero();
            for (k, num, den) in terms {
                s += &LaurentScalar::monomial(
                    BigRational::new(num.into(), den.into()),
                    k,
                );
            }
            s
        })
    }

    proptest! {
        #[test]
        fn canonical_form_has_no_zero_coefficients(a in laurent(), b in laurent()) {
            let c = &(&a * &b) - &a;
            prop_assert!(c.terms().all(|(_, v)| !v.is_zero()));
        }

        #[test]
        fn add_commutes(a in laurent(), b in laurent()) {
            prop_assert_eq!(&a + &b, &b + &a);
        }

        #[test]
        fn mul_commutes(a in laurent(), b in laurent()) {
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn mul_associates(a in laurent(), b in laurent(), c in laurent()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn add_associates(a in laurent(), b in laurent(), c in laurent()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        }

        #[test]
        fn distributes(a in laurent(), b in laurent(), c in laurent()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn units(a in laurent()) {
            prop_assert_eq!(&a * &LaurentScalar::one(), a.clone());
            prop_assert_eq!(&a + &LaurentScalar::zero(), a.clone());
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn eval_is_multiplicative(a in laurent(), b in laurent(), n in 1usize..20) {
            let lhs = (&a * &b).eval(n);
            let rhs = a.eval(n) * b.eval(n);
            // absolute 1e-14 per unit of coefficient mass
            let l1 = |s: &LaurentScalar| s.terms().map(|(_, c)| rational_to_f64(c).abs()).sum::<f64>();
            let scale = 1.0 + l1(&a) * l1(&b);
            prop_assert!((lhs - rhs).norm() <= 1e-14 * scale, "{lhs} vs {rhs}");
        }
    }
}
