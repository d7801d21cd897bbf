//! Exact sums of roots of unity.
//!
//! A path integral over a finite moduli set is a sum of `n`-th roots of
//! unity. Phases are tallied into a [`PhaseVector`], and the sum is decided
//! exactly by reducing `sum c_k x^k` modulo the cyclotomic polynomial.

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{Error as _, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::abgroup::divisors;

/// Integer polynomial, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `x^n - 1`
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[0] = -BigInt::one();
        coeffs[n] = BigInt::one();
        Self::new(coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    /// Division by a monic divisor: `(quotient, remainder)`.
    pub fn div_rem_monic(&self, divisor: &Self) -> (Self, Self) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let q = std::mem::take(&mut rem[i]);
            if q.is_zero() {
                continue;
            }
            for (j, c) in divisor.coeffs[..dd].iter().enumerate() {
                rem[i - dd + j] -= &q * c;
            }
            quot[i - dd] = q;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_f64().unwrap_or(f64::NAN))
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_default();
                let b = rhs.coeffs.get(i).cloned().unwrap_or_default();
                a + b
            })
            .collect();
        IntPolynomial::new(coeffs)
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_default();
                let b = rhs.coeffs.get(i).cloned().unwrap_or_default();
                a - b
            })
            .collect();
        IntPolynomial::new(coeffs)
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPolynomial::new(coeffs)
    }
}

/// `Phi_n`, by dividing `x^n - 1` by `Phi_d` for every proper divisor `d`.
pub fn cyclotomic_polynomial(n: u64) -> IntPolynomial {
    assert!(n >= 1, "cyclotomic_polynomial needs n >= 1");
    let mut memo = HashMap::new();
    cyclotomic_memo(n, &mut memo)
}

fn cyclotomic_memo(n: u64, memo: &mut HashMap<u64, IntPolynomial>) -> IntPolynomial {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let mut p = IntPolynomial::x_pow_minus_one(n as usize);
    for d in divisors(n).into_iter().filter(|&d| d < n) {
        let phi_d = cyclotomic_memo(d, memo);
        let (q, r) = p.div_rem_monic(&phi_d);
        debug_assert!(r.is_zero());
        p = q;
    }
    memo.insert(n, p.clone());
    p
}

/// A value `k/n` in `(1/n)Z/Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Phase {
    pub numerator: u64,
    pub modulus: u64,
}

impl Phase {
    pub fn new(numerator: u64, modulus: u64) -> Self {
        assert!(modulus >= 1);
        Self {
            numerator: numerator % modulus,
            modulus,
        }
    }

    pub fn zero(modulus: u64) -> Self {
        Self::new(0, modulus)
    }
}

/// Tally of phases `k/n`: `counts[k]` pairs landed on `exp(2 pi i k/n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseVector {
    n: u64,
    counts: Vec<BigUint>,
}

impl PhaseVector {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "phase modulus must be positive");
        Self {
            n,
            counts: vec![BigUint::zero(); n as usize],
        }
    }

    pub fn from_counts(n: u64, counts: &[u64]) -> Self {
        assert_eq!(counts.len() as u64, n, "need exactly n counts");
        Self {
            n,
            counts: counts.iter().map(|&c| BigUint::from(c)).collect(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn record(&mut self, k: u64, times: u128) {
        self.counts[(k % self.n) as usize] += times;
    }

    pub fn record_phase(&mut self, p: Phase, times: u128) {
        assert_eq!(p.modulus, self.n, "phase modulus mismatch");
        self.record(p.numerator, times);
    }

    /// Componentwise sum; the order of merging never matters.
    pub fn merge(&mut self, other: &PhaseVector) {
        assert_eq!(self.n, other.n, "phase modulus mismatch");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    pub fn as_polynomial(&self) -> IntPolynomial {
        IntPolynomial::new(self.counts.iter().map(|c| BigInt::from(c.clone())).collect())
    }

    /// Exact value of `sum c_k zeta_n^k` when it is an integer.
    pub fn exact_integer(&self) -> Option<BigInt> {
        phase_sum_as_integer(self)
    }

    pub fn approx(&self) -> Complex64 {
        phase_sum_float(self)
    }
}

impl Serialize for PhaseVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let counts = self
            .counts
            .iter()
            .map(|c| c.to_u128().ok_or_else(|| S::Error::custom("phase count exceeds 128 bits")))
            .collect::<Result<Vec<u128>, _>>()?;
        let mut st = serializer.serialize_struct("PhaseVector", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("counts", &counts)?;
        st.end()
    }
}

/// `m` if `sum c_k zeta_n^k = m` for a primitive `n`-th root `zeta_n`, else `None`.
///
/// The remainder of `sum c_k x^k` modulo `Phi_n` has degree below `phi(n)`,
/// and `1, zeta, ..., zeta^(phi(n)-1)` are linearly independent over `Q`, so
/// the sum is an integer exactly when that remainder is constant.
pub fn phase_sum_as_integer(p: &PhaseVector) -> Option<BigInt> {
    let phi = cyclotomic_polynomial(p.n);
    let (_, rem) = p.as_polynomial().div_rem_monic(&phi);
    match rem.degree() {
        None => Some(BigInt::zero()),
        Some(0) => Some(rem.coeffs[0].clone()),
        Some(_) => None,
    }
}

/// Double-precision `sum c_k e^(2 pi i k/n)`. Display only.
pub fn phase_sum_float(p: &PhaseVector) -> Complex64 {
    let n = p.n as f64;
    p.counts
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n;
            Complex64::from_polar(c.to_f64().unwrap_or(f64::INFINITY), theta)
        })
        .sum()
}

/// Whether an exact value is a nonnegative integer fitting in `u128`.
pub fn to_u128(v: &BigInt) -> Option<u128> {
    if v.is_negative() {
        None
    } else {
        v.to_u128()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_examples() {
        assert_eq!(cyclotomic_polynomial(1), IntPolynomial::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(4), IntPolynomial::from_i64(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), IntPolynomial::from_i64(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(5), IntPolynomial::from_i64(&[1, 1, 1, 1, 1]));
        // first cyclotomic polynomial with a coefficient outside {-1, 0, 1}
        let p105 = cyclotomic_polynomial(105);
        assert_eq!(p105.degree(), Some(48));
        assert!(p105.coeffs().iter().any(|c| *c == BigInt::from(-2)));
    }

    #[test]
    fn integer_sums() {
        assert_eq!(phase_sum_as_integer(&PhaseVector::from_counts(3, &[5, 0, 0])), Some(5.into()));
        assert_eq!(phase_sum_as_integer(&PhaseVector::from_counts(4, &[1, 1, 1, 1])), Some(0.into()));
        assert_eq!(phase_sum_as_integer(&PhaseVector::from_counts(3, &[3, 1, 1])), Some(2.into()));
        assert_eq!(phase_sum_as_integer(&PhaseVector::from_counts(1, &[7])), Some(7.into()));
        // 1 + i is not an integer
        assert_eq!(phase_sum_as_integer(&PhaseVector::from_counts(4, &[1, 1, 0, 0])), None);
        // 1 - 1 at n = 2
        assert_eq!(phase_sum_as_integer(&PhaseVector::from_counts(2, &[1, 1])), Some(0.into()));
        // negative integer: zeta + zeta^2 = -1
        assert_eq!(phase_sum_as_integer(&PhaseVector::from_counts(3, &[0, 1, 1])), Some((-1).into()));
    }

    #[test]
    fn float_sums() {
        let z = phase_sum_float(&PhaseVector::from_counts(4, &[1, 1, 1, 1]));
        assert!(z.norm() < 1e-12);
        let z = phase_sum_float(&PhaseVector::from_counts(2, &[2, 0]));
        assert!((z - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        let z = phase_sum_float(&PhaseVector::from_counts(3, &[3, 1, 1]));
        assert!((z - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn merge_is_componentwise() {
        let mut a = PhaseVector::from_counts(3, &[1, 2, 3]);
        let b = PhaseVector::from_counts(3, &[4, 0, 1]);
        a.merge(&b);
        assert_eq!(a, PhaseVector::from_counts(3, &[5, 2, 4]));
        assert_eq!(a.total(), BigUint::from(11u32));
    }

    #[test]
    fn serializes_counts_as_numbers() {
        let v = PhaseVector::from_counts(2, &[3, 1]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"n":2,"counts":[3,1]}"#);
    }
}
