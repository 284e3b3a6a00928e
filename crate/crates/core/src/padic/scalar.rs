use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub fn pow_p(p: u64, k: u64) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

/// `ord_p(x)`, `None` for zero.
pub fn ord_p(x: &BigInt, p: u64) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        y = q;
        v += 1;
    }
}

fn split_p(x: &BigInt, p: u64) -> (i64, BigInt) {
    let v = ord_p(x, p).expect("nonzero");
    (v as i64, x / pow_p(p, v))
}

pub fn check_prime(p: u64) -> Result<()> {
    if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
        return Err(Error::InvalidPrime(p));
    }
    Ok(())
}

/// `e` with `q = p^e`, `e >= 1`.
pub fn prime_power_exponent(q: u64, p: u64) -> Result<u64> {
    check_prime(p)?;
    let (mut x, mut e) = (q, 0);
    while x > 1 && x % p == 0 {
        x /= p;
        e += 1;
    }
    if x != 1 || e == 0 {
        return Err(Error::NotPrimePower { q, p });
    }
    Ok(e)
}

/// A p-adic number known modulo `p^prec`: `p^val · unit` with the unit
/// stored modulo `p^(prec - val)`, or zero to that precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicScalar {
    p: u64,
    prec: i64,
    val: Option<i64>,
    unit: BigInt,
}

impl PadicScalar {
    pub fn zero(p: u64, prec: i64) -> Self {
        Self { p, prec, val: None, unit: BigInt::zero() }
    }

    /// `p^val · unit` reduced to absolute precision `prec`; `unit` may carry
    /// further factors of `p`.
    fn normalize(p: u64, prec: i64, val: i64, unit: BigInt) -> Self {
        if unit.is_zero() || val >= prec {
            return Self::zero(p, prec);
        }
        let (extra, u) = split_p(&unit, p);
        let v = val + extra;
        if v >= prec {
            return Self::zero(p, prec);
        }
        let m = pow_p(p, (prec - v) as u64);
        Self { p, prec, val: Some(v), unit: u.mod_floor(&m) }
    }

    pub fn from_integer(p: u64, x: &BigInt, prec: i64) -> Self {
        Self::normalize(p, prec, 0, x.clone())
    }

    pub fn from_i64(p: u64, x: i64, prec: i64) -> Self {
        Self::from_integer(p, &BigInt::from(x), prec)
    }

    /// An exact rational, known to absolute precision `prec`.
    pub fn from_rational(p: u64, r: &BigRational, prec: i64) -> Self {
        if r.is_zero() {
            return Self::zero(p, prec);
        }
        let (vn, un) = split_p(r.numer(), p);
        let (vd, ud) = split_p(r.denom(), p);
        let v = vn - vd;
        if v >= prec {
            return Self::zero(p, prec);
        }
        let m = pow_p(p, (prec - v) as u64);
        let inv = mod_inverse(&ud, &m).expect("denominator unit is invertible");
        Self { p, prec, val: Some(v), unit: (un * inv).mod_floor(&m) }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Absolute precision: the value is known modulo `p^precision`.
    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// Certified valuation, or `None` when zero to the working precision.
    pub fn valuation(&self) -> Option<i64> {
        self.val
    }

    /// Lower bound on the valuation.
    pub fn valuation_floor(&self) -> i64 {
        self.val.unwrap_or(self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_none()
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    /// Value modulo `p^precision` in `[0, p^precision)`, for integral values.
    pub fn residue(&self) -> Option<BigInt> {
        match self.val {
            None => Some(BigInt::zero()),
            Some(v) if v >= 0 => Some(&self.unit * pow_p(self.p, v as u64)),
            Some(_) => None,
        }
    }

    /// Drops precision down to `prec` (never raises it).
    pub fn with_precision(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        match self.val {
            None => Self::zero(self.p, prec),
            Some(v) => Self::normalize(self.p, prec, v, self.unit.clone()),
        }
    }

    fn same_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::Precision(alloc::format!("primes {} and {} differ", self.p, other.p)));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        match self.val {
            None => self.clone(),
            Some(v) => Self::normalize(self.p, self.prec, v, -&self.unit),
        }
    }

    /// Precision is the smaller of the two.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let prec = self.prec.min(other.prec);
        match (self.val, other.val) {
            (None, None) => Ok(Self::zero(self.p, prec)),
            (Some(_), None) => Ok(self.with_precision(prec)),
            (None, Some(_)) => Ok(other.with_precision(prec)),
            (Some(a), Some(b)) => {
                let m = a.min(b);
                let s = &self.unit * pow_p(self.p, (a - m) as u64) + &other.unit * pow_p(self.p, (b - m) as u64);
                Ok(Self::normalize(self.p, prec, m, s))
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Absolute precision `min(prec_a + val_b, prec_b + val_a)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let prec = (self.prec + other.valuation_floor()).min(other.prec + self.valuation_floor());
        match (self.val, other.val) {
            (Some(a), Some(b)) => Ok(Self::normalize(self.p, prec, a + b, &self.unit * &other.unit)),
            _ => Ok(Self::zero(self.p, prec)),
        }
    }

    /// Division by an element of certified valuation; relative precision is
    /// the smaller of the two.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let vb = other.val.ok_or(Error::DivisionByZero)?;
        let rel_b = other.prec - vb;
        match self.val {
            None => Ok(Self::zero(self.p, self.prec - vb)),
            Some(va) => {
                let rel = (self.prec - va).min(rel_b);
                let m = pow_p(self.p, rel as u64);
                let inv = mod_inverse(&other.unit, &m).expect("unit");
                Ok(Self::normalize(self.p, va - vb + rel, va - vb, (&self.unit * inv).mod_floor(&m)))
            }
        }
    }

    /// Division restricted to unit divisors.
    pub fn div_unit(&self, other: &Self) -> Result<Self> {
        match other.val {
            None => Err(Error::DivisionByZero),
            Some(0) => self.div(other),
            Some(v) => Err(Error::NonUnitDivision { valuation: v }),
        }
    }

    /// Whether the rational `x` reduces to this value at this precision.
    pub fn agrees_with(&self, x: &BigRational) -> bool {
        let other = Self::from_rational(self.p, x, self.prec);
        self.sub(&other).is_ok_and(|d| d.is_zero())
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::from_i64(self.p, 1, i64::MAX / 4);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.val, self.residue()) {
            (None, _) => write!(f, "val=inf, residue=0 mod {}^{}", self.p, self.prec),
            (Some(v), Some(r)) => write!(f, "val={v}, residue={r} mod {}^{}", self.p, self.prec),
            (Some(v), None) => {
                write!(f, "val={v}, residue={}/{}^{} mod {}^{}", self.unit, self.p, -v, self.p, self.prec)
            }
        }
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Ceiling of a rational as `i64`, saturating.
pub(crate) fn ceil_i64(r: &BigRational) -> i64 {
    let c = r.ceil().to_integer();
    i64::try_from(&c).unwrap_or(if c.is_negative() { i64::MIN / 4 } else { i64::MAX / 4 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_frac;
    use alloc::string::ToString;

    #[test]
    fn construction_and_residue() {
        let x = PadicScalar::from_i64(2, 12, 5);
        assert_eq!(x.valuation(), Some(2));
        assert_eq!(x.residue(), Some(BigInt::from(12)));
        let z = PadicScalar::from_i64(2, 32, 5);
        assert!(z.is_zero());
        let h = PadicScalar::from_rational(2, &rat_frac(1, 2), 4);
        assert_eq!(h.valuation(), Some(-1));
        assert_eq!(h.to_string(), "val=-1, residue=1/2^1 mod 2^4");
    }

    #[test]
    fn precision_rules() {
        let a = PadicScalar::from_i64(3, 5, 4);
        let b = PadicScalar::from_i64(3, 9, 6);
        assert_eq!(a.add(&b).unwrap().precision(), 4);
        // 5 * 9: min(4 + 2, 6 + 0) = 6
        let m = a.mul(&b).unwrap();
        assert_eq!(m.precision(), 6);
        assert_eq!(m.residue(), Some(BigInt::from(45)));
    }

    #[test]
    fn division() {
        let one = PadicScalar::from_i64(2, 1, 8);
        let three = PadicScalar::from_i64(2, 3, 8);
        let third = one.div_unit(&three).unwrap();
        assert_eq!(third.mul(&three).unwrap().residue(), Some(BigInt::one()));
        let two = PadicScalar::from_i64(2, 2, 8);
        assert_eq!(one.div_unit(&two), Err(Error::NonUnitDivision { valuation: 1 }));
        assert_eq!(one.div(&PadicScalar::zero(2, 8)), Err(Error::DivisionByZero));
        let half = one.div(&two).unwrap();
        assert_eq!(half.valuation(), Some(-1));
        assert_eq!(half.precision(), 6);
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power_exponent(8, 2).unwrap(), 3);
        assert!(prime_power_exponent(6, 2).is_err());
        assert!(prime_power_exponent(1, 2).is_err());
        assert!(prime_power_exponent(4, 4).is_err());
    }
}
