//! Sparse multivariate polynomials with exact rational coefficients.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Exponent = Vec<u32>;

/// Polynomial in `nvars` variables. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, BigRational>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    /// The variable `x_i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, BigRational::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, BigRational)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length must match variable count");
            p.add_term(e, c);
        }
        p
    }

    /// Convenience constructor from `(exponent, integer coefficient)` pairs.
    pub fn from_int_terms(nvars: usize, terms: &[(&[u32], i64)]) -> Self {
        Self::from_terms(nvars, terms.iter().map(|(e, c)| (e.to_vec(), rat(*c))))
    }

    pub fn add_term(&mut self, e: Exponent, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    /// Coefficient of `x_i^d`, as a polynomial in the same variables (with
    /// `x_i` absent).
    pub fn coeff_in(&self, i: usize, d: u32) -> Poly {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == d {
                let mut e2 = e.clone();
                e2[i] = 0;
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    /// Leading coefficient in `x_i` and its degree.
    pub fn leading_in(&self, i: usize) -> (u32, Poly) {
        let d = self.degree_in(i);
        (d, self.coeff_in(i, d))
    }

    pub fn all_coeffs_nonneg(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &[BigRational]) -> BigRational {
        assert_eq!(x.len(), self.nvars);
        let mut total = BigRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    term *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            total += term;
        }
        total
    }

    pub fn eval_int(&self, x: &[BigInt]) -> BigRational {
        let r: Vec<BigRational> = x.iter().map(|v| BigRational::from_integer(v.clone())).collect();
        self.eval(&r)
    }

    pub fn eval_i64(&self, x: &[i64]) -> BigRational {
        let r: Vec<BigRational> = x.iter().map(|&v| rat(v)).collect();
        self.eval(&r)
    }

    /// Substitutes `x_i -> images[i]`; every image lives in `new_nvars` variables.
    pub fn compose(&self, images: &[Poly], new_nvars: usize) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(new_nvars), p.clone()]).collect();
        let mut out = Poly::zero(new_nvars);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(new_nvars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                if k > 0 {
                    term = &term * &powers[i][k];
                }
            }
            out = &out + &term;
        }
        out
    }

    /// `x_i -> x_i + t`.
    pub fn shift(&self, i: usize, t: &BigInt) -> Poly {
        let images: Vec<Poly> = (0..self.nvars)
            .map(|j| {
                let v = Poly::var(self.nvars, j);
                if j == i {
                    &v + &Poly::constant(self.nvars, BigRational::from_integer(t.clone()))
                } else {
                    v
                }
            })
            .collect();
        self.compose(&images, self.nvars)
    }

    /// Fixes `x_i = value` and removes the variable.
    pub fn fix(&self, i: usize, value: &BigInt) -> Poly {
        let mut out = Poly::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2.remove(i);
            let factor = BigRational::from_integer(num_traits::pow(value.clone(), k as usize));
            out.add_term(e2, c * factor);
        }
        out
    }

    /// Removes variables that the polynomial does not depend on, keeping
    /// the listed ones in order.
    pub fn restrict_vars(&self, keep: &[usize]) -> Poly {
        let mut out = Poly::zero(keep.len());
        for (e, c) in &self.terms {
            debug_assert!((0..self.nvars).all(|j| keep.contains(&j) || e[j] == 0));
            out.add_term(keep.iter().map(|&j| e[j]).collect(), c.clone());
        }
        out
    }

    /// `f(.., x_i + 1, ..) - f(..)`.
    pub fn forward_difference(&self, i: usize) -> Poly {
        &self.shift(i, &BigInt::one()) - self
    }

    /// Renders with the variable prefix `name` and 1-based indices.
    pub fn display_with(&self, name: &str) -> String {
        let mut s = String::new();
        if self.terms.is_empty() {
            return "0".into();
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(
                    |(i, &k)| {
                        if k == 1 {
                            alloc::format!("{name}{}", i + 1)
                        } else {
                            alloc::format!("{name}{}^{k}", i + 1)
                        }
                    },
                )
                .collect();
            if mono.is_empty() {
                s.push_str(&a.to_string());
            } else {
                if !a.is_one() {
                    s.push_str(&a.to_string());
                    s.push('*');
                }
                s.push_str(&mono.join("*"));
            }
        }
        s
    }
}

use alloc::string::ToString;

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("x"))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.nvars, self)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_triangular() {
        // x1*x2 under x1 = k1 + k2, x2 = k2
        let f = Poly::from_int_terms(2, &[(&[1, 1], 1)]);
        let k1 = Poly::var(2, 0);
        let k2 = Poly::var(2, 1);
        let g = f.compose(&[&k1 + &k2, k2.clone()], 2);
        let expected = Poly::from_int_terms(2, &[(&[1, 1], 1), (&[0, 2], 1)]);
        assert_eq!(g, expected);
    }

    #[test]
    fn shift_and_fix() {
        let f = Poly::from_int_terms(1, &[(&[2], 1)]);
        let g = f.shift(0, &BigInt::from(3));
        assert_eq!(g.eval_i64(&[1]), rat(16));
        let h = Poly::from_int_terms(2, &[(&[1, 1], 2), (&[0, 1], 1)]);
        let fixed = h.fix(0, &BigInt::from(5));
        assert_eq!(fixed, Poly::from_int_terms(1, &[(&[1], 11)]));
    }

    #[test]
    fn leading_coefficient_in_variable() {
        let f = Poly::from_int_terms(2, &[(&[2, 1], 3), (&[2, 0], 1), (&[1, 3], 5)]);
        let (d, lc) = f.leading_in(0);
        assert_eq!(d, 2);
        assert_eq!(lc, Poly::from_int_terms(2, &[(&[0, 1], 3), (&[0, 0], 1)]));
    }

    #[test]
    fn display_is_readable() {
        let f = Poly::from_terms(2, [(vec![1, 1], rat(1)), (vec![0, 2], rat_frac(1, 2)), (vec![0, 0], rat(-3))]);
        assert_eq!(f.to_string(), "x1*x2 + 1/2*x2^2 - 3");
    }
}
