//! Entire numerators and denominators modulo `p^W`, and certified
//! evaluation of a decomposition at a rational point.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::reduce::{axis, eval_exponent, q_pow, EntireCore, MeroBody, MeromorphicPart};
use crate::error::{Error, Result};
use crate::padic::{certified_cutoff, eval_entire, ord_p, pow_p, CertifiedSeries, PadicScalar, QuadraticBound};
use crate::poly::Poly;

/// Smallest `x` with `g(x) >= limit`, for nondecreasing nonconstant `g`.
fn axis_bound(g: &Poly, limit: &BigInt, what: &str) -> Result<u64> {
    if g.is_constant() {
        return Err(Error::UnsupportedShape(alloc::format!(
            "{what} {} does not grow along a coordinate axis",
            g.display_with("k")
        )));
    }
    let limit = BigRational::from_integer(limit.clone());
    let mut x = 0i64;
    while g.eval_i64(&[x]) < limit {
        x += 1;
    }
    Ok(x as u64)
}

/// Points `k` with `k_i < bounds[i]`.
fn for_each_in_box(bounds: &[u64], visit: &mut dyn FnMut(&[u64])) {
    fn go(bounds: &[u64], k: &mut Vec<u64>, visit: &mut dyn FnMut(&[u64])) {
        if k.len() == bounds.len() {
            visit(k);
            return;
        }
        for x in 0..bounds[k.len()] {
            k.push(x);
            go(bounds, k, visit);
            k.pop();
        }
    }
    go(bounds, &mut Vec::new(), visit);
}

fn reduce_mod(s: &mut [BigInt], m: &BigInt) {
    for c in s.iter_mut() {
        *c = c.mod_floor(m);
    }
}

impl MeromorphicPart {
    /// Distinct values `v(k)` with `eq·v < w`.
    fn small_values(&self, v: &Poly, w: i64) -> Result<BTreeSet<BigInt>> {
        let limit = BigInt::from(w).div_ceil(&BigInt::from(self.eq));
        let m = v.nvars();
        let mut bounds = Vec::with_capacity(m);
        for i in 0..m {
            bounds.push(if v.depends_on(i) { axis_bound(&axis(v, i), &limit, "denominator exponent")? } else { 1 });
        }
        let mut out = BTreeSet::new();
        for_each_in_box(&bounds, &mut |k| {
            let x = eval_exponent(v, k);
            if x < limit {
                out.insert(x);
            }
        });
        Ok(out)
    }

    /// `G(T) = Π_{distinct v} (1 - q^v T^e)` modulo `p^w`, through `T^r`.
    /// Factors with `eq·v >= w` are congruent to 1 and dropped.
    pub fn denominator_mod(&self, core: &EntireCore, w: i64, r: usize) -> Result<Option<Vec<BigInt>>> {
        let Some(den) = &core.denominator else { return Ok(None) };
        let modulus = pow_p(self.p, w.max(0) as u64);
        let values = self.small_values(&den.v, w)?;
        log::debug!("denominator mod {}^{w}: {} factors", self.p, values.len());
        let e = den.t_exp as usize;
        let mut g = alloc::vec![BigInt::zero(); r + 1];
        g[0] = BigInt::one();
        for v in &values {
            let x = q_pow(self.q, v);
            for i in (e..=r).rev() {
                let prev = &g[i - e] * &x;
                g[i] -= prev;
            }
            reduce_mod(&mut g, &modulus);
        }
        Ok(Some(g))
    }

    /// `Σ_k q^u(k) T^(w·k) G(T) / (1 - q^v(k) T^e)` modulo `p^w`, through `T^r`.
    pub fn numerator_mod(&self, core: &EntireCore, w: i64, r: usize) -> Result<Vec<BigInt>> {
        let modulus = pow_p(self.p, w.max(0) as u64);
        let limit = BigInt::from(w).div_ceil(&BigInt::from(self.eq));
        let m = core.u.nvars();
        let mut bounds = Vec::with_capacity(m);
        for i in 0..m {
            bounds.push(axis_bound(&axis(&core.u, i), &limit, "exponent")?);
        }
        let g = self.denominator_mod(core, w, r)?;
        let mut cofactors: BTreeMap<BigInt, Vec<BigInt>> = BTreeMap::new();
        let mut out = alloc::vec![BigInt::zero(); r + 1];
        let mut failure = None;
        for_each_in_box(&bounds, &mut |k| {
            let pos: u64 = k.iter().zip(&core.weights).map(|(a, b)| a * b).sum();
            if pos as usize > r {
                return;
            }
            let ex = eval_exponent(&core.u, k);
            if ex >= limit {
                return;
            }
            let base = q_pow(self.q, &ex);
            let pos = pos as usize;
            match (&core.denominator, &g) {
                (Some(den), Some(g)) => {
                    let v = eval_exponent(&den.v, k);
                    let cof = cofactors.entry(v.clone()).or_insert_with(|| {
                        // G / (1 - q^v T^e): multiply by the geometric series
                        let mut c = g.clone();
                        let x = q_pow(self.q, &v);
                        let e = den.t_exp as usize;
                        for i in e..c.len() {
                            let prev = &c[i - e] * &x;
                            c[i] += prev;
                            c[i] = c[i].mod_floor(&modulus);
                        }
                        c
                    });
                    for i in 0..=(r - pos) {
                        out[pos + i] += &base * &cof[i];
                    }
                }
                (None, _) => out[pos] += base,
                (Some(_), None) => failure = Some(()),
            }
        });
        if failure.is_some() {
            return Err(Error::Precision("denominator series unavailable".into()));
        }
        reduce_mod(&mut out, &modulus);
        Ok(out)
    }

    fn certified(&self, coeffs: Vec<BigInt>, w: i64, bound: &QuadraticBound) -> Result<CertifiedSeries> {
        let scalars = coeffs.iter().map(|c| PadicScalar::from_integer(self.p, c, w)).collect();
        CertifiedSeries::approx(self.p, scalars).with_bound(bound.clone())
    }

    /// Numerator as a certified series; attaching the bound checks it on
    /// every computed coefficient.
    pub fn numerator_series(&self, core: &EntireCore, w: i64, r: usize) -> Result<CertifiedSeries> {
        self.certified(self.numerator_mod(core, w, r)?, w, &core.numerator_bound)
    }

    pub fn denominator_series(&self, core: &EntireCore, w: i64, r: usize) -> Result<Option<CertifiedSeries>> {
        match (self.denominator_mod(core, w, r)?, &core.denominator_bound) {
            (Some(g), Some(b)) => Ok(Some(self.certified(g, w, b)?)),
            _ => Ok(None),
        }
    }
}

/// `ord_p(t)` for nonzero `t`.
pub fn rational_valuation(t: &BigRational, p: u64) -> Option<i64> {
    let n = ord_p(t.numer(), p)? as i64;
    let d = ord_p(t.denom(), p).expect("nonzero denominator") as i64;
    Some(n - d)
}

fn q_rational(q: u64, e: u64) -> BigRational {
    BigRational::from_integer(pow_p(q, e))
}

/// Evaluates a certified series at `t` to `target`, computing coefficients
/// through the cutoff at the precision the tail control needs.
fn eval_core_series(
    build: &dyn Fn(i64, usize) -> Result<Option<CertifiedSeries>>,
    bound: &QuadraticBound,
    t: &BigRational,
    p: u64,
    ord_t: i64,
    target: i64,
) -> Result<Option<PadicScalar>> {
    let s = (-ord_t).max(0);
    let cutoff = certified_cutoff(bound, ord_t, target);
    let w = target + s * cutoff as i64;
    let Some(series) = build(w, cutoff)? else { return Ok(None) };
    let tp = PadicScalar::from_rational(p, t, w + s * cutoff as i64 + 1);
    eval_entire(&series, &tp, target).map(Some)
}

fn eval_at(part: &MeromorphicPart, t: &BigRational, ord_t: i64, target: i64) -> Result<PadicScalar> {
    let p = part.p;
    let mut acc = PadicScalar::zero(p, target);
    for term in &part.terms {
        let mut factor =
            BigRational::from_integer(term.coefficient.clone()) * num_traits::pow(t.clone(), term.shift as usize);
        for atom in &term.atoms {
            let den =
                BigRational::one() - q_rational(part.q, atom.q_exp) * num_traits::pow(t.clone(), atom.t_exp as usize);
            if den.is_zero() {
                return Err(Error::Pole(alloc::format!(
                    "1 - {}^{} T^{} vanishes at T = {t}",
                    part.q,
                    atom.q_exp,
                    atom.t_exp
                )));
            }
            factor /= den;
        }
        let value = match &term.body {
            MeroBody::Monomial(c) => PadicScalar::from_rational(p, &(factor * q_rational(part.q, *c)), target),
            MeroBody::Entire(core) => {
                let num = eval_core_series(
                    &|w, r| part.numerator_series(core, w, r).map(Some),
                    &core.numerator_bound,
                    t,
                    p,
                    ord_t,
                    target,
                )?
                .expect("numerator always exists");
                let ratio = match &core.denominator_bound {
                    None => num,
                    Some(b) => {
                        let den =
                            eval_core_series(&|w, r| part.denominator_series(core, w, r), b, t, p, ord_t, target)?
                                .expect("bounded denominator");
                        num.div(&den)?
                    }
                };
                let f = PadicScalar::from_rational(p, &factor, target + ratio.valuation_floor().abs() + 1);
                f.mul(&ratio)?
            }
        };
        acc = acc.add(&value)?;
    }
    Ok(acc)
}

/// Value of the decomposed series at `t`, certified modulo `p^n`.
///
/// Working precision grows until the result is known to `n` digits; a
/// denominator that stays indistinguishable from zero is reported as a pole.
pub fn evaluate_meromorphic(part: &MeromorphicPart, t: &BigRational, n: i64) -> Result<PadicScalar> {
    if n < 1 {
        return Err(Error::Precision(alloc::format!("target precision {n} must be positive")));
    }
    let Some(ord_t) = rational_valuation(t, part.p) else {
        let c0 = part.expand(0).swap_remove(0);
        return Ok(PadicScalar::from_integer(part.p, &c0, n));
    };
    let mut slack = 4;
    while slack <= 512 {
        match eval_at(part, t, ord_t, n + slack) {
            Ok(v) if v.precision() >= n => return Ok(v.with_precision(n)),
            Ok(v) => log::debug!("precision {} short of {n} at slack {slack}", v.precision()),
            Err(Error::DivisionByZero) => log::debug!("denominator vanishes at slack {slack}"),
            Err(e) => return Err(e),
        }
        slack *= 2;
    }
    Err(Error::Pole(alloc::format!("denominator vanishes at T = {t} to every working precision tried")))
}
