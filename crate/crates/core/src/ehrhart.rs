//! Quasi-polynomials fitted exactly from sample values.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{rat, Poly};
use crate::toric::{sections_dim, TorusDivisor, ValidatedFan};

/// Values at integer points, for validation against a sampler.
pub trait Evaluate {
    fn evaluate(&self, n: &[i64]) -> BigRational;
}

/// `f(n) = p_i(n)` for `n ≡ i (mod period)`. Component coefficients are in
/// ascending powers of `n` itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiPolynomial {
    period: usize,
    components: Vec<Vec<BigRational>>,
}

fn trim(mut c: Vec<BigRational>) -> Vec<BigRational> {
    while c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
    c
}

fn horner(c: &[BigRational], x: &BigRational) -> BigRational {
    c.iter().rev().fold(BigRational::zero(), |acc, a| acc * x + a)
}

impl QuasiPolynomial {
    pub fn new(components: Vec<Vec<BigRational>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Dimension("a quasi-polynomial needs at least one component".into()));
        }
        Ok(Self { period: components.len(), components: components.into_iter().map(trim).collect() })
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn components(&self) -> &[Vec<BigRational>] {
        &self.components
    }

    /// Largest component degree; the zero polynomial counts as degree 0.
    pub fn degree(&self) -> usize {
        self.components.iter().map(|c| c.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn eval(&self, n: i64) -> BigRational {
        let i = n.rem_euclid(self.period as i64) as usize;
        horner(&self.components[i], &rat(n))
    }

    /// Collapses to a plain polynomial when every component agrees.
    pub fn as_polynomial(&self) -> Option<&[BigRational]> {
        self.components.iter().all(|c| c == &self.components[0]).then(|| self.components[0].as_slice())
    }
}

impl Evaluate for QuasiPolynomial {
    fn evaluate(&self, n: &[i64]) -> BigRational {
        self.eval(n[0])
    }
}

/// Solves `m · x = rhs` for each right-hand side column by fraction-free
/// elimination on an integer-scaled copy. `None` when `m` is singular.
fn solve_exact(m: &[Vec<BigRational>], rhs: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let k = rhs.first().map_or(0, Vec::len);
    // scale each row to integers
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let row: Vec<&BigRational> = m[i].iter().chain(&rhs[i]).collect();
        let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        a.push(row.iter().map(|x| x.numer() * (&l / x.denom())).collect());
    }
    let mut prev = BigInt::one();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, p);
        for i in col + 1..n {
            for j in col + 1..n + k {
                let v = (&a[i][j] * &a[col][col] - &a[i][col] * &a[col][j]) / &prev;
                a[i][j] = v;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[col][col].clone();
    }
    let mut out = vec![vec![BigRational::zero(); k]; n];
    for c in 0..k {
        for i in (0..n).rev() {
            let mut s = BigRational::from_integer(a[i][n + c].clone());
            for j in i + 1..n {
                s -= BigRational::from_integer(a[i][j].clone()) * &out[j][c];
            }
            out[i][c] = s / BigRational::from_integer(a[i][i].clone());
        }
    }
    Some(out)
}

fn vandermonde(xs: &[i64], degree: usize) -> Vec<Vec<BigRational>> {
    xs.iter().map(|&x| (0..=degree).map(|j| num_traits::pow(rat(x), j)).collect()).collect()
}

/// Exact interpolation per residue class; extra samples must agree.
pub fn fit_quasi_polynomial(
    samples: &BTreeMap<i64, BigRational>,
    period: usize,
    degree_bound: usize,
) -> Result<QuasiPolynomial> {
    if period == 0 {
        return Err(Error::Dimension("period must be positive".into()));
    }
    let mut components = Vec::with_capacity(period);
    for r in 0..period {
        let pts: Vec<(i64, &BigRational)> =
            samples.iter().filter(|(n, _)| n.rem_euclid(period as i64) as usize == r).map(|(n, v)| (*n, v)).collect();
        if pts.len() < degree_bound + 1 {
            return Err(Error::InsufficientSamples { residue: r, needed: degree_bound + 1, have: pts.len() });
        }
        let xs: Vec<i64> = pts[..=degree_bound].iter().map(|p| p.0).collect();
        let rhs: Vec<Vec<BigRational>> = pts[..=degree_bound].iter().map(|p| vec![p.1.clone()]).collect();
        let sol = solve_exact(&vandermonde(&xs, degree_bound), &rhs).expect("distinct nodes give an invertible system");
        let coeffs = trim(sol.into_iter().map(|mut c| c.remove(0)).collect());
        for (n, v) in &pts[degree_bound + 1..] {
            if &horner(&coeffs, &rat(*n)) != *v {
                return Err(Error::InconsistentSamples { period, degree: degree_bound, n: *n });
            }
        }
        components.push(coeffs);
    }
    QuasiPolynomial::new(components)
}

/// Smallest period in `1..=max_period` whose fit is confirmed by at least one
/// extra sample per residue class.
pub fn fit_quasi_polynomial_auto(
    samples: &BTreeMap<i64, BigRational>,
    degree_bound: usize,
    max_period: usize,
) -> Result<QuasiPolynomial> {
    for period in 1..=max_period {
        let enough = (0..period)
            .all(|r| samples.keys().filter(|n| n.rem_euclid(period as i64) as usize == r).count() >= degree_bound + 2);
        if !enough {
            break;
        }
        if let Ok(qp) = fit_quasi_polynomial(samples, period, degree_bound) {
            return Ok(qp);
        }
    }
    Err(Error::NoPeriod { max_period })
}

/// A quasi-polynomial in several variables, claimed to match its source for
/// `n_i >= threshold`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultivariateQuasiPolynomial {
    periods: Vec<usize>,
    threshold: i64,
    components: BTreeMap<Vec<usize>, Poly>,
}

impl MultivariateQuasiPolynomial {
    pub fn variable_count(&self) -> usize {
        self.periods.len()
    }

    pub fn periods(&self) -> &[usize] {
        &self.periods
    }

    pub fn threshold(&self) -> i64 {
        self.threshold
    }

    pub fn components(&self) -> &BTreeMap<Vec<usize>, Poly> {
        &self.components
    }

    pub fn component(&self, residues: &[usize]) -> Option<&Poly> {
        self.components.get(residues)
    }

    pub fn is_polynomial(&self) -> bool {
        self.periods.iter().all(|&p| p == 1)
    }

    pub fn residues_of(&self, n: &[i64]) -> Vec<usize> {
        n.iter().zip(&self.periods).map(|(x, p)| x.rem_euclid(*p as i64) as usize).collect()
    }

    pub fn eval(&self, n: &[i64]) -> BigRational {
        self.components[&self.residues_of(n)].eval_i64(n)
    }
}

impl Evaluate for MultivariateQuasiPolynomial {
    fn evaluate(&self, n: &[i64]) -> BigRational {
        self.eval(n)
    }
}

type Sampler<'a> = &'a dyn Fn(&[i64]) -> Result<BigRational>;

/// Embeds a polynomial in `r - 1` variables into `r` variables.
fn widen(p: &Poly) -> Poly {
    Poly::from_terms(
        p.nvars() + 1,
        p.terms().map(|(e, c)| {
            let mut e = e.clone();
            e.push(0);
            (e, c.clone())
        }),
    )
}

fn fit_rec(periods: &[usize], degrees: &[usize], threshold: i64, f: Sampler<'_>) -> Result<BTreeMap<Vec<usize>, Poly>> {
    let r = periods.len();
    if r == 0 {
        let mut m = BTreeMap::new();
        m.insert(Vec::new(), Poly::constant(0, f(&[])?));
        return Ok(m);
    }
    let (p, d) = (periods[r - 1] as i64, degrees[r - 1]);
    let mut out = BTreeMap::new();
    for s in 0..p {
        let first = threshold + (s - threshold).rem_euclid(p);
        let xs: Vec<i64> = (0..=d as i64).map(|t| first + p * t).collect();
        // α_j = Σ_t inv[j][t] · l(.., x_t): each coefficient is a linear
        // combination of the lower-dimensional fits
        let identity: Vec<Vec<BigRational>> = (0..=d)
            .map(|i| (0..=d).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        let inv = solve_exact(&vandermonde(&xs, d), &identity).expect("distinct nodes give an invertible system");
        let mut subs = Vec::with_capacity(xs.len());
        for &x in &xs {
            let g = move |n: &[i64]| {
                let mut full = n.to_vec();
                full.push(x);
                f(&full)
            };
            subs.push(fit_rec(&periods[..r - 1], &degrees[..r - 1], threshold, &g)?);
        }
        for key in subs[0].keys() {
            let mut comp = Poly::zero(r);
            for (j, row) in inv.iter().enumerate().take(d + 1) {
                let mut alpha = Poly::zero(r - 1);
                for (t, sub) in subs.iter().enumerate() {
                    alpha = &alpha + &sub[key].scale(&row[t]);
                }
                let power = Poly::var(r, r - 1).pow(j as u32);
                comp = &comp + &(&widen(&alpha) * &power);
            }
            let mut k = key.clone();
            k.push(s as usize);
            out.insert(k, comp);
        }
    }
    Ok(out)
}

/// Fits `sampler` by induction on the number of variables: fix all but the
/// last, interpolate in the last, then fit each coefficient recursively.
/// The result is checked on a held-out grid starting at `threshold`.
pub fn fit_multivariate_qp(
    sampler: Sampler<'_>,
    periods: &[usize],
    degree_bounds: &[usize],
    threshold: i64,
) -> Result<MultivariateQuasiPolynomial> {
    if periods.len() != degree_bounds.len() || periods.contains(&0) {
        return Err(Error::Dimension("periods and degree bounds must match and be positive".into()));
    }
    let components = fit_rec(periods, degree_bounds, threshold, sampler)?;
    let qp = MultivariateQuasiPolynomial { periods: periods.to_vec(), threshold, components };
    let spans: Vec<i64> = periods.iter().zip(degree_bounds).map(|(&p, &d)| (p * (d + 2)) as i64).collect();
    let grid = box_grid(threshold, &spans);
    if let Some(m) = validate_qp(&qp, sampler, &grid)?.into_iter().next() {
        return Err(Error::HeldOutMismatch {
            point: m.point,
            expected: m.expected.to_string(),
            fitted: m.fitted.to_string(),
        });
    }
    Ok(qp)
}

/// Doubling search `0, 1, 2, 4, ...` for the first threshold that validates.
pub fn discover_threshold(
    sampler: Sampler<'_>,
    periods: &[usize],
    degree_bounds: &[usize],
    cap: i64,
) -> Result<MultivariateQuasiPolynomial> {
    let mut n = 0;
    loop {
        match fit_multivariate_qp(sampler, periods, degree_bounds, n) {
            Ok(qp) => return Ok(qp),
            Err(e @ Error::HeldOutMismatch { .. }) if n >= cap => return Err(e),
            Err(Error::HeldOutMismatch { .. }) => n = if n == 0 { 1 } else { 2 * n },
            Err(e) => return Err(e),
        }
    }
}

/// All points of `[start, start + span_i]` in lexicographic order.
pub fn box_grid(start: i64, spans: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &s in spans {
        out = out
            .into_iter()
            .flat_map(|p| {
                (start..=start + s).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub point: Vec<i64>,
    pub expected: BigRational,
    pub fitted: BigRational,
}

/// Every grid point where `qp` and `sampler` disagree.
pub fn validate_qp<Q: Evaluate + ?Sized>(qp: &Q, sampler: Sampler<'_>, grid: &[Vec<i64>]) -> Result<Vec<Mismatch>> {
    let mut out = Vec::new();
    for p in grid {
        let expected = sampler(p)?;
        let fitted = qp.evaluate(p);
        if expected != fitted {
            out.push(Mismatch { point: p.clone(), expected, fitted });
        }
    }
    Ok(out)
}

/// Fits `n -> l(E + nD)` on a toric variety and enforces `1 <= degree <= dim`.
pub fn fit_toric_family(
    fan: &ValidatedFan,
    base: &TorusDivisor,
    direction: &TorusDivisor,
    max_period: usize,
) -> Result<QuasiPolynomial> {
    let dim = fan.dim;
    let top = (max_period * (dim + 2)) as i64;
    let mut samples = BTreeMap::new();
    for n in 0..=top {
        let d = base.add(&direction.scale(&BigInt::from(n)));
        samples.insert(n, rat(sections_dim(fan, &d)? as i64));
    }
    let qp = fit_quasi_polynomial_auto(&samples, dim, max_period)?;
    let deg = qp.degree();
    if deg < 1 || deg > dim {
        return Err(Error::Dimension(alloc::format!("fitted degree {deg} outside [1, {dim}]")));
    }
    Ok(qp)
}

/// Leading coefficients must be positive for a counting function.
pub fn leading_coefficients_positive(qp: &QuasiPolynomial) -> bool {
    qp.components().iter().all(|c| c.last().is_some_and(|x| x.is_positive()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_frac;
    use crate::toric::{product_of_lines, projective_plane, weighted_112};

    fn samples(vals: &[(i64, i64)]) -> BTreeMap<i64, BigRational> {
        vals.iter().map(|&(n, v)| (n, rat(v))).collect()
    }

    #[test]
    fn plane_simplex_counts() {
        let s = samples(&[(0, 1), (1, 3), (2, 6), (3, 10)]);
        let qp = fit_quasi_polynomial(&s, 1, 2).unwrap();
        assert_eq!(qp.components()[0], vec![rat(1), rat_frac(3, 2), rat_frac(1, 2)]);
    }

    #[test]
    fn constant_samples() {
        let s = samples(&[(0, 5), (1, 5), (2, 5)]);
        let qp = fit_quasi_polynomial(&s, 1, 2).unwrap();
        assert_eq!(qp.components()[0], vec![rat(5)]);
        assert_eq!(qp.degree(), 0);
    }

    #[test]
    fn weighted_plane_has_period_two() {
        // #{a + b + 2c = n}
        let count = |n: i64| (0..=n / 2).map(|c| n - 2 * c + 1).sum::<i64>();
        let s: BTreeMap<i64, BigRational> = (0..10).map(|n| (n, rat(count(n)))).collect();
        let qp = fit_quasi_polynomial_auto(&s, 2, 12).unwrap();
        assert_eq!(qp.period(), 2);
        // (n/2 + 1)^2 and (n+1)(n+3)/4
        assert_eq!(qp.components()[0], vec![rat(1), rat(1), rat_frac(1, 4)]);
        assert_eq!(qp.components()[1], vec![rat_frac(3, 4), rat(1), rat_frac(1, 4)]);
    }

    #[test]
    fn insufficient_and_inconsistent() {
        let s = samples(&[(0, 1), (1, 3)]);
        assert!(matches!(fit_quasi_polynomial(&s, 1, 2), Err(Error::InsufficientSamples { .. })));
        let s = samples(&[(0, 0), (1, 1), (2, 4), (3, 9), (4, 17)]);
        assert!(matches!(fit_quasi_polynomial(&s, 1, 2), Err(Error::InconsistentSamples { n: 4, .. })));
    }

    #[test]
    fn product_family_is_polynomial() {
        let q = product_of_lines().validate().unwrap();
        let sampler = |n: &[i64]| -> Result<BigRational> {
            let d = TorusDivisor::from_i64(&[1 + n[0], 0, 1 + n[1], 0]);
            Ok(rat(sections_dim(&q, &d)? as i64))
        };
        let qp = fit_multivariate_qp(&sampler, &[1, 1], &[2, 2], 0).unwrap();
        // (n1 + 2)(n2 + 2)
        let expected = Poly::from_int_terms(2, &[(&[1, 1], 1), (&[1, 0], 2), (&[0, 1], 2), (&[0, 0], 4)]);
        assert_eq!(qp.component(&[0, 0]).unwrap(), &expected);
    }

    #[test]
    fn single_variable_matches_univariate_fit() {
        let p2 = projective_plane().validate().unwrap();
        let sampler = |n: &[i64]| -> Result<BigRational> {
            Ok(rat(sections_dim(&p2, &TorusDivisor::from_i64(&[1 + n[0], 0, 0]))? as i64))
        };
        let multi = fit_multivariate_qp(&sampler, &[1], &[2], 0).unwrap();
        let s: BTreeMap<i64, BigRational> = (0..6).map(|n| (n, sampler(&[n]).unwrap())).collect();
        let uni = fit_quasi_polynomial(&s, 1, 2).unwrap();
        for n in 0..30 {
            assert_eq!(multi.eval(&[n]), uni.eval(n));
        }
        // (n + 2)(n + 3) / 2
        assert_eq!(uni.components()[0], vec![rat(3), rat_frac(5, 2), rat_frac(1, 2)]);
    }

    #[test]
    fn validation_reports_witness() {
        let s = samples(&[(0, 1), (1, 3), (2, 6), (3, 10)]);
        let good = fit_quasi_polynomial(&s, 1, 2).unwrap();
        let sampler = |n: &[i64]| -> Result<BigRational> { Ok(rat((n[0] + 1) * (n[0] + 2) / 2)) };
        let grid: Vec<Vec<i64>> = (0..=50).map(|n| vec![n]).collect();
        assert!(validate_qp(&good, &sampler, &grid).unwrap().is_empty());
        let mut comps = good.components().to_vec();
        comps[0][0] = rat(2);
        let bad = QuasiPolynomial::new(comps).unwrap();
        let report = validate_qp(&bad, &sampler, &grid).unwrap();
        assert_eq!(report[0].point, vec![0]);
        assert!(validate_qp(&good, &sampler, &[]).unwrap().is_empty());
    }

    #[test]
    fn toric_family_degree_range() {
        let w = weighted_112().validate().unwrap();
        let qp = fit_toric_family(&w, &TorusDivisor::zero(3), &TorusDivisor::from_i64(&[1, 0, 0]), 12).unwrap();
        assert_eq!(qp.period(), 2);
        assert_eq!(qp.degree(), 2);
        assert!(leading_coefficients_positive(&qp));
    }
}
