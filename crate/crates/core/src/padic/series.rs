use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use super::scalar::{ceil_i64, ord_p, PadicScalar};
use crate::error::{Error, Result};

/// A series coefficient: an exact integer or a p-adic approximation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesCoeff {
    Exact(BigInt),
    Approx(PadicScalar),
}

impl SeriesCoeff {
    /// Certified valuation (`None` for zero / zero to precision).
    pub fn valuation(&self, p: u64) -> Option<i64> {
        match self {
            Self::Exact(x) => ord_p(x, p).map(|v| v as i64),
            Self::Approx(s) => s.valuation(),
        }
    }

    /// Largest valuation the coefficient could have; `None` if unbounded.
    fn valuation_ceiling(&self, p: u64) -> Option<i64> {
        match self {
            Self::Exact(x) => ord_p(x, p).map(|v| v as i64),
            Self::Approx(s) => s.valuation(),
        }
    }

    pub fn to_scalar(&self, p: u64, prec: i64) -> PadicScalar {
        match self {
            Self::Exact(x) => PadicScalar::from_integer(p, x, prec),
            Self::Approx(s) => s.clone(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Exact(_))
    }
}

/// `ord_p(c_r) >= c·r² + d` for every `r`, including the untruncated tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticBound {
    pub c: BigRational,
    pub d: BigRational,
}

impl QuadraticBound {
    pub fn new(c: BigRational, d: BigRational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::NonPositiveBound);
        }
        Ok(Self { c, d })
    }

    pub fn at(&self, r: usize) -> BigRational {
        let r = BigRational::from_integer(BigInt::from(r));
        &self.c * &r * &r + &self.d
    }

    /// Bound for a product: `min_{i+j=r} (c1 i² + c2 j²) >= c1 c2 / (c1 + c2) · r²`.
    pub fn product(&self, other: &Self) -> Self {
        let c = &self.c * &other.c / (&self.c + &other.c);
        Self { c, d: &self.d + &other.d }
    }
}

/// Truncated power series over `Z_p` with an optional quadratic
/// Newton-polygon bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedSeries {
    p: u64,
    coeffs: Vec<SeriesCoeff>,
    bound: Option<QuadraticBound>,
    // every coefficient past the stored ones is zero
    finite: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundCheck {
    Pass,
    Fail { index: usize, valuation: i64, required: BigRational },
}

impl BoundCheck {
    pub fn passed(&self) -> bool {
        matches!(self, Self::Pass)
    }
}

impl CertifiedSeries {
    pub fn exact(p: u64, coeffs: Vec<BigInt>) -> Self {
        Self { p, coeffs: coeffs.into_iter().map(SeriesCoeff::Exact).collect(), bound: None, finite: false }
    }

    /// A polynomial: the stored coefficients are the whole series.
    pub fn polynomial(p: u64, coeffs: Vec<BigInt>) -> Self {
        Self { finite: true, ..Self::exact(p, coeffs) }
    }

    pub fn approx(p: u64, coeffs: Vec<PadicScalar>) -> Self {
        Self { p, coeffs: coeffs.into_iter().map(SeriesCoeff::Approx).collect(), bound: None, finite: false }
    }

    /// Attaches a bound after checking it on every stored coefficient.
    pub fn with_bound(mut self, bound: QuadraticBound) -> Result<Self> {
        if let BoundCheck::Fail { index, valuation, required } = check_quadratic_bound(&self, &bound.c, &bound.d)? {
            return Err(Error::Precision(alloc::format!(
                "coefficient {index} has valuation {valuation} below the bound {required}"
            )));
        }
        self.bound = Some(bound);
        Ok(self)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[SeriesCoeff] {
        &self.coeffs
    }

    pub fn bound(&self) -> Option<&QuadraticBound> {
        self.bound.as_ref()
    }

    pub fn is_polynomial(&self) -> bool {
        self.finite
    }

    /// Index of the last stored coefficient.
    pub fn truncation(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Rows `(r, coefficient, valuation)`; the valuation is `inf` for zero.
    pub fn rows(&self) -> Vec<(usize, String, String)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(r, c)| {
                let (coef, val) = match c {
                    SeriesCoeff::Exact(x) => (x.to_string(), ord_p(x, self.p).map_or("inf".into(), |v| v.to_string())),
                    SeriesCoeff::Approx(s) => (
                        s.residue().map_or_else(|| s.to_string(), |x| x.to_string()),
                        s.valuation().map_or_else(|| alloc::format!(">={}", s.precision()), |v| v.to_string()),
                    ),
                };
                (r, coef, val)
            })
            .collect()
    }

    /// Product of exact series truncated to the shorter length, carrying the
    /// combined bound when both factors have one.
    pub fn mul_truncated(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::Precision("series over different primes".into()));
        }
        let n = self.coeffs.len().min(other.coeffs.len());
        let exact = |s: &Self| -> Result<Vec<BigInt>> {
            s.coeffs
                .iter()
                .map(|c| match c {
                    SeriesCoeff::Exact(x) => Ok(x.clone()),
                    SeriesCoeff::Approx(_) => Err(Error::Precision("product needs exact coefficients".into())),
                })
                .collect()
        };
        let (a, b) = (exact(self)?, exact(other)?);
        let out: Vec<BigInt> = (0..n).map(|r| (0..=r).map(|i| &a[i] * &b[r - i]).sum()).collect();
        let mut s = Self::exact(self.p, out);
        s.finite = self.finite && other.finite && n >= self.coeffs.len() + other.coeffs.len() - 1;
        if let (Some(x), Some(y)) = (&self.bound, &other.bound) {
            s = s.with_bound(x.product(y))?;
        }
        Ok(s)
    }
}

/// Lower convex hull of `(r, ord_p c_r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, i64)>,
}

impl NewtonPolygon {
    pub fn slopes(&self) -> Vec<BigRational> {
        self.vertices
            .windows(2)
            .map(|w| BigRational::new(BigInt::from(w[1].1 - w[0].1), BigInt::from((w[1].0 - w[0].0) as i64)))
            .collect()
    }

    /// Height of the hull above `x` (linear interpolation between vertices).
    pub fn height_at(&self, x: usize) -> Option<BigRational> {
        let w = self.vertices.windows(2).find(|w| w[0].0 <= x && x <= w[1].0);
        match w {
            Some(w) => {
                let (x0, y0) = (w[0].0 as i64, w[0].1);
                let (x1, y1) = (w[1].0 as i64, w[1].1);
                Some(
                    BigRational::from_integer(BigInt::from(y0))
                        + BigRational::new(BigInt::from((y1 - y0) * (x as i64 - x0)), BigInt::from(x1 - x0)),
                )
            }
            None if self.vertices.len() == 1 && self.vertices[0].0 == x => {
                Some(BigRational::from_integer(BigInt::from(self.vertices[0].1)))
            }
            None => None,
        }
    }
}

/// Newton polygon of the stored coefficients with certified valuations.
pub fn newton_polygon(s: &CertifiedSeries) -> Result<NewtonPolygon> {
    let pts: Vec<(usize, i64)> =
        s.coeffs.iter().enumerate().filter_map(|(r, c)| c.valuation(s.p).map(|v| (r, v))).collect();
    if pts.is_empty() {
        return Err(Error::ZeroSeries);
    }
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b unless it lies strictly below segment a-pt
            let cross = (b.0 as i64 - a.0 as i64) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 as i64 - a.0 as i64);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    Ok(NewtonPolygon { vertices: hull })
}

/// Checks `ord_p(c_r) >= c r² + d` on every stored coefficient. Coefficients
/// that are zero to their working precision cannot violate it.
pub fn check_quadratic_bound(s: &CertifiedSeries, c: &BigRational, d: &BigRational) -> Result<BoundCheck> {
    let bound = QuadraticBound::new(c.clone(), d.clone())?;
    for (r, coef) in s.coeffs.iter().enumerate() {
        if let Some(v) = coef.valuation_ceiling(s.p) {
            let required = bound.at(r);
            if BigRational::from_integer(BigInt::from(v)) < required {
                return Ok(BoundCheck::Fail { index: r, valuation: v, required });
            }
        }
    }
    Ok(BoundCheck::Pass)
}

/// Smallest `R` with `c r² + d + r·ord_t >= target` for every `r > R`.
pub fn certified_cutoff(bound: &QuadraticBound, ord_t: i64, target: i64) -> usize {
    let g = |r: i64| {
        let r = BigRational::from_integer(BigInt::from(r));
        &bound.c * &r * &r + &bound.d + BigRational::from_integer(BigInt::from(ord_t)) * &r
            - BigRational::from_integer(BigInt::from(target))
    };
    // g is increasing past the vertex -ord_t / 2c
    let vertex = ceil_i64(
        &(BigRational::from_integer(BigInt::from(-ord_t)) / (BigRational::from_integer(BigInt::from(2)) * &bound.c)),
    )
    .max(0);
    let mut r = vertex;
    while g(r).is_negative() {
        r += 1;
    }
    // r is the first index at or past the vertex where g >= 0
    let mut last_bad: i64 = -1;
    for k in 1..r {
        if g(k).is_negative() {
            last_bad = k;
        }
    }
    last_bad.max(0) as usize
}

/// `Σ c_r t^r` modulo `p^target`, summing through the certified cutoff.
pub fn eval_entire(s: &CertifiedSeries, t: &PadicScalar, target: i64) -> Result<PadicScalar> {
    let bound = s.bound.as_ref().ok_or(Error::MissingBound)?;
    if t.prime() != s.p {
        return Err(Error::Precision("evaluation point over a different prime".into()));
    }
    let ord_t = t.valuation_floor();
    let mut cutoff = certified_cutoff(bound, ord_t, target);
    if s.finite {
        cutoff = cutoff.min(s.truncation());
    }
    if s.truncation() < cutoff {
        return Err(Error::InsufficientTruncation { have: s.truncation(), needed: cutoff });
    }
    let working = target + (-ord_t).max(0) * cutoff as i64;
    let mut acc = PadicScalar::zero(s.p, working);
    let mut power = PadicScalar::from_i64(s.p, 1, working);
    for r in 0..=cutoff {
        let term = s.coeffs[r].to_scalar(s.p, working).mul(&power)?;
        acc = acc.add(&term)?;
        power = power.mul(t)?;
    }
    if acc.precision() < target {
        return Err(Error::Precision(alloc::format!(
            "evaluation reached precision {} below the target {target}",
            acc.precision()
        )));
    }
    Ok(acc.with_precision(target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::scalar::pow_p;
    use crate::poly::{rat, rat_frac};
    use num_traits::Zero;

    fn theta_like(p: u64, n: usize) -> CertifiedSeries {
        // Σ p^{x²} T^x
        CertifiedSeries::exact(p, (0..n).map(|x| pow_p(p, (x * x) as u64)).collect())
    }

    /// Π_{k>=0} (1 - p^k T), truncated in T; coefficient r is
    /// (-1)^r p^{r(r-1)/2} / Π_{i<=r}(1 - p^i), so exact integers only
    /// through finitely many factors. This builds the finite product.
    fn finite_product(p: u64, factors: usize, len: usize) -> CertifiedSeries {
        let mut c = alloc::vec![BigInt::zero(); len];
        c[0] = BigInt::from(1);
        for k in 0..factors {
            let q = pow_p(p, k as u64);
            for r in (1..len).rev() {
                let prev = c[r - 1].clone();
                c[r] -= &q * prev;
            }
        }
        CertifiedSeries::exact(p, c)
    }

    #[test]
    fn polygon_of_linear() {
        let s = CertifiedSeries::exact(3, alloc::vec![BigInt::from(1), BigInt::from(-3)]);
        assert_eq!(newton_polygon(&s).unwrap().vertices, alloc::vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn three_factor_product() {
        let s = finite_product(2, 3, 4);
        // T^2 coefficient: 1*2 + 1*4 + 2*4 = 14, valuation 1
        assert_eq!(s.coeffs()[2], SeriesCoeff::Exact(BigInt::from(14)));
        let np = newton_polygon(&s).unwrap();
        assert_eq!(np.height_at(2), Some(rat(1)));
        assert!(np.vertices.contains(&(2, 1)));
    }

    #[test]
    fn triangular_valuations() {
        let s = CertifiedSeries::exact(2, (0..7).map(|r| pow_p(2, r * (r.max(1) - 1) / 2)).collect());
        let np = newton_polygon(&s).unwrap();
        assert_eq!(np.slopes(), (0..6).map(rat).collect::<Vec<_>>());
    }

    #[test]
    fn quadratic_bound_checks() {
        let s = finite_product(2, 7, 7);
        // ord c_r = r(r-1)/2 >= r²/4 - 1/4
        assert!(check_quadratic_bound(&s, &rat_frac(1, 4), &rat_frac(-1, 4)).unwrap().passed());
        assert!(!check_quadratic_bound(&s, &rat_frac(1, 4), &rat(0)).unwrap().passed());
        assert_eq!(
            check_quadratic_bound(&s, &rat(1), &rat(0)).unwrap(),
            BoundCheck::Fail { index: 1, valuation: 0, required: rat(1) }
        );
        assert_eq!(check_quadratic_bound(&s, &rat(0), &rat(0)), Err(Error::NonPositiveBound));
    }

    #[test]
    fn evaluation_inside_and_outside_disk() {
        let s = theta_like(2, 8).with_bound(QuadraticBound::new(rat(1), rat(0)).unwrap()).unwrap();
        let one = PadicScalar::from_i64(2, 1, 20);
        assert_eq!(eval_entire(&s, &one, 4).unwrap().residue(), Some(BigInt::from(3)));
        let half = PadicScalar::from_rational(2, &rat_frac(1, 2), 20);
        assert_eq!(eval_entire(&s, &half, 3).unwrap().residue(), Some(BigInt::from(6)));
        let c = CertifiedSeries::polynomial(2, alloc::vec![BigInt::from(1)])
            .with_bound(QuadraticBound::new(rat(1), rat(0)).unwrap())
            .unwrap();
        assert_eq!(eval_entire(&c, &half, 5).unwrap().residue(), Some(BigInt::from(1)));
    }

    #[test]
    fn evaluation_errors() {
        let s = theta_like(2, 2);
        let one = PadicScalar::from_i64(2, 1, 20);
        assert_eq!(eval_entire(&s, &one, 4), Err(Error::MissingBound));
        let s = s.with_bound(QuadraticBound::new(rat(1), rat(0)).unwrap()).unwrap();
        assert!(matches!(eval_entire(&s, &one, 30), Err(Error::InsufficientTruncation { .. })));
    }

    #[test]
    fn cutoff_is_minimal() {
        let b = QuadraticBound::new(rat(1), rat(0)).unwrap();
        assert_eq!(certified_cutoff(&b, 0, 4), 1);
        assert_eq!(certified_cutoff(&b, -1, 3), 2);
    }
}
