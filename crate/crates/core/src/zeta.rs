//! Zeta functions of divisors on toric varieties.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ehrhart::{fit_multivariate_qp, MultivariateQuasiPolynomial};
use crate::error::{Error, Result};
use crate::lattice::{smith_normal_form, ClassCoords, IntMatrix};
use crate::mero::{check_increasing, evaluate_meromorphic, reduce_to_mero_parts, MeromorphicPart};
use crate::padic::{ord_p, pow_p, prime_power_exponent, PadicScalar};
use crate::poly::Poly;
use crate::toric::{
    effective_generators, enumerate_generated, irreducible_generators, sections_dim, EffectiveClass, ToricVarietyModel,
    TorusDivisor,
};

/// `M_0, .., M_dmax` with `M_d` the number of effective divisors of degree `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaTruncation {
    pub q: u64,
    pub coefficients: Vec<BigInt>,
}

impl ZetaTruncation {
    pub fn dmax(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `(d, M_d, ord_p M_d)` rows.
    pub fn rows(&self, p: u64) -> Vec<(usize, BigInt, Option<u64>)> {
        self.coefficients.iter().enumerate().map(|(d, m)| (d, m.clone(), ord_p(m, p))).collect()
    }
}

/// Smallest prime factor of `q` if `q` is a prime power.
pub fn prime_of(q: u64) -> Result<u64> {
    let p = (2..=q).find(|&d| q.is_multiple_of(d)).ok_or(Error::InvalidPrime(q))?;
    prime_power_exponent(q, p)?;
    Ok(p)
}

/// `(q^l - 1) / (q - 1)`: the effective divisors in a linear system with
/// `l` independent sections.
fn divisor_count(q: u64, l: u64) -> BigInt {
    (pow_p(q, l) - 1u32) / BigInt::from(q - 1)
}

fn classes(model: &ToricVarietyModel, dmax: u64) -> Result<Vec<Vec<EffectiveClass>>> {
    let gens = effective_generators(model)?;
    Ok(enumerate_generated(model, &gens, dmax))
}

pub fn zeta_coefficients(model: &ToricVarietyModel, q: u64, dmax: u64) -> Result<ZetaTruncation> {
    prime_of(q)?;
    let mut coefficients = Vec::with_capacity(dmax as usize + 1);
    for level in classes(model, dmax)? {
        let mut m = BigInt::zero();
        for c in &level {
            m += divisor_count(q, sections_dim(&model.fan, &c.representative)?);
        }
        coefficients.push(m);
    }
    Ok(ZetaTruncation { q, coefficients })
}

/// `Σ_d #{classes of degree d} T^d = numerator / Π_i (1 - T^(d_i))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassCountSeries {
    pub numerator: Vec<BigInt>,
    pub generator_degrees: Vec<u64>,
}

fn mul_one_minus(s: &mut [BigInt], d: usize) {
    for i in (d..s.len()).rev() {
        let prev = s[i - d].clone();
        s[i] -= prev;
    }
}

/// `(1 - T)^j` times a series, truncated to its length.
pub fn difference_power(s: &[BigInt], j: usize) -> Vec<BigInt> {
    let mut out = s.to_vec();
    for _ in 0..j {
        mul_one_minus(&mut out, 1);
    }
    out
}

impl ClassCountSeries {
    /// Coefficients through `T^dmax`.
    pub fn expand(&self, dmax: usize) -> Vec<BigInt> {
        let mut s = alloc::vec![BigInt::zero(); dmax + 1];
        for (i, c) in self.numerator.iter().enumerate().take(dmax + 1) {
            s[i] = c.clone();
        }
        for &d in &self.generator_degrees {
            let d = d as usize;
            for i in d..=dmax {
                let prev = s[i - d].clone();
                s[i] += prev;
            }
        }
        s
    }

    /// `lim_{T -> 1} (1 - T)^order · series`, by exact division of the
    /// numerator by `(1 - T)^(generators - order)`.
    pub fn leading_coefficient_at_one(&self, order: usize) -> Result<BigRational> {
        let r = self.generator_degrees.len();
        if order > r {
            return Err(Error::Pole(alloc::format!("order {order} exceeds the {r} denominator factors")));
        }
        let mut num = self.numerator.clone();
        for _ in 0..(r - order) {
            // synthetic division by (1 - T) = -(T - 1)
            let mut quotient = alloc::vec![BigInt::zero(); num.len().saturating_sub(1)];
            let mut carry = BigInt::zero();
            for i in (1..num.len()).rev() {
                carry += &num[i];
                quotient[i - 1] = -carry.clone();
            }
            if !(carry + &num[0]).is_zero() {
                return Err(Error::Pole(alloc::format!("class series has a pole of order below {r} at T = 1")));
            }
            num = quotient;
        }
        let value: BigInt = num.iter().sum();
        let scale: u64 = self.generator_degrees.iter().product();
        Ok(BigRational::new(value, BigInt::from(scale)))
    }
}

pub fn class_count_series(model: &ToricVarietyModel, dmax: u64) -> Result<ClassCountSeries> {
    let gens = irreducible_generators(model)?;
    let counts: Vec<BigInt> = classes(model, dmax)?.iter().map(|l| BigInt::from(l.len())).collect();
    let mut numerator = counts;
    let degrees: Vec<u64> = gens.iter().map(|g| g.degree).collect();
    for &d in &degrees {
        mul_one_minus(&mut numerator, d as usize);
    }
    // the numerator must vanish on a window as long as Σ d_i
    let window: u64 = degrees.iter().sum();
    let last = numerator.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    if (last as u64) + window > dmax {
        return Err(Error::NumeratorNotTerminated { dmax: dmax as usize });
    }
    numerator.truncate(last + 1);
    Ok(ClassCountSeries { numerator, generator_degrees: degrees })
}

/// `Σ_{m >= 0} q^f(m) T^(base_degree + generator_degrees·m)`: the sub-sum of
/// `Σ_E q^l(E) T^deg(E)` over `E = base + Σ m_i·generators_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZESeriesTerm {
    pub base: ClassCoords,
    pub base_degree: u64,
    pub generators: Vec<ClassCoords>,
    pub generator_degrees: Vec<u64>,
    pub exponent: Poly,
    pub part: MeromorphicPart,
}

impl ZESeriesTerm {
    pub fn expand(&self, dmax: u64) -> Vec<BigInt> {
        let mut out = alloc::vec![BigInt::zero(); dmax as usize + 1];
        if self.base_degree <= dmax {
            for (i, c) in self.part.expand(dmax - self.base_degree).into_iter().enumerate() {
                out[i + self.base_degree as usize] = c;
            }
        }
        out
    }
}

/// `Z = (Σ_terms Z_E - class series) / (q - 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WanDecomposition {
    pub q: u64,
    pub p: u64,
    pub generators: Vec<EffectiveClass>,
    pub exponent: MultivariateQuasiPolynomial,
    pub terms: Vec<ZESeriesTerm>,
    pub class_series: ClassCountSeries,
}

impl WanDecomposition {
    /// `Σ_E q^l(E) T^deg(E)` through `T^dmax`.
    pub fn power_sum(&self, dmax: u64) -> Vec<BigInt> {
        let mut out = alloc::vec![BigInt::zero(); dmax as usize + 1];
        for t in &self.terms {
            for (o, c) in out.iter_mut().zip(t.expand(dmax)) {
                *o += c;
            }
        }
        out
    }

    /// Zeta coefficients reassembled from the decomposition.
    pub fn zeta(&self, dmax: u64) -> Result<Vec<BigInt>> {
        let classes = self.class_series.expand(dmax as usize);
        let q1 = BigInt::from(self.q - 1);
        self.power_sum(dmax)
            .into_iter()
            .zip(classes)
            .enumerate()
            .map(|(d, (s, c))| {
                let diff = s - c;
                if !(&diff % &q1).is_zero() {
                    return Err(Error::Precision(alloc::format!("coefficient {d} is not divisible by q - 1")));
                }
                Ok(diff / &q1)
            })
            .collect()
    }

    /// `Σ_E q^l(E)` certified modulo `p^n`.
    pub fn power_sum_at_one(&self, n: i64) -> Result<PadicScalar> {
        let one = BigRational::one();
        let mut acc = PadicScalar::zero(self.p, n);
        for t in &self.terms {
            acc = acc.add(&evaluate_meromorphic(&t.part, &one, n)?)?;
        }
        Ok(acc)
    }
}

fn linearly_independent(gens: &[EffectiveClass], rank: usize) -> Result<bool> {
    if gens.len() > rank {
        return Ok(false);
    }
    let rows: Vec<Vec<BigInt>> = gens.iter().map(|g| g.coords.free.clone()).collect();
    let data: Vec<BigInt> = rows.into_iter().flatten().collect();
    let m = IntMatrix::new(gens.len(), rank, data)?;
    Ok(smith_normal_form(&m).rank() == gens.len())
}

/// Splits the power sum over the effective monoid into `Z_E` series with
/// polynomial exponents.
///
/// The irreducible generators must be linearly independent, so the monoid is
/// free on them; the exponent `l(Σ n_i g_i)` is fitted as a quasi-polynomial
/// and each residue class modulo its period becomes one term.
pub fn wan_decomposition(
    model: &ToricVarietyModel,
    q: u64,
    p: u64,
    dmax: u64,
    max_period: usize,
) -> Result<WanDecomposition> {
    prime_power_exponent(q, p)?;
    let gens = irreducible_generators(model)?;
    if !linearly_independent(&gens, model.class_group.rank)? {
        return Err(Error::NonSimplicialMonoid(alloc::format!(
            "{} irreducible generators in rank {}",
            gens.len(),
            model.class_group.rank
        )));
    }
    let r = gens.len();
    let dim = model.fan.dim;
    let sampler = |n: &[i64]| -> Result<BigRational> {
        let mut d = TorusDivisor::zero(model.ray_count());
        for (g, &k) in gens.iter().zip(n) {
            d = d.add(&g.representative.scale(&BigInt::from(k)));
        }
        Ok(BigRational::from_integer(BigInt::from(sections_dim(&model.fan, &d)?)))
    };
    let mut fitted = None;
    for period in 1..=max_period {
        match fit_multivariate_qp(&sampler, &alloc::vec![period; r], &alloc::vec![dim; r], 0) {
            Ok(qp) => {
                fitted = Some(qp);
                break;
            }
            Err(Error::HeldOutMismatch { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    // l is piecewise across chambers when some generator is a fixed
    // component of large multiples (the negative section of F_a)
    let exponent = fitted.ok_or_else(|| {
        Error::UnsupportedShape(alloc::format!(
            "l(Σ n_i g_i) is not one quasi-polynomial of period <= {max_period} on the whole monoid"
        ))
    })?;
    let periods = exponent.periods().to_vec();
    let mut terms = Vec::new();
    let mut residues: Vec<Vec<usize>> = alloc::vec![Vec::new()];
    for &pi in &periods {
        residues =
            residues.into_iter().flat_map(|s| (0..pi).map(move |x| [s.clone(), alloc::vec![x]].concat())).collect();
    }
    for s in residues {
        let comp = exponent.component(&s).expect("every residue has a component");
        // n_i = P_i m_i + s_i
        let images: Vec<Poly> = (0..r)
            .map(|i| {
                &Poly::var(r, i).scale(&BigRational::from_integer(BigInt::from(periods[i])))
                    + &Poly::constant(r, BigRational::from_integer(BigInt::from(s[i])))
            })
            .collect();
        let f = comp.compose(&images, r);
        let degrees: Vec<u64> = gens.iter().zip(&periods).map(|(g, &pi)| g.degree * pi as u64).collect();
        let part = reduce_to_mero_parts(&check_increasing(&f, r, 8)?, &degrees, q, p)?;
        let mut base = ClassCoords::zero(model.class_group.rank, model.class_group.invariant_factors.len());
        for (g, &k) in gens.iter().zip(&s) {
            for _ in 0..k {
                base = model.class_group.add(&base, &g.coords);
            }
        }
        let generators = gens
            .iter()
            .zip(&periods)
            .map(|(g, &pi)| {
                (0..pi).fold(
                    ClassCoords::zero(model.class_group.rank, model.class_group.invariant_factors.len()),
                    |c, _| model.class_group.add(&c, &g.coords),
                )
            })
            .collect();
        let base_degree = gens.iter().zip(&s).map(|(g, &k)| g.degree * k as u64).sum();
        terms.push(ZESeriesTerm { base, base_degree, generators, generator_degrees: degrees, exponent: f, part });
    }
    let class_series = class_count_series(model, dmax)?;
    Ok(WanDecomposition { q, p, generators: gens, exponent, terms, class_series })
}

/// Pole order at `T = 1` and the leading coefficient there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleReport {
    pub order: usize,
    /// `lim (1 - T)^order Z` exactly.
    pub special_value: BigRational,
    pub special_value_residue: BigInt,
    pub precision: i64,
    /// Indices `d_0 + 1 ..= dmax` on which the dichotomy was observed.
    pub window: (usize, usize),
    pub d0: usize,
    /// `(d, ord_p of (1-T)^order Z, ord_p of (1-T)^(order-1) Z)`.
    pub profile: Vec<(usize, Option<u64>, Option<u64>)>,
    /// `Σ_E q^l(E)` modulo `p^precision`; its product with `(1 - T)^order`
    /// vanishes at `T = 1`.
    pub power_sum_at_one: Option<BigInt>,
}

fn vanishes_beyond(s: &[BigInt], p: u64, n: i64) -> usize {
    s.iter().rposition(|c| ord_p(c, p).is_some_and(|v| (v as i64) < n)).map_or(0, |i| i + 1)
}

pub fn pole_analysis(model: &ToricVarietyModel, q: u64, p: u64, dmax: u64, n: i64) -> Result<PoleReport> {
    prime_power_exponent(q, p)?;
    if n < 1 {
        return Err(Error::Precision(alloc::format!("precision {n} must be positive")));
    }
    let z = zeta_coefficients(model, q, dmax)?.coefficients;
    let dm = dmax as usize;
    let mut found = None;
    for j in 1..=model.class_group.rank + model.ray_count() {
        let hi = difference_power(&z, j);
        // first index past which every coefficient has valuation >= n
        let start = vanishes_beyond(&hi, p, n);
        if start > dm {
            continue;
        }
        let lo = difference_power(&z, j - 1);
        if (start..=dm).any(|d| ord_p(&lo[d], p) == Some(0)) {
            found = Some((j, start, hi, lo));
            break;
        }
    }
    let Some((order, start, hi, lo)) = found else {
        return Err(Error::DmaxInsufficient {
            dmax: dm,
            reason: alloc::format!("no power of (1 - T) reached valuation {n} on a tail window"),
        });
    };
    let d0 = start.saturating_sub(1);
    let class_series = class_count_series(model, dmax)?;
    let lead = class_series.leading_coefficient_at_one(order)?;
    let special_value = -lead / BigRational::from_integer(BigInt::from(q - 1));
    let residue = PadicScalar::from_rational(p, &special_value, n)
        .residue()
        .ok_or_else(|| Error::Precision("special value is not p-integral".into()))?;
    let power_sum_at_one = match wan_decomposition(model, q, p, dmax, 4) {
        Ok(w) => Some(w.power_sum_at_one(n)?.residue().expect("integral")),
        Err(e) => {
            log::warn!("power sum at T = 1 not certified: {e}");
            None
        }
    };
    let profile = (0..=dm).map(|d| (d, ord_p(&hi[d], p), ord_p(&lo[d], p))).collect();
    Ok(PoleReport {
        order,
        special_value,
        special_value_residue: residue,
        precision: n,
        window: (start, dm),
        d0,
        profile,
        power_sum_at_one,
    })
}

/// Number of classes per degree, for reports.
pub fn class_counts(model: &ToricVarietyModel, dmax: u64) -> Result<BTreeMap<u64, usize>> {
    Ok(classes(model, dmax)?.iter().enumerate().map(|(d, l)| (d as u64, l.len())).collect())
}
