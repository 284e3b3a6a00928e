use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::cone::{cone_decomposition, parameter_box, triangular_substitute};
use super::increasing::IncreasingPolynomial;
use crate::error::{Error, Result};
use crate::padic::{pow_p, prime_power_exponent, QuadraticBound};
use crate::poly::{rat, Poly};

/// `1 / (1 - q^q_exp T^t_exp)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Atom {
    pub q_exp: u64,
    pub t_exp: u64,
}

/// `1 - q^v(k) T^t_exp` under the sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Denominator {
    pub v: Poly,
    pub t_exp: u64,
}

/// `Σ_{k >= 0} q^u(k) T^(w·k) / (1 - q^v(k) T^e)` with every variable of
/// degree at least 2 in `u` and positive leading coefficients along each
/// axis. Clearing the denominators over the distinct values of `v` writes it
/// as a quotient of two entire series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntireCore {
    pub u: Poly,
    pub weights: Vec<u64>,
    pub denominator: Option<Denominator>,
    /// `u(k) >= a·max_i k_i² + b` on the orthant.
    pub minorant: (BigRational, BigRational),
    pub numerator_bound: QuadraticBound,
    pub denominator_bound: Option<QuadraticBound>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MeroBody {
    /// `q^c`
    Monomial(u64),
    Entire(Box<EntireCore>),
}

/// `coefficient · T^shift · Π atoms · body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeroTerm {
    pub coefficient: BigInt,
    pub atoms: Vec<Atom>,
    pub shift: u64,
    pub body: MeroBody,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeromorphicPart {
    pub q: u64,
    pub p: u64,
    /// `ord_p(q)`
    pub eq: u64,
    pub terms: Vec<MeroTerm>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReduceOptions {
    pub threshold_cap: u64,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self { threshold_cap: 1 << 12 }
    }
}

#[derive(Clone, Debug)]
struct Node {
    coefficient: BigInt,
    atoms: Vec<Atom>,
    shift: u64,
    u: Poly,
    w: Vec<u64>,
    denom: Option<Denominator>,
}

impl Node {
    fn in_v(&self, j: usize) -> bool {
        self.denom.as_ref().is_some_and(|d| d.v.depends_on(j))
    }

    fn fix(&self, j: usize, c: u64) -> Node {
        let big = BigInt::from(c);
        let mut w = self.w.clone();
        let wj = w.remove(j);
        Node {
            coefficient: self.coefficient.clone(),
            atoms: self.atoms.clone(),
            shift: self.shift + wj * c,
            u: self.u.fix(j, &big),
            w,
            denom: self.denom.as_ref().map(|d| Denominator { v: d.v.fix(j, &big), t_exp: d.t_exp }),
        }
    }

    fn shift_var(&self, j: usize, t: u64) -> Node {
        let big = BigInt::from(t);
        Node {
            coefficient: self.coefficient.clone(),
            atoms: self.atoms.clone(),
            shift: self.shift + self.w[j] * t,
            u: self.u.shift(j, &big),
            w: self.w.clone(),
            denom: self.denom.as_ref().map(|d| Denominator { v: d.v.shift(j, &big), t_exp: d.t_exp }),
        }
    }
}

fn exponent(c: &BigRational) -> Result<u64> {
    if !c.is_integer() {
        return Err(Error::NotIntegerValued { point: Vec::new() });
    }
    if c.is_negative() {
        return Err(Error::NegativeExponent { value: c.to_string() });
    }
    c.to_integer().to_u64().ok_or_else(|| Error::UnsupportedShape(alloc::format!("exponent {c} too large")))
}

fn certified_positive(p: &Poly) -> bool {
    p.all_coeffs_nonneg() && p.constant_term().is_positive()
}

/// `u(x e_j)` as a polynomial in one variable.
pub(crate) fn axis(u: &Poly, j: usize) -> Poly {
    let images: Vec<Poly> = (0..u.nvars()).map(|i| if i == j { Poly::var(1, 0) } else { Poly::zero(1) }).collect();
    u.compose(&images, 1)
}

/// `(a, b)` with `h(x) >= a x² + b` for all integers `x >= 0`, for `h` of
/// degree at least 2 with positive leading coefficient.
fn quadratic_minorant(h: &Poly, var: usize) -> Result<(BigRational, BigRational)> {
    let deg = h.degree_in(0);
    let lead = h.coeff_in(0, deg).constant_term();
    let a = if deg == 2 { lead / rat(2) } else { lead };
    let phi = h - &Poly::from_terms(1, [(alloc::vec![2], a.clone())]);
    let diff = phi.forward_difference(0);
    let cap: u64 = 1 << 20;
    let mut x = 0u64;
    // past x, phi has nondecreasing values
    while !diff.shift(0, &BigInt::from(x)).all_coeffs_nonneg() {
        x = if x == 0 { 1 } else { x * 2 };
        if x > cap {
            return Err(Error::ThresholdSearch { var, cap, poly: phi.display_with("k") });
        }
    }
    let b = (0..=x as i64).map(|t| phi.eval_i64(&[t])).min().expect("nonempty range");
    Ok((a, b))
}

fn core_bounds(
    u: &Poly,
    w: &[u64],
    denom: Option<&Denominator>,
    eq: u64,
) -> Result<((BigRational, BigRational), QuadraticBound, Option<QuadraticBound>)> {
    let m = u.nvars();
    let mut a: Option<BigRational> = None;
    let mut b: Option<BigRational> = None;
    for j in 0..m {
        let (aj, bj) = quadratic_minorant(&axis(u, j), j + 1)?;
        a = Some(a.map_or(aj.clone(), |x| x.min(aj)));
        b = Some(b.map_or(bj.clone(), |x| x.min(bj)));
    }
    let (a, b) = (a.expect("m >= 1"), b.expect("m >= 1"));
    let eq_r = rat(eq as i64);
    let wmax = *w.iter().max().expect("m >= 1");
    let scale = rat((wmax * m as u64) as i64);
    // the T-exponent of k is at most wmax·m·max_i k_i
    let alpha = &eq_r * &a / (&scale * &scale);
    let (c, d, g) = match denom {
        None => (alpha, &eq_r * &b, None),
        Some(den) => {
            let e = rat(den.t_exp as i64);
            // distinct values v_1 < v_2 < ..: coefficient of T^(ej) has
            // valuation >= eq·(j·v_min + j(j-1)/2)
            let c_g = &eq_r / (rat(4) * &e * &e);
            let d_g = if den.v.constant_term().is_zero() { -&eq_r / rat(4) } else { BigRational::zero() };
            let c = &alpha * &c_g / (&alpha + &c_g);
            let d = &eq_r * &b + &d_g;
            (c, d, Some(QuadraticBound::new(c_g, d_g)?))
        }
    };
    Ok(((a, b), QuadraticBound::new(c, d)?, g))
}

fn emit_core(node: Node, eq: u64, out: &mut Vec<MeroTerm>) -> Result<()> {
    let (minorant, numerator_bound, denominator_bound) = core_bounds(&node.u, &node.w, node.denom.as_ref(), eq)?;
    out.push(MeroTerm {
        coefficient: node.coefficient,
        atoms: node.atoms,
        shift: node.shift,
        body: MeroBody::Entire(Box::new(EntireCore {
            u: node.u,
            weights: node.w,
            denominator: node.denom,
            minorant,
            numerator_bound,
            denominator_bound,
        })),
    });
    Ok(())
}

fn reduce(mut node: Node, eq: u64, opts: &ReduceOptions, out: &mut Vec<MeroTerm>) -> Result<()> {
    loop {
        if let Some(den) = &node.denom {
            if den.v.is_constant() {
                let atom = Atom { q_exp: exponent(&den.v.constant_term())?, t_exp: den.t_exp };
                node.atoms.push(atom);
                node.denom = None;
                continue;
            }
        }
        let m = node.w.len();
        if m == 0 {
            let c = exponent(&node.u.constant_term())?;
            out.push(MeroTerm {
                coefficient: node.coefficient,
                atoms: node.atoms,
                shift: node.shift,
                body: MeroBody::Monomial(c),
            });
            return Ok(());
        }
        // geometric directions: k_j absent, or linear with constant slope
        let geometric = (0..m).filter(|&j| !node.in_v(j)).find_map(|j| match node.u.degree_in(j) {
            0 => Some((j, BigRational::zero())),
            1 => {
                let g = node.u.coeff_in(j, 1);
                g.is_constant().then(|| (j, g.constant_term()))
            }
            _ => None,
        });
        if let Some((j, c)) = geometric {
            let atom = Atom { q_exp: exponent(&c)?, t_exp: node.w[j] };
            node = node.fix(j, 0);
            node.atoms.push(atom);
            continue;
        }
        if node.denom.is_none() {
            if let Some(j) = (0..m).find(|&j| node.u.degree_in(j) == 1) {
                let g = node.u.coeff_in(j, 1).fix(j, &BigInt::zero());
                let e = node.w[j];
                node = node.fix(j, 0);
                node.denom = Some(Denominator { v: g, t_exp: e });
                continue;
            }
        }
        break;
    }
    let m = node.w.len();
    if let Some(j) = (0..m).find(|&j| node.u.degree_in(j) < 2) {
        return Err(Error::UnsupportedShape(alloc::format!(
            "k{} has degree {} in the exponent {} alongside the denominator exponent {}",
            j + 1,
            node.u.degree_in(j),
            node.u.display_with("k"),
            node.denom.as_ref().map_or("none".into(), |d| d.v.display_with("k")),
        )));
    }
    for j in 0..m {
        let (_, lc) = node.u.leading_in(j);
        if certified_positive(&lc) {
            continue;
        }
        let vars: Vec<usize> = (0..m).filter(|&s| lc.depends_on(s)).collect();
        let mut t = 1u64;
        let threshold = loop {
            if t > opts.threshold_cap || vars.is_empty() {
                return Err(Error::ThresholdSearch { var: j + 1, cap: opts.threshold_cap, poly: lc.display_with("k") });
            }
            let shifted = vars.iter().fold(lc.clone(), |p, &s| p.shift(s, &BigInt::from(t)));
            if certified_positive(&shifted) {
                break t;
            }
            t *= 2;
        };
        log::debug!("threshold {threshold} on {:?} for the leading coefficient {}", vars, lc.display_with("k"));
        // {k_s < t} slices for each s in turn, then the shifted corner
        let mut cur = node;
        for &s in &vars {
            for c in 0..threshold {
                reduce(cur.fix(s, c), eq, opts, out)?;
            }
            cur = cur.shift_var(s, threshold);
        }
        return reduce(cur, eq, opts, out);
    }
    emit_core(node, eq, out)
}

/// Decomposes `Σ_{x >= 0} q^f(x) T^(d·x)` into rational terms and quotients
/// of entire series with explicit Newton-polygon constants.
pub fn reduce_to_mero_parts(f: &IncreasingPolynomial, degrees: &[u64], q: u64, p: u64) -> Result<MeromorphicPart> {
    reduce_with(f, degrees, q, p, &ReduceOptions::default())
}

pub fn reduce_with(
    f: &IncreasingPolynomial,
    degrees: &[u64],
    q: u64,
    p: u64,
    opts: &ReduceOptions,
) -> Result<MeromorphicPart> {
    let eq = prime_power_exponent(q, p)?;
    let poly = f.poly();
    let n = poly.nvars();
    if degrees.len() != n {
        return Err(Error::DegreeCount { got: degrees.len(), vars: n });
    }
    if degrees.contains(&0) {
        return Err(Error::Dimension("degrees must be positive".into()));
    }
    let top = (0..n).map(|i| poly.degree_in(i)).max().unwrap_or(0) as i64;
    for x in parameter_box(top, n) {
        if !poly.eval_i64(&x).is_integer() {
            return Err(Error::NotIntegerValued { point: x });
        }
    }
    let origin = poly.eval_i64(&alloc::vec![0; n]);
    if origin.is_negative() {
        return Err(Error::NegativeExponent { value: origin.to_string() });
    }
    let mut terms = Vec::new();
    for h in cone_decomposition(n).terms {
        let node = Node {
            coefficient: BigInt::from(h.coefficient),
            atoms: Vec::new(),
            shift: 0,
            u: triangular_substitute(poly, &h),
            w: h.weights(degrees),
            denom: None,
        };
        reduce(node, eq, opts, &mut terms)?;
    }
    Ok(MeromorphicPart { q, p, eq, terms })
}

/// Calls `visit` on every `k >= 0` with `w·k <= budget`.
pub(crate) fn for_each_weighted(w: &[u64], budget: u64, visit: &mut dyn FnMut(&[u64], u64)) {
    fn go(w: &[u64], budget: u64, used: u64, k: &mut Vec<u64>, visit: &mut dyn FnMut(&[u64], u64)) {
        if k.len() == w.len() {
            visit(k, used);
            return;
        }
        let wi = w[k.len()];
        let mut x = 0;
        while used + wi * x <= budget {
            k.push(x);
            go(w, budget, used + wi * x, k, visit);
            k.pop();
            x += 1;
        }
    }
    go(w, budget, 0, &mut Vec::new(), visit);
}

pub(crate) fn eval_exponent(p: &Poly, k: &[u64]) -> BigInt {
    let x: Vec<BigInt> = k.iter().map(|&v| BigInt::from(v)).collect();
    p.eval_int(&x).to_integer()
}

pub(crate) fn q_pow(q: u64, e: &BigInt) -> BigInt {
    pow_p(q, e.to_u64().expect("exponent fits in u64"))
}

/// Multiplies by `1 / (1 - x T^d)` in place.
fn mul_geometric(s: &mut [BigInt], x: &BigInt, d: usize) {
    for i in d..s.len() {
        let prev = &s[i - d] * x;
        s[i] += prev;
    }
}

impl EntireCore {
    /// Exact coefficients through `T^r`.
    pub fn expand(&self, q: u64, r: u64) -> Vec<BigInt> {
        let mut out = alloc::vec![BigInt::zero(); r as usize + 1];
        for_each_weighted(&self.weights, r, &mut |k, pos| {
            let base = q_pow(q, &eval_exponent(&self.u, k));
            match &self.denominator {
                None => out[pos as usize] += base,
                Some(den) => {
                    let step = q_pow(q, &eval_exponent(&den.v, k));
                    let mut x = base;
                    let mut at = pos;
                    while at <= r {
                        out[at as usize] += &x;
                        x *= &step;
                        at += den.t_exp;
                    }
                }
            }
        });
        out
    }
}

impl MeromorphicPart {
    /// Exact coefficients of the whole decomposition through `T^r`.
    pub fn expand(&self, r: u64) -> Vec<BigInt> {
        let mut total = alloc::vec![BigInt::zero(); r as usize + 1];
        for term in &self.terms {
            if term.shift > r {
                continue;
            }
            let rest = r - term.shift;
            let mut s = match &term.body {
                MeroBody::Monomial(c) => {
                    let mut s = alloc::vec![BigInt::zero(); rest as usize + 1];
                    s[0] = pow_p(self.q, *c);
                    s
                }
                MeroBody::Entire(core) => core.expand(self.q, rest),
            };
            for atom in &term.atoms {
                mul_geometric(&mut s, &pow_p(self.q, atom.q_exp), atom.t_exp as usize);
            }
            for (i, c) in s.into_iter().enumerate() {
                total[i + term.shift as usize] += &term.coefficient * c;
            }
        }
        total
    }

    pub fn entire_cores(&self) -> impl Iterator<Item = &EntireCore> {
        self.terms.iter().filter_map(|t| match &t.body {
            MeroBody::Entire(c) => Some(&**c),
            MeroBody::Monomial(_) => None,
        })
    }

    pub fn is_rational(&self) -> bool {
        self.entire_cores().next().is_none()
    }
}

impl Atom {
    pub fn is_pole_at_one(&self) -> bool {
        self.q_exp == 0
    }
}
