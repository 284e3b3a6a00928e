//! Integer points of `{m : A·m >= -b}`.
//!
//! Coordinate ranges come from Fourier–Motzkin projection with integer
//! tightening; coordinates are then fixed one at a time. A missing lower or
//! upper bound on a feasible projection means the polyhedron is unbounded.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::IntMatrix;

/// `{m in R^dim : ineq · m >= -rhs}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolytope {
    pub ineq: IntMatrix,
    pub rhs: Vec<BigInt>,
}

impl RationalPolytope {
    pub fn new(ineq: IntMatrix, rhs: Vec<BigInt>) -> Result<Self> {
        if rhs.len() != ineq.rows() {
            return Err(Error::Dimension(alloc::format!(
                "{} right-hand sides for {} inequalities",
                rhs.len(),
                ineq.rows()
            )));
        }
        Ok(Self { ineq, rhs })
    }

    pub fn dim(&self) -> usize {
        self.ineq.cols()
    }

    pub fn contains(&self, m: &[BigInt]) -> bool {
        (0..self.ineq.rows()).all(|i| {
            let s: BigInt = self.ineq.row(i).iter().zip(m).map(|(a, x)| a * x).sum();
            s >= -&self.rhs[i]
        })
    }

    fn constraints(&self) -> Vec<Constraint> {
        (0..self.ineq.rows()).map(|i| Constraint { a: self.ineq.row(i).to_vec(), c: -&self.rhs[i] }).collect()
    }
}

/// `a · x >= c`
#[derive(Clone, Debug)]
struct Constraint {
    a: Vec<BigInt>,
    c: BigInt,
}

/// Divides by the content of `a` and rounds `c` up, which keeps every
/// integer solution.
fn tighten(a: Vec<BigInt>, c: BigInt) -> Constraint {
    let g = a.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return Constraint { a, c };
    }
    let c = c.div_ceil(&g);
    Constraint { a: a.into_iter().map(|x| x / &g).collect(), c }
}

/// Keeps the strongest right-hand side per coefficient vector.
fn dedup(cons: Vec<Constraint>) -> Vec<Constraint> {
    let mut best: BTreeMap<Vec<BigInt>, BigInt> = BTreeMap::new();
    for k in cons {
        match best.get_mut(&k.a) {
            Some(c) if *c >= k.c => {}
            Some(c) => *c = k.c,
            None => {
                best.insert(k.a, k.c);
            }
        }
    }
    best.into_iter().map(|(a, c)| Constraint { a, c }).collect()
}

enum Range {
    Empty,
    Bounded(BigInt, BigInt),
}

/// Range of variable 0 over the projection, eliminating variables `1..n`.
fn first_coordinate_range(cons: &[Constraint], depth: usize) -> Result<Range> {
    let n = cons.first().map_or(0, |k| k.a.len());
    let mut cur: Vec<Constraint> = cons.iter().cloned().map(|k| tighten(k.a, k.c)).collect();
    for j in (1..n).rev() {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for k in cur {
            if k.a[j].is_positive() {
                pos.push(k);
            } else if k.a[j].is_negative() {
                neg.push(k);
            } else {
                rest.push(k);
            }
        }
        for p in &pos {
            for q in &neg {
                let (sp, sq) = (-&q.a[j], p.a[j].clone());
                let a: Vec<BigInt> = p.a.iter().zip(&q.a).map(|(x, y)| x * &sp + y * &sq).collect();
                let c = &p.c * &sp + &q.c * &sq;
                rest.push(tighten(a, c));
            }
        }
        cur = dedup(rest);
    }
    let mut lo: Option<BigInt> = None;
    let mut hi: Option<BigInt> = None;
    for k in &cur {
        let a0 = &k.a[0];
        if a0.is_zero() {
            if k.c.is_positive() {
                return Ok(Range::Empty);
            }
        } else if a0.is_positive() {
            let b = k.c.div_ceil(a0);
            if lo.as_ref().is_none_or(|l| &b > l) {
                lo = Some(b);
            }
        } else {
            let b = k.c.div_floor(a0);
            if hi.as_ref().is_none_or(|h| &b < h) {
                hi = Some(b);
            }
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) if l > h => Ok(Range::Empty),
        (Some(l), Some(h)) => Ok(Range::Bounded(l, h)),
        _ => Err(Error::UnboundedPolytope { coordinate: depth }),
    }
}

fn walk<F>(cons: &[Constraint], prefix: &mut Vec<BigInt>, visit: &mut F) -> Result<ControlFlow<()>>
where
    F: FnMut(&[BigInt]) -> ControlFlow<()>,
{
    let n = cons.first().map_or(0, |k| k.a.len());
    if n == 0 {
        if cons.iter().all(|k| !k.c.is_positive()) {
            return Ok(visit(prefix));
        }
        return Ok(ControlFlow::Continue(()));
    }
    let (lo, hi) = match first_coordinate_range(cons, prefix.len())? {
        Range::Empty => return Ok(ControlFlow::Continue(())),
        Range::Bounded(l, h) => (l, h),
    };
    let mut x = lo;
    while x <= hi {
        let sub: Vec<Constraint> =
            cons.iter().map(|k| Constraint { a: k.a[1..].to_vec(), c: &k.c - &k.a[0] * &x }).collect();
        prefix.push(x.clone());
        let flow = walk(&sub, prefix, visit)?;
        prefix.pop();
        if flow.is_break() {
            return Ok(flow);
        }
        x += 1;
    }
    Ok(ControlFlow::Continue(()))
}

/// Visits every integer point in lexicographic order until `visit` breaks.
pub fn for_each_lattice_point<F>(p: &RationalPolytope, mut visit: F) -> Result<()>
where
    F: FnMut(&[BigInt]) -> ControlFlow<()>,
{
    let cons = p.constraints();
    if cons.is_empty() {
        if p.dim() == 0 {
            let _ = visit(&[]);
            return Ok(());
        }
        return Err(Error::UnboundedPolytope { coordinate: 0 });
    }
    walk(&cons, &mut Vec::new(), &mut visit).map(|_| ())
}

/// Exact number of integer points.
pub fn count_lattice_points(p: &RationalPolytope) -> Result<u64> {
    let mut n = 0u64;
    for_each_lattice_point(p, |_| {
        n += 1;
        ControlFlow::Continue(())
    })?;
    Ok(n)
}

pub fn first_lattice_point(p: &RationalPolytope) -> Result<Option<Vec<BigInt>>> {
    let mut found = None;
    for_each_lattice_point(p, |m| {
        found = Some(m.to_vec());
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// Coordinate bound `max|b| * (dim * max|a|)^dim` satisfied by every vertex
/// of a bounded polytope of this shape.
pub fn vertex_bound(p: &RationalPolytope) -> BigInt {
    let dim = p.dim();
    let max_a =
        (0..p.ineq.rows()).flat_map(|i| p.ineq.row(i).iter().map(|x| x.abs())).max().unwrap_or_else(BigInt::one);
    let max_b = p.rhs.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero).max(BigInt::one());
    max_b * num_traits::pow(max_a * BigInt::from(dim), dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(rows: &[&[i64]], rhs: &[i64]) -> RationalPolytope {
        RationalPolytope::new(IntMatrix::from_rows(rows).unwrap(), rhs.iter().map(|&x| BigInt::from(x)).collect())
            .unwrap()
    }

    /// Direct enumeration over a box as an independent count.
    fn brute(p: &RationalPolytope, r: i64) -> u64 {
        let d = p.dim();
        let mut count = 0;
        let total = (2 * r + 1).pow(d as u32);
        for idx in 0..total {
            let mut m = Vec::with_capacity(d);
            let mut t = idx;
            for _ in 0..d {
                m.push(BigInt::from(t % (2 * r + 1) - r));
                t /= 2 * r + 1;
            }
            if p.contains(&m) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn triangle_has_six_points() {
        // x >= 0, y >= 0, -x - y >= -2
        let p = poly(&[&[1, 0], &[0, 1], &[-1, -1]], &[0, 0, 2]);
        assert_eq!(count_lattice_points(&p).unwrap(), 6);
    }

    #[test]
    fn contradiction_is_empty() {
        let p = poly(&[&[1], &[-1]], &[-1, 0]);
        assert_eq!(count_lattice_points(&p).unwrap(), 0);
    }

    #[test]
    fn skewed_triangle() {
        // x >= 0, y >= 0, x + 2y <= 5
        let p = poly(&[&[1, 0], &[0, 1], &[-1, -2]], &[0, 0, 5]);
        assert_eq!(count_lattice_points(&p).unwrap(), 12);
        assert_eq!(brute(&p, 6), 12);
    }

    #[test]
    fn unbounded_detected() {
        let p = poly(&[&[1, 0], &[0, 1]], &[0, 0]);
        assert!(matches!(count_lattice_points(&p), Err(Error::UnboundedPolytope { .. })));
        let q = poly(&[&[1, 0], &[-1, 0], &[0, 1]], &[1, 1, 0]);
        assert!(matches!(count_lattice_points(&q), Err(Error::UnboundedPolytope { coordinate: 1 })));
    }

    #[test]
    fn three_dimensional_simplex() {
        // x, y, z >= 0, x + y + z <= 3 -> C(6,3) = 20
        let p = poly(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]], &[0, 0, 0, 3]);
        assert_eq!(count_lattice_points(&p).unwrap(), 20);
        assert_eq!(brute(&p, 4), 20);
    }

    #[test]
    fn points_respect_vertex_bound() {
        let p = poly(&[&[1, 0], &[0, 1], &[-1, -2]], &[1, 2, 7]);
        let bound = vertex_bound(&p);
        for_each_lattice_point(&p, |m| {
            assert!(m.iter().all(|x| x.abs() <= bound));
            ControlFlow::Continue(())
        })
        .unwrap();
    }
}
