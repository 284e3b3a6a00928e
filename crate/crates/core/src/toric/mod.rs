//! Complete fans, T-invariant divisors, section counts and effective classes.

mod fan;
mod polytope;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

pub use fan::{hirzebruch, product_of_lines, projective_line, projective_plane, weighted_112, Fan, ValidatedFan};
pub use polytope::{count_lattice_points, first_lattice_point, for_each_lattice_point, vertex_bound, RationalPolytope};

use crate::error::{Error, Result};
use crate::lattice::{cokernel, ClassCoords, FinAbGroupPresentation, IntMatrix};

/// `Σ b_ρ D_ρ`, coefficients indexed by ray.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorusDivisor(pub Vec<BigInt>);

impl TorusDivisor {
    pub fn from_i64(c: &[i64]) -> Self {
        Self(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![BigInt::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut d = Self::zero(n);
        d.0[i] = BigInt::from(1);
        d
    }

    pub fn is_effective(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self(self.0.iter().map(|a| a * k).collect())
    }
}

/// The matrix with rows `v_ρ`.
pub fn ray_matrix(fan: &Fan) -> IntMatrix {
    IntMatrix::from_rows(&fan.rays).expect("validated rays share the fan dimension")
}

/// `A^1(X)` as the cokernel of `m -> Σ <m, v_ρ> D_ρ`.
pub fn divisor_class_group(fan: &ValidatedFan) -> FinAbGroupPresentation {
    cokernel(&ray_matrix(fan))
}

/// `div(χ^m)`: coefficients `<m, v_ρ>`.
pub fn principal_divisor(fan: &ValidatedFan, m: &[BigInt]) -> Result<TorusDivisor> {
    Ok(TorusDivisor(ray_matrix(fan).mul_vec(m)?))
}

fn check_len(fan: &Fan, d: &TorusDivisor) -> Result<()> {
    if d.0.len() != fan.rays.len() {
        return Err(Error::Dimension(alloc::format!(
            "divisor has {} coefficients, fan has {} rays",
            d.0.len(),
            fan.rays.len()
        )));
    }
    Ok(())
}

/// `P_D = {m : <m, v_ρ> >= -b_ρ}`.
pub fn polytope_of_divisor(fan: &ValidatedFan, d: &TorusDivisor) -> Result<RationalPolytope> {
    check_len(fan, d)?;
    RationalPolytope::new(ray_matrix(fan), d.0.clone())
}

/// `l(D) = #(P_D ∩ M)`.
pub fn sections_dim(fan: &ValidatedFan, d: &TorusDivisor) -> Result<u64> {
    count_lattice_points(&polytope_of_divisor(fan, d)?)
}

/// A fan together with its class group and a degree functional on the free
/// part of `A^1`.
#[derive(Clone, Debug)]
pub struct ToricVarietyModel {
    pub fan: ValidatedFan,
    pub class_group: FinAbGroupPresentation,
    pub grading: Vec<BigInt>,
}

/// An element of the effective monoid with a nonnegative representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveClass {
    pub coords: ClassCoords,
    pub representative: TorusDivisor,
    pub degree: u64,
}

impl ToricVarietyModel {
    pub fn new(fan: ValidatedFan, grading: Vec<BigInt>) -> Result<Self> {
        let class_group = divisor_class_group(&fan);
        if grading.len() != class_group.rank {
            return Err(Error::GradingLength { got: grading.len(), rank: class_group.rank });
        }
        let model = Self { fan, class_group, grading };
        for i in 0..model.fan.rays.len() {
            let c = model.class_group.project(&TorusDivisor::unit(model.fan.rays.len(), i).0)?;
            let deg = model.degree_of(&c);
            if !deg.is_positive() {
                return Err(Error::NonPositiveGrading { ray: i, degree: deg });
            }
        }
        Ok(model)
    }

    pub fn with_grading_i64(fan: ValidatedFan, grading: &[i64]) -> Result<Self> {
        Self::new(fan, grading.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn ray_count(&self) -> usize {
        self.fan.rays.len()
    }

    pub fn degree_of(&self, c: &ClassCoords) -> BigInt {
        self.grading.iter().zip(&c.free).map(|(g, x)| g * x).sum()
    }

    pub fn class_of(&self, d: &TorusDivisor) -> Result<ClassCoords> {
        check_len(&self.fan, d)?;
        self.class_group.project(&d.0)
    }

    /// `l` of any divisor in the class of `c`.
    pub fn sections_of_class(&self, c: &ClassCoords) -> Result<u64> {
        match self.class_group.lift(c)? {
            Some(x) => sections_dim(&self.fan, &TorusDivisor(x)),
            None => Err(Error::Dimension("class coordinates outside the class group".into())),
        }
    }

    /// A nonnegative divisor in class `c`: any lattice point `m` of `P_D`
    /// gives `A·m + b >= 0`.
    pub fn effective_representative(&self, c: &ClassCoords) -> Result<TorusDivisor> {
        let b = self
            .class_group
            .lift(c)?
            .ok_or_else(|| Error::Dimension("class coordinates outside the class group".into()))?;
        let d = TorusDivisor(b);
        let m = first_lattice_point(&polytope_of_divisor(&self.fan, &d)?)?.ok_or(Error::NotEffective)?;
        Ok(d.add(&principal_divisor(&self.fan, &m)?))
    }
}

fn degree_u64(model: &ToricVarietyModel, c: &ClassCoords, ray: usize) -> Result<u64> {
    let deg = model.degree_of(c);
    if !deg.is_positive() {
        return Err(Error::NonPositiveGrading { ray, degree: deg });
    }
    u64::try_from(&deg).map_err(|_| Error::Dimension("degree exceeds 64 bits".into()))
}

/// Classes of the `D_ρ`, deduplicated in ray order.
pub fn effective_generators(model: &ToricVarietyModel) -> Result<Vec<EffectiveClass>> {
    let n = model.ray_count();
    let mut out: Vec<EffectiveClass> = Vec::new();
    for i in 0..n {
        let rep = TorusDivisor::unit(n, i);
        let coords = model.class_of(&rep)?;
        let degree = degree_u64(model, &coords, i)?;
        if out.iter().all(|g| g.coords != coords) {
            out.push(EffectiveClass { coords, representative: rep, degree });
        }
    }
    Ok(out)
}

/// Classes of degree `0..=dmax` generated by `gens`, one list per degree,
/// each sorted by canonical coordinates.
pub fn enumerate_generated(model: &ToricVarietyModel, gens: &[EffectiveClass], dmax: u64) -> Vec<Vec<EffectiveClass>> {
    let n = model.ray_count();
    let rank = model.class_group.rank;
    let tors = model.class_group.invariant_factors.len();
    let mut levels: Vec<BTreeMap<ClassCoords, TorusDivisor>> = Vec::new();
    let mut zero = BTreeMap::new();
    zero.insert(ClassCoords::zero(rank, tors), TorusDivisor::zero(n));
    levels.push(zero);
    for d in 1..=dmax {
        let mut level = BTreeMap::new();
        for g in gens {
            if g.degree > d {
                continue;
            }
            for (c, rep) in &levels[(d - g.degree) as usize] {
                let key = model.class_group.add(c, &g.coords);
                level.entry(key).or_insert_with(|| rep.add(&g.representative));
            }
        }
        levels.push(level);
    }
    levels
        .into_iter()
        .enumerate()
        .map(|(d, level)| {
            level
                .into_iter()
                .map(|(coords, representative)| EffectiveClass { coords, representative, degree: d as u64 })
                .collect()
        })
        .collect()
}

/// Every effective class of degree exactly `d`.
pub fn enumerate_effective_classes(model: &ToricVarietyModel, d: u64) -> Result<Vec<EffectiveClass>> {
    let gens = effective_generators(model)?;
    Ok(enumerate_generated(model, &gens, d).pop().unwrap_or_default())
}

/// Generators that are not sums of other generators.
pub fn irreducible_generators(model: &ToricVarietyModel) -> Result<Vec<EffectiveClass>> {
    let gens = effective_generators(model)?;
    let mut keep = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let others: Vec<EffectiveClass> =
            gens.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, h)| h.clone()).collect();
        let reachable = enumerate_generated(model, &others, g.degree);
        if !reachable[g.degree as usize].iter().any(|c| c.coords == g.coords) {
            keep.push(g.clone());
        }
    }
    Ok(keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn model(f: Fan, g: &[i64]) -> ToricVarietyModel {
        ToricVarietyModel::with_grading_i64(f.validate().unwrap(), g).unwrap()
    }

    #[test]
    fn class_groups_of_builtins() {
        for (f, rank) in [(projective_plane(), 1), (hirzebruch(1), 2), (weighted_112(), 1), (product_of_lines(), 2)] {
            let g = divisor_class_group(&f.validate().unwrap());
            assert_eq!(g.rank, rank);
            assert!(g.invariant_factors.is_empty());
        }
    }

    #[test]
    fn divisor_polytopes() {
        let p2 = projective_plane().validate().unwrap();
        let p = polytope_of_divisor(&p2, &TorusDivisor::from_i64(&[0, 0, 2])).unwrap();
        assert_eq!(p.rhs, big(&[0, 0, 2]));
        assert_eq!(count_lattice_points(&p).unwrap(), 6);
        assert_eq!(sections_dim(&p2, &TorusDivisor::zero(3)).unwrap(), 1);

        let q = product_of_lines().validate().unwrap();
        // D_(-1,0) + 2 D_(0,-1) -> [0,1] x [0,2]
        assert_eq!(sections_dim(&q, &TorusDivisor::from_i64(&[0, 1, 0, 2])).unwrap(), 6);
    }

    #[test]
    fn sections_closed_forms() {
        let p2 = projective_plane().validate().unwrap();
        assert_eq!(sections_dim(&p2, &TorusDivisor::from_i64(&[3, 0, 0])).unwrap(), 10);
        let w = weighted_112().validate().unwrap();
        // class of degree 5: 5 D_0
        assert_eq!(sections_dim(&w, &TorusDivisor::from_i64(&[5, 0, 0])).unwrap(), 12);
    }

    #[test]
    fn generators() {
        let p2 = model(projective_plane(), &[1]);
        let g = effective_generators(&p2).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].degree, 1);

        let q = model(product_of_lines(), &[1, 1]);
        let g = effective_generators(&q).unwrap();
        let coords: Vec<Vec<BigInt>> = g.iter().map(|c| c.coords.free.clone()).collect();
        assert_eq!(coords, vec![big(&[1, 0]), big(&[0, 1])]);

        let f1 = model(hirzebruch(1), &[1, 1]);
        let g = effective_generators(&f1).unwrap();
        assert!(g.len() <= 4);
        assert_eq!(irreducible_generators(&f1).unwrap().len(), 2);
    }

    #[test]
    fn enumeration_counts() {
        let q = model(product_of_lines(), &[1, 1]);
        let two = enumerate_effective_classes(&q, 2).unwrap();
        let coords: Vec<Vec<BigInt>> = two.iter().map(|c| c.coords.free.clone()).collect();
        assert_eq!(coords, vec![big(&[0, 2]), big(&[1, 1]), big(&[2, 0])]);
        assert_eq!(enumerate_effective_classes(&q, 0).unwrap().len(), 1);
        let p2 = model(projective_plane(), &[1]);
        assert_eq!(enumerate_effective_classes(&p2, 2).unwrap().len(), 1);
    }

    #[test]
    fn representatives_are_effective() {
        let f1 = model(hirzebruch(1), &[1, 1]);
        for c in enumerate_effective_classes(&f1, 4).unwrap() {
            assert!(c.representative.is_effective());
            assert_eq!(f1.class_of(&c.representative).unwrap(), c.coords);
            let rep = f1.effective_representative(&c.coords).unwrap();
            assert!(rep.is_effective());
            assert_eq!(f1.class_of(&rep).unwrap(), c.coords);
        }
    }

    #[test]
    fn negative_grading_rejected() {
        let f = product_of_lines().validate().unwrap();
        assert!(matches!(ToricVarietyModel::with_grading_i64(f, &[1, -1]), Err(Error::NonPositiveGrading { .. })));
    }
}
