//! Chains covering the orthant and their inclusion-exclusion coefficients.
//!
//! An ordered set partition `(B_1, .., B_r)` of the coordinates names the
//! cone `{x : x_i = y_j for i in B_j, y_1 >= .. >= y_r >= 0}`, parametrized
//! freely by `k in Z_{>=0}^r` through `y_j = k_j + .. + k_r`. The chambers are
//! the partitions into singletons; every other cone is an intersection of
//! chambers.

use alloc::vec::Vec;

use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeTerm {
    pub blocks: Vec<Vec<usize>>,
    pub coefficient: i64,
}

impl ConeTerm {
    pub fn free_parameters(&self) -> usize {
        self.blocks.len()
    }

    fn ambient(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Block index of every coordinate.
    fn block_of(&self) -> Vec<usize> {
        let mut b = alloc::vec![0; self.ambient()];
        for (j, block) in self.blocks.iter().enumerate() {
            for &i in block {
                b[i] = j;
            }
        }
        b
    }

    /// The point with parameters `k`.
    pub fn point(&self, k: &[i64]) -> Vec<i64> {
        let suffix: Vec<i64> = (0..k.len()).map(|j| k[j..].iter().sum()).collect();
        self.block_of().into_iter().map(|j| suffix[j]).collect()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        let ys: Vec<i64> = self.blocks.iter().map(|b| x[b[0]]).collect();
        self.blocks.iter().zip(&ys).all(|(b, y)| b.iter().all(|&i| x[i] == *y))
            && ys.windows(2).all(|w| w[0] >= w[1])
            && ys.last().is_none_or(|&y| y >= 0)
    }

    /// `d · x(k) = Σ_l k_l · weight_l`.
    pub fn weights(&self, d: &[u64]) -> Vec<u64> {
        let mut acc = 0;
        self.blocks
            .iter()
            .map(|b| {
                acc += b.iter().map(|&i| d[i]).sum::<u64>();
                acc
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeDecomposition {
    pub n: usize,
    pub terms: Vec<ConeTerm>,
}

impl ConeDecomposition {
    /// `Σ_H c_H 1_H(x)`.
    pub fn indicator(&self, x: &[i64]) -> i64 {
        self.terms.iter().filter(|t| t.contains(x)).map(|t| t.coefficient).sum()
    }

    /// First point of `[0, bound]^n` where the indicator sum is not 1.
    pub fn indicator_failure(&self, bound: i64) -> Option<Vec<i64>> {
        let side = (bound + 1) as usize;
        (0..side.pow(self.n as u32))
            .map(|mut idx| {
                (0..self.n)
                    .map(|_| {
                        let v = (idx % side) as i64;
                        idx /= side;
                        v
                    })
                    .collect::<Vec<i64>>()
            })
            .find(|x| self.indicator(x) != 1)
    }
}

fn ordered_partitions(rest: &[usize], prefix: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
    if rest.is_empty() {
        out.push(prefix.clone());
        return;
    }
    for mask in 1u32..(1 << rest.len()) {
        let (block, remaining): (Vec<usize>, Vec<usize>) = {
            let mut b = Vec::new();
            let mut r = Vec::new();
            for (i, &x) in rest.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    b.push(x);
                } else {
                    r.push(x);
                }
            }
            (b, r)
        };
        prefix.push(block);
        ordered_partitions(&remaining, prefix, out);
        prefix.pop();
    }
}

/// All chambers and their intersections with `c_H = (-1)^(n - r)`.
///
/// A point whose distinct values split the coordinates into blocks lies in
/// exactly the cones refining that ordered partition, and the signed count
/// of ordered partitions of an `m`-set is 1, so the coefficients sum to 1 at
/// every point.
pub fn cone_decomposition(n: usize) -> ConeDecomposition {
    let coords: Vec<usize> = (0..n).collect();
    let mut parts = Vec::new();
    ordered_partitions(&coords, &mut Vec::new(), &mut parts);
    let terms = parts
        .into_iter()
        .map(|blocks| {
            let coefficient = if (n - blocks.len()).is_multiple_of(2) { 1 } else { -1 };
            ConeTerm { blocks, coefficient }
        })
        .collect();
    ConeDecomposition { n, terms }
}

/// `f(x(k))` as a polynomial in the free parameters of `h`.
pub fn triangular_substitute(f: &Poly, h: &ConeTerm) -> Poly {
    let r = h.free_parameters();
    let suffix: Vec<Poly> = (0..r).map(|j| (j..r).fold(Poly::zero(r), |acc, l| &acc + &Poly::var(r, l))).collect();
    let images: Vec<Poly> = h.block_of().into_iter().map(|j| suffix[j].clone()).collect();
    f.compose(&images, r)
}

/// Parameters of the points of `h` with `x_i <= bound`.
pub(crate) fn parameter_box(bound: i64, r: usize) -> Vec<Vec<i64>> {
    let side = (bound + 1) as usize;
    (0..side.pow(r as u32))
        .map(|mut idx| {
            (0..r)
                .map(|_| {
                    let v = (idx % side) as i64;
                    idx /= side;
                    v
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn small_decompositions() {
        let one = cone_decomposition(1);
        assert_eq!(one.terms, alloc::vec![ConeTerm { blocks: alloc::vec![alloc::vec![0]], coefficient: 1 }]);
        let two = cone_decomposition(2);
        assert_eq!(two.terms.len(), 3);
        let diag = two.terms.iter().find(|t| t.blocks.len() == 1).unwrap();
        assert_eq!(diag.coefficient, -1);
        assert!(two.terms.iter().filter(|t| t.blocks.len() == 2).all(|t| t.coefficient == 1));
    }

    #[test]
    fn indicator_sums_to_one() {
        for n in 1..=3 {
            let d = cone_decomposition(n);
            assert_eq!(d.indicator_failure(4), None, "n = {n}");
        }
        assert_eq!(cone_decomposition(3).terms.len(), 13);
    }

    #[test]
    fn parametrization_is_bijective_onto_cone() {
        let d = cone_decomposition(3);
        for t in &d.terms {
            for k in parameter_box(3, t.free_parameters()) {
                let x = t.point(&k);
                assert!(t.contains(&x));
            }
        }
    }

    #[test]
    fn substitutions() {
        // x1 x2 on the chamber x1 >= x2: (k1 + k2) k2
        let f = Poly::from_int_terms(2, &[(&[1, 1], 1)]);
        let h = ConeTerm { blocks: alloc::vec![alloc::vec![0], alloc::vec![1]], coefficient: 1 };
        let g = triangular_substitute(&f, &h);
        assert_eq!(g, Poly::from_int_terms(2, &[(&[1, 1], 1), (&[0, 2], 1)]));

        let x = Poly::var(1, 0);
        let line = ConeTerm { blocks: alloc::vec![alloc::vec![0]], coefficient: 1 };
        assert_eq!(triangular_substitute(&x, &line), x);

        let s = Poly::from_int_terms(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let diag = ConeTerm { blocks: alloc::vec![alloc::vec![0, 1]], coefficient: -1 };
        assert_eq!(triangular_substitute(&s, &diag), Poly::var(1, 0).scale(&rat(2)));
    }

    #[test]
    fn weights_accumulate() {
        let h = ConeTerm { blocks: alloc::vec![alloc::vec![1], alloc::vec![0, 2]], coefficient: 1 };
        assert_eq!(h.weights(&[1, 2, 3]), alloc::vec![2, 6]);
        let k = [2, 5];
        let x = h.point(&k);
        let dx: i64 = x.iter().zip([1, 2, 3]).map(|(a, b)| a * b).sum();
        assert_eq!(dx, 2 * 2 + 5 * 6);
    }
}
