use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::Deref;

use num_integer::Integer;

use crate::error::{Error, Result};

/// A fan in `N = Z^dim`, given by its rays and maximal cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    pub complete: bool,
}

/// A fan that passed [`Fan::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidatedFan {
    fan: Fan,
    completeness_verified: bool,
}

impl Deref for ValidatedFan {
    type Target = Fan;
    fn deref(&self) -> &Fan {
        &self.fan
    }
}

impl ValidatedFan {
    /// `false` when completeness was asserted by the caller rather than
    /// checked (dimension three and up).
    pub fn completeness_verified(&self) -> bool {
        self.completeness_verified
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn into_inner(self) -> Fan {
        self.fan
    }
}

/// Half-plane index then cross product: orders 2d vectors by angle in `[0, 2π)`.
fn angle_cmp(a: &[i64], b: &[i64]) -> Ordering {
    let half = |v: &[i64]| if v[1] > 0 || (v[1] == 0 && v[0] > 0) { 0 } else { 1 };
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&cross(a, b)))
}

fn cross(a: &[i64], b: &[i64]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

impl Fan {
    pub fn new(dim: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Self {
        Self { dim, rays, max_cones, complete: true }
    }

    pub fn validate(&self) -> Result<ValidatedFan> {
        if self.dim == 0 {
            return Err(Error::Dimension("fan dimension must be positive".into()));
        }
        for (i, r) in self.rays.iter().enumerate() {
            if r.len() != self.dim {
                return Err(Error::Dimension(format!("ray {i} has length {}, fan dimension is {}", r.len(), self.dim)));
            }
            let g = r.iter().fold(0i64, |acc, &x| acc.gcd(&x));
            if g != 1 {
                return Err(Error::NonPrimitiveRay { index: i, ray: r.clone() });
            }
        }
        for i in 0..self.rays.len() {
            for j in i + 1..self.rays.len() {
                if self.rays[i] == self.rays[j] {
                    return Err(Error::DuplicateRay { first: i, second: j });
                }
            }
        }
        for (ci, cone) in self.max_cones.iter().enumerate() {
            if cone.is_empty() {
                return Err(Error::InvalidCone { index: ci, reason: "empty cone".into() });
            }
            if let Some(&bad) = cone.iter().find(|&&r| r >= self.rays.len()) {
                return Err(Error::InvalidCone { index: ci, reason: format!("ray index {bad} out of range") });
            }
        }
        if !self.complete {
            return Err(Error::IncompleteFan("fan is not flagged complete".into()));
        }
        let verified = match self.dim {
            1 => {
                let mut vals: Vec<i64> = self.rays.iter().map(|r| r[0]).collect();
                vals.sort_unstable();
                if vals != [-1, 1] {
                    return Err(Error::IncompleteFan("a complete fan in dimension 1 has rays 1 and -1".into()));
                }
                true
            }
            2 => {
                self.check_planar_completeness()?;
                true
            }
            _ => {
                log::warn!("completeness of a {}-dimensional fan is assumed, not checked", self.dim);
                false
            }
        };
        Ok(ValidatedFan { fan: self.clone(), completeness_verified: verified })
    }

    fn check_planar_completeness(&self) -> Result<()> {
        let n = self.rays.len();
        if n < 3 {
            return Err(Error::IncompleteFan(format!("{n} rays cannot cover the plane")));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| angle_cmp(&self.rays[a], &self.rays[b]));
        for w in 0..n {
            let (a, b) = (order[w], order[(w + 1) % n]);
            if cross(&self.rays[a], &self.rays[b]) <= 0 {
                return Err(Error::IncompleteFan(format!("angular gap of at least pi between rays {a} and {b}")));
            }
        }
        if !self.max_cones.is_empty() {
            let expected: BTreeSet<Vec<usize>> = (0..n)
                .map(|w| {
                    let mut c = vec![order[w], order[(w + 1) % n]];
                    c.sort_unstable();
                    c
                })
                .collect();
            let given: BTreeSet<Vec<usize>> = self
                .max_cones
                .iter()
                .map(|c| {
                    let mut c = c.clone();
                    c.sort_unstable();
                    c
                })
                .collect();
            if let Some(missing) = expected.difference(&given).next() {
                return Err(Error::IncompleteFan(format!("cone spanned by rays {missing:?} is missing")));
            }
            if let Some(extra) = given.difference(&expected).next() {
                return Err(Error::IncompleteFan(format!("cone {extra:?} does not join angular neighbours")));
            }
        }
        Ok(())
    }
}

fn planar(rays: &[[i64; 2]]) -> Fan {
    let n = rays.len();
    Fan::new(2, rays.iter().map(|r| r.to_vec()).collect(), (0..n).map(|i| vec![i, (i + 1) % n]).collect())
}

/// The projective line.
pub fn projective_line() -> Fan {
    Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]])
}

/// The projective plane, rays `(1,0), (0,1), (-1,-1)`.
pub fn projective_plane() -> Fan {
    planar(&[[1, 0], [0, 1], [-1, -1]])
}

/// `P^1 x P^1`, rays `(1,0), (-1,0), (0,1), (0,-1)`.
pub fn product_of_lines() -> Fan {
    let mut f = planar(&[[1, 0], [0, 1], [-1, 0], [0, -1]]);
    // ray order (1,0), (-1,0), (0,1), (0,-1)
    f.rays = vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]];
    f.max_cones = vec![vec![0, 2], vec![2, 1], vec![1, 3], vec![3, 0]];
    f
}

/// Hirzebruch surface `F_a`, rays `(1,0), (0,1), (-1,a), (0,-1)`.
pub fn hirzebruch(a: i64) -> Fan {
    planar(&[[1, 0], [0, 1], [-1, a], [0, -1]])
}

/// Weighted projective plane `P(1,1,2)`, rays `(1,0), (0,1), (-1,-2)`.
pub fn weighted_112() -> Fan {
    planar(&[[1, 0], [0, 1], [-1, -2]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        for f in
            [projective_line(), projective_plane(), product_of_lines(), hirzebruch(1), hirzebruch(3), weighted_112()]
        {
            let v = f.validate().unwrap();
            assert!(v.completeness_verified());
        }
    }

    #[test]
    fn non_primitive_ray() {
        let f = Fan::new(2, vec![vec![2, 0], vec![0, 1], vec![-1, -1]], vec![]);
        assert_eq!(f.validate().unwrap_err(), Error::NonPrimitiveRay { index: 0, ray: vec![2, 0] });
    }

    #[test]
    fn half_plane_is_incomplete() {
        let f = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]);
        assert!(matches!(f.validate(), Err(Error::IncompleteFan(_))));
        let g = Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, 0]], vec![]);
        assert!(matches!(g.validate(), Err(Error::IncompleteFan(_))));
    }

    #[test]
    fn duplicate_rays() {
        let f = Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![1, 0], vec![-1, -1]], vec![]);
        assert_eq!(f.validate().unwrap_err(), Error::DuplicateRay { first: 0, second: 2 });
    }

    #[test]
    fn wrong_cones_rejected() {
        let mut f = projective_plane();
        f.max_cones = vec![vec![0, 1], vec![1, 2]];
        assert!(matches!(f.validate(), Err(Error::IncompleteFan(_))));
    }

    #[test]
    fn higher_dimension_is_assumed() {
        let f = Fan::new(3, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]], vec![]);
        assert!(!f.validate().unwrap().completeness_verified());
    }
}
