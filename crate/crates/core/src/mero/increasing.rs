use alloc::vec::Vec;

use num_traits::Signed;

use super::cone::parameter_box;
use crate::error::{Error, Result};
use crate::poly::Poly;

/// A polynomial whose forward differences were checked nonnegative on
/// `[0, grid_bound]^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncreasingPolynomial {
    poly: Poly,
    grid_bound: u32,
}

impl IncreasingPolynomial {
    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn grid_bound(&self) -> u32 {
        self.grid_bound
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }
}

/// Checks `Δ_i f >= 0` on the grid, and that every leading coefficient of
/// every `Δ_i f` (in each variable) is nonnegative there as well.
pub fn check_increasing(f: &Poly, n: usize, bound: u32) -> Result<IncreasingPolynomial> {
    if f.nvars() != n {
        return Err(Error::DegreeCount { got: n, vars: f.nvars() });
    }
    let grid = parameter_box(bound as i64, n);
    for i in 0..n {
        let diff = f.forward_difference(i);
        let mut checks: Vec<Poly> = alloc::vec![diff.clone()];
        checks.extend((0..n).map(|j| diff.leading_in(j).1));
        for g in &checks {
            for x in &grid {
                let v = g.eval_i64(x);
                if v.is_negative() {
                    return Err(Error::NotIncreasing { var: i + 1, point: x.clone(), value: alloc::format!("{v}") });
                }
            }
        }
    }
    Ok(IncreasingPolynomial { poly: f.clone(), grid_bound: bound })
}
