//! Exact integer linear algebra: Smith normal form, cokernel presentations
//! and integer preimages.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::MatrixShape { rows, cols, got: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from machine-word rows. All rows must share a length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Dimension(alloc::format!(
                    "row of length {} in a matrix with {} columns",
                    r.len(),
                    cols
                )));
            }
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(alloc::format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(alloc::format!("vector of length {} against {} columns", x.len(), self.cols)));
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect())
    }

    /// Determinant of a square matrix via fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        Ok(sign * a.get(n - 1, n - 1))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += factor * row[src]
    fn add_row(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(src, j) * factor;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += factor * col[src]
    fn add_col(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, src) * factor;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.data[idx] = -core::mem::take(&mut self.data[idx]);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[BigInt]> = (0..self.rows).map(|i| self.row(i)).collect();
        f.debug_list().entries(rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>())).finish()
    }
}

use alloc::string::ToString;

/// `U · A · V = S` with `U`, `V` unimodular and `S` in Smith form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SnfDecomposition {
    /// Nonzero diagonal entries of `S`, in order.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols())).map(|i| self.s.get(i, i).clone()).take_while(|x| !x.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().len()
    }
}

/// Position of the nonzero entry of smallest absolute value in the block
/// `[from.., from..]`, ties broken row-major.
fn smallest_pivot(a: &IntMatrix, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in from..a.rows() {
        for j in from..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a.get(bi, bj).abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Smith normal form. Deterministic for a fixed input.
pub fn smith_normal_form(a: &IntMatrix) -> SnfDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        let Some((pi, pj)) = smallest_pivot(&s, t) else {
            break;
        };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            // clear column t below the pivot
            let mut dirty = false;
            for i in t + 1..m {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = -s.get(i, t).div_floor(s.get(t, t));
                s.add_row(i, t, &q);
                u.add_row(i, t, &q);
                if !s.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let i = (t + 1..m)
                    .filter(|&i| !s.get(i, t).is_zero())
                    .min_by(|&x, &y| s.get(x, t).abs().cmp(&s.get(y, t).abs()).then(x.cmp(&y)))
                    .expect("dirty column has a nonzero entry");
                s.swap_rows(t, i);
                u.swap_rows(t, i);
                continue;
            }
            // clear row t right of the pivot
            for j in t + 1..n {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = -s.get(t, j).div_floor(s.get(t, t));
                s.add_col(j, t, &q);
                v.add_col(j, t, &q);
                if !s.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let j = (t + 1..n)
                    .filter(|&j| !s.get(t, j).is_zero())
                    .min_by(|&x, &y| s.get(t, x).abs().cmp(&s.get(t, y).abs()).then(x.cmp(&y)))
                    .expect("dirty row has a nonzero entry");
                s.swap_cols(t, j);
                v.swap_cols(t, j);
                continue;
            }
            // divisibility of the remaining block
            let pivot = s.get(t, t).clone();
            let offender = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !s.get(i, j).is_multiple_of(&pivot));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::one();
                    s.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfDecomposition { u, s, v }
}

/// Canonical coordinates of a class: free part, then torsion residues in `[0, f_i)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassCoords {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
}

impl ClassCoords {
    pub fn zero(rank: usize, torsion_len: usize) -> Self {
        Self { free: vec![BigInt::zero(); rank], torsion: vec![BigInt::zero(); torsion_len] }
    }
}

/// A finitely generated abelian group `Z^rank ⊕ ⊕ Z/f_i` presented as the
/// cokernel of a map into `Z^ambient_dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinAbGroupPresentation {
    pub rank: usize,
    pub invariant_factors: Vec<BigInt>,
    pub ambient_dim: usize,
    /// `(rank + #factors) x ambient_dim`; free rows first, then torsion rows.
    pub projection: IntMatrix,
}

impl FinAbGroupPresentation {
    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    /// Projects an ambient vector to canonical class coordinates.
    pub fn project(&self, x: &[BigInt]) -> Result<ClassCoords> {
        let raw = self.projection.mul_vec(x)?;
        let free = raw[..self.rank].to_vec();
        let torsion = raw[self.rank..].iter().zip(&self.invariant_factors).map(|(r, f)| r.mod_floor(f)).collect();
        Ok(ClassCoords { free, torsion })
    }

    pub fn project_i64(&self, x: &[i64]) -> Result<ClassCoords> {
        let v: Vec<BigInt> = x.iter().map(|&a| BigInt::from(a)).collect();
        self.project(&v)
    }

    pub fn add(&self, a: &ClassCoords, b: &ClassCoords) -> ClassCoords {
        ClassCoords {
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&b.torsion)
                .zip(&self.invariant_factors)
                .map(|((x, y), f)| (x + y).mod_floor(f))
                .collect(),
        }
    }

    /// Finds an ambient integer vector projecting onto `c`, if any.
    pub fn lift(&self, c: &ClassCoords) -> Result<Option<Vec<BigInt>>> {
        // torsion rows hold only modulo f_i: append one slack column per factor
        let k = self.invariant_factors.len();
        let rows = self.rank + k;
        let cols = self.ambient_dim + k;
        let mut b = IntMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..self.ambient_dim {
                b.set(i, j, self.projection.get(i, j).clone());
            }
        }
        for (t, f) in self.invariant_factors.iter().enumerate() {
            b.set(self.rank + t, self.ambient_dim + t, f.clone());
        }
        let target: Vec<BigInt> = c.free.iter().chain(&c.torsion).cloned().collect();
        Ok(solve_preimage(&b, &target)?.map(|mut x| {
            x.truncate(self.ambient_dim);
            x
        }))
    }
}

/// Presentation of `coker(A) = Z^rows / A·Z^cols`.
pub fn cokernel(a: &IntMatrix) -> FinAbGroupPresentation {
    let snf = smith_normal_form(a);
    let diag = snf.diagonal();
    let r = diag.len();
    let m = a.rows();

    let mut free_rows: Vec<Vec<BigInt>> = (r..m).map(|i| snf.u.row(i).to_vec()).collect();
    row_hermite(&mut free_rows);

    let mut torsion_rows = Vec::new();
    let mut factors = Vec::new();
    for (i, s) in diag.iter().enumerate() {
        if s > &BigInt::one() {
            torsion_rows.push(snf.u.row(i).iter().map(|x| x.mod_floor(s)).collect::<Vec<_>>());
            factors.push(s.clone());
        }
    }
    let rank = free_rows.len();
    let data: Vec<BigInt> = free_rows.into_iter().chain(torsion_rows).flatten().collect();
    let projection = IntMatrix::new(rank + factors.len(), m, data).expect("rows have ambient length");
    FinAbGroupPresentation { rank, invariant_factors: factors, ambient_dim: m, projection }
}

/// Row-style Hermite form of a full-rank row set: positive pivots, entries
/// above each pivot reduced into `[0, pivot)`. Unimodular on the rows.
fn row_hermite(rows: &mut [Vec<BigInt>]) {
    let n = rows.first().map_or(0, Vec::len);
    let mut top = 0;
    for col in 0..n {
        if top == rows.len() {
            break;
        }
        loop {
            let pivot = (top..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by(|&x, &y| rows[x][col].abs().cmp(&rows[y][col].abs()).then(x.cmp(&y)));
            let Some(p) = pivot else { break };
            rows.swap(top, p);
            let mut done = true;
            for i in top + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[top][col]);
                let (head, tail) = rows.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[top]) {
                    *x -= &q * y;
                }
                if !tail[0][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if top < rows.len() && !rows[top][col].is_zero() {
            if rows[top][col].is_negative() {
                for x in rows[top].iter_mut() {
                    *x = -core::mem::take(x);
                }
            }
            for i in 0..top {
                let q = rows[i][col].div_floor(&rows[top][col]);
                let (head, tail) = rows.split_at_mut(top);
                for (x, y) in head[i].iter_mut().zip(&tail[0]) {
                    *x -= &q * y;
                }
            }
            top += 1;
        }
    }
}

/// Solves `A·x = t` over the integers. Returns `None` when `t` is not in
/// the image lattice.
pub fn solve_preimage(a: &IntMatrix, t: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if t.len() != a.rows() {
        return Err(Error::Dimension(alloc::format!(
            "target of length {} for a matrix with {} rows",
            t.len(),
            a.rows()
        )));
    }
    let snf = smith_normal_form(a);
    let diag = snf.diagonal();
    let ut = snf.u.mul_vec(t)?;
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, val) in ut.iter().enumerate() {
        if i < diag.len() {
            let (q, r) = val.div_rem(&diag[i]);
            if !r.is_zero() {
                return Ok(None);
            }
            y[i] = q;
        } else if !val.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(snf.v.mul_vec(&y)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn identity_snf() {
        let a = IntMatrix::identity(2);
        let d = smith_normal_form(&a);
        assert_eq!(d.u, IntMatrix::identity(2));
        assert_eq!(d.v, IntMatrix::identity(2));
        assert_eq!(d.s, IntMatrix::identity(2));
    }

    #[test]
    fn two_by_two_factors() {
        let a = IntMatrix::from_rows(&[[2, 4], [6, 8]]).unwrap();
        let d = smith_normal_form(&a);
        assert_eq!(d.diagonal(), big(&[2, 4]));
        assert_eq!(d.u.mul(&a).unwrap().mul(&d.v).unwrap(), d.s);
    }

    #[test]
    fn projective_plane_rays() {
        let a = IntMatrix::from_rows(&[[1, 0], [0, 1], [-1, -1]]).unwrap();
        let d = smith_normal_form(&a);
        assert_eq!(d.diagonal(), big(&[1, 1]));
        let g = cokernel(&a);
        assert_eq!(g.rank, 1);
        assert!(g.invariant_factors.is_empty());
        assert_eq!(g.projection.row(0), big(&[1, 1, 1]).as_slice());
    }

    #[test]
    fn torsion_cokernel() {
        let a = IntMatrix::from_rows(&[[2, 0], [0, 3]]).unwrap();
        let g = cokernel(&a);
        assert_eq!(g.rank, 0);
        assert_eq!(g.invariant_factors, big(&[6]));
        assert_eq!(g.torsion_order(), BigInt::from(6));
    }

    #[test]
    fn preimage_cases() {
        let id = IntMatrix::identity(3);
        let t = big(&[4, -2, 7]);
        assert_eq!(solve_preimage(&id, &t).unwrap(), Some(t.clone()));
        let two = IntMatrix::from_rows(&[[2]]).unwrap();
        assert_eq!(solve_preimage(&two, &big(&[3])).unwrap(), None);
        assert_eq!(solve_preimage(&two, &big(&[4])).unwrap(), Some(big(&[2])));
    }

    #[test]
    fn lift_degree_two_class_on_plane() {
        let a = IntMatrix::from_rows(&[[1, 0], [0, 1], [-1, -1]]).unwrap();
        let g = cokernel(&a);
        let c = ClassCoords { free: big(&[2]), torsion: vec![] };
        let x = g.lift(&c).unwrap().unwrap();
        assert_eq!(g.project(&x).unwrap(), c);
    }

    #[test]
    fn shape_is_checked() {
        assert!(IntMatrix::new(2, 2, big(&[1, 2, 3])).is_err());
    }

    #[test]
    fn bareiss_determinant() {
        let a = IntMatrix::from_rows(&[[2, 4, 1], [6, 8, 0], [1, 1, 1]]).unwrap();
        // 2(8) - 4(6) + 1(6 - 8) = -10
        assert_eq!(a.det().unwrap(), BigInt::from(-10));
    }
}
