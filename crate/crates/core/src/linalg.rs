//! Dense exact linear algebra over the base field.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{vec_ops, RatFunc, Vector};

/// A dense row-major matrix with entries in F_p(t).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    p: u8,
    rows: usize,
    cols: usize,
    data: Vec<RatFunc>,
}

/// Result of [`Matrix::solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    /// A particular solution together with a basis of the kernel.
    Solved { x: Vector, kernel: Vec<Vector> },
    Inconsistent,
}

/// Row echelon data from Gauss-Jordan elimination.
struct Echelon {
    reduced: Matrix,
    pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(p: u8, rows: usize, cols: usize) -> Self {
        Matrix { p, rows, cols, data: vec![RatFunc::zero(p); rows * cols] }
    }

    pub fn identity(p: u8, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = RatFunc::one(p);
        }
        m
    }

    pub fn from_rows(p: u8, cols: usize, rows: &[Vector]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!("row {i} has length {}, expected {cols}", r.len())));
            }
            data.extend(r.iter().cloned());
        }
        Ok(Matrix { p, rows: rows.len(), cols, data })
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_columns(p: u8, rows: usize, cols: &[Vector]) -> Result<Self> {
        Ok(Self::from_rows(p, rows, cols)?.transpose())
    }

    pub fn characteristic(&self) -> u8 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFunc {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RatFunc) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[RatFunc] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[RatFunc] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        vec_ops::is_zero(&self.data)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix { p: self.p, rows: self.rows, cols: self.cols, data: vec_ops::add(&self.data, &other.data) }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix { p: self.p, rows: self.rows, cols: self.cols, data: vec_ops::sub(&self.data, &other.data) }
    }

    pub fn scale(&self, c: &RatFunc) -> Matrix {
        Matrix { p: self.p, rows: self.rows, cols: self.cols, data: vec_ops::scale(c, &self.data) }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                vec_ops::axpy(&mut out.data[i * other.cols..(i + 1) * other.cols], a, row);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[RatFunc]) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = RatFunc::zero(self.p);
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, e: u32) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let mut acc = Matrix::identity(self.p, self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }

    fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv().expect("pivot is nonzero");
            for j in c..m.cols {
                let v = &m.data[r * m.cols + j] * &inv;
                m.data[r * m.cols + j] = v;
            }
            let pivot_row: Vector = m.row(r).to_vec();
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                let cols = m.cols;
                vec_ops::axpy(&mut m.data[i * cols..(i + 1) * cols], &-f, &pivot_row);
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: m, pivots }
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let e = self.echelon();
        (e.reduced, e.pivots)
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of `{x : M x = 0}`, returned in reduced echelon form so that the
    /// basis is canonical for the subspace.
    pub fn kernel(&self) -> Vec<Vector> {
        let e = self.echelon();
        let raw = Self::kernel_from_echelon(&e, self.cols);
        Self::canonical_basis(self.p, self.cols, &raw)
    }

    fn kernel_from_echelon(e: &Echelon, cols: usize) -> Vec<Vector> {
        let p = e.reduced.p;
        let free: Vec<usize> = (0..cols).filter(|c| !e.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![RatFunc::zero(p); cols];
                v[f] = RatFunc::one(p);
                for (r, &pc) in e.pivots.iter().enumerate() {
                    v[pc] = -e.reduced.get(r, f);
                }
                v
            })
            .collect()
    }

    /// Reduced echelon basis of the span of `vectors`.
    pub fn canonical_basis(p: u8, dim: usize, vectors: &[Vector]) -> Vec<Vector> {
        if vectors.is_empty() {
            return Vec::new();
        }
        let m = Matrix::from_rows(p, dim, vectors).expect("consistent lengths");
        let e = m.echelon();
        (0..e.pivots.len()).map(|r| e.reduced.row(r).to_vec()).collect()
    }

    /// Solves `M x = b` exactly.
    pub fn solve(&self, b: &[RatFunc]) -> Result<Solution> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut aug = Matrix::zeros(self.p, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let e = aug.echelon();
        if e.pivots.last() == Some(&self.cols) {
            return Ok(Solution::Inconsistent);
        }
        let mut x = vec![RatFunc::zero(self.p); self.cols];
        for (r, &pc) in e.pivots.iter().enumerate() {
            x[pc] = e.reduced.get(r, self.cols).clone();
        }
        let kernel = self.kernel();
        Ok(Solution::Solved { x, kernel })
    }

    /// Convenience wrapper returning only a particular solution.
    pub fn solve_particular(&self, b: &[RatFunc]) -> Result<Option<Vector>> {
        Ok(match self.solve(b)? {
            Solution::Solved { x, .. } => Some(x),
            Solution::Inconsistent => None,
        })
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows).map(|i| vec_ops::show(self.row(i))).collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::BaseField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(k: &BaseField, r: usize, c: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let rows: Vec<Vector> = (0..r).map(|_| k.random_vector(c, rng)).collect();
        Matrix::from_rows(k.p(), c, &rows).unwrap()
    }

    #[test]
    fn identity_solves_to_rhs() {
        let k = BaseField::prime(5).unwrap();
        let b = vec![k.constant(1), k.constant(4), k.constant(2)];
        let sol = Matrix::identity(5, 3).solve(&b).unwrap();
        assert_eq!(sol, Solution::Solved { x: b, kernel: vec![] });
    }

    #[test]
    fn zero_matrix_with_nonzero_rhs_is_inconsistent() {
        let k = BaseField::prime(3).unwrap();
        let sol = Matrix::zeros(3, 2, 2).solve(&[k.one(), k.zero()]).unwrap();
        assert_eq!(sol, Solution::Inconsistent);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        assert!(matches!(Matrix::identity(2, 2).solve(&[RatFunc::one(2)]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn planted_solutions_are_recovered() {
        let k = BaseField::prime(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = random_matrix(&k, 4, 4, &mut rng);
            let x0 = k.random_vector(4, &mut rng);
            let b = m.mul_vec(&x0);
            match m.solve(&b).unwrap() {
                Solution::Solved { x, kernel } => {
                    assert_eq!(m.mul_vec(&x), b);
                    assert_eq!(kernel.len(), 4 - m.rank());
                    for v in &kernel {
                        assert!(vec_ops::is_zero(&m.mul_vec(v)));
                    }
                    if kernel.is_empty() {
                        assert_eq!(x, x0);
                    }
                }
                Solution::Inconsistent => panic!("planted system reported inconsistent"),
            }
        }
    }

    #[test]
    fn rank_examples() {
        let k = BaseField::rational(3).unwrap();
        assert_eq!(Matrix::identity(3, 5).rank(), 5);
        assert_eq!(Matrix::zeros(3, 4, 6).rank(), 0);
        let u = [k.t(), k.one(), k.constant(2)];
        let v = vec![k.one(), k.zero(), &k.t() + &k.one()];
        let rows: Vec<Vector> = u.iter().map(|a| vec_ops::scale(a, &v)).collect();
        let outer = Matrix::from_rows(3, 3, &rows).unwrap();
        // every 2x2 minor vanishes
        for (i1, i2) in [(0, 1), (0, 2), (1, 2)] {
            for (j1, j2) in [(0, 1), (0, 2), (1, 2)] {
                let minor = outer.get(i1, j1) * outer.get(i2, j2) - outer.get(i1, j2) * outer.get(i2, j1);
                assert!(minor.is_zero());
            }
        }
        assert_eq!(outer.rank(), 1);
    }

    #[test]
    fn rank_equals_transpose_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = BaseField::rational(2).unwrap();
        for _ in 0..20 {
            let m = random_matrix(&k, 3, 5, &mut rng);
            assert_eq!(m.rank(), m.transpose().rank());
            assert!(m.rank() <= 3);
        }
    }

    #[test]
    fn kernel_is_canonical() {
        let k = BaseField::prime(2).unwrap();
        let m = Matrix::from_rows(2, 3, &[vec![k.one(), k.one(), k.zero()]]).unwrap();
        let ker = m.kernel();
        assert_eq!(ker, vec![vec![k.one(), k.one(), k.zero()], vec![k.zero(), k.zero(), k.one()]]);
    }
}
