//! Finite-dimensional associative algebras given by a multiplication table.

use serde_json::json;

use crate::error::{Error, Result};
use crate::field::{vec_ops, BaseField, ExprDomain, RatFunc, Vector};
use crate::linalg::Matrix;
use crate::report::Report;

/// An associative unital k-algebra with a fixed k-basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssocAlgebra {
    field: BaseField,
    names: Vec<String>,
    /// `table[i * n + j]` is the product `e_i * e_j`.
    table: Vec<Vector>,
    unit: Vector,
}

impl AssocAlgebra {
    /// Builds the algebra and verifies associativity and the unit on all basis triples.
    pub fn from_table(field: BaseField, names: Vec<String>, table: Vec<Vector>, unit: Vector) -> Result<Self> {
        let a = Self::from_table_unchecked(field, names, table, unit)?;
        let report = a.check();
        if !report.passed {
            return Err(Error::NotAssociative(report.first_failure().unwrap_or_default()));
        }
        Ok(a)
    }

    /// Builds the algebra checking only shapes.
    pub fn from_table_unchecked(field: BaseField, names: Vec<String>, table: Vec<Vector>, unit: Vector) -> Result<Self> {
        let n = names.len();
        if table.len() != n * n {
            return Err(Error::DimensionMismatch(format!("multiplication table has {} entries, expected {}", table.len(), n * n)));
        }
        if let Some(bad) = table.iter().chain(std::iter::once(&unit)).find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch(format!("coefficient vector of length {}, expected {n}", bad.len())));
        }
        if let Some(x) = table.iter().flatten().chain(&unit).find(|x| !field.contains(x)) {
            return Err(Error::NotInBaseField(x.to_string()));
        }
        Ok(AssocAlgebra { field, names, table, unit })
    }

    /// Builds the algebra from a product rule on basis indices.
    pub fn from_fn(field: BaseField, names: Vec<String>, unit: Vector, f: impl Fn(usize, usize) -> Vector) -> Result<Self> {
        let n = names.len();
        let table = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::from_table(field, names, table, unit)
    }

    /// Full matrix algebra M_n(k) with basis `E_ij` at index `i * n + j`.
    pub fn matrix_algebra(field: BaseField, n: usize) -> Self {
        let dim = n * n;
        let names = (0..dim).map(|k| format!("E{}{}", k / n + 1, k % n + 1)).collect();
        let mut unit = field.zeros(dim);
        for i in 0..n {
            unit[i * n + i] = field.one();
        }
        let table = (0..dim * dim)
            .map(|k| {
                let (a, b) = (k / dim, k % dim);
                let (i, j) = (a / n, a % n);
                let (l, m) = (b / n, b % n);
                if j == l {
                    field.unit_vector(dim, i * n + m)
                } else {
                    field.zeros(dim)
                }
            })
            .collect();
        AssocAlgebra { field, names, table, unit }
    }

    /// The product algebra `A x B` with componentwise multiplication.
    pub fn direct_sum(a: &AssocAlgebra, b: &AssocAlgebra) -> Result<Self> {
        if a.field != b.field {
            return Err(Error::CharacteristicMismatch { expected: a.p(), found: b.p() });
        }
        let (n, m) = (a.dim(), b.dim());
        let names = a.names.iter().map(|s| format!("{s}.1")).chain(b.names.iter().map(|s| format!("{s}.2"))).collect();
        let unit = a.unit.iter().chain(&b.unit).cloned().collect();
        let field = a.field;
        let table = (0..(n + m) * (n + m))
            .map(|k| {
                let (i, j) = (k / (n + m), k % (n + m));
                let mut v = field.zeros(n + m);
                if i < n && j < n {
                    v[..n].clone_from_slice(a.mul_basis(i, j));
                } else if i >= n && j >= n {
                    v[n..].clone_from_slice(b.mul_basis(i - n, j - n));
                }
                v
            })
            .collect();
        Ok(AssocAlgebra { field, names, table, unit })
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn p(&self) -> u8 {
        self.field.p()
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vector] {
        &self.table
    }

    pub fn one(&self) -> Vector {
        self.unit.clone()
    }

    pub fn zero(&self) -> Vector {
        self.field.zeros(self.dim())
    }

    pub fn basis(&self, i: usize) -> Vector {
        self.field.unit_vector(self.dim(), i)
    }

    /// `c * 1`
    pub fn scalar(&self, c: &RatFunc) -> Vector {
        vec_ops::scale(c, &self.unit)
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> &Vector {
        &self.table[i * self.dim() + j]
    }

    pub fn mul(&self, a: &[RatFunc], b: &[RatFunc]) -> Vector {
        let n = self.dim();
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                vec_ops::axpy(&mut out, &(x * y), &self.table[i * n + j]);
            }
        }
        out
    }

    pub fn pow(&self, a: &[RatFunc], e: u64) -> Vector {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// `ab - ba`
    pub fn commutator(&self, a: &[RatFunc], b: &[RatFunc]) -> Vector {
        vec_ops::sub(&self.mul(a, b), &self.mul(b, a))
    }

    /// Matrix of `x -> a x`.
    pub fn left_mul(&self, a: &[RatFunc]) -> Matrix {
        let cols: Vec<Vector> = (0..self.dim()).map(|j| self.mul(a, &self.basis(j))).collect();
        Matrix::from_columns(self.p(), self.dim(), &cols).expect("square")
    }

    /// Matrix of `x -> x a`.
    pub fn right_mul(&self, a: &[RatFunc]) -> Matrix {
        let cols: Vec<Vector> = (0..self.dim()).map(|j| self.mul(&self.basis(j), a)).collect();
        Matrix::from_columns(self.p(), self.dim(), &cols).expect("square")
    }

    /// Matrix of `x -> xa - ax`.
    pub fn commutator_map(&self, a: &[RatFunc]) -> Matrix {
        self.right_mul(a).sub(&self.left_mul(a))
    }

    /// Associativity and the two-sided unit law on all basis triples.
    pub fn check(&self) -> Report {
        let n = self.dim();
        let mut report = Report::new("associative algebra");
        let mut c = report.check("(xy)z = x(yz)");
        for i in 0..n {
            for j in 0..n {
                let ij = self.mul_basis(i, j);
                for k in 0..n {
                    let lhs = self.mul(ij, &self.basis(k));
                    let rhs = self.mul(&self.basis(i), self.mul_basis(j, k));
                    c.case(lhs == rhs, || json!([self.names[i], self.names[j], self.names[k]]));
                }
            }
        }
        c.finish();
        let mut c = report.check("1x = x = x1");
        for i in 0..n {
            let e = self.basis(i);
            c.case(self.mul(&self.unit, &e) == e && self.mul(&e, &self.unit) == e, || json!(self.names[i]));
        }
        c.finish();
        report
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i + 1..n).all(|j| self.mul_basis(i, j) == self.mul_basis(j, i)))
    }

    /// k-basis of the subalgebra commuting with every element of `gens`.
    pub fn centralizer(&self, gens: &[Vector]) -> Vec<Vector> {
        let n = self.dim();
        if gens.is_empty() {
            return (0..n).map(|i| self.basis(i)).collect();
        }
        let rows: Vec<Vector> = gens
            .iter()
            .flat_map(|g| {
                let m = self.commutator_map(g);
                (0..n).map(move |i| m.row(i).to_vec())
            })
            .collect();
        Matrix::from_rows(self.p(), n, &rows).expect("rows have algebra dimension").kernel()
    }

    /// k-basis of the center.
    pub fn center(&self) -> Vec<Vector> {
        let gens: Vec<Vector> = (0..self.dim()).map(|i| self.basis(i)).collect();
        self.centralizer(&gens)
    }

    /// Rank of the sandwich map `A (x) A^op -> End_k(A)`, `a (x) b -> (x -> a x b)`.
    pub fn sandwich_rank(&self) -> usize {
        let n = self.dim();
        let cols: Vec<Vector> = (0..n * n)
            .map(|k| {
                let (a, b) = (self.basis(k / n), self.basis(k % n));
                let mut col = Vec::with_capacity(n * n);
                for j in 0..n {
                    let axb = self.mul(&self.mul(&a, &self.basis(j)), &b);
                    col.extend(axb);
                }
                col
            })
            .collect();
        Matrix::from_columns(self.p(), n * n, &cols).expect("square").rank()
    }

    /// True when the sandwich map is bijective.
    pub fn is_central_simple(&self) -> bool {
        self.sandwich_rank() == self.dim() * self.dim()
    }

    /// Renders an element as a sum of scaled basis names.
    pub fn show(&self, a: &[RatFunc]) -> String {
        let terms: Vec<String> = a
            .iter()
            .zip(&self.names)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, name)| {
                let c_str = c.to_string();
                if c.is_one() {
                    name.clone()
                } else if name == "1" {
                    c_str
                } else if c_str.contains(['+', '-', '/']) {
                    format!("({c_str})*{name}")
                } else {
                    format!("{c_str}*{name}")
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Parses an element written in the coefficient grammar over the basis names.
    pub fn parse(&self, text: &str) -> Result<Vector, crate::field::ExprError> {
        crate::field::parse_expr(text)?.eval(self)
    }
}

impl ExprDomain for AssocAlgebra {
    type Value = Vector;

    fn scalar(&self, c: RatFunc) -> Vector {
        AssocAlgebra::scalar(self, &c)
    }

    fn symbol(&self, name: &str) -> Option<Vector> {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Some(self.basis(i));
        }
        self.field.symbol(name).map(|c| AssocAlgebra::scalar(self, &c))
    }

    fn add(&self, a: &Vector, b: &Vector) -> Vector {
        vec_ops::add(a, b)
    }

    fn sub(&self, a: &Vector, b: &Vector) -> Vector {
        vec_ops::sub(a, b)
    }

    fn mul(&self, a: &Vector, b: &Vector) -> Vector {
        AssocAlgebra::mul(self, a, b)
    }

    fn neg(&self, a: &Vector) -> Vector {
        vec_ops::neg(a)
    }

    fn div(&self, a: &Vector, b: &Vector) -> Option<Vector> {
        // a * b^{-1}, with b^{-1} solving b y = 1
        let inv = self.left_mul(b).solve_particular(&self.unit).ok().flatten()?;
        if self.mul(&inv, b) != self.unit {
            return None;
        }
        Some(AssocAlgebra::mul(self, a, &inv))
    }

    fn one(&self) -> Vector {
        AssocAlgebra::one(self)
    }

    fn characteristic(&self) -> u8 {
        self.p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_algebra_is_central_simple() {
        let k = BaseField::prime(2).unwrap();
        let m2 = AssocAlgebra::matrix_algebra(k, 2);
        assert!(m2.check().passed);
        assert_eq!(m2.center().len(), 1);
        assert_eq!(m2.sandwich_rank(), 16);
        assert!(!m2.is_commutative());
    }

    #[test]
    fn direct_sum_is_not_simple() {
        let k = BaseField::prime(3).unwrap();
        let m = AssocAlgebra::matrix_algebra(k, 1);
        let s = AssocAlgebra::direct_sum(&m, &m).unwrap();
        assert!(s.check().passed);
        assert_eq!(s.center().len(), 2);
        assert!(!s.is_central_simple());
    }

    #[test]
    fn non_associative_table_is_rejected() {
        let k = BaseField::prime(2).unwrap();
        // unit 1, x*x = y, x*y = x, everything else zero: (xx)y = 0 but x(xy) = y
        let names: Vec<String> = ["1", "x", "y"].iter().map(|s| s.to_string()).collect();
        let r = AssocAlgebra::from_fn(k, names, k.unit_vector(3, 0), |i, j| match (i, j) {
            (0, j) => k.unit_vector(3, j),
            (i, 0) => k.unit_vector(3, i),
            (1, 1) => k.unit_vector(3, 2),
            (1, 2) => k.unit_vector(3, 1),
            _ => k.zeros(3),
        });
        assert!(matches!(r, Err(Error::NotAssociative(_))));
    }

    #[test]
    fn parses_and_divides() {
        let k = BaseField::prime(2).unwrap();
        let m2 = AssocAlgebra::matrix_algebra(k, 2);
        let x = m2.parse("E12 + E21").unwrap();
        assert_eq!(m2.mul(&x, &x), m2.one());
        assert_eq!(m2.parse("E11 / (E12 + E21)").unwrap(), m2.parse("E12").unwrap());
        assert!(m2.parse("1 / E11").is_err());
    }
}
