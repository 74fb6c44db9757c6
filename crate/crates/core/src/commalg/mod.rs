//! Commutative k-algebras, their derivations, and the p-th power of a derivation.

mod assoc;
mod insep;

pub use assoc::AssocAlgebra;
pub use insep::InsepExtension;

use std::ops::Deref;

use rand::Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::field::{vec_ops, BaseField, RatFunc, Vector};
use crate::linalg::Matrix;
use crate::report::{CheckConfig, Report};

/// A finite-dimensional commutative, associative, unital k-algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommAlgebra {
    inner: AssocAlgebra,
}

impl Deref for CommAlgebra {
    type Target = AssocAlgebra;
    fn deref(&self) -> &AssocAlgebra {
        &self.inner
    }
}

impl CommAlgebra {
    /// Validates commutativity, associativity and the unit on all basis triples.
    pub fn new(field: BaseField, names: Vec<String>, table: Vec<Vector>, unit: Vector) -> Result<Self> {
        Self::from_assoc(AssocAlgebra::from_table(field, names, table, unit)?)
    }

    pub fn from_assoc(inner: AssocAlgebra) -> Result<Self> {
        if !inner.is_commutative() {
            return Err(Error::InvalidAlgebra("multiplication is not commutative".into()));
        }
        Ok(CommAlgebra { inner })
    }

    /// The ground field as a one-dimensional algebra.
    pub fn ground(field: BaseField) -> Self {
        Self::truncated(field, &[])
    }

    /// `k[x]/(x^n)` with basis `1, x, ..., x^{n-1}`.
    pub fn truncated_polynomial(field: BaseField, var: &str, n: u32) -> Self {
        Self::truncated(field, &[(var, n)])
    }

    /// `k[x_1, ..., x_m]/(x_1^{n_1}, ..., x_m^{n_m})` with the monomial basis in
    /// lexicographic exponent order.
    pub fn truncated(field: BaseField, vars: &[(&str, u32)]) -> Self {
        let mut exps: Vec<Vec<u32>> = vec![vec![]];
        for &(_, n) in vars {
            exps = exps.into_iter().flat_map(|e| (0..n).map(move |k| [e.clone(), vec![k]].concat())).collect();
        }
        let names: Vec<String> = exps
            .iter()
            .map(|e| {
                let parts: Vec<String> = e
                    .iter()
                    .zip(vars)
                    .filter(|(k, _)| **k > 0)
                    .map(|(&k, (v, _))| if k == 1 { v.to_string() } else { format!("{v}^{k}") })
                    .collect();
                if parts.is_empty() {
                    "1".into()
                } else {
                    parts.join("*")
                }
            })
            .collect();
        let dim = exps.len();
        let table = (0..dim * dim)
            .map(|k| {
                let (a, b) = (&exps[k / dim], &exps[k % dim]);
                let prod: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if prod.iter().zip(vars).any(|(e, (_, n))| e >= n) {
                    field.zeros(dim)
                } else {
                    field.unit_vector(dim, exps.iter().position(|e| *e == prod).unwrap())
                }
            })
            .collect();
        let inner = AssocAlgebra::from_table_unchecked(field, names, table, field.unit_vector(dim, 0))
            .expect("monomial table has consistent shapes");
        CommAlgebra { inner }
    }

    pub fn as_assoc(&self) -> &AssocAlgebra {
        &self.inner
    }

    /// The p-th power map `a -> a^p` of the algebra.
    pub fn frobenius(&self, a: &[RatFunc]) -> Vector {
        self.pow(a, self.p() as u64)
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        self.field().random_vector(self.dim(), rng)
    }

    /// Random derivation: a random combination of the derivation-space basis.
    pub fn random_derivation<R: Rng + ?Sized>(&self, basis: &[Derivation], rng: &mut R) -> Derivation {
        let mut m = Matrix::zeros(self.p(), self.dim(), self.dim());
        for d in basis {
            m = m.add(&d.matrix.scale(&self.field().random(rng)));
        }
        Derivation { matrix: m }
    }
}

/// A k-linear map `A -> A`, stored by its matrix (column j is the image of `e_j`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    matrix: Matrix,
}

impl Derivation {
    /// Wraps a matrix without checking the Leibniz rule.
    pub fn from_matrix(matrix: Matrix) -> Self {
        Derivation { matrix }
    }

    /// The derivation sending `e_j` to `images[j]`; fails if Leibniz does not hold.
    pub fn from_images(a: &CommAlgebra, images: &[Vector]) -> Result<Self> {
        let m = Matrix::from_columns(a.p(), a.dim(), images)?;
        let d = Derivation { matrix: m };
        if let Some(w) = d.leibniz_defect(a) {
            return Err(Error::InvalidAlgebra(format!("not a derivation: Leibniz fails on {w}")));
        }
        Ok(d)
    }

    pub fn zero(a: &CommAlgebra) -> Self {
        Derivation { matrix: Matrix::zeros(a.p(), a.dim(), a.dim()) }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn apply(&self, a: &[RatFunc]) -> Vector {
        self.matrix.mul_vec(a)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// `a * D`, the derivation `x -> a D(x)`.
    pub fn scaled(&self, alg: &CommAlgebra, a: &[RatFunc]) -> Derivation {
        Derivation { matrix: alg.left_mul(a).mul(&self.matrix) }
    }

    /// The first basis pair `(e_i, e_j)` on which Leibniz fails.
    pub fn leibniz_defect(&self, a: &CommAlgebra) -> Option<String> {
        let n = a.dim();
        for i in 0..n {
            for j in i..n {
                let (ei, ej) = (a.basis(i), a.basis(j));
                let lhs = self.apply(a.mul_basis(i, j));
                let rhs = vec_ops::add(&a.mul(&ei, &self.apply(&ej)), &a.mul(&self.apply(&ei), &ej));
                if lhs != rhs {
                    return Some(format!("({}, {})", a.names()[i], a.names()[j]));
                }
            }
        }
        None
    }

    pub fn is_derivation(&self, a: &CommAlgebra) -> bool {
        self.leibniz_defect(a).is_none()
    }
}

/// A k-basis of `Der_k(A)`, in canonical (reduced echelon) form.
///
/// The unknowns are the matrix entries `D[i][j]` at index `i * dim + j`.
pub fn derivation_space(a: &CommAlgebra) -> Vec<Derivation> {
    let n = a.dim();
    let k = a.field();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i..n {
            // D(e_i e_j) - e_i D(e_j) - D(e_i) e_j = 0, one row per output coordinate
            for r in 0..n {
                let mut row = k.zeros(n * n);
                for (c, coef) in a.mul_basis(i, j).iter().enumerate() {
                    row[r * n + c] += coef;
                }
                for l in 0..n {
                    row[l * n + j] -= &a.mul_basis(i, l)[r];
                    row[l * n + i] -= &a.mul_basis(l, j)[r];
                }
                rows.push(row);
            }
        }
    }
    let kernel = if rows.is_empty() {
        (0..n * n).map(|u| k.unit_vector(n * n, u)).collect()
    } else {
        Matrix::from_rows(k.p(), n * n, &rows).expect("rows have n^2 entries").kernel()
    };
    kernel
        .into_iter()
        .map(|v| {
            let rows: Vec<Vector> = v.chunks(n).map(|c| c.to_vec()).collect();
            Derivation { matrix: Matrix::from_rows(k.p(), n, &rows).expect("square") }
        })
        .collect()
}

/// `D^p`, which is again a derivation in characteristic p.
pub fn p_power_derivation(a: &CommAlgebra, d: &Derivation) -> Result<Derivation> {
    if let Some(w) = d.leibniz_defect(a) {
        return Err(Error::InvalidAlgebra(format!("input is not a derivation: Leibniz fails on {w}")));
    }
    let dp = Derivation { matrix: d.matrix.pow(a.p() as u32) };
    if let Some(w) = dp.leibniz_defect(a) {
        return Err(Error::Verification(format!("D^p violates Leibniz on {w}")));
    }
    Ok(dp)
}

/// Which version of `(aD)^p = a^p D^p + (aD)^{p-1}(a) D` to evaluate.
///
/// Everything except `Correct` is a deliberate corruption used to confirm the
/// checker can tell the identity apart from near misses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HochschildForm {
    Correct,
    /// `a^p D^p`
    DropCorrection,
    /// `a D^p + (aD)^{p-1}(a) D`
    DropFrobenius,
    /// `a^p D^p + D^{p-1}(a) D`
    WrongIterate,
    /// `a^p D^p + D o (aD)^{p-1}(a)`, multiplication applied after `D`
    CorrectionOnRight,
    /// `a^p D^p + 2 (aD)^{p-1}(a) D`
    DoubleCorrection,
    /// `a^p D^p - (aD)^{p-1}(a) D`
    Negate,
}

impl HochschildForm {
    pub const ALL: [HochschildForm; 7] = [
        HochschildForm::Correct,
        HochschildForm::DropCorrection,
        HochschildForm::DropFrobenius,
        HochschildForm::WrongIterate,
        HochschildForm::CorrectionOnRight,
        HochschildForm::DoubleCorrection,
        HochschildForm::Negate,
    ];

    /// The corruptions that differ from the true formula in characteristic `p`.
    /// Negation is the identity in characteristic 2.
    pub fn mutations(p: u8) -> Vec<HochschildForm> {
        Self::ALL.iter().copied().filter(|f| *f != HochschildForm::Correct && !(p == 2 && *f == HochschildForm::Negate)).collect()
    }
}

/// The right-hand side of the relation as a matrix, in the requested form.
pub fn hochschild_rhs(a: &CommAlgebra, x: &[RatFunc], d: &Derivation, form: HochschildForm) -> Matrix {
    let p = a.p() as u32;
    let ad = d.scaled(a, x);
    let iterate = |m: &Matrix| m.pow(p - 1).mul_vec(x);
    let correction = match form {
        HochschildForm::WrongIterate => iterate(&d.matrix),
        _ => iterate(&ad.matrix),
    };
    let frob = match form {
        HochschildForm::DropFrobenius => x.to_vec(),
        _ => a.frobenius(x),
    };
    let lead = a.left_mul(&frob).mul(&d.matrix.pow(p));
    let corr = match form {
        HochschildForm::CorrectionOnRight => d.matrix.mul(&a.left_mul(&correction)),
        _ => a.left_mul(&correction).mul(&d.matrix),
    };
    match form {
        HochschildForm::DropCorrection => lead,
        HochschildForm::DoubleCorrection => lead.add(&corr).add(&corr),
        HochschildForm::Negate => lead.sub(&corr),
        _ => lead.add(&corr),
    }
}

/// Evaluates `(aD)^p` against the chosen form of the right-hand side.
pub fn hochschild_relation_check(a: &CommAlgebra, x: &[RatFunc], d: &Derivation, form: HochschildForm) -> Report {
    let mut report = Report::new("Hochschild relation");
    let lhs = d.scaled(a, x).matrix.pow(a.p() as u32);
    let rhs = hochschild_rhs(a, x, d, form);
    let mut c = report.check("(aD)^p = a^p D^p + (aD)^{p-1}(a) D");
    c.case(lhs == rhs, || json!({ "a": a.show(x), "D": d.matrix.to_string() }));
    c.finish();
    report
}

/// Runs the relation on `config.samples` random pairs `(a, D)`.
pub fn hochschild_suite(a: &CommAlgebra, config: &CheckConfig, form: HochschildForm) -> Report {
    let basis = derivation_space(a);
    let mut rng = config.rng("hochschild");
    let mut report = Report::new("Hochschild relation");
    let mut c = report.check("(aD)^p = a^p D^p + (aD)^{p-1}(a) D");
    let p = a.p() as u32;
    for _ in 0..config.samples {
        let x = a.random_element(&mut rng);
        let d = a.random_derivation(&basis, &mut rng);
        let lhs = d.scaled(a, &x).matrix.pow(p);
        let rhs = hochschild_rhs(a, &x, &d, form);
        c.case(lhs == rhs, || json!({ "a": a.show(&x), "D": d.matrix.to_string() }));
    }
    c.finish();
    report
}
