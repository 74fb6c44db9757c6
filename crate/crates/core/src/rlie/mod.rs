//! Restricted Lie algebras by structure constants.

mod free;

pub use free::{free_restricted_lie, FreeRestrictedLie};

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::json;

use crate::commalg::AssocAlgebra;
use crate::error::{Error, Result};
use crate::field::{vec_ops, BaseField, RatFunc, Vector};
use crate::linalg::Matrix;
use crate::report::{CheckConfig, Report};

/// A finite-dimensional Lie algebra over k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    field: BaseField,
    names: Vec<String>,
    /// `table[i * n + j] = [e_i, e_j]`
    table: Vec<Vector>,
}

impl LieAlgebra {
    /// Checks shapes only; use [`LieAlgebra::check`] for the axioms.
    pub fn new(field: BaseField, names: Vec<String>, table: Vec<Vector>) -> Result<Self> {
        let n = names.len();
        if table.len() != n * n {
            return Err(Error::DimensionMismatch(format!("bracket table has {} entries, expected {}", table.len(), n * n)));
        }
        if let Some(v) = table.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch(format!("bracket value of length {}, expected {n}", v.len())));
        }
        if let Some(x) = table.iter().flatten().find(|x| !field.contains(x)) {
            return Err(Error::NotInBaseField(x.to_string()));
        }
        Ok(LieAlgebra { field, names, table })
    }

    pub fn from_fn(field: BaseField, names: Vec<String>, f: impl Fn(usize, usize) -> Vector) -> Result<Self> {
        let n = names.len();
        Self::new(field, names, (0..n * n).map(|k| f(k / n, k % n)).collect())
    }

    pub fn abelian(field: BaseField, names: Vec<String>) -> Self {
        let n = names.len();
        LieAlgebra { field, names, table: vec![field.zeros(n); n * n] }
    }

    /// The commutator algebra of an associative algebra.
    pub fn from_associative(b: &AssocAlgebra) -> Self {
        let n = b.dim();
        let table = (0..n * n).map(|k| b.commutator(&b.basis(k / n), &b.basis(k % n))).collect();
        LieAlgebra { field: b.field(), names: b.names().to_vec(), table }
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

    pub fn basis(&self, i: usize) -> Vector {
        self.field.unit_vector(self.dim(), i)
    }

    pub fn zero(&self) -> Vector {
        self.field.zeros(self.dim())
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &Vector {
        &self.table[i * self.dim() + j]
    }

    pub fn bracket(&self, x: &[RatFunc], y: &[RatFunc]) -> Vector {
        let n = self.dim();
        let mut out = self.zero();
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                vec_ops::axpy(&mut out, &(a * b), &self.table[i * n + j]);
            }
        }
        out
    }

    /// Matrix of `ad_x = [x, -]`.
    pub fn ad(&self, x: &[RatFunc]) -> Matrix {
        let cols: Vec<Vector> = (0..self.dim()).map(|j| self.bracket(x, &self.basis(j))).collect();
        Matrix::from_columns(self.p(), self.dim(), &cols).expect("square")
    }

    /// Antisymmetry and the Jacobi identity on all basis pairs and triples.
    pub fn check(&self) -> Report {
        let n = self.dim();
        let mut report = Report::new("Lie algebra");
        let mut c = report.check("[x,x] = 0 and [x,y] = -[y,x]");
        for i in 0..n {
            c.case(vec_ops::is_zero(self.bracket_basis(i, i)), || json!([self.names[i], self.names[i]]));
            for j in i + 1..n {
                let s = vec_ops::add(self.bracket_basis(i, j), self.bracket_basis(j, i));
                c.case(vec_ops::is_zero(&s), || json!([self.names[i], self.names[j]]));
            }
        }
        c.finish();
        let mut c = report.check("Jacobi identity");
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (x, y, z) = (self.basis(i), self.basis(j), self.basis(k));
                    let mut s = self.bracket(&x, self.bracket_basis(j, k));
                    vec_ops::add_assign(&mut s, &self.bracket(&y, self.bracket_basis(k, i)));
                    vec_ops::add_assign(&mut s, &self.bracket(&z, self.bracket_basis(i, j)));
                    c.case(vec_ops::is_zero(&s), || json!([self.names[i], self.names[j], self.names[k]]));
                }
            }
        }
        c.finish();
        report
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        self.field.random_vector(self.dim(), rng)
    }

    pub fn show(&self, x: &[RatFunc]) -> String {
        show_combination(&self.names, x)
    }
}

pub(crate) fn show_combination(names: &[String], x: &[RatFunc]) -> String {
    let terms: Vec<String> = x
        .iter()
        .zip(names)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, name)| {
            let c_str = c.to_string();
            if c.is_one() {
                name.clone()
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

/// A polynomial in a formal parameter `lambda` with coefficients in L.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaPoly {
    coeffs: Vec<Vector>,
}

impl LambdaPoly {
    pub fn constant(v: Vector) -> Self {
        LambdaPoly { coeffs: vec![v] }
    }

    pub fn coefficient(&self, i: usize) -> Option<&Vector> {
        self.coeffs.get(i)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `[lambda x + y, self]`
    pub fn ad_linear(&self, lie: &LieAlgebra, x: &[RatFunc], y: &[RatFunc]) -> LambdaPoly {
        let mut coeffs = vec![lie.zero(); self.coeffs.len() + 1];
        for (k, w) in self.coeffs.iter().enumerate() {
            vec_ops::add_assign(&mut coeffs[k + 1], &lie.bracket(x, w));
            vec_ops::add_assign(&mut coeffs[k], &lie.bracket(y, w));
        }
        LambdaPoly { coeffs }
    }
}

/// `[s_1(x,y), ..., s_{p-1}(x,y)]` where `i s_i(x,y)` is the coefficient of
/// `lambda^{i-1}` in `ad_{lambda x + y}^{p-1}(x)`.
pub fn s_coefficients(lie: &LieAlgebra, x: &[RatFunc], y: &[RatFunc]) -> Vec<Vector> {
    let p = lie.p() as usize;
    let mut w = LambdaPoly::constant(x.to_vec());
    for _ in 0..p - 1 {
        w = w.ad_linear(lie, x, y);
    }
    (1..p)
        .map(|i| {
            let inv = RatFunc::constant(lie.p(), i as i64).inv().expect("i < p");
            vec_ops::scale(&inv, w.coefficient(i - 1).expect("degree p-1"))
        })
        .collect()
}

/// A Lie algebra with p-map images of its basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedLie {
    lie: LieAlgebra,
    pmap: Vec<Vector>,
}

impl RestrictedLie {
    /// Checks shapes only; use [`check_restricted`] for the axioms.
    pub fn new(lie: LieAlgebra, pmap: Vec<Vector>) -> Result<Self> {
        let n = lie.dim();
        if pmap.len() != n || pmap.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch(format!("p-map needs {n} images of length {n}")));
        }
        Ok(RestrictedLie { lie, pmap })
    }

    pub fn lie(&self) -> &LieAlgebra {
        &self.lie
    }

    pub fn pmap(&self) -> &[Vector] {
        &self.pmap
    }

    pub fn dim(&self) -> usize {
        self.lie.dim()
    }

    pub fn p(&self) -> u8 {
        self.lie.p()
    }

    pub fn field(&self) -> BaseField {
        self.lie.field()
    }

    pub fn names(&self) -> &[String] {
        self.lie.names()
    }

    pub fn bracket(&self, x: &[RatFunc], y: &[RatFunc]) -> Vector {
        self.lie.bracket(x, y)
    }

    /// `v^[p]`, peeling the terms of `v` in index order.
    pub fn p_map_eval(&self, v: &[RatFunc]) -> Vector {
        let order: Vec<usize> = (0..v.len()).collect();
        self.p_map_eval_ordered(v, &order)
    }

    /// `v^[p]` computed by adding the terms `a_i u_i` of `v` in the given order,
    /// using `(x+y)^[p] = x^[p] + y^[p] + sum_i s_i(x,y)` and `(a u)^[p] = a^p u^[p]`.
    pub fn p_map_eval_ordered(&self, v: &[RatFunc], order: &[usize]) -> Vector {
        let mut acc = self.lie.zero();
        let mut out = self.lie.zero();
        for &i in order {
            if v[i].is_zero() {
                continue;
            }
            let mut term = self.lie.zero();
            term[i] = v[i].clone();
            vec_ops::axpy(&mut out, &v[i].frobenius(), &self.pmap[i]);
            if !vec_ops::is_zero(&acc) {
                for s in s_coefficients(&self.lie, &acc, &term) {
                    vec_ops::add_assign(&mut out, &s);
                }
            }
            vec_ops::add_assign(&mut acc, &term);
        }
        out
    }

    pub fn show(&self, x: &[RatFunc]) -> String {
        self.lie.show(x)
    }
}

/// Verifies the Lie axioms, the p-map identities and term-order independence.
pub fn check_restricted(l: &RestrictedLie, config: &CheckConfig) -> Report {
    let lie = &l.lie;
    let n = lie.dim();
    let p = l.p() as u32;
    let mut report = Report::new("restricted Lie algebra");
    report.absorb("", lie.check());

    let mut c = report.check("ad(x^[p]) = ad(x)^p");
    for i in 0..n {
        let lhs = lie.ad(&l.pmap[i]);
        let rhs = lie.ad(&lie.basis(i)).pow(p);
        c.case(lhs == rhs, || json!({ "x": lie.names[i], "difference": rhs.sub(&lhs).to_string() }));
    }
    let mut rng = config.rng("ad-p");
    for _ in 0..config.samples {
        let x = lie.random_element(&mut rng);
        let lhs = lie.ad(&l.p_map_eval(&x));
        let rhs = lie.ad(&x).pow(p);
        c.case(lhs == rhs, || json!({ "x": lie.show(&x) }));
    }
    c.finish();

    let mut c = report.check("(cx)^[p] = c^p x^[p]");
    let mut rng = config.rng("scalar");
    for _ in 0..config.samples {
        let a = lie.field.random(&mut rng);
        let x = lie.random_element(&mut rng);
        let lhs = l.p_map_eval(&vec_ops::scale(&a, &x));
        let rhs = vec_ops::scale(&a.frobenius(), &l.p_map_eval(&x));
        c.case(lhs == rhs, || json!({ "c": a.to_string(), "x": lie.show(&x) }));
    }
    c.finish();

    let mut c = report.check("(x+y)^[p] = x^[p] + y^[p] + sum s_i(x,y)");
    let mut rng = config.rng("sum");
    for _ in 0..config.samples {
        let x = lie.random_element(&mut rng);
        let y = lie.random_element(&mut rng);
        let lhs = l.p_map_eval(&vec_ops::add(&x, &y));
        let mut rhs = vec_ops::add(&l.p_map_eval(&x), &l.p_map_eval(&y));
        for s in s_coefficients(lie, &x, &y) {
            vec_ops::add_assign(&mut rhs, &s);
        }
        c.case(lhs == rhs, || json!({ "x": lie.show(&x), "y": lie.show(&y) }));
    }
    c.finish();

    let mut c = report.check("p-map independent of term order");
    let mut rng = config.rng("order");
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..config.samples {
        let v = lie.random_element(&mut rng);
        let base = l.p_map_eval(&v);
        for _ in 0..5 {
            order.shuffle(&mut rng);
            let other = l.p_map_eval_ordered(&v, &order);
            c.case(other == base, || json!({ "v": lie.show(&v), "order": order.clone() }));
        }
    }
    c.finish();
    report
}

/// The restricted structure `(B, [x,y] = xy - yx, x^[p] = x^p)` on an associative algebra.
pub fn restricted_from_associative(b: &AssocAlgebra) -> Result<RestrictedLie> {
    let assoc = b.check();
    if !assoc.passed {
        return Err(Error::NotAssociative(assoc.first_failure().unwrap_or_default()));
    }
    let lie = LieAlgebra::from_associative(b);
    let pmap = (0..b.dim()).map(|i| b.pow(&b.basis(i), b.p() as u64)).collect();
    Ok(RestrictedLie { lie, pmap })
}

/// Extends basis images to a p-map, provided `ad(u_i)^p = ad(u_i^[p])` for every i.
pub fn extend_p_map_from_basis(lie: &LieAlgebra, images: Vec<Vector>) -> Result<RestrictedLie> {
    let axioms = lie.check();
    if !axioms.passed {
        return Err(Error::InvalidAlgebra(axioms.first_failure().unwrap_or_default()));
    }
    let l = RestrictedLie::new(lie.clone(), images)?;
    let p = lie.p() as u32;
    for i in 0..lie.dim() {
        let diff = lie.ad(&lie.basis(i)).pow(p).sub(&lie.ad(&l.pmap[i]));
        if !diff.is_zero() {
            return Err(Error::PMapCriterion { index: i, name: lie.names[i].clone(), difference: diff.to_string() });
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commalg::{derivation_space, p_power_derivation, CommAlgebra};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// Heisenberg algebra `[x,y] = z` with zero p-map.
    pub(crate) fn heisenberg(p: u32) -> RestrictedLie {
        let k = BaseField::prime(p).unwrap();
        let lie = LieAlgebra::from_fn(k, names(&["x", "y", "z"]), |i, j| match (i, j) {
            (0, 1) => k.unit_vector(3, 2),
            (1, 0) => vec_ops::neg(&k.unit_vector(3, 2)),
            _ => k.zeros(3),
        })
        .unwrap();
        RestrictedLie::new(lie, vec![k.zeros(3); 3]).unwrap()
    }

    /// `Der(F_p[x]/(x^p))` with the commutator bracket and `D -> D^p`.
    pub(crate) fn witt(p: u32) -> RestrictedLie {
        let a = CommAlgebra::truncated_polynomial(BaseField::prime(p).unwrap(), "x", p);
        let ders = derivation_space(&a);
        let mats: Vec<Matrix> = ders.iter().map(|d| d.matrix().clone()).collect();
        let coords = |m: &Matrix| -> Vector {
            let cols: Vec<Vector> = mats.iter().map(|d| d.entries().to_vec()).collect();
            let sys = Matrix::from_columns(a.p(), a.dim() * a.dim(), &cols).unwrap();
            sys.solve_particular(m.entries()).unwrap().expect("in the span")
        };
        let n = mats.len();
        let ns = (0..n).map(|i| format!("x^{i}d")).collect();
        let lie = LieAlgebra::from_fn(a.field(), ns, |i, j| coords(&mats[i].commutator(&mats[j]))).unwrap();
        let pmap = ders.iter().map(|d| coords(p_power_derivation(&a, d).unwrap().matrix())).collect();
        RestrictedLie::new(lie, pmap).unwrap()
    }

    #[test]
    fn s1_is_the_bracket_in_char_2() {
        let w = witt(2);
        let mut rng = CheckConfig::default().rng("t");
        for _ in 0..20 {
            let x = w.lie().random_element(&mut rng);
            let y = w.lie().random_element(&mut rng);
            assert_eq!(s_coefficients(w.lie(), &x, &y), vec![w.bracket(&x, &y)]);
        }
    }

    #[test]
    fn s_vanishes_against_zero_and_on_heisenberg() {
        let h = heisenberg(3);
        let (x, y) = (h.lie().basis(0), h.lie().basis(1));
        for s in s_coefficients(h.lie(), &x, &h.lie().zero()) {
            assert!(vec_ops::is_zero(&s));
        }
        for s in s_coefficients(h.lie(), &x, &y) {
            assert!(vec_ops::is_zero(&s));
        }
    }

    #[test]
    fn s_coefficients_on_witt_p3_match_expansion() {
        // x = d, y = x d: [d, x d] = d, so ad_{lambda d + x d}(d) = [lambda d + x d, d] = -d
        // and ad^2(d) = [lambda d + x d, -d] = d. Coefficient of lambda^0 is d, of lambda^1 is 0.
        let w = witt(3);
        let (d, xd) = (w.lie().basis(0), w.lie().basis(1));
        let s = s_coefficients(w.lie(), &d, &xd);
        assert_eq!(s[0], d);
        assert!(vec_ops::is_zero(&s[1]));
    }

    #[test]
    fn p_map_examples() {
        let w = witt(2);
        let k = w.field();
        let (d, xd) = (w.lie().basis(0), w.lie().basis(1));
        assert_eq!(w.p_map_eval(&d), w.pmap()[0]);
        // (a u)^[p] = a^p u^[p] with a = 1 in F_2 and over F_3
        let w3 = witt(3);
        let two = RatFunc::constant(3, 2);
        assert_eq!(w3.p_map_eval(&vec_ops::scale(&two, &w3.lie().basis(1))), vec_ops::scale(&two.pow(3), &w3.pmap()[1]));
        // (x + y)^[2] = x^[2] + y^[2] + [x, y]
        let sum = vec_ops::add(&d, &xd);
        let expected = vec_ops::add(&vec_ops::add(&w.pmap()[0], &w.pmap()[1]), &w.bracket(&d, &xd));
        assert_eq!(w.p_map_eval(&sum), expected);
        assert_eq!(k.p(), 2);
    }

    #[test]
    fn valid_structures_pass_the_checker() {
        let config = CheckConfig::new(30, 0);
        let k = BaseField::prime(2).unwrap();
        let abelian = RestrictedLie::new(LieAlgebra::abelian(k, names(&["a", "b"])), vec![k.zeros(2); 2]).unwrap();
        for l in [abelian, witt(2), witt(3), heisenberg(2), heisenberg(3)] {
            let r = check_restricted(&l, &config);
            assert!(r.passed, "{:?}", r.first_failure());
        }
    }

    #[test]
    fn corrupted_witt_p_map_is_caught() {
        let w = witt(2);
        let mut pmap = w.pmap().to_vec();
        pmap[0] = vec_ops::add(&pmap[0], &w.lie().basis(0));
        let bad = RestrictedLie::new(w.lie().clone(), pmap).unwrap();
        let r = check_restricted(&bad, &CheckConfig::new(10, 0));
        assert!(!r.passed);
        let fail = r.failures().next().unwrap();
        assert_eq!(fail.identity, "ad(x^[p]) = ad(x)^p");
        assert_eq!(fail.witness.as_ref().unwrap()["x"], "x^0d");
    }

    #[test]
    fn matrices_over_f2() {
        let m2 = AssocAlgebra::matrix_algebra(BaseField::prime(2).unwrap(), 2);
        let l = restricted_from_associative(&m2).unwrap();
        assert_eq!(l.dim(), 4);
        assert_eq!(l.p_map_eval(&m2.one()), m2.one());
        assert!(check_restricted(&l, &CheckConfig::new(30, 0)).passed);
        let c = CommAlgebra::truncated_polynomial(BaseField::prime(3).unwrap(), "x", 3);
        let lc = restricted_from_associative(&c).unwrap();
        assert!(lc.lie().table().iter().all(|v| vec_ops::is_zero(v)));
        assert_eq!(lc.pmap()[1], c.frobenius(&c.basis(1)));
    }

    #[test]
    fn extension_from_basis_images() {
        let k = BaseField::prime(3).unwrap();
        let ab = LieAlgebra::abelian(k, names(&["a"]));
        assert!(extend_p_map_from_basis(&ab, vec![k.zeros(1)]).is_ok());
        let w = witt(3);
        // d -> 0, x d -> x d, x^2 d -> 0
        let l = extend_p_map_from_basis(w.lie(), w.pmap().to_vec()).unwrap();
        assert_eq!(l.pmap()[1], w.lie().basis(1));
        assert!(vec_ops::is_zero(&l.pmap()[0]) && vec_ops::is_zero(&l.pmap()[2]));
        let h = heisenberg(2);
        let mut images = vec![h.lie().zero(); 3];
        images[0] = h.lie().basis(1);
        match extend_p_map_from_basis(h.lie(), images) {
            Err(Error::PMapCriterion { index, .. }) => assert_eq!(index, 0),
            other => panic!("expected criterion failure, got {other:?}"),
        }
    }
}
