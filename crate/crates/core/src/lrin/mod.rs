//! Lie-Rinehart algebras and their restricted versions.
//!
//! L is always a free A-module with A-basis `X_1, ..., X_n`. An element of L is
//! stored as its k-coordinates: the coefficient of `e_r X_i` sits at index
//! `i * dim(A) + r`, where `e_r` runs over the k-basis of A.

mod build;

pub use build::{
    abelian_extension, der_algebra, power_action_identity, semidirect, transformation_algebra, PMapSign, TransformationAlgebra,
};

use rand::Rng;
use serde_json::json;

use crate::commalg::{CommAlgebra, Derivation};
use crate::error::{Error, Result};
use crate::field::{vec_ops, BaseField, RatFunc, Vector};
use crate::linalg::Matrix;
use crate::report::{CheckConfig, Report};
use crate::rlie::{check_restricted, LieAlgebra, RestrictedLie};

/// A Lie-Rinehart algebra over A, free on the given basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieRinehart {
    algebra: CommAlgebra,
    names: Vec<String>,
    /// `bracket[i * n + j] = [X_i, X_j]`
    bracket: Vec<Vector>,
    anchor: Vec<Derivation>,
}

impl LieRinehart {
    /// Checks shapes and that every anchor value is a derivation of A.
    pub fn new(algebra: CommAlgebra, names: Vec<String>, bracket: Vec<Vector>, anchor: Vec<Derivation>) -> Result<Self> {
        let n = names.len();
        let d = algebra.dim();
        if bracket.len() != n * n {
            return Err(Error::DimensionMismatch(format!("bracket table has {} entries, expected {}", bracket.len(), n * n)));
        }
        if let Some(v) = bracket.iter().find(|v| v.len() != n * d) {
            return Err(Error::DimensionMismatch(format!("bracket value of length {}, expected {}", v.len(), n * d)));
        }
        if anchor.len() != n {
            return Err(Error::DimensionMismatch(format!("{} anchor values for {n} basis vectors", anchor.len())));
        }
        for (i, a) in anchor.iter().enumerate() {
            if a.matrix().rows() != d || a.matrix().cols() != d {
                return Err(Error::DimensionMismatch(format!("anchor of {} is not {d}x{d}", names[i])));
            }
            if let Some(w) = a.leibniz_defect(&algebra) {
                return Err(Error::InvalidAlgebra(format!("anchor of {} is not a derivation: Leibniz fails on {w}", names[i])));
            }
        }
        Ok(LieRinehart { algebra, names, bracket, anchor })
    }

    /// A Lie algebra over `A = k` with zero anchor.
    pub fn from_lie(lie: &LieAlgebra) -> Self {
        let algebra = CommAlgebra::ground(lie.field());
        let n = lie.dim();
        let anchor = vec![Derivation::zero(&algebra); n];
        LieRinehart { algebra, names: lie.names().to_vec(), bracket: lie.table().to_vec(), anchor }
    }

    pub fn algebra(&self) -> &CommAlgebra {
        &self.algebra
    }

    pub fn field(&self) -> BaseField {
        self.algebra.field()
    }

    pub fn p(&self) -> u8 {
        self.algebra.p()
    }

    /// Rank over A.
    pub fn rank(&self) -> usize {
        self.names.len()
    }

    /// Dimension over k.
    pub fn k_dim(&self) -> usize {
        self.rank() * self.algebra.dim()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn bracket_table(&self) -> &[Vector] {
        &self.bracket
    }

    pub fn anchors(&self) -> &[Derivation] {
        &self.anchor
    }

    pub fn zero(&self) -> Vector {
        self.field().zeros(self.k_dim())
    }

    /// The A-coefficient of `X_i` in `x`.
    pub fn component<'a>(&self, x: &'a [RatFunc], i: usize) -> &'a [RatFunc] {
        let d = self.algebra.dim();
        &x[i * d..(i + 1) * d]
    }

    /// `sum_i a_i X_i`
    pub fn from_components(&self, comps: &[Vector]) -> Vector {
        comps.concat()
    }

    /// `a X_i`
    pub fn monomial(&self, a: &[RatFunc], i: usize) -> Vector {
        let d = self.algebra.dim();
        let mut v = self.zero();
        v[i * d..(i + 1) * d].clone_from_slice(a);
        v
    }

    /// `1 X_i`
    pub fn basis(&self, i: usize) -> Vector {
        self.monomial(&self.algebra.one(), i)
    }

    /// The k-basis vector `e_r X_i`.
    pub fn k_basis(&self, i: usize, r: usize) -> Vector {
        self.field().unit_vector(self.k_dim(), i * self.algebra.dim() + r)
    }

    /// `a x`
    pub fn scale(&self, a: &[RatFunc], x: &[RatFunc]) -> Vector {
        (0..self.rank()).flat_map(|i| self.algebra.mul(a, self.component(x, i))).collect()
    }

    /// The derivation `alpha(x)` as a matrix.
    pub fn anchor(&self, x: &[RatFunc]) -> Matrix {
        let d = self.algebra.dim();
        let mut m = Matrix::zeros(self.p(), d, d);
        for i in 0..self.rank() {
            let c = self.component(x, i);
            if vec_ops::is_zero(c) {
                continue;
            }
            m = m.add(&self.algebra.left_mul(c).mul(self.anchor[i].matrix()));
        }
        m
    }

    /// `[x, y]`, extended from the basis by
    /// `[a X_i, b X_j] = ab [X_i, X_j] + a X_i(b) X_j - b X_j(a) X_i`.
    pub fn bracket(&self, x: &[RatFunc], y: &[RatFunc]) -> Vector {
        let n = self.rank();
        let mut out = self.zero();
        for i in 0..n {
            let a = self.component(x, i);
            if vec_ops::is_zero(a) {
                continue;
            }
            for j in 0..n {
                let b = self.component(y, j);
                if vec_ops::is_zero(b) {
                    continue;
                }
                let ab = self.algebra.mul(a, b);
                vec_ops::add_assign(&mut out, &self.scale(&ab, &self.bracket[i * n + j]));
            }
        }
        let (ax, ay) = (self.anchor(x), self.anchor(y));
        for j in 0..n {
            let xb = ax.mul_vec(self.component(y, j));
            let ya = ay.mul_vec(self.component(x, j));
            vec_ops::add_assign(&mut out, &self.monomial(&vec_ops::sub(&xb, &ya), j));
        }
        out
    }

    /// The underlying Lie algebra over k on the basis `e_r X_i`.
    pub fn k_lie(&self) -> LieAlgebra {
        let d = self.algebra.dim();
        let kd = self.k_dim();
        let names: Vec<String> = (0..kd).map(|u| self.k_name(u / d, u % d)).collect();
        let basis: Vec<Vector> = (0..kd).map(|u| self.field().unit_vector(kd, u)).collect();
        LieAlgebra::from_fn(self.field(), names, |u, v| self.bracket(&basis[u], &basis[v])).expect("shapes agree")
    }

    fn k_name(&self, i: usize, r: usize) -> String {
        let a = &self.algebra.names()[r];
        if a == "1" {
            self.names[i].clone()
        } else {
            format!("{a}*{}", self.names[i])
        }
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        self.field().random_vector(self.k_dim(), rng)
    }

    pub fn show(&self, x: &[RatFunc]) -> String {
        let terms: Vec<String> = (0..self.rank())
            .filter(|&i| !vec_ops::is_zero(self.component(x, i)))
            .map(|i| {
                let c = self.algebra.show(self.component(x, i));
                if c == "1" {
                    self.names[i].clone()
                } else {
                    format!("({c})*{}", self.names[i])
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// A restricted Lie-Rinehart algebra: p-map images of the A-basis, extended to
/// the k-basis by `(aX)^[p] = a^p X^[p] + (aX)^{p-1}(a) X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedLieRinehart {
    lr: LieRinehart,
    pmap: Vec<Vector>,
    k_structure: RestrictedLie,
}

impl RestrictedLieRinehart {
    pub fn new(lr: LieRinehart, pmap: Vec<Vector>) -> Result<Self> {
        Self::check_pmap_shape(&lr, &pmap)?;
        let kd = lr.k_dim();
        let d = lr.algebra.dim();
        let k_images = (0..kd).map(|u| default_k_image(&lr, &pmap, u / d, u % d)).collect();
        let k_structure = RestrictedLie::new(lr.k_lie(), k_images)?;
        Ok(RestrictedLieRinehart { lr, pmap, k_structure })
    }

    /// Uses explicit p-images for every k-basis vector `e_r X_i` instead of the
    /// rule derived from the A-basis images.
    pub fn with_k_images(lr: LieRinehart, pmap: Vec<Vector>, k_images: Vec<Vector>) -> Result<Self> {
        Self::check_pmap_shape(&lr, &pmap)?;
        let k_structure = RestrictedLie::new(lr.k_lie(), k_images)?;
        Ok(RestrictedLieRinehart { lr, pmap, k_structure })
    }

    fn check_pmap_shape(lr: &LieRinehart, pmap: &[Vector]) -> Result<()> {
        if pmap.len() != lr.rank() || pmap.iter().any(|v| v.len() != lr.k_dim()) {
            return Err(Error::DimensionMismatch(format!("p-map needs {} images of length {}", lr.rank(), lr.k_dim())));
        }
        Ok(())
    }

    /// A restricted Lie algebra as a Lie-Rinehart algebra over `A = k`.
    pub fn from_restricted_lie(l: &RestrictedLie) -> Self {
        let lr = LieRinehart::from_lie(l.lie());
        Self::new(lr, l.pmap().to_vec()).expect("shapes agree")
    }

    pub fn lr(&self) -> &LieRinehart {
        &self.lr
    }

    pub fn pmap_basis(&self) -> &[Vector] {
        &self.pmap
    }

    /// The restricted Lie algebra over k on the basis `e_r X_i`.
    pub fn k_structure(&self) -> &RestrictedLie {
        &self.k_structure
    }

    pub fn p_map(&self, x: &[RatFunc]) -> Vector {
        self.k_structure.p_map_eval(x)
    }
}

impl std::ops::Deref for RestrictedLieRinehart {
    type Target = LieRinehart;
    fn deref(&self) -> &LieRinehart {
        &self.lr
    }
}

/// `(aD)^m (b)` for the derivation `D = alpha(x)` scaled by `a`.
fn iterate(m: &Matrix, b: &[RatFunc], times: u32) -> Vector {
    let mut v = b.to_vec();
    for _ in 0..times {
        v = m.mul_vec(&v);
    }
    v
}

fn default_k_image(lr: &LieRinehart, pmap: &[Vector], i: usize, r: usize) -> Vector {
    let a = lr.algebra.basis(r);
    correction_rule(lr, &a, &pmap[i], &lr.basis(i), PMapForm::Correct)
}

/// The right-hand side `a^p X^[p] + (aX)^{p-1}(a) X` in the requested form,
/// given `X` and `X^[p]`.
fn correction_rule(lr: &LieRinehart, a: &[RatFunc], x_p: &[RatFunc], x: &[RatFunc], form: PMapForm) -> Vector {
    let p = lr.p() as u32;
    let alg = &lr.algebra;
    let frob = match form {
        PMapForm::DropFrobenius => a.to_vec(),
        _ => alg.frobenius(a),
    };
    let lead = lr.scale(&frob, x_p);
    let ax = lr.scale(a, x);
    let c = match form {
        PMapForm::WrongIterate => iterate(&lr.anchor(x), a, p - 1),
        _ => iterate(&lr.anchor(&ax), a, p - 1),
    };
    let corr = lr.scale(&c, x);
    match form {
        PMapForm::DropCorrection => lead,
        PMapForm::DoubleCorrection => vec_ops::add(&vec_ops::add(&lead, &corr), &corr),
        PMapForm::Negate => vec_ops::sub(&lead, &corr),
        _ => vec_ops::add(&lead, &corr),
    }
}

/// Which version of `(aX)^[p] = a^p X^[p] + (aX)^{p-1}(a) X` the checker uses.
/// All but `Correct` are corruptions for mutation testing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PMapForm {
    Correct,
    /// `a^p X^[p]`
    DropCorrection,
    /// `a X^[p] + (aX)^{p-1}(a) X`
    DropFrobenius,
    /// `a^p X^[p] + X^{p-1}(a) X`
    WrongIterate,
    DoubleCorrection,
    Negate,
}

pub const P_MAP_RULE: &str = "(aX)^[p] = a^p X^[p] + (aX)^{p-1}(a) X";

/// Runs the full axiom checker with the true p-map rule.
pub fn check_lrr_axioms(x: &RestrictedLieRinehart, config: &CheckConfig) -> Report {
    check_lrr_axioms_with(x, config, PMapForm::Correct)
}

/// The Lie-Rinehart axioms (anchor, Leibniz), the restricted axioms of the
/// underlying k-structure, restrictedness of the anchor, and the p-map rule
/// for scalar multiples in the chosen form.
pub fn check_lrr_axioms_with(x: &RestrictedLieRinehart, config: &CheckConfig, form: PMapForm) -> Report {
    let lr = &x.lr;
    let alg = &lr.algebra;
    let n = lr.rank();
    let d = alg.dim();
    let kd = lr.k_dim();
    let p = lr.p() as u32;
    let mut report = Report::new("restricted Lie-Rinehart algebra");
    report.absorb("k-structure", check_restricted(&x.k_structure, config));

    let kb: Vec<Vector> = (0..kd).map(|u| lr.field().unit_vector(kd, u)).collect();
    let kname = |u: usize| x.k_structure.names()[u].clone();

    let mut c = report.check("anchor values are derivations");
    for i in 0..n {
        let w = lr.anchor[i].leibniz_defect(alg);
        c.case(w.is_none(), || json!({ "X": lr.names[i], "pair": w }));
    }
    c.finish();

    let mut c = report.check("anchor is a Lie homomorphism");
    for u in 0..kd {
        for v in u + 1..kd {
            let lhs = lr.anchor(&lr.bracket(&kb[u], &kb[v]));
            let rhs = lr.anchor(&kb[u]).commutator(&lr.anchor(&kb[v]));
            c.case(lhs == rhs, || json!([kname(u), kname(v)]));
        }
    }
    c.finish();

    let mut c = report.check("anchor is A-linear");
    let mut rng = config.rng("anchor-linear");
    for _ in 0..config.samples.min(20) {
        if kd == 0 {
            break;
        }
        let a = alg.random_element(&mut rng);
        let y = lr.random_element(&mut rng);
        let lhs = lr.anchor(&lr.scale(&a, &y));
        let rhs = alg.left_mul(&a).mul(&lr.anchor(&y));
        c.case(lhs == rhs, || json!({ "a": alg.show(&a), "X": lr.show(&y) }));
    }
    c.finish();

    let mut c = report.check("[X, aY] = a[X,Y] + X(a) Y");
    for i in 0..n {
        for j in 0..n {
            for r in 0..d {
                let a = alg.basis(r);
                let lhs = x.k_structure.bracket(&lr.basis(i), &lr.k_basis(j, r));
                let mut rhs = lr.scale(&a, &lr.bracket[i * n + j]);
                let xa = lr.anchor[i].apply(&a);
                vec_ops::add_assign(&mut rhs, &lr.monomial(&xa, j));
                c.case(lhs == rhs, || json!({ "X": lr.names[i], "a": alg.names()[r], "Y": lr.names[j] }));
            }
        }
    }
    c.finish();

    let mut c = report.check("anchor(X^[p]) = anchor(X)^p");
    for (u, b) in kb.iter().enumerate() {
        let lhs = lr.anchor(&x.p_map(b));
        let rhs = lr.anchor(b).pow(p);
        c.case(lhs == rhs, || json!({ "X": kname(u) }));
    }
    let mut rng = config.rng("anchor-restricted");
    for _ in 0..config.samples.min(20) {
        if kd == 0 {
            break;
        }
        let y = lr.random_element(&mut rng);
        c.case(lr.anchor(&x.p_map(&y)) == lr.anchor(&y).pow(p), || json!({ "X": lr.show(&y) }));
    }
    c.finish();

    let mut c = report.check(P_MAP_RULE);
    for i in 0..n {
        for r in 0..d {
            let a = alg.basis(r);
            let lhs = x.p_map(&lr.k_basis(i, r));
            let rhs = correction_rule(lr, &a, &x.p_map(&lr.basis(i)), &lr.basis(i), form);
            c.case(lhs == rhs, || json!({ "a": alg.names()[r], "X": lr.names[i] }));
        }
    }
    let mut rng = config.rng("pmap-rule");
    for _ in 0..config.samples {
        if kd == 0 {
            break;
        }
        let a = alg.random_element(&mut rng);
        let y = lr.random_element(&mut rng);
        let lhs = x.p_map(&lr.scale(&a, &y));
        let rhs = correction_rule(lr, &a, &x.p_map(&y), &y, form);
        c.case(lhs == rhs, || json!({ "a": alg.show(&a), "X": lr.show(&y) }));
    }
    c.finish();
    report
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::commalg::InsepExtension;

    pub(crate) fn witt_lrr(p: u32) -> RestrictedLieRinehart {
        let a = CommAlgebra::truncated_polynomial(BaseField::prime(p).unwrap(), "x", p);
        der_algebra(&a).unwrap()
    }

    #[test]
    fn der_algebra_of_the_ground_field_is_zero() {
        let x = der_algebra(&CommAlgebra::ground(BaseField::prime(2).unwrap())).unwrap();
        assert_eq!(x.rank(), 0);
        assert!(check_lrr_axioms(&x, &CheckConfig::default()).passed);
    }

    #[test]
    fn der_algebra_of_dual_numbers() {
        let x = witt_lrr(2);
        assert_eq!(x.rank(), 1);
        assert_eq!(x.k_dim(), 2);
        // d^[2] = 0 and (x d)^[2] = x d
        assert!(vec_ops::is_zero(&x.p_map(&x.k_basis(0, 0))));
        assert_eq!(x.p_map(&x.k_basis(0, 1)), x.k_basis(0, 1));
        let r = check_lrr_axioms(&x, &CheckConfig::new(30, 0));
        assert!(r.passed, "{:?}", r.first_failure());
    }

    #[test]
    fn der_algebra_of_inseparable_extension() {
        let e = InsepExtension::new(2).unwrap();
        let x = der_algebra(e.algebra()).unwrap();
        assert_eq!(x.rank(), 1);
        assert_eq!(x.anchors()[0], *e.partial());
        assert!(vec_ops::is_zero(&x.pmap_basis()[0]));
        let r = check_lrr_axioms(&x, &CheckConfig::new(20, 0));
        assert!(r.passed, "{:?}", r.first_failure());
    }

    #[test]
    fn dropping_the_correction_is_caught() {
        let x = witt_lrr(2);
        let r = check_lrr_axioms_with(&x, &CheckConfig::new(20, 0), PMapForm::DropCorrection);
        assert!(!r.passed);
        let fail = r.find(P_MAP_RULE).unwrap();
        assert!(!fail.passed);
        let w = fail.witness.as_ref().unwrap();
        assert!(w.get("a").is_some() && w.get("X").is_some());
    }

    #[test]
    fn bracket_satisfies_leibniz_on_samples() {
        let x = witt_lrr(3);
        let mut rng = CheckConfig::default().rng("leibniz");
        for _ in 0..20 {
            let a = x.algebra().random_element(&mut rng);
            let (u, v) = (x.random_element(&mut rng), x.random_element(&mut rng));
            let lhs = x.bracket(&u, &x.scale(&a, &v));
            let xa = x.anchor(&u).mul_vec(&a);
            let rhs = vec_ops::add(&x.scale(&a, &x.bracket(&u, &v)), &x.scale(&xa, &v));
            assert_eq!(lhs, rhs);
        }
    }
}
