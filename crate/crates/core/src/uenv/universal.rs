//! `U_p(A,L)` as a finite-dimensional algebra and its universal property.

use serde_json::json;

use super::{Enveloping, PBWElement};
use crate::commalg::AssocAlgebra;
use crate::error::{Error, Result};
use crate::field::Vector;
use crate::linalg::Matrix;
use crate::lrin::RestrictedLieRinehart;
use crate::report::{CheckConfig, Report};

/// `U_p(A,L)` on the k-basis `e_r u^k` (monomial-major), multiplication by normal forms.
pub fn restricted_enveloping_algebra(l: &RestrictedLieRinehart) -> Result<AssocAlgebra> {
    let u = Enveloping::restricted(l);
    let alg = l.algebra();
    let d = alg.dim();
    let mons = u.basis_monomials();
    let basis: Vec<PBWElement> = mons.iter().flat_map(|k| (0..d).map(|r| u.monomial(&alg.basis(r), k.clone()))).collect();
    let names = basis.iter().map(|b| u.show(b)).collect();
    let mut table = Vec::with_capacity(basis.len() * basis.len());
    for x in &basis {
        for y in &basis {
            table.push(u.coordinates(&u.multiply(x, y)?, &mons));
        }
    }
    let unit = u.coordinates(&u.one(), &mons);
    if basis.len() <= 16 {
        AssocAlgebra::from_table(l.field(), names, table, unit)
    } else {
        AssocAlgebra::from_table_unchecked(l.field(), names, table, unit)
    }
}

/// The induced map `U_p(A,L) -> B` with its verification report.
#[derive(Clone, Debug)]
pub struct UniversalHom {
    /// Columns indexed like the basis of [`restricted_enveloping_algebra`].
    pub matrix: Matrix,
    pub rank: usize,
    pub report: Report,
}

/// Given `phi_A: A -> B` (`dim B x dim A`) and `phi_L: L -> B` (`dim B x dim_k L`),
/// checks the hypotheses of the universal property and builds
/// `Phi(a u^k) = phi_A(a) phi_L(u_1)^{k_1} ... phi_L(u_n)^{k_n}`.
pub fn universal_property_check(
    l: &RestrictedLieRinehart,
    b: &AssocAlgebra,
    phi_a: &Matrix,
    phi_l: &Matrix,
    config: &CheckConfig,
) -> Result<UniversalHom> {
    let alg = l.algebra();
    let d = alg.dim();
    let kd = l.k_dim();
    let p = l.p() as u64;
    if phi_a.rows() != b.dim() || phi_a.cols() != d || phi_l.rows() != b.dim() || phi_l.cols() != kd {
        return Err(Error::DimensionMismatch(format!(
            "phi_A must be {}x{d} and phi_L {}x{kd}",
            b.dim(),
            b.dim()
        )));
    }
    let fa = |a: &[crate::RatFunc]| phi_a.mul_vec(a);
    let fl = |x: &[crate::RatFunc]| phi_l.mul_vec(x);
    let ea: Vec<Vector> = (0..d).map(|r| alg.basis(r)).collect();
    let el: Vec<Vector> = (0..kd).map(|v| l.field().unit_vector(kd, v)).collect();
    let lname = |v: usize| l.k_structure().names()[v].clone();

    let fail = |hypothesis: &str, report: Report| Error::Hypothesis { hypothesis: hypothesis.into(), report: Box::new(report) };

    let mut report = Report::new("algebra hypothesis");
    let mut c = report.check("phi_A(1) = 1 and phi_A(ab) = phi_A(a) phi_A(b)");
    c.case(fa(&alg.one()) == b.one(), || json!({ "a": "1" }));
    for r in 0..d {
        for s in 0..d {
            let ok = fa(&alg.mul(&ea[r], &ea[s])) == b.mul(&fa(&ea[r]), &fa(&ea[s]));
            c.case(ok, || json!({ "a": alg.names()[r], "b": alg.names()[s] }));
        }
    }
    if !c.finish() {
        return Err(fail("algebra", report));
    }

    let mut report = Report::new("A-linearity hypothesis");
    let mut c = report.check("phi_A(a) phi_L(X) = phi_L(aX)");
    for r in 0..d {
        for v in 0..kd {
            let ok = b.mul(&fa(&ea[r]), &fl(&el[v])) == fl(&l.scale(&ea[r], &el[v]));
            c.case(ok, || json!({ "a": alg.names()[r], "X": lname(v) }));
        }
    }
    if !c.finish() {
        return Err(fail("A-linearity", report));
    }

    let mut report = Report::new("commutator hypothesis");
    let mut c = report.check("[phi_L(X), phi_A(a)] = phi_A(X(a))");
    for v in 0..kd {
        let xa = l.anchor(&el[v]);
        for r in 0..d {
            let ok = b.commutator(&fl(&el[v]), &fa(&ea[r])) == fa(&xa.mul_vec(&ea[r]));
            c.case(ok, || json!({ "X": lname(v), "a": alg.names()[r] }));
        }
    }
    if !c.finish() {
        return Err(fail("commutator", report));
    }

    let mut report = Report::new("Lie hypothesis");
    let mut c = report.check("phi_L([X,Y]) = [phi_L(X), phi_L(Y)]");
    for v in 0..kd {
        for w in v + 1..kd {
            let ok = fl(&l.bracket(&el[v], &el[w])) == b.commutator(&fl(&el[v]), &fl(&el[w]));
            c.case(ok, || json!({ "X": lname(v), "Y": lname(w) }));
        }
    }
    if !c.finish() {
        return Err(fail("Lie", report));
    }

    let mut report = Report::new("restricted hypothesis");
    let mut c = report.check("phi_L(X^[p]) = phi_L(X)^p");
    for v in 0..kd {
        let ok = fl(&l.p_map(&el[v])) == b.pow(&fl(&el[v]), p);
        c.case(ok, || json!({ "X": lname(v) }));
    }
    if !c.finish() {
        return Err(fail("restricted", report));
    }

    let u = Enveloping::restricted(l);
    let mons = u.basis_monomials();
    let gens: Vec<Vector> = (0..l.rank()).map(|i| fl(&l.basis(i))).collect();
    let mut cols = Vec::with_capacity(mons.len() * d);
    for k in &mons {
        let mut prod = b.one();
        for (i, &e) in k.iter().enumerate() {
            prod = b.mul(&prod, &b.pow(&gens[i], e as u64));
        }
        for e in &ea {
            cols.push(b.mul(&fa(e), &prod));
        }
    }
    let matrix = Matrix::from_columns(l.p(), b.dim(), &cols)?;
    let rank = matrix.rank();

    let mut report = Report::new("induced homomorphism");
    let mut c = report.check("Phi(xy) = Phi(x) Phi(y)");
    c.case(matrix.mul_vec(&u.coordinates(&u.one(), &mons)) == b.one(), || json!({ "x": "1" }));
    let mut rng = config.rng("universal");
    for _ in 0..config.samples.min(30) {
        let x = u.random_element(&mut rng);
        let y = u.random_element(&mut rng);
        let xy = u.multiply(&x, &y)?;
        let phi = |z: &PBWElement| matrix.mul_vec(&u.coordinates(z, &mons));
        let ok = phi(&xy) == b.mul(&phi(&x), &phi(&y));
        c.case(ok, || json!({ "x": u.show(&x), "y": u.show(&y) }));
    }
    c.finish();
    report.note(format!("image has dimension {rank} over k"));
    Ok(UniversalHom { matrix, rank, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commalg::InsepExtension;
    use crate::lrin::der_algebra;
    use crate::uenv::tests::{dual_witt, witt_over_k};

    fn canonical(l: &RestrictedLieRinehart) -> (AssocAlgebra, Matrix, Matrix) {
        let b = restricted_enveloping_algebra(l).unwrap();
        let u = Enveloping::restricted(l);
        let mons = u.basis_monomials();
        let d = l.algebra().dim();
        let kd = l.k_dim();
        let pa: Vec<Vector> = (0..d).map(|r| u.coordinates(&u.from_a(&l.algebra().basis(r)), &mons)).collect();
        let pl: Vec<Vector> = (0..kd).map(|v| u.coordinates(&u.from_l(&l.field().unit_vector(kd, v)), &mons)).collect();
        (b.clone(), Matrix::from_columns(l.p(), b.dim(), &pa).unwrap(), Matrix::from_columns(l.p(), b.dim(), &pl).unwrap())
    }

    #[test]
    fn identity_on_u_p() {
        for l in [dual_witt(), witt_over_k(2)] {
            let (b, pa, pl) = canonical(&l);
            let h = universal_property_check(&l, &b, &pa, &pl, &CheckConfig::new(10, 0)).unwrap();
            assert!(h.report.passed);
            assert_eq!(h.matrix, Matrix::identity(l.p(), b.dim()));
        }
    }

    fn end_k(e: &InsepExtension, corrupt: bool) -> (RestrictedLieRinehart, AssocAlgebra, Matrix, Matrix) {
        let l = der_algebra(e.algebra()).unwrap();
        let k = l.field();
        let d = e.algebra().dim();
        let b = AssocAlgebra::matrix_algebra(k, d);
        let pa: Vec<Vector> = (0..d).map(|r| e.algebra().left_mul(&e.algebra().basis(r)).entries().to_vec()).collect();
        let pl: Vec<Vector> = (0..l.k_dim())
            .map(|v| {
                let x = k.unit_vector(l.k_dim(), v);
                let mut m = l.anchor(&x);
                if corrupt {
                    m = m.add(&e.algebra().left_mul(l.component(&x, 0)));
                }
                m.entries().to_vec()
            })
            .collect();
        let (pa, pl) = (Matrix::from_columns(e.p(), d * d, &pa).unwrap(), Matrix::from_columns(e.p(), d * d, &pl).unwrap());
        (l, b, pa, pl)
    }

    #[test]
    fn endomorphisms_of_inseparable_extension() {
        let e = InsepExtension::new(2).unwrap();
        let (l, b, pa, pl) = end_k(&e, false);
        let h = universal_property_check(&l, &b, &pa, &pl, &CheckConfig::new(10, 0)).unwrap();
        assert!(h.report.passed);
        assert_eq!(h.rank, 4);
    }

    #[test]
    fn corrupted_p_map_fails_restricted_hypothesis() {
        let e = InsepExtension::new(2).unwrap();
        let (l, b, pa, pl) = end_k(&e, true);
        match universal_property_check(&l, &b, &pa, &pl, &CheckConfig::new(10, 0)) {
            Err(Error::Hypothesis { hypothesis, .. }) => assert_eq!(hypothesis, "restricted"),
            other => panic!("{other:?}"),
        }
    }
}
