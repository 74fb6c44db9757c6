//! PBW-type checks on normal forms.

use serde_json::json;

use super::{Enveloping, Letter, PBWElement, Strategy};
use crate::error::Result;
use crate::linalg::Matrix;
use crate::lrin::RestrictedLieRinehart;
use crate::report::{CheckConfig, Report};

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Checks that the normal forms of `U_p(A,L)` carry a left `U_p(A,L)`-module
/// structure satisfying the defining relations, which makes the restricted
/// monomials `u^k` (`k_i < p`) an A-basis; also checks their count is `p^n`.
pub fn pbw_rank_check(l: &RestrictedLieRinehart, config: &CheckConfig) -> Report {
    let mut report = Report::new("PBW basis of U_p(A,L)");
    if let Err(e) = pbw_rank_inner(l, config, &mut report) {
        let mut c = report.check("normal forms computable");
        c.case(false, || json!({ "error": e.to_string() }));
        c.finish();
    }
    report
}

fn pbw_rank_inner(l: &RestrictedLieRinehart, config: &CheckConfig, report: &mut Report) -> Result<()> {
    let u = Enveloping::restricted(l);
    let n = l.rank();
    let d = l.algebra().dim();
    let p = l.p() as u32;
    let alg = l.algebra();
    let mons = u.basis_monomials();

    let mut c = report.check("restricted monomials number p^n");
    c.case(mons.len() == (p as usize).pow(n as u32), || json!({ "count": mons.len(), "n": n, "p": p }));
    c.finish();

    let kbasis: Vec<PBWElement> =
        mons.iter().flat_map(|k| (0..d).map(|r| u.monomial(&alg.basis(r), k.clone()))).collect();
    let gens: Vec<PBWElement> = (0..n).map(|i| u.from_l(&l.basis(i))).collect();
    let act = |x: &PBWElement, m: &PBWElement| u.multiply(x, m);

    let mut cases = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        for r in 0..d {
            let a = u.from_a(&alg.basis(r));
            let xa = u.from_a(&l.anchors()[i].apply(&alg.basis(r)));
            for m in &kbasis {
                let lhs = u.sub(&act(g, &act(&a, m)?)?, &act(&a, &act(g, m)?)?);
                let ok = lhs == act(&xa, m)?;
                cases.push((ok, json!({ "u": l.names()[i], "a": alg.names()[r], "m": u.show(m) })));
            }
        }
    }
    let mut c = report.check("u(am) - a(um) = u(a) m");
    for (ok, w) in cases {
        c.case(ok, || w);
    }
    c.finish();

    let mut cases = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let br = u.from_l(&l.bracket_table()[i * n + j]);
            for m in &kbasis {
                let lhs = u.sub(&act(&gens[i], &act(&gens[j], m)?)?, &act(&gens[j], &act(&gens[i], m)?)?);
                cases.push((lhs == act(&br, m)?, json!({ "i": l.names()[i], "j": l.names()[j], "m": u.show(m) })));
            }
        }
    }
    let mut c = report.check("u_i(u_j m) - u_j(u_i m) = [u_i,u_j] m");
    for (ok, w) in cases {
        c.case(ok, || w);
    }
    c.finish();

    let mut cases = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let gp = u.from_l(&l.pmap_basis()[i]);
        for m in &kbasis {
            let mut lhs = m.clone();
            for _ in 0..p {
                lhs = act(g, &lhs)?;
            }
            cases.push((lhs == act(&gp, m)?, json!({ "u": l.names()[i], "m": u.show(m) })));
        }
    }
    let mut c = report.check("u_i^p m = u_i^[p] m");
    for (ok, w) in cases {
        c.case(ok, || w);
    }
    c.finish();

    let mut rng = config.rng("pbw-assoc");
    let mut cases = Vec::new();
    for _ in 0..config.samples.min(10) {
        let (x, y, z) = (u.random_element(&mut rng), u.random_element(&mut rng), u.random_element(&mut rng));
        let lhs = u.multiply(&u.multiply(&x, &y)?, &z)?;
        let rhs = u.multiply(&x, &u.multiply(&y, &z)?)?;
        cases.push((lhs == rhs, json!({ "x": u.show(&x), "y": u.show(&y), "z": u.show(&z) })));
    }
    let mut c = report.check("(xy)z = x(yz)");
    for (ok, w) in cases {
        c.case(ok, || w);
    }
    c.finish();
    Ok(())
}

/// In `U(A,L)` truncated at `bound`, checks that the products `z^h u^k`
/// (`z_i = u_i^p - u_i^[p]`, `k_i < p`, weighted degree `<= bound`) are
/// A-independent, number `C(bound+n, n)`, have leading term `u^{ph+k}`, and
/// that each `z_i` is central.
pub fn rinehart_basis_check(l: &RestrictedLieRinehart, bound: usize) -> Report {
    let mut report = Report::new("Rinehart basis of U(A,L)");
    if let Err(e) = rinehart_inner(l, bound, &mut report) {
        let mut c = report.check("normal forms computable");
        c.case(false, || json!({ "error": e.to_string() }));
        c.finish();
    }
    report
}

fn rinehart_inner(l: &RestrictedLieRinehart, bound: usize, report: &mut Report) -> Result<()> {
    let u = Enveloping::unrestricted(l, bound);
    let n = l.rank();
    let d = l.algebra().dim();
    let p = l.p() as u32;
    let alg = l.algebra();
    let exps = u.basis_monomials();

    let mut elements = Vec::with_capacity(exps.len());
    for e in &exps {
        let mut w = Vec::new();
        for (i, &ei) in e.iter().enumerate() {
            w.extend(std::iter::repeat_n(Letter::Z(i), (ei / p) as usize));
        }
        for (i, &ei) in e.iter().enumerate() {
            w.extend(std::iter::repeat_n(Letter::U(i), (ei % p) as usize));
        }
        elements.push(u.normal_form(&w, Strategy::Leftmost)?);
    }

    let mut c = report.check("number of standard monomials is C(D+n, n)");
    c.case(elements.len() == binomial(bound + n, n), || json!({ "count": elements.len(), "D": bound, "n": n }));
    c.finish();

    let mut cols = Vec::with_capacity(elements.len() * d);
    for f in &elements {
        for r in 0..d {
            cols.push(u.coordinates(&u.multiply(&u.from_a(&alg.basis(r)), f)?, &exps));
        }
    }
    let rank = if cols.is_empty() { 0 } else { Matrix::from_columns(l.p(), exps.len() * d, &cols)?.rank() };
    let mut c = report.check("z^h u^k are A-linearly independent");
    c.case(rank == cols.len(), || json!({ "rank": rank, "expected": cols.len() }));
    c.finish();

    let mut c = report.check("z^h u^k = u^{hp+k} mod lower degree");
    for (e, f) in exps.iter().zip(&elements) {
        let deg: u32 = e.iter().sum();
        let rest = u.sub(f, &u.monomial(&alg.one(), e.clone()));
        c.case(rest.degree().is_none_or(|r| r < deg), || json!({ "h": e.iter().map(|x| x / p).collect::<Vec<_>>(), "k": e.iter().map(|x| x % p).collect::<Vec<_>>(), "remainder": u.show(&rest) }));
    }
    c.finish();

    if bound <= p as usize {
        report.note(format!("centrality not checked: degree bound {bound} is below p+1"));
        return Ok(());
    }
    let mut c = report.check("z_i is central");
    for i in 0..n {
        let z = u.normal_form(&[Letter::Z(i)], Strategy::Leftmost)?;
        let others: Vec<(String, PBWElement)> = (0..n)
            .map(|j| (l.names()[j].clone(), u.from_l(&l.basis(j))))
            .chain((0..d).map(|r| (alg.names()[r].clone(), u.from_a(&alg.basis(r)))))
            .collect();
        for (name, y) in others {
            let ok = u.commutator(&z, &y)?.is_zero();
            c.case(ok, || json!({ "z": format!("z({})", l.names()[i]), "with": name }));
        }
    }
    c.finish();
    Ok(())
}

/// In `U(A,L)`: `ad(aX)^{p-1}(ab) = a^p ad(X)^{p-1}(b) + ad(aX)^{p-1}(a) b`, sampled.
pub fn enveloping_power_action_check(l: &RestrictedLieRinehart, config: &CheckConfig) -> Report {
    let mut report = Report::new("power action inside U(A,L)");
    let identity = "ad(aX)^{p-1}(ab) = a^p ad(X)^{p-1}(b) + ad(aX)^{p-1}(a) b";
    let u = Enveloping::unrestricted(l, l.p() as usize);
    let alg = l.algebra();
    let p = l.p() as u32;
    let mut rng = config.rng("enveloping-power-action");
    let ad_pow = |x: &PBWElement, y: &PBWElement| -> Result<PBWElement> {
        let mut v = y.clone();
        for _ in 0..p - 1 {
            v = u.commutator(x, &v)?;
        }
        Ok(v)
    };
    let mut cases = Vec::new();
    if l.k_dim() > 0 {
        for _ in 0..config.samples.min(30) {
            let a = alg.random_element(&mut rng);
            let b = alg.random_element(&mut rng);
            let x = l.random_element(&mut rng);
            let outcome = (|| -> Result<bool> {
                let ax = u.from_l(&l.scale(&a, &x));
                let lhs = ad_pow(&ax, &u.from_a(&alg.mul(&a, &b)))?;
                let first = u.multiply(&u.from_a(&alg.frobenius(&a)), &ad_pow(&u.from_l(&x), &u.from_a(&b))?)?;
                let second = u.multiply(&ad_pow(&ax, &u.from_a(&a))?, &u.from_a(&b))?;
                Ok(lhs == u.add(&first, &second))
            })();
            cases.push((matches!(outcome, Ok(true)), json!({ "a": alg.show(&a), "b": alg.show(&b), "X": l.show(&x) })));
        }
    }
    let mut c = report.check(identity);
    for (ok, w) in cases {
        c.case(ok, || w);
    }
    c.finish();
    report
}

/// `X^p - X^[p]` has normal form zero in `U_p(A,L)` for sampled X.
pub fn restricted_relation_check(l: &RestrictedLieRinehart, config: &CheckConfig) -> Report {
    let mut report = Report::new("restricted relation in U_p(A,L)");
    let u = Enveloping::restricted(l);
    let mut rng = config.rng("restricted-relation");
    let mut cases = Vec::new();
    if l.k_dim() > 0 {
        for _ in 0..config.samples.min(20) {
            let x = l.random_element(&mut rng);
            let ok = u
                .pow(&u.from_l(&x), l.p() as u32)
                .map(|xp| xp == u.from_l(&l.p_map(&x)))
                .unwrap_or(false);
            cases.push((ok, json!({ "X": l.show(&x) })));
        }
    }
    let mut c = report.check("X^p - X^[p] lies in the ideal generated by u_i^p - u_i^[p]");
    for (ok, w) in cases {
        c.case(ok, || w);
    }
    c.finish();
    report
}

/// The images of the k-bases of A and L in `U_p(A,L)` are linearly independent.
pub fn injectivity_check(l: &RestrictedLieRinehart) -> Report {
    let mut report = Report::new("canonical maps into U_p(A,L)");
    let u = Enveloping::restricted(l);
    let mons = u.basis_monomials();
    let alg = l.algebra();
    let d = alg.dim();
    let kd = l.k_dim();
    let mut cols: Vec<_> = (0..d).map(|r| u.coordinates(&u.from_a(&alg.basis(r)), &mons)).collect();
    cols.extend((0..kd).map(|v| u.coordinates(&u.from_l(&l.field().unit_vector(kd, v)), &mons)));
    let rank = Matrix::from_columns(l.p(), mons.len() * d, &cols).map(|m| m.rank()).unwrap_or(0);
    let mut c = report.check("A -> U_p and L -> U_p are injective with independent images");
    c.case(rank == d + kd, || json!({ "rank": rank, "expected": d + kd }));
    c.finish();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commalg::{CommAlgebra, InsepExtension};
    use crate::field::BaseField;
    use crate::lrin::der_algebra;
    use crate::uenv::tests::{dual_witt, witt_over_k};

    fn config() -> CheckConfig {
        CheckConfig::new(10, 0)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(9, 3), 84);
        assert_eq!(binomial(3, 0), 1);
    }

    #[test]
    fn pbw_ranks() {
        let k2 = BaseField::prime(2).unwrap();
        let a2 = CommAlgebra::truncated(k2, &[("x", 2), ("y", 2)]);
        for (l, rank) in [(dual_witt(), 2), (der_algebra(&a2).unwrap(), 4), (witt_over_k(3), 27)] {
            let r = pbw_rank_check(&l, &config());
            assert!(r.passed, "{:?}", r.first_failure());
            assert_eq!(Enveloping::restricted(&l).basis_monomials().len(), rank);
        }
    }

    #[test]
    fn rinehart_degree_zero_and_two() {
        let l = witt_over_k(2);
        let r0 = rinehart_basis_check(&l, 0);
        assert!(r0.passed);
        let r = rinehart_basis_check(&l, 2);
        assert!(r.passed, "{:?}", r.first_failure());
        let r = rinehart_basis_check(&l, 4);
        assert!(r.passed, "{:?}", r.first_failure());
    }

    #[test]
    fn z_leading_term() {
        let l = dual_witt();
        let u = Enveloping::unrestricted(&l, 2);
        let z = u.normal_form(&[Letter::Z(0)], Strategy::Leftmost).unwrap();
        assert_eq!(z, u.monomial(&l.algebra().one(), vec![2]));
    }

    #[test]
    fn power_action_and_relation() {
        let e = InsepExtension::new(3).unwrap();
        for l in [dual_witt(), witt_over_k(3), der_algebra(e.algebra()).unwrap()] {
            assert!(enveloping_power_action_check(&l, &config()).passed);
            assert!(restricted_relation_check(&l, &config()).passed);
            assert!(injectivity_check(&l).passed);
        }
    }
}
