//! Beck modules: restricted Lie-Rinehart modules with a p-semilinear operator P
//! whose image is killed by L.

use rand::Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::field::{vec_ops, RatFunc, Vector};
use crate::linalg::Matrix;
use crate::lrin::{check_lrr_axioms, semidirect, LieRinehart, RestrictedLieRinehart};
use crate::report::{CheckConfig, Report};

/// A free A-module `M` with basis `m_1, ..., m_r`, an action of L and an operator P.
///
/// Elements of M are k-coordinate vectors: the coefficient of `e_s m_b` sits at
/// index `b * dim(A) + s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeckModule {
    names: Vec<String>,
    /// `action[i * r + b] = X_i . m_b`
    action: Vec<Vector>,
    /// `p_op[b] = P(m_b)`
    p_op: Vec<Vector>,
}

impl BeckModule {
    pub fn new(l: &LieRinehart, names: Vec<String>, action: Vec<Vector>, p_op: Vec<Vector>) -> Result<Self> {
        let r = names.len();
        let md = r * l.algebra().dim();
        if action.len() != l.rank() * r {
            return Err(Error::DimensionMismatch(format!("action table has {} entries, expected {}", action.len(), l.rank() * r)));
        }
        if p_op.len() != r {
            return Err(Error::DimensionMismatch(format!("P has {} images, expected {r}", p_op.len())));
        }
        if let Some(v) = action.iter().chain(&p_op).find(|v| v.len() != md) {
            return Err(Error::DimensionMismatch(format!("module element of length {}, expected {md}", v.len())));
        }
        let k = l.field();
        if let Some(x) = action.iter().chain(&p_op).flatten().find(|x| !k.contains(x)) {
            return Err(Error::NotInBaseField(x.to_string()));
        }
        Ok(BeckModule { names, action, p_op })
    }

    pub fn zero() -> Self {
        BeckModule { names: vec![], action: vec![], p_op: vec![] }
    }

    /// `M = A^r` with L acting through the anchor on coefficients and `P = 0`.
    pub fn trivial(l: &LieRinehart, names: Vec<String>) -> Self {
        let md = names.len() * l.algebra().dim();
        let k = l.field();
        BeckModule { action: vec![k.zeros(md); l.rank() * names.len()], p_op: vec![k.zeros(md); names.len()], names }
    }

    /// `M = A` with L acting through the anchor and `P(a) = a^p`.
    pub fn regular(l: &LieRinehart) -> Self {
        let mut m = Self::trivial(l, vec!["m".into()]);
        m.p_op = vec![l.algebra().one()];
        m
    }

    /// Replaces P, keeping the action.
    pub fn with_p_op(&self, p_op: Vec<Vector>) -> Result<Self> {
        if p_op.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!("P has {} images, expected {}", p_op.len(), self.rank())));
        }
        Ok(BeckModule { p_op, ..self.clone() })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn action_table(&self) -> &[Vector] {
        &self.action
    }

    pub fn p_images(&self) -> &[Vector] {
        &self.p_op
    }

    pub fn k_dim(&self, l: &LieRinehart) -> usize {
        self.rank() * l.algebra().dim()
    }

    pub fn zero_element(&self, l: &LieRinehart) -> Vector {
        l.field().zeros(self.k_dim(l))
    }

    pub fn component<'a>(&self, l: &LieRinehart, m: &'a [RatFunc], b: usize) -> &'a [RatFunc] {
        let d = l.algebra().dim();
        &m[b * d..(b + 1) * d]
    }

    /// `a m_b`
    pub fn monomial(&self, l: &LieRinehart, a: &[RatFunc], b: usize) -> Vector {
        let d = l.algebra().dim();
        let mut v = self.zero_element(l);
        v[b * d..(b + 1) * d].clone_from_slice(a);
        v
    }

    pub fn scale(&self, l: &LieRinehart, a: &[RatFunc], m: &[RatFunc]) -> Vector {
        (0..self.rank()).flat_map(|b| l.algebra().mul(a, self.component(l, m, b))).collect()
    }

    /// `x . m`, extended from `X_i . m_b` by `X(a m) = a X(m) + X(a) m` and A-linearity in `x`.
    pub fn act(&self, l: &LieRinehart, x: &[RatFunc], m: &[RatFunc]) -> Vector {
        let r = self.rank();
        let alg = l.algebra();
        let ax = l.anchor(x);
        let mut out = self.zero_element(l);
        for b in 0..r {
            let mu = self.component(l, m, b);
            if vec_ops::is_zero(mu) {
                continue;
            }
            vec_ops::add_assign(&mut out, &self.monomial(l, &ax.mul_vec(mu), b));
            for i in 0..l.rank() {
                let xi = l.component(x, i);
                if vec_ops::is_zero(xi) {
                    continue;
                }
                vec_ops::add_assign(&mut out, &self.scale(l, &alg.mul(xi, mu), &self.action[i * r + b]));
            }
        }
        out
    }

    /// `x^k . m`
    pub fn act_power(&self, l: &LieRinehart, x: &[RatFunc], m: &[RatFunc], k: u32) -> Vector {
        let mut v = m.to_vec();
        for _ in 0..k {
            v = self.act(l, x, &v);
        }
        v
    }

    /// `P(sum a_b m_b) = sum a_b^p P(m_b)`
    pub fn apply_p(&self, l: &LieRinehart, m: &[RatFunc]) -> Vector {
        let alg = l.algebra();
        let mut out = self.zero_element(l);
        for b in 0..self.rank() {
            let mu = self.component(l, m, b);
            if vec_ops::is_zero(mu) {
                continue;
            }
            vec_ops::add_assign(&mut out, &self.scale(l, &alg.frobenius(mu), &self.p_op[b]));
        }
        out
    }

    pub fn random_element<R: Rng + ?Sized>(&self, l: &LieRinehart, rng: &mut R) -> Vector {
        l.field().random_vector(self.k_dim(l), rng)
    }

    pub fn show(&self, l: &LieRinehart, m: &[RatFunc]) -> String {
        let terms: Vec<String> = (0..self.rank())
            .filter(|&b| !vec_ops::is_zero(self.component(l, m, b)))
            .map(|b| {
                let c = l.algebra().show(self.component(l, m, b));
                if c == "1" {
                    self.names[b].clone()
                } else {
                    format!("({c})*{}", self.names[b])
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Module axioms, p-semilinearity of P and L-invariance of its image.
    pub fn check(&self, l: &RestrictedLieRinehart, config: &CheckConfig) -> Report {
        let alg = l.algebra();
        let kd = l.k_dim();
        let md = self.k_dim(l);
        let p = l.p() as u32;
        let kb: Vec<Vector> = (0..kd).map(|u| l.field().unit_vector(kd, u)).collect();
        let mb: Vec<Vector> = (0..md).map(|u| l.field().unit_vector(md, u)).collect();
        let lname = |u: usize| l.k_structure().names()[u].clone();
        let mname = |u: usize| self.show(l, &mb[u]);
        let mut report = Report::new("Beck module");

        let mut c = report.check("[X,Y]m = X(Ym) - Y(Xm)");
        for u in 0..kd {
            for v in u + 1..kd {
                let xy = l.bracket(&kb[u], &kb[v]);
                for (s, m) in mb.iter().enumerate() {
                    let lhs = self.act(l, &xy, m);
                    let rhs = vec_ops::sub(&self.act(l, &kb[u], &self.act(l, &kb[v], m)), &self.act(l, &kb[v], &self.act(l, &kb[u], m)));
                    c.case(lhs == rhs, || json!({ "X": lname(u), "Y": lname(v), "m": mname(s) }));
                }
            }
        }
        c.finish();

        let mut c = report.check("X^[p] m = X(X(...(X m)))");
        for (u, x) in kb.iter().enumerate() {
            let xp = l.p_map(x);
            for (s, m) in mb.iter().enumerate() {
                c.case(self.act(l, &xp, m) == self.act_power(l, x, m, p), || json!({ "X": lname(u), "m": mname(s) }));
            }
        }
        c.finish();

        let mut rng = config.rng("beck-module");
        let mut lin = report.check("(aX)m = a(Xm)");
        let mut leib_cases = Vec::new();
        let mut semi_cases = Vec::new();
        for _ in 0..config.samples.min(30) {
            if md == 0 {
                break;
            }
            let a = alg.random_element(&mut rng);
            let m = self.random_element(l, &mut rng);
            if kd > 0 {
                let x = l.random_element(&mut rng);
                let ok = self.act(l, &l.scale(&a, &x), &m) == self.scale(l, &a, &self.act(l, &x, &m));
                lin.case(ok, || json!({ "a": alg.show(&a), "X": l.show(&x), "m": self.show(l, &m) }));
                let lhs = self.act(l, &x, &self.scale(l, &a, &m));
                let rhs = vec_ops::add(&self.scale(l, &a, &self.act(l, &x, &m)), &self.scale(l, &l.anchor(&x).mul_vec(&a), &m));
                leib_cases.push((lhs == rhs, json!({ "a": alg.show(&a), "X": l.show(&x), "m": self.show(l, &m) })));
            }
            let ok = self.apply_p(l, &self.scale(l, &a, &m)) == self.scale(l, &alg.frobenius(&a), &self.apply_p(l, &m));
            semi_cases.push((ok, json!({ "a": alg.show(&a), "m": self.show(l, &m) })));
        }
        lin.finish();
        let mut c = report.check("X(am) = aX(m) + X(a)m");
        for (ok, w) in leib_cases {
            c.case(ok, || w);
        }
        c.finish();
        let mut c = report.check("P(am) = a^p P(m)");
        for (ok, w) in semi_cases {
            c.case(ok, || w);
        }
        c.finish();

        let mut c = report.check("L acts trivially on the image of P");
        for (s, m) in mb.iter().enumerate() {
            let pm = self.apply_p(l, m);
            for (u, x) in kb.iter().enumerate() {
                c.case(vec_ops::is_zero(&self.act(l, x, &pm)), || json!({ "X": lname(u), "m": mname(s) }));
            }
        }
        c.finish();
        report
    }
}

/// Checks M, then builds `M (x)_P L` with `f = P` and runs the axiom checker on it.
pub fn beck_module_assemble(m: &BeckModule, l: &RestrictedLieRinehart, config: &CheckConfig) -> Result<RestrictedLieRinehart> {
    let report = m.check(l, config);
    if !report.passed {
        return Err(Error::Axiom(Box::new(report)));
    }
    let e = semidirect(l, m, Some(m.p_images()))?;
    let report = check_lrr_axioms(&e, config);
    if !report.passed {
        return Err(Error::Axiom(Box::new(report)));
    }
    Ok(e)
}

/// `d(x)` for the A-linear map with `d(X_i) = images[i]`.
fn apply_der(l: &LieRinehart, m: &BeckModule, images: &[Vector], x: &[RatFunc]) -> Vector {
    let mut out = m.zero_element(l);
    for (i, img) in images.iter().enumerate() {
        vec_ops::add_assign(&mut out, &m.scale(l, l.component(x, i), img));
    }
    out
}

/// Beck derivations as images `d(X_i)`, one vector per A-basis element of L.
#[derive(Clone, Debug)]
pub struct BeckDerivations {
    pub basis: Vec<Vec<Vector>>,
    pub report: Report,
}

/// Defects of the Lie-derivation and restricted conditions on the k-basis.
fn derivation_defect(l: &RestrictedLieRinehart, m: &BeckModule, images: &[Vector]) -> Vector {
    let kd = l.k_dim();
    let p = l.p() as u32;
    let kb: Vec<Vector> = (0..kd).map(|u| l.field().unit_vector(kd, u)).collect();
    let dx: Vec<Vector> = kb.iter().map(|x| apply_der(l, m, images, x)).collect();
    let mut out = Vec::new();
    for u in 0..kd {
        for v in u + 1..kd {
            let lhs = apply_der(l, m, images, &l.bracket(&kb[u], &kb[v]));
            let rhs = vec_ops::sub(&m.act(l, &kb[u], &dx[v]), &m.act(l, &kb[v], &dx[u]));
            out.extend(vec_ops::sub(&lhs, &rhs));
        }
    }
    for u in 0..kd {
        let lhs = apply_der(l, m, images, &l.p_map(&kb[u]));
        let rhs = vec_ops::add(&m.act_power(l, &kb[u], &dx[u], p - 1), &m.apply_p(l, &dx[u]));
        out.extend(vec_ops::sub(&lhs, &rhs));
    }
    out
}

/// A basis of the Beck derivations `L -> M`: A-linear maps with
/// `d([x,y]) = x d(y) - y d(x)` and `d(x^[p]) = x^{p-1} d(x) + P(d(x))`.
///
/// Over `F_p` the conditions are linear in the unknowns `d(X_i)`.
pub fn beck_derivations(l: &RestrictedLieRinehart, m: &BeckModule, config: &CheckConfig) -> Result<BeckDerivations> {
    if !l.field().is_prime_field() {
        return Err(Error::RequiresPrimeField(l.field().to_string()));
    }
    let n = l.rank();
    let md = m.k_dim(l);
    let k = l.field();
    let unknowns = n * md;
    let split = |v: &[RatFunc]| -> Vec<Vector> { (0..n).map(|i| v[i * md..(i + 1) * md].to_vec()).collect() };
    let cols: Vec<Vector> = (0..unknowns).map(|u| derivation_defect(l, m, &split(&k.unit_vector(unknowns, u)))).collect();
    let rows = derivation_defect(l, m, &split(&k.zeros(unknowns))).len();
    let kernel = if unknowns == 0 {
        vec![]
    } else if rows == 0 {
        (0..unknowns).map(|u| k.unit_vector(unknowns, u)).collect()
    } else {
        Matrix::from_columns(l.p(), rows, &cols)?.kernel()
    };
    let basis: Vec<Vec<Vector>> = kernel.iter().map(|v| split(v)).collect();

    let mut report = Report::new("Beck derivations");
    let mut c = report.check("d([x,y]) = x d(y) - y d(x) and d(x^[p]) = x^{p-1} d(x) + P(d(x))");
    for d in &basis {
        c.case(vec_ops::is_zero(&derivation_defect(l, m, d)), || json!({ "d": d.iter().map(|v| m.show(l, v)).collect::<Vec<_>>() }));
    }
    c.finish();
    report.note(format!("dimension {} over {}", basis.len(), k));
    if !basis.is_empty() {
        let e = semidirect(l, m, Some(m.p_images()))?;
        for (j, d) in basis.iter().enumerate() {
            report.absorb(&format!("section {}", j + 1), section_hom_check(l, m, &e, d, config));
        }
    }
    Ok(BeckDerivations { basis, report })
}

/// `X -> d(X) + X` into `E = M (x)_P L` preserves bracket, p-map and anchor.
pub fn section_hom_check(l: &RestrictedLieRinehart, m: &BeckModule, e: &RestrictedLieRinehart, d: &[Vector], config: &CheckConfig) -> Report {
    let kd = l.k_dim();
    let f = |x: &[RatFunc]| -> Vector { [apply_der(l, m, d, x), x.to_vec()].concat() };
    let kb: Vec<Vector> = (0..kd).map(|u| l.field().unit_vector(kd, u)).collect();
    let lname = |u: usize| l.k_structure().names()[u].clone();
    let mut report = Report::new("section homomorphism");
    let mut c = report.check("f([x,y]) = [f(x), f(y)]");
    for u in 0..kd {
        for v in u + 1..kd {
            c.case(f(&l.bracket(&kb[u], &kb[v])) == e.bracket(&f(&kb[u]), &f(&kb[v])), || json!({ "x": lname(u), "y": lname(v) }));
        }
    }
    c.finish();
    let mut c = report.check("f(x^[p]) = f(x)^[p]");
    for u in 0..kd {
        c.case(f(&l.p_map(&kb[u])) == e.p_map(&f(&kb[u])), || json!({ "x": lname(u) }));
    }
    let mut rng = config.rng("section-hom");
    for _ in 0..config.samples.min(10) {
        let x = l.random_element(&mut rng);
        c.case(f(&l.p_map(&x)) == e.p_map(&f(&x)), || json!({ "x": l.show(&x) }));
    }
    c.finish();
    let mut c = report.check("anchor(f(x)) = anchor(x)");
    for u in 0..kd {
        c.case(e.anchor(&f(&kb[u])) == l.anchor(&kb[u]), || json!({ "x": lname(u) }));
    }
    c.finish();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::BaseField;
    use crate::rlie::{LieAlgebra, RestrictedLie};

    fn line(idempotent: bool) -> RestrictedLieRinehart {
        let k = BaseField::prime(2).unwrap();
        let lie = LieAlgebra::abelian(k, vec!["x".into()]);
        let img = if idempotent { k.one() } else { k.zero() };
        RestrictedLieRinehart::from_restricted_lie(&RestrictedLie::new(lie, vec![vec![img]]).unwrap())
    }

    #[test]
    fn zero_module_assembles_to_l() {
        let l = line(true);
        let e = beck_module_assemble(&BeckModule::zero(), &l, &CheckConfig::default()).unwrap();
        assert_eq!(e.k_structure(), l.k_structure());
        let d = beck_derivations(&l, &BeckModule::zero(), &CheckConfig::default()).unwrap();
        assert!(d.basis.is_empty());
    }

    #[test]
    fn identity_action_module() {
        let l = line(true);
        let k = l.field();
        let m = BeckModule::new(&l, vec!["m".into()], vec![vec![k.one()]], vec![vec![k.zero()]]).unwrap();
        let config = CheckConfig::new(20, 0);
        assert!(m.check(&l, &config).passed);
        assert!(beck_module_assemble(&m, &l, &config).is_ok());
    }

    #[test]
    fn non_invariant_p_is_reported() {
        let l = line(true);
        let k = l.field();
        let m = BeckModule::new(&l, vec!["m".into()], vec![vec![k.one()]], vec![vec![k.one()]]).unwrap();
        let r = m.check(&l, &CheckConfig::new(10, 0));
        assert!(!r.find("L acts trivially on the image of P").unwrap().passed);
        assert!(matches!(beck_module_assemble(&m, &l, &CheckConfig::default()), Err(Error::Axiom(_))));
    }

    #[test]
    fn derivations_of_a_line() {
        let config = CheckConfig::new(10, 0);
        let l = line(false);
        let m = BeckModule::trivial(&l, vec!["m".into()]);
        let d = beck_derivations(&l, &m, &config).unwrap();
        assert_eq!(d.basis.len(), 1);
        assert!(d.report.passed, "{:?}", d.report.first_failure());
        let l = line(true);
        let m = BeckModule::trivial(&l, vec!["m".into()]);
        assert!(beck_derivations(&l, &m, &config).unwrap().basis.is_empty());
    }

    #[test]
    fn function_field_is_rejected() {
        let e = crate::commalg::InsepExtension::new(2).unwrap();
        let l = crate::lrin::der_algebra(e.algebra()).unwrap();
        let m = BeckModule::regular(&l);
        assert!(matches!(beck_derivations(&l, &m, &CheckConfig::default()), Err(Error::RequiresPrimeField(_))));
    }
}
