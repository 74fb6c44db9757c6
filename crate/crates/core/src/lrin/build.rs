//! Constructors: derivation algebras, semidirect products, abelian extensions
//! and transformation algebras.

use serde_json::json;

use super::{check_lrr_axioms, LieRinehart, RestrictedLieRinehart};
use crate::commalg::{derivation_space, CommAlgebra, Derivation};
use crate::error::{Error, Result};
use crate::field::{vec_ops, Vector};
use crate::linalg::Matrix;
use crate::report::{CheckConfig, Report};
use crate::rlie::RestrictedLie;
use crate::uenv::BeckModule;

/// Columns `e_r D_i` (flattened matrices) spanning the A-submodule generated by `ders`.
fn a_span_columns(a: &CommAlgebra, ders: &[Derivation]) -> Vec<Vector> {
    ders.iter()
        .flat_map(|d| (0..a.dim()).map(move |r| d.scaled(a, &a.basis(r)).into_matrix().entries().to_vec()))
        .collect()
}

fn derivation_name(a: &CommAlgebra, d: &Derivation, index: usize, rank: usize) -> String {
    if rank == 1 {
        return "d".into();
    }
    let one = a.one();
    let gens: Vec<usize> = (0..a.dim()).filter(|&j| a.names()[j] != "1" && !a.names()[j].contains(['*', '^'])).collect();
    let hits: Vec<usize> = gens.iter().copied().filter(|&j| d.apply(&a.basis(j)) == one).collect();
    match hits.as_slice() {
        [j] if gens.iter().all(|&g| g == *j || vec_ops::is_zero(&d.apply(&a.basis(g)))) => format!("d{}", a.names()[*j]),
        _ => format!("D{}", index + 1),
    }
}

/// `Der_k(A)` with the commutator bracket, identity anchor and `D -> D^p`.
///
/// An A-basis is chosen greedily from the canonical k-basis of derivations;
/// fails with [`Error::NotFree`] if none is found.
pub fn der_algebra(a: &CommAlgebra) -> Result<RestrictedLieRinehart> {
    let ders = derivation_space(a);
    let d = a.dim();
    let p = a.p();
    let total = ders.len();
    let mut chosen: Vec<Derivation> = Vec::new();
    let mut rank = 0;
    for cand in &ders {
        if rank == total {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(cand.clone());
        let cols = a_span_columns(a, &trial);
        let r = Matrix::from_columns(p, d * d, &cols)?.rank();
        if r == rank + d {
            chosen = trial;
            rank = r;
        }
    }
    if rank != total {
        return Err(Error::NotFree(format!("derivations span {total} dimensions over k, found a free part of {rank}")));
    }
    let n = chosen.len();
    let sys = if n == 0 { None } else { Some(Matrix::from_columns(p, d * d, &a_span_columns(a, &chosen))?) };
    let express = |m: &Matrix| -> Result<Vector> {
        match &sys {
            None => Ok(vec![]),
            Some(s) => s
                .solve_particular(m.entries())?
                .ok_or_else(|| Error::Verification("derivation outside the A-span of the chosen basis".into())),
        }
    };
    let mut bracket = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            bracket.push(express(&chosen[i].matrix().commutator(chosen[j].matrix()))?);
        }
    }
    let pmap = chosen.iter().map(|dd| express(&dd.matrix().pow(p as u32))).collect::<Result<Vec<_>>>()?;
    let names = chosen.iter().enumerate().map(|(i, dd)| derivation_name(a, dd, i, n)).collect();
    let lr = LieRinehart::new(a.clone(), names, bracket, chosen)?;
    RestrictedLieRinehart::new(lr, pmap)
}

/// Assembles `E = M (+) L` with A-basis `m_1, ..., m_r, X_1, ..., X_n`:
/// `[X_i, m] = X_i . m`, `[M, M] = 0`, `[X_i, X_j] = [X_i, X_j]_L + h_ij`,
/// `m^[p] = P(m)`, `X_i^[p] = (X_i^[p])_L + g_i`, and `M` in the kernel of the anchor.
///
/// Elements of E are `[m-part | L-part]` coordinate vectors. No axioms are checked.
pub fn abelian_extension(l: &RestrictedLieRinehart, m: &BeckModule, h: &[Vector], g: &[Vector]) -> Result<RestrictedLieRinehart> {
    let n = l.rank();
    let r = m.rank();
    let d = l.algebra().dim();
    let md = r * d;
    if h.len() != n * n || g.len() != n || h.iter().chain(g).any(|v| v.len() != md) {
        return Err(Error::DimensionMismatch(format!("cochains need {} + {n} module elements of length {md}", n * n)));
    }
    let k = l.field();
    let embed_m = |v: &[crate::field::RatFunc]| -> Vector { [v.to_vec(), k.zeros(n * d)].concat() };
    let embed_l = |v: &[crate::field::RatFunc]| -> Vector { [k.zeros(md), v.to_vec()].concat() };
    let big = r + n;
    let mut bracket = Vec::with_capacity(big * big);
    for u in 0..big {
        for v in 0..big {
            let val = match (u < r, v < r) {
                (true, true) => k.zeros(md + n * d),
                (false, true) => embed_m(&m.action_table()[(u - r) * r + v]),
                (true, false) => embed_m(&vec_ops::neg(&m.action_table()[(v - r) * r + u])),
                (false, false) => {
                    let (i, j) = (u - r, v - r);
                    vec_ops::add(&embed_l(&l.bracket_table()[i * n + j]), &embed_m(&h[i * n + j]))
                }
            };
            bracket.push(val);
        }
    }
    let alg = l.algebra().clone();
    let mut anchor = vec![Derivation::zero(&alg); r];
    anchor.extend(l.anchors().iter().cloned());
    let mut pmap: Vec<Vector> = m.p_images().iter().map(|v| embed_m(v)).collect();
    for i in 0..n {
        pmap.push(vec_ops::add(&embed_l(&l.pmap_basis()[i]), &embed_m(&g[i])));
    }
    let names = m.names().iter().chain(l.names()).cloned().collect();
    let lr = LieRinehart::new(alg, names, bracket, anchor)?;
    RestrictedLieRinehart::new(lr, pmap)
}

/// `M x L` with the semidirect bracket and p-map `(m+X)^[p] = X^{p-1}(m) + X^[p] (+ f(m))`.
///
/// `f` is given by its values on the A-basis of M and extended p-semilinearly,
/// so only L-invariance of its image needs checking.
pub fn semidirect(l: &RestrictedLieRinehart, m: &BeckModule, f: Option<&[Vector]>) -> Result<RestrictedLieRinehart> {
    let md = m.k_dim(l);
    let module = match f {
        Some(f) => {
            let module = m.with_p_op(f.to_vec())?;
            let kd = l.k_dim();
            for u in 0..md {
                let fm = module.apply_p(l, &l.field().unit_vector(md, u));
                for v in 0..kd {
                    if !vec_ops::is_zero(&module.act(l, &l.field().unit_vector(kd, v), &fm)) {
                        return Err(Error::NotInvariant(format!(
                            "{} does not kill f({})",
                            l.k_structure().names()[v],
                            module.show(l, &l.field().unit_vector(md, u))
                        )));
                    }
                }
            }
            module
        }
        None => m.with_p_op(vec![l.field().zeros(md); m.rank()])?,
    };
    let n = l.rank();
    abelian_extension(l, &module, &vec![l.field().zeros(md); n * n], &vec![l.field().zeros(md); n])
}

/// `(aX)^{p-1}(a m) = a^p X^{p-1}(m) + (aX)^{p-1}(a) m` on random samples.
pub fn power_action_identity(l: &RestrictedLieRinehart, m: &BeckModule, config: &CheckConfig) -> Report {
    let alg = l.algebra();
    let p = l.p() as u32;
    let mut report = Report::new("power action identity");
    let mut c = report.check("(aX)^{p-1}(am) = a^p X^{p-1}(m) + (aX)^{p-1}(a) m");
    let mut rng = config.rng("power-action");
    if l.k_dim() > 0 && m.rank() > 0 {
        for _ in 0..config.samples {
            let a = alg.random_element(&mut rng);
            let x = l.random_element(&mut rng);
            let v = m.random_element(l, &mut rng);
            let ax = l.scale(&a, &x);
            let lhs = m.act_power(l, &ax, &m.scale(l, &a, &v), p - 1);
            let mut coef = a.clone();
            let anchor = l.anchor(&ax);
            for _ in 0..p - 1 {
                coef = anchor.mul_vec(&coef);
            }
            let rhs = vec_ops::add(&m.scale(l, &alg.frobenius(&a), &m.act_power(l, &x, &v, p - 1)), &m.scale(l, &coef, &v));
            c.case(lhs == rhs, || json!({ "a": alg.show(&a), "X": l.show(&x), "m": m.show(l, &v) }));
        }
    }
    c.finish();
    report
}

/// Sign of the correction term used for the k-basis p-images of `A (x) g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PMapSign {
    Plus,
    Minus,
}

/// `A (x) g` together with the sign that passed the axiom checker.
#[derive(Clone, Debug)]
pub struct TransformationAlgebra {
    pub algebra: RestrictedLieRinehart,
    pub sign: PMapSign,
    /// True when both signs give the same p-map.
    pub signs_agree: bool,
    pub report: Report,
}

/// The transformation algebra `A (x) g` for a restricted Lie map `delta: g -> Der_k(A)`.
///
/// Bracket `[a (x) x, b (x) y] = ab (x) [x,y] + a delta(x)(b) (x) y - b delta(y)(a) (x) x`,
/// anchor `a (x) x -> a delta(x)`, and p-map
/// `(a (x) x)^[p] = a^p (x) x^[p] +/- (a delta(x))^{p-1}(a) (x) x`. Both signs
/// are tried; the one accepted by the checker is kept, preferring `+`.
pub fn transformation_algebra(a: &CommAlgebra, g: &RestrictedLie, delta: &[Derivation], config: &CheckConfig) -> Result<TransformationAlgebra> {
    let n = g.dim();
    let d = a.dim();
    let p = a.p() as u32;
    if delta.len() != n {
        return Err(Error::DimensionMismatch(format!("{} derivations for {n} basis vectors", delta.len())));
    }
    if g.field() != a.field() {
        return Err(Error::CharacteristicMismatch { expected: a.p(), found: g.p() });
    }
    let delta_of = |x: &[crate::field::RatFunc]| -> Matrix {
        let mut m = Matrix::zeros(a.p(), d, d);
        for (c, dd) in x.iter().zip(delta) {
            if !c.is_zero() {
                m = m.add(&dd.matrix().scale(c));
            }
        }
        m
    };
    for (i, dd) in delta.iter().enumerate() {
        if let Some(w) = dd.leibniz_defect(a) {
            return Err(Error::NotRestrictedHom { index: i, detail: format!("image is not a derivation (Leibniz fails on {w})") });
        }
        for j in 0..n {
            if delta_of(g.lie().bracket_basis(i, j)) != dd.matrix().commutator(delta[j].matrix()) {
                return Err(Error::NotRestrictedHom { index: i, detail: format!("bracket with {} is not preserved", g.names()[j]) });
            }
        }
        if delta_of(&g.pmap()[i]) != dd.matrix().pow(p) {
            return Err(Error::NotRestrictedHom { index: i, detail: "p-map is not preserved".into() });
        }
    }
    let lift = |x: &[crate::field::RatFunc]| -> Vector { x.iter().flat_map(|c| a.scalar(c)).collect() };
    let bracket = (0..n * n).map(|k| lift(g.lie().bracket_basis(k / n, k % n))).collect();
    let pmap: Vec<Vector> = g.pmap().iter().map(|v| lift(v)).collect();
    let lr = LieRinehart::new(a.clone(), g.names().to_vec(), bracket, delta.to_vec())?;

    let plus = RestrictedLieRinehart::new(lr.clone(), pmap.clone())?;
    let minus_images: Vec<Vector> = (0..n * d)
        .map(|u| {
            let (i, r) = (u / d, u % d);
            let e = a.basis(r);
            let lead = lr.scale(&a.frobenius(&e), &pmap[i]);
            let mut c = e.clone();
            let scaled = delta[i].scaled(a, &e);
            for _ in 0..p - 1 {
                c = scaled.apply(&c);
            }
            vec_ops::sub(&lead, &lr.monomial(&c, i))
        })
        .collect();
    let minus = RestrictedLieRinehart::with_k_images(lr, pmap, minus_images)?;
    let signs_agree = plus.k_structure().pmap() == minus.k_structure().pmap();

    let plus_report = check_lrr_axioms(&plus, config);
    let (algebra, sign, mut report) = if plus_report.passed {
        (plus, PMapSign::Plus, plus_report)
    } else {
        let minus_report = check_lrr_axioms(&minus, config);
        if !minus_report.passed {
            return Err(Error::Axiom(Box::new(plus_report)));
        }
        (minus, PMapSign::Minus, minus_report)
    };
    report.note(match (sign, signs_agree) {
        (_, true) => "p-map correction sign: both signs give the same p-map".to_string(),
        (PMapSign::Plus, false) => "p-map correction sign: + accepted".to_string(),
        (PMapSign::Minus, false) => "p-map correction sign: - accepted, + rejected".to_string(),
    });
    Ok(TransformationAlgebra { algebra, sign, signs_agree, report })
}
