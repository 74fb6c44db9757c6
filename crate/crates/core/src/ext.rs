//! Abelian extensions `0 -> M -> E -> L -> 0` of restricted Lie-Rinehart algebras.
//!
//! An extension is stored relative to the canonical splitting `E = M (+) L` of
//! A-modules by two cochains: `h(X_i, X_j) = [X_i, X_j]_E - [X_i, X_j]_L` and
//! `g(X_i) = X_i^[p]_E - X_i^[p]_L`, both with values in M.

use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::field::{vec_ops, RatFunc, Vector};
use crate::linalg::Matrix;
use crate::lrin::{abelian_extension, check_lrr_axioms, RestrictedLieRinehart};
use crate::report::{CheckConfig, Report};
use crate::uenv::BeckModule;

/// Largest `dim_k(M (+) L)` accepted by [`classify_ext`].
pub const CLASSIFY_DIM_BOUND: usize = 6;
/// Largest number of cochain candidates enumerated by [`classify_ext`].
pub const CLASSIFY_CANDIDATE_BOUND: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionData {
    /// `h[i * n + j] = h(X_i, X_j)`
    pub h: Vec<Vector>,
    /// `g[i] = g(X_i)`
    pub g: Vec<Vector>,
}

impl ExtensionData {
    pub fn zero(l: &RestrictedLieRinehart, m: &BeckModule) -> Self {
        let z = m.zero_element(l);
        ExtensionData { h: vec![z.clone(); l.rank() * l.rank()], g: vec![z; l.rank()] }
    }

    pub fn add(&self, other: &ExtensionData) -> ExtensionData {
        let zip = |a: &[Vector], b: &[Vector]| a.iter().zip(b).map(|(x, y)| vec_ops::add(x, y)).collect();
        ExtensionData { h: zip(&self.h, &other.h), g: zip(&self.g, &other.g) }
    }

    pub fn neg(&self) -> ExtensionData {
        ExtensionData { h: self.h.iter().map(|v| vec_ops::neg(v)).collect(), g: self.g.iter().map(|v| vec_ops::neg(v)).collect() }
    }

    fn flatten(&self) -> Vector {
        self.h.iter().chain(&self.g).flatten().cloned().collect()
    }
}

/// A validated extension with its assembled middle term.
#[derive(Clone, Debug)]
pub struct Extension {
    pub l: RestrictedLieRinehart,
    pub m: BeckModule,
    pub data: ExtensionData,
    /// `E` on k-coordinates `[M part | L part]`.
    pub e: RestrictedLieRinehart,
    pub report: Report,
}

impl Extension {
    fn md(&self) -> usize {
        self.m.k_dim(&self.l)
    }

    /// `m -> (m, 0)`
    pub fn include(&self, mv: &[RatFunc]) -> Vector {
        [mv.to_vec(), self.l.zero()].concat()
    }

    /// `(m, X) -> X`
    pub fn project(&self, x: &[RatFunc]) -> Vector {
        x[self.md()..].to_vec()
    }

    /// `Y -> (gamma(Y), Y)` for the A-linear `gamma` with `gamma(X_i) = gamma[i]`.
    pub fn section(&self, gamma: &[Vector], y: &[RatFunc]) -> Vector {
        let mut mpart = self.m.zero_element(&self.l);
        for (i, gi) in gamma.iter().enumerate() {
            vec_ops::add_assign(&mut mpart, &self.m.scale(&self.l, self.l.component(y, i), gi));
        }
        [mpart, y.to_vec()].concat()
    }

    /// Cochains of the section `X_i -> X_i + gamma(X_i)`.
    pub fn cochains(&self, gamma: &[Vector]) -> Result<ExtensionData> {
        let n = self.l.rank();
        let md = self.md();
        let sig: Vec<Vector> = (0..n).map(|i| self.section(gamma, &self.l.basis(i))).collect();
        let m_part = |v: Vector| -> Result<Vector> {
            if !vec_ops::is_zero(&v[md..]) {
                return Err(Error::Verification("cochain value outside M".into()));
            }
            Ok(v[..md].to_vec())
        };
        let mut h = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let br = self.e.bracket(&sig[i], &sig[j]);
                h.push(m_part(vec_ops::sub(&br, &self.section(gamma, &self.l.bracket_table()[i * n + j])))?);
            }
        }
        let g = (0..n)
            .map(|i| m_part(vec_ops::sub(&self.e.p_map(&sig[i]), &self.section(gamma, &self.l.pmap_basis()[i]))))
            .collect::<Result<_>>()?;
        Ok(ExtensionData { h, g })
    }

    pub fn show(&self) -> serde_json::Value {
        let n = self.l.rank();
        let names = self.l.names();
        let mut h = serde_json::Map::new();
        for i in 0..n {
            for j in i + 1..n {
                h.insert(format!("{},{}", names[i], names[j]), json!(self.m.show(&self.l, &self.data.h[i * n + j])));
            }
        }
        let g: serde_json::Map<String, serde_json::Value> =
            (0..n).map(|i| (names[i].clone(), json!(self.m.show(&self.l, &self.data.g[i])))).collect();
        json!({ "h": h, "g": g })
    }
}

fn same_base(a: &Extension, b: &Extension) -> Result<()> {
    if a.l != b.l || a.m != b.m {
        return Err(Error::MismatchedExtensions("extensions of different algebras or modules".into()));
    }
    Ok(())
}

/// Assembles E from `(h, g)` and checks it is an extension inducing the given module structure.
pub fn build_extension(l: &RestrictedLieRinehart, m: &BeckModule, data: ExtensionData, config: &CheckConfig) -> Result<Extension> {
    let n = l.rank();
    let md = m.k_dim(l);
    if data.h.len() != n * n || data.g.len() != n || data.h.iter().chain(&data.g).any(|v| v.len() != md) {
        return Err(Error::DimensionMismatch(format!("need {} + {n} module elements of length {md}", n * n)));
    }
    let mut report = Report::new("extension");
    let mut c = report.check("h(X,X) = 0 and h(X,Y) = -h(Y,X)");
    for i in 0..n {
        for j in i..n {
            let ok = vec_ops::is_zero(&vec_ops::add(&data.h[i * n + j], &data.h[j * n + i]))
                && (i != j || vec_ops::is_zero(&data.h[i * n + i]));
            c.case(ok, || json!({ "X": l.names()[i], "Y": l.names()[j] }));
        }
    }
    if !c.finish() {
        return Err(Error::Axiom(Box::new(report)));
    }
    let e = abelian_extension(l, m, &data.h, &data.g)?;
    report.absorb("E", check_lrr_axioms(&e, config));

    let kd = l.k_dim();
    let mb: Vec<Vector> = (0..md).map(|u| l.field().unit_vector(md, u)).collect();
    let lb: Vec<Vector> = (0..kd).map(|u| l.field().unit_vector(kd, u)).collect();
    let inc = |v: &[RatFunc]| [v.to_vec(), l.zero()].concat();
    let lift = |x: &[RatFunc]| [m.zero_element(l), x.to_vec()].concat();
    let mname = |u: usize| m.show(l, &mb[u]);

    let mut c = report.check("[M,M] = 0");
    for u in 0..md {
        for v in u + 1..md {
            c.case(vec_ops::is_zero(&e.bracket(&inc(&mb[u]), &inc(&mb[v]))), || json!({ "m": mname(u), "n": mname(v) }));
        }
    }
    c.finish();
    let mut c = report.check("[X, m] in E equals X.m");
    for (x, xv) in lb.iter().enumerate() {
        for (u, mv) in mb.iter().enumerate() {
            let ok = e.bracket(&lift(xv), &inc(mv)) == inc(&m.act(l, xv, mv));
            c.case(ok, || json!({ "X": l.k_structure().names()[x], "m": mname(u) }));
        }
    }
    c.finish();
    let mut c = report.check("m^[p] in E equals P(m)");
    for (u, mv) in mb.iter().enumerate() {
        c.case(e.p_map(&inc(mv)) == inc(&m.apply_p(l, mv)), || json!({ "m": mname(u) }));
    }
    c.finish();
    let mut c = report.check("anchor vanishes on M");
    for (u, mv) in mb.iter().enumerate() {
        c.case(e.anchor(&inc(mv)).is_zero(), || json!({ "m": mname(u) }));
    }
    c.finish();

    if !report.passed {
        return Err(Error::Axiom(Box::new(report)));
    }
    Ok(Extension { l: l.clone(), m: m.clone(), data, e, report })
}

/// The split extension `M (x)_P L`.
pub fn split_extension(l: &RestrictedLieRinehart, m: &BeckModule, config: &CheckConfig) -> Result<Extension> {
    build_extension(l, m, ExtensionData::zero(l, m), config)
}

/// The map `f: E -> E'`, `f(m + X) = m + gamma(X) + X`, as a k-matrix.
pub fn equivalence_map(e: &Extension, e2: &Extension, gamma: &[Vector]) -> Result<Matrix> {
    same_base(e, e2)?;
    let md = e.md();
    let kd = e.l.k_dim();
    let mut cols: Vec<Vector> = (0..md).map(|u| e.e.field().unit_vector(md + kd, u)).collect();
    cols.extend((0..kd).map(|v| e2.section(gamma, &e.l.field().unit_vector(kd, v))));
    Matrix::from_columns(e.e.p(), md + kd, &cols)
}

/// Checks that `f(m + X) = m + gamma(X) + X` is an isomorphism of extensions `E -> E'`.
pub fn verify_equivalence(e: &Extension, e2: &Extension, gamma: &[Vector], config: &CheckConfig) -> Result<Report> {
    let f = equivalence_map(e, e2, gamma)?;
    let dim = f.cols();
    let md = e.md();
    let k = e.e.field();
    let basis: Vec<Vector> = (0..dim).map(|u| k.unit_vector(dim, u)).collect();
    let names = e.e.k_structure().names();
    let mut report = Report::new("equivalence of extensions");

    let mut c = report.check("f([x,y]) = [f(x), f(y)]");
    for u in 0..dim {
        for v in u + 1..dim {
            let ok = f.mul_vec(&e.e.bracket(&basis[u], &basis[v])) == e2.e.bracket(&f.mul_vec(&basis[u]), &f.mul_vec(&basis[v]));
            c.case(ok, || json!({ "x": names[u], "y": names[v] }));
        }
    }
    c.finish();
    let mut c = report.check("f(x^[p]) = f(x)^[p]");
    for (u, b) in basis.iter().enumerate() {
        c.case(f.mul_vec(&e.e.p_map(b)) == e2.e.p_map(&f.mul_vec(b)), || json!({ "x": names[u] }));
    }
    let mut rng = config.rng("equivalence");
    for _ in 0..config.samples.min(20) {
        let x = e.e.random_element(&mut rng);
        c.case(f.mul_vec(&e.e.p_map(&x)) == e2.e.p_map(&f.mul_vec(&x)), || json!({ "x": e.e.show(&x) }));
    }
    c.finish();
    let mut c = report.check("anchor(f(x)) = anchor(x)");
    for (u, b) in basis.iter().enumerate() {
        c.case(e2.e.anchor(&f.mul_vec(b)) == e.e.anchor(b), || json!({ "x": names[u] }));
    }
    c.finish();
    let mut c = report.check("f(a x) = a f(x)");
    for r in 0..e.l.algebra().dim() {
        let a = e.l.algebra().basis(r);
        for (u, b) in basis.iter().enumerate() {
            c.case(f.mul_vec(&e.e.scale(&a, b)) == e2.e.scale(&a, &f.mul_vec(b)), || json!({ "a": e.l.algebra().names()[r], "x": names[u] }));
        }
    }
    c.finish();
    let mut c = report.check("f restricts to the identity on M and covers the identity on L");
    for (u, b) in basis.iter().enumerate() {
        let fb = f.mul_vec(b);
        let ok = if u < md { fb == *b } else { e2.project(&fb) == e.project(b) };
        c.case(ok, || json!({ "x": names[u] }));
    }
    c.finish();
    let mut c = report.check("f is bijective");
    let rank = f.rank();
    c.case(rank == dim, || json!({ "rank": rank, "dim": dim }));
    c.finish();
    Ok(report)
}

/// Searches for `gamma` with `f(m + X) = m + gamma(X) + X` an equivalence `E -> E'`.
///
/// The cochains of the shifted section of `E'` depend affinely on gamma over
/// `F_p`, so the search is one linear solve. The answer is re-verified.
pub fn equivalent(e: &Extension, e2: &Extension, config: &CheckConfig) -> Result<Option<Vec<Vector>>> {
    same_base(e, e2)?;
    let k = e.l.field();
    if !k.is_prime_field() {
        return Err(Error::RequiresPrimeField(k.to_string()));
    }
    let n = e.l.rank();
    let md = e.md();
    let unknowns = n * md;
    let split = |v: &[RatFunc]| -> Vec<Vector> { (0..n).map(|i| v[i * md..(i + 1) * md].to_vec()).collect() };
    let base = e2.cochains(&split(&k.zeros(unknowns)))?.flatten();
    let target = vec_ops::sub(&e.data.flatten(), &base);
    let gamma = if unknowns == 0 {
        if vec_ops::is_zero(&target) {
            Some(vec![])
        } else {
            None
        }
    } else {
        let cols = (0..unknowns)
            .map(|u| Ok(vec_ops::sub(&e2.cochains(&split(&k.unit_vector(unknowns, u)))?.flatten(), &base)))
            .collect::<Result<Vec<_>>>()?;
        if target.is_empty() {
            Some(vec![k.zeros(md); n])
        } else {
            Matrix::from_columns(k.p(), target.len(), &cols)?.solve_particular(&target)?.map(|g| split(&g))
        }
    };
    if let Some(g) = &gamma {
        let r = verify_equivalence(e, e2, g, config)?;
        if !r.passed {
            return Err(Error::Verification(format!("equivalence witness rejected: {}", r.first_failure().unwrap_or_default())));
        }
    }
    Ok(gamma)
}

/// The Baer sum: the pullback `E x_L E'` modulo the diagonal `{(m, -m)}`.
pub fn baer_sum(e: &Extension, e2: &Extension, config: &CheckConfig) -> Result<Extension> {
    same_base(e, e2)?;
    let l = &e.l;
    let m = &e.m;
    let n = l.rank();
    let md = e.md();
    let kd = l.k_dim();
    let k = l.field();
    let mut report = Report::new("Baer sum");

    // pullback elements as pairs (x, x') with the same image in L
    let pair = |x: Vector, y: Vector| (x, y);
    let mut pb_basis: Vec<(Vector, Vector)> = Vec::new();
    for u in 0..md {
        pb_basis.push(pair(e.include(&k.unit_vector(md, u)), e2.e.zero()));
        pb_basis.push(pair(e.e.zero(), e2.include(&k.unit_vector(md, u))));
    }
    for v in 0..kd {
        let x = k.unit_vector(kd, v);
        pb_basis.push(pair(e.section(&[], &x), e2.section(&[], &x)));
    }
    let in_pullback = |(x, y): &(Vector, Vector)| e.project(x) == e2.project(y);
    let bracket = |(x, y): &(Vector, Vector), (u, v): &(Vector, Vector)| (e.e.bracket(x, u), e2.e.bracket(y, v));
    let pmap = |(x, y): &(Vector, Vector)| (e.e.p_map(x), e2.e.p_map(y));
    // quotient by the diagonal: (mu + X, mu' + X) -> (mu + mu', X)
    let quotient = |(x, y): &(Vector, Vector)| -> Vector {
        [vec_ops::add(&x[..md], &y[..md]), x[md..].to_vec()].concat()
    };

    let mut c = report.check("pullback is closed under bracket and p-map");
    for a in 0..pb_basis.len() {
        for b in a + 1..pb_basis.len() {
            c.case(in_pullback(&bracket(&pb_basis[a], &pb_basis[b])), || json!({ "pair": [a, b] }));
        }
        c.case(in_pullback(&pmap(&pb_basis[a])), || json!({ "element": a }));
    }
    c.finish();

    let mut c = report.check("the diagonal is a restricted ideal");
    for u in 0..md {
        let mv = k.unit_vector(md, u);
        let diag = (e.include(&mv), e2.include(&vec_ops::neg(&mv)));
        c.case(vec_ops::is_zero(&quotient(&pmap(&diag))), || json!({ "m": m.show(l, &mv) }));
        for b in &pb_basis {
            c.case(vec_ops::is_zero(&quotient(&bracket(&diag, b))), || json!({ "m": m.show(l, &mv) }));
        }
    }
    c.finish();

    let sig: Vec<(Vector, Vector)> = (0..n).map(|i| (e.section(&[], &l.basis(i)), e2.section(&[], &l.basis(i)))).collect();
    let lift = |y: &[RatFunc]| (e.section(&[], y), e2.section(&[], y));
    let mut h = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let v = vec_ops::sub(&quotient(&bracket(&sig[i], &sig[j])), &quotient(&lift(&l.bracket_table()[i * n + j])));
            h.push(v[..md].to_vec());
        }
    }
    let g: Vec<Vector> = (0..n)
        .map(|i| vec_ops::sub(&quotient(&pmap(&sig[i])), &quotient(&lift(&l.pmap_basis()[i])))[..md].to_vec())
        .collect();
    let data = ExtensionData { h, g };
    let mut c = report.check("cochains of the sum are (h + h', g + g')");
    c.case(data == e.data.add(&e2.data), || json!({}));
    c.finish();
    if !report.passed {
        return Err(Error::Axiom(Box::new(report)));
    }
    let mut out = build_extension(l, m, data, config)?;
    out.report.absorb("construction", report);
    Ok(out)
}

/// Equivalence classes of extensions of L by M with their Baer-sum table.
#[derive(Clone, Debug)]
pub struct Classification {
    pub representatives: Vec<Extension>,
    /// Number of valid cochain pairs in each class.
    pub class_sizes: Vec<usize>,
    /// `table[i][j]` is the class of `rep_i + rep_j`.
    pub table: Vec<Vec<usize>>,
    pub neutral: usize,
    pub candidates: usize,
    pub valid: usize,
    pub report: Report,
}

fn enumerate_vectors(k: &crate::BaseField, len: usize, index: usize) -> Vector {
    let p = k.p() as usize;
    let mut idx = index;
    (0..len)
        .map(|_| {
            let c = idx % p;
            idx /= p;
            k.constant(c as i64)
        })
        .collect()
}

/// Enumerates all cochain pairs over `F_p`, keeps valid ones and sorts them into classes.
pub fn classify_ext(l: &RestrictedLieRinehart, m: &BeckModule, config: &CheckConfig) -> Result<Classification> {
    let k = l.field();
    if !k.is_prime_field() {
        return Err(Error::RequiresPrimeField(k.to_string()));
    }
    let n = l.rank();
    let md = m.k_dim(l);
    if md + l.k_dim() > CLASSIFY_DIM_BOUND {
        return Err(Error::SizeBoundExceeded(format!("dim_k(M + L) = {} exceeds {CLASSIFY_DIM_BOUND}", md + l.k_dim())));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let coords = (pairs.len() + n) * md;
    let candidates = (k.p() as usize).checked_pow(coords as u32).filter(|&c| c <= CLASSIFY_CANDIDATE_BOUND).ok_or_else(|| {
        Error::SizeBoundExceeded(format!("{}^{coords} cochain candidates exceed {CLASSIFY_CANDIDATE_BOUND}", k.p()))
    })?;
    let quick = CheckConfig::new(config.samples.min(5), config.seed);
    let valid: Vec<Extension> = (0..candidates)
        .into_par_iter()
        .filter_map(|idx| {
            let v = enumerate_vectors(&k, coords, idx);
            let mut data = ExtensionData::zero(l, m);
            for (t, &(i, j)) in pairs.iter().enumerate() {
                let val = v[t * md..(t + 1) * md].to_vec();
                data.h[j * n + i] = vec_ops::neg(&val);
                data.h[i * n + j] = val;
            }
            for i in 0..n {
                let t = pairs.len() + i;
                data.g[i] = v[t * md..(t + 1) * md].to_vec();
            }
            build_extension(l, m, data, &quick).ok()
        })
        .collect();

    let mut reps: Vec<Extension> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    for ext in &valid {
        let mut found = None;
        for (c, r) in reps.iter().enumerate() {
            if equivalent(ext, r, &quick)?.is_some() {
                found = Some(c);
                break;
            }
        }
        match found {
            Some(c) => sizes[c] += 1,
            None => {
                reps.push(build_extension(l, m, ext.data.clone(), config)?);
                sizes.push(1);
            }
        }
    }
    let class_of = |x: &Extension| -> Result<usize> {
        for (c, r) in reps.iter().enumerate() {
            if equivalent(x, r, &quick)?.is_some() {
                return Ok(c);
            }
        }
        Err(Error::Verification("Baer sum outside the enumerated classes".into()))
    };
    let mut table = vec![vec![0; reps.len()]; reps.len()];
    for i in 0..reps.len() {
        for j in 0..reps.len() {
            table[i][j] = class_of(&baer_sum(&reps[i], &reps[j], &quick)?)?;
        }
    }
    let neutral = class_of(&split_extension(l, m, &quick)?)?;

    let mut report = Report::new("classification of extensions");
    let mut c = report.check("every representative passes the axiom checker");
    for (i, r) in reps.iter().enumerate() {
        c.case(r.report.passed, || json!({ "class": i }));
    }
    c.finish();
    report.absorb("group", group_law_report(&table, neutral));
    report.note(format!("{candidates} candidates, {} valid, {} classes", valid.len(), reps.len()));
    Ok(Classification { representatives: reps, class_sizes: sizes, table, neutral, candidates, valid: valid.len(), report })
}

/// Associativity, commutativity, neutral element and inverses of a finite operation table.
pub fn group_law_report(table: &[Vec<usize>], neutral: usize) -> Report {
    let n = table.len();
    let mut report = Report::new("abelian group");
    let mut c = report.check("(a+b)+c = a+(b+c)");
    for a in 0..n {
        for b in 0..n {
            for d in 0..n {
                c.case(table[table[a][b]][d] == table[a][table[b][d]], || json!([a, b, d]));
            }
        }
    }
    c.finish();
    let mut c = report.check("a+b = b+a");
    for a in 0..n {
        for b in 0..n {
            c.case(table[a][b] == table[b][a], || json!([a, b]));
        }
    }
    c.finish();
    let mut c = report.check("0+a = a");
    for a in 0..n {
        c.case(table[neutral][a] == a, || json!([a]));
    }
    c.finish();
    let mut c = report.check("a has an inverse");
    for a in 0..n {
        c.case((0..n).any(|b| table[a][b] == neutral), || json!([a]));
    }
    c.finish();
    report
}
