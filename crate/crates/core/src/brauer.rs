//! Regular extensions of `Der_k(K)` by K for `K = k(s)`, `s^p = t`, and the
//! differential crossed products `A_beta = K<u>`, `u c - c u = d(c)`, `u^p = beta`.

use rayon::prelude::*;
use serde_json::json;

use crate::commalg::{AssocAlgebra, InsepExtension};
use crate::error::{Error, Result};
use crate::ext::{baer_sum, build_extension, verify_equivalence, Extension, ExtensionData};
use crate::field::{vec_ops, Poly, RatFunc, Vector};
use crate::linalg::Matrix;
use crate::lrin::{der_algebra, RestrictedLieRinehart};
use crate::report::{CheckConfig, Report};
use crate::rlie::{check_restricted, restricted_from_associative};
use crate::uenv::BeckModule;

/// Degree bound of the evidence-only witness search.
pub const WITNESS_DEGREE: usize = 3;
/// Largest number of candidates tried by the witness search.
pub const WITNESS_CANDIDATES: usize = 1 << 16;

/// The extension of `L = Der_k(K)` by `M = K` whose canonical section has `d^[p] = beta m`.
#[derive(Clone, Debug)]
pub struct RegularExtension {
    pub setup: InsepExtension,
    pub beta: RatFunc,
    pub extension: Extension,
}

/// `L = Der_k(K)` and the module `M = K` with `P(a m) = a^p m`.
pub fn regular_pieces(setup: &InsepExtension) -> Result<(RestrictedLieRinehart, BeckModule)> {
    let l = der_algebra(setup.algebra())?;
    let m = BeckModule::regular(&l);
    Ok((l, m))
}

/// Builds `E_beta`; fails with [`Error::NotConstant`] unless `d(beta) = 0`.
pub fn regular_extension(setup: &InsepExtension, beta: &[RatFunc], config: &CheckConfig) -> Result<RegularExtension> {
    let (l, m) = regular_pieces(setup)?;
    let a = setup.algebra();
    let mut data = ExtensionData::zero(&l, &m);
    data.g[0] = beta.to_vec();
    match build_extension(&l, &m, data, config) {
        Ok(extension) => {
            let beta = setup.as_scalar(beta).ok_or_else(|| Error::Verification("valid p-curvature outside k".into()))?;
            Ok(RegularExtension { setup: setup.clone(), beta, extension })
        }
        Err(Error::Axiom(report)) => {
            let db = setup.partial().apply(beta);
            if vec_ops::is_zero(&db) {
                Err(Error::Axiom(report))
            } else {
                Err(Error::NotConstant(a.show(beta), a.show(&db)))
            }
        }
        Err(e) => Err(e),
    }
}

fn binomial_mod(n: usize, k: usize, p: u8) -> i64 {
    let mut c: u64 = 1;
    for i in 0..k {
        c = c * (n - i) as u64 / (i + 1) as u64;
    }
    (c % p as u64) as i64
}

/// `A_beta` on the k-basis `s^i u^j` (index `i + p j`).
#[derive(Clone, Debug)]
pub struct CrossedProduct {
    pub beta: RatFunc,
    pub algebra: AssocAlgebra,
}

impl CrossedProduct {
    pub fn p(&self) -> usize {
        self.algebra.p() as usize
    }

    /// The element `c` of K.
    pub fn from_k(&self, c: &[RatFunc]) -> Vector {
        let mut v = self.algebra.zero();
        v[..self.p()].clone_from_slice(c);
        v
    }

    pub fn s(&self) -> Vector {
        self.algebra.basis(1)
    }

    pub fn u(&self) -> Vector {
        self.algebra.basis(self.p())
    }
}

/// The differential crossed product for `beta` in k. Associativity is checked on all basis triples.
pub fn crossed_product(setup: &InsepExtension, beta: &RatFunc) -> Result<CrossedProduct> {
    let p = setup.p() as usize;
    let k = setup.base();
    let kalg = setup.algebra();
    let d = setup.partial();
    let dim = p * p;
    let names: Vec<String> = (0..dim)
        .map(|idx| {
            let (i, j) = (idx % p, idx / p);
            let sp = match i {
                0 => String::new(),
                1 => "s".into(),
                _ => format!("s^{i}"),
            };
            let up = match j {
                0 => String::new(),
                1 => "u".into(),
                _ => format!("u^{j}"),
            };
            match (sp.is_empty(), up.is_empty()) {
                (true, true) => "1".into(),
                (false, true) => sp,
                (true, false) => up,
                (false, false) => format!("{sp}*{up}"),
            }
        })
        .collect();
    let product = |x: usize, y: usize| -> Vector {
        let (i, j) = (x % p, x / p);
        let (kk, l) = (y % p, y / p);
        let mut out = k.zeros(dim);
        let mut dsk = kalg.basis(kk);
        for m in 0..=j {
            let coef = binomial_mod(j, m, k.p());
            if coef != 0 {
                let c = kalg.mul(&kalg.basis(i), &dsk);
                let mut q = j - m + l;
                let mut scale = k.constant(coef);
                if q >= p {
                    q -= p;
                    scale = &scale * beta;
                }
                for (a, ca) in c.iter().enumerate() {
                    out[a + p * q] += &(&scale * ca);
                }
            }
            dsk = d.apply(&dsk);
        }
        out
    };
    let table = (0..dim * dim).map(|idx| product(idx / dim, idx % dim)).collect();
    let algebra = AssocAlgebra::from_table(k, names, table, k.unit_vector(dim, 0))?;
    Ok(CrossedProduct { beta: beta.clone(), algebra })
}

/// Associativity, dimension, restricted structure, center and sandwich rank of `A_beta`.
pub fn crossed_product_report(a: &CrossedProduct, config: &CheckConfig) -> Report {
    let mut report = Report::new("differential crossed product");
    report.absorb("algebra", a.algebra.check());
    let p = a.p();
    let mut c = report.check("dimension p^2");
    c.case(a.algebra.dim() == p * p, || json!({ "dim": a.algebra.dim() }));
    c.finish();
    let alg = &a.algebra;
    let mut c = report.check("u c - c u = d(c) and u^p = beta");
    let setup_partial = |i: usize| -> Vector {
        // d(s^i) = i s^{i-1}
        let mut v = alg.zero();
        if i > 0 {
            v[i - 1] = alg.field().constant(i as i64);
        }
        v
    };
    for i in 0..p {
        let si = alg.basis(i);
        c.case(alg.commutator(&a.u(), &si) == setup_partial(i), || json!({ "c": alg.names()[i] }));
    }
    c.case(alg.pow(&a.u(), p as u64) == alg.scalar(&a.beta), || json!({ "beta": a.beta.to_string() }));
    c.finish();
    match restricted_from_associative(alg) {
        Ok(r) => report.absorb("commutator Lie algebra", check_restricted(&r, &CheckConfig::new(config.samples.min(20), config.seed))),
        Err(e) => {
            let mut c = report.check("commutator Lie algebra is restricted");
            c.case(false, || json!({ "error": e.to_string() }));
            c.finish();
        }
    }
    let center = alg.centralizer(&[a.s(), a.u()]);
    let mut c = report.check("center is k");
    c.case(center.len() == 1, || json!({ "center_dim": center.len() }));
    c.finish();
    let k_part: Vec<Vector> = (0..p).map(|i| alg.basis(i)).collect();
    let cent_k = alg.centralizer(&k_part);
    let mut c = report.check("K is its own centralizer");
    c.case(cent_k.len() == p, || json!({ "dim": cent_k.len() }));
    c.finish();
    let rank = alg.sandwich_rank();
    let mut c = report.check("sandwich map A (x) A^op -> End_k(A) is bijective");
    c.case(rank == p.pow(4), || json!({ "rank": rank }));
    c.finish();
    report
}

/// `(u + gamma)^p` in `A_beta`.
pub fn shifted_power(a: &CrossedProduct, gamma: &[RatFunc]) -> Vector {
    let alg = &a.algebra;
    alg.pow(&vec_ops::add(&a.u(), &a.from_k(gamma)), a.p() as u64)
}

/// Outcome of [`verify_split_witness`].
#[derive(Clone, Debug)]
pub enum SplitWitness {
    /// `psi: A_beta -> End_k(K)`, `c -> L_c`, `u + gamma -> d`, with its verification.
    Split { psi: Matrix, report: Report },
    /// The nonzero value of `(u + gamma)^p`.
    Residue(Vector),
}

impl SplitWitness {
    pub fn is_split(&self) -> bool {
        matches!(self, SplitWitness::Split { report, .. } if report.passed)
    }
}

/// If `(u + gamma)^p = 0` in `A_beta`, builds and verifies the isomorphism onto `End_k(K)`.
pub fn verify_split_witness(setup: &InsepExtension, a: &CrossedProduct, gamma: &[RatFunc]) -> SplitWitness {
    let w = shifted_power(a, gamma);
    if !vec_ops::is_zero(&w) {
        return SplitWitness::Residue(w);
    }
    let p = a.p();
    let k = setup.base();
    let kalg = setup.algebra();
    let end = AssocAlgebra::matrix_algebra(k, p);
    let ls = kalg.left_mul(&setup.s());
    let du = setup.partial().matrix().sub(&kalg.left_mul(gamma));
    let cols: Vec<Vector> = (0..p * p).map(|idx| ls.pow((idx % p) as u32).mul(&du.pow((idx / p) as u32)).entries().to_vec()).collect();
    let psi = Matrix::from_columns(k.p(), p * p, &cols).expect("square");
    let mut report = Report::new("split witness");
    let mut c = report.check("psi(xy) = psi(x) psi(y)");
    c.case(psi.mul_vec(&a.algebra.one()) == end.one(), || json!({ "x": "1" }));
    for x in 0..p * p {
        for y in 0..p * p {
            let (bx, by) = (a.algebra.basis(x), a.algebra.basis(y));
            let ok = psi.mul_vec(&a.algebra.mul(&bx, &by)) == end.mul(&psi.mul_vec(&bx), &psi.mul_vec(&by));
            c.case(ok, || json!({ "x": a.algebra.names()[x], "y": a.algebra.names()[y] }));
        }
    }
    c.finish();
    let mut c = report.check("psi is bijective");
    let rank = psi.rank();
    c.case(rank == p * p, || json!({ "rank": rank }));
    c.finish();
    SplitWitness::Split { psi, report }
}

/// `beta + gamma^p + d^{p-1}(gamma)`: the p-curvature after shifting the section by gamma.
pub fn shifted_beta(setup: &InsepExtension, beta: &RatFunc, gamma: &[RatFunc]) -> Vector {
    let kalg = setup.algebra();
    let mut dg = gamma.to_vec();
    for _ in 0..setup.p() - 1 {
        dg = setup.partial().apply(&dg);
    }
    vec_ops::add(&vec_ops::add(&setup.embed(beta), &kalg.frobenius(gamma)), &dg)
}

/// Checks that `s -> s`, `u -> u + gamma` is an algebra isomorphism `source -> target`.
pub fn shift_isomorphism(source: &CrossedProduct, target: &CrossedProduct, gamma: &[RatFunc]) -> Report {
    let p = source.p();
    let alg = &target.algebra;
    let ug = vec_ops::add(&target.u(), &target.from_k(gamma));
    let cols: Vec<Vector> = (0..p * p).map(|idx| alg.mul(&alg.basis(idx % p), &alg.pow(&ug, (idx / p) as u64))).collect();
    let f = Matrix::from_columns(alg.p(), p * p, &cols).expect("square");
    let mut report = Report::new("shift isomorphism");
    let mut c = report.check("f(xy) = f(x) f(y)");
    for x in 0..p * p {
        for y in 0..p * p {
            let (bx, by) = (source.algebra.basis(x), source.algebra.basis(y));
            let ok = f.mul_vec(&source.algebra.mul(&bx, &by)) == alg.mul(&f.mul_vec(&bx), &f.mul_vec(&by));
            c.case(ok, || json!({ "x": source.algebra.names()[x], "y": source.algebra.names()[y] }));
        }
    }
    c.finish();
    let mut c = report.check("f is bijective");
    let rank = f.rank();
    c.case(rank == p * p, || json!({ "rank": rank }));
    c.finish();
    report
}

/// Evidence-only search for gamma with polynomial coefficients of degree `<= degree`
/// making `beta + gamma^p + d^{p-1}(gamma)` vanish. A miss proves nothing.
pub fn search_split_witness(setup: &InsepExtension, beta: &RatFunc, degree: usize) -> (Option<Vector>, usize) {
    let p = setup.p();
    let k = setup.base();
    let slots = setup.algebra().dim() * (degree + 1);
    let total = (p as usize).checked_pow(slots as u32).unwrap_or(usize::MAX).min(WITNESS_CANDIDATES);
    let decode = |mut idx: usize| -> Vector {
        (0..setup.algebra().dim())
            .map(|_| {
                let coeffs: Vec<u8> = (0..=degree)
                    .map(|_| {
                        let c = (idx % p as usize) as u8;
                        idx /= p as usize;
                        c
                    })
                    .collect();
                RatFunc::from_poly(Poly::from_coeffs(k.p(), &coeffs))
            })
            .collect()
    };
    let hit = (0..total).into_par_iter().find_first(|&idx| vec_ops::is_zero(&shifted_beta(setup, beta, &decode(idx))));
    (hit.map(decode), total)
}

/// Summary of the Brauer lab on one `beta`.
#[derive(Clone, Debug)]
pub struct BrauerDemo {
    pub beta: String,
    pub center_dim: usize,
    pub sandwich_rank: usize,
    pub split_witness: Option<String>,
    pub residue: Option<String>,
    pub isomorphism: Option<Matrix>,
    pub report: Report,
}

impl BrauerDemo {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "beta": self.beta,
            "center_dim": self.center_dim,
            "sandwich_rank": self.sandwich_rank,
        });
        if let Some(w) = &self.split_witness {
            v["split_witness"] = json!(w);
        }
        if let Some(r) = &self.residue {
            v["residue"] = json!(r);
        }
        if let Some(m) = &self.isomorphism {
            v["isomorphism"] = json!(m.to_string());
        }
        v
    }
}

/// Builds `E_beta` and `A_beta`, and tests `gamma` as a split witness (or searches for one).
pub fn brauer_demo(setup: &InsepExtension, beta: &[RatFunc], gamma: Option<&[RatFunc]>, config: &CheckConfig) -> Result<BrauerDemo> {
    let reg = regular_extension(setup, beta, config)?;
    let a = crossed_product(setup, &reg.beta)?;
    let mut report = Report::new("Brauer lab");
    report.absorb("E_beta", reg.extension.report.clone());
    report.absorb("A_beta", crossed_product_report(&a, config));
    let center_dim = a.algebra.centralizer(&[a.s(), a.u()]).len();
    let sandwich_rank = a.algebra.sandwich_rank();
    let kalg = setup.algebra();
    let (gamma, searched) = match gamma {
        Some(g) => (Some(g.to_vec()), None),
        None => {
            let (hit, n) = search_split_witness(setup, &reg.beta, WITNESS_DEGREE);
            (hit, Some(n))
        }
    };
    let mut demo = BrauerDemo {
        beta: reg.beta.to_string(),
        center_dim,
        sandwich_rank,
        split_witness: None,
        residue: None,
        isomorphism: None,
        report: Report::new(""),
    };
    if let Some(n) = searched {
        report.note(match &gamma {
            Some(g) => format!("witness found by bounded search over {n} candidates: {}", kalg.show(g)),
            None => format!("no witness among {n} candidates of degree <= {WITNESS_DEGREE}; this is not a proof of non-splitting"),
        });
    }
    if let Some(g) = gamma {
        let split = regular_extension(setup, &kalg.zero(), config)?;
        let ext_side = verify_equivalence(&split.extension, &reg.extension, std::slice::from_ref(&g), config)?;
        let witness = verify_split_witness(setup, &a, &g);
        let mut c = report.check("algebra-side and extension-side split tests agree");
        c.case(witness.is_split() == ext_side.passed, || json!({ "gamma": kalg.show(&g) }));
        c.finish();
        match witness {
            SplitWitness::Split { psi, report: r } => {
                report.absorb("split witness", r);
                report.absorb("equivalence E_0 -> E_beta", ext_side);
                demo.split_witness = Some(kalg.show(&g));
                demo.isomorphism = Some(psi);
            }
            SplitWitness::Residue(w) => {
                demo.residue = Some(a.algebra.show(&w));
                report.note(format!("gamma = {} is not a split witness", kalg.show(&g)));
            }
        }
    }
    demo.report = report;
    Ok(demo)
}

/// Sampled agreement between the extension side and the algebra side.
pub fn ext_to_brauer_demo(setup: &InsepExtension, config: &CheckConfig) -> Result<Report> {
    let k = setup.base();
    let kalg = setup.algebra();
    let samples = config.samples.min(5);
    let quick = CheckConfig::new(config.samples.min(10), config.seed);
    let mut rng = config.rng("ext-to-brauer");
    let mut report = Report::new("extensions and crossed products");
    let zero = regular_extension(setup, &kalg.zero(), &quick)?;

    let mut sums = Vec::new();
    let mut splits = Vec::new();
    let mut shifts = Vec::new();
    for _ in 0..samples {
        let b1 = k.random(&mut rng);
        let b2 = k.random(&mut rng);
        let gamma = kalg.random_element(&mut rng);
        let e1 = regular_extension(setup, &setup.embed(&b1), &quick)?;
        let e2 = regular_extension(setup, &setup.embed(&b2), &quick)?;
        let e12 = regular_extension(setup, &setup.embed(&(&b1 + &b2)), &quick)?;
        let sum = baer_sum(&e1.extension, &e2.extension, &quick)?;
        let ok = verify_equivalence(&sum, &e12.extension, &[kalg.zero()], &quick)?.passed;
        sums.push((ok, json!({ "beta": b1.to_string(), "beta'": b2.to_string() })));

        // split: beta = -(gamma^p + d^{p-1} gamma)
        let minus = vec_ops::neg(&shifted_beta(setup, &k.zero(), &gamma));
        let beta = setup.as_scalar(&minus).ok_or_else(|| Error::Verification("shifted p-curvature outside k".into()))?;
        let eb = regular_extension(setup, &minus, &quick)?;
        let a = crossed_product(setup, &beta)?;
        let alg_ok = verify_split_witness(setup, &a, &gamma).is_split();
        let ext_ok = verify_equivalence(&zero.extension, &eb.extension, std::slice::from_ref(&gamma), &quick)?.passed;
        splits.push((alg_ok && ext_ok, json!({ "gamma": kalg.show(&gamma) })));

        // equivalent extensions give isomorphic algebras
        let shifted = shifted_beta(setup, &b1, &gamma);
        let b1s = setup.as_scalar(&shifted).ok_or_else(|| Error::Verification("shifted p-curvature outside k".into()))?;
        let es = regular_extension(setup, &shifted, &quick)?;
        let ext_ok = verify_equivalence(&es.extension, &e1.extension, std::slice::from_ref(&gamma), &quick)?.passed;
        let iso = shift_isomorphism(&crossed_product(setup, &b1s)?, &crossed_product(setup, &b1)?, &gamma);
        shifts.push((ext_ok && iso.passed, json!({ "beta": b1.to_string(), "gamma": kalg.show(&gamma) })));
    }
    for (name, cases) in [
        ("E_beta + E_beta' is equivalent to E_(beta+beta')", sums),
        ("split extensions give algebras isomorphic to End_k(K)", splits),
        ("equivalent extensions give isomorphic algebras via u -> u + gamma", shifts),
    ] {
        let mut c = report.check(name);
        for (ok, w) in cases {
            c.case(ok, || w);
        }
        c.finish();
    }
    Ok(report)
}
