//! Exhaustive oracles over F_2 and F_3 for Beck derivations and extension classes.

use restrict_lr_core::commalg::CommAlgebra;
use restrict_lr_core::ext::{build_extension, classify_ext, verify_equivalence, Extension, ExtensionData};
use restrict_lr_core::field::{vec_ops, BaseField, Vector};
use restrict_lr_core::linalg::Matrix;
use restrict_lr_core::lrin::der_algebra;
use restrict_lr_core::rlie::{LieAlgebra, RestrictedLie};
use restrict_lr_core::uenv::{beck_derivations, BeckModule};
use restrict_lr_core::{CheckConfig, RestrictedLieRinehart};

fn f(p: u32) -> BaseField {
    BaseField::prime(p).unwrap()
}

fn restricted(p: u32, names: &[&str], bracket: impl Fn(usize, usize) -> Vector, pmap: Vec<Vector>) -> RestrictedLieRinehart {
    let k = f(p);
    let lie = LieAlgebra::from_fn(k, names.iter().map(|s| s.to_string()).collect(), bracket).unwrap();
    RestrictedLieRinehart::from_restricted_lie(&RestrictedLie::new(lie, pmap).unwrap())
}

fn line(p: u32, idempotent: bool) -> RestrictedLieRinehart {
    let k = f(p);
    let img = if idempotent { k.one() } else { k.zero() };
    restricted(p, &["x"], |_, _| vec![k.zero()], vec![vec![img]])
}

fn dual_witt() -> RestrictedLieRinehart {
    der_algebra(&CommAlgebra::truncated_polynomial(f(2), "x", 2)).unwrap()
}

fn witt_over_k() -> RestrictedLieRinehart {
    let a = CommAlgebra::truncated_polynomial(f(2), "x", 2);
    RestrictedLieRinehart::from_restricted_lie(der_algebra(&a).unwrap().k_structure())
}

fn heisenberg() -> RestrictedLieRinehart {
    let k = f(2);
    let e = |i: usize| k.unit_vector(3, i);
    restricted(
        2,
        &["x", "y", "z"],
        |i, j| match (i, j) {
            (0, 1) | (1, 0) => e(2),
            _ => k.zeros(3),
        },
        vec![k.zeros(3); 3],
    )
}

fn names(r: usize) -> Vec<String> {
    (0..r).map(|b| format!("m{b}")).collect()
}

/// Coordinates of `index` in base p.
fn digits(k: &BaseField, len: usize, mut index: usize) -> Vector {
    let p = k.p() as usize;
    (0..len)
        .map(|_| {
            let c = index % p;
            index /= p;
            k.constant(c as i64)
        })
        .collect()
}

fn all_vectors(k: &BaseField, len: usize) -> Vec<Vector> {
    (0..(k.p() as usize).pow(len as u32)).map(|i| digits(k, len, i)).collect()
}

/// `d(x)` for the A-linear map with `d(X_i) = images[i]`, computed on the k-basis `e_r X_i`.
fn apply(l: &RestrictedLieRinehart, m: &BeckModule, images: &[Vector], x: &[restrict_lr_core::RatFunc]) -> Vector {
    let alg = l.algebra();
    let d = alg.dim();
    let mut out = m.zero_element(l);
    for (i, img) in images.iter().enumerate() {
        for r in 0..d {
            let c = &x[i * d + r];
            if !c.is_zero() {
                vec_ops::axpy(&mut out, c, &m.scale(l, &alg.basis(r), img));
            }
        }
    }
    out
}

/// Checks both derivation identities on every element and every pair of L.
fn is_beck_derivation(l: &RestrictedLieRinehart, m: &BeckModule, images: &[Vector], elements: &[Vector]) -> bool {
    let p = l.p() as u32;
    let dx: Vec<Vector> = elements.iter().map(|x| apply(l, m, images, x)).collect();
    for (a, x) in elements.iter().enumerate() {
        let lhs = apply(l, m, images, &l.p_map(x));
        let rhs = vec_ops::add(&m.act_power(l, x, &dx[a], p - 1), &m.apply_p(l, &dx[a]));
        if lhs != rhs {
            return false;
        }
        for (b, y) in elements.iter().enumerate().skip(a + 1) {
            let lhs = apply(l, m, images, &l.bracket(x, y));
            let rhs = vec_ops::sub(&m.act(l, x, &dx[b]), &m.act(l, y, &dx[a]));
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

fn beck_instances() -> Vec<(&'static str, RestrictedLieRinehart, BeckModule)> {
    let k = f(2);
    let mut out = Vec::new();
    let l = line(2, false);
    out.push(("nilpotent line, trivial M", l.clone(), BeckModule::trivial(&l, names(1))));
    let l = line(2, true);
    out.push(("idempotent line, trivial M", l.clone(), BeckModule::trivial(&l, names(1))));
    out.push(("idempotent line, P = id", l.clone(), BeckModule::trivial(&l, names(1)).with_p_op(vec![vec![k.one()]]).unwrap()));
    let l = dual_witt();
    out.push(("Der(F_2[x]/x^2), M = A", l.clone(), BeckModule::regular(&l)));
    out.push(("Der(F_2[x]/x^2), M = A^2", l.clone(), BeckModule::trivial(&l, names(2))));
    let l = restricted(2, &["x", "y"], |_, _| k.zeros(2), vec![k.unit_vector(2, 1), k.zeros(2)]);
    let act = vec![k.unit_vector(2, 1), k.zeros(2), k.zeros(2), k.zeros(2)];
    out.push(("x^[2] = y, x.m0 = m1", l.clone(), BeckModule::new(&l, names(2), act, vec![k.zeros(2); 2]).unwrap()));
    let l = witt_over_k();
    let p_op = vec![k.unit_vector(2, 1), k.zeros(2)];
    out.push(("Witt over k, P(m0) = m1", l.clone(), BeckModule::trivial(&l, names(2)).with_p_op(p_op).unwrap()));
    let l = heisenberg();
    out.push(("Heisenberg, trivial M", l.clone(), BeckModule::trivial(&l, names(1))));
    let l = restricted(2, &["x", "y"], |_, _| k.zeros(2), vec![k.unit_vector(2, 0), k.unit_vector(2, 1)]);
    let act = vec![k.unit_vector(2, 0), k.zeros(2), k.zeros(2), k.unit_vector(2, 1)];
    out.push(("torus, diagonal M", l.clone(), BeckModule::new(&l, names(2), act, vec![k.zeros(2); 2]).unwrap()));
    out
}

#[test]
fn beck_derivations_match_exhaustive_enumeration() {
    let config = CheckConfig::new(10, 0);
    for (label, l, m) in beck_instances() {
        assert!(m.check(&l, &config).passed, "{label}: module invalid");
        let k = l.field();
        let n = l.rank();
        let md = m.k_dim(&l);
        assert!(n * md <= 10, "{label}: Hom-space too large for the oracle");
        let elements = all_vectors(&k, l.k_dim());
        let solutions: Vec<Vector> = all_vectors(&k, n * md)
            .into_iter()
            .filter(|v| {
                let images: Vec<Vector> = (0..n).map(|i| v[i * md..(i + 1) * md].to_vec()).collect();
                is_beck_derivation(&l, &m, &images, &elements)
            })
            .collect();
        let found = beck_derivations(&l, &m, &config).unwrap();
        assert!(found.report.passed, "{label}");
        let dim = found.basis.len();
        assert_eq!(solutions.len(), 1 << dim, "{label}: solution count");
        let flat: Vec<Vector> = found.basis.iter().map(|d| d.concat()).collect();
        for s in &solutions {
            let mut cols = flat.clone();
            cols.push(s.clone());
            let rank = Matrix::from_columns(2, n * md, &cols).unwrap().rank();
            assert_eq!(rank, dim, "{label}: solution outside the computed span");
        }
    }
}

/// All valid cochain pairs, by direct enumeration.
fn valid_extensions(l: &RestrictedLieRinehart, m: &BeckModule, config: &CheckConfig) -> Vec<Extension> {
    let k = l.field();
    let n = l.rank();
    let md = m.k_dim(l);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    all_vectors(&k, (pairs.len() + n) * md)
        .into_iter()
        .filter_map(|v| {
            let mut data = ExtensionData::zero(l, m);
            for (t, &(i, j)) in pairs.iter().enumerate() {
                data.h[i * n + j] = v[t * md..(t + 1) * md].to_vec();
                data.h[j * n + i] = vec_ops::neg(&data.h[i * n + j]);
            }
            for i in 0..n {
                let t = pairs.len() + i;
                data.g[i] = v[t * md..(t + 1) * md].to_vec();
            }
            build_extension(l, m, data, config).ok()
        })
        .collect()
}

/// Equivalence by trying every A-linear `gamma: L -> M`.
fn brute_equivalent(e: &Extension, e2: &Extension, config: &CheckConfig) -> bool {
    let l = &e.l;
    let k = l.field();
    let n = l.rank();
    let md = e.m.k_dim(l);
    all_vectors(&k, n * md).into_iter().any(|v| {
        let gamma: Vec<Vector> = (0..n).map(|i| v[i * md..(i + 1) * md].to_vec()).collect();
        verify_equivalence(e, e2, &gamma, config).unwrap().passed
    })
}

#[test]
fn ext_classes_match_brute_force() {
    let config = CheckConfig::new(5, 0);
    let k = f(2);
    let cases: Vec<(RestrictedLieRinehart, BeckModule, usize)> = vec![
        (line(2, false), BeckModule::trivial(&line(2, false), names(1)), 2),
        (line(2, true), BeckModule::trivial(&line(2, true), names(1)), 1),
        (line(3, false), BeckModule::trivial(&line(3, false), names(1)), 3),
        (line(2, false), BeckModule::trivial(&line(2, false), names(2)), 4),
        (dual_witt(), BeckModule::regular(&dual_witt()), 0),
        (
            restricted(2, &["x", "y"], |_, _| k.zeros(2), vec![k.zeros(2); 2]),
            BeckModule::trivial(&restricted(2, &["x", "y"], |_, _| k.zeros(2), vec![k.zeros(2); 2]), names(1)),
            0,
        ),
    ];
    for (l, m, expected) in cases {
        let valid = valid_extensions(&l, &m, &config);
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (i, e) in valid.iter().enumerate() {
            match classes.iter_mut().find(|c| brute_equivalent(e, &valid[c[0]], &config)) {
                Some(c) => c.push(i),
                None => classes.push(vec![i]),
            }
        }
        if expected > 0 {
            assert_eq!(classes.len(), expected);
        }
        let c = classify_ext(&l, &m, &config).unwrap();
        assert!(c.report.passed, "{:?}", c.report.first_failure());
        assert_eq!(c.representatives.len(), classes.len());
        assert_eq!(c.valid, valid.len());
        let mut sizes = c.class_sizes.clone();
        let mut oracle_sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
        sizes.sort();
        oracle_sizes.sort();
        assert_eq!(sizes, oracle_sizes);

        // the group table agrees with cochain addition
        let oracle_class = |data: &ExtensionData| -> usize {
            let e = build_extension(&l, &m, data.clone(), &config).unwrap();
            classes.iter().position(|cl| brute_equivalent(&e, &valid[cl[0]], &config)).unwrap()
        };
        let label: Vec<usize> = c.representatives.iter().map(|r| oracle_class(&r.data)).collect();
        for i in 0..label.len() {
            for j in 0..label.len() {
                let sum = c.representatives[i].data.add(&c.representatives[j].data);
                assert_eq!(label[c.table[i][j]], oracle_class(&sum));
            }
        }
    }
}
