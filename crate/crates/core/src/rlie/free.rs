//! The free restricted Lie algebra on m generators, truncated above degree N.
//!
//! Elements are realized as homogeneous noncommutative polynomials in the
//! truncated tensor algebra over F_p. The basis consists of the standard
//! bracketings of Lyndon words together with their iterated p-th powers.

use std::collections::BTreeMap;

use super::{LieAlgebra, RestrictedLie};
use crate::error::{Error, Result};
use crate::field::{BaseField, Vector};
use crate::linalg::Matrix;

/// Noncommutative polynomial: word -> coefficient mod p.
type Tensor = BTreeMap<Vec<u8>, u32>;

fn tensor_mul(a: &Tensor, b: &Tensor, p: u32, bound: usize) -> Tensor {
    let mut out = Tensor::new();
    for (u, x) in a {
        for (v, y) in b {
            if u.len() + v.len() > bound {
                continue;
            }
            let w: Vec<u8> = u.iter().chain(v).copied().collect();
            let c = out.entry(w).or_insert(0);
            *c = (*c + x * y) % p;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn tensor_commutator(a: &Tensor, b: &Tensor, p: u32, bound: usize) -> Tensor {
    let mut out = tensor_mul(a, b, p, bound);
    for (w, c) in tensor_mul(b, a, p, bound) {
        let e = out.entry(w).or_insert(0);
        *e = (*e + p - c) % p;
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Lyndon words of length 1..=n over an alphabet of size m, by Duval's algorithm.
fn lyndon_words(m: u8, n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut w: Vec<u8> = vec![0];
    while !w.is_empty() {
        out.push(w.clone());
        let len = w.len();
        while w.len() < n {
            w.push(w[w.len() - len]);
        }
        while w.last() == Some(&(m - 1)) {
            w.pop();
        }
        if let Some(last) = w.last_mut() {
            *last += 1;
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

fn is_lyndon(w: &[u8]) -> bool {
    (1..w.len()).all(|i| w[i..] > *w)
}

/// Bracketing `[P(u), P(v)]` with `v` the longest proper Lyndon suffix.
fn standard_split(w: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let i = (1..w.len()).find(|&i| is_lyndon(&w[i..])).expect("single letters are Lyndon");
    (w[..i].to_vec(), w[i..].to_vec())
}

/// The free restricted Lie algebra with its grading.
#[derive(Clone, Debug)]
pub struct FreeRestrictedLie {
    pub algebra: RestrictedLie,
    pub degrees: Vec<usize>,
    pub generators: usize,
    pub bound: usize,
}

fn generator_names(m: usize) -> Vec<String> {
    if m <= 4 {
        ["x", "y", "z", "w"][..m].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=m).map(|i| format!("x{i}")).collect()
    }
}

/// Builds the free restricted Lie algebra on `m` generators modulo degree `> bound`.
pub fn free_restricted_lie(p: u32, m: usize, bound: usize) -> Result<FreeRestrictedLie> {
    let field = BaseField::prime(p)?;
    if m == 0 || bound == 0 {
        return Err(Error::InvalidAlgebra("need at least one generator and degree bound 1".into()));
    }
    if m > 8 || (m as f64).powi(bound as i32) > 4096.0 {
        return Err(Error::SizeBoundExceeded(format!("{m} generators to degree {bound}")));
    }
    let gen_names = generator_names(m);
    let mut cache: BTreeMap<Vec<u8>, (String, Tensor)> = BTreeMap::new();
    fn realize(w: &[u8], p: u32, bound: usize, names: &[String], cache: &mut BTreeMap<Vec<u8>, (String, Tensor)>) -> (String, Tensor) {
        if let Some(hit) = cache.get(w) {
            return hit.clone();
        }
        let out = if w.len() == 1 {
            (names[w[0] as usize].clone(), Tensor::from([(w.to_vec(), 1)]))
        } else {
            let (u, v) = standard_split(w);
            let (nu, tu) = realize(&u, p, bound, names, cache);
            let (nv, tv) = realize(&v, p, bound, names, cache);
            (format!("[{nu},{nv}]"), tensor_commutator(&tu, &tv, p, bound))
        };
        cache.insert(w.to_vec(), out.clone());
        out
    }

    let mut elements: Vec<(String, usize, Tensor, u32)> = Vec::new();
    for w in lyndon_words(m as u8, bound) {
        let (name, t) = realize(&w, p, bound, &gen_names, &mut cache);
        let mut deg = w.len();
        let mut power = t.clone();
        elements.push((name.clone(), deg, t, 0));
        let mut q = p as usize;
        let mut level = 0;
        while deg * p as usize <= bound {
            let mut next = Tensor::from([(vec![], 1)]);
            for _ in 0..p {
                next = tensor_mul(&next, &power, p, bound);
            }
            power = next;
            deg *= p as usize;
            level += 1;
            elements.push((format!("{name}^[{q}]"), deg, power.clone(), level));
            q *= p as usize;
        }
    }
    // within a degree, brackets come before p-powers
    elements.sort_by_key(|e| (e.1, e.3));
    let dim = elements.len();
    let p8 = p as u8;

    // per degree: columns = basis elements of that degree in word coordinates
    let word_index = |w: &[u8]| w.iter().fold(0usize, |acc, &c| acc * m + c as usize);
    let coords = |t: &Tensor, deg: usize| -> Vector {
        let mut v = field.zeros(m.pow(deg as u32));
        for (w, c) in t {
            debug_assert_eq!(w.len(), deg);
            v[word_index(w)] = field.constant(*c as i64);
        }
        v
    };
    let mut systems: BTreeMap<usize, (Vec<usize>, Matrix)> = BTreeMap::new();
    for deg in 1..=bound {
        let idx: Vec<usize> = (0..dim).filter(|&i| elements[i].1 == deg).collect();
        let cols: Vec<Vector> = idx.iter().map(|&i| coords(&elements[i].2, deg)).collect();
        let mat = if cols.is_empty() {
            Matrix::zeros(p8, m.pow(deg as u32), 0)
        } else {
            Matrix::from_columns(p8, m.pow(deg as u32), &cols)?
        };
        if mat.rank() != idx.len() {
            return Err(Error::Verification(format!("basis elements of degree {deg} are dependent")));
        }
        systems.insert(deg, (idx, mat));
    }
    let express = |t: &Tensor, deg: usize| -> Result<Vector> {
        let mut out = field.zeros(dim);
        if t.is_empty() || deg > bound {
            return Ok(out);
        }
        let (idx, mat) = &systems[&deg];
        let x = mat
            .solve_particular(&coords(t, deg))?
            .ok_or_else(|| Error::Verification(format!("element of degree {deg} outside the span")))?;
        for (k, &i) in idx.iter().enumerate() {
            out[i] = x[k].clone();
        }
        Ok(out)
    };

    let mut table = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let deg = elements[i].1 + elements[j].1;
            let t = if deg > bound { Tensor::new() } else { tensor_commutator(&elements[i].2, &elements[j].2, p, bound) };
            table.push(express(&t, deg)?);
        }
    }
    let mut pmap = Vec::with_capacity(dim);
    for e in &elements {
        let deg = e.1 * p as usize;
        let mut t = Tensor::from([(vec![], 1)]);
        if deg <= bound {
            for _ in 0..p {
                t = tensor_mul(&t, &e.2, p, bound);
            }
        } else {
            t.clear();
        }
        pmap.push(express(&t, deg)?);
    }
    let names = elements.iter().map(|e| e.0.clone()).collect();
    let degrees = elements.iter().map(|e| e.1).collect();
    let lie = LieAlgebra::new(field, names, table)?;
    Ok(FreeRestrictedLie { algebra: RestrictedLie::new(lie, pmap)?, degrees, generators: m, bound })
}
