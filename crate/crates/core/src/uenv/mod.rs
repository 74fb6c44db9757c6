//! Enveloping algebras `U(A,L)` and `U_p(A,L)` through a normal-form rewriter,
//! PBW checks and Beck modules.
//!
//! Monomials `u^k = u_1^{k_1} ... u_n^{k_n}` use the fixed A-basis order of L.
//! A normal word is an optional A-letter followed by a nondecreasing run of
//! u-letters (exponents below p in restricted mode).

mod beck;
mod pbw;
mod universal;

pub use beck::{beck_derivations, beck_module_assemble, section_hom_check, BeckDerivations, BeckModule};
pub use pbw::{
    injectivity_check, enveloping_power_action_check, pbw_rank_check, restricted_relation_check, rinehart_basis_check,
};
pub use universal::{restricted_enveloping_algebra, universal_property_check, UniversalHom};

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{vec_ops, RatFunc, Vector};
use crate::lrin::RestrictedLieRinehart;

/// Rewrite steps allowed per normal form.
pub const STEP_LIMIT: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Letter {
    /// An element of A.
    A(Vector),
    /// The A-basis element `u_i` of L.
    U(usize),
    /// `z_i = u_i^p - u_i^[p]`.
    Z(usize),
}

pub type Word = Vec<Letter>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Restricted,
    /// `U(A,L)` truncated at total degree `bound`.
    Unrestricted { bound: usize },
}

/// Order in which reducible positions are rewritten.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
    Random(u64),
}

/// A normal form: exponent vector -> nonzero A-coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PBWElement {
    mode: Mode,
    terms: BTreeMap<Vec<u32>, Vector>,
}

impl PBWElement {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Vector> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest total degree, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.iter().sum()).max()
    }

    fn add_term(&mut self, exps: Vec<u32>, a: &[RatFunc]) {
        if vec_ops::is_zero(a) {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(c) => {
                vec_ops::add_assign(c, a);
                if vec_ops::is_zero(c) {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, a.to_vec());
            }
        }
    }
}

/// `U(A,L)` or `U_p(A,L)` for a fixed restricted Lie-Rinehart algebra.
#[derive(Clone, Debug)]
pub struct Enveloping {
    l: RestrictedLieRinehart,
    mode: Mode,
}

impl Enveloping {
    pub fn restricted(l: &RestrictedLieRinehart) -> Self {
        Enveloping { l: l.clone(), mode: Mode::Restricted }
    }

    pub fn unrestricted(l: &RestrictedLieRinehart, bound: usize) -> Self {
        Enveloping { l: l.clone(), mode: Mode::Unrestricted { bound } }
    }

    /// Degree bound `2p`.
    pub fn default_bound(l: &RestrictedLieRinehart) -> usize {
        2 * l.p() as usize
    }

    pub fn lie_rinehart(&self) -> &RestrictedLieRinehart {
        &self.l
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    fn n(&self) -> usize {
        self.l.rank()
    }

    fn p(&self) -> usize {
        self.l.p() as usize
    }

    pub fn zero(&self) -> PBWElement {
        PBWElement { mode: self.mode, terms: BTreeMap::new() }
    }

    pub fn one(&self) -> PBWElement {
        self.from_a(&self.l.algebra().one())
    }

    pub fn from_a(&self, a: &[RatFunc]) -> PBWElement {
        self.monomial(a, vec![0; self.n()])
    }

    /// `a u^k`
    pub fn monomial(&self, a: &[RatFunc], exps: Vec<u32>) -> PBWElement {
        let mut e = self.zero();
        e.add_term(exps, a);
        e
    }

    /// `sum_i a_i u_i` for `x = sum_i a_i X_i`.
    pub fn from_l(&self, x: &[RatFunc]) -> PBWElement {
        let mut e = self.zero();
        for i in 0..self.n() {
            e.add_term(unit_exps(self.n(), i), self.l.component(x, i));
        }
        e
    }

    pub fn add(&self, u: &PBWElement, v: &PBWElement) -> PBWElement {
        let mut out = u.clone();
        for (k, a) in &v.terms {
            out.add_term(k.clone(), a);
        }
        out
    }

    pub fn sub(&self, u: &PBWElement, v: &PBWElement) -> PBWElement {
        let mut out = u.clone();
        for (k, a) in &v.terms {
            out.add_term(k.clone(), &vec_ops::neg(a));
        }
        out
    }

    /// The words `a u_1^{k_1} ... u_n^{k_n}` making up `u`.
    pub fn words(&self, u: &PBWElement) -> Vec<Word> {
        u.terms
            .iter()
            .map(|(k, a)| {
                let mut w = vec![Letter::A(a.clone())];
                for (i, &e) in k.iter().enumerate() {
                    w.extend(std::iter::repeat_n(Letter::U(i), e as usize));
                }
                w
            })
            .collect()
    }

    pub fn multiply(&self, u: &PBWElement, v: &PBWElement) -> Result<PBWElement> {
        for m in [u.mode, v.mode] {
            if m != self.mode {
                return Err(Error::ModeMismatch);
            }
        }
        let mut out = self.zero();
        let wv = self.words(v);
        for a in self.words(u) {
            for b in &wv {
                let w: Word = a.iter().chain(b).cloned().collect();
                out = self.add(&out, &self.normal_form(&w, Strategy::Leftmost)?);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, u: &PBWElement, e: u32) -> Result<PBWElement> {
        let mut out = self.one();
        for _ in 0..e {
            out = self.multiply(&out, u)?;
        }
        Ok(out)
    }

    pub fn commutator(&self, u: &PBWElement, v: &PBWElement) -> Result<PBWElement> {
        Ok(self.sub(&self.multiply(u, v)?, &self.multiply(v, u)?))
    }

    fn weighted_degree(&self, w: &[Letter]) -> usize {
        w.iter()
            .map(|l| match l {
                Letter::A(_) => 0,
                Letter::U(_) => 1,
                Letter::Z(_) => self.p(),
            })
            .sum()
    }

    fn check_letters(&self, w: &[Letter]) -> Result<()> {
        let d = self.l.algebra().dim();
        for l in w {
            match l {
                Letter::A(a) if a.len() != d => {
                    return Err(Error::DimensionMismatch(format!("A-letter of length {}, expected {d}", a.len())))
                }
                Letter::U(i) | Letter::Z(i) if *i >= self.n() => return Err(Error::UnknownGenerator(format!("u{}", i + 1))),
                _ => {}
            }
        }
        Ok(())
    }

    /// Reduces a word to normal form with the given strategy.
    pub fn normal_form(&self, word: &[Letter], strategy: Strategy) -> Result<PBWElement> {
        self.check_letters(word)?;
        if let Mode::Unrestricted { bound } = self.mode {
            let deg = self.weighted_degree(word);
            if deg > bound {
                return Err(Error::DegreeBoundExceeded { degree: deg, bound });
            }
        }
        let mut rng = match strategy {
            Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        let mut out = self.zero();
        let mut stack: Vec<Word> = vec![word.to_vec()];
        let mut steps = 0usize;
        while let Some(w) = stack.pop() {
            let positions = self.redexes(&w);
            if positions.is_empty() {
                let (a, exps) = self.read_normal(&w);
                out.add_term(exps, &a);
                continue;
            }
            steps += 1;
            if steps > STEP_LIMIT {
                return Err(Error::RewriteLimit(STEP_LIMIT));
            }
            let pos = match (strategy, rng.as_mut()) {
                (Strategy::Leftmost, _) => positions[0],
                (Strategy::Rightmost, _) => *positions.last().expect("nonempty"),
                (_, Some(r)) => *positions.choose(r).expect("nonempty"),
                (Strategy::Random(_), None) => unreachable!(),
            };
            stack.extend(self.rewrite(&w, pos));
        }
        Ok(out)
    }

    /// Positions where some rule applies.
    fn redexes(&self, w: &[Letter]) -> Vec<usize> {
        let p = self.p();
        let mut out = Vec::new();
        for i in 0..w.len() {
            let hit = match (&w[i], w.get(i + 1)) {
                (Letter::Z(_), _) => true,
                (Letter::A(a), _) if vec_ops::is_zero(a) => true,
                (Letter::A(_), Some(Letter::A(_))) => true,
                (Letter::U(_), Some(Letter::A(_))) => true,
                (Letter::U(j), Some(Letter::U(k))) if j > k => true,
                (Letter::U(j), _) if self.mode == Mode::Restricted => {
                    i + p <= w.len() && w[i..i + p].iter().all(|l| *l == Letter::U(*j))
                }
                _ => false,
            };
            if hit {
                out.push(i);
            }
        }
        out
    }

    fn l_word(&self, x: &[RatFunc]) -> Vec<Word> {
        (0..self.n())
            .filter(|&i| !vec_ops::is_zero(self.l.component(x, i)))
            .map(|i| vec![Letter::A(self.l.component(x, i).to_vec()), Letter::U(i)])
            .collect()
    }

    fn rewrite(&self, w: &[Letter], i: usize) -> Vec<Word> {
        let alg = self.l.algebra();
        let splice = |len: usize, mid: Vec<Word>| -> Vec<Word> {
            mid.into_iter().map(|m| w[..i].iter().cloned().chain(m).chain(w[i + len..].iter().cloned()).collect()).collect()
        };
        match (&w[i], w.get(i + 1)) {
            (Letter::Z(j), _) => match self.mode {
                Mode::Restricted => vec![],
                Mode::Unrestricted { .. } => {
                    let mut mid = vec![vec![Letter::U(*j); self.p()]];
                    for mut t in self.l_word(&self.l.pmap_basis()[*j]) {
                        if let Letter::A(a) = &mut t[0] {
                            *a = vec_ops::neg(a);
                        }
                        mid.push(t);
                    }
                    splice(1, mid)
                }
            },
            (Letter::A(a), _) if vec_ops::is_zero(a) => vec![],
            (Letter::A(a), Some(Letter::A(b))) => splice(2, vec![vec![Letter::A(alg.mul(a, b))]]),
            (Letter::U(j), Some(Letter::A(a))) => {
                let da = self.l.anchors()[*j].apply(a);
                splice(2, vec![vec![Letter::A(a.clone()), Letter::U(*j)], vec![Letter::A(da)]])
            }
            (Letter::U(j), Some(Letter::U(k))) if j > k => {
                let mut mid = vec![vec![Letter::U(*k), Letter::U(*j)]];
                mid.extend(self.l_word(&self.l.bracket_table()[j * self.n() + k]));
                splice(2, mid)
            }
            (Letter::U(j), _) => splice(self.p(), self.l_word(&self.l.pmap_basis()[*j])),
            _ => unreachable!("not a redex"),
        }
    }

    fn read_normal(&self, w: &[Letter]) -> (Vector, Vec<u32>) {
        let mut a = self.l.algebra().one();
        let mut exps = vec![0; self.n()];
        for l in w {
            match l {
                Letter::A(b) => a = b.clone(),
                Letter::U(i) => exps[*i] += 1,
                Letter::Z(_) => unreachable!("normal words have no z-letters"),
            }
        }
        (a, exps)
    }

    /// Monomials spanning the algebra: exponents below p, or total degree at most the bound.
    pub fn basis_monomials(&self) -> Vec<Vec<u32>> {
        let n = self.n();
        let (cap, total) = match self.mode {
            Mode::Restricted => (self.p() as u32 - 1, None),
            Mode::Unrestricted { bound } => (bound as u32, Some(bound as u32)),
        };
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|k: Vec<u32>| {
                    (0..=cap).map(move |e| {
                        let mut k = k.clone();
                        k.push(e);
                        k
                    })
                })
                .collect();
        }
        if let Some(t) = total {
            out.retain(|k| k.iter().sum::<u32>() <= t);
            out.sort_by_key(|k| (k.iter().sum::<u32>(), std::cmp::Reverse(k.clone())));
        }
        out
    }

    /// k-coordinates on the basis `e_r u^k`, monomial-major.
    pub fn coordinates(&self, u: &PBWElement, monomials: &[Vec<u32>]) -> Vector {
        let d = self.l.algebra().dim();
        let mut v = self.l.field().zeros(monomials.len() * d);
        for (idx, k) in monomials.iter().enumerate() {
            if let Some(a) = u.terms.get(k) {
                v[idx * d..(idx + 1) * d].clone_from_slice(a);
            }
        }
        v
    }

    pub fn show_monomial(&self, k: &[u32]) -> String {
        let parts: Vec<String> = k
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { self.l.names()[i].clone() } else { format!("{}^{e}", self.l.names()[i]) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn show(&self, u: &PBWElement) -> String {
        let alg = self.l.algebra();
        let terms: Vec<String> = u
            .terms
            .iter()
            .map(|(k, a)| {
                let (c, m) = (alg.show(a), self.show_monomial(k));
                match (c.as_str(), m.as_str()) {
                    (_, "1") => c,
                    ("1", _) => m,
                    _ if c.contains(['+', '-']) => format!("({c})*{m}"),
                    _ => format!("{c}*{m}"),
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Parses a word such as `d x d` or `(1+s)*d*z(d)`. Tokens are L-basis names,
    /// `z(<name>)`, or expressions in A.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut out = Vec::new();
        for tok in tokenize(text, self.l.names()) {
            if let Some(i) = self.l.names().iter().position(|n| *n == tok) {
                out.push(Letter::U(i));
            } else if let Some(inner) = tok.strip_prefix("z(").and_then(|t| t.strip_suffix(')')) {
                let i = self.l.names().iter().position(|n| n == inner).ok_or_else(|| Error::UnknownGenerator(tok.clone()))?;
                out.push(Letter::Z(i));
            } else {
                let a = self.l.algebra().parse(&tok).map_err(|_| Error::UnknownGenerator(tok.clone()))?;
                out.push(Letter::A(a));
            }
        }
        Ok(out)
    }

    /// Random A-coefficients on every basis monomial.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> PBWElement {
        let mut e = self.zero();
        for k in self.basis_monomials() {
            e.add_term(k, &self.l.algebra().random_element(rng));
        }
        e
    }

    /// A random word of the given length over A-basis letters, u-letters and (unrestricted) z-letters.
    pub fn random_word<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Word {
        let d = self.l.algebra().dim();
        let n = self.n();
        let mut w = Vec::with_capacity(len);
        let mut budget = match self.mode {
            Mode::Unrestricted { bound } => bound,
            Mode::Restricted => usize::MAX,
        };
        while w.len() < len {
            let choice = rng.gen_range(0..4);
            if n == 0 || choice == 0 {
                w.push(Letter::A(self.l.algebra().basis(rng.gen_range(0..d))));
            } else if choice == 3 && budget >= self.p() {
                w.push(Letter::Z(rng.gen_range(0..n)));
                budget = budget.saturating_sub(self.p());
            } else if budget >= 1 {
                w.push(Letter::U(rng.gen_range(0..n)));
                budget = budget.saturating_sub(1);
            } else {
                w.push(Letter::A(self.l.algebra().random_element(rng)));
            }
        }
        w
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Restricted => write!(f, "restricted"),
            Mode::Unrestricted { bound } => write!(f, "unrestricted (degree <= {bound})"),
        }
    }
}

fn unit_exps(n: usize, i: usize) -> Vec<u32> {
    let mut k = vec![0; n];
    k[i] = 1;
    k
}

/// Splits on whitespace and top-level `*`, keeping chunks that are known names whole.
fn tokenize(text: &str, names: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        if names.iter().any(|n| n == chunk) {
            out.push(chunk.to_string());
            continue;
        }
        let mut cur = String::new();
        let mut depth = 0i32;
        for ch in chunk.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            if ch == '*' && depth == 0 {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            } else {
                cur.push(ch);
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
    }
    out
}

/// Strategies compared by the confluence test.
pub fn standard_strategies() -> [Strategy; 5] {
    [Strategy::Leftmost, Strategy::Rightmost, Strategy::Random(1), Strategy::Random(2), Strategy::Random(3)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commalg::CommAlgebra;
    use crate::field::BaseField;
    use crate::lrin::der_algebra;
    use crate::report::CheckConfig;

    pub(crate) fn dual_witt() -> RestrictedLieRinehart {
        let a = CommAlgebra::truncated_polynomial(BaseField::prime(2).unwrap(), "x", 2);
        der_algebra(&a).unwrap()
    }

    /// Der(F_p[x]/x^p) viewed as a restricted Lie algebra over k.
    pub(crate) fn witt_over_k(p: u32) -> RestrictedLieRinehart {
        let a = CommAlgebra::truncated_polynomial(BaseField::prime(p).unwrap(), "x", p);
        RestrictedLieRinehart::from_restricted_lie(der_algebra(&a).unwrap().k_structure())
    }

    #[test]
    fn single_generator() {
        let u = Enveloping::restricted(&dual_witt());
        let nf = u.normal_form(&[Letter::U(0)], Strategy::Leftmost).unwrap();
        assert_eq!(u.show(&nf), "d");
    }

    #[test]
    fn coefficient_move() {
        let u = Enveloping::restricted(&dual_witt());
        let w = u.parse_word("d x").unwrap();
        let nf = u.normal_form(&w, Strategy::Leftmost).unwrap();
        assert_eq!(u.show(&nf), "1 + x*d");
    }

    #[test]
    fn straightening_step() {
        // basis d < x*d over k; [d, x*d] = d in characteristic 2
        let l = witt_over_k(2);
        assert_eq!(l.names(), ["d", "x*d"]);
        let u = Enveloping::restricted(&l);
        let lhs = u.normal_form(&u.parse_word("x*d d").unwrap(), Strategy::Leftmost).unwrap();
        let rhs = u.add(&u.normal_form(&[Letter::U(0), Letter::U(1)], Strategy::Leftmost).unwrap(), &u.from_l(&l.basis(0)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn a_times_x_is_ax() {
        let l = dual_witt();
        let u = Enveloping::restricted(&l);
        let x = l.algebra().basis(1);
        let lhs = u.multiply(&u.from_a(&x), &u.from_l(&l.basis(0))).unwrap();
        assert_eq!(lhs, u.from_l(&l.scale(&x, &l.basis(0))));
    }

    #[test]
    fn unit_and_mode_mismatch() {
        let l = dual_witt();
        let r = Enveloping::restricted(&l);
        let v = Enveloping::unrestricted(&l, 4);
        let d = r.from_l(&l.basis(0));
        assert_eq!(r.multiply(&d, &r.one()).unwrap(), d);
        assert!(matches!(r.multiply(&d, &v.one()), Err(Error::ModeMismatch)));
    }

    #[test]
    fn errors() {
        let l = dual_witt();
        let u = Enveloping::unrestricted(&l, 2);
        assert!(matches!(u.parse_word("d q"), Err(Error::UnknownGenerator(_))));
        let w = u.parse_word("d d d").unwrap();
        assert!(matches!(u.normal_form(&w, Strategy::Leftmost), Err(Error::DegreeBoundExceeded { degree: 3, bound: 2 })));
    }

    #[test]
    fn restricted_power_rule() {
        let l = dual_witt();
        let u = Enveloping::restricted(&l);
        // d^2 = d^[2] = 0 and (x d)^2 = x d
        assert!(u.normal_form(&u.parse_word("d d").unwrap(), Strategy::Leftmost).unwrap().is_zero());
        let xd = u.from_l(&l.k_basis(0, 1));
        assert_eq!(u.pow(&xd, 2).unwrap(), xd);
    }

    #[test]
    fn z_letters() {
        let l = dual_witt();
        let u = Enveloping::unrestricted(&l, 4);
        let z = u.normal_form(&u.parse_word("z(d)").unwrap(), Strategy::Leftmost).unwrap();
        assert_eq!(u.show(&z), "d^2");
        let r = Enveloping::restricted(&l);
        assert!(r.normal_form(&r.parse_word("x z(d)").unwrap(), Strategy::Leftmost).unwrap().is_zero());
    }

    #[test]
    fn confluence_on_random_words() {
        let config = CheckConfig::new(40, 0);
        let mut rng = config.rng("confluence");
        for l in [dual_witt(), witt_over_k(2), witt_over_k(3)] {
            for u in [Enveloping::restricted(&l), Enveloping::unrestricted(&l, 6)] {
                for _ in 0..config.samples {
                    let len = rng.gen_range(1..6);
                    let w = u.random_word(len, &mut rng);
                    let forms: Vec<PBWElement> = standard_strategies().iter().map(|&s| u.normal_form(&w, s).unwrap()).collect();
                    assert!(forms.windows(2).all(|f| f[0] == f[1]), "{w:?}");
                }
            }
        }
    }

    #[test]
    fn multiplication_is_associative() {
        let config = CheckConfig::new(20, 0);
        let mut rng = config.rng("assoc");
        let l = witt_over_k(3);
        let u = Enveloping::restricted(&l);
        let mons = u.basis_monomials();
        let k = l.field();
        let rand_elem = |rng: &mut ChaCha8Rng| {
            let mut e = u.zero();
            for m in &mons {
                if rng.gen_bool(0.3) {
                    e = u.add(&e, &u.monomial(&[k.random(rng)], m.clone()));
                }
            }
            e
        };
        for _ in 0..config.samples {
            let (a, b, c) = (rand_elem(&mut rng), rand_elem(&mut rng), rand_elem(&mut rng));
            let lhs = u.multiply(&u.multiply(&a, &b).unwrap(), &c).unwrap();
            let rhs = u.multiply(&a, &u.multiply(&b, &c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn monomial_counts() {
        let l = witt_over_k(2);
        assert_eq!(Enveloping::restricted(&l).basis_monomials().len(), 4);
        assert_eq!(Enveloping::unrestricted(&l, 2).basis_monomials().len(), 6);
    }
}
