//! JSON documents describing an algebra, a Lie-Rinehart algebra over it, a module
//! and extension cochains.
//!
//! ```json
//! {
//!   "p": 2,
//!   "field": "Fp",
//!   "algebra": { "truncated": { "x": 2 } },
//!   "lie": {
//!     "basis": ["d"],
//!     "bracket": {},
//!     "anchor": { "d": { "x": "1" } },
//!     "pmap": {}
//!   },
//!   "module": { "basis": ["m"], "action": { "d.m": "0" }, "p_op": { "m": "0" } },
//!   "extensions": [ { "h": {}, "g": { "d": "m" } } ],
//!   "words": ["d x"]
//! }
//! ```
//!
//! Values are strings in the coefficient grammar over the declared names, or arrays
//! of k-coordinates. Missing table entries are zero. An explicit `algebra` may
//! instead give `basis` (unit first) and `mult` entries keyed `"a*b"`.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};

use crate::commalg::{AssocAlgebra, CommAlgebra, Derivation};
use crate::ext::ExtensionData;
use crate::field::{parse_expr, vec_ops, BaseField, ExprDomain, FieldKind, RatFunc, Vector};
use crate::linalg::Matrix;
use crate::lrin::{LieRinehart, RestrictedLieRinehart};
use crate::uenv::BeckModule;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocErrorKind {
    Syntax,
    Undeclared,
    DimensionMismatch,
    Invalid,
}

/// One problem in a document, located by JSON path and, inside strings, column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocError {
    pub kind: DocErrorKind,
    pub path: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DocErrorKind::Syntax => "syntax error",
            DocErrorKind::Undeclared => "undeclared name",
            DocErrorKind::DimensionMismatch => "dimension mismatch",
            DocErrorKind::Invalid => "invalid",
        };
        write!(f, "{kind}")?;
        if !self.path.is_empty() {
            write!(f, " at {}", self.path)?;
        }
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, " (line {l}, column {c})")?,
            (None, Some(c)) => write!(f, " (column {c})")?,
            _ => {}
        }
        write!(f, ": {}", self.message)
    }
}

fn doc_err(kind: DocErrorKind, path: &str, message: impl Into<String>) -> DocError {
    DocError { kind, path: path.into(), line: None, column: None, message: message.into() }
}

/// The commutative algebra together with the form it was written in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraBlock {
    pub algebra: CommAlgebra,
    /// `Some` when written as `k[x,..]/(x^n,..)`.
    pub truncated: Option<Vec<(String, u32)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraDocument {
    pub field: BaseField,
    pub algebra: Option<AlgebraBlock>,
    pub lie: Option<RestrictedLieRinehart>,
    pub module: Option<BeckModule>,
    pub extensions: Vec<ExtensionData>,
    pub words: Vec<String>,
}

impl AlgebraDocument {
    pub fn p(&self) -> u8 {
        self.field.p()
    }

    /// The algebra A: the declared one, the one under L, or k.
    pub fn algebra(&self) -> CommAlgebra {
        match (&self.algebra, &self.lie) {
            (Some(b), _) => b.algebra.clone(),
            (None, Some(l)) => l.algebra().clone(),
            _ => CommAlgebra::ground(self.field),
        }
    }
}

/// Free A-module on named generators, as an expression domain. `None` marks a
/// product of two generator terms.
struct ModuleDomain<'a> {
    alg: &'a AssocAlgebra,
    gens: &'a [String],
}

type ModValue = Option<Vec<Vector>>;

impl ModuleDomain<'_> {
    fn pure(&self, a: Vector) -> ModValue {
        let mut v = vec![a];
        v.extend((0..self.gens.len()).map(|_| self.alg.zero()));
        Some(v)
    }

    fn is_pure(v: &[Vector]) -> bool {
        v[1..].iter().all(|x| vec_ops::is_zero(x))
    }

    fn zip(a: &ModValue, b: &ModValue, f: impl Fn(&Vector, &Vector) -> Vector) -> ModValue {
        Some(a.as_ref()?.iter().zip(b.as_ref()?).map(|(x, y)| f(x, y)).collect())
    }
}

impl ExprDomain for ModuleDomain<'_> {
    type Value = ModValue;

    fn scalar(&self, c: RatFunc) -> ModValue {
        self.pure(self.alg.scalar(&c))
    }

    fn symbol(&self, name: &str) -> Option<ModValue> {
        if let Some(i) = self.gens.iter().position(|g| g == name) {
            let mut v = self.pure(self.alg.zero()).unwrap();
            v[i + 1] = self.alg.one();
            return Some(Some(v));
        }
        ExprDomain::symbol(self.alg, name).map(|a| self.pure(a))
    }

    fn add(&self, a: &ModValue, b: &ModValue) -> ModValue {
        Self::zip(a, b, |x, y| vec_ops::add(x, y))
    }

    fn sub(&self, a: &ModValue, b: &ModValue) -> ModValue {
        Self::zip(a, b, |x, y| vec_ops::sub(x, y))
    }

    fn mul(&self, a: &ModValue, b: &ModValue) -> ModValue {
        let (a, b) = (a.as_ref()?, b.as_ref()?);
        let (c, v) = if Self::is_pure(a) {
            (&a[0], b)
        } else if Self::is_pure(b) {
            (&b[0], a)
        } else {
            return None;
        };
        Some(v.iter().map(|x| self.alg.mul(c, x)).collect())
    }

    fn neg(&self, a: &ModValue) -> ModValue {
        Some(a.as_ref()?.iter().map(|x| vec_ops::neg(x)).collect())
    }

    fn div(&self, a: &ModValue, b: &ModValue) -> Option<ModValue> {
        let (av, bv) = (a.as_ref(), b.as_ref());
        match (av, bv) {
            (Some(av), Some(bv)) if Self::is_pure(bv) => {
                let parts: Option<Vec<Vector>> = av.iter().map(|x| ExprDomain::div(self.alg, x, &bv[0])).collect();
                Some(Some(parts?))
            }
            (Some(_), Some(_)) => None,
            _ => Some(None),
        }
    }

    fn one(&self) -> ModValue {
        self.pure(self.alg.one())
    }

    fn characteristic(&self) -> u8 {
        self.alg.p()
    }
}

/// Parses an A-linear combination of `gens`, flattened generator-major.
pub fn parse_combination(alg: &AssocAlgebra, gens: &[String], text: &str) -> std::result::Result<Vector, (Option<usize>, String)> {
    let expr = parse_expr(text).map_err(|e| (Some(e.pos + 1), e.message))?;
    let value = expr.eval(&ModuleDomain { alg, gens }).map_err(|e| (Some(e.pos + 1), e.message))?;
    let v = value.ok_or((None, "product of two generators".to_string()))?;
    if !vec_ops::is_zero(&v[0]) {
        return Err((None, format!("term without a generator of {}", gens.join(", "))));
    }
    Ok(v[1..].concat())
}

/// Renders an A-linear combination of `gens` so that [`parse_combination`] reads it back.
pub fn show_combination(alg: &AssocAlgebra, gens: &[String], v: &[RatFunc]) -> String {
    let d = alg.dim();
    let terms: Vec<String> = gens
        .iter()
        .enumerate()
        .filter(|(i, _)| !vec_ops::is_zero(&v[i * d..(i + 1) * d]))
        .map(|(i, g)| {
            let c = alg.show(&v[i * d..(i + 1) * d]);
            if c == "1" || c == alg.names()[0] && alg.one() == v[i * d..(i + 1) * d] {
                g.clone()
            } else if c.contains(['+', '-', '/']) {
                format!("({c})*{g}")
            } else {
                format!("{c}*{g}")
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && s != "t"
}

struct Ctx {
    errors: Vec<DocError>,
}

impl Ctx {
    fn push(&mut self, kind: DocErrorKind, path: &str, message: impl Into<String>) {
        self.errors.push(doc_err(kind, path, message));
    }

    fn object<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v Map<String, Value>> {
        match v {
            Value::Object(m) => Some(m),
            _ => {
                self.push(DocErrorKind::Invalid, path, "expected an object");
                None
            }
        }
    }

    fn unknown_keys(&mut self, m: &Map<String, Value>, path: &str, allowed: &[&str]) {
        for k in m.keys() {
            if !allowed.contains(&k.as_str()) {
                self.push(DocErrorKind::Invalid, &join(path, k), "unknown key");
            }
        }
    }

    fn names(&mut self, v: Option<&Value>, path: &str, taken: &[String]) -> Option<Vec<String>> {
        let Some(Value::Array(items)) = v else {
            self.push(DocErrorKind::Invalid, path, "expected an array of names");
            return None;
        };
        let mut out: Vec<String> = Vec::new();
        let mut ok = true;
        for (i, item) in items.iter().enumerate() {
            let p = format!("{path}[{i}]");
            match item.as_str() {
                Some(s) if !is_identifier(s) => {
                    self.push(DocErrorKind::Invalid, &p, format!("'{s}' is not a name"));
                    ok = false;
                }
                Some(s) if out.iter().chain(taken).any(|n| n == s) => {
                    self.push(DocErrorKind::Invalid, &p, format!("'{s}' declared twice"));
                    ok = false;
                }
                Some(s) => out.push(s.to_string()),
                None => {
                    self.push(DocErrorKind::Invalid, &p, "expected a string");
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }

    /// A value of k-dimension `dim`: a string read by `parse`, or an array of coordinates.
    fn value(
        &mut self,
        field: BaseField,
        v: &Value,
        path: &str,
        dim: usize,
        parse: impl Fn(&str) -> std::result::Result<Vector, (Option<usize>, String)>,
    ) -> Option<Vector> {
        match v {
            Value::String(s) => match parse(s) {
                Ok(x) => Some(x),
                Err((column, message)) => {
                    let kind = if message.starts_with("undeclared") { DocErrorKind::Undeclared } else { DocErrorKind::Syntax };
                    self.errors.push(DocError { kind, path: path.into(), line: None, column, message });
                    None
                }
            },
            Value::Array(items) => {
                if items.len() != dim {
                    self.push(DocErrorKind::DimensionMismatch, path, format!("{} coordinates, expected {dim}", items.len()));
                    return None;
                }
                let mut out = Vec::with_capacity(dim);
                for (i, item) in items.iter().enumerate() {
                    let p = format!("{path}[{i}]");
                    let text = match item {
                        Value::String(s) => s.clone(),
                        Value::Number(n) => n.to_string(),
                        _ => {
                            self.push(DocErrorKind::Invalid, &p, "expected a scalar");
                            return None;
                        }
                    };
                    match field.parse(&text) {
                        Ok(c) => out.push(c),
                        Err(e) => {
                            self.errors.push(DocError {
                                kind: DocErrorKind::Syntax,
                                path: p,
                                line: None,
                                column: Some(e.pos + 1),
                                message: e.message,
                            });
                            return None;
                        }
                    }
                }
                Some(out)
            }
            _ => {
                self.push(DocErrorKind::Invalid, path, "expected a string or an array");
                None
            }
        }
    }

    /// Entries of a table keyed by `key(name..)`; missing keys stay zero.
    fn table<K>(
        &mut self,
        v: Option<&Value>,
        path: &str,
        lookup: impl Fn(&str) -> Option<K>,
        mut store: impl FnMut(&mut Ctx, K, &Value, &str),
    ) {
        let Some(v) = v else { return };
        let Some(m) = self.object(v, path) else { return };
        for (k, val) in m {
            let p = join(path, k);
            match lookup(k) {
                Some(key) => store(self, key, val, &p),
                None => self.push(DocErrorKind::Undeclared, &p, format!("key '{k}' does not name declared generators")),
            }
        }
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn pair(names: &[String], key: &str, sep: char) -> Option<(usize, usize)> {
    let (a, b) = key.split_once(sep)?;
    let i = names.iter().position(|n| n == a.trim())?;
    let j = names.iter().position(|n| n == b.trim())?;
    Some((i, j))
}

fn pair2(left: &[String], right: &[String], key: &str, sep: char) -> Option<(usize, usize)> {
    let (a, b) = key.split_once(sep)?;
    let i = left.iter().position(|n| n == a.trim())?;
    let j = right.iter().position(|n| n == b.trim())?;
    Some((i, j))
}

/// Parses a document, collecting every problem found.
pub fn parse(text: &str) -> std::result::Result<AlgebraDocument, Vec<DocError>> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        vec![DocError {
            kind: DocErrorKind::Syntax,
            path: String::new(),
            line: Some(e.line()),
            column: Some(e.column()),
            message: e.to_string(),
        }]
    })?;
    let mut cx = Ctx { errors: Vec::new() };
    let doc = parse_value(&mut cx, &root);
    match doc {
        Some(d) if cx.errors.is_empty() => Ok(d),
        _ => {
            if cx.errors.is_empty() {
                cx.push(DocErrorKind::Invalid, "", "document rejected");
            }
            Err(cx.errors)
        }
    }
}

fn parse_value(cx: &mut Ctx, root: &Value) -> Option<AlgebraDocument> {
    let top = cx.object(root, "")?;
    cx.unknown_keys(top, "", &["p", "field", "algebra", "lie", "module", "extensions", "words"]);
    let p = match top.get("p").and_then(Value::as_u64) {
        Some(p) => p as u32,
        None => {
            cx.push(DocErrorKind::Invalid, "p", "expected a prime");
            return None;
        }
    };
    let kind = match top.get("field").map(|v| v.as_str()) {
        None | Some(Some("Fp")) => FieldKind::Prime,
        Some(Some("Fp_t")) => FieldKind::RationalFunctions,
        _ => {
            cx.push(DocErrorKind::Invalid, "field", "expected \"Fp\" or \"Fp_t\"");
            return None;
        }
    };
    let field = match BaseField::new(p, kind) {
        Ok(f) => f,
        Err(e) => {
            cx.push(DocErrorKind::Invalid, "p", e.to_string());
            return None;
        }
    };

    let algebra = match top.get("algebra") {
        Some(v) => Some(parse_algebra(cx, field, v)?),
        None => None,
    };
    let alg = algebra.as_ref().map(|b| b.algebra.clone()).unwrap_or_else(|| CommAlgebra::ground(field));
    let lie = match top.get("lie") {
        Some(v) => Some(parse_lie(cx, &alg, v)?),
        None => None,
    };
    let module = match (top.get("module"), &lie) {
        (Some(v), Some(l)) => Some(parse_module(cx, l, v)?),
        (Some(_), None) => {
            cx.push(DocErrorKind::Invalid, "module", "a module needs a lie block");
            return None;
        }
        _ => None,
    };
    let mut extensions = Vec::new();
    match (top.get("extensions"), &lie, &module) {
        (None, _, _) => {}
        (Some(Value::Array(items)), Some(l), Some(m)) => {
            for (i, item) in items.iter().enumerate() {
                if let Some(e) = parse_extension(cx, l, m, item, &format!("extensions[{i}]")) {
                    extensions.push(e);
                }
            }
        }
        (Some(Value::Array(_)), _, _) => cx.push(DocErrorKind::Invalid, "extensions", "extensions need lie and module blocks"),
        _ => cx.push(DocErrorKind::Invalid, "extensions", "expected an array"),
    }
    let mut words = Vec::new();
    match top.get("words") {
        None => {}
        Some(Value::Array(items)) => {
            for (i, item) in items.iter().enumerate() {
                match item.as_str() {
                    Some(s) => words.push(s.to_string()),
                    None => cx.push(DocErrorKind::Invalid, &format!("words[{i}]"), "expected a string"),
                }
            }
        }
        _ => cx.push(DocErrorKind::Invalid, "words", "expected an array"),
    }
    Some(AlgebraDocument { field, algebra, lie, module, extensions, words })
}

fn parse_algebra(cx: &mut Ctx, field: BaseField, v: &Value) -> Option<AlgebraBlock> {
    let m = cx.object(v, "algebra")?;
    if let Some(t) = m.get("truncated") {
        cx.unknown_keys(m, "algebra", &["truncated"]);
        let vars = cx.object(t, "algebra.truncated")?;
        let mut out = Vec::new();
        for (name, n) in vars {
            let path = join("algebra.truncated", name);
            if !is_identifier(name) {
                cx.push(DocErrorKind::Invalid, &path, format!("'{name}' is not a name"));
                continue;
            }
            match n.as_u64() {
                Some(n) if n >= 1 => out.push((name.clone(), n as u32)),
                _ => cx.push(DocErrorKind::Invalid, &path, "expected a positive height"),
            }
        }
        let refs: Vec<(&str, u32)> = out.iter().map(|(s, n)| (s.as_str(), *n)).collect();
        let algebra = CommAlgebra::truncated(field, &refs);
        return Some(AlgebraBlock { algebra, truncated: Some(out) });
    }
    cx.unknown_keys(m, "algebra", &["basis", "mult"]);
    let unit_name = m.get("basis").and_then(|b| b.get(0)).and_then(Value::as_str).map(str::to_string);
    let rest = m.get("basis").and_then(Value::as_array).map(|b| Value::Array(b.iter().skip(1).cloned().collect()));
    let mut names = vec![unit_name.clone().unwrap_or_default()];
    if unit_name.is_none() {
        cx.push(DocErrorKind::Invalid, "algebra.basis", "expected an array of names starting with the unit");
        return None;
    }
    names.extend(cx.names(rest.as_ref(), "algebra.basis", &names.clone())?);
    let d = names.len();
    let mut table: Vec<Vector> = (0..d * d)
        .map(|idx| {
            let (i, j) = (idx / d, idx % d);
            match (i, j) {
                (0, _) => field.unit_vector(d, j),
                (_, 0) => field.unit_vector(d, i),
                _ => field.zeros(d),
            }
        })
        .collect();
    // entries are read over the basis with the unit and linear structure only
    let linear = AssocAlgebra::from_table_unchecked(field, names.clone(), table.clone(), field.unit_vector(d, 0)).ok()?;
    let parse = |s: &str| linear.parse(s).map_err(|e| (Some(e.pos + 1), e.message));
    let before = cx.errors.len();
    cx.table(m.get("mult"), "algebra.mult", |k| pair(&names, k, '*'), |cx, (i, j), val, path| {
        if let Some(x) = cx.value(field, val, path, d, parse) {
            table[i * d + j] = x.clone();
            table[j * d + i] = x;
        }
    });
    if cx.errors.len() > before {
        return None;
    }
    match CommAlgebra::new(field, names, table, field.unit_vector(d, 0)) {
        Ok(algebra) => Some(AlgebraBlock { algebra, truncated: None }),
        Err(e) => {
            cx.push(DocErrorKind::Invalid, "algebra.mult", e.to_string());
            None
        }
    }
}

fn parse_lie(cx: &mut Ctx, alg: &CommAlgebra, v: &Value) -> Option<RestrictedLieRinehart> {
    let m = cx.object(v, "lie")?;
    cx.unknown_keys(m, "lie", &["basis", "bracket", "anchor", "pmap"]);
    let field = alg.field();
    let names = cx.names(m.get("basis"), "lie.basis", alg.names())?;
    let n = names.len();
    let d = alg.dim();
    let kd = n * d;
    let parse = |s: &str| parse_combination(alg, &names, s);
    let before = cx.errors.len();

    let mut bracket = vec![field.zeros(kd); n * n];
    cx.table(m.get("bracket"), "lie.bracket", |k| pair(&names, k, ','), |cx, (i, j), val, path| {
        if let Some(x) = cx.value(field, val, path, kd, parse) {
            if i == j {
                if !vec_ops::is_zero(&x) {
                    cx.push(DocErrorKind::Invalid, path, "[X,X] must vanish");
                }
                return;
            }
            bracket[j * n + i] = vec_ops::neg(&x);
            bracket[i * n + j] = x;
        }
    });

    let mut anchor = vec![Matrix::zeros(field.p(), d, d); n];
    cx.table(m.get("anchor"), "lie.anchor", |k| names.iter().position(|x| x == k), |cx, i, val, path| {
        cx.table(Some(val), path, |k| alg.names().iter().position(|x| x == k), |cx, r, img, path| {
            let parse = |s: &str| alg.parse(s).map_err(|e| (Some(e.pos + 1), e.message));
            if let Some(x) = cx.value(field, img, path, d, parse) {
                for (s, c) in x.into_iter().enumerate() {
                    anchor[i].set(s, r, c);
                }
            }
        });
    });

    let mut pmap = vec![field.zeros(kd); n];
    cx.table(m.get("pmap"), "lie.pmap", |k| names.iter().position(|x| x == k), |cx, i, val, path| {
        if let Some(x) = cx.value(field, val, path, kd, parse) {
            pmap[i] = x;
        }
    });
    if cx.errors.len() > before {
        return None;
    }
    let anchor = anchor.into_iter().map(Derivation::from_matrix).collect();
    let built = LieRinehart::new(alg.clone(), names, bracket, anchor).and_then(|lr| RestrictedLieRinehart::new(lr, pmap));
    match built {
        Ok(l) => Some(l),
        Err(e) => {
            cx.push(DocErrorKind::Invalid, "lie", e.to_string());
            None
        }
    }
}

fn parse_module(cx: &mut Ctx, l: &RestrictedLieRinehart, v: &Value) -> Option<BeckModule> {
    let m = cx.object(v, "module")?;
    cx.unknown_keys(m, "module", &["basis", "action", "p_op"]);
    let field = l.field();
    let alg = l.algebra();
    let taken: Vec<String> = alg.names().iter().chain(l.names()).cloned().collect();
    let names = cx.names(m.get("basis"), "module.basis", &taken)?;
    let r = names.len();
    let md = r * alg.dim();
    let parse = |s: &str| parse_combination(alg, &names, s);
    let before = cx.errors.len();
    let mut action = vec![field.zeros(md); l.rank() * r];
    cx.table(m.get("action"), "module.action", |k| pair2(l.names(), &names, k, '.'), |cx, (i, b), val, path| {
        if let Some(x) = cx.value(field, val, path, md, parse) {
            action[i * r + b] = x;
        }
    });
    let mut p_op = vec![field.zeros(md); r];
    cx.table(m.get("p_op"), "module.p_op", |k| names.iter().position(|x| x == k), |cx, b, val, path| {
        if let Some(x) = cx.value(field, val, path, md, parse) {
            p_op[b] = x;
        }
    });
    if cx.errors.len() > before {
        return None;
    }
    match BeckModule::new(l, names, action, p_op) {
        Ok(m) => Some(m),
        Err(e) => {
            cx.push(DocErrorKind::Invalid, "module", e.to_string());
            None
        }
    }
}

fn parse_extension(cx: &mut Ctx, l: &RestrictedLieRinehart, m: &BeckModule, v: &Value, path: &str) -> Option<ExtensionData> {
    let obj = cx.object(v, path)?;
    cx.unknown_keys(obj, path, &["h", "g"]);
    let field = l.field();
    let md = m.k_dim(l);
    let n = l.rank();
    let parse = |s: &str| parse_combination(l.algebra(), m.names(), s);
    let before = cx.errors.len();
    let mut data = ExtensionData::zero(l, m);
    cx.table(obj.get("h"), &join(path, "h"), |k| pair(l.names(), k, ','), |cx, (i, j), val, p| {
        if let Some(x) = cx.value(field, val, p, md, parse) {
            if i == j {
                if !vec_ops::is_zero(&x) {
                    cx.push(DocErrorKind::Invalid, p, "h(X,X) must vanish");
                }
                return;
            }
            data.h[j * n + i] = vec_ops::neg(&x);
            data.h[i * n + j] = x;
        }
    });
    cx.table(obj.get("g"), &join(path, "g"), |k| l.names().iter().position(|x| x == k), |cx, i, val, p| {
        if let Some(x) = cx.value(field, val, p, md, parse) {
            data.g[i] = x;
        }
    });
    (cx.errors.len() == before).then_some(data)
}

/// Canonical JSON form; `parse(&serialize(d)) == d`.
pub fn serialize(doc: &AlgebraDocument) -> String {
    serde_json::to_string_pretty(&to_value(doc)).expect("documents serialize")
}

pub fn to_value(doc: &AlgebraDocument) -> Value {
    let mut top = Map::new();
    top.insert("p".into(), json!(doc.p()));
    top.insert("field".into(), json!(if doc.field.is_prime_field() { "Fp" } else { "Fp_t" }));
    if let Some(b) = &doc.algebra {
        top.insert("algebra".into(), algebra_value(b));
    }
    if let Some(l) = &doc.lie {
        top.insert("lie".into(), lie_value(l));
        if let Some(m) = &doc.module {
            top.insert("module".into(), module_value(l, m));
            if !doc.extensions.is_empty() {
                let ext: Vec<Value> = doc.extensions.iter().map(|e| extension_value(l, m, e)).collect();
                top.insert("extensions".into(), Value::Array(ext));
            }
        }
    }
    if !doc.words.is_empty() {
        top.insert("words".into(), json!(doc.words));
    }
    Value::Object(top)
}

fn algebra_value(b: &AlgebraBlock) -> Value {
    if let Some(vars) = &b.truncated {
        let m: BTreeMap<&str, u32> = vars.iter().map(|(s, n)| (s.as_str(), *n)).collect();
        // key order of the map must match declaration order for a faithful round trip
        if vars.windows(2).all(|w| w[0].0 < w[1].0) {
            return json!({ "truncated": m });
        }
    }
    let a = &b.algebra;
    let d = a.dim();
    let mut mult = Map::new();
    for i in 1..d {
        for j in i..d {
            let x = a.mul_basis(i, j);
            if !vec_ops::is_zero(x) {
                mult.insert(format!("{}*{}", a.names()[i], a.names()[j]), json!(a.show(x)));
            }
        }
    }
    json!({ "basis": a.names(), "mult": mult })
}

/// Shows an L-element in a form [`parse_combination`] reads back.
pub fn show_lie(l: &LieRinehart, x: &[RatFunc]) -> String {
    show_combination(l.algebra(), l.names(), x)
}

fn lie_value(l: &RestrictedLieRinehart) -> Value {
    let n = l.rank();
    let alg = l.algebra();
    let names = l.names();
    let mut bracket = Map::new();
    for i in 0..n {
        for j in i + 1..n {
            let x = &l.bracket_table()[i * n + j];
            if !vec_ops::is_zero(x) {
                bracket.insert(format!("{},{}", names[i], names[j]), json!(show_lie(l, x)));
            }
        }
    }
    let mut anchor = Map::new();
    for (i, a) in l.anchors().iter().enumerate() {
        let mut images = Map::new();
        for r in 0..alg.dim() {
            let img = a.apply(&alg.basis(r));
            if !vec_ops::is_zero(&img) {
                images.insert(alg.names()[r].clone(), json!(alg.show(&img)));
            }
        }
        if !images.is_empty() {
            anchor.insert(names[i].clone(), Value::Object(images));
        }
    }
    let mut pmap = Map::new();
    for (i, x) in l.pmap_basis().iter().enumerate() {
        if !vec_ops::is_zero(x) {
            pmap.insert(names[i].clone(), json!(show_lie(l, x)));
        }
    }
    json!({ "basis": names, "bracket": bracket, "anchor": anchor, "pmap": pmap })
}

fn module_value(l: &RestrictedLieRinehart, m: &BeckModule) -> Value {
    let alg = l.algebra();
    let r = m.rank();
    let mut action = Map::new();
    for i in 0..l.rank() {
        for b in 0..r {
            let x = &m.action_table()[i * r + b];
            if !vec_ops::is_zero(x) {
                action.insert(format!("{}.{}", l.names()[i], m.names()[b]), json!(show_combination(alg, m.names(), x)));
            }
        }
    }
    let mut p_op = Map::new();
    for (b, x) in m.p_images().iter().enumerate() {
        if !vec_ops::is_zero(x) {
            p_op.insert(m.names()[b].clone(), json!(show_combination(alg, m.names(), x)));
        }
    }
    json!({ "basis": m.names(), "action": action, "p_op": p_op })
}

/// The `{h, g}` object of one extension in document syntax.
pub fn extension_value(l: &RestrictedLieRinehart, m: &BeckModule, e: &ExtensionData) -> Value {
    let alg = l.algebra();
    let n = l.rank();
    let mut h = Map::new();
    for i in 0..n {
        for j in i + 1..n {
            let x = &e.h[i * n + j];
            if !vec_ops::is_zero(x) {
                h.insert(format!("{},{}", l.names()[i], l.names()[j]), json!(show_combination(alg, m.names(), x)));
            }
        }
    }
    let mut g = Map::new();
    for (i, x) in e.g.iter().enumerate() {
        if !vec_ops::is_zero(x) {
            g.insert(l.names()[i].clone(), json!(show_combination(alg, m.names(), x)));
        }
    }
    json!({ "h": h, "g": g })
}
