//! The `restrict-lr` command line: reads algebra documents, runs checks and
//! constructions, and prints a report.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check fails
//! (the report carries a witness), 2 on unreadable input or bad flags.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use restrict_lr_core::brauer::{brauer_demo, ext_to_brauer_demo};
use restrict_lr_core::commalg::{derivation_space, hochschild_suite, HochschildForm};
use restrict_lr_core::document::{self, extension_value, parse_combination, show_lie, AlgebraDocument};
use restrict_lr_core::ext::{baer_sum, build_extension, classify_ext, equivalent, verify_equivalence, Extension};
use restrict_lr_core::field::{vec_ops, Vector};
use restrict_lr_core::linalg::Matrix;
use restrict_lr_core::lrin::check_lrr_axioms;
use restrict_lr_core::rlie::{check_restricted, extend_p_map_from_basis, free_restricted_lie, s_coefficients};
use restrict_lr_core::uenv::{
    beck_derivations, beck_module_assemble, injectivity_check, enveloping_power_action_check, pbw_rank_check, restricted_relation_check,
    rinehart_basis_check, universal_property_check, BeckModule, Enveloping, Strategy,
};
use restrict_lr_core::{der_algebra, AssocAlgebra, CheckConfig, Error, InsepExtension, Report, RestrictedLieRinehart};

#[derive(Debug, Parser)]
#[command(name = "restrict-lr", version, about = "Exact checks for restricted Lie-Rinehart algebras in characteristic p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print the report as a single JSON object.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Samples per randomized identity.
    #[arg(long, global = true, env = "RESTRICT_LR_SAMPLES", default_value_t = 100)]
    pub samples: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Restricted Lie-Rinehart axioms of the lie block, plus module and extension checks.
    CheckAxioms { file: PathBuf },
    /// Derivations of the algebra block, the A-basis of Der(A) and the Hochschild relation.
    Derivations { file: PathBuf },
    /// The terms s_i(x, y) of (x+y)^[p] - x^[p] - y^[p].
    SCoefficients {
        file: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Whether the p-images of the basis extend to a p-map.
    PExtend { file: PathBuf },
    /// The free restricted Lie algebra truncated in degree.
    FreeLie {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 2)]
        generators: usize,
        #[arg(long, default_value_t = 3)]
        degree: usize,
    },
    /// PBW checks for the restricted enveloping algebra and normal forms of the document's words.
    Pbw { file: PathBuf },
    /// The basis of the unrestricted enveloping algebra with central z_i, up to a degree.
    RinehartBasis {
        file: PathBuf,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// The universal property for the representation on A by multiplication and the anchor.
    UniversalCheck { file: PathBuf },
    /// A basis of the derivations L -> M of the lie and module blocks.
    BeckDerivations { file: PathBuf },
    /// Equivalence classes of extensions of the lie block by the module block.
    ExtClassify { file: PathBuf },
    /// Baer sum of the first two extensions of the document.
    BaerSum { file: PathBuf },
    /// Equivalence of the first two extensions, by a given section shift or by search.
    Equiv {
        file: PathBuf,
        /// Shift of the section on one generator, as `X=<module element>`.
        #[arg(long = "gamma")]
        gamma: Vec<String>,
    },
    /// Regular extension and crossed product for K = k(s), s^p = t.
    BrauerDemo {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        gamma: Option<String>,
        /// Also run the sampled agreement between extensions and crossed products.
        #[arg(long)]
        agreement: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckAxioms { .. } => "check-axioms",
            Command::Derivations { .. } => "derivations",
            Command::SCoefficients { .. } => "s-coefficients",
            Command::PExtend { .. } => "p-extend",
            Command::FreeLie { .. } => "free-lie",
            Command::Pbw { .. } => "pbw",
            Command::RinehartBasis { .. } => "rinehart-basis",
            Command::UniversalCheck { .. } => "universal-check",
            Command::BeckDerivations { .. } => "beck-derivations",
            Command::ExtClassify { .. } => "ext-classify",
            Command::BaerSum { .. } => "baer-sum",
            Command::Equiv { .. } => "equiv",
            Command::BrauerDemo { .. } => "brauer-demo",
        }
    }
}

/// Why a command did not pass.
#[derive(Debug)]
pub enum Failure {
    /// Exit code 2.
    Input(String),
    /// Exit code 1.
    Math { message: String, report: Option<Report> },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Axiom(report) => Failure::Math { message: e_message(&report), report: Some(*report) },
            Error::Hypothesis { hypothesis, report } => {
                Failure::Math { message: format!("hypothesis failed: {hypothesis}"), report: Some(*report) }
            }
            Error::PMapCriterion { .. }
            | Error::NotRestrictedHom { .. }
            | Error::NotInvariant(_)
            | Error::NotFree(_)
            | Error::NotConstant(..)
            | Error::NotAssociative(_)
            | Error::Verification(_) => Failure::Math { message: e.to_string(), report: None },
            other => Failure::Input(other.to_string()),
        }
    }
}

fn e_message(report: &Report) -> String {
    format!("axiom check failed: {}", report.first_failure().unwrap_or_default())
}

/// Result of one command before rendering.
#[derive(Debug, Default)]
pub struct Outcome {
    pub result: Map<String, Value>,
    pub report: Report,
}

impl Outcome {
    fn new(subject: &str) -> Self {
        Outcome { result: Map::new(), report: Report::new(subject) }
    }

    fn set(&mut self, key: &str, v: Value) {
        self.result.insert(key.into(), v);
    }
}

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn load(path: &PathBuf) -> Result<AlgebraDocument, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    document::parse(&text).map_err(|errs| {
        let lines: Vec<String> = errs.iter().map(|e| format!("{}: {e}", path.display())).collect();
        input(lines.join("\n"))
    })
}

fn need_lie(doc: &AlgebraDocument) -> Result<&RestrictedLieRinehart, Failure> {
    doc.lie.as_ref().ok_or_else(|| input("document has no lie block"))
}

fn need_module(doc: &AlgebraDocument) -> Result<(&RestrictedLieRinehart, &BeckModule), Failure> {
    let l = need_lie(doc)?;
    let m = doc.module.as_ref().ok_or_else(|| input("document has no module block"))?;
    Ok((l, m))
}

fn build_all(doc: &AlgebraDocument, config: &CheckConfig) -> Result<Vec<Extension>, Failure> {
    let (l, m) = need_module(doc)?;
    doc.extensions.iter().map(|d| build_extension(l, m, d.clone(), config).map_err(Failure::from)).collect()
}

fn show_module(l: &RestrictedLieRinehart, m: &BeckModule, v: &[restrict_lr_core::RatFunc]) -> String {
    document::show_combination(l.algebra(), m.names(), v)
}

/// Runs one parsed command.
pub fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let config = CheckConfig::new(cli.samples, cli.seed);
    match &cli.command {
        Command::CheckAxioms { file } => {
            let doc = load(file)?;
            let l = need_lie(&doc)?;
            let mut out = Outcome::new("axioms");
            out.set("rank", json!(l.rank()));
            out.set("k_dim", json!(l.k_dim()));
            out.report.absorb("", check_lrr_axioms(l, &config));
            if let Some(m) = &doc.module {
                out.report.absorb("module", m.check(l, &config));
            }
            if let Some(m) = &doc.module {
                for (i, d) in doc.extensions.iter().enumerate() {
                    let r = match build_extension(l, m, d.clone(), &config) {
                        Ok(e) => e.report,
                        Err(Error::Axiom(r)) => *r,
                        Err(e) => return Err(e.into()),
                    };
                    out.report.absorb(&format!("extension {i}"), r);
                }
            }
            Ok(out)
        }
        Command::Derivations { file } => {
            let doc = load(file)?;
            let a = doc.algebra();
            let mut out = Outcome::new("derivations");
            let images = |d: &restrict_lr_core::Derivation| -> Value {
                let mut m = Map::new();
                for r in 0..a.dim() {
                    let img = d.apply(&a.basis(r));
                    if !vec_ops::is_zero(&img) {
                        m.insert(a.names()[r].clone(), json!(a.show(&img)));
                    }
                }
                Value::Object(m)
            };
            let space = derivation_space(&a);
            out.set("k_dim", json!(space.len()));
            out.set("k_basis", Value::Array(space.iter().map(images).collect()));
            out.report.absorb("", hochschild_suite(&a, &config, HochschildForm::Correct));
            let l = der_algebra(&a)?;
            let a_basis: Map<String, Value> =
                l.names().iter().zip(l.anchors()).map(|(n, d)| (n.clone(), images(d))).collect();
            out.set("a_basis", Value::Object(a_basis));
            let pmap: Map<String, Value> =
                l.names().iter().zip(l.pmap_basis()).map(|(n, x)| (n.clone(), json!(show_lie(l.lr(), x)))).collect();
            out.set("pmap", Value::Object(pmap));
            out.report.absorb("Der(A)", check_lrr_axioms(&l, &config));
            Ok(out)
        }
        Command::SCoefficients { file, x, y } => {
            let doc = load(file)?;
            let l = need_lie(&doc)?;
            let parse = |s: &str| parse_combination(l.algebra(), l.names(), s).map_err(|(_, m)| input(format!("'{s}': {m}")));
            let (xv, yv) = (parse(x)?, parse(y)?);
            let ks = l.k_structure();
            let s = s_coefficients(ks.lie(), &xv, &yv);
            let mut out = Outcome::new("s-coefficients");
            out.set("s", Value::Array(s.iter().map(|v| json!(show_lie(l.lr(), v))).collect()));
            let mut rhs = vec_ops::add(&ks.p_map_eval(&xv), &ks.p_map_eval(&yv));
            for v in &s {
                vec_ops::add_assign(&mut rhs, v);
            }
            let sum = ks.p_map_eval(&vec_ops::add(&xv, &yv));
            let mut c = out.report.check("(x+y)^[p] = x^[p] + y^[p] + sum_i s_i(x,y)");
            c.case(sum == rhs, || json!({ "x": x, "y": y }));
            c.finish();
            Ok(out)
        }
        Command::PExtend { file } => {
            let doc = load(file)?;
            let l = need_lie(&doc)?;
            let ks = l.k_structure();
            let r = extend_p_map_from_basis(ks.lie(), ks.pmap().to_vec())?;
            let mut out = Outcome::new("p-map extension");
            out.set("extends", json!(true));
            out.report.absorb("", check_restricted(&r, &config));
            Ok(out)
        }
        Command::FreeLie { p, generators, degree } => {
            let f = free_restricted_lie(*p, *generators, *degree)?;
            let mut out = Outcome::new("free restricted Lie algebra");
            out.set("dimension", json!(f.algebra.dim()));
            let basis: Vec<Value> =
                f.algebra.names().iter().zip(&f.degrees).map(|(n, d)| json!({ "element": n, "degree": d })).collect();
            out.set("basis", Value::Array(basis));
            out.report.absorb("", check_restricted(&f.algebra, &config));
            Ok(out)
        }
        Command::Pbw { file } => {
            let doc = load(file)?;
            let l = need_lie(&doc)?;
            let mut out = Outcome::new("enveloping algebra");
            out.report.absorb("", pbw_rank_check(l, &config));
            out.report.absorb("", injectivity_check(l));
            out.report.absorb("", enveloping_power_action_check(l, &config));
            out.report.absorb("", restricted_relation_check(l, &config));
            let u = Enveloping::restricted(l);
            let mut forms = Map::new();
            for w in &doc.words {
                let word = u.parse_word(w)?;
                forms.insert(w.clone(), json!(u.show(&u.normal_form(&word, Strategy::Leftmost)?)));
            }
            out.set("dimension", json!(u.basis_monomials().len() * l.algebra().dim()));
            out.set("normal_forms", Value::Object(forms));
            Ok(out)
        }
        Command::RinehartBasis { file, degree } => {
            let doc = load(file)?;
            let l = need_lie(&doc)?;
            let bound = degree.unwrap_or(2 * l.p() as usize);
            let mut out = Outcome::new("enveloping algebra basis");
            out.set("degree", json!(bound));
            out.set("monomials", json!(Enveloping::unrestricted(l, bound).basis_monomials().len()));
            out.report.absorb("", rinehart_basis_check(l, bound));
            Ok(out)
        }
        Command::UniversalCheck { file } => {
            let doc = load(file)?;
            let l = need_lie(&doc)?;
            let a = l.algebra();
            let d = a.dim();
            let b = AssocAlgebra::matrix_algebra(l.field(), d);
            let pa: Vec<Vector> = (0..d).map(|r| a.left_mul(&a.basis(r)).entries().to_vec()).collect();
            let kd = l.k_dim();
            let pl: Vec<Vector> = (0..kd).map(|v| l.anchor(&l.field().unit_vector(kd, v)).entries().to_vec()).collect();
            let pa = Matrix::from_columns(l.p(), d * d, &pa)?;
            let pl = Matrix::from_columns(l.p(), d * d, &pl)?;
            let h = universal_property_check(l, &b, &pa, &pl, &config)?;
            let mut out = Outcome::new("universal property");
            out.set("target", json!(format!("End_k(A), dimension {}", d * d)));
            out.set("image_rank", json!(h.rank));
            out.report = h.report;
            Ok(out)
        }
        Command::BeckDerivations { file } => {
            let doc = load(file)?;
            let (l, m) = need_module(&doc)?;
            let found = beck_derivations(l, m, &config)?;
            let mut out = Outcome::new("Beck derivations");
            out.set("dimension", json!(found.basis.len()));
            let basis: Vec<Value> = found
                .basis
                .iter()
                .map(|d| {
                    let m: Map<String, Value> =
                        l.names().iter().zip(d).map(|(n, v)| (n.clone(), json!(show_module(l, m, v)))).collect();
                    Value::Object(m)
                })
                .collect();
            out.set("basis", Value::Array(basis));
            out.report = found.report;
            Ok(out)
        }
        Command::ExtClassify { file } => {
            let doc = load(file)?;
            let (l, m) = need_module(&doc)?;
            let c = classify_ext(l, m, &config)?;
            let mut out = Outcome::new("extension classes");
            out.set("classes", json!(c.representatives.len()));
            out.set("class_sizes", json!(c.class_sizes));
            out.set("table", json!(c.table));
            out.set("neutral", json!(c.neutral));
            out.set("candidates", json!(c.candidates));
            out.set("valid", json!(c.valid));
            out.set("representatives", Value::Array(c.representatives.iter().map(|r| extension_value(l, m, &r.data)).collect()));
            out.report = c.report;
            Ok(out)
        }
        Command::BaerSum { file } => {
            let doc = load(file)?;
            let (l, m) = need_module(&doc)?;
            let exts = build_all(&doc, &config)?;
            if exts.len() < 2 {
                return Err(input("baer-sum needs two extensions"));
            }
            let sum = baer_sum(&exts[0], &exts[1], &config)?;
            let mut out = Outcome::new("Baer sum");
            out.set("sum", extension_value(l, m, &sum.data));
            out.report = sum.report;
            Ok(out)
        }
        Command::Equiv { file, gamma } => {
            let doc = load(file)?;
            let (l, m) = need_module(&doc)?;
            let exts = build_all(&doc, &config)?;
            if exts.len() < 2 {
                return Err(input("equiv needs two extensions"));
            }
            let mut out = Outcome::new("equivalence of extensions");
            let witness = if gamma.is_empty() {
                let w = equivalent(&exts[0], &exts[1], &config)?;
                out.report.note("witness searched by solving the shift equations over F_p");
                w
            } else {
                let mut g = vec![m.zero_element(l); l.rank()];
                for entry in gamma {
                    let (name, expr) = entry.split_once('=').ok_or_else(|| input(format!("--gamma '{entry}' is not X=value")))?;
                    let i = l.names().iter().position(|n| n == name.trim()).ok_or_else(|| input(format!("unknown generator '{name}'")))?;
                    g[i] = parse_combination(l.algebra(), m.names(), expr).map_err(|(_, msg)| input(format!("--gamma '{entry}': {msg}")))?;
                }
                Some(g)
            };
            let Some(g) = witness else {
                out.set("equivalent", json!(false));
                let mut c = out.report.check("some section shift identifies the extensions");
                c.case(false, || json!({ "searched": "all shifts" }));
                c.finish();
                return Ok(out);
            };
            let r = verify_equivalence(&exts[0], &exts[1], &g, &config)?;
            let shown: Map<String, Value> = l.names().iter().zip(&g).map(|(n, v)| (n.clone(), json!(show_module(l, m, v)))).collect();
            out.set("equivalent", json!(r.passed));
            out.set("gamma", Value::Object(shown));
            out.report.absorb("", r);
            Ok(out)
        }
        Command::BrauerDemo { p, beta, gamma, agreement } => {
            let setup = InsepExtension::new(*p)?;
            let k = setup.algebra();
            let parse = |s: &str| k.parse(s).map_err(|e| input(format!("'{s}': {e}")));
            let beta = parse(beta)?;
            let gamma = gamma.as_deref().map(parse).transpose()?;
            let demo = brauer_demo(&setup, &beta, gamma.as_deref(), &config)?;
            let mut out = Outcome::new("Brauer lab");
            if let Value::Object(m) = demo.to_json() {
                out.result = m;
            }
            if let Some(r) = &demo.residue {
                let mut c = out.report.check("(u + gamma)^p = 0");
                c.case(false, || json!({ "gamma": gamma.as_deref().map(|g| k.show(g)), "residue": r }));
                c.finish();
            }
            out.report.absorb("", demo.report);
            if *agreement {
                out.report.absorb("agreement", ext_to_brauer_demo(&setup, &config)?);
            }
            Ok(out)
        }
    }
}

/// Bundled modules are assembled into semidirect products and checked.
pub fn assemble_module(doc: &AlgebraDocument, config: &CheckConfig) -> Result<RestrictedLieRinehart, Failure> {
    let (l, m) = need_module(doc)?;
    Ok(beck_module_assemble(m, l, config)?)
}

fn render_human(command: &str, out: &Outcome, code: i32) -> String {
    let mut s = format!("{command}: {}\n", if code == 0 { "PASS" } else { "FAIL" });
    for (k, v) in &out.result {
        s.push_str(&format!("  {k}: {v}\n"));
    }
    for c in &out.report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        s.push_str(&format!("  [{mark}] {} ({} cases)", c.identity, c.cases));
        if let Some(w) = &c.witness {
            s.push_str(&format!(" witness {w}"));
        }
        s.push('\n');
    }
    for n in &out.report.notes {
        s.push_str(&format!("  note: {n}\n"));
    }
    s
}

fn render(cli: &Cli, result: Result<Outcome, Failure>) -> (i32, String) {
    let command = cli.command.name();
    let (code, status, out, error) = match result {
        Ok(out) if out.report.passed => (0, "pass", out, None),
        Ok(out) => {
            let msg = out.report.first_failure();
            (1, "fail", out, msg)
        }
        Err(Failure::Math { message, report }) => {
            let mut out = Outcome::new(command);
            if let Some(r) = report {
                out.report = r;
            }
            out.report.passed = false;
            (1, "fail", out, Some(message))
        }
        Err(Failure::Input(message)) => (2, "error", Outcome::new(command), Some(message)),
    };
    if cli.json {
        let mut v = json!({
            "command": command,
            "status": status,
            "exit_code": code,
            "seed": cli.seed,
            "samples": cli.samples,
            "result": Value::Object(out.result),
            "report": out.report,
        });
        if let Some(e) = error {
            v["error"] = json!(e);
        }
        (code, serde_json::to_string_pretty(&v).expect("reports serialize") + "\n")
    } else {
        let mut s = if code == 2 { format!("{command}: ERROR\n") } else { render_human(command, &out, code) };
        if let Some(e) = error {
            s.push_str(&format!("  error: {e}\n"));
        }
        (code, s)
    }
}

/// Parses arguments, runs the command and returns the exit code with everything to print.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            return (code, e.render().to_string());
        }
    };
    let result = execute(&cli);
    render(&cli, result)
}
