//! Subcommands: argument definitions, dispatch and the exit-code contract.

use std::ffi::OsString;
use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use orbitalg::barcobar::{bar, cobar, universal_cochain};
use orbitalg::chaincx::ChainComplex;
use orbitalg::circle::{
    bv_operator, check_circle_action, cohomology_ring, orbit_cohomology_ring, orbit_model_unchecked, CircleAction, CircleError,
    CohomologyRing,
};
use orbitalg::dcsh::{check_dcsh, check_module_map, check_multiplicative};
use orbitalg::dgstruct::{
    check_algebra, check_coalgebra, check_hopf, check_module_coalgebra, dual_algebra, regular_module, DGCoalgebra, Side,
};
use orbitalg::exactlin::{CoeffRing, Scalar, SparseMatrix};
use orbitalg::report::CheckReport;
use orbitalg::simpl::{
    normalized_chains, simplicial_orbit_model, suspension_chains, suspension_cobar, SimplError, SimplicialSet,
};
use orbitalg::twist::{
    acyclic_bar, acyclic_cobar, check_twisting_cochain, twisted_tensor_left_right, twisted_tensor_right_left, DGComodule,
    DGModule,
};

use crate::catalog::{self, Fixture};
use crate::document::{self as doc, Body, Coeff, Document, DocumentError, Term};
use crate::report::{check_value, homology_lines, homology_value, OutputFormat, Report, Status};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Parser)]
#[command(name = "orbitalg", version, about = "Exact chain-level algebra: checkers, homology and orbit models")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub output: OutputFormat,
    /// Seed for randomized commands.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
    /// Degree bound for constructions and reports.
    #[arg(long, env = "ORBITALG_MAX_DEGREE", default_value_t = 10, global = true)]
    pub max_degree: i64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run structure checkers on a document.
    Check {
        /// Document path, or `-` for standard input.
        input: PathBuf,
        /// One of the checker names, or `all` for every checker that applies.
        #[arg(long, default_value = "all")]
        checker: String,
    },
    /// Homology or cohomology of the underlying complex.
    Homology {
        input: PathBuf,
        /// `z`, `q` or `fp:<p>`.
        #[arg(long, default_value = "z")]
        coefficients: String,
        #[arg(long)]
        cohomology: bool,
    },
    /// Homotopy orbit model of a circle action or of a simplicial suspension.
    Orbit {
        input: PathBuf,
        #[arg(long, default_value = "z")]
        coefficients: String,
        /// Field for the ring and operator computations; overrides `--coefficients`.
        #[arg(long)]
        field: Option<String>,
        /// Print generators, relations and the multiplication table of the cohomology ring.
        #[arg(long)]
        ring: bool,
        /// Print the operator induced by the action on carrier cohomology.
        #[arg(long)]
        bv: bool,
    },
    /// Emit a constructed object as a document.
    Construct {
        input: PathBuf,
        #[arg(value_enum)]
        what: Construction,
        /// Side of the algebra factor in acyclic and twisted tensor constructions.
        #[arg(long, value_enum, default_value = "left")]
        side: SideArg,
    },
    /// Emit a shipped fixture as a document.
    Fixture {
        #[arg(value_enum)]
        name: Fixture,
        #[arg(long, default_value = "z")]
        coefficients: String,
    },
    /// Emit the document with one coefficient of one sparse map entry changed.
    Mutate { input: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    Cobar,
    Bar,
    AcyclicCobar,
    AcyclicBar,
    TwistedTensor,
    OrbitModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

pub const CHECKERS: [&str; 11] = [
    "simplicial",
    "differential",
    "coalgebra",
    "algebra",
    "hopf",
    "twisting",
    "dcsh",
    "multiplicative",
    "module-coalgebra",
    "module-map",
    "circle-action",
];

/// Why a command stopped early.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    /// Usage or format problem: exit 2.
    #[error("{0}")]
    Usage(String),
    /// The input violates a required identity: exit 1.
    #[error("{0}")]
    Axiom(String),
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<SimplError> for Failure {
    fn from(e: SimplError) -> Self {
        match e {
            SimplError::Identities(_) => Failure::Axiom(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<CircleError> for Failure {
    fn from(e: CircleError) -> Self {
        match e {
            CircleError::InvalidAction(_) => Failure::Axiom(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn usage(e: impl fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

type Result<T> = std::result::Result<T, Failure>;

/// What a finished invocation prints and returns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses arguments (the first being the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) if e.use_stderr() => Outcome { code: 2, stdout: String::new(), stderr: e.render().to_string() },
        Err(e) => Outcome { code: 0, stdout: e.render().to_string(), stderr: String::new() },
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let name = command_name(&cli.command);
    let emit = |r: std::result::Result<Document, Failure>| match r {
        Ok(d) => Outcome { code: 0, stdout: d.to_text(), stderr: String::new() },
        Err(f) => {
            let report = failure_report(name, f);
            Outcome { code: report.status.exit_code(), stdout: String::new(), stderr: report.render(cli.output) }
        }
    };
    let report = match &cli.command {
        Command::Check { input, checker } => load(input).and_then(|d| check(&d, checker)),
        Command::Homology { input, coefficients, cohomology } => {
            load(input).and_then(|d| homology(&d, coefficients, *cohomology, cli.max_degree))
        }
        Command::Orbit { input, coefficients, field, ring, bv } => {
            let ring_name = field.as_deref().unwrap_or(coefficients);
            load(input).and_then(|d| orbit(&d, ring_name, *ring, *bv, cli.max_degree))
        }
        Command::Construct { input, what, side } => {
            return emit(load(input).and_then(|d| construct(&d, *what, (*side).into(), cli.max_degree)))
        }
        Command::Fixture { name, coefficients } => {
            let r = CoeffRing::parse(coefficients).map_err(usage);
            return emit(r.and_then(|r| Ok(catalog::build(*name, cli.max_degree, r)?)));
        }
        Command::Mutate { input } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let r = load(input).and_then(|mut d| {
                let change = mutate(&mut d, &mut rng)?;
                Ok((d, change))
            });
            return match r {
                Ok((d, change)) => Outcome { code: 0, stdout: d.to_text(), stderr: format!("{change}\n") },
                Err(f) => emit(Err(f)),
            };
        }
    };
    let report = report.unwrap_or_else(|f| failure_report(name, f));
    Outcome { code: report.status.exit_code(), stdout: report.render(cli.output), stderr: String::new() }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Homology { .. } => "homology",
        Command::Orbit { .. } => "orbit",
        Command::Construct { .. } => "construct",
        Command::Fixture { .. } => "fixture",
        Command::Mutate { .. } => "mutate",
    }
}

fn failure_report(command: &str, f: Failure) -> Report {
    match f {
        Failure::Usage(m) => Report::error(command, m),
        Failure::Axiom(m) => {
            let mut r = Report::new(command);
            r.status = Status::Fail;
            r.lines = m.lines().map(str::to_string).collect();
            r.line("result: FAIL");
            r.payload = json!({ "failure": m });
            r
        }
    }
}

pub fn load(path: &Path) -> Result<Document> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("cannot read standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?
    };
    Ok(Document::parse(&text)?)
}

fn simplicial(d: &doc::SimplicialSetDoc) -> Result<SimplicialSet> {
    Ok(d.load()?)
}

/// Checkers that apply to a document, in the order `all` runs them.
pub fn applicable(body: &Body) -> Vec<&'static str> {
    match body {
        Body::Module(_) | Body::Complex(_) => vec!["differential"],
        Body::Coalgebra(_) => vec!["differential", "coalgebra"],
        Body::Algebra(_) => vec!["differential", "algebra"],
        Body::Hopf(_) => vec!["differential", "coalgebra", "algebra", "hopf"],
        Body::TwistingCochain(_) => vec!["differential", "coalgebra", "algebra", "twisting"],
        Body::Dcsh(d) if d.source.has_product() && d.target.has_product() => {
            vec!["differential", "coalgebra", "hopf", "dcsh", "multiplicative"]
        }
        Body::Dcsh(_) => vec!["differential", "coalgebra", "dcsh"],
        Body::ModuleCoalgebra(_) => vec!["differential", "coalgebra", "hopf", "module-coalgebra"],
        Body::DcshModuleMap(_) => vec!["differential", "coalgebra", "hopf", "dcsh", "multiplicative", "module-coalgebra", "module-map"],
        Body::CircleAction(_) => vec!["differential", "coalgebra", "circle-action"],
        Body::SimplicialSet(_) => vec!["simplicial", "differential", "coalgebra"],
    }
}

fn merged(name: &str, parts: Vec<CheckReport>) -> CheckReport {
    let mut r = CheckReport::new(name);
    for p in parts {
        r.absorb(p);
    }
    r
}

fn run_checker(body: &Body, checker: &str) -> Result<CheckReport> {
    let not_applicable = || usage(format!("checker `{checker}` does not apply to a {} document", body.kind()));
    let report = match (checker, body) {
        ("differential", Body::Module(c) | Body::Complex(c) | Body::Coalgebra(c) | Body::Algebra(c) | Body::Hopf(c)) => {
            c.complex()?.verify_differential()
        }
        ("differential", Body::TwistingCochain(t)) => {
            merged("differential", vec![t.source.complex()?.verify_differential(), t.target.complex()?.verify_differential()])
        }
        ("differential", Body::Dcsh(f)) => {
            merged("differential", vec![f.source.complex()?.verify_differential(), f.target.complex()?.verify_differential()])
        }
        ("differential", Body::ModuleCoalgebra(m)) => merged(
            "differential",
            vec![m.coalgebra.complex()?.verify_differential(), m.hopf.complex()?.verify_differential()],
        ),
        ("differential", Body::DcshModuleMap(m)) => merged(
            "differential",
            vec![m.source.coalgebra.complex()?.verify_differential(), m.target.coalgebra.complex()?.verify_differential()],
        ),
        ("differential", Body::CircleAction(a)) => a.carrier.complex()?.verify_differential(),
        ("differential", Body::SimplicialSet(k)) => {
            normalized_chains(&simplicial(k)?, CoeffRing::Integers)?.complex().verify_differential()
        }
        ("coalgebra", Body::Coalgebra(c) | Body::Hopf(c)) => check_coalgebra(&c.coalgebra()?),
        ("coalgebra", Body::TwistingCochain(t)) => check_coalgebra(&t.source.coalgebra()?),
        ("coalgebra", Body::Dcsh(f)) => {
            merged("coalgebra", vec![check_coalgebra(&f.source.coalgebra()?), check_coalgebra(&f.target.coalgebra()?)])
        }
        ("coalgebra", Body::ModuleCoalgebra(m)) => check_coalgebra(&m.coalgebra.coalgebra()?),
        ("coalgebra", Body::DcshModuleMap(m)) => merged(
            "coalgebra",
            vec![check_coalgebra(&m.source.coalgebra.coalgebra()?), check_coalgebra(&m.target.coalgebra.coalgebra()?)],
        ),
        ("coalgebra", Body::CircleAction(a)) => check_coalgebra(&a.carrier.coalgebra()?),
        ("coalgebra", Body::SimplicialSet(k)) => check_coalgebra(&normalized_chains(&simplicial(k)?, CoeffRing::Integers)?),
        ("algebra", Body::Algebra(c) | Body::Hopf(c)) => check_algebra(&c.algebra()?),
        ("algebra", Body::TwistingCochain(t)) => check_algebra(&t.target.algebra()?),
        ("hopf", Body::Hopf(c)) => check_hopf(&c.hopf()?),
        ("hopf", Body::ModuleCoalgebra(m)) => check_hopf(&m.hopf.hopf()?),
        ("hopf", Body::Dcsh(f)) => merged("hopf", vec![check_hopf(&f.source.hopf()?), check_hopf(&f.target.hopf()?)]),
        ("hopf", Body::DcshModuleMap(m)) => {
            merged("hopf", vec![check_hopf(&m.source.hopf.hopf()?), check_hopf(&m.target.hopf.hopf()?)])
        }
        ("twisting", Body::TwistingCochain(t)) => check_twisting_cochain(&t.load()?),
        ("dcsh", Body::Dcsh(f)) => check_dcsh(&f.load()?),
        ("dcsh", Body::DcshModuleMap(m)) => check_dcsh(&m.family.load()?),
        ("multiplicative", Body::Dcsh(f)) => check_multiplicative(&f.load_multiplicative()?),
        ("multiplicative", Body::DcshModuleMap(m)) => check_multiplicative(&m.theta.load_multiplicative()?),
        ("module-coalgebra", Body::ModuleCoalgebra(m)) => check_module_coalgebra(&m.load()?),
        ("module-coalgebra", Body::DcshModuleMap(m)) => merged(
            "module-coalgebra",
            vec![check_module_coalgebra(&m.source.load()?), check_module_coalgebra(&m.target.load()?)],
        ),
        ("module-map", Body::DcshModuleMap(m)) => check_module_map(&m.load()?),
        ("circle-action", Body::CircleAction(a)) => check_circle_action(&a.load()?),
        ("simplicial", Body::SimplicialSet(k)) => match k.load() {
            Ok(k) => k.check_identities(),
            Err(SimplError::Identities(text)) => {
                let mut r = CheckReport::new("simplicial identities");
                r.fail("simplicial identities", "face data", text);
                r
            }
            Err(e) => return Err(e.into()),
        },
        _ => return Err(not_applicable()),
    };
    Ok(report)
}

fn check(d: &Document, checker: &str) -> Result<Report> {
    let names = if checker == "all" {
        applicable(&d.body)
    } else if let Some(&c) = CHECKERS.iter().find(|&&c| c == checker) {
        vec![c]
    } else {
        return Err(usage(format!("unknown checker `{checker}`; expected `all` or one of {}", CHECKERS.join(", "))));
    };
    let mut report = Report::new("check");
    report.line(format!("check {} document", d.body.kind()));
    let mut results = Vec::new();
    for name in names {
        let r = run_checker(&d.body, name)?;
        report.lines.extend(r.to_string().lines().map(str::to_string));
        if !r.passed() {
            report.status = Status::Fail;
        }
        results.push(json!({ "checker": name, "report": check_value(&r) }));
        if !r.passed() && name == "simplicial" {
            break;
        }
    }
    report.line(format!("result: {}", if report.status == Status::Pass { "PASS" } else { "FAIL" }));
    report.payload = json!({ "kind": d.body.kind(), "checks": results });
    Ok(report)
}

fn parse_ring(s: &str) -> Result<CoeffRing> {
    CoeffRing::parse(s).map_err(usage)
}

fn underlying_complex(body: &Body) -> Result<ChainComplex> {
    match body {
        Body::Module(c) | Body::Complex(c) | Body::Coalgebra(c) | Body::Algebra(c) | Body::Hopf(c) => Ok(c.complex()?),
        Body::CircleAction(a) => Ok(a.carrier.complex()?),
        Body::ModuleCoalgebra(m) => Ok(m.coalgebra.complex()?),
        Body::SimplicialSet(k) => Ok(normalized_chains(&simplicial(k)?, CoeffRing::Integers)?.complex().clone()),
        other => Err(usage(format!("a {} document has no single underlying complex", other.kind()))),
    }
}

fn homology(d: &Document, coefficients: &str, cohomology: bool, max: i64) -> Result<Report> {
    let ring = parse_ring(coefficients)?;
    let c = underlying_complex(&d.body)?;
    let lo = c.truncation().min.min(0);
    let (h, prefix) = if cohomology {
        (c.cohomology(&ring, lo..=max).map_err(usage)?, "H^")
    } else {
        (c.homology(&ring, lo..=max).map_err(usage)?, "H")
    };
    let mut report = Report::new("homology");
    let what = if cohomology { "cohomology" } else { "homology" };
    report.line(format!("{what} of {} document over {ring}, degrees {lo}..={max}", d.body.kind()));
    report.lines.extend(homology_lines(&h, &ring, prefix));
    if h.is_undetermined_anywhere() {
        report.line("undetermined degrees need a larger degree window in the input");
    }
    report.payload = homology_value(&h, cohomology);
    Ok(report)
}

fn class_name(m: i64, i: usize) -> String {
    format!("e{m}.{i}")
}

fn vector_text(m: i64, v: &[Scalar]) -> String {
    let terms: Vec<String> = v
        .iter()
        .enumerate()
        .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
        .map(|(i, c)| coefficient_prefix(c) + &class_name(m, i))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn coefficient_prefix(c: &Scalar) -> String {
    if num_traits::One::is_one(c) {
        String::new()
    } else if num_traits::One::is_one(&-c) {
        "-".into()
    } else {
        format!("{c}·")
    }
}

fn monomial_text(gens: &[usize]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < gens.len() {
        let run = gens[i..].iter().take_while(|&&g| g == gens[i]).count();
        parts.push(if run == 1 { format!("g{}", gens[i] + 1) } else { format!("g{}^{run}", gens[i] + 1) });
        i += run;
    }
    parts.join(" ")
}

fn scalars_value(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(|c| json!(c.to_string())).collect())
}

fn ring_section(report: &mut Report, r: &CohomologyRing) -> Value {
    report.line(format!("cohomology ring over {} through degree {}", r.ring, r.top));
    let dims = r.dims();
    report.line(format!("dimensions: {}", dims.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")));
    for (g, &(m, i)) in r.generators.iter().enumerate() {
        report.line(format!("generator g{} = {} in degree {m}", g + 1, class_name(m, i)));
    }
    if r.relations.is_empty() {
        report.line("relations: none");
    }
    for rel in &r.relations {
        let lhs: Vec<String> = rel.terms.iter().map(|(c, gens)| coefficient_prefix(c) + &monomial_text(gens)).collect();
        report.line(format!("relation in degree {}: {} = 0", rel.degree, lhs.join(" + ")));
    }
    let mut products = Vec::new();
    for (&(p, i, q, j), v) in &r.table {
        if v.iter().any(|c| !num_traits::Zero::is_zero(c)) {
            report.line(format!("{} * {} = {}", class_name(p, i), class_name(q, j), vector_text(p + q, v)));
            products.push(json!({ "left": [p, i], "right": [q, j], "value": scalars_value(v) }));
        }
    }
    json!({
        "field": doc::ring_label(&r.ring),
        "top": r.top,
        "dimensions": dims,
        "generators": r.generators.iter().map(|&(m, i)| json!({ "degree": m, "class": i })).collect::<Vec<_>>(),
        "relations": r.relations.iter().map(|rel| json!({
            "degree": rel.degree,
            "terms": rel.terms.iter().map(|(c, g)| json!({ "coefficient": c.to_string(), "monomial": g })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "products": products,
    })
}

fn matrix_value(m: &SparseMatrix) -> Value {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": m.entries().map(|(r, c, v)| json!([r, c, v.to_string()])).collect::<Vec<_>>(),
    })
}

fn circle_orbit(report: &mut Report, a: CircleAction, ring: &CoeffRing, want_ring: bool, want_bv: bool, max: i64) -> Result<Value> {
    let action_check = check_circle_action(&a);
    if !action_check.passed() {
        return Err(Failure::Axiom(action_check.to_string()));
    }
    let model = orbit_model_unchecked(&a, max + 1)?;
    let h = model.complex().homology(ring, 0..=max).map_err(usage)?;
    report.line(format!("orbit homology over {ring}, degrees 0..={max}"));
    report.lines.extend(homology_lines(&h, ring, "H"));
    let mut payload = json!({ "source": "circle_action", "homology": homology_value(&h, false) });
    if want_ring {
        let r = orbit_cohomology_ring(&a, ring, max)?;
        payload["ring"] = ring_section(report, &r);
    }
    if want_bv {
        let bv = bv_operator(&a, ring, max)?;
        report.line(format!("operator on carrier cohomology over {ring}"));
        let mut mats = Vec::new();
        for (m, mat) in &bv.matrices {
            let cols: Vec<String> = (0..mat.cols())
                .map(|c| {
                    let v: Vec<Scalar> = (0..mat.rows()).map(|r| mat.get(r, c)).collect();
                    format!("{} -> {}", class_name(*m, c), vector_text(m - 1, &v))
                })
                .collect();
            if !cols.is_empty() {
                report.line(format!("H^{m} -> H^{}: {}", m - 1, cols.join(", ")));
            }
            mats.push(json!({ "degree": m, "matrix": matrix_value(mat) }));
        }
        report.lines.extend(bv.report.to_string().lines().map(str::to_string));
        if !bv.report.passed() {
            report.status = Status::Fail;
        }
        payload["bv"] = json!({ "matrices": mats, "check": check_value(&bv.report) });
    }
    Ok(payload)
}

fn suspension_model(k: &SimplicialSet, ring: &CoeffRing, max: i64) -> Result<DGCoalgebra> {
    let s = suspension_chains(&normalized_chains(k, ring.clone())?)?;
    let hopf = suspension_cobar(&s, max)?;
    let t = universal_cochain(&s.coalgebra, max).map_err(usage)?;
    let l = regular_module(&hopf, Side::Left).map_err(usage)?;
    Ok(simplicial_orbit_model(&s, &t, &l, max)?)
}

fn orbit(d: &Document, ring_name: &str, want_ring: bool, want_bv: bool, max: i64) -> Result<Report> {
    let ring = parse_ring(ring_name)?;
    if (want_ring || want_bv) && !ring.is_field() {
        return Err(usage("--ring and --bv need a field: pass --field q or --field fp:<p>"));
    }
    let mut report = Report::new("orbit");
    report.line(format!("orbit model of {} document", d.body.kind()));
    let payload = match &d.body {
        Body::CircleAction(a) => {
            let a = a.load()?;
            let a = if a.ring() == &CoeffRing::Integers || a.ring() == &ring { a } else { a.over_ring(&ring)? };
            circle_orbit(&mut report, a, &ring, want_ring, want_bv, max)?
        }
        Body::SimplicialSet(k) => {
            if want_bv {
                return Err(usage("--bv applies to circle action documents"));
            }
            let k = simplicial(k)?;
            let model_ring = if want_ring { ring.clone() } else { CoeffRing::Integers };
            let model = suspension_model(&k, &model_ring, max + 1)?;
            let h = model.complex().homology(&ring, 0..=max).map_err(usage)?;
            report.line(format!("orbit homology over {ring}, degrees 0..={max}"));
            report.lines.extend(homology_lines(&h, &ring, "H"));
            let mut payload = json!({ "source": "simplicial_set", "homology": homology_value(&h, false) });
            if want_ring {
                let algebra = dual_algebra(&model).map_err(usage)?;
                let r = cohomology_ring(&algebra, max)?;
                payload["ring"] = ring_section(&mut report, &r);
            }
            payload
        }
        other => return Err(usage(format!("orbit needs a circle_action or simplicial_set document, not {}", other.kind()))),
    };
    report.line(format!("result: {}", if report.status == Status::Pass { "PASS" } else { "FAIL" }));
    report.payload = payload;
    Ok(report)
}

fn coalgebra_of(body: &Body) -> Result<DGCoalgebra> {
    match body {
        Body::Coalgebra(c) | Body::Hopf(c) => Ok(c.coalgebra()?),
        other => Err(usage(format!("expected a coalgebra or hopf document, not {}", other.kind()))),
    }
}

fn algebra_of(body: &Body) -> Result<orbitalg::dgstruct::DGAlgebra> {
    match body {
        Body::Algebra(c) | Body::Hopf(c) => Ok(c.algebra()?),
        other => Err(usage(format!("expected an algebra or hopf document, not {}", other.kind()))),
    }
}

fn construct(d: &Document, what: Construction, side: Side, max: i64) -> Result<Document> {
    let body = match what {
        Construction::Cobar => Body::Algebra(doc::carrier_of_algebra(&cobar(&coalgebra_of(&d.body)?, max).map_err(usage)?)?),
        Construction::Bar => Body::Coalgebra(doc::carrier_of_coalgebra(&bar(&algebra_of(&d.body)?, max).map_err(usage)?)?),
        Construction::AcyclicCobar => {
            Body::Complex(doc::carrier_of_complex(&acyclic_cobar(&coalgebra_of(&d.body)?, max, side).map_err(usage)?)?)
        }
        Construction::AcyclicBar => {
            Body::Complex(doc::carrier_of_complex(&acyclic_bar(&algebra_of(&d.body)?, max, side).map_err(usage)?)?)
        }
        Construction::TwistedTensor => {
            let Body::TwistingCochain(t) = &d.body else {
                return Err(usage(format!("twisted-tensor needs a twisting_cochain document, not {}", d.body.kind())));
            };
            let t = t.load()?;
            let complex = match side {
                Side::Left => {
                    let n = DGComodule::regular(&t.source, Side::Right).map_err(usage)?;
                    let m = DGModule::regular(&t.target, Side::Left).map_err(usage)?;
                    twisted_tensor_left_right(&n, &t, &m)
                }
                Side::Right => {
                    let m = DGModule::regular(&t.target, Side::Right).map_err(usage)?;
                    let n = DGComodule::regular(&t.source, Side::Left).map_err(usage)?;
                    twisted_tensor_right_left(&m, &t, &n)
                }
            }
            .map_err(usage)?;
            Body::Complex(doc::carrier_of_complex(&complex.truncate_above(max).map_err(usage)?)?)
        }
        Construction::OrbitModel => match &d.body {
            Body::CircleAction(a) => {
                let a = a.load()?;
                let report = check_circle_action(&a);
                if !report.passed() {
                    return Err(Failure::Axiom(report.to_string()));
                }
                Body::Coalgebra(doc::carrier_of_coalgebra(&orbit_model_unchecked(&a, max)?)?)
            }
            Body::SimplicialSet(k) => {
                Body::Coalgebra(doc::carrier_of_coalgebra(&suspension_model(&simplicial(k)?, &CoeffRing::Integers, max)?)?)
            }
            other => return Err(usage(format!("orbit-model needs a circle_action or simplicial_set document, not {}", other.kind()))),
        },
    };
    Ok(Document::new(body))
}

/// Every sparse list of terms in the document, labelled by where it sits.
fn term_lists<'a>(body: &'a mut Body) -> Vec<(String, &'a mut Vec<Term>)> {
    fn carrier<'a>(prefix: &str, c: &'a mut doc::CarrierDoc, out: &mut Vec<(String, &'a mut Vec<Term>)>) {
        let doc::CarrierDoc { differential, coproduct, product, .. } = c;
        for (k, v) in differential.iter_mut() {
            out.push((format!("{prefix}differential[{k}]"), v));
        }
        for (k, v) in coproduct.iter_mut().flatten() {
            out.push((format!("{prefix}coproduct[{k}]"), v));
        }
        for p in product.iter_mut().flatten() {
            out.push((format!("{prefix}product[{}, {}]", p.left, p.right), &mut p.value));
        }
    }
    fn sparse<'a>(prefix: String, m: &'a mut doc::SparseMap, out: &mut Vec<(String, &'a mut Vec<Term>)>) {
        for (k, v) in m.iter_mut() {
            out.push((format!("{prefix}[{k}]"), v));
        }
    }
    fn dcsh<'a>(prefix: &str, f: &'a mut doc::DcshDoc, out: &mut Vec<(String, &'a mut Vec<Term>)>) {
        carrier(&format!("{prefix}source."), &mut f.source, out);
        carrier(&format!("{prefix}target."), &mut f.target, out);
        for (i, c) in f.components.iter_mut().enumerate() {
            sparse(format!("{prefix}components[{}]", i + 1), c, out);
        }
    }
    fn module<'a>(prefix: &str, m: &'a mut doc::ModuleCoalgebraDoc, out: &mut Vec<(String, &'a mut Vec<Term>)>) {
        carrier(&format!("{prefix}coalgebra."), &mut m.coalgebra, out);
        carrier(&format!("{prefix}hopf."), &mut m.hopf, out);
        for a in m.action.iter_mut() {
            out.push((format!("{prefix}action[{}, {}]", a.element, a.by), &mut a.value));
        }
    }
    let mut out = Vec::new();
    match body {
        Body::Module(c) | Body::Complex(c) | Body::Coalgebra(c) | Body::Algebra(c) | Body::Hopf(c) => carrier("", c, &mut out),
        Body::TwistingCochain(t) => {
            carrier("source.", &mut t.source, &mut out);
            carrier("target.", &mut t.target, &mut out);
            sparse("map".into(), &mut t.map, &mut out);
        }
        Body::Dcsh(f) => dcsh("", f, &mut out),
        Body::ModuleCoalgebra(m) => module("", m, &mut out),
        Body::DcshModuleMap(m) => {
            dcsh("family.", &mut m.family, &mut out);
            module("source.", &mut m.source, &mut out);
            module("target.", &mut m.target, &mut out);
            dcsh("theta.", &mut m.theta, &mut out);
        }
        Body::CircleAction(a) => {
            carrier("carrier.", &mut a.carrier, &mut out);
            for (n, k) in a.kappa.iter_mut().enumerate() {
                sparse(format!("kappa[{n}]"), k, &mut out);
            }
        }
        Body::SimplicialSet(_) => {}
    }
    out
}

/// Adds `±1` to one coefficient chosen uniformly among all stored terms.
pub fn mutate(d: &mut Document, rng: &mut impl Rng) -> Result<String> {
    let mut lists = term_lists(&mut d.body);
    let total: usize = lists.iter().map(|(_, v)| v.len()).sum();
    if total == 0 {
        return Err(usage(format!("a {} document has no coefficients to change", d.body.kind())));
    }
    let mut pick = rng.gen_range(0..total);
    let delta: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
    for (place, terms) in lists.iter_mut() {
        if pick >= terms.len() {
            pick -= terms.len();
            continue;
        }
        let Term(c, target) = terms[pick].clone();
        let old = c.scalar()?;
        let new = &old + Scalar::from_integer(delta.into());
        let shown = match &target {
            doc::Target::Name(n) => n.clone(),
            doc::Target::Tensor(f) => f.join(" ⊗ "),
        };
        if num_traits::Zero::is_zero(&new) {
            terms.remove(pick);
        } else {
            terms[pick] = Term(Coeff::from_scalar(&new), target);
        }
        return Ok(format!("{place}: coefficient of {shown} changed from {old} to {new}"));
    }
    unreachable!("pick is below the term count")
}
