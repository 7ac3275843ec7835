//! Versioned JSON documents: the schema, loading into library objects, and
//! emission back from them. The grammar is described in `docs/format.md`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use orbitalg::chaincx::{ChainComplex, Truncation};
use orbitalg::circle::CircleAction;
use orbitalg::dcsh::{DCSHFamily, DCSHModuleMap, MultiplicativeDCSH};
use orbitalg::dgstruct::{tensor_power_module, DGAlgebra, DGCoalgebra, HopfAlgebra, ModuleCoalgebra, Side};
use orbitalg::exactlin::{CoeffRing, Scalar};
use orbitalg::graded::{Element, FreeGradedModule, GradedMap, Name};
use orbitalg::simpl::{Simplex, SimplicialSet};
use orbitalg::twist::TwistingCochain;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("not a valid document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("missing `schema_version`")]
    MissingVersion,
    #[error("unsupported schema version {0}, expected {SCHEMA_VERSION}")]
    Version(u64),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("generator `{0}` is declared twice")]
    Duplicate(String),
    #[error("bad coefficient `{0}`")]
    Coefficient(String),
    #[error("`{name}` has degree {degree}, outside the declared truncation {min}..={max}")]
    OutOfRange { name: String, degree: i64, min: i64, max: i64 },
    #[error("`{0}` should name {1} tensor factors")]
    Arity(String, usize),
    #[error("a {kind} document needs `{field}`")]
    Missing { kind: &'static str, field: &'static str },
    #[error("unknown side `{0}`, expected `left` or `right`")]
    Side(String),
    #[error("distinct basis names print as the same label `{0}`")]
    Collision(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, DocumentError>;

pub fn invalid(e: impl fmt::Display) -> DocumentError {
    DocumentError::Invalid(e.to_string())
}

/// A coefficient: a JSON integer, or a string holding an integer or a fraction `p/q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Int(i64),
    Text(String),
}

impl Coeff {
    pub fn from_scalar(x: &Scalar) -> Coeff {
        match x.is_integer().then(|| x.to_integer().to_i64()).flatten() {
            Some(n) => Coeff::Int(n),
            None => Coeff::Text(x.to_string()),
        }
    }

    pub fn scalar(&self) -> Result<Scalar> {
        match self {
            Coeff::Int(n) => Ok(Scalar::from_integer(BigInt::from(*n))),
            Coeff::Text(s) => {
                let bad = || DocumentError::Coefficient(s.clone());
                let (p, q) = match s.trim().split_once('/') {
                    Some((p, q)) => (p.trim(), q.trim()),
                    None => (s.trim(), "1"),
                };
                let p: BigInt = p.parse().map_err(|_| bad())?;
                let q: BigInt = q.parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar::new(p, q))
            }
        }
    }
}

/// A basis name, or a list of names for an element of a tensor power.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Target {
    Name(String),
    Tensor(Vec<String>),
}

/// `(coefficient, target)`, written as a two-element array.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term(pub Coeff, pub Target);

/// Map given on generators: generator label to the terms of its image.
pub type SparseMap = BTreeMap<String, Vec<Term>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub name: String,
    pub degree: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationDoc {
    pub min: i64,
    pub max: i64,
    pub bounded_below: bool,
    pub bounded_above: bool,
}

impl From<Truncation> for TruncationDoc {
    fn from(t: Truncation) -> Self {
        TruncationDoc { min: t.min, max: t.max, bounded_below: t.bounded_below, bounded_above: t.bounded_above }
    }
}

impl From<TruncationDoc> for Truncation {
    fn from(t: TruncationDoc) -> Self {
        Truncation { min: t.min, max: t.max, bounded_below: t.bounded_below, bounded_above: t.bounded_above }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntry {
    pub left: String,
    pub right: String,
    pub value: Vec<Term>,
}

/// A graded module with optional differential, comultiplication and multiplication.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarrierDoc {
    pub ring: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationDoc>,
    pub generators: Vec<GeneratorDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub differential: SparseMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coproduct: Option<SparseMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counit: Option<BTreeMap<String, Coeff>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coaugmentation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<Vec<ProductEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augmentation: Option<BTreeMap<String, Coeff>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistingDoc {
    pub source: CarrierDoc,
    pub target: CarrierDoc,
    pub map: SparseMap,
}

/// `components[k − 1]` is `φ_k`, into the `k`-fold tensor power of the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DcshDoc {
    pub source: CarrierDoc,
    pub target: CarrierDoc,
    pub window: i64,
    pub components: Vec<SparseMap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionEntry {
    pub element: String,
    pub by: String,
    pub value: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleCoalgebraDoc {
    pub coalgebra: CarrierDoc,
    pub hopf: CarrierDoc,
    pub side: String,
    pub action: Vec<ActionEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleMapDoc {
    pub family: DcshDoc,
    pub source: ModuleCoalgebraDoc,
    pub target: ModuleCoalgebraDoc,
    pub theta: DcshDoc,
}

/// `kappa[n]` is the operator of degree `2n + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleActionDoc {
    pub carrier: CarrierDoc,
    pub kappa: Vec<SparseMap>,
}

/// Faces are written as a label preceded by degeneracies, e.g. `"s1 s0 v"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexDoc {
    pub name: String,
    pub dim: usize,
    #[serde(default)]
    pub faces: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplicialSetDoc {
    pub simplices: Vec<SimplexDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Body {
    Module(CarrierDoc),
    Complex(CarrierDoc),
    Coalgebra(CarrierDoc),
    Algebra(CarrierDoc),
    Hopf(CarrierDoc),
    TwistingCochain(TwistingDoc),
    Dcsh(DcshDoc),
    ModuleCoalgebra(ModuleCoalgebraDoc),
    DcshModuleMap(ModuleMapDoc),
    CircleAction(CircleActionDoc),
    SimplicialSet(SimplicialSetDoc),
}

impl Body {
    pub fn kind(&self) -> &'static str {
        match self {
            Body::Module(_) => "module",
            Body::Complex(_) => "complex",
            Body::Coalgebra(_) => "coalgebra",
            Body::Algebra(_) => "algebra",
            Body::Hopf(_) => "hopf",
            Body::TwistingCochain(_) => "twisting_cochain",
            Body::Dcsh(_) => "dcsh",
            Body::ModuleCoalgebra(_) => "module_coalgebra",
            Body::DcshModuleMap(_) => "dcsh_module_map",
            Body::CircleAction(_) => "circle_action",
            Body::SimplicialSet(_) => "simplicial_set",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub schema_version: u32,
    #[serde(flatten)]
    pub body: Body,
}

impl Document {
    pub fn new(body: Body) -> Self {
        Document { schema_version: SCHEMA_VERSION, body }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("schema_version") {
            None => return Err(DocumentError::MissingVersion),
            Some(v) if v.as_u64() != Some(SCHEMA_VERSION as u64) => {
                return Err(v.as_u64().map_or(DocumentError::MissingVersion, DocumentError::Version));
            }
            Some(_) => {}
        }
        Ok(serde_json::from_value(value)?)
    }

    /// Laid out by [`layout`]; keys of sparse maps come out sorted.
    pub fn to_text(&self) -> String {
        layout(&serde_json::to_value(self).expect("documents serialize"))
    }
}

/// Inline values longer than this are broken over lines.
const INLINE_WIDTH: usize = 96;

/// Two-space indented JSON ending in a newline. Short arrays without objects
/// and short objects with scalar values stay on one line.
pub fn layout(v: &serde_json::Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn has_object(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Object(_) => true,
        serde_json::Value::Array(a) => a.iter().any(has_object),
        _ => false,
    }
}

fn inline(v: &serde_json::Value) -> bool {
    use serde_json::Value;
    let flat = match v {
        Value::Array(a) => !a.iter().any(has_object),
        Value::Object(m) => m.values().all(|x| !matches!(x, Value::Array(_) | Value::Object(_))),
        _ => true,
    };
    flat && v.to_string().len() <= INLINE_WIDTH
}

fn write_value(v: &serde_json::Value, indent: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |n: usize| " ".repeat(n);
    if inline(v) {
        out.push_str(&v.to_string());
        return;
    }
    match v {
        Value::Object(m) if !m.is_empty() => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad(indent + 2));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(x, indent + 2, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        Value::Array(a) if !a.is_empty() => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 2));
                write_value(x, indent + 2, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

fn parse_side(s: &str) -> Result<Side> {
    match s {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        other => Err(DocumentError::Side(other.to_string())),
    }
}

fn side_label(side: Side) -> String {
    match side {
        Side::Left => "left".into(),
        Side::Right => "right".into(),
    }
}

/// Generators of a carrier, resolved to library names.
#[derive(Clone, Debug)]
pub struct Basis {
    pub ring: CoeffRing,
    pub truncation: Truncation,
    pub module: Arc<FreeGradedModule>,
    names: BTreeMap<String, Name>,
}

impl Basis {
    pub fn name(&self, label: &str) -> Result<Name> {
        self.names.get(label).cloned().ok_or_else(|| DocumentError::UnknownName(label.to_string()))
    }

    fn target(&self, t: &Target, arity: usize) -> Result<Name> {
        match (t, arity) {
            (Target::Name(l), 1) => self.name(l),
            (Target::Tensor(ls), k) if ls.len() == k && k != 1 => {
                Ok(Name::tensor(ls.iter().map(|l| self.name(l)).collect::<Result<_>>()?))
            }
            (Target::Name(l), k) => Err(DocumentError::Arity(l.clone(), k)),
            (Target::Tensor(ls), k) => Err(DocumentError::Arity(ls.join(", "), k)),
        }
    }

    /// Element of the `arity`-fold tensor power.
    pub fn element(&self, terms: &[Term], arity: usize) -> Result<Element> {
        let mut e = Element::zero();
        for Term(c, t) in terms {
            e.add_term(self.target(t, arity)?, &c.scalar()?);
        }
        Ok(e)
    }

    fn map(
        &self,
        entries: &SparseMap,
        source: &Arc<FreeGradedModule>,
        target: &Arc<FreeGradedModule>,
        degree: i64,
        arity: usize,
        target_basis: &Basis,
    ) -> Result<GradedMap> {
        let mut images = BTreeMap::new();
        for (label, terms) in entries {
            images.insert(self.name(label)?, target_basis.element(terms, arity)?);
        }
        GradedMap::new(source.clone(), target.clone(), degree, images).map_err(invalid)
    }

    fn scalars(&self, values: &BTreeMap<String, Coeff>) -> Result<BTreeMap<Name, Scalar>> {
        values.iter().map(|(l, c)| Ok((self.name(l)?, c.scalar()?))).collect()
    }
}

impl CarrierDoc {
    pub fn basis(&self) -> Result<Basis> {
        let ring = CoeffRing::parse(&self.ring).map_err(invalid)?;
        let lo = self.generators.iter().map(|g| g.degree).min().unwrap_or(0);
        let hi = self.generators.iter().map(|g| g.degree).max().unwrap_or(0);
        let truncation = self.truncation.map(Truncation::from).unwrap_or(Truncation::exact(lo, hi));
        let mut names = BTreeMap::new();
        for g in &self.generators {
            if !truncation.contains(g.degree) {
                return Err(DocumentError::OutOfRange {
                    name: g.name.clone(),
                    degree: g.degree,
                    min: truncation.min,
                    max: truncation.max,
                });
            }
            if names.insert(g.name.clone(), Name::gen(g.name.clone(), g.degree)).is_some() {
                return Err(DocumentError::Duplicate(g.name.clone()));
            }
        }
        let module = Arc::new(FreeGradedModule::new(ring.clone(), names.values().cloned()).map_err(invalid)?);
        Ok(Basis { ring, truncation, module, names })
    }

    pub fn complex_with(&self, basis: &Basis) -> Result<ChainComplex> {
        let d = basis.map(&self.differential, &basis.module, &basis.module, -1, 1, basis)?;
        ChainComplex::new(d, basis.truncation).map_err(invalid)
    }

    pub fn complex(&self) -> Result<ChainComplex> {
        self.complex_with(&self.basis()?)
    }

    pub fn coalgebra(&self) -> Result<DGCoalgebra> {
        let basis = self.basis()?;
        let complex = self.complex_with(&basis)?;
        let entries = self.coproduct.as_ref().ok_or(DocumentError::Missing { kind: "coalgebra", field: "coproduct" })?;
        let square = tensor_power_module(&complex, 2).map_err(invalid)?;
        let comult = basis.map(entries, &basis.module, &square, 0, 2, &basis)?;
        let coaugmentation = self.coaugmentation.as_deref().map(|l| basis.name(l)).transpose()?;
        let counit = match (&self.counit, &coaugmentation) {
            (Some(c), _) => basis.scalars(c)?,
            (None, Some(u)) => [(u.clone(), Scalar::one())].into_iter().collect(),
            (None, None) => return Err(DocumentError::Missing { kind: "coalgebra", field: "counit" }),
        };
        DGCoalgebra::new(complex, comult, counit, coaugmentation).map_err(invalid)
    }

    pub fn algebra(&self) -> Result<DGAlgebra> {
        let basis = self.basis()?;
        let complex = self.complex_with(&basis)?;
        let entries = self.product.as_ref().ok_or(DocumentError::Missing { kind: "algebra", field: "product" })?;
        let square = tensor_power_module(&complex, 2).map_err(invalid)?;
        let mut images = BTreeMap::new();
        for p in entries {
            let key = Name::tensor(vec![basis.name(&p.left)?, basis.name(&p.right)?]);
            images.insert(key, basis.element(&p.value, 1)?);
        }
        let mult = GradedMap::new(square, basis.module.clone(), 0, images).map_err(invalid)?;
        let unit = basis.name(self.unit.as_deref().ok_or(DocumentError::Missing { kind: "algebra", field: "unit" })?)?;
        let augmentation = match &self.augmentation {
            Some(a) => basis.scalars(a)?,
            None => [(unit.clone(), Scalar::one())].into_iter().collect(),
        };
        DGAlgebra::new(complex, mult, Element::basis(unit), augmentation).map_err(invalid)
    }

    pub fn hopf(&self) -> Result<HopfAlgebra> {
        HopfAlgebra::new(self.algebra()?, self.coalgebra()?).map_err(invalid)
    }

    /// Whether the carrier declares a multiplication.
    pub fn has_product(&self) -> bool {
        self.product.is_some()
    }
}

impl TwistingDoc {
    pub fn load(&self) -> Result<TwistingCochain> {
        let source = self.source.coalgebra()?;
        let target = self.target.algebra()?;
        let (sb, tb) = (self.source.basis()?, self.target.basis()?);
        let map = sb.map(&self.map, source.module(), target.module(), -1, 1, &tb)?;
        TwistingCochain::new(source, target, map).map_err(invalid)
    }
}

impl DcshDoc {
    pub fn load(&self) -> Result<DCSHFamily> {
        let source = self.source.coalgebra()?.truncate_above(self.window).map_err(invalid)?;
        let target = self.target.coalgebra()?;
        let (sb, tb) = (self.source.basis()?, self.target.basis()?);
        let mut components = Vec::new();
        for (i, entries) in self.components.iter().enumerate() {
            let k = i + 1;
            let power = tensor_power_module(target.complex(), k).map_err(invalid)?;
            components.push(sb.map(entries, source.module(), &power, k as i64 - 1, k, &tb)?);
        }
        DCSHFamily::new(source, target, components).map_err(invalid)
    }

    /// The family as a multiplicative one, when both carriers are Hopf algebras.
    pub fn load_multiplicative(&self) -> Result<MultiplicativeDCSH> {
        let (source, target) = (self.source.hopf()?, self.target.hopf()?);
        MultiplicativeDCSH::new(self.load()?, source, target).map_err(invalid)
    }
}

impl ModuleCoalgebraDoc {
    pub fn load(&self) -> Result<ModuleCoalgebra> {
        let coalgebra = self.coalgebra.coalgebra()?;
        let hopf = self.hopf.hopf()?;
        let side = parse_side(&self.side)?;
        let (mb, hb) = (self.coalgebra.basis()?, self.hopf.basis()?);
        let mut table = BTreeMap::new();
        for a in &self.action {
            table.insert((mb.name(&a.element)?, hb.name(&a.by)?), mb.element(&a.value, 1)?);
        }
        ModuleCoalgebra::build(coalgebra, hopf, side, |m, h| table.get(&(m.clone(), h.clone())).cloned().unwrap_or_default())
            .map_err(invalid)
    }
}

impl ModuleMapDoc {
    pub fn load(&self) -> Result<DCSHModuleMap> {
        DCSHModuleMap::new(self.family.load()?, self.source.load()?, self.target.load()?, self.theta.load_multiplicative()?)
            .map_err(invalid)
    }
}

impl CircleActionDoc {
    pub fn load(&self) -> Result<CircleAction> {
        let carrier = self.carrier.coalgebra()?;
        let basis = self.carrier.basis()?;
        let kappa = self
            .kappa
            .iter()
            .enumerate()
            .map(|(n, entries)| basis.map(entries, carrier.module(), carrier.module(), 2 * n as i64 + 1, 1, &basis))
            .collect::<Result<Vec<_>>>()?;
        CircleAction::new(carrier, kappa).map_err(invalid)
    }
}

impl SimplicialSetDoc {
    /// Fails with a library error when the face data violate the simplicial identities.
    pub fn load(&self) -> std::result::Result<SimplicialSet, orbitalg::simpl::SimplError> {
        let entries: Vec<(&str, usize, Vec<&str>)> =
            self.simplices.iter().map(|s| (s.name.as_str(), s.dim, s.faces.iter().map(String::as_str).collect())).collect();
        SimplicialSet::parse(&entries)
    }
}

/// Labels for the basis of a module, checked to be distinct.
struct Labels(BTreeMap<Name, String>);

impl Labels {
    fn of(module: &FreeGradedModule) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for n in module.names() {
            let label = n.to_string();
            if seen.insert(label.clone(), n.clone()).is_some() {
                return Err(DocumentError::Collision(label));
            }
        }
        Ok(Labels(seen.into_iter().map(|(l, n)| (n, l)).collect()))
    }

    fn get(&self, n: &Name) -> String {
        self.0.get(n).cloned().unwrap_or_else(|| n.to_string())
    }

    fn target(&self, n: &Name, arity: usize) -> Target {
        if arity == 1 {
            Target::Name(self.get(n))
        } else {
            let factors = n.tensor_factors(arity).expect("tensor name of the stated arity");
            Target::Tensor(factors.into_iter().map(|f| self.get(f)).collect())
        }
    }

    fn terms(&self, e: &Element, arity: usize) -> Vec<Term> {
        e.iter().map(|(n, c)| Term(Coeff::from_scalar(c), self.target(n, arity))).collect()
    }

    fn map(&self, f: &GradedMap, target: &Labels, arity: usize) -> SparseMap {
        f.images().filter(|(_, e)| !e.is_empty()).map(|(n, e)| (self.get(n), target.terms(e, arity))).collect()
    }

    fn scalars(&self, values: &BTreeMap<Name, Scalar>) -> BTreeMap<String, Coeff> {
        values.iter().filter(|(_, c)| !c.is_zero()).map(|(n, c)| (self.get(n), Coeff::from_scalar(c))).collect()
    }
}

/// The complex as a carrier with every generator relabelled by its printed name.
pub fn carrier_of_complex(c: &ChainComplex) -> Result<CarrierDoc> {
    let labels = Labels::of(c.module())?;
    Ok(CarrierDoc {
        ring: ring_label(c.ring()),
        truncation: Some(c.truncation().into()),
        generators: c.module().names().map(|n| GeneratorDoc { name: labels.get(n), degree: n.degree() }).collect(),
        differential: labels.map(c.differential(), &labels, 1),
        coproduct: None,
        counit: None,
        coaugmentation: None,
        product: None,
        unit: None,
        augmentation: None,
    })
}

pub fn carrier_of_coalgebra(c: &DGCoalgebra) -> Result<CarrierDoc> {
    let mut doc = carrier_of_complex(c.complex())?;
    let labels = Labels::of(c.module())?;
    doc.coproduct = Some(labels.map(c.comult(), &labels, 2));
    doc.counit = Some(labels.scalars(c.counit_map()));
    doc.coaugmentation = c.unit().map(|u| labels.get(u));
    Ok(doc)
}

pub fn carrier_of_algebra(a: &DGAlgebra) -> Result<CarrierDoc> {
    let mut doc = carrier_of_complex(a.complex())?;
    let labels = Labels::of(a.module())?;
    let unit = a.unit_name().ok_or_else(|| DocumentError::Invalid("the unit is not a single basis element".into()))?;
    doc.product = Some(
        a.mult()
            .images()
            .filter(|(_, e)| !e.is_empty())
            .map(|(n, e)| {
                let f = n.tensor_factors(2).expect("binary tensor");
                ProductEntry { left: labels.get(f[0]), right: labels.get(f[1]), value: labels.terms(e, 1) }
            })
            .collect(),
    );
    doc.unit = Some(labels.get(unit));
    doc.augmentation = Some(labels.scalars(a.augmentation_map()));
    Ok(doc)
}

pub fn carrier_of_hopf(h: &HopfAlgebra) -> Result<CarrierDoc> {
    let mut doc = carrier_of_coalgebra(&h.coalgebra)?;
    let alg = carrier_of_algebra(&h.algebra)?;
    doc.product = alg.product;
    doc.unit = alg.unit;
    doc.augmentation = alg.augmentation;
    Ok(doc)
}

pub fn twisting_doc(t: &TwistingCochain) -> Result<TwistingDoc> {
    let (sl, tl) = (Labels::of(t.source.module())?, Labels::of(t.target.module())?);
    Ok(TwistingDoc {
        source: carrier_of_coalgebra(&t.source)?,
        target: carrier_of_algebra(&t.target)?,
        map: sl.map(&t.map, &tl, 1),
    })
}

/// `source` and `target` are the full carriers the family runs between.
pub fn dcsh_doc(f: &DCSHFamily, source: CarrierDoc, target: CarrierDoc) -> Result<DcshDoc> {
    let (sl, tl) = (Labels::of(f.source.module())?, Labels::of(f.target.module())?);
    let components = f.components().iter().enumerate().map(|(i, phi)| sl.map(phi, &tl, i + 1)).collect();
    Ok(DcshDoc { source, target, window: f.window(), components })
}

pub fn multiplicative_doc(h: &MultiplicativeDCSH) -> Result<DcshDoc> {
    dcsh_doc(&h.family, carrier_of_hopf(&h.source)?, carrier_of_hopf(&h.target)?)
}

pub fn module_coalgebra_doc(m: &ModuleCoalgebra) -> Result<ModuleCoalgebraDoc> {
    let (ml, hl) = (Labels::of(m.coalgebra.module())?, Labels::of(m.hopf.module())?);
    let max = m.max_degree();
    let mut action = Vec::new();
    for x in m.coalgebra.module().names() {
        for h in m.hopf.module().names().filter(|h| x.degree() + h.degree() <= max) {
            let e = m.act(x, h);
            if !e.is_empty() {
                action.push(ActionEntry { element: ml.get(x), by: hl.get(h), value: ml.terms(&e, 1) });
            }
        }
    }
    Ok(ModuleCoalgebraDoc {
        coalgebra: carrier_of_coalgebra(&m.coalgebra)?,
        hopf: carrier_of_hopf(&m.hopf)?,
        side: side_label(m.side),
        action,
    })
}

pub fn module_map_doc(m: &DCSHModuleMap) -> Result<ModuleMapDoc> {
    Ok(ModuleMapDoc {
        family: dcsh_doc(&m.family, carrier_of_coalgebra(&m.source.coalgebra)?, carrier_of_coalgebra(&m.target.coalgebra)?)?,
        source: module_coalgebra_doc(&m.source)?,
        target: module_coalgebra_doc(&m.target)?,
        theta: multiplicative_doc(&m.theta)?,
    })
}

pub fn circle_action_doc(a: &CircleAction) -> Result<CircleActionDoc> {
    let labels = Labels::of(a.carrier.module())?;
    Ok(CircleActionDoc {
        carrier: carrier_of_coalgebra(&a.carrier)?,
        kappa: (0..a.len()).map(|n| labels.map(a.kappa(n).expect("stored operator"), &labels, 1)).collect(),
    })
}

/// `s_{j_r}⋯s_{j_1} y` with `j_1 < ⋯ < j_r`, written outermost first.
fn face_text(k: &SimplicialSet, s: &Simplex) -> String {
    let mut parts: Vec<String> =
        s.surjection.windows(2).enumerate().filter(|(_, w)| w[0] == w[1]).map(|(j, _)| format!("s{j}")).collect();
    parts.reverse();
    parts.push(k.label(s.base).to_string());
    parts.join(" ")
}

pub fn simplicial_set_doc(k: &SimplicialSet) -> SimplicialSetDoc {
    let simplices = (0..k.len())
        .map(|y| {
            let dim = k.dim(y);
            let top = Simplex::nondegenerate(y, dim);
            let faces = if dim == 0 { Vec::new() } else { (0..=dim).map(|i| face_text(k, &k.face(&top, i))).collect() };
            SimplexDoc { name: k.label(y).to_string(), dim, faces }
        })
        .collect();
    SimplicialSetDoc { simplices }
}

pub fn ring_label(r: &CoeffRing) -> String {
    match r {
        CoeffRing::Integers => "z".into(),
        CoeffRing::Rationals => "q".into(),
        CoeffRing::PrimeField(p) => format!("fp:{p}"),
    }
}
