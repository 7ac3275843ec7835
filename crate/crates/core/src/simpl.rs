//! Finite simplicial sets in Eilenberg–Zilber normal form, normalized chains
//! with the Alexander–Whitney diagonal, chain-level suspension, and the orbit
//! model `C_*K ⊗_t C_*L` for a suspension `K`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use thiserror::Error;

use crate::barcobar::{cobar_hopf, cobar_letter, BarCobarError};
use crate::chaincx::{tensor_truncation, ChainComplex, ChainError, Truncation};
use crate::dgstruct::{check_module_coalgebra, tensor_power_module, DGCoalgebra, DgError, HopfAlgebra, ModuleCoalgebra, Side};
use crate::exactlin::{CoeffRing, Scalar};
use crate::graded::{sign, Element, FreeGradedModule, GradedError, GradedMap, Name};
use crate::report::CheckReport;
use crate::twist::{check_twisting_cochain, TwistError, TwistingCochain};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimplError {
    #[error("malformed simplicial set: {0}")]
    Malformed(String),
    #[error("simplicial identities fail: {0}")]
    Identities(String),
    #[error("suspension needs a connected complex")]
    NotConnected,
    #[error("the comultiplication formula needs a suspension, whose reduced diagonal is trivial")]
    NotASuspension,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    BarCobar(#[from] BarCobarError),
    #[error(transparent)]
    Twist(#[from] TwistError),
    #[error(transparent)]
    Dg(#[from] DgError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

pub type Result<T> = std::result::Result<T, SimplError>;

/// `s_I y`: the nondegenerate simplex `base` pulled back along an
/// order-preserving surjection `[n] → [dim base]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    pub base: usize,
    pub surjection: Vec<usize>,
}

impl Simplex {
    pub fn nondegenerate(base: usize, dim: usize) -> Self {
        Simplex { base, surjection: (0..=dim).collect() }
    }

    pub fn dim(&self) -> usize {
        self.surjection.len() - 1
    }

    pub fn is_degenerate(&self) -> bool {
        self.surjection.windows(2).any(|w| w[0] == w[1])
    }
}

/// Nondegenerate simplices with their faces; degenerate simplices are implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialSet {
    labels: Vec<String>,
    dims: Vec<usize>,
    faces: Vec<Vec<Simplex>>,
}

impl SimplicialSet {
    /// Simplices as `(label, dimension, faces)`, each face written as a label
    /// preceded by degeneracies, e.g. `"s1 s0 v"` for `s₁s₀v`.
    pub fn parse(entries: &[(&str, usize, Vec<&str>)]) -> Result<Self> {
        let index: BTreeMap<&str, usize> = entries.iter().enumerate().map(|(i, e)| (e.0, i)).collect();
        if index.len() != entries.len() {
            return Err(SimplError::Malformed("duplicate simplex label".into()));
        }
        let dims: Vec<usize> = entries.iter().map(|e| e.1).collect();
        let mut faces = Vec::new();
        for (label, dim, fs) in entries {
            let want = if *dim == 0 { 0 } else { dim + 1 };
            if fs.len() != want {
                return Err(SimplError::Malformed(format!("`{label}` lists {} faces, expected {want}", fs.len())));
            }
            let mut row = Vec::new();
            for f in fs {
                let mut tokens: Vec<&str> = f.split_whitespace().collect();
                let base = tokens.pop().ok_or_else(|| SimplError::Malformed(format!("empty face of `{label}`")))?;
                let &b = index.get(base).ok_or_else(|| SimplError::Malformed(format!("unknown simplex `{base}`")))?;
                let mut s = Simplex::nondegenerate(b, dims[b]);
                for t in tokens.iter().rev() {
                    let j = t
                        .strip_prefix('s')
                        .and_then(|j| j.parse::<usize>().ok())
                        .ok_or_else(|| SimplError::Malformed(format!("bad degeneracy `{t}`")))?;
                    if j > s.dim() {
                        return Err(SimplError::Malformed(format!("s{j} applied to a {}-simplex", s.dim())));
                    }
                    s = degeneracy(&s, j);
                }
                row.push(s);
            }
            faces.push(row);
        }
        Self::new(entries.iter().map(|e| e.0.to_string()).collect(), dims, faces)
    }

    pub fn new(labels: Vec<String>, dims: Vec<usize>, faces: Vec<Vec<Simplex>>) -> Result<Self> {
        let n = labels.len();
        if dims.len() != n || faces.len() != n {
            return Err(SimplError::Malformed("labels, dimensions and faces differ in length".into()));
        }
        for (y, row) in faces.iter().enumerate() {
            let want = if dims[y] == 0 { 0 } else { dims[y] + 1 };
            if row.len() != want {
                return Err(SimplError::Malformed(format!("`{}` has {} faces, expected {want}", labels[y], row.len())));
            }
            for f in row {
                let ok = f.base < n
                    && f.dim() + 1 == dims[y]
                    && f.surjection.first() == Some(&0)
                    && f.surjection.last() == Some(&dims[f.base])
                    && f.surjection.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1);
                if !ok {
                    return Err(SimplError::Malformed(format!("bad face of `{}`", labels[y])));
                }
            }
        }
        let k = SimplicialSet { labels, dims, faces };
        let report = k.check_identities();
        if !report.passed() {
            return Err(SimplError::Identities(report.to_string()));
        }
        Ok(k)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, y: usize) -> &str {
        &self.labels[y]
    }

    pub fn dim(&self, y: usize) -> usize {
        self.dims[y]
    }

    pub fn top_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&y| self.dims[y] == 0)
    }

    /// One vertex.
    pub fn is_reduced(&self) -> bool {
        self.vertices().count() == 1
    }

    /// `d_i s` in normal form.
    pub fn face(&self, s: &Simplex, i: usize) -> Simplex {
        assert!(s.dim() >= 1 && i <= s.dim(), "face d{i} of a {}-simplex", s.dim());
        let mut c = s.surjection.clone();
        let j = c.remove(i);
        if c.contains(&j) {
            return Simplex { base: s.base, surjection: c };
        }
        let f = &self.faces[s.base][j];
        let surjection = c.iter().map(|&v| f.surjection[v - usize::from(v > j)]).collect();
        Simplex { base: f.base, surjection }
    }

    /// The `Name` of a nondegenerate simplex in the normalized chains.
    pub fn chain_name(&self, y: usize) -> Name {
        Name::gen(self.labels[y].clone(), self.dims[y] as i64)
    }

    /// `d_i d_j = d_{j−1} d_i` for `i < j`, `d_i s_j` against its three cases and
    /// `s_i s_j = s_{j+1} s_i` for `i ≤ j`, on every nondegenerate simplex and
    /// its first degeneracies.
    pub fn check_identities(&self) -> CheckReport {
        let mut report = CheckReport::new("simplicial identities").with_window(0, self.top_dim() as i64);
        let mut tested: Vec<Simplex> = Vec::new();
        for y in 0..self.len() {
            let s = Simplex::nondegenerate(y, self.dims[y]);
            for j in 0..=s.dim() {
                tested.push(degeneracy(&s, j));
            }
            tested.push(s);
        }
        for s in &tested {
            let n = s.dim();
            let at = |what: &str| format!("{what} on {}", self.render(s));
            for j in 0..=n {
                for i in 0..j {
                    if n >= 2 {
                        report.tick();
                        if self.face(&self.face(s, j), i) != self.face(&self.face(s, i), j - 1) {
                            report.fail("d_i d_j = d_{j−1} d_i", at(&format!("i={i}, j={j}")), "faces differ");
                        }
                    }
                    report.tick();
                    if degeneracy(&degeneracy(s, j), i) != degeneracy(&degeneracy(s, i), j + 1) {
                        report.fail("s_i s_j = s_{j+1} s_i", at(&format!("i={i}, j={j}")), "degeneracies differ");
                    }
                }
                report.tick();
                if degeneracy(&degeneracy(s, j), j) != degeneracy(&degeneracy(s, j), j + 1) {
                    report.fail("s_j s_j = s_{j+1} s_j", at(&format!("j={j}")), "degeneracies differ");
                }
                let sj = degeneracy(s, j);
                for i in 0..=n + 1 {
                    let lhs = self.face(&sj, i);
                    let rhs = if i < j {
                        degeneracy(&self.face(s, i), j - 1)
                    } else if i == j || i == j + 1 {
                        s.clone()
                    } else {
                        degeneracy(&self.face(s, i - 1), j)
                    };
                    report.tick();
                    if lhs != rhs {
                        report.fail("d_i s_j", at(&format!("i={i}, j={j}")), "faces differ");
                    }
                }
            }
        }
        report
    }

    fn render(&self, s: &Simplex) -> String {
        let mut out = String::new();
        let mut t = s.surjection.clone();
        while let Some(j) = (0..t.len().saturating_sub(1)).rev().find(|&j| t[j] == t[j + 1]) {
            out.push_str(&format!("s{j} "));
            t.remove(j + 1);
        }
        out + &self.labels[s.base]
    }
}

/// `s_j s` in normal form.
pub fn degeneracy(s: &Simplex, j: usize) -> Simplex {
    let mut surjection = s.surjection.clone();
    surjection.insert(j, s.surjection[j]);
    Simplex { base: s.base, surjection }
}

/// Normalized chains with `d = Σ (−1)^i d_i` and the Alexander–Whitney diagonal
/// `Δy = Σ_p (front p-face) ⊗ (back face)`, counit on vertices and the first
/// vertex as coaugmentation.
pub fn normalized_chains(k: &SimplicialSet, ring: CoeffRing) -> Result<DGCoalgebra> {
    let names: Vec<Name> = (0..k.len()).map(|y| k.chain_name(y)).collect();
    let module = Arc::new(FreeGradedModule::new(ring, names.clone())?);
    let chain = |s: &Simplex| (!s.is_degenerate()).then(|| names[s.base].clone());
    let d = GradedMap::from_fn(module.clone(), module.clone(), -1, |x| {
        let y = names.iter().position(|n| n == x).expect("listed simplex");
        let s = Simplex::nondegenerate(y, k.dim(y));
        let mut e = Element::zero();
        if s.dim() > 0 {
            for i in 0..=s.dim() {
                if let Some(n) = chain(&k.face(&s, i)) {
                    e.add_term(n, &sign(i as i64));
                }
            }
        }
        e
    })?;
    let complex = ChainComplex::new(d, Truncation::exact(0, k.top_dim() as i64))?;
    let delta = |x: &Name| {
        let y = names.iter().position(|n| n == x).expect("listed simplex");
        let m = k.dim(y);
        let s = Simplex::nondegenerate(y, m);
        let mut e = Element::zero();
        for p in 0..=m {
            let mut front = s.clone();
            for i in (p + 1..=m).rev() {
                front = k.face(&front, i);
            }
            let mut back = s.clone();
            for _ in 0..p {
                back = k.face(&back, 0);
            }
            if let (Some(a), Some(b)) = (chain(&front), chain(&back)) {
                e.add_term(Name::tensor(vec![a, b]), &Scalar::one());
            }
        }
        e
    };
    let counit = k.vertices().map(|v| (names[v].clone(), Scalar::one())).collect();
    let unit = k.vertices().next().map(|v| names[v].clone());
    Ok(DGCoalgebra::build(complex, delta, counit, unit)?)
}

/// One vertex `*` and one nondegenerate edge `σ`.
pub fn circle() -> SimplicialSet {
    SimplicialSet::parse(&[("*", 0, vec![]), ("σ", 1, vec!["*", "*"])]).expect("circle")
}

/// `Δ[1]`: vertices `0`, `1` and the edge `01`.
pub fn interval() -> SimplicialSet {
    SimplicialSet::parse(&[("0", 0, vec![]), ("1", 0, vec![]), ("01", 1, vec!["1", "0"])]).expect("interval")
}

/// `∂Δ³`: all faces of the tetrahedron on vertices `0..3` below dimension 3.
pub fn tetrahedron_boundary() -> SimplicialSet {
    let v = ["0", "1", "2", "3"];
    let edges = ["01", "02", "03", "12", "13", "23"];
    let tris = ["012", "013", "023", "123"];
    let mut entries: Vec<(&str, usize, Vec<&str>)> = v.iter().map(|x| (*x, 0, vec![])).collect();
    for e in &edges {
        entries.push((e, 1, vec![&e[1..2], &e[0..1]]));
    }
    let drop = |s: &str, i: usize| -> String { s.chars().enumerate().filter(|(k, _)| *k != i).map(|(_, c)| c).collect() };
    let faces: Vec<Vec<String>> = tris.iter().map(|t| (0..3).map(|i| drop(t, i)).collect()).collect();
    for (t, f) in tris.iter().zip(&faces) {
        entries.push((t, 2, f.iter().map(|s| s.as_str()).collect()));
    }
    SimplicialSet::parse(&entries).expect("boundary of the tetrahedron")
}

/// One vertex `*` and one 2-simplex `σ` with every face `s₀*`.
pub fn minimal_sphere() -> SimplicialSet {
    SimplicialSet::parse(&[("*", 0, vec![]), ("σ", 2, vec!["s0 *", "s0 *", "s0 *"])]).expect("sphere")
}

/// One vertex, edges `a`, `b`, `c` and 2-simplices `σ`, `τ` with
/// `(d₀, d₁, d₂)σ = (b, c, a)` and `(d₀, d₁, d₂)τ = (a, c, b)`.
pub fn minimal_torus() -> SimplicialSet {
    SimplicialSet::parse(&[
        ("*", 0, vec![]),
        ("a", 1, vec!["*", "*"]),
        ("b", 1, vec!["*", "*"]),
        ("c", 1, vec!["*", "*"]),
        ("σ", 2, vec!["b", "c", "a"]),
        ("τ", 2, vec!["a", "c", "b"]),
    ])
    .expect("torus")
}

/// Chains of a suspension: `1` and `e(x)` in degree `|x|+1` for each positive
/// basis element `x` of the source, with `d e(x) = −e(dx)` and every `e(x)` primitive.
#[derive(Clone, Debug)]
pub struct SuspensionChains {
    pub source: DGCoalgebra,
    pub coalgebra: DGCoalgebra,
}

impl SuspensionChains {
    pub fn e(x: &Name) -> Name {
        Name::shift(1, x.clone())
    }

    /// The source element under `e(x)`.
    pub fn desuspend(ex: &Name) -> Option<Name> {
        match ex {
            Name::Shift { by: 1, inner } => Some((**inner).clone()),
            _ => None,
        }
    }

    pub fn unit() -> Name {
        Name::gen("1", 0)
    }
}

pub fn suspension_chains(c: &DGCoalgebra) -> Result<SuspensionChains> {
    if c.module().dim(0) != 1 || c.unit().is_none() || c.truncation().min < 0 {
        return Err(SimplError::NotConnected);
    }
    let unit = SuspensionChains::unit();
    let positive = c.module().restrict(|m| m > 0);
    let shifted = positive.suspend(1);
    let module = Arc::new(FreeGradedModule::new(c.ring().clone(), std::iter::once(unit.clone()).chain(shifted.names().cloned()))?);
    let d = GradedMap::from_fn(module.clone(), module.clone(), -1, |ex| match SuspensionChains::desuspend(ex) {
        Some(x) => c.d().image(&x).map_names(|y| (y.degree() > 0).then(|| (-Scalar::one(), SuspensionChains::e(y)))),
        None => Element::zero(),
    })?;
    let t = c.truncation();
    let truncation = Truncation { min: 0, max: t.max + 1, bounded_below: true, bounded_above: t.bounded_above };
    let complex = ChainComplex::new(d, truncation)?;
    let coalgebra = DGCoalgebra::connected(
        complex,
        |x| {
            let mut e = Element::basis(Name::tensor(vec![x.clone(), unit.clone()]));
            if *x != unit {
                e.add_term(Name::tensor(vec![unit.clone(), x.clone()]), &Scalar::one());
            }
            e
        },
        unit.clone(),
    )?;
    Ok(SuspensionChains { source: c.clone(), coalgebra })
}

fn letter_word(ex: &Name) -> Name {
    Name::word(vec![cobar_letter(ex.clone())])
}

/// `ΩC_*K` for a suspension, with `ψ(s⁻¹e(x)) = s⁻¹e(x)⊗1 + 1⊗s⁻¹e(x) + Σ s⁻¹e(x_i)⊗s⁻¹e(x^i)`
/// over the reduced diagonal `Δ̄x = Σ x_i⊗x^i` of the source, extended multiplicatively.
pub fn suspension_cobar(s: &SuspensionChains, max_degree: i64) -> Result<HopfAlgebra> {
    Ok(cobar_hopf(&s.coalgebra, max_degree, |l| {
        let ex = crate::barcobar::unletter(l);
        let one = Name::empty_word();
        let mut e = Element::from_terms([
            (Scalar::one(), Name::tensor(vec![letter_word(ex), one.clone()])),
            (Scalar::one(), Name::tensor(vec![one, letter_word(ex)])),
        ]);
        let x = SuspensionChains::desuspend(ex).expect("suspended letter");
        for (p, k) in s.source.reduced_delta(&x).iter() {
            let f = p.tensor_factors(2).expect("binary tensor");
            let w = Name::tensor(vec![letter_word(&SuspensionChains::e(f[0])), letter_word(&SuspensionChains::e(f[1]))]);
            e.add_term(w, k);
        }
        e
    })?)
}

/// `C_*K ⊗_t L` with `D(x⊗y) = dx⊗y + (−1)^{|x|} x⊗dy − 1⊗t(x)·y`; valid when
/// the reduced diagonal of `C_*K` is trivial, which is enforced.
pub fn simplicial_orbit_complex(k: &DGCoalgebra, t: &TwistingCochain, l: &ModuleCoalgebra, max_degree: i64) -> Result<ChainComplex> {
    if k.positive_basis().any(|x| !k.reduced_delta(x).is_zero_in(k.ring())) {
        return Err(SimplError::NotASuspension);
    }
    let unit = k.unit().ok_or(SimplError::NotASuspension)?.clone();
    if l.side != Side::Left {
        return Err(SimplError::Invalid("the module coalgebra must be a left module".into()));
    }
    if t.map.source().names().ne(k.module().names().filter(|x| t.source.module().contains(x))) {
        return Err(SimplError::Invalid("the twisting cochain is not defined on these chains".into()));
    }
    if **t.map.target() != **l.hopf.module() {
        return Err(SimplError::Invalid("the twisting cochain does not land in the acting algebra".into()));
    }
    let report = check_twisting_cochain(t);
    if !report.passed() {
        return Err(SimplError::Invalid(report.to_string()));
    }
    let report = check_module_coalgebra(l);
    if !report.passed() {
        return Err(SimplError::Invalid(report.to_string()));
    }
    let mut truncation = tensor_truncation(&[k.truncation(), l.coalgebra.truncation()]);
    let known = if t.source.truncation().bounded_above { max_degree } else { t.known_up_to() };
    let top = max_degree.min(known);
    if truncation.max > top {
        truncation = Truncation { max: top, bounded_above: false, ..truncation };
    }
    let module = Arc::new(FreeGradedModule::tensor(&[k.module(), l.coalgebra.module()], |m| truncation.contains(m))?);
    let ld = l.coalgebra.d();
    let d = GradedMap::from_fn(module.clone(), module.clone(), -1, |n| {
        let f = n.tensor_factors(2).expect("binary tensor");
        let (x, y) = (f[0], f[1]);
        let mut e = Element::tensor(&[&k.d().image(x), &Element::basis(y.clone())]);
        e.add_scaled(&Element::tensor(&[&Element::basis(x.clone()), &ld.image(y)]), &sign(x.degree()));
        if *x != unit {
            let twisted = l.act_elements(&Element::basis(y.clone()), &t.apply(x));
            e.sub(&Element::tensor(&[&Element::basis(unit.clone()), &twisted]));
        }
        e.map_names(|z| module.contains(z).then(|| (Scalar::one(), z.clone())))
    })?;
    Ok(ChainComplex::new(d, truncation)?)
}

/// The orbit model for a suspension `K` with comultiplication
/// `ψ̃(e(x)⊗y) = (e(x)⊗y_j)⊗(1⊗y^j) + (−1)^{|e(x)||y_j|}(1⊗y_j)⊗(e(x)⊗y^j)
///   + Σ (−1)^{|x_i| + |e(x^i)||y_j|}(1⊗t(e(x_i))·y_j)⊗(e(x^i)⊗y^j)`
/// and `ψ̃(1⊗y) = (1⊗y_j)⊗(1⊗y^j)`.
pub fn simplicial_orbit_model(s: &SuspensionChains, t: &TwistingCochain, l: &ModuleCoalgebra, max_degree: i64) -> Result<DGCoalgebra> {
    simplicial_orbit_model_with(s, t, l, max_degree, |xi, exi, yj| sign(xi + exi * yj))
}

pub(crate) fn simplicial_orbit_model_with(
    s: &SuspensionChains,
    t: &TwistingCochain,
    l: &ModuleCoalgebra,
    max_degree: i64,
    third_sign: impl Fn(i64, i64, i64) -> Scalar,
) -> Result<DGCoalgebra> {
    let k = &s.coalgebra;
    let complex = simplicial_orbit_complex(k, t, l, max_degree)?;
    let module = complex.module().clone();
    let unit = SuspensionChains::unit();
    let pair = |a: &Name, b: &Name| Name::tensor(vec![a.clone(), b.clone()]);
    let square = tensor_power_module(&complex, 2)?;
    let comult = GradedMap::from_fn(module.clone(), square.clone(), 0, |n| {
        let f = n.tensor_factors(2).expect("binary tensor");
        let (ex, y) = (f[0], f[1]);
        let dy = l.coalgebra.delta(y);
        let mut out = Element::zero();
        for (p, c) in dy.iter() {
            let g = p.tensor_factors(2).expect("binary tensor");
            let (yj, yjj) = (g[0], g[1]);
            if *ex == unit {
                out.add_term(pair(&pair(&unit, yj), &pair(&unit, yjj)), c);
                continue;
            }
            out.add_term(pair(&pair(ex, yj), &pair(&unit, yjj)), c);
            out.add_term(pair(&pair(&unit, yj), &pair(ex, yjj)), &(sign(ex.degree() * yj.degree()) * c));
            let x = SuspensionChains::desuspend(ex).expect("suspended generator");
            for (q, b) in s.source.reduced_delta(&x).iter() {
                let h = q.tensor_factors(2).expect("binary tensor");
                let (exi, exii) = (SuspensionChains::e(h[0]), SuspensionChains::e(h[1]));
                let acted = l.act_elements(&Element::basis(yj.clone()), &t.apply(&exi));
                let coeff = third_sign(h[0].degree(), exii.degree(), yj.degree()) * b * c;
                for (z, a) in acted.iter() {
                    out.add_term(pair(&pair(&unit, z), &pair(&exii, yjj)), &(a * &coeff));
                }
            }
        }
        out.map_names(|z| square.contains(z).then(|| (Scalar::one(), z.clone())))
    })?;
    let counit = l.coalgebra.counit_map().iter().map(|(u, v)| (pair(&unit, u), v.clone())).filter(|(u, _)| module.contains(u)).collect();
    let coaug = l.coalgebra.unit().map(|u| pair(&unit, u));
    Ok(DGCoalgebra::new(complex, comult, counit, coaug)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barcobar::universal_cochain;
    use crate::dgstruct::{check_coalgebra, check_coalgebra_map, check_hopf, regular_module, CoalgebraMap};
    use crate::twist::acyclic_cobar;

    fn z() -> CoeffRing {
        CoeffRing::Integers
    }

    fn ranks(c: &DGCoalgebra, top: i64) -> Vec<Option<usize>> {
        c.complex().homology(&z(), 0..=top).unwrap().ranks()
    }

    fn setup(k: &SimplicialSet, n: i64) -> (SuspensionChains, TwistingCochain, ModuleCoalgebra) {
        let s = suspension_chains(&normalized_chains(k, z()).unwrap()).unwrap();
        let hopf = suspension_cobar(&s, n).unwrap();
        let t = universal_cochain(&s.coalgebra, n).unwrap();
        let l = regular_module(&hopf, Side::Left).unwrap();
        (s, t, l)
    }

    #[test]
    fn fixtures_have_expected_chains() {
        let c = normalized_chains(&circle(), z()).unwrap();
        assert_eq!((c.module().dim(0), c.module().dim(1)), (1, 1));
        assert!(c.d().is_zero_in_ring());
        assert_eq!(ranks(&normalized_chains(&interval(), z()).unwrap(), 1), vec![Some(1), Some(0)]);
        assert_eq!(ranks(&normalized_chains(&tetrahedron_boundary(), z()).unwrap(), 2), vec![Some(1), Some(0), Some(1)]);
        assert_eq!(ranks(&normalized_chains(&minimal_sphere(), z()).unwrap(), 2), vec![Some(1), Some(0), Some(1)]);
        assert_eq!(ranks(&normalized_chains(&minimal_torus(), z()).unwrap(), 2), vec![Some(1), Some(2), Some(1)]);
        for k in [circle(), interval(), tetrahedron_boundary(), minimal_sphere(), minimal_torus()] {
            let r = check_coalgebra(&normalized_chains(&k, z()).unwrap());
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn alexander_whitney_on_an_edge() {
        let c = normalized_chains(&interval(), z()).unwrap();
        let (a, b, s) = (Name::gen("0", 0), Name::gen("1", 0), Name::gen("01", 1));
        let expected = Element::from_terms([
            (Scalar::one(), Name::tensor(vec![a, s.clone()])),
            (Scalar::one(), Name::tensor(vec![s.clone(), b])),
        ]);
        assert_eq!(c.delta(&s), expected);
        let t = normalized_chains(&minimal_torus(), z()).unwrap();
        let sigma = Name::gen("σ", 2);
        assert_eq!(t.reduced_delta(&sigma), Element::basis(Name::tensor(vec![Name::gen("a", 1), Name::gen("b", 1)])));
    }

    #[test]
    fn inconsistent_faces_are_rejected() {
        let e = SimplicialSet::parse(&[
            ("0", 0, vec![]),
            ("1", 0, vec![]),
            ("2", 0, vec![]),
            ("01", 1, vec!["1", "0"]),
            ("12", 1, vec!["2", "1"]),
            ("02", 1, vec!["2", "0"]),
            ("012", 2, vec!["12", "02", "12"]),
        ])
        .unwrap_err();
        assert!(matches!(e, SimplError::Identities(_)));
        let e = SimplicialSet::parse(&[("*", 0, vec![]), ("σ", 1, vec!["*"])]).unwrap_err();
        assert!(matches!(e, SimplError::Malformed(_)));
        let e = SimplicialSet::parse(&[("*", 0, vec![]), ("σ", 1, vec!["*", "x"])]).unwrap_err();
        assert!(matches!(e, SimplError::Malformed(_)));
    }

    #[test]
    fn degenerate_faces_reduce_to_normal_form() {
        let k = minimal_sphere();
        let sigma = Simplex::nondegenerate(1, 2);
        let s = degeneracy(&sigma, 1);
        assert_eq!(k.face(&s, 1), sigma);
        assert_eq!(k.face(&s, 2), sigma);
        assert_eq!(k.face(&k.face(&sigma, 0), 0), Simplex { base: 0, surjection: vec![0] });
    }

    #[test]
    fn suspension_shifts_the_reduced_chains() {
        let s = suspension_chains(&normalized_chains(&circle(), z()).unwrap()).unwrap();
        let m = s.coalgebra.module();
        assert_eq!((m.dim(0), m.dim(1), m.dim(2)), (1, 0, 1));
        assert_eq!(SuspensionChains::e(&Name::gen("σ", 1)).degree(), 2);
        let t = suspension_chains(&normalized_chains(&minimal_torus(), z()).unwrap()).unwrap();
        assert!(t.coalgebra.complex().verify_differential().passed());
        assert_eq!(ranks(&t.coalgebra, 3), vec![Some(1), Some(0), Some(2), Some(1)]);
        assert!(check_coalgebra(&t.coalgebra).passed());
        assert!(t.coalgebra.positive_basis().all(|x| t.coalgebra.reduced_delta(x).is_empty()));
        assert_eq!(suspension_chains(&normalized_chains(&interval(), z()).unwrap()).unwrap_err(), SimplError::NotConnected);
    }

    #[test]
    fn suspension_cobar_is_hopf() {
        let s = suspension_chains(&normalized_chains(&minimal_torus(), z()).unwrap()).unwrap();
        let r = check_hopf(&suspension_cobar(&s, 4).unwrap());
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn circle_suspension_model() {
        let (s, t, l) = setup(&circle(), 11);
        let model = simplicial_orbit_model(&s, &t, &l, 11).unwrap();
        let oracle = acyclic_cobar(&s.coalgebra, 11, Side::Left).unwrap();
        for m in 0..=11 {
            assert_eq!(model.module().basis(m), oracle.module().basis(m));
            assert_eq!(model.d().matrix_at(m), oracle.differential().matrix_at(m));
        }
        let h = model.complex().homology(&z(), 0..=10).unwrap();
        assert!(h.is_ground_ring_in_degree_zero(), "{h}");
        assert!((1..=10).all(|m| h.get(m).unwrap().is_zero()));
        let r = check_coalgebra(&model);
        assert!(r.passed(), "{r}");
        // two-summand display: the circle's reduced diagonal vanishes
        let ex = SuspensionChains::e(&Name::gen("σ", 1));
        let one = SuspensionChains::unit();
        for w in l.coalgebra.module().names().filter(|w| w.degree() <= 8) {
            let mut expected = Element::zero();
            for (p, c) in l.coalgebra.delta(w).iter() {
                let g = p.tensor_factors(2).unwrap();
                let left = Name::tensor(vec![Name::tensor(vec![ex.clone(), g[0].clone()]), Name::tensor(vec![one.clone(), g[1].clone()])]);
                let right = Name::tensor(vec![Name::tensor(vec![one.clone(), g[0].clone()]), Name::tensor(vec![ex.clone(), g[1].clone()])]);
                expected.add_term(left, c);
                expected.add_term(right, &(sign(2 * g[0].degree()) * c));
            }
            assert_eq!(model.delta(&Name::tensor(vec![ex.clone(), w.clone()])), expected);
        }
    }

    #[test]
    fn torus_suspension_model_fixes_the_sign() {
        let (s, t, l) = setup(&minimal_torus(), 5);
        let model = simplicial_orbit_model(&s, &t, &l, 5).unwrap();
        let r = check_coalgebra(&model);
        assert!(r.passed(), "{r}");
        let h = model.complex().homology(&z(), 0..=4).unwrap();
        assert!(h.is_ground_ring_in_degree_zero());
        assert!((1..=4).all(|m| h.get(m).unwrap().is_zero()));
        let plain = simplicial_orbit_model_with(&s, &t, &l, 5, |_, exi, yj| sign(exi * yj)).unwrap();
        assert!(!check_coalgebra(&plain).passed());
    }

    #[test]
    fn zero_twisting_gives_the_tensor_coalgebra() {
        let (s, t, l) = setup(&minimal_torus(), 5);
        let zero = TwistingCochain::zero(t.source.clone(), t.target.clone());
        let model = simplicial_orbit_model(&s, &zero, &l, 5).unwrap();
        let oracle = s.coalgebra.tensor(&l.coalgebra).unwrap();
        for m in 0..=5 {
            assert_eq!(model.module().basis(m), oracle.module().basis(m));
            assert_eq!(model.d().matrix_at(m), oracle.d().matrix_at(m));
            assert_eq!(model.comult().matrix_at(m), oracle.comult().matrix_at(m));
        }
    }

    #[test]
    fn module_column_is_a_subcoalgebra() {
        let (s, t, l) = setup(&circle(), 8);
        let model = simplicial_orbit_model(&s, &t, &l, 8).unwrap();
        let inclusion = GradedMap::from_fn(l.coalgebra.module().clone(), model.module().clone(), 0, |y| {
            Element::basis(Name::tensor(vec![SuspensionChains::unit(), y.clone()]))
        })
        .unwrap();
        let f = CoalgebraMap::new(l.coalgebra.clone(), model, inclusion).unwrap();
        let r = check_coalgebra_map(&f);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn non_suspension_is_rejected() {
        let (_, t, l) = setup(&circle(), 6);
        let torus = normalized_chains(&minimal_torus(), z()).unwrap();
        let zero = TwistingCochain::zero(torus.clone(), t.target.clone());
        assert_eq!(simplicial_orbit_complex(&torus, &zero, &l, 6).unwrap_err(), SimplError::NotASuspension);
    }
}
