//! DCSH maps as truncated coherent families `φ_k: C → C′^{⊗k}`, with
//! checkers for the plain, multiplicative and module-map identities,
//! composition, the induced cobar map, tensoring over a multiplicative
//! family, and lifting along a surjective quasi-isomorphism.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::barcobar::{self, cobar_letter, BarCobarError};
use crate::chaincx::{check_commutes, tensor_truncation, ChainComplex, ChainError, ChainMap};
use crate::dgstruct::{
    tensor_power_module, AlgebraMap, CoalgebraMap, DGCoalgebra, DgError, HopfAlgebra, ModuleCoalgebra, Side,
};
use crate::exactlin::{self, CoeffRing, ExactLinError, Scalar, SparseMatrix};
use crate::graded::{apply_at, sign, tensor_apply, tensor_map_sign, ungroup, Element, FreeGradedModule, GradedError, GradedMap, Name};
use crate::report::CheckReport;
use crate::twist::{DGModule, TwistError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DcshError {
    #[error("undetermined: {0}")]
    Undetermined(String),
    #[error("structure mismatch: {0}")]
    Mismatch(String),
    #[error("no φ_{k} solves the coherence equation in source degree {degree}")]
    Unsolvable { k: usize, degree: i64 },
    #[error("projection is not surjective in degree {0}")]
    NotSurjective(i64),
    #[error("kernel of the projection is not acyclic in degree {0}")]
    KernelNotAcyclic(i64),
    #[error("quotient is not free over the integers in degree {0}")]
    NotFree(i64),
    #[error("lift failed verification: {0}")]
    Verification(String),
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
    #[error(transparent)]
    ExactLin(#[from] ExactLinError),
}

pub type Result<T> = std::result::Result<T, DcshError>;

/// A family `φ₁, …, φ_K` with `φ_k: C → C′^{⊗k}` of degree `k − 1`, known on
/// source degrees up to the window.
#[derive(Clone, Debug)]
pub struct DCSHFamily {
    pub source: DGCoalgebra,
    pub target: DGCoalgebra,
    components: Vec<GradedMap>,
}

impl DCSHFamily {
    /// `components[k − 1]` is `φ_k`, a map out of the source carrier into `C′^{⊗k}`.
    pub fn new(source: DGCoalgebra, target: DGCoalgebra, components: Vec<GradedMap>) -> Result<Self> {
        if components.is_empty() {
            return Err(DcshError::Mismatch("a family needs at least φ₁".into()));
        }
        for (i, f) in components.iter().enumerate() {
            let k = i + 1;
            if **f.source() != **source.module() {
                return Err(DcshError::Mismatch(format!("φ_{k} is not defined on the source carrier")));
            }
            if **f.target() != *tensor_power_module(target.complex(), k)? {
                return Err(DcshError::Mismatch(format!("φ_{k} does not land in the {k}-fold tensor power")));
            }
            if f.degree() != k as i64 - 1 {
                return Err(DcshError::Mismatch(format!("φ_{k} has degree {}", f.degree())));
            }
        }
        Ok(DCSHFamily { source, target, components })
    }

    /// Family of the given length on source degrees up to `window`, with
    /// `f(k, c) = φ_k(c)`.
    pub fn from_fns(
        source: &DGCoalgebra,
        target: &DGCoalgebra,
        length: usize,
        window: i64,
        mut f: impl FnMut(usize, &Name) -> Element,
    ) -> Result<Self> {
        let source = family_source(source, target, length, window)?;
        let mut components = Vec::with_capacity(length);
        for k in 1..=length {
            let module = tensor_power_module(target.complex(), k)?;
            components.push(GradedMap::from_fn(source.module().clone(), module, k as i64 - 1, |c| f(k, c))?);
        }
        Self::new(source, target.clone(), components)
    }

    /// A strict coalgebra map `(φ₁, 0, 0, …)`.
    pub fn strict(map: &CoalgebraMap, length: usize, window: i64) -> Result<Self> {
        Self::from_fns(&map.source, &map.target, length, window, |k, c| if k == 1 { map.map.image(c) } else { Element::zero() })
    }

    pub fn identity(c: &DGCoalgebra, length: usize, window: i64) -> Result<Self> {
        Self::strict(&CoalgebraMap::identity(c), length, window)
    }

    /// Length `K` of the family.
    pub fn length(&self) -> usize {
        self.components.len()
    }

    /// Largest source degree on which the family is known.
    pub fn window(&self) -> i64 {
        self.source.max_degree()
    }

    /// `φ_k` for `1 ≤ k ≤ K`.
    pub fn component(&self, k: usize) -> &GradedMap {
        &self.components[k - 1]
    }

    pub fn components(&self) -> &[GradedMap] {
        &self.components
    }

    pub fn apply(&self, k: usize, c: &Name) -> Element {
        self.component(k).image(c)
    }

    /// Same family with `φ_k` replaced.
    pub fn with_component(&self, k: usize, map: GradedMap) -> Result<Self> {
        let mut components = self.components.clone();
        components[k - 1] = map;
        Self::new(self.source.clone(), self.target.clone(), components)
    }
}

/// Source truncated to the window, after checking that `φ_k(c)` stays inside
/// the known part of `C′^{⊗k}`.
fn family_source(source: &DGCoalgebra, target: &DGCoalgebra, length: usize, window: i64) -> Result<DGCoalgebra> {
    if length == 0 {
        return Err(DcshError::Mismatch("a family needs at least φ₁".into()));
    }
    let st = source.truncation();
    if window > st.max && !st.bounded_above {
        return Err(DcshError::Undetermined(format!("source is only known through degree {}", st.max)));
    }
    let tt = target.truncation();
    if !tt.bounded_above && window + length as i64 - 1 > tt.max {
        return Err(DcshError::Undetermined(format!(
            "φ_{length} in source degree {window} exceeds the target window {}",
            tt.max
        )));
    }
    Ok(source.truncate_above(window)?)
}

/// `σ_k = (−1)^{k(k−1)/2 + k − 1}`, the sign relating `φ_k` to the `k`-letter
/// part of the induced cobar map.
fn cobar_sign(k: usize) -> Scalar {
    let k = k as i64;
    sign(k * (k - 1) / 2 + k - 1)
}

/// Ordered ways of writing `n` as a sum of `k` positive parts.
pub fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=n.saturating_sub(k - 1) {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Differential of `C′^{⊗k}` on a `k`-fold element.
fn tensor_d(target: &DGCoalgebra, x: &Element, k: usize) -> Element {
    let mut out = Element::zero();
    for i in 0..k {
        out.add(&apply_at(x, k, i, -1, 1, |y| target.d().image(y)));
    }
    out
}

/// Sign placed on the `(φ_i⊗φ_{k−i})Δ̄` terms of the coherence equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum SplitSign {
    /// `(−1)^{i+1}`, the sign forced by `d² = 0` on the cobar side.
    Alternating,
    /// No sign on the split terms.
    #[cfg_attr(not(test), allow(dead_code))]
    Plain,
}

/// Right side of the coherence equation for `φ_k` at `c`, from `φ₁ … φ_{k−1}`.
fn coherence_rhs(source: &DGCoalgebra, target: &DGCoalgebra, comps: &[GradedMap], k: usize, c: &Name, split: SplitSign) -> Element {
    let mut rhs = Element::zero();
    let rd = source.reduced_delta(c);
    for i in 1..k {
        let s = match split {
            SplitSign::Alternating => sign(i as i64 + 1),
            SplitSign::Plain => Scalar::one(),
        };
        for (p, coeff) in rd.iter() {
            let f = p.tensor_factors(2).expect("binary tensor");
            let e = tensor_apply(&[&comps[i - 1], &comps[k - i - 1]], &f);
            rhs.add_scaled(&ungroup(&e, &[i, k - i]), &(coeff * &s));
        }
    }
    if k >= 2 {
        let prev = comps[k - 2].image(c);
        for i in 0..k - 1 {
            let e = apply_at(&prev, k - 1, i, 0, 2, |y| target.reduced_delta(y));
            rhs.add_scaled(&e, &-sign(i as i64));
        }
    }
    rhs
}

/// `d φ_k(c) + (−1)^k φ_k(dc)`.
fn coherence_lhs(f: &DCSHFamily, k: usize, c: &Name) -> Element {
    let mut lhs = tensor_d(&f.target, &f.apply(k, c), k);
    lhs.add_scaled(&f.component(k).apply(&f.source.d().image(c)), &sign(k as i64));
    lhs
}

fn expect_equal(report: &mut CheckReport, property: &str, at: impl std::fmt::Display, lhs: &Element, rhs: &Element, ring: &CoeffRing) {
    report.tick();
    if !lhs.equal_in(rhs, ring) {
        let mut r = lhs.clone();
        r.sub(rhs);
        report.fail(property, at, r.reduced(ring));
    }
}

/// Verifies `d φ_k + (−1)^k φ_k d = Σ (−1)^{i+1} (φ_i⊗φ_{k−i})Δ̄ − Σ (−1)^i (1^{⊗i}⊗Δ̄′⊗1)φ_{k−1}`
/// for every `k ≤ K` on the window, together with counit and coaugmentation.
pub fn check_dcsh(f: &DCSHFamily) -> CheckReport {
    check_dcsh_with(f, SplitSign::Alternating)
}

pub(crate) fn check_dcsh_with(f: &DCSHFamily, split: SplitSign) -> CheckReport {
    let ring = f.source.ring().clone();
    let mut report = CheckReport::new("dcsh").with_window(0, f.window());
    let target_t = f.target.truncation();
    if let (Some(u), Some(u2)) = (f.source.unit(), f.target.unit()) {
        expect_equal(&mut report, "φ₁ preserves the coaugmentation", u, &f.apply(1, u), &Element::basis(u2.clone()), &ring);
        for k in 2..=f.length() {
            expect_equal(&mut report, "φ_k kills the coaugmentation", format!("k = {k}, {u}"), &f.apply(k, u), &Element::zero(), &ring);
        }
    }
    for c in f.source.module().names() {
        if c.degree() == 0 {
            let eps: Scalar = f.apply(1, c).iter().map(|(n, k)| k * f.target.counit_value(n)).sum();
            let lhs = Element::term(eps, Name::Tensor(Vec::new()));
            expect_equal(&mut report, "φ₁ preserves the counit", c, &lhs, &f.source.counit_element(c), &ring);
        }
    }
    let mut skipped = 0;
    for k in 1..=f.length() {
        let tk = tensor_truncation(&vec![target_t; k]);
        for c in f.source.module().names() {
            if !tk.knows_differential(c.degree() + k as i64 - 1) {
                skipped += 1;
                continue;
            }
            let lhs = coherence_lhs(f, k, c);
            let rhs = coherence_rhs(&f.source, &f.target, &f.components, k, c, split);
            expect_equal(&mut report, "coherence", format!("k = {k}, {c}"), &lhs, &rhs, &ring);
        }
    }
    if skipped > 0 {
        report.note(format!("{skipped} instances past the target window were not checked"));
    }
    report
}

/// A family between Hopf algebras, checked against the product identity.
#[derive(Clone, Debug)]
pub struct MultiplicativeDCSH {
    pub family: DCSHFamily,
    pub source: HopfAlgebra,
    pub target: HopfAlgebra,
}

impl MultiplicativeDCSH {
    pub fn new(family: DCSHFamily, source: HopfAlgebra, target: HopfAlgebra) -> Result<Self> {
        if !family.source.module().names().all(|n| source.module().contains(n)) {
            return Err(DcshError::Mismatch("family source is not the source Hopf algebra".into()));
        }
        if **family.target.module() != **target.module() {
            return Err(DcshError::Mismatch("family target is not the target Hopf algebra".into()));
        }
        Ok(MultiplicativeDCSH { family, source, target })
    }
}

/// `(Δ^{(i₁)}⊗⋯⊗Δ^{(i_k)})` on a `k`-fold element.
fn expand_factors(c: &DGCoalgebra, x: &Element, parts: &[usize]) -> Element {
    let mut e = x.clone();
    let mut pos = 0;
    let mut arity = parts.len();
    for &i in parts {
        e = apply_at(&e, arity, pos, 0, i, |y| c.iterated_delta(y, i));
        arity += i - 1;
        pos += i;
    }
    e
}

/// `(θ_{i₁}⊗⋯⊗θ_{i_k})Δ^{(k)}(b)` flattened to `n = Σ i_j` factors.
fn split_apply(f: &DCSHFamily, comult: &DGCoalgebra, b: &Name, parts: &[usize]) -> Element {
    let k = parts.len();
    let maps: Vec<&GradedMap> = parts.iter().map(|&i| f.component(i)).collect();
    let mut out = Element::zero();
    for (p, coeff) in comult.iterated_delta(b, k).iter() {
        let factors = p.tensor_factors(k).expect("iterated diagonal");
        out.add_scaled(&ungroup(&tensor_apply(&maps, &factors), parts), coeff);
    }
    out
}

/// Factorwise product `(x₁⊗⋯⊗x_n)(y₁⊗⋯⊗y_n)` with `(−1)^{Σ_{j>l}|x_j||y_l|}`.
fn factorwise(x: &Element, y: &Element, n: usize, mut mul: impl FnMut(&Name, &Name) -> Element) -> Element {
    let mut out = Element::zero();
    for (a, ca) in x.iter() {
        let fa = a.tensor_factors(n).expect("n-fold tensor");
        for (b, cb) in y.iter() {
            let fb = b.tensor_factors(n).expect("n-fold tensor");
            let mut e: i64 = 0;
            for j in 0..n {
                for l in 0..j {
                    e += fa[j].degree() * fb[l].degree();
                }
            }
            let products: Vec<Element> = (0..n).map(|j| mul(fa[j], fb[j])).collect();
            let refs: Vec<&Element> = products.iter().collect();
            out.add_scaled(&Element::tensor(&refs), &(sign(e) * ca * cb));
        }
    }
    out
}

/// Verifies `θ_n(ab) = Σ (Δ^{(i₁)}⊗⋯⊗Δ^{(i_k)})θ_k(a) · (θ_{i₁}⊗⋯⊗θ_{i_k})Δ^{(k)}(b)`
/// with Koszul signs, and `θ₁(1) = 1`.
pub fn check_multiplicative(h: &MultiplicativeDCSH) -> CheckReport {
    let f = &h.family;
    let ring = f.source.ring().clone();
    let window = f.window();
    let mut report = CheckReport::new("multiplicative").with_window(0, window);
    let src = &h.source.algebra;
    let tgt = &h.target.algebra;
    expect_equal(&mut report, "θ₁ is unital", "1", &f.component(1).apply(src.unit()), tgt.unit(), &ring);
    let names: Vec<&Name> = f.source.module().names().collect();
    for n in 1..=f.length() {
        for a in &names {
            for b in &names {
                if a.degree() + b.degree() > window {
                    break;
                }
                let lhs = f.component(n).apply(&src.product(a, b));
                let mut rhs = Element::zero();
                for k in 1..=n {
                    let theta_a = f.apply(k, a);
                    if theta_a.is_empty() {
                        continue;
                    }
                    for parts in compositions(n, k) {
                        let left = expand_factors(&h.target.coalgebra, &theta_a, &parts);
                        let right = split_apply(f, &h.source.coalgebra, b, &parts);
                        rhs.add(&factorwise(&left, &right, n, |x, y| tgt.product(x, y)));
                    }
                }
                expect_equal(&mut report, "product identity", format!("n = {n}, {a}, {b}"), &lhs, &rhs, &ring);
            }
        }
    }
    report
}

/// A family between module coalgebras over a multiplicative family `θ: H → K`.
#[derive(Clone, Debug)]
pub struct DCSHModuleMap {
    pub family: DCSHFamily,
    pub source: ModuleCoalgebra,
    pub target: ModuleCoalgebra,
    pub theta: MultiplicativeDCSH,
}

impl DCSHModuleMap {
    pub fn new(family: DCSHFamily, source: ModuleCoalgebra, target: ModuleCoalgebra, theta: MultiplicativeDCSH) -> Result<Self> {
        if source.side != target.side {
            return Err(DcshError::Mismatch("source and target act on different sides".into()));
        }
        if !family.source.module().names().all(|n| source.coalgebra.module().contains(n))
            || **family.target.module() != **target.coalgebra.module()
        {
            return Err(DcshError::Mismatch("family does not run between the module coalgebras".into()));
        }
        if **source.hopf.module() != **theta.source.module() || **target.hopf.module() != **theta.target.module() {
            return Err(DcshError::Mismatch("θ does not run between the acting Hopf algebras".into()));
        }
        Ok(DCSHModuleMap { family, source, target, theta })
    }
}

/// Verifies `φ_n(x·a) = Σ (Δ^{(i₁)}⊗⋯⊗Δ^{(i_k)})φ_k(x) · (θ_{i₁}⊗⋯⊗θ_{i_k})Δ^{(k)}(a)`
/// (mirrored for left actions) with Koszul signs.
pub fn check_module_map(m: &DCSHModuleMap) -> CheckReport {
    let f = &m.family;
    let theta = &m.theta.family;
    let ring = f.source.ring().clone();
    let window = f.window().min(theta.window());
    let mut report = CheckReport::new("module map").with_window(0, window);
    agree_coalgebras(&mut report, "family source", &f.source, &m.source.coalgebra, window);
    agree_coalgebras(&mut report, "family target", &f.target, &m.target.coalgebra, window);
    agree_hopf(&mut report, "θ source", &m.theta.source, &m.source.hopf, window);
    agree_hopf(&mut report, "θ target", &m.theta.target, &m.target.hopf, window);
    let hopf_names: Vec<&Name> = theta.source.module().names().collect();
    let length = f.length().min(theta.length());
    for n in 1..=length {
        for x in f.source.module().names() {
            for a in &hopf_names {
                if x.degree() + a.degree() > window {
                    break;
                }
                let lhs = f.component(n).apply(&m.source.act(x, a));
                let mut rhs = Element::zero();
                for k in 1..=n {
                    let phi_x = f.apply(k, x);
                    if phi_x.is_empty() {
                        continue;
                    }
                    for parts in compositions(n, k) {
                        let mods = expand_factors(&m.target.coalgebra, &phi_x, &parts);
                        let acts = split_apply(theta, &m.theta.source.coalgebra, a, &parts);
                        let e = match m.source.side {
                            Side::Right => factorwise(&mods, &acts, n, |y, b| m.target.act(y, b)),
                            Side::Left => factorwise(&acts, &mods, n, |b, y| m.target.act(y, b)),
                        };
                        rhs.add(&e);
                    }
                }
                expect_equal(&mut report, "action identity", format!("n = {n}, {x}, {a}"), &lhs, &rhs, &ring);
            }
        }
    }
    report
}

/// The coalgebra a family is stated on against the module coalgebra it should be.
fn agree_coalgebras(report: &mut CheckReport, what: &str, c: &DGCoalgebra, module: &DGCoalgebra, window: i64) {
    let ring = c.ring().clone();
    for x in c.module().names().filter(|x| x.degree() <= window) {
        let property = format!("{what} coproduct agrees");
        expect_equal(report, &property, x, &c.delta(x), &module.delta(x), &ring);
        let (e, e2) = (Element::term(c.counit_value(x), x.clone()), Element::term(module.counit_value(x), x.clone()));
        expect_equal(report, &format!("{what} counit agrees"), x, &e, &e2, &ring);
    }
}

fn agree_hopf(report: &mut CheckReport, what: &str, h: &HopfAlgebra, acting: &HopfAlgebra, window: i64) {
    agree_coalgebras(report, what, &h.coalgebra, &acting.coalgebra, window);
    let ring = h.ring().clone();
    let names: Vec<&Name> = h.module().names().filter(|x| x.degree() <= window).collect();
    for x in &names {
        for y in names.iter().filter(|y| x.degree() + y.degree() <= window) {
            let property = format!("{what} product agrees");
            expect_equal(report, &property, format!("{x}, {y}"), &h.algebra.product(x, y), &acting.algebra.product(x, y), &ring);
        }
    }
}

/// The algebra map `ΩC → ΩC′` of a family:
/// `s⁻¹c ↦ Σ_k σ_k (s⁻¹)^{⊗k} φ_k(c)`, extended multiplicatively.
///
/// The source cobar stops at letter degree `K`, beyond which higher
/// components would be needed.
pub fn to_cobar(f: &DCSHFamily, max_degree: i64) -> Result<AlgebraMap> {
    let top = max_degree.min(f.length() as i64);
    let source = barcobar::cobar(&f.source, top)?;
    let target = barcobar::cobar(&f.target, max_degree)?;
    let mut letters: BTreeMap<Name, Element> = BTreeMap::new();
    let mut letter_image = |l: &Name| -> Element {
        if let Some(e) = letters.get(l) {
            return e.clone();
        }
        let c = barcobar::unletter(l);
        let mut out = Element::zero();
        for k in 1..=f.length() {
            let s = cobar_sign(k);
            for (p, coeff) in f.apply(k, c).iter() {
                let factors = p.tensor_factors(k).expect("k-fold tensor");
                if factors.iter().any(|y| y.degree() <= 0) {
                    continue;
                }
                let degs: Vec<i64> = factors.iter().map(|y| y.degree()).collect();
                let word = Name::word(factors.iter().map(|y| cobar_letter((*y).clone())).collect());
                out.add_term(word, &(tensor_map_sign(&vec![-1; k], &degs) * coeff * &s));
            }
        }
        letters.insert(l.clone(), out.clone());
        out
    };
    let map = GradedMap::from_fn(source.module().clone(), target.module().clone(), 0, |w| {
        let images: Vec<Element> = w.word_letters().expect("cobar word").iter().map(&mut letter_image).collect();
        let e = target.mul_all(&images);
        e.map_names(|n| target.module().contains(n).then(|| (Scalar::one(), n.clone())))
    })?;
    Ok(AlgebraMap::new(source, target, map)?)
}

/// `(g∘f)_n = Σ_k Σ_{i₁+⋯+i_k=n} σ_n σ_k Π σ_{i_j} (−1)^{Σ_{a<b} i_b(i_a−1)} (g_{i₁}⊗⋯⊗g_{i_k}) f_k`.
pub fn compose_dcsh(g: &DCSHFamily, f: &DCSHFamily) -> Result<DCSHFamily> {
    let length = f.length().min(g.length());
    let window = f.window().min(g.window());
    let source = f.source.truncate_above(window)?;
    let mut components = Vec::with_capacity(length);
    for n in 1..=length {
        let module = tensor_power_module(g.target.complex(), n)?;
        let mut images = BTreeMap::new();
        for c in source.module().names() {
            let mut out = Element::zero();
            for k in 1..=n {
                let fk = f.apply(k, c);
                if fk.is_empty() {
                    continue;
                }
                for parts in compositions(n, k) {
                    let mut e: i64 = 0;
                    for b in 0..k {
                        for a in 0..b {
                            e += parts[b] as i64 * (parts[a] as i64 - 1);
                        }
                    }
                    let mut s = cobar_sign(n) * cobar_sign(k) * sign(e);
                    for &i in &parts {
                        s *= cobar_sign(i);
                    }
                    let maps: Vec<&GradedMap> = parts.iter().map(|&i| g.component(i)).collect();
                    for (p, coeff) in fk.iter() {
                        let factors = p.tensor_factors(k).expect("k-fold tensor");
                        if let Some(y) = factors.iter().find(|y| !g.source.module().contains(y)) {
                            return Err(if y.degree() > g.window() {
                                DcshError::Undetermined(format!("g is not known on `{y}`"))
                            } else {
                                DcshError::Mismatch(format!("`{y}` is not in the source of g"))
                            });
                        }
                        out.add_scaled(&ungroup(&tensor_apply(&maps, &factors), &parts), &(coeff * &s));
                    }
                }
            }
            images.insert(c.clone(), out);
        }
        components.push(GradedMap::new(source.module().clone(), module, n as i64 - 1, images)?);
    }
    DCSHFamily::new(source, g.target.clone(), components)
}

/// Extends `φ₁` to a family of the given length by solving the coherence
/// equation degree by degree, with `φ_k` valued in reduced tensors for `k ≥ 2`.
pub fn solve_family(source: &DGCoalgebra, target: &DGCoalgebra, first: &GradedMap, length: usize, window: i64) -> Result<DCSHFamily> {
    solve_family_with(source, target, first, length, window, SplitSign::Alternating)
}

pub(crate) fn solve_family_with(
    source: &DGCoalgebra,
    target: &DGCoalgebra,
    first: &GradedMap,
    length: usize,
    window: i64,
    split: SplitSign,
) -> Result<DCSHFamily> {
    let source = family_source(source, target, length, window)?;
    let ring = source.ring().clone();
    let mut components = vec![GradedMap::from_fn(source.module().clone(), target.module().clone(), 0, |c| first.image(c))?];
    for k in 2..=length {
        let module = tensor_power_module(target.complex(), k)?;
        let mut images: BTreeMap<Name, Element> = BTreeMap::new();
        for n in source.module().degrees().collect::<Vec<_>>() {
            let names: Vec<&Name> = source.module().basis(n).iter().filter(|c| c.degree() > 0).collect();
            if names.is_empty() {
                continue;
            }
            let top = n + k as i64 - 1;
            let cols: Vec<&Name> = module
                .basis(top)
                .iter()
                .filter(|p| p.tensor_factors(k).expect("k-fold tensor").iter().all(|y| y.degree() > 0))
                .collect();
            let rows = module.basis(top - 1);
            let mut m = SparseMatrix::zero(rows.len(), cols.len());
            for (j, p) in cols.iter().enumerate() {
                for (q, coeff) in tensor_d(target, &Element::basis((*p).clone()), k).iter() {
                    let i = module.index_of(q).ok_or_else(|| DcshError::Undetermined(format!("`{q}` is past the target window")))?;
                    m.add_to(i, j, coeff);
                }
            }
            for c in names {
                let mut rhs = coherence_rhs(&source, target, &components, k, c, split);
                let lower = source.d().image(c).linear(|y| images.get(y).cloned().unwrap_or_default());
                rhs.add_scaled(&lower, &-sign(k as i64));
                let b = module.coords(top - 1, &rhs);
                let x = exactlin::solve(&m, &b, &ring)?.ok_or(DcshError::Unsolvable { k, degree: n })?;
                let mut e = Element::zero();
                for (j, v) in x.iter().enumerate() {
                    e.add_term(cols[j].clone(), v);
                }
                images.insert(c.clone(), e.reduced(&ring));
            }
        }
        components.push(GradedMap::new(source.module().clone(), module, k as i64 - 1, images)?);
    }
    DCSHFamily::new(source, target.clone(), components)
}

/// Rows in reduced form: each kept row has a unit pivot, and every other kept
/// row vanishes in that column. Over the integers every pivot must be `±1`,
/// so the span is saturated and the quotient is free on the non-pivot columns.
fn reduce_relations(rows: Vec<BTreeMap<usize, Scalar>>, ring: &CoeffRing) -> Option<Vec<(usize, BTreeMap<usize, Scalar>)>> {
    let mut pivots: Vec<(usize, BTreeMap<usize, Scalar>)> = Vec::new();
    let mut pending = rows;
    loop {
        let mut stuck = Vec::new();
        let before = pivots.len();
        for mut r in pending {
            for (p, pr) in &pivots {
                if let Some(c) = r.get(p).cloned() {
                    for (j, v) in pr {
                        let e = r.entry(*j).or_default();
                        *e = ring.reduce(&(&*e - &c * v)).expect("reducible");
                    }
                }
            }
            r.retain(|_, v| !ring.is_zero(v));
            if r.is_empty() {
                continue;
            }
            let pick = r.iter().find(|(_, v)| if ring.is_field() { true } else { v.abs().is_one() }).map(|(j, v)| (*j, v.clone()));
            let Some((col, lead)) = pick else {
                stuck.push(r);
                continue;
            };
            let inv = ring.inv(&lead).expect("unit pivot");
            for v in r.values_mut() {
                *v = ring.reduce(&(&*v * &inv)).expect("reducible");
            }
            for (_, pr) in pivots.iter_mut() {
                if let Some(c) = pr.get(&col).cloned() {
                    for (j, v) in &r {
                        let e = pr.entry(*j).or_default();
                        *e = ring.reduce(&(&*e - &c * v)).expect("reducible");
                    }
                    pr.retain(|_, v| !ring.is_zero(v));
                }
            }
            pivots.push((col, r));
        }
        if stuck.is_empty() {
            return Some(pivots);
        }
        if pivots.len() == before {
            return None;
        }
        pending = stuck;
    }
}

/// Quotient of a complex by a subcomplex spanned by relations, on a basis of
/// non-pivot names.
#[derive(Clone, Debug)]
pub struct Coequalizer {
    pub complex: ChainComplex,
    /// `π` from the tensor complex onto the quotient.
    pub projection: GradedMap,
    /// Dimension of the relation span per degree.
    pub relation_ranks: BTreeMap<i64, usize>,
}

/// `M ⊗_H M′ = coker(ρ⊗1 − 1⊗λ)` for a right module coalgebra `M` and a left
/// one `M′`, through `max_degree`.
pub fn coequalizer(m: &ModuleCoalgebra, m2: &ModuleCoalgebra, max_degree: i64) -> Result<Coequalizer> {
    if m.side != Side::Right || m2.side != Side::Left {
        return Err(DcshError::Mismatch("expected a right and a left module coalgebra".into()));
    }
    if **m.hopf.module() != **m2.hopf.module() {
        return Err(DcshError::Mismatch("modules over different Hopf algebras".into()));
    }
    let ring = m.coalgebra.ring().clone();
    let tensor = ChainComplex::tensor(&[m.coalgebra.complex(), m2.coalgebra.complex()])?.truncate_above(max_degree)?;
    let tmod = tensor.module().clone();
    let hopf_names: Vec<&Name> = m.hopf.module().names().collect();
    let mut kept: Vec<Name> = Vec::new();
    let mut reductions: BTreeMap<i64, Vec<(usize, BTreeMap<usize, Scalar>)>> = BTreeMap::new();
    let mut relation_ranks = BTreeMap::new();
    for n in tmod.degrees().collect::<Vec<_>>() {
        let mut rows = Vec::new();
        for x in m.coalgebra.module().names() {
            for a in &hopf_names {
                if x.degree() + a.degree() > n {
                    break;
                }
                for y in m2.coalgebra.module().basis(n - x.degree() - a.degree()) {
                    let mut r = Element::tensor(&[&m.act(x, a), &Element::basis(y.clone())]);
                    r.sub(&Element::tensor(&[&Element::basis(x.clone()), &m2.act(y, a)]));
                    let v = tmod.coords(n, &r);
                    let row: BTreeMap<usize, Scalar> = v.into_iter().enumerate().filter(|(_, c)| !ring.is_zero(c)).collect();
                    if !row.is_empty() {
                        rows.push(row);
                    }
                }
            }
        }
        let red = reduce_relations(rows, &ring).ok_or(DcshError::NotFree(n))?;
        relation_ranks.insert(n, red.len());
        let pivots: Vec<usize> = red.iter().map(|(p, _)| *p).collect();
        kept.extend(tmod.basis(n).iter().enumerate().filter(|(j, _)| !pivots.contains(j)).map(|(_, q)| q.clone()));
        reductions.insert(n, red);
    }
    let qmod = Arc::new(FreeGradedModule::new(ring.clone(), kept)?);
    let projection = GradedMap::from_fn(tmod.clone(), qmod.clone(), 0, |w| {
        let n = w.degree();
        let j = tmod.index_of(w).expect("tensor name");
        if let Some((_, row)) = reductions[&n].iter().find(|(p, _)| *p == j) {
            // a pivot name equals minus the rest of its row modulo relations
            let mut e = Element::zero();
            for (c, v) in row {
                if *c != j {
                    e.add_term(tmod.basis(n)[*c].clone(), &-v.clone());
                }
            }
            e
        } else {
            Element::basis(w.clone())
        }
    })?;
    let d = GradedMap::from_fn(qmod.clone(), qmod.clone(), -1, |q| projection.apply(&tensor.differential().image(q)))?;
    let complex = ChainComplex::new(d, tensor.truncation())?;
    // relations must span a subcomplex
    for (&n, red) in &reductions {
        if !tensor.truncation().knows_differential(n) {
            continue;
        }
        for (_, row) in red {
            let r = Element::from_terms(row.iter().map(|(j, v)| (v.clone(), tmod.basis(n)[*j].clone())));
            if !projection.apply(&tensor.differential().apply(&r)).is_zero_in(&ring) {
                return Err(DcshError::Mismatch(format!("relations are not closed under d in degree {n}")));
            }
        }
    }
    Ok(Coequalizer { complex, projection, relation_ranks })
}

/// The chain map `φ⊗_θφ′: M⊗_H M′ → N⊗_K N′` induced by level one, with the
/// report of its verification.
#[derive(Clone, Debug)]
pub struct TensorOver {
    pub source: Coequalizer,
    pub target: Coequalizer,
    pub map: ChainMap,
    pub report: CheckReport,
}

pub fn tensor_over(phi: &DCSHModuleMap, phi2: &DCSHModuleMap) -> Result<TensorOver> {
    if phi.theta.family.component(1) != phi2.theta.family.component(1) {
        return Err(DcshError::Mismatch("the two module maps lie over different θ".into()));
    }
    let window = phi.family.window().min(phi2.family.window());
    let source = coequalizer(&phi.source, &phi2.source, window)?;
    let target = coequalizer(&phi.target, &phi2.target, window)?;
    let level_one = |w: &Name| {
        let f = w.tensor_factors(2).expect("binary tensor");
        let e = tensor_apply(&[phi.family.component(1), phi2.family.component(1)], &f);
        target.projection.apply(&e)
    };
    let map = GradedMap::from_fn(source.complex.module().clone(), target.complex.module().clone(), 0, level_one)?;
    let ring = map.ring().clone();
    let mut report = check_commutes(&map, &source.complex, &target.complex);
    report.check = "tensor over θ".into();
    for w in source.projection.source().names() {
        let lhs = map.apply(&source.projection.image(w));
        expect_equal(&mut report, "compatible with the projections", w, &lhs, &level_one(w), &ring);
    }
    let map = ChainMap::new(source.complex.clone(), target.complex.clone(), map)?;
    Ok(TensorOver { source, target, map, report })
}

/// `M′` free over `M` on the listed generators: the names `j(m)` and `v·h`
/// form a basis of `M′`, and each `D(v)` involves only earlier generators.
#[derive(Clone, Debug)]
pub struct SemifreeExtension {
    pub sub: DGModule,
    pub ext: DGModule,
    pub inclusion: GradedMap,
    pub generators: Vec<Name>,
}

/// Lifting data: `p: N → N′` with `pφ = φ′j`, all modules on the right and
/// `N`, `N′` over the target of `θ`.
#[derive(Clone, Debug)]
pub struct LiftProblem {
    pub extension: SemifreeExtension,
    pub cover: DGModule,
    pub base: DGModule,
    pub projection: GradedMap,
    pub restriction: GradedMap,
    pub extended: GradedMap,
    pub theta: AlgebraMap,
}

#[derive(Clone, Debug)]
pub struct Lift {
    pub omega: GradedMap,
    pub report: CheckReport,
}

/// Position of a name of `M′` in the decomposition `j(M) ⊕ V·H`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Part {
    Sub(Name),
    Free(usize, Name),
}

/// Builds `ω: M′ → N` generator by generator: a preimage `x` of `φ′(v)`,
/// corrected by `y ∈ ker p` with `Dy = Dx − ω(Dv)`, extended equivariantly.
pub fn lift_semifree(problem: &LiftProblem, max_degree: i64) -> Result<Lift> {
    let ext = &problem.extension;
    let (sub, big, cover) = (&ext.sub, &ext.ext, &problem.cover);
    if [sub.side, big.side, cover.side, problem.base.side].iter().any(|s| *s != Side::Right) {
        return Err(DcshError::Mismatch("lifting is implemented for right modules".into()));
    }
    let ring = big.complex.ring().clone();
    for (what, t) in [("extension", big.complex.truncation()), ("cover", cover.complex.truncation())] {
        if !t.bounded_above && t.max < max_degree {
            return Err(DcshError::Undetermined(format!("the {what} is only known through degree {}", t.max)));
        }
    }
    for m in sub.complex.module().names().filter(|m| m.degree() <= max_degree) {
        let lhs = problem.projection.apply(&problem.restriction.image(m));
        let rhs = problem.extended.apply(&ext.inclusion.image(m));
        if !lhs.equal_in(&rhs, &ring) {
            return Err(DcshError::Mismatch(format!("pφ ≠ φ′j at `{m}`")));
        }
    }
    let hopf = &sub.algebra;
    // decomposition of every name of M′ along j(M) ⊕ V·H
    let mut parts: BTreeMap<Name, Vec<(Part, Scalar)>> = BTreeMap::new();
    let bmod = big.complex.module();
    for n in bmod.degrees().filter(|n| *n <= max_degree).collect::<Vec<_>>() {
        let mut labels = Vec::new();
        let mut cols = Vec::new();
        for m in sub.complex.module().basis(n) {
            labels.push(Part::Sub(m.clone()));
            cols.push(bmod.coords(n, &ext.inclusion.image(m)));
        }
        for (i, v) in ext.generators.iter().enumerate() {
            if v.degree() > n {
                continue;
            }
            for h in hopf.module().basis(n - v.degree()) {
                labels.push(Part::Free(i, h.clone()));
                cols.push(bmod.coords(n, &big.act(v, h)));
            }
        }
        let dim = bmod.dim(n);
        if cols.len() != dim {
            return Err(DcshError::Mismatch(format!("M′ is not free over M on the generators in degree {n}")));
        }
        let mut b = SparseMatrix::zero(dim, dim);
        for (j, col) in cols.iter().enumerate() {
            for (i, c) in col.iter().enumerate() {
                b.add_to(i, j, c);
            }
        }
        for (i, e) in bmod.basis(n).iter().enumerate() {
            let mut unit = vec![Scalar::from_integer(0.into()); dim];
            unit[i] = Scalar::one();
            let x = exactlin::solve(&b, &unit, &ring)?
                .ok_or_else(|| DcshError::Mismatch(format!("M′ is not free over M on the generators in degree {n}")))?;
            let terms = labels.iter().cloned().zip(x).filter(|(_, c)| !ring.is_zero(c)).collect();
            parts.insert(e.clone(), terms);
        }
    }
    let mut gen_images: Vec<Option<Element>> = vec![None; ext.generators.len()];
    let omega_of = |x: &Element, gen_images: &[Option<Element>]| -> Result<Element> {
        let mut out = Element::zero();
        for (e, c) in x.iter() {
            let terms = parts.get(e).ok_or_else(|| DcshError::Undetermined(format!("`{e}` is past the window")))?;
            for (part, k) in terms {
                let v = match part {
                    Part::Sub(m) => problem.restriction.image(m),
                    Part::Free(i, h) => {
                        let w = gen_images[*i]
                            .as_ref()
                            .ok_or_else(|| DcshError::Mismatch(format!("generator `{}` is needed before it is lifted", ext.generators[*i])))?;
                        cover.act_elements(w, &problem.theta.map.image(h))
                    }
                };
                out.add_scaled(&v, &(c * k));
            }
        }
        Ok(out.reduced(&ring))
    };
    let nmod = cover.complex.module();
    for (i, v) in ext.generators.iter().enumerate() {
        let n = v.degree();
        if n > max_degree {
            continue;
        }
        let p = problem.projection.matrix_at(n);
        let target = problem.base.complex.module().coords(n, &problem.extended.image(v));
        let x = exactlin::solve(&p, &target, &ring)?.ok_or(DcshError::NotSurjective(n))?;
        let x = nmod.element_from(n, &x);
        let mut z = cover.complex.differential().apply(&x);
        z.sub(&omega_of(&big.complex.differential().image(v), &gen_images)?);
        let kernel = exactlin::kernel_basis(&p, &ring)?;
        let dn = cover.complex.differential().matrix_at(n);
        let mut dk = SparseMatrix::zero(dn.rows(), kernel.len());
        for (j, k) in kernel.iter().enumerate() {
            for (r, c) in dn.mul_vec(k)?.iter().enumerate() {
                dk.add_to(r, j, c);
            }
        }
        let coeffs =
            exactlin::solve(&dk, &nmod.coords(n - 1, &z), &ring)?.ok_or(DcshError::KernelNotAcyclic(n))?;
        let mut w = x;
        for (k, c) in kernel.iter().zip(&coeffs) {
            w.add_scaled(&nmod.element_from(n, k), &-c.clone());
        }
        gen_images[i] = Some(w.reduced(&ring));
    }
    let domain = Arc::new(bmod.restrict(|d| d <= max_degree));
    let mut images = BTreeMap::new();
    for e in domain.names() {
        images.insert(e.clone(), omega_of(&Element::basis(e.clone()), &gen_images)?);
    }
    let omega = GradedMap::new(domain.clone(), nmod.clone(), 0, images)?;
    let report = verify_lift(problem, &omega, max_degree);
    if !report.passed() {
        return Err(DcshError::Verification(report.to_string()));
    }
    Ok(Lift { omega, report })
}

/// `pω = φ′`, `ωj = φ`, `Dω = ωD` and `ω(x·a) = ω(x)·θ(a)` on the window.
pub fn verify_lift(problem: &LiftProblem, omega: &GradedMap, max_degree: i64) -> CheckReport {
    let ext = &problem.extension;
    let ring = omega.ring().clone();
    let mut report = CheckReport::new("lift").with_window(0, max_degree);
    let dom: Vec<&Name> = omega.source().names().filter(|e| e.degree() <= max_degree).collect();
    for e in &dom {
        let lhs = problem.projection.apply(&omega.image(e));
        expect_equal(&mut report, "pω = φ′", e, &lhs, &problem.extended.image(e), &ring);
        let de = ext.ext.complex.differential().image(e);
        let lhs = problem.cover.complex.differential().apply(&omega.image(e));
        expect_equal(&mut report, "Dω = ωD", e, &lhs, &omega.apply(&de), &ring);
        for a in ext.ext.algebra.module().names() {
            if e.degree() + a.degree() > max_degree {
                break;
            }
            let lhs = omega.apply(&ext.ext.act(e, a));
            let rhs = problem.cover.act_elements(&omega.image(e), &problem.theta.map.image(a));
            expect_equal(&mut report, "ω is equivariant", format!("{e}, {a}"), &lhs, &rhs, &ring);
        }
    }
    for m in ext.sub.complex.module().names().filter(|m| m.degree() <= max_degree) {
        let lhs = omega.apply(&ext.inclusion.image(m));
        expect_equal(&mut report, "ωj = φ", m, &lhs, &problem.restriction.image(m), &ring);
    }
    report
}
