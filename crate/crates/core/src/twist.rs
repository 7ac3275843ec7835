//! Twisting cochains, DG modules and comodules, twisted tensor products in
//! both orientations, and the acyclic bar and cobar constructions.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use thiserror::Error;

use crate::barcobar::{self, BarCobarError};
use crate::chaincx::{tensor_truncation, ChainComplex, ChainError};
use crate::dgstruct::{
    AlgebraMap, CoalgebraMap, DGAlgebra, DGCoalgebra, DgError, ModuleCoalgebra, Side,
};
use crate::exactlin::Scalar;
use crate::graded::{sign, Element, FreeGradedModule, GradedError, GradedMap, Name};
use crate::report::CheckReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TwistError {
    #[error("a twisting cochain must have degree -1, found {0}")]
    WrongDegree(i64),
    #[error("modules do not match: {0}")]
    ModuleMismatch(String),
    #[error("input axioms fail: {0}")]
    AxiomFailure(String),
    #[error(transparent)]
    BarCobar(#[from] BarCobarError),
    #[error(transparent)]
    Dg(#[from] DgError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

pub type Result<T> = std::result::Result<T, TwistError>;

/// Degree −1 map `t: C → A` with `dt + td = m(t⊗t)Δ`.
#[derive(Clone, Debug)]
pub struct TwistingCochain {
    pub source: DGCoalgebra,
    pub target: DGAlgebra,
    pub map: GradedMap,
}

impl TwistingCochain {
    /// Wraps a candidate without checking the twisting condition.
    pub fn new(source: DGCoalgebra, target: DGAlgebra, map: GradedMap) -> Result<Self> {
        if map.degree() != -1 {
            return Err(TwistError::WrongDegree(map.degree()));
        }
        if **map.source() != **source.module() || **map.target() != **target.module() {
            return Err(TwistError::ModuleMismatch("cochain must map the coalgebra into the algebra".into()));
        }
        Ok(TwistingCochain { source, target, map })
    }

    pub fn from_fn(source: DGCoalgebra, target: DGAlgebra, f: impl FnMut(&Name) -> Element) -> Result<Self> {
        let map = GradedMap::from_fn(source.module().clone(), target.module().clone(), -1, f)?;
        Self::new(source, target, map)
    }

    pub fn zero(source: DGCoalgebra, target: DGAlgebra) -> Self {
        let map = GradedMap::zero(source.module().clone(), target.module().clone(), -1);
        TwistingCochain { source, target, map }
    }

    pub fn apply(&self, c: &Name) -> Element {
        self.map.image(c)
    }

    /// Highest source degree whose image and its differential are known.
    pub fn known_up_to(&self) -> i64 {
        let ta = self.target.truncation();
        let a_max = if ta.bounded_above { i64::MAX } else { ta.max };
        self.source.max_degree().min(a_max.saturating_add(1))
    }
}

/// Checks `d_A t(c) + t(d c) = Σ (−1)^{|c′|} t(c′) t(c″)` over `Δc = Σ c′⊗c″`,
/// together with `ε t = 0` and `t η = 0`.
pub fn check_twisting_cochain(t: &TwistingCochain) -> CheckReport {
    let ring = t.source.ring().clone();
    let top = t.known_up_to();
    let mut report = CheckReport::new("twisting cochain").with_window(t.source.truncation().min, top);
    for c in t.source.module().names() {
        if c.degree() > top {
            continue;
        }
        let tc = t.apply(c);
        let mut lhs = t.target.d().apply(&tc);
        if t.source.truncation().knows_differential(c.degree()) {
            lhs.add(&t.map.apply(&t.source.d().image(c)));
        }
        let mut rhs = Element::zero();
        for (n, k) in t.source.delta(c).iter() {
            let f = n.tensor_factors(2).expect("binary tensor");
            let s = sign(f[0].degree()) * k;
            rhs.add_scaled(&t.target.mul(&t.apply(f[0]), &t.apply(f[1])), &s);
        }
        report.tick();
        if !lhs.equal_in(&rhs, &ring) {
            let mut r = lhs;
            r.sub(&rhs);
            report.fail("dt + td = m(t⊗t)Δ", c, r.reduced(&ring));
        }
        let aug: Scalar = tc.iter().map(|(n, k)| k * t.target.augmentation_value(n)).sum();
        report.tick();
        if !ring.is_zero(&aug) {
            report.fail("augmentation kills t", c, aug);
        }
    }
    if let Some(u) = t.source.unit() {
        report.tick();
        if !t.apply(u).is_zero_in(&ring) {
            report.fail("t vanishes on the coaugmentation", u, t.apply(u));
        }
    }
    report
}

/// DG module over an algebra, with its action tabulated on basis pairs.
#[derive(Clone, Debug)]
pub struct DGModule {
    pub complex: ChainComplex,
    pub algebra: DGAlgebra,
    pub side: Side,
    action: BTreeMap<(Name, Name), Element>,
}

impl DGModule {
    /// `act(m, a)` is `m·a` for a right module and `a·m` for a left one.
    pub fn build(
        complex: ChainComplex,
        algebra: DGAlgebra,
        side: Side,
        mut act: impl FnMut(&Name, &Name) -> Element,
    ) -> Result<Self> {
        let max = complex.truncation().max;
        let mut action = BTreeMap::new();
        for m in complex.module().names() {
            for a in algebra.module().names() {
                if m.degree() + a.degree() > max {
                    break;
                }
                let e = act(m, a);
                if let Some((n, _)) = e.iter().find(|(n, _)| !complex.module().contains(n)) {
                    return Err(TwistError::ModuleMismatch(format!("action value `{n}` is not in the module")));
                }
                if !e.is_empty() {
                    action.insert((m.clone(), a.clone()), e);
                }
            }
        }
        Ok(DGModule { complex, algebra, side, action })
    }

    /// The algebra acting on itself by multiplication.
    pub fn regular(a: &DGAlgebra, side: Side) -> Result<Self> {
        Self::build(a.complex().clone(), a.clone(), side, |m, x| match side {
            Side::Right => a.product(m, x),
            Side::Left => a.product(x, m),
        })
    }

    pub fn from_module_coalgebra(m: &ModuleCoalgebra) -> Result<Self> {
        Self::build(m.coalgebra.complex().clone(), m.hopf.algebra.clone(), m.side, |x, a| m.act(x, a))
    }

    /// The ground ring as a module through the augmentation.
    pub fn trivial(a: &DGAlgebra, side: Side, unit: Name) -> Result<Self> {
        let module = Arc::new(FreeGradedModule::ground(a.ring().clone(), unit.clone()));
        let complex = ChainComplex::zero_differential(module, crate::chaincx::Truncation::exact(0, 0))?;
        Self::build(complex, a.clone(), side, |m, x| Element::term(a.augmentation_value(x), m.clone()))
    }

    pub fn act(&self, m: &Name, a: &Name) -> Element {
        self.action.get(&(m.clone(), a.clone())).cloned().unwrap_or_default()
    }

    pub fn act_elements(&self, x: &Element, a: &Element) -> Element {
        let mut out = Element::zero();
        for (m, c) in x.iter() {
            for (n, e) in a.iter() {
                out.add_scaled(&self.act(m, n), &(c * e));
            }
        }
        out
    }
}

pub fn check_module(m: &DGModule) -> CheckReport {
    let ring = m.complex.ring().clone();
    let max = m.complex.truncation().max;
    let mut report = m.complex.verify_differential();
    report.check = "module".into();
    let alg = &m.algebra;
    for x in m.complex.module().names() {
        let xe = Element::basis(x.clone());
        report.tick();
        if !m.act_elements(&xe, alg.unit()).equal_in(&xe, &ring) {
            report.fail("unit acts trivially", x, m.act_elements(&xe, alg.unit()));
        }
        for a in alg.module().names() {
            if x.degree() + a.degree() > max {
                break;
            }
            let ae = Element::basis(a.clone());
            let xa = m.act(x, a);
            if m.complex.truncation().knows_differential(x.degree() + a.degree()) {
                let lhs = m.complex.differential().apply(&xa);
                let (dx, da) = (m.complex.differential().image(x), alg.d().image(a));
                let mut rhs = Element::zero();
                match m.side {
                    Side::Right => {
                        rhs.add(&m.act_elements(&dx, &ae));
                        rhs.add_scaled(&m.act_elements(&xe, &da), &sign(x.degree()));
                    }
                    Side::Left => {
                        rhs.add(&m.act_elements(&xe, &da));
                        rhs.add_scaled(&m.act_elements(&dx, &ae), &sign(a.degree()));
                    }
                }
                report.tick();
                if !lhs.equal_in(&rhs, &ring) {
                    report.fail("action is a chain map", format!("{x}, {a}"), lhs);
                }
            }
            for b in alg.module().names() {
                if x.degree() + a.degree() + b.degree() > max {
                    break;
                }
                let be = Element::basis(b.clone());
                let lhs = m.act_elements(&xa, &be);
                let rhs = match m.side {
                    Side::Right => m.act_elements(&xe, &alg.product(a, b)),
                    Side::Left => m.act_elements(&xe, &alg.product(b, a)),
                };
                report.tick();
                if !lhs.equal_in(&rhs, &ring) {
                    report.fail("action is associative", format!("{x}, {a}, {b}"), lhs);
                }
            }
        }
    }
    report
}

/// DG comodule over a coalgebra. A left coaction takes values in
/// `Tensor([c, n])`, a right one in `Tensor([n, c])`.
#[derive(Clone, Debug)]
pub struct DGComodule {
    pub complex: ChainComplex,
    pub coalgebra: DGCoalgebra,
    pub side: Side,
    coaction: BTreeMap<Name, Element>,
}

impl DGComodule {
    pub fn build(
        complex: ChainComplex,
        coalgebra: DGCoalgebra,
        side: Side,
        mut coact: impl FnMut(&Name) -> Element,
    ) -> Result<Self> {
        let coaction = complex.module().names().map(|n| (n.clone(), coact(n))).collect();
        Ok(DGComodule { complex, coalgebra, side, coaction })
    }

    /// The coalgebra coacting on itself through its comultiplication.
    pub fn regular(c: &DGCoalgebra, side: Side) -> Result<Self> {
        Self::build(c.complex().clone(), c.clone(), side, |n| c.delta(n))
    }

    pub fn coact(&self, n: &Name) -> Element {
        self.coaction.get(n).cloned().unwrap_or_default()
    }
}

pub fn check_comodule(n: &DGComodule) -> CheckReport {
    let ring = n.complex.ring().clone();
    let mut report = n.complex.verify_differential();
    report.check = "comodule".into();
    let c = &n.coalgebra;
    let (cpos, npos) = match n.side {
        Side::Left => (0, 1),
        Side::Right => (1, 0),
    };
    for x in n.complex.module().names() {
        let e = n.coact(x);
        // coassociativity: (Δ⊗1)λ = (1⊗λ)λ for left, (ρ⊗1)ρ = (1⊗Δ)ρ for right
        let lhs = crate::graded::apply_at(&e, 2, cpos, 0, 2, |y| c.delta(y));
        let rhs = crate::graded::apply_at(&e, 2, npos, 0, 2, |y| n.coact(y));
        report.tick();
        if !lhs.equal_in(&rhs, &ring) {
            report.fail("coaction is coassociative", x, lhs);
        }
        let counit = crate::graded::apply_at(&e, 2, cpos, 0, 0, |y| c.counit_element(y));
        report.tick();
        if !counit.equal_in(&Element::basis(x.clone()), &ring) {
            report.fail("coaction is counital", x, counit);
        }
        if n.complex.truncation().knows_differential(x.degree()) {
            let lhs = n.coact_apply(&n.complex.differential().image(x));
            let mut rhs = crate::graded::apply_at(&e, 2, 0, -1, 1, |y| side_d(n, cpos, 0, y));
            rhs.add(&crate::graded::apply_at(&e, 2, 1, -1, 1, |y| side_d(n, cpos, 1, y)));
            report.tick();
            if !lhs.equal_in(&rhs, &ring) {
                report.fail("coaction is a chain map", x, lhs);
            }
        }
    }
    report
}

fn side_d(n: &DGComodule, cpos: usize, pos: usize, y: &Name) -> Element {
    if pos == cpos {
        n.coalgebra.d().image(y)
    } else {
        n.complex.differential().image(y)
    }
}

impl DGComodule {
    fn coact_apply(&self, x: &Element) -> Element {
        x.linear(|n| self.coact(n))
    }
}

/// `M ⊗_t N` for a right `A`-module `M` and a left `C`-comodule `N`, with
/// `D(m⊗n) = dm⊗n + (−1)^{|m|} m⊗dn + Σ (−1)^{|m|} (m·t(c))⊗n′` over `λn = Σ c⊗n′`.
pub fn twisted_tensor_right_left(m: &DGModule, t: &TwistingCochain, n: &DGComodule) -> Result<ChainComplex> {
    if m.side != Side::Right || n.side != Side::Left {
        return Err(TwistError::ModuleMismatch("expected a right module and a left comodule".into()));
    }
    let truncation = tensor_truncation(&[m.complex.truncation(), n.complex.truncation()]);
    let module = Arc::new(FreeGradedModule::tensor(&[m.complex.module(), n.complex.module()], |d| truncation.contains(d))?);
    let d = GradedMap::from_fn(module.clone(), module.clone(), -1, |x| {
        let f = x.tensor_factors(2).expect("binary tensor");
        let (a, b) = (f[0], f[1]);
        let s = sign(a.degree());
        let mut e = Element::tensor(&[&m.complex.differential().image(a), &Element::basis(b.clone())]);
        e.add_scaled(&Element::tensor(&[&Element::basis(a.clone()), &n.complex.differential().image(b)]), &s);
        for (p, k) in n.coact(b).iter() {
            let g = p.tensor_factors(2).expect("binary coaction");
            let twisted = m.act_elements(&Element::basis(a.clone()), &t.apply(g[0]));
            e.add_scaled(&Element::tensor(&[&twisted, &Element::basis(g[1].clone())]), &(&s * k));
        }
        e.map_names(|y| module.contains(y).then(|| (Scalar::one(), y.clone())))
    })?;
    Ok(ChainComplex::new(d, truncation)?)
}

/// `N ⊗_t M` for a right `C`-comodule `N` and a left `A`-module `M`, with
/// `D(n⊗m) = dn⊗m + (−1)^{|n|} n⊗dm − Σ (−1)^{|n_i|} n_i ⊗ t(c^i)·m` over `ρn = Σ n_i⊗c^i`.
pub fn twisted_tensor_left_right(n: &DGComodule, t: &TwistingCochain, m: &DGModule) -> Result<ChainComplex> {
    if m.side != Side::Left || n.side != Side::Right {
        return Err(TwistError::ModuleMismatch("expected a right comodule and a left module".into()));
    }
    let truncation = tensor_truncation(&[n.complex.truncation(), m.complex.truncation()]);
    let module = Arc::new(FreeGradedModule::tensor(&[n.complex.module(), m.complex.module()], |d| truncation.contains(d))?);
    let d = GradedMap::from_fn(module.clone(), module.clone(), -1, |x| {
        let f = x.tensor_factors(2).expect("binary tensor");
        let (a, b) = (f[0], f[1]);
        let mut e = Element::tensor(&[&n.complex.differential().image(a), &Element::basis(b.clone())]);
        e.add_scaled(&Element::tensor(&[&Element::basis(a.clone()), &m.complex.differential().image(b)]), &sign(a.degree()));
        for (p, k) in n.coact(a).iter() {
            let g = p.tensor_factors(2).expect("binary coaction");
            let twisted = m.act_elements(&Element::basis(b.clone()), &t.apply(g[1]));
            let s = -sign(g[0].degree()) * k;
            e.add_scaled(&Element::tensor(&[&Element::basis(g[0].clone()), &twisted]), &s);
        }
        e.map_names(|y| module.contains(y).then(|| (Scalar::one(), y.clone())))
    })?;
    Ok(ChainComplex::new(d, truncation)?)
}

/// `C ⊗_{t_Ω} ΩC` (`ΩC ⊗_{t_Ω} C` when `side` is `Right`, meaning the algebra on the left).
pub fn acyclic_cobar(c: &DGCoalgebra, max_degree: i64, algebra_side: Side) -> Result<ChainComplex> {
    let t = barcobar::universal_cochain(c, max_degree)?;
    match algebra_side {
        Side::Left => {
            let n = DGComodule::regular(&t.source, Side::Right)?;
            let m = DGModule::regular(&t.target, Side::Left)?;
            twisted_tensor_left_right(&n, &t, &m)
        }
        Side::Right => {
            let m = DGModule::regular(&t.target, Side::Right)?;
            let n = DGComodule::regular(&t.source, Side::Left)?;
            twisted_tensor_right_left(&m, &t, &n)
        }
    }
}

/// `A ⊗_{t_Bar} BarA` (`BarA ⊗_{t_Bar} A` when `algebra_side` is `Right`).
pub fn acyclic_bar(a: &DGAlgebra, max_degree: i64, algebra_side: Side) -> Result<ChainComplex> {
    let t = barcobar::couniversal_cochain(a, max_degree)?;
    match algebra_side {
        Side::Left => {
            let m = DGModule::regular(a, Side::Right)?;
            let n = DGComodule::regular(&t.source, Side::Left)?;
            twisted_tensor_right_left(&m, &t, &n)
        }
        Side::Right => {
            let n = DGComodule::regular(&t.source, Side::Right)?;
            let m = DGModule::regular(a, Side::Left)?;
            twisted_tensor_left_right(&n, &t, &m)
        }
    }
}

/// Right `A`-module structure on a complex spanned by `n⊗a` with `a ∈ A`,
/// acting by multiplication on the second factor.
fn multiplied_on_right(complex: ChainComplex, algebra: &DGAlgebra) -> Result<DGModule> {
    let module = complex.module().clone();
    DGModule::build(complex, algebra.clone(), Side::Right, |x, u| {
        let f = x.tensor_factors(2).expect("binary tensor");
        let e = Element::tensor(&[&Element::basis(f[0].clone()), &algebra.product(f[1], u)]);
        e.map_names(|y| module.contains(y).then(|| (Scalar::one(), y.clone())))
    })
}

/// `C ⊗_{t_Ω} ΩC` as a right `ΩC`-module.
pub fn acyclic_cobar_module(c: &DGCoalgebra, max_degree: i64) -> Result<DGModule> {
    let algebra = barcobar::cobar(c, max_degree)?;
    multiplied_on_right(acyclic_cobar(c, max_degree, Side::Left)?, &algebra)
}

/// `BarA ⊗_{t_Bar} A` as a right `A`-module.
pub fn acyclic_bar_module(a: &DGAlgebra, max_degree: i64) -> Result<DGModule> {
    multiplied_on_right(acyclic_bar(a, max_degree, Side::Right)?, a)
}

/// `f∘t∘g: C′ → A′`.
pub fn push_cochain(f: &AlgebraMap, t: &TwistingCochain, g: &CoalgebraMap) -> Result<TwistingCochain> {
    let map = f.map.compose(&t.map.compose(&g.map)?)?;
    TwistingCochain::new(g.source.clone(), f.target.clone(), map)
}

/// The algebra map `α_t: ΩC → A` with `α_t(s⁻¹c₁|⋯|s⁻¹cₙ) = t(c₁)⋯t(cₙ)`.
pub fn alpha(t: &TwistingCochain, cobar: &DGAlgebra) -> Result<AlgebraMap> {
    let map = GradedMap::from_fn(cobar.module().clone(), t.target.module().clone(), 0, |w| {
        let letters = w.word_letters().expect("cobar word");
        let images: Vec<Element> = letters.iter().map(|l| t.apply(barcobar::unletter(l))).collect();
        let e = t.target.mul_all(&images);
        e.map_names(|n| t.target.module().contains(n).then(|| (Scalar::one(), n.clone())))
    })?;
    Ok(AlgebraMap::new(cobar.clone(), t.target.clone(), map)?)
}

/// The coalgebra map `β_t: C → BarA`, `c ↦ Σₙ (s t)^{⊗n} Δ̄^{(n)} c`.
pub fn beta(t: &TwistingCochain, bar: &DGCoalgebra) -> Result<CoalgebraMap> {
    let unit = bar.unit().cloned().expect("bar has a coaugmentation");
    let max = bar.max_degree();
    let source = t.source.truncate_above(max)?;
    let map = GradedMap::from_fn(source.module().clone(), bar.module().clone(), 0, |c| {
        if c.degree() == 0 {
            return Element::term(source.counit_value(c), unit.clone());
        }
        let mut out = Element::zero();
        for n in 1..=c.degree().max(0) as usize {
            let iter = t.source.iterated_reduced_delta(c, n);
            if iter.is_empty() {
                break;
            }
            for (p, k) in iter.iter() {
                let factors = p.tensor_factors(n).expect("iterated diagonal");
                let letters: Vec<Element> = factors
                    .iter()
                    .map(|x| t.apply(x).map_names(|a| Some((Scalar::one(), barcobar::bar_letter(a)))))
                    .collect();
                let refs: Vec<&Element> = letters.iter().collect();
                let word = Element::tensor(&refs).map_names(|m| Some((Scalar::one(), Name::word(m.flatten_tensor()))));
                out.add_scaled(&word, k);
            }
        }
        out.map_names(|m| bar.module().contains(m).then(|| (Scalar::one(), m.clone())))
    })?;
    Ok(CoalgebraMap::new(source, bar.clone(), map)?)
}

/// Twisting cochain checked on construction.
pub fn checked(t: TwistingCochain) -> Result<TwistingCochain> {
    let r = check_twisting_cochain(&t);
    if r.passed() {
        Ok(t)
    } else {
        Err(TwistError::AxiomFailure(r.to_string()))
    }
}
