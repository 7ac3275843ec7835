//! Differential graded algebras, coalgebras, Hopf algebras and module
//! coalgebras, with degreewise axiom checkers; divided powers and duals.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::chaincx::{tensor_truncation, ChainComplex, ChainError, Truncation};
use crate::exactlin::{scalar_from_bigint, CoeffRing, Scalar};
use crate::graded::{apply_at, permute_factors, sign, Element, FreeGradedModule, GradedError, GradedMap, Name};
use crate::report::CheckReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DgError {
    #[error("not connected: {0}")]
    NotConnected(String),
    #[error("not 1-connected: {0}")]
    NotOneConnected(String),
    #[error("malformed structure: {0}")]
    Malformed(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

pub type Result<T> = std::result::Result<T, DgError>;

fn scalar_name() -> Name {
    Name::Tensor(Vec::new())
}

/// The `k`-fold tensor module of a complex, on the window where it is known.
pub fn tensor_power_module(c: &ChainComplex, k: usize) -> Result<Arc<FreeGradedModule>> {
    let t = tensor_truncation(&vec![c.truncation(); k.max(1)]);
    Ok(Arc::new(c.module().tensor_power(k, |m| t.contains(m))?))
}

#[derive(Clone, Debug)]
pub struct DGCoalgebra {
    complex: ChainComplex,
    comult: GradedMap,
    counit: BTreeMap<Name, Scalar>,
    coaugmentation: Option<Name>,
}

impl DGCoalgebra {
    pub fn new(
        complex: ChainComplex,
        comult: GradedMap,
        counit: BTreeMap<Name, Scalar>,
        coaugmentation: Option<Name>,
    ) -> Result<Self> {
        if **comult.source() != **complex.module() || comult.degree() != 0 {
            return Err(DgError::Malformed("comultiplication must be a degree 0 map out of the carrier".into()));
        }
        if let Some(n) = counit.keys().find(|n| !complex.module().contains(n) || n.degree() != 0) {
            return Err(DgError::Malformed(format!("counit is defined on `{n}`, not a degree 0 basis element")));
        }
        if let Some(u) = &coaugmentation {
            if !complex.module().contains(u) || u.degree() != 0 {
                return Err(DgError::Malformed(format!("coaugmentation `{u}` is not a degree 0 basis element")));
            }
        }
        Ok(DGCoalgebra { complex, comult, counit, coaugmentation })
    }

    /// Builds the comultiplication from its values on basis names.
    pub fn build(
        complex: ChainComplex,
        delta: impl FnMut(&Name) -> Element,
        counit: BTreeMap<Name, Scalar>,
        coaugmentation: Option<Name>,
    ) -> Result<Self> {
        let target = tensor_power_module(&complex, 2)?;
        let comult = GradedMap::from_fn(complex.module().clone(), target, 0, delta)?;
        Self::new(complex, comult, counit, coaugmentation)
    }

    /// Connected coalgebra with counit and coaugmentation at `unit`.
    pub fn connected(complex: ChainComplex, delta: impl FnMut(&Name) -> Element, unit: Name) -> Result<Self> {
        let counit = [(unit.clone(), Scalar::one())].into_iter().collect();
        let c = Self::build(complex, delta, counit, Some(unit))?;
        c.require_connected()?;
        Ok(c)
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn module(&self) -> &Arc<FreeGradedModule> {
        self.complex.module()
    }

    pub fn ring(&self) -> &CoeffRing {
        self.complex.ring()
    }

    pub fn d(&self) -> &GradedMap {
        self.complex.differential()
    }

    pub fn comult(&self) -> &GradedMap {
        &self.comult
    }

    pub fn truncation(&self) -> Truncation {
        self.complex.truncation()
    }

    pub fn max_degree(&self) -> i64 {
        self.truncation().max
    }

    pub fn delta(&self, c: &Name) -> Element {
        self.comult.image(c)
    }

    pub fn counit_value(&self, c: &Name) -> Scalar {
        self.counit.get(c).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn counit_map(&self) -> &BTreeMap<Name, Scalar> {
        &self.counit
    }

    /// Counit as a map into `Tensor([])`-named scalars.
    pub fn counit_element(&self, c: &Name) -> Element {
        Element::term(self.counit_value(c), scalar_name())
    }

    pub fn unit(&self) -> Option<&Name> {
        self.coaugmentation.as_ref()
    }

    /// Positive-degree basis, the reduced part of a connected coalgebra.
    pub fn positive_basis(&self) -> impl Iterator<Item = &Name> {
        self.module().names().filter(|n| n.degree() > 0)
    }

    /// `Δ̄c = Δc − c⊗1 − 1⊗c` for `c` of positive degree; zero on the unit.
    pub fn reduced_delta(&self, c: &Name) -> Element {
        let Some(u) = self.unit() else { return self.delta(c) };
        if c == u || c.degree() == 0 {
            return Element::zero();
        }
        let mut e = self.delta(c);
        e.sub(&Element::basis(Name::tensor(vec![c.clone(), u.clone()])));
        e.sub(&Element::basis(Name::tensor(vec![u.clone(), c.clone()])));
        e
    }

    /// `Δ̄^{(n)} c` into `n`-fold tensors; `Δ̄^{(1)} = id`.
    pub fn iterated_reduced_delta(&self, c: &Name, n: usize) -> Element {
        assert!(n >= 1);
        let mut e = Element::basis(c.clone());
        for k in 1..n {
            e = apply_at(&e, k, 0, 0, 2, |x| self.reduced_delta(x));
        }
        e
    }

    /// `Δ^{(n)} c` into `n`-fold tensors; `Δ^{(0)} = ε`, `Δ^{(1)} = id`.
    pub fn iterated_delta(&self, c: &Name, n: usize) -> Element {
        if n == 0 {
            return self.counit_element(c);
        }
        let mut e = Element::basis(c.clone());
        for k in 1..n {
            e = apply_at(&e, k, 0, 0, 2, |x| self.delta(x));
        }
        e
    }

    pub fn is_connected(&self) -> bool {
        let Some(u) = self.unit() else { return false };
        self.module().min_degree().is_none_or(|m| m >= 0) && self.module().basis(0) == std::slice::from_ref(u)
    }

    pub fn is_one_connected(&self) -> bool {
        self.is_connected() && self.module().dim(1) == 0
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(DgError::NotConnected("degree 0 must be spanned by the coaugmentation".into()))
        }
    }

    pub fn require_one_connected(&self) -> Result<()> {
        if self.is_one_connected() {
            Ok(())
        } else {
            Err(DgError::NotOneConnected("degree 0 must be the ground ring and degree 1 must vanish".into()))
        }
    }

    /// Same structure over another coefficient ring.
    pub fn over_ring(&self, ring: &CoeffRing) -> Result<Self> {
        let complex = ChainComplex::new(self.d().over_ring(ring), self.truncation())?;
        let comult = GradedMap::new(
            complex.module().clone(),
            Arc::new(self.comult.target().with_ring(ring.clone())),
            0,
            self.comult.images().map(|(n, e)| (n.clone(), e.reduced(ring))).collect(),
        )?;
        Self::new(complex, comult, self.counit.clone(), self.coaugmentation.clone())
    }

    /// Forgets everything above `max`.
    pub fn truncate_above(&self, max: i64) -> Result<Self> {
        let complex = self.complex.truncate_above(max)?;
        if complex == self.complex {
            return Ok(self.clone());
        }
        let target = tensor_power_module(&complex, 2)?;
        let comult = GradedMap::from_fn(complex.module().clone(), target, 0, |n| self.delta(n))?;
        let counit = self.counit.iter().filter(|(n, _)| complex.module().contains(n)).map(|(n, v)| (n.clone(), v.clone())).collect();
        Self::new(complex, comult, counit, self.coaugmentation.clone())
    }

    /// `C ⊗ C′` with `Δ(c⊗c′) = Σ (−1)^{|c^i||c′_j|} (c_i⊗c′_j)⊗(c^i⊗c′^j)`.
    pub fn tensor(&self, other: &DGCoalgebra) -> Result<DGCoalgebra> {
        let complex = ChainComplex::tensor(&[&self.complex, &other.complex])?;
        let counit = complex
            .module()
            .basis(0)
            .iter()
            .filter_map(|n| {
                let f = n.tensor_factors(2)?;
                let v = self.counit_value(f[0]) * other.counit_value(f[1]);
                (!v.is_zero()).then(|| (n.clone(), v))
            })
            .collect();
        let unit = match (self.unit(), other.unit()) {
            (Some(a), Some(b)) => Some(Name::tensor(vec![a.clone(), b.clone()])),
            _ => None,
        };
        let delta = |n: &Name| {
            let f = n.tensor_factors(2).expect("binary tensor");
            let both = Element::tensor(&[&self.delta(f[0]), &other.delta(f[1])]);
            let flat = crate::graded::ungroup(&both, &[2, 2]);
            crate::graded::regroup(&permute_factors(&flat, 4, &[0, 2, 1, 3]), &[2, 2])
        };
        Self::build(complex, delta, counit, unit)
    }
}

#[derive(Clone, Debug)]
pub struct DGAlgebra {
    complex: ChainComplex,
    mult: GradedMap,
    unit: Element,
    augmentation: BTreeMap<Name, Scalar>,
}

impl DGAlgebra {
    pub fn new(complex: ChainComplex, mult: GradedMap, unit: Element, augmentation: BTreeMap<Name, Scalar>) -> Result<Self> {
        if **mult.target() != **complex.module() || mult.degree() != 0 {
            return Err(DgError::Malformed("multiplication must be a degree 0 map into the carrier".into()));
        }
        if unit.iter().any(|(n, _)| !complex.module().contains(n) || n.degree() != 0) {
            return Err(DgError::Malformed("unit must lie in degree 0".into()));
        }
        Ok(DGAlgebra { complex, mult, unit, augmentation })
    }

    /// Builds the multiplication from its values on pairs of basis names.
    pub fn build(
        complex: ChainComplex,
        mut product: impl FnMut(&Name, &Name) -> Element,
        unit: Element,
        augmentation: BTreeMap<Name, Scalar>,
    ) -> Result<Self> {
        let source = tensor_power_module(&complex, 2)?;
        let mult = GradedMap::from_fn(source, complex.module().clone(), 0, |n| {
            let f = n.tensor_factors(2).expect("binary tensor");
            product(f[0], f[1])
        })?;
        Self::new(complex, mult, unit, augmentation)
    }

    /// Connected algebra with unit and augmentation at `unit`.
    pub fn connected(complex: ChainComplex, product: impl FnMut(&Name, &Name) -> Element, unit: Name) -> Result<Self> {
        let aug = [(unit.clone(), Scalar::one())].into_iter().collect();
        let a = Self::build(complex, product, Element::basis(unit), aug)?;
        a.require_connected()?;
        Ok(a)
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn module(&self) -> &Arc<FreeGradedModule> {
        self.complex.module()
    }

    pub fn ring(&self) -> &CoeffRing {
        self.complex.ring()
    }

    pub fn d(&self) -> &GradedMap {
        self.complex.differential()
    }

    pub fn mult(&self) -> &GradedMap {
        &self.mult
    }

    pub fn truncation(&self) -> Truncation {
        self.complex.truncation()
    }

    pub fn max_degree(&self) -> i64 {
        self.truncation().max
    }

    pub fn unit(&self) -> &Element {
        &self.unit
    }

    /// The unit as a basis name, when it is one.
    pub fn unit_name(&self) -> Option<&Name> {
        match self.unit.iter().collect::<Vec<_>>().as_slice() {
            [(n, c)] if c.is_one() => Some(n),
            _ => None,
        }
    }

    pub fn augmentation_value(&self, a: &Name) -> Scalar {
        self.augmentation.get(a).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn augmentation_map(&self) -> &BTreeMap<Name, Scalar> {
        &self.augmentation
    }

    pub fn product(&self, a: &Name, b: &Name) -> Element {
        self.mult.image(&Name::tensor(vec![a.clone(), b.clone()]))
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        let mut out = Element::zero();
        for (a, c) in x.iter() {
            for (b, e) in y.iter() {
                out.add_scaled(&self.product(a, b), &(c * e));
            }
        }
        out
    }

    /// Product of a list of elements, left to right; the empty product is the unit.
    pub fn mul_all(&self, xs: &[Element]) -> Element {
        xs.iter().fold(self.unit.clone(), |acc, x| self.mul(&acc, x))
    }

    pub fn is_connected(&self) -> bool {
        match self.unit_name() {
            Some(u) => self.module().min_degree().is_none_or(|m| m >= 0) && self.module().basis(0) == std::slice::from_ref(u),
            None => false,
        }
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(DgError::NotConnected("degree 0 must be spanned by the unit".into()))
        }
    }

    pub fn positive_basis(&self) -> impl Iterator<Item = &Name> {
        self.module().names().filter(|n| n.degree() > 0)
    }

    pub fn over_ring(&self, ring: &CoeffRing) -> Result<Self> {
        let complex = ChainComplex::new(self.d().over_ring(ring), self.truncation())?;
        let mult = GradedMap::new(
            Arc::new(self.mult.source().with_ring(ring.clone())),
            complex.module().clone(),
            0,
            self.mult.images().map(|(n, e)| (n.clone(), e.reduced(ring))).collect(),
        )?;
        Self::new(complex, mult, self.unit.clone(), self.augmentation.clone())
    }

    /// Forgets everything above `max`; products landing above it are dropped.
    pub fn truncate_above(&self, max: i64) -> Result<Self> {
        let complex = self.complex.truncate_above(max)?;
        if complex == self.complex {
            return Ok(self.clone());
        }
        let module = complex.module().clone();
        let aug = self.augmentation.iter().filter(|(n, _)| module.contains(n)).map(|(n, v)| (n.clone(), v.clone())).collect();
        Self::build(
            complex,
            |a, b| self.product(a, b).map_names(|n| module.contains(n).then(|| (Scalar::one(), n.clone()))),
            self.unit.clone(),
            aug,
        )
    }

    /// `A ⊗ A′` with `(a⊗b)(a′⊗b′) = (−1)^{|b||a′|} aa′⊗bb′`.
    pub fn tensor(&self, other: &DGAlgebra) -> Result<DGAlgebra> {
        let complex = ChainComplex::tensor(&[&self.complex, &other.complex])?;
        let unit = Element::tensor(&[&self.unit, &other.unit]);
        let augmentation = complex
            .module()
            .basis(0)
            .iter()
            .filter_map(|n| {
                let f = n.tensor_factors(2)?;
                let v = self.augmentation_value(f[0]) * other.augmentation_value(f[1]);
                (!v.is_zero()).then(|| (n.clone(), v))
            })
            .collect();
        let product = |x: &Name, y: &Name| {
            let (f, g) = (x.tensor_factors(2).expect("binary"), y.tensor_factors(2).expect("binary"));
            let s = sign(f[1].degree() * g[0].degree());
            Element::tensor(&[&self.product(f[0], g[0]), &other.product(f[1], g[1])]).scaled(&s)
        };
        Self::build(complex, product, unit, augmentation)
    }
}

#[derive(Clone, Debug)]
pub struct HopfAlgebra {
    pub algebra: DGAlgebra,
    pub coalgebra: DGCoalgebra,
}

impl HopfAlgebra {
    pub fn new(algebra: DGAlgebra, coalgebra: DGCoalgebra) -> Result<Self> {
        if algebra.complex() != coalgebra.complex() {
            return Err(DgError::Malformed("algebra and coalgebra must share one complex".into()));
        }
        Ok(HopfAlgebra { algebra, coalgebra })
    }

    pub fn complex(&self) -> &ChainComplex {
        self.algebra.complex()
    }

    pub fn module(&self) -> &Arc<FreeGradedModule> {
        self.algebra.module()
    }

    pub fn ring(&self) -> &CoeffRing {
        self.algebra.ring()
    }

    pub fn over_ring(&self, ring: &CoeffRing) -> Result<Self> {
        Self::new(self.algebra.over_ring(ring)?, self.coalgebra.over_ring(ring)?)
    }

    pub fn tensor(&self, other: &HopfAlgebra) -> Result<HopfAlgebra> {
        Self::new(self.algebra.tensor(&other.algebra)?, self.coalgebra.tensor(&other.coalgebra)?)
    }
}

/// Which side the Hopf algebra acts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `M ⊗ H → M`
    Right,
    /// `H ⊗ M → M`
    Left,
}

#[derive(Clone, Debug)]
pub struct ModuleCoalgebra {
    pub coalgebra: DGCoalgebra,
    pub hopf: HopfAlgebra,
    pub side: Side,
    action: BTreeMap<(Name, Name), Element>,
}

impl ModuleCoalgebra {
    /// Action given on pairs `(m, h)` of basis names, for either side.
    pub fn build(
        coalgebra: DGCoalgebra,
        hopf: HopfAlgebra,
        side: Side,
        mut act: impl FnMut(&Name, &Name) -> Element,
    ) -> Result<Self> {
        let max = coalgebra.max_degree();
        let mut action = BTreeMap::new();
        for m in coalgebra.module().names() {
            for h in hopf.module().names() {
                if m.degree() + h.degree() > max {
                    break;
                }
                let e = act(m, h);
                if let Some((n, _)) = e.iter().find(|(n, _)| !coalgebra.module().contains(n)) {
                    return Err(DgError::Malformed(format!("action value `{n}` is not in the module")));
                }
                if !e.is_empty() {
                    action.insert((m.clone(), h.clone()), e);
                }
            }
        }
        Ok(ModuleCoalgebra { coalgebra, hopf, side, action })
    }

    /// `m·h` for a right action, `h·m` for a left action.
    pub fn act(&self, m: &Name, h: &Name) -> Element {
        self.action.get(&(m.clone(), h.clone())).cloned().unwrap_or_default()
    }

    pub fn act_elements(&self, x: &Element, a: &Element) -> Element {
        let mut out = Element::zero();
        for (m, c) in x.iter() {
            for (h, e) in a.iter() {
                out.add_scaled(&self.act(m, h), &(c * e));
            }
        }
        out
    }

    pub fn max_degree(&self) -> i64 {
        self.coalgebra.max_degree()
    }
}

/// Divided powers on one generator of degree `2·half_degree`, truncated at `max_degree`.
pub fn divided_powers(half_degree: i64, max_degree: i64, ring: CoeffRing) -> Result<HopfAlgebra> {
    assert!(half_degree >= 1 && max_degree >= 0);
    let top = max_degree / (2 * half_degree);
    let v = |k: i64| Name::gen(format!("v({k})"), 2 * half_degree * k);
    let module = Arc::new(FreeGradedModule::new(ring, (0..=top).map(v))?);
    let complex = ChainComplex::zero_differential(module, Truncation::up_to(max_degree))?;
    let index = |n: &Name| match n {
        Name::Gen { degree, .. } => degree / (2 * half_degree),
        _ => unreachable!("divided power names are generators"),
    };
    let algebra = DGAlgebra::connected(
        complex.clone(),
        |a, b| {
            let (k, l) = (index(a), index(b));
            if k + l > top {
                return Element::zero();
            }
            Element::term(scalar_from_bigint(binomial(k + l, k)), v(k + l))
        },
        v(0),
    )?;
    let coalgebra = DGCoalgebra::connected(
        complex,
        |c| {
            let n = index(c);
            Element::from_terms((0..=n).map(|k| (Scalar::one(), Name::tensor(vec![v(k), v(n - k)]))))
        },
        v(0),
    )?;
    HopfAlgebra::new(algebra, coalgebra)
}

pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Dual algebra with product dual to `Δ`: the coefficient of `c♯` in `x♯·y♯`
/// is `(−1)^{|x||y|}` times the coefficient of `x⊗y` in `Δc`.
pub fn dual_algebra(c: &DGCoalgebra) -> Result<DGAlgebra> {
    let complex = c.complex().dual();
    let mut table: BTreeMap<(Name, Name), Element> = BTreeMap::new();
    for z in c.module().names() {
        let (sz, zd) = z.dual();
        for (n, coeff) in c.delta(z).iter() {
            let f = n.tensor_factors(2).expect("binary tensor");
            let (sx, xd) = f[0].dual();
            let (sy, yd) = f[1].dual();
            let s = crate::graded::dual_product_sign(f[0].degree(), f[1].degree()) * coeff * &sx * &sy * &sz;
            table.entry((xd, yd)).or_default().add_term(zd.clone(), &s);
        }
    }
    let unit = Element::from_terms(c.counit_map().iter().map(|(n, v)| {
        let (s, nd) = n.dual();
        (v * s, nd)
    }));
    let augmentation = c
        .unit()
        .map(|u| {
            let (s, ud) = u.dual();
            [(ud, s)].into_iter().collect()
        })
        .unwrap_or_default();
    DGAlgebra::build(complex, |x, y| table.get(&(x.clone(), y.clone())).cloned().unwrap_or_default(), unit, augmentation)
}

/// Dual coalgebra of a finite-type algebra: the coefficient of `x♯⊗y♯` in
/// `Δ(c♯)` is `(−1)^{|x||y|}` times the coefficient of `c` in `xy`.
pub fn dual_coalgebra(a: &DGAlgebra) -> Result<DGCoalgebra> {
    let complex = a.complex().dual();
    let mut table: BTreeMap<Name, Element> = BTreeMap::new();
    for (n, e) in a.mult().images() {
        let f = n.tensor_factors(2).expect("binary tensor");
        let (sx, xd) = f[0].dual();
        let (sy, yd) = f[1].dual();
        for (z, coeff) in e.iter() {
            let (sz, zd) = z.dual();
            let s = crate::graded::dual_product_sign(f[0].degree(), f[1].degree()) * coeff * &sx * &sy * &sz;
            table.entry(zd).or_default().add_term(Name::tensor(vec![xd.clone(), yd.clone()]), &s);
        }
    }
    let counit = a
        .unit()
        .iter()
        .map(|(n, v)| {
            let (s, nd) = n.dual();
            (nd, v * s)
        })
        .collect();
    let coaug = a.augmentation_map().iter().find(|(_, v)| v.is_one()).map(|(n, _)| n.dual().1);
    let target = tensor_power_module(&complex, 2)?;
    let comult = GradedMap::from_fn(complex.module().clone(), target.clone(), 0, |z| {
        let e = table.get(z).cloned().unwrap_or_default();
        e.map_names(|n| target.contains(n).then(|| (Scalar::one(), n.clone())))
    })?;
    DGCoalgebra::new(complex, comult, counit, coaug)
}

pub fn is_primitive(c: &DGCoalgebra, x: &Element) -> bool {
    let Some(u) = c.unit() else { return false };
    let mut r = c.comult().apply(x);
    for (n, k) in x.iter() {
        r.add_term(Name::tensor(vec![n.clone(), u.clone()]), &-k.clone());
        r.add_term(Name::tensor(vec![u.clone(), n.clone()]), &-k.clone());
    }
    r.is_zero_in(c.ring())
}

fn expect_equal(report: &mut CheckReport, property: &str, at: impl std::fmt::Display, lhs: &Element, rhs: &Element, ring: &CoeffRing) {
    report.tick();
    if !lhs.equal_in(rhs, ring) {
        let mut r = lhs.clone();
        r.sub(rhs);
        report.fail(property, at, r.reduced(ring));
    }
}

pub fn check_coalgebra(c: &DGCoalgebra) -> CheckReport {
    let ring = c.ring().clone();
    let t = c.truncation();
    let mut report = c.complex().verify_differential();
    report.check = "coalgebra".into();
    let delta = |x: &Name| c.delta(x);
    let d = |x: &Name| c.d().image(x);
    for x in c.module().names() {
        let e = c.delta(x);
        let left = apply_at(&e, 2, 0, 0, 2, delta);
        let right = apply_at(&e, 2, 1, 0, 2, delta);
        expect_equal(&mut report, "coassociativity", x, &left, &right, &ring);
        let me = Element::basis(x.clone());
        expect_equal(&mut report, "left counit", x, &apply_at(&e, 2, 0, 0, 0, |y| c.counit_element(y)), &me, &ring);
        expect_equal(&mut report, "right counit", x, &apply_at(&e, 2, 1, 0, 0, |y| c.counit_element(y)), &me, &ring);
        if t.knows_differential(x.degree()) {
            let lhs = c.comult().apply(&c.d().image(x));
            let mut rhs = apply_at(&e, 2, 0, -1, 1, d);
            rhs.add(&apply_at(&e, 2, 1, -1, 1, d));
            expect_equal(&mut report, "d is a coderivation", x, &lhs, &rhs, &ring);
            if x.degree() == 1 {
                let eps: Scalar = c.d().image(x).iter().map(|(n, k)| k * c.counit_value(n)).sum();
                expect_equal(&mut report, "counit is a chain map", x, &Element::term(eps, scalar_name()), &Element::zero(), &ring);
            }
        }
    }
    if let Some(u) = c.unit() {
        let uu = Element::basis(Name::tensor(vec![u.clone(), u.clone()]));
        expect_equal(&mut report, "coaugmentation is grouplike", u, &c.delta(u), &uu, &ring);
        expect_equal(&mut report, "coaugmentation is a cycle", u, &c.d().image(u), &Element::zero(), &ring);
        expect_equal(&mut report, "counit of coaugmentation", u, &c.counit_element(u), &Element::basis(scalar_name()), &ring);
    }
    report
}

pub fn check_algebra(a: &DGAlgebra) -> CheckReport {
    let ring = a.ring().clone();
    let t = a.truncation();
    let max = t.max;
    let mut report = a.complex().verify_differential();
    report.check = "algebra".into();
    let names: Vec<&Name> = a.module().names().collect();
    for x in &names {
        let xe = Element::basis((*x).clone());
        expect_equal(&mut report, "left unit", x, &a.mul(a.unit(), &xe), &xe, &ring);
        expect_equal(&mut report, "right unit", x, &a.mul(&xe, a.unit()), &xe, &ring);
        for y in &names {
            let dxy = x.degree() + y.degree();
            if dxy > max {
                break;
            }
            let xy = a.product(x, y);
            let at = format!("{x}, {y}");
            if t.knows_differential(dxy) {
                let lhs = a.d().apply(&xy);
                let mut rhs = a.mul(&a.d().image(x), &Element::basis((*y).clone()));
                rhs.add_scaled(&a.mul(&xe, &a.d().image(y)), &sign(x.degree()));
                expect_equal(&mut report, "Leibniz rule", &at, &lhs, &rhs, &ring);
            }
            for z in &names {
                if dxy + z.degree() > max {
                    break;
                }
                let ze = Element::basis((*z).clone());
                let lhs = a.mul(&xy, &ze);
                let rhs = a.mul(&xe, &a.product(y, z));
                expect_equal(&mut report, "associativity", format!("{x}, {y}, {z}"), &lhs, &rhs, &ring);
            }
        }
    }
    report
}

/// `Δ_A(x)·Δ_A(y)` in `A ⊗ A`.
fn tensor_square_product(a: &DGAlgebra, p: &Element, q: &Element) -> Element {
    let mut out = Element::zero();
    for (n, c) in p.iter() {
        let f = n.tensor_factors(2).expect("binary");
        for (m, e) in q.iter() {
            let g = m.tensor_factors(2).expect("binary");
            let s = sign(f[1].degree() * g[0].degree()) * c * e;
            out.add_scaled(&Element::tensor(&[&a.product(f[0], g[0]), &a.product(f[1], g[1])]), &s);
        }
    }
    out
}

pub fn check_hopf(h: &HopfAlgebra) -> CheckReport {
    let ring = h.ring().clone();
    let max = h.complex().truncation().max;
    let mut report = CheckReport::new("hopf");
    report.absorb(check_algebra(&h.algebra));
    report.absorb(check_coalgebra(&h.coalgebra));
    let (a, c) = (&h.algebra, &h.coalgebra);
    let names: Vec<&Name> = h.module().names().collect();
    for x in &names {
        for y in &names {
            if x.degree() + y.degree() > max {
                break;
            }
            let lhs = c.comult().apply(&a.product(x, y));
            let rhs = tensor_square_product(a, &c.delta(x), &c.delta(y));
            expect_equal(&mut report, "comultiplication is multiplicative", format!("{x}, {y}"), &lhs, &rhs, &ring);
            let exy: Scalar = a.product(x, y).iter().map(|(n, k)| k * c.counit_value(n)).sum();
            let prod = c.counit_value(x) * c.counit_value(y);
            expect_equal(
                &mut report,
                "counit is multiplicative",
                format!("{x}, {y}"),
                &Element::term(exy, scalar_name()),
                &Element::term(prod, scalar_name()),
                &ring,
            );
        }
    }
    let du = c.comult().apply(a.unit());
    let uu = Element::tensor(&[a.unit(), a.unit()]);
    expect_equal(&mut report, "unit is grouplike", "1", &du, &uu, &ring);
    report.window = Some((h.complex().truncation().min, max));
    report
}

pub fn check_module_coalgebra(m: &ModuleCoalgebra) -> CheckReport {
    let ring = m.coalgebra.ring().clone();
    let max = m.max_degree();
    let mut report = CheckReport::new("module coalgebra");
    let (mc, h) = (&m.coalgebra, &m.hopf);
    let hm = h.module().names().collect::<Vec<_>>();
    let right = m.side == Side::Right;
    // all products written with the module element first; Left swaps roles in the formulas
    let act = |x: &Element, a: &Element| m.act_elements(x, a);
    for x in mc.module().names() {
        let xe = Element::basis(x.clone());
        expect_equal(&mut report, "unit acts trivially", x, &act(&xe, h.algebra.unit()), &xe, &ring);
        for a in &hm {
            if x.degree() + a.degree() > max {
                break;
            }
            let ae = Element::basis((*a).clone());
            let xa = m.act(x, a);
            let at = format!("{x}, {a}");
            // Leibniz: d(x·a) = dx·a + (−1)^{|x|} x·da   (right)
            //          d(a·x) = da·x + (−1)^{|a|} a·dx   (left)
            if mc.truncation().knows_differential(x.degree() + a.degree()) {
                let lhs = mc.d().apply(&xa);
                let mut rhs = Element::zero();
                let (dx, da) = (mc.d().image(x), h.algebra.d().image(a));
                if right {
                    rhs.add(&act(&dx, &ae));
                    rhs.add_scaled(&act(&xe, &da), &sign(x.degree()));
                } else {
                    rhs.add(&act(&xe, &da));
                    rhs.add_scaled(&act(&dx, &ae), &sign(a.degree()));
                }
                expect_equal(&mut report, "action is a chain map", &at, &lhs, &rhs, &ring);
            }
            // coalgebra map: Δ(x·a) = Σ ± (x_i·a_j) ⊗ (x^i·a^j)
            let lhs = mc.comult().apply(&xa);
            let mut rhs = Element::zero();
            let (first, second) = if right { (mc.delta(x), h.coalgebra.delta(a)) } else { (h.coalgebra.delta(a), mc.delta(x)) };
            for (p, c1) in first.iter() {
                let f = p.tensor_factors(2).expect("binary");
                for (q, c2) in second.iter() {
                    let g = q.tensor_factors(2).expect("binary");
                    let s = sign(f[1].degree() * g[0].degree()) * c1 * c2;
                    let (l, r) = if right {
                        (m.act(f[0], g[0]), m.act(f[1], g[1]))
                    } else {
                        (m.act(g[0], f[0]), m.act(g[1], f[1]))
                    };
                    rhs.add_scaled(&Element::tensor(&[&l, &r]), &s);
                }
            }
            expect_equal(&mut report, "action is a coalgebra map", &at, &lhs, &rhs, &ring);
            let exa: Scalar = xa.iter().map(|(n, k)| k * mc.counit_value(n)).sum();
            let prod = mc.counit_value(x) * h.coalgebra.counit_value(a);
            expect_equal(&mut report, "action preserves counits", &at, &Element::term(exa, scalar_name()), &Element::term(prod, scalar_name()), &ring);
            for b in &hm {
                if x.degree() + a.degree() + b.degree() > max {
                    break;
                }
                let be = Element::basis((*b).clone());
                let (lhs, rhs) = if right {
                    (act(&xa, &be), act(&xe, &h.algebra.product(a, b)))
                } else {
                    // b·(a·x) = (ba)·x
                    (act(&xa, &be), act(&xe, &h.algebra.product(b, a)))
                };
                expect_equal(&mut report, "action is associative", format!("{x}, {a}, {b}"), &lhs, &rhs, &ring);
            }
        }
    }
    report.window = Some((mc.truncation().min, max));
    report
}

/// Left multiplication `H ⊗ H → H` or right multiplication as a module structure on `H` itself.
pub fn regular_module(h: &HopfAlgebra, side: Side) -> Result<ModuleCoalgebra> {
    let alg = h.algebra.clone();
    ModuleCoalgebra::build(h.coalgebra.clone(), h.clone(), side, move |m, a| match side {
        Side::Right => alg.product(m, a),
        Side::Left => alg.product(a, m),
    })
}

/// Morphism of DG algebras.
#[derive(Clone, Debug)]
pub struct AlgebraMap {
    pub source: DGAlgebra,
    pub target: DGAlgebra,
    pub map: GradedMap,
}

impl AlgebraMap {
    pub fn new(source: DGAlgebra, target: DGAlgebra, map: GradedMap) -> Result<Self> {
        if **map.source() != **source.module() || **map.target() != **target.module() || map.degree() != 0 {
            return Err(DgError::Malformed("algebra map modules do not match".into()));
        }
        Ok(AlgebraMap { source, target, map })
    }

    pub fn identity(a: &DGAlgebra) -> Self {
        AlgebraMap { source: a.clone(), target: a.clone(), map: GradedMap::identity(a.module().clone()) }
    }
}

/// Morphism of DG coalgebras.
#[derive(Clone, Debug)]
pub struct CoalgebraMap {
    pub source: DGCoalgebra,
    pub target: DGCoalgebra,
    pub map: GradedMap,
}

impl CoalgebraMap {
    pub fn new(source: DGCoalgebra, target: DGCoalgebra, map: GradedMap) -> Result<Self> {
        if **map.source() != **source.module() || **map.target() != **target.module() || map.degree() != 0 {
            return Err(DgError::Malformed("coalgebra map modules do not match".into()));
        }
        Ok(CoalgebraMap { source, target, map })
    }

    pub fn identity(c: &DGCoalgebra) -> Self {
        CoalgebraMap { source: c.clone(), target: c.clone(), map: GradedMap::identity(c.module().clone()) }
    }
}

/// Chain map, multiplicative and unital, where the target is known.
pub fn check_algebra_map(f: &AlgebraMap) -> CheckReport {
    let ring = f.source.ring().clone();
    let max = f.source.max_degree().min(f.target.max_degree());
    let mut report = crate::chaincx::check_commutes(&f.map, f.source.complex(), f.target.complex());
    report.check = "algebra map".into();
    expect_equal(&mut report, "unit is preserved", "1", &f.map.apply(f.source.unit()), f.target.unit(), &ring);
    let names: Vec<&Name> = f.source.module().names().filter(|n| n.degree() <= max).collect();
    for x in &names {
        for y in &names {
            if x.degree() + y.degree() > max {
                break;
            }
            let lhs = f.map.apply(&f.source.product(x, y));
            let rhs = f.target.mul(&f.map.image(x), &f.map.image(y));
            expect_equal(&mut report, "multiplicative", format!("{x}, {y}"), &lhs, &rhs, &ring);
        }
    }
    report
}

/// Chain map, comultiplicative and counital.
pub fn check_coalgebra_map(f: &CoalgebraMap) -> CheckReport {
    let ring = f.source.ring().clone();
    let mut report = crate::chaincx::check_commutes(&f.map, f.source.complex(), f.target.complex());
    report.check = "coalgebra map".into();
    let g = |x: &Name| f.map.image(x);
    for x in f.source.module().names() {
        let lhs = f.target.comult().apply(&f.map.image(x));
        let e = f.source.delta(x);
        let rhs = apply_at(&apply_at(&e, 2, 0, 0, 1, g), 2, 1, 0, 1, g);
        expect_equal(&mut report, "comultiplicative", x, &lhs, &rhs, &ring);
        let eps: Scalar = f.map.image(x).iter().map(|(n, k)| k * f.target.counit_value(n)).sum();
        expect_equal(
            &mut report,
            "counit is preserved",
            x,
            &Element::term(eps, scalar_name()),
            &f.source.counit_element(x),
            &ring,
        );
    }
    report
}
