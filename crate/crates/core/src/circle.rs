//! Circle actions as families of operators `κ_n` on a coalgebra, the
//! presentation of the operators `T_n` by `ΩΓv`, the orbit model `Γv ⊗ C`
//! with its dual cochain algebra, cohomology rings and the BV operator.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::barcobar::{cobar_letter, primitive_cobar_hopf, BarCobarError};
use crate::chaincx::{induced_on_homology, tensor_truncation, ChainComplex, ChainError, FieldHomology, Truncation};
use crate::dgstruct::{check_coalgebra, dual_algebra, is_primitive, DGAlgebra, DGCoalgebra, DgError, HopfAlgebra};
use crate::exactlin::{self, CoeffRing, ExactLinError, Scalar, SparseMatrix};
use crate::fixtures::{gamma, gamma_gen, ground_coalgebra};
use crate::graded::{apply_at, sign, Element, FreeGradedModule, GradedError, GradedMap, Name};
use crate::report::CheckReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircleError {
    #[error("invalid circle action: {0}")]
    InvalidAction(String),
    #[error("malformed circle action: {0}")]
    Malformed(String),
    #[error("cohomology rings are computed over fields only, not {0}")]
    NotAField(CoeffRing),
    #[error("degree {0} is outside the computed window")]
    Undetermined(i64),
    #[error(transparent)]
    BarCobar(#[from] BarCobarError),
    #[error(transparent)]
    Dg(#[from] DgError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    ExactLin(#[from] ExactLinError),
}

pub type Result<T> = std::result::Result<T, CircleError>;

/// The one-letter word `T_n = [s⁻¹v(n+1)]` of degree `2n+1` in `ΩΓv`.
pub fn t_name(n: i64) -> Name {
    Name::word(vec![cobar_letter(gamma_gen(n + 1))])
}

/// `ΩΓv` through a top degree, with every letter `T_n` primitive.
#[derive(Clone, Debug)]
pub struct TPresentation {
    pub hopf: HopfAlgebra,
}

impl TPresentation {
    pub fn max_degree(&self) -> i64 {
        self.hopf.algebra.max_degree()
    }

    /// Largest `n` with `T_n` inside the window.
    pub fn top_index(&self) -> i64 {
        (self.max_degree() - 1).div_euclid(2)
    }

    pub fn t(&self, n: i64) -> Element {
        let t = t_name(n);
        if self.hopf.module().contains(&t) {
            Element::basis(t)
        } else {
            Element::zero()
        }
    }
}

pub fn t_presentation(max_degree: i64, ring: CoeffRing) -> Result<TPresentation> {
    let c = gamma(max_degree + 1, ring).coalgebra;
    Ok(TPresentation { hopf: primitive_cobar_hopf(&c, max_degree)? })
}

/// `dT_n = Σ_{i=1}^n T_{i−1}T_{n−i}`, primitivity of each `T_n` for `n ≤ n_max`,
/// and `[T₀] ≠ 0` in degree 1 homology.
pub fn check_t_presentation(p: &TPresentation, n_max: i64) -> CheckReport {
    let ring = p.hopf.ring().clone();
    let top = n_max.min(p.top_index());
    let mut report = CheckReport::new("T_n presentation").with_window(1, 2 * top + 1);
    let a = &p.hopf.algebra;
    for n in 0..=top {
        let lhs = a.d().apply(&p.t(n));
        let mut rhs = Element::zero();
        for i in 1..=n {
            rhs.add(&a.mul(&p.t(i - 1), &p.t(n - i)));
        }
        report.tick();
        if !lhs.equal_in(&rhs, &ring) {
            let mut r = lhs;
            r.sub(&rhs);
            report.fail("T_n recursion", t_name(n), r);
        }
        report.tick();
        if !is_primitive(&p.hopf.coalgebra, &p.t(n)) {
            report.fail("primitivity", t_name(n), p.hopf.coalgebra.delta(&t_name(n)));
        }
    }
    if top >= 0 && p.max_degree() >= 2 {
        report.tick();
        let b = a.d().matrix_at(2);
        let v = p.hopf.module().coords(1, &p.t(0));
        match exactlin::solve(&b, &v, &ring) {
            Ok(None) => {}
            _ => report.fail("[T₀] ≠ 0", t_name(0), "T₀ is a boundary"),
        }
    }
    report
}

/// A chain-level circle action: operators `κ_n: C → C` of degree `2n+1`.
/// Operators past the stored list are zero.
#[derive(Clone, Debug)]
pub struct CircleAction {
    pub carrier: DGCoalgebra,
    kappa: Vec<GradedMap>,
}

impl CircleAction {
    pub fn new(carrier: DGCoalgebra, kappa: Vec<GradedMap>) -> Result<Self> {
        for (n, k) in kappa.iter().enumerate() {
            if **k.source() != **carrier.module() || **k.target() != **carrier.module() {
                return Err(CircleError::Malformed(format!("κ_{n} is not an endomorphism of the carrier")));
            }
            if k.degree() != 2 * n as i64 + 1 {
                return Err(CircleError::Malformed(format!("κ_{n} has degree {}, expected {}", k.degree(), 2 * n + 1)));
            }
        }
        Ok(CircleAction { carrier, kappa })
    }

    /// Operators from their values on basis names; terms outside the carrier are dropped.
    pub fn from_fn(carrier: DGCoalgebra, count: usize, mut f: impl FnMut(usize, &Name) -> Element) -> Result<Self> {
        let module = carrier.module().clone();
        let kappa = (0..count)
            .map(|n| {
                GradedMap::from_fn(module.clone(), module.clone(), 2 * n as i64 + 1, |x| {
                    f(n, x).map_names(|y| module.contains(y).then(|| (Scalar::one(), y.clone())))
                })
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(carrier, kappa)
    }

    /// The ground ring with the zero action.
    pub fn point(ring: CoeffRing) -> Self {
        CircleAction { carrier: ground_coalgebra(ring), kappa: Vec::new() }
    }

    /// The zero action on a coalgebra.
    pub fn trivial(carrier: DGCoalgebra) -> Self {
        CircleAction { carrier, kappa: Vec::new() }
    }

    /// `ΩΓv` acting on itself by left multiplication with `T_n`.
    pub fn regular(max_degree: i64, ring: CoeffRing) -> Result<Self> {
        let p = t_presentation(max_degree, ring)?;
        let count = (p.top_index() + 1).max(0) as usize;
        let algebra = p.hopf.algebra.clone();
        Self::from_fn(p.hopf.coalgebra, count, |n, u| algebra.product(&t_name(n as i64), u))
    }

    pub fn ring(&self) -> &CoeffRing {
        self.carrier.ring()
    }

    /// Number of stored operators.
    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }

    pub fn kappa(&self, n: usize) -> Option<&GradedMap> {
        self.kappa.get(n)
    }

    pub fn apply(&self, n: usize, x: &Element) -> Element {
        self.kappa.get(n).map(|k| k.apply(x)).unwrap_or_default()
    }

    /// `ω_n = κ_n♯` on the dual of the carrier.
    pub fn omega(&self, n: usize) -> GradedMap {
        match self.kappa.get(n) {
            Some(k) => k.dualize(),
            None => {
                let m = std::sync::Arc::new(self.carrier.module().dual());
                GradedMap::zero(m.clone(), m, 2 * n as i64 + 1)
            }
        }
    }

    pub fn over_ring(&self, ring: &CoeffRing) -> Result<Self> {
        let carrier = self.carrier.over_ring(ring)?;
        let kappa = self.kappa.iter().map(|k| k.over_ring(ring)).collect();
        Self::new(carrier, kappa)
    }

    /// Count of indices `n` for which `κ_n` can be nonzero on the carrier window.
    fn reach(&self) -> usize {
        let t = self.carrier.truncation();
        ((t.max - t.min - 1).div_euclid(2) + 1).max(self.kappa.len() as i64).max(0) as usize
    }
}

fn expect_equal(report: &mut CheckReport, property: &str, at: impl std::fmt::Display, lhs: &Element, rhs: &Element, ring: &CoeffRing) {
    report.tick();
    if !lhs.equal_in(rhs, ring) {
        let mut r = lhs.clone();
        r.sub(rhs);
        report.fail(property, at, r.reduced(ring));
    }
}

/// Checks the carrier coalgebra, `dκ_n + κ_n d = Σ_{k<n} κ_kκ_{n−k−1}`, each
/// `κ_n` a coderivation, and the same relations for `ω_n` on the dual.
pub fn check_circle_action(a: &CircleAction) -> CheckReport {
    let c = &a.carrier;
    let ring = c.ring().clone();
    let t = c.truncation();
    let mut report = CheckReport::new("circle action").with_window(t.min, t.max);
    report.absorb(check_coalgebra(c));
    for n in 0..a.reach() {
        let f_degree = 2 * n as i64 + 1;
        for x in c.module().names() {
            let out = x.degree() + f_degree;
            let at = format!("κ_{n}({x})");
            if t.knows_differential(out) {
                let e = Element::basis(x.clone());
                let mut lhs = c.d().apply(&a.apply(n, &e));
                lhs.add(&a.apply(n, &c.d().image(x)));
                let mut rhs = Element::zero();
                for k in 0..n {
                    rhs.add(&a.apply(k, &a.apply(n - k - 1, &e)));
                }
                expect_equal(&mut report, "κ relation", &at, &lhs, &rhs, &ring);
            }
            if t.contains(out) || t.bounded_above {
                let lhs = c.comult().apply(&a.apply(n, &Element::basis(x.clone())));
                let dx = c.delta(x);
                let kappa = |y: &Name| a.apply(n, &Element::basis(y.clone()));
                let mut rhs = apply_at(&dx, 2, 0, f_degree, 1, kappa);
                rhs.add(&apply_at(&dx, 2, 1, f_degree, 1, kappa));
                expect_equal(&mut report, "coderivation", &at, &lhs, &rhs, &ring);
            }
        }
    }
    report.absorb(check_dual_action(a));
    report
}

/// `d♯ω_n + ω_n d♯ = Σ_{k<n} ω_kω_{n−k−1}` and
/// `ω_n(αβ) = ω_n(α)β + (−1)^{|α|}αω_n(β)` on the dual algebra of the carrier.
pub fn check_dual_action(a: &CircleAction) -> CheckReport {
    let ring = a.ring().clone();
    let Ok(dual) = dual_algebra(&a.carrier) else {
        let mut r = CheckReport::new("dual circle action");
        r.fail("dual algebra", "carrier", "carrier has no dual algebra");
        return r;
    };
    let t = dual.truncation();
    let mut report = CheckReport::new("dual circle action").with_window(t.min, t.max);
    let omegas: Vec<GradedMap> = (0..a.reach()).map(|n| a.omega(n)).collect();
    let names: Vec<Name> = dual.module().names().cloned().collect();
    for (n, w) in omegas.iter().enumerate() {
        for x in &names {
            let at = format!("ω_{n}({x})");
            if t.knows_differential(x.degree()) && t.knows_differential(x.degree() + w.degree()) {
                let e = Element::basis(x.clone());
                let mut lhs = dual.d().apply(&w.apply(&e));
                lhs.add(&w.apply(&dual.d().apply(&e)));
                let mut rhs = Element::zero();
                for k in 0..n {
                    rhs.add(&omegas[k].apply(&omegas[n - k - 1].apply(&e)));
                }
                expect_equal(&mut report, "ω relation", &at, &lhs, &rhs, &ring);
            }
            for y in &names {
                if !t.contains(x.degree() + y.degree()) {
                    continue;
                }
                let lhs = w.apply(&dual.product(x, y));
                let mut rhs = dual.mul(&w.image(x), &Element::basis(y.clone()));
                rhs.add_scaled(&dual.mul(&Element::basis(x.clone()), &w.image(y)), &sign(x.degree() * w.degree()));
                expect_equal(&mut report, "ω derivation", format!("ω_{n}({x}·{y})"), &lhs, &rhs, &ring);
            }
        }
    }
    report
}

/// `Γv ⊗ C` with `D(v(n)⊗U) = v(n)⊗dU − Σ_{k<n} v(k)⊗κ_{n−k−1}(U)` and
/// `ψ̃(v(n)⊗U) = Σ (v(k)⊗U_i)⊗(v(n−k)⊗U^i)`, through `max_degree`.
pub fn orbit_model(a: &CircleAction, max_degree: i64) -> Result<DGCoalgebra> {
    let report = check_circle_action(a);
    if !report.passed() {
        return Err(CircleError::InvalidAction(report.to_string()));
    }
    orbit_model_unchecked(a, max_degree)
}

/// The orbit model without validating the action first.
pub fn orbit_model_unchecked(a: &CircleAction, max_degree: i64) -> Result<DGCoalgebra> {
    let c = &a.carrier;
    let g = gamma(max_degree, a.ring().clone());
    let mut truncation = tensor_truncation(&[g.complex().truncation(), c.truncation()]);
    if truncation.max > max_degree {
        truncation = Truncation { max: max_degree, bounded_above: false, ..truncation };
    }
    let module = std::sync::Arc::new(FreeGradedModule::tensor(&[g.module(), c.module()], |m| truncation.contains(m))?);
    let split = |x: &Name| -> (i64, Name) {
        let f = x.tensor_factors(2).expect("orbit model name");
        (f[0].degree() / 2, f[1].clone())
    };
    let pair = |n: i64, u: &Name| Name::tensor(vec![gamma_gen(n), u.clone()]);
    let keep = |e: Element, m: &FreeGradedModule| e.map_names(|y| m.contains(y).then(|| (Scalar::one(), y.clone())));
    let d = GradedMap::from_fn(module.clone(), module.clone(), -1, |x| {
        let (n, u) = split(x);
        let mut out = c.d().image(&u).map_names(|y| Some((Scalar::one(), pair(n, y))));
        for k in 0..n {
            let ku = a.apply((n - k - 1) as usize, &Element::basis(u.clone()));
            out.sub(&ku.map_names(|y| Some((Scalar::one(), pair(k, y)))));
        }
        keep(out, &module)
    })?;
    let complex = ChainComplex::new(d, truncation)?;
    let unit = c.unit().map(|u| pair(0, u));
    let counit = c.counit_map().iter().map(|(u, v)| (pair(0, u), v.clone())).filter(|(u, _)| module.contains(u)).collect();
    let square = crate::dgstruct::tensor_power_module(&complex, 2)?;
    let comult = GradedMap::from_fn(module.clone(), square.clone(), 0, |x| {
        let (n, u) = split(x);
        let du = c.delta(&u);
        let mut out = Element::zero();
        for k in 0..=n {
            out.add(&du.map_names(|p| {
                let f = p.tensor_factors(2).expect("binary tensor");
                Some((Scalar::one(), Name::tensor(vec![pair(k, f[0]), pair(n - k, f[1])])))
            }));
        }
        keep(out, &square)
    })?;
    Ok(DGCoalgebra::new(complex, comult, counit, unit)?)
}

/// `Λv♯ ⊗ C♯` as the machine dual of the orbit model, with `ω_n` on `C♯`.
#[derive(Clone, Debug)]
pub struct CochainOrbitModel {
    pub algebra: DGAlgebra,
    pub carrier_dual: DGAlgebra,
    pub omega: Vec<GradedMap>,
}

impl CochainOrbitModel {
    /// The name `(v♯)^k ⊗ α` for `α = U♯`, i.e. `(v(k)⊗U)♯`.
    pub fn name(k: i64, u: &Name) -> Name {
        Name::tensor(vec![gamma_gen(k), u.clone()]).dual().1
    }
}

pub fn cochain_orbit_model(a: &CircleAction, max_degree: i64) -> Result<CochainOrbitModel> {
    let orbit = orbit_model(a, max_degree)?;
    Ok(CochainOrbitModel {
        algebra: dual_algebra(&orbit)?,
        carrier_dual: dual_algebra(&a.carrier)?,
        omega: (0..a.reach()).map(|n| a.omega(n)).collect(),
    })
}

/// A graded ring over a field in cohomological degrees `0..=top`, presented by
/// chosen homology classes, generators and minimal relations.
#[derive(Clone, Debug)]
pub struct CohomologyRing {
    pub ring: CoeffRing,
    pub top: i64,
    pub classes: BTreeMap<i64, FieldHomology>,
    /// Products of basis classes `(p, i)·(q, j)` in the basis of degree `p+q`.
    pub table: BTreeMap<(i64, usize, i64, usize), Vec<Scalar>>,
    /// Generators as `(degree, class index)`.
    pub generators: Vec<(i64, usize)>,
    pub relations: Vec<Relation>,
}

/// `Σ c·g_{i₁}⋯g_{i_r} = 0` with generator indices in nondecreasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub degree: i64,
    pub terms: Vec<(Scalar, Vec<usize>)>,
}

impl CohomologyRing {
    pub fn dim(&self, m: i64) -> usize {
        self.classes.get(&m).map_or(0, |h| h.dim())
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..=self.top).map(|m| self.dim(m)).collect()
    }

    /// Product of class vectors `a ∈ H^p`, `b ∈ H^q` for `p + q ≤ top`.
    pub fn multiply(&self, p: i64, a: &[Scalar], q: i64, b: &[Scalar]) -> Result<Vec<Scalar>> {
        if p + q > self.top {
            return Err(CircleError::Undetermined(p + q));
        }
        let mut out = vec![Scalar::zero(); self.dim(p + q)];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                for (o, z) in out.iter_mut().zip(&self.table[&(p, i, q, j)]) {
                    *o = self.ring.add(o, &self.ring.mul(&self.ring.mul(x, y), z));
                }
            }
        }
        Ok(out)
    }

    pub fn generator_degree(&self, g: usize) -> i64 {
        self.generators[g].0
    }

    fn unit_vector(&self, m: i64, i: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.dim(m)];
        v[i] = Scalar::one();
        v
    }

    /// Value of the product of the listed generators, in order; `gens` is nonempty.
    pub fn monomial(&self, gens: &[usize]) -> Result<(i64, Vec<Scalar>)> {
        let (d, i) = self.generators[gens[0]];
        let mut acc = (d, self.unit_vector(d, i));
        for &g in &gens[1..] {
            let (d, i) = self.generators[g];
            acc = (acc.0 + d, self.multiply(acc.0, &acc.1, d, &self.unit_vector(d, i))?);
        }
        Ok(acc)
    }
}

/// Cohomology ring of a cochain algebra (names in nonpositive homological
/// degrees) through cohomological degree `top`, over a field.
pub fn cohomology_ring(algebra: &DGAlgebra, top: i64) -> Result<CohomologyRing> {
    let ring = algebra.ring().clone();
    if !ring.is_field() {
        return Err(CircleError::NotAField(ring));
    }
    let mut classes = BTreeMap::new();
    for m in 0..=top {
        classes.insert(m, FieldHomology::compute(algebra.complex(), &ring, -m)?);
    }
    let mut table = BTreeMap::new();
    for p in 0..=top {
        for q in 0..=top - p {
            for (i, x) in classes[&p].representatives.iter().enumerate() {
                for (j, y) in classes[&q].representatives.iter().enumerate() {
                    table.insert((p, i, q, j), classes[&(p + q)].coordinates(&algebra.mul(x, y))?);
                }
            }
        }
    }
    let mut r = CohomologyRing { ring, top, classes, table, generators: Vec::new(), relations: Vec::new() };
    choose_generators(&mut r)?;
    find_relations(&mut r)?;
    Ok(r)
}

/// Whether `v` lies outside the span of `rows`.
fn extends_span(rows: &[Vec<Scalar>], v: &[Scalar], ring: &CoeffRing) -> Result<bool> {
    if v.iter().all(|x| ring.is_zero(x)) {
        return Ok(false);
    }
    let cols: Vec<&Vec<Scalar>> = rows.iter().collect();
    let mut m = SparseMatrix::zero(v.len(), cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, x) in c.iter().enumerate() {
            m.add_to(i, j, x);
        }
    }
    Ok(exactlin::solve(&m, v, ring)?.is_none())
}

/// Generators in each degree extend the span of decomposables by standard classes.
fn choose_generators(r: &mut CohomologyRing) -> Result<()> {
    for m in 1..=r.top {
        let mut span: Vec<Vec<Scalar>> = Vec::new();
        for p in 1..m {
            for i in 0..r.dim(p) {
                for j in 0..r.dim(m - p) {
                    span.push(r.table[&(p, i, m - p, j)].clone());
                }
            }
        }
        for i in 0..r.dim(m) {
            let e = r.unit_vector(m, i);
            if extends_span(&span, &e, &r.ring)? {
                span.push(e);
                r.generators.push((m, i));
            }
        }
    }
    Ok(())
}

/// Nondecreasing generator sequences of total degree `m` and length at least 2.
fn monomials(degrees: &[i64], m: i64) -> Vec<Vec<usize>> {
    fn go(degrees: &[i64], from: usize, left: i64, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            if cur.len() >= 2 {
                out.push(cur.clone());
            }
            return;
        }
        for g in from..degrees.len() {
            if degrees[g] <= left {
                cur.push(g);
                go(degrees, g, left - degrees[g], cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(degrees, 0, m, &mut Vec::new(), &mut out);
    out
}

/// `g·m` sorted into nondecreasing order with its graded commutativity sign.
fn insert_generator(degrees: &[i64], g: usize, m: &[usize]) -> (Scalar, Vec<usize>) {
    let pos = m.partition_point(|&h| h < g);
    let passed: i64 = m[..pos].iter().map(|&h| degrees[h]).sum();
    let mut out = m.to_vec();
    out.insert(pos, g);
    (sign(degrees[g] * passed), out)
}

/// Minimal relations: kernel vectors of monomial evaluation outside the ideal
/// generated by lower relations.
fn find_relations(r: &mut CohomologyRing) -> Result<()> {
    let ring = r.ring.clone();
    let degrees: Vec<i64> = r.generators.iter().map(|g| g.0).collect();
    let mut kernels: BTreeMap<i64, (Vec<Vec<usize>>, Vec<Vec<Scalar>>)> = BTreeMap::new();
    for m in 2..=r.top {
        let monos = monomials(&degrees, m);
        let index: BTreeMap<&Vec<usize>, usize> = monos.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let mut eval = SparseMatrix::zero(r.dim(m), monos.len());
        for (j, mono) in monos.iter().enumerate() {
            for (i, x) in r.monomial(mono)?.1.iter().enumerate() {
                eval.add_to(i, j, x);
            }
        }
        let kernel = exactlin::kernel_basis(&eval, &ring)?;
        let mut span: Vec<Vec<Scalar>> = Vec::new();
        for (g, &dg) in degrees.iter().enumerate() {
            let Some((lower, vectors)) = kernels.get(&(m - dg)) else { continue };
            for v in vectors {
                let mut w = vec![Scalar::zero(); monos.len()];
                for (c, mono) in v.iter().zip(lower) {
                    if ring.is_zero(c) {
                        continue;
                    }
                    let (s, prod) = insert_generator(&degrees, g, mono);
                    let k = index[&prod];
                    w[k] = ring.add(&w[k], &ring.mul(&s, c));
                }
                span.push(w);
            }
        }
        for v in &kernel {
            if extends_span(&span, v, &ring)? {
                span.push(v.clone());
                let terms = v.iter().zip(&monos).filter(|(c, _)| !ring.is_zero(c)).map(|(c, x)| (c.clone(), x.clone())).collect();
                r.relations.push(Relation { degree: m, terms });
            }
        }
        kernels.insert(m, (monos, kernel));
    }
    Ok(())
}

/// `H^*` of the orbit cochain algebra through degree `top`.
pub fn orbit_cohomology_ring(a: &CircleAction, field: &CoeffRing, top: i64) -> Result<CohomologyRing> {
    if !field.is_field() {
        return Err(CircleError::NotAField(field.clone()));
    }
    let a = if a.ring() == field { a.clone() } else { a.over_ring(field)? };
    let model = cochain_orbit_model(&a, top + 1)?;
    cohomology_ring(&model.algebra, top)
}

/// The operator `ϖ: H^m → H^{m−1}` induced by `ω₀` on the carrier cohomology.
#[derive(Clone, Debug)]
pub struct BvOperator {
    pub ring: CohomologyRing,
    /// `matrices[m]` maps the basis of `H^m` to that of `H^{m−1}`.
    pub matrices: BTreeMap<i64, SparseMatrix>,
    /// `ϖ² = 0` and the derivation rule on the computed ring.
    pub report: CheckReport,
}

pub fn bv_operator(a: &CircleAction, field: &CoeffRing, top: i64) -> Result<BvOperator> {
    if !field.is_field() {
        return Err(CircleError::NotAField(field.clone()));
    }
    let a = if a.ring() == field { a.clone() } else { a.over_ring(field)? };
    let dual = dual_algebra(&a.carrier)?;
    let ring = cohomology_ring(&dual, top)?;
    let omega = a.omega(0);
    let mut matrices = BTreeMap::new();
    for m in 1..=top {
        matrices.insert(m, induced_on_homology(&omega, &ring.classes[&m], &ring.classes[&(m - 1)])?);
    }
    let mut report = CheckReport::new("BV operator").with_window(0, top);
    for m in 2..=top {
        report.tick();
        let sq = matrices[&(m - 1)].mul(&matrices[&m])?;
        if !sq.is_zero_in(field) {
            report.fail("ϖ² = 0", format!("H^{m}"), format!("{:?}", sq.to_dense()));
        }
    }
    let apply = |m: i64, v: &[Scalar]| -> Result<Vec<Scalar>> {
        if m == 0 {
            return Ok(Vec::new());
        }
        Ok(matrices[&m].mul_vec(v)?.iter().map(|x| field.reduce(x).expect("field element")).collect())
    };
    for p in 0..=top {
        for q in 0..=top - p {
            if p + q == 0 {
                continue;
            }
            for i in 0..ring.dim(p) {
                for j in 0..ring.dim(q) {
                    let (x, y) = (ring.unit_vector(p, i), ring.unit_vector(q, j));
                    let lhs = apply(p + q, &ring.multiply(p, &x, q, &y)?)?;
                    let mut rhs = vec![Scalar::zero(); ring.dim(p + q - 1)];
                    if p > 0 {
                        for (o, z) in rhs.iter_mut().zip(ring.multiply(p - 1, &apply(p, &x)?, q, &y)?) {
                            *o = field.add(o, &z);
                        }
                    }
                    if q > 0 {
                        let s = sign(p);
                        for (o, z) in rhs.iter_mut().zip(ring.multiply(p, &x, q - 1, &apply(q, &y)?)?) {
                            *o = field.add(o, &field.mul(&s, &z));
                        }
                    }
                    report.tick();
                    if lhs.iter().zip(&rhs).any(|(l, r)| !field.is_zero(&field.sub(l, r))) {
                        report.fail("ϖ derivation", format!("({p},{i})·({q},{j})"), format!("{lhs:?} vs {rhs:?}"));
                    }
                }
            }
        }
    }
    Ok(BvOperator { ring, matrices, report })
}
