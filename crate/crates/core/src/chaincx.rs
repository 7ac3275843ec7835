//! Chain complexes on a truncated degree window, homology over every
//! supported ring, chain maps and mapping cones.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactlin::{self, CoeffRing, ExactLinError, Scalar, SparseMatrix};
use crate::graded::{apply_at, sign, Element, FreeGradedModule, GradedError, GradedMap, Name};
use crate::report::CheckReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("a differential must be an endomorphism of degree -1, found degree {0}")]
    NotADifferential(i64),
    #[error("basis element in degree {degree} lies outside the window {min}..={max}")]
    OutsideWindow { degree: i64, min: i64, max: i64 },
    #[error("degree {0} depends on data beyond the truncation")]
    Undetermined(i64),
    #[error("modules of the map and the complexes do not match")]
    ModuleMismatch,
    #[error("not a chain map: {0}")]
    NotAChainMap(String),
    #[error("{0} is not a field")]
    NotAField(CoeffRing),
    #[error("{0} is not a cycle")]
    NotACycle(String),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Linear(#[from] ExactLinError),
}

pub type Result<T> = std::result::Result<T, ChainError>;

/// Degrees `min..=max` are computed. A bounded side means every degree past
/// it is zero; an unbounded side means it is unknown.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub min: i64,
    pub max: i64,
    pub bounded_below: bool,
    pub bounded_above: bool,
}

impl Truncation {
    /// Nonnegatively graded, known through `max`.
    pub fn up_to(max: i64) -> Self {
        Truncation { min: 0, max, bounded_below: true, bounded_above: false }
    }

    /// Complete: zero outside `min..=max`.
    pub fn exact(min: i64, max: i64) -> Self {
        Truncation { min, max, bounded_below: true, bounded_above: true }
    }

    pub fn dual(&self) -> Self {
        Truncation { min: -self.max, max: -self.min, bounded_below: self.bounded_above, bounded_above: self.bounded_below }
    }

    /// Whether `d: C_m → C_{m−1}` is fully known.
    pub fn knows_differential(&self, m: i64) -> bool {
        (m <= self.max || self.bounded_above) && (m > self.min || self.bounded_below)
    }

    pub fn determines_homology(&self, m: i64) -> bool {
        self.knows_differential(m) && self.knows_differential(m + 1)
    }

    pub fn contains(&self, m: i64) -> bool {
        (self.min..=self.max).contains(&m)
    }
}

/// Window on which a tensor product of truncated complexes is fully known.
pub fn tensor_truncation(ts: &[Truncation]) -> Truncation {
    let sum_min: i64 = ts.iter().map(|t| t.min).sum();
    let sum_max: i64 = ts.iter().map(|t| t.max).sum();
    let bounded_below = ts.iter().all(|t| t.bounded_below);
    let bounded_above = ts.iter().all(|t| t.bounded_above);
    let max = if bounded_above {
        sum_max
    } else {
        ts.iter().filter(|t| !t.bounded_above).map(|t| t.max + sum_min - t.min).min().expect("an unbounded factor")
    };
    let min = if bounded_below {
        sum_min
    } else {
        ts.iter().filter(|t| !t.bounded_below).map(|t| t.min + sum_max - t.max).max().expect("an unbounded factor")
    };
    Truncation { min, max, bounded_below, bounded_above }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplex {
    d: GradedMap,
    truncation: Truncation,
}

impl ChainComplex {
    pub fn new(d: GradedMap, truncation: Truncation) -> Result<Self> {
        if d.degree() != -1 || *d.source() != *d.target() {
            return Err(ChainError::NotADifferential(d.degree()));
        }
        if let Some(deg) = d.source().degrees().find(|x| !truncation.contains(*x)) {
            return Err(ChainError::OutsideWindow { degree: deg, min: truncation.min, max: truncation.max });
        }
        Ok(ChainComplex { d, truncation })
    }

    /// Complex with zero differential.
    pub fn zero_differential(module: Arc<FreeGradedModule>, truncation: Truncation) -> Result<Self> {
        Self::new(GradedMap::zero(module.clone(), module, -1), truncation)
    }

    pub fn module(&self) -> &Arc<FreeGradedModule> {
        self.d.source()
    }

    pub fn differential(&self) -> &GradedMap {
        &self.d
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn ring(&self) -> &CoeffRing {
        self.d.ring()
    }

    pub fn degrees(&self) -> RangeInclusive<i64> {
        self.truncation.min..=self.truncation.max
    }

    /// Checks `d∘d = 0` on every degree where both factors are known.
    pub fn verify_differential(&self) -> CheckReport {
        self.verify_differential_in(self.ring())
    }

    pub fn verify_differential_in(&self, ring: &CoeffRing) -> CheckReport {
        let t = self.truncation;
        let mut report = CheckReport::new("differential squares to zero").with_window(t.min, t.max);
        for m in t.min..=t.max {
            if !(t.knows_differential(m) && t.knows_differential(m - 1)) {
                continue;
            }
            for x in self.module().basis(m) {
                let dd = self.d.apply(&self.d.image(x));
                report.tick();
                if !dd.is_zero_in(ring) {
                    report.fail("d∘d = 0", x, dd.reduced(ring));
                }
            }
        }
        report
    }

    /// Tensor product with `D = Σ_i 1^{⊗i} ⊗ d ⊗ 1^{⊗rest}` and Koszul signs,
    /// restricted to the degrees where every summand is known.
    pub fn tensor(factors: &[&ChainComplex]) -> Result<ChainComplex> {
        let truncation = tensor_truncation(&factors.iter().map(|c| c.truncation()).collect::<Vec<_>>());
        let mods: Vec<&FreeGradedModule> = factors.iter().map(|c| c.module().as_ref()).collect();
        let module = Arc::new(FreeGradedModule::tensor(&mods, |m| truncation.contains(m))?);
        let k = factors.len();
        let d = GradedMap::from_fn(module.clone(), module.clone(), -1, |n| {
            let x = Element::basis(n.clone());
            let mut e = Element::zero();
            for (i, c) in factors.iter().enumerate() {
                e.add(&apply_at(&x, k, i, -1, 1, |y| c.differential().image(y)));
            }
            e.map_names(|y| module.contains(y).then(|| (Scalar::one(), y.clone())))
        })?;
        ChainComplex::new(d, truncation)
    }

    /// Forgets everything above `max`; the result is unbounded above.
    pub fn truncate_above(&self, max: i64) -> Result<ChainComplex> {
        if max >= self.truncation.max {
            return Ok(self.clone());
        }
        let module = Arc::new(self.module().restrict(|m| m <= max));
        let d = GradedMap::from_fn(module.clone(), module.clone(), -1, |n| self.d.image(n))?;
        let t = Truncation { max: max.min(self.truncation.max), bounded_above: false, ..self.truncation };
        ChainComplex::new(d, t)
    }

    pub fn dual(&self) -> ChainComplex {
        ChainComplex { d: self.d.dualize(), truncation: self.truncation.dual() }
    }

    pub fn homology(&self, ring: &CoeffRing, degrees: RangeInclusive<i64>) -> Result<HomologyResult> {
        let mut cache: BTreeMap<i64, Vec<BigInt>> = BTreeMap::new();
        let mut groups = BTreeMap::new();
        for m in degrees {
            groups.insert(m, self.group_at(ring, m, &mut cache)?);
        }
        Ok(HomologyResult { ring: ring.clone(), groups })
    }

    /// Homology on the whole computed window.
    pub fn homology_all(&self, ring: &CoeffRing) -> Result<HomologyResult> {
        self.homology(ring, self.degrees())
    }

    /// `H^n` is computed as `H_{−n}` of the dual complex.
    pub fn cohomology(&self, ring: &CoeffRing, degrees: RangeInclusive<i64>) -> Result<HomologyResult> {
        let dual = self.dual();
        let mut groups = BTreeMap::new();
        for n in degrees {
            let h = dual.homology(ring, -n..=-n)?;
            groups.insert(n, h.groups[&-n].clone());
        }
        Ok(HomologyResult { ring: ring.clone(), groups })
    }

    /// Invariant factors of `d_m` in `ring`: nonzero diagonal entries of its
    /// Smith form over the integers, a run of ones of length rank over fields.
    fn boundary_invariants(&self, ring: &CoeffRing, m: i64, cache: &mut BTreeMap<i64, Vec<BigInt>>) -> Result<Vec<BigInt>> {
        if let Some(v) = cache.get(&m) {
            return Ok(v.clone());
        }
        let mat = self.d.matrix_at(m);
        let inv = match ring {
            CoeffRing::Integers => exactlin::invariant_factors(&mat)?,
            _ => vec![BigInt::one(); exactlin::rank(&mat, ring)?],
        };
        cache.insert(m, inv.clone());
        Ok(inv)
    }

    fn group_at(&self, ring: &CoeffRing, m: i64, cache: &mut BTreeMap<i64, Vec<BigInt>>) -> Result<HomologyGroup> {
        let t = self.truncation;
        if !t.contains(m) {
            let zero_side = (m < t.min && t.bounded_below) || (m > t.max && t.bounded_above);
            return Ok(if zero_side { HomologyGroup::zero() } else { HomologyGroup::Undetermined });
        }
        if !t.determines_homology(m) {
            return Ok(HomologyGroup::Undetermined);
        }
        let out = self.boundary_invariants(ring, m, cache)?;
        let inc = self.boundary_invariants(ring, m + 1, cache)?;
        let rank = self.module().dim(m) - out.len() - inc.len();
        let torsion = inc.into_iter().filter(|d| !d.is_one()).collect();
        Ok(HomologyGroup::Known { rank, torsion })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomologyGroup {
    /// Free part of rank `rank` (dimension over a field) plus cyclic torsion.
    Known { rank: usize, torsion: Vec<BigInt> },
    Undetermined,
}

impl HomologyGroup {
    pub fn zero() -> Self {
        HomologyGroup::Known { rank: 0, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, HomologyGroup::Known { rank: 0, torsion } if torsion.is_empty())
    }

    pub fn rank(&self) -> Option<usize> {
        match self {
            HomologyGroup::Known { rank, .. } => Some(*rank),
            HomologyGroup::Undetermined => None,
        }
    }

    pub fn render(&self, ring: &CoeffRing) -> String {
        match self {
            HomologyGroup::Undetermined => "undetermined".to_string(),
            HomologyGroup::Known { rank, torsion } => {
                let mut parts = Vec::new();
                match rank {
                    0 => {}
                    1 => parts.push(ring.to_string()),
                    r => parts.push(format!("{ring}^{r}")),
                }
                parts.extend(torsion.iter().map(|d| format!("Z/{d}")));
                if parts.is_empty() {
                    "0".to_string()
                } else {
                    parts.join(" + ")
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyResult {
    pub ring: CoeffRing,
    pub groups: BTreeMap<i64, HomologyGroup>,
}

impl HomologyResult {
    pub fn get(&self, m: i64) -> Option<&HomologyGroup> {
        self.groups.get(&m)
    }

    /// Ranks (dimensions) per degree; `None` where undetermined.
    pub fn ranks(&self) -> Vec<Option<usize>> {
        self.groups.values().map(HomologyGroup::rank).collect()
    }

    /// The ground ring in degree 0 and nothing else on the computed degrees.
    pub fn is_ground_ring_in_degree_zero(&self) -> bool {
        self.groups.iter().all(|(&m, g)| match m {
            0 => *g == HomologyGroup::Known { rank: 1, torsion: Vec::new() },
            _ => g.is_zero(),
        })
    }

    pub fn is_undetermined_anywhere(&self) -> bool {
        self.groups.values().any(|g| *g == HomologyGroup::Undetermined)
    }
}

impl fmt::Display for HomologyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.groups.iter().map(|(m, g)| format!("H{m}={}", g.render(&self.ring))).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Degree-preserving map between chain complexes (checked by [`ChainMap::check`]).
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: ChainComplex,
    pub target: ChainComplex,
    pub map: GradedMap,
}

impl ChainMap {
    pub fn new(source: ChainComplex, target: ChainComplex, map: GradedMap) -> Result<Self> {
        if **map.source() != **source.module() || **map.target() != **target.module() || map.degree() != 0 {
            return Err(ChainError::ModuleMismatch);
        }
        Ok(ChainMap { source, target, map })
    }

    pub fn identity(c: &ChainComplex) -> Self {
        ChainMap { source: c.clone(), target: c.clone(), map: GradedMap::identity(c.module().clone()) }
    }

    /// `d∘f = f∘d` wherever both sides are known.
    pub fn check(&self) -> CheckReport {
        check_commutes(&self.map, &self.source, &self.target)
    }

    pub fn compose(&self, first: &ChainMap) -> Result<ChainMap> {
        ChainMap::new(first.source.clone(), self.target.clone(), self.map.compose(&first.map)?)
    }

    /// Cone with `Cone_n = A_{n−1} ⊕ B_n` and `D(sa, b) = (−s da, f(a) + db)`.
    pub fn cone(&self) -> Result<ChainComplex> {
        let (ta, tb) = (self.source.truncation(), self.target.truncation());
        let min = match (ta.bounded_below, tb.bounded_below) {
            (true, true) => (ta.min + 1).min(tb.min),
            (true, false) => tb.min,
            (false, true) => ta.min + 1,
            (false, false) => (ta.min + 1).max(tb.min),
        };
        let max = match (ta.bounded_above, tb.bounded_above) {
            (true, true) => (ta.max + 1).max(tb.max),
            (true, false) => tb.max,
            (false, true) => ta.max + 1,
            (false, false) => (ta.max + 1).min(tb.max),
        };
        let truncation = Truncation {
            min,
            max,
            bounded_below: ta.bounded_below && tb.bounded_below,
            bounded_above: ta.bounded_above && tb.bounded_above,
        };
        let src_name = |a: &Name| Name::shift(1, Name::tag("src", a.clone()));
        let tgt_name = |b: &Name| Name::tag("tgt", b.clone());
        let names = self
            .source
            .module()
            .names()
            .map(src_name)
            .chain(self.target.module().names().map(tgt_name))
            .filter(|n| truncation.contains(n.degree()));
        let module = Arc::new(FreeGradedModule::new(self.source.ring().clone(), names)?);
        let d = GradedMap::from_fn(module.clone(), module.clone(), -1, |n| {
            let e = match n {
                Name::Shift { inner, .. } => match inner.as_ref() {
                    Name::Tag(_, a) => {
                        let mut e = self.source.differential().image(a).map_names(|x| Some((-Scalar::one(), src_name(x))));
                        e.add(&self.map.image(a).map_names(|y| Some((Scalar::one(), tgt_name(y)))));
                        e
                    }
                    _ => unreachable!("cone names are tagged"),
                },
                Name::Tag(_, b) => self.target.differential().image(b).map_names(|y| Some((Scalar::one(), tgt_name(y)))),
                _ => unreachable!("cone names are tagged"),
            };
            e.map_names(|x| module.contains(x).then(|| (Scalar::one(), x.clone())))
        })?;
        ChainComplex::new(d, truncation)
    }

    /// Whether the cone is acyclic in all degrees `≤ up_to`: `f` is then an
    /// isomorphism on `H_n` for `n < up_to` and onto in degree `up_to`.
    pub fn is_quasi_iso(&self, ring: &CoeffRing, up_to: i64) -> Result<bool> {
        let report = self.check();
        if !report.passed() {
            return Err(ChainError::NotAChainMap(report.to_string()));
        }
        let cone = self.cone()?;
        let t = cone.truncation();
        let lo = if t.bounded_below { t.min } else { t.min + 1 };
        let h = cone.homology(ring, lo..=up_to)?;
        if let Some((&m, _)) = h.groups.iter().find(|(_, g)| **g == HomologyGroup::Undetermined) {
            return Err(ChainError::Undetermined(m));
        }
        Ok(h.groups.values().all(HomologyGroup::is_zero))
    }
}

/// Checks `d_T∘f = (−1)^{|f|} f∘d_S` on every source basis element where both
/// sides are determined.
pub fn check_commutes(f: &GradedMap, source: &ChainComplex, target: &ChainComplex) -> CheckReport {
    let ring = source.ring();
    let (ts, tt) = (source.truncation(), target.truncation());
    let mut report = CheckReport::new("commutes with differentials").with_window(ts.min, ts.max);
    let s = sign(f.degree());
    for x in source.module().names() {
        let m = x.degree();
        if !ts.knows_differential(m) || !tt.knows_differential(m + f.degree()) {
            continue;
        }
        // f∘d(x) must land inside the target's known window
        if !tt.contains(m - 1 + f.degree()) && !tt.bounded_below {
            continue;
        }
        let mut r = target.differential().apply(&f.image(x));
        r.add_scaled(&f.apply(&source.differential().image(x)), &-s.clone());
        report.tick();
        if !r.is_zero_in(ring) {
            report.fail("d∘f = ±f∘d", x, r.reduced(ring));
        }
    }
    report
}

/// Chosen homology basis in one degree over a field.
#[derive(Clone, Debug)]
pub struct FieldHomology {
    pub degree: i64,
    ring: CoeffRing,
    module: Arc<FreeGradedModule>,
    /// Representative cycles, one per basis class.
    pub representatives: Vec<Element>,
    /// Columns: boundaries, then representatives.
    presentation: SparseMatrix,
    boundary_count: usize,
}

impl FieldHomology {
    /// Representatives are the kernel vectors that stay independent after all
    /// boundaries, scanned in kernel-basis order.
    pub fn compute(c: &ChainComplex, ring: &CoeffRing, m: i64) -> Result<Self> {
        if !ring.is_field() {
            return Err(ChainError::NotAField(ring.clone()));
        }
        if !c.truncation().determines_homology(m) {
            return Err(ChainError::Undetermined(m));
        }
        let module = c.module().clone();
        let n = module.dim(m);
        let kernel = exactlin::kernel_basis(&c.differential().matrix_at(m), ring)?;
        let bd = c.differential().matrix_at(m + 1).reduced(ring)?;
        let nb = bd.cols();
        let mut stacked = SparseMatrix::zero(n, nb + kernel.len());
        for (i, j, x) in bd.entries() {
            stacked.add_to(i, j, x);
        }
        for (k, v) in kernel.iter().enumerate() {
            for (i, x) in v.iter().enumerate() {
                stacked.add_to(i, nb + k, x);
            }
        }
        let e = exactlin::rref(&stacked, ring)?;
        let chosen: Vec<usize> = e.pivots.iter().filter(|&&p| p >= nb).map(|&p| p - nb).collect();
        let mut presentation = SparseMatrix::zero(n, nb + chosen.len());
        for (i, j, x) in bd.entries() {
            presentation.add_to(i, j, x);
        }
        let mut representatives = Vec::new();
        for (k, &idx) in chosen.iter().enumerate() {
            for (i, x) in kernel[idx].iter().enumerate() {
                presentation.add_to(i, nb + k, x);
            }
            representatives.push(module.element_from(m, &kernel[idx]));
        }
        Ok(FieldHomology { degree: m, ring: ring.clone(), module, representatives, presentation, boundary_count: nb })
    }

    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    /// Coordinates of the class of the cycle `z` in the chosen basis.
    pub fn coordinates(&self, z: &Element) -> Result<Vec<Scalar>> {
        let v = self.module.coords(self.degree, z);
        if self.representatives.is_empty() && v.iter().all(|x| self.ring.is_zero(x)) {
            return Ok(Vec::new());
        }
        let x = exactlin::solve(&self.presentation, &v, &self.ring)?.ok_or_else(|| ChainError::NotACycle(z.to_string()))?;
        Ok(x[self.boundary_count..].iter().map(|c| self.ring.reduce(c).expect("field element")).collect())
    }
}

/// Matrix of the map induced by `f` from `src` classes to `tgt` classes.
pub fn induced_on_homology(f: &GradedMap, src: &FieldHomology, tgt: &FieldHomology) -> Result<SparseMatrix> {
    let mut m = SparseMatrix::zero(tgt.dim(), src.dim());
    for (j, r) in src.representatives.iter().enumerate() {
        let c = tgt.coordinates(&f.apply(r))?;
        for (i, x) in c.iter().enumerate() {
            m.add_to(i, j, x);
        }
    }
    Ok(m)
}

/// Zero test in a ring for a vector of scalars.
pub fn vector_is_zero(ring: &CoeffRing, v: &[Scalar]) -> bool {
    v.iter().all(|x| ring.is_zero(x) || x.is_zero())
}
