//! Free graded modules with structured basis names, homogeneous elements and
//! graded maps. Every Koszul sign used elsewhere in the crate is produced by a
//! helper in this module.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactlin::{CoeffRing, Scalar, SparseMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("coefficient rings differ: {0} and {1}")]
    RingMismatch(CoeffRing, CoeffRing),
    #[error("basis name `{0}` appears twice")]
    DuplicateName(String),
    #[error("`{0}` is not a basis element of the {1} module")]
    UnknownName(String, &'static str),
    #[error("`{name}` has degree {found}, expected {expected}")]
    DegreeMismatch { name: String, expected: i64, found: i64 },
    #[error("malformed permutation {0:?} for {1} degrees")]
    MalformedPermutation(Vec<usize>, usize),
    #[error("maps do not share source and target modules")]
    ModuleMismatch,
}

pub type Result<T> = std::result::Result<T, GradedError>;

/// `(−1)^e` as a scalar.
pub fn sign(e: i64) -> Scalar {
    if e.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// Sign of moving graded symbols into the order given by `perm`, where
/// `perm[i]` is the original index of the symbol ending up in position `i`.
/// Each inverted pair of symbols `a`, `b` contributes `(−1)^{|a||b|}`.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Result<i64> {
    let n = degrees.len();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(GradedError::MalformedPermutation(perm.to_vec(), n));
    }
    let mut e = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            if perm[i] > perm[j] {
                e += degrees[perm[i]] * degrees[perm[j]];
            }
        }
    }
    Ok(if e.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// Sign of `(f₁⊗⋯⊗f_k)(v₁⊗⋯⊗v_k)`: each map passes the symbols to its left.
pub fn tensor_map_sign(map_degrees: &[i64], elem_degrees: &[i64]) -> Scalar {
    let mut e = 0i64;
    let mut passed = 0i64;
    for (f, v) in map_degrees.iter().zip(elem_degrees) {
        e += f * passed;
        passed += v;
    }
    sign(e)
}

/// Sign in `f♯(w♯) = (−1)^{|f||w|} Σ f_{w,x} x♯`.
pub fn dual_map_sign(map_degree: i64, target_degree: i64) -> Scalar {
    sign(map_degree * target_degree)
}

/// Coefficient sign of `c♯` in `x♯·y♯` when the product is dual to a diagonal
/// with `Δc ∋ x⊗y`: evaluating `x♯⊗y♯` on `x⊗y` moves `y♯` past `x`.
pub fn dual_product_sign(x_degree: i64, y_degree: i64) -> Scalar {
    sign(x_degree * y_degree)
}

/// Sign of `(a⊗b)(a′⊗b′) = ± aa′⊗bb′` in a tensor product of algebras.
pub fn tensor_algebra_sign(b_degree: i64, a2_degree: i64) -> Scalar {
    sign(b_degree * a2_degree)
}

/// Structured basis name. The derived order is the canonical order within a degree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Name {
    Unit,
    Gen { degree: i64, label: String },
    Shift { by: i64, inner: Box<Name> },
    /// Word in a tensor algebra or coalgebra; the empty word is its unit.
    Word(Vec<Name>),
    /// Element of a tensor product of modules; one entry per factor.
    Tensor(Vec<Name>),
    Dual(Box<Name>),
    Tag(String, Box<Name>),
}

impl Name {
    pub fn gen(label: impl Into<String>, degree: i64) -> Name {
        Name::Gen { degree, label: label.into() }
    }

    /// `s^by(inner)`, merging nested shifts.
    pub fn shift(by: i64, inner: Name) -> Name {
        let (by, inner) = match inner {
            Name::Shift { by: b, inner } => (by + b, *inner),
            other => (by, other),
        };
        if by == 0 {
            inner
        } else {
            Name::Shift { by, inner: Box::new(inner) }
        }
    }

    pub fn word(letters: Vec<Name>) -> Name {
        Name::Word(letters)
    }

    pub fn empty_word() -> Name {
        Name::Word(Vec::new())
    }

    pub fn tag(tag: impl Into<String>, inner: Name) -> Name {
        Name::Tag(tag.into(), Box::new(inner))
    }

    /// Name of the tensor product of the given factors; a single factor is itself.
    pub fn tensor(mut factors: Vec<Name>) -> Name {
        if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            Name::Tensor(factors)
        }
    }

    /// The dual basis element, with the identification `x♯♯ = (−1)^{|x|} x`.
    pub fn dual(&self) -> (Scalar, Name) {
        match self {
            Name::Dual(inner) => (sign(inner.degree()), (**inner).clone()),
            other => (Scalar::one(), Name::Dual(Box::new(other.clone()))),
        }
    }

    pub fn degree(&self) -> i64 {
        match self {
            Name::Unit => 0,
            Name::Gen { degree, .. } => *degree,
            Name::Shift { by, inner } => by + inner.degree(),
            Name::Word(v) | Name::Tensor(v) => v.iter().map(Name::degree).sum(),
            Name::Dual(inner) => -inner.degree(),
            Name::Tag(_, inner) => inner.degree(),
        }
    }

    /// Splits into `k` tensor factors; for `k = 1` the name is its own factor.
    pub fn tensor_factors(&self, k: usize) -> Option<Vec<&Name>> {
        match (k, self) {
            (1, n) => Some(vec![n]),
            (_, Name::Tensor(v)) if v.len() == k => Some(v.iter().collect()),
            _ => None,
        }
    }

    pub fn word_letters(&self) -> Option<&[Name]> {
        match self {
            Name::Word(v) => Some(v),
            _ => None,
        }
    }

    /// Removes all nesting of tensor names.
    pub fn flatten_tensor(&self) -> Vec<Name> {
        match self {
            Name::Tensor(v) => v.iter().flat_map(Name::flatten_tensor).collect(),
            other => vec![other.clone()],
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Name::Unit => write!(f, "1"),
            Name::Gen { label, .. } => write!(f, "{label}"),
            Name::Shift { by: 1, inner } => write!(f, "s({inner})"),
            Name::Shift { by, inner } => write!(f, "s^{by}({inner})"),
            Name::Word(v) => {
                write!(f, "[")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, "|")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
            Name::Tensor(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ⊗ ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Name::Dual(inner) => write!(f, "({inner})#"),
            Name::Tag(t, inner) => write!(f, "{t}:{inner}"),
        }
    }
}

/// Free graded module with a finite named basis in each degree.
#[derive(Clone, Debug)]
pub struct FreeGradedModule {
    ring: CoeffRing,
    basis: BTreeMap<i64, Vec<Name>>,
    index: HashMap<Name, (i64, usize)>,
}

impl PartialEq for FreeGradedModule {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.basis == other.basis
    }
}

impl Eq for FreeGradedModule {}

impl FreeGradedModule {
    /// Module on the given names, each placed in its structural degree.
    pub fn new(ring: CoeffRing, names: impl IntoIterator<Item = Name>) -> Result<Self> {
        let mut basis: BTreeMap<i64, Vec<Name>> = BTreeMap::new();
        for n in names {
            basis.entry(n.degree()).or_default().push(n);
        }
        for v in basis.values_mut() {
            v.sort();
            if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
                return Err(GradedError::DuplicateName(w[0].to_string()));
            }
        }
        basis.retain(|_, v| !v.is_empty());
        let index = basis
            .iter()
            .flat_map(|(&d, v)| v.iter().enumerate().map(move |(i, n)| (n.clone(), (d, i))))
            .collect();
        Ok(FreeGradedModule { ring, basis, index })
    }

    pub fn zero(ring: CoeffRing) -> Self {
        FreeGradedModule { ring, basis: BTreeMap::new(), index: HashMap::new() }
    }

    /// The ground ring concentrated in degree 0 with basis `1`.
    pub fn ground(ring: CoeffRing, unit: Name) -> Self {
        Self::new(ring, [unit]).expect("single name")
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    pub fn with_ring(&self, ring: CoeffRing) -> Self {
        FreeGradedModule { ring, ..self.clone() }
    }

    pub fn basis(&self, degree: i64) -> &[Name] {
        self.basis.get(&degree).map_or(&[], Vec::as_slice)
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.basis(degree).len()
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.basis.keys().copied()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.basis.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.basis.keys().next_back().copied()
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.basis.values().flatten()
    }

    pub fn total_dim(&self) -> usize {
        self.index.len()
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.index.contains_key(name)
    }

    pub fn index_of(&self, name: &Name) -> Option<usize> {
        self.index.get(name).map(|&(_, i)| i)
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Coordinates of `x` in the degree-`degree` basis; other terms are ignored.
    pub fn coords(&self, degree: i64, x: &Element) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.dim(degree)];
        for (n, c) in x.iter() {
            if let Some(&(d, i)) = self.index.get(n) {
                if d == degree {
                    v[i] += c;
                }
            }
        }
        v
    }

    pub fn element_from(&self, degree: i64, coords: &[Scalar]) -> Element {
        Element::from_terms(self.basis(degree).iter().zip(coords).map(|(n, c)| (c.clone(), n.clone())))
    }

    pub fn same_ring(&self, other: &Self) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(GradedError::RingMismatch(self.ring.clone(), other.ring.clone()))
        }
    }

    /// Submodule spanned by the basis elements whose degree satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(i64) -> bool) -> Self {
        Self::new(self.ring.clone(), self.names().filter(|n| keep(n.degree())).cloned()).expect("names unique")
    }

    /// Tensor product of the given modules, keeping degrees accepted by `keep`.
    pub fn tensor(factors: &[&FreeGradedModule], keep: impl Fn(i64) -> bool) -> Result<Self> {
        let Some(first) = factors.first() else {
            return Err(GradedError::ModuleMismatch);
        };
        for m in &factors[1..] {
            first.same_ring(m)?;
        }
        let mut partial: Vec<(i64, Vec<Name>)> = vec![(0, Vec::new())];
        for (i, m) in factors.iter().enumerate() {
            // bound on what the remaining factors can still add
            let rest_min: i64 = factors[i + 1..].iter().map(|f| f.min_degree().unwrap_or(0)).sum();
            let rest_max: i64 = factors[i + 1..].iter().map(|f| f.max_degree().unwrap_or(0)).sum();
            let mut next = Vec::new();
            for (d, v) in &partial {
                for (&deg, names) in &m.basis {
                    let nd = d + deg;
                    if !(nd + rest_min..=nd + rest_max).any(&keep) {
                        continue;
                    }
                    for n in names {
                        let mut w = v.clone();
                        w.push(n.clone());
                        next.push((nd, w));
                    }
                }
            }
            partial = next;
        }
        Self::new(
            first.ring.clone(),
            partial.into_iter().filter(|(d, _)| keep(*d)).map(|(_, v)| Name::tensor(v)),
        )
    }

    /// `k`-fold tensor power; the zeroth power is the ground ring on `Tensor([])`.
    pub fn tensor_power(&self, k: usize, keep: impl Fn(i64) -> bool) -> Result<Self> {
        if k == 0 {
            return Ok(Self::ground(self.ring.clone(), Name::Tensor(Vec::new())));
        }
        let factors: Vec<&FreeGradedModule> = std::iter::repeat_n(self, k).collect();
        Self::tensor(&factors, keep)
    }

    /// Shifts every degree by `by`; names are decorated with `s^by`.
    pub fn suspend(&self, by: i64) -> Self {
        Self::new(self.ring.clone(), self.names().map(|n| Name::shift(by, n.clone()))).expect("shift is injective")
    }

    pub fn desuspend(&self, by: i64) -> Self {
        self.suspend(-by)
    }

    /// Dual module, concentrated in the negated degrees.
    pub fn dual(&self) -> Self {
        Self::new(self.ring.clone(), self.names().map(|n| n.dual().1)).expect("dual is injective")
    }

    /// Direct sum; summand names are tagged.
    pub fn direct_sum(summands: &[(&str, &FreeGradedModule)]) -> Result<Self> {
        let Some((_, first)) = summands.first() else {
            return Err(GradedError::ModuleMismatch);
        };
        for (_, m) in &summands[1..] {
            first.same_ring(m)?;
        }
        Self::new(
            first.ring.clone(),
            summands.iter().flat_map(|(t, m)| m.names().map(move |n| Name::tag(*t, n.clone()))),
        )
    }
}

/// Homogeneous finite linear combination of basis names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Element {
    terms: BTreeMap<Name, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn basis(name: Name) -> Self {
        Self::term(Scalar::one(), name)
    }

    pub fn term(coeff: Scalar, name: Name) -> Self {
        let mut e = Element::zero();
        e.add_term(name, &coeff);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Scalar, Name)>) -> Self {
        let mut e = Element::zero();
        for (c, n) in terms {
            e.add_term(n, &c);
        }
        e
    }

    pub fn add_term(&mut self, name: Name, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(name) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += coeff · other`
    pub fn add_scaled(&mut self, other: &Element, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        for (n, c) in &other.terms {
            self.add_term(n.clone(), &(c * coeff));
        }
    }

    pub fn add(&mut self, other: &Element) {
        self.add_scaled(other, &Scalar::one());
    }

    pub fn sub(&mut self, other: &Element) {
        self.add_scaled(other, &-Scalar::one());
    }

    pub fn scaled(&self, coeff: &Scalar) -> Element {
        let mut e = Element::zero();
        e.add_scaled(self, coeff);
        e
    }

    pub fn neg(&self) -> Element {
        self.scaled(&-Scalar::one())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, name: &Name) -> Scalar {
        self.terms.get(name).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Maps every name through `f`, multiplying coefficients by the returned factor.
    pub fn map_names(&self, mut f: impl FnMut(&Name) -> Option<(Scalar, Name)>) -> Element {
        let mut e = Element::zero();
        for (n, c) in &self.terms {
            if let Some((s, m)) = f(n) {
                e.add_term(m, &(c * s));
            }
        }
        e
    }

    /// Linear extension of `f` from basis names.
    pub fn linear(&self, mut f: impl FnMut(&Name) -> Element) -> Element {
        let mut e = Element::zero();
        for (n, c) in &self.terms {
            e.add_scaled(&f(n), c);
        }
        e
    }

    /// Coefficients reduced into `ring`, zeros dropped.
    pub fn reduced(&self, ring: &CoeffRing) -> Element {
        let mut e = Element::zero();
        for (n, c) in &self.terms {
            let r = ring.reduce(c).unwrap_or_else(|_| c.clone());
            e.add_term(n.clone(), &r);
        }
        e
    }

    pub fn is_zero_in(&self, ring: &CoeffRing) -> bool {
        self.terms.values().all(|c| ring.is_zero(c))
    }

    pub fn equal_in(&self, other: &Element, ring: &CoeffRing) -> bool {
        let mut d = self.clone();
        d.sub(other);
        d.is_zero_in(ring)
    }

    /// Degree of the first term, if any.
    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().next().map(Name::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(Name::degree);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    /// Tensor product of elements, without signs.
    pub fn tensor(factors: &[&Element]) -> Element {
        let mut acc: Vec<(Scalar, Vec<Name>)> = vec![(Scalar::one(), Vec::new())];
        for f in factors {
            let mut next = Vec::with_capacity(acc.len() * f.len());
            for (c, v) in &acc {
                for (n, d) in f.iter() {
                    let mut w = v.clone();
                    w.push(n.clone());
                    next.push((c * d, w));
                }
            }
            acc = next;
        }
        Element::from_terms(acc.into_iter().map(|(c, v)| (c, Name::tensor(v))))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (n, c)) in self.terms.iter().enumerate() {
            let neg = c < &Scalar::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// Homogeneous linear map between free graded modules, stored by basis images.
#[derive(Clone, Debug)]
pub struct GradedMap {
    source: Arc<FreeGradedModule>,
    target: Arc<FreeGradedModule>,
    degree: i64,
    images: BTreeMap<Name, Element>,
}

impl PartialEq for GradedMap {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree
            && *self.source == *other.source
            && *self.target == *other.target
            && self.images == other.images
    }
}

impl GradedMap {
    pub fn new(
        source: Arc<FreeGradedModule>,
        target: Arc<FreeGradedModule>,
        degree: i64,
        images: BTreeMap<Name, Element>,
    ) -> Result<Self> {
        source.same_ring(&target)?;
        let mut clean = BTreeMap::new();
        for (n, e) in images {
            if !source.contains(&n) {
                return Err(GradedError::UnknownName(n.to_string(), "source"));
            }
            let want = n.degree() + degree;
            for (m, _) in e.iter() {
                if !target.contains(m) {
                    return Err(GradedError::UnknownName(m.to_string(), "target"));
                }
                if m.degree() != want {
                    return Err(GradedError::DegreeMismatch { name: m.to_string(), expected: want, found: m.degree() });
                }
            }
            if !e.is_empty() {
                clean.insert(n, e);
            }
        }
        Ok(GradedMap { source, target, degree, images: clean })
    }

    /// Map defined by its value on each source basis name.
    pub fn from_fn(
        source: Arc<FreeGradedModule>,
        target: Arc<FreeGradedModule>,
        degree: i64,
        mut f: impl FnMut(&Name) -> Element,
    ) -> Result<Self> {
        let images = source.names().map(|n| (n.clone(), f(n))).collect();
        Self::new(source, target, degree, images)
    }

    pub fn zero(source: Arc<FreeGradedModule>, target: Arc<FreeGradedModule>, degree: i64) -> Self {
        GradedMap { source, target, degree, images: BTreeMap::new() }
    }

    pub fn identity(module: Arc<FreeGradedModule>) -> Self {
        let images = module.names().map(|n| (n.clone(), Element::basis(n.clone()))).collect();
        GradedMap { source: module.clone(), target: module, degree: 0, images }
    }

    pub fn source(&self) -> &Arc<FreeGradedModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FreeGradedModule> {
        &self.target
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn ring(&self) -> &CoeffRing {
        self.source.ring()
    }

    pub fn images(&self) -> impl Iterator<Item = (&Name, &Element)> {
        self.images.iter()
    }

    /// Image of a basis name; names outside the source map to zero.
    pub fn image(&self, name: &Name) -> Element {
        self.images.get(name).cloned().unwrap_or_default()
    }

    pub fn image_ref(&self, name: &Name) -> Option<&Element> {
        self.images.get(name)
    }

    pub fn apply(&self, x: &Element) -> Element {
        let mut out = Element::zero();
        for (n, c) in x.iter() {
            if let Some(e) = self.images.get(n) {
                out.add_scaled(e, c);
            }
        }
        out
    }

    /// Same map with coefficients reduced into another ring.
    pub fn over_ring(&self, ring: &CoeffRing) -> GradedMap {
        let s = Arc::new(self.source.with_ring(ring.clone()));
        let t = if Arc::ptr_eq(&self.source, &self.target) { s.clone() } else { Arc::new(self.target.with_ring(ring.clone())) };
        let images = self
            .images
            .iter()
            .map(|(n, e)| (n.clone(), e.reduced(ring)))
            .filter(|(_, e)| !e.is_empty())
            .collect();
        GradedMap { source: s, target: t, degree: self.degree, images }
    }

    /// `self ∘ first`
    pub fn compose(&self, first: &GradedMap) -> Result<GradedMap> {
        if *first.target != *self.source {
            return Err(GradedError::ModuleMismatch);
        }
        let images = first.images.iter().map(|(n, e)| (n.clone(), self.apply(e))).filter(|(_, e)| !e.is_empty()).collect();
        Ok(GradedMap { source: first.source.clone(), target: self.target.clone(), degree: self.degree + first.degree, images })
    }

    fn check_parallel(&self, other: &GradedMap) -> Result<()> {
        if *self.source != *other.source || *self.target != *other.target || self.degree != other.degree {
            return Err(GradedError::ModuleMismatch);
        }
        Ok(())
    }

    /// `self + coeff · other`
    pub fn add_scaled(&self, other: &GradedMap, coeff: &Scalar) -> Result<GradedMap> {
        self.check_parallel(other)?;
        let mut images = self.images.clone();
        for (n, e) in &other.images {
            images.entry(n.clone()).or_default().add_scaled(e, coeff);
        }
        images.retain(|_, e| !e.is_empty());
        Ok(GradedMap { images, ..self.clone() })
    }

    pub fn add(&self, other: &GradedMap) -> Result<GradedMap> {
        self.add_scaled(other, &Scalar::one())
    }

    pub fn sub(&self, other: &GradedMap) -> Result<GradedMap> {
        self.add_scaled(other, &-Scalar::one())
    }

    pub fn scaled(&self, coeff: &Scalar) -> GradedMap {
        let images = self.images.iter().map(|(n, e)| (n.clone(), e.scaled(coeff))).filter(|(_, e)| !e.is_empty()).collect();
        GradedMap { images, ..self.clone() }
    }

    /// Basis names whose image is nonzero in the ring.
    pub fn support_in_ring(&self) -> Vec<&Name> {
        let ring = self.ring();
        self.images.iter().filter(|(_, e)| !e.is_zero_in(ring)).map(|(n, _)| n).collect()
    }

    pub fn is_zero_in_ring(&self) -> bool {
        self.support_in_ring().is_empty()
    }

    /// First source name on which the two maps differ in the ring.
    pub fn first_difference(&self, other: &GradedMap) -> Result<Option<Name>> {
        self.check_parallel(other)?;
        Ok(self.sub(other)?.support_in_ring().first().map(|n| (*n).clone()))
    }

    /// Matrix from the degree-`n` source basis to the degree-`n + degree` target basis.
    pub fn matrix_at(&self, n: i64) -> SparseMatrix {
        let cols = self.source.basis(n);
        let rows = self.target.basis(n + self.degree);
        let mut m = SparseMatrix::zero(rows.len(), cols.len());
        for (j, x) in cols.iter().enumerate() {
            if let Some(e) = self.images.get(x) {
                for (y, c) in e.iter() {
                    let i = self.target.index_of(y).expect("validated image");
                    m.add_to(i, j, c);
                }
            }
        }
        m
    }

    /// Map whose degree-`n` matrix is given for every listed `n`.
    pub fn from_matrices(
        source: Arc<FreeGradedModule>,
        target: Arc<FreeGradedModule>,
        degree: i64,
        matrices: &BTreeMap<i64, SparseMatrix>,
    ) -> Result<GradedMap> {
        let mut images: BTreeMap<Name, Element> = BTreeMap::new();
        for (&n, m) in matrices {
            let cols = source.basis(n);
            let rows = target.basis(n + degree);
            if m.cols() != cols.len() || m.rows() != rows.len() {
                return Err(GradedError::ModuleMismatch);
            }
            for (i, j, c) in m.entries() {
                images.entry(cols[j].clone()).or_default().add_term(rows[i].clone(), c);
            }
        }
        Self::new(source, target, degree, images)
    }

    /// Dual map `f♯(α) = (−1)^{|f||α|} α∘f` between the dual modules.
    pub fn dualize(&self) -> GradedMap {
        let src = Arc::new(self.target.dual());
        let tgt = if Arc::ptr_eq(&self.source, &self.target) { src.clone() } else { Arc::new(self.source.dual()) };
        let mut images: BTreeMap<Name, Element> = BTreeMap::new();
        for (x, e) in &self.images {
            let (sx, xd) = x.dual();
            for (w, c) in e.iter() {
                let (sw, wd) = w.dual();
                // w♯ ↦ (−1)^{|f||w|} c x♯; names carry the double-dual sign
                let coeff = dual_map_sign(self.degree, w.degree()) * c * &sx * &sw;
                images.entry(wd).or_default().add_term(xd.clone(), &coeff);
            }
        }
        images.retain(|_, e| !e.is_empty());
        GradedMap { source: src, target: tgt, degree: self.degree, images }
    }

    /// `s^by f s^{−by}` between the shifted modules, carrying `(−1)^{by·|f|}`.
    pub fn suspend(&self, by: i64) -> GradedMap {
        let src = Arc::new(self.source.suspend(by));
        let tgt = if Arc::ptr_eq(&self.source, &self.target) { src.clone() } else { Arc::new(self.target.suspend(by)) };
        let s = sign(by * self.degree);
        let images = self
            .images
            .iter()
            .map(|(n, e)| (Name::shift(by, n.clone()), e.map_names(|m| Some((s.clone(), Name::shift(by, m.clone()))))))
            .collect();
        GradedMap { source: src, target: tgt, degree: self.degree, images }
    }
}

/// `(f₁⊗⋯⊗f_k)` evaluated on a basis tensor with factors `factors`.
pub fn tensor_apply(maps: &[&GradedMap], factors: &[&Name]) -> Element {
    assert_eq!(maps.len(), factors.len(), "one map per factor");
    let md: Vec<i64> = maps.iter().map(|f| f.degree()).collect();
    let ed: Vec<i64> = factors.iter().map(|n| n.degree()).collect();
    let s = tensor_map_sign(&md, &ed);
    let imgs: Vec<Element> = maps.iter().zip(factors).map(|(f, n)| f.image(n)).collect();
    let refs: Vec<&Element> = imgs.iter().collect();
    Element::tensor(&refs).scaled(&s)
}

/// `(1^{⊗pos} ⊗ f ⊗ 1^{⊗rest})` on an `arity`-fold tensor element, where `f`
/// has degree `f_degree` and produces `out_arity` factors that are spliced in
/// place (`out_arity = 0` means scalar values named `Tensor([])`).
pub fn apply_at(
    x: &Element,
    arity: usize,
    pos: usize,
    f_degree: i64,
    out_arity: usize,
    mut f: impl FnMut(&Name) -> Element,
) -> Element {
    let mut out = Element::zero();
    for (n, c) in x.iter() {
        let factors = n.tensor_factors(arity).unwrap_or_else(|| panic!("`{n}` is not a {arity}-fold tensor"));
        let passed: i64 = factors[..pos].iter().map(|y| y.degree()).sum();
        let s = sign(f_degree * passed) * c;
        for (m, d) in f(factors[pos]).iter() {
            let inner = m.tensor_factors(out_arity).unwrap_or_else(|| {
                if out_arity == 0 && *m == Name::Tensor(Vec::new()) {
                    Vec::new()
                } else {
                    panic!("`{m}` is not a {out_arity}-fold tensor")
                }
            });
            let mut all: Vec<Name> = factors[..pos].iter().map(|y| (*y).clone()).collect();
            all.extend(inner.into_iter().cloned());
            all.extend(factors[pos + 1..].iter().map(|y| (*y).clone()));
            out.add_term(Name::tensor(all), &(&s * d));
        }
    }
    out
}

/// Reorders the factors of `arity`-fold tensors so that factor `i` of the
/// result is factor `perm[i]` of the input, with the Koszul sign.
pub fn permute_factors(x: &Element, arity: usize, perm: &[usize]) -> Element {
    x.map_names(|n| {
        let f = n.tensor_factors(arity).unwrap_or_else(|| panic!("`{n}` is not a {arity}-fold tensor"));
        let degs: Vec<i64> = f.iter().map(|y| y.degree()).collect();
        let s = koszul_sign(perm, &degs).expect("valid permutation");
        Some((Scalar::from_integer(s.into()), Name::tensor(perm.iter().map(|&p| f[p].clone()).collect())))
    })
}

/// Regroups flat tensor names of `arity` factors into the given block sizes.
pub fn regroup(x: &Element, blocks: &[usize]) -> Element {
    let arity: usize = blocks.iter().sum();
    x.map_names(|n| {
        let f = n.tensor_factors(arity)?;
        let mut it = f.into_iter().cloned();
        let grouped = blocks.iter().map(|&b| Name::tensor(it.by_ref().take(b).collect())).collect();
        Some((Scalar::one(), Name::tensor(grouped)))
    })
}

/// Flattens nested tensor names, one level per factor, into `arity`-fold names.
pub fn ungroup(x: &Element, blocks: &[usize]) -> Element {
    x.map_names(|n| {
        let outer = n.tensor_factors(blocks.len())?;
        let mut all = Vec::new();
        for (f, &b) in outer.iter().zip(blocks) {
            if b == 0 {
                continue;
            }
            all.extend(f.tensor_factors(b)?.into_iter().cloned());
        }
        Some((Scalar::one(), Name::tensor(all)))
    })
}

/// Tensor product of maps as a map between the given tensor modules.
pub fn tensor_maps(
    maps: &[&GradedMap],
    source: Arc<FreeGradedModule>,
    target: Arc<FreeGradedModule>,
) -> Result<GradedMap> {
    let k = maps.len();
    let degree = maps.iter().map(|f| f.degree()).sum();
    let mut images = BTreeMap::new();
    for n in source.names() {
        let factors = n.tensor_factors(k).ok_or_else(|| GradedError::UnknownName(n.to_string(), "tensor source"))?;
        let e = tensor_apply(maps, &factors);
        // terms past the target truncation are dropped with the truncation
        let e = e.map_names(|m| target.contains(m).then(|| (Scalar::one(), m.clone())));
        images.insert(n.clone(), e);
    }
    GradedMap::new(source, target, degree, images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::int;

    fn module(gens: &[(&str, i64)]) -> Arc<FreeGradedModule> {
        Arc::new(FreeGradedModule::new(CoeffRing::Integers, gens.iter().map(|(l, d)| Name::gen(*l, *d))).unwrap())
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&[1, 0], &[2, 3]).unwrap(), 1);
        // rotation (a,b,c) -> (b,c,a): two adjacent odd transpositions
        assert_eq!(koszul_sign(&[1, 2, 0], &[1, 1, 1]).unwrap(), 1);
        assert!(koszul_sign(&[0, 0], &[1, 1]).is_err());
        assert!(koszul_sign(&[0], &[1, 1]).is_err());
    }

    #[test]
    fn tensor_of_maps_sign() {
        let v = module(&[("v", 1)]);
        let w = module(&[("w", 0)]);
        let fv = module(&[("fv", 1)]);
        let gw = module(&[("gw", 1)]);
        let f = GradedMap::from_fn(v.clone(), fv.clone(), 0, |_| Element::basis(Name::gen("fv", 1))).unwrap();
        let g = GradedMap::from_fn(w.clone(), gw.clone(), 1, |_| Element::basis(Name::gen("gw", 1))).unwrap();
        let src = Arc::new(FreeGradedModule::tensor(&[&v, &w], |_| true).unwrap());
        let tgt = Arc::new(FreeGradedModule::tensor(&[&fv, &gw], |_| true).unwrap());
        let fg = tensor_maps(&[&f, &g], src, tgt).unwrap();
        let x = Name::tensor(vec![Name::gen("v", 1), Name::gen("w", 0)]);
        let expect = Element::term(int(-1), Name::tensor(vec![Name::gen("fv", 1), Name::gen("gw", 1)]));
        assert_eq!(fg.image(&x), expect);
    }

    #[test]
    fn tensor_identity_and_degrees() {
        let a = module(&[("a", 2)]);
        let b = module(&[("b", 3)]);
        let t = Arc::new(FreeGradedModule::tensor(&[&a, &b], |_| true).unwrap());
        assert_eq!(t.total_dim(), 1);
        assert_eq!(t.dim(5), 1);
        let ia = GradedMap::identity(a.clone());
        let ib = GradedMap::identity(b.clone());
        assert_eq!(tensor_maps(&[&ia, &ib], t.clone(), t.clone()).unwrap(), GradedMap::identity(t));
    }

    #[test]
    fn suspension_round_trip() {
        let m = module(&[("x", 3), ("y", 0)]);
        let s = m.suspend(1);
        assert_eq!(s.basis(4), &[Name::shift(1, Name::gen("x", 3))]);
        assert_eq!(s.desuspend(1), *m);
        assert_eq!(m.suspend(2).basis(2).len(), 1);
        assert_eq!(m.suspend(1).suspend(1), m.suspend(2));
    }

    fn small_complex() -> GradedMap {
        // x (2) -> y (1), z (1) -> w (0): an honest differential
        let m = module(&[("x", 2), ("y", 1), ("z", 1), ("w", 0)]);
        GradedMap::from_fn(m.clone(), m, -1, |n| match n {
            Name::Gen { label, .. } if label == "x" => {
                Element::from_terms([(int(1), Name::gen("y", 1)), (int(2), Name::gen("z", 1))])
            }
            Name::Gen { label, .. } if label == "y" => Element::term(int(-2), Name::gen("w", 0)),
            Name::Gen { label, .. } if label == "z" => Element::basis(Name::gen("w", 0)),
            _ => Element::zero(),
        })
        .unwrap()
    }

    #[test]
    fn dual_examples() {
        let m = module(&[("x", 1), ("y", 2)]);
        let id = GradedMap::identity(m.clone());
        assert_eq!(id.dualize(), GradedMap::identity(Arc::new(m.dual())));
        let z = GradedMap::zero(m.clone(), m.clone(), 1);
        assert!(z.dualize().is_zero_in_ring());
        let d = small_complex();
        assert!(d.compose(&d).unwrap().is_zero_in_ring());
        let dd = d.dualize();
        assert_eq!(dd.degree(), -1);
        assert!(dd.compose(&dd).unwrap().is_zero_in_ring());
        assert_eq!(dd.dualize(), d);
    }

    #[test]
    fn dual_reverses_composition_with_sign() {
        let d = small_complex();
        let m = d.source().clone();
        // an odd degree-1 map to compose with d
        let h = GradedMap::from_fn(m.clone(), m.clone(), 1, |n| match n {
            Name::Gen { label, .. } if label == "w" => Element::basis(Name::gen("z", 1)),
            Name::Gen { label, .. } if label == "y" => Element::term(int(3), Name::gen("x", 2)),
            _ => Element::zero(),
        })
        .unwrap();
        let lhs = h.compose(&d).unwrap().dualize();
        let rhs = d.dualize().compose(&h.dualize()).unwrap().scaled(&sign(d.degree() * h.degree()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn element_display_is_stable() {
        let e = Element::from_terms([(int(2), Name::gen("a", 0)), (int(-1), Name::gen("b", 0))]);
        assert_eq!(e.to_string(), "2*a - b");
        let w = Name::word(vec![Name::shift(-1, Name::gen("v(1)", 2)), Name::shift(1, Name::gen("x", 1))]);
        assert_eq!(w.to_string(), "[s^-1(v(1))|s(x)]");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// Sign by bubble sort, one adjacent transposition at a time.
        fn bubble_sign(perm: &[usize], degrees: &[i64]) -> i64 {
            let mut p = perm.to_vec();
            let mut s = 1;
            loop {
                let mut swapped = false;
                for i in 0..p.len().saturating_sub(1) {
                    if p[i] > p[i + 1] {
                        if degrees[p[i]] * degrees[p[i + 1]] % 2 != 0 {
                            s = -s;
                        }
                        p.swap(i, i + 1);
                        swapped = true;
                    }
                }
                if !swapped {
                    return s;
                }
            }
        }

        /// Sign by selection sort from the right, a different decomposition.
        fn selection_sign(perm: &[usize], degrees: &[i64]) -> i64 {
            let mut p = perm.to_vec();
            let mut s = 1;
            for target in (0..p.len()).rev() {
                let pos = p.iter().position(|&x| x == target).unwrap();
                for i in pos..target {
                    if degrees[p[i]] * degrees[p[i + 1]] % 2 != 0 {
                        s = -s;
                    }
                    p.swap(i, i + 1);
                }
            }
            s
        }

        fn perm_and_degrees() -> impl Strategy<Value = (Vec<usize>, Vec<i64>)> {
            (1usize..7).prop_flat_map(|n| {
                (Just((0..n).collect::<Vec<_>>()).prop_shuffle(), prop::collection::vec(-3i64..5, n))
            })
        }

        proptest! {
            #[test]
            fn koszul_independent_of_decomposition((perm, degs) in perm_and_degrees()) {
                let k = koszul_sign(&perm, &degs).unwrap();
                prop_assert_eq!(k, bubble_sign(&perm, &degs));
                prop_assert_eq!(k, selection_sign(&perm, &degs));
            }

            #[test]
            fn tensor_signs_agree_under_reassociation(
                degs in prop::collection::vec(-2i64..4, 3),
                fdegs in prop::collection::vec(-2i64..3, 3),
            ) {
                // ((f⊗g)⊗h)((u⊗v)⊗w) versus (f⊗(g⊗h))(u⊗(v⊗w))
                let left = tensor_map_sign(&[fdegs[0] + fdegs[1], fdegs[2]], &[degs[0] + degs[1], degs[2]])
                    * tensor_map_sign(&fdegs[..2], &degs[..2]);
                let right = tensor_map_sign(&[fdegs[0], fdegs[1] + fdegs[2]], &[degs[0], degs[1] + degs[2]])
                    * tensor_map_sign(&fdegs[1..], &degs[1..]);
                prop_assert_eq!(left.clone(), right);
                prop_assert_eq!(left, tensor_map_sign(&fdegs, &degs));
            }

            #[test]
            fn dualize_is_an_involution(
                entries in prop::collection::vec((0usize..3, 0usize..3, -3i64..4), 0..8),
                deg in -1i64..2,
            ) {
                let m = module(&[("a", 0), ("b", 1), ("c", 1), ("e", 2), ("f", 3), ("g", 3)]);
                let names: Vec<Name> = m.names().cloned().collect();
                let mut images: BTreeMap<Name, Element> = BTreeMap::new();
                for (i, j, c) in entries {
                    let x = &names[i * 2 % names.len()];
                    let candidates: Vec<&Name> = names.iter().filter(|n| n.degree() == x.degree() + deg).collect();
                    if let Some(y) = candidates.get(j % candidates.len().max(1)) {
                        images.entry(x.clone()).or_default().add_term((*y).clone(), &int(c));
                    }
                }
                let f = GradedMap::new(m.clone(), m, deg, images).unwrap();
                prop_assert_eq!(f.dualize().dualize(), f);
            }
        }
    }
}
