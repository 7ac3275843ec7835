//! Exact sparse linear algebra over the integers, the rationals and prime fields.
//!
//! Every scalar is carried as a [`BigRational`]; the [`CoeffRing`] decides how a
//! value is normalized. Structure constants are computed over the rationals and
//! only reduced into the working ring when a matrix is handed to an algorithm,
//! which is sound because reduction is a ring homomorphism.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Scalar = BigRational;

/// Matrices with both dimensions below this bound are densified for Smith reduction.
pub const DENSE_THRESHOLD: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactLinError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("value {value} does not lie in {ring}")]
    NotInRing { value: String, ring: CoeffRing },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    IndexOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("unknown coefficient ring `{0}` (expected z, q or fp:<prime>)")]
    UnknownRing(String),
}

pub type Result<T> = std::result::Result<T, ExactLinError>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoeffRing {
    Integers,
    Rationals,
    PrimeField(u64),
}

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn scalar_from_bigint(n: BigInt) -> Scalar {
    BigRational::from_integer(n)
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= p {
        if p % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if g.gcd.is_one() {
        Some(g.x.mod_floor(m))
    } else if (-&g.gcd).is_one() {
        Some((-g.x).mod_floor(m))
    } else {
        None
    }
}

impl CoeffRing {
    pub fn prime_field(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(CoeffRing::PrimeField(p))
        } else {
            Err(ExactLinError::NotPrime(p))
        }
    }

    /// Parses `z`, `q` or `fp:<p>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "z" | "integers" => Ok(CoeffRing::Integers),
            "q" | "rationals" => Ok(CoeffRing::Rationals),
            other => {
                let p = other
                    .strip_prefix("fp:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| ExactLinError::UnknownRing(s.to_string()))?;
                CoeffRing::prime_field(p)
            }
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, CoeffRing::Integers)
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            CoeffRing::PrimeField(p) => *p,
            _ => 0,
        }
    }

    fn modulus(&self) -> Option<BigInt> {
        match self {
            CoeffRing::PrimeField(p) => Some(BigInt::from(*p)),
            _ => None,
        }
    }

    /// Normal form of `x` in this ring.
    pub fn reduce(&self, x: &Scalar) -> Result<Scalar> {
        match self {
            CoeffRing::Rationals => Ok(x.clone()),
            CoeffRing::Integers => {
                if x.is_integer() {
                    Ok(x.clone())
                } else {
                    Err(ExactLinError::NotInRing { value: x.to_string(), ring: self.clone() })
                }
            }
            CoeffRing::PrimeField(_) => {
                let p = self.modulus().expect("prime field has a modulus");
                let den = x.denom().mod_floor(&p);
                let inv = mod_inverse(&den, &p).ok_or_else(|| ExactLinError::NotInRing {
                    value: x.to_string(),
                    ring: self.clone(),
                })?;
                Ok(scalar_from_bigint((x.numer() * inv).mod_floor(&p)))
            }
        }
    }

    /// Whether `x` vanishes in this ring. Values that do not lie in the ring are nonzero.
    pub fn is_zero(&self, x: &Scalar) -> bool {
        match self.reduce(x) {
            Ok(r) => r.is_zero(),
            Err(_) => false,
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.normalize(a + b)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.normalize(a - b)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.normalize(a * b)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.normalize(-a)
    }

    fn normalize(&self, x: Scalar) -> Scalar {
        match self {
            CoeffRing::PrimeField(_) => {
                let p = self.modulus().expect("prime field has a modulus");
                scalar_from_bigint(x.to_integer().mod_floor(&p))
            }
            _ => x,
        }
    }

    /// Multiplicative inverse if `a` is a unit.
    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return None;
        }
        match self {
            CoeffRing::Rationals => Some(a.recip()),
            CoeffRing::Integers => {
                if a.is_integer() && a.abs().is_one() {
                    Some(a.clone())
                } else {
                    None
                }
            }
            CoeffRing::PrimeField(_) => {
                let p = self.modulus().expect("prime field has a modulus");
                mod_inverse(&a.to_integer().mod_floor(&p), &p).map(scalar_from_bigint)
            }
        }
    }
}

impl fmt::Display for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffRing::Integers => write!(f, "Z"),
            CoeffRing::Rationals => write!(f, "Q"),
            CoeffRing::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

/// Sparse matrix in triplet form; zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries.insert((i, i), Scalar::one());
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Scalar>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zero(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                m.add_to(i, j, x);
            }
        }
        m
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::from_dense(&dense)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Scalar {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn set(&mut self, row: usize, col: usize, value: Scalar) -> Result<()> {
        self.check_index(row, col)?;
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
        Ok(())
    }

    /// Adds `value` to entry `(row, col)`; panics on an out-of-range index.
    pub fn add_to(&mut self, row: usize, col: usize, value: &Scalar) {
        assert!(row < self.rows && col < self.cols, "index out of range");
        if value.is_zero() {
            return;
        }
        let e = self.entries.entry((row, col)).or_insert_with(Scalar::zero);
        *e += value;
        if e.is_zero() {
            self.entries.remove(&(row, col));
        }
    }

    fn check_index(&self, row: usize, col: usize) -> Result<()> {
        if row >= self.rows || col >= self.cols {
            return Err(ExactLinError::IndexOutOfRange { row, col, rows: self.rows, cols: self.cols });
        }
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(i, j), x)| (i, j, x))
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut d = vec![vec![Scalar::zero(); self.cols]; self.rows];
        for (&(i, j), x) in &self.entries {
            d[i][j] = x.clone();
        }
        d
    }

    pub fn transpose(&self) -> Self {
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|(&(i, j), x)| ((j, i), x.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            return Err(ExactLinError::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut by_row: BTreeMap<usize, Vec<(usize, &Scalar)>> = BTreeMap::new();
        for (&(k, j), x) in &other.entries {
            by_row.entry(k).or_default().push((j, x));
        }
        let mut out = SparseMatrix::zero(self.rows, other.cols);
        for (&(i, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    out.add_to(i, j, &(a * b));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(ExactLinError::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        let mut out = vec![Scalar::zero(); self.rows];
        for (&(i, j), x) in &self.entries {
            out[i] += x * &v[j];
        }
        Ok(out)
    }

    /// Entries reduced into `ring`.
    pub fn reduced(&self, ring: &CoeffRing) -> Result<SparseMatrix> {
        let mut out = SparseMatrix::zero(self.rows, self.cols);
        for (&(i, j), x) in &self.entries {
            let r = ring.reduce(x)?;
            if !r.is_zero() {
                out.entries.insert((i, j), r);
            }
        }
        Ok(out)
    }

    pub fn is_zero_in(&self, ring: &CoeffRing) -> bool {
        self.entries.values().all(|x| ring.is_zero(x))
    }
}

/// Smith normal form `U·M·V = D` with `D` diagonal and `d₁ | d₂ | …`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Nonzero diagonal entries of `D`, all positive.
    pub invariants: Vec<BigInt>,
    pub u: SparseMatrix,
    pub v: SparseMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariants.len()
    }
}

fn to_int_matrix(m: &SparseMatrix) -> Result<Vec<Vec<BigInt>>> {
    let mut d = vec![vec![BigInt::zero(); m.cols]; m.rows];
    for (i, j, x) in m.entries() {
        if !x.is_integer() {
            return Err(ExactLinError::NotInRing { value: x.to_string(), ring: CoeffRing::Integers });
        }
        d[i][j] = x.to_integer();
    }
    Ok(d)
}

fn int_dense_to_sparse(d: &[Vec<BigInt>], rows: usize, cols: usize) -> SparseMatrix {
    let mut m = SparseMatrix::zero(rows, cols);
    for (i, row) in d.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !x.is_zero() {
                m.entries.insert((i, j), scalar_from_bigint(x.clone()));
            }
        }
    }
    m
}

struct DenseSmith {
    a: Vec<Vec<BigInt>>,
    u: Option<Vec<Vec<BigInt>>>,
    v: Option<Vec<Vec<BigInt>>>,
}

impl DenseSmith {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.a {
            row.swap(i, j);
        }
        if let Some(v) = &mut self.v {
            for row in v.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    /// row_t ← row_t − q·row_s
    fn row_axpy(&mut self, t: usize, s: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let src = self.a[s].clone();
        for (x, y) in self.a[t].iter_mut().zip(&src) {
            *x -= q * y;
        }
        if let Some(u) = &mut self.u {
            let src = u[s].clone();
            for (x, y) in u[t].iter_mut().zip(&src) {
                *x -= q * y;
            }
        }
    }

    /// col_t ← col_t − q·col_s
    fn col_axpy(&mut self, t: usize, s: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for row in &mut self.a {
            let y = row[s].clone();
            row[t] -= q * y;
        }
        if let Some(v) = &mut self.v {
            for row in v.iter_mut() {
                let y = row[s].clone();
                row[t] -= q * y;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -&*x;
        }
        if let Some(u) = &mut self.u {
            for x in &mut u[i] {
                *x = -&*x;
            }
        }
    }

    fn run(&mut self) -> Vec<BigInt> {
        let rows = self.a.len();
        let cols = self.a.first().map_or(0, Vec::len);
        let mut t = 0;
        while t < rows.min(cols) {
            // smallest nonzero entry in the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !self.a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| self.a[i][j].abs() < self.a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..rows {
                    if !self.a[i][t].is_zero() {
                        let q = self.a[i][t].div_floor(&self.a[t][t]);
                        self.row_axpy(i, t, &q);
                        if !self.a[i][t].is_zero() {
                            self.swap_rows(t, i);
                            dirty = true;
                        }
                    }
                }
                for j in t + 1..cols {
                    if !self.a[t][j].is_zero() {
                        let q = self.a[t][j].div_floor(&self.a[t][t]);
                        self.col_axpy(j, t, &q);
                        if !self.a[t][j].is_zero() {
                            self.swap_cols(t, j);
                            dirty = true;
                        }
                    }
                }
                if dirty {
                    continue;
                }
                // enforce divisibility of the remaining block by the pivot
                let p = self.a[t][t].clone();
                let offender = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| !(&self.a[i][j] % &p).is_zero());
                match offender {
                    Some((i, _)) => self.row_axpy(t, i, &BigInt::from(-1)),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        (0..t).map(|i| self.a[i][i].clone()).collect()
    }
}

fn identity_int(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// Smith normal form of an integer matrix together with the unimodular transforms.
pub fn smith_normal_form(m: &SparseMatrix) -> Result<SmithForm> {
    let mut s = DenseSmith {
        a: to_int_matrix(m)?,
        u: Some(identity_int(m.rows)),
        v: Some(identity_int(m.cols)),
    };
    let invariants = s.run();
    Ok(SmithForm {
        invariants,
        u: int_dense_to_sparse(s.u.as_ref().expect("tracked"), m.rows, m.rows),
        v: int_dense_to_sparse(s.v.as_ref().expect("tracked"), m.cols, m.cols),
    })
}

/// Invariant factors only. Unit pivots are eliminated sparsely before the
/// remaining block is densified.
pub fn invariant_factors(m: &SparseMatrix) -> Result<Vec<BigInt>> {
    let mut rows: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
    for (i, j, x) in m.entries() {
        if !x.is_integer() {
            return Err(ExactLinError::NotInRing { value: x.to_string(), ring: CoeffRing::Integers });
        }
        rows.entry(i).or_default().insert(j, x.to_integer());
    }
    let mut units = 0usize;
    loop {
        let pivot = rows
            .iter()
            .filter_map(|(&i, r)| r.iter().find(|(_, x)| x.abs().is_one()).map(|(&j, _)| (r.len(), i, j)))
            .min();
        let Some((_, pi, pj)) = pivot else { break };
        let prow = rows.remove(&pi).expect("pivot row present");
        let pval = prow[&pj].clone();
        let others: Vec<usize> = rows.iter().filter(|(_, r)| r.contains_key(&pj)).map(|(&i, _)| i).collect();
        for i in others {
            let r = rows.get_mut(&i).expect("row present");
            let factor = &r[&pj] * &pval;
            for (j, y) in &prow {
                let e = r.entry(*j).or_insert_with(BigInt::zero);
                *e -= &factor * y;
                if e.is_zero() {
                    r.remove(j);
                }
            }
            if r.is_empty() {
                rows.remove(&i);
            }
        }
        units += 1;
    }
    let live_cols: Vec<usize> = {
        let mut c: Vec<usize> = rows.values().flat_map(|r| r.keys().copied()).collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let col_pos: BTreeMap<usize, usize> = live_cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let dense: Vec<Vec<BigInt>> = rows
        .values()
        .map(|r| {
            let mut row = vec![BigInt::zero(); live_cols.len()];
            for (j, x) in r {
                row[col_pos[j]] = x.clone();
            }
            row
        })
        .collect();
    let mut s = DenseSmith { a: dense, u: None, v: None };
    let mut inv = vec![BigInt::one(); units];
    inv.extend(s.run());
    Ok(inv)
}

/// Reduced row echelon form over a field, computed with sparse rows.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub cols: usize,
    /// Pivot rows; row `k` has a leading one in column `pivots[k]`.
    pub rows: Vec<BTreeMap<usize, Scalar>>,
    pub pivots: Vec<usize>,
}

pub fn rref(m: &SparseMatrix, ring: &CoeffRing) -> Result<Echelon> {
    assert!(ring.is_field(), "row reduction needs a field");
    let m = m.reduced(ring)?;
    let mut pending: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); m.rows];
    for (i, j, x) in m.entries() {
        pending[i].insert(j, x.clone());
    }
    pending.retain(|r| !r.is_empty());
    let mut done: Vec<BTreeMap<usize, Scalar>> = Vec::new();
    let mut pivots = Vec::new();
    for c in 0..m.cols {
        let choice = pending
            .iter()
            .enumerate()
            .filter(|(_, r)| r.contains_key(&c))
            .min_by_key(|(k, r)| (r.len(), *k))
            .map(|(k, _)| k);
        let Some(k) = choice else { continue };
        let mut prow = pending.swap_remove(k);
        let inv = ring.inv(&prow[&c]).expect("nonzero in a field");
        for x in prow.values_mut() {
            *x = ring.mul(x, &inv);
        }
        let eliminate = |r: &mut BTreeMap<usize, Scalar>| {
            if let Some(f) = r.get(&c).cloned() {
                for (j, y) in &prow {
                    let e = r.entry(*j).or_insert_with(Scalar::zero);
                    *e = ring.sub(e, &ring.mul(&f, y));
                    if e.is_zero() {
                        r.remove(j);
                    }
                }
            }
        };
        for r in pending.iter_mut() {
            eliminate(r);
        }
        pending.retain(|r| !r.is_empty());
        for r in done.iter_mut() {
            eliminate(r);
        }
        done.push(prow);
        pivots.push(c);
    }
    Ok(Echelon { cols: m.cols, rows: done, pivots })
}

/// Rank of `m` over `ring`; for the integers this is the rank over the rationals.
pub fn rank(m: &SparseMatrix, ring: &CoeffRing) -> Result<usize> {
    match ring {
        CoeffRing::Integers => Ok(rref(m, &CoeffRing::Rationals)?.pivots.len()),
        _ => Ok(rref(m, ring)?.pivots.len()),
    }
}

/// Solves `M·x = b`. `Ok(None)` means there is no solution in the ring.
pub fn solve(m: &SparseMatrix, b: &[Scalar], ring: &CoeffRing) -> Result<Option<Vec<Scalar>>> {
    if b.len() != m.rows {
        return Err(ExactLinError::DimensionMismatch { expected: m.rows, found: b.len() });
    }
    match ring {
        CoeffRing::Integers => solve_integral(m, b),
        _ => solve_field(m, b, ring),
    }
}

fn solve_field(m: &SparseMatrix, b: &[Scalar], ring: &CoeffRing) -> Result<Option<Vec<Scalar>>> {
    let mut aug = m.clone();
    aug.cols += 1;
    for (i, x) in b.iter().enumerate() {
        aug.add_to(i, m.cols, x);
    }
    let e = rref(&aug, ring)?;
    if e.pivots.last() == Some(&m.cols) {
        return Ok(None);
    }
    let mut x = vec![Scalar::zero(); m.cols];
    for (row, &p) in e.rows.iter().zip(&e.pivots) {
        x[p] = row.get(&m.cols).cloned().unwrap_or_else(Scalar::zero);
    }
    Ok(Some(x))
}

fn solve_integral(m: &SparseMatrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    for x in b {
        CoeffRing::Integers.reduce(x)?;
    }
    let snf = smith_normal_form(m)?;
    let ub = snf.u.mul_vec(b)?;
    let mut y = vec![Scalar::zero(); m.cols];
    for (i, c) in ub.iter().enumerate() {
        match snf.invariants.get(i) {
            Some(d) => {
                let q = c / scalar_from_bigint(d.clone());
                if !q.is_integer() {
                    return Ok(None);
                }
                y[i] = q;
            }
            None if !c.is_zero() => return Ok(None),
            None => {}
        }
    }
    Ok(Some(snf.v.mul_vec(&y)?))
}

/// Basis of `{x : M·x = 0}`: a free basis over the integers, a basis over fields.
pub fn kernel_basis(m: &SparseMatrix, ring: &CoeffRing) -> Result<Vec<Vec<Scalar>>> {
    match ring {
        CoeffRing::Integers => {
            let snf = smith_normal_form(m)?;
            let r = snf.rank();
            let v = snf.v.to_dense();
            Ok((r..m.cols).map(|j| v.iter().map(|row| row[j].clone()).collect()).collect())
        }
        _ => {
            let e = rref(m, ring)?;
            let pivot_set: std::collections::BTreeSet<usize> = e.pivots.iter().copied().collect();
            let mut out = Vec::new();
            for f in (0..m.cols).filter(|c| !pivot_set.contains(c)) {
                let mut x = vec![Scalar::zero(); m.cols];
                x[f] = Scalar::one();
                for (row, &p) in e.rows.iter().zip(&e.pivots) {
                    if let Some(a) = row.get(&f) {
                        x[p] = ring.neg(a);
                    }
                }
                out.push(x);
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| int(x)).collect()
    }

    /// Invariant factors from gcds of k×k minors: d₁⋯d_k = gcd of all k-minors.
    fn minors_oracle(a: &[Vec<i64>]) -> Vec<BigInt> {
        fn det(m: &[Vec<BigInt>]) -> BigInt {
            if m.is_empty() {
                return BigInt::one();
            }
            let mut total = BigInt::zero();
            for j in 0..m.len() {
                let minor: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = &m[0][j] * det(&minor);
                if j % 2 == 0 {
                    total += term
                } else {
                    total -= term
                }
            }
            total
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            (0..n)
                .flat_map(|i| {
                    subsets(i, k - 1).into_iter().map(move |mut s| {
                        s.push(i);
                        s
                    })
                })
                .collect()
        }
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        let mut gcds = vec![BigInt::one()];
        for k in 1..=rows.min(cols) {
            let mut g = BigInt::zero();
            for rs in subsets(rows, k) {
                for cs in subsets(cols, k) {
                    let sub: Vec<Vec<BigInt>> =
                        rs.iter().map(|&i| cs.iter().map(|&j| BigInt::from(a[i][j])).collect()).collect();
                    g = g.gcd(&det(&sub));
                }
            }
            if g.is_zero() {
                break;
            }
            gcds.push(g);
        }
        gcds.windows(2).map(|w| &w[1] / &w[0]).collect()
    }

    #[test]
    fn smith_of_small_examples() {
        let id = SparseMatrix::identity(3);
        assert_eq!(smith_normal_form(&id).unwrap().invariants, vec![BigInt::one(); 3]);
        assert!(smith_normal_form(&SparseMatrix::zero(2, 2)).unwrap().invariants.is_empty());
        let m = SparseMatrix::from_ints(&[&[2, 4], &[6, 8]]);
        let oracle = minors_oracle(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(oracle, vec![BigInt::from(2), BigInt::from(4)]);
        let snf = smith_normal_form(&m).unwrap();
        assert_eq!(snf.invariants, oracle);
        let prod: BigInt = snf.invariants.iter().product();
        assert_eq!(prod, BigInt::from(8));
    }

    #[test]
    fn smith_transforms_reproduce_diagonal() {
        let m = SparseMatrix::from_ints(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let snf = smith_normal_form(&m).unwrap();
        let d = snf.u.mul(&m).unwrap().mul(&snf.v).unwrap();
        for (i, j, x) in d.entries() {
            assert_eq!(i, j);
            assert_eq!(x.to_integer(), snf.invariants[i]);
        }
        assert_eq!(snf.invariants, minors_oracle(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]));
        assert_eq!(invariant_factors(&m).unwrap(), snf.invariants);
    }

    #[test]
    fn solve_examples() {
        let id = SparseMatrix::identity(3);
        let b = ints(&[4, -1, 7]);
        assert_eq!(solve(&id, &b, &CoeffRing::Integers).unwrap(), Some(b.clone()));
        let two = SparseMatrix::from_ints(&[&[2]]);
        assert_eq!(solve(&two, &ints(&[3]), &CoeffRing::Integers).unwrap(), None);
        let half = solve(&two, &ints(&[3]), &CoeffRing::Rationals).unwrap().unwrap();
        assert_eq!(half, vec![BigRational::new(BigInt::from(3), BigInt::from(2))]);
        assert!(matches!(
            solve(&two, &ints(&[1, 2]), &CoeffRing::Rationals),
            Err(ExactLinError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kernel_examples() {
        let z = SparseMatrix::zero(1, 2);
        assert_eq!(kernel_basis(&z, &CoeffRing::Rationals).unwrap().len(), 2);
        assert!(kernel_basis(&SparseMatrix::identity(3), &CoeffRing::Integers).unwrap().is_empty());
        let m = SparseMatrix::from_ints(&[&[1, 1]]);
        let k = kernel_basis(&m, &CoeffRing::Rationals).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][0] + &k[0][1], Scalar::zero());
        assert!(!k[0][0].is_zero());
        assert_eq!(rank(&m, &CoeffRing::Rationals).unwrap() + k.len(), 2);
    }

    #[test]
    fn prime_field_arithmetic() {
        let f5 = CoeffRing::prime_field(5).unwrap();
        assert!(CoeffRing::prime_field(6).is_err());
        assert_eq!(f5.inv(&int(2)), Some(int(3)));
        assert_eq!(f5.reduce(&BigRational::new(1.into(), 2.into())).unwrap(), int(3));
        let m = SparseMatrix::from_ints(&[&[2, 3], &[4, 6]]);
        assert_eq!(rank(&m, &f5).unwrap(), 1);
        assert_eq!(rank(&m, &CoeffRing::prime_field(2).unwrap()).unwrap(), 1);
        let m2 = SparseMatrix::from_ints(&[&[2, 0], &[0, 3]]);
        assert_eq!(rank(&m2, &CoeffRing::prime_field(3).unwrap()).unwrap(), 1);
    }

    #[test]
    fn ring_parsing() {
        assert_eq!(CoeffRing::parse("z").unwrap(), CoeffRing::Integers);
        assert_eq!(CoeffRing::parse("q").unwrap(), CoeffRing::Rationals);
        assert_eq!(CoeffRing::parse("fp:3").unwrap(), CoeffRing::PrimeField(3));
        assert!(CoeffRing::parse("fp:4").is_err());
        assert!(CoeffRing::parse("r").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
            (1usize..5, 1usize..5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..7, c), r))
        }

        fn sparse(a: &[Vec<i64>]) -> SparseMatrix {
            SparseMatrix::from_dense(&a.iter().map(|r| ints(r)).collect::<Vec<_>>())
        }

        proptest! {
            #[test]
            fn smith_is_exact_and_divisible(a in small_matrix()) {
                let m = sparse(&a);
                let snf = smith_normal_form(&m).unwrap();
                let d = snf.u.mul(&m).unwrap().mul(&snf.v).unwrap();
                for (i, j, x) in d.entries() {
                    prop_assert_eq!(i, j);
                    prop_assert_eq!(&x.to_integer(), &snf.invariants[i]);
                }
                prop_assert_eq!(d.nnz(), snf.invariants.len());
                for w in snf.invariants.windows(2) {
                    prop_assert!((&w[1] % &w[0]).is_zero());
                }
                prop_assert_eq!(&snf.invariants, &minors_oracle(&a));
                prop_assert_eq!(invariant_factors(&m).unwrap(), snf.invariants.clone());
            }

            #[test]
            fn solutions_reproduce_rhs(a in small_matrix(), seed in prop::collection::vec(-4i64..5, 5)) {
                let m = sparse(&a);
                let x0: Vec<Scalar> = ints(&seed[..m.cols()]);
                let b = m.mul_vec(&x0).unwrap();
                for ring in [CoeffRing::Integers, CoeffRing::Rationals] {
                    let x = solve(&m, &b, &ring).unwrap().expect("consistent system");
                    prop_assert_eq!(m.mul_vec(&x).unwrap(), b.clone());
                }
                let f7 = CoeffRing::PrimeField(7);
                let x = solve(&m, &b, &f7).unwrap().expect("consistent system");
                let mx = m.mul_vec(&x).unwrap();
                for (u, v) in mx.iter().zip(&b) {
                    prop_assert!(f7.is_zero(&(u - v)));
                }
            }

            #[test]
            fn kernel_vectors_vanish(a in small_matrix()) {
                let m = sparse(&a);
                for ring in [CoeffRing::Integers, CoeffRing::Rationals, CoeffRing::PrimeField(3)] {
                    let k = kernel_basis(&m, &ring).unwrap();
                    for v in &k {
                        prop_assert!(m.mul_vec(v).unwrap().iter().all(|x| ring.is_zero(x)));
                    }
                    prop_assert_eq!(k.len() + rank(&m, &ring).unwrap(), m.cols());
                }
            }
        }
    }
}
