//! Sparse linear operators on tensor powers.
//!
//! Operators are stored column-major: column `j` holds the image of the
//! basis vector `e_j` as a sorted list of `(row, value)` pairs with no
//! stored zeros. Flat indices are row-major over the factor dimensions
//! (first factor most significant).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarMode};

/// Largest total dimension accepted for any shape.
pub const MAX_TOTAL_DIM: u128 = 1 << 31;

/// Columns per rayon task when building operators in parallel.
const PAR_CHUNK: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct TensorShape {
    dims: Vec<usize>,
}

impl TensorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::ShapeMismatch(format!("zero factor dimension in {dims:?}")));
        }
        let total = dims.iter().try_fold(1u128, |acc, &d| {
            let t = acc * d as u128;
            (t <= MAX_TOTAL_DIM).then_some(t)
        });
        match total {
            Some(_) => Ok(TensorShape { dims }),
            None => Err(Error::IndexOverflow(dims.iter().map(|&d| d as u128).fold(1u128, |a, d| a.saturating_mul(d)))),
        }
    }

    /// `d^k` as `k` factors of dimension `d`.
    pub fn power(d: usize, k: usize) -> Result<Self> {
        Self::new(vec![d; k])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn factors(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn concat(&self, other: &TensorShape) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(dims)
    }

    /// Splits a flat index into per-factor indices.
    pub fn unflatten(&self, idx: usize) -> Vec<usize> {
        unflatten(idx, &self.dims)
    }

    pub fn flatten(&self, digits: &[usize]) -> usize {
        flatten(digits, &self.dims)
    }
}

impl TryFrom<Vec<usize>> for TensorShape {
    type Error = Error;
    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<TensorShape> for Vec<usize> {
    fn from(s: TensorShape) -> Self {
        s.dims
    }
}

pub(crate) fn unflatten(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = idx % d;
        idx /= d;
    }
    out
}

pub(crate) fn flatten(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// A sparse vector keyed by flat index.
#[derive(Clone, Debug, Default)]
pub struct SparseVec {
    entries: BTreeMap<usize, Scalar>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(i: usize, mode: ScalarMode) -> Self {
        let mut v = Self::new();
        v.entries.insert(i, Scalar::one(mode));
        v
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut v = Self::new();
        for (i, s) in pairs {
            v.add_at(i, &s);
        }
        v
    }

    /// Adds `value` at `idx`, dropping the entry if it cancels to zero.
    pub fn add_at(&mut self, idx: usize, value: &Scalar) {
        if value.is_zero() {
            return;
        }
        match self.entries.get_mut(&idx) {
            Some(slot) => {
                *slot += value;
                if slot.is_zero() {
                    self.entries.remove(&idx);
                }
            }
            None => {
                self.entries.insert(idx, value.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &SparseVec, c: &Scalar) {
        for (&i, v) in &other.entries {
            self.add_at(i, &(c * v));
        }
    }

    pub fn scaled(&self, c: &Scalar) -> SparseVec {
        let mut out = SparseVec::new();
        out.add_scaled(self, c);
        out
    }

    pub fn get(&self, idx: usize) -> Option<&Scalar> {
        self.entries.get(&idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().map(|(&i, s)| (i, s))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Equality with float tolerance; exact entries compare literally.
    pub fn approx_eq(&self, other: &SparseVec) -> bool {
        let mut a = self.entries.iter().peekable();
        let mut b = other.entries.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return true,
                (Some((ia, va)), Some((ib, vb))) if ia == ib => {
                    if va != vb {
                        return false;
                    }
                    a.next();
                    b.next();
                }
                (Some((ia, va)), Some((ib, _))) if ia < ib => {
                    if !va.is_negligible() {
                        return false;
                    }
                    a.next();
                }
                (Some((_, va)), None) => {
                    if !va.is_negligible() {
                        return false;
                    }
                    a.next();
                }
                (_, Some((_, vb))) => {
                    if !vb.is_negligible() {
                        return false;
                    }
                    b.next();
                }
            }
        }
    }

    fn into_column(self) -> Vec<(usize, Scalar)> {
        self.entries.into_iter().collect()
    }
}

impl PartialEq for SparseVec {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other)
    }
}

impl FromIterator<(usize, Scalar)> for SparseVec {
    fn from_iter<I: IntoIterator<Item = (usize, Scalar)>>(iter: I) -> Self {
        Self::from_pairs(iter)
    }
}

#[derive(Clone, Debug)]
pub struct TensorOperator {
    domain: TensorShape,
    codomain: TensorShape,
    mode: ScalarMode,
    cols: Vec<Vec<(usize, Scalar)>>,
}

impl TensorOperator {
    /// Builds an operator column by column; `f(j)` is the image of `e_j`.
    pub fn from_fn(
        domain: TensorShape,
        codomain: TensorShape,
        mode: ScalarMode,
        f: impl Fn(usize) -> SparseVec + Sync,
    ) -> Self {
        let n = domain.total();
        let rows = codomain.total();
        let cols: Vec<Vec<(usize, Scalar)>> = if n >= 2 * PAR_CHUNK {
            (0..n).into_par_iter().with_min_len(PAR_CHUNK).map(|j| f(j).into_column()).collect()
        } else {
            (0..n).map(|j| f(j).into_column()).collect()
        };
        debug_assert!(cols.iter().flatten().all(|(r, _)| *r < rows));
        TensorOperator { domain, codomain, mode, cols }
    }

    /// Builds from `(row, col, value)` triples; duplicates are rejected.
    pub fn from_entries(
        domain: TensorShape,
        codomain: TensorShape,
        mode: ScalarMode,
        entries: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Self> {
        let (n, m) = (domain.total(), codomain.total());
        let mut cols: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); n];
        for (r, c, v) in entries {
            if r >= m || c >= n {
                return Err(Error::ShapeMismatch(format!("entry ({r},{c}) outside {m}x{n} operator")));
            }
            if cols[c].insert(r, v).is_some() {
                return Err(Error::Schema(format!("duplicate entry ({r},{c})")));
            }
        }
        let cols = cols.into_iter().map(|c| c.into_iter().filter(|(_, v)| !v.is_zero()).collect()).collect();
        Ok(TensorOperator { domain, codomain, mode, cols })
    }

    pub fn identity(shape: TensorShape, mode: ScalarMode) -> Self {
        let cols = (0..shape.total()).map(|j| vec![(j, Scalar::one(mode))]).collect();
        TensorOperator { domain: shape.clone(), codomain: shape, mode, cols }
    }

    pub fn zero(domain: TensorShape, codomain: TensorShape, mode: ScalarMode) -> Self {
        let cols = vec![Vec::new(); domain.total()];
        TensorOperator { domain, codomain, mode, cols }
    }

    pub fn domain(&self) -> &TensorShape {
        &self.domain
    }

    pub fn codomain(&self) -> &TensorShape {
        &self.codomain
    }

    pub fn mode(&self) -> ScalarMode {
        self.mode
    }

    pub fn is_square(&self) -> bool {
        self.domain.total() == self.codomain.total()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, Scalar)] {
        &self.cols[j]
    }

    pub fn column_vec(&self, j: usize) -> SparseVec {
        SparseVec { entries: self.cols[j].iter().cloned().collect() }
    }

    pub fn get(&self, row: usize, col: usize) -> Scalar {
        self.cols[col]
            .binary_search_by_key(&row, |(r, _)| *r)
            .map(|k| self.cols[col][k].1.clone())
            .unwrap_or_else(|_| Scalar::zero(self.mode))
    }

    /// All nonzero entries sorted by `(row, col)`.
    pub fn entries(&self) -> Vec<(usize, usize, Scalar)> {
        let mut out: Vec<_> = self
            .cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v.clone())))
            .collect();
        out.sort_by_key(|(r, c, _)| (*r, *c));
        out
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, c) in v.iter() {
            for (r, a) in &self.cols[j] {
                out.add_at(*r, &(c * a));
            }
        }
        out
    }

    /// Same matrix, new factor bookkeeping.
    pub fn reshape(&self, domain: TensorShape, codomain: TensorShape) -> Result<Self> {
        if domain.total() != self.domain.total() || codomain.total() != self.codomain.total() {
            return Err(Error::ShapeMismatch(format!(
                "cannot reshape {:?}->{:?} as {:?}->{:?}",
                self.domain.dims, self.codomain.dims, domain.dims, codomain.dims
            )));
        }
        Ok(TensorOperator { domain, codomain, mode: self.mode, cols: self.cols.clone() })
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        let mode = if c.mode() == ScalarMode::Float { ScalarMode::Float } else { self.mode };
        TensorOperator::from_fn(self.domain.clone(), self.codomain.clone(), mode, |j| self.column_vec(j).scaled(c))
    }

    pub fn add(&self, other: &TensorOperator) -> Result<Self> {
        if self.domain.total() != other.domain.total() || self.codomain.total() != other.codomain.total() {
            return Err(Error::ShapeMismatch("operator sum of different sizes".into()));
        }
        let one = Scalar::one(self.mode);
        Ok(TensorOperator::from_fn(self.domain.clone(), self.codomain.clone(), join_mode(self.mode, other.mode), |j| {
            let mut v = self.column_vec(j);
            v.add_scaled(&other.column_vec(j), &one);
            v
        }))
    }

    /// First column where the two operators differ, if any.
    pub fn first_difference(&self, other: &TensorOperator) -> Result<Option<usize>> {
        if self.domain.total() != other.domain.total() || self.codomain.total() != other.codomain.total() {
            return Err(Error::ShapeMismatch(format!(
                "comparing {}x{} with {}x{}",
                self.codomain.total(),
                self.domain.total(),
                other.codomain.total(),
                other.domain.total()
            )));
        }
        let differs = |j: &usize| {
            let a = &self.cols[*j];
            let b = &other.cols[*j];
            !(a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.0 == y.0 && x.1 == y.1))
                && !self.column_vec(*j).approx_eq(&other.column_vec(*j))
        };
        Ok((0..self.cols.len()).into_par_iter().find_first(differs))
    }

    /// Entrywise equality (literal in exact mode, within tolerance in float).
    pub fn same_as(&self, other: &TensorOperator) -> bool {
        matches!(self.first_difference(other), Ok(None))
    }

    /// Dense row-major copy, for small operators and test oracles.
    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut m = vec![vec![Scalar::zero(self.mode); self.domain.total()]; self.codomain.total()];
        for (c, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                m[*r][c] = v.clone();
            }
        }
        m
    }

    pub fn from_dense(
        domain: TensorShape,
        codomain: TensorShape,
        mode: ScalarMode,
        rows: &[Vec<Scalar>],
    ) -> Result<Self> {
        if rows.len() != codomain.total() || rows.iter().any(|r| r.len() != domain.total()) {
            return Err(Error::ShapeMismatch("dense matrix does not match shapes".into()));
        }
        let entries =
            rows.iter().enumerate().flat_map(|(r, row)| row.iter().enumerate().map(move |(c, v)| (r, c, v.clone())));
        Self::from_entries(domain, codomain, mode, entries)
    }
}

pub(crate) fn join_mode(a: ScalarMode, b: ScalarMode) -> ScalarMode {
    if a == ScalarMode::Float || b == ScalarMode::Float {
        ScalarMode::Float
    } else {
        ScalarMode::Exact
    }
}

/// `A ∘ B`.
pub fn compose(a: &TensorOperator, b: &TensorOperator) -> Result<TensorOperator> {
    if b.codomain.total() != a.domain.total() {
        return Err(Error::ShapeMismatch(format!(
            "cannot compose {}-dim codomain into {}-dim domain",
            b.codomain.total(),
            a.domain.total()
        )));
    }
    Ok(TensorOperator::from_fn(b.domain.clone(), a.codomain.clone(), join_mode(a.mode, b.mode), |j| {
        a.apply(&b.column_vec(j))
    }))
}

/// Composes a list of operators, applying the last one first.
pub fn compose_all(ops: &[&TensorOperator]) -> Result<TensorOperator> {
    let (last, rest) = ops.split_last().ok_or_else(|| Error::ShapeMismatch("empty".into()))?;
    rest.iter().rev().try_fold((*last).clone(), |acc, op| compose(op, &acc))
}

/// Kronecker product `A ⊗ B` with concatenated shapes.
pub fn kron(a: &TensorOperator, b: &TensorOperator) -> Result<TensorOperator> {
    kron_all(&[a, b])
}

pub fn kron_all(ops: &[&TensorOperator]) -> Result<TensorOperator> {
    let mut domain = TensorShape::new(vec![])?;
    let mut codomain = TensorShape::new(vec![])?;
    let mut mode = ScalarMode::Exact;
    for op in ops {
        domain = domain.concat(&op.domain)?;
        codomain = codomain.concat(&op.codomain)?;
        mode = join_mode(mode, op.mode);
    }
    let factors: Vec<Factor> = ops.iter().map(|op| Factor::Op((*op).clone())).collect();
    let stage = Stage::Kron(factors);
    Ok(TensorOperator::from_fn(domain, codomain, mode, |j| stage.apply(&SparseVec::basis(j, mode))))
}

/// `Id^{⊗left} ⊗ A ⊗ Id^{⊗right}` where every factor has dimension
/// `factor_dim`.
pub fn embed(a: &TensorOperator, left: usize, right: usize, factor_dim: usize) -> Result<TensorOperator> {
    let k = power_exponent(a.domain.total(), factor_dim).filter(|_| a.is_square()).ok_or_else(|| {
        Error::ShapeMismatch(format!("operator of size {} is not square on a power of {factor_dim}", a.domain.total()))
    })?;
    let shape = TensorShape::power(factor_dim, left + k + right)?;
    let left_dim = factor_dim.pow(left as u32);
    let right_dim = factor_dim.pow(right as u32);
    let stage = Stage::Embed { op: a.clone(), left: left_dim, right: right_dim };
    Ok(TensorOperator::from_fn(shape.clone(), shape, a.mode, |j| stage.apply(&SparseVec::basis(j, a.mode))))
}

/// `Some(k)` when `total == d^k`.
pub(crate) fn power_exponent(total: usize, d: usize) -> Option<usize> {
    if d == 1 {
        return (total == 1).then_some(0);
    }
    let (mut t, mut k) = (1usize, 0usize);
    while t < total {
        t = t.checked_mul(d)?;
        k += 1;
    }
    (t == total).then_some(k)
}

/// Integer `n`-th root, if exact.
pub(crate) fn exact_root(total: usize, n: usize) -> Option<usize> {
    let guess = (total as f64).powf(1.0 / n as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&d| d > 0 && d.checked_pow(n as u32) == Some(total))
}

fn check_permutation(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(Error::NonPermutation(perm.to_vec()));
        }
    }
    Ok(())
}

/// Moves the factor at position `p` to position `perm[p]`.
pub fn permutation_operator(shape: &TensorShape, perm: &[usize], mode: ScalarMode) -> Result<TensorOperator> {
    if perm.len() != shape.factors() {
        return Err(Error::NonPermutation(perm.to_vec()));
    }
    check_permutation(perm)?;
    let mut out_dims = vec![0; perm.len()];
    for (p, &q) in perm.iter().enumerate() {
        out_dims[q] = shape.dims[p];
    }
    let codomain = TensorShape::new(out_dims)?;
    let stage = Stage::Permute { dims: shape.dims.clone(), perm: perm.to_vec() };
    Ok(TensorOperator::from_fn(shape.clone(), codomain, mode, |j| stage.apply(&SparseVec::basis(j, mode))))
}

/// Cyclic shift `x₁⊗x₂⊗…⊗x_n ↦ x₂⊗…⊗x_n⊗x₁`.
pub fn cyclic_shift(d: usize, n: usize, mode: ScalarMode) -> Result<TensorOperator> {
    let perm: Vec<usize> = (0..n).map(|p| (p + n - 1) % n).collect();
    permutation_operator(&TensorShape::power(d, n)?, &perm, mode)
}

/// Full reversal `x₁⊗…⊗x_n ↦ x_n⊗…⊗x₁`.
pub fn reversal(d: usize, n: usize, mode: ScalarMode) -> Result<TensorOperator> {
    let perm: Vec<usize> = (0..n).rev().collect();
    permutation_operator(&TensorShape::power(d, n)?, &perm, mode)
}

/// Scatter form of the leg regrouping `(u₁^1…u₁^k, u₂^1…u₂^k, …)` ↦
/// `(u₁^1, u₂^1, …, u₁^2, u₂^2, …)` for `items` items with `legs` legs each.
pub(crate) fn deal_perm(items: usize, legs: usize) -> Vec<usize> {
    (0..items * legs).map(|p| (p % legs) * items + p / legs).collect()
}

/// `u₁⊗v₁⊗u₂⊗v₂⊗… ↦ u₁⊗u₂⊗…⊗v₁⊗v₂⊗…` on `(k^d)^{⊗2n}`.
pub fn deal_permutation(n: usize, d: usize, mode: ScalarMode) -> Result<TensorOperator> {
    permutation_operator(&TensorShape::power(d, 2 * n)?, &deal_perm(n, 2), mode)
}

/// Inverse by Gauss-Jordan elimination on sparse rows.
pub fn invert(a: &TensorOperator) -> Result<TensorOperator> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch("invert needs a square operator".into()));
    }
    let n = a.domain.total();
    let mut rows = rows_of(a);
    for (i, row) in rows.iter_mut().enumerate() {
        row.insert(n + i, Scalar::one(a.mode));
    }
    let (rank, reduced) = row_reduce(rows, n);
    if rank < n {
        return Err(Error::SingularMatrix);
    }
    let entries = reduced
        .into_iter()
        .enumerate()
        .flat_map(|(i, row)| row.into_iter().filter(|(c, _)| *c >= n).map(move |(c, v)| (i, c - n, v)));
    TensorOperator::from_entries(a.codomain.clone(), a.domain.clone(), a.mode, entries)
}

pub fn rank(a: &TensorOperator) -> usize {
    row_reduce(rows_of(a), a.domain.total()).0
}

fn rows_of(a: &TensorOperator) -> Vec<BTreeMap<usize, Scalar>> {
    let mut rows = vec![BTreeMap::new(); a.codomain.total()];
    for (c, col) in a.cols.iter().enumerate() {
        for (r, v) in col {
            rows[*r].insert(c, v.clone());
        }
    }
    rows
}

/// Reduced row echelon form over the first `ncols` columns. Returns the
/// rank and the rows, with pivot row `i` holding pivot column order `i`.
/// For square full-rank input the rows come back sorted by pivot column.
pub(crate) fn row_reduce(
    mut rows: Vec<BTreeMap<usize, Scalar>>,
    ncols: usize,
) -> (usize, Vec<BTreeMap<usize, Scalar>>) {
    let mut rank = 0;
    for col in 0..ncols {
        // Sparsest candidate keeps fill-in low; in float mode prefer size.
        let pivot =
            (rank..rows.len()).filter(|&r| rows[r].get(&col).is_some_and(|v| !v.is_negligible())).min_by(|&x, &y| {
                let vx = &rows[x][&col];
                match vx {
                    Scalar::Float(_) => {
                        rows[y][&col].abs_f64().partial_cmp(&vx.abs_f64()).unwrap_or(std::cmp::Ordering::Equal)
                    }
                    Scalar::Exact(_) => rows[x].len().cmp(&rows[y].len()),
                }
            });
        let Some(p) = pivot else { continue };
        rows.swap(rank, p);
        let inv = rows[rank][&col].checked_inv().expect("nonzero pivot");
        let pivot_row: BTreeMap<usize, Scalar> = rows[rank].iter().map(|(&c, v)| (c, v * &inv)).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank {
                continue;
            }
            let Some(f) = row.get(&col).cloned() else { continue };
            for (&c, v) in &pivot_row {
                let delta = -(&f * v);
                let slot = row.entry(c).or_insert_with(|| Scalar::zero(v.mode()));
                *slot += &delta;
                if slot.is_zero() || (c == col) {
                    row.remove(&c);
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    (rank, rows)
}

/// One factor of a lazy Kronecker product.
#[derive(Clone, Debug)]
pub enum Factor {
    Id(usize),
    Op(TensorOperator),
}

impl Factor {
    fn domain_dim(&self) -> usize {
        match self {
            Factor::Id(d) => *d,
            Factor::Op(op) => op.domain.total(),
        }
    }

    fn codomain_dim(&self) -> usize {
        match self {
            Factor::Id(d) => *d,
            Factor::Op(op) => op.codomain.total(),
        }
    }
}

/// A step of a lazily evaluated operator product. Nothing here is
/// materialized: stages act on sparse vectors directly.
#[derive(Clone, Debug)]
pub enum Stage {
    Op(TensorOperator),
    Kron(Vec<Factor>),
    /// `Id_left ⊗ op ⊗ Id_right`, with `left`/`right` total dimensions.
    Embed {
        op: TensorOperator,
        left: usize,
        right: usize,
    },
    /// Scatter permutation of factors with the given input dims.
    Permute {
        dims: Vec<usize>,
        perm: Vec<usize>,
    },
}

impl Stage {
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        match self {
            Stage::Op(op) => op.apply(v),
            Stage::Kron(factors) => apply_kron(factors, v),
            Stage::Embed { op, right, .. } => {
                let mid = op.domain.total();
                let mut out = SparseVec::new();
                for (j, c) in v.iter() {
                    let (l, rest) = (j / (mid * right), j % (mid * right));
                    let (a, r) = (rest / right, rest % right);
                    for (row, x) in op.column(a) {
                        out.add_at((l * op.codomain.total() + row) * right + r, &(c * x));
                    }
                }
                out
            }
            Stage::Permute { dims, perm } => {
                let mut out_dims = vec![0; dims.len()];
                for (p, &q) in perm.iter().enumerate() {
                    out_dims[q] = dims[p];
                }
                let mut out = SparseVec::new();
                let mut moved = vec![0; dims.len()];
                for (j, c) in v.iter() {
                    for (p, x) in unflatten(j, dims).into_iter().enumerate() {
                        moved[perm[p]] = x;
                    }
                    out.add_at(flatten(&moved, &out_dims), c);
                }
                out
            }
        }
    }

    /// Gather-form permutation: output factor `j` is input factor `src[j]`.
    pub fn gather(dims: Vec<usize>, src: &[usize]) -> Stage {
        let mut perm = vec![0; src.len()];
        for (j, &s) in src.iter().enumerate() {
            perm[s] = j;
        }
        Stage::Permute { dims, perm }
    }
}

fn apply_kron(factors: &[Factor], v: &SparseVec) -> SparseVec {
    let in_dims: Vec<usize> = factors.iter().map(Factor::domain_dim).collect();
    let out_dims: Vec<usize> = factors.iter().map(Factor::codomain_dim).collect();
    let mut out = SparseVec::new();
    for (j, c) in v.iter() {
        let digits = unflatten(j, &in_dims);
        // Expand the product of factor columns one factor at a time.
        let mut partial: Vec<(usize, Scalar)> = vec![(0, c.clone())];
        for ((f, &x), &od) in factors.iter().zip(&digits).zip(&out_dims) {
            partial = match f {
                Factor::Id(_) => partial.into_iter().map(|(i, s)| (i * od + x, s)).collect(),
                Factor::Op(op) => partial
                    .iter()
                    .flat_map(|(i, s)| op.column(x).iter().map(move |(r, y)| (i * od + r, s * y)))
                    .collect(),
            };
            if partial.is_empty() {
                break;
            }
        }
        for (i, s) in partial {
            out.add_at(i, &s);
        }
    }
    out
}

/// A lazily evaluated product of stages, applied left to right.
#[derive(Clone, Debug)]
pub struct Chain {
    stages: Vec<Stage>,
}

impl Chain {
    pub fn new() -> Self {
        Chain { stages: Vec::new() }
    }

    pub fn then(mut self, stage: Stage) -> Self {
        self.stages.push(stage);
        self
    }

    pub fn then_op(self, op: &TensorOperator) -> Self {
        self.then(Stage::Op(op.clone()))
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut cur = v.clone();
        for s in &self.stages {
            if cur.is_empty() {
                break;
            }
            cur = s.apply(&cur);
        }
        cur
    }

    pub fn materialize(&self, domain: TensorShape, codomain: TensorShape, mode: ScalarMode) -> TensorOperator {
        TensorOperator::from_fn(domain, codomain, mode, |j| self.apply(&SparseVec::basis(j, mode)))
    }
}

impl Default for Chain {
    fn default() -> Self {
        Self::new()
    }
}

/// Smallest basis index on which two chains disagree.
pub fn chains_disagree(a: &Chain, b: &Chain, domain_dim: usize, mode: ScalarMode) -> Option<usize> {
    (0..domain_dim).into_par_iter().with_min_len(PAR_CHUNK).find_first(|&j| {
        let e = SparseVec::basis(j, mode);
        !a.apply(&e).approx_eq(&b.apply(&e))
    })
}
