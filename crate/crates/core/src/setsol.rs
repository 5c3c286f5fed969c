//! Set-theoretical (n-)solutions, their correspondence with n-racks, and
//! exhaustive enumeration of small operation tables.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nrack::{check_nrack, FiniteNRack, TABLE_CAP};
use crate::report::{Equation, Witness, YBReport};
use crate::tensor::{flatten, unflatten, MAX_TOTAL_DIM};
use crate::ybops::dim_cap;
use crate::Side;

/// Largest power checked when looking for `s^k = Id`.
pub const INVOLUTIVE_ORDER_CAP: usize = 24;

/// A total map `X^n → X^n`, stored as the flat index of each image tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetNMap {
    size: usize,
    arity: usize,
    side: Side,
    table: Vec<usize>,
}

fn tuple_count(m: usize, k: usize) -> Result<usize> {
    let total = (m as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if total > TABLE_CAP {
        return Err(Error::CarrierTooLarge { size: total, cap: TABLE_CAP });
    }
    Ok(total as usize)
}

impl SetNMap {
    pub fn new(size: usize, arity: usize, side: Side, table: Vec<usize>) -> Result<Self> {
        if size == 0 || arity < 2 {
            return Err(Error::InputInvalid(format!("size {size} arity {arity}")));
        }
        let len = tuple_count(size, arity)?;
        if table.len() != len {
            return Err(Error::InputInvalid(format!("map has {} entries, expected {len}", table.len())));
        }
        if let Some(v) = table.iter().find(|&&v| v >= len) {
            return Err(Error::InputInvalid(format!("image index {v} is outside X^{arity}")));
        }
        Ok(SetNMap { size, arity, side, table })
    }

    pub fn from_fn(size: usize, arity: usize, side: Side, f: impl Fn(&[usize]) -> Vec<usize> + Sync) -> Result<Self> {
        let len = tuple_count(size, arity)?;
        let dims = vec![size; arity];
        let table = (0..len)
            .into_par_iter()
            .map(|i| {
                let out = f(&unflatten(i, &dims));
                if out.len() != arity || out.iter().any(|&x| x >= size) {
                    usize::MAX
                } else {
                    flatten(&out, &dims)
                }
            })
            .collect();
        Self::new(size, arity, side, table)
    }

    /// Builds from `[x₁,…,x_n, y₁,…,y_n]` rows covering every input once.
    pub fn from_rows(size: usize, arity: usize, side: Side, rows: &[Vec<usize>]) -> Result<Self> {
        let len = tuple_count(size, arity)?;
        let dims = vec![size; arity];
        let mut table = vec![usize::MAX; len];
        for row in rows {
            if row.len() != 2 * arity || row.iter().any(|&x| x >= size) {
                return Err(Error::InputInvalid(format!("bad map row {row:?}")));
            }
            let i = flatten(&row[..arity], &dims);
            if table[i] != usize::MAX {
                return Err(Error::InputInvalid(format!("input {:?} listed twice", &row[..arity])));
            }
            table[i] = flatten(&row[arity..], &dims);
        }
        if let Some(i) = table.iter().position(|&v| v == usize::MAX) {
            return Err(Error::InputInvalid(format!("input {:?} missing", unflatten(i, &dims))));
        }
        Self::new(size, arity, side, table)
    }

    /// `(x₁,…,x_n) ↦ (x₂,…,x_n,x₁)`.
    pub fn flip(size: usize, arity: usize) -> Result<Self> {
        Self::from_fn(size, arity, Side::Right, |xs| {
            let mut v = xs.to_vec();
            v.rotate_left(1);
            v
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    pub fn apply(&self, xs: &[usize]) -> Vec<usize> {
        let dims = vec![self.size; self.arity];
        unflatten(self.table[flatten(xs, &dims)], &dims)
    }

    /// `[x₁,…,x_n, y₁,…,y_n]` for every input in row-major order.
    pub fn rows(&self) -> Vec<Vec<usize>> {
        let dims = vec![self.size; self.arity];
        self.table
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let mut row = unflatten(i, &dims);
                row.extend(unflatten(v, &dims));
                row
            })
            .collect()
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.table.len()];
        self.table.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
    }

    /// `τ∘s∘τ` with `τ` reversing the tuple; the side flips.
    pub fn mirrored(&self) -> Self {
        let dims = vec![self.size; self.arity];
        let rev = |i: usize| {
            let mut xs = unflatten(i, &dims);
            xs.reverse();
            flatten(&xs, &dims)
        };
        let table = (0..self.table.len()).map(|i| rev(self.table[rev(i)])).collect();
        SetNMap { table, side: self.side.flipped(), ..*self }
    }

    /// Applies the map to the window starting at `pos` of a longer tuple.
    fn apply_at(&self, xs: &mut [usize], pos: usize) {
        let window = &mut xs[pos..pos + self.arity];
        let out = self.apply(window);
        window.copy_from_slice(&out);
    }

    fn compose_with(&self, other: &SetNMap) -> SetNMap {
        let table = self.table.iter().map(|&v| other.table[v]).collect();
        SetNMap { table, ..self.clone() }
    }

    fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &v)| i == v)
    }
}

/// Application order of the window positions on each side of the set
/// n-Yang-Baxter equation (same shape as the linear one).
fn window_orders(n: usize, side: Side) -> (Vec<usize>, Vec<usize>) {
    let last = n - 1;
    match side {
        Side::Right => {
            let mut lhs = vec![0];
            lhs.extend((0..n).rev());
            let mut rhs: Vec<usize> = (0..n).rev().collect();
            rhs.push(last);
            (lhs, rhs)
        }
        Side::Left => {
            let mut lhs: Vec<usize> = (0..n).collect();
            lhs.push(0);
            let mut rhs = vec![last];
            rhs.extend(0..n);
            (lhs, rhs)
        }
    }
}

fn equation_witness(s: &SetNMap, side: Side, cap: Option<u128>) -> Result<Option<usize>> {
    let (m, n) = (s.size, s.arity);
    let width = 2 * n - 1;
    let total = (m as u128).checked_pow(width as u32).unwrap_or(u128::MAX);
    if let Some(cap) = cap.filter(|&c| total > c) {
        return Err(Error::DimensionCapExceeded { dim: total, cap });
    }
    if total > MAX_TOTAL_DIM {
        return Err(Error::IndexOverflow(total));
    }
    let dims = vec![m; width];
    let (lhs, rhs) = window_orders(n, side);
    let run = |order: &[usize], xs: &mut Vec<usize>| {
        for &p in order {
            s.apply_at(xs, p);
        }
    };
    Ok((0..total as usize).into_par_iter().find_first(|&i| {
        let mut a = unflatten(i, &dims);
        let mut b = a.clone();
        run(&lhs, &mut a);
        run(&rhs, &mut b);
        a != b
    }))
}

/// Bijectivity of the component families of a 3-ary map
/// `s(x,y,z) = (σ_{x,z}(y), τ_{x,y}(z), η_{y,z}(x))`: left is `τ`, right is
/// `η`, middle is `σ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nondegeneracy {
    pub left: bool,
    pub right: bool,
    pub middle: bool,
    /// The fixed pair of the first non-bijective member of each failing family.
    pub witnesses: Vec<Witness>,
}

impl Nondegeneracy {
    pub fn all(&self) -> bool {
        self.left && self.right && self.middle
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionProfile {
    pub size: usize,
    pub arity: usize,
    pub side: Side,
    pub is_bijective: bool,
    pub satisfies_right: bool,
    pub right_witness: Option<Vec<usize>>,
    pub satisfies_left: bool,
    pub left_witness: Option<Vec<usize>>,
    /// Only computed for `n = 3`.
    pub nondegenerate: Option<Nondegeneracy>,
    /// Smallest `k ≤ 24` with `s^k = Id`.
    pub involutive_order: Option<usize>,
}

impl SolutionProfile {
    pub fn satisfies(&self, side: Side) -> bool {
        match side {
            Side::Right => self.satisfies_right,
            Side::Left => self.satisfies_left,
        }
    }

    /// Bijective and satisfying the equation of the map's own side.
    pub fn is_solution(&self) -> bool {
        self.is_bijective && self.satisfies(self.side)
    }

    /// Satisfies its equation without being bijective.
    pub fn is_pre_solution(&self) -> bool {
        !self.is_bijective && self.satisfies(self.side)
    }

    /// `s³ = Id`.
    pub fn is_three_involutive(&self) -> bool {
        self.involutive_order.is_some_and(|k| 3 % k == 0)
    }
}

fn component_family(s: &SetNMap, out: usize, free: usize) -> Option<Witness> {
    // Fix the two inputs other than `free`, vary `free`, read component `out`.
    let m = s.size;
    let fixed: Vec<usize> = (0..3).filter(|&p| p != free).collect();
    for a in 0..m {
        for b in 0..m {
            let mut seen = vec![false; m];
            let mut xs = [0; 3];
            xs[fixed[0]] = a;
            xs[fixed[1]] = b;
            let ok = (0..m).all(|v| {
                xs[free] = v;
                !std::mem::replace(&mut seen[s.apply(&xs)[out]], true)
            });
            if !ok {
                return Some(Witness::new(vec![a, b], format!("component {out} is not bijective in input {free}")));
            }
        }
    }
    None
}

fn nondegeneracy(s: &SetNMap) -> Nondegeneracy {
    let middle = component_family(s, 0, 1);
    let left = component_family(s, 1, 2);
    let right = component_family(s, 2, 0);
    Nondegeneracy {
        left: left.is_none(),
        right: right.is_none(),
        middle: middle.is_none(),
        witnesses: [left, right, middle].into_iter().flatten().collect(),
    }
}

fn involutive_order(s: &SetNMap) -> Option<usize> {
    let mut power = s.clone();
    for k in 1..=INVOLUTIVE_ORDER_CAP {
        if power.is_identity() {
            return Some(k);
        }
        power = power.compose_with(s);
    }
    None
}

/// Evaluates both equations on every tuple of `X^(2n−1)` and fills the
/// profile. Refuses tuple spaces above the verification cap.
pub fn check_set_nsolution(s: &SetNMap) -> Result<SolutionProfile> {
    let dims = vec![s.size; 2 * s.arity - 1];
    let right = equation_witness(s, Side::Right, Some(dim_cap()))?;
    let left = equation_witness(s, Side::Left, Some(dim_cap()))?;
    Ok(SolutionProfile {
        size: s.size,
        arity: s.arity,
        side: s.side,
        is_bijective: s.is_bijective(),
        satisfies_right: right.is_none(),
        right_witness: right.map(|i| unflatten(i, &dims)),
        satisfies_left: left.is_none(),
        left_witness: left.map(|i| unflatten(i, &dims)),
        nondegenerate: (s.arity == 3).then(|| nondegeneracy(s)),
        involutive_order: involutive_order(s),
    })
}

/// The profile of a 3-ary map, with its nondegeneracy decomposition.
pub fn classify_3solution(s: &SetNMap) -> Result<SolutionProfile> {
    if s.arity != 3 {
        return Err(Error::ArityMismatch(format!("expected a 3-ary map, got arity {}", s.arity)));
    }
    check_set_nsolution(s)
}

/// The equation check alone, in the report shape shared with operators.
/// `witness` is the flat index of the first failing tuple.
pub fn verify_set_nybe(s: &SetNMap, side: Side) -> Result<YBReport> {
    verify_set_nybe_with_cap(s, side, Some(dim_cap()))
}

/// As [`verify_set_nybe`] with an explicit cap on `m^(2n−1)`.
pub fn verify_set_nybe_with_cap(s: &SetNMap, side: Side, cap: Option<u128>) -> Result<YBReport> {
    let start = Instant::now();
    let witness = equation_witness(s, side, cap)?;
    let equation = match (s.arity, side) {
        (2, _) => Equation::SetYbe,
        (_, Side::Right) => Equation::SetNYbeRight,
        (_, Side::Left) => Equation::SetNYbeLeft,
    };
    Ok(YBReport {
        equation,
        n: s.arity,
        dim: s.size,
        holds: witness.is_none(),
        invertible: s.is_bijective(),
        witness,
        nonzeros: s.table.len(),
        verification_dim: s.size.pow((2 * s.arity - 1) as u32),
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Right: `(x₁,…,x_n) ↦ (x₂,…,x_n,⟨x₁,…,x_n⟩)`. Left:
/// `(x₁,…,x_n) ↦ (⟨x₁,…,x_n⟩,x₁,…,x_{n−1})`. No checks.
pub fn induced_map(t: &FiniteNRack) -> Result<SetNMap> {
    SetNMap::from_fn(t.size(), t.arity(), t.side(), |xs| {
        let v = t.op(xs);
        match t.side() {
            Side::Right => {
                let mut out = xs[1..].to_vec();
                out.push(v);
                out
            }
            Side::Left => {
                let mut out = vec![v];
                out.extend_from_slice(&xs[..xs.len() - 1]);
                out
            }
        }
    })
}

/// The induced map of any n-ary table, after confirming that it is an
/// n-solution exactly when the table is an n-rack.
pub fn solution_from_nrack(t: &FiniteNRack) -> Result<SetNMap> {
    let s = induced_map(t)?;
    let profile = check_set_nsolution(&s)?;
    let rack = check_nrack(t).passed();
    if profile.is_solution() != rack {
        return Err(Error::VerdictDisagreement(format!(
            "n-rack verdict {rack} but n-solution verdict {}",
            profile.is_solution()
        )));
    }
    Ok(s)
}

fn require_solution(s: &SetNMap, what: &str) -> Result<()> {
    let p = check_set_nsolution(s)?;
    if p.is_bijective && p.satisfies_right {
        Ok(())
    } else {
        Err(Error::InputInvalid(format!("{what} is not a right set-theoretical solution")))
    }
}

/// `s_n = (Id^{n−2}×r)⋯(Id×r×Id^{n−3})(r×Id^{n−2})` for a solution `r`.
pub fn nsolution_from_solution(r: &SetNMap, n: usize) -> Result<SetNMap> {
    if r.arity != 2 || n < 2 {
        return Err(Error::ArityMismatch(format!("need a binary map and n ≥ 2, got {} and {n}", r.arity)));
    }
    require_solution(r, "input")?;
    SetNMap::from_fn(r.size, n, Side::Right, |xs| {
        let mut v = xs.to_vec();
        for p in 0..n - 1 {
            r.apply_at(&mut v, p);
        }
        v
    })
}

/// `s̃ = (s×Id^{n−2})⋯(Id^{n−3}×s×Id)(Id^{n−2}×s)` as a solution on
/// `X^(n−1)`, whose elements are numbered row-major.
pub fn solution_from_nsolution(s: &SetNMap) -> Result<SetNMap> {
    require_solution(s, "input")?;
    let (m, n) = (s.size, s.arity);
    let block = tuple_count(m, n - 1)?;
    let dims = vec![m; 2 * n - 2];
    SetNMap::from_fn(block, 2, Side::Right, |pair| {
        let mut v = unflatten(pair[0] * block + pair[1], &dims);
        for p in (0..n - 1).rev() {
            s.apply_at(&mut v, p);
        }
        let f = flatten(&v, &dims);
        vec![f / block, f % block]
    })
}

/// What an enumerated table must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFilter {
    /// Self-distributive with bijective translations.
    Nrack,
    /// The induced map `(x₂,…,x_n,⟨x̄⟩)` is a set-theoretical n-solution,
    /// tested on the map itself rather than through the rack axioms.
    Nsolution,
    /// Self-distributive.
    Nshelf,
}

impl std::str::FromStr for TableFilter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nrack" => Ok(TableFilter::Nrack),
            "nsolution" => Ok(TableFilter::Nsolution),
            "nshelf" => Ok(TableFilter::Nshelf),
            other => Err(Error::InputInvalid(format!("unknown filter {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Census {
    pub count: usize,
    pub filter: TableFilter,
    pub m: usize,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tables: Option<Vec<Vec<usize>>>,
}

/// Whether `(m, n)` is within the enumeration caps: `m ≤ 3, n ≤ 3`, or
/// `m ≤ 4` when `n = 2`.
pub fn within_enumeration_cap(m: usize, n: usize) -> bool {
    m >= 1 && n >= 2 && (m <= 3 && n <= 3 || n == 2 && m <= 4)
}

const UNSET: u8 = u8::MAX;
/// `2n − 1` for the largest enumerable arity.
const MAX_WIDTH: usize = 5;

type Instance = [u8; MAX_WIDTH];

struct Search {
    m: usize,
    n: usize,
    filter: TableFilter,
    cells: usize,
    /// Every tuple of `X^(2n−1)`.
    instances: Vec<Instance>,
    orders: (Vec<usize>, Vec<usize>),
}

impl Search {
    /// Reads the cell at `xs`, recording whether it is the `fresh` one.
    fn probe(&self, table: &[u8], xs: &[u8], fresh: usize, touched: &mut bool) -> Option<u8> {
        let i = xs.iter().fold(0usize, |acc, &x| acc * self.m + x as usize);
        *touched |= i == fresh;
        let v = table[i];
        (v != UNSET).then_some(v)
    }

    /// False when the partial table already violates the filter. Cells are
    /// assigned in order and `cell` is the newest, so only instances that
    /// read it can have become decidable.
    fn consistent(&self, table: &[u8], cell: usize) -> bool {
        match self.filter {
            TableFilter::Nrack => self.column_injective(table, cell) && self.distributive(table, cell),
            TableFilter::Nshelf => self.distributive(table, cell),
            TableFilter::Nsolution => self.map_injective(table, cell) && self.map_equation(table, cell),
        }
    }

    /// The right translation through `cell` is still injective.
    fn column_injective(&self, table: &[u8], cell: usize) -> bool {
        let stride = self.cells / self.m;
        let tail = cell % stride;
        let v = table[cell];
        (0..self.m).map(|x| x * stride + tail).all(|c| c == cell || table[c] != v)
    }

    fn distributive(&self, table: &[u8], cell: usize) -> bool {
        let n = self.n;
        self.instances.iter().all(|t| {
            let (xs, ys) = t[..2 * n - 1].split_at(n);
            let mut touched = false;
            let mut args = [0u8; MAX_WIDTH];
            args[1..n].copy_from_slice(ys);
            let mut spread = [0u8; MAX_WIDTH];
            for (i, &x) in xs.iter().enumerate() {
                args[0] = x;
                match self.probe(table, &args[..n], cell, &mut touched) {
                    Some(v) => spread[i] = v,
                    None => return true,
                }
            }
            let Some(inner) = self.probe(table, xs, cell, &mut touched) else { return true };
            args[0] = inner;
            let Some(lhs) = self.probe(table, &args[..n], cell, &mut touched) else { return true };
            let Some(rhs) = self.probe(table, &spread[..n], cell, &mut touched) else { return true };
            !touched || lhs == rhs
        })
    }

    /// The induced map sends distinct assigned tuples to distinct images.
    fn map_injective(&self, table: &[u8], cell: usize) -> bool {
        let stride = self.cells / self.m;
        let image = |c: usize| (c % stride, table[c]);
        let mine = image(cell);
        (0..self.cells).all(|c| c == cell || table[c] == UNSET || image(c) != mine)
    }

    fn run_chain(
        &self,
        table: &[u8],
        t: &Instance,
        order: &[usize],
        fresh: usize,
        touched: &mut bool,
    ) -> Option<Instance> {
        let mut v = *t;
        for &p in order {
            let w = &mut v[p..p + self.n];
            let out = self.probe(table, w, fresh, touched)?;
            w.rotate_left(1);
            w[self.n - 1] = out;
        }
        Some(v)
    }

    /// Both sides of the right set equation agree wherever both are defined.
    fn map_equation(&self, table: &[u8], cell: usize) -> bool {
        let (lhs, rhs) = &self.orders;
        self.instances.iter().all(|t| {
            let mut touched = false;
            let Some(a) = self.run_chain(table, t, lhs, cell, &mut touched) else { return true };
            let Some(b) = self.run_chain(table, t, rhs, cell, &mut touched) else { return true };
            !touched || a == b
        })
    }

    fn dfs(&self, table: &mut Vec<u8>, cell: usize, found: &mut Vec<Vec<u8>>) {
        if cell == self.cells {
            found.push(table.clone());
            return;
        }
        for v in 0..self.m as u8 {
            table[cell] = v;
            if self.consistent(table, cell) {
                self.dfs(table, cell + 1, found);
            }
        }
        table[cell] = UNSET;
    }
}

/// All operation tables `X^n → X` on `m` elements passing `filter`, in
/// lexicographic order of their row-major value lists. Work is split by
/// table prefix and merged in prefix order, so the output does not depend
/// on the number of workers.
pub fn enumerate_tables(m: usize, n: usize, filter: TableFilter, keep_tables: bool) -> Result<Census> {
    if !within_enumeration_cap(m, n) {
        return Err(Error::CapExceeded(format!(
            "enumeration is limited to m ≤ 3, n ≤ 3 (m ≤ 4 for n = 2); got m = {m}, n = {n}"
        )));
    }
    let cells = m.pow(n as u32);
    let width = 2 * n - 1;
    let instances = (0..m.pow(width as u32))
        .map(|i| {
            let mut t = [0u8; MAX_WIDTH];
            for (slot, x) in t.iter_mut().zip(unflatten(i, &vec![m; width])) {
                *slot = x as u8;
            }
            t
        })
        .collect();
    let orders = window_orders(n, Side::Right);
    let search = Search { m, n, filter, cells, instances, orders };
    // Fixed prefix depth: enough tasks to spread, independent of workers.
    let depth = (0..=cells).find(|&k| m.pow(k as u32) >= 64).unwrap_or(cells).min(cells);
    let prefixes = m.pow(depth as u32);
    let chunks: Vec<Vec<Vec<u8>>> = (0..prefixes)
        .into_par_iter()
        .map(|p| {
            let mut table = vec![UNSET; cells];
            let digits = unflatten(p, &vec![m; depth]);
            for (c, &v) in digits.iter().enumerate() {
                table[c] = v as u8;
                if !search.consistent(&table, c) {
                    return Vec::new();
                }
            }
            let mut found = Vec::new();
            search.dfs(&mut table, depth, &mut found);
            found
        })
        .collect();
    let all: Vec<Vec<usize>> = chunks.into_iter().flatten().map(|t| t.into_iter().map(usize::from).collect()).collect();
    Ok(Census { count: all.len(), filter, m, n, tables: keep_tables.then_some(all) })
}

/// Every table on `m` elements of arity `n`, in lexicographic order. For
/// brute-force cross-checks on tiny carriers.
pub fn all_tables(m: usize, n: usize) -> Result<Vec<FiniteNRack>> {
    let cells = tuple_count(m, n)?;
    let count = (m as u128).checked_pow(cells as u32).unwrap_or(u128::MAX);
    if count > 1 << 20 {
        return Err(Error::CapExceeded(format!("{count} tables")));
    }
    (0..count as usize).map(|i| FiniteNRack::new(m, n, Side::Right, unflatten(i, &vec![m; cells]))).collect()
}
