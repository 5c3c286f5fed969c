//! Finite n-racks as operation tables, the rack constructions between them,
//! and the vector n-rack of an n-Leibniz algebra.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{add_vec, basis_vec, show_vec, sub_vec, tensor_vecs, vec_eq, zero_vec, Matrix, Vector};
use crate::nleibniz::{ad, exp_matrix, fundamental_leibniz, NLeibnizAlgebra};
use crate::report::{VerificationReport, Witness};
use crate::scalar::{Scalar, ScalarMode};
use crate::tensor::unflatten;
use crate::Side;

/// Largest carrier `rack_from_nrack` and `krack_from_power` will build.
pub const CARRIER_CAP: u128 = 1_000_000;
/// Largest operation table (in entries) any constructor will allocate.
pub const TABLE_CAP: u128 = 1 << 26;

fn table_len(size: usize, arity: usize) -> Result<usize> {
    let len = (size as u128).checked_pow(arity as u32).unwrap_or(u128::MAX);
    if len > TABLE_CAP {
        return Err(Error::CarrierTooLarge { size: len, cap: TABLE_CAP });
    }
    Ok(len as usize)
}

/// A finite group on `{0,…,m−1}` by multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    size: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    identity: usize,
}

impl FiniteGroup {
    /// Validates closure, associativity, identity and inverses.
    pub fn from_table(rows: Vec<Vec<usize>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::GroupAxiom("empty table".into()));
        }
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::GroupAxiom("table is not square".into()));
        }
        if let Some((a, b)) = (0..m * m).map(|f| (f / m, f % m)).find(|&(a, b)| rows[a][b] >= m) {
            return Err(Error::GroupAxiom(format!("{a}*{b} = {} is outside the carrier", rows[a][b])));
        }
        let mul: Vec<usize> = rows.into_iter().flatten().collect();
        let at = |a: usize, b: usize| mul[a * m + b];
        if let Some(f) = (0..m * m * m).find(|&f| {
            let (a, b, c) = (f / (m * m), f / m % m, f % m);
            at(at(a, b), c) != at(a, at(b, c))
        }) {
            let (a, b, c) = (f / (m * m), f / m % m, f % m);
            return Err(Error::GroupAxiom(format!("({a}*{b})*{c} != {a}*({b}*{c})")));
        }
        let identity = (0..m)
            .find(|&e| (0..m).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| Error::GroupAxiom("no identity element".into()))?;
        let inv = (0..m)
            .map(|x| {
                (0..m).find(|&y| at(x, y) == identity).ok_or_else(|| Error::GroupAxiom(format!("{x} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteGroup { size: m, mul, inv, identity })
    }

    /// `Z/m` under addition.
    pub fn cyclic(m: usize) -> Self {
        assert!(m > 0, "cyclic group of order 0");
        let rows = (0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect();
        Self::from_table(rows).expect("cyclic table is a group")
    }

    /// The symmetric group on `k` points. Elements are the permutations of
    /// `0..k` in lexicographic order (see [`symmetric_elements`]); the
    /// product `ab` is `x ↦ a(b(x))`.
    pub fn symmetric(k: usize) -> Self {
        let perms = symmetric_elements(k);
        let idx = |p: &Vec<usize>| perms.binary_search(p).expect("closed under composition");
        let rows =
            perms.iter().map(|a| perms.iter().map(|b| idx(&b.iter().map(|&x| a[x]).collect())).collect()).collect();
        Self::from_table(rows).expect("permutation table is a group")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.size + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// Product `g₀ g₁ ⋯` of a sequence.
    pub fn product(&self, gs: impl IntoIterator<Item = usize>) -> usize {
        gs.into_iter().fold(self.identity, |acc, g| self.mul(acc, g))
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.size).map(<[usize]>::to_vec).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.size).all(|a| (0..self.size).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

/// Permutations of `0..k` in lexicographic order; index `i` here is element
/// `i` of [`FiniteGroup::symmetric`].
pub fn symmetric_elements(k: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for x in 0..k {
            if !prefix.contains(&x) {
                prefix.push(x);
                extend(prefix, k, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), k, &mut out);
    out
}

/// Index in [`FiniteGroup::symmetric`] of the permutation `x ↦ perm[x]`.
pub fn symmetric_index(perm: &[usize]) -> Option<usize> {
    symmetric_elements(perm.len()).binary_search(&perm.to_vec()).ok()
}

/// An n-ary operation on `{0,…,m−1}` stored as a total table in row-major
/// order of the argument tuple.
///
/// Any table is admitted; `certified` records that the n-rack axioms were
/// checked or are guaranteed by the construction that produced it. A left
/// table satisfies the mirrored axioms: it is a left n-rack exactly when
/// its argument reversal is a right one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteNRack {
    size: usize,
    arity: usize,
    side: Side,
    table: Vec<usize>,
    certified: bool,
}

impl FiniteNRack {
    pub fn new(size: usize, arity: usize, side: Side, table: Vec<usize>) -> Result<Self> {
        if size == 0 || arity < 2 {
            return Err(Error::InputInvalid(format!("size {size} arity {arity}")));
        }
        let len = table_len(size, arity)?;
        if table.len() != len {
            return Err(Error::InputInvalid(format!("table has {} entries, expected {len}", table.len())));
        }
        if let Some(v) = table.iter().find(|&&v| v >= size) {
            return Err(Error::InputInvalid(format!("table value {v} is outside the carrier")));
        }
        Ok(FiniteNRack { size, arity, side, table, certified: false })
    }

    pub fn from_fn(size: usize, arity: usize, side: Side, f: impl Fn(&[usize]) -> usize + Sync) -> Result<Self> {
        let len = table_len(size, arity)?;
        let dims = vec![size; arity];
        let table = (0..len).into_par_iter().map(|i| f(&unflatten(i, &dims))).collect();
        Self::new(size, arity, side, table)
    }

    /// `⟨x₁,…,x_n⟩ = x₁`, an n-rack on any carrier.
    pub fn trivial(size: usize, arity: usize) -> Result<Self> {
        Ok(Self::from_fn(size, arity, Side::Right, |xs| xs[0])?.mark_certified())
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

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    fn index(&self, xs: &[usize]) -> usize {
        debug_assert_eq!(xs.len(), self.arity);
        xs.iter().fold(0, |acc, &x| acc * self.size + x)
    }

    pub fn op(&self, xs: &[usize]) -> usize {
        self.table[self.index(xs)]
    }

    /// Every `(arguments, value)` pair in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, usize)> + '_ {
        let dims = vec![self.size; self.arity];
        self.table.iter().enumerate().map(move |(i, &v)| (unflatten(i, &dims), v))
    }

    /// The translation by `ys` as a map on the carrier: `x ↦ ⟨x, ys⟩` for
    /// a right table and `x ↦ ⟨ys, x⟩` for a left one.
    pub fn translation(&self, ys: &[usize]) -> Vec<usize> {
        let mut args = Vec::with_capacity(self.arity);
        (0..self.size)
            .map(|x| {
                args.clear();
                match self.side {
                    Side::Right => {
                        args.push(x);
                        args.extend_from_slice(ys);
                    }
                    Side::Left => {
                        args.extend_from_slice(ys);
                        args.push(x);
                    }
                }
                self.op(&args)
            })
            .collect()
    }

    pub(crate) fn mark_certified(mut self) -> Self {
        self.certified = true;
        self
    }

    pub fn certify(self) -> Result<Self> {
        match check_nrack(&self).first_witness() {
            Some(w) => Err(Error::InputNotCertified(w.clone())),
            None => Ok(self.mark_certified()),
        }
    }

    pub fn require_certified(&self) -> Result<()> {
        if self.certified {
            return Ok(());
        }
        match check_nrack(self).first_witness() {
            Some(w) => Err(Error::InputNotCertified(w.clone())),
            None => Ok(()),
        }
    }

    /// Same table with arguments read in reverse and the side flipped.
    pub fn reversed(&self) -> Self {
        let dims = vec![self.size; self.arity];
        let table = (0..self.table.len())
            .map(|i| {
                let mut xs = unflatten(i, &dims);
                xs.reverse();
                self.op(&xs)
            })
            .collect();
        FiniteNRack { table, side: self.side.flipped(), ..*self }
    }

    /// The right-handed form: itself, or the reversal of a left table.
    pub fn as_right(&self) -> Self {
        match self.side {
            Side::Right => self.clone(),
            Side::Left => self.reversed(),
        }
    }

    fn require_right_certified(&self, what: &str) -> Result<()> {
        if self.side != Side::Right {
            return Err(Error::InputInvalid(format!("{what} must be a right operation")));
        }
        self.require_certified()
    }
}

fn subject(t: &FiniteNRack) -> String {
    format!("{}-rack on {} elements ({:?})", t.arity, t.size, t.side).to_lowercase()
}

/// Checks self-distributivity on all `m^(2n−1)` tuples, bijectivity of
/// every translation, and that `ȳ ↦ ⟨−,ȳ⟩` is a rack map into the
/// conjugation rack of permutations of the carrier.
///
/// A left table is checked through its reversal, so witness tuples list
/// arguments in mirrored order.
pub fn check_nrack(t: &FiniteNRack) -> VerificationReport {
    let r = t.as_right();
    let (m, n) = (r.size, r.arity);
    let mut report = VerificationReport::new(subject(t));

    let sides = |f: usize| {
        let tuple = unflatten(f, &vec![m; 2 * n - 1]);
        let (xs, ys) = tuple.split_at(n);
        let mut args = vec![r.op(xs)];
        args.extend_from_slice(ys);
        let lhs = r.op(&args);
        let inner: Vec<usize> = xs
            .iter()
            .map(|&x| {
                args[0] = x;
                r.op(&args)
            })
            .collect();
        (tuple, lhs, r.op(&inner))
    };
    report.run("self_distributivity", || {
        (0..m.pow((2 * n - 1) as u32))
            .into_par_iter()
            .find_first(|&f| {
                let (_, l, rhs) = sides(f);
                l != rhs
            })
            .map(|f| {
                let (tuple, l, rhs) = sides(f);
                Witness::new(tuple, format!("lhs {l} != rhs {rhs}"))
            })
    });

    let ydims = vec![m; n - 1];
    let ycount = m.pow((n - 1) as u32);
    let translations: Vec<Vec<usize>> =
        (0..ycount).into_par_iter().map(|f| r.translation(&unflatten(f, &ydims))).collect();
    report.run("translations_bijective", || {
        translations.iter().enumerate().find_map(|(f, sigma)| {
            let mut seen = vec![None; m];
            for (x, &v) in sigma.iter().enumerate() {
                if let Some(x0) = seen[v] {
                    let mut tuple = unflatten(f, &ydims);
                    tuple.extend([x0, x]);
                    return Some(Witness::new(tuple, format!("{x0} and {x} both map to {v}")));
                }
                seen[v] = Some(x);
            }
            None
        })
    });

    if !report.passed() {
        report.skip("translation_homomorphism", "not an n-rack");
        return report;
    }
    // σ_{ȳ◁z̄} σ_z̄ = σ_z̄ σ_ȳ, i.e. σ_{ȳ◁z̄} = σ_z̄ σ_ȳ σ_z̄⁻¹.
    report.run("translation_homomorphism", || {
        (0..ycount * ycount)
            .into_par_iter()
            .find_first(|&f| {
                let (fy, fz) = (f / ycount, f % ycount);
                let (ys, sz) = (unflatten(fy, &ydims), &translations[fz]);
                let moved: Vec<usize> = ys.iter().map(|&y| sz[y]).collect();
                let sw = &translations[r.index_tail(&moved)];
                (0..m).any(|x| sw[sz[x]] != sz[translations[fy][x]])
            })
            .map(|f| {
                let mut tuple = unflatten(f / ycount, &ydims);
                tuple.extend(unflatten(f % ycount, &ydims));
                Witness::new(tuple, "translation by y<|z differs from the conjugate of translation by y")
            })
    });
    report
}

impl FiniteNRack {
    /// Row-major index of an `(n−1)`-tuple.
    fn index_tail(&self, ys: &[usize]) -> usize {
        ys.iter().fold(0, |acc, &y| acc * self.size + y)
    }
}

/// `⟨x₁,…,x_n⟩ = x_n⋯x₂ x₁ x₂⁻¹⋯x_n⁻¹`.
pub fn conjugation_nrack(g: &FiniteGroup, n: usize) -> Result<FiniteNRack> {
    let t = FiniteNRack::from_fn(g.size(), n, Side::Right, |xs| {
        let b = g.product(xs[1..].iter().rev().copied());
        g.mul(g.mul(b, xs[0]), g.inv(b))
    })?;
    Ok(t.mark_certified())
}

/// Iterates a rack: `⟨x₁,…,x_n⟩ = (⋯(x₁◁x₂)◁⋯)◁x_n`.
pub fn nrack_from_rack(rack: &FiniteNRack, n: usize) -> Result<FiniteNRack> {
    if rack.arity != 2 {
        return Err(Error::ArityMismatch(format!("expected a rack, got arity {}", rack.arity)));
    }
    rack.require_right_certified("rack")?;
    let t =
        FiniteNRack::from_fn(rack.size, n, Side::Right, |xs| xs[1..].iter().fold(xs[0], |acc, &y| rack.op(&[acc, y])))?;
    Ok(t.mark_certified())
}

/// `⟪x₁,…,x_{n+1}⟫ = x₁ ◁ B(x₂,…,x_{n+1})` for a rack `◁` and an n-ary
/// operation `B` that every right translation of the rack preserves.
pub fn extend_rack_by_op(rack: &FiniteNRack, op: &FiniteNRack) -> Result<FiniteNRack> {
    if rack.arity != 2 {
        return Err(Error::ArityMismatch(format!("expected a rack, got arity {}", rack.arity)));
    }
    if op.size != rack.size {
        return Err(Error::InputInvalid("carriers differ".into()));
    }
    rack.require_right_certified("rack")?;
    let (m, n) = (rack.size, op.arity);
    let dims = vec![m; n + 1];
    let violates = |f: usize| {
        let t = unflatten(f, &dims);
        let (xs, y) = (&t[..n], t[n]);
        let moved: Vec<usize> = xs.iter().map(|&x| rack.op(&[x, y])).collect();
        (rack.op(&[op.op(xs), y]), op.op(&moved), t)
    };
    if let Some(f) = (0..m.pow((n + 1) as u32)).into_par_iter().find_first(|&f| {
        let (l, r, _) = violates(f);
        l != r
    }) {
        let (l, r, t) = violates(f);
        return Err(Error::EquivarianceFailed(Witness::new(t, format!("B(x)<|y = {l} but B(x<|y) = {r}"))));
    }
    let t = FiniteNRack::from_fn(m, n + 1, Side::Right, |xs| rack.op(&[xs[0], op.op(&xs[1..])]))?;
    Ok(t.mark_certified())
}

/// First `(ȳ, x̄)` at which a right translation of `a` fails to preserve
/// the operation of `b`.
fn automorphism_violation(a: &FiniteNRack, b: &FiniteNRack) -> Option<Witness> {
    let m = a.size;
    let (ka, kb) = (a.arity - 1, b.arity);
    let dims = vec![m; ka + kb];
    (0..m.pow((ka + kb) as u32))
        .into_par_iter()
        .find_first(|&f| {
            let t = unflatten(f, &dims);
            let sigma = |x: usize| {
                let mut args = vec![x];
                args.extend_from_slice(&t[..ka]);
                a.op(&args)
            };
            let xs = &t[ka..];
            let moved: Vec<usize> = xs.iter().map(|&x| sigma(x)).collect();
            sigma(b.op(xs)) != b.op(&moved)
        })
        .map(|f| {
            Witness::new(
                unflatten(f, &dims),
                format!(
                    "translation of the {}-ary operation is not an automorphism of the {}-ary one",
                    a.arity, b.arity
                ),
            )
        })
}

/// `⟪x₁,…,x_{m+n−1}⟫ = ⟨⟨x₁,…,x_m⟩, x_{m+1},…⟩′` for an m-rack and an n-rack
/// whose right translations are automorphisms of each other.
pub fn combine_compatible(first: &FiniteNRack, second: &FiniteNRack) -> Result<FiniteNRack> {
    if first.size != second.size {
        return Err(Error::InputInvalid("carriers differ".into()));
    }
    first.require_right_certified("first rack")?;
    second.require_right_certified("second rack")?;
    if let Some(w) = automorphism_violation(first, second).or_else(|| automorphism_violation(second, first)) {
        return Err(Error::CompatibilityFailed(w));
    }
    let (p, q) = (first.arity, second.arity);
    let t = FiniteNRack::from_fn(first.size, p + q - 1, Side::Right, |xs| {
        let mut args = vec![first.op(&xs[..p])];
        args.extend_from_slice(&xs[p..]);
        second.op(&args)
    })?;
    Ok(t.mark_certified())
}

/// The rack on `X^(n−1)` acting componentwise:
/// `x̄ ◁ ȳ = (⟨x₁,ȳ⟩, …, ⟨x_{n−1},ȳ⟩)`. Tuples are numbered row-major.
pub fn rack_from_nrack(t: &FiniteNRack) -> Result<FiniteNRack> {
    krack_from_power(t, 2)
}

/// The k-ary operation on `X^p` with `p = (N−1)/(k−1)` for an N-rack: each
/// component of the first block is fed together with all later blocks.
pub fn krack_from_power(t: &FiniteNRack, k: usize) -> Result<FiniteNRack> {
    if k < 2 || !(t.arity - 1).is_multiple_of(k - 1) {
        return Err(Error::ArityMismatch(format!("arity {} is not (p)({k}-1)+1 for any p", t.arity)));
    }
    t.require_right_certified("n-rack")?;
    let p = (t.arity - 1) / (k - 1);
    let carrier = (t.size as u128).checked_pow(p as u32).unwrap_or(u128::MAX);
    if carrier > CARRIER_CAP {
        return Err(Error::CarrierTooLarge { size: carrier, cap: CARRIER_CAP });
    }
    let (m, big) = (t.size, carrier as usize);
    let pdims = vec![m; p];
    let out = FiniteNRack::from_fn(big, k, Side::Right, |blocks| {
        let mut args = vec![0];
        for &b in &blocks[1..] {
            args.extend(unflatten(b, &pdims));
        }
        let first = unflatten(blocks[0], &pdims);
        let comps: Vec<usize> = first
            .iter()
            .map(|&x| {
                args[0] = x;
                t.op(&args)
            })
            .collect();
        comps.iter().fold(0, |acc, &c| acc * m + c)
    })?;
    Ok(out.mark_certified())
}

/// The n-rack `⟨x₁,…,x_n⟩ = exp(ad_{x₂,…,x_n})(x₁)` on the underlying
/// space of an n-Leibniz algebra (mirrored for a left algebra).
#[derive(Clone, Debug)]
pub struct VectorNRack {
    algebra: NLeibnizAlgebra,
    // The algebra read as a right bracket; translations are computed here.
    right: NLeibnizAlgebra,
    mode: ScalarMode,
}

impl VectorNRack {
    pub fn algebra(&self) -> &NLeibnizAlgebra {
        &self.algebra
    }

    pub fn mode(&self) -> ScalarMode {
        self.mode
    }

    pub fn arity(&self) -> usize {
        self.algebra.arity()
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Matrix of the translation by `ys`.
    pub fn translation(&self, ys: &[Vector]) -> Result<Matrix> {
        let mut ys = ys.to_vec();
        if self.algebra.side() == Side::Left {
            ys.reverse();
        }
        exp_matrix(&ad(&self.right, &ys), self.mode)
    }

    pub fn op(&self, xs: &[Vector]) -> Result<Vector> {
        let (x, ys) = match self.algebra.side() {
            Side::Right => (&xs[0], &xs[1..]),
            Side::Left => (&xs[xs.len() - 1], &xs[..xs.len() - 1]),
        };
        Ok(self.translation(ys)?.apply(x))
    }

    /// Basis vectors followed by `eᵢ + eⱼ` for `i < j`.
    pub fn sample_grid(&self) -> Vec<Vector> {
        sample_grid(self.dim(), self.mode)
    }
}

/// The deterministic sample set used to spot-check vector n-racks:
/// `e₀,…,e_{d−1}` then `eᵢ + eⱼ` for `i < j` in lexicographic order.
pub fn sample_grid(d: usize, mode: ScalarMode) -> Vec<Vector> {
    let mut grid: Vec<Vector> = (0..d).map(|i| basis_vec(d, i, mode)).collect();
    for i in 0..d {
        for j in i + 1..d {
            grid.push(add_vec(&grid[i], &grid[j]));
        }
    }
    grid
}

/// Builds the vector n-rack. In exact mode every basis adjoint must be
/// nilpotent; the float series is truncated.
pub fn nrack_from_nleibniz(a: &NLeibnizAlgebra, mode: ScalarMode) -> Result<VectorNRack> {
    let algebra = a.to_mode(mode);
    let right = match algebra.side() {
        Side::Right => algebra.clone(),
        Side::Left => algebra.reversed(),
    };
    let rack = VectorNRack { algebra, right, mode };
    if mode == ScalarMode::Exact {
        let d = a.dim();
        let ydims = vec![d; a.arity() - 1];
        for f in 0..d.pow((a.arity() - 1) as u32) {
            let ys: Vec<Vector> = unflatten(f, &ydims).iter().map(|&i| basis_vec(d, i, mode)).collect();
            rack.translation(&ys)?;
        }
    }
    Ok(rack)
}

/// Tuples of grid indices of length `len`, row-major.
fn grid_tuples(g: usize, len: usize) -> impl ParallelIterator<Item = Vec<usize>> {
    let dims = vec![g; len];
    (0..g.pow(len as u32)).into_par_iter().map(move |f| unflatten(f, &dims))
}

/// Spot-checks self-distributivity and invertibility of translations on
/// all grid tuples. Tuples whose exponential is not computable (exact mode,
/// non-nilpotent adjoint) are left out; witness tuples index the grid.
pub fn check_vector_nrack(r: &VectorNRack) -> VerificationReport {
    let grid = r.sample_grid();
    let (g, n) = (grid.len(), r.arity());
    let pick = |t: &[usize]| -> Vec<Vector> { t.iter().map(|&i| grid[i].clone()).collect() };
    let mut report = VerificationReport::new(format!("vector {n}-rack of dim {} ({} grid points)", r.dim(), g));
    let right = VectorNRack { algebra: r.right.clone(), right: r.right.clone(), mode: r.mode };
    let ycount = g.pow((n - 1) as u32);
    let translations: Vec<Option<Matrix>> = grid_tuples(g, n - 1).map(|t| right.translation(&pick(&t)).ok()).collect();
    report.run("self_distributivity_sampled", || {
        let sides = |f: usize| -> Option<(Vec<usize>, Vector, Vector)> {
            let t = unflatten(f, &vec![g; 2 * n - 1]);
            let xs = pick(&t[..n]);
            let ty = translations[f % ycount].as_ref()?;
            let inner = translations[f / ycount % ycount].as_ref()?;
            let lhs = ty.apply(&inner.apply(&xs[0]));
            let moved: Vec<Vector> = xs.iter().map(|x| ty.apply(x)).collect();
            Some((t, lhs, right.op(&moved).ok()?))
        };
        (0..ycount * ycount * g)
            .into_par_iter()
            .find_first(|&f| sides(f).is_some_and(|(_, l, rr)| !vec_eq(&l, &rr)))
            .map(|f| {
                let (t, l, rr) = sides(f).expect("evaluated before");
                Witness::new(t, format!("lhs {} != rhs {}", show_vec(&l), show_vec(&rr)))
            })
    });
    report.run("translations_invertible", || {
        grid_tuples(g, n - 1)
            .find_first(|t| {
                let ys = pick(t);
                // ad is linear in each slot, so negating y₁ gives exp(−ad_ȳ).
                let mut neg = ys.clone();
                neg[0] = sub_vec(&zero_vec(r.dim(), r.mode), &ys[0]);
                match (right.translation(&ys), right.translation(&neg)) {
                    (Ok(a), Ok(b)) => a.mul(&b) != Matrix::identity(r.dim(), r.mode),
                    _ => false,
                }
            })
            .map(|t| Witness::new(t, "exp(ad_y) exp(-ad_y) != Id"))
    });
    report
}

/// Checks `φ⟨x₁,…,x_n⟩ = ⟨φx₁,…,φx_n⟩′` on all grid tuples of the source.
pub fn is_vector_nrack_homomorphism(src: &VectorNRack, dst: &VectorNRack, phi: &Matrix) -> VerificationReport {
    let grid = src.sample_grid();
    let n = src.arity();
    let mut report = VerificationReport::new("vector n-rack map");
    report.run("operation_preserved_sampled", || {
        if dst.arity() != n || phi.cols() != src.dim() || phi.rows() != dst.dim() {
            return Some(Witness::new(vec![], "arities or dimensions do not match"));
        }
        let sides = |t: &[usize]| -> Option<(Vector, Vector)> {
            let xs: Vec<Vector> = t.iter().map(|&i| grid[i].clone()).collect();
            let imgs: Vec<Vector> = xs.iter().map(|x| phi.apply(x)).collect();
            Some((phi.apply(&src.op(&xs).ok()?), dst.op(&imgs).ok()?))
        };
        grid_tuples(grid.len(), n).find_first(|t| sides(t).is_some_and(|(l, r)| !vec_eq(&l, &r))).map(|t| {
            let (l, r) = sides(&t).expect("evaluated before");
            Witness::new(t, format!("phi<x> = {} but <phi x> = {}", show_vec(&l), show_vec(&r)))
        })
    });
    report
}

/// Weak compositions of `k` into `parts` parts, lexicographic.
fn compositions(k: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![k]];
    }
    (0..=k)
        .flat_map(|first| {
            compositions(k - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn factorial(k: usize, mode: ScalarMode) -> Scalar {
    (1..=k).fold(Scalar::one(mode), |acc, i| &acc * &Scalar::int(i as i64, mode))
}

/// Highest power checked by the `ad_power_expansion` check.
pub const AD_POWER_CHECK_MAX: usize = 3;

/// Checks that `(x₁,…,x_{n−1}) ↦ x₁⊗⋯⊗x_{n−1}` is a rack map from the
/// componentwise rack of the vector n-rack to the exponential rack of the
/// fundamental Leibniz algebra, on all pairs of grid tuples. Also checks
/// the expansion of powers of the tensor-space adjoint,
/// `(ad_{y₁⊗⋯⊗y_{n−1}})^k = Σ k!/(k₁!⋯) ad_ȳ^{k₁} ⊗ ⋯ ⊗ ad_ȳ^{k_{n−1}}`,
/// at basis tuples for `k ≤ AD_POWER_CHECK_MAX`.
pub fn verify_tensor_embedding(a: &NLeibnizAlgebra) -> Result<VerificationReport> {
    let a = match a.side() {
        Side::Right => a.clone(),
        Side::Left => a.reversed(),
    };
    let mode = a.mode();
    let rack = nrack_from_nleibniz(&a, mode)?;
    let fund = fundamental_leibniz(&a)?;
    let (d, p) = (a.dim(), a.arity() - 1);
    let grid = rack.sample_grid();
    let g = grid.len();
    let pick = |f: usize| -> Vec<Vector> { unflatten(f, &vec![g; p]).iter().map(|&i| grid[i].clone()).collect() };
    // Per grid (n−1)-tuple: the component translation and the tensor-side
    // exponential, when both are computable.
    let exps: Vec<Option<(Matrix, Matrix)>> = (0..g.pow(p as u32))
        .into_par_iter()
        .map(|f| {
            let ys = pick(f);
            let comp = rack.translation(&ys).ok()?;
            let whole = exp_matrix(&ad(&fund, &[tensor_vecs(&ys)]), mode).ok()?;
            Some((comp, whole))
        })
        .collect();

    let mut report = VerificationReport::new(format!("tensor embedding of dim {d}, arity {}", p + 1));
    report.run("embedding_homomorphism", || {
        let count = g.pow(p as u32);
        let sides = |f: usize| -> Option<(Vector, Vector)> {
            let (comp, whole) = exps[f % count].as_ref()?;
            let xs = pick(f / count);
            let moved: Vec<Vector> = xs.iter().map(|x| comp.apply(x)).collect();
            Some((tensor_vecs(&moved), whole.apply(&tensor_vecs(&xs))))
        };
        (0..count * count).into_par_iter().find_first(|&f| sides(f).is_some_and(|(l, r)| !vec_eq(&l, &r))).map(|f| {
            let (l, r) = sides(f).expect("evaluated before");
            let mut tuple = unflatten(f / count, &vec![g; p]);
            tuple.extend(unflatten(f % count, &vec![g; p]));
            Witness::new(tuple, format!("phi(x<|y) = {} but phi(x)<|phi(y) = {}", show_vec(&l), show_vec(&r)))
        })
    });
    report.run("ad_power_expansion", || {
        (0..d.pow(p as u32)).find_map(|f| {
            let ys: Vec<Vector> = unflatten(f, &vec![d; p]).iter().map(|&i| basis_vec(d, i, mode)).collect();
            let comp = ad(&a, &ys);
            let whole = ad(&fund, &[tensor_vecs(&ys)]);
            let mut comp_powers = vec![Matrix::identity(d, mode)];
            let mut whole_power = Matrix::identity(whole.rows(), mode);
            for k in 1..=AD_POWER_CHECK_MAX {
                comp_powers.push(comp_powers[k - 1].mul(&comp));
                whole_power = whole_power.mul(&whole);
                let mut expansion = Matrix::zero(whole.rows(), whole.cols(), mode);
                for ks in compositions(k, p) {
                    let coeff = ks
                        .iter()
                        .fold(factorial(k, mode), |c, &ki| &c * &factorial(ki, mode).checked_inv().expect("nonzero"));
                    let term = ks[1..].iter().fold(comp_powers[ks[0]].clone(), |acc, &ki| acc.kron(&comp_powers[ki]));
                    expansion = expansion.add(&term.scale(&coeff));
                }
                if expansion != whole_power {
                    let mut tuple = unflatten(f, &vec![d; p]);
                    tuple.push(k);
                    return Some(Witness::new(
                        tuple,
                        format!("power {k} of the tensor adjoint differs from its expansion"),
                    ));
                }
            }
            None
        })
    });
    Ok(report)
}
