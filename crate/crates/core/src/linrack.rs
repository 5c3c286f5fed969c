//! Finite-dimensional coalgebras, linear racks and linear n-racks.
//!
//! Coproduct legs are handled as matrix algebra: an element's legs are the
//! tensor factors produced by applying the (iterated) coproduct, and
//! regrouping legs is a factor permutation.

use crate::error::{Error, Result};
use crate::nleibniz::NLeibnizAlgebra;
use crate::nrack::FiniteNRack;
use crate::report::{VerificationReport, Witness};
use crate::scalar::{Scalar, ScalarMode};
use crate::tensor::{
    chains_disagree, compose, deal_perm, unflatten, Chain, Factor, SparseVec, Stage, TensorOperator, TensorShape,
};
use crate::Side;

/// A coassociative counital coalgebra on `k^c`: `delta: c → c⊗c`,
/// `counit: c → k` (codomain shape `[1]`).
#[derive(Clone, Debug)]
pub struct Coalgebra {
    dim: usize,
    mode: ScalarMode,
    delta: TensorOperator,
    counit: TensorOperator,
    cocommutative: bool,
}

fn flip_disagrees(delta: &TensorOperator, c: usize, mode: ScalarMode) -> Option<usize> {
    let flipped = Chain::new().then_op(delta).then(Stage::gather(vec![c, c], &[1, 0]));
    chains_disagree(&flipped, &Chain::new().then_op(delta), c, mode)
}

impl Coalgebra {
    /// Wraps the structure maps; the laws are checked by [`check_coalgebra`].
    pub fn new(delta: TensorOperator, counit: TensorOperator) -> Result<Self> {
        let c = delta.domain().total();
        if delta.domain().dims() != [c]
            || delta.codomain().dims() != [c, c]
            || counit.domain().dims() != [c]
            || counit.codomain().total() != 1
        {
            return Err(Error::ShapeMismatch("coproduct must be c -> c⊗c and counit c -> 1".into()));
        }
        let mode = crate::tensor::join_mode(delta.mode(), counit.mode());
        let counit = counit.reshape(TensorShape::new(vec![c])?, TensorShape::new(vec![1])?)?;
        let cocommutative = flip_disagrees(&delta, c, mode).is_none();
        Ok(Coalgebra { dim: c, mode, delta, counit, cocommutative })
    }

    /// `k[X]` for `|X| = m`: every basis element is group-like.
    pub fn group_like_basis(m: usize, mode: ScalarMode) -> Self {
        let shape = TensorShape::new(vec![m]).expect("small");
        let delta = TensorOperator::from_fn(shape.clone(), TensorShape::power(m, 2).expect("small"), mode, |x| {
            SparseVec::basis(x * m + x, mode)
        });
        let counit = TensorOperator::from_fn(shape, TensorShape::new(vec![1]).expect("small"), mode, |_| {
            SparseVec::basis(0, mode)
        });
        Coalgebra::new(delta, counit).expect("shapes match")
    }

    /// `k ⊕ k^d` with `Δ(λ,x) = (λ,x)⊗(1,0) + (1,0)⊗(0,x)` and `ε(λ,x) = λ`.
    /// Index 0 is `(1,0)`.
    pub fn unit_extension(d: usize, mode: ScalarMode) -> Self {
        let c = d + 1;
        let shape = TensorShape::new(vec![c]).expect("small");
        let delta = TensorOperator::from_fn(shape.clone(), TensorShape::power(c, 2).expect("small"), mode, |j| {
            if j == 0 {
                SparseVec::basis(0, mode)
            } else {
                SparseVec::from_pairs([(j * c, Scalar::one(mode)), (j, Scalar::one(mode))])
            }
        });
        let counit = TensorOperator::from_fn(shape, TensorShape::new(vec![1]).expect("small"), mode, |j| {
            if j == 0 {
                SparseVec::basis(0, mode)
            } else {
                SparseVec::new()
            }
        });
        Coalgebra::new(delta, counit).expect("shapes match")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> ScalarMode {
        self.mode
    }

    pub fn delta(&self) -> &TensorOperator {
        &self.delta
    }

    pub fn counit(&self) -> &TensorOperator {
        &self.counit
    }

    pub fn is_cocommutative(&self) -> bool {
        self.cocommutative
    }

    /// The iterated coproduct `c → c^⊗legs` (`legs = 1` is the identity).
    pub fn coproduct_power(&self, legs: usize) -> TensorOperator {
        let c = self.dim;
        let shape = TensorShape::new(vec![c]).expect("small");
        let codomain = TensorShape::power(c, legs).expect("iterated coproduct fits");
        if legs == 0 {
            return self.counit.clone();
        }
        let mut chain = Chain::new();
        for k in 1..legs {
            // Split the last leg again.
            let mut factors = vec![Factor::Id(c); k - 1];
            factors.push(Factor::Op(self.delta.clone()));
            chain = chain.then(Stage::Kron(factors));
        }
        chain.materialize(shape, codomain, self.mode)
    }

    /// The coalgebra `C^⊗k` with legs regrouped factorwise.
    pub fn tensor_power(&self, k: usize) -> Result<Coalgebra> {
        let c = self.dim;
        let big = TensorShape::new(vec![c.pow(k as u32)])?;
        let delta_chain = Chain::new()
            .then(Stage::Kron(vec![Factor::Op(self.delta.clone()); k]))
            .then(Stage::Permute { dims: vec![c; 2 * k], perm: deal_perm(k, 2) });
        let delta = delta_chain.materialize(big.clone(), TensorShape::new(vec![big.total(); 2])?, self.mode);
        let counit = Chain::new().then(Stage::Kron(vec![Factor::Op(self.counit.clone()); k])).materialize(
            big,
            TensorShape::new(vec![1])?,
            self.mode,
        );
        Coalgebra::new(delta, counit)
    }
}

fn witness_at(j: usize, dims: &[usize], what: &str) -> Witness {
    Witness::new(unflatten(j, dims), format!("{what} differ on this basis tensor"))
}

/// Verifies coassociativity and both counit laws. Cocommutativity is
/// reported as a passing check when it holds and as skipped otherwise.
pub fn check_coalgebra(c: &Coalgebra) -> VerificationReport {
    let (d, mode) = (c.dim, c.mode);
    let delta = Factor::Op(c.delta.clone());
    let eps = Factor::Op(c.counit.clone());
    let mut report = VerificationReport::new(format!("coalgebra of dim {d}"));
    report.run("coassociativity", || {
        let left = Chain::new().then_op(&c.delta).then(Stage::Kron(vec![delta.clone(), Factor::Id(d)]));
        let right = Chain::new().then_op(&c.delta).then(Stage::Kron(vec![Factor::Id(d), delta.clone()]));
        chains_disagree(&left, &right, d, mode).map(|j| witness_at(j, &[d], "(Δ⊗Id)Δ and (Id⊗Δ)Δ"))
    });
    report.run("counit_left", || {
        let left = Chain::new().then_op(&c.delta).then(Stage::Kron(vec![eps.clone(), Factor::Id(d)]));
        chains_disagree(&left, &Chain::new(), d, mode).map(|j| witness_at(j, &[d], "(ε⊗Id)Δ and Id"))
    });
    report.run("counit_right", || {
        let right = Chain::new().then_op(&c.delta).then(Stage::Kron(vec![Factor::Id(d), eps.clone()]));
        chains_disagree(&right, &Chain::new(), d, mode).map(|j| witness_at(j, &[d], "(Id⊗ε)Δ and Id"))
    });
    match flip_disagrees(&c.delta, d, mode) {
        None => {
            report.run("cocommutativity", || None);
        }
        Some(j) => {
            report.skip("cocommutativity", format!("not cocommutative: τΔ != Δ at basis {j}"));
        }
    }
    report
}

/// A linear n-rack: a coalgebra with an n-ary operation and its partner
/// inverse operation `C^⊗n → C`. Arity 2 is a linear rack.
#[derive(Clone, Debug)]
pub struct LinearNRack {
    base: Coalgebra,
    arity: usize,
    bracket: TensorOperator,
    inv_bracket: TensorOperator,
}

/// A linear rack is a linear n-rack of arity 2.
pub type LinearRack = LinearNRack;

impl LinearNRack {
    pub fn new(base: Coalgebra, arity: usize, bracket: TensorOperator, inv_bracket: TensorOperator) -> Result<Self> {
        let c = base.dim;
        let domain = TensorShape::power(c, arity)?;
        let codomain = TensorShape::new(vec![c])?;
        if arity < 2 {
            return Err(Error::InputInvalid(format!("arity {arity}")));
        }
        for op in [&bracket, &inv_bracket] {
            if op.domain().total() != domain.total() || op.codomain().total() != c {
                return Err(Error::ShapeMismatch(format!("operation must map dim {} to dim {c}", domain.total())));
            }
        }
        let bracket = bracket.reshape(domain.clone(), codomain.clone())?;
        let inv_bracket = inv_bracket.reshape(domain, codomain)?;
        Ok(LinearNRack { base, arity, bracket, inv_bracket })
    }

    pub fn base(&self) -> &Coalgebra {
        &self.base
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.base.dim
    }

    pub fn bracket(&self) -> &TensorOperator {
        &self.bracket
    }

    pub fn inv_bracket(&self) -> &TensorOperator {
        &self.inv_bracket
    }

    /// `⟨u₁,…,u_n⟩` on arbitrary vectors.
    pub fn apply(&self, us: &[SparseVec]) -> SparseVec {
        self.bracket.apply(&tensor_sparse(us, self.base.dim))
    }
}

/// `u₁⊗⋯⊗u_k` for vectors in `k^c`, row-major.
pub fn tensor_sparse(us: &[SparseVec], c: usize) -> SparseVec {
    us.iter().fold(SparseVec::basis(0, ScalarMode::Exact), |acc, u| {
        let mut out = SparseVec::new();
        for (i, a) in acc.iter() {
            for (j, b) in u.iter() {
                out.add_at(i * c + j, &(a * b));
            }
        }
        out
    })
}

/// `Δ∘op = (op⊗op)∘deal∘Δ^{⊗k}` and `ε∘op = ε^{⊗k}` for `op: C^⊗k → C`.
fn coalgebra_map_checks(report: &mut VerificationReport, name: &str, base: &Coalgebra, op: &TensorOperator, k: usize) {
    let c = base.dim;
    let dims = vec![c; k];
    let domain = c.pow(k as u32);
    let mode = base.mode;
    report.run(&format!("{name}_coalgebra_map"), || {
        let lhs = Chain::new().then_op(op).then_op(&base.delta);
        let rhs = Chain::new()
            .then(Stage::Kron(vec![Factor::Op(base.delta.clone()); k]))
            .then(Stage::Permute { dims: vec![c; 2 * k], perm: deal_perm(k, 2) })
            .then(Stage::Kron(vec![Factor::Op(op.clone()), Factor::Op(op.clone())]));
        chains_disagree(&lhs, &rhs, domain, mode).map(|j| witness_at(j, &dims, "Δ∘op and (op⊗op)∘Δ"))
    });
    report.run(&format!("{name}_counit"), || {
        let lhs = Chain::new().then_op(op).then_op(&base.counit);
        let rhs = Chain::new().then(Stage::Kron(vec![Factor::Op(base.counit.clone()); k]));
        chains_disagree(&lhs, &rhs, domain, mode).map(|j| witness_at(j, &dims, "ε∘op and ε^⊗k"))
    });
}

/// `⟨⟨u₁,…,u_n⟩,v₁,…,v_{n−1}⟩ = ⟨⟨u₁,v̄^{(1)}⟩,…,⟨u_n,v̄^{(n)}⟩⟩` on `c^(2n−1)`.
fn self_distributivity_check(
    report: &mut VerificationReport,
    name: &str,
    base: &Coalgebra,
    op: &TensorOperator,
    n: usize,
) {
    let c = base.dim;
    let dims = vec![c; 2 * n - 1];
    let mode = base.mode;
    report.run(name, || {
        let mut outer = vec![Factor::Op(op.clone())];
        outer.extend(vec![Factor::Id(c); n - 1]);
        let lhs = Chain::new().then(Stage::Kron(outer)).then_op(op);
        let split = base.coproduct_power(n);
        let mut legs = vec![Factor::Id(c); n];
        legs.extend(vec![Factor::Op(split); n - 1]);
        // After splitting, leg i of v_j sits at n + j·n + i.
        let src: Vec<usize> =
            (0..n).flat_map(|i| std::iter::once(i).chain((0..n - 1).map(move |j| n + j * n + i))).collect();
        let rhs = Chain::new()
            .then(Stage::Kron(legs))
            .then(Stage::gather(vec![c; n + n * (n - 1)], &src))
            .then(Stage::Kron(vec![Factor::Op(op.clone()); n]))
            .then_op(op);
        chains_disagree(&lhs, &rhs, c.pow((2 * n - 1) as u32), mode)
            .map(|j| witness_at(j, &dims, "both sides of the distributive law"))
    });
}

/// `second⟨first⟨u, v̄^{(2)}⟩, v_{n−1}^{(1)},…,v₁^{(1)}⟩ = ε(v₁)⋯ε(v_{n−1}) u`.
fn inverse_property_check(
    report: &mut VerificationReport,
    name: &str,
    base: &Coalgebra,
    first: &TensorOperator,
    second: &TensorOperator,
    n: usize,
) {
    let c = base.dim;
    let dims = vec![c; n];
    let mode = base.mode;
    report.run(name, || {
        let mut split = vec![Factor::Id(c)];
        split.extend(vec![Factor::Op(base.delta.clone()); n - 1]);
        // v_j's first leg sits at 1 + 2j, its second at 2 + 2j.
        let mut src = vec![0];
        src.extend((0..n - 1).map(|j| 2 + 2 * j));
        src.extend((0..n - 1).rev().map(|j| 1 + 2 * j));
        let mut apply_first = vec![Factor::Op(first.clone())];
        apply_first.extend(vec![Factor::Id(c); n - 1]);
        let lhs = Chain::new()
            .then(Stage::Kron(split))
            .then(Stage::gather(vec![c; 2 * n - 1], &src))
            .then(Stage::Kron(apply_first))
            .then_op(second);
        let mut counits = vec![Factor::Id(c)];
        counits.extend(vec![Factor::Op(base.counit.clone()); n - 1]);
        let rhs = Chain::new().then(Stage::Kron(counits));
        chains_disagree(&lhs, &rhs, c.pow(n as u32), mode).map(|j| witness_at(j, &dims, "inverse composite and ε(v)u"))
    });
}

/// Verifies the base coalgebra, that both operations are coalgebra maps,
/// both distributive laws, and the two inverse properties.
pub fn check_linear_nrack(l: &LinearNRack) -> VerificationReport {
    let n = l.arity;
    let mut report = VerificationReport::new(format!("linear {n}-rack of dim {}", l.dim()));
    report.absorb("coalgebra.", check_coalgebra(&l.base));
    coalgebra_map_checks(&mut report, "bracket", &l.base, &l.bracket, n);
    coalgebra_map_checks(&mut report, "inv_bracket", &l.base, &l.inv_bracket, n);
    self_distributivity_check(&mut report, "self_distributivity", &l.base, &l.bracket, n);
    self_distributivity_check(&mut report, "inv_self_distributivity", &l.base, &l.inv_bracket, n);
    inverse_property_check(&mut report, "inverse_after_bracket", &l.base, &l.bracket, &l.inv_bracket, n);
    inverse_property_check(&mut report, "bracket_after_inverse", &l.base, &l.inv_bracket, &l.bracket, n);
    report
}

/// `k[X]` for `|X| = m`.
pub fn linearize_set(m: usize, mode: ScalarMode) -> Coalgebra {
    Coalgebra::group_like_basis(m, mode)
}

/// Extends a certified right n-rack linearly to `k[X]`; the inverse
/// operation is `⟪x, y₁,…,y_{n−1}⟫ = σ⁻¹(x)` for `σ = ⟨−, y_{n−1},…,y₁⟩`.
pub fn linearize_nrack(t: &FiniteNRack, mode: ScalarMode) -> Result<LinearNRack> {
    if t.side() != Side::Right {
        return Err(Error::InputInvalid("linearization needs a right n-rack".into()));
    }
    t.require_certified()?;
    let (m, n) = (t.size(), t.arity());
    let domain = TensorShape::power(m, n)?;
    let codomain = TensorShape::new(vec![m])?;
    let bracket =
        TensorOperator::from_fn(domain.clone(), codomain.clone(), mode, |j| SparseVec::basis(t.table()[j], mode));
    let ydims = vec![m; n - 1];
    let inverses: Vec<Vec<usize>> = (0..m.pow((n - 1) as u32))
        .map(|f| {
            let mut ys = unflatten(f, &ydims);
            ys.reverse();
            let sigma = t.translation(&ys);
            let mut inv = vec![0; m];
            for (x, &v) in sigma.iter().enumerate() {
                inv[v] = x;
            }
            inv
        })
        .collect();
    let ycount = inverses.len();
    let inv_bracket =
        TensorOperator::from_fn(domain, codomain, mode, |j| SparseVec::basis(inverses[j % ycount][j / ycount], mode));
    LinearNRack::new(linearize_set(m, mode), n, bracket, inv_bracket)
}

/// Basis vectors `e_j` with `Δe_j = e_j⊗e_j`. The search is restricted to
/// the stored basis; group-like elements that are not basis vectors are
/// not found.
pub fn group_like_elements(c: &Coalgebra) -> Vec<SparseVec> {
    group_like_indices(c).into_iter().map(|j| SparseVec::basis(j, c.mode)).collect()
}

fn group_like_indices(c: &Coalgebra) -> Vec<usize> {
    (0..c.dim).filter(|&j| c.delta.column_vec(j) == SparseVec::basis(j * c.dim + j, c.mode)).collect()
}

/// The n-rack carried by the (basis) group-like elements. Returns their
/// basis indices, in order, and the table over positions in that list.
pub fn induced_nrack(l: &LinearNRack) -> Result<(Vec<usize>, FiniteNRack)> {
    let found = group_like_indices(&l.base);
    if found.is_empty() {
        return Err(Error::InputInvalid("no group-like basis vectors".into()));
    }
    let (c, n, g) = (l.dim(), l.arity, found.len());
    let gdims = vec![g; n];
    let mut table = Vec::with_capacity(g.pow(n as u32));
    for f in 0..g.pow(n as u32) {
        let pos = unflatten(f, &gdims);
        let idx = pos.iter().fold(0, |acc, &p| acc * c + found[p]);
        let out = l.bracket.column_vec(idx);
        let hit = match out.iter().collect::<Vec<_>>().as_slice() {
            [(j, s)] if s.is_one() => found.iter().position(|x| x == j),
            _ => None,
        };
        match hit {
            Some(p) => table.push(p),
            None => {
                return Err(Error::NotClosed(Witness::new(
                    pos,
                    "bracket of group-like elements is not a found group-like element",
                )))
            }
        }
    }
    let t = FiniteNRack::new(g, n, Side::Right, table)?.certify()?;
    Ok((found, t))
}

fn require_linear_rack(r: &LinearRack) -> Result<()> {
    if r.arity != 2 {
        return Err(Error::ArityMismatch(format!("expected a linear rack, got arity {}", r.arity)));
    }
    match check_linear_nrack(r).first_witness() {
        Some(w) => Err(Error::InputInvalid(format!("not a linear rack: {w}"))),
        None => Ok(()),
    }
}

fn fold_operation(op: &TensorOperator, c: usize, n: usize, mode: ScalarMode) -> Result<TensorOperator> {
    let mut chain = Chain::new();
    for k in (1..n - 1).rev() {
        let mut factors = vec![Factor::Op(op.clone())];
        factors.extend(vec![Factor::Id(c); k]);
        chain = chain.then(Stage::Kron(factors));
    }
    chain = chain.then_op(op);
    Ok(chain.materialize(TensorShape::power(c, n)?, TensorShape::new(vec![c])?, mode))
}

/// `⟨u₁,…,u_n⟩ = (⋯(u₁◁u₂)◁⋯)◁u_n`, and likewise for the inverse.
pub fn linear_nrack_from_linear_rack(r: &LinearRack, n: usize) -> Result<LinearNRack> {
    require_linear_rack(r)?;
    if n < 2 {
        return Err(Error::InputInvalid(format!("arity {n}")));
    }
    let (c, mode) = (r.dim(), r.base.mode);
    let bracket = fold_operation(&r.bracket, c, n, mode)?;
    let inv_bracket = fold_operation(&r.inv_bracket, c, n, mode)?;
    LinearNRack::new(r.base.clone(), n, bracket, inv_bracket)
}

/// Splits each of `p` trailing inputs into `legs` legs and groups, for each
/// output slot `i`, the leading input `u_i` (if `lead`) with leg `i + offset`
/// of every `v_j`, taken in `v_order`.
fn grouped_legs(p: usize, legs: usize, offset: usize, v_order: &[usize]) -> Vec<usize> {
    (0..p).flat_map(|i| std::iter::once(i).chain(v_order.iter().map(move |&j| p + j * legs + i + offset))).collect()
}

/// The linear rack on `C^⊗(n−1)`:
/// `ū ◁ v̄ = ⟨u₁, v̄^{(1)}⟩ ⊗ ⋯ ⊗ ⟨u_{n−1}, v̄^{(n−1)}⟩`, with the inverse
/// built from `⟪u_i, v_{n−1}^{(i)},…,v₁^{(i)}⟫`.
pub fn linear_rack_on_tensor_power(l: &LinearNRack) -> Result<LinearRack> {
    if !l.base.cocommutative {
        return Err(Error::NotCocommutative);
    }
    let (c, n, mode) = (l.dim(), l.arity, l.base.mode);
    if n == 2 {
        return Ok(l.clone());
    }
    let p = n - 1;
    let base = l.base.tensor_power(p)?;
    let split = l.base.coproduct_power(p);
    let assemble = |op: &TensorOperator, v_order: &[usize]| -> Result<TensorOperator> {
        let mut factors = vec![Factor::Id(c); p];
        factors.extend(vec![Factor::Op(split.clone()); p]);
        let chain = Chain::new()
            .then(Stage::Kron(factors))
            .then(Stage::gather(vec![c; p + p * p], &grouped_legs(p, p, 0, v_order)))
            .then(Stage::Kron(vec![Factor::Op(op.clone()); p]));
        Ok(chain.materialize(TensorShape::power(c, 2 * p)?, TensorShape::power(c, p)?, mode))
    };
    let forward: Vec<usize> = (0..p).collect();
    let backward: Vec<usize> = (0..p).rev().collect();
    let bracket = assemble(&l.bracket, &forward)?;
    let inv_bracket = assemble(&l.inv_bracket, &backward)?;
    LinearNRack::new(base, 2, bracket, inv_bracket)
}

/// The linear n-rack on `k ⊕ L`:
/// `⟨(λ₁,x₁),…⟩ = (λ₁⋯λ_n, λ₂⋯λ_n x₁ + [x₁,…,x_n])`, with inverse
/// `(λ₁⋯λ_n, λ₂⋯λ_n x₁ − [x₁,x_n,…,x₂])`. Index 0 is `(1,0)`.
pub fn linear_nrack_from_nleibniz(a: &NLeibnizAlgebra) -> Result<LinearNRack> {
    if a.side() != Side::Right {
        return Err(Error::InputInvalid("linear n-racks are built from right brackets".into()));
    }
    a.require_certified()?;
    let (d, n, mode) = (a.dim(), a.arity(), a.mode());
    let c = d + 1;
    let domain = TensorShape::power(c, n)?;
    let codomain = TensorShape::new(vec![c])?;
    let build = |inverse: bool| {
        TensorOperator::from_fn(domain.clone(), codomain.clone(), mode, |j| {
            let b = unflatten(j, &vec![c; n]);
            if b.iter().all(|&x| x == 0) {
                return SparseVec::basis(0, mode);
            }
            if b[0] != 0 && b[1..].iter().all(|&x| x == 0) {
                return SparseVec::basis(b[0], mode);
            }
            if b.contains(&0) {
                return SparseVec::new();
            }
            let mut ins: Vec<usize> = b.iter().map(|&x| x - 1).collect();
            let sign = if inverse {
                ins[1..].reverse();
                Scalar::int(-1, mode)
            } else {
                Scalar::one(mode)
            };
            a.basis_bracket(&ins)
                .iter()
                .enumerate()
                .filter(|(_, s)| !s.is_zero())
                .map(|(i, s)| (i + 1, &sign * s))
                .collect()
        })
    };
    LinearNRack::new(Coalgebra::unit_extension(d, mode), n, build(false), build(true))
}

/// `R(u⊗v) = v^{(1)} ⊗ (u ◁ v^{(2)})` and its inverse
/// `(u⊗v) ↦ (v ◁̃ u^{(2)}) ⊗ u^{(1)}`, both on `C⊗C`.
pub fn lebed_operator(r: &LinearRack) -> Result<(TensorOperator, TensorOperator)> {
    if r.arity != 2 {
        return Err(Error::ArityMismatch(format!("expected a linear rack, got arity {}", r.arity)));
    }
    if !r.base.cocommutative {
        return Err(Error::NotCocommutative);
    }
    let (c, mode) = (r.dim(), r.base.mode);
    let delta = Factor::Op(r.base.delta.clone());
    let shape = TensorShape::power(c, 2)?;
    let forward = Chain::new()
        .then(Stage::Kron(vec![Factor::Id(c), delta.clone()]))
        .then(Stage::gather(vec![c; 3], &[1, 0, 2]))
        .then(Stage::Kron(vec![Factor::Id(c), Factor::Op(r.bracket.clone())]))
        .materialize(shape.clone(), shape.clone(), mode);
    let backward = Chain::new()
        .then(Stage::Kron(vec![delta, Factor::Id(c)]))
        .then(Stage::gather(vec![c; 3], &[2, 1, 0]))
        .then(Stage::Kron(vec![Factor::Op(r.inv_bracket.clone()), Factor::Id(c)]))
        .materialize(shape.clone(), shape.clone(), mode);
    check_mutual_inverse(&forward, &backward)?;
    Ok((forward, backward))
}

pub(crate) fn check_mutual_inverse(a: &TensorOperator, b: &TensorOperator) -> Result<()> {
    let id = TensorOperator::identity(a.domain().clone(), a.mode());
    for (name, prod) in [("R∘R⁻¹", compose(a, b)?), ("R⁻¹∘R", compose(b, a)?)] {
        if let Some(j) = prod.first_difference(&id)? {
            return Err(Error::InverseMismatch(format!("{name} differs from Id at basis {j}")));
        }
    }
    Ok(())
}

/// The operator on `C^⊗(n−1) ⊗ C^⊗(n−1)` assembled directly from the
/// n-ary operation:
/// `ū⊗v̄ ↦ v̄^{(1)} ⊗ ⟨u₁, v̄^{(2)}⟩ ⊗ ⋯ ⊗ ⟨u_{n−1}, v̄^{(n)}⟩`, with inverse
/// `ū⊗v̄ ↦ ⟪v₁, u_{n−1}^{(2)},…,u₁^{(2)}⟫ ⊗ ⋯ ⊗ ū^{(1)}`.
pub fn tensor_power_operator(l: &LinearNRack) -> Result<(TensorOperator, TensorOperator)> {
    if !l.base.cocommutative {
        return Err(Error::NotCocommutative);
    }
    let (c, n, mode) = (l.dim(), l.arity, l.base.mode);
    let p = n - 1;
    let split = l.base.coproduct_power(n);
    let shape = TensorShape::power(c, 2 * p)?;
    let mut legs = vec![Factor::Id(c); p];
    legs.extend(vec![Factor::Op(split.clone()); p]);
    let width = p + p * n;
    // Forward: first legs of v̄, then (u_i, legs i+1 of v̄) groups.
    let mut src: Vec<usize> = (0..p).map(|j| p + j * n).collect();
    src.extend(grouped_legs(p, n, 1, &(0..p).collect::<Vec<_>>()));
    let mut apply = vec![Factor::Id(c); p];
    apply.extend(vec![Factor::Op(l.bracket.clone()); p]);
    let forward = Chain::new()
        .then(Stage::Kron(legs.clone()))
        .then(Stage::gather(vec![c; width], &src))
        .then(Stage::Kron(apply))
        .materialize(shape.clone(), shape.clone(), mode);
    // Backward: swap halves so v̄ leads, group (v_i, legs i+1 of ū reversed),
    // then first legs of ū.
    let back_order: Vec<usize> = (0..p).rev().collect();
    let mut src: Vec<usize> = grouped_legs(p, n, 1, &back_order);
    src.extend((0..p).map(|j| p + j * n));
    let mut apply = vec![Factor::Op(l.inv_bracket.clone()); p];
    apply.extend(vec![Factor::Id(c); p]);
    let swap_halves: Vec<usize> = (p..2 * p).chain(0..p).collect();
    let backward = Chain::new()
        .then(Stage::gather(vec![c; 2 * p], &swap_halves))
        .then(Stage::Kron(legs))
        .then(Stage::gather(vec![c; width], &src))
        .then(Stage::Kron(apply))
        .materialize(shape.clone(), shape, mode);
    check_mutual_inverse(&forward, &backward)?;
    Ok((forward, backward))
}

/// Checks that `f: C → C′` is a coalgebra map with
/// `f∘⟨⟩ = ⟨⟩′∘f^{⊗n}` and `f∘⟪⟫ = ⟪⟫′∘f^{⊗n}`.
pub fn is_linear_nrack_homomorphism(src: &LinearNRack, dst: &LinearNRack, f: &TensorOperator) -> VerificationReport {
    let mut report = VerificationReport::new("linear n-rack map");
    let (c, n, mode) = (src.dim(), src.arity, src.base.mode);
    if dst.arity != n || f.domain().total() != c || f.codomain().total() != dst.dim() {
        report.run("shapes", || Some(Witness::new(vec![], "arities or dimensions do not match")));
        return report;
    }
    let fk = |k: usize| Stage::Kron(vec![Factor::Op(f.clone()); k]);
    report.run("coproduct_preserved", || {
        let lhs = Chain::new().then_op(f).then_op(&dst.base.delta);
        let rhs = Chain::new().then_op(&src.base.delta).then(fk(2));
        chains_disagree(&lhs, &rhs, c, mode).map(|j| witness_at(j, &[c], "Δ′f and (f⊗f)Δ"))
    });
    report.run("counit_preserved", || {
        let lhs = Chain::new().then_op(f).then_op(&dst.base.counit);
        chains_disagree(&lhs, &Chain::new().then_op(&src.base.counit), c, mode)
            .map(|j| witness_at(j, &[c], "ε′f and ε"))
    });
    for (name, a, b) in [
        ("bracket_preserved", &src.bracket, &dst.bracket),
        ("inv_bracket_preserved", &src.inv_bracket, &dst.inv_bracket),
    ] {
        report.run(name, || {
            let lhs = Chain::new().then_op(a).then_op(f);
            let rhs = Chain::new().then(fk(n)).then_op(b);
            chains_disagree(&lhs, &rhs, c.pow(n as u32), mode).map(|j| witness_at(j, &vec![c; n], "f∘op and op′∘f^⊗n"))
        });
    }
    report
}
