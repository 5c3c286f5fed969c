//! Yang-Baxter and n-Yang-Baxter operators: verification, and builders from
//! central Leibniz algebras, linear n-racks, groups and each other.
//!
//! Both sides of an equation are evaluated lazily as chains of embedded
//! copies of the operator, column by column, so the `d^(2n−1)` space is
//! never materialized.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg::{basis_vec, tensor_vecs, to_sparse, Matrix, Vector};
use crate::linrack::{check_mutual_inverse, LinearNRack};
use crate::nleibniz::{
    adjoin_unit, check_fundamental_identity, fundamental_leibniz, unit_extension_unchecked, CentralNLeibnizAlgebra,
    NLeibnizAlgebra,
};
use crate::nrack::FiniteGroup;
use crate::report::{Equation, VerificationReport, Witness, YBReport};
use crate::tensor::{
    chains_disagree, exact_root, flatten, power_exponent, rank, unflatten, Chain, Factor, SparseVec, Stage,
    TensorOperator, TensorShape, MAX_TOTAL_DIM,
};
use crate::Side;

/// Default bound on the verification dimension `d^(2n−1)`.
pub const DEFAULT_DIM_CAP: u128 = 1 << 20;

/// The verification cap, overridable through `BRAIDFORGE_DIM_CAP`.
pub fn dim_cap() -> u128 {
    std::env::var("BRAIDFORGE_DIM_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_DIM_CAP)
}

fn factor_dim(s: &TensorOperator, n: usize) -> Result<usize> {
    if !s.is_square() {
        return Err(Error::ShapeMismatch("operator is not square".into()));
    }
    exact_root(s.domain().total(), n)
        .ok_or_else(|| Error::ShapeMismatch(format!("dimension {} is not an {n}-th power", s.domain().total())))
}

pub fn is_invertible(s: &TensorOperator) -> bool {
    s.is_square() && rank(s) == s.domain().total()
}

fn embedded(s: &TensorOperator, d: usize, pos: usize, width: usize) -> Stage {
    let n = power_exponent(s.domain().total(), d).expect("square on a power of d");
    Stage::Embed { op: s.clone(), left: d.pow(pos as u32), right: d.pow((width - pos - n) as u32) }
}

/// Application order (first applied first) of the embedded copies on each
/// side of the equation, by position of the leftmost factor.
fn sides(n: usize, side: Side) -> (Vec<usize>, Vec<usize>) {
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

fn verify(s: &TensorOperator, n: usize, side: Side, equation: Equation, cap: Option<u128>) -> Result<YBReport> {
    if n < 2 {
        return Err(Error::ArityMismatch(format!("n-YBE needs n ≥ 2, got {n}")));
    }
    let start = Instant::now();
    let d = factor_dim(s, n)?;
    let width = 2 * n - 1;
    let vdim = (d as u128).pow(width as u32);
    if let Some(cap) = cap {
        if vdim > cap {
            return Err(Error::DimensionCapExceeded { dim: vdim, cap });
        }
    }
    if vdim > MAX_TOTAL_DIM {
        return Err(Error::IndexOverflow(vdim));
    }
    let (lhs, rhs) = sides(n, side);
    let chain = |order: &[usize]| order.iter().fold(Chain::new(), |c, &p| c.then(embedded(s, d, p, width)));
    let witness = chains_disagree(&chain(&lhs), &chain(&rhs), vdim as usize, s.mode());
    Ok(YBReport {
        equation,
        n,
        dim: d,
        holds: witness.is_none(),
        invertible: is_invertible(s),
        witness,
        nonzeros: s.nnz(),
        verification_dim: vdim as usize,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Checks `(R⊗Id)(Id⊗R)(R⊗Id) = (Id⊗R)(R⊗Id)(Id⊗R)` on `d³`.
pub fn verify_ybe(r: &TensorOperator) -> Result<YBReport> {
    verify(r, 2, Side::Right, Equation::Ybe, Some(dim_cap()))
}

/// Checks the right or left n-Yang-Baxter equation on `d^(2n−1)`, refusing
/// verification spaces above [`dim_cap`].
pub fn verify_nybe(s: &TensorOperator, n: usize, side: Side) -> Result<YBReport> {
    verify_nybe_with_cap(s, n, side, Some(dim_cap()))
}

/// As [`verify_nybe`] with an explicit cap; `None` allows any size that
/// fits the index range.
pub fn verify_nybe_with_cap(s: &TensorOperator, n: usize, side: Side, cap: Option<u128>) -> Result<YBReport> {
    let equation = match side {
        Side::Right => Equation::NYbeRight,
        Side::Left => Equation::NYbeLeft,
    };
    verify(s, n, side, equation, cap)
}

/// The linear map `k^{d^n} → k^d` of an n-ary bracket.
pub fn bracket_operator(a: &NLeibnizAlgebra) -> TensorOperator {
    let (n, d) = (a.arity(), a.dim());
    TensorOperator::from_fn(
        TensorShape::power(d, n).expect("bracket table fits"),
        TensorShape::new(vec![d]).expect("small"),
        a.mode(),
        |j| to_sparse(&a.basis_bracket(&unflatten(j, &vec![d; n]))),
    )
}

/// Right: `x₁⊗⋯⊗x_n ↦ x₂⊗⋯⊗x_n⊗x₁ + 𝟏^{⊗(n−1)}⊗[x₁,…,x_n]`.
/// Left: `x₁⊗⋯⊗x_n ↦ x_n⊗x₁⊗⋯⊗x_{n−1} + [x₁,…,x_n]⊗𝟏^{⊗(n−1)}`.
fn central_operator(a: &NLeibnizAlgebra, one: &[crate::Scalar], side: Side) -> TensorOperator {
    let (n, d, mode) = (a.arity(), a.dim(), a.mode());
    let dims = vec![d; n];
    let ones = tensor_vecs(&vec![one.to_vec(); n - 1]);
    let block = ones.len();
    TensorOperator::from_fn(
        TensorShape::power(d, n).expect("fits"),
        TensorShape::power(d, n).expect("fits"),
        mode,
        |j| {
            let xs = unflatten(j, &dims);
            let mut moved = xs.clone();
            match side {
                Side::Right => moved.rotate_left(1),
                Side::Left => moved.rotate_right(1),
            }
            let mut out = SparseVec::basis(flatten(&moved, &dims), mode);
            for (k, c) in a.basis_bracket(&xs).iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for (f, u) in ones.iter().enumerate().filter(|(_, u)| !u.is_zero()) {
                    let idx = match side {
                        Side::Right => f * d + k,
                        Side::Left => k * block + f,
                    };
                    out.add_at(idx, &(c * u));
                }
            }
            out
        },
    )
}

/// The Yang-Baxter operator `R(x⊗y) = y⊗x + 𝟏⊗{x,y}` of a central Leibniz
/// algebra.
pub fn r_from_central_leibniz(cl: &CentralNLeibnizAlgebra) -> Result<TensorOperator> {
    let a = cl.algebra();
    if a.arity() != 2 {
        return Err(Error::ArityMismatch(format!("expected a Leibniz bracket, got arity {}", a.arity())));
    }
    a.require_certified()?;
    Ok(central_operator(a, cl.central(), a.side()))
}

/// The n-Yang-Baxter operator of a central n-Leibniz algebra; left algebras
/// give the left form.
pub fn nyb_from_central_nleibniz(cl: &CentralNLeibnizAlgebra) -> Result<TensorOperator> {
    let a = cl.algebra();
    a.require_certified()?;
    Ok(central_operator(a, cl.central(), a.side()))
}

/// Builds the operator of any n-bracket on `k ⊕ L`, verifies its
/// n-Yang-Baxter equation and the bracket's fundamental identity, and insists
/// that the two verdicts agree.
pub fn nyb_iff_nleibniz(a: &NLeibnizAlgebra) -> Result<(TensorOperator, YBReport, VerificationReport)> {
    let ext = unit_extension_unchecked(a)?;
    let s = central_operator(&ext, &basis_vec(ext.dim(), 0, a.mode()), a.side());
    let yb = if a.arity() == 2 { verify_ybe(&s)? } else { verify_nybe(&s, a.arity(), a.side())? };
    let fi = check_fundamental_identity(a);
    if yb.is_operator() != fi.passed() {
        return Err(Error::VerdictDisagreement(format!(
            "operator verdict {} but fundamental identity {}",
            yb.is_operator(),
            fi.passed()
        )));
    }
    Ok((s, yb, fi))
}

/// The binary case of [`nyb_iff_nleibniz`]:
/// `R̃((λ,x)⊗(μ,y)) = (μ,y)⊗(λ,x) + (1,0)⊗(0,{x,y})`.
pub fn r_tilde_iff_leibniz(a: &NLeibnizAlgebra) -> Result<(TensorOperator, YBReport, VerificationReport)> {
    if a.arity() != 2 {
        return Err(Error::ArityMismatch(format!("expected a binary bracket, got arity {}", a.arity())));
    }
    nyb_iff_nleibniz(a)
}

fn require_right(a: &NLeibnizAlgebra) -> Result<()> {
    match a.side() {
        Side::Right => Ok(()),
        Side::Left => Err(Error::InputInvalid("expected a right n-Leibniz algebra".into())),
    }
}

/// The operator of the unit extension of the fundamental Leibniz algebra,
/// on `(k ⊕ L^{⊗(n−1)})^{⊗2}`.
pub fn r1_from_nleibniz(a: &NLeibnizAlgebra) -> Result<TensorOperator> {
    require_right(a)?;
    r_from_central_leibniz(&adjoin_unit(&fundamental_leibniz(a)?)?)
}

/// The operator of the fundamental Leibniz algebra of `k ⊕ L`, on
/// `((k ⊕ L)^{⊗(n−1)})^{⊗2}`.
pub fn r2_from_nleibniz(a: &NLeibnizAlgebra) -> Result<TensorOperator> {
    require_right(a)?;
    r_from_central_leibniz(&adjoin_unit(a)?.fundamental()?)
}

/// `η(λ, x₁⊗⋯⊗x_{n−1}) = λ(1,0)^{⊗(n−1)} + (0,x₁)⊗⋯⊗(0,x_{n−1})`, with a
/// report on injectivity, the central Leibniz map property and
/// `R₂∘(η⊗η) = (η⊗η)∘R₁`.
pub fn eta_intertwiner(a: &NLeibnizAlgebra) -> Result<(TensorOperator, VerificationReport)> {
    require_right(a)?;
    let (n, d, mode) = (a.arity(), a.dim(), a.mode());
    let p = n - 1;
    let c = d + 1;
    let small = 1 + d.pow(p as u32);
    let big = c.pow(p as u32);
    let eta = TensorOperator::from_fn(TensorShape::new(vec![small])?, TensorShape::new(vec![big])?, mode, |j| {
        if j == 0 {
            return SparseVec::basis(0, mode);
        }
        let digits: Vec<usize> = unflatten(j - 1, &vec![d; p]).iter().map(|x| x + 1).collect();
        SparseVec::basis(flatten(&digits, &vec![c; p]), mode)
    });
    let src = adjoin_unit(&fundamental_leibniz(a)?)?;
    let dst = adjoin_unit(a)?.fundamental()?;
    let r1 = r_from_central_leibniz(&src)?;
    let r2 = r_from_central_leibniz(&dst)?;
    let pair = Stage::Kron(vec![Factor::Op(eta.clone()), Factor::Op(eta.clone())]);
    let tuple = |j: usize| unflatten(j, &[small, small]);
    let mut report = VerificationReport::new(format!("eta for n={n}, d={d}"));
    report.run("injective", || {
        let r = rank(&eta);
        (r < small).then(|| Witness::new(vec![r], format!("rank {r} < {small}")))
    });
    report.run("central_preserved", || {
        let image = eta.column_vec(0);
        let want = to_sparse(dst.central());
        (!image.approx_eq(&want)).then(|| Witness::new(vec![0], "η(1,0) is not the central element"))
    });
    report.run("bracket_preserved", || {
        let lhs = Chain::new().then_op(&bracket_operator(src.algebra())).then_op(&eta);
        let rhs = Chain::new().then(pair.clone()).then_op(&bracket_operator(dst.algebra()));
        chains_disagree(&lhs, &rhs, small * small, mode).map(|j| Witness::new(tuple(j), "η{x,y} differs from {ηx,ηy}"))
    });
    report.run("intertwines", || {
        let lhs = Chain::new().then(pair.clone()).then_op(&r2);
        let rhs = Chain::new().then_op(&r1).then(pair.clone());
        chains_disagree(&lhs, &rhs, small * small, mode).map(|j| Witness::new(tuple(j), "R₂(η⊗η) differs from (η⊗η)R₁"))
    });
    Ok((eta, report))
}

/// `S(u₁⊗⋯⊗u_n) = u₂^{(1)}⊗⋯⊗u_n^{(1)} ⊗ ⟨u₁, u₂^{(2)},…,u_n^{(2)}⟩` and its
/// inverse `u ↦ ⟪u_n, u_{n−1}^{(2)},…,u₁^{(2)}⟫ ⊗ u₁^{(1)}⊗⋯⊗u_{n−1}^{(1)}`.
pub fn nyb_from_linear_nrack(l: &LinearNRack) -> Result<(TensorOperator, TensorOperator)> {
    if !l.base().is_cocommutative() {
        return Err(Error::NotCocommutative);
    }
    let (c, n, mode) = (l.dim(), l.arity(), l.base().mode());
    let shape = TensorShape::power(c, n)?;
    let delta = Factor::Op(l.base().delta().clone());
    let mut split = vec![Factor::Id(c)];
    split.extend(vec![delta.clone(); n - 1]);
    let mut src: Vec<usize> = (0..n - 1).map(|j| 1 + 2 * j).collect();
    src.push(0);
    src.extend((0..n - 1).map(|j| 2 + 2 * j));
    let mut apply = vec![Factor::Id(c); n - 1];
    apply.push(Factor::Op(l.bracket().clone()));
    let forward = Chain::new()
        .then(Stage::Kron(split))
        .then(Stage::gather(vec![c; 2 * n - 1], &src))
        .then(Stage::Kron(apply))
        .materialize(shape.clone(), shape.clone(), mode);

    let mut split = vec![delta; n - 1];
    split.push(Factor::Id(c));
    let mut src = vec![2 * (n - 1)];
    src.extend((0..n - 1).rev().map(|k| 2 * k + 1));
    src.extend((0..n - 1).map(|k| 2 * k));
    let mut apply = vec![Factor::Op(l.inv_bracket().clone())];
    apply.extend(vec![Factor::Id(c); n - 1]);
    let backward = Chain::new()
        .then(Stage::Kron(split))
        .then(Stage::gather(vec![c; 2 * n - 1], &src))
        .then(Stage::Kron(apply))
        .materialize(shape.clone(), shape, mode);
    check_mutual_inverse(&forward, &backward)?;
    Ok((forward, backward))
}

/// `S_n = (Id^{⊗(n−2)}⊗R)⋯(Id⊗R⊗Id^{⊗(n−3)})(R⊗Id^{⊗(n−2)})` for a
/// Yang-Baxter operator `R`.
pub fn nyb_from_ybe(r: &TensorOperator, n: usize) -> Result<TensorOperator> {
    if n < 2 {
        return Err(Error::ArityMismatch(format!("n must be at least 2, got {n}")));
    }
    if !verify_ybe(r)?.is_operator() {
        return Err(Error::InputNotYbe);
    }
    let d = factor_dim(r, 2)?;
    let chain = (0..n - 1).fold(Chain::new(), |ch, p| ch.then(embedded(r, d, p, n)));
    let shape = TensorShape::power(d, n)?;
    Ok(chain.materialize(shape.clone(), shape, r.mode()))
}

/// `S̃ = (S⊗Id^{⊗(n−2)})(Id⊗S⊗Id^{⊗(n−3)})⋯(Id^{⊗(n−2)}⊗S)` on
/// `V^{⊗(n−1)} ⊗ V^{⊗(n−1)}`, for a right n-Yang-Baxter operator `S`.
pub fn ybe_from_nyb(s: &TensorOperator, n: usize) -> Result<TensorOperator> {
    if !verify_nybe(s, n, Side::Right)?.is_operator() {
        return Err(Error::InputNotNybe);
    }
    let d = factor_dim(s, n)?;
    let width = 2 * n - 2;
    let chain = (0..n - 1).rev().fold(Chain::new(), |ch, p| ch.then(embedded(s, d, p, width)));
    let block = d.pow((n - 1) as u32);
    let shape = TensorShape::new(vec![block, block])?;
    Ok(chain.materialize(shape.clone(), shape, s.mode()))
}

/// `S_φ = (φ⁻¹)^{⊗n} ∘ S ∘ φ^{⊗n}`.
pub fn conjugate_nyb(s: &TensorOperator, phi: &Matrix, n: usize) -> Result<TensorOperator> {
    let d = factor_dim(s, n)?;
    if phi.rows() != d || phi.cols() != d {
        return Err(Error::ShapeMismatch(format!("automorphism must be {d}x{d}")));
    }
    let inv = phi.inverse()?.to_operator();
    let fwd = phi.to_operator();
    let chain =
        Chain::new().then(Stage::Kron(vec![Factor::Op(fwd); n])).then_op(s).then(Stage::Kron(vec![Factor::Op(inv); n]));
    let shape = TensorShape::power(d, n)?;
    Ok(chain.materialize(shape.clone(), shape, crate::tensor::join_mode(s.mode(), phi.mode())))
}

/// On `k[G]`: `g₁⊗⋯⊗g_n ↦ g₂⊗⋯⊗g_n ⊗ g_n⋯g₂ g₁ g₂⁻¹⋯g_n⁻¹`.
pub fn group_algebra_nyb(g: &FiniteGroup, n: usize, mode: crate::ScalarMode) -> Result<TensorOperator> {
    let m = g.size();
    let dims = vec![m; n];
    let shape = TensorShape::power(m, n)?;
    Ok(TensorOperator::from_fn(shape.clone(), shape, mode, |j| {
        let xs = unflatten(j, &dims);
        let b = g.product(xs[1..].iter().rev().copied());
        let mut out = xs[1..].to_vec();
        out.push(g.mul(g.mul(b, xs[0]), g.inv(b)));
        SparseVec::basis(flatten(&out, &dims), mode)
    }))
}

/// `a⊗b⊗c ↦ 1⊗1⊗abc` for a unital associative multiplication `k^d⊗k^d → k^d`.
/// A pre-3-Yang-Baxter operator that is usually not invertible.
pub fn unital_algebra_preoperator(mult: &TensorOperator, unit: &Vector) -> Result<TensorOperator> {
    let d = unit.len();
    if mult.domain().total() != d * d || mult.codomain().total() != d {
        return Err(Error::ShapeMismatch("multiplication must be d⊗d -> d".into()));
    }
    let mode = mult.mode();
    let ones = tensor_vecs(&[unit.clone(), unit.clone()]);
    let twice = Chain::new().then(Stage::Kron(vec![Factor::Op(mult.clone()), Factor::Id(d)])).then_op(mult);
    let shape = TensorShape::power(d, 3)?;
    Ok(TensorOperator::from_fn(shape.clone(), shape, mode, |j| {
        let prod = twice.apply(&SparseVec::basis(j, mode));
        let mut out = SparseVec::new();
        for (k, c) in prod.iter() {
            for (f, u) in ones.iter().enumerate().filter(|(_, u)| !u.is_zero()) {
                out.add_at(f * d + k, &(c * u));
            }
        }
        out
    }))
}

/// Block reversal of the two halves of `V^{⊗k}⊗V^{⊗k}` as a 2-factor
/// operator, i.e. the flip on `V^{⊗k}`.
pub fn block_flip(d: usize, k: usize, mode: crate::ScalarMode) -> Result<TensorOperator> {
    let block = d.pow(k as u32);
    crate::tensor::permutation_operator(&TensorShape::new(vec![block, block])?, &[1, 0], mode)
}

/// `τ∘S∘τ` with `τ` the full factor reversal, which exchanges right and
/// left n-Yang-Baxter operators.
pub fn mirror(s: &TensorOperator, n: usize) -> Result<TensorOperator> {
    let d = factor_dim(s, n)?;
    let tau = crate::tensor::reversal(d, n, s.mode())?;
    crate::tensor::compose_all(&[&tau, s, &tau])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linrack::{lebed_operator, linear_nrack_from_nleibniz, linear_rack_on_tensor_power, linearize_nrack};
    use crate::nrack::{conjugation_nrack, symmetric_index, FiniteNRack};
    use crate::samples::{dual_numbers, heisenberg, nilpotent_ternary, two_step};
    use crate::tensor::{compose, cyclic_shift, embed, invert, kron, reversal};
    use crate::{Scalar, ScalarMode};
    use proptest::prelude::*;

    const EX: ScalarMode = ScalarMode::Exact;

    fn one() -> Scalar {
        Scalar::one(EX)
    }

    fn central_t3() -> CentralNLeibnizAlgebra {
        adjoin_unit(&nilpotent_ternary()).unwrap()
    }

    fn perturbed_t3() -> NLeibnizAlgebra {
        let mut a = NLeibnizAlgebra::zero(3, 3, EX).unwrap();
        a.add_term(&[0, 1, 1], 2, one()).unwrap();
        a.add_term(&[0, 2, 2], 0, one()).unwrap();
        a
    }

    #[test]
    fn flips_and_identities() {
        let flip = cyclic_shift(3, 2, EX).unwrap();
        let r = verify_ybe(&flip).unwrap();
        assert!(r.holds && r.invertible && r.witness.is_none());
        assert_eq!(r.verification_dim, 27);
        let id = TensorOperator::identity(TensorShape::power(3, 2).unwrap(), EX);
        assert!(verify_ybe(&id).unwrap().is_operator());
        for n in 2..=5 {
            let f = cyclic_shift(2, n, EX).unwrap();
            assert!(verify_nybe(&f, n, Side::Right).unwrap().is_operator());
            let id = TensorOperator::identity(TensorShape::power(2, n).unwrap(), EX);
            assert!(verify_nybe(&id, n, Side::Right).unwrap().is_operator());
        }
    }

    #[test]
    fn shapes_and_caps() {
        let bad = TensorOperator::identity(TensorShape::new(vec![5]).unwrap(), EX);
        assert!(matches!(verify_ybe(&bad), Err(Error::ShapeMismatch(_))));
        let f = cyclic_shift(4, 3, EX).unwrap();
        assert!(matches!(
            verify_nybe_with_cap(&f, 3, Side::Right, Some(1000)),
            Err(Error::DimensionCapExceeded { dim: 1024, cap: 1000 })
        ));
        assert!(verify_nybe_with_cap(&f, 3, Side::Right, None).unwrap().holds);
    }

    #[test]
    fn unital_algebra_is_a_pre_operator() {
        let s = unital_algebra_preoperator(&dual_numbers(EX), &basis_vec(2, 0, EX)).unwrap();
        let r = verify_nybe(&s, 3, Side::Right).unwrap();
        assert!(r.holds);
        assert!(!r.invertible);
        assert!(matches!(invert(&s), Err(Error::SingularMatrix)));
        // t⊗t⊗1 ↦ 1⊗1⊗t² = 0; 1⊗t⊗1 ↦ 1⊗1⊗t.
        assert!(s.column_vec(6).is_empty());
        assert_eq!(s.column_vec(2), SparseVec::basis(1, EX));
    }

    #[test]
    fn lebed_operator_of_heisenberg() {
        let cl = adjoin_unit(&heisenberg()).unwrap();
        let r = r_from_central_leibniz(&cl).unwrap();
        let expect = SparseVec::from_pairs([(2 * 4 + 1, one()), (3, one())]);
        assert_eq!(r.column_vec(4 + 2), expect);
        assert!(verify_ybe(&r).unwrap().is_operator());
        let zero = adjoin_unit(&NLeibnizAlgebra::zero(2, 3, EX).unwrap().certify().unwrap()).unwrap();
        assert!(r_from_central_leibniz(&zero).unwrap().same_as(&cyclic_shift(4, 2, EX).unwrap()));
    }

    #[test]
    fn ybe_composition_matches_dense_product() {
        let r = r_from_central_leibniz(&adjoin_unit(&heisenberg()).unwrap()).unwrap();
        let id = TensorOperator::identity(TensorShape::new(vec![4]).unwrap(), EX);
        let r12 = kron(&r, &id).unwrap();
        let r23 = kron(&id, &r).unwrap();
        let sparse = compose(&r12, &r23).unwrap();
        let (a, b) = (r12.to_dense(), r23.to_dense());
        let dense: Vec<Vec<Scalar>> = (0..64)
            .map(|i| (0..64).map(|j| (0..64).fold(Scalar::zero(EX), |acc, k| &acc + &(&a[i][k] * &b[k][j]))).collect())
            .collect();
        assert_eq!(sparse.to_dense(), dense);
    }

    fn explicit_inverse(cl: &CentralNLeibnizAlgebra) -> TensorOperator {
        // y ↦ y_n⊗y₁⊗⋯⊗y_{n−1} − [y_n,y₁,…,y_{n−1}]⊗𝟏^{⊗(n−1)}.
        let a = cl.algebra();
        let (n, d) = (a.arity(), a.dim());
        let dims = vec![d; n];
        let ones = tensor_vecs(&vec![cl.central().clone(); n - 1]);
        let shape = TensorShape::power(d, n).unwrap();
        TensorOperator::from_fn(shape.clone(), shape, EX, |j| {
            let mut ys = unflatten(j, &dims);
            ys.rotate_right(1);
            let mut out = SparseVec::basis(flatten(&ys, &dims), EX);
            for (k, c) in a.basis_bracket(&ys).iter().enumerate() {
                for (f, u) in ones.iter().enumerate() {
                    out.add_at(k * ones.len() + f, &-(c * u));
                }
            }
            out
        })
    }

    #[test]
    fn central_ternary_operator() {
        let cl = central_t3();
        let s = nyb_from_central_nleibniz(&cl).unwrap();
        let at = |xs: &[usize]| flatten(xs, &[4, 4, 4]);
        let expect = SparseVec::from_pairs([(at(&[2, 2, 1]), one()), (at(&[0, 0, 3]), one())]);
        assert_eq!(s.column_vec(at(&[1, 2, 2])), expect);
        let r = verify_nybe(&s, 3, Side::Right).unwrap();
        assert!(r.is_operator());
        assert_eq!(r.verification_dim, 1024);
        let inv = invert(&s).unwrap();
        assert!(inv.same_as(&explicit_inverse(&cl)));
        let id = TensorOperator::identity(s.domain().clone(), EX);
        assert!(compose(&s, &inv).unwrap().same_as(&id));

        let zero = adjoin_unit(&NLeibnizAlgebra::zero(3, 2, EX).unwrap().certify().unwrap()).unwrap();
        assert!(nyb_from_central_nleibniz(&zero).unwrap().same_as(&cyclic_shift(3, 3, EX).unwrap()));
    }

    #[test]
    fn embedded_central_operator_matches_dense_kron() {
        let cl = adjoin_unit(&NLeibnizAlgebra::zero(3, 1, EX).unwrap().certify().unwrap()).unwrap();
        let s = nyb_from_central_nleibniz(&cl).unwrap();
        let big = embed(&s, 2, 0, 2).unwrap();
        let id = TensorOperator::identity(TensorShape::new(vec![4]).unwrap(), EX);
        assert_eq!(big.to_dense(), kron(&id, &s).unwrap().to_dense());
        let s = nyb_from_central_nleibniz(&central_t3()).unwrap();
        assert_eq!(embed(&s, 2, 0, 4).unwrap().nnz(), 16 * s.nnz());
    }

    #[test]
    fn left_mirror() {
        let cl = central_t3().reversed();
        let s = nyb_from_central_nleibniz(&cl).unwrap();
        let r = verify_nybe(&s, 3, Side::Left).unwrap();
        assert!(r.is_operator());
        let right = nyb_from_central_nleibniz(&central_t3()).unwrap();
        assert!(s.same_as(&mirror(&right, 3).unwrap()));
        assert!(!verify_nybe(&s, 3, Side::Right).unwrap().holds);
    }

    #[test]
    fn mirror_exchanges_sides() {
        let (bad, _, _) = nyb_iff_nleibniz(&perturbed_t3()).unwrap();
        let ops = [
            (nyb_from_central_nleibniz(&central_t3()).unwrap(), 3),
            (bad, 3),
            (cyclic_shift(2, 4, EX).unwrap(), 4),
            (group_algebra_nyb(&FiniteGroup::symmetric(3), 3, EX).unwrap(), 3),
        ];
        for (s, n) in ops {
            let t = mirror(&s, n).unwrap();
            assert_eq!(verify_nybe(&s, n, Side::Right).unwrap().holds, verify_nybe(&t, n, Side::Left).unwrap().holds);
            assert_eq!(verify_nybe(&s, n, Side::Left).unwrap().holds, verify_nybe(&t, n, Side::Right).unwrap().holds);
        }
    }

    #[test]
    fn iff_criterion() {
        let (s, yb, fi) = nyb_iff_nleibniz(&nilpotent_ternary()).unwrap();
        assert!(yb.holds && fi.passed());
        assert!(s.same_as(&nyb_from_central_nleibniz(&central_t3()).unwrap()));
        let (_, yb, fi) = nyb_iff_nleibniz(&perturbed_t3()).unwrap();
        assert!(!yb.holds && !fi.passed());
        assert!(yb.witness.is_some() && fi.first_witness().is_some());
        let (_, yb, fi) = nyb_iff_nleibniz(&NLeibnizAlgebra::zero(3, 2, EX).unwrap()).unwrap();
        assert!(yb.holds && fi.passed());
    }

    #[test]
    fn binary_iff_criterion() {
        let (_, yb, fi) = r_tilde_iff_leibniz(&heisenberg()).unwrap();
        assert!(yb.holds && fi.passed() && yb.equation == Equation::Ybe);
        let mut square = NLeibnizAlgebra::zero(2, 1, EX).unwrap();
        square.add_term(&[0, 0], 0, one()).unwrap();
        let (_, yb, fi) = r_tilde_iff_leibniz(&square).unwrap();
        assert!(!yb.holds && !fi.passed());
        let (_, yb, fi) = r_tilde_iff_leibniz(&NLeibnizAlgebra::zero(2, 2, EX).unwrap()).unwrap();
        assert!(yb.holds && fi.passed());
        assert!(matches!(r_tilde_iff_leibniz(&nilpotent_ternary()), Err(Error::ArityMismatch(_))));
    }

    #[test]
    fn r1_and_r2() {
        let zero = NLeibnizAlgebra::zero(3, 2, EX).unwrap().certify().unwrap();
        assert!(r1_from_nleibniz(&zero).unwrap().same_as(&cyclic_shift(5, 2, EX).unwrap()));
        assert!(r2_from_nleibniz(&zero).unwrap().same_as(&block_flip(3, 2, EX).unwrap()));

        let t3 = nilpotent_ternary();
        let r1 = r1_from_nleibniz(&t3).unwrap();
        // (0,e₀⊗e₁)⊗(0,e₁⊗e₁) ↦ (0,e₁⊗e₁)⊗(0,e₀⊗e₁) + (1,0)⊗(0,e₂⊗e₁).
        let expect = SparseVec::from_pairs([(5 * 10 + 2, one()), (8, one())]);
        assert_eq!(r1.column_vec(2 * 10 + 5), expect);
        assert!(verify_ybe(&r1).unwrap().is_operator());
        let r2 = r2_from_nleibniz(&t3).unwrap();
        assert!(verify_ybe(&r2).unwrap().is_operator());
        let l = linear_nrack_from_nleibniz(&t3).unwrap();
        let (via_racks, _) = lebed_operator(&linear_rack_on_tensor_power(&l).unwrap()).unwrap();
        assert!(r2.same_as(&via_racks));

        assert!(matches!(r1_from_nleibniz(&perturbed_t3()), Err(Error::InputNotCertified(_))));
    }

    #[test]
    fn eta_for_ternary() {
        let (eta, report) = eta_intertwiner(&nilpotent_ternary()).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(eta.column_vec(0), SparseVec::basis(0, EX));
        assert_eq!(eta.column_vec(2), SparseVec::basis(6, EX));
        assert_eq!((eta.domain().total(), eta.codomain().total()), (10, 16));
    }

    #[test]
    fn linear_rack_operators() {
        let triv = linearize_nrack(&FiniteNRack::trivial(2, 3).unwrap(), EX).unwrap();
        let (s, _) = nyb_from_linear_nrack(&triv).unwrap();
        assert!(s.same_as(&cyclic_shift(2, 3, EX).unwrap()));

        let t3 = nilpotent_ternary();
        let (s, s_inv) = nyb_from_linear_nrack(&linear_nrack_from_nleibniz(&t3).unwrap()).unwrap();
        let central = nyb_from_central_nleibniz(&central_t3()).unwrap();
        assert!(s.same_as(&central));
        assert!(s_inv.same_as(&invert(&central).unwrap()));
    }

    #[test]
    fn conjugation_racks_give_group_algebra_operators() {
        let g = FiniteGroup::symmetric(3);
        let l = linearize_nrack(&conjugation_nrack(&g, 3).unwrap(), EX).unwrap();
        let (s, _) = nyb_from_linear_nrack(&l).unwrap();
        let r = verify_nybe(&s, 3, Side::Right).unwrap();
        assert!(r.is_operator());
        assert_eq!(r.verification_dim, 7776);
        let sh = group_algebra_nyb(&g, 3, EX).unwrap();
        assert!(sh.same_as(&s));
        let idx = |p: [usize; 3]| symmetric_index(&p).unwrap();
        let (a, b, c) = (idx([1, 0, 2]), idx([2, 1, 0]), idx([0, 2, 1]));
        let at = |xs: &[usize]| flatten(xs, &[6, 6, 6]);
        assert_eq!(sh.column_vec(at(&[a, b, c])), SparseVec::basis(at(&[b, c, c]), EX));

        let z3 = group_algebra_nyb(&FiniteGroup::cyclic(3), 3, EX).unwrap();
        assert!(z3.same_as(&cyclic_shift(3, 3, EX).unwrap()));
    }

    /// `S₃(x⊗y⊗z) = y⊗z⊗x + y⊗𝟏⊗{x,z} + 𝟏⊗z⊗{x,y} + 𝟏⊗𝟏⊗{{x,y},z}`.
    fn displayed_s3(a: &NLeibnizAlgebra) -> TensorOperator {
        let d = a.dim();
        let br = |x: &[Scalar], y: &[Scalar]| a.bracket(&[x.to_vec(), y.to_vec()]);
        let e = |i| basis_vec(d, i, EX);
        let unit = e(0);
        let shape = TensorShape::power(d, 3).unwrap();
        TensorOperator::from_fn(shape.clone(), shape, EX, |j| {
            let ijk = unflatten(j, &[d, d, d]);
            let (x, y, z) = (e(ijk[0]), e(ijk[1]), e(ijk[2]));
            let terms = [
                tensor_vecs(&[y.clone(), z.clone(), x.clone()]),
                tensor_vecs(&[y.clone(), unit.clone(), br(&x, &z)]),
                tensor_vecs(&[unit.clone(), z.clone(), br(&x, &y)]),
                tensor_vecs(&[unit.clone(), unit.clone(), br(&br(&x, &y), &z)]),
            ];
            terms.iter().fold(SparseVec::new(), |mut acc, t| {
                acc.add_scaled(&to_sparse(t), &one());
                acc
            })
        })
    }

    #[test]
    fn lifting_a_yang_baxter_operator() {
        let flip = cyclic_shift(3, 2, EX).unwrap();
        assert!(nyb_from_ybe(&flip, 4).unwrap().same_as(&cyclic_shift(3, 4, EX).unwrap()));
        let cl = adjoin_unit(&heisenberg()).unwrap();
        let r = r_from_central_leibniz(&cl).unwrap();
        assert!(nyb_from_ybe(&r, 2).unwrap().same_as(&r));
        let s3 = nyb_from_ybe(&r, 3).unwrap();
        assert!(verify_nybe(&s3, 3, Side::Right).unwrap().is_operator());
        assert!(s3.same_as(&displayed_s3(cl.algebra())));
        let broken = r.add(&TensorOperator::identity(r.domain().clone(), EX)).unwrap();
        assert!(matches!(nyb_from_ybe(&broken, 3), Err(Error::InputNotYbe)));
    }

    #[test]
    fn descending_to_a_yang_baxter_operator() {
        let f = cyclic_shift(2, 3, EX).unwrap();
        assert!(ybe_from_nyb(&f, 3).unwrap().same_as(&block_flip(2, 2, EX).unwrap()));
        let f4 = cyclic_shift(2, 4, EX).unwrap();
        assert!(ybe_from_nyb(&f4, 4).unwrap().same_as(&block_flip(2, 3, EX).unwrap()));

        let cl = central_t3();
        let s = nyb_from_central_nleibniz(&cl).unwrap();
        let st = ybe_from_nyb(&s, 3).unwrap();
        assert!(verify_ybe(&st).unwrap().is_operator());
        assert!(st.same_as(&r_from_central_leibniz(&cl.fundamental().unwrap()).unwrap()));
        // n = 3: (S⊗Id)(Id⊗S).
        let pinned = compose(&embed(&s, 0, 1, 4).unwrap(), &embed(&s, 1, 0, 4).unwrap()).unwrap();
        assert!(st.same_as(&pinned));

        let a4 = adjoin_unit(&two_step(4, 2, &[1])).unwrap();
        let s4 = nyb_from_central_nleibniz(&a4).unwrap();
        let st4 = ybe_from_nyb(&s4, 4).unwrap();
        assert!(st4.same_as(&r_from_central_leibniz(&a4.fundamental().unwrap()).unwrap()));
        let pinned = crate::tensor::compose_all(&[
            &embed(&s4, 0, 2, 3).unwrap(),
            &embed(&s4, 1, 1, 3).unwrap(),
            &embed(&s4, 2, 0, 3).unwrap(),
        ])
        .unwrap();
        assert!(st4.same_as(&pinned));

        let unital = unital_algebra_preoperator(&dual_numbers(EX), &basis_vec(2, 0, EX)).unwrap();
        assert!(matches!(ybe_from_nyb(&unital, 3), Err(Error::InputNotNybe)));
    }

    #[test]
    fn conjugation_by_automorphisms() {
        let s = nyb_from_central_nleibniz(&central_t3()).unwrap();
        assert!(conjugate_nyb(&s, &Matrix::identity(4, EX), 3).unwrap().same_as(&s));
        let f = cyclic_shift(2, 3, EX).unwrap();
        let two = Matrix::identity(2, EX).scale(&Scalar::int(2, EX));
        assert!(conjugate_nyb(&f, &two, 3).unwrap().same_as(&f));
        let mut swap = Matrix::zero(4, 4, EX);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap.set(i, j, one());
        }
        let sw = conjugate_nyb(&s, &swap, 3).unwrap();
        assert!(!sw.same_as(&s));
        assert!(verify_nybe(&sw, 3, Side::Right).unwrap().is_operator());
        assert!(matches!(conjugate_nyb(&s, &Matrix::zero(4, 4, EX), 3), Err(Error::SingularMatrix)));
    }

    #[test]
    fn reversal_is_an_involution() {
        let t = reversal(2, 3, EX).unwrap();
        let id = TensorOperator::identity(t.domain().clone(), EX);
        assert!(compose(&t, &t).unwrap().same_as(&id));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn two_step_operators(coeffs in prop::collection::vec(-2i64..=2, 8)) {
            let a = two_step(3, 3, &coeffs);
            let (_, report) = eta_intertwiner(&a).unwrap();
            prop_assert!(report.passed());
            let cl = adjoin_unit(&a).unwrap();
            let s = nyb_from_central_nleibniz(&cl).unwrap();
            prop_assert!(verify_nybe(&s, 3, Side::Right).unwrap().is_operator());
            let st = ybe_from_nyb(&s, 3).unwrap();
            prop_assert!(st.same_as(&r_from_central_leibniz(&cl.fundamental().unwrap()).unwrap()));
            let l = linear_nrack_from_nleibniz(&a).unwrap();
            let (via, _) = lebed_operator(&linear_rack_on_tensor_power(&l).unwrap()).unwrap();
            prop_assert!(r2_from_nleibniz(&a).unwrap().same_as(&via));
        }

        #[test]
        fn random_ternary_brackets_agree(entries in prop::collection::vec((0usize..2, 0usize..2, 0usize..2, 0usize..2, -1i64..=1), 0..4)) {
            let mut a = NLeibnizAlgebra::zero(3, 2, EX).unwrap();
            for (i, j, k, out, c) in entries {
                if c != 0 {
                    a.add_term(&[i, j, k], out, Scalar::int(c, EX)).unwrap();
                }
            }
            let (_, yb, fi) = nyb_iff_nleibniz(&a).unwrap();
            prop_assert_eq!(yb.holds, fi.passed());
        }
    }
}
