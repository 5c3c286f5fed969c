//! Sparse tensor operators with exact scalars: Kronecker products, factor
//! embeddings, permutations, and lazy composition chains.

use braidforge::tensor::{chains_disagree, compose, cyclic_shift, embed, invert, kron, Chain};
use braidforge::{Scalar, ScalarMode, SparseVec, TensorOperator, TensorShape};

fn main() -> braidforge::Result<()> {
    let mode = ScalarMode::Exact;
    let shape = TensorShape::power(2, 2)?;
    // A unipotent operator on k²⊗k²: e_j ↦ e_j + (1/2) e_{(j+1) mod 4}.
    let a = TensorOperator::from_fn(shape.clone(), shape, mode, |j| {
        SparseVec::from_pairs([(j, Scalar::one(mode)), ((j + 1) % 4, Scalar::ratio(1, 2, mode))])
    });
    let inv = invert(&a)?;
    println!("A·A⁻¹ = Id: {}", compose(&a, &inv)?.same_as(&TensorOperator::identity(TensorShape::power(2, 2)?, mode)));

    let id2 = TensorOperator::identity(TensorShape::new(vec![2])?, mode);
    let wide = kron(&a, &id2)?;
    let embedded = embed(&a, 0, 1, 2)?;
    println!("A⊗Id equals the embedding at position 0: {}", wide.same_as(&embedded));

    let f = cyclic_shift(2, 3, mode)?;
    let lhs = Chain::new().then_op(&f).then_op(&f).then_op(&f);
    let rhs = Chain::new();
    println!("cyclic shift cubed is the identity: {}", chains_disagree(&lhs, &rhs, 8, mode).is_none());
    Ok(())
}
