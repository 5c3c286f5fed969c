//! Small named structures used throughout the examples and tests.

use crate::linalg::basis_vec;
use crate::nleibniz::NLeibnizAlgebra;
use crate::scalar::{Scalar, ScalarMode};

/// Ternary bracket on `k³` with `[e₀,e₁,e₁] = e₂` and all other basis
/// brackets zero. Every adjoint squares to zero.
pub fn nilpotent_ternary() -> NLeibnizAlgebra {
    let mut a = NLeibnizAlgebra::zero(3, 3, ScalarMode::Exact).expect("valid");
    a.add_term(&[0, 1, 1], 2, Scalar::one(ScalarMode::Exact)).expect("valid");
    a.certify().expect("nilpotent ternary bracket is 3-Leibniz")
}

/// The Heisenberg Lie algebra on `k³`: `{e₀,e₁} = e₂`.
pub fn heisenberg() -> NLeibnizAlgebra {
    let mut a = NLeibnizAlgebra::zero(2, 3, ScalarMode::Exact).expect("valid");
    a.add_term(&[0, 1], 2, Scalar::one(ScalarMode::Exact)).expect("valid");
    a.certify().expect("Heisenberg bracket is Leibniz")
}

/// Leibniz algebra on `k²` with `{e₀,e₁} = e₀`; `ad_{e₁}` is not nilpotent.
pub fn scaling_leibniz(mode: ScalarMode) -> NLeibnizAlgebra {
    let mut a = NLeibnizAlgebra::zero(2, 2, mode).expect("valid");
    a.add_bracket(&[0, 1], &basis_vec(2, 0, mode)).expect("valid");
    a.certify().expect("scaling bracket is Leibniz")
}

/// A two-step nilpotent n-bracket on `k^d`: basis tuples avoiding the last
/// index map to `coeffs[flat] · e_{d−1}` (row-major over `(d−1)^n`), and
/// any bracket involving `e_{d−1}` vanishes. Both sides of the fundamental
/// identity are then zero, so every such bracket is n-Leibniz.
pub fn two_step(n: usize, d: usize, coeffs: &[i64]) -> NLeibnizAlgebra {
    assert!(d >= 1, "dimension must be positive");
    let mut a = NLeibnizAlgebra::zero(n, d, ScalarMode::Exact).expect("valid");
    let low = vec![d - 1; n];
    for (f, &c) in coeffs.iter().enumerate().take((d - 1).pow(n as u32)) {
        if c != 0 {
            let ins = crate::tensor::unflatten(f, &low);
            a.add_term(&ins, d - 1, Scalar::int(c, ScalarMode::Exact)).expect("valid");
        }
    }
    a.mark_certified()
}

/// The dual numbers `k[t]/(t²)` as a multiplication `k²⊗k² → k²` with unit
/// `e₀ = 1` and `e₁ = t`.
pub fn dual_numbers(mode: ScalarMode) -> crate::tensor::TensorOperator {
    use crate::tensor::{SparseVec, TensorOperator, TensorShape};
    TensorOperator::from_fn(
        TensorShape::power(2, 2).expect("small"),
        TensorShape::new(vec![2]).expect("small"),
        mode,
        |j| match j {
            0 => SparseVec::basis(0, mode),
            1 | 2 => SparseVec::basis(1, mode),
            _ => SparseVec::new(),
        },
    )
}
