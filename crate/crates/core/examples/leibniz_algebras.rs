//! n-Leibniz brackets: the fundamental identity, brackets built from binary
//! ones, the fundamental Leibniz algebra, unit extension and exp(ad).

use braidforge::linalg::{basis_vec, show_vec};
use braidforge::nleibniz::{
    adjoin_unit, check_fundamental_identity, exp_ad, fundamental_leibniz, nbracket_from_leibniz,
};
use braidforge::samples::{heisenberg, nilpotent_ternary, scaling_leibniz};
use braidforge::{NLeibnizAlgebra, Scalar, ScalarMode};

fn main() -> braidforge::Result<()> {
    let t3 = nilpotent_ternary();
    println!("T3 satisfies the fundamental identity: {}", check_fundamental_identity(&t3).passed());

    // Adding [e0,e2,e2] = e0 breaks it; the report names a failing basis tuple.
    let mut broken = NLeibnizAlgebra::zero(3, 3, ScalarMode::Exact)?;
    broken.add_term(&[0, 1, 1], 2, Scalar::one(ScalarMode::Exact))?;
    broken.add_term(&[0, 2, 2], 0, Scalar::one(ScalarMode::Exact))?;
    let report = check_fundamental_identity(&broken);
    println!("perturbed bracket passes: {}, witness: {:?}", report.passed(), report.first_witness());

    let ternary = nbracket_from_leibniz(&heisenberg(), 3)?;
    println!("Heisenberg lifted to a 3-bracket: {}", check_fundamental_identity(&ternary).passed());

    let fundamental = fundamental_leibniz(&t3)?;
    println!("fundamental Leibniz algebra of T3 has dimension {}", fundamental.dim());

    let bar = adjoin_unit(&t3)?;
    println!("unit extension: dim {}, central element {}", bar.algebra().dim(), show_vec(bar.central()));

    // Nilpotent adjoints give an exact exponential; others a float series.
    let e1 = basis_vec(3, 1, ScalarMode::Exact);
    let exact = exp_ad(&t3, &[e1.clone(), e1], ScalarMode::Exact)?;
    println!("exp(ad(e1,e1)) on T3:\n{exact:?}");
    let s = scaling_leibniz(ScalarMode::Float);
    let e2 = basis_vec(2, 1, ScalarMode::Float);
    let series = exp_ad(&s, &[e2], ScalarMode::Float)?;
    println!("exp(ad e2)[0][0] = {} (e = {})", series.get(0, 0), std::f64::consts::E);
    Ok(())
}
