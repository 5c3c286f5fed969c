//! Finite n-racks: conjugation n-racks of groups, passing between racks and
//! n-racks, and the exp-rack on the vector space of an n-Leibniz algebra.

use braidforge::nrack::{
    check_nrack, check_vector_nrack, conjugation_nrack, krack_from_power, nrack_from_nleibniz, nrack_from_rack,
    rack_from_nrack, verify_tensor_embedding,
};
use braidforge::samples::nilpotent_ternary;
use braidforge::{FiniteGroup, FiniteNRack, ScalarMode, Side};

fn main() -> braidforge::Result<()> {
    let s3 = FiniteGroup::symmetric(3);
    let t = conjugation_nrack(&s3, 3)?;
    println!("conjugation 3-rack of S3 passes: {}", check_nrack(&t).passed());

    let rack = rack_from_nrack(&t)?;
    println!("its induced rack passes: {}", check_nrack(&rack).passed());
    let lifted = nrack_from_rack(&conjugation_nrack(&s3, 2)?, 3)?;
    println!("conjugation rack lifted to arity 3 is the conjugation 3-rack: {}", lifted.table() == t.table());
    let five = conjugation_nrack(&s3, 5)?;
    println!("5-rack -> 3-rack by composing translations: {}", check_nrack(&krack_from_power(&five, 3)?).passed());

    // x◁y = x·y on {0,1} is self-distributive but translation by 0 is not a bijection.
    let product = FiniteNRack::from_fn(2, 2, Side::Right, |x| x[0] * x[1])?;
    for check in check_nrack(&product).checks {
        println!("  {:<26} {:?}", check.name, check.status);
    }

    let vr = nrack_from_nleibniz(&nilpotent_ternary(), ScalarMode::Exact)?;
    println!("exp-rack of T3 on the sample grid: {}", check_vector_nrack(&vr).passed());
    println!("tensor embedding of T3: {}", verify_tensor_embedding(&nilpotent_ternary())?.passed());
    Ok(())
}
