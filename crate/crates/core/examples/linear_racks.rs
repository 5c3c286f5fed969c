//! Coalgebras and linear n-racks: linearized set racks, the unit-extension
//! coalgebra of an n-Leibniz algebra, and the Lebed operator of a linear rack.

use braidforge::linrack::{
    check_coalgebra, check_linear_nrack, induced_nrack, lebed_operator, linear_nrack_from_nleibniz,
    linear_rack_on_tensor_power, linearize_nrack,
};
use braidforge::nrack::conjugation_nrack;
use braidforge::samples::nilpotent_ternary;
use braidforge::ybops::verify_ybe;
use braidforge::{FiniteGroup, ScalarMode};

fn main() -> braidforge::Result<()> {
    let t = conjugation_nrack(&FiniteGroup::symmetric(3), 3)?;
    let l = linearize_nrack(&t, ScalarMode::Exact)?;
    println!("k[S3] with the linearized 3-rack:");
    for check in check_linear_nrack(&l).checks {
        println!("  {:<32} {:?}", check.name, check.status);
    }
    let (group_likes, recovered) = induced_nrack(&l)?;
    println!(
        "{} group-like basis vectors; recovered table equal: {}",
        group_likes.len(),
        recovered.table() == t.table()
    );

    let lt = linear_nrack_from_nleibniz(&nilpotent_ternary())?;
    println!("coalgebra k⊕T3 passes: {}", check_coalgebra(lt.base()).passed());
    println!("linear 3-rack of T3 passes: {}", check_linear_nrack(&lt).passed());

    let lr = linear_rack_on_tensor_power(&lt)?;
    let (r, _) = lebed_operator(&lr)?;
    let report = verify_ybe(&r)?;
    println!("Lebed operator on (k⊕T3)^⊗2: dim {}, Yang-Baxter: {}", r.domain().total(), report.is_operator());
    Ok(())
}
