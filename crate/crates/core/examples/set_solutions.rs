//! Set-theoretical n-solutions: racks versus solutions, the two commutative
//! diagrams, and the nondegeneracy profile of 3-ary maps.

use braidforge::nrack::{conjugation_nrack, nrack_from_rack, rack_from_nrack};
use braidforge::setsol::{
    check_set_nsolution, classify_3solution, nsolution_from_solution, solution_from_nrack, solution_from_nsolution,
};
use braidforge::{FiniteGroup, SetNMap, Side};

fn main() -> braidforge::Result<()> {
    let s3 = FiniteGroup::symmetric(3);
    let rack = conjugation_nrack(&s3, 2)?;
    let r = solution_from_nrack(&rack)?;
    let top = nsolution_from_solution(&r, 3)?;
    let bottom = solution_from_nrack(&nrack_from_rack(&rack, 3)?)?;
    println!("rack diagram commutes: {}", top == bottom);

    let t = conjugation_nrack(&s3, 3)?;
    let s = solution_from_nrack(&t)?;
    let tilde = solution_from_nsolution(&s)?;
    println!("n-rack diagram commutes: {}", tilde == solution_from_nrack(&rack_from_nrack(&t)?)?);

    let p = classify_3solution(&s)?;
    println!(
        "S3 conjugation 3-solution: nondegenerate {:?}, order {:?}",
        p.nondegenerate.map(|n| n.all()),
        p.involutive_order
    );
    let flip = classify_3solution(&SetNMap::flip(3, 3)?)?;
    println!("flip: 3-involutive {}", flip.is_three_involutive());

    // (1, 1, ghk) satisfies the equation but is far from bijective.
    let one = s3.identity();
    let collapse = SetNMap::from_fn(6, 3, Side::Right, |x| vec![one, one, s3.product(x.iter().copied())])?;
    let p = check_set_nsolution(&collapse)?;
    println!(
        "(1,1,ghk): equation {}, bijective {}, pre-solution {}",
        p.satisfies_right,
        p.is_bijective,
        p.is_pre_solution()
    );
    Ok(())
}
