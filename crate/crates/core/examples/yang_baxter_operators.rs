//! n-Yang-Baxter operators: the central operator of T̄3, its descent to a
//! Yang-Baxter operator, lifting back up, R1/R2 and the η intertwiner.

use braidforge::linrack::{lebed_operator, linear_nrack_from_nleibniz, linear_rack_on_tensor_power};
use braidforge::nleibniz::adjoin_unit;
use braidforge::samples::{heisenberg, nilpotent_ternary};
use braidforge::tensor::invert;
use braidforge::ybops::{
    eta_intertwiner, nyb_from_central_nleibniz, nyb_from_ybe, nyb_iff_nleibniz, r2_from_nleibniz,
    r_from_central_leibniz, verify_nybe, verify_ybe, ybe_from_nyb,
};
use braidforge::Side;

fn main() -> braidforge::Result<()> {
    let t3 = nilpotent_ternary();
    let bar = adjoin_unit(&t3)?;
    let s = nyb_from_central_nleibniz(&bar)?;
    let report = verify_nybe(&s, 3, Side::Right)?;
    println!("S on (k⊕T3)^⊗3: {} nonzeros, 3-YBE on {} dims: {}", s.nnz(), report.verification_dim, report.holds);
    println!("S is invertible: {}", invert(&s).is_ok());

    let (_, yb, fi) = nyb_iff_nleibniz(&t3)?;
    println!("iff criterion agrees: operator {} / identity {}", yb.is_operator(), fi.passed());

    let tilde = ybe_from_nyb(&s, 3)?;
    let r = r_from_central_leibniz(&bar.fundamental()?)?;
    println!("descended S is a Yang-Baxter operator: {}", verify_ybe(&tilde)?.is_operator());
    println!("... and equals the fundamental-Leibniz route: {}", tilde.same_as(&r));

    let lebed = lebed_operator(&linear_rack_on_tensor_power(&linear_nrack_from_nleibniz(&heisenberg())?)?)?.0;
    let lifted = nyb_from_ybe(&lebed, 3)?;
    println!("Lebed operator of the Heisenberg algebra lifted to n=3: {}", verify_nybe(&lifted, 3, Side::Right)?.holds);

    let r2 = r2_from_nleibniz(&t3)?;
    let via_racks = lebed_operator(&linear_rack_on_tensor_power(&linear_nrack_from_nleibniz(&t3)?)?)?.0;
    println!("R2 equals the linear-rack route: {}", r2.same_as(&via_racks));
    let (eta, checks) = eta_intertwiner(&t3)?;
    println!("η: {} -> {}, intertwines R1 and R2: {}", eta.domain().total(), eta.codomain().total(), checks.passed());
    Ok(())
}
