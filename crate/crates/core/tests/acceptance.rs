//! Acceptance criteria, one line of PASS/FAIL each with its time budget.
//! Exits non-zero if any criterion fails or overruns.

use std::time::{Duration, Instant};

use braidforge::linalg::{basis_vec, tensor_vecs, to_sparse};
use braidforge::linrack::{
    check_linear_nrack, lebed_operator, linear_nrack_from_nleibniz, linear_rack_on_tensor_power, linearize_nrack,
};
use braidforge::nleibniz::{adjoin_unit, exp_ad};
use braidforge::nrack::{
    check_nrack, check_vector_nrack, conjugation_nrack, nrack_from_nleibniz, nrack_from_rack, rack_from_nrack,
    verify_tensor_embedding,
};
use braidforge::samples::{heisenberg, nilpotent_ternary, scaling_leibniz, two_step};
use braidforge::setsol::{
    all_tables, check_set_nsolution, induced_map, nsolution_from_solution, solution_from_nrack, solution_from_nsolution,
};
use braidforge::tensor::{compose, invert, kron};
use braidforge::ybops::{
    eta_intertwiner, nyb_from_central_nleibniz, nyb_from_linear_nrack, nyb_from_ybe, nyb_iff_nleibniz,
    r1_from_nleibniz, r2_from_nleibniz, r_from_central_leibniz, verify_nybe, verify_ybe, ybe_from_nyb,
};
use braidforge::{
    FiniteGroup, FiniteNRack, NLeibnizAlgebra, Scalar, ScalarMode, Side, SparseVec, TensorOperator, TensorShape,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

/// Name, time budget in seconds, and the check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: braidforge::Error) -> String {
    e.to_string()
}

const EX: ScalarMode = ScalarMode::Exact;

/// A sparse ternary bracket on `k^d`, optionally starting from T3.
fn perturbed_bracket(rng: &mut StdRng) -> NLeibnizAlgebra {
    let d = rng.gen_range(1..=3);
    let mut a =
        if d == 3 && rng.gen_bool(0.5) { nilpotent_ternary() } else { NLeibnizAlgebra::zero(3, d, EX).unwrap() };
    for _ in 0..rng.gen_range(1..=2) {
        let ins: Vec<usize> = (0..3).map(|_| rng.gen_range(0..d)).collect();
        let c = [-2, -1, 1, 2][rng.gen_range(0..4)];
        a.add_term(&ins, rng.gen_range(0..d), Scalar::int(c, EX)).unwrap();
    }
    a
}

fn criterion_1() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let mut corpus: Vec<NLeibnizAlgebra> = (0..50).map(|_| perturbed_bracket(&mut rng)).collect();
    corpus.push(nilpotent_ternary());
    corpus.push(NLeibnizAlgebra::zero(3, 3, EX).unwrap());
    let mut leibniz = 0;
    for a in &corpus {
        let (_, yb, fi) = nyb_iff_nleibniz(a).map_err(err)?;
        ensure(yb.is_operator() == fi.passed(), "verdicts differ")?;
        leibniz += usize::from(fi.passed());
    }
    Ok(format!("{} brackets, {leibniz} Leibniz, {} not; all verdicts agree", corpus.len(), corpus.len() - leibniz))
}

fn criterion_2() -> Outcome {
    let bar = adjoin_unit(&nilpotent_ternary()).map_err(err)?;
    let s = nyb_from_central_nleibniz(&bar).map_err(err)?;
    let report = verify_nybe(&s, 3, Side::Right).map_err(err)?;
    ensure(report.holds && report.verification_dim == 1024, "3-YBE fails on 1024 dims")?;
    invert(&s).map_err(err)?;
    Ok(format!("d=4 n=3, {} nonzeros, holds on {} dims, inverse found", s.nnz(), report.verification_dim))
}

/// `x⊗y⊗z ↦ y⊗z⊗x + y⊗1⊗[x,z] + 1⊗z⊗[x,y] + 1⊗1⊗[[x,y],z]`.
fn displayed_s3(a: &NLeibnizAlgebra) -> TensorOperator {
    let d = a.dim();
    let br = |x: &[Scalar], y: &[Scalar]| a.bracket(&[x.to_vec(), y.to_vec()]);
    let e = |i| basis_vec(d, i, EX);
    let shape = TensorShape::power(d, 3).unwrap();
    TensorOperator::from_fn(shape.clone(), shape.clone(), EX, |j| {
        let ijk = shape.unflatten(j);
        let (x, y, z, one) = (e(ijk[0]), e(ijk[1]), e(ijk[2]), e(0));
        let terms = [
            tensor_vecs(&[y.clone(), z.clone(), x.clone()]),
            tensor_vecs(&[y.clone(), one.clone(), br(&x, &z)]),
            tensor_vecs(&[one.clone(), z.clone(), br(&x, &y)]),
            tensor_vecs(&[one.clone(), one, br(&br(&x, &y), &z)]),
        ];
        terms.iter().fold(SparseVec::new(), |mut acc, t| {
            acc.add_scaled(&to_sparse(t), &Scalar::one(EX));
            acc
        })
    })
}

fn criterion_3() -> Outcome {
    let a3 = heisenberg();
    let (r, _) = lebed_operator(&linear_nrack_from_nleibniz(&a3).map_err(err)?).map_err(err)?;
    let s3 = nyb_from_ybe(&r, 3).map_err(err)?;
    ensure(verify_nybe(&s3, 3, Side::Right).map_err(err)?.is_operator(), "lifted operator fails the 3-YBE")?;
    let cl = adjoin_unit(&a3).map_err(err)?;
    ensure(s3.same_as(&displayed_s3(cl.algebra())), "lifted operator differs from the displayed formula")?;

    let bar = adjoin_unit(&nilpotent_ternary()).map_err(err)?;
    let tilde = ybe_from_nyb(&nyb_from_central_nleibniz(&bar).map_err(err)?, 3).map_err(err)?;
    ensure(verify_ybe(&tilde).map_err(err)?.is_operator(), "descended operator fails the YBE")?;
    let direct = r_from_central_leibniz(&bar.fundamental().map_err(err)?).map_err(err)?;
    ensure(tilde.same_as(&direct), "descended operator differs from the fundamental-Leibniz route")?;
    Ok(format!("S3 on 4^3 matches the formula; descended operator on {}^2 matches", tilde.domain().dims()[0]))
}

fn criterion_4() -> Outcome {
    let t3 = nilpotent_ternary();
    let r2 = r2_from_nleibniz(&t3).map_err(err)?;
    let lr = linear_rack_on_tensor_power(&linear_nrack_from_nleibniz(&t3).map_err(err)?).map_err(err)?;
    let (route, _) = lebed_operator(&lr).map_err(err)?;
    ensure(r2.same_as(&route), "R2 differs from the linear-rack route")?;
    Ok(format!("equal on {} dims, {} nonzeros", r2.domain().total(), r2.nnz()))
}

/// `R₂∘(η⊗η) = (η⊗η)∘R₁`, computed by dense composition.
fn intertwines(a: &NLeibnizAlgebra) -> Result<bool, String> {
    let r1 = r1_from_nleibniz(a).map_err(err)?;
    let r2 = r2_from_nleibniz(a).map_err(err)?;
    let (eta, report) = eta_intertwiner(a).map_err(err)?;
    let ee = kron(&eta, &eta).map_err(err)?;
    let lhs = compose(&r2, &ee).map_err(err)?;
    let rhs = compose(&ee, &r1).map_err(err)?;
    Ok(lhs.same_as(&rhs) && report.passed())
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    ensure(intertwines(&nilpotent_ternary())?, "T3 fails")?;
    for i in 0..20 {
        let d = rng.gen_range(2..=3);
        let coeffs: Vec<i64> = (0..(d - 1usize).pow(3)).map(|_| rng.gen_range(-2..=2)).collect();
        let a = two_step(3, d, &coeffs);
        ensure(intertwines(&a)?, format!("random algebra {i} (d={d}, {coeffs:?}) fails"))?;
    }
    Ok("T3 and 20 random algebras".into())
}

fn criterion_6() -> Outcome {
    let mut racks = [0usize; 2];
    for (slot, n) in [2, 3].into_iter().enumerate() {
        for t in all_tables(2, n).map_err(err)? {
            let rack = check_nrack(&t).passed();
            let solution = check_set_nsolution(&induced_map(&t).map_err(err)?).map_err(err)?.is_solution();
            ensure(rack == solution, format!("disagreement on {:?}", t.table()))?;
            racks[slot] += usize::from(rack);
        }
    }
    ensure(racks[0] == 2, format!("{} binary racks", racks[0]))?;
    Ok(format!("16 + 256 tables, zero disagreements; {} racks, {} 3-racks", racks[0], racks[1]))
}

fn criterion_7() -> Outcome {
    let t = conjugation_nrack(&FiniteGroup::symmetric(3), 3).map_err(err)?;
    let l = linearize_nrack(&t, EX).map_err(err)?;
    let report = check_linear_nrack(&l);
    ensure(report.passed(), format!("{:?}", report.first_witness()))?;
    let (s, _) = nyb_from_linear_nrack(&l).map_err(err)?;
    let yb = verify_nybe(&s, 3, Side::Right).map_err(err)?;
    ensure(yb.holds && yb.verification_dim == 7776, "3-YBE fails")?;
    Ok(format!("{} checks pass; 3-YBE holds on {} dims", report.checks.len(), yb.verification_dim))
}

fn criterion_8() -> Outcome {
    let trivial = FiniteNRack::trivial(3, 2).map_err(err)?;
    let flip = FiniteNRack::new(2, 2, Side::Right, vec![1, 1, 0, 0]).map_err(err)?;
    let conj = conjugation_nrack(&FiniteGroup::symmetric(3), 2).map_err(err)?;
    for rack in [&trivial, &flip, &conj] {
        let r = solution_from_nrack(rack).map_err(err)?;
        // Checking an n-solution on six elements at n = 4 means 6^7 tuples.
        let top_n = if rack.size() <= 3 { 4 } else { 3 };
        for n in 2..=top_n {
            let top = nsolution_from_solution(&r, n).map_err(err)?;
            let bottom = solution_from_nrack(&nrack_from_rack(rack, n).map_err(err)?).map_err(err)?;
            ensure(top == bottom, format!("rack diagram fails at n={n}"))?;
            let t = nrack_from_rack(rack, n).map_err(err)?;
            let tilde = solution_from_nsolution(&solution_from_nrack(&t).map_err(err)?).map_err(err)?;
            let via = solution_from_nrack(&rack_from_nrack(&t).map_err(err)?).map_err(err)?;
            ensure(tilde == via, format!("n-rack diagram fails at n={n}"))?;
        }
    }
    let t = conjugation_nrack(&FiniteGroup::symmetric(3), 3).map_err(err)?;
    let tilde = solution_from_nsolution(&solution_from_nrack(&t).map_err(err)?).map_err(err)?;
    ensure(tilde == solution_from_nrack(&rack_from_nrack(&t).map_err(err)?).map_err(err)?, "S3 3-rack diagram")?;
    Ok("both diagrams for the trivial and flip racks at n ≤ 4 and the S3 racks at n ≤ 3".into())
}

fn criterion_9() -> Outcome {
    let t3 = nilpotent_ternary();
    let vr = nrack_from_nleibniz(&t3, EX).map_err(err)?;
    let report = check_vector_nrack(&vr);
    ensure(report.passed(), format!("{:?}", report.first_witness()))?;
    ensure(verify_tensor_embedding(&t3).map_err(err)?.passed(), "tensor embedding fails")?;
    Ok(format!("grid of {} points, embedding passes", vr.sample_grid().len()))
}

fn criterion_10() -> Outcome {
    let a = scaling_leibniz(ScalarMode::Float);
    let m = exp_ad(&a, &[basis_vec(2, 1, ScalarMode::Float)], ScalarMode::Float).map_err(err)?;
    let got = m.get(0, 0).to_f64();
    let diff = (got - std::f64::consts::E).abs();
    ensure(diff < 1e-9, format!("{got} differs from e by {diff:e}"))?;
    Ok(format!("{got:.12} (|Δ| = {diff:.1e})"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("fundamental identity iff n-YBE", 30, criterion_1),
        ("central operator verification", 10, criterion_2),
        ("lift and descent", 20, criterion_3),
        ("R2 coincidence", 20, criterion_4),
        ("eta intertwining", 30, criterion_5),
        ("rack/solution census", 5, criterion_6),
        ("linear n-rack axioms", 60, criterion_7),
        ("set-side diagrams", 5, criterion_8),
        ("exp-rack consistency", 5, criterion_9),
        ("float exp sanity", 1, criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let late = elapsed > Duration::from_secs(*budget);
        let (verdict, detail) = match (&result, late) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over budget: {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        failures += usize::from(verdict == "FAIL");
        println!("{verdict} {:>2}. {name} [{:.2}s / {budget}s] {detail}", i + 1, elapsed.as_secs_f64());
    }
    if failures > 0 {
        eprintln!("{failures} criteria failed");
        std::process::exit(1);
    }
}
