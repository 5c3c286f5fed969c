//! The `braidforge` command line: JSON documents in, JSON reports out.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 input error, 3 cap exceeded.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::document::{Document, LinearNRackDoc, Meta, NLeibnizDoc, NRackDoc, OperatorDoc, SetMapDoc, VectorNRackDoc};
use crate::error::{Error, Result};
use crate::linalg::basis_vec;
use crate::linrack::{
    check_coalgebra, check_linear_nrack, lebed_operator, linear_nrack_from_linear_rack, linear_nrack_from_nleibniz,
    linear_rack_on_tensor_power, linearize_nrack,
};
use crate::nleibniz::{
    adjoin_unit, check_fundamental_identity, fundamental_leibniz, is_central, nbracket_from_leibniz,
};
use crate::nrack::{
    check_nrack, check_vector_nrack, conjugation_nrack, krack_from_power, nrack_from_nleibniz, nrack_from_rack,
    rack_from_nrack, verify_tensor_embedding, FiniteGroup,
};
use crate::report::{VerificationReport, Witness, YBReport};
use crate::samples::nilpotent_ternary;
use crate::setsol::{
    check_set_nsolution, enumerate_tables, nsolution_from_solution, solution_from_nrack, solution_from_nsolution,
    verify_set_nybe_with_cap, TableFilter,
};
use crate::tensor::unflatten;
use crate::ybops::{
    dim_cap, eta_intertwiner, group_algebra_nyb, is_invertible, mirror, nyb_from_central_nleibniz,
    nyb_from_linear_nrack, nyb_from_ybe, r1_from_nleibniz, r2_from_nleibniz, r_from_central_leibniz, verify_nybe,
    verify_nybe_with_cap, verify_ybe, ybe_from_nyb,
};
use crate::{ScalarMode, Side};

#[derive(Debug, Parser)]
#[command(
    name = "braidforge",
    version,
    about = "Build and verify n-Leibniz algebras, n-racks and n-Yang-Baxter operators"
)]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "BRAIDFORGE_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every axiom check that applies to the document's kind.
    Check { file: PathBuf },
    /// Apply a construction to a document.
    Build {
        construction: String,
        file: PathBuf,
        /// Integer parameters such as `n=3`.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, usize)>,
        /// Write the document here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check one Yang-Baxter type equation on an operator or set map.
    Verify {
        equation: EquationArg,
        file: PathBuf,
        /// Accept non-invertible solutions.
        #[arg(long)]
        allow_pre: bool,
        /// Lift the verification dimension cap.
        #[arg(long)]
        allow_large: bool,
    },
    /// Count operation tables on a small set.
    Enumerate {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "nrack")]
        filter: String,
        /// Include every table in the output.
        #[arg(long)]
        dump: bool,
    },
    /// Run the worked pipeline from the ternary nilpotent algebra to the set-side diagrams.
    Demo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EquationArg {
    Ybe,
    NybeRight,
    NybeLeft,
    SetYbe,
    SetNybe,
}

fn parse_param(s: &str) -> std::result::Result<(String, usize), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected k=v, got {s:?}"))?;
    let v = v.parse().map_err(|_| format!("parameter {k} must be a non-negative integer"))?;
    Ok((k.to_string(), v))
}

/// A command's JSON output and whether it counts as a pass.
pub struct Outcome {
    pub json: Value,
    pub passed: bool,
}

impl Outcome {
    fn new(value: impl Serialize, passed: bool) -> Result<Self> {
        Ok(Outcome { json: serde_json::to_value(value)?, passed })
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DimensionCapExceeded { .. }
        | Error::CapExceeded(_)
        | Error::CarrierTooLarge { .. }
        | Error::IndexOverflow(_) => 3,
        Error::Schema(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::UnknownConstruction(_)
        | Error::ShapeMismatch(_)
        | Error::InputInvalid(_)
        | Error::ArityMismatch(_)
        | Error::NonPermutation(_) => 2,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match exit_code(e) {
        3 => "cap_exceeded",
        2 => "input_error",
        _ => "precondition_failed",
    }
}

/// Sorted, pretty JSON.
pub fn render(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values always serialize")
}

/// Parses `args`, runs the command, prints to stdout and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("warning: thread pool already initialized: {e}");
        }
    }
    match run(&cli.command) {
        Ok(out) => {
            println!("{}", render(&out.json));
            if out.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            println!("{}", render(&json!({"error": {"kind": error_kind(&e), "message": e.to_string()}})));
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    main_with_args(std::env::args_os())
}

fn read_doc(path: &PathBuf) -> Result<Document> {
    let text = std::fs::read_to_string(path)?;
    Document::parse(&text)
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Check { file } => check_document(&read_doc(file)?),
        Command::Build { construction, file, params, output } => {
            let params: BTreeMap<String, usize> = params.iter().cloned().collect();
            let doc = build(construction, &read_doc(file)?, &params)?;
            let text = doc.to_json()?;
            match output {
                Some(path) => {
                    std::fs::write(path, &text)?;
                    let meta = doc.meta().cloned().unwrap_or_default();
                    Outcome::new(
                        json!({"kind": doc.kind(), "output": path, "certified": meta.certified, "provenance": meta.provenance}),
                        true,
                    )
                }
                None => Ok(Outcome { json: serde_json::from_str(&text)?, passed: true }),
            }
        }
        Command::Verify { equation, file, allow_pre, allow_large } => {
            let report = verify(*equation, &read_doc(file)?, *allow_large)?;
            let passed = report.holds && (report.invertible || *allow_pre);
            Outcome::new(report, passed)
        }
        Command::Enumerate { m, n, filter, dump } => {
            let census = enumerate_tables(*m, *n, filter.parse()?, *dump)?;
            Outcome::new(census, true)
        }
        Command::Demo => demo(),
    }
}

fn equation_witness(report: &YBReport, d: usize) -> Option<Witness> {
    report.witness.map(|i| {
        let width = 2 * report.n - 1;
        Witness::new(unflatten(i, &vec![d; width]), "the two sides differ on this basis tuple")
    })
}

/// Runs the checks for one document. Batches pass iff every item passes.
pub fn check_document(doc: &Document) -> Result<Outcome> {
    let report = match doc {
        Document::Nleibniz(d) => {
            let a = d.to_algebra()?;
            let mut report = check_fundamental_identity(&a);
            if let Some(z) = &d.central {
                let z: Vec<_> = z.iter().map(|v| v.to_mode(d.scalars)).collect();
                report.run("central", || {
                    (z.len() != d.dim || !is_central(&a, &z))
                        .then(|| Witness::new(vec![], "the given vector does not annihilate the bracket"))
                });
            }
            report
        }
        Document::Nrack(d) => check_nrack(&d.to_nrack()?),
        Document::Group(d) => {
            let mut report = VerificationReport::new(format!("group of order {}", d.size));
            let verdict = d.to_group();
            report.run("group_axioms", || match verdict {
                Ok(_) => None,
                Err(Error::GroupAxiom(msg)) => Some(Witness::new(vec![], msg)),
                Err(e) => Some(Witness::new(vec![], e.to_string())),
            });
            report
        }
        Document::Coalgebra(d) => check_coalgebra(&d.to_coalgebra()?),
        Document::LinearNrack(d) => check_linear_nrack(&d.to_linear()?),
        Document::VectorNrack(d) => {
            let a = d.algebra.to_algebra()?;
            let mut report = check_vector_nrack(&nrack_from_nleibniz(&a, a.mode())?);
            if a.mode() == ScalarMode::Exact {
                report.absorb("embedding.", verify_tensor_embedding(&a)?);
            } else {
                report.skip("embedding", "exact mode only");
            }
            report
        }
        Document::Operator(d) => {
            let (dim, n) = d.tensor_power()?;
            let s = d.to_operator()?;
            let yb = if n == 2 { verify_ybe(&s)? } else { verify_nybe(&s, n, d.side)? };
            let mut report = VerificationReport::new(format!("operator on ({dim})^{n}"));
            report
                .run(serde_json::to_value(yb.equation)?.as_str().unwrap_or("equation"), || equation_witness(&yb, dim));
            report.run("invertible", || (!yb.invertible).then(|| Witness::new(vec![], "operator is singular")));
            report
        }
        Document::SetMap(d) => {
            let s = d.to_map()?;
            let profile = check_set_nsolution(&s)?;
            let mut report = VerificationReport::new(format!("{}-ary set map on {} elements", s.arity(), s.size()));
            let witness = match s.side() {
                Side::Right => profile.right_witness.clone(),
                Side::Left => profile.left_witness.clone(),
            };
            report.run("equation", || witness.map(|t| Witness::new(t, "the two sides differ on this tuple")));
            report.run("bijective", || (!profile.is_bijective).then(|| Witness::new(vec![], "map is not bijective")));
            let pre = profile.is_pre_solution();
            let mut out = serde_json::to_value(&report)?;
            out["profile"] = serde_json::to_value(&profile)?;
            out["label"] = json!(if profile.is_solution() {
                "solution"
            } else if pre {
                "pre-solution"
            } else {
                "not a solution"
            });
            return Ok(Outcome { passed: report.passed(), json: out });
        }
        Document::Batch(b) => {
            let items = b.items.iter().map(check_document).collect::<Result<Vec<_>>>()?;
            let passed = items.iter().filter(|o| o.passed).count();
            let failed = items.len() - passed;
            return Outcome::new(
                json!({
                    "passed": passed,
                    "failed": failed,
                    "status": if failed == 0 { "pass" } else { "fail" },
                    "items": items.into_iter().map(|o| o.json).collect::<Vec<_>>(),
                }),
                failed == 0,
            );
        }
    };
    let passed = report.passed();
    Outcome::new(report, passed)
}

fn param(params: &BTreeMap<String, usize>, key: &str) -> Result<usize> {
    params.get(key).copied().ok_or_else(|| Error::InputInvalid(format!("missing --param {key}=…")))
}

fn kind_error(construction: &str, want: &str, doc: &Document) -> Error {
    Error::Schema(format!("{construction} expects a {want} document, got {}", doc.kind()))
}

/// Names accepted by `build`.
pub const CONSTRUCTIONS: &[&str] = &[
    "nbracket-from-leibniz",
    "fundamental-leibniz",
    "adjoin-unit",
    "nrack-from-nleibniz",
    "conjugation-nrack",
    "nrack-from-rack",
    "rack-from-nrack",
    "krack-from-power",
    "linearize",
    "lnr-from-nleibniz",
    "lnr-from-lr",
    "lr-on-tensor-power",
    "lebed",
    "r-central",
    "r1",
    "r2",
    "eta",
    "nyb-central",
    "nyb-lnr",
    "nyb-group",
    "sn-from-r",
    "stilde-from-s",
    "mirror",
    "solution-from-nrack",
    "sn-from-solution",
    "solution-from-nsolution",
];

/// Applies a named construction. The output carries its provenance chain and
/// whether it passed its own checks.
pub fn build(construction: &str, input: &Document, params: &BTreeMap<String, usize>) -> Result<Document> {
    if !CONSTRUCTIONS.contains(&construction) {
        return Err(Error::UnknownConstruction(construction.to_string()));
    }
    let want = |kind: &str| kind_error(construction, kind, input);
    let algebra = || match input {
        Document::Nleibniz(d) => d.to_algebra(),
        _ => Err(want("nleibniz")),
    };
    let nrack = || match input {
        Document::Nrack(d) => d.to_nrack(),
        _ => Err(want("nrack")),
    };
    let group = || match input {
        Document::Group(d) => d.to_group(),
        _ => Err(want("group")),
    };
    let linear = || match input {
        Document::LinearNrack(d) => d.to_linear(),
        _ => Err(want("linear_nrack")),
    };
    let operator = || match input {
        Document::Operator(d) => Ok((d.to_operator()?, d.tensor_power()?)),
        _ => Err(want("operator")),
    };
    let set_map = || match input {
        Document::SetMap(d) => d.to_map(),
        _ => Err(want("set_map")),
    };
    let central = || match input {
        Document::Nleibniz(d) => d.to_central()?.ok_or_else(|| {
            Error::InputInvalid(format!("{construction} needs a \"central\" element; build adjoin-unit first"))
        }),
        _ => Err(want("nleibniz")),
    };
    let op_doc = |op| Document::Operator(OperatorDoc::from_operator(&op));
    let alg_doc = |a| Document::Nleibniz(NLeibnizDoc::from_algebra(&a));
    let rack_doc = |t| Document::Nrack(NRackDoc::from_nrack(&t));
    let lin_doc = |l| Document::LinearNrack(LinearNRackDoc::from_linear(&l));
    let map_doc = |s| Document::SetMap(SetMapDoc::from_map(&s));

    let out = match construction {
        "nbracket-from-leibniz" => alg_doc(nbracket_from_leibniz(&algebra()?, param(params, "n")?)?),
        "fundamental-leibniz" => match central_if_present(input)? {
            Some(cl) => Document::Nleibniz(NLeibnizDoc::from_central(&cl.fundamental()?)),
            None => alg_doc(fundamental_leibniz(&algebra()?)?),
        },
        "adjoin-unit" => Document::Nleibniz(NLeibnizDoc::from_central(&adjoin_unit(&algebra()?)?)),
        "nrack-from-nleibniz" => {
            let a = algebra()?;
            nrack_from_nleibniz(&a, a.mode())?;
            Document::VectorNrack(VectorNRackDoc { algebra: NLeibnizDoc::from_algebra(&a), meta: None })
        }
        "conjugation-nrack" => rack_doc(conjugation_nrack(&group()?, param(params, "n")?)?),
        "nrack-from-rack" => rack_doc(nrack_from_rack(&nrack()?, param(params, "n")?)?),
        "rack-from-nrack" => rack_doc(rack_from_nrack(&nrack()?)?),
        "krack-from-power" => rack_doc(krack_from_power(&nrack()?, param(params, "k")?)?),
        "linearize" => lin_doc(linearize_nrack(&nrack()?, ScalarMode::Exact)?),
        "lnr-from-nleibniz" => lin_doc(linear_nrack_from_nleibniz(&algebra()?)?),
        "lnr-from-lr" => lin_doc(linear_nrack_from_linear_rack(&linear()?, param(params, "n")?)?),
        "lr-on-tensor-power" => lin_doc(linear_rack_on_tensor_power(&linear()?)?),
        "lebed" => op_doc(lebed_operator(&linear()?)?.0),
        "r-central" => op_doc(r_from_central_leibniz(&central()?)?),
        "r1" => op_doc(r1_from_nleibniz(&algebra()?)?),
        "r2" => op_doc(r2_from_nleibniz(&algebra()?)?),
        "eta" => op_doc(eta_intertwiner(&algebra()?)?.0),
        "nyb-central" => op_doc(nyb_from_central_nleibniz(&central()?)?),
        "nyb-lnr" => op_doc(nyb_from_linear_nrack(&linear()?)?.0),
        "nyb-group" => op_doc(group_algebra_nyb(&group()?, param(params, "n")?, ScalarMode::Exact)?),
        "sn-from-r" => {
            let (r, (_, k)) = operator()?;
            if k != 2 {
                return Err(Error::ShapeMismatch(format!("sn-from-r expects a 2-factor operator, got {k}")));
            }
            op_doc(nyb_from_ybe(&r, param(params, "n")?)?)
        }
        "stilde-from-s" => {
            let (s, (_, n)) = operator()?;
            op_doc(ybe_from_nyb(&s, n)?)
        }
        "mirror" => {
            let (s, (_, n)) = operator()?;
            let side = match input {
                Document::Operator(d) => d.side.flipped(),
                _ => unreachable!(),
            };
            let mut doc = OperatorDoc::from_operator(&mirror(&s, n)?);
            doc.side = side;
            Document::Operator(doc)
        }
        "solution-from-nrack" => map_doc(solution_from_nrack(&nrack()?)?),
        "sn-from-solution" => map_doc(nsolution_from_solution(&set_map()?, param(params, "n")?)?),
        "solution-from-nsolution" => map_doc(solution_from_nsolution(&set_map()?)?),
        other => return Err(Error::UnknownConstruction(other.to_string())),
    };
    let mut provenance = input.meta().map(|m| m.provenance.clone()).unwrap_or_default();
    provenance.push(construction.to_string());
    let certified = check_document(&out).map(|o| o.passed).unwrap_or(false);
    Ok(out.with_meta(Meta { certified, provenance }))
}

fn central_if_present(doc: &Document) -> Result<Option<crate::CentralNLeibnizAlgebra>> {
    match doc {
        Document::Nleibniz(d) => d.to_central(),
        _ => Ok(None),
    }
}

pub fn verify(equation: EquationArg, doc: &Document, allow_large: bool) -> Result<YBReport> {
    let cap = (!allow_large).then(dim_cap);
    match (equation, doc) {
        (EquationArg::Ybe | EquationArg::NybeRight | EquationArg::NybeLeft, Document::Operator(d)) => {
            let (_, n) = d.tensor_power()?;
            let s = d.to_operator()?;
            let side = match equation {
                EquationArg::NybeLeft => Side::Left,
                _ => Side::Right,
            };
            if equation == EquationArg::Ybe && n != 2 {
                return Err(Error::ShapeMismatch(format!("ybe needs a 2-factor operator, got {n} factors")));
            }
            let mut report = verify_nybe_with_cap(&s, n, side, cap)?;
            if n == 2 {
                report.equation = crate::Equation::Ybe;
            }
            Ok(report)
        }
        (EquationArg::SetYbe | EquationArg::SetNybe, Document::SetMap(d)) => {
            let s = d.to_map()?;
            if equation == EquationArg::SetYbe && s.arity() != 2 {
                return Err(Error::ShapeMismatch(format!("set-ybe needs a binary map, got arity {}", s.arity())));
            }
            verify_set_nybe_with_cap(&s, s.side(), cap)
        }
        (_, other) => Err(Error::Schema(format!("{equation:?} cannot be checked on a {} document", other.kind()))),
    }
}

/// The worked pipeline: T3, its unit extension, the central operator, its
/// descent to a Yang-Baxter operator, R1/R2/η, and the set-side diagrams.
pub fn demo() -> Result<Outcome> {
    let mut steps: Vec<Value> = Vec::new();
    let mut all = true;
    let mut step = |name: &str, holds: bool, detail: Value| {
        all &= holds;
        steps.push(json!({"step": name, "holds": holds, "detail": detail}));
    };

    let t3 = nilpotent_ternary();
    let fi = check_fundamental_identity(&t3);
    step("t3_fundamental_identity", fi.passed(), json!({"dim": t3.dim(), "arity": t3.arity()}));
    let t3 = t3.certify()?;

    let bar = adjoin_unit(&t3)?;
    step("adjoin_unit", bar.algebra().dim() == 4, json!({"dim": bar.algebra().dim()}));

    let s = nyb_from_central_nleibniz(&bar)?;
    let yb = verify_nybe(&s, 3, Side::Right)?;
    step("central_operator_3ybe", yb.is_operator(), serde_json::to_value(&yb)?);

    let tilde = ybe_from_nyb(&s, 3)?;
    let yb2 = verify_ybe(&tilde)?;
    step("descended_operator_ybe", yb2.is_operator(), serde_json::to_value(&yb2)?);
    let r = r_from_central_leibniz(&bar.fundamental()?)?;
    let same = tilde.same_as(&r);
    step("descent_equals_fundamental_route", same, json!({"dim": r.domain().total()}));

    let r1 = r1_from_nleibniz(&t3)?;
    let r2 = r2_from_nleibniz(&t3)?;
    let (_, eta) = eta_intertwiner(&t3)?;
    step(
        "r1_r2_eta_intertwine",
        is_invertible(&r1) && is_invertible(&r2) && eta.passed(),
        json!({"r1_dim": r1.domain().total(), "r2_dim": r2.domain().total()}),
    );

    let s3 = FiniteGroup::symmetric(3);
    let rack = conjugation_nrack(&s3, 2)?;
    let top = nsolution_from_solution(&solution_from_nrack(&rack)?, 3)?;
    let bottom = solution_from_nrack(&nrack_from_rack(&rack, 3)?)?;
    step("rack_diagram", top == bottom, json!({"size": 6, "n": 3}));

    let t = conjugation_nrack(&s3, 3)?;
    let tilde = solution_from_nsolution(&solution_from_nrack(&t)?)?;
    let via_rack = solution_from_nrack(&rack_from_nrack(&t)?)?;
    step("nrack_diagram", tilde == via_rack, json!({"size": 6, "n": 3}));

    let racks = enumerate_tables(2, 3, TableFilter::Nrack, false)?;
    let sols = enumerate_tables(2, 3, TableFilter::Nsolution, false)?;
    step("census_m2_n3", racks.count == sols.count, json!({"nrack": racks.count, "nsolution": sols.count}));

    let unit = basis_vec(4, 0, ScalarMode::Exact);
    step("unit_is_central", is_central(bar.algebra(), &unit), json!({}));

    let passed = all;
    Outcome::new(json!({"status": if passed { "pass" } else { "fail" }, "steps": steps}), passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::GroupDoc;

    fn t3_doc() -> Document {
        Document::Nleibniz(NLeibnizDoc::from_algebra(&nilpotent_ternary()))
    }

    #[test]
    fn builds_recheck() {
        let bar = build("adjoin-unit", &t3_doc(), &BTreeMap::new()).unwrap();
        assert!(bar.meta().unwrap().certified);
        let s = build("nyb-central", &bar, &BTreeMap::new()).unwrap();
        let meta = s.meta().unwrap();
        assert!(meta.certified);
        assert_eq!(meta.provenance, vec!["adjoin-unit", "nyb-central"]);
        let Document::Operator(d) = &s else { panic!() };
        assert_eq!(d.shape, vec![4, 4, 4]);
        let back = Document::parse(&s.to_json().unwrap()).unwrap();
        assert!(check_document(&back).unwrap().passed);
    }

    #[test]
    fn construction_errors() {
        let empty = BTreeMap::new();
        assert!(matches!(build("nope", &t3_doc(), &empty), Err(Error::UnknownConstruction(_))));
        assert!(matches!(build("lebed", &t3_doc(), &empty), Err(Error::Schema(_))));
        assert!(matches!(build("nyb-central", &t3_doc(), &empty), Err(Error::InputInvalid(_))));
        let g = Document::Group(GroupDoc::from_group(&FiniteGroup::symmetric(3)));
        assert!(matches!(build("conjugation-nrack", &g, &empty), Err(Error::InputInvalid(_))));
    }

    #[test]
    fn trivial_rack_builds_the_flip() {
        let t = Document::Nrack(NRackDoc::from_nrack(&crate::FiniteNRack::trivial(3, 3).unwrap()));
        let Document::SetMap(d) = build("solution-from-nrack", &t, &BTreeMap::new()).unwrap() else { panic!() };
        assert_eq!(d.to_map().unwrap(), crate::setsol::SetNMap::flip(3, 3).unwrap());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Schema("x".into())), 2);
        assert_eq!(exit_code(&Error::CapExceeded("x".into())), 3);
        assert_eq!(exit_code(&Error::DimensionCapExceeded { dim: 2, cap: 1 }), 3);
        assert_eq!(exit_code(&Error::InputNotYbe), 1);
    }

    #[test]
    fn demo_passes() {
        let out = demo().unwrap();
        assert!(out.passed, "{}", render(&out.json));
    }
}
