//! Verdicts with counterexample witnesses and timing.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// A counterexample: the offending index tuple plus a human-readable account
/// of both sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub tuple: Vec<usize>,
    pub detail: String,
}

impl Witness {
    pub fn new(tuple: Vec<usize>, detail: impl Into<String>) -> Self {
        Witness { tuple, detail: detail.into() }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {:?}: {}", self.tuple, self.detail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub witness: Option<Witness>,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: String,
    pub checks: Vec<Check>,
    pub status: Status,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        VerificationReport { subject: subject.into(), checks: Vec::new(), status: Status::Pass }
    }

    /// Runs `f` and records a check that passes iff it returns no witness.
    pub fn run(&mut self, name: &str, f: impl FnOnce() -> Option<Witness>) -> &mut Self {
        let start = Instant::now();
        let witness = f();
        let status = if witness.is_some() { Status::Fail } else { Status::Pass };
        self.push(Check { name: name.to_string(), status, witness, elapsed_ms: start.elapsed().as_millis() as u64 })
    }

    pub fn skip(&mut self, name: &str, reason: impl Into<String>) -> &mut Self {
        self.push(Check {
            name: name.to_string(),
            status: Status::Skipped,
            witness: Some(Witness::new(vec![], reason)),
            elapsed_ms: 0,
        })
    }

    pub fn push(&mut self, check: Check) -> &mut Self {
        if check.status == Status::Fail {
            self.status = Status::Fail;
        }
        self.checks.push(check);
        self
    }

    /// Appends every check of `other`, prefixing names.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) -> &mut Self {
        for mut c in other.checks {
            c.name = format!("{prefix}{}", c.name);
            self.push(c);
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// First failing check's witness.
    pub fn first_witness(&self) -> Option<&Witness> {
        self.checks.iter().find(|c| c.status == Status::Fail).and_then(|c| c.witness.as_ref())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Ybe,
    NYbeRight,
    NYbeLeft,
    SetYbe,
    SetNYbeRight,
    SetNYbeLeft,
}

/// Outcome of a Yang-Baxter style verification. `witness` is the first
/// domain basis index (or flat tuple index for set maps) where the two
/// sides differ; it is present iff `holds` is false.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct YBReport {
    pub equation: Equation,
    pub n: usize,
    pub dim: usize,
    pub holds: bool,
    pub invertible: bool,
    pub witness: Option<usize>,
    pub nonzeros: usize,
    pub verification_dim: usize,
    pub elapsed_ms: u64,
}

impl YBReport {
    /// Holds and invertible: an operator rather than a pre-operator.
    pub fn is_operator(&self) -> bool {
        self.holds && self.invertible
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_status_ignores_skipped() {
        let mut r = VerificationReport::new("x");
        r.run("a", || None).skip("b", "not computable");
        assert!(r.passed());
        r.run("c", || Some(Witness::new(vec![1], "boom")));
        assert!(!r.passed());
        assert_eq!(r.first_witness().unwrap().tuple, vec![1]);
    }
}
