//! Exact construction and verification of n-ary Leibniz algebras, n-racks,
//! linear n-racks and the (n-)Yang-Baxter operators they induce.

use serde::{Deserialize, Serialize};

pub mod cli;
pub mod document;
pub mod error;
pub mod linalg;
pub mod linrack;
pub mod nleibniz;
pub mod nrack;
pub mod report;
pub mod samples;
pub mod scalar;
pub mod setsol;
pub mod tensor;
pub mod ybops;

pub use document::Document;
pub use error::{Error, Result};
pub use linalg::{LinearMapOnAlgebra, Matrix, Vector};
pub use linrack::{Coalgebra, LinearNRack, LinearRack};
pub use nleibniz::{CentralNLeibnizAlgebra, NLeibnizAlgebra};
pub use nrack::{FiniteGroup, FiniteNRack, VectorNRack};
pub use report::{Equation, Status, VerificationReport, Witness, YBReport};
pub use scalar::{Scalar, ScalarMode};
pub use setsol::{SetNMap, SolutionProfile};
pub use tensor::{SparseVec, TensorOperator, TensorShape};

/// Which end of a bracket or operation the distributive law acts on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    #[default]
    Right,
    Left,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::Right => Side::Left,
            Side::Left => Side::Right,
        }
    }
}
