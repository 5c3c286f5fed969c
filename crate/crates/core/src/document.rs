//! JSON documents: one tagged object per structure, converted to and from
//! the in-memory types. Documents never carry trust; every consumer that
//! needs an axiom re-checks it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::linrack::{Coalgebra, LinearNRack};
use crate::nleibniz::{CentralNLeibnizAlgebra, NLeibnizAlgebra};
use crate::nrack::{FiniteGroup, FiniteNRack};
use crate::scalar::{Scalar, ScalarMode};
use crate::setsol::SetNMap;
use crate::tensor::{TensorOperator, TensorShape};
use crate::Side;

/// Where a built document came from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    /// The producing construction verified its output's axioms.
    #[serde(default)]
    pub certified: bool,
    /// Construction names, earliest first.
    #[serde(default)]
    pub provenance: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BracketEntry {
    #[serde(rename = "in")]
    pub ins: Vec<usize>,
    /// Output coordinates keyed by basis index.
    pub out: BTreeMap<String, Scalar>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NLeibnizDoc {
    pub arity: usize,
    pub dim: usize,
    #[serde(default)]
    pub scalars: ScalarMode,
    #[serde(default)]
    pub side: Side,
    pub bracket: Vec<BracketEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub central: Option<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NRackDoc {
    pub size: usize,
    pub arity: usize,
    #[serde(default)]
    pub side: Side,
    /// `[x₁,…,x_n, value]` rows; every tuple must appear.
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupDoc {
    pub size: usize,
    pub mul: Vec<Vec<usize>>,
}

/// `[row, col, value]` with flat row-major indices.
pub type Entry = (usize, usize, Scalar);

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoalgebraDoc {
    pub dim: usize,
    #[serde(default)]
    pub scalars: ScalarMode,
    pub delta: Vec<Entry>,
    pub epsilon: Vec<Entry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearNRackDoc {
    pub base: CoalgebraDoc,
    pub arity: usize,
    pub bracket: Vec<Entry>,
    pub inv_bracket: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorDoc {
    pub shape: Vec<usize>,
    pub codomain_shape: Vec<usize>,
    #[serde(default)]
    pub scalars: ScalarMode,
    /// Which n-Yang-Baxter equation `check` tests.
    #[serde(default)]
    pub side: Side,
    pub entries: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SetMapDoc {
    pub size: usize,
    pub arity: usize,
    #[serde(default)]
    pub side: Side,
    /// `[x₁,…,x_n, y₁,…,y_n]` rows; every input must appear once.
    pub map: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

/// The exp-rack of an algebra, checked on the sample grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorNRackDoc {
    pub algebra: NLeibnizDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchDoc {
    pub items: Vec<Document>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Document {
    Nleibniz(NLeibnizDoc),
    Nrack(NRackDoc),
    Group(GroupDoc),
    Coalgebra(CoalgebraDoc),
    LinearNrack(LinearNRackDoc),
    Operator(OperatorDoc),
    SetMap(SetMapDoc),
    VectorNrack(VectorNRackDoc),
    Batch(BatchDoc),
}

impl Document {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Pretty JSON with sorted keys.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&serde_json::to_value(self)?)?)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Document::Nleibniz(_) => "nleibniz",
            Document::Nrack(_) => "nrack",
            Document::Group(_) => "group",
            Document::Coalgebra(_) => "coalgebra",
            Document::LinearNrack(_) => "linear_nrack",
            Document::Operator(_) => "operator",
            Document::SetMap(_) => "set_map",
            Document::VectorNrack(_) => "vector_nrack",
            Document::Batch(_) => "batch",
        }
    }

    pub fn with_meta(mut self, meta: Meta) -> Self {
        let slot = match &mut self {
            Document::Nleibniz(d) => &mut d.meta,
            Document::Nrack(d) => &mut d.meta,
            Document::LinearNrack(d) => &mut d.meta,
            Document::Operator(d) => &mut d.meta,
            Document::SetMap(d) => &mut d.meta,
            Document::VectorNrack(d) => &mut d.meta,
            Document::Group(_) | Document::Coalgebra(_) | Document::Batch(_) => return self,
        };
        *slot = Some(meta);
        self
    }

    pub fn meta(&self) -> Option<&Meta> {
        match self {
            Document::Nleibniz(d) => d.meta.as_ref(),
            Document::Nrack(d) => d.meta.as_ref(),
            Document::LinearNrack(d) => d.meta.as_ref(),
            Document::Operator(d) => d.meta.as_ref(),
            Document::SetMap(d) => d.meta.as_ref(),
            Document::VectorNrack(d) => d.meta.as_ref(),
            _ => None,
        }
    }
}

fn in_mode(v: &Scalar, mode: ScalarMode) -> Scalar {
    v.to_mode(mode)
}

impl NLeibnizDoc {
    pub fn from_algebra(a: &NLeibnizAlgebra) -> Self {
        let bracket = a
            .entries()
            .map(|(ins, out)| BracketEntry {
                ins: ins.clone(),
                out: out
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j.to_string(), v.clone()))
                    .collect(),
            })
            .filter(|e| !e.out.is_empty())
            .collect();
        NLeibnizDoc {
            arity: a.arity(),
            dim: a.dim(),
            scalars: a.mode(),
            side: a.side(),
            bracket,
            central: None,
            meta: None,
        }
    }

    pub fn from_central(cl: &CentralNLeibnizAlgebra) -> Self {
        NLeibnizDoc { central: Some(cl.central().clone()), ..Self::from_algebra(cl.algebra()) }
    }

    pub fn to_algebra(&self) -> Result<NLeibnizAlgebra> {
        let mode = self.scalars;
        let mut entries = Vec::with_capacity(self.bracket.len());
        for e in &self.bracket {
            let mut out: Vector = vec![Scalar::zero(mode); self.dim];
            for (key, v) in &e.out {
                let j: usize =
                    key.parse().map_err(|_| Error::Schema(format!("output key {key:?} is not a basis index")))?;
                if j >= self.dim {
                    return Err(Error::Schema(format!("output index {j} outside dimension {}", self.dim)));
                }
                out[j] = in_mode(v, mode);
            }
            entries.push((e.ins.clone(), out));
        }
        Ok(NLeibnizAlgebra::new(self.arity, self.dim, mode, entries)?.with_side(self.side))
    }

    /// The algebra with its distinguished central element, if one is given.
    pub fn to_central(&self) -> Result<Option<CentralNLeibnizAlgebra>> {
        let Some(z) = &self.central else { return Ok(None) };
        if z.len() != self.dim {
            return Err(Error::Schema(format!("central vector has length {}, expected {}", z.len(), self.dim)));
        }
        let z = z.iter().map(|v| in_mode(v, self.scalars)).collect();
        CentralNLeibnizAlgebra::new(self.to_algebra()?.certify()?, z).map(Some)
    }
}

impl NRackDoc {
    pub fn from_nrack(t: &FiniteNRack) -> Self {
        let table = t
            .entries()
            .map(|(mut xs, v)| {
                xs.push(v);
                xs
            })
            .collect();
        NRackDoc { size: t.size(), arity: t.arity(), side: t.side(), table, meta: None }
    }

    pub fn to_nrack(&self) -> Result<FiniteNRack> {
        let (m, n) = (self.size, self.arity);
        let total = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if m == 0 || total > crate::nrack::TABLE_CAP {
            return Err(Error::CarrierTooLarge { size: total, cap: crate::nrack::TABLE_CAP });
        }
        let mut table = vec![usize::MAX; total as usize];
        for row in &self.table {
            if row.len() != n + 1 || row.iter().any(|&x| x >= m) {
                return Err(Error::Schema(format!("bad table row {row:?}")));
            }
            let i = row[..n].iter().fold(0, |acc, &x| acc * m + x);
            if table[i] != usize::MAX {
                return Err(Error::Schema(format!("arguments {:?} listed twice", &row[..n])));
            }
            table[i] = row[n];
        }
        if let Some(i) = table.iter().position(|&v| v == usize::MAX) {
            let dims = vec![m; n];
            return Err(Error::Schema(format!(
                "table is not total: arguments {:?} missing",
                crate::tensor::unflatten(i, &dims)
            )));
        }
        FiniteNRack::new(m, n, self.side, table)
    }
}

impl GroupDoc {
    pub fn from_group(g: &FiniteGroup) -> Self {
        GroupDoc { size: g.size(), mul: g.table() }
    }

    pub fn to_group(&self) -> Result<FiniteGroup> {
        if self.mul.len() != self.size {
            return Err(Error::Schema(format!("mul has {} rows, size is {}", self.mul.len(), self.size)));
        }
        FiniteGroup::from_table(self.mul.clone())
    }
}

fn entries_of(op: &TensorOperator) -> Vec<Entry> {
    op.entries()
}

fn operator_from(
    domain: Vec<usize>,
    codomain: Vec<usize>,
    mode: ScalarMode,
    entries: &[Entry],
) -> Result<TensorOperator> {
    let entries = entries.iter().map(|(r, c, v)| (*r, *c, in_mode(v, mode)));
    TensorOperator::from_entries(TensorShape::new(domain)?, TensorShape::new(codomain)?, mode, entries)
}

impl CoalgebraDoc {
    pub fn from_coalgebra(c: &Coalgebra) -> Self {
        CoalgebraDoc { dim: c.dim(), scalars: c.mode(), delta: entries_of(c.delta()), epsilon: entries_of(c.counit()) }
    }

    pub fn to_coalgebra(&self) -> Result<Coalgebra> {
        let c = self.dim;
        let delta = operator_from(vec![c], vec![c, c], self.scalars, &self.delta)?;
        let counit = operator_from(vec![c], vec![1], self.scalars, &self.epsilon)?;
        Coalgebra::new(delta, counit)
    }
}

impl LinearNRackDoc {
    pub fn from_linear(l: &LinearNRack) -> Self {
        LinearNRackDoc {
            base: CoalgebraDoc::from_coalgebra(l.base()),
            arity: l.arity(),
            bracket: entries_of(l.bracket()),
            inv_bracket: entries_of(l.inv_bracket()),
            meta: None,
        }
    }

    pub fn to_linear(&self) -> Result<LinearNRack> {
        let base = self.base.to_coalgebra()?;
        let (c, n, mode) = (base.dim(), self.arity, base.mode());
        if n < 2 {
            return Err(Error::Schema(format!("arity {n}")));
        }
        let bracket = operator_from(vec![c; n], vec![c], mode, &self.bracket)?;
        let inv_bracket = operator_from(vec![c; n], vec![c], mode, &self.inv_bracket)?;
        LinearNRack::new(base, n, bracket, inv_bracket)
    }
}

impl OperatorDoc {
    pub fn from_operator(op: &TensorOperator) -> Self {
        OperatorDoc {
            shape: op.domain().dims().to_vec(),
            codomain_shape: op.codomain().dims().to_vec(),
            scalars: op.mode(),
            side: Side::Right,
            entries: entries_of(op),
            meta: None,
        }
    }

    pub fn to_operator(&self) -> Result<TensorOperator> {
        operator_from(self.shape.clone(), self.codomain_shape.clone(), self.scalars, &self.entries)
    }

    /// `(d, n)` when domain and codomain are both `[d; n]`.
    pub fn tensor_power(&self) -> Result<(usize, usize)> {
        let d = *self.shape.first().ok_or_else(|| Error::Schema("empty shape".into()))?;
        if self.shape != self.codomain_shape || self.shape.iter().any(|&x| x != d) {
            return Err(Error::ShapeMismatch(format!(
                "expected an operator on a tensor power, got {:?} -> {:?}",
                self.shape, self.codomain_shape
            )));
        }
        Ok((d, self.shape.len()))
    }
}

impl SetMapDoc {
    pub fn from_map(s: &SetNMap) -> Self {
        SetMapDoc { size: s.size(), arity: s.arity(), side: s.side(), map: s.rows(), meta: None }
    }

    pub fn to_map(&self) -> Result<SetNMap> {
        SetNMap::from_rows(self.size, self.arity, self.side, &self.map).map_err(|e| match e {
            Error::InputInvalid(msg) => Error::Schema(msg),
            other => other,
        })
    }
}
