//! n-Leibniz algebras given by structure constants.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{add_vec, basis_vec, is_zero_vec, show_vec, tensor_vecs, vec_eq, zero_vec, Matrix, Vector};
use crate::report::{VerificationReport, Witness};
use crate::scalar::{Scalar, ScalarMode};
use crate::tensor::{flatten, unflatten};
use crate::Side;

/// Terms after which a float exponential series gives up.
pub const EXP_MAX_TERMS: usize = 64;
/// A float series stops once the next term's largest entry is below this.
pub const EXP_TERM_TOL: f64 = 1e-12;

/// An n-linear bracket on `k^d`, stored sparsely by input basis tuple.
///
/// The type does not enforce the fundamental identity; `certified` records
/// that it has been checked (or that the algebra came out of a construction
/// that guarantees it).
#[derive(Clone, Debug)]
pub struct NLeibnizAlgebra {
    arity: usize,
    dim: usize,
    mode: ScalarMode,
    side: Side,
    bracket: BTreeMap<Vec<usize>, Vector>,
    certified: bool,
}

impl NLeibnizAlgebra {
    pub fn zero(arity: usize, dim: usize, mode: ScalarMode) -> Result<Self> {
        if arity < 2 || dim == 0 {
            return Err(Error::InputInvalid(format!("arity {arity} dim {dim}")));
        }
        Ok(NLeibnizAlgebra { arity, dim, mode, side: Side::Right, bracket: BTreeMap::new(), certified: false })
    }

    /// Builds from `(inputs, output vector)` pairs. Later pairs for the same
    /// inputs are added to earlier ones.
    pub fn new(
        arity: usize,
        dim: usize,
        mode: ScalarMode,
        entries: impl IntoIterator<Item = (Vec<usize>, Vector)>,
    ) -> Result<Self> {
        let mut a = Self::zero(arity, dim, mode)?;
        for (ins, out) in entries {
            a.add_bracket(&ins, &out)?;
        }
        Ok(a)
    }

    /// Adds `out` to the bracket of the basis tuple `ins`.
    pub fn add_bracket(&mut self, ins: &[usize], out: &[Scalar]) -> Result<()> {
        if ins.len() != self.arity || ins.iter().any(|&i| i >= self.dim) || out.len() != self.dim {
            return Err(Error::InputInvalid(format!("bad bracket entry {ins:?}")));
        }
        let slot = self.bracket.entry(ins.to_vec()).or_insert_with(|| zero_vec(self.dim, self.mode));
        for (s, o) in slot.iter_mut().zip(out) {
            *s += o;
        }
        if is_zero_vec(slot) {
            self.bracket.remove(ins);
        }
        self.certified = false;
        Ok(())
    }

    /// Adds `coeff · e_out` to the bracket of `ins`.
    pub fn add_term(&mut self, ins: &[usize], out: usize, coeff: Scalar) -> Result<()> {
        if out >= self.dim {
            return Err(Error::InputInvalid(format!("output index {out} out of range")));
        }
        let mut v = zero_vec(self.dim, self.mode);
        v[out] = coeff;
        self.add_bracket(ins, &v)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> ScalarMode {
        self.mode
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Reinterprets the same structure constants under the other identity.
    pub fn with_side(mut self, side: Side) -> Self {
        if side != self.side {
            self.side = side;
            self.certified = false;
        }
        self
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Nonzero basis brackets in lexicographic order of inputs.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Vector)> {
        self.bracket.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.bracket.is_empty()
    }

    pub(crate) fn mark_certified(mut self) -> Self {
        self.certified = true;
        self
    }

    /// Runs the fundamental identity check and flags the algebra on success.
    pub fn certify(self) -> Result<Self> {
        let report = check_fundamental_identity(&self);
        match report.first_witness() {
            None => Ok(self.mark_certified()),
            Some(w) => Err(Error::InputNotCertified(w.clone())),
        }
    }

    /// Succeeds if flagged, or if a fresh check passes.
    pub fn require_certified(&self) -> Result<()> {
        if self.certified {
            return Ok(());
        }
        let report = check_fundamental_identity(self);
        match report.first_witness() {
            None => Ok(()),
            Some(w) => Err(Error::InputNotCertified(w.clone())),
        }
    }

    pub fn basis_bracket(&self, ins: &[usize]) -> Vector {
        self.bracket.get(ins).cloned().unwrap_or_else(|| zero_vec(self.dim, self.mode))
    }

    /// Multilinear evaluation on arbitrary vectors.
    pub fn bracket(&self, xs: &[Vector]) -> Vector {
        assert_eq!(xs.len(), self.arity, "bracket arity");
        let mode = xs.iter().flatten().fold(self.mode, |m, s| crate::tensor::join_mode(m, s.mode()));
        let mut out = zero_vec(self.dim, mode);
        for (ins, val) in &self.bracket {
            let mut coeff = Scalar::one(mode);
            for (x, &i) in xs.iter().zip(ins) {
                if x[i].is_zero() {
                    coeff = Scalar::zero(mode);
                    break;
                }
                coeff = &coeff * &x[i];
            }
            if coeff.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(val) {
                if !v.is_zero() {
                    *o += &(&coeff * v);
                }
            }
        }
        out
    }

    /// The op-reversal `[x₁,…,x_n]^op = [x_n,…,x₁]`, which swaps right and
    /// left algebras.
    pub fn reversed(&self) -> Self {
        let bracket = self.bracket.iter().map(|(k, v)| (k.iter().rev().copied().collect(), v.clone())).collect();
        NLeibnizAlgebra { side: self.side.flipped(), bracket, ..self.clone() }
    }

    /// Same structure constants converted to another scalar mode.
    pub fn to_mode(&self, mode: ScalarMode) -> Self {
        let bracket =
            self.bracket.iter().map(|(k, v)| (k.clone(), v.iter().map(|s| s.to_mode(mode)).collect())).collect();
        NLeibnizAlgebra { mode, bracket, ..self.clone() }
    }

    fn table(&self) -> BracketTable {
        let n = self.arity;
        let data = (0..self.dim.pow(n as u32)).map(|f| self.basis_bracket(&unflatten(f, &vec![self.dim; n]))).collect();
        BracketTable { dim: self.dim, arity: n, mode: self.mode, data }
    }
}

/// Dense table of all basis brackets.
struct BracketTable {
    dim: usize,
    arity: usize,
    mode: ScalarMode,
    data: Vec<Vector>,
}

impl BracketTable {
    fn at(&self, ins: &[usize]) -> &Vector {
        &self.data[flatten(ins, &vec![self.dim; self.arity])]
    }

    /// Bracket with `v` in `slot` and basis vectors elsewhere.
    fn with_vec(&self, ins: &[usize], slot: usize, v: &[Scalar]) -> Vector {
        let mut out = zero_vec(self.dim, self.mode);
        let mut t = ins.to_vec();
        for (j, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            t[slot] = j;
            for (o, x) in out.iter_mut().zip(self.at(&t)) {
                if !x.is_zero() {
                    *o += &(c * x);
                }
            }
        }
        out
    }
}

fn subject(a: &NLeibnizAlgebra) -> String {
    format!("nleibniz(n={},d={})", a.arity, a.dim)
}

/// Checks `[[x₁,…,x_n],y₁,…,y_{n−1}] = Σ_i [x₁,…,[x_i,y₁,…,y_{n−1}],…,x_n]`
/// on every basis tuple. Left algebras are checked through their reversal.
pub fn check_fundamental_identity(a: &NLeibnizAlgebra) -> VerificationReport {
    let mut report = VerificationReport::new(subject(a));
    let right;
    let a = if a.side == Side::Left {
        right = a.reversed();
        &right
    } else {
        a
    };
    report.run("fundamental_identity", || {
        let n = a.arity;
        let table = a.table();
        let dims = vec![a.dim; 2 * n - 1];
        let total = a.dim.pow((2 * n - 1) as u32);
        let sides = |f: usize| {
            let t = unflatten(f, &dims);
            let (xs, ys) = t.split_at(n);
            let mut ins = vec![0; n];
            ins[1..].copy_from_slice(ys);
            let lhs = table.with_vec(&ins, 0, table.at(xs));
            let mut rhs = zero_vec(a.dim, a.mode);
            for i in 0..n {
                ins[0] = xs[i];
                let xi_y = table.at(&ins).clone();
                rhs = add_vec(&rhs, &table.with_vec(xs, i, &xi_y));
            }
            (t, lhs, rhs)
        };
        (0..total)
            .into_par_iter()
            .find_first(|&f| {
                let (_, l, r) = sides(f);
                !vec_eq(&l, &r)
            })
            .map(|f| {
                let (t, l, r) = sides(f);
                Witness::new(t, format!("lhs {} != rhs {}", show_vec(&l), show_vec(&r)))
            })
    });
    report
}

/// `[x₁,…,x_n] = {x₁,{x₂,…{x_{n−1},x_n}…}}` from a Leibniz algebra.
pub fn nbracket_from_leibniz(l: &NLeibnizAlgebra, n: usize) -> Result<NLeibnizAlgebra> {
    if l.arity != 2 {
        return Err(Error::ArityMismatch(format!("expected a binary bracket, got {}", l.arity)));
    }
    if n < 2 {
        return Err(Error::ArityMismatch(format!("target arity {n} < 2")));
    }
    if let Some(w) = check_fundamental_identity(l).first_witness() {
        return Err(Error::InputNotLeibniz(w.clone()));
    }
    let d = l.dim;
    let mut out = NLeibnizAlgebra::zero(n, d, l.mode)?;
    for f in 0..d.pow(n as u32) {
        let t = unflatten(f, &vec![d; n]);
        let mut v = basis_vec(d, t[n - 1], l.mode);
        for &x in t[..n - 1].iter().rev() {
            v = l.bracket(&[basis_vec(d, x, l.mode), v]);
        }
        if !is_zero_vec(&v) {
            out.add_bracket(&t, &v)?;
        }
    }
    Ok(out.mark_certified())
}

/// `[[x₁,…,x_{n+1}]] = {x₁,[x₂,…,x_{n+1}]}`, provided every `{−,y}` is a
/// derivation of `b`.
pub fn extend_bracket_by_leibniz(l: &NLeibnizAlgebra, b: &NLeibnizAlgebra) -> Result<NLeibnizAlgebra> {
    if l.arity != 2 {
        return Err(Error::ArityMismatch(format!("expected a binary bracket, got {}", l.arity)));
    }
    if l.dim != b.dim {
        return Err(Error::ShapeMismatch(format!("dims {} and {}", l.dim, b.dim)));
    }
    if let Some(w) = check_fundamental_identity(l).first_witness() {
        return Err(Error::InputNotLeibniz(w.clone()));
    }
    let d = l.dim;
    for y in 0..d {
        let dy = ad(l, &[basis_vec(d, y, l.mode)]);
        if let Some(w) = is_derivation(b, &dy).first_witness() {
            let mut tuple = vec![y];
            tuple.extend(&w.tuple);
            return Err(Error::DerivationPreconditionFailed(Witness::new(
                tuple,
                format!("{{-, e{y}}} on {}", w.detail),
            )));
        }
    }
    let n = b.arity + 1;
    let mut out = NLeibnizAlgebra::zero(n, d, l.mode)?;
    for f in 0..d.pow(n as u32) {
        let t = unflatten(f, &vec![d; n]);
        let inner = b.basis_bracket(&t[1..]);
        if is_zero_vec(&inner) {
            continue;
        }
        let v = l.bracket(&[basis_vec(d, t[0], l.mode), inner]);
        if !is_zero_vec(&v) {
            out.add_bracket(&t, &v)?;
        }
    }
    out.certify()
}

/// The Leibniz algebra on `L^{⊗(n−1)}` with
/// `{x̄, ȳ} = Σ_i x₁⊗…⊗[x_i,y₁,…,y_{n−1}]⊗…⊗x_{n−1}`.
pub fn fundamental_leibniz(a: &NLeibnizAlgebra) -> Result<NLeibnizAlgebra> {
    a.require_certified()?;
    let (n, d) = (a.arity, a.dim);
    let k = n - 1;
    let big = d.pow(k as u32);
    let dims = vec![d; k];
    let table = a.table();
    let mut out = NLeibnizAlgebra::zero(2, big, a.mode)?;
    for fx in 0..big {
        let xs = unflatten(fx, &dims);
        for fy in 0..big {
            let ys = unflatten(fy, &dims);
            let mut v = zero_vec(big, a.mode);
            let mut ins = vec![0; n];
            ins[1..].copy_from_slice(&ys);
            for i in 0..k {
                ins[0] = xs[i];
                let r = table.at(&ins);
                let mut digits = xs.clone();
                for (j, c) in r.iter().enumerate() {
                    if !c.is_zero() {
                        digits[i] = j;
                        v[flatten(&digits, &dims)] += c;
                    }
                }
            }
            if !is_zero_vec(&v) {
                out.add_bracket(&[fx, fy], &v)?;
            }
        }
    }
    Ok(out.mark_certified())
}

/// Matrix of `x ↦ [x, y₁, …, y_{n−1}]`.
pub fn ad(a: &NLeibnizAlgebra, ys: &[Vector]) -> Matrix {
    assert_eq!(ys.len() + 1, a.arity, "ad needs n-1 vectors");
    let cols: Vec<Vector> = (0..a.dim)
        .map(|j| {
            let mut xs = vec![basis_vec(a.dim, j, a.mode)];
            xs.extend(ys.iter().cloned());
            a.bracket(&xs)
        })
        .collect();
    let mode = cols.iter().flatten().fold(a.mode, |m, s| crate::tensor::join_mode(m, s.mode()));
    Matrix::from_columns(&cols, a.dim, mode)
}

/// Checks `D[x₁,…,x_n] = Σ_i [x₁,…,D x_i,…,x_n]` on basis tuples.
pub fn is_derivation(a: &NLeibnizAlgebra, dmap: &Matrix) -> VerificationReport {
    let mut report = VerificationReport::new(subject(a));
    report.run("derivation", || {
        if dmap.rows() != a.dim || dmap.cols() != a.dim {
            return Some(Witness::new(vec![], "map does not match the algebra's dimension"));
        }
        let n = a.arity;
        let table = a.table();
        let dims = vec![a.dim; n];
        let sides = |f: usize| {
            let t = unflatten(f, &dims);
            let lhs = dmap.apply(table.at(&t));
            let mut rhs = zero_vec(a.dim, a.mode);
            for i in 0..n {
                let term = table.with_vec(&t, i, &dmap.column(t[i]));
                rhs = add_vec(&rhs, &term);
            }
            (t, lhs, rhs)
        };
        (0..a.dim.pow(n as u32))
            .into_par_iter()
            .find_first(|&f| {
                let (_, l, r) = sides(f);
                !vec_eq(&l, &r)
            })
            .map(|f| {
                let (t, l, r) = sides(f);
                Witness::new(t, format!("D[x] = {} but sum = {}", show_vec(&l), show_vec(&r)))
            })
    });
    report
}

/// `exp(M)`: an exact finite sum when `M` is nilpotent, otherwise a
/// truncated float series.
pub fn exp_matrix(m: &Matrix, mode: ScalarMode) -> Result<Matrix> {
    let d = m.rows();
    match mode {
        ScalarMode::Exact => {
            let mut powers = vec![Matrix::identity(d, mode)];
            for _ in 0..d {
                let next = powers.last().expect("nonempty").mul(m);
                powers.push(next);
            }
            if !powers[d].is_zero() {
                return Err(Error::NotNilpotent(format!("M^{d} != 0")));
            }
            let mut acc = Matrix::zero(d, d, mode);
            let mut fact = Scalar::one(mode);
            for (k, p) in powers[..d.max(1)].iter().enumerate() {
                if k > 0 {
                    fact = &fact * &Scalar::int(k as i64, mode);
                }
                acc = acc.add(&p.scale(&fact.checked_inv().expect("k! != 0")));
            }
            Ok(acc)
        }
        ScalarMode::Float => {
            let mf = Matrix::from_rows((0..d).map(|i| (0..d).map(|j| m.get(i, j).to_mode(mode)).collect()).collect())?;
            let mf = if d == 0 { Matrix::zero(0, 0, mode) } else { mf };
            let mut acc = Matrix::identity(d, mode);
            let mut term = Matrix::identity(d, mode);
            for k in 1..=EXP_MAX_TERMS {
                term = term.mul(&mf).scale(&Scalar::Float(1.0 / k as f64));
                if term.max_abs() < EXP_TERM_TOL {
                    return Ok(acc);
                }
                acc = acc.add(&term);
            }
            Err(Error::SeriesNotConverged(EXP_MAX_TERMS))
        }
    }
}

/// `exp(ad_{y₁,…,y_{n−1}})`.
pub fn exp_ad(a: &NLeibnizAlgebra, ys: &[Vector], mode: ScalarMode) -> Result<Matrix> {
    exp_matrix(&ad(a, ys), mode)
}

/// An n-Leibniz algebra with a distinguished central element `𝟏`.
#[derive(Clone, Debug)]
pub struct CentralNLeibnizAlgebra {
    algebra: NLeibnizAlgebra,
    central: Vector,
}

impl CentralNLeibnizAlgebra {
    /// Checks that `central` kills the bracket in every slot.
    pub fn new(algebra: NLeibnizAlgebra, central: Vector) -> Result<Self> {
        if central.len() != algebra.dim {
            return Err(Error::ShapeMismatch("central element has the wrong length".into()));
        }
        if let Some(w) = centrality_witness(&algebra, &central) {
            return Err(Error::NotCentral(w));
        }
        Ok(CentralNLeibnizAlgebra { algebra, central })
    }

    pub fn algebra(&self) -> &NLeibnizAlgebra {
        &self.algebra
    }

    pub fn central(&self) -> &Vector {
        &self.central
    }

    /// The fundamental Leibniz algebra with central element `𝟏^{⊗(n−1)}`.
    pub fn fundamental(&self) -> Result<CentralNLeibnizAlgebra> {
        let f = fundamental_leibniz(&self.algebra)?;
        let one = tensor_vecs(&vec![self.central.clone(); self.algebra.arity - 1]);
        CentralNLeibnizAlgebra::new(f, one)
    }

    /// The op-reversed (left) algebra with the same central element.
    pub fn reversed(&self) -> CentralNLeibnizAlgebra {
        CentralNLeibnizAlgebra { algebra: self.algebra.reversed(), central: self.central.clone() }
    }
}

/// First slot/filling where `z` fails to kill the bracket.
fn centrality_witness(a: &NLeibnizAlgebra, z: &[Scalar]) -> Option<Witness> {
    let n = a.arity;
    let table = a.table();
    let dims = vec![a.dim; n - 1];
    for slot in 0..n {
        for f in 0..a.dim.pow((n - 1) as u32) {
            let others = unflatten(f, &dims);
            let mut ins = others.clone();
            ins.insert(slot, 0);
            let v = table.with_vec(&ins, slot, z);
            if !is_zero_vec(&v) {
                return Some(Witness::new(ins, format!("central element in slot {slot} gives {}", show_vec(&v))));
            }
        }
    }
    None
}

pub fn is_central(a: &NLeibnizAlgebra, z: &[Scalar]) -> bool {
    centrality_witness(a, z).is_none()
}

/// `k ⊕ L` with `⟦(λ₁,x₁),…,(λ_n,x_n)⟧ = (0,[x₁,…,x_n])` and central
/// element `(1,0)`. Basis index 0 is the unit; `e_i` becomes index `i+1`.
pub fn adjoin_unit(a: &NLeibnizAlgebra) -> Result<CentralNLeibnizAlgebra> {
    a.require_certified()?;
    let out = unit_extension_unchecked(a)?;
    let d = out.dim;
    CentralNLeibnizAlgebra::new(out.mark_certified(), basis_vec(d, 0, a.mode))
}

/// The `k ⊕ L` bracket without certifying `a` first.
pub(crate) fn unit_extension_unchecked(a: &NLeibnizAlgebra) -> Result<NLeibnizAlgebra> {
    let d = a.dim + 1;
    let mut out = NLeibnizAlgebra::zero(a.arity, d, a.mode)?;
    out.side = a.side;
    for (ins, v) in &a.bracket {
        let shifted: Vec<usize> = ins.iter().map(|i| i + 1).collect();
        let mut w = zero_vec(d, a.mode);
        w[1..].clone_from_slice(v);
        out.add_bracket(&shifted, &w)?;
    }
    Ok(out)
}

/// Basis of the center `{z : z in any slot kills the bracket}`.
pub fn central_elements(a: &NLeibnizAlgebra) -> Vec<Vector> {
    let n = a.arity;
    let table = a.table();
    let dims = vec![a.dim; n - 1];
    let mut rows: Vec<Vector> = Vec::new();
    for slot in 0..n {
        for f in 0..a.dim.pow((n - 1) as u32) {
            let mut ins = unflatten(f, &dims);
            ins.insert(slot, 0);
            // Row j: coefficient of z_k in the j-th output coordinate.
            let mut block = vec![zero_vec(a.dim, a.mode); a.dim];
            #[allow(clippy::needless_range_loop)]
            for k in 0..a.dim {
                ins[slot] = k;
                for (j, c) in table.at(&ins).iter().enumerate() {
                    block[j][k] = c.clone();
                }
            }
            rows.extend(block.into_iter().filter(|r| !is_zero_vec(r)));
        }
    }
    if rows.is_empty() {
        return (0..a.dim).map(|i| basis_vec(a.dim, i, a.mode)).collect();
    }
    Matrix::from_rows(rows).expect("rectangular").nullspace()
}

/// Checks `φ[x₁,…,x_n] = [φx₁,…,φx_n]′` on basis tuples and, when it holds,
/// that `φ ∘ exp(ad_y) = exp(ad_{φy}) ∘ φ` for basis `(n−1)`-tuples `y`.
pub fn is_homomorphism(a: &NLeibnizAlgebra, b: &NLeibnizAlgebra, phi: &Matrix) -> VerificationReport {
    let mut report = VerificationReport::new(format!("hom {} -> {}", subject(a), subject(b)));
    if a.arity != b.arity || phi.cols() != a.dim || phi.rows() != b.dim {
        report.run("bracket_preserved", || Some(Witness::new(vec![], "arities or dimensions do not match")));
        return report;
    }
    let n = a.arity;
    let dims = vec![a.dim; n];
    let sides = |f: usize| {
        let t = unflatten(f, &dims);
        let lhs = phi.apply(&a.basis_bracket(&t));
        let imgs: Vec<Vector> = t.iter().map(|&i| phi.column(i)).collect();
        (t, lhs, b.bracket(&imgs))
    };
    report.run("bracket_preserved", || {
        (0..a.dim.pow(n as u32))
            .find(|&f| {
                let (_, l, r) = sides(f);
                !vec_eq(&l, &r)
            })
            .map(|f| {
                let (t, l, r) = sides(f);
                Witness::new(t, format!("phi[x] = {} but [phi x] = {}", show_vec(&l), show_vec(&r)))
            })
    });
    if !report.passed() {
        report.skip("exp_ad_commutes", "bracket not preserved");
        return report;
    }
    let ydims = vec![a.dim; n - 1];
    let mut exps = Vec::new();
    for f in 0..a.dim.pow((n - 1) as u32) {
        let yt = unflatten(f, &ydims);
        let ys: Vec<Vector> = yt.iter().map(|&i| basis_vec(a.dim, i, a.mode)).collect();
        let phys: Vec<Vector> = yt.iter().map(|&i| phi.column(i)).collect();
        match (exp_ad(a, &ys, a.mode), exp_ad(b, &phys, a.mode)) {
            (Ok(ea), Ok(eb)) => exps.push((yt, ea, eb)),
            (Err(e), _) | (_, Err(e)) => {
                report.skip("exp_ad_commutes", format!("exponential not computable: {e}"));
                return report;
            }
        }
    }
    report.run("exp_ad_commutes", || {
        exps.iter()
            .find(|(_, ea, eb)| phi.mul(ea) != eb.mul(phi))
            .map(|(yt, _, _)| Witness::new(yt.clone(), "phi o exp(ad_y) != exp(ad_phi(y)) o phi"))
    });
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::in_span;
    use crate::samples::{heisenberg, nilpotent_ternary, scaling_leibniz};
    use proptest::prelude::*;

    const EX: ScalarMode = ScalarMode::Exact;

    fn q(p: i64) -> Scalar {
        Scalar::int(p, EX)
    }

    fn e(d: usize, i: usize) -> Vector {
        basis_vec(d, i, EX)
    }

    /// Independent oracle: evaluates both sides with the multilinear
    /// `bracket` on basis vectors and returns the first bad tuple.
    fn naive_violation(a: &NLeibnizAlgebra) -> Option<Vec<usize>> {
        let (n, d) = (a.arity(), a.dim());
        let dims = vec![d; 2 * n - 1];
        (0..d.pow((2 * n - 1) as u32)).map(|f| unflatten(f, &dims)).find(|t| {
            let xs: Vec<Vector> = t[..n].iter().map(|&i| e(d, i)).collect();
            let ys: Vec<Vector> = t[n..].iter().map(|&i| e(d, i)).collect();
            let mut outer = vec![a.bracket(&xs)];
            outer.extend(ys.iter().cloned());
            let lhs = a.bracket(&outer);
            let mut rhs = zero_vec(d, EX);
            for i in 0..n {
                let mut inner = vec![xs[i].clone()];
                inner.extend(ys.iter().cloned());
                let mut args = xs.clone();
                args[i] = a.bracket(&inner);
                rhs = add_vec(&rhs, &a.bracket(&args));
            }
            !vec_eq(&lhs, &rhs)
        })
    }

    /// `[e₀,e₂,e₂] = e₀` on top of the nilpotent ternary bracket.
    fn perturbed_ternary() -> NLeibnizAlgebra {
        let mut a = nilpotent_ternary();
        a.add_term(&[0, 2, 2], 0, q(1)).unwrap();
        a
    }

    #[test]
    fn swapping_perturbation_is_still_ternary_leibniz() {
        // [e₂,e₁,e₁] = e₀ makes ad_(e₁,e₁) swap e₀ and e₂, still a derivation.
        let mut a = nilpotent_ternary();
        a.add_term(&[2, 1, 1], 0, q(1)).unwrap();
        assert!(check_fundamental_identity(&a).passed());
        assert!(naive_violation(&a).is_none());
    }

    #[test]
    fn zero_bracket_satisfies_identity() {
        for (n, d) in [(2, 3), (3, 2), (4, 2)] {
            assert!(check_fundamental_identity(&NLeibnizAlgebra::zero(n, d, EX).unwrap()).passed());
        }
    }

    #[test]
    fn nilpotent_ternary_passes_and_perturbation_fails() {
        assert!(check_fundamental_identity(&nilpotent_ternary()).passed());
        let bad = perturbed_ternary();
        let report = check_fundamental_identity(&bad);
        assert!(!report.passed());
        let w = report.first_witness().unwrap();
        assert_eq!(w.tuple, vec![0, 0, 2, 1, 1]);
        assert_eq!(Some(w.tuple.clone()), naive_violation(&bad));
    }

    #[test]
    fn nested_bracket_examples() {
        let zero = NLeibnizAlgebra::zero(2, 2, EX).unwrap();
        assert!(nbracket_from_leibniz(&zero, 4).unwrap().is_zero());
        let h3 = nbracket_from_leibniz(&heisenberg(), 3).unwrap();
        assert!(h3.is_zero());
        let same = nbracket_from_leibniz(&heisenberg(), 2).unwrap();
        assert_eq!(same.entries().collect::<Vec<_>>(), heisenberg().entries().collect::<Vec<_>>());
        let mut bad = NLeibnizAlgebra::zero(2, 1, EX).unwrap();
        bad.add_term(&[0, 0], 0, q(1)).unwrap();
        assert!(matches!(nbracket_from_leibniz(&bad, 3), Err(Error::InputNotLeibniz(_))));
    }

    #[test]
    fn nested_bracket_of_a_nonnilpotent_algebra_is_certified() {
        let l = scaling_leibniz(EX);
        let a = nbracket_from_leibniz(&l, 3).unwrap();
        // {e0,{e1,e1}} = 0 and {e0,{e0,e1}} = {e0,e0} = 0, but
        // {e0,{e1,...}} vanishes too, so only the inner e1-chains survive.
        assert!(check_fundamental_identity(&a).passed());
        assert!(naive_violation(&a).is_none());
    }

    #[test]
    fn extension_examples() {
        let l = heisenberg();
        let zero = NLeibnizAlgebra::zero(2, 3, EX).unwrap();
        assert!(extend_bracket_by_leibniz(&l, &zero).unwrap().is_zero());
        let ext = extend_bracket_by_leibniz(&l, &l).unwrap();
        assert_eq!(ext.arity(), 3);
        assert!(ext.is_zero());
        // {-, e1} maps e0 to e2; a bracket with [e0,e0] = e0 is not
        // preserved by it.
        let mut b = heisenberg();
        b.add_term(&[0, 0], 0, q(1)).unwrap();
        match extend_bracket_by_leibniz(&l, &b) {
            Err(Error::DerivationPreconditionFailed(w)) => assert_eq!(w.tuple[0], 1),
            other => panic!("expected precondition failure, got {other:?}"),
        }
    }

    #[test]
    fn fundamental_leibniz_of_nilpotent_ternary() {
        let f = fundamental_leibniz(&nilpotent_ternary()).unwrap();
        assert_eq!((f.arity(), f.dim()), (2, 9));
        // e0⊗e1 = 1, e1⊗e1 = 4, e2⊗e1 = 7, e1⊗e0 = 3, e1⊗e2 = 5.
        assert_eq!(f.basis_bracket(&[1, 4]), e(9, 7));
        assert_eq!(f.basis_bracket(&[3, 4]), e(9, 5));
        assert!(check_fundamental_identity(&f).passed());
        let z = fundamental_leibniz(&NLeibnizAlgebra::zero(3, 2, EX).unwrap().certify().unwrap());
        assert!(z.unwrap().is_zero());
    }

    #[test]
    fn fundamental_leibniz_rejects_uncertified() {
        assert!(matches!(fundamental_leibniz(&perturbed_ternary()), Err(Error::InputNotCertified(_))));
    }

    #[test]
    fn adjoint_and_derivations() {
        let t = nilpotent_ternary();
        let m = ad(&t, &[e(3, 1), e(3, 1)]);
        assert_eq!(m.column(0), e(3, 2));
        assert_eq!(m.column(1), zero_vec(3, EX));
        assert_eq!(m.column(2), zero_vec(3, EX));
        assert!(is_derivation(&t, &m).passed());
        assert!(is_derivation(&t, &Matrix::zero(3, 3, EX)).passed());
        let id = is_derivation(&t, &Matrix::identity(3, EX));
        let w = id.first_witness().unwrap();
        assert_eq!(w.tuple, vec![0, 1, 1]);
        assert!(w.detail.contains("3/1"), "{}", w.detail);
        let z = NLeibnizAlgebra::zero(3, 3, EX).unwrap();
        assert!(ad(&z, &[e(3, 0), e(3, 2)]).is_zero());
    }

    #[test]
    fn exponentials() {
        let t = nilpotent_ternary();
        let x = exp_ad(&t, &[e(3, 1), e(3, 1)], EX).unwrap();
        let mut want = Matrix::identity(3, EX);
        want.set(2, 0, q(1));
        assert_eq!(x, want);
        assert_eq!(exp_ad(&t, &[e(3, 2), e(3, 0)], EX).unwrap(), Matrix::identity(3, EX));

        let l = scaling_leibniz(EX);
        assert!(matches!(exp_ad(&l, &[e(2, 1)], EX), Err(Error::NotNilpotent(_))));
        let fl =
            exp_ad(&l.to_mode(ScalarMode::Float), &[basis_vec(2, 1, ScalarMode::Float)], ScalarMode::Float).unwrap();
        assert!((fl.get(0, 0).to_f64() - std::f64::consts::E).abs() < 1e-9);
        assert!((fl.get(1, 1).to_f64() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn float_series_gives_up_on_huge_adjoints() {
        let mut l = NLeibnizAlgebra::zero(2, 2, ScalarMode::Float).unwrap();
        l.add_term(&[0, 1], 0, Scalar::Float(1.0)).unwrap();
        let big = vec![Scalar::Float(0.0), Scalar::Float(100.0)];
        assert!(matches!(exp_ad(&l, &[big], ScalarMode::Float), Err(Error::SeriesNotConverged(64))));
    }

    #[test]
    fn unit_adjunction() {
        let zero = NLeibnizAlgebra::zero(3, 2, EX).unwrap().certify().unwrap();
        let cz = adjoin_unit(&zero).unwrap();
        assert_eq!(cz.algebra().dim(), 3);
        assert!(cz.algebra().is_zero());

        let tb = adjoin_unit(&nilpotent_ternary()).unwrap();
        assert_eq!(tb.algebra().dim(), 4);
        assert_eq!(tb.algebra().basis_bracket(&[1, 2, 2]), e(4, 3));
        assert_eq!(tb.central(), &e(4, 0));
        assert!(is_central(tb.algebra(), &e(4, 0)));
        assert!(check_fundamental_identity(tb.algebra()).passed());
        assert!(matches!(adjoin_unit(&perturbed_ternary()), Err(Error::InputNotCertified(_))));
    }

    #[test]
    fn centers() {
        let zero = NLeibnizAlgebra::zero(2, 3, EX).unwrap();
        assert_eq!(central_elements(&zero).len(), 3);
        let tb = adjoin_unit(&nilpotent_ternary()).unwrap();
        let c = central_elements(tb.algebra());
        assert!(in_span(&c, &e(4, 0)));
        assert!(in_span(&c, &e(4, 3)));
        assert!(!in_span(&c, &e(4, 1)));
        let ct = central_elements(&nilpotent_ternary());
        assert_eq!(ct.len(), 1);
        assert!(in_span(&ct, &e(3, 2)));
        assert!(matches!(CentralNLeibnizAlgebra::new(nilpotent_ternary(), e(3, 1)), Err(Error::NotCentral(_))));
    }

    #[test]
    fn homomorphisms() {
        let t = nilpotent_ternary();
        let r = is_homomorphism(&t, &t, &Matrix::identity(3, EX));
        assert!(r.passed());
        assert_eq!(r.check("exp_ad_commutes").unwrap().status, crate::Status::Pass);
        let z = NLeibnizAlgebra::zero(3, 2, EX).unwrap();
        assert!(is_homomorphism(&t, &z, &Matrix::zero(2, 3, EX)).passed());
        let mut swap = Matrix::zero(3, 3, EX);
        swap.set(0, 1, q(1));
        swap.set(1, 0, q(1));
        swap.set(2, 2, q(1));
        let bad = is_homomorphism(&t, &t, &swap);
        assert_eq!(bad.first_witness().unwrap().tuple, vec![0, 1, 1]);
    }

    #[test]
    fn lemma_check_is_skipped_when_exp_is_not_computable() {
        let l = scaling_leibniz(EX);
        let r = is_homomorphism(&l, &l, &Matrix::identity(2, EX));
        assert!(r.passed());
        assert_eq!(r.check("exp_ad_commutes").unwrap().status, crate::Status::Skipped);
    }

    #[test]
    fn left_algebras_are_checked_through_reversal() {
        let left = nilpotent_ternary().reversed();
        assert_eq!(left.side(), Side::Left);
        assert!(check_fundamental_identity(&left).passed());
        assert!(!check_fundamental_identity(&perturbed_ternary().reversed()).passed());
    }

    /// Brackets whose outputs land on the last basis vector, which never
    /// appears as an input: both sides of the identity vanish.
    fn two_step(n: usize, d: usize, coeffs: &[i64]) -> NLeibnizAlgebra {
        crate::samples::two_step(n, d, coeffs)
    }

    fn sparse_bracket(n: usize, d: usize, terms: &[(usize, usize, i64)]) -> NLeibnizAlgebra {
        let mut a = NLeibnizAlgebra::zero(n, d, EX).unwrap();
        let dims = vec![d; n];
        for &(f, out, c) in terms {
            a.add_term(&unflatten(f % d.pow(n as u32), &dims), out % d, q(c)).unwrap();
        }
        a
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn identity_check_agrees_with_naive_oracle(
            n in 2usize..=3, d in 1usize..=3,
            terms in prop::collection::vec((0usize..27, 0usize..3, -2i64..=2), 0..4),
        ) {
            let a = sparse_bracket(n, d, &terms);
            let report = check_fundamental_identity(&a);
            let naive = naive_violation(&a);
            prop_assert_eq!(report.passed(), naive.is_none());
            if let Some(t) = naive {
                prop_assert_eq!(&report.first_witness().unwrap().tuple, &t);
            }
        }

        #[test]
        fn adjoints_of_certified_algebras_are_derivations(
            n in 2usize..=3, d in 2usize..=3,
            coeffs in prop::collection::vec(-3i64..=3, 8),
            y in prop::collection::vec(0usize..3, 2),
        ) {
            let a = two_step(n, d, &coeffs).certify().unwrap();
            let ys: Vec<Vector> = y[..n - 1].iter().map(|&i| e(d, i % d)).collect();
            prop_assert!(is_derivation(&a, &ad(&a, &ys)).passed());
        }

        #[test]
        fn exp_of_minus_ad_inverts(
            coeffs in prop::collection::vec(-3i64..=3, 8),
            y in prop::collection::vec(-2i64..=2, 6),
        ) {
            let a = two_step(3, 3, &coeffs).certify().unwrap();
            let ys = vec![y[..3].iter().map(|&c| q(c)).collect::<Vector>(),
                          y[3..].iter().map(|&c| q(c)).collect::<Vector>()];
            let m = ad(&a, &ys);
            let fwd = exp_matrix(&m, EX).unwrap();
            let back = exp_matrix(&m.scale(&q(-1)), EX).unwrap();
            prop_assert_eq!(fwd.mul(&back), Matrix::identity(3, EX));
        }

        #[test]
        fn nested_then_fundamental_is_certified(
            c in -2i64..=2, n in 2usize..=4,
        ) {
            let mut l = heisenberg();
            l.add_term(&[1, 0], 2, q(c)).unwrap();
            let l = l.certify().unwrap();
            let a = nbracket_from_leibniz(&l, n).unwrap();
            let f = fundamental_leibniz(&a).unwrap();
            prop_assert!(check_fundamental_identity(&f).passed());
        }

        #[test]
        fn central_tensor_power_is_central(coeffs in prop::collection::vec(-2i64..=2, 8)) {
            let a = two_step(3, 3, &coeffs).certify().unwrap();
            let cl = adjoin_unit(&a).unwrap();
            let f = cl.fundamental().unwrap();
            let center = central_elements(f.algebra());
            prop_assert!(in_span(&center, f.central()));
        }
    }
}
