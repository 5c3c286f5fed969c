//! Small dense vectors and matrices for algebra-side linear maps.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarMode};
use crate::tensor::{row_reduce, SparseVec, TensorOperator, TensorShape};

pub type Vector = Vec<Scalar>;

pub fn zero_vec(d: usize, mode: ScalarMode) -> Vector {
    vec![Scalar::zero(mode); d]
}

pub fn basis_vec(d: usize, i: usize, mode: ScalarMode) -> Vector {
    let mut v = zero_vec(d, mode);
    v[i] = Scalar::one(mode);
    v
}

pub fn add_vec(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(c: &Scalar, a: &[Scalar]) -> Vector {
    a.iter().map(|x| c * x).collect()
}

pub fn is_zero_vec(a: &[Scalar]) -> bool {
    a.iter().all(Scalar::is_negligible)
}

pub fn vec_eq(a: &[Scalar], b: &[Scalar]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y)
}

/// Human-readable vector, e.g. `[1/1, 0/1, 2/1]`.
pub fn show_vec(a: &[Scalar]) -> String {
    let parts: Vec<String> = a.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

pub fn to_sparse(a: &[Scalar]) -> SparseVec {
    a.iter().enumerate().map(|(i, s)| (i, s.clone())).collect()
}

pub fn from_sparse(v: &SparseVec, d: usize, mode: ScalarMode) -> Vector {
    let mut out = zero_vec(d, mode);
    for (i, s) in v.iter() {
        out[i] = s.clone();
    }
    out
}

/// Tensor product of vectors, row-major.
pub fn tensor_vecs(vs: &[Vector]) -> Vector {
    vs.iter().fold(vec![Scalar::one(ScalarMode::Exact)], |acc, v| {
        acc.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect()
    })
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    mode: ScalarMode,
    data: Vec<Scalar>,
}

/// A linear endomorphism of an algebra's underlying space.
pub type LinearMapOnAlgebra = Matrix;

impl Matrix {
    pub fn zero(rows: usize, cols: usize, mode: ScalarMode) -> Self {
        Matrix { rows, cols, mode, data: vec![Scalar::zero(mode); rows * cols] }
    }

    pub fn identity(d: usize, mode: ScalarMode) -> Self {
        let mut m = Self::zero(d, d, mode);
        for i in 0..d {
            m.data[i * d + i] = Scalar::one(mode);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged matrix rows".into()));
        }
        let mode =
            rows.iter().flatten().map(Scalar::mode).find(|m| *m == ScalarMode::Float).unwrap_or(ScalarMode::Exact);
        Ok(Matrix { rows: r, cols: c, mode, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(cols: &[Vector], rows: usize, mode: ScalarMode) -> Self {
        let mut m = Self::zero(rows, cols.len(), mode);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.data[i * cols.len() + j] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mode(&self) -> ScalarMode {
        self.mode
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn apply(&self, v: &[Scalar]) -> Vector {
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero(self.mode);
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mode = crate::tensor::join_mode(self.mode, other.mode);
        let mut out = Matrix::zero(self.rows, other.cols, mode);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix { data, mode: crate::tensor::join_mode(self.mode, other.mode), ..*self }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        let data: Vec<Scalar> = self.data.iter().map(|a| c * a).collect();
        Matrix { data, mode: crate::tensor::join_mode(self.mode, c.mode()), ..*self }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_negligible)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::abs_f64).fold(0.0, f64::max)
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = Matrix::zero(r, c, crate::tensor::join_mode(self.mode, other.mode));
        for i in 0..r {
            for j in 0..c {
                out.data[i * c + j] =
                    self.get(i / other.rows, j / other.cols) * other.get(i % other.rows, j % other.cols);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        row_reduce(self.sparse_rows(), self.cols).0
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut rows = self.sparse_rows();
        for (i, row) in rows.iter_mut().enumerate() {
            row.insert(n + i, Scalar::one(self.mode));
        }
        let (rank, reduced) = row_reduce(rows, n);
        if rank < n {
            return Err(Error::SingularMatrix);
        }
        let mut out = Matrix::zero(n, n, self.mode);
        for (i, row) in reduced.into_iter().enumerate() {
            for (c, v) in row {
                if c >= n {
                    out.data[i * n + c - n] = v;
                }
            }
        }
        Ok(out)
    }

    /// Basis of `{x : Mx = 0}`.
    pub fn nullspace(&self) -> Vec<Vector> {
        let (rank, reduced) = row_reduce(self.sparse_rows(), self.cols);
        let pivots: Vec<usize> =
            reduced[..rank].iter().map(|row| *row.keys().next().expect("pivot row is nonempty")).collect();
        (0..self.cols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = zero_vec(self.cols, self.mode);
                v[free] = Scalar::one(self.mode);
                for (row, &p) in reduced[..rank].iter().zip(&pivots) {
                    if let Some(x) = row.get(&free) {
                        v[p] = -x;
                    }
                }
                v
            })
            .collect()
    }

    fn sparse_rows(&self) -> Vec<BTreeMap<usize, Scalar>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).filter(|&j| !self.get(i, j).is_zero()).map(|j| (j, self.get(i, j).clone())).collect()
            })
            .collect()
    }

    pub fn to_operator(&self) -> TensorOperator {
        let dom = TensorShape::new(vec![self.cols]).expect("small");
        let cod = TensorShape::new(vec![self.rows]).expect("small");
        TensorOperator::from_fn(dom, cod, self.mode, |j| to_sparse(&self.column(j)))
    }

    pub fn from_operator(op: &TensorOperator) -> Matrix {
        let (r, c) = (op.codomain().total(), op.domain().total());
        let mut m = Matrix::zero(r, c, op.mode());
        for (i, j, v) in op.entries() {
            m.data[i * c + j] = v;
        }
        m
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<Scalar> = (0..self.cols).map(|j| self.get(i, j).clone()).collect();
            writeln!(f, "  {}", show_vec(&row))?;
        }
        Ok(())
    }
}

/// True if `v` lies in the span of `basis`.
pub fn in_span(basis: &[Vector], v: &[Scalar]) -> bool {
    if basis.is_empty() {
        return is_zero_vec(v);
    }
    let mode = v.first().map_or(ScalarMode::Exact, Scalar::mode);
    let m = Matrix::from_columns(basis, v.len(), mode);
    let mut ext = basis.to_vec();
    ext.push(v.to_vec());
    Matrix::from_columns(&ext, v.len(), mode).rank() == m.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX: ScalarMode = ScalarMode::Exact;

    fn q(p: i64) -> Scalar {
        Scalar::int(p, EX)
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_rows(vec![vec![q(2), q(1)], vec![q(1), q(1)]]).unwrap();
        let mi = m.inverse().unwrap();
        assert_eq!(m.mul(&mi), Matrix::identity(2, EX));
        let s = Matrix::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(4)]]).unwrap();
        assert!(matches!(s.inverse(), Err(Error::SingularMatrix)));
    }

    #[test]
    fn nullspace_spans_kernel() {
        let m = Matrix::from_rows(vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]]).unwrap();
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(is_zero_vec(&m.apply(v)));
        }
        assert!(in_span(&ns, &[q(-2), q(1), q(0)]));
        assert!(!in_span(&ns, &[q(1), q(0), q(0)]));
    }

    #[test]
    fn kron_of_identities() {
        let a = Matrix::identity(2, EX);
        assert_eq!(a.kron(&a), Matrix::identity(4, EX));
    }

    #[test]
    fn tensor_of_vectors() {
        let t = tensor_vecs(&[vec![q(1), q(2)], vec![q(3), q(4)]]);
        assert_eq!(t, vec![q(3), q(4), q(6), q(8)]);
    }
}
