//! Dense complex linear algebra shared by every other module.
//!
//! Vectors and matrices are plain `nalgebra` containers over `Complex64`.
//! Multi-party spaces use the Kronecker convention: party 0 is the most
//! significant digit of a basis index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexVector = DVector<C64>;
pub type ComplexMatrix = DMatrix<C64>;

const HERMITIAN_TOL: f64 = 1e-12;

/// Numerical thresholds used across verification routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `|<u|v>|` at or below this counts as orthogonal (unit vectors).
    pub orth_tol: f64,
    /// Relative singular-value threshold for rank decisions.
    pub rank_tol: f64,
    /// Eigenvalues above `-psd_tol` count as non-negative.
    pub psd_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            orth_tol: 1e-9,
            rank_tol: 1e-9,
            psd_tol: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn new(orth_tol: f64, rank_tol: f64, psd_tol: f64) -> Result<Self> {
        for (name, v) in [("orth_tol", orth_tol), ("rank_tol", rank_tol), ("psd_tol", psd_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Invalid(format!("{name} must be strictly positive, got {v}")));
            }
        }
        Ok(Tolerances {
            orth_tol,
            rank_tol,
            psd_tol,
        })
    }

    /// Same threshold for all three checks.
    pub fn uniform(tol: f64) -> Result<Self> {
        Self::new(tol, tol, tol)
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real_vector(entries: &[f64]) -> ComplexVector {
    DVector::from_iterator(entries.len(), entries.iter().map(|&x| c(x, 0.0)))
}

pub fn basis_vector(dim: usize, k: usize) -> ComplexVector {
    let mut v = DVector::zeros(dim);
    v[k] = c(1.0, 0.0);
    v
}

/// `<a|b>`, conjugate-linear in the first argument.
pub fn inner(a: &ComplexVector, b: &ComplexVector) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &ComplexVector) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(v: &ComplexVector) -> Option<ComplexVector> {
    let n = norm(v);
    if n > 0.0 && n.is_finite() {
        Some(v.map(|x| x / n))
    } else {
        None
    }
}

/// `|v><v|`.
pub fn outer(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    let mut out = DVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

pub fn kron_all(factors: &[ComplexVector]) -> ComplexVector {
    let mut acc = DVector::from_element(1, c(1.0, 0.0));
    for f in factors {
        acc = kron_vec(&acc, f);
    }
    acc
}

/// Rotate `v` so its largest-magnitude entry (lowest index on ties) is real
/// and positive.
pub fn fix_phase(v: &mut ComplexVector) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, x) in v.iter().enumerate() {
        let m = x.norm();
        if m > best_mag * (1.0 + 1e-12) + 1e-15 {
            best = i;
            best_mag = m;
        }
    }
    if best_mag > 0.0 {
        let phase = v[best].conj() / best_mag;
        v.iter_mut().for_each(|x| *x *= phase);
        v[best] = c(v[best].re, 0.0);
    }
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn max_hermitian_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn is_hermitian(m: &ComplexMatrix) -> bool {
    max_hermitian_deviation(m) <= HERMITIAN_TOL * max_abs(m).max(1.0)
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: Vec<ComplexVector>,
}

impl HermitianEig {
    pub fn max(&self) -> (f64, &ComplexVector) {
        let last = self.values.len() - 1;
        (self.values[last], &self.vectors[last])
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if !is_hermitian(m) {
        return Err(Error::NonHermitian {
            deviation: max_hermitian_deviation(m),
        });
    }
    let n = m.nrows();
    // Symmetrize exactly so the solver sees a Hermitian input.
    let sym = (m + m.adjoint()).map(|x| x * 0.5);
    let eig = sym
        .try_symmetric_eigen(1e-15, 10_000)
        .ok_or_else(|| Error::Invalid("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut v: ComplexVector = eig.eigenvectors.column(k).into_owned();
            fix_phase(&mut v);
            v
        })
        .collect();
    Ok(HermitianEig { values, vectors })
}

fn check_shared_dim(vectors: &[ComplexVector]) -> Result<usize> {
    let dim = vectors.first().map(|v| v.len()).unwrap_or(0);
    if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "vectors of dimension {dim} and {} mixed",
            bad.len()
        )));
    }
    Ok(dim)
}

/// Numerical rank of the matrix whose columns are `vectors`.
pub fn rank_of(vectors: &[ComplexVector], tol: &Tolerances) -> Result<usize> {
    let dim = check_shared_dim(vectors)?;
    if vectors.is_empty() || dim == 0 {
        return Ok(0);
    }
    let stacked = DMatrix::from_columns(vectors);
    let sv = stacked.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol.rank_tol * top).count())
}

/// Incrementally built orthonormal basis of a subspace of `C^dim`.
#[derive(Debug, Clone)]
pub struct Span {
    dim: usize,
    basis: Vec<ComplexVector>,
    tol: f64,
}

impl Span {
    pub fn new(dim: usize, tol: f64) -> Self {
        Span {
            dim,
            basis: Vec::new(),
            tol,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.dim
    }

    pub fn basis(&self) -> &[ComplexVector] {
        &self.basis
    }

    /// Component of `v` orthogonal to the span (two Gram-Schmidt passes).
    pub fn residual(&self, v: &ComplexVector) -> ComplexVector {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let proj = inner(b, &r);
                r -= b * proj;
            }
        }
        r
    }

    pub fn contains(&self, v: &ComplexVector) -> bool {
        norm(&self.residual(v)) <= self.tol * norm(v).max(f64::MIN_POSITIVE)
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn push(&mut self, v: &ComplexVector) -> bool {
        let scale = norm(v);
        if scale == 0.0 {
            return false;
        }
        let r = self.residual(v);
        let rn = norm(&r);
        if rn <= self.tol * scale {
            return false;
        }
        self.basis.push(r / C64::new(rn, 0.0));
        true
    }

    /// First unit vector orthogonal to the span, obtained by orthonormalizing
    /// the standard basis in order. `None` when the span is everything.
    pub fn complement_vector(&self) -> Option<ComplexVector> {
        let mut work = self.clone();
        work.tol = 1e-6;
        for k in 0..self.dim {
            let e = basis_vector(self.dim, k);
            let r = work.residual(&e);
            let rn = norm(&r);
            if rn > 1e-6 {
                let mut w = r / C64::new(rn, 0.0);
                fix_phase(&mut w);
                return Some(w);
            }
        }
        None
    }
}

fn check_square(rho: &ComplexMatrix, dims: &[usize]) -> Result<usize> {
    let total: usize = dims.iter().product();
    if !rho.is_square() || rho.nrows() != total || dims.contains(&0) {
        return Err(Error::DimensionMismatch(format!(
            "matrix {}x{} does not match party dimensions {:?}",
            rho.nrows(),
            rho.ncols(),
            dims
        )));
    }
    Ok(total)
}

fn party_stride(dims: &[usize], party: usize) -> usize {
    dims[party + 1..].iter().product()
}

fn check_party(dims: &[usize], party: usize) -> Result<()> {
    if party >= dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "party {party} out of range for {} parties",
            dims.len()
        )));
    }
    Ok(())
}

/// Reduced state of party `keep`; all other parties are traced out.
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: usize) -> Result<ComplexMatrix> {
    let total = check_square(rho, dims)?;
    check_party(dims, keep)?;
    let d = dims[keep];
    let stride = party_stride(dims, keep);
    let mut out = DMatrix::zeros(d, d);
    for i in 0..total {
        let a = (i / stride) % d;
        let base = i - a * stride;
        for b in 0..d {
            out[(a, b)] += rho[(i, base + b * stride)];
        }
    }
    Ok(out)
}

/// Partial transpose on `party`. Entries are only permuted, so applying it
/// twice returns the input bit for bit.
pub fn partial_transpose(rho: &ComplexMatrix, dims: &[usize], party: usize) -> Result<ComplexMatrix> {
    let total = check_square(rho, dims)?;
    check_party(dims, party)?;
    let d = dims[party];
    let stride = party_stride(dims, party);
    Ok(DMatrix::from_fn(total, total, |i, j| {
        let a = (i / stride) % d;
        let b = (j / stride) % d;
        let i2 = i - a * stride + b * stride;
        let j2 = j - b * stride + a * stride;
        rho[(i2, j2)]
    }))
}
