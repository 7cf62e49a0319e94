//! Dense and sparse real-symmetric matrix storage, eigendecomposition, and a
//! Lanczos path for partial spectra of large matrices.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::HamiltonianError;

/// Dimension above which assembly switches to sparse storage.
pub const SPARSE_THRESHOLD: usize = 2000;

/// Compressed sparse row storage for a real symmetric matrix.
///
/// The full pattern (both triangles) is stored so that mat-vec is a plain
/// row sweep.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from unordered (row, col, value) triplets of the full pattern.
    /// Duplicate entries are summed.
    pub fn from_triplets(dim: usize, triplets: &mut Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut cur_row = 0usize;
        for &(r, c, v) in triplets.iter() {
            while cur_row < r {
                cur_row += 1;
                row_ptr[cur_row] = col_idx.len();
            }
            if col_idx.len() > row_ptr[r] && *col_idx.last().unwrap() == c {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
            }
        }
        while cur_row < dim {
            cur_row += 1;
            row_ptr[cur_row] = col_idx.len();
        }
        CsrMatrix { dim, row_ptr, col_idx, values }
    }

    /// y = A x for complex x.
    pub fn matvec_c(&self, x: &[C64], y: &mut [C64]) {
        for r in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.col_idx[k]] * self.values[k];
            }
            y[r] = acc;
        }
    }

    /// y = A x for real x.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.dim {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.col_idx[k]] * self.values[k];
            }
            y[r] = acc;
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.dim, self.dim));
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                a[[r, self.col_idx[k]]] += self.values[k];
            }
        }
        a
    }
}

/// Storage for a real symmetric operator.
#[derive(Debug, Clone)]
pub enum MatrixStorage {
    Dense(Array2<f64>),
    Sparse(CsrMatrix),
}

impl MatrixStorage {
    pub fn dim(&self) -> usize {
        match self {
            MatrixStorage::Dense(a) => a.nrows(),
            MatrixStorage::Sparse(s) => s.dim,
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, MatrixStorage::Sparse(_))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            MatrixStorage::Dense(a) => a[[i, j]],
            MatrixStorage::Sparse(s) => {
                let lo = s.row_ptr[i];
                let hi = s.row_ptr[i + 1];
                match s.col_idx[lo..hi].binary_search(&j) {
                    Ok(k) => s.values[lo + k],
                    Err(_) => 0.0,
                }
            }
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        match self {
            MatrixStorage::Dense(a) => a.clone(),
            MatrixStorage::Sparse(s) => s.to_dense(),
        }
    }

    /// y = A x (complex vector).
    pub fn matvec_c(&self, x: &[C64], y: &mut [C64]) {
        match self {
            MatrixStorage::Dense(a) => {
                for (r, row) in a.rows().into_iter().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for (v, xv) in row.iter().zip(x.iter()) {
                        acc += xv * *v;
                    }
                    y[r] = acc;
                }
            }
            MatrixStorage::Sparse(s) => s.matvec_c(x, y),
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        match self {
            MatrixStorage::Dense(a) => {
                for (r, row) in a.rows().into_iter().enumerate() {
                    let mut acc = 0.0;
                    for (v, xv) in row.iter().zip(x.iter()) {
                        acc += xv * v;
                    }
                    y[r] = acc;
                }
            }
            MatrixStorage::Sparse(s) => s.matvec(x, y),
        }
    }

    /// Largest absolute entry; cheap norm bound used for residual tolerances.
    pub fn max_abs(&self) -> f64 {
        match self {
            MatrixStorage::Dense(a) => a.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            MatrixStorage::Sparse(s) => s.values.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        }
    }
}

/// Full eigendecomposition of a real symmetric matrix: A = V diag(λ) Vᵀ with
/// eigenvalues ascending and orthonormal columns in `vectors`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Array1<f64>,
    pub vectors: Array2<f64>,
}

/// Dense symmetric eigendecomposition with a residual check on every pair:
/// ‖A v − λ v‖₂ ≤ tol_scale · max(1, ‖A‖_max · √n).
pub fn eigh_checked(a: &Array2<f64>, tol_scale: f64) -> Result<SymEigen, HamiltonianError> {
    let n = a.nrows();
    let (values, vectors) = a
        .eigh(UPLO::Lower)
        .map_err(|e| HamiltonianError::NonConverged(e.to_string()))?;
    // Residual check: R = A V − V diag(λ), one GEMM, column norms.
    let av = a.dot(&vectors);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0) * (n as f64).sqrt();
    let tol = tol_scale * scale;
    for j in 0..n {
        let mut r2 = 0.0;
        for i in 0..n {
            let r = av[[i, j]] - vectors[[i, j]] * values[j];
            r2 += r * r;
        }
        let res = r2.sqrt();
        if res > tol {
            return Err(HamiltonianError::ResidualTooLarge { index: j, residual: res, tol });
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Result of a Lanczos run: Ritz values with the spectral weights of the
/// starting vector, |⟨ritz_i|v₀⟩|².
#[derive(Debug, Clone)]
pub struct RitzSpectrum {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Lanczos tridiagonalization with full reorthogonalization, seeded at `v0`.
///
/// Returns the Ritz values and the squared overlaps of the (normalized)
/// starting vector with the Ritz vectors — exactly the ingredients of the
/// spectral measure of `v0`, so a Lorentzian-broadened spectrum can be read
/// off without a full diagonalization.
pub fn lanczos_spectrum(
    op: &MatrixStorage,
    v0: &[f64],
    max_iter: usize,
) -> Result<RitzSpectrum, HamiltonianError> {
    let n = op.dim();
    let m = max_iter.min(n);
    let norm0 = v0.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm0 == 0.0 {
        return Err(HamiltonianError::NonConverged("zero start vector".into()));
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut alphas = Vec::with_capacity(m);
    let mut betas = Vec::with_capacity(m);
    let mut v: Vec<f64> = v0.iter().map(|x| x / norm0).collect();
    let mut w = vec![0.0; n];
    for _ in 0..m {
        op.matvec(&v, &mut w);
        let alpha = v.iter().zip(w.iter()).map(|(a, b)| a * b).sum::<f64>();
        for i in 0..n {
            w[i] -= alpha * v[i];
        }
        if let Some(prev) = basis.last() {
            let beta_prev = *betas.last().unwrap_or(&0.0);
            for i in 0..n {
                w[i] -= beta_prev * prev[i];
            }
        }
        basis.push(v.clone());
        alphas.push(alpha);
        // full reorthogonalization (twice for stability)
        for _ in 0..2 {
            for b in &basis {
                let p = b.iter().zip(w.iter()).map(|(a, c)| a * c).sum::<f64>();
                for i in 0..n {
                    w[i] -= p * b[i];
                }
            }
        }
        let beta = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if beta < 1e-13 {
            break;
        }
        betas.push(beta);
        for i in 0..n {
            v[i] = w[i] / beta;
        }
    }
    // Diagonalize the tridiagonal via a small dense solve.
    let k = alphas.len();
    let mut t = Array2::<f64>::zeros((k, k));
    for i in 0..k {
        t[[i, i]] = alphas[i];
        if i + 1 < k {
            t[[i, i + 1]] = betas[i];
            t[[i + 1, i]] = betas[i];
        }
    }
    let eig = eigh_checked(&t, 1e-10)?;
    // v0 is e_1 in the Krylov basis; weight_i = |first component of ritz vec|².
    let weights: Vec<f64> = (0..k).map(|j| eig.vectors[[0, j]].powi(2)).collect();
    Ok(RitzSpectrum { values: eig.values.to_vec(), weights })
}
