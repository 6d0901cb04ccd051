//! Dense complex linear algebra shared by every module.
//!
//! All matrix functions (square roots, logarithms, inverses) go through one
//! primitive: the Hermitian eigendecomposition in [`Spectrum::of`].
//! Vectorization is column stacking throughout, so `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64;
use serde::Serialize;

pub type ComplexMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Lift a real matrix into the complex field.
pub fn complexify(m: &DMatrix<f64>) -> ComplexMatrix {
    m.map(|x| c(x, 0.0))
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = c(v, 0.0);
    }
    m
}

/// `|i⟩⟨j|` in dimension `n`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hilbert–Schmidt inner product `tr(A† B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn max_hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Column-stacking vectorization.
pub fn vec_cols(x: &ComplexMatrix) -> DVector<Complex64> {
    DVector::from_iterator(x.len(), x.iter().copied())
}

/// Inverse of [`vec_cols`] for an `n × n` matrix.
pub fn unvec_cols(v: &[Complex64], n: usize) -> ComplexMatrix {
    assert_eq!(v.len(), n * n, "vector length must be n^2");
    ComplexMatrix::from_column_slice(n, n, v)
}

/// Trace out the first factor of a `d1 ⊗ d2` operator (index `i * d2 + j`).
pub fn partial_trace_first(m: &ComplexMatrix, d1: usize, d2: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(d2, d2);
    for a in 0..d2 {
        for b in 0..d2 {
            out[(a, b)] = (0..d1).map(|i| m[(i * d2 + a, i * d2 + b)]).sum();
        }
    }
    out
}

/// Trace out the second factor of a `d1 ⊗ d2` operator (index `i * d2 + j`).
pub fn partial_trace_second(m: &ComplexMatrix, d1: usize, d2: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(d1, d1);
    for a in 0..d1 {
        for b in 0..d1 {
            out[(a, b)] = (0..d2).map(|j| m[(a * d2 + j, b * d2 + j)]).sum();
        }
    }
    out
}

/// Phase-invariant distance `min_θ ‖U − e^{iθ} V‖_F`.
pub fn phase_invariant_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    // the optimal phase aligns V with U: e^{iθ} = ⟨V, U⟩ / |⟨V, U⟩|
    let overlap = hs_inner(v, u);
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
    frobenius(&(u - v * phase))
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// Decompose the Hermitian part of `m`.
    pub fn of(m: &ComplexMatrix) -> Self {
        let h = hermitian_part(m);
        let n = h.nrows();
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut eigenvectors = ComplexMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ f(λ_k) |u_k⟩⟨u_k|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            scaled.column_mut(k).scale_mut(w);
        }
        &scaled * self.eigenvectors.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

/// `A^{1/2}` of a PSD matrix, clipping negative eigenvalues to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    Spectrum::of(m).map(|x| x.max(0.0).sqrt())
}

/// Generalized inverse square root: `λ^{-1/2}` on eigenvalues above `threshold`, zero elsewhere.
pub fn psd_inv_sqrt(m: &ComplexMatrix, threshold: f64) -> ComplexMatrix {
    Spectrum::of(m).map(|x| if x > threshold { 1.0 / x.sqrt() } else { 0.0 })
}

/// Real symmetric eigendecomposition, ascending order.
pub fn real_symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let n = sym.nrows();
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Binary entropy contribution `-x log₂ x` with `0 log 0 = 0`.
#[inline]
pub fn entropy_term(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}
