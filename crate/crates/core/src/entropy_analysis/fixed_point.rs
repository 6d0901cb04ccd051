use nalgebra::DMatrix;
use serde::Serialize;

use crate::channels::KrausChannel;
use crate::error::Result;
use crate::linalg::{self, c, frobenius, hs_inner, real_symmetric_eigen, ComplexMatrix, Spectrum};
use crate::tolerance::ToleranceConfig;

/// Hilbert–Schmidt orthonormal basis of `Fix(Φ†∘Φ)`.
#[derive(Debug, Clone, Serialize)]
pub struct FixedPointBasis {
    pub dim: usize,
    #[serde(skip)]
    pub basis: Vec<ComplexMatrix>,
    /// `‖Φ†Φ(F) − F‖_F` for each basis element.
    pub eigenvalue_residuals: Vec<f64>,
    /// Smallest eigenvalue of `Φ†Φ` that was kept.
    pub smallest_kept: f64,
    /// Largest eigenvalue of `Φ†Φ` that was discarded (`None` when nothing was).
    pub largest_discarded: Option<f64>,
    /// Whether every basis element is Hermitian.
    pub hermitian: bool,
}

impl FixedPointBasis {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Gap between the kept cluster at one and the rest of the spectrum.
    pub fn spectral_gap(&self) -> f64 {
        match self.largest_discarded {
            Some(d) => self.smallest_kept - d,
            None => self.smallest_kept,
        }
    }

    /// `Σ_i ⟨F_i, X⟩ F_i`
    pub fn project(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.basis
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, f| {
                acc + f * hs_inner(f, x)
            })
    }

    /// `‖X − Π(X)‖_F` for the orthogonal projection Π onto the span.
    pub fn distance_to_span(&self, x: &ComplexMatrix) -> f64 {
        frobenius(&(x - self.project(x)))
    }
}

/// Replace an orthonormal basis of a †-closed subspace by a Hermitian orthonormal
/// basis of the same span. Returns `None` when the span is not †-closed.
pub(crate) fn hermitian_basis(basis: &[ComplexMatrix], tol: f64) -> Option<Vec<ComplexMatrix>> {
    let d = basis.len();
    if d == 0 {
        return Some(Vec::new());
    }
    let mut candidates = Vec::with_capacity(2 * d);
    for f in basis {
        let fd = f.adjoint();
        candidates.push((f + &fd).scale(0.5));
        candidates.push((f - &fd) * c(0.0, -0.5));
    }
    let m = candidates.len();
    // real because tr(HK) is real for Hermitian H, K
    let gram = DMatrix::from_fn(m, m, |a, b| hs_inner(&candidates[a], &candidates[b]).re);
    let (values, vectors) = real_symmetric_eigen(&gram);
    // ascending: the top d carry the span, the rest must vanish
    let cut = m - d;
    if values[..cut].iter().any(|&v| v.abs() > tol) || values[cut] <= tol {
        return None;
    }
    let n = basis[0].nrows();
    let out = (cut..m)
        .rev()
        .map(|k| {
            let scale = 1.0 / values[k].sqrt();
            candidates
                .iter()
                .enumerate()
                .fold(ComplexMatrix::zeros(n, n), |acc, (a, h)| {
                    acc + h.scale(vectors[(a, k)] * scale)
                })
        })
        .map(|h| linalg::hermitian_part(&h))
        .collect();
    Some(out)
}

/// Eigenvalue-one eigenspace of the Hermitian PSD matrix of `Φ†∘Φ`.
///
/// Eigenvalues `≥ 1 − ε_fix` are kept. The basis is returned with Hermitian
/// representatives whenever the eigenspace is †-closed, which it always is for
/// bistochastic Φ up to rounding.
pub fn fixed_point_space(phi: &KrausChannel, tol: &ToleranceConfig) -> Result<FixedPointBasis> {
    phi.require_bistochastic(tol)?;
    let n = phi.dim();
    let s = phi.superoperator_matrix().matrix;
    let gram = s.adjoint() * &s;
    let spec = Spectrum::of(&gram);
    let kept: Vec<usize> = (0..spec.dim())
        .filter(|&k| spec.eigenvalues[k] >= 1.0 - tol.fix)
        .collect();
    let smallest_kept = kept.last().map(|&k| spec.eigenvalues[k]).unwrap_or(f64::NAN);
    let largest_discarded = spec.eigenvalues.get(kept.len()).copied();
    let raw: Vec<ComplexMatrix> = kept
        .iter()
        .map(|&k| {
            let col: Vec<_> = spec.eigenvectors.column(k).iter().copied().collect();
            linalg::unvec_cols(&col, n)
        })
        .collect();
    let (basis, hermitian) = match hermitian_basis(&raw, tol.fix) {
        Some(h) => (h, true),
        None => (raw, false),
    };
    let eigenvalue_residuals = basis
        .iter()
        .map(|f| {
            let v = &gram * linalg::vec_cols(f);
            frobenius(&(linalg::unvec_cols(v.as_slice(), n) - f))
        })
        .collect();
    Ok(FixedPointBasis {
        dim: n,
        basis,
        eigenvalue_residuals,
        smallest_kept,
        largest_discarded,
        hermitian,
    })
}
