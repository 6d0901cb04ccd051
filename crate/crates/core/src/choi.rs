//! Choi–Jamiołkowski isomorphism with factor order (output ⊗ reference).
//!
//! `J(Φ) = Σ_{ij} Φ(|i⟩⟨j|) ⊗ |i⟩⟨j| = (Φ ⊗ id)(|Ω⟩⟨Ω|)` where `|Ω⟩ = Σ_i |ii⟩` is
//! left unnormalized, so `tr J = N` for a stochastic channel.

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, Spectrum};
use crate::states::{von_neumann_entropy, DensityMatrix};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub dim: usize,
    pub matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn new(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        let n2 = dim * dim;
        if matrix.nrows() != n2 || matrix.ncols() != n2 {
            return Err(Error::DimensionMismatch {
                expected: n2,
                got: matrix.nrows(),
            });
        }
        Ok(Self { dim, matrix })
    }

    /// Trace over the output factor; equals `(Σ M†M)ᵀ`.
    pub fn trace_output(&self) -> ComplexMatrix {
        linalg::partial_trace_first(&self.matrix, self.dim, self.dim)
    }

    /// Trace over the reference factor; equals `Φ(I)`.
    pub fn trace_reference(&self) -> ComplexMatrix {
        linalg::partial_trace_second(&self.matrix, self.dim, self.dim)
    }

    /// `‖Tr_out J − I‖_F`, zero exactly for trace-preserving maps.
    pub fn trace_preservation_residual(&self) -> f64 {
        linalg::frobenius(&(self.trace_output() - linalg::identity(self.dim)))
    }

    /// `‖Tr_ref J − I‖_F`, zero exactly for unital maps.
    pub fn unitality_residual(&self) -> f64 {
        linalg::frobenius(&(self.trace_reference() - linalg::identity(self.dim)))
    }
}

/// The unnormalized maximally entangled vector `Σ_i |ii⟩`.
pub fn omega(n: usize) -> nalgebra::DVector<linalg::Complex64> {
    let mut v = nalgebra::DVector::zeros(n * n);
    for i in 0..n {
        v[i * n + i] = linalg::ONE;
    }
    v
}

pub fn choi_matrix(phi: &KrausChannel) -> ChoiMatrix {
    let n = phi.dim();
    let mut j = ComplexMatrix::zeros(n * n, n * n);
    // (M ⊗ I)|Ω⟩ has component M[a, i] at index a·N + i.
    for m in phi.kraus() {
        let v = nalgebra::DVector::from_fn(n * n, |idx, _| m[(idx / n, idx % n)]);
        j += &v * v.adjoint();
    }
    ChoiMatrix { dim: n, matrix: j }
}

/// Kraus operators from the scaled eigenvectors of `J` with eigenvalue above `ε_psd`.
pub fn channel_from_choi(choi: &ChoiMatrix, tol: &ToleranceConfig) -> Result<KrausChannel> {
    let n = choi.dim;
    let dev = linalg::max_hermitian_deviation(&choi.matrix);
    if dev > tol.herm * (n * n) as f64 {
        return Err(Error::NotHermitian(dev));
    }
    let spec = Spectrum::of(&choi.matrix);
    if spec.min() < -tol.psd {
        return Err(Error::NotPositive(spec.min()));
    }
    let mut kraus = Vec::new();
    for (k, &lambda) in spec.eigenvalues.iter().enumerate() {
        if lambda <= tol.psd {
            continue;
        }
        let v = spec.eigenvectors.column(k) * linalg::c(lambda.sqrt(), 0.0);
        kraus.push(ComplexMatrix::from_fn(n, n, |a, i| v[a * n + i]));
    }
    if kraus.is_empty() {
        kraus.push(ComplexMatrix::zeros(n, n));
    }
    KrausChannel::new(kraus, tol)
}

/// `J(Φ)/N` as a bipartite state.
pub fn normalized_choi_state(phi: &KrausChannel, tol: &ToleranceConfig) -> Result<DensityMatrix> {
    phi.require_stochastic(tol)?;
    let n = phi.dim() as f64;
    let j = choi_matrix(phi).matrix.scale(1.0 / n);
    // the trace of J/N is only as accurate as the stochasticity residual
    let relaxed = ToleranceConfig {
        trace: tol.trace.max(tol.eq),
        ..*tol
    };
    DensityMatrix::new(j, &relaxed)
}

/// Map entropy `S(J(Φ)/N)` in bits.
pub fn map_entropy(phi: &KrausChannel, tol: &ToleranceConfig) -> Result<f64> {
    Ok(von_neumann_entropy(&normalized_choi_state(phi, tol)?))
}
