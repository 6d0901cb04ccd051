//! Quantum operations in Kraus form.
//!
//! Superoperator matrices use column stacking, so `Ad_M` is `conj(M) ⊗ M`
//! and the Hilbert–Schmidt adjoint of a channel is the conjugate transpose
//! of its matrix. Channels are compared through these matrices, never through
//! their (non-unique) Kraus lists.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, frobenius, identity, kron, ComplexMatrix, Spectrum};
use crate::states::DensityMatrix;
use crate::tolerance::ToleranceConfig;

/// A trace non-increasing completely positive map `X ↦ Σ_j M_j X M_j†`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    TraceNonincreasing,
    Stochastic,
    Bistochastic,
}

/// Classification flags plus the Frobenius residuals they were derived from.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Classification {
    pub kind: ChannelKind,
    pub stochastic: bool,
    pub unital: bool,
    /// `‖Σ M†M − I‖_F`
    pub trace_residual: f64,
    /// `‖Σ MM† − I‖_F`
    pub unital_residual: f64,
}

impl Classification {
    pub fn is_bistochastic(&self) -> bool {
        self.kind == ChannelKind::Bistochastic
    }
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>, tol: &ToleranceConfig) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        let dim = first.nrows();
        for m in &kraus {
            if m.nrows() != m.ncols() {
                return Err(Error::NotSquare {
                    rows: m.nrows(),
                    cols: m.ncols(),
                });
            }
            if m.nrows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.nrows(),
                });
            }
            if !linalg::is_finite(m) {
                return Err(Error::NonFinite);
            }
        }
        let channel = Self { dim, kraus };
        let largest = Spectrum::of(&channel.kraus_gram()).max();
        if largest > 1.0 + tol.eq {
            return Err(Error::TraceIncreasing(largest));
        }
        Ok(channel)
    }

    /// Build without the trace non-increasing check. Callers guarantee validity.
    pub(crate) fn from_parts(dim: usize, kraus: Vec<ComplexMatrix>) -> Self {
        debug_assert!(!kraus.is_empty());
        Self { dim, kraus }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_parts(n, vec![identity(n)])
    }

    pub fn unitary(u: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let n = u.nrows();
        let resid = frobenius(&(u.adjoint() * &u - identity(n)));
        if resid > tol.eq * n as f64 {
            return Err(Error::NotStochastic(resid));
        }
        Self::new(vec![u], tol)
    }

    /// Complete dephasing `{|i⟩⟨i|}` in the computational basis.
    pub fn dephasing(n: usize) -> Self {
        Self::from_parts(n, (0..n).map(|i| linalg::matrix_unit(n, i, i)).collect())
    }

    /// `X ↦ tr(X) I / n`.
    pub fn fully_depolarizing(n: usize) -> Self {
        Self::depolarizing(n, 1.0)
    }

    /// `X ↦ (1 − p) X + p tr(X) I / n` for `p ∈ [0, 1]`.
    pub fn depolarizing(n: usize, p: f64) -> Self {
        assert!((0.0..=1.0).contains(&p), "depolarizing strength must be in [0, 1]");
        let mut kraus = Vec::with_capacity(n * n + 1);
        if p < 1.0 {
            kraus.push(identity(n).scale((1.0 - p).sqrt()));
        }
        let w = (p / n as f64).sqrt();
        if w > 0.0 {
            for i in 0..n {
                for j in 0..n {
                    kraus.push(linalg::matrix_unit(n, i, j).scale(w));
                }
            }
        }
        Self::from_parts(n, kraus)
    }

    /// Qubit amplitude damping with decay probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Self {
        assert!((0.0..=1.0).contains(&gamma));
        let k0 = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - gamma).sqrt(), 0.0)],
        );
        let k1 = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(gamma.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        );
        Self::from_parts(2, vec![k0, k1])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `Σ M_j† M_j`
    pub fn kraus_gram(&self) -> ComplexMatrix {
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, m| {
                acc + m.adjoint() * m
            })
    }

    /// `Σ M_j M_j†`, i.e. `Φ(I)`.
    pub fn image_of_identity(&self) -> ComplexMatrix {
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, m| {
                acc + m * m.adjoint()
            })
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: n,
            });
        }
        Ok(())
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.nrows() != x.ncols() {
            return Err(Error::NotSquare {
                rows: x.nrows(),
                cols: x.ncols(),
            });
        }
        self.check_dim(x.nrows())?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, m| {
                acc + m * x * m.adjoint()
            })
    }

    /// Apply to a state and validate the output as a state.
    pub fn apply_state(&self, rho: &DensityMatrix, tol: &ToleranceConfig) -> Result<DensityMatrix> {
        self.check_dim(rho.dim())?;
        DensityMatrix::new(self.apply_unchecked(rho.matrix()), tol)
    }

    /// Hilbert–Schmidt adjoint, Kraus family `{M_j†}`.
    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.dim, self.kraus.iter().map(|m| m.adjoint()).collect())
    }

    /// `self ∘ inner`, Kraus family `{M_i N_j}`.
    pub fn compose(&self, inner: &KrausChannel) -> Result<Self> {
        self.check_dim(inner.dim)?;
        let mut kraus = Vec::with_capacity(self.kraus.len() * inner.kraus.len());
        for m in &self.kraus {
            for k in &inner.kraus {
                kraus.push(m * k);
            }
        }
        Ok(Self::from_parts(self.dim, kraus))
    }

    pub fn classify(&self, tol: &ToleranceConfig) -> Classification {
        let id = identity(self.dim);
        let trace_residual = frobenius(&(self.kraus_gram() - &id));
        let unital_residual = frobenius(&(self.image_of_identity() - &id));
        let bound = tol.eq * self.dim as f64;
        let stochastic = trace_residual <= bound;
        let unital = unital_residual <= bound;
        let kind = match (stochastic, unital) {
            (true, true) => ChannelKind::Bistochastic,
            (true, false) => ChannelKind::Stochastic,
            _ => ChannelKind::TraceNonincreasing,
        };
        Classification {
            kind,
            stochastic,
            unital,
            trace_residual,
            unital_residual,
        }
    }

    pub fn require_stochastic(&self, tol: &ToleranceConfig) -> Result<Classification> {
        let class = self.classify(tol);
        if !class.stochastic {
            return Err(Error::NotStochastic(class.trace_residual));
        }
        Ok(class)
    }

    pub fn require_bistochastic(&self, tol: &ToleranceConfig) -> Result<Classification> {
        let class = self.classify(tol);
        if !class.is_bistochastic() {
            return Err(Error::NotBistochastic {
                trace_residual: class.trace_residual,
                unital_residual: class.unital_residual,
            });
        }
        Ok(class)
    }

    /// `Σ_j conj(M_j) ⊗ M_j`, acting on column-stacked matrices.
    pub fn superoperator_matrix(&self) -> SuperoperatorMatrix {
        let n2 = self.dim * self.dim;
        let matrix = self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(n2, n2), |acc, m| {
                acc + kron(&m.conjugate(), m)
            });
        SuperoperatorMatrix {
            dim: self.dim,
            matrix,
        }
    }

    /// Frobenius distance between superoperator matrices.
    pub fn distance(&self, other: &KrausChannel) -> Result<f64> {
        self.check_dim(other.dim)?;
        Ok(self.superoperator_matrix().distance(&other.superoperator_matrix()))
    }

    /// Channel equality: superoperator distance at most `ε_eq · N²`.
    pub fn approx_eq(&self, other: &KrausChannel, tol: &ToleranceConfig) -> bool {
        let bound = tol.eq * (self.dim * self.dim) as f64;
        self.distance(other).map(|d| d <= bound).unwrap_or(false)
    }

    /// The σ-weighted recovery map `Ad_{σ^{1/2}} ∘ Φ† ∘ Ad_{Φ(σ)^{-1/2}}`.
    ///
    /// `Φ(σ)^{-1/2}` is the generalized inverse square root, so on a singular
    /// `Φ(σ)` the map only recovers within the support.
    pub fn petz_recovery(&self, sigma: &DensityMatrix, tol: &ToleranceConfig) -> Result<Self> {
        self.require_stochastic(tol)?;
        self.check_dim(sigma.dim())?;
        let sigma_sqrt = sigma.spectrum().map(|x| x.max(0.0).sqrt());
        let image = self.apply_unchecked(sigma.matrix());
        let image_inv_sqrt = linalg::psd_inv_sqrt(&image, tol.psd);
        let kraus = self
            .kraus
            .iter()
            .map(|m| &sigma_sqrt * m.adjoint() * &image_inv_sqrt)
            .collect();
        Ok(Self::from_parts(self.dim, kraus))
    }
}

/// Matrix of a superoperator on `N²`-dimensional column-stacked operator space.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperoperatorMatrix {
    pub dim: usize,
    pub matrix: ComplexMatrix,
}

impl SuperoperatorMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            dim: n,
            matrix: identity(n * n),
        }
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let v = &self.matrix * linalg::vec_cols(x);
        linalg::unvec_cols(v.as_slice(), self.dim)
    }

    /// Matrix of the Hilbert–Schmidt adjoint.
    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SuperoperatorMatrix) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix * &inner.matrix,
        }
    }

    pub fn distance(&self, other: &SuperoperatorMatrix) -> f64 {
        frobenius(&(&self.matrix - &other.matrix))
    }
}
