//! Density matrices and their entropic functionals. Logarithms are base 2.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, entropy_term, frobenius, hermitian_part, identity, ComplexMatrix, Spectrum,
};
use crate::tolerance::ToleranceConfig;

/// A Hermitian, positive semi-definite, unit-trace matrix.
///
/// The cached spectrum has already been clipped: eigenvalues in `[-ε_psd, 0)` are zero.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    spectrum: Spectrum,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        validate_state(m, tol)
    }

    /// `I / n`.
    pub fn maximally_mixed(n: usize) -> Self {
        let matrix = identity(n).scale(1.0 / n as f64);
        let spectrum = Spectrum {
            eigenvalues: vec![1.0 / n as f64; n],
            eigenvectors: identity(n),
        };
        Self { matrix, spectrum }
    }

    /// `|k⟩⟨k|` in dimension `n`.
    pub fn basis_state(n: usize, k: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[k] = 1.0;
        Self::diagonal(&probs, &ToleranceConfig::default()).expect("basis state is valid")
    }

    pub fn diagonal(probs: &[f64], tol: &ToleranceConfig) -> Result<Self> {
        validate_state(linalg::diag_real(probs), tol)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    /// Number of eigenvalues above `ε_psd`.
    pub fn rank(&self, tol: &ToleranceConfig) -> usize {
        self.eigenvalues().iter().filter(|&&x| x > tol.psd).count()
    }

    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(self)
    }
}

/// Check that `m` is a state and wrap it.
pub fn validate_state(m: ComplexMatrix, tol: &ToleranceConfig) -> Result<DensityMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if !linalg::is_finite(&m) {
        return Err(Error::NonFinite);
    }
    let dev = linalg::max_hermitian_deviation(&m);
    if dev > tol.herm {
        return Err(Error::NotHermitian(dev));
    }
    let h = hermitian_part(&m);
    let mut spectrum = Spectrum::of(&h);
    let min = spectrum.min();
    if min < -tol.psd {
        return Err(Error::NotPositive(min));
    }
    let tr = linalg::trace(&h).re;
    if (tr - 1.0).abs() > tol.trace {
        return Err(Error::TraceNotOne(tr));
    }
    let clipped = spectrum.eigenvalues.iter().any(|&x| x < 0.0);
    for x in spectrum.eigenvalues.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let matrix = if clipped { spectrum.reconstruct() } else { h };
    Ok(DensityMatrix { matrix, spectrum })
}

/// `S(ρ) = -tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues().iter().map(|&x| entropy_term(x)).sum()
}

/// Orthogonal projector onto the eigenvectors with eigenvalue above `ε_psd`.
pub fn support_projector(rho: &DensityMatrix, tol: &ToleranceConfig) -> ComplexMatrix {
    rho.spectrum()
        .map(|x| if x > tol.psd { 1.0 } else { 0.0 })
}

/// Inverse on the support, zero on its orthogonal complement.
pub fn generalized_inverse(rho: &DensityMatrix, tol: &ToleranceConfig) -> ComplexMatrix {
    rho.spectrum()
        .map(|x| if x > tol.psd { 1.0 / x } else { 0.0 })
}

/// Relative entropy together with the support-inclusion residual `‖(I − P_σ) P_ρ‖_F`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RelativeEntropy {
    pub value: f64,
    pub support_residual: f64,
}

impl RelativeEntropy {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

pub fn relative_entropy_detailed(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tol: &ToleranceConfig,
) -> Result<RelativeEntropy> {
    let n = rho.dim();
    if sigma.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: sigma.dim(),
        });
    }
    let p_rho = support_projector(rho, tol);
    let p_sigma = support_projector(sigma, tol);
    let support_residual = frobenius(&((identity(n) - p_sigma) * p_rho));
    if support_residual > tol.psd {
        return Ok(RelativeEntropy {
            value: f64::INFINITY,
            support_residual,
        });
    }
    // tr ρ log σ = Σ_k log₂ μ_k ⟨v_k|ρ|v_k⟩ over the support of σ.
    let spec = sigma.spectrum();
    let mut cross = 0.0;
    for (k, &mu) in spec.eigenvalues.iter().enumerate() {
        if mu <= tol.psd {
            continue;
        }
        let v = spec.eigenvectors.column(k);
        let weight = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        cross += weight * mu.log2();
    }
    Ok(RelativeEntropy {
        value: -von_neumann_entropy(rho) - cross,
        support_residual,
    })
}

/// `S(ρ‖σ)` in bits, or `+∞` when the support of ρ is not inside the support of σ.
pub fn relative_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tol: &ToleranceConfig,
) -> Result<f64> {
    relative_entropy_detailed(rho, sigma, tol).map(|r| r.value)
}

/// Pure state `|ψ⟩⟨ψ|` from a (not necessarily normalized) vector.
pub fn pure_state(psi: &[linalg::Complex64], tol: &ToleranceConfig) -> Result<DensityMatrix> {
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let v = nalgebra::DVector::from_iterator(psi.len(), psi.iter().map(|z| z / c(norm, 0.0)));
    validate_state(&v * v.adjoint(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::diag_real;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn validate_examples() {
        let half = validate_state(identity(2).scale(0.5), &tol()).unwrap();
        assert_eq!(half.eigenvalues(), &[0.5, 0.5]);
        validate_state(diag_real(&[0.8, 0.2]), &tol()).unwrap();

        let upper = linalg::matrix_unit(2, 0, 1);
        assert!(matches!(validate_state(upper, &tol()), Err(Error::NotHermitian(_))));
        assert!(matches!(
            validate_state(diag_real(&[0.6, 0.6]), &tol()),
            Err(Error::TraceNotOne(_))
        ));
        assert!(matches!(
            validate_state(diag_real(&[1.2, -0.2]), &tol()),
            Err(Error::NotPositive(_))
        ));
        assert!(matches!(
            validate_state(ComplexMatrix::zeros(2, 3), &tol()),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn tiny_negative_eigenvalues_are_clipped() {
        let rho = validate_state(diag_real(&[1.0 + 5e-11, -5e-11]), &tol()).unwrap();
        assert!(rho.eigenvalues().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn entropy_examples() {
        let half = DensityMatrix::maximally_mixed(2);
        assert!((von_neumann_entropy(&half) - 1.0).abs() < 1e-14);
        assert_eq!(von_neumann_entropy(&DensityMatrix::basis_state(2, 0)), 0.0);
        let rho = DensityMatrix::diagonal(&[0.8, 0.2], &tol()).unwrap();
        let expected = -0.8 * 0.8f64.log2() - 0.2 * 0.2f64.log2();
        assert!((von_neumann_entropy(&rho) - expected).abs() < 1e-14);
        assert!((expected - 0.721_928_094_887_362_3).abs() < 1e-15);
    }

    #[test]
    fn support_projector_examples() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.5, 0.0], &tol()).unwrap();
        let p = support_projector(&rho, &tol());
        assert!(frobenius(&(p - diag_real(&[1.0, 1.0, 0.0]))) < 1e-12);
        let full = DensityMatrix::diagonal(&[0.2, 0.3, 0.5], &tol()).unwrap();
        assert!(frobenius(&(support_projector(&full, &tol()) - identity(3))) < 1e-12);
        let pure = DensityMatrix::basis_state(2, 0);
        assert!(frobenius(&(support_projector(&pure, &tol()) - diag_real(&[1.0, 0.0]))) < 1e-12);
    }

    #[test]
    fn generalized_inverse_examples() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.0, 0.5], &tol()).unwrap();
        let inv = generalized_inverse(&rho, &tol());
        assert!(frobenius(&(inv - diag_real(&[2.0, 0.0, 2.0]))) < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!(frobenius(&(generalized_inverse(&mixed, &tol()) - identity(4).scale(4.0))) < 1e-12);
    }

    #[test]
    fn relative_entropy_examples() {
        let t = tol();
        let rho = DensityMatrix::diagonal(&[0.7, 0.3], &t).unwrap();
        assert!(relative_entropy(&rho, &rho, &t).unwrap().abs() < 1e-14);

        let zero = DensityMatrix::basis_state(2, 0);
        let half = DensityMatrix::maximally_mixed(2);
        assert!((relative_entropy(&zero, &half, &t).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(relative_entropy(&half, &zero, &t).unwrap(), f64::INFINITY);

        let three = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            relative_entropy(&half, &three, &t),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn relative_entropy_on_partial_support() {
        let t = tol();
        let rho = DensityMatrix::diagonal(&[1.0, 0.0, 0.0], &t).unwrap();
        let sigma = DensityMatrix::diagonal(&[0.25, 0.75, 0.0], &t).unwrap();
        let d = relative_entropy(&rho, &sigma, &t).unwrap();
        assert!((d - 2.0).abs() < 1e-14);
    }

    #[test]
    fn pure_state_from_vector() {
        let psi = [c(1.0, 0.0), c(0.0, 1.0)];
        let rho = pure_state(&psi, &tol()).unwrap();
        assert!(von_neumann_entropy(&rho).abs() < 1e-12);
        assert!((rho.matrix()[(0, 1)] - c(0.0, -0.5)).norm() < 1e-14);
    }
}
