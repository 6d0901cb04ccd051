//! Classical shadow of the quantum statements: Shannon entropy, column-stochastic
//! matrices acting on column vectors from the left, and the Kraus matrix
//! `B(Φ) = Σ_μ M_μ ∘ conj(M_μ)` linking channels to stochastic matrices.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{self, c, entropy_term, ComplexMatrix};
use crate::states::DensityMatrix;
use crate::tolerance::ToleranceConfig;

/// Non-negative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    /// Entries in `[-ε_psd, 0)` are clipped to zero; the sum must be one within `ε_eq`.
    pub fn new(mut entries: Vec<f64>, tol: &ToleranceConfig) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidProbability("empty vector".into()));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(bad) = entries.iter().copied().find(|&x| x < -tol.psd) {
            return Err(Error::InvalidProbability(format!("negative entry {bad}")));
        }
        for x in entries.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > tol.eq {
            return Err(Error::InvalidProbability(format!("entries sum to {total}")));
        }
        Ok(Self(entries))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    /// `diag(p)` as a density matrix.
    pub fn to_density(&self, tol: &ToleranceConfig) -> Result<DensityMatrix> {
        DensityMatrix::diagonal(&self.0, tol)
    }
}

/// Column-stochastic matrix, optionally bistochastic.
#[derive(Debug, Clone)]
pub struct StochasticMatrix {
    matrix: DMatrix<f64>,
    bistochastic: bool,
    column_residual: f64,
    row_residual: f64,
}

fn sum_residuals(m: &DMatrix<f64>) -> (f64, f64) {
    let col = m
        .column_iter()
        .map(|c| (c.sum() - 1.0).abs())
        .fold(0.0, f64::max);
    let row = m
        .row_iter()
        .map(|r| (r.sum() - 1.0).abs())
        .fold(0.0, f64::max);
    (col, row)
}

impl StochasticMatrix {
    /// Requires a square, non-negative (up to `ε_psd`), column-stochastic matrix.
    pub fn new(mut matrix: DMatrix<f64>, tol: &ToleranceConfig) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let min = matrix.min();
        if min < -tol.psd {
            return Err(Error::NotPositive(min));
        }
        matrix.apply(|x| *x = x.max(0.0));
        let built = Self::from_parts(matrix, tol.eq);
        if built.column_residual > tol.eq {
            return Err(Error::NotStochastic(built.column_residual));
        }
        Ok(built)
    }

    fn from_parts(matrix: DMatrix<f64>, bound: f64) -> Self {
        let (column_residual, row_residual) = sum_residuals(&matrix);
        Self {
            bistochastic: column_residual <= bound && row_residual <= bound,
            matrix,
            column_residual,
            row_residual,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn is_bistochastic(&self) -> bool {
        self.bistochastic
    }

    /// Largest deviation of a column sum from one.
    pub fn column_residual(&self) -> f64 {
        self.column_residual
    }

    /// Largest deviation of a row sum from one.
    pub fn row_residual(&self) -> f64 {
        self.row_residual
    }

    pub fn transpose(&self) -> DMatrix<f64> {
        self.matrix.transpose()
    }

    pub fn require_bistochastic(&self) -> Result<()> {
        if !self.bistochastic {
            return Err(Error::NotBistochastic {
                trace_residual: self.column_residual,
                unital_residual: self.row_residual,
            });
        }
        Ok(())
    }

    /// `B p`, renormalized only through the stochastic structure of `B`.
    pub fn apply(&self, p: &ProbabilityVector) -> Result<ProbabilityVector> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.dim(),
            });
        }
        let q = &self.matrix * p.to_dvector();
        Ok(ProbabilityVector(q.iter().map(|x| x.max(0.0)).collect()))
    }
}

/// `H(p) = -Σ p_i log₂ p_i`.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    p.as_slice().iter().map(|&x| entropy_term(x)).sum()
}

/// `H(p‖q)`, `+∞` when some `p_i > ε_psd` meets `q_i ≤ ε_psd`.
pub fn classical_relative_entropy(
    p: &ProbabilityVector,
    q: &ProbabilityVector,
    tol: &ToleranceConfig,
) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let mut total = 0.0;
    for (&pi, &qi) in p.as_slice().iter().zip(q.as_slice()) {
        if pi > tol.psd && qi <= tol.psd {
            return Ok(f64::INFINITY);
        }
        if pi > 0.0 && qi > tol.psd {
            total += pi * (pi.log2() - qi.log2());
        }
    }
    Ok(total)
}

/// `Σ_μ M_μ ∘ conj(M_μ)` for any Kraus family, with no stochasticity requirement.
pub fn schur_weight_matrix(phi: &KrausChannel) -> DMatrix<f64> {
    let n = phi.dim();
    phi.kraus()
        .iter()
        .fold(DMatrix::zeros(n, n), |acc, m| acc + m.map(|z| z.norm_sqr()))
}

/// Kraus matrix `B(Φ)` of a stochastic channel: entry `(i, j)` is `Σ_μ |⟨i|M_μ|j⟩|²`.
pub fn kraus_matrix(phi: &KrausChannel, tol: &ToleranceConfig) -> Result<StochasticMatrix> {
    phi.require_stochastic(tol)?;
    let bound = tol.eq * phi.dim() as f64;
    Ok(StochasticMatrix::from_parts(schur_weight_matrix(phi), bound))
}

/// The channel `{√T_ji |j⟩⟨i|}`, which sends `diag(p)` to `diag(Tp)`.
pub fn channel_from_bistochastic(
    t: &StochasticMatrix,
    tol: &ToleranceConfig,
) -> Result<KrausChannel> {
    t.require_bistochastic()?;
    let n = t.dim();
    let mut kraus = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let w = t.matrix[(j, i)];
            if w > tol.psd {
                let mut m = ComplexMatrix::zeros(n, n);
                m[(j, i)] = c(w.sqrt(), 0.0);
                kraus.push(m);
            }
        }
    }
    KrausChannel::new(kraus, tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct CorollaryReport {
    pub entropy_in: f64,
    pub entropy_out: f64,
    /// `|H(Bp) − H(p)|`
    pub entropy_gap: f64,
    /// `‖BᵀBp − p‖₂`
    pub fixed_residual: f64,
    /// `entropy_gap ≤ ε_eq`
    pub entropy_preserved: bool,
    /// `fixed_residual ≤ ε_fix`
    pub fixed_point: bool,
    pub agreement: bool,
}

/// Evaluate both sides of `H(Bp) = H(p) ⇔ BᵀBp = p` for bistochastic `B`.
pub fn corollary_check(
    b: &StochasticMatrix,
    p: &ProbabilityVector,
    tol: &ToleranceConfig,
) -> Result<CorollaryReport> {
    b.require_bistochastic()?;
    let q = b.apply(p)?;
    let entropy_in = shannon_entropy(p);
    let entropy_out = shannon_entropy(&q);
    let entropy_gap = (entropy_out - entropy_in).abs();
    let pv = p.to_dvector();
    let back = b.transpose() * (b.matrix() * &pv);
    let fixed_residual = (back - pv).norm();
    let entropy_preserved = entropy_gap <= tol.eq;
    let fixed_point = fixed_residual <= tol.fix;
    Ok(CorollaryReport {
        entropy_in,
        entropy_out,
        entropy_gap,
        fixed_residual,
        entropy_preserved,
        fixed_point,
        agreement: entropy_preserved == fixed_point,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BridgeReport {
    /// Diagonal of ρ.
    pub p: Vec<f64>,
    /// Diagonal of Φ(ρ).
    pub q_direct: Vec<f64>,
    /// `B(Φ) p`.
    pub q_via_matrix: Vec<f64>,
    /// `‖q_direct − q_via_matrix‖₂`
    pub residual: f64,
    pub holds: bool,
}

/// Check `diag Φ(ρ) = B(Φ) diag ρ` for a state diagonal in the computational basis.
pub fn bridge_check(
    phi: &KrausChannel,
    rho: &DensityMatrix,
    tol: &ToleranceConfig,
) -> Result<BridgeReport> {
    let n = rho.dim();
    let m = rho.matrix();
    let off: f64 = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)].norm_sqr())
        .sum::<f64>()
        .sqrt();
    if off > tol.eq {
        return Err(Error::NotDiagonal(off));
    }
    let b = kraus_matrix(phi, tol)?;
    let image = phi.apply(m)?;
    let p: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    let q_direct: Vec<f64> = (0..n).map(|i| image[(i, i)].re).collect();
    let q_via = b.matrix() * DVector::from_column_slice(&p);
    let residual = q_via
        .iter()
        .zip(&q_direct)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(BridgeReport {
        p,
        q_direct,
        q_via_matrix: q_via.iter().copied().collect(),
        residual,
        holds: residual <= tol.eq,
    })
}

/// `diag(p)` for a raw slice, used when comparing against von Neumann entropy.
pub fn diagonal_matrix(p: &ProbabilityVector) -> ComplexMatrix {
    linalg::diag_real(p.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::permutation_matrix;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn pv(x: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(x.to_vec(), &tol()).unwrap()
    }

    fn sm(rows: usize, data: &[f64]) -> StochasticMatrix {
        StochasticMatrix::new(DMatrix::from_row_slice(rows, rows, data), &tol()).unwrap()
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.6], &tol()).is_err());
        assert!(ProbabilityVector::new(vec![1.1, -0.1], &tol()).is_err());
        assert!(ProbabilityVector::new(vec![], &tol()).is_err());
        let clipped = ProbabilityVector::new(vec![1.0, -1e-12], &tol()).unwrap();
        assert_eq!(clipped.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&pv(&[1.0, 0.0])), 0.0);
        assert!((shannon_entropy(&ProbabilityVector::uniform(8)) - 3.0).abs() < 1e-14);
        let h = shannon_entropy(&pv(&[0.8, 0.2]));
        assert!((h - (-0.8 * 0.8f64.log2() - 0.2 * 0.2f64.log2())).abs() < 1e-15);
    }

    #[test]
    fn relative_entropy_examples() {
        let t = tol();
        let p = pv(&[0.3, 0.7]);
        assert_eq!(classical_relative_entropy(&p, &p, &t).unwrap(), 0.0);
        let d = classical_relative_entropy(&pv(&[1.0, 0.0]), &pv(&[0.5, 0.5]), &t).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        let inf = classical_relative_entropy(&pv(&[0.5, 0.5]), &pv(&[1.0, 0.0]), &t).unwrap();
        assert_eq!(inf, f64::INFINITY);
        assert!(classical_relative_entropy(&p, &ProbabilityVector::uniform(3), &t).is_err());
    }

    #[test]
    fn stochastic_matrix_validation() {
        let col_only = sm(2, &[0.5, 0.2, 0.5, 0.8]);
        assert!(!col_only.is_bistochastic());
        assert!(matches!(col_only.require_bistochastic(), Err(Error::NotBistochastic { .. })));
        assert!(StochasticMatrix::new(DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.2, 0.8]), &tol()).is_err());
        assert!(StochasticMatrix::new(DMatrix::from_row_slice(2, 2, &[1.2, 0.0, -0.2, 1.0]), &tol()).is_err());
    }

    #[test]
    fn kraus_matrix_examples() {
        let t = tol();
        let id = kraus_matrix(&KrausChannel::identity(3), &t).unwrap();
        assert_eq!(id.matrix(), &DMatrix::identity(3, 3));

        let u = crate::generators::random_unitary(4, 21);
        let b = kraus_matrix(&KrausChannel::unitary(u.clone(), &t).unwrap(), &t).unwrap();
        assert!(b.is_bistochastic());
        for i in 0..4 {
            for j in 0..4 {
                assert!((b.matrix()[(i, j)] - u[(i, j)].norm_sqr()).abs() < 1e-15);
            }
        }

        let phi = crate::generators::random_stochastic_channel(3, 2, 4);
        let forward = kraus_matrix(&phi, &t).unwrap();
        // the adjoint of a non-unital channel is not trace preserving
        assert!(kraus_matrix(&phi.adjoint(), &t).is_err());
        let diff = (schur_weight_matrix(&phi.adjoint()) - forward.transpose()).amax();
        assert!(diff < 1e-9);

        let damp = KrausChannel::amplitude_damping(0.5);
        assert!(!kraus_matrix(&damp, &t).unwrap().is_bistochastic());
    }

    #[test]
    fn channel_from_bistochastic_examples() {
        let t = tol();
        let dephase = channel_from_bistochastic(&sm(3, &[1., 0., 0., 0., 1., 0., 0., 0., 1.]), &t).unwrap();
        assert!(dephase.approx_eq(&KrausChannel::dephasing(3), &t));

        let perm = [2usize, 0, 1];
        let pm = StochasticMatrix::new(permutation_matrix(&perm), &t).unwrap();
        let phi = channel_from_bistochastic(&pm, &t).unwrap();
        for (j, &i) in perm.iter().enumerate() {
            let out = phi.apply(&linalg::matrix_unit(3, j, j)).unwrap();
            assert!(linalg::frobenius(&(out - linalg::matrix_unit(3, i, i))) < 1e-15);
        }

        let b = crate::generators::random_bistochastic_matrix(4, 3, 13);
        let p = crate::generators::random_probability_vector(4, 14);
        let phi = channel_from_bistochastic(&b, &t).unwrap();
        let out = phi.apply(&diagonal_matrix(&p)).unwrap();
        let expected = diagonal_matrix(&b.apply(&p).unwrap());
        assert!(linalg::frobenius(&(out - expected)) < 1e-14);

        assert!(channel_from_bistochastic(&sm(2, &[0.5, 0.2, 0.5, 0.8]), &t).is_err());
    }

    #[test]
    fn corollary_examples() {
        let t = tol();
        let perm = StochasticMatrix::new(permutation_matrix(&[1, 2, 0]), &t).unwrap();
        let r = corollary_check(&perm, &pv(&[0.5, 0.3, 0.2]), &t).unwrap();
        assert!(r.entropy_preserved && r.fixed_point && r.agreement);

        let b = crate::generators::random_bistochastic_matrix(5, 3, 1);
        let r = corollary_check(&b, &ProbabilityVector::uniform(5), &t).unwrap();
        assert!(r.entropy_preserved && r.fixed_point);

        let b = sm(2, &[0.7, 0.3, 0.3, 0.7]);
        let r = corollary_check(&b, &pv(&[0.8, 0.2]), &t).unwrap();
        let h = |x: f64| -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
        assert!((r.entropy_out - h(0.62)).abs() < 1e-14);
        assert!((r.entropy_out - 0.958_042_1).abs() < 1e-6);
        assert!((r.entropy_in - 0.721_928_1).abs() < 1e-6);
        // BᵀB p = [0.548, 0.452]
        let expected = ((0.548f64 - 0.8).powi(2) + (0.452f64 - 0.2).powi(2)).sqrt();
        assert!((r.fixed_residual - expected).abs() < 1e-14);
        assert!(!r.entropy_preserved && !r.fixed_point && r.agreement);

        assert!(corollary_check(&sm(2, &[0.5, 0.2, 0.5, 0.8]), &pv(&[0.5, 0.5]), &t).is_err());
    }

    #[test]
    fn bridge_examples() {
        let t = tol();
        let rho = DensityMatrix::diagonal(&[0.1, 0.6, 0.3], &t).unwrap();
        let r = bridge_check(&KrausChannel::identity(3), &rho, &t).unwrap();
        assert!(r.holds);
        assert_eq!(r.q_direct, r.p);

        let b = crate::generators::random_bistochastic_matrix(3, 2, 6);
        let r = bridge_check(&channel_from_bistochastic(&b, &t).unwrap(), &rho, &t).unwrap();
        assert!(r.holds);

        let phi = crate::generators::random_bistochastic_channel(3, 3, 8);
        assert!(bridge_check(&phi, &rho, &t).unwrap().holds);

        let coherent = crate::states::pure_state(&[c(1.0, 0.0), c(1.0, 0.0)], &t).unwrap();
        assert!(matches!(
            bridge_check(&KrausChannel::identity(2), &coherent, &t),
            Err(Error::NotDiagonal(_))
        ));
    }
}
