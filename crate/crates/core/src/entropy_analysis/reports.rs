use serde::Serialize;

use crate::channels::KrausChannel;
use crate::choi::map_entropy;
use crate::error::{Error, Result};
use crate::linalg::{frobenius, identity};
use crate::states::{relative_entropy_detailed, von_neumann_entropy, DensityMatrix};
use crate::tolerance::ToleranceConfig;

/// Both sides of the state criterion: `S(Φρ) = S(ρ)` against `Φ†Φ(ρ) = ρ`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PreservationReport {
    pub entropy_in: f64,
    pub entropy_out: f64,
    pub entropy_gap: f64,
    /// `‖Φ†Φ(ρ) − ρ‖_F`
    pub residual_fix: f64,
    pub verdict_i: bool,
    pub verdict_ii: bool,
    pub agreement: bool,
}

impl PreservationReport {
    pub fn preserved(&self) -> bool {
        self.verdict_i && self.verdict_ii
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MonotonicityReport {
    /// `S(ρ‖σ)`
    pub relative_before: f64,
    /// `S(Φρ‖Φσ)`
    pub relative_after: f64,
    pub slack: f64,
    pub holds: bool,
    /// `S(Φρ) − S(ρ)`, reported when Φ is bistochastic and σ is maximally mixed.
    pub entropy_gain: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PetzReport {
    pub relative_before: f64,
    pub relative_after: f64,
    /// `|S(Φρ‖Φσ) − S(ρ‖σ)|`
    pub relative_gap: f64,
    /// `‖Φ†_σ(Φ(ρ)) − ρ‖_F`
    pub recovery_residual: f64,
    pub equality: bool,
    pub recovered: bool,
    pub agreement: bool,
}

/// Both sides of the map-entropy criterion: `S^map(Φ∘Ψ) = S^map(Ψ)` against
/// `Φ†∘Φ∘Ψ = Ψ`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MapEntropyReport {
    pub map_entropy_inner: f64,
    pub map_entropy_composed: f64,
    pub entropy_gap: f64,
    /// `‖S_Φ† S_Φ S_Ψ − S_Ψ‖_F` on superoperator matrices.
    pub superoperator_residual: f64,
    pub entropy_verdict: bool,
    pub fixed_verdict: bool,
    pub agreement: bool,
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// `Φ(ρ)` as a state, allowing the trace to drift by the channel's own residual.
fn image(phi: &KrausChannel, rho: &DensityMatrix, tol: &ToleranceConfig) -> Result<DensityMatrix> {
    let relaxed = ToleranceConfig {
        trace: tol.trace.max(tol.eq * phi.dim() as f64),
        herm: tol.herm.max(tol.eq),
        ..*tol
    };
    phi.apply_state(rho, &relaxed)
}

pub fn entropy_preservation_report(
    phi: &KrausChannel,
    rho: &DensityMatrix,
    tol: &ToleranceConfig,
) -> Result<PreservationReport> {
    phi.require_bistochastic(tol)?;
    check_dim(phi.dim(), rho.dim())?;
    let out = image(phi, rho, tol)?;
    let entropy_in = von_neumann_entropy(rho);
    let entropy_out = von_neumann_entropy(&out);
    let back = phi.adjoint().apply_unchecked(out.matrix());
    let residual_fix = frobenius(&(back - rho.matrix()));
    let entropy_gap = entropy_out - entropy_in;
    let verdict_i = entropy_gap.abs() <= tol.eq;
    let verdict_ii = residual_fix <= tol.fix;
    Ok(PreservationReport {
        entropy_in,
        entropy_out,
        entropy_gap,
        residual_fix,
        verdict_i,
        verdict_ii,
        agreement: verdict_i == verdict_ii,
    })
}

/// Relative entropies before and after Φ, both finite, or a support violation.
fn relative_pair(
    phi: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tol: &ToleranceConfig,
) -> Result<(f64, f64, DensityMatrix, DensityMatrix)> {
    phi.require_stochastic(tol)?;
    check_dim(phi.dim(), rho.dim())?;
    check_dim(phi.dim(), sigma.dim())?;
    let before = relative_entropy_detailed(rho, sigma, tol)?;
    if !before.is_finite() {
        return Err(Error::SupportViolation(before.support_residual));
    }
    let rho_out = image(phi, rho, tol)?;
    let sigma_out = image(phi, sigma, tol)?;
    let after = relative_entropy_detailed(&rho_out, &sigma_out, tol)?;
    Ok((before.value, after.value, rho_out, sigma_out))
}

/// `S(Φρ‖Φσ) ≤ S(ρ‖σ)` with the slack reported; for bistochastic Φ and σ = I/N
/// also `S(Φρ) ≥ S(ρ)`.
pub fn entropy_monotonicity_check(
    phi: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tol: &ToleranceConfig,
) -> Result<MonotonicityReport> {
    let (before, after, rho_out, _) = relative_pair(phi, rho, sigma, tol)?;
    let slack = before - after;
    let n = phi.dim();
    let mixed = frobenius(&(sigma.matrix() - identity(n).scale(1.0 / n as f64))) <= tol.eq;
    let entropy_gain = (mixed && phi.classify(tol).is_bistochastic())
        .then(|| von_neumann_entropy(&rho_out) - von_neumann_entropy(rho));
    Ok(MonotonicityReport {
        relative_before: before,
        relative_after: after,
        slack,
        holds: slack >= -tol.eq && entropy_gain.is_none_or(|g| g >= -tol.eq),
        entropy_gain,
    })
}

/// Relative-entropy equality against exact recovery by the σ-weighted map.
pub fn check_petz_equality(
    phi: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tol: &ToleranceConfig,
) -> Result<PetzReport> {
    let (before, after, rho_out, _) = relative_pair(phi, rho, sigma, tol)?;
    let recovery = phi.petz_recovery(sigma, tol)?;
    let recovered = recovery.apply_unchecked(rho_out.matrix());
    let recovery_residual = frobenius(&(recovered - rho.matrix()));
    let relative_gap = (before - after).abs();
    let equality = relative_gap <= tol.eq;
    let recovered = recovery_residual <= tol.fix;
    Ok(PetzReport {
        relative_before: before,
        relative_after: after,
        relative_gap,
        recovery_residual,
        equality,
        recovered,
        agreement: equality == recovered,
    })
}

pub fn map_entropy_preservation_report(
    phi: &KrausChannel,
    psi: &KrausChannel,
    tol: &ToleranceConfig,
) -> Result<MapEntropyReport> {
    phi.require_bistochastic(tol)?;
    psi.require_stochastic(tol)?;
    check_dim(phi.dim(), psi.dim())?;
    let map_entropy_inner = map_entropy(psi, tol)?;
    let map_entropy_composed = map_entropy(&phi.compose(psi)?, tol)?;
    let s_phi = phi.superoperator_matrix();
    let s_psi = psi.superoperator_matrix();
    let lhs = s_phi.adjoint().compose(&s_phi).compose(&s_psi);
    let superoperator_residual = lhs.distance(&s_psi);
    let entropy_gap = map_entropy_composed - map_entropy_inner;
    let entropy_verdict = entropy_gap.abs() <= tol.eq;
    let fixed_verdict = superoperator_residual <= tol.fix;
    Ok(MapEntropyReport {
        map_entropy_inner,
        map_entropy_composed,
        entropy_gap,
        superoperator_residual,
        entropy_verdict,
        fixed_verdict,
        agreement: entropy_verdict == fixed_verdict,
    })
}
