//! Entropy preservation: the state criterion, the map-entropy criterion, the
//! monotonicity and recovery checks, and the block structure behind them.
//!
//! For a bistochastic channel Φ and a state ρ the following are checked to agree:
//! `S(Φ(ρ)) = S(ρ)`, `Φ†Φ(ρ) = ρ`, and the existence of a decomposition
//! `H = ⊕_k H^L_k ⊗ H^R_k` on which `ρ = ⊕ p_k ρ^L_k ⊗ I/d^R_k` and
//! `Φ = ⊕ Ad_{U_k} ⊗ Φ^R_k`.

mod decompose;
mod fixed_point;
mod reports;
mod structure;
mod synthesize;

pub use decompose::{algebra_form_residual, decompose_fixed_point_algebra};
pub use fixed_point::{fixed_point_space, FixedPointBasis};
pub use reports::{
    check_petz_equality, entropy_monotonicity_check, entropy_preservation_report,
    map_entropy_preservation_report, MapEntropyReport, MonotonicityReport, PetzReport,
    PreservationReport,
};
pub use structure::{verify_block_structure, BlockResiduals, BlockVerification, ExtractedBlock};
pub use synthesize::{synthesize_pair, SynthesizedPair};

use crate::error::{Error, Result, StructureCheck};
use crate::linalg::{frobenius, identity, ComplexMatrix};
use crate::states::DensityMatrix;
use crate::tolerance::ToleranceConfig;

/// One summand `H^L ⊗ H^R`, embedded in `H` by an isometry whose column
/// `a · dR + r` is the image of `|a⟩ ⊗ |r⟩`.
#[derive(Debug, Clone)]
pub struct Block {
    pub isometry: ComplexMatrix,
    pub dl: usize,
    pub dr: usize,
}

impl Block {
    pub fn size(&self) -> usize {
        self.dl * self.dr
    }

    /// Orthogonal projector onto the range of the isometry.
    pub fn projector(&self) -> ComplexMatrix {
        &self.isometry * self.isometry.adjoint()
    }
}

/// The decomposition `H = ⊕_k H^L_k ⊗ H^R_k`.
#[derive(Debug, Clone)]
pub struct BlockStructure {
    pub dim: usize,
    pub blocks: Vec<Block>,
}

impl BlockStructure {
    pub fn new(dim: usize, blocks: Vec<Block>) -> Self {
        let mut s = Self { dim, blocks };
        s.canonicalize();
        s
    }

    /// Sorted `(dL, dR)` pairs.
    pub fn dims(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().map(|b| (b.dl, b.dr)).collect()
    }

    /// Order blocks by `(dL, dR)`, breaking ties on the rounded entries of each
    /// block's range projector, which does not depend on the isometry's gauge.
    pub fn canonicalize(&mut self) {
        let key = |b: &Block| -> (usize, usize, Vec<(i64, i64)>) {
            let p = b.projector();
            let entries = p
                .iter()
                .map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64))
                .collect();
            (b.dl, b.dr, entries)
        };
        let mut keyed: Vec<_> = self.blocks.drain(..).map(|b| (key(&b), b)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        self.blocks = keyed.into_iter().map(|(_, b)| b).collect();
    }

    /// Largest of `‖V_k†V_k − I‖_F`, `‖V_j†V_k‖_F` and the completeness defect.
    pub fn invariant_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        let mut total = ComplexMatrix::zeros(self.dim, self.dim);
        for (j, bj) in self.blocks.iter().enumerate() {
            let gram = bj.isometry.adjoint() * &bj.isometry;
            worst = worst.max(frobenius(&(gram - identity(bj.size()))));
            for bk in &self.blocks[j + 1..] {
                worst = worst.max(frobenius(&(bj.isometry.adjoint() * &bk.isometry)));
            }
            total += bj.projector();
        }
        worst.max(frobenius(&(total - identity(self.dim))))
    }

    pub fn check_invariants(&self, tol: &ToleranceConfig) -> Result<()> {
        let size: usize = self.blocks.iter().map(Block::size).sum();
        let bad_shape = self
            .blocks
            .iter()
            .any(|b| b.isometry.nrows() != self.dim || b.isometry.ncols() != b.size());
        if size != self.dim || bad_shape || self.blocks.is_empty() {
            return Err(Error::StructureMismatch {
                check: StructureCheck::Isometry,
                residual: f64::INFINITY,
            });
        }
        let residual = self.invariant_residual();
        if residual > tol.recon * self.dim as f64 {
            return Err(Error::StructureMismatch {
                check: StructureCheck::Isometry,
                residual,
            });
        }
        Ok(())
    }
}

/// Requested block dimensions and weights for [`synthesize_pair`], with optional
/// explicit left states `ρ^L_k` and unitaries `U_k`.
#[derive(Debug, Clone)]
pub struct BlockSpec {
    pub dims: Vec<(usize, usize)>,
    pub weights: Vec<f64>,
    pub left_states: Option<Vec<DensityMatrix>>,
    pub left_unitaries: Option<Vec<ComplexMatrix>>,
}

impl BlockSpec {
    pub fn new(dims: Vec<(usize, usize)>, weights: Vec<f64>) -> Self {
        Self {
            dims,
            weights,
            left_states: None,
            left_unitaries: None,
        }
    }

    /// Equal weight on every block.
    pub fn uniform(dims: Vec<(usize, usize)>) -> Self {
        let k = dims.len().max(1);
        let weights = vec![1.0 / k as f64; dims.len()];
        Self::new(dims, weights)
    }

    pub fn with_left_states(mut self, states: Vec<DensityMatrix>) -> Self {
        self.left_states = Some(states);
        self
    }

    pub fn with_left_unitaries(mut self, unitaries: Vec<ComplexMatrix>) -> Self {
        self.left_unitaries = Some(unitaries);
        self
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().map(|(l, r)| l * r).sum()
    }

    /// Parse `"2x1,1x2"` into uniform-weight dims.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dims = Vec::new();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (l, r) = part
                .split_once(['x', 'X', '×'])
                .ok_or_else(|| Error::InvalidSpec(format!("expected dLxdR, got {part:?}")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidSpec(format!("bad dimension {s:?}")))
            };
            dims.push((parse(l)?, parse(r)?));
        }
        if dims.is_empty() {
            return Err(Error::InvalidSpec("no blocks given".into()));
        }
        Ok(Self::uniform(dims))
    }

    pub fn validate(&self, tol: &ToleranceConfig) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::InvalidSpec("no blocks given".into()));
        }
        if self.dims.iter().any(|&(l, r)| l == 0 || r == 0) {
            return Err(Error::InvalidSpec("block dimensions must be positive".into()));
        }
        if self.weights.len() != self.dims.len() {
            return Err(Error::InvalidSpec(format!(
                "{} weights for {} blocks",
                self.weights.len(),
                self.dims.len()
            )));
        }
        if self.weights.iter().any(|&w| !(w >= -tol.psd) || !w.is_finite()) {
            return Err(Error::InvalidSpec("weights must be non-negative".into()));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > tol.eq {
            return Err(Error::InvalidSpec(format!("weights sum to {total}")));
        }
        if let Some(states) = &self.left_states {
            if states.len() != self.dims.len()
                || states.iter().zip(&self.dims).any(|(s, &(l, _))| s.dim() != l)
            {
                return Err(Error::InvalidSpec("left states do not match dL".into()));
            }
        }
        if let Some(us) = &self.left_unitaries {
            if us.len() != self.dims.len() {
                return Err(Error::InvalidSpec("left unitaries do not match blocks".into()));
            }
            for (u, &(l, _)) in us.iter().zip(&self.dims) {
                if u.nrows() != l || u.ncols() != l {
                    return Err(Error::InvalidSpec("left unitary has wrong size".into()));
                }
                let resid = frobenius(&(u.adjoint() * u - identity(l)));
                if resid > tol.eq * l as f64 {
                    return Err(Error::InvalidSpec(format!("left unitary residual {resid:e}")));
                }
            }
        }
        Ok(())
    }
}
