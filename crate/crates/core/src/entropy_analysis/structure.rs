use serde::Serialize;

use super::{Block, BlockStructure};
use crate::channels::KrausChannel;
use crate::error::{Error, Result, StructureCheck};
use crate::io::serialize_matrix;
use crate::linalg::{
    self, c, frobenius, identity, kron, matrix_unit, partial_trace_first, partial_trace_second,
    ComplexMatrix, Spectrum,
};
use crate::states::DensityMatrix;
use crate::tolerance::ToleranceConfig;

/// Residual of every sub-check, worst case over blocks.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct BlockResiduals {
    pub isometry: f64,
    pub state_block_diagonal: f64,
    pub state_factorization: f64,
    pub channel_invariance: f64,
    pub channel_factorization: f64,
    pub left_unitary: f64,
    pub right_bistochastic: f64,
}

impl BlockResiduals {
    fn merge(&mut self, other: &BlockResiduals) {
        self.isometry = self.isometry.max(other.isometry);
        self.state_block_diagonal = self.state_block_diagonal.max(other.state_block_diagonal);
        self.state_factorization = self.state_factorization.max(other.state_factorization);
        self.channel_invariance = self.channel_invariance.max(other.channel_invariance);
        self.channel_factorization = self.channel_factorization.max(other.channel_factorization);
        self.left_unitary = self.left_unitary.max(other.left_unitary);
        self.right_bistochastic = self.right_bistochastic.max(other.right_bistochastic);
    }
}

/// What the verification read off one block: `p_k`, `ρ^L_k` and `U_k` (up to phase).
#[derive(Debug, Clone, Serialize)]
pub struct ExtractedBlock {
    pub dl: usize,
    pub dr: usize,
    pub weight: f64,
    /// `None` when the block carries no weight.
    #[serde(skip)]
    pub left_state: Option<DensityMatrix>,
    #[serde(serialize_with = "serialize_matrix")]
    pub left_unitary: ComplexMatrix,
    pub residuals: BlockResiduals,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockVerification {
    pub blocks: Vec<ExtractedBlock>,
    pub residuals: BlockResiduals,
}

fn fail(check: StructureCheck, residual: f64) -> Error {
    Error::StructureMismatch { check, residual }
}

/// Check that `ρ = ⊕ p_k ρ^L_k ⊗ I/dR_k` and `Φ = ⊕ Ad_{U_k} ⊗ Φ^R_k` on `structure`.
///
/// State checks use `ε_eq·N`, channel checks `ε_eq·N²`. The first failing
/// sub-check is reported as [`Error::StructureMismatch`].
pub fn verify_block_structure(
    structure: &BlockStructure,
    phi: &KrausChannel,
    rho: &DensityMatrix,
    tol: &ToleranceConfig,
) -> Result<BlockVerification> {
    let n = structure.dim;
    for got in [phi.dim(), rho.dim()] {
        if got != n {
            return Err(Error::DimensionMismatch { expected: n, got });
        }
    }
    structure.check_invariants(tol)?;
    let state_bound = tol.eq * n as f64;
    let channel_bound = tol.eq * (n * n) as f64;

    let pinched = structure
        .blocks
        .iter()
        .map(Block::projector)
        .fold(ComplexMatrix::zeros(n, n), |acc, p| acc + &p * rho.matrix() * &p);
    let mut total = BlockResiduals {
        isometry: structure.invariant_residual(),
        state_block_diagonal: frobenius(&(rho.matrix() - pinched)),
        ..Default::default()
    };
    if total.state_block_diagonal > state_bound {
        return Err(fail(StructureCheck::StateBlockDiagonal, total.state_block_diagonal));
    }

    let mut blocks = Vec::with_capacity(structure.blocks.len());
    for block in &structure.blocks {
        let extracted = verify_block(block, phi, rho, tol)?;
        let r = &extracted.residuals;
        let checks = [
            (StructureCheck::StateFactorization, r.state_factorization, state_bound),
            (StructureCheck::ChannelInvariance, r.channel_invariance, channel_bound),
            (StructureCheck::ChannelFactorization, r.channel_factorization, channel_bound),
            (StructureCheck::LeftUnitary, r.left_unitary, channel_bound),
            (StructureCheck::RightBistochastic, r.right_bistochastic, channel_bound),
        ];
        for (check, residual, bound) in checks {
            if !(residual <= bound) {
                return Err(fail(check, residual));
            }
        }
        total.merge(r);
        blocks.push(extracted);
    }
    Ok(BlockVerification {
        blocks,
        residuals: total,
    })
}

fn verify_block(
    block: &Block,
    phi: &KrausChannel,
    rho: &DensityMatrix,
    tol: &ToleranceConfig,
) -> Result<ExtractedBlock> {
    let (dl, dr) = (block.dl, block.dr);
    let size = block.size();
    let v = &block.isometry;
    let vd = v.adjoint();
    let p = block.projector();
    let mut residuals = BlockResiduals::default();

    let m = &vd * rho.matrix() * v;
    let weight = linalg::trace(&m).re;
    let left_state = if weight > tol.psd {
        let left = partial_trace_second(&m, dl, dr).scale(1.0 / weight);
        let product = kron(&left, &identity(dr)).scale(weight / dr as f64);
        residuals.state_factorization = frobenius(&(&m - product));
        let relaxed = ToleranceConfig {
            trace: tol.trace.max(tol.eq),
            herm: tol.herm.max(tol.eq),
            ..*tol
        };
        Some(DensityMatrix::new(linalg::hermitian_part(&left), &relaxed)?)
    } else {
        residuals.state_factorization = frobenius(&m);
        None
    };

    // T(E_ab ⊗ E_rs) for every matrix unit of the block, indexed by (row, col)
    // of the unit in the product basis.
    let mut images = Vec::with_capacity(size * size);
    for col in 0..size {
        for row in 0..size {
            let input = v.column(row) * v.column(col).adjoint();
            let out = phi.apply_unchecked(&input);
            residuals.channel_invariance = residuals
                .channel_invariance
                .max(frobenius(&(&out - &p * &out * &p)));
            images.push(&vd * out * v);
        }
    }
    let image = |a: usize, r: usize, b: usize, s: usize| &images[(b * dr + s) * size + a * dr + r];

    // A(E_ab) = Tr_R T(E_ab ⊗ I)/dR and R(E_rs) = Tr_L T(I ⊗ E_rs)/dL
    let left_map = |a: usize, b: usize| {
        (0..dr).fold(ComplexMatrix::zeros(dl, dl), |acc, r| {
            acc + partial_trace_second(image(a, r, b, r), dl, dr)
        }) / c(dr as f64, 0.0)
    };
    let right_map = |r: usize, s: usize| {
        (0..dl).fold(ComplexMatrix::zeros(dr, dr), |acc, a| {
            acc + partial_trace_first(image(a, r, a, s), dl, dr)
        }) / c(dl as f64, 0.0)
    };
    let lefts: Vec<ComplexMatrix> = (0..dl * dl).map(|k| left_map(k / dl, k % dl)).collect();
    let rights: Vec<ComplexMatrix> = (0..dr * dr).map(|k| right_map(k / dr, k % dr)).collect();
    for a in 0..dl {
        for b in 0..dl {
            for r in 0..dr {
                for s in 0..dr {
                    let product = kron(&lefts[a * dl + b], &rights[r * dr + s]);
                    residuals.channel_factorization = residuals
                        .channel_factorization
                        .max(frobenius(&(image(a, r, b, s) - product)));
                }
            }
        }
    }

    // Choi matrix of A in (output ⊗ reference) order; rank one for a unitary.
    let mut choi = ComplexMatrix::zeros(dl * dl, dl * dl);
    for a in 0..dl {
        for b in 0..dl {
            choi += kron(&lefts[a * dl + b], &matrix_unit(dl, a, b));
        }
    }
    let spec = Spectrum::of(&choi);
    let top = spec.eigenvalues[0].max(0.0).sqrt();
    let mut u = ComplexMatrix::from_fn(dl, dl, |a, i| spec.eigenvectors[(a * dl + i, 0)] * top);
    fix_phase(&mut u);
    let mut unitary_choi = ComplexMatrix::zeros(dl * dl, dl * dl);
    for a in 0..dl {
        for b in 0..dl {
            let conj = &u * matrix_unit(dl, a, b) * u.adjoint();
            unitary_choi += kron(&conj, &matrix_unit(dl, a, b));
        }
    }
    residuals.left_unitary = frobenius(&(u.adjoint() * &u - identity(dl)))
        .max(frobenius(&(choi - unitary_choi)));

    let unital = (0..dr).fold(ComplexMatrix::zeros(dr, dr), |acc, r| acc + &rights[r * dr + r]);
    let mut tp = 0.0;
    for r in 0..dr {
        for s in 0..dr {
            let expected = if r == s { 1.0 } else { 0.0 };
            tp += (linalg::trace(&rights[r * dr + s]) - c(expected, 0.0)).norm_sqr();
        }
    }
    residuals.right_bistochastic = frobenius(&(unital - identity(dr))).max(tp.sqrt());

    Ok(ExtractedBlock {
        dl,
        dr,
        weight,
        left_state,
        left_unitary: u,
        residuals,
    })
}

/// Rotate the global phase so the largest-magnitude entry is real and positive.
fn fix_phase(u: &mut ComplexMatrix) {
    let pivot = u
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(c(1.0, 0.0));
    if pivot.norm() > 0.0 {
        let phase = pivot.conj() / pivot.norm();
        u.iter_mut().for_each(|z| *z *= phase);
    }
}
