use super::{Block, BlockSpec, BlockStructure};
use crate::channels::KrausChannel;
use crate::error::Result;
use crate::generators::{bistochastic_channel_with, density_with, rng_from_seed, unitary_with};
use crate::linalg::{identity, kron, ComplexMatrix};
use crate::states::DensityMatrix;
use crate::tolerance::ToleranceConfig;

/// Number of random unitaries in each right factor `Φ^R_k`. Two would leave a
/// non-trivial commutant for generic draws as often as not; three do not.
const RIGHT_UNITARIES: usize = 3;

#[derive(Debug, Clone)]
pub struct SynthesizedPair {
    pub channel: KrausChannel,
    pub state: DensityMatrix,
    pub structure: BlockStructure,
}

/// Build `Φ = ⊕ Ad_{U_k} ⊗ Φ^R_k` and `ρ = ⊕ p_k ρ^L_k ⊗ I/dR_k`, embedded in
/// `C^N` by a random unitary change of basis.
///
/// Missing `U_k` and `ρ^L_k` are drawn at random (the latter full rank). Each
/// `Φ^R_k` is a random mixed-unitary channel, or the identity when `dR = 1`.
/// Every Kraus operator is supported on a single block, so coherences between
/// blocks are removed.
pub fn synthesize_pair(spec: &BlockSpec, seed: u64) -> Result<SynthesizedPair> {
    let tol = ToleranceConfig::default();
    spec.validate(&tol)?;
    let n = spec.total_dim();
    let mut rng = rng_from_seed(seed);
    let basis = unitary_with(&mut rng, n);

    let mut kraus = Vec::new();
    let mut rho = ComplexMatrix::zeros(n, n);
    let mut blocks = Vec::with_capacity(spec.dims.len());
    let mut offset = 0;
    for (k, &(dl, dr)) in spec.dims.iter().enumerate() {
        let size = dl * dr;
        let v = basis.columns(offset, size).into_owned();
        offset += size;

        let u = match &spec.left_unitaries {
            Some(us) => us[k].clone(),
            None => unitary_with(&mut rng, dl),
        };
        let right = if dr == 1 {
            vec![identity(1)]
        } else {
            bistochastic_channel_with(&mut rng, dr, RIGHT_UNITARIES).kraus().to_vec()
        };
        for r in &right {
            kraus.push(&v * kron(&u, r) * v.adjoint());
        }

        let left = match &spec.left_states {
            Some(states) => states[k].matrix().clone(),
            None => density_with(&mut rng, dl, dl)?.into_matrix(),
        };
        let local = kron(&left, &identity(dr)).scale(spec.weights[k] / dr as f64);
        rho += &v * local * v.adjoint();

        blocks.push(Block { isometry: v, dl, dr });
    }

    let relaxed = ToleranceConfig {
        trace: tol.eq,
        ..tol
    };
    Ok(SynthesizedPair {
        channel: KrausChannel::new(kraus, &tol)?,
        state: DensityMatrix::new(rho, &relaxed)?,
        structure: BlockStructure::new(n, blocks),
    })
}
