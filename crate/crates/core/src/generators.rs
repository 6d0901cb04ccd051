//! Seeded instance generation.
//!
//! Every generator is a pure function of its parameters and a `u64` seed. The
//! stream comes from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`), which is
//! platform independent, so a seed reproduces the same instance everywhere.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::channels::KrausChannel;
use crate::classical::{ProbabilityVector, StochasticMatrix};
use crate::entropy_analysis::BlockSpec;
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix};
use crate::states::DensityMatrix;
use crate::tolerance::ToleranceConfig;
use nalgebra::DMatrix;

pub type Rng64 = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n × m` matrix of independent complex standard normals (unit variance per entry).
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(n, m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re * scale, im * scale)
    })
}

/// Uniform point on the probability simplex with `k` vertices.
pub fn simplex_weights<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

pub fn unitary_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, n);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, k)] *= phase;
        }
    }
    q
}

pub fn density_with<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> Result<DensityMatrix> {
    if rank == 0 || rank > n {
        return Err(Error::InvalidRank { rank, dim: n });
    }
    let g = ginibre(rng, n, rank);
    let gg = &g * g.adjoint();
    let tr = crate::linalg::trace(&gg).re;
    DensityMatrix::new(gg.scale(1.0 / tr), &ToleranceConfig::default())
}

pub fn bistochastic_channel_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    num_unitaries: usize,
) -> KrausChannel {
    assert!(num_unitaries >= 1, "need at least one unitary");
    let weights = simplex_weights(rng, num_unitaries);
    let kraus = weights
        .iter()
        .map(|&w| unitary_with(rng, n).scale(w.sqrt()))
        .collect();
    KrausChannel::from_parts(n, kraus)
}

pub fn stochastic_channel_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    env_dim: usize,
) -> KrausChannel {
    assert!(env_dim >= 1, "environment dimension must be positive");
    let u = unitary_with(rng, n * env_dim);
    // isometry H → H ⊗ E, row index i·env + e
    let kraus = (0..env_dim)
        .map(|e| ComplexMatrix::from_fn(n, n, |i, j| u[(i * env_dim + e, j)]))
        .collect();
    KrausChannel::from_parts(n, kraus)
}

pub fn permutation_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// Permutation matrix sending basis vector `j` to `perm[j]`.
pub fn permutation_matrix(perm: &[usize]) -> DMatrix<f64> {
    let n = perm.len();
    let mut m = DMatrix::zeros(n, n);
    for (j, &i) in perm.iter().enumerate() {
        m[(i, j)] = 1.0;
    }
    m
}

pub fn bistochastic_matrix_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    num_perms: usize,
) -> StochasticMatrix {
    assert!(num_perms >= 1, "need at least one permutation");
    let weights = simplex_weights(rng, num_perms);
    let mut m = DMatrix::zeros(n, n);
    for w in weights {
        m += permutation_matrix(&permutation_with(rng, n)) * w;
    }
    StochasticMatrix::new(m, &ToleranceConfig::default()).expect("Birkhoff mixture is bistochastic")
}

/// `G G† / tr(G G†)` with `G` an `n × rank` complex Ginibre matrix.
pub fn random_density(n: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    density_with(&mut rng_from_seed(seed), n, rank)
}

/// QR of a complex Ginibre matrix with the phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
    unitary_with(&mut rng_from_seed(seed), n)
}

/// Mixed-unitary channel `{√w_i U_i}` with simplex weights.
pub fn random_bistochastic_channel(n: usize, num_unitaries: usize, seed: u64) -> KrausChannel {
    bistochastic_channel_with(&mut rng_from_seed(seed), n, num_unitaries)
}

/// Stinespring channel `M_e = (I ⊗ ⟨e|) V` from a random isometry `V: H → H ⊗ E`.
pub fn random_stochastic_channel(n: usize, env_dim: usize, seed: u64) -> KrausChannel {
    stochastic_channel_with(&mut rng_from_seed(seed), n, env_dim)
}

/// Birkhoff mixture of `num_perms` random permutation matrices.
pub fn random_bistochastic_matrix(n: usize, num_perms: usize, seed: u64) -> StochasticMatrix {
    bistochastic_matrix_with(&mut rng_from_seed(seed), n, num_perms)
}

pub fn random_probability_vector(n: usize, seed: u64) -> ProbabilityVector {
    let w = simplex_weights(&mut rng_from_seed(seed), n);
    ProbabilityVector::new(w, &ToleranceConfig::default()).expect("simplex sample is valid")
}

/// Random partition of `n` into blocks `dL × dR` with simplex weights.
pub fn random_block_spec(n: usize, seed: u64) -> BlockSpec {
    assert!(n >= 1);
    let mut rng = rng_from_seed(seed);
    let mut remaining = n;
    let mut dims = Vec::new();
    while remaining > 0 {
        let size = rng.random_range(1..=remaining);
        let divisors: Vec<usize> = (1..=size).filter(|d| size % d == 0).collect();
        let dl = divisors[rng.random_range(0..divisors.len())];
        dims.push((dl, size / dl));
        remaining -= size;
    }
    let weights = simplex_weights(&mut rng, dims.len());
    BlockSpec::new(dims, weights)
}

/// A bistochastic `B = P (⊕_k J_{m_k}/m_k) Q` with permutations `P`, `Q` and a
/// `p = Qᵀu` where `u` is constant on each block, so `BᵀBp = p` and `H(Bp) = H(p)`.
pub fn preserving_classical_instance(n: usize, seed: u64) -> (StochasticMatrix, ProbabilityVector) {
    assert!(n >= 1);
    let mut rng = rng_from_seed(seed);
    let mut sizes = Vec::new();
    let mut remaining = n;
    while remaining > 0 {
        let m = rng.random_range(1..=remaining);
        sizes.push(m);
        remaining -= m;
    }
    let weights = simplex_weights(&mut rng, sizes.len());
    let mut averaging = DMatrix::zeros(n, n);
    let mut u = Vec::with_capacity(n);
    let mut offset = 0;
    for (&m, &w) in sizes.iter().zip(&weights) {
        for i in 0..m {
            for j in 0..m {
                averaging[(offset + i, offset + j)] = 1.0 / m as f64;
            }
            u.push(w / m as f64);
        }
        offset += m;
    }
    let p_perm = permutation_matrix(&permutation_with(&mut rng, n));
    let q_perm = permutation_matrix(&permutation_with(&mut rng, n));
    let b = &p_perm * averaging * &q_perm;
    let p = q_perm.transpose() * nalgebra::DVector::from_vec(u);
    let tol = ToleranceConfig::default();
    (
        StochasticMatrix::new(b, &tol).expect("permuted block averaging is bistochastic"),
        ProbabilityVector::new(p.iter().copied().collect(), &tol).expect("weights sum to one"),
    )
}
