//! Block decomposition of a finite-dimensional †-closed unital matrix algebra.
//!
//! The center is found as the null space of `X ↦ Σ_i ‖[X, F_i]‖²` inside the
//! algebra; a generic central element splits `H` into the minimal central
//! projections. Within each block, a generic Hermitian element of the compressed
//! algebra has `dL` eigenvalues of multiplicity `dR`, and polar parts of
//! connecting elements between its eigenspaces give matrix units, hence the
//! isometry.

use std::ops::Range;

use nalgebra::{DMatrix, DVectorView};
use rand::Rng;
use rand_distr::StandardNormal;

use super::fixed_point::hermitian_basis;
use super::{Block, BlockStructure, FixedPointBasis};
use crate::error::{Error, Result, StructureCheck};
use crate::generators::{rng_from_seed, Rng64};
use crate::linalg::{
    frobenius, hs_inner, identity, kron, partial_trace_second, real_symmetric_eigen, ComplexMatrix,
    Spectrum,
};
use crate::tolerance::ToleranceConfig;

const RETRIES: usize = 3;

/// Decompose the algebra spanned by `f` into blocks `L(H^L_k) ⊗ I_{dR_k}`.
///
/// `seed` drives the generic elements. An unlucky draw with nearly degenerate
/// eigenvalues is redrawn up to three times before giving up.
pub fn decompose_fixed_point_algebra(
    f: &FixedPointBasis,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<BlockStructure> {
    let n = f.dim;
    if f.is_empty() {
        return Err(Error::NotAnAlgebra((n as f64).sqrt()));
    }
    let closure = closure_residual(f);
    let bound = tol.fix * n as f64;
    if closure > bound {
        return Err(Error::NotAnAlgebra(closure));
    }
    let basis = if f.hermitian {
        f.basis.clone()
    } else {
        hermitian_basis(&f.basis, bound).ok_or(Error::NotAnAlgebra(closure))?
    };
    let center = center_basis(&basis, tol);
    let mut rng = rng_from_seed(seed);
    for _ in 0..=RETRIES {
        let Some(blocks) = attempt(&basis, &center, &mut rng, tol)? else {
            continue;
        };
        let structure = BlockStructure::new(n, blocks);
        structure.check_invariants(tol)?;
        let residual = algebra_form_residual(f, &structure);
        if residual > tol.group {
            return Err(Error::StructureMismatch {
                check: StructureCheck::AlgebraForm,
                residual,
            });
        }
        return Ok(structure);
    }
    Err(Error::AmbiguousGrouping(RETRIES + 1))
}

/// Largest deviation of the span from being a unital †-algebra: distance of
/// `I`, of each `F†` and of each product `F_i F_j` from the span.
fn closure_residual(f: &FixedPointBasis) -> f64 {
    let mut worst = f.distance_to_span(&identity(f.dim));
    for x in &f.basis {
        worst = worst.max(f.distance_to_span(&x.adjoint()));
        for y in &f.basis {
            worst = worst.max(f.distance_to_span(&(x * y)));
        }
    }
    worst
}

/// Largest of `‖V_k† F V_k − x ⊗ I‖_F` and `‖V_j† F V_k‖_F` (j ≠ k) over the
/// basis, where `x = Tr_R(V_k† F V_k) / dR`.
pub fn algebra_form_residual(f: &FixedPointBasis, structure: &BlockStructure) -> f64 {
    let mut worst = 0.0f64;
    for x in &f.basis {
        for (j, bj) in structure.blocks.iter().enumerate() {
            let vj = bj.isometry.adjoint();
            let m = &vj * x * &bj.isometry;
            let left = partial_trace_second(&m, bj.dl, bj.dr).scale(1.0 / bj.dr as f64);
            worst = worst.max(frobenius(&(m - kron(&left, &identity(bj.dr)))));
            for (k, bk) in structure.blocks.iter().enumerate() {
                if k != j {
                    worst = worst.max(frobenius(&(&vj * x * &bk.isometry)));
                }
            }
        }
    }
    worst
}

fn combine(elements: &[ComplexMatrix], coeffs: DVectorView<f64>) -> ComplexMatrix {
    let n = elements[0].nrows();
    elements
        .iter()
        .zip(coeffs.iter())
        .fold(ComplexMatrix::zeros(n, n), |acc, (e, &w)| acc + e.scale(w))
}

fn random_combination(elements: &[ComplexMatrix], rng: &mut Rng64) -> ComplexMatrix {
    let n = elements[0].nrows();
    elements.iter().fold(ComplexMatrix::zeros(n, n), |acc, e| {
        acc + e.scale(rng.sample::<f64, _>(StandardNormal))
    })
}

/// Hermitian basis of the center, from the null space of
/// `Q_jk = Σ_i Re⟨[F_j, F_i], [F_k, F_i]⟩`.
fn center_basis(basis: &[ComplexMatrix], tol: &ToleranceConfig) -> Vec<ComplexMatrix> {
    let d = basis.len();
    let comms: Vec<Vec<ComplexMatrix>> = basis
        .iter()
        .map(|fj| basis.iter().map(|fi| fj * fi - fi * fj).collect())
        .collect();
    let q = DMatrix::from_fn(d, d, |j, k| {
        (0..d).map(|i| hs_inner(&comms[j][i], &comms[k][i]).re).sum()
    });
    let (values, vectors) = real_symmetric_eigen(&q);
    let scale = values.last().map_or(1.0, |v| v.max(1.0));
    (0..d)
        .filter(|&k| values[k] <= tol.group * scale)
        .map(|k| combine(basis, vectors.column(k)))
        .collect()
}

/// Split descending eigenvalues into clusters. Gaps below `tol·scale` merge,
/// gaps above `√tol·scale` split, anything in between is ambiguous.
fn group_levels(values: &[f64], tol: f64) -> Option<Vec<Range<usize>>> {
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tight = tol * scale;
    let clear = tol.sqrt() * scale;
    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..values.len() {
        let gap = values[k - 1] - values[k];
        if gap > clear {
            groups.push(start..k);
            start = k;
        } else if gap > tight {
            return None;
        }
    }
    groups.push(start..values.len());
    Some(groups)
}

/// One draw of generic elements. `Ok(None)` means the draw was ambiguous.
fn attempt(
    basis: &[ComplexMatrix],
    center: &[ComplexMatrix],
    rng: &mut Rng64,
    tol: &ToleranceConfig,
) -> Result<Option<Vec<Block>>> {
    let n = basis[0].nrows();
    let d = basis.len();
    let z = random_combination(center, rng);
    let spec = Spectrum::of(&z);
    let Some(levels) = group_levels(&spec.eigenvalues, tol.group) else {
        return Ok(None);
    };
    if levels.len() != center.len() {
        return Ok(None);
    }
    let mut blocks = Vec::with_capacity(levels.len());
    for range in levels {
        let size = range.len();
        let w = spec.eigenvectors.columns(range.start, size).into_owned();
        let p = &w * w.adjoint();
        let compressed: Vec<ComplexMatrix> = basis.iter().map(|x| &p * x * &p).collect();
        // compression is an orthogonal projection of the algebra, so this Gram
        // matrix has eigenvalues 0 and 1 only
        let gram = DMatrix::from_fn(d, d, |i, j| hs_inner(&compressed[i], &compressed[j]).re);
        let (values, vectors) = real_symmetric_eigen(&gram);
        let defect = values.iter().fold(0.0f64, |m, &v| m.max(v.abs().min((v - 1.0).abs())));
        let local: Vec<ComplexMatrix> = (0..d)
            .filter(|&k| values[k] > 0.5)
            .map(|k| w.adjoint() * combine(&compressed, vectors.column(k)) * &w)
            .collect();
        let m = local.len();
        let dl = (m as f64).sqrt().round() as usize;
        if dl * dl != m || dl == 0 || size % dl != 0 || defect > tol.group {
            return Err(Error::NotAnAlgebra(defect));
        }
        let dr = size / dl;
        let isometry = if dl == 1 {
            w
        } else {
            let h = Spectrum::of(&random_combination(&local, rng));
            let Some(levels) = group_levels(&h.eigenvalues, tol.group) else {
                return Ok(None);
            };
            if levels.len() != dl || levels.iter().any(|r| r.len() != dr) {
                return Ok(None);
            }
            let ys: Vec<ComplexMatrix> = levels
                .iter()
                .map(|r| h.eigenvectors.columns(r.start, dr).into_owned())
                .collect();
            let mut v = ComplexMatrix::zeros(n, size);
            for (a, y) in ys.iter().enumerate() {
                let cols = if a == 0 {
                    &w * y
                } else {
                    &w * y * connecting_unitary(&local, &ys[0], y)
                };
                v.columns_mut(a * dr, dr).copy_from(&cols);
            }
            v
        };
        blocks.push(Block { isometry, dl, dr });
    }
    Ok(Some(blocks))
}

/// Polar part of the strongest `Y_a† G Y_0` over the block basis. It maps the
/// gauge of eigenspace `a` onto that of eigenspace 0.
fn connecting_unitary(local: &[ComplexMatrix], y0: &ComplexMatrix, ya: &ComplexMatrix) -> ComplexMatrix {
    let best = local
        .iter()
        .map(|g| ya.adjoint() * g * y0)
        .max_by(|a, b| frobenius(a).total_cmp(&frobenius(b)))
        .expect("block algebra is non-empty");
    let svd = best.svd(true, true);
    svd.u.expect("requested") * svd.v_t.expect("requested")
}
