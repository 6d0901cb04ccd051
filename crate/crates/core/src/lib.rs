//! Entropy-preserving quantum operations.
//!
//! A bistochastic channel Φ preserves the von Neumann entropy of a state ρ
//! exactly when `Φ†Φ(ρ) = ρ`, and exactly when ρ and Φ share a block structure
//! `H = ⊕ H^L_k ⊗ H^R_k` with Φ unitary on each left factor and ρ maximally
//! mixed on each right factor. This crate decides, certifies and constructs
//! such pairs, together with the map-entropy and classical analogues.
//!
//! ```
//! use qpreserve::{entropy_preservation_report, synthesize_pair, BlockSpec, ToleranceConfig};
//!
//! let pair = synthesize_pair(&BlockSpec::uniform(vec![(2, 1), (1, 2)]), 7).unwrap();
//! let report =
//!     entropy_preservation_report(&pair.channel, &pair.state, &ToleranceConfig::default()).unwrap();
//! assert!(report.verdict_i && report.verdict_ii);
//! ```

pub mod channels;
pub mod choi;
pub mod classical;
pub mod entropy_analysis;
pub mod error;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod states;
pub mod tolerance;

pub use channels::{ChannelKind, Classification, KrausChannel, SuperoperatorMatrix};
pub use choi::{channel_from_choi, choi_matrix, map_entropy, ChoiMatrix};
pub use classical::{
    bridge_check, channel_from_bistochastic, corollary_check, kraus_matrix, shannon_entropy,
    BridgeReport, CorollaryReport, ProbabilityVector, StochasticMatrix,
};
pub use entropy_analysis::{
    check_petz_equality, decompose_fixed_point_algebra, entropy_monotonicity_check,
    entropy_preservation_report, fixed_point_space, map_entropy_preservation_report,
    synthesize_pair, verify_block_structure, Block, BlockSpec, BlockStructure, FixedPointBasis,
    MapEntropyReport, MonotonicityReport, PetzReport, PreservationReport, SynthesizedPair,
};
pub use error::{Error, Result, StructureCheck};
pub use linalg::{ComplexMatrix, Complex64};
pub use states::{relative_entropy, von_neumann_entropy, DensityMatrix};
pub use tolerance::ToleranceConfig;
