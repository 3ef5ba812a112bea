//! Relative entropy of entanglement and spectral-truncation approximation for
//! small multipartite quantum systems.
//!
//! The crate is `no_std` (with `alloc`). Every routine is a pure function of
//! its inputs; randomness comes from an explicit seed.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod approx;
pub mod energy;
pub mod entropic;
pub mod error;
pub mod layout;
pub(crate) mod math;
pub mod matrix;
pub mod operator;
pub mod pure;
pub mod random;
pub mod ree;
pub mod separable;

pub use approx::{
    approx_map, build_fa_hamiltonian, default_fa_weights, spectral_projector, theorem1_bound,
    truncation_experiment, FaHamiltonian, Functional, TruncationBound, TruncationResult,
    TruncationRow, TruncationTable,
};
pub use energy::{gibbs_state, max_entropy_f, max_entropy_f_bar, FFunction, HamiltonianSpec};
pub use entropic::{
    binary_entropy, conditional_entropy_ext, g_func, mutual_information, relative_entropy,
    von_neumann_entropy, RelEntropy,
};
pub use error::{Error, Result};
pub use layout::SubsystemLayout;
pub use matrix::CMatrix;
pub use num_complex::Complex64;
pub use operator::{
    hermitian_eig, marginals, partial_trace, tensor, tensor_all, trace_distance, Eigen,
    HermitianOperator,
};
pub use pure::{purify, schmidt_decompose, PureState, SchmidtDecomposition};
pub use random::{random_density, random_pure, Sampler};
pub use ree::{
    audit_state, energy_constrained_ree, estimate_ree, ree_lower_bounds, AuditOptions, AuditReport,
    SolveOptions, SolveResult,
};
pub use separable::{assemble, lemma_omega_state, random_separable, ProductAtom, ProductEnsemble};
