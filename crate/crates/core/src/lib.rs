//! Computational toolkit for isospectral deformations of torus-equivariant
//! geometries, specialized to the noncommutative 2-torus.
//!
//! The crate models smooth-algebra elements as finitely supported weight
//! expansions and provides:
//!
//! - [`graded_core`]: the deformed product ∗_θ, star structure, component
//!   projections, Fejér smoothing, and matrix amplifications.
//! - [`spectral`]: truncated spectral data (lattice Hilbert space, Dirac
//!   operator, left regular representation), operator deformation, seminorms,
//!   decay certification, and spectral zeta sums.
//! - [`projections`]: concrete smooth projections (bump-profile and Bott
//!   classes) used as pairing test bodies.
//! - [`cocycles`]: the trace and its deformed cyclic cochains, contraction
//!   calculus, Chern-character pairings, and a Fredholm index oracle.
//! - [`crossed_products`]: the crossed-product presentation, kernel-form
//!   isomorphism, and conjugation checks.
//! - [`io`]: JSON/CSV serialization for elements, matrices, and reports.

pub mod cocycles;
pub mod crossed_products;
pub mod graded_core;
pub mod io;
pub mod projections;
pub mod spectral;

pub use num_complex;

pub use cocycles::{
    chern_cocycle_eval, chern_collapse, chern_normalizer, combined_cocycle_eval,
    deformed_cocycle_eval, double_contraction_operator_side, fredholm_index_oracle, k0_pairing,
    trace_tau, trace_tau_matrix, CochainBase, CocycleError, CyclicCochain, Derivation,
    IndexReport, PairingReport,
};
pub use crossed_products::{
    bimodule_check, crossed_multiply, inner_product, inverse_kernel_map, kernel_map,
    kernel_map_element, u0_conjugation_check, BimoduleReport, BimoduleVector, ConjugationReport,
    CrossedElement, CrossedError, MaskReport, MatrixOverDeformed,
};
pub use graded_core::{
    component_by_integration, component_projection, deformed_product, fejer_coefficients,
    fejer_smooth, phase_factor, star, verify_projection, FejerKind, GradedElement, GradedError,
    MatrixGradedElement, ProjectionReport, Weight,
};
pub use projections::{bott_projection, powers_rieffel, BumpProfile, ProfileKind, ProjectionError};
pub use spectral::{
    build_truncation, commutator, deform_operator, operator_norm, represent, represent_lattice,
    represent_matrix, represent_matrix_spinor, seminorm_nu, verify_decay, zeta_partial,
    DecayReport, DiracTruncation, GeneratorPair, SpectralError, TruncatedHilbert,
    TruncatedOperator,
};
