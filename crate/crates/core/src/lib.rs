//! Exact, desk-scale computation of the conditional structure of lattice
//! random fields.
//!
//! Everything here is pure: finite-dimensional distributions over a finite
//! window of `Z^d`, finite-conditional kernels and their limits along
//! filtrations, transition energies and Hamiltonians, a-priori
//! specifications with axiom validators, and the diagnostics that separate
//! uniformly converging (Gibbsian) conditionals from non-convergent ones.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, reports and the
//! command line live in the `gfl` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod conditionals;
pub mod diagnostics;
pub mod energy;
pub mod error;
pub mod fields;
pub mod lattice;
pub mod models;
pub mod scalar;
pub mod specifications;

pub use conditionals::{
    check_one_point_consistency, check_pair_consistency, finite_conditional,
    limit_along_filtration, markov_radius, reconstruct_from_one_point, reconstruct_with_order,
    Boundary, BoundaryFamily, ConditionalKernel, LimitEstimate,
};
pub use diagnostics::{
    filtration_independence_check, energy_criterion_report, non_gibbs_witness,
    quasilocality_report, uniform_convergence_report, ConvergenceReport, QuasilocalVerdict,
    Verdict, WitnessStrategy,
};
pub use energy::{
    check_cocycle, check_decomposition, check_hamiltonian_consistency, check_one_point_exchange,
    gibbs_form_from_energy, hamiltonian_from_energy, transition_energy, HamiltonianTable,
    HamiltonianValue, TransitionEnergy,
};
pub use error::{Error, Result};
pub use fields::{
    check_marginal_consistency, marginalize, table_field, FiniteDistribution, ProductField,
    RandomField, TableField,
};
pub use lattice::{
    box_filtration, enumerate_configurations, Alphabet, Configuration, Filtration,
    NeighborhoodSystem, Site, Symbol, Volume,
};
pub use models::{example1_pair, example2_model, BernoulliMixture, IsingDemo, MarkovChainPair, Tau};
pub use scalar::{Rational, Scalar, DEFAULT_TOL};
pub use specifications::{
    finite_volume_gibbs, hamiltonian_from_potential, onepoint_spec_from_tef, spec_from_onepoint,
    tef_from_1spec, tef_from_potential, validate_1spec, validate_spec, validate_tef,
    OnePointSpec, OnePointTef, Potential, Specification, ValidationReport,
};
