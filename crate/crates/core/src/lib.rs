//! Scattering through non-Hermitian tight-binding centers threaded by an
//! Aharonov-Bohm flux.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; IO, configuration and the command line live in
//! the `nh-diode` crate.

#![no_std]
// `!(x > 0.0)` style guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod solver;
pub mod symmetry;
pub mod transfer;

pub use analytic::{
    bethe_amplitudes, closed_form_amplitudes, conjugate_amplitudes, diode_point, limit_path_probe, omega, DiodePoint,
    LimitPath, LimitProbeReport, ScatteringAmplitudes,
};
pub use dynamics::{
    absorber_experiment, diode_experiment, directional_experiment, evolve, evolve_sampled, make_packet, AbsorberReport,
    DiodeReport, Direction, DirectionalRun, ExperimentSetup, PacketSpec, PacketTrajectory,
};
pub use error::{Error, Result};
pub use lattice::{
    build_finite_chain, build_pt_dimer, build_triangle_center, dagger_center, dispersion, group_velocity, CenterGraph,
    FiniteChain, Region, TriangleParams,
};
pub use linalg::CMatrix;
pub use solver::{
    check_residual, solve_amplitudes, solve_semi_infinite, solve_two_lead, Geometry, ScatterConfig, ScatterSolution,
    Side,
};
pub use symmetry::{
    asymmetry_metric, audit_identities, audit_identities_with, classify_symmetries, classify_symmetries_with,
    IdentityLedger, IdentityResidual, SymmetryCheck, SymmetryReport,
};
pub use transfer::{
    m22_criterion, ra_eigenfunction_check, scan_zero_flux_singularities, transfer_matrix, RaReport, ScanGrid,
    SingularityHit, TransferMatrix,
};
