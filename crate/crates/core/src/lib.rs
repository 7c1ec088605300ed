//! Classical Heisenberg antiferromagnet ground states on the C60 fullerene
//! graph and related polyhedra.
//!
//! The pipeline: build the molecular graph, assemble the nearest-neighbor
//! coupling matrix, solve its dense symmetric eigenproblem, and fold the
//! bottom (triply degenerate) eigenspace into per-site unit spin vectors.
//! Precession dynamics and a projected-gradient optimizer over the product
//! of unit spheres provide independent cross-checks, and an anisotropy
//! sweep quantifies sensitivity to bond-class coupling imbalance.

pub mod anisotropy;
pub mod dynamics;
pub mod eigen;
pub mod graph;
pub mod io;
pub mod optimize;
pub mod spin;

pub use anisotropy::{
    delta_grid, state_overlap, sweep, weighted_spectrum, AnisotropyError, OverlapReport,
    SweepRow, NOMINAL_DELTA,
};
pub use dynamics::{
    integrate, stationarity_test, DynamicsError, IntegrationOptions, TrajectoryState,
};
pub use eigen::{
    degenerate_group, orthonormalize, solve_symmetric, DegenerateGroup, EigenError,
    EigenGroup, EigenSystem, GroupSelector,
};
pub use graph::{
    build_c60, build_c60_with, build_toy, face_census, faces, neighbor_matrix, BondClass,
    C60Geometry, GraphError, MolecularGraph, NeighborMatrix, Toy,
};
pub use io::IoError;
pub use optimize::{
    certify, minimize, Certification, MinimizeResult, OptimizeError, OptimizerConfig,
    StepSchedule,
};
pub use spin::{
    energy, frustration_report, ground_state, hypothetical_minimum, random_directions,
    spectral_bound, sublattice_decomposition, CouplingModel, FrustrationReport,
    SpinConfiguration, SpinError, SublatticeReport,
};
