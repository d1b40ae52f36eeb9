//! Grid, piecewise Taylor surrogate, sup-norm measurement and network assembly.

pub mod assemble;
pub mod grid;
pub mod measure;
pub mod surrogate;

pub use assemble::{
    assemble, assemble_locquad, assemble_pwl, assemble_relu, ApproximationReport, AssemblyBudget, Measurement,
    TheoryScaling, K_CAP,
};
pub use grid::{lattice, local_basis, Grid};
pub use measure::{sup_error, sup_error_on, Field, FnField, Region, Scheme};
pub use surrogate::{surrogate, Surrogate, TaylorPatch};
