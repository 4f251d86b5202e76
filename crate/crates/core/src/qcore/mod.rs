//! State and operator primitives: dense complex matrices on the fixed 2- and
//! 4-dimensional spaces, density matrices, eigensolvers, Gibbs states and
//! entropy functionals.

pub mod density;
pub mod eig;
pub mod entropy;
pub mod matrix;

pub use density::{
    expectation, project_electronic_ground, DensityMatrix, MeasurementOutcome, StateLabel,
    Subsystem,
};
pub use eig::{eigh2, eigh4, eigvalsh4, Spectrum2};
pub use entropy::{gibbs_state, ground_state_projector, relative_entropy, von_neumann_entropy};
pub use matrix::{ops, tensor_product, ComplexMatrix, C64};
