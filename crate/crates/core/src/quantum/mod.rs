//! Complex operators, states and the composite-space plumbing.

mod linalg;
mod matrix;
pub mod ops;
mod sparse;
mod state;

pub use linalg::{
    exp_series, hermitian_eigen, hermitian_function, is_positive_within,
    matrix_exponential_unitary, HERMITIAN_REL_TOL,
};
pub(crate) use linalg::require_hermitian;
pub use matrix::OperatorMatrix;
pub use ops::{
    annihilation, creation, embed, number, product_index, qubit_register_index, sigma_minus,
    sigma_plus, sigma_x, sigma_y, sigma_z, tensor_product, QubitLevel,
};
pub use sparse::SparseMatrix;
pub use state::{
    expectation, DensityCheck, DensityMatrix, StateVector, HERMITIAN_TOL, NEGATIVITY_TOL,
    NORM_TOL, TRACE_TOL,
};
pub(crate) use state::purity;
