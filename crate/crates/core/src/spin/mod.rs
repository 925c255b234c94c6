//! Finite-dimensional su(2) representation theory.

mod cg;
mod coherent;
mod irrep;
mod tensor;

pub use cg::{clebsch_gordan, install_table, install_table_from, TensorCgTable};
pub use coherent::{angles, coherent_state, coherent_state_angles, unit_vector};
pub use irrep::{adjoint_rotation, make_irrep, rotate, wigner_zyz, SpinIrrep};
pub use tensor::{full_basis, lm_count, lm_index, tensor_basis, tensor_operator, TensorBasis, TensorOperator};
