//! Dense linear algebra for the fixed small sizes this crate needs:
//! complex 2x2/4x4 matrices for gate algebra, and real m x n matrices for
//! the linearized response model.

mod complex;
mod real;

pub use complex::{exp_neg_i_hermitian, hermitian_eigen, Matrix2, Matrix4, Vector4, C};
pub use real::{lu_inverse, lu_solve, singular_values, Mat};
