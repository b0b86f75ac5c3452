//! Grid-realized operators and their elementary algebra.

mod grid;
mod matfn;
mod operator;
mod stencil;

pub use grid::{Grid, Scheme};
pub use matfn::{
    hermitian_matrix_function, hermitian_matrix_function_with_limit, hermitian_power,
    CONDITION_LIMIT, HERMITIAN_TOL,
};
pub use operator::{masked_norm, unmasked_norm, Operator};
pub use stencil::{derivative_matrix, second_difference_matrix};

pub(crate) use matfn::{eig, eigh};
pub(crate) use stencil::{first_derivative_rows, second_derivative_rows};
