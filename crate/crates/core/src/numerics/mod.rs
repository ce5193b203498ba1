//! Dense complex linear algebra and seeded random streams shared by the
//! rest of the link chain.

mod linalg;
mod matrix;
mod rng;

pub use linalg::{
    circulant, circulant_mul, circular_convolve, circular_correlate, hermitian_solve,
    min_singular_value, mul_circulant_adjoint, Cholesky,
};
pub use matrix::{axpy, dot, dot_conj, vector_norm, CMatrix, CVector};
pub use num_complex::Complex64;
pub use rng::{complex_gaussian, SeededRng};
