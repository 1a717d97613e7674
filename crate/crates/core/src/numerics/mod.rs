//! Special functions, quadrature, dense symmetric linear algebra and
//! derivative-free optimizers.

pub mod linalg;
pub mod optimize;
pub mod quadrature;
pub mod special;

pub use linalg::{dot, solve_spd, sqrt_spd, sym_eig, Eigen, SymMatrix};
pub use optimize::{maximize_scalar, maximize_vector, VectorOptions};
pub use quadrature::{gauss_hermite, gauss_legendre, QuadratureRule};
pub use special::{q_function, q_tilde};
