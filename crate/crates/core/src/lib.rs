//! Real solutions of constant-coefficient second-order PDEs in the plane,
//! built from complex characteristics and checked independently.
//!
//! The Laplacian factors as `(dx + j*dy)(dx - j*dy)`. Each first-order factor
//! `dx + r*dy` is annihilated by any holomorphic `phi(y - r*x)`, so
//! `Re[F(y + j*x) + G(y - j*x)]` is harmonic. This crate turns that
//! construction into code:
//!
//! - [`expr`]: parse, evaluate and differentiate expressions in `z`, and
//!   evaluate them on second-order jets in `(x, y)`.
//! - [`operator`]: constant-coefficient operators, factorization of their
//!   principal part, and commutation checks.
//! - [`characteristics`]: first-order solutions and two-factor general
//!   solutions.
//! - [`particular`]: particular solutions of `(dx - j*dy) u = G(y - j*x)` by
//!   quadrature.
//! - [`verify`]: finite-difference residuals and convergence orders, used as
//!   an oracle that does not trust the jets.
//! - [`bvp`]: the semi-infinite bay stream function and the hyperbolic
//!   equation `dxx - dyy`.

pub mod bvp;
pub mod characteristics;
pub mod error;
pub mod expr;
pub mod field;
pub mod grid;
pub mod operator;
pub mod particular;
pub mod verify;

pub use error::{Error, Result};
pub use expr::{ComplexScalar, Expr, Jet2, J};
pub use field::Field;
pub use grid::GridSpec;
pub use operator::{FirstOrderFactor, LinOp2};
