use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },

    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },

    #[error("exponent at offset {offset} is not an integer literal")]
    NonIntegerExponent { offset: usize },

    #[error("domain error at node {path} for z = {z}")]
    Domain { path: String, z: Complex64 },

    #[error("domain error at grid index ({ix}, {iy}): {source}")]
    GridDomain {
        ix: usize,
        iy: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("expression is not holomorphic (node {path}); the field is not constant along complex characteristics")]
    NonHolomorphic { path: String },

    #[error("unsupported operator term `{term}` at offset {offset}")]
    HigherOrderTerm { term: String, offset: usize },

    #[error("operator has lower-order terms; only the principal part can be factored")]
    NotPrincipal,

    #[error("operator has a vanishing dxx coefficient")]
    DegenerateLeading,

    #[error("characteristic roots coincide ({root}); the two-factor general solution does not apply")]
    DegenerateRoots { root: Complex64 },

    #[error("split system is incompatible: path orders disagree by {discrepancy:.3e} (tolerance {tolerance:.3e})")]
    IncompatibleSystem { discrepancy: f64, tolerance: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

impl Error {
    pub(crate) fn domain(path: &[usize], z: Complex64) -> Self {
        Error::Domain {
            path: render_path(path),
            z,
        }
    }

    pub(crate) fn non_holomorphic(path: &[usize]) -> Self {
        Error::NonHolomorphic {
            path: render_path(path),
        }
    }

    pub(crate) fn at_grid(self, ix: usize, iy: usize) -> Self {
        Error::GridDomain {
            ix,
            iy,
            source: Box::new(self),
        }
    }
}

/// Node paths are child indices from the root, e.g. `$.1.0`.
pub(crate) fn render_path(path: &[usize]) -> String {
    let mut s = String::from("$");
    for i in path {
        s.push('.');
        s.push_str(&i.to_string());
    }
    s
}
