//! Two worked constructions: the stream function of flow in a semi-infinite
//! bay, and the general solution of `dxx - dyy` obtained from the Laplace
//! solution by an imaginary change of variables.
//!
//! Bay: on `x >= 0, 0 <= y <= h` the field
//! `psi = Re[k*j*cos(n*pi*(y + j*x)/h)] = k*sinh(n*pi*x/h)*sin(n*pi*y/h)`
//! is harmonic and vanishes on `x = 0`, `y = 0` and `y = h`. The strip is
//! truncated at `x_max` for anything sampled.
//!
//! Hyperbolic: substituting `y -> j*y` turns `dxx - dyy` into the Laplacian,
//! whose solution arguments `y +- j*x` become `j*(y +- x)`; the factor `j`
//! is absorbed into `F` and `G`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::characteristics::SolutionForm;
use crate::expr::{AffineMap, Expr, Func, J};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::verify::BoundarySegment;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BaySpec {
    /// Width of the bay.
    pub h: f64,
    /// Mode number.
    pub n: u32,
    /// Truncation of the strip for sampling.
    pub x_max: f64,
    /// Amplitude.
    pub k: f64,
}

impl BaySpec {
    /// Mode `n` in a bay of width `h`, unit amplitude, truncated at `3h`.
    pub fn new(h: f64, n: u32) -> BaySpec {
        BaySpec { h, n, x_max: 3.0 * h, k: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidSpec(format!("bay width must be positive, got {}", self.h)));
        }
        if self.n == 0 {
            return Err(Error::InvalidSpec("mode number must be at least 1".into()));
        }
        if !(self.x_max > 0.0 && self.x_max.is_finite()) {
            return Err(Error::InvalidSpec(format!("x_max must be positive, got {}", self.x_max)));
        }
        if !self.k.is_finite() {
            return Err(Error::InvalidSpec("amplitude must be finite".into()));
        }
        Ok(())
    }

    /// `n*pi/h`
    pub fn wavenumber(&self) -> f64 {
        f64::from(self.n) * PI / self.h
    }
}

/// `Re[k*j*cos(n*pi*z/h)]` at `z = y + j*x`.
pub fn bay_solution(spec: &BaySpec) -> Result<SolutionForm> {
    spec.validate()?;
    let inner = Expr::Mul(Box::new(Expr::real(spec.wavenumber())), Box::new(Expr::var()));
    let f = Expr::Mul(
        Box::new(Expr::constant(spec.k * J)),
        Box::new(Expr::call(Func::Cos, inner)),
    );
    Ok(SolutionForm {
        f_expr: f,
        g_expr: Expr::zero(),
        f_arg: AffineMap::y_plus_jx(),
        g_arg: AffineMap::y_minus_jx(),
        take_real: true,
    })
}

/// `k*sinh(n*pi*x/h)*sin(n*pi*y/h)`
pub fn bay_closed_form(spec: &BaySpec, x: f64, y: f64) -> f64 {
    let kappa = spec.wavenumber();
    spec.k * (kappa * x).sinh() * (kappa * y).sin()
}

/// Velocity `(d psi/dy, -d psi/dx)` from the exact jet.
pub fn bay_velocity(spec: &BaySpec, x: f64, y: f64) -> Result<(f64, f64)> {
    let jet = bay_solution(spec)?.jet(x, y)?;
    Ok((jet.uy.re, -jet.ux.re))
}

/// The walls `x = 0`, `y = 0` and `y = h` up to `x_max`, where `psi = 0`.
pub fn bay_boundary_segments(spec: &BaySpec) -> Vec<BoundarySegment> {
    let zero = Complex64::new(0.0, 0.0);
    let seg = |start, end| BoundarySegment {
        start,
        end,
        expected: zero,
    };
    vec![
        seg((0.0, 0.0), (0.0, spec.h)),
        seg((0.0, 0.0), (spec.x_max, 0.0)),
        seg((0.0, spec.h), (spec.x_max, spec.h)),
    ]
}

/// Grid over `[0.05, x_max] x [0.05, h - 0.05]` with `nodes` per axis.
pub fn bay_interior_grid(spec: &BaySpec, nodes: usize) -> Result<GridSpec> {
    GridSpec::new(0.05, spec.x_max, nodes, 0.05, spec.h - 0.05, nodes)
}

/// `Re[F(y + x) + G(y - x)]`, a solution of `dxx - dyy`, obtained from the
/// Laplace arguments `y +- j*x` by the substitution `y -> j*y`.
pub fn hyperbolic_general(f: &Expr, g: &Expr) -> Result<SolutionForm> {
    f.require_holomorphic()?;
    g.require_holomorphic()?;
    let transform = |laplace: AffineMap| {
        let m = laplace.rescale_coordinates(Complex64::new(1.0, 0.0), J);
        m.scaled(m.beta.inv())
    };
    Ok(SolutionForm {
        f_expr: f.clone(),
        g_expr: g.clone(),
        f_arg: transform(AffineMap::y_plus_jx()),
        g_arg: transform(AffineMap::y_minus_jx()),
        take_real: true,
    })
}
