//! Solutions of `(dx + r*dy) u = 0` along characteristics, and two-factor
//! general solutions of second-order operators.
//!
//! The factor `dx + r*dy` leaves `y - r*x` unchanged along the complex lines
//! `y = r*x + c`, so any holomorphic `phi(y - r*x)` is annihilated by it. A
//! principal operator with distinct roots `r1`, `r2` then has the solutions
//! `F(y - r2*x) + G(y - r1*x)`; for the Laplacian these are `F(y + j*x)` and
//! `G(y - j*x)`.

use num_complex::Complex64;

use crate::expr::{eval_expr, eval_jet, AffineMap, Expr, Jet2};
use crate::field::Field;
use crate::grid::{map_grid, GridSpec};
use crate::operator::{characteristic_roots, factor_principal, FirstOrderFactor, LinOp2};
use crate::{Error, Result};

/// `phi(y - r*x)` for a normalized factor `dx + r*dy`.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrderSolution {
    pub factor: FirstOrderFactor,
    pub phi: Expr,
    pub arg: AffineMap,
}

impl FirstOrderSolution {
    /// Evaluates at complex coordinates, e.g. on the line `y = r*x + c`.
    pub fn value_complex(&self, x: Complex64, y: Complex64) -> Result<Complex64> {
        eval_expr(&self.phi, self.arg.at_complex(x, y))
    }
}

impl Field for FirstOrderSolution {
    fn value(&self, x: f64, y: f64) -> Result<Complex64> {
        eval_expr(&self.phi, self.arg.at(x, y))
    }

    fn jet(&self, x: f64, y: f64) -> Result<Jet2> {
        eval_jet(&self.phi, &self.arg, x, y)
    }
}

/// Solves `factor u = 0` with `u = phi(y - r*x)`.
///
/// `phi` must be holomorphic: only then is `u` constant along the complex
/// characteristics, which is what makes the factor vanish on it.
pub fn solve_first_order(factor: &FirstOrderFactor, phi: &Expr) -> Result<FirstOrderSolution> {
    phi.require_holomorphic()?;
    solve_first_order_unchecked(factor, phi)
}

/// [`solve_first_order`] without the holomorphy guard.
pub fn solve_first_order_unchecked(factor: &FirstOrderFactor, phi: &Expr) -> Result<FirstOrderSolution> {
    let factor = factor.normalized()?;
    Ok(FirstOrderSolution {
        factor,
        phi: phi.clone(),
        arg: AffineMap::characteristic(factor.coef_y),
    })
}

/// `F(f_arg) + G(g_arg)`, optionally reduced to its real part.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionForm {
    pub f_expr: Expr,
    pub g_expr: Expr,
    pub f_arg: AffineMap,
    pub g_arg: AffineMap,
    pub take_real: bool,
}

impl SolutionForm {
    /// The complex sum before any real part is taken.
    pub fn complex_value(&self, x: f64, y: f64) -> Result<Complex64> {
        let f = eval_expr(&self.f_expr, self.f_arg.at(x, y)).map_err(|e| prefix_path(e, 0))?;
        let g = eval_expr(&self.g_expr, self.g_arg.at(x, y)).map_err(|e| prefix_path(e, 1))?;
        Ok(f + g)
    }

    fn complex_jet(&self, x: f64, y: f64) -> Result<Jet2> {
        let f = eval_jet(&self.f_expr, &self.f_arg, x, y).map_err(|e| prefix_path(e, 0))?;
        let g = eval_jet(&self.g_expr, &self.g_arg, x, y).map_err(|e| prefix_path(e, 1))?;
        Ok(f + g)
    }
}

/// Domain paths inside a solution start with `0` for `F` and `1` for `G`.
fn prefix_path(err: Error, which: usize) -> Error {
    match err {
        Error::Domain { path, z } => Error::Domain {
            path: format!("$.{which}{}", &path[1..]),
            z,
        },
        other => other,
    }
}

impl Field for SolutionForm {
    fn value(&self, x: f64, y: f64) -> Result<Complex64> {
        let v = self.complex_value(x, y)?;
        Ok(if self.take_real { Complex64::new(v.re, 0.0) } else { v })
    }

    fn jet(&self, x: f64, y: f64) -> Result<Jet2> {
        let j = self.complex_jet(x, y)?;
        Ok(if self.take_real { j.re() } else { j })
    }
}

/// Builds `F(y - r2*x) + G(y - r1*x)` from the roots of `op`.
///
/// With the root ordering of [`characteristic_roots`] this gives
/// `f_arg = y + j*x`, `g_arg = y - j*x` for the Laplacian and
/// `f_arg = y + x`, `g_arg = y - x` for `dxx - dyy`.
pub fn general_solution(op: &LinOp2, f: &Expr, g: &Expr, take_real: bool) -> Result<SolutionForm> {
    f.require_holomorphic()?;
    g.require_holomorphic()
        .map_err(|e| match e {
            Error::NonHolomorphic { path } => Error::NonHolomorphic { path: format!("g:{path}") },
            other => other,
        })?;
    general_solution_unchecked(op, f, g, take_real)
}

/// [`general_solution`] without the holomorphy guard on `f` and `g`.
pub fn general_solution_unchecked(op: &LinOp2, f: &Expr, g: &Expr, take_real: bool) -> Result<SolutionForm> {
    factor_principal(op)?;
    let (r1, r2) = characteristic_roots(op)?;
    if (r1 - r2).norm() <= 1e-12 * (1.0 + r1.norm()) {
        return Err(Error::DegenerateRoots { root: r1 });
    }
    Ok(SolutionForm {
        f_expr: f.clone(),
        g_expr: g.clone(),
        f_arg: AffineMap::characteristic(r2),
        g_arg: AffineMap::characteristic(r1),
        take_real,
    })
}

/// Field values at every grid node, row-major.
pub fn evaluate_on_grid<F: Field + ?Sized>(field: &F, grid: &GridSpec) -> Result<Vec<Complex64>> {
    map_grid(grid, |x, y| field.value(x, y))
}

/// Field jets at every grid node, row-major.
pub fn evaluate_jets_on_grid<F: Field + ?Sized>(field: &F, grid: &GridSpec) -> Result<Vec<Jet2>> {
    map_grid(grid, |x, y| field.jet(x, y))
}
