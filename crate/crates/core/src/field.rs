//! Point-evaluable fields `u(x, y)` on the real plane.

use num_complex::Complex64;

use crate::expr::{eval_expr, eval_jet, AffineMap, Expr, Jet2};
use crate::Result;

/// Step of the central differences used when a field has no exact jet.
pub const FD_JET_STEP: f64 = 1e-4;

/// A complex-valued field on the plane.
///
/// `jet` defaults to second-order central differences of `value` with step
/// [`FD_JET_STEP`]; fields with exact derivatives override it.
pub trait Field: Sync {
    fn value(&self, x: f64, y: f64) -> Result<Complex64>;

    fn jet(&self, x: f64, y: f64) -> Result<Jet2> {
        central_jet(self, x, y, FD_JET_STEP)
    }
}

impl<F: Field + ?Sized> Field for &F {
    fn value(&self, x: f64, y: f64) -> Result<Complex64> {
        (**self).value(x, y)
    }

    fn jet(&self, x: f64, y: f64) -> Result<Jet2> {
        (**self).jet(x, y)
    }
}

impl<F: Field + ?Sized> Field for Box<F> {
    fn value(&self, x: f64, y: f64) -> Result<Complex64> {
        (**self).value(x, y)
    }

    fn jet(&self, x: f64, y: f64) -> Result<Jet2> {
        (**self).jet(x, y)
    }
}

/// Jet from the nine-point neighbourhood of `(x, y)`.
pub fn central_jet<F: Field + ?Sized>(field: &F, x: f64, y: f64, h: f64) -> Result<Jet2> {
    let u = |dx: f64, dy: f64| field.value(x + dx, y + dy);
    let c = u(0.0, 0.0)?;
    let (e, w, n, s) = (u(h, 0.0)?, u(-h, 0.0)?, u(0.0, h)?, u(0.0, -h)?);
    let (ne, nw, se, sw) = (u(h, h)?, u(-h, h)?, u(h, -h)?, u(-h, -h)?);
    let h2 = h * h;
    Ok(Jet2 {
        u: c,
        ux: (e - w) / (2.0 * h),
        uy: (n - s) / (2.0 * h),
        uxx: (e - 2.0 * c + w) / h2,
        uxy: (ne - nw - se + sw) / (4.0 * h2),
        uyy: (n - 2.0 * c + s) / h2,
    })
}

/// Closure-backed field; jets come from central differences.
pub struct FnField<F>(pub F);

impl<F> Field for FnField<F>
where
    F: Fn(f64, f64) -> Result<Complex64> + Sync,
{
    fn value(&self, x: f64, y: f64) -> Result<Complex64> {
        (self.0)(x, y)
    }
}

/// `e(arg(x, y))` with exact jets.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprField {
    pub expr: Expr,
    pub arg: AffineMap,
}

impl ExprField {
    pub fn new(expr: Expr, arg: AffineMap) -> ExprField {
        ExprField { expr, arg }
    }
}

impl Field for ExprField {
    fn value(&self, x: f64, y: f64) -> Result<Complex64> {
        eval_expr(&self.expr, self.arg.at(x, y))
    }

    fn jet(&self, x: f64, y: f64) -> Result<Jet2> {
        eval_jet(&self.expr, &self.arg, x, y)
    }
}

/// Real part of another field.
pub struct RealPart<F>(pub F);

impl<F: Field> Field for RealPart<F> {
    fn value(&self, x: f64, y: f64) -> Result<Complex64> {
        Ok(Complex64::new(self.0.value(x, y)?.re, 0.0))
    }

    fn jet(&self, x: f64, y: f64) -> Result<Jet2> {
        Ok(self.0.jet(x, y)?.re())
    }
}
