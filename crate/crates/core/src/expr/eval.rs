use num_complex::Complex64;

use super::{Expr, Func};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Value, first and second derivative of a holomorphic primitive at `w`.
///
/// Returns `None` at points where the derivatives do not exist (`sqrt(0)`,
/// `log(0)`). Non-holomorphic primitives are not handled here.
pub(crate) fn analytic(f: Func, w: Complex64) -> Option<(Complex64, Complex64, Complex64)> {
    Some(match f {
        Func::Sin => {
            let (s, c) = (w.sin(), w.cos());
            (s, c, -s)
        }
        Func::Cos => {
            let (s, c) = (w.sin(), w.cos());
            (c, -s, -c)
        }
        Func::Exp => {
            let e = w.exp();
            (e, e, e)
        }
        Func::Sinh => {
            let (s, c) = (w.sinh(), w.cosh());
            (s, c, s)
        }
        Func::Cosh => {
            let (s, c) = (w.sinh(), w.cosh());
            (c, s, c)
        }
        Func::Sqrt => {
            if w == ZERO {
                return None;
            }
            let s = w.sqrt();
            (s, 0.5 / s, -0.25 / (s * s * s))
        }
        Func::Log => {
            if w == ZERO {
                return None;
            }
            let inv = w.inv();
            (w.ln(), inv, -(inv * inv))
        }
        Func::Conj | Func::Re | Func::Im | Func::Abs => return None,
    })
}

/// `|w|` as `sqrt(re^2 + im^2)`; the jet evaluator uses the same formula.
pub(crate) fn modulus(w: Complex64) -> f64 {
    (w.re * w.re + w.im * w.im).sqrt()
}

pub(crate) fn apply_func(f: Func, w: Complex64, path: &[usize]) -> Result<Complex64> {
    Ok(match f {
        Func::Conj => w.conj(),
        Func::Re => Complex64::new(w.re, 0.0),
        Func::Im => Complex64::new(w.im, 0.0),
        Func::Abs => Complex64::new(modulus(w), 0.0),
        Func::Sqrt => w.sqrt(),
        Func::Log if w == ZERO => return Err(Error::domain(path, w)),
        _ => analytic(f, w).ok_or_else(|| Error::domain(path, w))?.0,
    })
}

pub(crate) fn checked_div(n: Complex64, d: Complex64, path: &[usize], z: Complex64) -> Result<Complex64> {
    if d == ZERO {
        Err(Error::domain(path, z))
    } else {
        Ok(n / d)
    }
}

pub(crate) fn checked_powi(w: Complex64, n: i32, path: &[usize], z: Complex64) -> Result<Complex64> {
    if n < 0 && w == ZERO {
        Err(Error::domain(path, z))
    } else {
        Ok(w.powi(n))
    }
}

fn eval_at(e: &Expr, z: Complex64, path: &mut Vec<usize>) -> Result<Complex64> {
    let child = |i: usize, c: &Expr, path: &mut Vec<usize>| {
        path.push(i);
        let v = eval_at(c, z, path);
        path.pop();
        v
    };
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::Var => z,
        Expr::Add(a, b) => child(0, a, path)? + child(1, b, path)?,
        Expr::Sub(a, b) => child(0, a, path)? - child(1, b, path)?,
        Expr::Mul(a, b) => child(0, a, path)? * child(1, b, path)?,
        Expr::Div(a, b) => {
            let n = child(0, a, path)?;
            let d = child(1, b, path)?;
            checked_div(n, d, path, z)?
        }
        Expr::Pow(a, n) => {
            let w = child(0, a, path)?;
            checked_powi(w, *n, path, z)?
        }
        Expr::Neg(a) => -child(0, a, path)?,
        Expr::Fun(f, a) => {
            let w = child(0, a, path)?;
            apply_func(*f, w, path).map_err(|_| Error::domain(path, z))?
        }
    })
}

/// Evaluates `e` at the complex point `z`.
pub fn eval_expr(e: &Expr, z: Complex64) -> Result<Complex64> {
    eval_at(e, z, &mut Vec::new())
}
