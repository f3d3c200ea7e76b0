use super::{add, div, mul, neg, pow, sub, Expr, Func};
use crate::{Error, Result};

fn d(e: &Expr, path: &mut Vec<usize>) -> Result<Expr> {
    let child = |i: usize, c: &Expr, path: &mut Vec<usize>| {
        path.push(i);
        let v = d(c, path);
        path.pop();
        v
    };
    Ok(match e {
        Expr::Const(_) => Expr::zero(),
        Expr::Var => Expr::real(1.0),
        Expr::Add(a, b) => add(child(0, a, path)?, child(1, b, path)?),
        Expr::Sub(a, b) => sub(child(0, a, path)?, child(1, b, path)?),
        Expr::Mul(a, b) => {
            let (da, db) = (child(0, a, path)?, child(1, b, path)?);
            add(mul(da, (**b).clone()), mul((**a).clone(), db))
        }
        Expr::Div(a, b) => {
            let (da, db) = (child(0, a, path)?, child(1, b, path)?);
            div(
                sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                pow((**b).clone(), 2),
            )
        }
        Expr::Pow(a, n) => {
            let da = child(0, a, path)?;
            mul(mul(Expr::real(f64::from(*n)), pow((**a).clone(), n - 1)), da)
        }
        Expr::Neg(a) => neg(child(0, a, path)?),
        Expr::Fun(f, a) => {
            let inner = (**a).clone();
            let outer = match f {
                Func::Sin => Expr::call(Func::Cos, inner),
                Func::Cos => neg(Expr::call(Func::Sin, inner)),
                Func::Exp => Expr::call(Func::Exp, inner),
                Func::Sinh => Expr::call(Func::Cosh, inner),
                Func::Cosh => Expr::call(Func::Sinh, inner),
                Func::Sqrt => div(Expr::real(0.5), Expr::call(Func::Sqrt, inner)),
                Func::Log => div(Expr::real(1.0), inner),
                Func::Conj | Func::Re | Func::Im | Func::Abs => {
                    return Err(Error::non_holomorphic(path));
                }
            };
            let da = child(0, a, path)?;
            mul(outer, da)
        }
    })
}

/// Symbolic complex derivative `dF/dz`.
///
/// The result is lightly simplified (constant folding, neutral elements) and
/// renders in the input grammar. Trees containing `conj`, `re`, `im` or `abs`
/// have no complex derivative and are refused.
pub fn diff_expr(e: &Expr) -> Result<Expr> {
    if let Some(path) = e.find_non_holomorphic() {
        return Err(Error::non_holomorphic(&path));
    }
    d(e, &mut Vec::new())
}
