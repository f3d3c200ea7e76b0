use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;

use super::eval::{analytic, checked_powi, modulus};
use super::{Expr, Func, J};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A complex-valued function of two real variables together with all its
/// partial derivatives up to second order at one point.
///
/// Only one mixed slot exists, so `uxy == uyx` holds by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub u: Complex64,
    pub ux: Complex64,
    pub uy: Complex64,
    pub uxx: Complex64,
    pub uxy: Complex64,
    pub uyy: Complex64,
}

impl Jet2 {
    pub fn constant(u: Complex64) -> Jet2 {
        Jet2 {
            u,
            ux: ZERO,
            uy: ZERO,
            uxx: ZERO,
            uxy: ZERO,
            uyy: ZERO,
        }
    }

    pub fn zero() -> Jet2 {
        Jet2::constant(ZERO)
    }

    /// Jet of the affine function `alpha*x + beta*y + gamma`.
    pub fn affine(value: Complex64, alpha: Complex64, beta: Complex64) -> Jet2 {
        Jet2 {
            u: value,
            ux: alpha,
            uy: beta,
            ..Jet2::zero()
        }
    }

    /// Applies `f` to every slot.
    pub fn map(self, f: impl Fn(Complex64) -> Complex64) -> Jet2 {
        Jet2 {
            u: f(self.u),
            ux: f(self.ux),
            uy: f(self.uy),
            uxx: f(self.uxx),
            uxy: f(self.uxy),
            uyy: f(self.uyy),
        }
    }

    pub fn scale(self, c: Complex64) -> Jet2 {
        self.map(|v| c * v)
    }

    pub fn conj(self) -> Jet2 {
        self.map(|v| v.conj())
    }

    pub fn re(self) -> Jet2 {
        self.map(|v| Complex64::new(v.re, 0.0))
    }

    pub fn im(self) -> Jet2 {
        self.map(|v| Complex64::new(v.im, 0.0))
    }

    /// Chain rule for `g(self)` given `g`, `g'` and `g''` at `self.u`.
    pub fn compose(self, g: Complex64, dg: Complex64, ddg: Complex64) -> Jet2 {
        Jet2 {
            u: g,
            ux: dg * self.ux,
            uy: dg * self.uy,
            uxx: ddg * self.ux * self.ux + dg * self.uxx,
            uxy: ddg * self.ux * self.uy + dg * self.uxy,
            uyy: ddg * self.uy * self.uy + dg * self.uyy,
        }
    }

    /// Quotient rule; `None` when the denominator value vanishes.
    pub fn checked_div(self, g: Jet2) -> Option<Jet2> {
        if g.u == ZERO {
            return None;
        }
        let q = self.u / g.u;
        let qx = (self.ux - q * g.ux) / g.u;
        let qy = (self.uy - q * g.uy) / g.u;
        Some(Jet2 {
            u: q,
            ux: qx,
            uy: qy,
            uxx: (self.uxx - 2.0 * qx * g.ux - q * g.uxx) / g.u,
            uxy: (self.uxy - qx * g.uy - qy * g.ux - q * g.uxy) / g.u,
            uyy: (self.uyy - 2.0 * qy * g.uy - q * g.uyy) / g.u,
        })
    }

    /// Largest modulus over all slots.
    pub fn max_norm(&self) -> f64 {
        [self.u, self.ux, self.uy, self.uxx, self.uxy, self.uyy]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, g: Jet2) -> Jet2 {
        Jet2 {
            u: self.u + g.u,
            ux: self.ux + g.ux,
            uy: self.uy + g.uy,
            uxx: self.uxx + g.uxx,
            uxy: self.uxy + g.uxy,
            uyy: self.uyy + g.uyy,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, g: Jet2) -> Jet2 {
        Jet2 {
            u: self.u - g.u,
            ux: self.ux - g.ux,
            uy: self.uy - g.uy,
            uxx: self.uxx - g.uxx,
            uxy: self.uxy - g.uxy,
            uyy: self.uyy - g.uyy,
        }
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.map(|v| -v)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, g: Jet2) -> Jet2 {
        let f = self;
        Jet2 {
            u: f.u * g.u,
            ux: f.ux * g.u + f.u * g.ux,
            uy: f.uy * g.u + f.u * g.uy,
            uxx: f.uxx * g.u + 2.0 * f.ux * g.ux + f.u * g.uxx,
            uxy: f.uxy * g.u + f.ux * g.uy + f.uy * g.ux + f.u * g.uxy,
            uyy: f.uyy * g.u + 2.0 * f.uy * g.uy + f.u * g.uyy,
        }
    }
}

/// The substitution `z = alpha*x + beta*y + gamma` feeding a one-variable
/// expression with a point of the real plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
}

impl AffineMap {
    pub fn new(alpha: Complex64, beta: Complex64, gamma: Complex64) -> AffineMap {
        AffineMap { alpha, beta, gamma }
    }

    /// `y + j*x`
    pub fn y_plus_jx() -> AffineMap {
        AffineMap::new(J, Complex64::new(1.0, 0.0), ZERO)
    }

    /// `y - j*x`
    pub fn y_minus_jx() -> AffineMap {
        AffineMap::new(-J, Complex64::new(1.0, 0.0), ZERO)
    }

    /// `y + x`
    pub fn y_plus_x() -> AffineMap {
        AffineMap::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), ZERO)
    }

    /// `y - x`
    pub fn y_minus_x() -> AffineMap {
        AffineMap::new(Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0), ZERO)
    }

    /// The characteristic invariant `y - r*x` of the factor `dx + r*dy`.
    pub fn characteristic(root: Complex64) -> AffineMap {
        AffineMap::new(-root, Complex64::new(1.0, 0.0), ZERO)
    }

    pub fn at(&self, x: f64, y: f64) -> Complex64 {
        self.alpha * x + self.beta * y + self.gamma
    }

    /// Evaluation at complex coordinates, used to walk along complex
    /// characteristic lines `y = r*x + c`.
    pub fn at_complex(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.alpha * x + self.beta * y + self.gamma
    }

    pub fn jet(&self, x: f64, y: f64) -> Jet2 {
        Jet2::affine(self.at(x, y), self.alpha, self.beta)
    }

    /// Composes with the coordinate scaling `x -> sx*x`, `y -> sy*y`.
    pub fn rescale_coordinates(&self, sx: Complex64, sy: Complex64) -> AffineMap {
        AffineMap::new(self.alpha * sx, self.beta * sy, self.gamma)
    }

    /// Multiplies the whole map by `c`.
    pub fn scaled(&self, c: Complex64) -> AffineMap {
        AffineMap::new(self.alpha * c, self.beta * c, self.gamma * c)
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, m) in [
            ("y+j*x", AffineMap::y_plus_jx()),
            ("y-j*x", AffineMap::y_minus_jx()),
            ("y+x", AffineMap::y_plus_x()),
            ("y-x", AffineMap::y_minus_x()),
        ] {
            if *self == m {
                return f.write_str(name);
            }
        }
        let c = |v: Complex64| Expr::Const(v).render();
        write!(f, "{}*x+{}*y+{}", c(self.alpha), c(self.beta), c(self.gamma))
    }
}

impl FromStr for AffineMap {
    type Err = Error;

    /// Accepts the four built-in substitutions, whitespace-insensitive.
    fn from_str(s: &str) -> Result<AffineMap> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match compact.as_str() {
            "y+j*x" | "y+jx" => Ok(AffineMap::y_plus_jx()),
            "y-j*x" | "y-jx" => Ok(AffineMap::y_minus_jx()),
            "y+x" => Ok(AffineMap::y_plus_x()),
            "y-x" => Ok(AffineMap::y_minus_x()),
            _ => Err(Error::Syntax {
                offset: 0,
                expected: "one of `y+j*x`, `y-j*x`, `y+x`, `y-x`".into(),
            }),
        }
    }
}

fn jet_at(e: &Expr, arg: &Jet2, path: &mut Vec<usize>) -> Result<Jet2> {
    let child = |i: usize, c: &Expr, path: &mut Vec<usize>| {
        path.push(i);
        let v = jet_at(c, arg, path);
        path.pop();
        v
    };
    Ok(match e {
        Expr::Const(c) => Jet2::constant(*c),
        Expr::Var => *arg,
        Expr::Add(a, b) => child(0, a, path)? + child(1, b, path)?,
        Expr::Sub(a, b) => child(0, a, path)? - child(1, b, path)?,
        Expr::Mul(a, b) => child(0, a, path)? * child(1, b, path)?,
        Expr::Div(a, b) => {
            let n = child(0, a, path)?;
            let d = child(1, b, path)?;
            n.checked_div(d).ok_or_else(|| Error::domain(path, arg.u))?
        }
        Expr::Pow(a, n) => {
            let w = child(0, a, path)?;
            let n = *n;
            let g = checked_powi(w.u, n, path, arg.u)?;
            let dg = if n == 0 {
                ZERO
            } else {
                f64::from(n) * w.u.powi(n - 1)
            };
            let ddg = if n == 0 || n == 1 {
                ZERO
            } else {
                f64::from(n) * f64::from(n - 1) * w.u.powi(n - 2)
            };
            w.compose(g, dg, ddg)
        }
        Expr::Neg(a) => -child(0, a, path)?,
        Expr::Fun(f, a) => {
            let w = child(0, a, path)?;
            match f {
                Func::Conj => w.conj(),
                Func::Re => w.re(),
                Func::Im => w.im(),
                Func::Abs => {
                    let (r, i) = (w.re(), w.im());
                    let sq = r * r + i * i;
                    if sq.u == ZERO {
                        return Err(Error::domain(path, arg.u));
                    }
                    let m = modulus(w.u);
                    let s = Complex64::new(m, 0.0);
                    sq.compose(s, 0.5 / s, -0.25 / (s * s * s))
                }
                _ => {
                    let (g, dg, ddg) = analytic(*f, w.u).ok_or_else(|| Error::domain(path, arg.u))?;
                    w.compose(g, dg, ddg)
                }
            }
        }
    })
}

/// Jet of the composite field `(x, y) -> e(arg(x, y))` at `(x, y)`.
///
/// Holomorphic nodes use the complex chain rule. `conj`, `re` and `im` act
/// slot-wise and `abs` is expanded as `sqrt(re^2 + im^2)`.
pub fn eval_jet(e: &Expr, arg: &AffineMap, x: f64, y: f64) -> Result<Jet2> {
    jet_at(e, &arg.jet(x, y), &mut Vec::new())
}
