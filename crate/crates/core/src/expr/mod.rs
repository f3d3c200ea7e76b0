//! Expressions in one complex variable `z`.
//!
//! An [`Expr`] is parsed from text, evaluated at complex points, differentiated
//! symbolically, and evaluated on jets to obtain exact partial derivatives of
//! composed fields such as `F(y + j*x)`.
//!
//! Grammar (whitespace is ignored between tokens):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = ("-" | "+") unary | power ;
//! power   = primary [ "^" unary ] ;          (* exponent must fold to an integer *)
//! primary = number | "z" | "j" | "pi" | func "(" expr ")" | "(" expr ")" ;
//! func    = "sin" | "cos" | "exp" | "sinh" | "cosh" | "sqrt" | "log"
//!         | "conj" | "re" | "im" | "abs" ;
//! number  = digit { digit } [ "." { digit } ] [ ("e" | "E") [ "+" | "-" ] digit { digit } ] ;
//! ```
//!
//! Arithmetic on constant operands is folded at parse time, so `2*j` becomes
//! the single constant `0+2j`. Rendering uses the same grammar and
//! `parse(render(e)) == e` for every expression the parser can produce.

mod diff;
mod eval;
mod jet;
mod parse;
mod poly;

use std::fmt;

use num_complex::Complex64;

pub use diff::diff_expr;
pub use eval::eval_expr;
pub use jet::{eval_jet, AffineMap, Jet2};
pub use parse::parse_expr;
pub use poly::Polynomial;

/// The complex scalar used throughout the crate.
pub type ComplexScalar = Complex64;

/// The imaginary unit `j`.
pub const J: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sinh,
    Cosh,
    Sqrt,
    Log,
    Conj,
    Re,
    Im,
    Abs,
}

impl Func {
    pub const ALL: [Func; 11] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Sinh,
        Func::Cosh,
        Func::Sqrt,
        Func::Log,
        Func::Conj,
        Func::Re,
        Func::Im,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
            Func::Log => "log",
            Func::Conj => "conj",
            Func::Re => "re",
            Func::Im => "im",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn holomorphy(self) -> Holomorphy {
        match self {
            Func::Sin | Func::Cos | Func::Exp | Func::Sinh | Func::Cosh => Holomorphy::Entire,
            Func::Sqrt | Func::Log => Holomorphy::BranchCut,
            Func::Conj | Func::Re | Func::Im | Func::Abs => Holomorphy::NonHolomorphic,
        }
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How much complex differentiability an expression has.
///
/// Ordered from strongest to weakest so the holomorphy of a tree is the
/// maximum over its nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Holomorphy {
    /// Holomorphic away from poles of `/` and negative powers.
    Entire,
    /// Holomorphic off the principal branch cut of `sqrt`/`log`.
    BranchCut,
    /// Contains `conj`, `re`, `im` or `abs`.
    NonHolomorphic,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Neg(Box<Expr>),
    Fun(Func, Box<Expr>),
}

impl Expr {
    pub fn constant(c: impl Into<Complex64>) -> Expr {
        Expr::Const(c.into())
    }

    pub fn real(v: f64) -> Expr {
        Expr::Const(Complex64::new(v, 0.0))
    }

    pub fn zero() -> Expr {
        Expr::real(0.0)
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Fun(f, Box::new(arg))
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Const(_) | Expr::Var => vec![],
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                vec![a, b]
            }
            Expr::Pow(a, _) | Expr::Neg(a) | Expr::Fun(_, a) => vec![a],
        }
    }

    /// True when the tree contains the variable `z`.
    pub fn depends_on_var(&self) -> bool {
        match self {
            Expr::Var => true,
            Expr::Const(_) => false,
            _ => self.children().into_iter().any(Expr::depends_on_var),
        }
    }

    pub fn holomorphy(&self) -> Holomorphy {
        let own = match self {
            Expr::Fun(f, _) => f.holomorphy(),
            _ => Holomorphy::Entire,
        };
        self.children()
            .into_iter()
            .map(Expr::holomorphy)
            .fold(own, Ord::max)
    }

    /// Strict holomorphy: false as soon as the tree contains a non-holomorphic
    /// primitive or a branch-cut function (`sqrt`, `log`).
    pub fn is_holomorphic(&self) -> bool {
        self.holomorphy() == Holomorphy::Entire
    }

    /// Path of the first non-holomorphic node, in pre-order.
    pub fn find_non_holomorphic(&self) -> Option<Vec<usize>> {
        fn walk(e: &Expr, path: &mut Vec<usize>) -> bool {
            if let Expr::Fun(f, _) = e {
                if f.holomorphy() == Holomorphy::NonHolomorphic {
                    return true;
                }
            }
            for (i, c) in e.children().into_iter().enumerate() {
                path.push(i);
                if walk(c, path) {
                    return true;
                }
                path.pop();
            }
            false
        }
        let mut path = Vec::new();
        walk(self, &mut path).then_some(path)
    }

    /// Refuses conj/re/im/abs; branch-cut functions pass.
    pub fn require_holomorphic(&self) -> crate::Result<()> {
        match self.find_non_holomorphic() {
            Some(path) => Err(crate::Error::non_holomorphic(&path)),
            None => Ok(()),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Expr::node_count)
            .sum::<usize>()
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

// Smart constructors: fold constants and drop neutral elements. They never
// produce an arithmetic node whose operands are all constants.

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Const(x + y),
        (Some(x), _) if x == Complex64::new(0.0, 0.0) => b,
        (_, Some(y)) if y == Complex64::new(0.0, 0.0) => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Const(x - y),
        (_, Some(y)) if y == Complex64::new(0.0, 0.0) => a,
        (Some(x), _) if x == Complex64::new(0.0, 0.0) => neg(b),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (Expr::Const(x), _) | (_, Expr::Const(x)) if x == zero => Expr::Const(zero),
        (Expr::Const(x), e) | (e, Expr::Const(x)) if x == one => e,
        (Expr::Const(x), Expr::Neg(e)) | (Expr::Neg(e), Expr::Const(x)) => mul(Expr::Const(-x), *e),
        (Expr::Const(x), Expr::Mul(l, r)) | (Expr::Mul(l, r), Expr::Const(x))
            if l.as_const().is_some() =>
        {
            mul(Expr::Const(x * l.as_const().unwrap_or(one)), *r)
        }
        (e, Expr::Const(x)) => Expr::Mul(Box::new(Expr::Const(x)), Box::new(e)),
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    let zero = Complex64::new(0.0, 0.0);
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) if y != zero => Expr::Const(x / y),
        (_, Some(y)) if y == Complex64::new(1.0, 0.0) => a,
        (Some(x), _) if x == zero => Expr::Const(zero),
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(e) => *e,
        e => Expr::Neg(Box::new(e)),
    }
}

pub(crate) fn pow(a: Expr, n: i32) -> Expr {
    match (a, n) {
        (_, 0) => Expr::real(1.0),
        (e, 1) => e,
        (Expr::Const(c), n) if n > 0 || c != Complex64::new(0.0, 0.0) => Expr::Const(c.powi(n)),
        (e, n) => Expr::Pow(Box::new(e), n),
    }
}

// Rendering.

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => PREC_ADD,
        Expr::Mul(..) | Expr::Div(..) => PREC_MUL,
        Expr::Neg(_) => PREC_UNARY,
        Expr::Pow(..) => PREC_POW,
        _ => PREC_ATOM,
    }
}

fn fmt_real(v: f64) -> String {
    // `{:?}` is the shortest representation that round-trips.
    format!("{:?}", v)
}

// Constants always render as atoms, parenthesized when signed or complex.
fn fmt_const(c: Complex64) -> String {
    if c.im == 0.0 {
        if c.re < 0.0 {
            format!("(-{})", fmt_real(-c.re))
        } else {
            fmt_real(c.re.abs())
        }
    } else {
        let imag = if c.im.abs() == 1.0 {
            "j".to_string()
        } else {
            format!("{}*j", fmt_real(c.im.abs()))
        };
        let sign = if c.im < 0.0 { "-" } else { "+" };
        if c.re == 0.0 {
            if c.im == 1.0 {
                "j".to_string()
            } else if c.im < 0.0 {
                format!("(-{imag})")
            } else {
                format!("({imag})")
            }
        } else if c.re < 0.0 {
            format!("(-{}{sign}{imag})", fmt_real(-c.re))
        } else {
            format!("({}{sign}{imag})", fmt_real(c.re))
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec || matches!(e, Expr::Neg(_)) {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => f.write_str(&fmt_const(*c)),
            Expr::Var => f.write_str("z"),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let op = if matches!(self, Expr::Add(..)) { '+' } else { '-' };
                write_operand(f, a, PREC_ADD)?;
                write!(f, "{op}")?;
                // Same-precedence right operands keep their grouping.
                write_operand(f, b, PREC_MUL)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = if matches!(self, Expr::Mul(..)) { '*' } else { '/' };
                write_operand(f, a, PREC_MUL)?;
                write!(f, "{op}")?;
                write_operand(f, b, PREC_POW)
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, PREC_POW)
            }
            Expr::Pow(a, n) => {
                write_operand(f, a, PREC_ATOM)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Expr::Fun(func, a) => write!(f, "{func}({a})"),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        parse_expr(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holomorphy_classes() {
        let e = parse_expr("sin(z)*exp(z)+z^3").unwrap();
        assert!(e.is_holomorphic());
        let e = parse_expr("sqrt(z)").unwrap();
        assert_eq!(e.holomorphy(), Holomorphy::BranchCut);
        assert!(!e.is_holomorphic());
        assert!(e.require_holomorphic().is_ok());
        let e = parse_expr("z + conj(z)").unwrap();
        assert!(!e.is_holomorphic());
        assert_eq!(e.find_non_holomorphic(), Some(vec![1]));
        assert!(matches!(
            e.require_holomorphic(),
            Err(crate::Error::NonHolomorphic { path }) if path == "$.1"
        ));
    }

    #[test]
    fn renders_constants_round_trip() {
        for c in [
            Complex64::new(2.5, 0.0),
            Complex64::new(-2.5, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 3.0),
            Complex64::new(1.0, -2.0),
            Complex64::new(-1e-7, 4e20),
        ] {
            let e = Expr::Const(c);
            assert_eq!(parse_expr(&e.render()).unwrap(), e, "{}", e.render());
        }
    }

    #[test]
    fn renders_minimal_parentheses() {
        let e = parse_expr("(z+1)*(z-2)^3 - -z").unwrap();
        assert_eq!(e.render(), "(z+1.0)*(z-2.0)^3-(-z)");
        let e = parse_expr("z-(z-1)").unwrap();
        assert_eq!(e.render(), "z-(z-1.0)");
        let e = parse_expr("z^(-2)").unwrap();
        assert_eq!(e.render(), "z^(-2)");
    }

    #[test]
    fn smart_constructors_fold() {
        assert_eq!(mul(Expr::real(1.0), Expr::Var), Expr::Var);
        assert_eq!(mul(Expr::Var, Expr::real(0.0)), Expr::zero());
        assert_eq!(
            mul(Expr::Const(J), Expr::Neg(Box::new(Expr::Var))),
            Expr::Mul(Box::new(Expr::Const(-J)), Box::new(Expr::Var))
        );
        assert_eq!(pow(Expr::Var, 1), Expr::Var);
        assert_eq!(neg(neg(Expr::Var)), Expr::Var);
    }
}
