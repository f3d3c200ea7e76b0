//! Constant-coefficient linear differential operators on the plane.
//!
//! Operator text is a signed sum of terms `[coef [*]] token`, where `token`
//! is one of `dxx`, `dxy`, `dyy`, `dx`, `dy` or `1` and `coef` is any
//! constant expression of the expression grammar (`2`, `j`, `(1-2*j)`, `pi/2`).
//! A bare constant term multiplies the identity. Repeated tokens accumulate.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::expr::{eval_expr, parse_expr, Expr, Func, Jet2};
use crate::field::Field;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `a_xx*dxx + a_xy*dxy + a_yy*dyy + a_x*dx + a_y*dy + a_0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinOp2 {
    pub a_xx: Complex64,
    pub a_xy: Complex64,
    pub a_yy: Complex64,
    pub a_x: Complex64,
    pub a_y: Complex64,
    pub a_0: Complex64,
}

impl LinOp2 {
    pub fn zero() -> LinOp2 {
        LinOp2 {
            a_xx: ZERO,
            a_xy: ZERO,
            a_yy: ZERO,
            a_x: ZERO,
            a_y: ZERO,
            a_0: ZERO,
        }
    }

    pub fn identity() -> LinOp2 {
        LinOp2 {
            a_0: ONE,
            ..LinOp2::zero()
        }
    }

    pub fn principal(a_xx: Complex64, a_xy: Complex64, a_yy: Complex64) -> LinOp2 {
        LinOp2 {
            a_xx,
            a_xy,
            a_yy,
            ..LinOp2::zero()
        }
    }

    /// `dxx + dyy`
    pub fn laplacian() -> LinOp2 {
        LinOp2::principal(ONE, ZERO, ONE)
    }

    /// `dxx - dyy`
    pub fn wave() -> LinOp2 {
        LinOp2::principal(ONE, ZERO, -ONE)
    }

    pub fn coefficients(&self) -> [Complex64; 6] {
        [self.a_xx, self.a_xy, self.a_yy, self.a_x, self.a_y, self.a_0]
    }

    pub fn is_principal(&self) -> bool {
        self.a_x == ZERO && self.a_y == ZERO && self.a_0 == ZERO
    }

    pub fn scaled(&self, c: Complex64) -> LinOp2 {
        LinOp2 {
            a_xx: self.a_xx * c,
            a_xy: self.a_xy * c,
            a_yy: self.a_yy * c,
            a_x: self.a_x * c,
            a_y: self.a_y * c,
            a_0: self.a_0 * c,
        }
    }

    /// Sum of coefficient moduli, a scale for residual tolerances.
    pub fn coefficient_norm(&self) -> f64 {
        self.coefficients().iter().map(|c| c.norm()).sum()
    }

    pub fn apply(&self, jet: &Jet2) -> Complex64 {
        self.a_xx * jet.uxx
            + self.a_xy * jet.uxy
            + self.a_yy * jet.uyy
            + self.a_x * jet.ux
            + self.a_y * jet.uy
            + self.a_0 * jet.u
    }
}

impl fmt::Display for LinOp2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = [
            (self.a_xx, "dxx"),
            (self.a_xy, "dxy"),
            (self.a_yy, "dyy"),
            (self.a_x, "dx"),
            (self.a_y, "dy"),
            (self.a_0, "1"),
        ];
        let mut first = true;
        for (c, tok) in terms {
            if c == ZERO {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if c == ONE {
                f.write_str(tok)?;
            } else if tok == "1" {
                write!(f, "{}", Expr::Const(c))?;
            } else {
                write!(f, "{}*{tok}", Expr::Const(c))?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl FromStr for LinOp2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<LinOp2> {
        parse_operator(s)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Slot {
    Xx,
    Xy,
    Yy,
    X,
    Y,
    Identity,
}

fn derivative_slot(ident: &str) -> Option<Slot> {
    Some(match ident {
        "dxx" => Slot::Xx,
        "dxy" | "dyx" => Slot::Xy,
        "dyy" => Slot::Yy,
        "dx" => Slot::X,
        "dy" => Slot::Y,
        _ => return None,
    })
}

fn is_coefficient_ident(ident: &str) -> bool {
    ident == "j" || ident == "pi" || Func::from_name(ident).is_some()
}

/// Splits `text` into signed top-level terms `(start, end)`; a sign belongs
/// to the term it precedes.
fn split_terms(text: &str) -> Result<Vec<(usize, usize)>> {
    let bytes = text.as_bytes();
    let mut terms = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut prev: Option<u8> = None;
    let mut prev_prev: Option<u8> = None;
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Syntax {
                        offset: i,
                        expected: "a term before ')'".into(),
                    });
                }
            }
            b'+' | b'-' if depth == 0 => {
                let after_operator = matches!(prev, None | Some(b'*' | b'/' | b'^' | b'+' | b'-'));
                let exponent_sign = matches!(prev, Some(b'e' | b'E'))
                    && matches!(prev_prev, Some(b'0'..=b'9' | b'.'));
                if !after_operator && !exponent_sign {
                    terms.push((start, i));
                    start = i;
                }
            }
            _ => {}
        }
        if !c.is_ascii_whitespace() {
            prev_prev = prev;
            prev = Some(c);
        }
    }
    if depth != 0 {
        return Err(Error::Syntax {
            offset: text.len(),
            expected: "')'".into(),
        });
    }
    terms.push((start, text.len()));
    Ok(terms)
}

fn parse_term(text: &str, start: usize, end: usize, op: &mut LinOp2) -> Result<()> {
    let term = &text[start..end];
    let bytes = term.as_bytes();
    if term.trim().is_empty() {
        return Err(Error::Syntax {
            offset: end,
            expected: "an operator term".into(),
        });
    }

    // Identifiers: every one must be a coefficient name or a trailing token.
    let mut idents = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_digit() || c == b'.' {
            // skip numeric literal including exponent letters
            i += 1;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut k = i + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    i = k;
                }
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let s = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            idents.push((s, i));
        } else {
            i += 1;
        }
    }

    let mut slot = Slot::Identity;
    let mut coef_end = term.len();
    for (n, &(s, e)) in idents.iter().enumerate() {
        let ident = &term[s..e];
        if let Some(found) = derivative_slot(ident) {
            let last = n + 1 == idents.len() && term[e..].trim().is_empty();
            if !last {
                return Err(Error::Syntax {
                    offset: start + e,
                    expected: "end of term after derivative token".into(),
                });
            }
            slot = found;
            coef_end = s;
        } else if !is_coefficient_ident(ident) {
            return Err(Error::HigherOrderTerm {
                term: ident.to_string(),
                offset: start + s,
            });
        }
    }

    // Coefficient text: sign plus whatever precedes the token, minus a
    // trailing `*`.
    let mut coef_text = term[..coef_end].trim_end().to_string();
    if slot != Slot::Identity {
        if let Some(stripped) = coef_text.strip_suffix('*') {
            coef_text = stripped.trim_end().to_string();
        }
        let sign_only = coef_text.trim();
        if sign_only.is_empty() || sign_only == "+" || sign_only == "-" {
            coef_text.push('1');
        }
    }
    let coef_expr = parse_expr(&coef_text).map_err(|err| match err {
        Error::Syntax { offset, expected } => Error::Syntax {
            offset: start + offset.min(coef_end),
            expected,
        },
        Error::UnknownFunction { name, offset } => Error::UnknownFunction {
            name,
            offset: start + offset,
        },
        Error::NonIntegerExponent { offset } => Error::NonIntegerExponent {
            offset: start + offset,
        },
        other => other,
    })?;
    let coef = eval_expr(&coef_expr, ZERO)?;

    let target = match slot {
        Slot::Xx => &mut op.a_xx,
        Slot::Xy => &mut op.a_xy,
        Slot::Yy => &mut op.a_yy,
        Slot::X => &mut op.a_x,
        Slot::Y => &mut op.a_y,
        Slot::Identity => &mut op.a_0,
    };
    *target += coef;
    Ok(())
}

/// Parses operator text such as `dxx + dyy` or `dxx - 2*j*dxy + 3`.
pub fn parse_operator(text: &str) -> Result<LinOp2> {
    if text.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            expected: "an operator term".into(),
        });
    }
    let mut op = LinOp2::zero();
    for (start, end) in split_terms(text)? {
        parse_term(text, start, end, &mut op)?;
    }
    Ok(op)
}

/// The first-order operator `coef_x*dx + coef_y*dy`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstOrderFactor {
    pub coef_x: Complex64,
    pub coef_y: Complex64,
}

impl FirstOrderFactor {
    pub fn new(coef_x: Complex64, coef_y: Complex64) -> FirstOrderFactor {
        FirstOrderFactor { coef_x, coef_y }
    }

    /// The normalized factor `dx + root*dy`.
    pub fn from_root(root: Complex64) -> FirstOrderFactor {
        FirstOrderFactor::new(ONE, root)
    }

    /// `dx + j*dy`
    pub fn d_plus_j() -> FirstOrderFactor {
        FirstOrderFactor::from_root(crate::J)
    }

    /// `dx - j*dy`
    pub fn d_minus_j() -> FirstOrderFactor {
        FirstOrderFactor::from_root(-crate::J)
    }

    /// Divides through by `coef_x`.
    pub fn normalized(&self) -> Result<FirstOrderFactor> {
        if self.coef_x == ZERO {
            return Err(Error::DegenerateLeading);
        }
        Ok(FirstOrderFactor::new(ONE, self.coef_y / self.coef_x))
    }

    /// `coef_y / coef_x`; the characteristic slope of the factor.
    pub fn root(&self) -> Complex64 {
        self.coef_y / self.coef_x
    }

    pub fn apply(&self, jet: &Jet2) -> Complex64 {
        self.coef_x * jet.ux + self.coef_y * jet.uy
    }

    /// Coefficients of `self ∘ other` as a second-order operator.
    pub fn compose(&self, other: &FirstOrderFactor) -> LinOp2 {
        LinOp2::principal(
            self.coef_x * other.coef_x,
            self.coef_x * other.coef_y + self.coef_y * other.coef_x,
            self.coef_y * other.coef_y,
        )
    }
}

impl fmt::Display for FirstOrderFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = LinOp2 {
            a_x: self.coef_x,
            a_y: self.coef_y,
            ..LinOp2::zero()
        };
        write!(f, "{op}")
    }
}

/// Roots of `a_xx*t^2 - a_xy*t + a_yy = 0`, ordered: the first root has a
/// nonnegative imaginary part, ties broken by a nonnegative real part.
pub fn characteristic_roots(op: &LinOp2) -> Result<(Complex64, Complex64)> {
    if op.a_xx == ZERO {
        return Err(Error::DegenerateLeading);
    }
    let b = op.a_xy / op.a_xx;
    let c = op.a_yy / op.a_xx;
    // t^2 + p t + c with p = -b; pick the sign that avoids cancellation.
    let p = -b;
    let mut s = (p * p - 4.0 * c).sqrt();
    if (p.conj() * s).re < 0.0 {
        s = -s;
    }
    let q = -(p + s) / 2.0;
    let (r_a, r_b) = if q == ZERO { (ZERO, ZERO) } else { (q, c / q) };
    Ok(order_roots(r_a, r_b))
}

fn order_roots(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let key = |r: Complex64| (r.im >= 0.0, r.re >= 0.0);
    let a_first = match key(a).cmp(&key(b)) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => (a.im, a.re) >= (b.im, b.re),
    };
    if a_first {
        (a, b)
    } else {
        (b, a)
    }
}

/// Factors the principal part as `a_xx * (dx + r1*dy)(dx + r2*dy)`.
pub fn factor_principal(op: &LinOp2) -> Result<(FirstOrderFactor, FirstOrderFactor)> {
    if !op.is_principal() {
        return Err(Error::NotPrincipal);
    }
    let (r1, r2) = characteristic_roots(op)?;
    Ok((FirstOrderFactor::from_root(r1), FirstOrderFactor::from_root(r2)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CommutationReport {
    pub max_discrepancy: f64,
    pub field_scale: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Step of the outer central difference in [`check_commutation`].
pub const COMMUTATION_STEP: f64 = 1e-4;

/// Compares `f1(f2 u)` with `f2(f1 u)` at the sample points.
///
/// The inner factor is applied exactly through the field's jet; the outer one
/// by central differences of that result with step [`COMMUTATION_STEP`].
/// Passes when the largest discrepancy is at most `1e-8 * (1 + max|u|)`.
pub fn check_commutation<F: Field + ?Sized>(
    f1: &FirstOrderFactor,
    f2: &FirstOrderFactor,
    field: &F,
    samples: &[(f64, f64)],
) -> Result<CommutationReport> {
    let h = COMMUTATION_STEP;
    let inner = |f: &FirstOrderFactor, x: f64, y: f64| -> Result<Complex64> { Ok(f.apply(&field.jet(x, y)?)) };
    let outer = |outer: &FirstOrderFactor, inner_f: &FirstOrderFactor, x: f64, y: f64| -> Result<Complex64> {
        let dx = (inner(inner_f, x + h, y)? - inner(inner_f, x - h, y)?) / (2.0 * h);
        let dy = (inner(inner_f, x, y + h)? - inner(inner_f, x, y - h)?) / (2.0 * h);
        Ok(outer.coef_x * dx + outer.coef_y * dy)
    };
    let mut max_discrepancy: f64 = 0.0;
    let mut field_scale: f64 = 0.0;
    for &(x, y) in samples {
        let a = outer(f1, f2, x, y)?;
        let b = outer(f2, f1, x, y)?;
        max_discrepancy = max_discrepancy.max((a - b).norm());
        field_scale = field_scale.max(field.value(x, y)?.norm());
    }
    let tolerance = 1e-8 * (1.0 + field_scale);
    Ok(CommutationReport {
        max_discrepancy,
        field_scale,
        tolerance,
        passed: max_discrepancy <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, AffineMap, J};
    use crate::field::{ExprField, RealPart};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parses_laplacian_and_wave() {
        assert_eq!(parse_operator("dxx + dyy").unwrap(), LinOp2::laplacian());
        assert_eq!(parse_operator("dxx - dyy").unwrap(), LinOp2::wave());
        assert_eq!(parse_operator("dxx-dyy").unwrap(), LinOp2::wave());
    }

    #[test]
    fn parses_coefficients_and_lower_order() {
        let op = parse_operator("2*dxx - j*dxy + (1-2*j)*dy + 3 - 1e-1*dx + dxx").unwrap();
        assert_eq!(op.a_xx, c(3.0, 0.0));
        assert_eq!(op.a_xy, c(0.0, -1.0));
        assert_eq!(op.a_yy, ZERO);
        assert_eq!(op.a_x, c(-0.1, 0.0));
        assert_eq!(op.a_y, c(1.0, -2.0));
        assert_eq!(op.a_0, c(3.0, 0.0));
        assert_eq!(parse_operator("-dx + 1").unwrap().a_x, c(-1.0, 0.0));
        assert_eq!(parse_operator("pi/2 dyy").unwrap().a_yy, c(std::f64::consts::FRAC_PI_2, 0.0));
    }

    #[test]
    fn unknown_tokens_are_higher_order() {
        assert_eq!(
            parse_operator("dzz"),
            Err(Error::HigherOrderTerm {
                term: "dzz".into(),
                offset: 0
            })
        );
        assert!(matches!(
            parse_operator("dxx + dxxx"),
            Err(Error::HigherOrderTerm { offset: 6, .. })
        ));
        assert!(matches!(parse_operator("dxx +"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_operator("dx dy"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_operator("(dxx"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_operator(""), Err(Error::Syntax { offset: 0, .. })));
    }

    #[test]
    fn display_round_trips() {
        for s in ["dxx + dyy", "dxx + (-1.0)*dyy", "2.0*dxy + j*dx + (1.0-2.0*j)"] {
            let op = parse_operator(s).unwrap();
            assert_eq!(op.to_string(), s);
            assert_eq!(parse_operator(&op.to_string()).unwrap(), op);
        }
        assert_eq!(LinOp2::zero().to_string(), "0");
    }

    #[test]
    fn apply_is_slot_combination() {
        let jet = Jet2 {
            u: c(1.0, 0.0),
            ux: c(2.0, 0.0),
            uy: c(3.0, 0.0),
            uxx: c(-2.0, 0.0),
            uxy: c(5.0, 0.0),
            uyy: c(2.0, 0.0),
        };
        assert_eq!(LinOp2::laplacian().apply(&jet), ZERO);
        assert_eq!(LinOp2::zero().apply(&jet), ZERO);
        assert_eq!(LinOp2::identity().apply(&jet), jet.u);
        assert_eq!(parse_operator("dx + 2*dy + dxy").unwrap().apply(&jet), c(13.0, 0.0));
    }

    #[test]
    fn factors_laplacian() {
        let (f1, f2) = factor_principal(&LinOp2::laplacian()).unwrap();
        assert_eq!(f1.root(), J);
        assert_eq!(f2.root(), -J);
        let back = f1.compose(&f2);
        assert_eq!(back, LinOp2::laplacian());
    }

    #[test]
    fn factors_wave_and_double_root() {
        let (f1, f2) = factor_principal(&LinOp2::wave()).unwrap();
        assert_eq!((f1.root(), f2.root()), (c(1.0, 0.0), c(-1.0, 0.0)));
        assert_eq!(f1.compose(&f2), LinOp2::wave());

        let op = parse_operator("dxx + 2*dxy + dyy").unwrap();
        let (f1, f2) = factor_principal(&op).unwrap();
        assert_eq!(f1, f2);
        assert_eq!(f1.root(), c(1.0, 0.0));
        assert_eq!(f1.compose(&f2), op);
    }

    #[test]
    fn factor_errors() {
        assert_eq!(
            factor_principal(&parse_operator("dxx + dyy + dx").unwrap()),
            Err(Error::NotPrincipal)
        );
        assert_eq!(
            factor_principal(&parse_operator("dxy + dyy").unwrap()),
            Err(Error::DegenerateLeading)
        );
    }

    #[test]
    fn scaled_leading_coefficient() {
        let op = parse_operator("2*dxx + 2*dyy").unwrap();
        let (f1, f2) = factor_principal(&op).unwrap();
        assert_eq!(f1.compose(&f2).scaled(c(2.0, 0.0)), op);
    }

    #[test]
    fn commutation_on_cubic() {
        let u = RealPart(ExprField::new(parse_expr("z^3").unwrap(), AffineMap::y_plus_jx()));
        let samples: Vec<(f64, f64)> = (0..50)
            .map(|i| {
                let t = i as f64 * 0.37;
                (t.sin(), (1.7 * t).cos())
            })
            .collect();
        let r = check_commutation(&FirstOrderFactor::d_plus_j(), &FirstOrderFactor::d_minus_j(), &u, &samples).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.max_discrepancy <= 1e-8);

        let same = check_commutation(&FirstOrderFactor::d_plus_j(), &FirstOrderFactor::d_plus_j(), &u, &samples).unwrap();
        assert_eq!(same.max_discrepancy, 0.0);

        let constant = ExprField::new(Expr::real(2.5), AffineMap::y_plus_jx());
        let r = check_commutation(&FirstOrderFactor::d_plus_j(), &FirstOrderFactor::d_minus_j(), &constant, &samples).unwrap();
        assert_eq!(r.max_discrepancy, 0.0);
    }
}
