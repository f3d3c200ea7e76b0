//! Particular solutions of `(dx - j*dy) u = G(y - j*x)` by quadrature.
//!
//! Writing `u = a + j*b` and `G = G_R + j*G_I`, one admissible split of the
//! equation is
//!
//! ```text
//! da/dx = G_R/2,  da/dy = -G_I/2,  db/dx = G_I/2,  db/dy = G_R/2
//! ```
//!
//! which is compatible exactly when `G` is holomorphic. `a` and `b` are then
//! line integrals from a base point, evaluated with composite Simpson along an
//! axis-parallel path. Along an `x` segment the integrand of `a + j*b` is
//! `G/2`, along a `y` segment it is `j*G/2`, so both are integrated together
//! as one complex quantity.
//!
//! Other splits exist and so do other integration constants: any constant
//! added to `a` or `b` is still a particular solution. Here `a = b = 0` at the
//! base point.
//!
//! Polynomial `G` takes an exact path: `u = (j/2) * (H(y - j*x) - H(w0))`
//! with `H' = G`, which matches the quadrature up to round-off.

use num_complex::Complex64;
use serde::Serialize;

use crate::expr::{eval_expr, eval_jet, AffineMap, Expr, Jet2, Polynomial, J};
use crate::field::{central_jet, ExprField, Field, FnField, FD_JET_STEP};
use crate::{Error, Result};

/// Order of the two axis-parallel legs from the base point to `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QuadraturePath {
    /// Along `x` first at `y = y0`, then along `y`.
    XThenY,
    /// Along `y` first at `x = x0`, then along `x`.
    YThenX,
}

impl QuadraturePath {
    pub fn other(self) -> QuadraturePath {
        match self {
            QuadraturePath::XThenY => QuadraturePath::YThenX,
            QuadraturePath::YThenX => QuadraturePath::XThenY,
        }
    }
}

impl std::str::FromStr for QuadraturePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<QuadraturePath> {
        match s {
            "x-then-y" | "xy" => Ok(QuadraturePath::XThenY),
            "y-then-x" | "yx" => Ok(QuadraturePath::YThenX),
            _ => Err(Error::InvalidSpec(format!(
                "unknown quadrature path `{s}` (expected x-then-y or y-then-x)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub base_point: (f64, f64),
    /// Simpson panels per unit length; even and at least 2.
    pub panels: usize,
    pub path: QuadraturePath,
    /// Use the exact antiderivative when the right-hand side is a polynomial.
    pub allow_exact: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            base_point: (0.0, 0.0),
            panels: 64,
            path: QuadraturePath::XThenY,
            allow_exact: true,
        }
    }
}

impl QuadratureSpec {
    pub fn with_panels(panels: usize) -> QuadratureSpec {
        QuadratureSpec {
            panels,
            ..QuadratureSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels < 2 || self.panels % 2 != 0 {
            return Err(Error::InvalidSpec(format!(
                "panels must be even and at least 2, got {}",
                self.panels
            )));
        }
        let (x0, y0) = self.base_point;
        if !x0.is_finite() || !y0.is_finite() {
            return Err(Error::InvalidSpec("base point must be finite".into()));
        }
        Ok(())
    }

    /// Panels for a segment of the given length: proportional, rounded up to
    /// an even count, at least 2.
    pub fn panels_for(&self, length: f64) -> usize {
        let n = (self.panels as f64 * length.abs()).ceil() as usize;
        let n = n.max(2);
        n + n % 2
    }
}

/// `Re G(y - j*x)` or `Im G(y - j*x)` as a real field.
#[derive(Clone, Debug, PartialEq)]
pub struct RhsPart {
    pub g: Expr,
    pub imaginary: bool,
}

impl Field for RhsPart {
    fn value(&self, x: f64, y: f64) -> Result<Complex64> {
        let v = eval_expr(&self.g, AffineMap::y_minus_jx().at(x, y))?;
        Ok(Complex64::new(if self.imaginary { v.im } else { v.re }, 0.0))
    }

    fn jet(&self, x: f64, y: f64) -> Result<Jet2> {
        let jet = eval_jet(&self.g, &AffineMap::y_minus_jx(), x, y)?;
        Ok(if self.imaginary { jet.im() } else { jet.re() })
    }
}

/// Splits `g(y - j*x)` into `(G_R, G_I)`.
pub fn split_rhs(g: &Expr) -> Result<(RhsPart, RhsPart)> {
    g.require_holomorphic()?;
    Ok((
        RhsPart {
            g: g.clone(),
            imaginary: false,
        },
        RhsPart {
            g: g.clone(),
            imaginary: true,
        },
    ))
}

/// `u_p = a + j*b` solving `(dx - j*dy) u_p = G(y - j*x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticularSolution {
    pub rhs: Expr,
    pub spec: QuadratureSpec,
    /// Antiderivative `H` of the right-hand side when the exact path is used.
    antiderivative: Option<Polynomial>,
}

/// Probe offsets from the base point for the compatibility check.
const PROBES: [(f64, f64); 4] = [(1.0, 1.0), (-1.0, 0.5), (0.5, -1.0), (-0.7, -0.3)];

/// Minimum panels per unit length used by the compatibility check.
const COMPATIBILITY_PANELS: usize = 128;

/// Builds the particular solution for `g`.
///
/// `g` must be holomorphic. For non-polynomial `g` both path orders are
/// compared at a few probe points; disagreement beyond `1e-6` of the field
/// scale is reported as [`Error::IncompatibleSystem`].
pub fn build_particular(g: &Expr, spec: &QuadratureSpec) -> Result<ParticularSolution> {
    g.require_holomorphic()?;
    build_particular_unchecked(g, spec)
}

/// [`build_particular`] without the holomorphy guard. The path comparison
/// still runs, which is what catches non-holomorphic right-hand sides.
pub fn build_particular_unchecked(g: &Expr, spec: &QuadratureSpec) -> Result<ParticularSolution> {
    spec.validate()?;
    let antiderivative = if spec.allow_exact {
        Polynomial::from_expr(g).map(|p| p.antiderivative())
    } else {
        None
    };
    let ps = ParticularSolution {
        rhs: g.clone(),
        spec: *spec,
        antiderivative,
    };
    if ps.antiderivative.is_none() {
        ps.check_compatibility()?;
    }
    Ok(ps)
}

impl ParticularSolution {
    pub fn is_exact(&self) -> bool {
        self.antiderivative.is_some()
    }

    fn check_compatibility(&self) -> Result<()> {
        // The check runs at a fixed resolution so that a coarse user panel
        // count is not mistaken for an incompatible right-hand side.
        let reference = ParticularSolution {
            spec: QuadratureSpec {
                panels: self.spec.panels.max(COMPATIBILITY_PANELS),
                ..self.spec
            },
            ..self.clone()
        };
        let (x0, y0) = self.spec.base_point;
        let mut discrepancy: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (dx, dy) in PROBES {
            let (x, y) = (x0 + dx, y0 + dy);
            // Probes outside the domain of `g` carry no information.
            let (Ok(p), Ok(q)) = (
                reference.quadrature_at(x, y, QuadraturePath::XThenY),
                reference.quadrature_at(x, y, QuadraturePath::YThenX),
            ) else {
                continue;
            };
            let d = (p - q).norm();
            if d.is_nan() || d > discrepancy {
                discrepancy = d;
            }
            scale = scale.max(p.norm()).max(q.norm());
        }
        let tolerance = 1e-6 * (1.0 + scale);
        // Negated comparison so that a NaN discrepancy is also refused.
        if !(discrepancy <= tolerance) {
            return Err(Error::IncompatibleSystem {
                discrepancy,
                tolerance,
            });
        }
        Ok(())
    }

    fn counts(&self, x: f64, y: f64) -> (usize, usize) {
        let (x0, y0) = self.spec.base_point;
        (self.spec.panels_for(x - x0), self.spec.panels_for(y - y0))
    }

    fn g_at(&self, x: f64, y: f64) -> Result<Complex64> {
        eval_expr(&self.rhs, Complex64::new(y, -x))
    }

    /// Composite Simpson of `G(y - j*x)` along one axis-parallel segment.
    fn simpson<P>(&self, n: usize, a: f64, b: f64, point: P) -> Result<Complex64>
    where
        P: Fn(f64) -> (f64, f64),
    {
        if a == b {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let h = (b - a) / n as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..=n {
            let t = if i == n { b } else { a + i as f64 * h };
            let (x, y) = point(t);
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            sum += w * self.g_at(x, y)?;
        }
        Ok(sum * (h / 3.0))
    }

    fn quadrature_with_counts(&self, x: f64, y: f64, path: QuadraturePath, (nx, ny): (usize, usize)) -> Result<Complex64> {
        let (x0, y0) = self.spec.base_point;
        let half = Complex64::new(0.5, 0.0);
        let along_x = |yy: f64| self.simpson(nx, x0, x, |t| (t, yy));
        let along_y = |xx: f64| self.simpson(ny, y0, y, |t| (xx, t));
        Ok(match path {
            QuadraturePath::XThenY => half * along_x(y0)? + 0.5 * J * along_y(x)?,
            QuadraturePath::YThenX => 0.5 * J * along_y(x0)? + half * along_x(y)?,
        })
    }

    /// `a + j*b` at `(x, y)` by numeric quadrature along `path`, regardless
    /// of the exact fast path.
    pub fn quadrature_at(&self, x: f64, y: f64, path: QuadraturePath) -> Result<Complex64> {
        self.quadrature_with_counts(x, y, path, self.counts(x, y))
    }

    /// `|u(path) - u(other path)|` at `(x, y)`.
    pub fn path_discrepancy(&self, x: f64, y: f64) -> Result<f64> {
        let p = self.quadrature_at(x, y, QuadraturePath::XThenY)?;
        let q = self.quadrature_at(x, y, QuadraturePath::YThenX)?;
        Ok((p - q).norm())
    }

    pub fn a(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.value(x, y)?.re)
    }

    pub fn b(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.value(x, y)?.im)
    }

    fn exact_jet(&self, h: &Polynomial, x: f64, y: f64) -> Jet2 {
        let (x0, y0) = self.spec.base_point;
        let w = Complex64::new(y, -x);
        let dh = h.derivative();
        let ddh = dh.derivative();
        let jet = Jet2::affine(w, -J, Complex64::new(1.0, 0.0)).compose(h.eval(w), dh.eval(w), ddh.eval(w));
        let base = h.eval(Complex64::new(y0, -x0));
        (jet - Jet2::constant(base)).scale(0.5 * J)
    }

    /// `(dx - j*dy) u_p - G(y - j*x)` at `(x, y)`.
    pub fn residual_at(&self, x: f64, y: f64) -> Result<Complex64> {
        dminus_residual(self, &self.rhs, x, y)
    }
}

impl Field for ParticularSolution {
    fn value(&self, x: f64, y: f64) -> Result<Complex64> {
        match &self.antiderivative {
            Some(h) => Ok(self.exact_jet(h, x, y).u),
            None => self.quadrature_at(x, y, self.spec.path),
        }
    }

    /// Exact for polynomial right-hand sides; otherwise central differences
    /// with step [`FD_JET_STEP`], every stencil point integrated with the
    /// panel counts of the centre so that the stencil sees one smooth
    /// function.
    fn jet(&self, x: f64, y: f64) -> Result<Jet2> {
        match &self.antiderivative {
            Some(h) => Ok(self.exact_jet(h, x, y)),
            None => {
                let counts = self.counts(x, y);
                let path = self.spec.path;
                let fixed = FnField(|px: f64, py: f64| self.quadrature_with_counts(px, py, path, counts));
                central_jet(&fixed, x, y, FD_JET_STEP)
            }
        }
    }
}

/// `(dx - j*dy) u - g(y - j*x)` from the jet of `u`.
pub fn dminus_residual<F: Field + ?Sized>(u: &F, g: &Expr, x: f64, y: f64) -> Result<Complex64> {
    let jet = u.jet(x, y)?;
    Ok(jet.ux - J * jet.uy - eval_expr(g, Complex64::new(y, -x))?)
}

/// `A(z) = a(-Im z, Re z) + j*b(-Im z, Re z)`, so that `A(y - j*x) = u_p(x, y)`.
pub fn assemble_a(ps: &ParticularSolution, z: Complex64) -> Result<Complex64> {
    ps.value(-z.im, z.re)
}

/// `F(y + j*x) + u_p(x, y)`: a solution of `(dx - j*dy) u = g(y - j*x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NonhomogeneousSolution {
    pub homogeneous: ExprField,
    pub particular: ParticularSolution,
}

impl Field for NonhomogeneousSolution {
    fn value(&self, x: f64, y: f64) -> Result<Complex64> {
        Ok(self.homogeneous.value(x, y)? + self.particular.value(x, y)?)
    }

    fn jet(&self, x: f64, y: f64) -> Result<Jet2> {
        Ok(self.homogeneous.jet(x, y)? + self.particular.jet(x, y)?)
    }
}

pub fn solve_nonhomogeneous(g: &Expr, f_hom: &Expr, spec: &QuadratureSpec) -> Result<NonhomogeneousSolution> {
    f_hom.require_holomorphic()?;
    Ok(NonhomogeneousSolution {
        homogeneous: ExprField::new(f_hom.clone(), AffineMap::y_plus_jx()),
        particular: build_particular(g, spec)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn p(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const POINTS: [(f64, f64); 6] = [(0.3, 0.7), (-0.9, 0.4), (1.0, -1.0), (0.0, 0.5), (-0.25, -0.75), (0.0, 0.0)];

    #[test]
    fn split_examples() {
        let (gr, gi) = split_rhs(&p("z")).unwrap();
        assert_eq!(gr.value(0.3, 0.7).unwrap(), c(0.7, 0.0));
        assert_eq!(gi.value(0.3, 0.7).unwrap(), c(-0.3, 0.0));
        let (gr, gi) = split_rhs(&p("j")).unwrap();
        assert_eq!((gr.value(5.0, 1.0).unwrap().re, gi.value(5.0, 1.0).unwrap().re), (0.0, 1.0));
        let (gr, gi) = split_rhs(&p("z^2")).unwrap();
        let (x, y) = (0.5, -1.5);
        assert!((gr.value(x, y).unwrap().re - (y * y - x * x)).abs() < 1e-15);
        assert!((gi.value(x, y).unwrap().re + 2.0 * x * y).abs() < 1e-15);
        assert!(split_rhs(&p("conj(z)")).is_err());
    }

    #[test]
    fn identity_rhs_closed_form() {
        for allow_exact in [true, false] {
            let spec = QuadratureSpec {
                allow_exact,
                ..QuadratureSpec::default()
            };
            let ps = build_particular(&p("z"), &spec).unwrap();
            assert_eq!(ps.is_exact(), allow_exact);
            for (x, y) in POINTS {
                assert!((ps.a(x, y).unwrap() - x * y / 2.0).abs() < 1e-12);
                assert!((ps.b(x, y).unwrap() - (y * y - x * x) / 4.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_rhs() {
        let ps = build_particular(&p("j"), &QuadratureSpec::default()).unwrap();
        let jet = ps.jet(0.4, -0.2).unwrap();
        assert!((jet.u - c(0.1, 0.2)).norm() < 1e-15); // a = -y/2, b = x/2
        assert!((jet.ux - c(0.0, 0.5)).norm() < 1e-15);
        assert!((jet.uy - c(-0.5, 0.0)).norm() < 1e-15);
        assert!(ps.residual_at(0.4, -0.2).unwrap().norm() < 1e-15);

        let zero = build_particular(&Expr::zero(), &QuadratureSpec::default()).unwrap();
        assert_eq!(zero.value(0.7, 0.1).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn assembled_function() {
        let ps = build_particular(&p("z"), &QuadratureSpec::default()).unwrap();
        assert!((assemble_a(&ps, c(1.0, 0.0)).unwrap() - c(0.0, 0.25)).norm() < 1e-15);
        assert_eq!(assemble_a(&ps, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!((assemble_a(&ps, c(2.0, -1.0)).unwrap() - c(1.0, 0.75)).norm() < 1e-15);
        for (x, y) in POINTS {
            assert_eq!(assemble_a(&ps, c(y, -x)).unwrap(), ps.value(x, y).unwrap());
        }
    }

    #[test]
    fn exponential_residual_and_paths() {
        let ps = build_particular(&p("exp(z)"), &QuadratureSpec::default()).unwrap();
        assert!(!ps.is_exact());
        for (x, y) in POINTS {
            let g = c(y, -x).exp();
            assert!(ps.residual_at(x, y).unwrap().norm() <= 1e-6 * (1.0 + g.norm()));
            let exact = 0.5 * J * (c(y, -x).exp() - 1.0);
            assert!((ps.value(x, y).unwrap() - exact).norm() < 1e-8);
            assert!(ps.path_discrepancy(x, y).unwrap() <= 1e-8 * (1.0 + exact.norm()));
        }
    }

    #[test]
    fn refining_panels_converges_fourth_order() {
        let exact = |x: f64, y: f64| 0.5 * J * (c(y, -x).exp() - 1.0);
        let err = |panels: usize| {
            let spec = QuadratureSpec::with_panels(panels);
            let ps = build_particular(&p("exp(z)"), &spec).unwrap();
            POINTS
                .iter()
                .map(|&(x, y)| (ps.value(x, y).unwrap() - exact(x, y)).norm())
                .fold(0.0, f64::max)
        };
        let (e4, e8) = (err(4), err(8));
        assert!(e4 / e8 >= 8.0, "{e4} {e8}");
    }

    #[test]
    fn non_holomorphic_rhs() {
        assert!(matches!(
            build_particular(&p("conj(z)"), &QuadratureSpec::default()),
            Err(Error::NonHolomorphic { .. })
        ));
        assert!(matches!(
            build_particular_unchecked(&p("conj(z)"), &QuadratureSpec::default()),
            Err(Error::IncompatibleSystem { .. })
        ));
    }

    #[test]
    fn invalid_spec() {
        for panels in [0, 3] {
            assert!(build_particular(&p("z"), &QuadratureSpec::with_panels(panels)).is_err());
        }
        assert_eq!(QuadratureSpec::default().panels_for(1.0), 64);
        assert_eq!(QuadratureSpec::with_panels(2).panels_for(0.1), 2);
        assert_eq!(QuadratureSpec::with_panels(10).panels_for(-0.55), 6);
    }

    #[test]
    fn homogeneous_freedom() {
        let spec = QuadratureSpec::default();
        let plain = solve_nonhomogeneous(&p("z"), &Expr::zero(), &spec).unwrap();
        let shifted = solve_nonhomogeneous(&p("z"), &p("z"), &spec).unwrap();
        let hom = solve_nonhomogeneous(&Expr::zero(), &p("z^2"), &spec).unwrap();
        for (x, y) in POINTS {
            let r0 = dminus_residual(&plain, &p("z"), x, y).unwrap();
            let r1 = dminus_residual(&shifted, &p("z"), x, y).unwrap();
            assert!((r0 - r1).norm() <= 1e-12);
            assert_eq!(hom.value(x, y).unwrap(), c(y, x) * c(y, x));
            assert!(dminus_residual(&hom, &Expr::zero(), x, y).unwrap().norm() < 1e-14);
            let v = plain.value(x, y).unwrap();
            assert!((v - c(x * y / 2.0, (y * y - x * x) / 4.0)).norm() < 1e-15);
        }
    }
}
