use harmonic_core::expr::{parse_expr, AffineMap, Jet2};
use harmonic_core::field::{ExprField, RealPart};
use harmonic_core::operator::{check_commutation, factor_principal, parse_operator};
use harmonic_core::{FirstOrderFactor, LinOp2, J};
use num_complex::Complex64;
use proptest::prelude::*;

fn complex(range: f64) -> impl Strategy<Value = Complex64> {
    ((-range..range), (-range..range)).prop_map(|(a, b)| Complex64::new(a, b))
}

fn jet() -> impl Strategy<Value = Jet2> {
    proptest::collection::vec(complex(10.0), 6).prop_map(|v| Jet2 {
        u: v[0],
        ux: v[1],
        uy: v[2],
        uxx: v[3],
        uxy: v[4],
        uyy: v[5],
    })
}

fn op() -> impl Strategy<Value = LinOp2> {
    proptest::collection::vec(complex(5.0), 6).prop_map(|v| LinOp2 {
        a_xx: v[0],
        a_xy: v[1],
        a_yy: v[2],
        a_x: v[3],
        a_y: v[4],
        a_0: v[5],
    })
}

proptest! {
    #[test]
    fn recomposition_reproduces_principal_part(a_xy in complex(5.0), a_yy in complex(5.0)) {
        let op = LinOp2::principal(Complex64::new(1.0, 0.0), a_xy, a_yy);
        let (f1, f2) = factor_principal(&op).unwrap();
        let back = f1.compose(&f2);
        let (r1, r2) = (f1.root(), f2.root());
        prop_assert_eq!(back.a_xx, Complex64::new(1.0, 0.0));
        prop_assert!((back.a_xy - (r1 + r2)).norm() == 0.0);
        prop_assert!((back.a_xy - a_xy).norm() <= 1e-12 * (1.0 + a_xy.norm()));
        prop_assert!((back.a_yy - a_yy).norm() <= 1e-12 * (1.0 + a_yy.norm() + a_xy.norm() * a_xy.norm()));
        // Ordering: a root with nonnegative imaginary part comes first, then
        // one with nonnegative real part.
        prop_assert!(!(r1.im < 0.0 && r2.im >= 0.0));
        if r1.im >= 0.0 && r2.im >= 0.0 {
            prop_assert!(!(r1.re < 0.0 && r2.re >= 0.0));
        }
    }

    #[test]
    fn composition_commutes_on_coefficients(r1 in complex(3.0), r2 in complex(3.0)) {
        let (f1, f2) = (FirstOrderFactor::from_root(r1), FirstOrderFactor::from_root(r2));
        prop_assert_eq!(f1.compose(&f2), f2.compose(&f1));
    }

    #[test]
    fn apply_is_linear(op in op(), j1 in jet(), j2 in jet(), a in complex(3.0), b in complex(3.0)) {
        let combined = j1.scale(a) + j2.scale(b);
        let lhs = op.apply(&combined);
        let rhs = a * op.apply(&j1) + b * op.apply(&j2);
        let scale = 1.0 + a.norm() * op.apply(&j1).norm() + b.norm() * op.apply(&j2).norm() + op.coefficient_norm() * 100.0;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
    }

    #[test]
    fn display_parses_back(op in op()) {
        prop_assert_eq!(parse_operator(&op.to_string()).unwrap(), op);
    }

    #[test]
    fn factors_commute_on_smooth_fields(r1 in complex(2.0), r2 in complex(2.0), k in 0usize..4) {
        let e = ["z^3", "exp(z)", "sin(z)*z", "cosh(z)"][k];
        let u = RealPart(ExprField::new(parse_expr(e).unwrap(), AffineMap::y_plus_jx()));
        let samples = [(0.1, 0.2), (-0.3, 0.5), (0.4, -0.6), (0.0, 0.9)];
        let (f1, f2) = (FirstOrderFactor::from_root(r1), FirstOrderFactor::from_root(r2));
        let report = check_commutation(&f1, &f2, &u, &samples).unwrap();
        let weight = (1.0 + r1.norm()) * (1.0 + r2.norm());
        prop_assert!(report.max_discrepancy <= 1e-6 * weight * (1.0 + report.field_scale), "{:?}", report);
    }
}

#[test]
fn laplacian_factors_into_d_plus_and_minus_j() {
    let (f1, f2) = factor_principal(&parse_operator("dxx + dyy").unwrap()).unwrap();
    assert_eq!((f1.root(), f2.root()), (J, -J));
    assert_eq!(f1.compose(&f2), LinOp2::laplacian());
    assert_eq!(f1.to_string(), "dx + j*dy");
    assert_eq!(f2.to_string(), "dx + (-j)*dy");
}

#[test]
fn commutation_report_on_cubic() {
    let u = RealPart(ExprField::new(parse_expr("z^3").unwrap(), AffineMap::y_plus_jx()));
    let samples: Vec<(f64, f64)> = (0..50).map(|i| ((i as f64 * 0.71).sin(), (i as f64 * 1.37).cos())).collect();
    let r = check_commutation(&FirstOrderFactor::d_plus_j(), &FirstOrderFactor::d_minus_j(), &u, &samples).unwrap();
    assert!(r.passed);
    assert!(r.max_discrepancy <= 1e-8);
    assert_eq!(r.tolerance, 1e-8 * (1.0 + r.field_scale));
}
