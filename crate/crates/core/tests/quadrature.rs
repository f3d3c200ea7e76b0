//! Particular solutions of `(dx - j*dy) u = G(y - j*x)`.

use harmonic_core::characteristics::general_solution;
use harmonic_core::expr::{eval_expr, parse_expr, AffineMap};
use harmonic_core::field::{ExprField, FnField};
use harmonic_core::particular::{
    assemble_a, build_particular, dminus_residual, solve_nonhomogeneous, QuadraturePath, QuadratureSpec,
};
use harmonic_core::verify::{verify_on_grid, VerifyOptions};
use harmonic_core::{Expr, Field, GridSpec, LinOp2, J};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(s: &str) -> Expr {
    parse_expr(s).unwrap()
}

fn numeric(path: QuadraturePath) -> QuadratureSpec {
    QuadratureSpec {
        path,
        allow_exact: false,
        ..QuadratureSpec::default()
    }
}

const PATH_SUITE: [&str; 4] = ["z", "z^2", "j", "exp(z)"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn path_orders_agree(k in 0usize..4, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let ps = build_particular(&p(PATH_SUITE[k]), &numeric(QuadraturePath::XThenY)).unwrap();
        let a = ps.quadrature_at(x, y, QuadraturePath::XThenY).unwrap();
        let b = ps.quadrature_at(x, y, QuadraturePath::YThenX).unwrap();
        prop_assert!((a - b).norm() <= 1e-8 * (1.0 + a.norm()));
    }

    #[test]
    fn assembled_function_reproduces_field(k in 0usize..4, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let ps = build_particular(&p(PATH_SUITE[k]), &QuadratureSpec::default()).unwrap();
        let direct = ps.value(x, y).unwrap();
        prop_assert_eq!(assemble_a(&ps, Complex64::new(y, -x)).unwrap(), direct);
    }

    #[test]
    fn constant_shift_stays_particular(k in 0usize..4, x in -1.0f64..1.0, y in -1.0f64..1.0, shift in -5.0f64..5.0) {
        let g = p(PATH_SUITE[k]);
        let ps = build_particular(&g, &QuadratureSpec::default()).unwrap();
        let shifted = FnField(|x: f64, y: f64| Ok(ps.value(x, y)? + shift));
        let r0 = dminus_residual(&ps, &g, x, y).unwrap();
        let r1 = dminus_residual(&shifted, &g, x, y).unwrap();
        prop_assert!((r0 - r1).norm() <= 1e-6);
    }
}

fn interior_points(seed: u64, n: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (rng.gen_range(-0.95..0.95), rng.gen_range(-0.95..0.95))).collect()
}

#[test]
fn residual_contract() {
    for s in ["z", "z^2", "j", "z^3 - 2*j*z", "exp(z)", "sin(z)", "cosh(z)/(z - 4)"] {
        let g = p(s);
        let ps = build_particular(&g, &QuadratureSpec::default()).unwrap();
        let tol = if ps.is_exact() { 1e-12 } else { 1e-6 };
        for (x, y) in interior_points(5, 50) {
            let gv = eval_expr(&g, Complex64::new(y, -x)).unwrap();
            let r = ps.residual_at(x, y).unwrap();
            assert!(r.norm() <= tol * (1.0 + gv.norm()), "{s} at ({x}, {y}): {r}");
        }
    }
}

#[test]
fn exact_and_numeric_paths_agree() {
    for s in ["z", "z^2", "(z - j)^3"] {
        let exact = build_particular(&p(s), &QuadratureSpec::default()).unwrap();
        let numeric = build_particular(&p(s), &numeric(QuadraturePath::YThenX)).unwrap();
        assert!(exact.is_exact() && !numeric.is_exact());
        for (x, y) in interior_points(9, 20) {
            let (a, b) = (exact.value(x, y).unwrap(), numeric.value(x, y).unwrap());
            assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()), "{s}");
        }
    }
}

#[test]
fn simpson_error_drops_sixteenfold() {
    let exact = |x: f64, y: f64| 0.5 * J * (Complex64::new(y, -x).exp() - 1.0);
    let error = |panels: usize| {
        let ps = build_particular(&p("exp(z)"), &QuadratureSpec::with_panels(panels)).unwrap();
        interior_points(13, 30)
            .into_iter()
            .map(|(x, y)| (ps.value(x, y).unwrap() - exact(x, y)).norm())
            .fold(0.0, f64::max)
    };
    let errors: Vec<f64> = [2, 4, 8, 16].into_iter().map(error).collect();
    for w in errors.windows(2) {
        assert!(w[0] / w[1] >= 8.0, "{errors:?}");
    }
}

#[test]
fn laplace_chain_is_harmonic() {
    let grid = GridSpec::new(-0.5, 0.5, 17, -0.5, 0.5, 17).unwrap();
    for (f, g) in [("z^2", "z"), ("exp(z)", "exp(z)"), ("sin(z)", "z^2")] {
        let hom = general_solution(&LinOp2::laplacian(), &p(f), &Expr::zero(), false).unwrap();
        let ps = build_particular(&p(g), &QuadratureSpec::default()).unwrap();
        let u = FnField(|x: f64, y: f64| Ok(Complex64::new((hom.value(x, y)? + ps.value(x, y)?).re, 0.0)));
        let report = verify_on_grid(&LinOp2::laplacian(), &u, &grid, &VerifyOptions::default()).unwrap();
        assert!(report.certified, "F = {f}, G = {g}: {report:?}");
    }
}

#[test]
fn homogeneous_part_does_not_change_residual() {
    let spec = QuadratureSpec::default();
    for s in ["z", "exp(z)"] {
        let g = p(s);
        let base = solve_nonhomogeneous(&g, &Expr::zero(), &spec).unwrap();
        let with_f = solve_nonhomogeneous(&g, &p("z"), &spec).unwrap();
        for (x, y) in interior_points(17, 20) {
            let r0 = dminus_residual(&base, &g, x, y).unwrap();
            let r1 = dminus_residual(&with_f, &g, x, y).unwrap();
            assert!((r0 - r1).norm() <= 1e-12, "{s}");
        }
    }
    let hom = solve_nonhomogeneous(&Expr::zero(), &p("z^2"), &spec).unwrap();
    let squared = ExprField::new(p("z^2"), AffineMap::y_plus_jx());
    assert_eq!(hom.value(0.3, 0.6).unwrap(), squared.value(0.3, 0.6).unwrap());
}
