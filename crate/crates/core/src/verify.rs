//! Finite-difference residuals, used as an oracle that never looks at jets.
//!
//! Operators are applied with second-order central stencils: the 5-point
//! Laplacian pieces plus the 4-corner mixed stencil when `a_xy != 0`. On a
//! grid the residual is taken at interior nodes only. With two levels the
//! grid is also refined once (step halved) and the convergence order is
//! estimated from the nodes the two grids share.
//!
//! Certification asks for a small residual *and* for evidence that it is
//! truncation error going to zero: the largest residual must stay below
//! `tau_factor * (1 + max|u|) * (1 + k^4) * h^2`, where `k` is an optional
//! wavenumber of the field, and with two levels either the observed order is
//! at least 1.5 or the coarse residual is already at round-off level (the
//! stencil is exact on the field).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::field::Field;
use crate::grid::{map_grid, GridSpec};
use crate::operator::LinOp2;
use crate::{Error, Result};

/// Central-difference application of `op` with step `h` in both directions.
pub fn fd_apply<F: Field + ?Sized>(op: &LinOp2, field: &F, x: f64, y: f64, h: f64) -> Result<Complex64> {
    fd_apply_steps(op, field, x, y, h, h)
}

/// Central-difference application of `op` with steps `hx`, `hy`.
pub fn fd_apply_steps<F: Field + ?Sized>(
    op: &LinOp2,
    field: &F,
    x: f64,
    y: f64,
    hx: f64,
    hy: f64,
) -> Result<Complex64> {
    if !(hx > 0.0 && hy > 0.0) {
        return Err(Error::InvalidGrid(format!("steps must be positive, got {hx}, {hy}")));
    }
    let u = |dx: f64, dy: f64| field.value(x + dx, y + dy);
    let c = u(0.0, 0.0)?;
    let (e, w, n, s) = (u(hx, 0.0)?, u(-hx, 0.0)?, u(0.0, hy)?, u(0.0, -hy)?);
    let mixed = if op.a_xy != Complex64::new(0.0, 0.0) {
        let (ne, nw, se, sw) = (u(hx, hy)?, u(-hx, hy)?, u(hx, -hy)?, u(-hx, -hy)?);
        (ne - nw - se + sw) / (4.0 * hx * hy)
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok(combine(op, c, e, w, n, s, mixed, hx, hy))
}

#[allow(clippy::too_many_arguments)]
fn combine(
    op: &LinOp2,
    c: Complex64,
    e: Complex64,
    w: Complex64,
    n: Complex64,
    s: Complex64,
    mixed: Complex64,
    hx: f64,
    hy: f64,
) -> Complex64 {
    op.a_xx * ((e - 2.0 * c + w) / (hx * hx))
        + op.a_yy * ((n - 2.0 * c + s) / (hy * hy))
        + op.a_xy * mixed
        + op.a_x * ((e - w) / (2.0 * hx))
        + op.a_y * ((n - s) / (2.0 * hy))
        + op.a_0 * c
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// 1: the given grid only. 2: also the grid with halved steps.
    pub levels: u8,
    pub tau_factor: f64,
    /// Spatial frequency of the field; scales the tolerance by `1 + k^4`.
    pub wavenumber: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            levels: 2,
            tau_factor: 10.0,
            wavenumber: 0.0,
        }
    }
}

impl VerifyOptions {
    pub fn levels(levels: u8) -> VerifyOptions {
        VerifyOptions {
            levels,
            ..VerifyOptions::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StencilReport {
    pub grid: GridSpec,
    /// `[hx, hy]`
    pub h: [f64; 2],
    pub max_residual: f64,
    pub mean_residual: f64,
    pub convergence_order: Option<f64>,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_max: Option<f64>,
    #[serde(skip)]
    pub tolerance: f64,
    #[serde(skip)]
    pub max_abs_u: f64,
}

/// Largest element; NaN if any element is NaN.
fn nan_max(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

struct Level {
    grid: GridSpec,
    values: Vec<Complex64>,
    /// `|residual|` at interior nodes, row-major over `1..nx-1` by `1..ny-1`.
    residuals: Vec<f64>,
}

impl Level {
    fn run<F: Field + ?Sized>(op: &LinOp2, field: &F, grid: GridSpec) -> Result<Level> {
        let values = map_grid(&grid, |x, y| field.value(x, y))?;
        let (nx, ny) = (grid.nx, grid.ny);
        let (hx, hy) = (grid.hx(), grid.hy());
        let at = |ix: usize, iy: usize| values[iy * nx + ix];
        let inner_nx = nx - 2;
        let residuals: Vec<f64> = (0..inner_nx * (ny - 2))
            .into_par_iter()
            .map(|k| {
                let (ix, iy) = (k % inner_nx + 1, k / inner_nx + 1);
                let mixed = if op.a_xy != Complex64::new(0.0, 0.0) {
                    (at(ix + 1, iy + 1) - at(ix - 1, iy + 1) - at(ix + 1, iy - 1) + at(ix - 1, iy - 1))
                        / (4.0 * hx * hy)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                let r = combine(
                    op,
                    at(ix, iy),
                    at(ix + 1, iy),
                    at(ix - 1, iy),
                    at(ix, iy + 1),
                    at(ix, iy - 1),
                    mixed,
                    hx,
                    hy,
                );
                r.norm()
            })
            .collect();
        Ok(Level { grid, values, residuals })
    }

    fn residual(&self, ix: usize, iy: usize) -> f64 {
        self.residuals[(iy - 1) * (self.grid.nx - 2) + (ix - 1)]
    }

    fn max_abs_u(&self) -> f64 {
        nan_max(self.values.iter().map(|v| v.norm()))
    }

    /// Round-off level of the stencil for this field.
    fn floor(&self, op: &LinOp2) -> f64 {
        let (hx, hy) = (self.grid.hx(), self.grid.hy());
        let weight = op.a_xx.norm() / (hx * hx)
            + op.a_yy.norm() / (hy * hy)
            + op.a_xy.norm() / (hx * hy)
            + op.a_x.norm() / hx
            + op.a_y.norm() / hy
            + op.a_0.norm();
        1e3 * f64::EPSILON * (1.0 + self.max_abs_u()) * weight
    }
}

/// Residual statistics of `op` applied to `field` over the interior of `grid`.
pub fn verify_on_grid<F: Field + ?Sized>(
    op: &LinOp2,
    field: &F,
    grid: &GridSpec,
    options: &VerifyOptions,
) -> Result<StencilReport> {
    grid.validate()?;
    if grid.nx < 5 || grid.ny < 5 {
        return Err(Error::InvalidGrid(format!(
            "verification needs at least 3x3 interior nodes, got {}x{} nodes",
            grid.nx, grid.ny
        )));
    }
    if !(options.levels == 1 || options.levels == 2) {
        return Err(Error::InvalidSpec(format!("levels must be 1 or 2, got {}", options.levels)));
    }

    let base = Level::run(op, field, *grid)?;
    let max_residual = nan_max(base.residuals.iter().copied());
    let mean_residual = base.residuals.iter().sum::<f64>() / base.residuals.len() as f64;
    let max_abs_u = base.max_abs_u();
    let h = grid.hx().max(grid.hy());
    let k4 = options.wavenumber.powi(4);
    let tolerance = options.tau_factor * (1.0 + max_abs_u) * (1.0 + k4) * h * h;

    let mut convergence_order = None;
    let mut converging = true;
    if options.levels == 2 {
        let fine = Level::run(op, field, grid.refined())?;
        let interior = (1..grid.ny - 1).flat_map(|iy| (1..grid.nx - 1).map(move |ix| (ix, iy)));
        let coarse_max = max_residual;
        let fine_max = nan_max(interior.map(|(ix, iy)| fine.residual(2 * ix, 2 * iy)));
        if coarse_max > 0.0 && fine_max > 0.0 {
            convergence_order = Some((coarse_max / fine_max).log2());
        }
        let stencil_exact = coarse_max <= base.floor(op);
        converging = stencil_exact || convergence_order.is_some_and(|p| p >= 1.5);
    }

    Ok(StencilReport {
        grid: *grid,
        h: [grid.hx(), grid.hy()],
        max_residual,
        mean_residual,
        convergence_order,
        certified: max_residual <= tolerance && converging,
        boundary_max: None,
        tolerance,
        max_abs_u,
    })
}

/// A straight boundary piece sampled uniformly, with the value the field
/// should take on it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySegment {
    pub start: (f64, f64),
    pub end: (f64, f64),
    pub expected: Complex64,
}

pub const BOUNDARY_SAMPLES: usize = 256;

/// Largest `|field - expected|` over [`BOUNDARY_SAMPLES`] points per segment,
/// endpoints included.
pub fn check_boundary<F: Field + ?Sized>(field: &F, segments: &[BoundarySegment]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for seg in segments {
        let deviations: Vec<Result<f64>> = (0..BOUNDARY_SAMPLES)
            .into_par_iter()
            .map(|i| {
                let t = i as f64 / (BOUNDARY_SAMPLES - 1) as f64;
                let (x, y) = if i + 1 == BOUNDARY_SAMPLES {
                    seg.end
                } else {
                    (
                        seg.start.0 + t * (seg.end.0 - seg.start.0),
                        seg.start.1 + t * (seg.end.1 - seg.start.1),
                    )
                };
                Ok((field.value(x, y)? - seg.expected).norm())
            })
            .collect();
        for d in deviations {
            worst = nan_max([worst, d?]);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::operator::parse_operator;
    use std::f64::consts::PI;

    fn real(f: impl Fn(f64, f64) -> f64 + Sync) -> FnField<impl Fn(f64, f64) -> Result<Complex64> + Sync> {
        FnField(move |x, y| Ok(Complex64::new(f(x, y), 0.0)))
    }

    #[test]
    fn quadratics_are_exact() {
        let lap = LinOp2::laplacian();
        let saddle = real(|x, y| x * x - y * y);
        assert!(fd_apply(&lap, &saddle, 0.3, -0.7, 1e-2).unwrap().norm() <= 1e-10);
        let bowl = real(|x, y| x * x + y * y);
        assert!((fd_apply(&lap, &bowl, 0.3, -0.7, 1e-2).unwrap().re - 4.0).abs() <= 1e-9);
    }

    #[test]
    fn sinh_sin_converges_at_order_two() {
        let lap = LinOp2::laplacian();
        let u = real(|x, y| (PI * x).sinh() * (PI * y).sin());
        let h = 1.0 / 64.0;
        let r1 = fd_apply(&lap, &u, 0.5, 0.5, h).unwrap().norm();
        let r2 = fd_apply(&lap, &u, 0.5, 0.5, h / 2.0).unwrap().norm();
        let scale = (PI * 0.5).sinh();
        assert!(r1 <= 10.0 * h * h * PI.powi(4) * scale);
        assert!((r1 / r2 - 4.0).abs() < 0.2, "{}", r1 / r2);
    }

    #[test]
    fn mixed_and_first_order_terms() {
        let op = parse_operator("dxy + 2*dx - dy + 3").unwrap();
        let u = real(|x, y| x * y + x * x * x);
        let (x, y) = (0.4, 0.2);
        let exact = 1.0 + 2.0 * (y + 3.0 * x * x) - x + 3.0 * (x * y + x * x * x);
        let r = fd_apply_steps(&op, &u, x, y, 1e-3, 2e-3).unwrap();
        assert!((r.re - exact).abs() < 1e-5);
        assert!(fd_apply(&op, &u, x, y, 0.0).is_err());
    }

    #[test]
    fn exponential_certifies_with_order_two() {
        let u = real(|x, y| y.exp() * x.cos()); // Re exp(y + jx)
        let grid = GridSpec::unit_square(33).unwrap();
        let report = verify_on_grid(&LinOp2::laplacian(), &u, &grid, &VerifyOptions::default()).unwrap();
        let order = report.convergence_order.unwrap();
        assert!((order - 2.0).abs() <= 0.3, "{order}");
        assert!(report.certified);
        assert!(report.max_residual >= report.mean_residual && report.mean_residual >= 0.0);
    }

    #[test]
    fn zero_field_has_zero_residual() {
        let u = real(|_, _| 0.0);
        let grid = GridSpec::unit_square(9).unwrap();
        let report = verify_on_grid(&LinOp2::laplacian(), &u, &grid, &VerifyOptions::default()).unwrap();
        assert_eq!(report.max_residual, 0.0);
        assert_eq!(report.convergence_order, None);
        assert!(report.certified);
    }

    #[test]
    fn non_harmonic_is_rejected() {
        let u = real(|x, y| x * x + y * y);
        let grid = GridSpec::unit_square(17).unwrap();
        let report = verify_on_grid(&LinOp2::laplacian(), &u, &grid, &VerifyOptions::default()).unwrap();
        assert!((report.max_residual - 4.0).abs() < 1e-6);
        assert!(report.convergence_order.unwrap().abs() < 1e-6);
        assert!(!report.certified);
        let single = verify_on_grid(&LinOp2::laplacian(), &u, &grid, &VerifyOptions::levels(1)).unwrap();
        assert_eq!(single.convergence_order, None);
        assert!(!single.certified);
    }

    #[test]
    fn nan_is_never_certified() {
        let u = real(|x, _| if x > 0.5 { f64::NAN } else { 0.0 });
        let grid = GridSpec::unit_square(9).unwrap();
        let report = verify_on_grid(&LinOp2::laplacian(), &u, &grid, &VerifyOptions::default()).unwrap();
        assert!(report.max_residual.is_nan());
        assert!(!report.certified);
    }

    #[test]
    fn small_grids_and_bad_levels() {
        let u = real(|_, _| 0.0);
        let lap = LinOp2::laplacian();
        assert!(verify_on_grid(&lap, &u, &GridSpec::unit_square(4).unwrap(), &VerifyOptions::default()).is_err());
        assert!(verify_on_grid(&lap, &u, &GridSpec::unit_square(5).unwrap(), &VerifyOptions::levels(3)).is_err());
    }

    #[test]
    fn report_json_fields() {
        let u = real(|x, y| x * y);
        let grid = GridSpec::unit_square(5).unwrap();
        let report = verify_on_grid(&LinOp2::laplacian(), &u, &grid, &VerifyOptions::levels(1)).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        let keys: Vec<&String> = json.as_object().unwrap().keys().collect();
        assert_eq!(
            keys,
            ["certified", "convergence_order", "grid", "h", "max_residual", "mean_residual"]
        );
        assert!(json["convergence_order"].is_null());
        assert_eq!(json["h"][0], 0.25);
    }

    #[test]
    fn boundary_deviation() {
        let one = real(|_, _| 1.0);
        let seg = BoundarySegment {
            start: (0.0, 0.0),
            end: (0.0, 1.0),
            expected: Complex64::new(0.0, 0.0),
        };
        assert_eq!(check_boundary(&one, &[seg]).unwrap(), 1.0);
        let edge = real(|x, _| x * (1.0 - x));
        assert!(check_boundary(&edge, &[seg]).unwrap() == 0.0);
    }
}
