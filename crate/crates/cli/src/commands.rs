use std::path::Path;

use harmonic_core::bvp::{
    bay_boundary_segments, bay_interior_grid, bay_solution, bay_velocity, hyperbolic_general, BaySpec,
};
use harmonic_core::characteristics::{evaluate_on_grid, general_solution, general_solution_unchecked};
use harmonic_core::expr::{diff_expr, eval_expr, parse_expr};
use harmonic_core::field::{ExprField, RealPart};
use harmonic_core::grid::map_grid;
use harmonic_core::operator::{factor_principal, parse_operator};
use harmonic_core::particular::{dminus_residual, solve_nonhomogeneous, QuadraturePath, QuadratureSpec};
use harmonic_core::verify::{check_boundary, verify_on_grid, StencilReport, VerifyOptions};
use harmonic_core::{Field, GridSpec, LinOp2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cli::{
    BayArgs, Command, EvalArgs, FactorArgs, OracleArgs, ParticularArgs, RunConfig, SolveArgs, VerifyArgs, WaveArgs,
};
use crate::output::{emit, json, parse_constant, parse_field, parse_grid, parse_pair, Csv};
use crate::CliError;

/// What a successful run found. Errors are reported through [`CliError`].
#[derive(Debug, PartialEq)]
pub enum Outcome {
    Done,
    /// The oracle rejected the field; the message explains by how much.
    Rejected(String),
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    match &config.command {
        Command::Eval(args) => eval(args, config.seed),
        Command::Solve(args) => solve(args),
        Command::Factor(args) => factor(args),
        Command::Particular(args) => particular(args),
        Command::Verify(args) => verify(args),
        Command::Bay(args) => bay(args),
        Command::Wave(args) => wave(args),
    }
}

fn options(oracle: &OracleArgs, wavenumber: f64) -> VerifyOptions {
    VerifyOptions {
        levels: oracle.levels,
        tau_factor: oracle.tau_factor,
        wavenumber,
    }
}

fn judge(report: &StencilReport) -> Outcome {
    if report.certified {
        Outcome::Done
    } else {
        let order = report.convergence_order.map_or("none".to_string(), |o| format!("{o:.3}"));
        Outcome::Rejected(format!(
            "not certified: max_residual {:.6e}, tolerance {:.6e}, convergence order {order}",
            report.max_residual, report.tolerance
        ))
    }
}

/// Writes the grid CSV when requested and the report to its path or stdout.
/// Without verification and without `--out`, the CSV goes to stdout.
fn finish(
    csv: impl FnOnce() -> Result<String, CliError>,
    out: Option<&Path>,
    report: Option<(String, Outcome)>,
    report_path: Option<&Path>,
) -> Result<Outcome, CliError> {
    if out.is_some() || report.is_none() {
        emit(out, &csv()?)?;
    }
    match report {
        Some((text, outcome)) => {
            emit(report_path, &text)?;
            Ok(outcome)
        }
        None => Ok(Outcome::Done),
    }
}

fn field_csv<F: Field + ?Sized>(field: &F, grid: &GridSpec, real: bool) -> Result<String, CliError> {
    let values = evaluate_on_grid(field, grid)?;
    let mut csv = Csv::new(if real { &["x", "y", "u"] } else { &["x", "y", "re", "im"] });
    for ((_, _, x, y), v) in grid.nodes().zip(values) {
        if real {
            csv.row(&[x, y, v.re]);
        } else {
            csv.row(&[x, y, v.re, v.im]);
        }
    }
    Ok(csv.into_string())
}

fn eval(args: &EvalArgs, seed: u64) -> Result<Outcome, CliError> {
    let e = parse_expr(&args.expr)?;
    let de = if args.diff { Some(diff_expr(&e)?) } else { None };
    let mut points = args.at.iter().map(|s| parse_constant(s)).collect::<Result<Vec<_>, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    points.extend((0..args.random).map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))));
    if points.is_empty() {
        return Err(CliError::Usage("eval needs --at or --random".into()));
    }

    let header: &[&str] = if de.is_some() {
        &["z_re", "z_im", "re", "im", "d_re", "d_im"]
    } else {
        &["z_re", "z_im", "re", "im"]
    };
    let mut csv = Csv::new(header);
    for z in points {
        let v = eval_expr(&e, z)?;
        let mut row = vec![z.re, z.im, v.re, v.im];
        if let Some(de) = &de {
            let d = eval_expr(de, z)?;
            row.extend([d.re, d.im]);
        }
        csv.row(&row);
    }
    emit(args.out.as_deref(), &csv.into_string())?;
    Ok(Outcome::Done)
}

fn solve(args: &SolveArgs) -> Result<Outcome, CliError> {
    let op = parse_operator(&args.op)?;
    let (f, g) = (parse_expr(&args.f)?, parse_expr(&args.g)?);
    let real = !args.complex;
    let grid = parse_grid(&args.grid)?;
    let sol = if args.unchecked {
        general_solution_unchecked(&op, &f, &g, real)?
    } else {
        general_solution(&op, &f, &g, real)?
    };
    let report = if args.verify || args.report.is_some() {
        let r = verify_on_grid(&op, &sol, &grid, &options(&args.oracle, 0.0))?;
        Some((json(&r), judge(&r)))
    } else {
        None
    };
    finish(|| field_csv(&sol, &grid, real), args.out.as_deref(), report, args.report.as_deref())
}

#[derive(Serialize)]
struct FactorReport {
    operator: String,
    factors: [String; 2],
    /// Each root as `[re, im]`.
    roots: [[f64; 2]; 2],
}

fn factor(args: &FactorArgs) -> Result<Outcome, CliError> {
    let op = parse_operator(&args.op)?;
    let (f1, f2) = factor_principal(&op)?;
    let (r1, r2) = (f1.root(), f2.root());
    let report = FactorReport {
        operator: op.to_string(),
        factors: [f1.to_string(), f2.to_string()],
        // Adding zero turns -0.0 into 0.0 so the JSON does not show signed zeros.
        roots: [[r1.re + 0.0, r1.im + 0.0], [r2.re + 0.0, r2.im + 0.0]],
    };
    emit(args.out.as_deref(), &json(&report))?;
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct ParticularReport {
    grid: GridSpec,
    exact: bool,
    quadrature: QuadratureSpec,
    max_residual: f64,
    mean_residual: f64,
    /// Largest residual relative to `1 + |g|`.
    max_relative_residual: f64,
    tolerance: f64,
    passed: bool,
}

fn particular(args: &ParticularArgs) -> Result<Outcome, CliError> {
    let g = parse_expr(&args.g)?;
    let fhom = parse_expr(&args.fhom)?;
    let path: QuadraturePath = args.path.parse()?;
    let spec = QuadratureSpec {
        base_point: parse_pair(&args.base)?,
        panels: args.panels,
        path,
        allow_exact: !args.numeric,
    };
    let grid = parse_grid(&args.grid)?;
    let u = solve_nonhomogeneous(&g, &fhom, &spec)?;
    let exact = u.particular.is_exact();
    // Exact antiderivatives are held to round-off; quadrature fields carry
    // the error of their difference-quotient derivatives.
    let tolerance = if exact { 1e-12 } else { 1e-6 };

    let rows = map_grid(&grid, |x, y| {
        let v = u.value(x, y)?;
        let r = dminus_residual(&u, &g, x, y)?;
        let gv = eval_expr(&g, Complex64::new(y, -x))?;
        Ok((v, r, r.norm() / (1.0 + gv.norm())))
    })?;

    let mut csv = Csv::new(&["x", "y", "a", "b", "residual_re", "residual_im"]);
    let (mut max, mut sum, mut max_rel) = (0.0f64, 0.0, 0.0f64);
    for ((_, _, x, y), (v, r, rel)) in grid.nodes().zip(&rows) {
        csv.row(&[x, y, v.re, v.im, r.re, r.im]);
        max = if r.norm().is_nan() { f64::NAN } else { max.max(r.norm()) };
        max_rel = if rel.is_nan() { f64::NAN } else { max_rel.max(*rel) };
        sum += r.norm();
    }
    let passed = max_rel <= tolerance;
    let report = ParticularReport {
        grid,
        exact,
        quadrature: spec,
        max_residual: max,
        mean_residual: sum / rows.len() as f64,
        max_relative_residual: max_rel,
        tolerance,
        passed,
    };
    let outcome = if passed {
        Outcome::Done
    } else {
        Outcome::Rejected(format!("residual {max_rel:.6e} relative to 1 + |g| exceeds {tolerance:.1e}"))
    };
    if let Some(out) = &args.out {
        emit(Some(out), &csv.into_string())?;
    }
    emit(args.report.as_deref(), &json(&report))?;
    Ok(outcome)
}

fn verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let op = parse_operator(&args.op)?;
    let grid = parse_grid(&args.grid)?;
    let report = match args.field.trim() {
        named if named == "bay" || named.starts_with("bay:") => {
            let n = match named.strip_prefix("bay:") {
                Some(n) => n
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bay mode `{n}` is not a positive integer")))?,
                None => 1,
            };
            let spec = BaySpec::new(1.0, n);
            spec.validate()?;
            let sol = bay_solution(&spec)?;
            let opts = options(&args.oracle, args.wavenumber.unwrap_or(spec.wavenumber()));
            verify_on_grid(&op, &sol, &grid, &opts)?
        }
        text => {
            let (e, arg) = parse_field(text)?;
            if !args.unchecked {
                e.require_holomorphic()?;
            }
            let opts = options(&args.oracle, args.wavenumber.unwrap_or(0.0));
            let field = ExprField::new(e, arg);
            if args.real {
                verify_on_grid(&op, &RealPart(field), &grid, &opts)?
            } else {
                verify_on_grid(&op, &field, &grid, &opts)?
            }
        }
    };
    emit(args.json.as_deref(), &json(&report))?;
    Ok(judge(&report))
}

fn bay(args: &BayArgs) -> Result<Outcome, CliError> {
    let spec = BaySpec {
        x_max: args.xmax.unwrap_or(3.0 * args.h),
        k: args.k,
        ..BaySpec::new(args.h, args.n)
    };
    spec.validate()?;
    let sol = bay_solution(&spec)?;
    let grid = match &args.grid {
        Some(text) => parse_grid(text)?,
        None => bay_interior_grid(&spec, 33)?,
    };

    let report = if args.verify || args.report.is_some() {
        let mut r = verify_on_grid(&LinOp2::laplacian(), &sol, &grid, &options(&args.oracle, spec.wavenumber()))?;
        let boundary = check_boundary(&sol, &bay_boundary_segments(&spec))?;
        // sin(n*pi) is not exactly zero in floating point; sinh amplifies it.
        let bound = 1e-8 * (1.0 + (spec.wavenumber() * spec.x_max).sinh()) * spec.k.abs().max(1.0);
        r.boundary_max = Some(boundary);
        let outcome = match judge(&r) {
            Outcome::Done if !(boundary <= bound) => {
                Outcome::Rejected(format!("boundary deviation {boundary:.6e} exceeds {bound:.6e}"))
            }
            other => other,
        };
        Some((json(&r), outcome))
    } else {
        None
    };

    let csv = || {
        let rows = map_grid(&grid, |x, y| Ok((sol.value(x, y)?.re, bay_velocity(&spec, x, y)?)))?;
        let mut csv = Csv::new(&["x", "y", "psi", "vx", "vy"]);
        for ((_, _, x, y), (psi, (vx, vy))) in grid.nodes().zip(rows) {
            csv.row(&[x, y, psi, vx, vy]);
        }
        Ok(csv.into_string())
    };
    finish(csv, args.out.as_deref(), report, args.report.as_deref())
}

fn wave(args: &WaveArgs) -> Result<Outcome, CliError> {
    let sol = hyperbolic_general(&parse_expr(&args.f)?, &parse_expr(&args.g)?)?;
    let grid = parse_grid(&args.grid)?;
    let report = if args.verify || args.report.is_some() {
        let r = verify_on_grid(&LinOp2::wave(), &sol, &grid, &options(&args.oracle, 0.0))?;
        Some((json(&r), judge(&r)))
    } else {
        None
    };
    finish(|| field_csv(&sol, &grid, true), args.out.as_deref(), report, args.report.as_deref())
}
