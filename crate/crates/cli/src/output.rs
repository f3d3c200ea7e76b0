//! Argument parsing helpers and deterministic file output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use harmonic_core::expr::{eval_expr, parse_expr, AffineMap};
use harmonic_core::{Expr, GridSpec};
use num_complex::Complex64;
use serde::Serialize;

use crate::CliError;

/// Parses `x0:x1:nx,y0:y1:ny`.
pub fn parse_grid(text: &str) -> Result<GridSpec, CliError> {
    let bad = || CliError::Usage(format!("grid `{text}` is not of the form x0:x1:nx,y0:y1:ny"));
    let (xs, ys) = text.split_once(',').ok_or_else(bad)?;
    let axis = |s: &str| -> Result<(f64, f64, usize), CliError> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [a, b, n] = parts[..] else { return Err(bad()) };
        Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?))
    };
    let (x0, x1, nx) = axis(xs)?;
    let (y0, y1, ny) = axis(ys)?;
    Ok(GridSpec::new(x0, x1, nx, y0, y1, ny)?)
}

/// Parses `x,y`.
pub fn parse_pair(text: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("`{text}` is not a point x,y"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// Evaluates an expression that must not mention `z`.
pub fn parse_constant(text: &str) -> Result<Complex64, CliError> {
    let e = parse_expr(text)?;
    if e.depends_on_var() {
        return Err(CliError::Usage(format!("`{text}` must be a constant")));
    }
    Ok(eval_expr(&e, Complex64::new(0.0, 0.0))?)
}

/// Splits `EXPR @ SUBST` into the expression and its substitution.
pub fn parse_field(text: &str) -> Result<(Expr, AffineMap), CliError> {
    let (expr, subst) = text
        .rsplit_once('@')
        .ok_or_else(|| CliError::Usage(format!("field `{text}` needs a substitution: EXPR @ SUBST")))?;
    let compact: String = subst.chars().filter(|c| !c.is_whitespace()).collect();
    let arg = match compact.as_str() {
        "y+j*x" => AffineMap::y_plus_jx(),
        "y-j*x" => AffineMap::y_minus_jx(),
        "y+x" => AffineMap::y_plus_x(),
        "y-x" => AffineMap::y_minus_x(),
        _ => {
            return Err(CliError::Usage(format!(
                "unknown substitution `{}` (expected y+j*x, y-j*x, y+x or y-x)",
                subst.trim()
            )))
        }
    };
    Ok((parse_expr(expr)?, arg))
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV text with a header and `\n` line endings.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Csv {
        let mut text = header.join(",");
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, values: &[f64]) {
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            let _ = write!(self.text, "{}", num(*v));
        }
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes through a temporary file in the target directory, then renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Sends `contents` to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    source: e,
                })
        }
    }
}
