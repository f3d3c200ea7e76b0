use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::{Error, Result};

/// Uniform rectangular grid `[x0, x1] x [y0, y1]` with `nx * ny` nodes.
///
/// Samples are laid out row-major: index `iy * nx + ix`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub x0: f64,
    pub x1: f64,
    pub nx: usize,
    pub y0: f64,
    pub y1: f64,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x0: f64, x1: f64, nx: usize, y0: f64, y1: f64, ny: usize) -> Result<GridSpec> {
        let g = GridSpec {
            x0,
            x1,
            nx,
            y0,
            y1,
            ny,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn unit_square(n: usize) -> Result<GridSpec> {
        GridSpec::new(0.0, 1.0, n, 0.0, 1.0, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 nodes per axis, got {}x{}",
                self.nx, self.ny
            )));
        }
        let bounds = [self.x0, self.x1, self.y0, self.y1];
        if bounds.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if self.x1 <= self.x0 || self.y1 <= self.y0 {
            return Err(Error::InvalidGrid("bounds must be increasing".into()));
        }
        Ok(())
    }

    pub fn hx(&self) -> f64 {
        (self.x1 - self.x0) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y1 - self.y0) / (self.ny - 1) as f64
    }

    pub fn x(&self, ix: usize) -> f64 {
        if ix + 1 == self.nx {
            self.x1
        } else {
            self.x0 + ix as f64 * self.hx()
        }
    }

    pub fn y(&self, iy: usize) -> f64 {
        if iy + 1 == self.ny {
            self.y1
        } else {
            self.y0 + iy as f64 * self.hy()
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major node coordinates with their indices.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        (0..self.ny).flat_map(move |iy| (0..self.nx).map(move |ix| (ix, iy, self.x(ix), self.y(iy))))
    }

    /// Same bounds with the step halved; every node of `self` stays a node.
    pub fn refined(&self) -> GridSpec {
        GridSpec {
            nx: 2 * self.nx - 1,
            ny: 2 * self.ny - 1,
            ..*self
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// Parses `x0:x1:nx,y0:y1:ny`.
    fn from_str(s: &str) -> Result<GridSpec> {
        let bad = || Error::InvalidGrid(format!("expected `x0:x1:nx,y0:y1:ny`, got `{s}`"));
        let (xs, ys) = s.split_once(',').ok_or_else(bad)?;
        let axis = |part: &str| -> Result<(f64, f64, usize)> {
            let fields: Vec<&str> = part.split(':').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(bad());
            }
            let a = fields[0].parse().map_err(|_| bad())?;
            let b = fields[1].parse().map_err(|_| bad())?;
            let n = fields[2].parse().map_err(|_| bad())?;
            Ok((a, b, n))
        };
        let (x0, x1, nx) = axis(xs)?;
        let (y0, y1, ny) = axis(ys)?;
        GridSpec::new(x0, x1, nx, y0, y1, ny)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{},{}:{}:{}",
            self.x0, self.x1, self.nx, self.y0, self.y1, self.ny
        )
    }
}

/// Evaluates `produce` at every node, row-major, in parallel.
///
/// On failure the error of the first failing node in row-major order is
/// returned, wrapped with its grid index.
pub fn map_grid<T, P>(grid: &GridSpec, produce: P) -> Result<Vec<T>>
where
    T: Send,
    P: Fn(f64, f64) -> Result<T> + Sync,
{
    grid.validate()?;
    let results: Vec<Result<T>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (ix, iy) = (k % grid.nx, k / grid.nx);
            produce(grid.x(ix), grid.y(iy)).map_err(|e| e.at_grid(ix, iy))
        })
        .collect();
    results.into_iter().collect()
}
