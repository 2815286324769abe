use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{param, Error, Result};
use crate::fields::{Bundle, Hessian};
use crate::math;

/// Nodal values on a uniform planar grid. Row `j` holds `y = y0 + j h`,
/// column `i` holds `x = x0 + i h`; storage is row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSolution {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
    h: f64,
    x0: f64,
    y0: f64,
    residual: f64,
    iterations: usize,
}

impl GridSolution {
    pub fn from_values(rows: usize, cols: usize, h: f64, x0: f64, y0: f64, values: Vec<f64>) -> Result<GridSolution> {
        if rows < 5 || cols < 5 {
            return Err(param(alloc::format!("grid needs at least 5x5 nodes, got {rows}x{cols}")));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(param(alloc::format!("grid spacing must be positive, got {h}")));
        }
        if values.len() != rows * cols {
            return Err(param(alloc::format!("expected {} values, got {}", rows * cols, values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(param("grid values must be finite"));
        }
        Ok(GridSolution { values, rows, cols, h, x0, y0, residual: 0.0, iterations: 0 })
    }

    pub(crate) fn with_stats(mut self, residual: f64, iterations: usize) -> GridSolution {
        self.residual = residual;
        self.iterations = iterations;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn origin(&self) -> (f64, f64) {
        (self.x0, self.y0)
    }
    /// Relative residual reached by the solver (0 for imported grids).
    pub fn residual(&self) -> f64 {
        self.residual
    }
    pub fn iterations(&self) -> usize {
        self.iterations
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.cols + i]
    }

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x0 + i as f64 * self.h, self.y0 + j as f64 * self.h)
    }

    /// Row `j` as a slice.
    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.cols..(j + 1) * self.cols]
    }
}

/// Bilinear interpolation of nodal values and finite-difference derivatives.
#[derive(Clone, Debug)]
pub struct GridInterpolant {
    sol: Arc<GridSolution>,
    gx: Vec<f64>,
    gy: Vec<f64>,
    lap: Vec<f64>,
    hxx: Vec<f64>,
    hyy: Vec<f64>,
    hxy: Vec<f64>,
}

fn first_diff(f: impl Fn(usize) -> f64, k: usize, len: usize, h: f64) -> f64 {
    if k == 0 {
        (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h)
    } else if k == len - 1 {
        (3.0 * f(k) - 4.0 * f(k - 1) + f(k - 2)) / (2.0 * h)
    } else {
        (f(k + 1) - f(k - 1)) / (2.0 * h)
    }
}

impl GridInterpolant {
    pub fn new(sol: Arc<GridSolution>) -> GridInterpolant {
        let (r, c, h) = (sol.rows, sol.cols, sol.h);
        let n = r * c;
        let (mut gx, mut gy) = (alloc::vec![0.0; n], alloc::vec![0.0; n]);
        let (mut lap, mut hxx, mut hyy, mut hxy) =
            (alloc::vec![0.0; n], alloc::vec![0.0; n], alloc::vec![0.0; n], alloc::vec![0.0; n]);
        let h2 = h * h;
        for j in 0..r {
            for i in 0..c {
                let k = j * c + i;
                gx[k] = first_diff(|m| sol.at(m, j), i, c, h);
                gy[k] = first_diff(|m| sol.at(i, m), j, r, h);
                if i > 0 && i + 1 < c && j > 0 && j + 1 < r {
                    let u = sol.at(i, j);
                    let xx = (sol.at(i + 1, j) - 2.0 * u + sol.at(i - 1, j)) / h2;
                    let yy = (sol.at(i, j + 1) - 2.0 * u + sol.at(i, j - 1)) / h2;
                    hxx[k] = xx;
                    hyy[k] = yy;
                    lap[k] = (sol.at(i + 1, j) + sol.at(i - 1, j) + sol.at(i, j + 1) + sol.at(i, j - 1) - 4.0 * u) / h2;
                    hxy[k] = (sol.at(i + 1, j + 1) - sol.at(i + 1, j - 1) - sol.at(i - 1, j + 1) + sol.at(i - 1, j - 1))
                        / (4.0 * h2);
                }
            }
        }
        GridInterpolant { sol, gx, gy, lap, hxx, hyy, hxy }
    }

    pub fn solution(&self) -> &GridSolution {
        &self.sol
    }

    /// The grid interior inset by one cell: `(lower-left, upper-right)`.
    pub fn admissible_box(&self) -> ([f64; 2], [f64; 2]) {
        let s = &self.sol;
        (
            [s.x0 + s.h, s.y0 + s.h],
            [s.x0 + (s.cols - 2) as f64 * s.h, s.y0 + (s.rows - 2) as f64 * s.h],
        )
    }

    /// Cell index and local coordinates, or a domain error.
    fn locate(&self, x: f64, y: f64) -> Result<(usize, usize, f64, f64)> {
        let s = &self.sol;
        let (lo, hi) = self.admissible_box();
        let slack = 1e-12 * s.h;
        if !(x >= lo[0] - slack && x <= hi[0] + slack && y >= lo[1] - slack && y <= hi[1] + slack) {
            return Err(Error::Domain { point: [x, y, 0.0], reason: "outside the grid interior inset by one cell" });
        }
        let fx = (x - s.x0) / s.h;
        let fy = (y - s.y0) / s.h;
        let i = (math::floor(fx) as isize).clamp(1, s.cols as isize - 3) as usize;
        let j = (math::floor(fy) as isize).clamp(1, s.rows as isize - 3) as usize;
        Ok((i, j, fx - i as f64, fy - j as f64))
    }

    fn bilinear(&self, data: &[f64], i: usize, j: usize, s: f64, t: f64) -> f64 {
        let c = self.sol.cols;
        let k = j * c + i;
        (1.0 - s) * (1.0 - t) * data[k] + s * (1.0 - t) * data[k + 1] + (1.0 - s) * t * data[k + c] + s * t * data[k + c + 1]
    }

    pub fn bundle(&self, x: f64, y: f64) -> Result<Bundle> {
        let (i, j, s, t) = self.locate(x, y)?;
        Ok(Bundle {
            value: self.bilinear(&self.sol.values, i, j, s, t),
            grad: [self.bilinear(&self.gx, i, j, s, t), self.bilinear(&self.gy, i, j, s, t), 0.0],
            laplacian: self.bilinear(&self.lap, i, j, s, t),
        })
    }

    pub fn hessian(&self, x: f64, y: f64) -> Result<Hessian> {
        let (i, j, s, t) = self.locate(x, y)?;
        let xx = self.bilinear(&self.hxx, i, j, s, t);
        let yy = self.bilinear(&self.hyy, i, j, s, t);
        let xy = self.bilinear(&self.hxy, i, j, s, t);
        Ok([[xx, xy, 0.0], [xy, yy, 0.0], [0.0; 3]])
    }
}
