use crate::error::{param, Result};
use crate::math;

/// Spatial dimension; only the plane and space are supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn n(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    pub fn from_n(n: usize) -> Result<Dim> {
        match n {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            _ => Err(param(alloc::format!("dimension must be 2 or 3, got {n}"))),
        }
    }

    /// Surface measure of the unit sphere S^{n-1}.
    pub fn sphere_area(self) -> f64 {
        math::unit_sphere_area(self.n())
    }

    /// Volume of the unit ball.
    pub fn ball_volume(self) -> f64 {
        self.sphere_area() / self.n() as f64
    }
}

/// A point of R^2 or R^3. Unused trailing coordinates are kept at zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    coords: [f64; 3],
    dim: Dim,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Point> {
        let dim = Dim::from_n(coords.len())?;
        let mut c = [0.0; 3];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Point { coords: c, dim })
    }

    pub fn xy(x: f64, y: f64) -> Point {
        Point { coords: [x, y, 0.0], dim: Dim::Two }
    }

    pub fn xyz(x: f64, y: f64, z: f64) -> Point {
        Point { coords: [x, y, z], dim: Dim::Three }
    }

    pub fn origin(dim: Dim) -> Point {
        Point { coords: [0.0; 3], dim }
    }

    /// Builds a point from a padded array, zeroing components beyond `dim`.
    pub fn from_array(dim: Dim, mut coords: [f64; 3]) -> Point {
        if dim == Dim::Two {
            coords[2] = 0.0;
        }
        Point { coords, dim }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim.n()]
    }

    pub fn array(&self) -> [f64; 3] {
        self.coords
    }

    pub fn norm(&self) -> f64 {
        let [x, y, z] = self.coords;
        math::sqrt(x * x + y * y + z * z)
    }

    /// `self + t * dir`, with `dir` given as a padded vector.
    pub fn offset(&self, t: f64, dir: &[f64; 3]) -> Point {
        let c = self.coords;
        Point::from_array(self.dim, [c[0] + t * dir[0], c[1] + t * dir[1], c[2] + t * dir[2]])
    }

    pub fn scaled(&self, tau: f64) -> Point {
        let c = self.coords;
        Point { coords: [tau * c[0], tau * c[1], tau * c[2]], dim: self.dim }
    }

    pub fn sub(&self, other: &Point) -> [f64; 3] {
        let (a, b) = (self.coords, other.coords);
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }
}

#[inline]
pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
