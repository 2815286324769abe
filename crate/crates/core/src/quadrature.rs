//! Surface rules on spheres and shell-decomposed volume rules on balls.
//!
//! In the plane the sphere rule is the uniform trapezoid rule on the circle,
//! which is spectrally accurate for smooth periodic integrands. In space it
//! is the product of Gauss–Legendre in `cos φ` and the trapezoid rule in the
//! azimuth with twice as many nodes. Balls are integrated shell by shell with
//! Gauss–Legendre in the radius.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{param, Result};
use crate::math;
use crate::point::{Dim, Point};

pub const MIN_ORDER: usize = 4;
pub const DEFAULT_ORDER_2D: usize = 128;
pub const DEFAULT_ORDER_3D: usize = 32;
pub const DEFAULT_RADIAL_NODES: usize = 32;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; m];
    let mut weights = alloc::vec![0.0; m];
    for i in 0..(m + 1) / 2 {
        let mut x = math::cos(PI * (i as f64 + 0.75) / (m as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_m(x) and P_m'(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 0 { 1.0 } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * pm - pm1) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if math::abs(dx) < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

/// Nodes on the unit sphere with positive weights summing to its area.
#[derive(Clone, Debug)]
pub struct SphereRule {
    dim: Dim,
    order: usize,
    nodes: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl SphereRule {
    /// `order` is the number of angular nodes in 2D and the number of polar
    /// Gauss–Legendre nodes in 3D (with `2 * order` azimuthal nodes). Angular
    /// nodes sit at half-step offsets so that coordinate axes fall between them.
    pub fn new(dim: Dim, order: usize) -> Result<SphereRule> {
        if order < MIN_ORDER {
            return Err(param(alloc::format!("quadrature order must be >= {MIN_ORDER}, got {order}")));
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        match dim {
            Dim::Two => {
                let w = 2.0 * PI / order as f64;
                for j in 0..order {
                    let t = w * (j as f64 + 0.5);
                    nodes.push([math::cos(t), math::sin(t), 0.0]);
                    weights.push(w);
                }
            }
            Dim::Three => {
                let (ct, wt) = gauss_legendre(order);
                let naz = 2 * order;
                let waz = 2.0 * PI / naz as f64;
                for (c, w) in ct.iter().zip(&wt) {
                    let s = math::sqrt(1.0 - c * c);
                    for j in 0..naz {
                        let phi = waz * (j as f64 + 0.5);
                        nodes.push([s * math::cos(phi), s * math::sin(phi), *c]);
                        weights.push(w * waz);
                    }
                }
            }
        }
        Ok(SphereRule { dim, order, nodes, weights })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Radial Gauss–Legendre shells carrying a sphere rule.
#[derive(Clone, Debug)]
pub struct BallRule {
    /// Nodes and weights on `[0, 1]`.
    radial: Vec<(f64, f64)>,
    sphere: SphereRule,
}

impl BallRule {
    pub fn new(sphere: SphereRule, radial_nodes: usize) -> Result<BallRule> {
        if radial_nodes < 2 {
            return Err(param("ball rule needs at least 2 radial nodes"));
        }
        let (x, w) = gauss_legendre(radial_nodes);
        let radial = x.iter().zip(&w).map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
        Ok(BallRule { radial, sphere })
    }

    pub fn sphere(&self) -> &SphereRule {
        &self.sphere
    }

    pub fn radial_nodes(&self) -> usize {
        self.radial.len()
    }
}

/// Sphere and ball rules for one dimension, built from configured orders.
#[derive(Clone, Debug)]
pub struct Rules {
    pub sphere: SphereRule,
    pub ball: BallRule,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureOrders {
    pub order2d: usize,
    pub order3d: usize,
    pub radial_nodes: usize,
}

impl Default for QuadratureOrders {
    fn default() -> Self {
        QuadratureOrders {
            order2d: DEFAULT_ORDER_2D,
            order3d: DEFAULT_ORDER_3D,
            radial_nodes: DEFAULT_RADIAL_NODES,
        }
    }
}

impl Rules {
    pub fn new(dim: Dim, orders: QuadratureOrders) -> Result<Rules> {
        let order = match dim {
            Dim::Two => orders.order2d,
            Dim::Three => orders.order3d,
        };
        let sphere = SphereRule::new(dim, order)?;
        let ball = BallRule::new(sphere.clone(), orders.radial_nodes)?;
        Ok(Rules { sphere, ball })
    }

    pub fn for_dim(dim: Dim) -> Rules {
        Rules::new(dim, QuadratureOrders::default()).expect("default orders are valid")
    }
}

/// Integrates `K` quantities at once over `∂B_r(center)`. The integrand
/// receives the point and the outward unit normal.
pub fn sphere_integrals<const K: usize, F>(mut f: F, center: &Point, r: f64, rule: &SphereRule) -> Result<[f64; K]>
where
    F: FnMut(&Point, &[f64; 3]) -> Result<[f64; K]>,
{
    if !(r > 0.0) {
        return Err(param(alloc::format!("radius must be positive, got {r}")));
    }
    if center.dim() != rule.dim {
        return Err(param("center and rule dimensions differ"));
    }
    let mut acc = [0.0; K];
    for (nu, w) in rule.nodes.iter().zip(&rule.weights) {
        let vals = f(&center.offset(r, nu), nu)?;
        for k in 0..K {
            acc[k] += w * vals[k];
        }
    }
    let jac = math::powi(r, rule.dim.n() as u32 - 1);
    Ok(acc.map(|a| a * jac))
}

/// Integrates `K` quantities over the annulus `r_in < |x - center| < r_out`
/// (`r_in = 0` gives the ball). The integrand receives the point and the
/// unit direction from the center.
pub fn shell_integrals<const K: usize, F>(
    mut f: F,
    center: &Point,
    r_in: f64,
    r_out: f64,
    rule: &BallRule,
) -> Result<[f64; K]>
where
    F: FnMut(&Point, &[f64; 3]) -> Result<[f64; K]>,
{
    if !(r_in >= 0.0 && r_out > r_in) {
        return Err(param(alloc::format!("need 0 <= r_in < r_out, got [{r_in}, {r_out}]")));
    }
    let width = r_out - r_in;
    let mut acc = [0.0; K];
    for &(t, w) in &rule.radial {
        let s = r_in + width * t;
        let shell = sphere_integrals(&mut f, center, s, &rule.sphere)?;
        for k in 0..K {
            acc[k] += width * w * shell[k];
        }
    }
    Ok(acc)
}

/// `∫_{∂B_r(center)} f dS`.
pub fn boundary_integral<F>(mut f: F, center: &Point, r: f64, rule: &SphereRule) -> Result<f64>
where
    F: FnMut(&Point) -> Result<f64>,
{
    Ok(sphere_integrals(|x, _| Ok([f(x)?]), center, r, rule)?[0])
}

/// `∫_{B_r(center)} f dx`.
pub fn volume_integral<F>(mut f: F, center: &Point, r: f64, rule: &BallRule) -> Result<f64>
where
    F: FnMut(&Point) -> Result<f64>,
{
    Ok(shell_integrals(|x, _| Ok([f(x)?]), center, 0.0, r, rule)?[0])
}

/// `∫ f dx` over the annulus `r_in < |x - center| < r_out`.
pub fn annulus_integral<F>(mut f: F, center: &Point, r_in: f64, r_out: f64, rule: &BallRule) -> Result<f64>
where
    F: FnMut(&Point) -> Result<f64>,
{
    Ok(shell_integrals(|x, _| Ok([f(x)?]), center, r_in, r_out, rule)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for m in [2, 5, 16, 32] {
            let (x, w) = gauss_legendre(m);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            // exact up to degree 2m - 1
            let deg = 2 * m as i32 - 2;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            assert!((q - 2.0 / (deg + 1) as f64).abs() < 1e-14, "m={m}");
        }
    }

    #[test]
    fn circle_rule_is_uniform() {
        let r = SphereRule::new(Dim::Two, 64).unwrap();
        assert_eq!(r.len(), 64);
        assert!(r.weights().iter().all(|w| *w == 2.0 * PI / 64.0));
    }

    #[test]
    fn sphere_rule_partition_of_unity() {
        let r = SphereRule::new(Dim::Three, 16).unwrap();
        assert!((r.weights().iter().sum::<f64>() - 4.0 * PI).abs() < 1e-12);
        assert!(r.weights().iter().all(|w| *w > 0.0));
    }

    #[test]
    fn order_below_minimum_rejected() {
        assert!(SphereRule::new(Dim::Two, 3).is_err());
    }

    #[test]
    fn circumference_and_area() {
        let rules = Rules::for_dim(Dim::Two);
        let c = Point::origin(Dim::Two);
        let len = boundary_integral(|_| Ok(1.0), &c, 1.0, &rules.sphere).unwrap();
        assert!((len - 2.0 * PI).abs() < 1e-13);
        let area = volume_integral(|_| Ok(1.0), &c, 1.0, &rules.ball).unwrap();
        assert!((area - PI).abs() < 1e-13);
        let rules = Rules::for_dim(Dim::Three);
        let vol = volume_integral(|_| Ok(1.0), &Point::origin(Dim::Three), 1.0, &rules.ball).unwrap();
        assert!((vol - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn second_moments() {
        let rules = Rules::for_dim(Dim::Two);
        let x1sq = |x: &Point| Ok(x.coords()[0] * x.coords()[0]);
        let v = boundary_integral(x1sq, &Point::origin(Dim::Two), 0.5, &rules.sphere).unwrap();
        assert!((v - PI * 0.125).abs() < 1e-14);
        let rules = Rules::for_dim(Dim::Three);
        let v = boundary_integral(x1sq, &Point::origin(Dim::Three), 1.0, &rules.sphere).unwrap();
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-13);
    }
}
