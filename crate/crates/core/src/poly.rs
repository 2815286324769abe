//! Sparse real polynomials in three variables, used to tabulate harmonic
//! polynomials and differentiate them exactly.

use alloc::vec::Vec;

use crate::error::{param, Result};
use crate::math::powi;

/// `coef * x^e0 * y^e1 * z^e2`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub exps: [u32; 3],
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    terms: Vec<Monomial>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Poly {
        Poly::monomial(c, [0, 0, 0])
    }

    pub fn monomial(coef: f64, exps: [u32; 3]) -> Poly {
        let mut p = Poly::zero();
        p.push(coef, exps);
        p
    }

    pub fn var(i: usize) -> Poly {
        let mut e = [0; 3];
        e[i] = 1;
        Poly::monomial(1.0, e)
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    fn push(&mut self, coef: f64, exps: [u32; 3]) {
        if coef == 0.0 {
            return;
        }
        if let Some(t) = self.terms.iter_mut().find(|t| t.exps == exps) {
            t.coef += coef;
        } else {
            self.terms.push(Monomial { coef, exps });
        }
        self.terms.retain(|t| t.coef != 0.0);
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for t in &other.terms {
            out.push(t.coef, t.exps);
        }
        out
    }

    pub fn scale(&self, c: f64) -> Poly {
        let mut out = Poly::zero();
        for t in &self.terms {
            out.push(c * t.coef, t.exps);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for a in &self.terms {
            for b in &other.terms {
                let e = [a.exps[0] + b.exps[0], a.exps[1] + b.exps[1], a.exps[2] + b.exps[2]];
                out.push(a.coef * b.coef, e);
            }
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero();
        for t in &self.terms {
            if t.exps[i] > 0 {
                let mut e = t.exps;
                e[i] -= 1;
                out.push(t.coef * t.exps[i] as f64, e);
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef * powi(x[0], t.exps[0]) * powi(x[1], t.exps[1]) * powi(x[2], t.exps[2]))
            .sum()
    }

    /// Largest total degree among the terms (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.exps.iter().sum()).max().unwrap_or(0)
    }
}

/// `Re (x + i y)^k` (`sine = false`) or `Im (x + i y)^k`, i.e. `r^k cos kθ` / `r^k sin kθ`.
pub fn planar_harmonic(k: u32, sine: bool) -> Poly {
    let mut out = Poly::zero();
    // (x + iy)^k = sum_j C(k,j) x^{k-j} (iy)^j, i^j cycles 1, i, -1, -i.
    let mut binom = 1.0;
    for j in 0..=k {
        if j > 0 {
            binom = binom * (k - j + 1) as f64 / j as f64;
        }
        let (re, im) = match j % 4 {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        };
        let c = if sine { im } else { re };
        out.push(c * binom, [k - j, j, 0]);
    }
    out
}

/// Real solid harmonic of degree `l <= 4` and order `-l <= m <= l` in R^3
/// (unnormalised, integer coefficients). `m >= 0` carries the `cos mφ`
/// family, `m < 0` the `sin |m|φ` family.
pub fn solid_harmonic(l: u32, m: i32) -> Result<Poly> {
    if l > 4 {
        return Err(param(alloc::format!("solid harmonics tabulated only up to degree 4, got {l}")));
    }
    if m.unsigned_abs() > l {
        return Err(param(alloc::format!("order m = {m} out of range for degree {l}")));
    }
    let x = Poly::var(0);
    let y = Poly::var(1);
    let z = Poly::var(2);
    let c = Poly::constant;
    let r2 = x.mul(&x).add(&y.mul(&y)).add(&z.mul(&z));
    let z2 = z.mul(&z);
    // cos mφ / sin mφ parts of (x + iy)^m
    let cm = planar_harmonic(m.unsigned_abs(), false);
    let sm = planar_harmonic(m.unsigned_abs(), true);
    let azimuthal = if m >= 0 { cm } else { sm };
    // Associated-Legendre factor in (z, r^2), degree l - |m|.
    let factor = match (l, m.unsigned_abs()) {
        (0, 0) | (1, 1) | (2, 2) | (3, 3) | (4, 4) => c(1.0),
        (1, 0) | (2, 1) | (3, 2) | (4, 3) => z.clone(),
        (2, 0) => z2.scale(3.0).sub(&r2),
        (3, 1) => z2.scale(5.0).sub(&r2),
        (4, 2) => z2.scale(7.0).sub(&r2),
        (3, 0) => z.mul(&z2.scale(5.0).sub(&r2.scale(3.0))),
        (4, 1) => z.mul(&z2.scale(7.0).sub(&r2.scale(3.0))),
        (4, 0) => z2.mul(&z2).scale(35.0).sub(&z2.mul(&r2).scale(30.0)).add(&r2.mul(&r2).scale(3.0)),
        _ => unreachable!(),
    };
    Ok(factor.mul(&azimuthal))
}
