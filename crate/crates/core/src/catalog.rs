//! String names for catalog fields, as used in experiment configs.
//!
//! ```text
//! harmonic:2d:k=3:cos      r^3 cos 3θ
//! harmonic:2d:k=1:sin      r sin θ
//! harmonic:3d:k=2:m=-1     solid harmonic, degree 2, order -1
//! affine:a=1,0:c=0.5       x1 + 0.5
//! constant:c=5[:n=3]       constant field (2D unless n is given)
//! drift-exp:b=2,0          exp(b·x)
//! p-radial:p=3[:n=2][:rmin=0.1]
//! ramp:a=1,0[:q=1]         max(a·x, 0)^q
//! ```

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fields::{FieldSpec, HarmonicBasis, DEFAULT_P_RADIAL_R_MIN};
use crate::point::Dim;

fn bad(name: &str, why: &str) -> Error {
    Error::InvalidSpec(format!("`{name}`: {why}"))
}

fn parse_f64(name: &str, s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| bad(name, "expected a number"))
}

fn parse_vec(name: &str, s: &str) -> Result<(Dim, [f64; 3])> {
    let parts = s.split(',').map(|c| parse_f64(name, c)).collect::<Result<Vec<_>>>()?;
    let dim = Dim::from_n(parts.len()).map_err(|_| bad(name, "vector must have 2 or 3 components"))?;
    let mut v = [0.0; 3];
    v[..parts.len()].copy_from_slice(&parts);
    Ok((dim, v))
}

struct Args<'a> {
    name: &'a str,
    items: Vec<(&'a str, &'a str)>,
}

impl<'a> Args<'a> {
    fn new(name: &'a str, rest: &[&'a str]) -> Result<Args<'a>> {
        let items = rest
            .iter()
            .map(|s| s.split_once('=').ok_or_else(|| bad(name, "expected key=value")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Args { name, items })
    }

    fn get(&self, key: &str) -> Option<&'a str> {
        self.items.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn require(&self, key: &str) -> Result<&'a str> {
        self.get(key).ok_or_else(|| bad(self.name, &format!("missing `{key}=`")))
    }

    fn only(&self, allowed: &[&str]) -> Result<()> {
        match self.items.iter().find(|(k, _)| !allowed.contains(k)) {
            Some((k, _)) => Err(bad(self.name, &format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }

    fn dim(&self) -> Result<Dim> {
        match self.get("n") {
            Some(n) => n
                .parse::<usize>()
                .ok()
                .and_then(|n| Dim::from_n(n).ok())
                .ok_or_else(|| bad(self.name, "n must be 2 or 3")),
            None => Ok(Dim::Two),
        }
    }
}

/// Parses a catalog name into a specification and its dimension.
pub fn parse_field(name: &str) -> Result<(FieldSpec, Dim)> {
    let name = name.trim();
    let parts: Vec<&str> = name.split(':').collect();
    match parts[0] {
        "harmonic" => {
            let dim = match parts.get(1) {
                Some(&"2d") => Dim::Two,
                Some(&"3d") => Dim::Three,
                _ => return Err(bad(name, "expected harmonic:2d:… or harmonic:3d:…")),
            };
            let tail = &parts[2..];
            let (basis_word, kv): (Option<&str>, Vec<&str>) = match dim {
                Dim::Two => match tail.split_last() {
                    Some((last, init)) if !last.contains('=') => (Some(*last), init.to_vec()),
                    _ => return Err(bad(name, "planar harmonics end in :cos or :sin")),
                },
                Dim::Three => (None, tail.to_vec()),
            };
            let args = Args::new(name, &kv)?;
            let k = args.require("k")?;
            let degree = k.parse::<i64>().map_err(|_| bad(name, "degree must be an integer"))?;
            if degree < 0 {
                return Err(bad(name, "degree must be non-negative"));
            }
            let degree = u32::try_from(degree).map_err(|_| bad(name, "degree too large"))?;
            let basis = match (dim, basis_word) {
                (Dim::Two, Some("cos")) => HarmonicBasis::Cos,
                (Dim::Two, Some("sin")) => HarmonicBasis::Sin,
                (Dim::Two, _) => return Err(bad(name, "planar basis must be cos or sin")),
                (Dim::Three, _) => {
                    args.only(&["k", "m"])?;
                    let m = args.get("m").unwrap_or("0");
                    HarmonicBasis::Solid(m.parse::<i32>().map_err(|_| bad(name, "m must be an integer"))?)
                }
            };
            if dim == Dim::Two {
                args.only(&["k"])?;
            }
            Ok((FieldSpec::HarmonicPolynomial { degree, basis }, dim))
        }
        "affine" => {
            let args = Args::new(name, &parts[1..])?;
            args.only(&["a", "c"])?;
            let (dim, coeffs) = parse_vec(name, args.require("a")?)?;
            let constant = args.get("c").map(|c| parse_f64(name, c)).transpose()?.unwrap_or(0.0);
            Ok((FieldSpec::Affine { coeffs, constant }, dim))
        }
        "constant" => {
            let args = Args::new(name, &parts[1..])?;
            args.only(&["c", "n"])?;
            Ok((FieldSpec::constant(parse_f64(name, args.require("c")?)?), args.dim()?))
        }
        "drift-exp" => {
            let args = Args::new(name, &parts[1..])?;
            args.only(&["b"])?;
            let (dim, b) = parse_vec(name, args.require("b")?)?;
            Ok((FieldSpec::DriftExponential { b }, dim))
        }
        "p-radial" => {
            let args = Args::new(name, &parts[1..])?;
            args.only(&["p", "n", "rmin"])?;
            let p = parse_f64(name, args.require("p")?)?;
            let r_min = args.get("rmin").map(|r| parse_f64(name, r)).transpose()?;
            Ok((FieldSpec::PRadial { p, r_min: r_min.unwrap_or(DEFAULT_P_RADIAL_R_MIN) }, args.dim()?))
        }
        "ramp" => {
            let args = Args::new(name, &parts[1..])?;
            args.only(&["a", "q"])?;
            let (dim, coeffs) = parse_vec(name, args.require("a")?)?;
            let power = args.get("q").map(|q| parse_f64(name, q)).transpose()?.unwrap_or(1.0);
            Ok((FieldSpec::Ramp { coeffs, power }, dim))
        }
        other => Err(Error::InvalidSpec(format!("unknown field family `{other}`"))),
    }
}

/// The families known to [`parse_field`], with one example each.
pub fn catalog_examples() -> Vec<alloc::string::String> {
    [
        "harmonic:2d:k=3:cos",
        "harmonic:2d:k=2:sin",
        "harmonic:3d:k=2:m=1",
        "affine:a=1,0:c=0",
        "constant:c=5",
        "constant:c=2:n=3",
        "p-radial:p=4:n=3",
        "drift-exp:b=1,0,-1",
        "drift-exp:b=1,0",
        "p-radial:p=3",
        "ramp:a=1,0:q=1",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_field;
    use alloc::string::ToString;

    #[test]
    fn parses_every_example_and_round_trips_display() {
        for name in catalog_examples() {
            let (spec, dim) = parse_field(&name).unwrap();
            let field = make_field(spec, dim).unwrap();
            let (again, dim2) = parse_field(&field.to_string()).unwrap();
            assert_eq!(dim, dim2);
            assert_eq!(make_field(again, dim2).unwrap().to_string(), field.to_string());
        }
    }

    #[test]
    fn rejects_malformed_names() {
        for bad in [
            "harmonic:2d:k=-1:cos",
            "harmonic:2d:k=2",
            "harmonic:4d:k=1",
            "drift-exp:b=1",
            "drift-exp:c=1,0",
            "wavelet:k=2",
            "affine:a=x,0",
        ] {
            assert!(parse_field(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn drift_example() {
        let (spec, dim) = parse_field("drift-exp:b=2,0").unwrap();
        assert_eq!(dim, Dim::Two);
        assert!(matches!(spec, FieldSpec::DriftExponential { b } if b == [2.0, 0.0, 0.0]));
    }
}
