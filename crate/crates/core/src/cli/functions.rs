//! Named test functions for the transform experiments.

use crate::error::{Error, Result};
use crate::sphere::{Parity, SphericalFunction};

pub const SPHERICAL_DEFAULT: [&str; 6] = [
    "one",
    "odd-linear",
    "odd-cubic",
    "odd-sine",
    "even-square",
    "even-quartic",
];
pub const PAIR_DEFAULT: [&str; 3] = ["one", "exp-mixed", "poly-cos"];

pub fn spherical(name: &str, n: usize) -> Result<SphericalFunction<'static>> {
    if n < 3 {
        return Err(Error::Config("transform test functions need n ≥ 3".into()));
    }
    let last = n - 1;
    let f = match name {
        "one" => SphericalFunction::new(n, |_| 1.0).with_parity(Parity::Even),
        "odd-linear" => SphericalFunction::new(n, |v| v[0] - 0.5 * v[1]).with_parity(Parity::Odd),
        "odd-cubic" => SphericalFunction::new(n, move |v| v[0].powi(3) + v[1] * v[last] * v[last])
            .with_parity(Parity::Odd),
        "odd-sine" => {
            SphericalFunction::new(n, |v| (v[0] + 2.0 * v[1]).sin() * (v[2] * v[2]).exp())
                .with_parity(Parity::Odd)
        }
        "even-square" => SphericalFunction::new(n, |v| (0.6 * v[0] + 0.8 * v[1]).powi(2))
            .with_parity(Parity::Even),
        "even-quartic" => {
            SphericalFunction::new(n, move |v| v[0].powi(4) + v[1] * v[1] * v[last] * v[last])
                .with_parity(Parity::Even)
        }
        o => {
            return Err(Error::Config(format!(
                "unknown spherical test function `{o}`"
            )))
        }
    };
    Ok(f)
}

pub type PairFunction = fn(&[f64], &[f64]) -> f64;

pub fn pair(name: &str) -> Result<PairFunction> {
    let f: PairFunction = match name {
        "one" => |_, _| 1.0,
        "exp-mixed" => |u, v| (u[0] - 0.5 * v[1]).exp(),
        "poly-cos" => |u, v| (1.0 + u[0] * v[1] + u[1] * u[1]) * v[0].cos(),
        o => return Err(Error::Config(format!("unknown pair test function `{o}`"))),
    };
    Ok(f)
}
