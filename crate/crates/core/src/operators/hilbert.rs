use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::SampledFunction;

fn g(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * u.abs().ln() - u
    }
}

/// `∫_0^1∫_0^1 du dv / (d + u - v)`, with the diagonal taken as a principal value.
pub fn cell_kernel(d: i64) -> f64 {
    let x = d as f64;
    if d.abs() >= 32 {
        let r = 1.0 / (x * x);
        return (1.0 + r * (1.0 / 6.0 + r * (1.0 / 15.0 + r / 28.0))) / x;
    }
    g(x + 1.0) - 2.0 * g(x) + g(x - 1.0)
}

/// Cell averages of `Hf = (1/π) p.v.∫ f(y)/(x-y) dy` for piecewise-constant `f`.
pub fn hilbert(f: &SampledFunction) -> Result<SampledFunction> {
    if f.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            dim: f.dim(),
            what: "the Hilbert transform",
        });
    }
    let n = f.len() as i64;
    let table: Vec<f64> = (-(n - 1)..n).map(|d| cell_kernel(d) / PI).collect();
    let vals = f.values();
    let out: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for (j, v) in vals.iter().enumerate() {
                if *v != 0.0 {
                    s += v * table[(i - j as i64 + n - 1) as usize];
                }
            }
            s
        })
        .collect();
    SampledFunction::from_values(f.domain().clone(), f.resolution(), out)
}
