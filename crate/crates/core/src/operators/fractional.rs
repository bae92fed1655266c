use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use super::haar::LevelWindow;
use crate::error::{Error, Result};
use crate::grid::{unravel, Pyramid, SampledFunction, MAX_DIM};
use crate::quad::GaussRule;

/// The Riesz potential `I_α f(x) = ∫ f(y) |x-y|^{α-n} dy` on cell averages.
#[derive(Debug)]
pub struct FractionalIntegral {
    alpha: f64,
    cache: Mutex<HashMap<(usize, usize), Arc<Vec<f64>>>>,
}

impl Clone for FractionalIntegral {
    fn clone(&self) -> Self {
        FractionalIntegral {
            alpha: self.alpha,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl PartialEq for FractionalIntegral {
    fn eq(&self, other: &Self) -> bool {
        self.alpha == other.alpha
    }
}

impl FractionalIntegral {
    pub fn new(alpha: f64) -> Self {
        FractionalIntegral {
            alpha,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn table(&self, dim: usize, per_axis: usize) -> Arc<Vec<f64>> {
        let mut cache = self.cache.lock().expect("kernel cache poisoned");
        cache
            .entry((dim, per_axis))
            .or_insert_with(|| {
                let count = per_axis.pow(dim as u32);
                let v: Vec<f64> = (0..count)
                    .into_par_iter()
                    .map(|lin| {
                        let ix = unravel(lin, per_axis, dim);
                        let d: Vec<i64> = ix[..dim].iter().map(|&v| v as i64).collect();
                        unit_kernel(self.alpha, &d)
                    })
                    .collect();
                Arc::new(v)
            })
            .clone()
    }

    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        let dim = f.dim();
        if !(self.alpha > 0.0 && self.alpha < dim as f64) {
            return Err(Error::InvalidParameter(format!(
                "α must lie in (0, {dim}), got {}",
                self.alpha
            )));
        }
        let n = f.cells_per_axis();
        let table = self.table(dim, n);
        let scale = f.cell_side().powf(self.alpha);
        let vals = f.values();
        let support: Vec<(usize, [usize; MAX_DIM])> = (0..f.len())
            .filter(|&j| vals[j] != 0.0)
            .map(|j| (j, f.unravel(j)))
            .collect();
        let out: Vec<f64> = (0..f.len())
            .into_par_iter()
            .map(|i| {
                let xi = f.unravel(i);
                let mut s = 0.0;
                for (j, yj) in &support {
                    let lin = (0..dim).fold(0, |acc, a| acc * n + xi[a].abs_diff(yj[a]));
                    s += vals[*j] * table[lin];
                }
                scale * s
            })
            .collect();
        SampledFunction::from_values(f.domain().clone(), f.resolution(), out)
    }
}

/// `∫_{[0,1]^n}∫_{[0,1]^n} |d + u - v|^{α-n} du dv` for an integer offset `d`.
pub fn unit_kernel(alpha: f64, d: &[i64]) -> f64 {
    let dim = d.len();
    if dim == 1 {
        return kernel_1d(alpha, d[0]);
    }
    let beta = alpha - dim as f64;
    // Λ(z) = Π(1 - |z_i|) on [-1,1]^n, split into the 2^n unit boxes where it is multilinear.
    let mut total = 0.0;
    for piece in 0..1usize << dim {
        let mut lo = [0.0; MAX_DIM];
        let mut hi = [0.0; MAX_DIM];
        // On axis i the tent factor is 1 + z_i (z_i ∈ [-1,0]) or 1 - z_i (z_i ∈ [0,1]);
        // in y = d + z it is a_i + b_i y_i.
        let mut a = [0.0; MAX_DIM];
        let mut b = [0.0; MAX_DIM];
        for i in 0..dim {
            let di = d[i] as f64;
            if (piece >> i) & 1 == 0 {
                lo[i] = di - 1.0;
                hi[i] = di;
                a[i] = 1.0 - di;
                b[i] = 1.0;
            } else {
                lo[i] = di;
                hi[i] = di + 1.0;
                a[i] = 1.0 + di;
                b[i] = -1.0;
            }
        }
        total += weighted_box(beta, &lo[..dim], &hi[..dim], &a[..dim], &b[..dim]);
    }
    total
}

fn kernel_1d(alpha: f64, d: i64) -> f64 {
    let x = d.unsigned_abs() as f64;
    if x >= 64.0 {
        // Moments of the triangular density: E[w^2] = 1/6, E[w^4] = 1/15.
        let b = alpha - 1.0;
        let r = 1.0 / (x * x);
        let c2 = b * (b - 1.0) / 2.0 / 6.0;
        let c4 = b * (b - 1.0) * (b - 2.0) * (b - 3.0) / 24.0 / 15.0;
        return x.powf(b) * (1.0 + r * (c2 + r * c4));
    }
    let p = |u: f64| u.abs().powf(alpha + 1.0) / (alpha * (alpha + 1.0));
    p(x + 1.0) - 2.0 * p(x) + p(x - 1.0)
}

thread_local! {
    static RULES: [GaussRule; 3] = [GaussRule::new(4), GaussRule::new(8), GaussRule::new(16)];
}

// ∫_box |y|^β Π_i (a_i + b_i y_i) dy over a unit box with integer corners.
fn weighted_box(beta: f64, lo: &[f64], hi: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let dim = lo.len();
    let at_corner = (0..dim).all(|i| lo[i] == 0.0 || hi[i] == 0.0);
    if !at_corner {
        return smooth_weighted(beta, lo, hi, a, b);
    }
    // Reflect to [0,1]^n: y_i = σ_i t_i.
    let mut total = 0.0;
    for subset in 0..1usize << dim {
        let mut coef = 1.0;
        let mut degree = 0;
        for i in 0..dim {
            let sigma = if hi[i] == 0.0 { -1.0 } else { 1.0 };
            if (subset >> i) & 1 == 1 {
                coef *= b[i] * sigma;
                degree += 1;
            } else {
                coef *= a[i];
            }
        }
        if coef != 0.0 {
            total += coef * corner_monomial(beta, dim, subset, degree);
        }
    }
    total
}

// ∫_{[0,1]^n} |t|^β Π_{i ∈ subset} t_i dt by self-similarity.
fn corner_monomial(beta: f64, dim: usize, subset: usize, degree: usize) -> f64 {
    let mono = |x: &[f64]| -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let mut m = r2.powf(0.5 * beta);
        for (i, xi) in x.iter().enumerate() {
            if (subset >> i) & 1 == 1 {
                m *= xi;
            }
        }
        m
    };
    let mut shell = 0.0;
    for c in 1..1usize << dim {
        let mut lo = [0.0; MAX_DIM];
        let mut hi = [0.0; MAX_DIM];
        for i in 0..dim {
            lo[i] = 0.5 * ((c >> i) & 1) as f64;
            hi[i] = lo[i] + 0.5;
        }
        shell += smooth_fn(&lo[..dim], &hi[..dim], &mono);
    }
    shell / (1.0 - 0.5f64.powf(beta + dim as f64 + degree as f64))
}

fn smooth_weighted(beta: f64, lo: &[f64], hi: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let f = |y: &[f64]| -> f64 {
        let r2: f64 = y.iter().map(|v| v * v).sum();
        let mut w = r2.powf(0.5 * beta);
        for i in 0..y.len() {
            w *= a[i] + b[i] * y[i];
        }
        w
    };
    smooth_fn(lo, hi, &f)
}

// Tensor Gauss on a box away from the origin, refined by distance.
fn smooth_fn(lo: &[f64], hi: &[f64], f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let dim = lo.len();
    let dist = (0..dim)
        .map(|i| {
            let c = if lo[i] > 0.0 {
                lo[i]
            } else if hi[i] < 0.0 {
                -hi[i]
            } else {
                0.0
            };
            c * c
        })
        .sum::<f64>()
        .sqrt();
    let side = (0..dim).map(|i| hi[i] - lo[i]).fold(0.0, f64::max);
    if side > dist {
        let mut total = 0.0;
        for c in 0..1usize << dim {
            let mut l = [0.0; MAX_DIM];
            let mut h = [0.0; MAX_DIM];
            for i in 0..dim {
                let mid = 0.5 * (lo[i] + hi[i]);
                if (c >> i) & 1 == 0 {
                    l[i] = lo[i];
                    h[i] = mid;
                } else {
                    l[i] = mid;
                    h[i] = hi[i];
                }
            }
            total += smooth_fn(&l[..dim], &h[..dim], f);
        }
        return total;
    }
    let ratio = dist / side;
    let which = if ratio >= 16.0 {
        0
    } else if ratio >= 4.0 {
        1
    } else {
        2
    };
    RULES.with(|rules| crate::grid::tensor_gauss(&rules[which], lo, hi, dim, f))
}

/// `I_α^d f = Σ_{Q in window} |Q|^{α/n} (⨍_Q f) χ_Q` over the domain's dyadic tree.
pub fn frac_integral_dyadic(f: &SampledFunction, alpha: f64, window: Option<LevelWindow>) -> Result<SampledFunction> {
    let dim = f.dim();
    if !(alpha >= 0.0 && alpha < dim as f64) {
        return Err(Error::InvalidParameter(format!(
            "α must lie in [0, {dim}), got {alpha}"
        )));
    }
    let depth = f.resolution() as usize;
    let pyr = Pyramid::new(f);
    let side = f.domain().side();
    let depths = LevelWindow::depths(window, depth);
    let out: Vec<f64> = (0..f.len())
        .into_par_iter()
        .map(|cell| {
            let ix = f.unravel(cell);
            let mut s = 0.0;
            for d in depths.clone() {
                let shift = depth - d;
                let per = 1usize << d;
                let lin = (0..dim).fold(0, |acc, i| acc * per + (ix[i] >> shift));
                let q_side = side / per as f64;
                s += q_side.powf(alpha) * pyr.level(d)[lin];
            }
            s
        })
        .collect();
    SampledFunction::from_values(f.domain().clone(), f.resolution(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Domain, FunctionId};
    use crate::quad::{integrate, Tolerance};

    #[test]
    fn one_dimensional_kernel_against_triangle_quadrature() {
        let alpha = 0.5;
        for d in [0i64, 1, 2, 7, 63, 64, 200] {
            let x = d as f64;
            let f = |w: f64| (1.0 - w.abs()) * (x + w).abs().powf(alpha - 1.0);
            let tol = Tolerance::relative(1e-12);
            let pts = [-1.0, (-x).clamp(-1.0, 1.0), 1.0];
            let want =
                integrate(f, pts[0], pts[1], tol).unwrap().value + integrate(f, pts[1], pts[2], tol).unwrap().value;
            assert!((kernel_1d(alpha, d) - want).abs() < 1e-9 * want, "d = {d}");
        }
    }

    #[test]
    fn two_dimensional_kernel_against_polar_oracle() {
        // d = 0: ∫_{[-1,1]^2} (1-|z1|)(1-|z2|) |z|^{α-2} dz = 4 ∫_{[0,1]^2} (1-x)(1-y)|z|^{α-2}
        let alpha = 1.0;
        let inner = |x: f64| {
            integrate(
                |y: f64| (1.0 - x) * (1.0 - y) * (x * x + y * y).powf(0.5 * (alpha - 2.0)),
                0.0,
                1.0,
                Tolerance::relative(1e-12),
            )
            .unwrap()
            .value
        };
        let want = 4.0 * integrate(inner, 0.0, 1.0, Tolerance::relative(1e-11)).unwrap().value;
        let got = unit_kernel(alpha, &[0, 0]);
        assert!((got - want).abs() < 1e-8 * want, "{got} vs {want}");
        // Far offsets approach the point value.
        let far = unit_kernel(alpha, &[40, 30]);
        assert!((far / 50f64.powf(alpha - 2.0) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn kernel_is_symmetric() {
        let a = unit_kernel(0.7, &[1, 2]);
        assert!((a - unit_kernel(0.7, &[2, 1])).abs() < 1e-13);
        assert!((a - unit_kernel(0.7, &[-1, 2])).abs() < 1e-13);
    }

    #[test]
    fn indicator_potential_at_two() {
        let dom = Domain::new(vec![0.0], 4.0).unwrap();
        let f = FunctionId::CharFn { a: 0.0, b: 1.0 }.sample(&dom, 10).unwrap();
        let out = FractionalIntegral::new(0.5).apply(&f).unwrap();
        let h = f.cell_side();
        // cell average over [2, 2+h] of ∫_0^1 (x-y)^{-1/2} dy = 2(√x - √(x-1))
        let prim = |x: f64| (4.0 / 3.0) * (x.powf(1.5) - (x - 1.0).powf(1.5));
        let want = (prim(2.0 + h) - prim(2.0)) / h;
        assert!((out.value_at(&[2.0 + 0.5 * h]).unwrap() - want).abs() < 1e-10);
        assert!((want - 2.0 * (2f64.sqrt() - 1.0)).abs() < 1e-3);
    }

    #[test]
    fn dyadic_geometric_series() {
        let dom = Domain::new(vec![0.0], 1.0).unwrap();
        let f = SampledFunction::constant(dom, 10, 1.0).unwrap();
        let out = frac_integral_dyadic(&f, 0.5, Some(LevelWindow::new(-10, 0))).unwrap();
        let want: f64 = 1.0 + (1..=10).map(|j| 2f64.powf(-0.5 * j as f64)).sum::<f64>();
        let x = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.value_at(&[x]).unwrap() - want).abs() < 1e-12);
        assert!((want - 3.3389).abs() < 2e-4);
    }
}
