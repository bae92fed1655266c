//! Exact box integrals of `|x|^a` and `|x|^a log|x|`, singular at the origin.

use crate::quad::GaussRule;

use super::MAX_DIM;

#[derive(Debug, Clone, Copy)]
enum Kernel {
    Power(f64),
    PowerLog(f64),
}

impl Kernel {
    fn exponent(self) -> f64 {
        match self {
            Kernel::Power(a) | Kernel::PowerLog(a) => a,
        }
    }

    fn eval(self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match self {
            Kernel::Power(a) => r2.powf(0.5 * a),
            Kernel::PowerLog(a) => r2.powf(0.5 * a) * 0.5 * r2.ln(),
        }
    }
}

pub(crate) fn tensor_gauss<F: Fn(&[f64]) -> f64 + ?Sized>(
    rule: &GaussRule,
    lo: &[f64],
    hi: &[f64],
    dim: usize,
    f: &F,
) -> f64 {
    let pts: Vec<Vec<(f64, f64)>> = (0..dim).map(|i| rule.mapped(lo[i], hi[i]).collect()).collect();
    let m = rule.order();
    let mut x = [0.0; MAX_DIM];
    let mut total = 0.0;
    for lin in 0..m.pow(dim as u32) {
        let mut rest = lin;
        let mut w = 1.0;
        for i in (0..dim).rev() {
            let (xi, wi) = pts[i][rest % m];
            rest /= m;
            x[i] = xi;
            w *= wi;
        }
        total += w * f(&x[..dim]);
    }
    total
}

thread_local! {
    static RULES: [GaussRule; 3] = [GaussRule::new(4), GaussRule::new(8), GaussRule::new(16)];
}

fn smooth_box(k: Kernel, lo: &[f64], hi: &[f64], dim: usize) -> f64 {
    let dist = lo[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
    let side = (0..dim).map(|i| hi[i] - lo[i]).fold(0.0, f64::max);
    if side <= 0.0 {
        return 0.0;
    }
    if side > dist {
        let mut total = 0.0;
        for c in 0..1usize << dim {
            let mut a = [0.0; MAX_DIM];
            let mut b = [0.0; MAX_DIM];
            for i in 0..dim {
                let mid = 0.5 * (lo[i] + hi[i]);
                if (c >> i) & 1 == 0 {
                    a[i] = lo[i];
                    b[i] = mid;
                } else {
                    a[i] = mid;
                    b[i] = hi[i];
                }
            }
            total += smooth_box(k, &a[..dim], &b[..dim], dim);
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
    RULES.with(|rules| tensor_gauss(&rules[which], lo, hi, dim, &|x: &[f64]| k.eval(x)))
}

/// `∫_{[0,1]^n} |x|^a (log|x|)^j dx` for `j ∈ {0, 1}`; requires `a + n > 0`.
pub fn corner_moment(a: f64, dim: usize, log: bool) -> f64 {
    assert!(
        a + dim as f64 > 0.0,
        "|x|^{a} is not integrable at the origin in dimension {dim}"
    );
    let shell = |k: Kernel| {
        let mut s = 0.0;
        for c in 1..1usize << dim {
            let mut lo = [0.0; MAX_DIM];
            let mut hi = [0.0; MAX_DIM];
            for i in 0..dim {
                lo[i] = 0.5 * ((c >> i) & 1) as f64;
                hi[i] = lo[i] + 0.5;
            }
            s += smooth_box(k, &lo[..dim], &hi[..dim], dim);
        }
        s
    };
    let ratio = 0.5f64.powf(a + dim as f64);
    let j0 = shell(Kernel::Power(a)) / (1.0 - ratio);
    if !log {
        return j0;
    }
    (shell(Kernel::PowerLog(a)) - ratio * std::f64::consts::LN_2 * j0) / (1.0 - ratio)
}

fn corner_box(k: Kernel, hi: &[f64], dim: usize) -> f64 {
    let m = hi[..dim].iter().cloned().fold(f64::INFINITY, f64::min);
    if m <= 0.0 {
        return 0.0;
    }
    let a = k.exponent();
    let scale = m.powf(a + dim as f64);
    let mut total = match k {
        Kernel::Power(_) => scale * corner_moment(a, dim, false),
        Kernel::PowerLog(_) => scale * (corner_moment(a, dim, true) + m.ln() * corner_moment(a, dim, false)),
    };
    // The rest of the box, split into slabs bounded away from the origin.
    for i in 0..dim {
        if hi[i] <= m {
            continue;
        }
        let mut lo_s = [0.0; MAX_DIM];
        let mut hi_s = [0.0; MAX_DIM];
        for j in 0..dim {
            if j < i {
                hi_s[j] = m;
            } else if j == i {
                lo_s[j] = m;
                hi_s[j] = hi[j];
            } else {
                hi_s[j] = hi[j];
            }
        }
        total += smooth_box(k, &lo_s[..dim], &hi_s[..dim], dim);
    }
    total
}

fn box_integral(k: Kernel, lo: &[f64], hi: &[f64]) -> f64 {
    let dim = lo.len();
    // Reflect each axis into [0, ∞), splitting intervals that straddle 0.
    let pieces: Vec<Vec<(f64, f64)>> = (0..dim)
        .map(|i| {
            let (l, u) = (lo[i], hi[i]);
            if l < 0.0 && u > 0.0 {
                vec![(0.0, -l), (0.0, u)]
            } else if u <= 0.0 {
                vec![(-u, -l)]
            } else {
                vec![(l, u)]
            }
        })
        .collect();
    let counts: Vec<usize> = pieces.iter().map(Vec::len).collect();
    let total_boxes: usize = counts.iter().product();
    let mut total = 0.0;
    for mut lin in 0..total_boxes {
        let mut a = [0.0; MAX_DIM];
        let mut b = [0.0; MAX_DIM];
        for i in (0..dim).rev() {
            let (l, u) = pieces[i][lin % counts[i]];
            lin /= counts[i];
            a[i] = l;
            b[i] = u;
        }
        if (0..dim).any(|i| b[i] <= a[i]) {
            continue;
        }
        total += if a[..dim].iter().all(|v| *v == 0.0) {
            corner_box(k, &b[..dim], dim)
        } else {
            smooth_box(k, &a[..dim], &b[..dim], dim)
        };
    }
    total
}

/// `∫_B |x|^a dx` over the box `B = [lo, hi]`.
pub fn power_box_integral(a: f64, lo: &[f64], hi: &[f64]) -> f64 {
    box_integral(Kernel::Power(a), lo, hi)
}

/// `∫_B |x|^a log|x| dx` over the box `B = [lo, hi]`.
pub fn powerlog_box_integral(a: f64, lo: &[f64], hi: &[f64]) -> f64 {
    box_integral(Kernel::PowerLog(a), lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, Tolerance};

    #[test]
    fn one_dimensional_closed_forms() {
        // ∫_0^1 x^a = 1/(a+1), ∫_0^1 x^a ln x = -1/(a+1)^2
        for a in [-0.9, -0.5, 0.0, 0.7, 2.5] {
            let j0 = corner_moment(a, 1, false);
            let j1 = corner_moment(a, 1, true);
            assert!((j0 - 1.0 / (a + 1.0)).abs() < 1e-12, "a = {a}: {j0}");
            assert!((j1 + 1.0 / ((a + 1.0) * (a + 1.0))).abs() < 1e-11, "a = {a}: {j1}");
        }
        let v = power_box_integral(-0.5, &[-1.0], &[4.0]);
        assert!((v - 6.0).abs() < 1e-12);
    }

    #[test]
    fn square_corner_moment_against_polar_oracle() {
        // ∫_{[0,1]^2} |x|^a = 2 ∫_0^{π/4} sec(θ)^{a+2}/(a+2) dθ
        for a in [-1.8, -1.0, 0.5] {
            let oracle = 2.0
                * integrate(
                    |t: f64| t.cos().powf(-(a + 2.0)) / (a + 2.0),
                    0.0,
                    std::f64::consts::FRAC_PI_4,
                    Tolerance::default(),
                )
                .unwrap()
                .value;
            let got = corner_moment(a, 2, false);
            assert!((got - oracle).abs() < 1e-11 * oracle, "a = {a}: {got} vs {oracle}");
        }
    }

    #[test]
    fn cube_area_and_log_identity() {
        // a = 0 gives the box volume; scaling identity for the log moment.
        let v = power_box_integral(0.0, &[-0.3, 0.2, -1.0], &[0.5, 0.9, 0.25]);
        assert!((v - 0.8 * 0.7 * 1.25).abs() < 1e-12);
        let a = -1.5;
        let m = 0.25;
        let direct = powerlog_box_integral(a, &[0.0, 0.0, 0.0], &[m, m, m]);
        let scaled = m.powf(a + 3.0) * (corner_moment(a, 3, true) + m.ln() * corner_moment(a, 3, false));
        assert!((direct - scaled).abs() < 1e-12 * scaled.abs());
    }

    #[test]
    fn far_boxes_match_adaptive_oracle() {
        let got = power_box_integral(-1.3, &[0.5], &[3.0]);
        let want = integrate(|x: f64| x.powf(-1.3), 0.5, 3.0, Tolerance::default())
            .unwrap()
            .value;
        assert!((got - want).abs() < 1e-12);
    }
}
