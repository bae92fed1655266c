use std::f64::consts::{E, LN_2, PI};

use serde_json::{json, Map, Value};

use super::radial::{sphere_measure, RadialProfile, Radius};
use super::slope::{slope_fit, Transform};
use super::{NamedSlope, SweepResult};
use crate::error::{Error, Result};
use crate::expr::conjugate;
use crate::grid::{Domain, FunctionId};
use crate::quad::{integrate, Tolerance};
use crate::weights::{apq_constant_from_moments, CubeFamily};

pub const DEFAULT_DELTAS: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

/// Relative tolerance of the radial quadratures unless overridden.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

fn params(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn check_deltas(deltas: &[f64]) -> Result<()> {
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && **d <= 1.0)) {
        return Err(Error::InvalidParameter(format!("δ must lie in (0, 1], got {d}")));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "relative tolerance must lie in (0, 1), got {tol}"
        )));
    }
    Ok(())
}

fn fit_against_inverse_delta(name: &str, deltas: &[f64], ys: &[f64]) -> Result<Option<NamedSlope>> {
    if deltas.len() < 3 {
        return Ok(None);
    }
    let pts: Vec<(f64, f64)> = deltas.iter().zip(ys).map(|(d, y)| (1.0 / d, *y)).collect();
    Ok(Some(NamedSlope {
        name: name.into(),
        fit: slope_fit(&pts, Transform::LogLog)?,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevOptions {
    /// Grid resolution for `[w_δ]_{A_{p,q}}` on centered cubes; `None` skips the constant.
    pub resolution: Option<u32>,
    /// Constant multiple of `w_δ`.
    pub weight_scale: f64,
    pub rel_tol: f64,
}

impl Default for SobolevOptions {
    fn default() -> Self {
        SobolevOptions {
            resolution: None,
            weight_scale: 1.0,
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

/// Weighted Sobolev example: `w_δ = |x|^{(δ-n)/q}`, `f_δ = exp(-|x|^δ)`.
pub fn sweep_sobolev(n: usize, p: f64, deltas: &[f64], opts: SobolevOptions) -> Result<SweepResult> {
    if !(p >= 1.0 && p < n as f64) {
        return Err(Error::InvalidParameter(format!("need 1 ≤ p < n, got p = {p}, n = {n}")));
    }
    check_deltas(deltas)?;
    check_tol(opts.rel_tol)?;
    let q = 1.0 / (1.0 / p - 1.0 / n as f64);
    let nf = n as f64;
    let c = opts.weight_scale;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "weight scale must be positive, got {c}"
        )));
    }
    let mut rows = Vec::new();
    let mut columns = vec!["delta", "norm_q", "grad_norm", "norm_ratio"];
    let with_apq = opts.resolution.is_some() && p > 1.0;
    if with_apq {
        columns.push("apq_constant");
    }
    for &d in deltas {
        // ‖w_δ f_δ‖_q^q = |S| ∫ e^{-q r^δ} r^{δ-1} dr
        let lhs = RadialProfile::new(n)
            .power(d - nf)
            .decay(d, q)
            .scaled(c.powf(q))
            .integrate(opts.rel_tol)?
            .powf(1.0 / q);
        // ‖∇f_δ‖_{L^p(w_δ^p)}^p = δ^p |S| ∫ e^{-p r^δ} r^{p(δ-1) + p(δ-n)/q} r^{n-1} dr
        let grad = RadialProfile::new(n)
            .power(p * (d - 1.0) + p * (d - nf) / q)
            .decay(d, p)
            .scaled((c * d).powf(p))
            .integrate(opts.rel_tol)?
            .powf(1.0 / p);
        let mut row = vec![d, lhs, grad, lhs / grad];
        if let (true, Some(level)) = (with_apq, opts.resolution) {
            let dom = Domain::symmetric(n, -1.0, 1.0)?;
            let wq = FunctionId::Power { a: d - nf }.sample(&dom, level)?.scale(c.powf(q));
            let wneg = FunctionId::Power {
                a: (nf - d) * conjugate(p) / q,
            }
            .sample(&dom, level)?
            .scale(c.powf(-conjugate(p)));
            row.push(apq_constant_from_moments(&wq, &wneg, p, q, &CubeFamily::centered(&wq))?.constant);
        }
        rows.push(row);
    }
    let ratio: Vec<f64> = rows.iter().map(|r| r[3]).collect();
    let mut slopes: Vec<NamedSlope> = fit_against_inverse_delta("log norm_ratio vs log 1/delta", deltas, &ratio)?
        .into_iter()
        .collect();
    if with_apq && deltas.len() >= 3 {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r[4], r[3])).collect();
        slopes.push(NamedSlope {
            name: "log norm_ratio vs log apq_constant".into(),
            fit: slope_fit(&pts, Transform::LogLog)?,
        });
    }
    Ok(SweepResult {
        kind: "sobolev".into(),
        columns: columns.into_iter().map(String::from).collect(),
        rows,
        slopes,
        parameters: params(&[
            ("dim", json!(n)),
            ("p", json!(p)),
            ("q", json!(q)),
            ("resolution", json!(opts.resolution)),
            ("weight_scale", json!(c)),
        ]),
    })
}

/// Average of `|e - τθ|^{α-n}` over unit vectors `θ`, for `0 ≤ τ < 1`.
pub fn angular_kernel_average(n: usize, alpha: f64, tau: f64) -> Result<f64> {
    let beta = alpha - n as f64;
    match n {
        1 => Ok(0.5 * ((1.0 - tau).abs().powf(beta) + (1.0 + tau).powf(beta))),
        2 => {
            let f = |theta: f64| (1.0 + tau * tau - 2.0 * tau * theta.cos()).powf(0.5 * beta);
            let mut m = 16;
            let mut prev = (0..m).map(|i| f(2.0 * PI * i as f64 / m as f64)).sum::<f64>() / m as f64;
            loop {
                m *= 2;
                let cur = (0..m).map(|i| f(2.0 * PI * i as f64 / m as f64)).sum::<f64>() / m as f64;
                if (cur - prev).abs() <= 1e-13 * cur.abs() || m >= 1 << 16 {
                    return Ok(cur);
                }
                prev = cur;
            }
        }
        3 => {
            if tau == 0.0 {
                return Ok(1.0);
            }
            let g = beta + 2.0;
            if g == 0.0 {
                Ok(tau.atanh() / tau)
            } else {
                let (up, down) = (g * tau.ln_1p(), g * (-tau).ln_1p());
                Ok((up.exp_m1() - down.exp_m1()) / (2.0 * tau * g))
            }
        }
        _ => Err(Error::UnsupportedDimension {
            dim: n,
            what: "the angular kernel average",
        }),
    }
}

// D(u) = ∫_0^∞ (u + t) k̄(e^{-t-u}) e^{-δt} dt
fn radial_kernel(n: usize, alpha: f64, delta: f64, u: f64, tol: f64) -> Result<f64> {
    let f =
        |t: f64| (u + t) * angular_kernel_average(n, alpha, (-t - u).exp()).unwrap_or(f64::NAN) * (-delta * t).exp();
    let r = integrate(f, 0.0, f64::INFINITY, Tolerance::relative(tol))?;
    Ok(r.value)
}

/// `[b, I_α] f_δ(x)` at `|x| = r ≥ 1` for `b = log|x|`, `f_δ = |x|^{δ-n} χ_{B(0,1)}`.
pub fn frac_commutator_pointwise(n: usize, alpha: f64, delta: f64, r: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "the radial formula needs |x| > 1, got {r}"
        )));
    }
    Ok(sphere_measure(n) * r.powf(alpha - n as f64) * radial_kernel(n, alpha, delta, r.ln(), DEFAULT_REL_TOL)?)
}

/// `R(δ) = ‖[b, I_α] f_δ‖_{L^q(w_δ^q, |x| > 2)} / ‖f_δ‖_{L^p(w_δ^p)}` with `w_δ = |x|^{(n-δ)/p'}`.
pub fn sweep_frac_commutator(n: usize, alpha: f64, p: f64, deltas: &[f64], tol: f64) -> Result<SweepResult> {
    check_tol(tol)?;
    let nf = n as f64;
    if !(alpha > 0.0 && alpha < nf && p > 1.0 && p < nf / alpha) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < α < n and 1 < p < n/α, got α = {alpha}, p = {p}"
        )));
    }
    check_deltas(deltas)?;
    let q = 1.0 / (1.0 / p - alpha / nf);
    let pp = conjugate(p);
    if pp / q < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "p'/q = {} < 1; this case follows by duality and is not swept",
            pp / q
        )));
    }
    let s = sphere_measure(n);
    let rows: Vec<Vec<f64>> = deltas
        .iter()
        .map(|&d| {
            // ‖f_δ‖_p^p = |S| ∫_0^1 r^{(δ-n)p + (n-δ)p/p'} r^{n-1} dr
            let fnorm = RadialProfile::new(n)
                .power((d - nf) * p + (nf - d) * p / pp)
                .support(Radius::ZERO, Radius::new(1.0))
                .integrate(tol)?
                .powf(1.0 / p);
            let g = |u: f64| -> f64 {
                radial_kernel(n, alpha, d, u, tol).unwrap_or(f64::NAN).powf(q) * (-d * q * u / pp).exp()
            };
            let tail = integrate(g, LN_2, f64::INFINITY, Tolerance::relative(10.0 * tol))?;
            let cnorm = s.powf((q + 1.0) / q) * tail.value.powf(1.0 / q);
            // [w_δ]_{A_{p,q}} over balls at the origin
            let a = q * (nf - d) / pp;
            let apq = (nf / (nf + a)) * (nf / d).powf(q / pp);
            Ok(vec![d, fnorm, cnorm, cnorm / fnorm, apq])
        })
        .collect::<Result<_>>()?;
    let col = |j: usize| rows.iter().map(|r| r[j]).collect::<Vec<f64>>();
    let mut slopes = Vec::new();
    slopes.extend(fit_against_inverse_delta("log ratio vs log 1/delta", deltas, &col(3))?);
    slopes.extend(fit_against_inverse_delta("log f_norm vs log 1/delta", deltas, &col(1))?);
    Ok(SweepResult {
        kind: "frac-commutator".into(),
        columns: ["delta", "f_norm", "commutator_norm", "ratio", "apq_balls"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
        slopes,
        parameters: params(&[
            ("dim", json!(n)),
            ("alpha", json!(alpha)),
            ("p", json!(p)),
            ("q", json!(q)),
            ("target_slope", json!(2.0 - alpha / nf)),
        ]),
    })
}

/// `R_j = 10^{10·2^j}`, `j = 0..=squarings`.
pub fn default_two_weight_radii(squarings: usize) -> Vec<Radius> {
    (0..=squarings)
        .map(|j| Radius::from_log10(10.0 * 2f64.powi(j as i32)))
        .collect()
}

/// The two-weight example at `δ = 0`: the right side `∫ f^k v` over `R_0 ≤ |x| ≤ R` converges
/// while the `u`-mass of `{e^{e^e} < |x| < R}` grows like `log log log R`.
pub fn two_weight_failure(n: usize, alpha: f64, k: u32, radii: &[Radius], tol: f64) -> Result<SweepResult> {
    check_tol(tol)?;
    let nf = n as f64;
    let kf = k as f64;
    if !(alpha > 0.0 && k > 1 && kf < nf / alpha) {
        return Err(Error::InvalidParameter(format!(
            "need an integer 1 < k < n/α, got k = {k}, n/α = {}",
            nf / alpha
        )));
    }
    let start = Radius::from_loglog(E);
    if radii.is_empty() || radii[0] < start {
        return Err(Error::InvalidParameter("radii must start beyond e^{e^e}".into()));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("radii must increase".into()));
    }
    let region = |lo: Radius, hi: Radius| (lo, hi);
    let f = RadialProfile::new(n).power(-alpha).logs(-2.0, -1.0, 0.0);
    let v = RadialProfile::new(n)
        .power(-(nf - kf * alpha))
        .logs(2.0 * kf - 1.0, 0.0, 1.0);
    let rhs_profile = f.powered(kf).product(&v)?;
    let u = RadialProfile::new(n).power(-nf).logs(-1.0, -1.0, 0.0);
    let last = *radii.last().unwrap();
    let mut rows = Vec::new();
    let mut rhs = 0.0;
    let mut lhs = u.clone().support(start, radii[0]).integrate(tol)?;
    for (j, &r) in radii.iter().enumerate() {
        let inc = if j == 0 {
            0.0
        } else {
            let (a, b) = region(radii[j - 1], r);
            lhs += u.clone().support(a, b).integrate(tol)?;
            rhs_profile.clone().support(a, b).integrate(tol)?
        };
        rhs += inc;
        // I_α(bf)(x) ≥ 2^{α-n} ∫_{|x|<|y|<R} dy / (|y|^n log|y| log log|y|)
        let chain = if r < last {
            2f64.powf(alpha - nf) * u.clone().support(r, last).integrate(tol)?
        } else {
            0.0
        };
        rows.push(vec![r.log10(), r.loglog(), rhs, inc, lhs, chain]);
    }
    let mut slopes = Vec::new();
    if rows.len() >= 3 {
        let pts: Vec<(f64, f64)> = rows.iter().map(|row| (row[1].ln(), row[4])).collect();
        slopes.push(NamedSlope {
            name: "lhs vs log log log R".into(),
            fit: slope_fit(&pts, Transform::Linear)?,
        });
    }
    Ok(SweepResult {
        kind: "two-weight".into(),
        columns: ["log10_R", "loglog_R", "rhs", "rhs_increment", "lhs", "chain_bound"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
        slopes,
        parameters: params(&[
            ("dim", json!(n)),
            ("alpha", json!(alpha)),
            ("k", json!(k)),
            ("sphere", json!(sphere_measure(n))),
        ]),
    })
}
