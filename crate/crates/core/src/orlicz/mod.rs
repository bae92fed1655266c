//! Young functions, associates, Luxemburg norms and Orlicz maximal operators.

use std::f64::consts::E;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{self, Bindings};
use crate::grid::{CellCube, DyadicCube, PrefixSums, Pyramid, SampledFunction, MAX_DIM};

/// Relative bracket width at which the Luxemburg bisection stops.
pub const LUXEMBURG_REL_WIDTH: f64 = 1e-10;

/// A Young function `Φ` from one of the parametric families.
#[derive(Debug, Clone, PartialEq)]
pub enum YoungFunction {
    /// `t^r`, `r ≥ 1`.
    Power(f64),
    /// `t^r log(e+t)^s`.
    LogBump { r: f64, s: f64 },
    /// `t^r / log(e+t)^s`.
    Quotient { r: f64, s: f64 },
    /// `e^t - 1`.
    ExpL,
    /// The associate `sup_s (st - Φ(s))`.
    Associate(Box<YoungFunction>),
    /// `Φ(t) = inner(t^exponent)`.
    Substituted { inner: Box<YoungFunction>, exponent: f64 },
}

/// Outcome of the `B_p` tail test `∫^∞ Φ(t) t^{-p} dt/t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BpDiagnosis {
    Converges,
    Diverges,
    /// Same power and `log^{-1}` decay: diverges like `log log`.
    Marginal,
}

/// Growth `t^r log(t)^s` at infinity; `r = ∞` stands for exponential growth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Asymptotics {
    pub r: f64,
    pub s: f64,
}

fn log_e(t: f64) -> f64 {
    (E + t).ln()
}

fn log_root<F: Fn(f64) -> f64>(lo: f64, hi: f64, g: F) -> f64 {
    // Root of the increasing `g` on [lo, hi]: Illinois steps in log s, bisection as fallback.
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let (mut ga, mut gb) = (g(lo), g(hi));
    let mut side = 0i8;
    for _ in 0..200 {
        if b - a < 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            break;
        }
        let mut x = if ga.is_finite() && gb.is_finite() && gb > ga {
            (a * gb - b * ga) / (gb - ga)
        } else {
            0.5 * (a + b)
        };
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let gx = g(x.exp());
        if gx == 0.0 {
            return x.exp();
        }
        if gx > 0.0 {
            b = x;
            gb = gx;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        } else {
            a = x;
            ga = gx;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        }
    }
    (0.5 * (a + b)).exp()
}

impl YoungFunction {
    pub fn llogl() -> Self {
        YoungFunction::LogBump { r: 1.0, s: 1.0 }
    }

    /// Parses `power:r`, `logbump:r:s`, `quotient:r:s`, `llogl`, `expl`, `assoc:<id>`.
    pub fn parse(id: &str, vars: &Bindings) -> Result<Self> {
        let id = id.trim();
        if let Some(rest) = id.strip_prefix("assoc:") {
            return Ok(Self::parse(rest, vars)?.associate());
        }
        let parts: Vec<&str> = id.split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(|| Error::Parse(format!("`{id}` is missing a parameter")))
                .and_then(|s| expr::eval(s, vars))
        };
        let phi = match (parts[0], parts.len()) {
            ("power", 2) => YoungFunction::Power(num(1)?),
            ("logbump", 3) => YoungFunction::LogBump { r: num(1)?, s: num(2)? },
            ("quotient", 3) => YoungFunction::Quotient { r: num(1)?, s: num(2)? },
            ("llogl", 1) => YoungFunction::llogl(),
            ("expl", 1) => YoungFunction::ExpL,
            _ => return Err(Error::Parse(format!("unknown Young function `{id}`"))),
        };
        phi.validate()?;
        Ok(phi)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            YoungFunction::Power(r) | YoungFunction::LogBump { r, .. } | YoungFunction::Quotient { r, .. }
                if !(*r >= 1.0 && r.is_finite()) =>
            {
                Err(Error::InvalidParameter(format!(
                    "Young exponent must be at least 1, got {r}"
                )))
            }
            YoungFunction::LogBump { s, .. } | YoungFunction::Quotient { s, .. } if !s.is_finite() => {
                Err(Error::InvalidParameter("log exponent must be finite".into()))
            }
            YoungFunction::Substituted { inner, exponent } => {
                if !(*exponent > 0.0) {
                    return Err(Error::InvalidParameter("substitution exponent must be positive".into()));
                }
                inner.validate()
            }
            YoungFunction::Associate(inner) => inner.validate(),
            _ => Ok(()),
        }
    }

    pub fn associate(&self) -> YoungFunction {
        match self {
            YoungFunction::Associate(inner) => (**inner).clone(),
            other => YoungFunction::Associate(Box::new(other.clone())),
        }
    }

    /// `Φ(t^exponent)`.
    pub fn substituted(&self, exponent: f64) -> YoungFunction {
        YoungFunction::Substituted {
            inner: Box::new(self.clone()),
            exponent,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            YoungFunction::Power(r) => t.powf(*r),
            YoungFunction::LogBump { r, s } => t.powf(*r) * log_e(t).powf(*s),
            YoungFunction::Quotient { r, s } => t.powf(*r) / log_e(t).powf(*s),
            YoungFunction::ExpL => t.exp_m1(),
            YoungFunction::Substituted { inner, exponent } => inner.eval(t.powf(*exponent)),
            YoungFunction::Associate(inner) => match inner.conjugate_point(t) {
                Some(s) if s > 0.0 => s * t - inner.eval(s),
                Some(_) => 0.0,
                None => f64::INFINITY,
            },
        }
    }

    /// `Φ'(t)` for `t > 0`.
    pub fn derivative(&self, t: f64) -> f64 {
        let t = t.max(1e-300);
        match self {
            YoungFunction::Power(r) => r * t.powf(r - 1.0),
            YoungFunction::LogBump { r, s } => {
                let l = log_e(t);
                r * t.powf(r - 1.0) * l.powf(*s) + s * t.powf(*r) * l.powf(s - 1.0) / (E + t)
            }
            YoungFunction::Quotient { r, s } => {
                let l = log_e(t);
                r * t.powf(r - 1.0) / l.powf(*s) - s * t.powf(*r) / (l.powf(s + 1.0) * (E + t))
            }
            YoungFunction::ExpL => t.exp(),
            YoungFunction::Substituted { inner, exponent } => {
                inner.derivative(t.powf(*exponent)) * exponent * t.powf(exponent - 1.0)
            }
            YoungFunction::Associate(inner) => inner.conjugate_point(t).unwrap_or(f64::INFINITY),
        }
    }

    fn derivative_at_zero(&self) -> f64 {
        match self {
            YoungFunction::Power(r) | YoungFunction::LogBump { r, .. } | YoungFunction::Quotient { r, .. } => {
                if *r > 1.0 {
                    0.0
                } else {
                    1.0
                }
            }
            YoungFunction::ExpL => 1.0,
            _ => self.derivative(1e-200),
        }
    }

    /// Upper end of the range of `Φ'` (finite only for `t`-linear growth).
    fn derivative_sup(&self) -> f64 {
        match self {
            YoungFunction::Power(r) if *r == 1.0 => 1.0,
            _ => f64::INFINITY,
        }
    }

    /// The maximizer `s` of `st - Φ(s)`, i.e. `Φ'(s) = t`; `None` when the sup is infinite.
    fn conjugate_point(&self, t: f64) -> Option<f64> {
        if t <= self.derivative_at_zero() {
            return Some(0.0);
        }
        if t > self.derivative_sup() {
            return None;
        }
        if t == self.derivative_sup() {
            return Some(0.0);
        }
        let mut hi = 1.0;
        while self.derivative(hi) < t {
            hi *= 16.0;
            if hi > 1e300 {
                return None;
            }
        }
        let mut lo = 1.0;
        while self.derivative(lo) >= t && lo > 1e-300 {
            lo /= 16.0;
        }
        Some(log_root(lo, hi, |s| self.derivative(s) - t))
    }

    /// `Φ^{-1}(y)` for `y ≥ 0`.
    pub fn inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if y.is_infinite() {
            return f64::INFINITY;
        }
        match self {
            YoungFunction::Power(r) => y.powf(1.0 / r),
            YoungFunction::ExpL => y.ln_1p(),
            YoungFunction::Substituted { inner, exponent } => inner.inverse(y).powf(1.0 / exponent),
            YoungFunction::Associate(inner) => inner.associate_inverse(y),
            _ => self.bisect_inverse(y),
        }
    }

    fn bisect_inverse(&self, y: f64) -> f64 {
        let mut hi = 1.0;
        while self.eval(hi) < y {
            hi *= 16.0;
        }
        let mut lo = 1.0;
        while self.eval(lo) >= y && lo > 1e-300 {
            lo /= 16.0;
        }
        log_root(lo, hi, |t| self.eval(t) - y)
    }

    /// `Φ̄^{-1}(y)` via the parametrization `t = Φ'(s)`, `Φ̄(t) = sΦ'(s) - Φ(s)`.
    fn associate_inverse(&self, y: f64) -> f64 {
        if self.derivative_sup().is_finite() {
            return self.derivative_sup();
        }
        let g = |s: f64| s * self.derivative(s) - self.eval(s);
        let mut hi = 1.0;
        while g(hi) < y {
            hi *= 16.0;
        }
        let mut lo = 1.0;
        while g(lo) >= y && lo > 1e-300 {
            lo /= 16.0;
        }
        let s = log_root(lo, hi, |s| g(s) - y);
        self.derivative(s)
    }

    /// Growth exponents at infinity.
    pub fn asymptotics(&self) -> Result<Asymptotics> {
        Ok(match self {
            YoungFunction::Power(r) => Asymptotics { r: *r, s: 0.0 },
            YoungFunction::LogBump { r, s } => Asymptotics { r: *r, s: *s },
            YoungFunction::Quotient { r, s } => Asymptotics { r: *r, s: -s },
            YoungFunction::ExpL => Asymptotics {
                r: f64::INFINITY,
                s: 0.0,
            },
            YoungFunction::Substituted { inner, exponent } => {
                let a = inner.asymptotics()?;
                Asymptotics {
                    r: a.r * exponent,
                    s: a.s,
                }
            }
            YoungFunction::Associate(inner) => {
                let a = inner.asymptotics()?;
                if a.r.is_infinite() {
                    if **inner == YoungFunction::ExpL {
                        Asymptotics { r: 1.0, s: 1.0 }
                    } else {
                        return Err(Error::UnknownAsymptotics(format!("associate of {inner}")));
                    }
                } else if a.r > 1.0 {
                    let rp = a.r / (a.r - 1.0);
                    Asymptotics {
                        r: rp,
                        s: -a.s * (rp - 1.0),
                    }
                } else if a.s > 0.0 {
                    // t log^s t has an associate of exponential type.
                    Asymptotics {
                        r: f64::INFINITY,
                        s: 0.0,
                    }
                } else {
                    return Err(Error::UnknownAsymptotics(format!("associate of {inner}")));
                }
            }
        })
    }

    /// Classifies the `B_p` integral from the family's growth exponents.
    pub fn bp_tail_exponent(&self, p: f64) -> Result<BpDiagnosis> {
        if !(p > 1.0) {
            return Err(Error::InvalidParameter(format!("B_p needs p > 1, got {p}")));
        }
        let a = self.asymptotics()?;
        let same = (a.r - p).abs() <= 1e-12 * p;
        Ok(if a.r.is_infinite() || (a.r > p && !same) {
            BpDiagnosis::Diverges
        } else if !same {
            BpDiagnosis::Converges
        } else if a.s < -1.0 - 1e-12 {
            BpDiagnosis::Converges
        } else if (a.s + 1.0).abs() <= 1e-12 {
            BpDiagnosis::Marginal
        } else {
            BpDiagnosis::Diverges
        })
    }
}

impl fmt::Display for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            YoungFunction::Power(r) => write!(f, "power:{r}"),
            YoungFunction::LogBump { r, s } => write!(f, "logbump:{r}:{s}"),
            YoungFunction::Quotient { r, s } => write!(f, "quotient:{r}:{s}"),
            YoungFunction::ExpL => write!(f, "expl"),
            YoungFunction::Associate(inner) => write!(f, "assoc:{inner}"),
            YoungFunction::Substituted { inner, exponent } => write!(f, "({inner})∘t^{exponent}"),
        }
    }
}

/// `inf{λ > 0 : mean Φ(|v|/λ) ≤ 1}` for equally weighted values.
pub fn luxemburg_values(values: &[f64], phi: &YoungFunction) -> Result<f64> {
    if let Some((cell, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { cell, value });
    }
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sup == 0.0 || values.is_empty() {
        return Ok(0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().map(|v| v.abs()).sum::<f64>() / n;
    let modular = |lam: f64| values.iter().map(|v| phi.eval(v.abs() / lam)).sum::<f64>() / n;
    let inv1 = phi.inverse(1.0);
    let mut hi = sup * (1.0f64).max(1.0 / inv1);
    let mut lo = mean / inv1;
    if !(lo > 0.0 && lo.is_finite()) {
        lo = sup * 1e-3;
    }
    while modular(hi) > 1.0 {
        hi *= 2.0;
    }
    while modular(lo) <= 1.0 {
        lo *= 0.5;
    }
    while hi / lo - 1.0 > LUXEMBURG_REL_WIDTH {
        let mid = (lo * hi).sqrt();
        if modular(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// `‖f‖_{Φ,Q}` on a cell cube.
pub fn luxemburg_cells(f: &SampledFunction, c: &CellCube, phi: &YoungFunction) -> Result<f64> {
    let vals: Vec<f64> = f.cells(c).map(|i| f.values()[i]).collect();
    luxemburg_values(&vals, phi)
}

/// `‖f‖_{Φ,Q}`.
pub fn luxemburg_norm(f: &SampledFunction, q: &DyadicCube, phi: &YoungFunction) -> Result<f64> {
    let c = f.cell_cube(q)?;
    luxemburg_cells(f, &c, phi)
}

/// Cube family for the Orlicz maximal operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    /// The dyadic tree of the domain.
    Dyadic,
    /// Cubes of side `2^j` cells at every lattice position inside the domain.
    AllCubes,
}

/// `M_{Φ,α} f(x) = sup_{Q ∋ x} |Q|^{α/n} ‖f‖_{Φ,Q}` over the chosen finite cube family.
pub fn orlicz_maximal(f: &SampledFunction, phi: &YoungFunction, alpha: f64, flavor: Flavor) -> Result<SampledFunction> {
    let dim = f.dim();
    if !(0.0..dim as f64).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "α must lie in [0, {dim}), got {alpha}"
        )));
    }
    if let Some((cell, &value)) = f.values().iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { cell, value });
    }
    let h = f.cell_side();
    let weight = |size: usize| (size as f64 * h).powf(alpha);
    match flavor {
        Flavor::Dyadic => dyadic_maximal(f, phi, &weight),
        Flavor::AllCubes => lattice_maximal(f, phi, &weight),
    }
}

fn dyadic_maximal(f: &SampledFunction, phi: &YoungFunction, weight: &dyn Fn(usize) -> f64) -> Result<SampledFunction> {
    let dim = f.dim();
    let depth = f.resolution() as usize;
    let per_level: Vec<Vec<f64>> = match phi {
        YoungFunction::Power(r) => {
            let powered: Vec<f64> = f.values().iter().map(|v| v.abs().powf(*r)).collect();
            let pyr = Pyramid::from_values(&powered, dim, depth);
            (0..=depth)
                .map(|d| pyr.level(d).iter().map(|m| m.powf(1.0 / r)).collect())
                .collect()
        }
        _ => {
            let pyr = Pyramid::from_values(f.values(), dim, depth);
            (0..=depth)
                .map(|d| {
                    (0..1usize << (d * dim))
                        .into_par_iter()
                        .map(|pos| luxemburg_cells(f, &pyr.node(d, pos), phi))
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<_>>()?
        }
    };
    let mut best = vec![0.0; 1];
    best[0] = weight(1 << depth) * per_level[0][0];
    for d in 1..=depth {
        let per = 1usize << d;
        let size = 1usize << (depth - d);
        let w = weight(size);
        let prev = &best;
        let next: Vec<f64> = (0..per.pow(dim as u32))
            .map(|pos| {
                let ix = crate::grid::unravel(pos, per, dim);
                let parent = (0..dim).fold(0, |acc, i| acc * (per / 2) + ix[i] / 2);
                prev[parent].max(w * per_level[d][pos])
            })
            .collect();
        best = next;
    }
    SampledFunction::from_values(f.domain().clone(), f.resolution(), best)
}

fn lattice_maximal(f: &SampledFunction, phi: &YoungFunction, weight: &dyn Fn(usize) -> f64) -> Result<SampledFunction> {
    let dim = f.dim();
    let n = f.cells_per_axis();
    let prefix = match phi {
        YoungFunction::Power(r) => {
            let powered: Vec<f64> = f.values().iter().map(|v| v.abs().powf(*r)).collect();
            Some((PrefixSums::from_values(&powered, dim, n), *r))
        }
        _ => None,
    };
    let mut best = vec![0.0f64; f.len()];
    let mut size = 1;
    while size <= n {
        let positions = n - size + 1;
        let count = positions.pow(dim as u32);
        let w = weight(size);
        let vals: Vec<f64> = (0..count)
            .into_par_iter()
            .map(|lin| {
                let ix = crate::grid::unravel(lin, positions, dim);
                let cube = CellCube { corner: ix, size };
                let norm = match &prefix {
                    Some((ps, r)) => ps.average(&cube).max(0.0).powf(1.0 / r),
                    None => luxemburg_cells(f, &cube, phi)?,
                };
                Ok(w * norm)
            })
            .collect::<Result<_>>()?;
        let spread = window_max(&vals, positions, size, dim);
        for (b, v) in best.iter_mut().zip(spread) {
            *b = b.max(v);
        }
        size *= 2;
    }
    SampledFunction::from_values(f.domain().clone(), f.resolution(), best)
}

// For values indexed by cube corner (positions per axis), the per-cell max over cubes covering it.
fn window_max(vals: &[f64], positions: usize, size: usize, dim: usize) -> Vec<f64> {
    let n = positions + size - 1;
    let mut cur = vals.to_vec();
    let mut shape = [positions; MAX_DIM];
    for axis in 0..dim {
        let mut new_shape = shape;
        new_shape[axis] = n;
        let total: usize = new_shape[..dim].iter().product();
        let mut out = vec![f64::NEG_INFINITY; total];
        let stride_old: usize = shape[axis + 1..dim].iter().product();
        let stride_new: usize = new_shape[axis + 1..dim].iter().product();
        let outer: usize = shape[..axis].iter().product();
        for o in 0..outer {
            for inner in 0..stride_old {
                for x in 0..n {
                    let a = x.saturating_sub(size - 1);
                    let b = x.min(shape[axis] - 1);
                    let mut m = f64::NEG_INFINITY;
                    for c in a..=b {
                        m = m.max(cur[(o * shape[axis] + c) * stride_old + inner]);
                    }
                    out[(o * n + x) * stride_new + inner] = m;
                }
            }
        }
        cur = out;
        shape = new_shape;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Domain, DyadicGrid};

    #[test]
    fn inverse_round_trip() {
        let fams = [
            YoungFunction::Power(2.5),
            YoungFunction::LogBump { r: 2.0, s: 3.5 },
            YoungFunction::Quotient { r: 2.0, s: 1.5 },
            YoungFunction::ExpL,
            YoungFunction::llogl().associate(),
            YoungFunction::LogBump { r: 1.0, s: 2.0 }.substituted(0.5),
        ];
        for phi in &fams {
            for y in [1e-6, 0.3, 1.0, 7.0, 1e4] {
                let t = phi.inverse(y);
                assert!((phi.eval(t) / y - 1.0).abs() < 1e-10, "{phi} at {y}");
            }
        }
    }

    #[test]
    fn power_associate_has_closed_form() {
        // Φ̄(t) = (p-1)(t/p)^{p'}
        let p: f64 = 3.0;
        let pp = p / (p - 1.0);
        let a = YoungFunction::Power(p).associate();
        for t in [0.1, 1.0, 5.0] {
            let want = (p - 1.0) * (t / p).powf(pp);
            assert!((a.eval(t) / want - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn expl_associate_is_t_log_t() {
        let a = YoungFunction::ExpL.associate();
        assert_eq!(a.eval(0.5), 0.0);
        for t in [2.0f64, 10.0, 100.0] {
            let want = t * t.ln() - t + 1.0;
            assert!((a.eval(t) / want - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn luxemburg_constant_and_linear() {
        let phi = YoungFunction::Power(2.0);
        assert!((luxemburg_values(&[3.0; 8], &phi).unwrap() - 3.0).abs() < 1e-9);
        let dom = Domain::new(vec![0.0], 1.0).unwrap();
        // cell averages of x squared-mean: (1/N)Σ c_i^2 = 1/3 - h^2/12
        let f = SampledFunction::from_cell_fn(dom, 10, |lo, hi| 0.5 * (lo[0] + hi[0])).unwrap();
        let q = DyadicGrid::standard(1).cube(0, vec![0]);
        let h = 1.0 / 1024.0;
        let want = (1.0 / 3.0 - h * h / 12.0f64).sqrt();
        assert!((luxemburg_norm(&f, &q, &phi).unwrap() - want).abs() < 1e-9);
        assert!((want - 3f64.sqrt().recip()).abs() < 1e-6);
    }

    #[test]
    fn llogl_of_one_matches_scalar_root() {
        // λ solves (1/λ) log(e + 1/λ) = 1; Newton oracle.
        let mut lam: f64 = 1.0;
        for _ in 0..50 {
            let u = 1.0 / lam;
            let g = u * (E + u).ln() - 1.0;
            let dg_du = (E + u).ln() + u / (E + u);
            lam -= g / (dg_du * -(u * u));
        }
        let got = luxemburg_values(&[1.0; 4], &YoungFunction::llogl()).unwrap();
        assert!((got - lam).abs() < 1e-9 * lam);
        assert!((lam - 1.256_750_6).abs() < 1e-6);
    }

    #[test]
    fn bp_classification() {
        assert_eq!(
            YoungFunction::Power(1.5).bp_tail_exponent(3.0).unwrap(),
            BpDiagnosis::Converges
        );
        let (p, d) = (2.0, 0.5);
        let dq = YoungFunction::Quotient {
            r: p,
            s: 1.0 + (p - 1.0) * d,
        };
        assert_eq!(dq.bp_tail_exponent(p).unwrap(), BpDiagnosis::Converges);
        let a = YoungFunction::LogBump { r: p, s: p - 1.0 + d };
        assert_eq!(a.bp_tail_exponent(p).unwrap(), BpDiagnosis::Diverges);
        let m = YoungFunction::Quotient { r: p, s: 1.0 };
        assert_eq!(m.bp_tail_exponent(p).unwrap(), BpDiagnosis::Marginal);
        assert_eq!(
            YoungFunction::ExpL.bp_tail_exponent(2.0).unwrap(),
            BpDiagnosis::Diverges
        );
        assert!(YoungFunction::llogl()
            .associate()
            .associate()
            .bp_tail_exponent(2.0)
            .is_ok());
        assert!(YoungFunction::Power(1.0).associate().bp_tail_exponent(2.0).is_err());
    }

    #[test]
    fn maximal_of_indicator_dyadic() {
        let dom = Domain::new(vec![0.0], 2.0).unwrap();
        let f = SampledFunction::from_cell_fn(dom, 4, |lo, _| if lo[0] < 1.0 { 1.0 } else { 0.0 }).unwrap();
        let m = orlicz_maximal(&f, &YoungFunction::Power(1.0), 0.0, Flavor::Dyadic).unwrap();
        assert_eq!(m.value_at(&[1.5]).unwrap(), 0.5);
        assert_eq!(m.value_at(&[0.5]).unwrap(), 1.0);
        let g = orlicz_maximal(&f, &YoungFunction::LogBump { r: 1.0, s: 0.0 }, 0.0, Flavor::Dyadic).unwrap();
        for (a, b) in m.values().iter().zip(g.values()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn lattice_maximal_matches_brute_force() {
        let dom = Domain::new(vec![0.0, 0.0], 1.0).unwrap();
        let f = SampledFunction::from_cell_fn(dom, 3, |lo, _| (5.0 * lo[0] + 3.0 * lo[1]).sin()).unwrap();
        let phi = YoungFunction::Power(2.0);
        let m = orlicz_maximal(&f, &phi, 0.5, Flavor::AllCubes).unwrap();
        let n = 8;
        let h = 1.0 / 8.0;
        for cell in 0..f.len() {
            let ix = f.unravel(cell);
            let mut best = 0.0f64;
            let mut size = 1;
            while size <= n {
                for a in 0..=n - size {
                    for b in 0..=n - size {
                        let c = CellCube::new([a, b, 0], size);
                        if c.contains_cell(&ix, 2) {
                            let v = luxemburg_cells(&f, &c, &phi).unwrap() * (size as f64 * h).powf(0.5);
                            best = best.max(v);
                        }
                    }
                }
                size *= 2;
            }
            assert!((m.values()[cell] - best).abs() < 1e-8 * best.max(1.0));
        }
    }
}
