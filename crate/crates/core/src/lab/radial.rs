use std::f64::consts::{E, PI};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{eval, Bindings};
use crate::quad::{integrate, Tolerance};

/// `|S^{n-1}|`.
pub fn sphere_measure(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => {
            // 2π^{n/2}/Γ(n/2) by the recursion |S^{n+1}| = 2π|S^{n-1}|/n
            let mut s = if dim % 2 == 0 { 2.0 * PI } else { 4.0 * PI };
            let mut k = if dim % 2 == 0 { 2 } else { 3 };
            while k < dim {
                s *= 2.0 * PI / k as f64;
                k += 2;
            }
            s
        }
    }
}

/// A radius stored as `ln r`, so that `r = 0`, `r = ∞` and `r = exp(10^30)` are all representable.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Radius {
    pub ln: f64,
}

impl Radius {
    pub const ZERO: Radius = Radius { ln: f64::NEG_INFINITY };
    pub const INFINITY: Radius = Radius { ln: f64::INFINITY };

    pub fn new(r: f64) -> Self {
        Radius { ln: r.ln() }
    }

    pub fn from_log10(l: f64) -> Self {
        Radius {
            ln: l * std::f64::consts::LN_10,
        }
    }

    pub fn from_loglog(u: f64) -> Self {
        Radius { ln: u.exp() }
    }

    pub fn loglog(&self) -> f64 {
        self.ln.ln()
    }

    pub fn log10(&self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }
}

/// `g(r) = scale · r^a (log r)^b (log log r)^c (log log log r)^d · exp(-κ r^δ)` on `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    pub dim: usize,
    pub scale: f64,
    pub power: f64,
    pub log: f64,
    pub loglog: f64,
    pub logloglog: f64,
    /// `(δ, κ)` of an `exp(-κ r^δ)` factor.
    pub decay: Option<(f64, f64)>,
    pub lo: Radius,
    pub hi: Radius,
}

/// Tail behaviour of `∫^∞ g(r) r^{n-1} dr`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Tail {
    Converges,
    Diverges { growth: String },
}

impl RadialProfile {
    pub fn new(dim: usize) -> Self {
        RadialProfile {
            dim,
            scale: 1.0,
            power: 0.0,
            log: 0.0,
            loglog: 0.0,
            logloglog: 0.0,
            decay: None,
            lo: Radius::ZERO,
            hi: Radius::INFINITY,
        }
    }

    pub fn power(mut self, a: f64) -> Self {
        self.power += a;
        self
    }

    pub fn logs(mut self, b: f64, c: f64, d: f64) -> Self {
        self.log += b;
        self.loglog += c;
        self.logloglog += d;
        self
    }

    pub fn decay(mut self, delta: f64, kappa: f64) -> Self {
        self.decay = Some((delta, kappa));
        self
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.scale *= s;
        self
    }

    pub fn support(mut self, lo: Radius, hi: Radius) -> Self {
        self.lo = lo;
        self.hi = hi;
        self
    }

    /// Pointwise product on the intersection of the supports.
    pub fn product(&self, other: &RadialProfile) -> Result<RadialProfile> {
        if self.dim != other.dim {
            return Err(Error::InvalidParameter("profiles of different dimension".into()));
        }
        let decay = match (self.decay, other.decay) {
            (None, d) | (d, None) => d,
            (Some((d1, k1)), Some((d2, k2))) if d1 == d2 => Some((d1, k1 + k2)),
            _ => return Err(Error::InvalidParameter("decay factors with different exponents".into())),
        };
        Ok(RadialProfile {
            dim: self.dim,
            scale: self.scale * other.scale,
            power: self.power + other.power,
            log: self.log + other.log,
            loglog: self.loglog + other.loglog,
            logloglog: self.logloglog + other.logloglog,
            decay,
            lo: if self.lo > other.lo { self.lo } else { other.lo },
            hi: if self.hi < other.hi { self.hi } else { other.hi },
        })
    }

    /// `g^t`.
    pub fn powered(&self, t: f64) -> RadialProfile {
        RadialProfile {
            scale: self.scale.powf(t),
            power: self.power * t,
            log: self.log * t,
            loglog: self.loglog * t,
            logloglog: self.logloglog * t,
            decay: self.decay.map(|(d, k)| (d, k * t)),
            ..self.clone()
        }
    }

    /// Parses `*`-separated factors: `power:a`, `logpower:a:b:c:d`, `expdelta:δ[:κ]`,
    /// `cutoff:R0` (support `|x| > R0`) and `const:c`.
    pub fn parse(dim: usize, id: &str, vars: &Bindings) -> Result<Self> {
        let mut g = RadialProfile::new(dim);
        for factor in id.split('*') {
            let mut parts = factor.trim().split(':');
            let head = parts.next().unwrap_or("");
            let args: Vec<f64> = parts.map(|s| eval(s, vars)).collect::<Result<_>>()?;
            let need = |k: std::ops::RangeInclusive<usize>| -> Result<()> {
                if k.contains(&args.len()) {
                    Ok(())
                } else {
                    Err(Error::Parse(format!("`{factor}` has {} parameter(s)", args.len())))
                }
            };
            g = match head {
                "power" => {
                    need(1..=1)?;
                    g.power(args[0])
                }
                "logpower" => {
                    need(1..=4)?;
                    let a = |i: usize| args.get(i).copied().unwrap_or(0.0);
                    g.power(a(0)).logs(a(1), a(2), a(3))
                }
                "expdelta" => {
                    need(1..=2)?;
                    g.decay(args[0], args.get(1).copied().unwrap_or(1.0))
                }
                "cutoff" => {
                    need(1..=1)?;
                    let hi = g.hi;
                    g.support(Radius::new(args[0]), hi)
                }
                "const" => {
                    need(1..=1)?;
                    g.scaled(args[0])
                }
                _ => return Err(Error::Parse(format!("unknown radial factor `{head}`"))),
            };
        }
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let needs = |ln_min: f64, what: &str| -> Result<()> {
            if self.lo.ln < ln_min {
                return Err(Error::InvalidParameter(format!(
                    "{what} factor needs support starting above e^{ln_min}"
                )));
            }
            Ok(())
        };
        if self.log != 0.0 {
            needs(0.0, "log")?;
        }
        if self.loglog != 0.0 {
            needs(1.0, "log log")?;
        }
        if self.logloglog != 0.0 {
            needs(E, "log log log")?;
        }
        if !(self.dim >= 1 && self.scale >= 0.0) {
            return Err(Error::InvalidParameter(
                "dimension must be positive and the scale nonnegative".into(),
            ));
        }
        if !(self.lo.ln <= self.hi.ln) {
            return Err(Error::InvalidParameter("empty support".into()));
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> f64 {
        let ln = r.ln();
        if ln < self.lo.ln || ln >= self.hi.ln {
            return 0.0;
        }
        let mut l = self.scale.ln() + self.power * ln;
        if self.log != 0.0 {
            l += self.log * ln.ln();
        }
        if self.loglog != 0.0 {
            l += self.loglog * ln.ln().ln();
        }
        if self.logloglog != 0.0 {
            l += self.logloglog * ln.ln().ln().ln();
        }
        if let Some((d, k)) = self.decay {
            l -= k * (d * ln).exp();
        }
        l.exp()
    }

    /// Growth of `∫^R g(r) r^{n-1} dr` as `R → ∞`.
    pub fn tail(&self) -> Tail {
        if self.scale == 0.0 || self.hi.ln.is_finite() {
            return Tail::Converges;
        }
        if let Some((d, k)) = self.decay {
            if d > 0.0 && k > 0.0 {
                return Tail::Converges;
            }
        }
        let e = self.power + self.dim as f64;
        if e != 0.0 {
            return if e < 0.0 {
                Tail::Converges
            } else {
                Tail::Diverges {
                    growth: format!("R^{e}"),
                }
            };
        }
        let steps = [
            (self.log, "log R"),
            (self.loglog, "log log R"),
            (self.logloglog, "log log log R"),
        ];
        for (exp, name) in steps {
            if exp < -1.0 {
                return Tail::Converges;
            }
            if exp > -1.0 {
                let g = exp + 1.0;
                return Tail::Diverges {
                    growth: format!("({name})^{g}"),
                };
            }
        }
        Tail::Diverges {
            growth: "log log log log R".into(),
        }
    }

    fn head_converges(&self) -> bool {
        if self.lo.ln > f64::NEG_INFINITY || self.scale == 0.0 {
            return true;
        }
        self.power + self.dim as f64 > 0.0
    }

    /// `|S^{n-1}| ∫_{lo}^{hi} g(r) r^{n-1} dr` with relative tolerance `rel`.
    pub fn integrate(&self, rel: f64) -> Result<f64> {
        self.validate()?;
        if self.scale == 0.0 || self.lo.ln == self.hi.ln {
            return Ok(0.0);
        }
        if let Tail::Diverges { growth } = self.tail() {
            return Err(Error::Diverges(format!("partial integrals grow like {growth}")));
        }
        if !self.head_converges() {
            return Err(Error::Diverges(format!(
                "r^{} is not integrable at the origin",
                self.power + self.dim as f64 - 1.0
            )));
        }
        let n = self.dim as f64;
        let tol = Tolerance {
            abs: 0.0,
            rel,
            max_intervals: 20_000,
        };
        let deep = self.lo.ln >= 1.0 && (self.loglog != 0.0 || self.logloglog != 0.0 || self.hi.ln > 700.0);
        let value = if deep {
            // u = log log r: dr/r = e^u du, log r = e^u
            let integrand = |u: f64| {
                let lnr = u.exp();
                let mut l = self.scale.ln() + u + self.log * u;
                if self.power + n != 0.0 {
                    l += (self.power + n) * lnr;
                }
                if self.loglog != 0.0 {
                    l += self.loglog * u.ln();
                }
                if self.logloglog != 0.0 {
                    l += self.logloglog * u.ln().ln();
                }
                if let Some((d, k)) = self.decay {
                    l -= k * (d * lnr).exp();
                }
                l.exp()
            };
            integrate(integrand, self.lo.loglog(), self.hi.loglog(), tol)?
        } else {
            // u = log r
            let integrand = |u: f64| {
                let mut l = self.scale.ln() + (self.power + n) * u;
                if self.log != 0.0 {
                    l += self.log * u.ln();
                }
                if self.loglog != 0.0 {
                    l += self.loglog * u.ln().ln();
                }
                if self.logloglog != 0.0 {
                    l += self.logloglog * u.ln().ln().ln();
                }
                if let Some((d, k)) = self.decay {
                    l -= k * (d * u).exp();
                }
                l.exp()
            };
            integrate(integrand, self.lo.ln, self.hi.ln, tol)?
        };
        if !value.converged {
            return Err(Error::Quadrature(format!("radial integral {value:?}")));
        }
        Ok(sphere_measure(self.dim) * value.value)
    }
}

impl fmt::Display for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}·logpower:{}:{}:{}:{}",
            self.scale, self.power, self.log, self.loglog, self.logloglog
        )?;
        if let Some((d, k)) = self.decay {
            write!(f, "*expdelta:{d}:{k}")?;
        }
        Ok(())
    }
}

/// `|S^{n-1}| ∫ g(r) r^{n-1} dr` over the profile's support, relative tolerance `1e-10`.
pub fn radial_integrate(g: &RadialProfile) -> Result<f64> {
    g.integrate(1e-10)
}
