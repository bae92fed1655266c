//! Built-in analytic function families, addressed by string ids.

use std::fmt;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cellquad::{power_box_integral, powerlog_box_integral, tensor_gauss};
use super::{Domain, SampledFunction};
use crate::error::{Error, Result};
use crate::expr::{self, Bindings};
use crate::quad::GaussRule;

/// A function family with exact or high-order cell-average ingestion.
///
/// Ids: `const:c`, `charfn:a:b` (indicator of `[a,b]^n`), `power:a` (`|x|^a`), `log` (`log|x|`),
/// `powerlog:a` (`|x|^a log|x|`), `linear` (`x_1`), `haar` (Haar function of `[0,1)` in `x_1`),
/// `bump`, `gauss:s`, `expdelta:d` (`exp(-|x|^d)`), `random:seed:blocks`, `lograndom:seed:blocks`,
/// `csv:path`. Numeric parameters accept arithmetic in `n`, `p`, `q`, `p'`, `q'`, `delta`, `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionId {
    Const(f64),
    CharFn { a: f64, b: f64 },
    Power { a: f64 },
    Log,
    PowerLog { a: f64 },
    Linear,
    Haar,
    Bump,
    Gauss { s: f64 },
    ExpDelta { delta: f64 },
    Random { seed: u64, blocks: usize },
    LogRandom { seed: u64, blocks: usize },
    Csv(PathBuf),
}

impl FunctionId {
    pub fn parse(id: &str, vars: &Bindings) -> Result<FunctionId> {
        let mut parts = id.trim().splitn(2, ':');
        let head = parts.next().unwrap_or("");
        let rest = parts.next();
        let args: Vec<&str> = rest.map(|r| r.split(':').collect()).unwrap_or_default();
        let num = |i: usize| -> Result<f64> {
            let s = args
                .get(i)
                .ok_or_else(|| Error::Parse(format!("`{id}` is missing parameter {}", i + 1)))?;
            expr::eval(s, vars)
        };
        let int = |i: usize| -> Result<u64> {
            let v = num(i)?;
            if v < 0.0 || v.fract() != 0.0 {
                return Err(Error::Parse(format!("`{id}` needs a nonnegative integer parameter")));
            }
            Ok(v as u64)
        };
        let arity = |k: usize| -> Result<()> {
            if args.len() != k {
                return Err(Error::Parse(format!("`{id}` takes {k} parameter(s)")));
            }
            Ok(())
        };
        let f = match head {
            "const" => {
                arity(1)?;
                FunctionId::Const(num(0)?)
            }
            "charfn" => {
                arity(2)?;
                FunctionId::CharFn { a: num(0)?, b: num(1)? }
            }
            "power" => {
                arity(1)?;
                FunctionId::Power { a: num(0)? }
            }
            "log" => {
                arity(0)?;
                FunctionId::Log
            }
            "powerlog" => {
                arity(1)?;
                FunctionId::PowerLog { a: num(0)? }
            }
            "linear" => {
                arity(0)?;
                FunctionId::Linear
            }
            "haar" => {
                arity(0)?;
                FunctionId::Haar
            }
            "bump" => {
                arity(0)?;
                FunctionId::Bump
            }
            "gauss" => {
                arity(1)?;
                FunctionId::Gauss { s: num(0)? }
            }
            "expdelta" => {
                arity(1)?;
                FunctionId::ExpDelta { delta: num(0)? }
            }
            "random" | "lograndom" => {
                arity(2)?;
                let seed = int(0)?;
                let blocks = int(1)? as usize;
                if !blocks.is_power_of_two() {
                    return Err(Error::Parse(format!("`{id}`: block count must be a power of two")));
                }
                if head == "random" {
                    FunctionId::Random { seed, blocks }
                } else {
                    FunctionId::LogRandom { seed, blocks }
                }
            }
            "csv" => FunctionId::Csv(PathBuf::from(rest.unwrap_or(""))),
            _ => return Err(Error::Parse(format!("unknown function family `{head}`"))),
        };
        Ok(f)
    }

    /// Pointwise value (for the random families, the block value on `[0,1)^n`).
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        match self {
            FunctionId::Const(c) => *c,
            FunctionId::CharFn { a, b } => {
                if x.iter().all(|v| *a <= *v && *v <= *b) {
                    1.0
                } else {
                    0.0
                }
            }
            FunctionId::Power { a } => r.powf(*a),
            FunctionId::Log => r.ln(),
            FunctionId::PowerLog { a } => r.powf(*a) * r.ln(),
            FunctionId::Linear => x[0],
            FunctionId::Haar => {
                if x.iter().all(|v| (0.0..1.0).contains(v)) {
                    if x[0] < 0.5 {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    0.0
                }
            }
            FunctionId::Bump => bump(r),
            FunctionId::Gauss { s } => (-(r / s).powi(2)).exp(),
            FunctionId::ExpDelta { delta } => (-r.powf(*delta)).exp(),
            FunctionId::Random { .. } | FunctionId::LogRandom { .. } | FunctionId::Csv(_) => f64::NAN,
        }
    }

    /// The family of `f^t` when it is closed under powers.
    pub fn powered(&self, t: f64) -> Option<FunctionId> {
        match self {
            FunctionId::Const(c) if *c > 0.0 => Some(FunctionId::Const(c.powf(t))),
            FunctionId::Power { a } => Some(FunctionId::Power { a: a * t }),
            _ => None,
        }
    }

    /// Cell averages on `domain` at resolution `level`.
    pub fn sample(&self, domain: &Domain, level: u32) -> Result<SampledFunction> {
        let dom = domain.clone();
        let dim = domain.dim();
        let vol = |lo: &[f64], hi: &[f64]| lo.iter().zip(hi).map(|(a, b)| b - a).product::<f64>();
        match self {
            FunctionId::Const(c) => SampledFunction::constant(dom, level, *c),
            FunctionId::CharFn { a, b } => SampledFunction::from_cell_fn(dom, level, |lo, hi| {
                lo.iter()
                    .zip(hi)
                    .map(|(l, u)| overlap(*l, *u, *a, *b) / (u - l))
                    .product()
            }),
            FunctionId::Power { a } => {
                if *a + dim as f64 <= 0.0 && contains_origin(domain) {
                    return Err(Error::Diverges(format!(
                        "|x|^{a} is not locally integrable in dimension {dim}"
                    )));
                }
                SampledFunction::from_cell_fn(dom, level, |lo, hi| power_box_integral(*a, lo, hi) / vol(lo, hi))
            }
            FunctionId::Log => {
                SampledFunction::from_cell_fn(dom, level, |lo, hi| powerlog_box_integral(0.0, lo, hi) / vol(lo, hi))
            }
            FunctionId::PowerLog { a } => {
                if *a + dim as f64 <= 0.0 && contains_origin(domain) {
                    return Err(Error::Diverges(format!("|x|^{a} log|x| is not locally integrable")));
                }
                SampledFunction::from_cell_fn(dom, level, |lo, hi| powerlog_box_integral(*a, lo, hi) / vol(lo, hi))
            }
            FunctionId::Linear => SampledFunction::from_cell_fn(dom, level, |lo, hi| 0.5 * (lo[0] + hi[0])),
            FunctionId::Haar => SampledFunction::from_cell_fn(dom, level, |lo, hi| {
                let rest: f64 = (1..dim)
                    .map(|i| overlap(lo[i], hi[i], 0.0, 1.0) / (hi[i] - lo[i]))
                    .product();
                let w = hi[0] - lo[0];
                rest * (overlap(lo[0], hi[0], 0.0, 0.5) - overlap(lo[0], hi[0], 0.5, 1.0)) / w
            }),
            FunctionId::Bump | FunctionId::Gauss { .. } | FunctionId::ExpDelta { .. } => {
                let rule = GaussRule::new(8);
                SampledFunction::from_cell_fn(dom, level, |lo, hi| {
                    tensor_gauss(&rule, lo, hi, dim, &|x: &[f64]| self.eval(x)) / vol(lo, hi)
                })
            }
            FunctionId::Random { seed, blocks } => random_blocks(domain, level, *seed, *blocks, |u| 2.0 * u - 1.0),
            FunctionId::LogRandom { seed, blocks } => {
                random_blocks(domain, level, *seed, *blocks, |u| (2.0 * u - 1.0).exp())
            }
            FunctionId::Csv(path) => {
                let f = SampledFunction::load_csv(path)?;
                if f.domain() != domain {
                    return Err(Error::GridMismatch);
                }
                if f.resolution() > level {
                    f.coarsen(level)
                } else {
                    f.refine(level)
                }
            }
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionId::Const(c) => write!(f, "const:{c}"),
            FunctionId::CharFn { a, b } => write!(f, "charfn:{a}:{b}"),
            FunctionId::Power { a } => write!(f, "power:{a}"),
            FunctionId::Log => write!(f, "log"),
            FunctionId::PowerLog { a } => write!(f, "powerlog:{a}"),
            FunctionId::Linear => write!(f, "linear"),
            FunctionId::Haar => write!(f, "haar"),
            FunctionId::Bump => write!(f, "bump"),
            FunctionId::Gauss { s } => write!(f, "gauss:{s}"),
            FunctionId::ExpDelta { delta } => write!(f, "expdelta:{delta}"),
            FunctionId::Random { seed, blocks } => write!(f, "random:{seed}:{blocks}"),
            FunctionId::LogRandom { seed, blocks } => write!(f, "lograndom:{seed}:{blocks}"),
            FunctionId::Csv(p) => write!(f, "csv:{}", p.display()),
        }
    }
}

fn bump(r: f64) -> f64 {
    if r < 1.0 {
        (-1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

fn overlap(l: f64, u: f64, a: f64, b: f64) -> f64 {
    (u.min(b) - l.max(a)).max(0.0)
}

fn contains_origin(d: &Domain) -> bool {
    d.lo().iter().all(|l| *l <= 0.0 && l + d.side() >= 0.0)
}

fn random_blocks(
    domain: &Domain,
    level: u32,
    seed: u64,
    blocks: usize,
    map: impl Fn(f64) -> f64,
) -> Result<SampledFunction> {
    let per = 1usize << level;
    if blocks > per {
        return Err(Error::InvalidParameter(format!(
            "{blocks} blocks per axis exceed {per} cells"
        )));
    }
    let dim = domain.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table: Vec<f64> = (0..blocks.pow(dim as u32)).map(|_| map(rng.gen::<f64>())).collect();
    let ratio = per / blocks;
    let values = (0..per.pow(dim as u32))
        .map(|idx| {
            let ix = super::unravel(idx, per, dim);
            let b = (0..dim).fold(0, |acc, i| acc * blocks + ix[i] / ratio);
            table[b]
        })
        .collect();
    SampledFunction::from_values(domain.clone(), level, values)
}
