//! Hilbert transform, Haar shifts, fractional integrals and their commutators.

mod commutator;
mod fractional;
mod haar;
mod hilbert;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Bindings;
use crate::grid::SampledFunction;

pub use commutator::{default_epsilon, CommutatorSpec, CONTOUR_EXP_LIMIT};
pub use fractional::{frac_integral_dyadic, unit_kernel, FractionalIntegral};
pub use haar::{HaarShift, LevelWindow};
pub use hilbert::{cell_kernel, hilbert};

/// One of the four base operators.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Hilbert,
    HaarShift {
        shift: HaarShift,
        window: Option<LevelWindow>,
    },
    FracIntegral(FractionalIntegral),
    DyadicFracIntegral {
        alpha: f64,
        window: Option<LevelWindow>,
    },
}

impl Operator {
    /// Parses `hilbert`, `haarshift:petermichl`, `ialpha:<α>` or `ialphad:<α>`.
    pub fn parse(id: &str, bindings: &Bindings) -> Result<Self> {
        let id = id.trim();
        let (head, arg) = match id.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (id, None),
        };
        let alpha = |a: Option<&str>| -> Result<f64> {
            let a = a.ok_or_else(|| Error::Parse(format!("operator `{head}` needs an exponent")))?;
            crate::expr::eval(a, bindings)
        };
        match head {
            "hilbert" if arg.is_none() => Ok(Operator::Hilbert),
            "haarshift" => match arg {
                Some("petermichl") => Ok(Operator::HaarShift {
                    shift: HaarShift::petermichl(),
                    window: None,
                }),
                other => Err(Error::Parse(format!("unknown Haar shift rule {other:?}"))),
            },
            "ialpha" => Ok(Operator::FracIntegral(FractionalIntegral::new(alpha(arg)?))),
            "ialphad" => Ok(Operator::DyadicFracIntegral {
                alpha: alpha(arg)?,
                window: None,
            }),
            _ => Err(Error::Parse(format!("unknown operator `{id}`"))),
        }
    }

    pub fn with_window(self, window: Option<LevelWindow>) -> Self {
        match self {
            Operator::HaarShift { shift, .. } => Operator::HaarShift { shift, window },
            Operator::DyadicFracIntegral { alpha, .. } => Operator::DyadicFracIntegral { alpha, window },
            other => other,
        }
    }

    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        match self {
            Operator::Hilbert => hilbert(f),
            Operator::HaarShift { shift, window } => shift.apply(f, *window),
            Operator::FracIntegral(op) => op.apply(f),
            Operator::DyadicFracIntegral { alpha, window } => frac_integral_dyadic(f, *alpha, *window),
        }
    }

    /// The L² adjoint.
    pub fn apply_adjoint(&self, f: &SampledFunction) -> Result<SampledFunction> {
        match self {
            Operator::Hilbert => Ok(hilbert(f)?.scale(-1.0)),
            Operator::HaarShift { shift, window } => shift.adjoint().apply(f, *window),
            _ => self.apply(f),
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::Hilbert => write!(f, "hilbert"),
            Operator::HaarShift { .. } => write!(f, "haarshift:petermichl"),
            Operator::FracIntegral(op) => write!(f, "ialpha:{}", op.alpha()),
            Operator::DyadicFracIntegral { alpha, .. } => write!(f, "ialphad:{alpha}"),
        }
    }
}

impl std::str::FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Operator::parse(s, &Bindings::new())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormOptions {
    pub dictionary: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            dictionary: 16,
            iterations: 30,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub dictionary: f64,
    pub power: f64,
}

/// Random piecewise-constant test functions at a spread of block scales.
pub fn test_dictionary(template: &SampledFunction, count: usize, seed: u64) -> Result<Vec<SampledFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depth = template.resolution();
    (0..count)
        .map(|k| {
            let blocks = depth.min(k as u32 % (depth + 1));
            let per = 1usize << blocks;
            let coarse: Vec<f64> = (0..per.pow(template.dim() as u32))
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let shift = depth - blocks;
            let dim = template.dim();
            let vals = (0..template.len())
                .map(|i| {
                    let ix = template.unravel(i);
                    coarse[(0..dim).fold(0, |acc, a| acc * per + (ix[a] >> shift))]
                })
                .collect();
            SampledFunction::from_values(template.domain().clone(), depth, vals)
        })
        .collect()
}

/// Lower estimate of the L² operator norm: the larger of the best Rayleigh quotient over a seeded
/// dictionary and the result of power iteration on `A*A`.
pub fn l2_norm_estimate<A, B>(
    apply: A,
    adjoint: B,
    template: &SampledFunction,
    opts: NormOptions,
) -> Result<NormEstimate>
where
    A: Fn(&SampledFunction) -> Result<SampledFunction>,
    B: Fn(&SampledFunction) -> Result<SampledFunction>,
{
    let dict = test_dictionary(template, opts.dictionary.max(1), opts.seed)?;
    let mut best = 0.0f64;
    let mut start = dict[0].clone();
    for f in &dict {
        let nf = f.lp_norm(2.0);
        if nf == 0.0 {
            continue;
        }
        let ratio = apply(f)?.lp_norm(2.0) / nf;
        if ratio > best {
            best = ratio;
            start = f.clone();
        }
    }
    let mut x = start;
    let mut power = 0.0f64;
    for _ in 0..opts.iterations {
        let nx = x.lp_norm(2.0);
        if nx == 0.0 {
            break;
        }
        x = x.scale(1.0 / nx);
        let ax = apply(&x)?;
        power = power.max(ax.lp_norm(2.0));
        x = adjoint(&ax)?;
    }
    Ok(NormEstimate {
        value: best.max(power),
        dictionary: best,
        power,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Domain;

    #[test]
    fn parse_ids() {
        let b = Bindings::new();
        assert_eq!(Operator::parse("hilbert", &b).unwrap(), Operator::Hilbert);
        assert!(matches!(
            Operator::parse("haarshift:petermichl", &b).unwrap(),
            Operator::HaarShift { .. }
        ));
        match Operator::parse("ialpha:1/2", &b).unwrap() {
            Operator::FracIntegral(op) => assert_eq!(op.alpha(), 0.5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            Operator::parse("ialphad:0.25", &b).unwrap(),
            Operator::DyadicFracIntegral { alpha, .. } if alpha == 0.25
        ));
        assert!(Operator::parse("riesz", &b).is_err());
        assert!(Operator::parse("ialpha", &b).is_err());
        assert!(Operator::parse("haarshift:foo", &b).is_err());
    }

    #[test]
    fn petermichl_norm_is_one() {
        let dom = Domain::new(vec![0.0], 1.0).unwrap();
        let t = SampledFunction::constant(dom, 8, 0.0).unwrap();
        let op = Operator::parse("haarshift:petermichl", &Bindings::new()).unwrap();
        let est = l2_norm_estimate(|f| op.apply(f), |f| op.apply_adjoint(f), &t, NormOptions::default()).unwrap();
        assert!(est.value <= 1.0 + 1e-12);
        assert!(est.value > 0.99, "{est:?}");
    }

    #[test]
    fn adjoint_pairing() {
        let dom = Domain::new(vec![-2.0], 4.0).unwrap();
        let t = SampledFunction::constant(dom, 7, 0.0).unwrap();
        let dict = test_dictionary(&t, 4, 3).unwrap();
        for id in ["hilbert", "haarshift:petermichl", "ialpha:0.5", "ialphad:0.5"] {
            let op = Operator::parse(id, &Bindings::new()).unwrap();
            let (f, g) = (&dict[1], &dict[3]);
            let lhs = op.apply(f).unwrap().mul(g).unwrap().integral();
            let rhs = f.mul(&op.apply_adjoint(g).unwrap()).unwrap().integral();
            assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()), "{id}: {lhs} vs {rhs}");
        }
    }
}
