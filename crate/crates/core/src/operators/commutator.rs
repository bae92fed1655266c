use std::f64::consts::PI;

use num_complex::Complex64;

use super::Operator;
use crate::error::{Error, Result};
use crate::grid::SampledFunction;

/// Largest `ε·max|b|` accepted by the contour form before `exp` leaves the safe range.
pub const CONTOUR_EXP_LIMIT: f64 = 700.0;

/// `[b,T]` for a sampled symbol `b`.
#[derive(Debug, Clone)]
pub struct CommutatorSpec {
    pub symbol: SampledFunction,
    pub operator: Operator,
}

impl CommutatorSpec {
    pub fn new(symbol: SampledFunction, operator: Operator) -> Self {
        CommutatorSpec { symbol, operator }
    }

    // [b,T] = [b - c, T]; centering at the midrange makes a constant symbol vanish identically.
    fn centered(&self) -> Result<SampledFunction> {
        let v = self.symbol.values();
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let c = 0.5 * (lo + hi);
        self.symbol.map(|x| x - c)
    }

    /// `b·Tf - T(bf)`.
    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        self.symbol.check_same_grid(f)?;
        let b = self.centered()?;
        let bf = b.mul(f)?;
        let (tf, tbf) = rayon::join(|| self.operator.apply(f), || self.operator.apply(&bf));
        b.mul(&tf?)?.sub(&tbf?)
    }

    /// `[b,T]* = T*(b·) - b·T*`.
    pub fn apply_adjoint(&self, f: &SampledFunction) -> Result<SampledFunction> {
        self.symbol.check_same_grid(f)?;
        let b = self.centered()?;
        let bf = b.mul(f)?;
        let (tf, tbf) = rayon::join(|| self.operator.apply_adjoint(f), || self.operator.apply_adjoint(&bf));
        tbf?.sub(&b.mul(&tf?)?)
    }

    /// Trapezoidal rule with `m` nodes on `|ζ| = ε` for `(1/2πi)∮ e^{ζb} T(e^{-ζb} f) ζ^{-2} dζ`.
    pub fn apply_cauchy(&self, f: &SampledFunction, epsilon: f64, m: usize) -> Result<SampledFunction> {
        self.symbol.check_same_grid(f)?;
        if !(epsilon > 0.0) || m < 8 {
            return Err(Error::InvalidParameter(format!(
                "need ε > 0 and at least 8 nodes, got ε = {epsilon}, M = {m}"
            )));
        }
        let b = self.centered()?;
        let reach = epsilon * b.max_abs();
        if !(reach <= CONTOUR_EXP_LIMIT) {
            return Err(Error::ContourOverflow(reach));
        }
        let bv = b.values();
        let fv = f.values();
        let mut acc = vec![0.0; f.len()];
        for k in 0..m {
            let zeta = Complex64::from_polar(epsilon, 2.0 * PI * (k as f64 + 0.5) / m as f64);
            let g: Vec<Complex64> = bv.iter().zip(fv).map(|(&bi, &fi)| (-zeta * bi).exp() * fi).collect();
            let re =
                SampledFunction::from_values(f.domain().clone(), f.resolution(), g.iter().map(|z| z.re).collect())?;
            let im =
                SampledFunction::from_values(f.domain().clone(), f.resolution(), g.iter().map(|z| z.im).collect())?;
            let (tr, ti) = rayon::join(|| self.operator.apply(&re), || self.operator.apply(&im));
            let (tr, ti) = (tr?, ti?);
            for (i, a) in acc.iter_mut().enumerate() {
                let t = Complex64::new(tr.values()[i], ti.values()[i]);
                *a += ((zeta * bv[i]).exp() * t / zeta).re;
            }
        }
        SampledFunction::from_values(
            f.domain().clone(),
            f.resolution(),
            acc.into_iter().map(|v| v / m as f64).collect(),
        )
    }
}

/// `2^{-(n+2)} / (r'‖b‖_BMO)` with `r' = 2`.
pub fn default_epsilon(bmo: f64, dim: usize) -> f64 {
    0.5f64.powi(dim as i32 + 2) / (2.0 * bmo)
}
