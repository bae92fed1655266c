use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{unravel, Pyramid, SampledFunction};

/// Window of tree levels `k` (cube side `side·2^k`, so the domain is level 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelWindow {
    pub min: i32,
    pub max: i32,
}

impl LevelWindow {
    pub fn new(min: i32, max: i32) -> Self {
        LevelWindow { min, max }
    }

    /// Tree depths `d = -k` allowed by the window and by `deepest`.
    pub(crate) fn depths(window: Option<LevelWindow>, deepest: usize) -> std::ops::RangeInclusive<usize> {
        let (lo, hi) = match window {
            Some(w) => ((-w.max).max(0) as usize, (-w.min).max(0) as usize),
            None => (0, deepest),
        };
        lo..=hi.min(deepest)
    }
}

/// A dyadic shift `Σ_Q ⟨f, h_Q⟩ g_Q` with the same shapes on every cube.
///
/// `h_Q = |Q|^{-1/2} h[s]` and `g_Q = |Q|^{-1/2} g[s]` on the `2^{τn}` subcubes `s` of `Q`
/// at relative depth `τ`, listed in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HaarShift {
    dim: usize,
    tau: u32,
    h: Vec<f64>,
    g: Vec<f64>,
}

impl HaarShift {
    pub fn new(dim: usize, tau: u32, h: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if tau == 0 {
            return Err(Error::InvalidShiftRule {
                property: "order",
                detail: "τ must be at least 1".into(),
            });
        }
        let count = 1usize << (tau as usize * dim);
        for (name, shape) in [("h", &h), ("g", &g)] {
            if shape.len() != count {
                return Err(Error::InvalidShiftRule {
                    property: "subcube structure",
                    detail: format!("{name} has {} values, expected {count}", shape.len()),
                });
            }
            if let Some(v) = shape.iter().find(|v| !(v.abs() <= 1.0 + 1e-12)) {
                return Err(Error::InvalidShiftRule {
                    property: "size",
                    detail: format!("{name} takes the value {v}·|Q|^(-1/2)"),
                });
            }
            let sum: f64 = shape.iter().sum();
            if sum.abs() > 1e-12 * count as f64 {
                return Err(Error::InvalidShiftRule {
                    property: "cancellation",
                    detail: format!("{name} has mean {}", sum / count as f64),
                });
            }
        }
        Ok(HaarShift { dim, tau, h, g })
    }

    /// The order-2 shift in one dimension with `h_Q` the Haar function and
    /// `g_Q = 2^{-1/2}(h_{Q_-} - h_{Q_+})`.
    pub fn petermichl() -> Self {
        HaarShift::new(1, 2, vec![1.0, 1.0, -1.0, -1.0], vec![1.0, -1.0, -1.0, 1.0]).expect("valid shapes")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> u32 {
        self.tau
    }

    pub fn adjoint(&self) -> HaarShift {
        HaarShift {
            dim: self.dim,
            tau: self.tau,
            h: self.g.clone(),
            g: self.h.clone(),
        }
    }

    /// Per tree depth `d`, the piecewise-constant contribution of all cubes at depth `d`,
    /// stored at depth `d + τ`.
    fn contributions(&self, f: &SampledFunction, window: Option<LevelWindow>) -> Result<Vec<(usize, Vec<f64>)>> {
        if f.dim() != self.dim {
            return Err(Error::UnsupportedDimension {
                dim: f.dim(),
                what: "this Haar shift",
            });
        }
        let depth = f.resolution() as usize;
        let tau = self.tau as usize;
        if depth < tau {
            return Ok(Vec::new());
        }
        let pyr = Pyramid::new(f);
        let dim = self.dim;
        let subs = 1usize << (tau * dim);
        let side = 1usize << tau;
        let mut out = Vec::new();
        for d in LevelWindow::depths(window, depth - tau) {
            let per = 1usize << d;
            let fine_per = per << tau;
            let fine = pyr.level(d + tau);
            let mut contrib = vec![0.0; fine.len()];
            for pos in 0..per.pow(dim as u32) {
                let ix = unravel(pos, per, dim);
                let sub_index = |s: usize| {
                    let sx = unravel(s, side, dim);
                    (0..dim).fold(0, |acc, i| acc * fine_per + ix[i] * side + sx[i])
                };
                let coef: f64 = (0..subs).map(|s| self.h[s] * fine[sub_index(s)]).sum::<f64>() / subs as f64;
                if coef != 0.0 {
                    for s in 0..subs {
                        contrib[sub_index(s)] = coef * self.g[s];
                    }
                }
            }
            out.push((d, contrib));
        }
        Ok(out)
    }

    /// `Σ_{Q in window} ⟨f, h_Q⟩ g_Q`.
    pub fn apply(&self, f: &SampledFunction, window: Option<LevelWindow>) -> Result<SampledFunction> {
        let parts = self.contributions(f, window)?;
        let depth = f.resolution() as usize;
        let dim = f.dim();
        let mut out = vec![0.0; f.len()];
        for (d, contrib) in &parts {
            let shift = depth - d - self.tau as usize;
            let per = 1usize << (d + self.tau as usize);
            for (cell, o) in out.iter_mut().enumerate() {
                let ix = f.unravel(cell);
                let lin = (0..dim).fold(0, |acc, i| acc * per + (ix[i] >> shift));
                *o += contrib[lin];
            }
        }
        SampledFunction::from_values(f.domain().clone(), f.resolution(), out)
    }

    /// `sup_l |Σ_{|Q| ≥ 2^{nl}} ⟨f, h_Q⟩ g_Q|` over the truncations inside the window.
    pub fn truncated_max(&self, f: &SampledFunction, window: Option<LevelWindow>) -> Result<SampledFunction> {
        let parts = self.contributions(f, window)?;
        let depth = f.resolution() as usize;
        let dim = f.dim();
        let mut running = vec![0.0; f.len()];
        let mut best = vec![0.0f64; f.len()];
        for (d, contrib) in &parts {
            let shift = depth - d - self.tau as usize;
            let per = 1usize << (d + self.tau as usize);
            for cell in 0..f.len() {
                let ix = f.unravel(cell);
                let lin = (0..dim).fold(0, |acc, i| acc * per + (ix[i] >> shift));
                running[cell] += contrib[lin];
                best[cell] = best[cell].max(running[cell].abs());
            }
        }
        SampledFunction::from_values(f.domain().clone(), f.resolution(), best)
    }
}
