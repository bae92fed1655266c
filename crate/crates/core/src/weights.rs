//! Weight constants, BMO norms and factored weight pairs over finite cube families.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::conjugate;
use crate::grid::{CellCube, SampledFunction, MAX_DIM};
use crate::orlicz::{luxemburg_values, orlicz_maximal, Flavor, YoungFunction};

/// The finite set of cubes over which every `sup_Q` is taken.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CubeFamily {
    /// Cubes of the domain's dyadic tree, optionally restricted to a depth range.
    Dyadic {
        depths: Option<(usize, usize)>,
    },
    /// Dyadic sizes at every position that is a multiple of half the side.
    Shifted {
        depths: Option<(usize, usize)>,
    },
    Explicit(Vec<CellCube>),
}

impl Default for CubeFamily {
    fn default() -> Self {
        CubeFamily::dyadic()
    }
}

impl CubeFamily {
    pub fn dyadic() -> Self {
        CubeFamily::Dyadic { depths: None }
    }

    pub fn shifted() -> Self {
        CubeFamily::Shifted { depths: None }
    }

    /// Cubes centered at the domain center with sides `side·2^{-j}`, `j = 0..L`.
    pub fn centered(f: &SampledFunction) -> Self {
        let n = f.cells_per_axis();
        let mut cubes = Vec::new();
        let mut size = n;
        while size >= 2 {
            let c = n / 2 - size / 2;
            cubes.push(CellCube::new([c; MAX_DIM], size));
            size /= 2;
        }
        CubeFamily::Explicit(cubes)
    }

    pub fn cubes(&self, f: &SampledFunction) -> Result<Vec<CellCube>> {
        let dim = f.dim();
        let depth = f.resolution() as usize;
        let n = f.cells_per_axis();
        let range = |depths: &Option<(usize, usize)>| {
            let (lo, hi) = depths.unwrap_or((0, depth));
            lo..=hi.min(depth)
        };
        let mut out = Vec::new();
        match self {
            CubeFamily::Dyadic { depths } => {
                for d in range(depths) {
                    let size = n >> d;
                    lattice(dim, n, size, size, &mut out);
                }
            }
            CubeFamily::Shifted { depths } => {
                for d in range(depths) {
                    let size = n >> d;
                    lattice(dim, n, size, (size / 2).max(1), &mut out);
                }
            }
            CubeFamily::Explicit(cubes) => {
                for c in cubes {
                    if c.size == 0 || (0..dim).any(|i| c.corner[i] + c.size > n) {
                        return Err(Error::CubeOutsideDomain { cube: format!("{c:?}") });
                    }
                }
                out.extend_from_slice(cubes);
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidParameter("empty cube family".into()));
        }
        Ok(out)
    }
}

fn lattice(dim: usize, n: usize, size: usize, stride: usize, out: &mut Vec<CellCube>) {
    let steps = (n - size) / stride + 1;
    for lin in 0..steps.pow(dim as u32) {
        let ix = crate::grid::unravel(lin, steps, dim);
        let mut corner = [0; MAX_DIM];
        for i in 0..dim {
            corner[i] = ix[i] * stride;
        }
        out.push(CellCube::new(corner, size));
    }
}

/// A cube in domain coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubeBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl CubeBounds {
    pub fn of(f: &SampledFunction, c: &CellCube) -> Self {
        let h = f.cell_side();
        let lo = f.domain().lo();
        let lower: Vec<f64> = (0..f.dim()).map(|i| lo[i] + h * c.corner[i] as f64).collect();
        let upper = lower.iter().map(|x| x + h * c.size as f64).collect();
        CubeBounds { lower, upper }
    }
}

/// A finite-family supremum together with the cube attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubeConstant {
    pub constant: f64,
    pub argmax_cube: Option<CubeBounds>,
    #[serde(skip)]
    pub argmax_cells: Option<CellCube>,
    pub resolution: u32,
}

fn values_on(f: &SampledFunction, c: &CellCube) -> Vec<f64> {
    f.cells(c).map(|i| f.values()[i]).collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Every term of a per-cube quantity over the family, in family order.
pub fn per_cube<F>(f: &SampledFunction, family: &CubeFamily, term: F) -> Result<Vec<(CellCube, f64)>>
where
    F: Fn(&CellCube) -> Result<f64> + Sync,
{
    let cubes = family.cubes(f)?;
    cubes.into_par_iter().map(|c| Ok((c, term(&c)?))).collect()
}

fn supremum<F>(f: &SampledFunction, family: &CubeFamily, term: F) -> Result<CubeConstant>
where
    F: Fn(&CellCube) -> Result<f64> + Sync,
{
    Ok(best_term(f, per_cube(f, family, term)?))
}

fn best_term(f: &SampledFunction, terms: Vec<(CellCube, f64)>) -> CubeConstant {
    let mut best: Option<(CellCube, f64)> = None;
    for (c, v) in terms {
        if best.map_or(true, |(_, b)| v > b) {
            best = Some((c, v));
        }
    }
    let (c, v) = best.expect("families are non-empty");
    CubeConstant {
        constant: v,
        argmax_cube: Some(CubeBounds::of(f, &c)),
        argmax_cells: Some(c),
        resolution: f.resolution(),
    }
}

fn check_positive(w: &SampledFunction) -> Result<()> {
    match w.values().iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        Some((cell, &value)) => Err(Error::NonPositiveWeight { cell, value }),
        None => Ok(()),
    }
}

/// `sup_Q ⨍_Q |b - a_b(Q)|`.
pub fn bmo_norm(b: &SampledFunction, family: &CubeFamily) -> Result<CubeConstant> {
    supremum(b, family, |c| {
        let v = values_on(b, c);
        let a = mean(&v);
        Ok(v.iter().map(|x| (x - a).abs()).sum::<f64>() / v.len() as f64)
    })
}

/// `sup_Q (⨍_Q w)(⨍_Q w^{1-p'})^{p-1}`.
pub fn ap_constant(w: &SampledFunction, p: f64, family: &CubeFamily) -> Result<CubeConstant> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("p must exceed 1, got {p}")));
    }
    check_positive(w)?;
    let e = 1.0 - conjugate(p);
    let dual = w.map(|x| x.powf(e))?;
    two_average_sup(w, &dual, p - 1.0, family)
}

/// `sup_Q (⨍_Q w^q)(⨍_Q w^{-p'})^{q/p'}`, with the powers taken cellwise.
pub fn apq_constant(w: &SampledFunction, p: f64, q: f64, family: &CubeFamily) -> Result<CubeConstant> {
    check_exponents(p, q)?;
    check_positive(w)?;
    let pp = conjugate(p);
    let wq = w.map(|x| x.powf(q))?;
    let wneg = w.map(|x| x.powf(-pp))?;
    two_average_sup(&wq, &wneg, q / pp, family)
}

/// The `A_{p,q}` constant from separately sampled `w^q` and `w^{-p'}`, so that both
/// averages are exact for weights whose powers have closed-form cell averages.
pub fn apq_constant_from_moments(
    wq: &SampledFunction,
    wneg: &SampledFunction,
    p: f64,
    q: f64,
    family: &CubeFamily,
) -> Result<CubeConstant> {
    check_exponents(p, q)?;
    check_positive(wq)?;
    check_positive(wneg)?;
    two_average_sup(wq, wneg, q / conjugate(p), family)
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p > 1.0 && q > 1.0 && p.is_finite() && q.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need 1 < p, q < ∞, got p = {p}, q = {q}"
        )));
    }
    Ok(())
}

fn two_average_sup(a: &SampledFunction, b: &SampledFunction, e: f64, family: &CubeFamily) -> Result<CubeConstant> {
    a.check_same_grid(b)?;
    supremum(a, family, |c| Ok(a.average_cells(c) * b.average_cells(c).powf(e)))
}

/// `(u, v)` with exponents `p, q` and fractional order `α`.
#[derive(Debug, Clone)]
pub struct WeightPair {
    pub u: SampledFunction,
    pub v: SampledFunction,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
}

impl WeightPair {
    pub fn new(u: SampledFunction, v: SampledFunction, p: f64, q: f64, alpha: f64) -> Result<Self> {
        u.check_same_grid(&v)?;
        check_exponents(p, q)?;
        if !(0.0..u.dim() as f64).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "α must lie in [0, {}), got {alpha}",
                u.dim()
            )));
        }
        if let Some((cell, &value)) = u.values().iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
            return Err(Error::NonPositiveWeight { cell, value });
        }
        if u.max_abs() == 0.0 {
            return Err(Error::InvalidParameter("u vanishes identically".into()));
        }
        check_positive(&v)?;
        Ok(WeightPair { u, v, p, q, alpha })
    }

    pub fn scaled(&self, s: f64, t: f64) -> Result<Self> {
        WeightPair::new(self.u.scale(s), self.v.scale(t), self.p, self.q, self.alpha)
    }
}

/// Per-cube terms `|Q|^{α/n+1/q-1/p} ‖u^{1/p}‖_{A,Q} ‖v^{-1/p}‖_{B,Q}`.
pub fn bump_terms(
    pair: &WeightPair,
    a: &YoungFunction,
    b: &YoungFunction,
    family: &CubeFamily,
) -> Result<Vec<(CellCube, f64)>> {
    let (uf, vf) = bump_factors(pair)?;
    let f = &pair.u;
    let e = pair.alpha / f.dim() as f64 + 1.0 / pair.q - 1.0 / pair.p;
    per_cube(f, family, |c| {
        let scale = if e == 0.0 { 1.0 } else { f.cell_cube_volume(c).powf(e) };
        Ok(scale * luxemburg_values(&values_on(&uf, c), a)? * luxemburg_values(&values_on(&vf, c), b)?)
    })
}

fn bump_factors(pair: &WeightPair) -> Result<(SampledFunction, SampledFunction)> {
    let p = pair.p;
    Ok((pair.u.map(|x| x.powf(1.0 / p))?, pair.v.map(|x| x.powf(-1.0 / p))?))
}

/// `sup_Q |Q|^{α/n+1/q-1/p} ‖u^{1/p}‖_{A,Q} ‖v^{-1/p}‖_{B,Q}`.
pub fn bump_constant(
    pair: &WeightPair,
    a: &YoungFunction,
    b: &YoungFunction,
    family: &CubeFamily,
) -> Result<CubeConstant> {
    let terms = bump_terms(pair, a, b, family)?;
    Ok(best_term(&pair.u, terms))
}

/// `(w1 (M_{Ψ,α} w2)^{1-p}, (M_{Φ,α} w1) w2^{1-p})` with `q = p`.
pub fn factored_pair(
    w1: &SampledFunction,
    w2: &SampledFunction,
    phi: &YoungFunction,
    psi: &YoungFunction,
    p: f64,
    alpha: f64,
    flavor: Flavor,
) -> Result<WeightPair> {
    w1.check_same_grid(w2)?;
    for w in [w1, w2] {
        if let Some((cell, &value)) = w.values().iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
            return Err(Error::NonPositiveWeight { cell, value });
        }
    }
    let m2 = orlicz_maximal(w2, psi, alpha, flavor)?;
    let m1 = orlicz_maximal(w1, phi, alpha, flavor)?;
    let mut u = Vec::with_capacity(w1.len());
    let mut v = Vec::with_capacity(w1.len());
    for i in 0..w1.len() {
        let (a, m) = (w1.values()[i], m2.values()[i]);
        if a > 0.0 && m == 0.0 {
            return Err(Error::DegenerateMaximal { cell: i });
        }
        u.push(if a == 0.0 { 0.0 } else { a * m.powf(1.0 - p) });
        let w = w2.values()[i];
        if w == 0.0 {
            return Err(Error::DegenerateMaximal { cell: i });
        }
        v.push(m1.values()[i] * w.powf(1.0 - p));
    }
    let dom = w1.domain().clone();
    let level = w1.resolution();
    WeightPair::new(
        SampledFunction::from_values(dom.clone(), level, u)?,
        SampledFunction::from_values(dom, level, v)?,
        p,
        p,
        alpha,
    )
}

/// `sup_Q ‖b - a_b(Q)‖_{exp L,Q} / ‖b‖_BMO`, defined as 0 for constant `b`.
pub fn expl_bmo_check(b: &SampledFunction, family: &CubeFamily) -> Result<CubeConstant> {
    let bmo = bmo_norm(b, family)?.constant;
    if bmo == 0.0 {
        return Ok(CubeConstant {
            constant: 0.0,
            argmax_cube: None,
            argmax_cells: None,
            resolution: b.resolution(),
        });
    }
    let expl = YoungFunction::ExpL;
    supremum(b, family, |c| {
        let v = values_on(b, c);
        let a = mean(&v);
        let centered: Vec<f64> = v.iter().map(|x| x - a).collect();
        Ok(luxemburg_values(&centered, &expl)? / bmo)
    })
}
