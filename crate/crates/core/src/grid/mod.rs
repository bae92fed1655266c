//! Dyadic cube geometry and cell-averaged sampled functions.

mod cellquad;
mod families;

use std::fmt;
use std::io::{Read, Write};
use std::ops::RangeInclusive;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub(crate) use cellquad::tensor_gauss;
pub use cellquad::{corner_moment, power_box_integral, powerlog_box_integral};
pub use families::FunctionId;

/// Largest dimension the experiment presets support.
pub const MAX_DIM: usize = 3;

/// The dilated, translated grid `r·D + r·β`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicGrid {
    dim: usize,
    scale: f64,
    shift: Vec<f64>,
}

impl DyadicGrid {
    pub fn standard(dim: usize) -> Self {
        DyadicGrid {
            dim,
            scale: 1.0,
            shift: vec![0.0; dim],
        }
    }

    pub fn new(dim: usize, scale: f64, shift: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("grid dimension must be positive".into()));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid scale must be positive, got {scale}"
            )));
        }
        if shift.len() != dim || shift.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter(
                "grid shift must be a finite vector of length n".into(),
            ));
        }
        Ok(DyadicGrid { dim, scale, shift })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn cube(&self, level: i32, index: Vec<i64>) -> DyadicCube {
        assert_eq!(index.len(), self.dim, "cube index has wrong length");
        DyadicCube {
            grid: self.clone(),
            level,
            index,
        }
    }

    /// The cube of the given level containing `point`.
    pub fn cube_containing(&self, level: i32, point: &[f64]) -> DyadicCube {
        let side = self.scale * 2f64.powi(level);
        let index = point
            .iter()
            .zip(&self.shift)
            .map(|(x, b)| ((x - self.scale * b) / side).floor() as i64)
            .collect();
        self.cube(level, index)
    }

    /// Every cube of the grid meeting the half-open box `[lo, hi)` with level in `levels`,
    /// finest level first.
    pub fn cubes_touching(&self, lo: &[f64], hi: &[f64], levels: RangeInclusive<i32>) -> Vec<DyadicCube> {
        let mut out = Vec::new();
        for level in levels {
            let side = self.scale * 2f64.powi(level);
            let ranges: Vec<(i64, i64)> = (0..self.dim)
                .map(|i| {
                    let off = self.scale * self.shift[i];
                    let first = ((lo[i] - off) / side).floor() as i64;
                    let last = ((hi[i] - off) / side).ceil() as i64 - 1;
                    (first, last)
                })
                .collect();
            if ranges.iter().any(|(a, b)| a > b) {
                continue;
            }
            let lens: Vec<u64> = ranges.iter().map(|(a, b)| (b - a + 1) as u64).collect();
            let total: u64 = lens.iter().product();
            for mut lin in 0..total {
                let mut idx = vec![0; self.dim];
                for i in (0..self.dim).rev() {
                    idx[i] = ranges[i].0 + (lin % lens[i]) as i64;
                    lin /= lens[i];
                }
                out.push(self.cube(level, idx));
            }
        }
        out
    }
}

/// A cube `r·2^k(m + [0,1)^n) + r·β` of a [`DyadicGrid`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicCube {
    grid: DyadicGrid,
    level: i32,
    index: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relatives {
    pub parent: DyadicCube,
    pub children: Vec<DyadicCube>,
    pub ancestor: DyadicCube,
}

impl DyadicCube {
    pub fn grid(&self) -> &DyadicGrid {
        &self.grid
    }

    pub fn level(&self) -> i32 {
        self.level
    }

    pub fn index(&self) -> &[i64] {
        &self.index
    }

    pub fn side(&self) -> f64 {
        self.grid.scale * 2f64.powi(self.level)
    }

    pub fn volume(&self) -> f64 {
        self.side().powi(self.grid.dim as i32)
    }

    pub fn lower(&self) -> Vec<f64> {
        let s = self.side();
        self.index
            .iter()
            .zip(&self.grid.shift)
            .map(|(&m, b)| s * m as f64 + self.grid.scale * b)
            .collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        let s = self.side();
        self.lower().into_iter().map(|x| x + s).collect()
    }

    pub fn parent(&self) -> DyadicCube {
        self.ancestor(1)
    }

    /// The τ-fold ancestor; `ancestor(0)` is the cube itself.
    pub fn ancestor(&self, tau: u32) -> DyadicCube {
        DyadicCube {
            grid: self.grid.clone(),
            level: self.level + tau as i32,
            index: self.index.iter().map(|m| m.div_euclid(1 << tau)).collect(),
        }
    }

    pub fn children(&self) -> Vec<DyadicCube> {
        let n = self.grid.dim;
        (0..1usize << n)
            .map(|corner| DyadicCube {
                grid: self.grid.clone(),
                level: self.level - 1,
                index: (0..n)
                    .map(|i| 2 * self.index[i] + ((corner >> (n - 1 - i)) & 1) as i64)
                    .collect(),
            })
            .collect()
    }

    pub fn relatives(&self, tau: u32) -> Relatives {
        Relatives {
            parent: self.parent(),
            children: self.children(),
            ancestor: self.ancestor(tau),
        }
    }

    pub fn contains(&self, other: &DyadicCube) -> bool {
        if self.grid != other.grid || other.level > self.level {
            return false;
        }
        let up = other.ancestor((self.level - other.level) as u32);
        up.index == self.index
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        let lo = self.lower();
        let s = self.side();
        lo.iter().zip(x).all(|(l, xi)| *l <= *xi && *xi < l + s)
    }
}

impl fmt::Display for DyadicCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lower();
        let s = self.side();
        let parts: Vec<String> = lo.iter().map(|l| format!("[{l}, {})", l + s)).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// A cube-shaped domain `lo + [0, side)^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domain {
    lo: Vec<f64>,
    side: f64,
}

impl Domain {
    pub fn new(lo: Vec<f64>, side: f64) -> Result<Self> {
        if lo.is_empty() || lo.len() > MAX_DIM {
            return Err(Error::UnsupportedDimension {
                dim: lo.len(),
                what: "sampled functions",
            });
        }
        if !(side > 0.0 && side.is_finite()) || lo.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidDomain(format!("lo {lo:?}, side {side}")));
        }
        Ok(Domain { lo, side })
    }

    /// `[a, b)^n`.
    pub fn symmetric(dim: usize, a: f64, b: f64) -> Result<Self> {
        Domain::new(vec![a; dim], b - a)
    }

    pub fn from_bounds(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::InvalidDomain("bounds of different lengths".into()));
        }
        let side = hi[0] - lo[0];
        for (a, b) in lo.iter().zip(hi) {
            if ((b - a) - side).abs() > 1e-12 * side.abs().max(1.0) {
                return Err(Error::InvalidDomain(format!(
                    "domain must be a cube, got {lo:?}..{hi:?}"
                )));
            }
        }
        Domain::new(lo.to_vec(), side)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> Vec<f64> {
        self.lo.iter().map(|x| x + self.side).collect()
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim() as i32)
    }

    /// The grid whose level-0 cube is this domain; its cubes form the domain's dyadic tree.
    pub fn tree_grid(&self) -> DyadicGrid {
        DyadicGrid {
            dim: self.dim(),
            scale: self.side,
            shift: self.lo.iter().map(|x| x / self.side).collect(),
        }
    }
}

/// A cube of cells: `corner + [0, size)^n` in cell coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CellCube {
    pub corner: [usize; MAX_DIM],
    pub size: usize,
}

impl CellCube {
    pub fn new(corner: [usize; MAX_DIM], size: usize) -> Self {
        CellCube { corner, size }
    }

    pub fn contains_cell(&self, ix: &[usize; MAX_DIM], dim: usize) -> bool {
        (0..dim).all(|i| ix[i] >= self.corner[i] && ix[i] < self.corner[i] + self.size)
    }

    pub fn contains(&self, other: &CellCube, dim: usize) -> bool {
        (0..dim)
            .all(|i| other.corner[i] >= self.corner[i] && other.corner[i] + other.size <= self.corner[i] + self.size)
    }

    pub fn cell_count(&self, dim: usize) -> usize {
        self.size.pow(dim as u32)
    }

    /// Dyadic children (only meaningful when `size` is even).
    pub fn children(&self, dim: usize) -> Vec<CellCube> {
        let h = self.size / 2;
        (0..1usize << dim)
            .map(|c| {
                let mut corner = self.corner;
                for (i, v) in corner.iter_mut().enumerate().take(dim) {
                    *v += h * ((c >> (dim - 1 - i)) & 1);
                }
                CellCube { corner, size: h }
            })
            .collect()
    }

    /// Dyadic parent within a tree whose cells-per-axis is a power of two.
    pub fn parent(&self, dim: usize) -> CellCube {
        let s = self.size * 2;
        let mut corner = self.corner;
        for v in corner.iter_mut().take(dim) {
            *v = (*v / s) * s;
        }
        CellCube { corner, size: s }
    }
}

/// Iterates the linear indices of the cells of a [`CellCube`] in row-major order.
pub struct CellIter {
    dim: usize,
    per_axis: usize,
    cube: CellCube,
    cur: [usize; MAX_DIM],
    done: bool,
}

impl Iterator for CellIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.done {
            return None;
        }
        let mut lin = 0;
        for i in 0..self.dim {
            lin = lin * self.per_axis + self.cur[i];
        }
        let mut axis = self.dim;
        loop {
            if axis == 0 {
                self.done = true;
                break;
            }
            axis -= 1;
            self.cur[axis] += 1;
            if self.cur[axis] < self.cube.corner[axis] + self.cube.size {
                break;
            }
            self.cur[axis] = self.cube.corner[axis];
        }
        Some(lin)
    }
}

/// Cell-averaged samples on a cube domain with `2^L` cells per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    domain: Domain,
    level: u32,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn from_values(domain: Domain, level: u32, values: Vec<f64>) -> Result<Self> {
        let expected = 1usize << (level as usize * domain.dim());
        if values.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "expected {expected} samples for L = {level}, got {}",
                values.len()
            )));
        }
        if let Some((cell, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { cell, value });
        }
        Ok(SampledFunction { domain, level, values })
    }

    pub fn constant(domain: Domain, level: u32, c: f64) -> Result<Self> {
        let len = 1usize << (level as usize * domain.dim());
        Self::from_values(domain, level, vec![c; len])
    }

    /// Samples by cell average computed from the cell's lower and upper corners.
    pub fn from_cell_fn<F>(domain: Domain, level: u32, f: F) -> Result<Self>
    where
        F: Fn(&[f64], &[f64]) -> f64 + Sync,
    {
        let dim = domain.dim();
        let per_axis = 1usize << level;
        let h = domain.side / per_axis as f64;
        let len = per_axis.pow(dim as u32);
        let values: Vec<f64> = (0..len)
            .into_par_iter()
            .map(|idx| {
                let ix = unravel(idx, per_axis, dim);
                let lo: Vec<f64> = (0..dim).map(|i| domain.lo[i] + h * ix[i] as f64).collect();
                let hi: Vec<f64> = lo.iter().map(|x| x + h).collect();
                f(&lo, &hi)
            })
            .collect();
        Self::from_values(domain, level, values)
    }

    /// Cell averages of a smooth pointwise function by a tensor Gauss rule.
    pub fn from_smooth_fn<F>(domain: Domain, level: u32, order: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let rule = crate::quad::GaussRule::new(order);
        let dim = domain.dim();
        Self::from_cell_fn(domain, level, |lo, hi| {
            let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
            cellquad::tensor_gauss(&rule, lo, hi, dim, &f) / vol
        })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn resolution(&self) -> u32 {
        self.level
    }

    pub fn cells_per_axis(&self) -> usize {
        1 << self.level
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell_side(&self) -> f64 {
        self.domain.side / self.cells_per_axis() as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_side().powi(self.dim() as i32)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn unravel(&self, idx: usize) -> [usize; MAX_DIM] {
        unravel(idx, self.cells_per_axis(), self.dim())
    }

    pub fn ravel(&self, ix: &[usize; MAX_DIM]) -> usize {
        let n = self.cells_per_axis();
        (0..self.dim()).fold(0, |acc, i| acc * n + ix[i])
    }

    pub fn cell_center(&self, idx: usize) -> Vec<f64> {
        let ix = self.unravel(idx);
        let h = self.cell_side();
        (0..self.dim())
            .map(|i| self.domain.lo[i] + h * (ix[i] as f64 + 0.5))
            .collect()
    }

    /// The cell containing `x`, if inside the domain.
    pub fn cell_at(&self, x: &[f64]) -> Option<usize> {
        let h = self.cell_side();
        let n = self.cells_per_axis();
        let mut ix = [0; MAX_DIM];
        for i in 0..self.dim() {
            let t = ((x[i] - self.domain.lo[i]) / h).floor();
            if t < 0.0 || t >= n as f64 {
                return None;
            }
            ix[i] = t as usize;
        }
        Some(self.ravel(&ix))
    }

    pub fn value_at(&self, x: &[f64]) -> Option<f64> {
        self.cell_at(x).map(|i| self.values[i])
    }

    /// The whole domain as a cell cube.
    pub fn root(&self) -> CellCube {
        CellCube {
            corner: [0; MAX_DIM],
            size: self.cells_per_axis(),
        }
    }

    pub fn cells(&self, cube: &CellCube) -> CellIter {
        CellIter {
            dim: self.dim(),
            per_axis: self.cells_per_axis(),
            cube: *cube,
            cur: cube.corner,
            done: cube.size == 0,
        }
    }

    /// Converts a grid cube to cell coordinates.
    pub fn cell_cube(&self, q: &DyadicCube) -> Result<CellCube> {
        if q.grid.dim != self.dim() {
            return Err(Error::GridMismatch);
        }
        let h = self.cell_side();
        let size_f = q.side() / h;
        let size = size_f.round();
        if size < 1.0 || (size_f - size).abs() > 1e-9 * size_f.max(1.0) {
            let cell_level = (h / q.grid.scale).log2().round() as i32;
            return Err(Error::CubeFinerThanGrid {
                level: q.level,
                cell_level,
            });
        }
        let lo = q.lower();
        let mut corner = [0; MAX_DIM];
        let n = self.cells_per_axis() as f64;
        for i in 0..self.dim() {
            let t = (lo[i] - self.domain.lo[i]) / h;
            let tr = t.round();
            if (t - tr).abs() > 1e-9 * t.abs().max(1.0) {
                return Err(Error::InvalidParameter(format!("cube {q} is not aligned to the cells")));
            }
            if tr < 0.0 || tr + size > n {
                return Err(Error::CubeOutsideDomain { cube: q.to_string() });
            }
            corner[i] = tr as usize;
        }
        Ok(CellCube {
            corner,
            size: size as usize,
        })
    }

    /// The dyadic-tree cube of the domain corresponding to a cell cube.
    pub fn tree_cube(&self, c: &CellCube) -> DyadicCube {
        let depth = (self.cells_per_axis() / c.size).trailing_zeros() as i32;
        let grid = self.domain.tree_grid();
        let index = (0..self.dim()).map(|i| (c.corner[i] / c.size) as i64).collect();
        DyadicCube {
            grid,
            level: -depth,
            index,
        }
    }

    pub fn cell_cube_volume(&self, c: &CellCube) -> f64 {
        (c.size as f64 * self.cell_side()).powi(self.dim() as i32)
    }

    pub fn sum_cells(&self, c: &CellCube) -> f64 {
        self.cells(c).map(|i| self.values[i]).sum()
    }

    pub fn average_cells(&self, c: &CellCube) -> f64 {
        self.sum_cells(c) / c.cell_count(self.dim()) as f64
    }

    /// `(1/|Q|)∫_Q f`, exact for cubes that are unions of cells.
    pub fn average(&self, q: &DyadicCube) -> Result<f64> {
        let c = self.cell_cube(q)?;
        Ok(self.average_cells(&c))
    }

    pub fn integral(&self) -> f64 {
        self.cell_volume() * self.values.iter().sum::<f64>()
    }

    pub fn integral_over(&self, q: &DyadicCube) -> Result<f64> {
        Ok(self.average(q)? * q.volume())
    }

    pub fn same_grid(&self, other: &SampledFunction) -> bool {
        self.domain == other.domain && self.level == other.level
    }

    pub fn check_same_grid(&self, other: &SampledFunction) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Cellwise map; fails if the result is not finite.
    pub fn map<F: Fn(f64) -> f64 + Sync>(&self, f: F) -> Result<SampledFunction> {
        let values: Vec<f64> = self.values.par_iter().map(|&v| f(v)).collect();
        SampledFunction::from_values(self.domain.clone(), self.level, values)
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64 + Sync>(&self, other: &SampledFunction, f: F) -> Result<SampledFunction> {
        self.check_same_grid(other)?;
        let values: Vec<f64> = self
            .values
            .par_iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        SampledFunction::from_values(self.domain.clone(), self.level, values)
    }

    pub fn scale(&self, c: f64) -> SampledFunction {
        SampledFunction {
            domain: self.domain.clone(),
            level: self.level,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn abs(&self) -> SampledFunction {
        SampledFunction {
            domain: self.domain.clone(),
            level: self.level,
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(∫|f|^p)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        let s: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        (self.cell_volume() * s).powf(1.0 / p)
    }

    /// The same samples on the domain translated by `offset`.
    pub fn translated(&self, offset: &[f64]) -> Result<SampledFunction> {
        let lo = self.domain.lo.iter().zip(offset).map(|(a, b)| a + b).collect();
        Ok(SampledFunction {
            domain: Domain::new(lo, self.domain.side)?,
            level: self.level,
            values: self.values.clone(),
        })
    }

    /// Restriction to a cell cube, as a function on that subdomain.
    pub fn restrict(&self, c: &CellCube) -> Result<SampledFunction> {
        if !c.size.is_power_of_two() {
            return Err(Error::InvalidParameter(
                "restriction cube size must be a power of two".into(),
            ));
        }
        let h = self.cell_side();
        let lo = (0..self.dim())
            .map(|i| self.domain.lo[i] + h * c.corner[i] as f64)
            .collect();
        let domain = Domain::new(lo, h * c.size as f64)?;
        let values = self.cells(c).map(|i| self.values[i]).collect();
        SampledFunction::from_values(domain, c.size.trailing_zeros(), values)
    }

    /// Averages onto `2^level` cells per axis (`level` at most the current resolution).
    pub fn coarsen(&self, level: u32) -> Result<SampledFunction> {
        if level > self.level {
            return Err(Error::InvalidParameter(format!(
                "cannot coarsen L = {} to {level}",
                self.level
            )));
        }
        let pyr = Pyramid::new(self);
        SampledFunction::from_values(self.domain.clone(), level, pyr.level(level as usize).to_vec())
    }

    /// Piecewise-constant refinement to `2^level` cells per axis.
    pub fn refine(&self, level: u32) -> Result<SampledFunction> {
        if level < self.level {
            return Err(Error::InvalidParameter(format!(
                "cannot refine L = {} to {level}",
                self.level
            )));
        }
        let shift = level - self.level;
        let dim = self.dim();
        let per = 1usize << level;
        let values = (0..per.pow(dim as u32))
            .map(|idx| {
                let mut ix = unravel(idx, per, dim);
                for v in ix.iter_mut().take(dim) {
                    *v >>= shift;
                }
                self.values[self.ravel(&ix)]
            })
            .collect();
        SampledFunction::from_values(self.domain.clone(), level, values)
    }

    /// CSV: a metadata row `n,L,lo...,hi...` followed by one value per row in row-major order.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new()
            .flexible(true)
            .has_headers(false)
            .from_writer(w);
        let mut head = vec![self.dim().to_string(), self.level.to_string()];
        head.extend(self.domain.lo.iter().map(|x| format!("{x:e}")));
        head.extend(self.domain.hi().iter().map(|x| format!("{x:e}")));
        wr.write_record(&head)?;
        for v in &self.values {
            wr.write_record([format!("{v:e}")])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<SampledFunction> {
        let mut rd = csv::ReaderBuilder::new()
            .flexible(true)
            .has_headers(false)
            .from_reader(r);
        let mut records = rd.records();
        let head = records.next().ok_or_else(|| Error::Parse("empty CSV".into()))??;
        let fields: Vec<&str> = head.iter().map(str::trim).collect();
        let dim: usize = fields
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad dimension in CSV header".into()))?;
        let level: u32 = fields
            .get(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad resolution in CSV header".into()))?;
        if fields.len() != 2 + 2 * dim {
            return Err(Error::Parse(format!("CSV header needs {} fields", 2 + 2 * dim)));
        }
        let nums: Vec<f64> = fields[2..]
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad bound `{s}`"))))
            .collect::<Result<_>>()?;
        let domain = Domain::from_bounds(&nums[..dim], &nums[dim..])?;
        let mut values = Vec::new();
        for rec in records {
            let rec = rec?;
            let s = rec.get(0).unwrap_or("").trim();
            values.push(
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad sample `{s}`")))?,
            );
        }
        SampledFunction::from_values(domain, level, values)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn load_csv(path: &Path) -> Result<SampledFunction> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

pub(crate) fn unravel(mut idx: usize, per_axis: usize, dim: usize) -> [usize; MAX_DIM] {
    let mut ix = [0; MAX_DIM];
    for i in (0..dim).rev() {
        ix[i] = idx % per_axis;
        idx /= per_axis;
    }
    ix
}

/// Averages of a function over every cube of its domain's dyadic tree.
#[derive(Debug, Clone)]
pub struct Pyramid {
    dim: usize,
    levels: Vec<Vec<f64>>,
}

impl Pyramid {
    pub fn new(f: &SampledFunction) -> Self {
        Self::from_values(f.values(), f.dim(), f.resolution() as usize)
    }

    pub fn from_values(values: &[f64], dim: usize, depth: usize) -> Self {
        let mut levels = vec![Vec::new(); depth + 1];
        levels[depth] = values.to_vec();
        let kids = 1usize << dim;
        for d in (0..depth).rev() {
            let per = 1usize << d;
            let fine = &levels[d + 1];
            let coarse: Vec<f64> = (0..per.pow(dim as u32))
                .map(|idx| {
                    let ix = unravel(idx, per, dim);
                    let mut s = 0.0;
                    for c in 0..kids {
                        let mut lin = 0;
                        for i in 0..dim {
                            lin = lin * (2 * per) + 2 * ix[i] + ((c >> (dim - 1 - i)) & 1);
                        }
                        s += fine[lin];
                    }
                    s / kids as f64
                })
                .collect();
            levels[d] = coarse;
        }
        Pyramid { dim, levels }
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Averages at tree depth `d` (the domain is depth 0), row-major.
    pub fn level(&self, d: usize) -> &[f64] {
        &self.levels[d]
    }

    pub fn average(&self, c: &CellCube) -> f64 {
        let d = self.depth() - c.size.trailing_zeros() as usize;
        let per = 1usize << d;
        let lin = (0..self.dim).fold(0, |acc, i| acc * per + c.corner[i] / c.size);
        self.levels[d][lin]
    }

    /// The tree cube at depth `d` with row-major position `pos`.
    pub fn node(&self, d: usize, pos: usize) -> CellCube {
        let per = 1usize << d;
        let size = 1usize << (self.depth() - d);
        let ix = unravel(pos, per, self.dim);
        let mut corner = [0; MAX_DIM];
        for i in 0..self.dim {
            corner[i] = ix[i] * size;
        }
        CellCube { corner, size }
    }
}

/// Inclusion-exclusion cube sums for lattice-translated cubes.
#[derive(Debug, Clone)]
pub struct PrefixSums {
    dim: usize,
    per_axis: usize,
    data: Vec<f64>,
}

impl PrefixSums {
    pub fn new(f: &SampledFunction) -> Self {
        Self::from_values(f.values(), f.dim(), f.cells_per_axis())
    }

    pub fn from_values(values: &[f64], dim: usize, per_axis: usize) -> Self {
        let m = per_axis + 1;
        let mut data = vec![0.0; m.pow(dim as u32)];
        for (idx, v) in values.iter().enumerate() {
            let ix = unravel(idx, per_axis, dim);
            let lin = (0..dim).fold(0, |acc, i| acc * m + ix[i] + 1);
            data[lin] = *v;
        }
        let mut stride = 1;
        for _ in 0..dim {
            for lin in 0..data.len() {
                if (lin / stride) % m != 0 {
                    data[lin] += data[lin - stride];
                }
            }
            stride *= m;
        }
        PrefixSums { dim, per_axis, data }
    }

    pub fn sum(&self, c: &CellCube) -> f64 {
        let m = self.per_axis + 1;
        let mut total = 0.0;
        for corner in 0..1usize << self.dim {
            let mut lin = 0;
            let mut sign = 1.0;
            for i in 0..self.dim {
                let upper = (corner >> (self.dim - 1 - i)) & 1 == 1;
                let coord = if upper {
                    c.corner[i] + c.size
                } else {
                    sign = -sign;
                    c.corner[i]
                };
                lin = lin * m + coord;
            }
            total += sign * self.data[lin];
        }
        total
    }

    pub fn average(&self, c: &CellCube) -> f64 {
        self.sum(c) / c.cell_count(self.dim) as f64
    }
}
