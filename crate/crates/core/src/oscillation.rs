//! Medians, rearrangements, local mean oscillation, Calderón–Zygmund cubes and Lerner's
//! decomposition on cell grids.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{CellCube, SampledFunction};

fn values_on(f: &SampledFunction, c: &CellCube) -> Vec<f64> {
    f.cells(c).map(|i| f.values()[i]).collect()
}

fn sort(v: &mut [f64]) {
    v.sort_by(|a, b| a.total_cmp(b));
}

/// The lowest admissible median of equally weighted samples.
pub fn median_of(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("median of an empty set".into()));
    }
    let mut v = values.to_vec();
    sort(&mut v);
    Ok(v[(v.len() + 1) / 2 - 1])
}

pub fn median(f: &SampledFunction, c: &CellCube) -> Result<f64> {
    check_cube(f, c)?;
    median_of(&values_on(f, c))
}

fn check_cube(f: &SampledFunction, c: &CellCube) -> Result<()> {
    let n = f.cells_per_axis();
    if c.size == 0 || (0..f.dim()).any(|i| c.corner[i] + c.size > n) {
        return Err(Error::CubeOutsideDomain { cube: format!("{c:?}") });
    }
    Ok(())
}

// (|v|)^*(t) for samples of mass `cell` each.
fn rearrangement_of(values: &[f64], cell: f64, t: f64) -> f64 {
    let mut a: Vec<f64> = values.iter().map(|x| x.abs()).collect();
    sort(&mut a);
    a.reverse();
    let k = ((t / cell) * (1.0 + 1e-12)).floor() as usize;
    a[k.min(a.len() - 1)]
}

/// `(|f|χ_Q)^*(t)` for `0 < t < |Q|`.
pub fn rearrangement_value(f: &SampledFunction, c: &CellCube, t: f64) -> Result<f64> {
    check_cube(f, c)?;
    let vol = f.cell_cube_volume(c);
    if !(t > 0.0 && t < vol) {
        return Err(Error::InvalidParameter(format!("t = {t} must lie in (0, {vol})")));
    }
    Ok(rearrangement_of(&values_on(f, c), f.cell_volume(), t))
}

// Half the shortest range of sorted values covering all but floor(λN) samples.
fn oscillation_of(values: &[f64], lambda: f64) -> f64 {
    let mut v = values.to_vec();
    sort(&mut v);
    let n = v.len();
    let drop = ((lambda * n as f64) * (1.0 + 1e-12)).floor() as usize;
    let keep = n - drop.min(n - 1);
    (0..=n - keep)
        .map(|i| v[i + keep - 1] - v[i])
        .fold(f64::INFINITY, f64::min)
        * 0.5
}

/// `ω_λ(f, Q) = inf_c ((f - c)χ_Q)^*(λ|Q|)`.
pub fn local_oscillation(f: &SampledFunction, c: &CellCube, lambda: f64) -> Result<f64> {
    check_cube(f, c)?;
    check_lambda(lambda)?;
    Ok(oscillation_of(&values_on(f, c), lambda))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!("λ must lie in (0, 1), got {lambda}")));
    }
    Ok(())
}

fn check_root(f: &SampledFunction, root: &CellCube) -> Result<()> {
    check_cube(f, root)?;
    let aligned = root.size.is_power_of_two() && (0..f.dim()).all(|i| root.corner[i] % root.size == 0);
    if !aligned {
        return Err(Error::InvalidParameter(format!(
            "{root:?} is not a cube of the dyadic tree"
        )));
    }
    Ok(())
}

/// Dyadic subcubes of `root` by depth, each level in row-major order.
fn subcube_levels(root: &CellCube, dim: usize) -> Vec<Vec<CellCube>> {
    let mut levels = vec![vec![*root]];
    while levels.last().unwrap()[0].size > 1 {
        let next = levels.last().unwrap().iter().flat_map(|c| c.children(dim)).collect();
        levels.push(next);
    }
    levels
}

/// `M^{♯,d}_{λ,Q} f(x) = max ω_λ(f, Q')` over dyadic `Q' ⊆ Q` containing `x`; zero outside `Q`.
pub fn local_sharp_max(f: &SampledFunction, root: &CellCube, lambda: f64) -> Result<SampledFunction> {
    check_root(f, root)?;
    check_lambda(lambda)?;
    let mut out = vec![0.0f64; f.len()];
    for level in subcube_levels(root, f.dim()) {
        let omegas: Vec<f64> = level
            .par_iter()
            .map(|c| oscillation_of(&values_on(f, c), lambda))
            .collect();
        for (c, w) in level.iter().zip(omegas) {
            for i in f.cells(c) {
                out[i] = out[i].max(w);
            }
        }
    }
    SampledFunction::from_values(f.domain().clone(), f.resolution(), out)
}

/// `M^d f(x) = max ⨍_{Q'} |f|` over dyadic `Q' ⊆ Q` containing `x`; zero outside `Q`.
pub fn dyadic_maximal_in(f: &SampledFunction, root: &CellCube) -> Result<SampledFunction> {
    check_root(f, root)?;
    let abs = f.abs();
    let mut out = vec![0.0f64; f.len()];
    for level in subcube_levels(root, f.dim()) {
        for c in &level {
            let a = abs.average_cells(c);
            for i in f.cells(c) {
                out[i] = out[i].max(a);
            }
        }
    }
    SampledFunction::from_values(f.domain().clone(), f.resolution(), out)
}

/// Maximal dyadic subcubes of a root whose averages exceed a height.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CzCubes {
    pub height: f64,
    pub cubes: Vec<CellCube>,
    pub averages: Vec<f64>,
    /// The root average already exceeds the height; `cubes` is then `[root]`.
    pub root_selected: bool,
}

/// Calderón–Zygmund cubes of `f ≥ 0` at height `h` inside `root`.
pub fn cz_cubes(f: &SampledFunction, h: f64, root: &CellCube) -> Result<CzCubes> {
    check_root(f, root)?;
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("height must be positive, got {h}")));
    }
    if let Some((cell, &value)) = f.values().iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "f must be nonnegative; cell {cell} holds {value}"
        )));
    }
    let dim = f.dim();
    let mut out = CzCubes {
        height: h,
        cubes: Vec::new(),
        averages: Vec::new(),
        root_selected: false,
    };
    let a = f.average_cells(root);
    if a > h {
        out.root_selected = true;
        out.cubes.push(*root);
        out.averages.push(a);
        return Ok(out);
    }
    let mut stack: Vec<CellCube> = if root.size > 1 { root.children(dim) } else { Vec::new() };
    stack.reverse();
    while let Some(c) = stack.pop() {
        let a = f.average_cells(&c);
        if a > h {
            out.cubes.push(c);
            out.averages.push(a);
        } else if c.size > 1 {
            let mut kids = c.children(dim);
            kids.reverse();
            stack.extend(kids);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeMode {
    /// Calderón–Zygmund cubes at heights `base^k`.
    Cz {
        base: f64,
        first_exponent: i32,
    },
    Lerner,
}

/// One selected cube `Q_j^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StoppingCube {
    pub cube: CellCube,
    /// Index of the containing cube at the previous level (`None` at the first level).
    pub parent: Option<usize>,
    /// The cube's median (Lerner) or average (CZ).
    pub value: f64,
}

/// Nested disjoint families `{Q_j^k}`, `k = 1, 2, ...`, inside a root cube.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionTree {
    pub root: CellCube,
    pub root_value: f64,
    pub mode: TreeMode,
    pub levels: Vec<Vec<StoppingCube>>,
    /// `max |f - m_f(Q)| / (M^♯_{1/4} f + Σ ω_{2^{-n-2}}(f, Q̂_j^k) χ_{Q_j^k})`, with `0/0 = 0`.
    pub c_hat: Option<f64>,
}

/// Results of checking the structural invariants cell by cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub nested: bool,
    pub disjoint_levels: bool,
    pub half_overlap: bool,
    pub e_disjoint: bool,
    pub e_large: bool,
}

impl InvariantReport {
    pub fn all(&self) -> bool {
        self.nested && self.disjoint_levels && self.half_overlap && self.e_disjoint && self.e_large
    }
}

impl DecompositionTree {
    pub fn cube_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    fn mask(&self, f: &SampledFunction, k: usize) -> Vec<bool> {
        let mut m = vec![false; f.len()];
        if let Some(level) = self.levels.get(k) {
            for s in level {
                for i in f.cells(&s.cube) {
                    m[i] = true;
                }
            }
        }
        m
    }

    /// Cells of `Ω_{k+1}` (`k` counted from zero).
    pub fn omega(&self, f: &SampledFunction, k: usize) -> Vec<usize> {
        self.mask(f, k)
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| i)
            .collect()
    }

    /// Checks `Ω_{k+1} ⊆ Ω_k`, disjointness within levels, `|Ω_{k+1} ∩ Q_j^k| ≤ |Q_j^k|/2`,
    /// disjointness of the `E_j^k` and `|Q_j^k| ≤ 2|E_j^k|`.
    pub fn check(&self, f: &SampledFunction) -> InvariantReport {
        let dim = f.dim();
        let mut rep = InvariantReport {
            nested: true,
            disjoint_levels: true,
            half_overlap: true,
            e_disjoint: true,
            e_large: true,
        };
        let mut e_owner: HashSet<usize> = HashSet::new();
        for k in 0..self.levels.len() {
            let mut seen = vec![false; f.len()];
            for s in &self.levels[k] {
                for i in f.cells(&s.cube) {
                    if seen[i] {
                        rep.disjoint_levels = false;
                    }
                    seen[i] = true;
                }
            }
            let next = self.mask(f, k + 1);
            if next.iter().zip(&seen).any(|(n, s)| *n && !*s) {
                rep.nested = false;
            }
            for s in &self.levels[k] {
                let total = s.cube.cell_count(dim);
                let inside = f.cells(&s.cube).filter(|&i| next[i]).count();
                if self.mode == TreeMode::Lerner && 2 * inside > total {
                    rep.half_overlap = false;
                }
                let e: Vec<usize> = f.cells(&s.cube).filter(|&i| !next[i]).collect();
                if total > 2 * e.len() {
                    rep.e_large = false;
                }
                for i in e {
                    if !e_owner.insert(i) {
                        rep.e_disjoint = false;
                    }
                }
            }
        }
        rep
    }

    /// JSON records `{level, index, median|average, children}` nested from the root.
    pub fn nested_json(&self) -> serde_json::Value {
        let key = match self.mode {
            TreeMode::Lerner => "median",
            TreeMode::Cz { .. } => "average",
        };
        fn node(tree: &DecompositionTree, key: &str, level: usize, index: usize) -> serde_json::Value {
            let s = &tree.levels[level - 1][index];
            let children: Vec<serde_json::Value> = tree
                .levels
                .get(level)
                .map(|next| {
                    next.iter()
                        .enumerate()
                        .filter(|(_, c)| c.parent == Some(index))
                        .map(|(j, _)| node(tree, key, level + 1, j))
                        .collect()
                })
                .unwrap_or_default();
            serde_json::json!({
                "level": level,
                "index": index,
                "corner": &s.cube.corner[..],
                "size": s.cube.size,
                key: s.value,
                "children": children,
            })
        }
        let top: Vec<serde_json::Value> = self
            .levels
            .first()
            .map(|l| (0..l.len()).map(|j| node(self, key, 1, j)).collect())
            .unwrap_or_default();
        serde_json::json!({
            "level": 0,
            "index": 0,
            "corner": &self.root.corner[..],
            "size": self.root.size,
            key: self.root_value,
            "children": top,
            "c_hat": self.c_hat,
        })
    }
}

/// CZ cubes at heights `base^k` for `k = first..`, stopping at the first empty level.
pub fn cz_tree(f: &SampledFunction, root: &CellCube, base: f64, first: i32) -> Result<DecompositionTree> {
    if !(base > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "height base must exceed 1, got {base}"
        )));
    }
    let mut levels: Vec<Vec<StoppingCube>> = Vec::new();
    let mut k = first;
    loop {
        let cz = cz_cubes(f, base.powi(k), root)?;
        if cz.cubes.is_empty() {
            break;
        }
        let prev = levels.last();
        let level = cz
            .cubes
            .iter()
            .zip(&cz.averages)
            .map(|(c, a)| StoppingCube {
                cube: *c,
                parent: prev.and_then(|p| p.iter().position(|s| s.cube.contains(c, f.dim()))),
                value: *a,
            })
            .collect();
        levels.push(level);
        k += 1;
    }
    Ok(DecompositionTree {
        root: *root,
        root_value: f.average_cells(root),
        mode: TreeMode::Cz {
            base,
            first_exponent: first,
        },
        levels,
        c_hat: None,
    })
}

/// Lerner's stopping-time decomposition of `f` on `root`.
///
/// For a selected cube `R` with median `m`, let `t = ((f - m)χ_R)^*(2^{-n-2}|R|)` and
/// `E = {|f - m| > t}`; the next generation inside `R` are the maximal dyadic `P ⊊ R`
/// with `|E ∩ P| > 2^{-n-1}|P|`.
pub fn lerner_decompose(f: &SampledFunction, root: &CellCube) -> Result<DecompositionTree> {
    check_root(f, root)?;
    let dim = f.dim();
    let small = 0.5f64.powi(dim as i32 + 2);
    let root_median = median_of(&values_on(f, root))?;
    let mut levels: Vec<Vec<StoppingCube>> = Vec::new();
    let mut current = vec![StoppingCube {
        cube: *root,
        parent: None,
        value: root_median,
    }];
    loop {
        let first = levels.is_empty();
        let next: Vec<Vec<StoppingCube>> = current
            .par_iter()
            .enumerate()
            .map(|(idx, s)| {
                let parent = if first { None } else { Some(idx) };
                stopping_children(f, &s.cube, s.value, small)
                    .into_iter()
                    .map(|c| StoppingCube {
                        cube: c,
                        parent,
                        value: median_of(&values_on(f, &c)).unwrap_or(0.0),
                    })
                    .collect()
            })
            .collect();
        let flat: Vec<StoppingCube> = next.into_iter().flatten().collect();
        if flat.is_empty() {
            break;
        }
        levels.push(flat.clone());
        current = flat;
    }
    let mut tree = DecompositionTree {
        root: *root,
        root_value: root_median,
        mode: TreeMode::Lerner,
        levels,
        c_hat: None,
    };
    tree.c_hat = Some(lerner_constant(f, &tree)?);
    Ok(tree)
}

fn stopping_children(f: &SampledFunction, r: &CellCube, m: f64, small: f64) -> Vec<CellCube> {
    let dim = f.dim();
    if r.size == 1 {
        return Vec::new();
    }
    let cells: Vec<usize> = f.cells(r).collect();
    let dev: Vec<f64> = cells.iter().map(|&i| f.values()[i] - m).collect();
    let t = rearrangement_of(&dev, 1.0, small * cells.len() as f64);
    let in_e: HashSet<usize> = cells
        .iter()
        .zip(&dev)
        .filter(|(_, d)| d.abs() > t)
        .map(|(i, _)| *i)
        .collect();
    if in_e.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut stack = r.children(dim);
    stack.reverse();
    while let Some(p) = stack.pop() {
        let count = f.cells(&p).filter(|i| in_e.contains(i)).count();
        if count == 0 {
            continue;
        }
        if count as f64 > 2.0 * small * p.cell_count(dim) as f64 {
            out.push(p);
        } else if p.size > 1 {
            let mut kids = p.children(dim);
            kids.reverse();
            stack.extend(kids);
        }
    }
    out
}

fn lerner_constant(f: &SampledFunction, tree: &DecompositionTree) -> Result<f64> {
    let dim = f.dim();
    let sharp = local_sharp_max(f, &tree.root, 0.25)?;
    let small = 0.5f64.powi(dim as i32 + 2);
    let mut denom: Vec<f64> = sharp.values().to_vec();
    for level in &tree.levels {
        let terms: Vec<f64> = level
            .par_iter()
            .map(|s| oscillation_of(&values_on(f, &s.cube.parent(dim)), small))
            .collect();
        for (s, w) in level.iter().zip(terms) {
            for i in f.cells(&s.cube) {
                denom[i] += w;
            }
        }
    }
    let mut c = 0.0f64;
    for i in f.cells(&tree.root) {
        let num = (f.values()[i] - tree.root_value).abs();
        if num == 0.0 {
            continue;
        }
        c = c.max(if denom[i] == 0.0 { f64::INFINITY } else { num / denom[i] });
    }
    Ok(c)
}
