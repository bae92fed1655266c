use std::fs::File;

use serde::Serialize;
use serde_json::{json, Map, Value};

use sharpcomm::expr::{self, conjugate, Bindings};
use sharpcomm::lab::{
    default_two_weight_radii, sweep_frac_commutator, sweep_sobolev, two_weight_failure, SobolevOptions, SweepResult,
};
use sharpcomm::orlicz::{luxemburg_norm, orlicz_maximal};
use sharpcomm::oscillation::{cz_tree, lerner_decompose};
use sharpcomm::weights::{apq_constant, apq_constant_from_moments, bmo_norm, bump_constant, CubeBounds};
use sharpcomm::{
    CommutatorSpec, CubeFamily, Domain, Flavor, FunctionId, LevelWindow, Operator, SampledFunction, WeightPair,
    YoungFunction,
};

use crate::args::{Cli, Command, Decompose, FamilyArg, FlavorArg, Sweep};

type Res<T> = Result<T, String>;

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

pub struct Outcome {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub results: Value,
}

struct Ctx<'a> {
    cli: &'a Cli,
    domain: Domain,
    window: Option<LevelWindow>,
    vars: Bindings,
    parameters: Map<String, Value>,
}

impl Ctx<'_> {
    fn num(&mut self, name: &str, src: &str) -> Res<f64> {
        let v = expr::eval(src, &self.vars).map_err(err)?;
        self.parameters.insert(name.into(), json!(v));
        Ok(v)
    }

    fn bind(&mut self, name: &str, src: &str) -> Res<f64> {
        let v = self.num(name, src)?;
        self.vars.set(name, v);
        Ok(v)
    }

    fn exponents(&mut self, p: &str, q: Option<&str>) -> Res<(f64, f64)> {
        let p = self.num("p", p)?;
        self.vars = self.vars.clone().with_exponents(p, p);
        let q = match q {
            Some(q) => self.num("q", q)?,
            None => p,
        };
        self.vars = self.vars.clone().with_exponents(p, q);
        Ok((p, q))
    }

    fn function(&self, id: &str) -> Res<SampledFunction> {
        FunctionId::parse(id, &self.vars)
            .and_then(|f| f.sample(&self.domain, self.cli.global.resolution))
            .map_err(err)
    }

    fn young(&self, id: &str) -> Res<YoungFunction> {
        YoungFunction::parse(id, &self.vars).map_err(err)
    }

    fn family(&self, fam: FamilyArg, f: &SampledFunction) -> CubeFamily {
        let depths = self
            .window
            .map(|w| ((-w.max).max(0) as usize, (-w.min).max(0) as usize));
        match fam {
            FamilyArg::Dyadic => CubeFamily::Dyadic { depths },
            FamilyArg::Shifted => CubeFamily::Shifted { depths },
            FamilyArg::Centered => CubeFamily::centered(f),
        }
    }

    fn sampled(&self, f: &SampledFunction, at: &[String]) -> Res<Value> {
        if let Some(path) = &self.cli.global.out {
            f.save_csv(path).map_err(err)?;
        }
        let mut points = Vec::new();
        for s in at {
            let x: Vec<f64> = s
                .split(',')
                .map(|c| expr::eval(c, &self.vars).map_err(err))
                .collect::<Res<_>>()?;
            if x.len() != f.dim() {
                return Err(format!("point `{s}` needs {} coordinates", f.dim()));
            }
            let value = f
                .value_at(&x)
                .ok_or_else(|| format!("point `{s}` lies outside the domain"))?;
            points.push(json!({ "x": x, "value": value }));
        }
        Ok(json!({
            "cells": f.len(),
            "max_abs": f.max_abs(),
            "l2_norm": f.lp_norm(2.0),
            "at": points,
        }))
    }

    fn sweep(&self, s: SweepResult) -> Res<Value> {
        if let Some(path) = &self.cli.global.out {
            s.write_csv(File::create(path).map_err(err)?).map_err(err)?;
        }
        serde_json::to_value(s).map_err(err)
    }
}

fn parse_levels(s: &str) -> Res<LevelWindow> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("levels must look like a..b, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<i32>().map_err(|_| format!("bad level `{t}`"));
    let (min, max) = (parse(a)?, parse(b)?);
    if min > max || max > 0 {
        return Err(format!("need a ≤ b ≤ 0 in --levels, got {min}..{max}"));
    }
    Ok(LevelWindow::new(min, max))
}

fn parse_domain(s: &str, dim: usize) -> Res<Domain> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("domain must look like a:b, got `{s}`"))?;
    let a = expr::eval_const(a).map_err(err)?;
    let b = expr::eval_const(b).map_err(err)?;
    if !(b > a) {
        return Err(format!("empty domain {a}:{b}"));
    }
    Domain::symmetric(dim, a, b).map_err(err)
}

fn deltas(ctx: &mut Ctx, src: &[String]) -> Res<Vec<f64>> {
    let v = src
        .iter()
        .map(|d| expr::eval(d, &ctx.vars).map_err(err))
        .collect::<Res<Vec<f64>>>()?;
    ctx.parameters.insert("deltas".into(), json!(v));
    Ok(v)
}

fn to_json<T: Serialize>(t: T) -> Res<Value> {
    serde_json::to_value(t).map_err(err)
}

pub fn execute(cli: &Cli) -> Res<Outcome> {
    let g = &cli.global;
    let window = g.levels.as_deref().map(parse_levels).transpose()?;
    let mut ctx = Ctx {
        cli,
        domain: parse_domain(&g.domain, g.dim)?,
        window,
        vars: Bindings::new().with("n", g.dim as f64).with("seed", g.seed as f64),
        parameters: Map::new(),
    };
    let (command, results) = match &cli.command {
        Command::Luxemburg { f, phi, cube } => {
            let f = ctx.function(f)?;
            let phi = ctx.young(phi)?;
            let q = match cube {
                None => f.tree_cube(&f.root()),
                Some(s) => {
                    let (k, idx) = s
                        .split_once(':')
                        .ok_or_else(|| format!("cube must look like k:i1,..., got `{s}`"))?;
                    let k: i32 = k.trim().parse().map_err(|_| format!("bad cube level `{k}`"))?;
                    let idx: Vec<i64> = idx
                        .split(',')
                        .map(|t| t.trim().parse().map_err(|_| format!("bad cube index `{t}`")))
                        .collect::<Res<_>>()?;
                    if idx.len() != f.dim() {
                        return Err(format!("cube index needs {} entries", f.dim()));
                    }
                    ctx.domain.tree_grid().cube(k, idx)
                }
            };
            let norm = luxemburg_norm(&f, &q, &phi).map_err(err)?;
            let cells = f.cell_cube(&q).map_err(err)?;
            ("luxemburg", json!({ "norm": norm, "cube": CubeBounds::of(&f, &cells) }))
        }
        Command::Maximal {
            f,
            phi,
            alpha,
            flavor,
            at,
        } => {
            let alpha = ctx.bind("alpha", alpha)?;
            let f = ctx.function(f)?;
            let phi = ctx.young(phi)?;
            let flavor = match flavor {
                FlavorArg::Dyadic => Flavor::Dyadic,
                FlavorArg::AllCubes => Flavor::AllCubes,
            };
            let m = orlicz_maximal(&f, &phi, alpha, flavor).map_err(err)?;
            ("maximal", ctx.sampled(&m, at)?)
        }
        Command::Apq { w, p, q, delta, family } => {
            if let Some(d) = delta {
                ctx.bind("delta", d)?;
            }
            let (p, q) = ctx.exponents(p, Some(q))?;
            let id = FunctionId::parse(w, &ctx.vars).map_err(err)?;
            let level = g.resolution;
            let c = match id {
                FunctionId::Power { a } => {
                    let wq = FunctionId::Power { a: a * q }.sample(&ctx.domain, level).map_err(err)?;
                    let wneg = FunctionId::Power { a: -a * conjugate(p) }
                        .sample(&ctx.domain, level)
                        .map_err(err)?;
                    let fam = ctx.family(*family, &wq);
                    apq_constant_from_moments(&wq, &wneg, p, q, &fam)
                }
                other => {
                    let w = other.sample(&ctx.domain, level).map_err(err)?;
                    let fam = ctx.family(*family, &w);
                    apq_constant(&w, p, q, &fam)
                }
            }
            .map_err(err)?;
            ("apq", to_json(c)?)
        }
        Command::Bump {
            u,
            v,
            a,
            b,
            p,
            q,
            alpha,
            delta,
            family,
        } => {
            if let Some(d) = delta {
                ctx.bind("delta", d)?;
            }
            let alpha = ctx.bind("alpha", alpha)?;
            let (p, q) = ctx.exponents(p, q.as_deref())?;
            let (u, v) = (ctx.function(u)?, ctx.function(v)?);
            let (a, b) = (ctx.young(a)?, ctx.young(b)?);
            let fam = ctx.family(*family, &u);
            let pair = WeightPair::new(u, v, p, q, alpha).map_err(err)?;
            ("bump", to_json(bump_constant(&pair, &a, &b, &fam).map_err(err)?)?)
        }
        Command::Bmo { b, family } => {
            let b = ctx.function(b)?;
            let fam = ctx.family(*family, &b);
            ("bmo", to_json(bmo_norm(&b, &fam).map_err(err)?)?)
        }
        Command::Transform {
            op,
            f,
            commutator_symbol,
            at,
        } => {
            let op = Operator::parse(op, &ctx.vars).map_err(err)?.with_window(ctx.window);
            let f = ctx.function(f)?;
            let out = match commutator_symbol {
                Some(b) => CommutatorSpec::new(ctx.function(b)?, op).apply(&f),
                None => op.apply(&f),
            }
            .map_err(err)?;
            ("transform", ctx.sampled(&out, at)?)
        }
        Command::Decompose { kind } => match kind {
            Decompose::Cz { f, height, base } => {
                let h = ctx.num("height", height)?;
                if !(h > 0.0) {
                    return Err(format!("height must be positive, got {h}"));
                }
                let base = match base {
                    Some(b) => ctx.num("base", b)?,
                    None => 4f64.powi(g.dim as i32),
                };
                let f = ctx.function(f)?;
                let mut tree = cz_tree(&f.scale(1.0 / h), &f.root(), base, 0).map_err(err)?;
                tree.root_value *= h;
                for s in tree.levels.iter_mut().flatten() {
                    s.value *= h;
                }
                ("decompose cz", tree.nested_json())
            }
            Decompose::Lerner { f } => {
                let f = ctx.function(f)?;
                let tree = lerner_decompose(&f, &f.root()).map_err(err)?;
                let mut v = tree.nested_json();
                v["invariants"] = to_json(tree.check(&f))?;
                ("decompose lerner", v)
            }
        },
        Command::Sweep { kind } => match kind {
            Sweep::Sobolev {
                p,
                deltas: ds,
                apq,
                weight_scale,
            } => {
                let p = ctx.bind("p", p)?;
                let ds = deltas(&mut ctx, ds)?;
                let opts = SobolevOptions {
                    resolution: apq.then_some(g.resolution),
                    weight_scale: ctx.num("weight_scale", weight_scale)?,
                    rel_tol: g.tol,
                };
                (
                    "sweep sobolev",
                    ctx.sweep(sweep_sobolev(g.dim, p, &ds, opts).map_err(err)?)?,
                )
            }
            Sweep::FracCommutator { alpha, p, deltas: ds } => {
                let alpha = ctx.bind("alpha", alpha)?;
                let p = ctx.bind("p", p)?;
                let ds = deltas(&mut ctx, ds)?;
                let s = sweep_frac_commutator(g.dim, alpha, p, &ds, g.tol).map_err(err)?;
                ("sweep frac-commutator", ctx.sweep(s)?)
            }
            Sweep::TwoWeight { alpha, k, squarings } => {
                let alpha = ctx.bind("alpha", alpha)?;
                let radii = default_two_weight_radii(*squarings);
                let s = two_weight_failure(g.dim, alpha, *k, &radii, g.tol).map_err(err)?;
                ("sweep two-weight", ctx.sweep(s)?)
            }
        },
    };
    Ok(Outcome {
        command: command.into(),
        parameters: ctx.parameters,
        results,
    })
}
