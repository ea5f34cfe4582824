//! Exponent bookkeeping, weight-class constants and weight constructors.
//!
//! Every class constant is a supremum over a cube family of a product of
//! per-cube reductions (means, minima, maxima or Luxemburg averages of
//! transformed weights); [`sup_over_cubes`] evaluates such suprema.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::build_function_term;
use crate::lattice::{Cube, CubeFamily, Grid, GridFunction};
use crate::norms::{average_slice, AverageTag};
use crate::operators::{fractional_maximal, hardy_littlewood, orlicz_maximal};
use crate::orlicz::YoungFunction;
use crate::recipe::Term;

/// Smallest value a constructed weight may take.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// `(n, m, α, p_i)` and the exponents derived from them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentSystem {
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub p: Vec<f64>,
    /// `1/q_i = 1/p_i - α/(nm)`.
    pub q: Vec<f64>,
    /// `s_i = (1 - α/(nm)) q_i`.
    pub s: Vec<f64>,
    pub p_total: f64,
    pub q_total: f64,
    pub s_total: f64,
    /// `nm/(nm - α)`.
    pub r: f64,
    /// `nm/α`; infinite when `α = 0`.
    pub r_prime: f64,
}

fn harmonic(xs: &[f64]) -> f64 {
    1.0 / xs.iter().map(|x| 1.0 / x).sum::<f64>()
}

/// `p/(p-1)`, infinite at `p = 1`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

impl ExponentSystem {
    pub fn new(n: usize, m: usize, alpha: f64, p: &[f64]) -> Result<Self> {
        if !(1..=3).contains(&n) || m == 0 {
            return Err(Error::InvalidParameter(format!("need 1 <= n <= 3 and m >= 1, got n = {n}, m = {m}")));
        }
        if p.len() != m {
            return Err(Error::InvalidParameter(format!("{} exponents for m = {m}", p.len())));
        }
        let nm = (n * m) as f64;
        if !(alpha >= 0.0 && alpha < nm) {
            return Err(Error::AlphaOutOfRange {
                alpha,
                range: format!("[0, {nm})"),
            });
        }
        let a = alpha / nm;
        for (i, &pi) in p.iter().enumerate() {
            if !(pi >= 1.0 && pi.is_finite()) || (alpha > 0.0 && pi >= nm / alpha) {
                return Err(Error::InvalidExponent {
                    slot: i + 1,
                    value: pi,
                    constraint: format!("1 <= p_i < nm/alpha = {}", nm / alpha),
                });
            }
        }
        let q: Vec<f64> = p.iter().map(|pi| 1.0 / (1.0 / pi - a)).collect();
        let s: Vec<f64> = q.iter().map(|qi| (1.0 - a) * qi).collect();
        let sys = Self {
            n,
            m,
            alpha,
            p_total: harmonic(p),
            q_total: harmonic(&q),
            s_total: harmonic(&s),
            p: p.to_vec(),
            q,
            s,
            r: nm / (nm - alpha),
            r_prime: if alpha > 0.0 { nm / alpha } else { f64::INFINITY },
        };
        sys.check_identities()?;
        Ok(sys)
    }

    /// Largest relative defect of the two exponent identities and of `1/q = 1/p - α/n`.
    pub fn identity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
        if self.alpha > 0.0 {
            let a = self.alpha / (self.n * self.m) as f64;
            for i in 0..self.m {
                let uno = (self.q[i] / self.p[i] - 1.0) * self.r_prime;
                let dos = (self.s[i] / self.p[i] + a - 1.0) * self.r_prime;
                worst = worst.max(rel(uno, self.q[i])).max(rel(dos, self.s[i]));
            }
        }
        let lhs = 1.0 / self.q_total;
        let rhs = 1.0 / self.p_total - self.alpha / self.n as f64;
        worst.max(rel(lhs, rhs))
    }

    fn check_identities(&self) -> Result<()> {
        let d = self.identity_defect();
        if d > 1e-12 {
            return Err(Error::InvalidParameter(format!("exponent identities fail by {d:e}")));
        }
        Ok(())
    }

    pub fn p_prime(&self, i: usize) -> f64 {
        conjugate(self.p[i])
    }
}

/// Strictly positive weights `w_1..w_m` on one grid.
#[derive(Clone, Debug)]
pub struct WeightVector {
    parts: Vec<GridFunction>,
}

impl WeightVector {
    pub fn new(parts: Vec<GridFunction>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidParameter("empty weight vector".into()));
        }
        for w in &parts {
            if w.grid() != parts[0].grid() {
                return Err(Error::GridMismatch);
            }
            if let Some((cell, &value)) = w.values().iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
                return Err(Error::Negative { cell, value });
            }
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[GridFunction] {
        &self.parts
    }

    pub fn get(&self, i: usize) -> &GridFunction {
        &self.parts[i]
    }

    pub fn m(&self) -> usize {
        self.parts.len()
    }

    /// `∏ w_i^{e_i}`.
    pub fn product_powers(&self, e: &[f64]) -> Result<GridFunction> {
        let grid = *self.parts[0].grid();
        let vals = (0..grid.len())
            .map(|c| self.parts.iter().zip(e).map(|(w, ei)| w.get(c).powf(*ei)).product())
            .collect();
        GridFunction::from_values(grid, vals)
    }

    /// `ν = ∏ w_i`.
    pub fn product(&self) -> Result<GridFunction> {
        self.product_powers(&vec![1.0; self.m()])
    }

    /// `u = ∏ w_i^{1/m}`.
    pub fn geometric_mean(&self) -> Result<GridFunction> {
        self.product_powers(&vec![1.0 / self.m() as f64; self.m()])
    }

    /// `ν_P = ∏ w_i^{p/p_i}`.
    pub fn nu_p(&self, sys: &ExponentSystem) -> Result<GridFunction> {
        let e: Vec<f64> = sys.p.iter().map(|pi| sys.p_total / pi).collect();
        self.product_powers(&e)
    }
}

/// How a channel is reduced over a cube.
#[derive(Clone, Debug)]
pub enum Reduction {
    Mean,
    Min,
    Max,
    Average(AverageTag),
}

/// A function together with the reduction [`sup_over_cubes`] applies to it.
#[derive(Clone, Debug)]
pub struct Channel {
    pub values: Vec<f64>,
    pub reduction: Reduction,
}

impl Channel {
    pub fn mean(f: &GridFunction) -> Self {
        Self {
            values: f.values().to_vec(),
            reduction: Reduction::Mean,
        }
    }

    pub fn mean_of(f: &GridFunction, map: impl Fn(f64) -> f64) -> Self {
        Self {
            values: f.values().iter().map(|&v| map(v)).collect(),
            reduction: Reduction::Mean,
        }
    }

    pub fn min(f: &GridFunction) -> Self {
        Self {
            values: f.values().to_vec(),
            reduction: Reduction::Min,
        }
    }

    pub fn max(f: &GridFunction) -> Self {
        Self {
            values: f.values().to_vec(),
            reduction: Reduction::Max,
        }
    }

    pub fn average(f: &GridFunction, tag: AverageTag) -> Self {
        Self {
            values: f.values().to_vec(),
            reduction: Reduction::Average(tag.normalized()),
        }
    }
}

fn reduce(reduction: &Reduction, vals: &[f64]) -> Result<f64> {
    Ok(match reduction {
        Reduction::Mean => vals.iter().sum::<f64>() / vals.len() as f64,
        Reduction::Min => vals.iter().copied().fold(f64::INFINITY, f64::min),
        Reduction::Max => vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Reduction::Average(tag) => average_slice(tag, vals)?,
    })
}

/// `sup_Q value(Q, [reduction_j over Q])` over a cube family. NaN values are
/// treated as `+∞` so that overflowing weights register as unbounded.
pub fn sup_over_cubes(
    grid: &Grid,
    family: CubeFamily,
    channels: &[Channel],
    value: impl Fn(&Cube, &[f64]) -> f64 + Sync,
) -> Result<f64> {
    for ch in channels {
        if ch.values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
    }
    let fix = |v: f64| if v.is_nan() { f64::INFINITY } else { v };
    if grid.dim() == 1 {
        let n = grid.cells_per_side();
        let per_anchor: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|a| -> Result<f64> {
                let mut best = f64::NEG_INFINITY;
                let mut red = vec![0.0; channels.len()];
                let mut sums = vec![0.0; channels.len()];
                for k in 1..=n - a {
                    let cube = Cube::new(&[a], k);
                    for (j, ch) in channels.iter().enumerate() {
                        let v = ch.values[a + k - 1];
                        match &ch.reduction {
                            Reduction::Mean => sums[j] += v,
                            Reduction::Min => sums[j] = if k == 1 { v } else { sums[j].min(v) },
                            Reduction::Max => sums[j] = if k == 1 { v } else { sums[j].max(v) },
                            Reduction::Average(_) => {}
                        }
                    }
                    if !family.admits(grid, &cube) {
                        continue;
                    }
                    for (j, ch) in channels.iter().enumerate() {
                        red[j] = match &ch.reduction {
                            Reduction::Mean => sums[j] / k as f64,
                            Reduction::Min | Reduction::Max => sums[j],
                            Reduction::Average(tag) => average_slice(tag, &ch.values[a..a + k])?,
                        };
                    }
                    best = best.max(fix(value(&cube, &red)));
                }
                Ok(best)
            })
            .collect::<Result<_>>()?;
        return Ok(per_anchor.into_iter().fold(f64::NEG_INFINITY, f64::max));
    }
    let cubes = family.enumerate(grid);
    let vals: Vec<f64> = cubes
        .par_iter()
        .map_init(Vec::new, |buf, cube| -> Result<f64> {
            let mut red = Vec::with_capacity(channels.len());
            for ch in channels {
                buf.clear();
                grid.for_each_cell(cube, |c| buf.push(ch.values[c]));
                red.push(reduce(&ch.reduction, buf)?);
            }
            Ok(fix(value(cube, &red)))
        })
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Classical `A_p`: `sup_Q (avg w)(avg w^{1-p'})^{p-1}`.
pub fn ap_constant(w: &GridFunction, p: f64, family: CubeFamily) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("A_p needs p > 1, got {p}")));
    }
    let e = 1.0 - conjugate(p);
    sup_over_cubes(
        w.grid(),
        family,
        &[Channel::mean(w), Channel::mean_of(w, |v| v.powf(e))],
        |_, r| r[0] * r[1].powf(p - 1.0),
    )
}

/// Multilinear `A_P`: `sup_Q (avg ∏ w_i^{p/p_i})^{1/p} ∏ (avg w_i^{1-p_i'})^{1/p_i'}`,
/// with `(inf_Q w_i)^{-1}` for a slot with `p_i = 1`.
pub fn multilinear_ap_constant(w: &WeightVector, ps: &[f64], family: CubeFamily) -> Result<f64> {
    if ps.len() != w.m() || ps.iter().any(|p| !(*p >= 1.0)) {
        return Err(Error::InvalidParameter(format!("need {} exponents >= 1, got {ps:?}", w.m())));
    }
    let p = harmonic(ps);
    let nu = w.product_powers(&ps.iter().map(|pi| p / pi).collect::<Vec<_>>())?;
    let mut channels = vec![Channel::mean(&nu)];
    for (wi, &pi) in w.parts().iter().zip(ps) {
        if pi == 1.0 {
            channels.push(Channel::min(wi));
        } else {
            let e = 1.0 - conjugate(pi);
            channels.push(Channel::mean_of(wi, |v| v.powf(e)));
        }
    }
    let exps: Vec<f64> = ps.iter().map(|&pi| conjugate(pi)).collect();
    sup_over_cubes(w.get(0).grid(), family, &channels, |_, r| {
        let mut v = r[0].powf(1.0 / p);
        for (i, pp) in exps.iter().enumerate() {
            v *= if pp.is_infinite() {
                1.0 / r[i + 1]
            } else {
                r[i + 1].powf(1.0 / pp)
            };
        }
        v
    })
}

/// `A_{P,q}` through `(w_1^{q_1}, ..., w_m^{q_m}) ∈ A_S`.
pub fn apq_constant(w: &WeightVector, sys: &ExponentSystem, family: CubeFamily) -> Result<f64> {
    if let Some(i) = sys.s.iter().position(|s| *s < 1.0) {
        return Err(Error::InvalidExponent {
            slot: i + 1,
            value: sys.p[i],
            constraint: format!("s_i = {} must be >= 1 for A_S", sys.s[i]),
        });
    }
    let wq = WeightVector::new(
        w.parts()
            .iter()
            .zip(&sys.q)
            .map(|(wi, qi)| wi.map(|v| v.powf(*qi)))
            .collect::<Result<_>>()?,
    )?;
    multilinear_ap_constant(&wq, &sys.s, family)
}

/// `RH(s)`: `sup_Q (avg w^s)^{1/s} / avg w`; `s = None` gives `RH_∞`, `sup_Q max_Q w / avg w`.
pub fn rh_constant(w: &GridFunction, s: Option<f64>, family: CubeFamily) -> Result<f64> {
    match s {
        None => sup_over_cubes(w.grid(), family, &[Channel::max(w), Channel::mean(w)], |_, r| r[0] / r[1]),
        Some(s) if s > 1.0 => sup_over_cubes(
            w.grid(),
            family,
            &[Channel::mean_of(w, |v| v.powf(s)), Channel::mean(w)],
            |_, r| r[0].powf(1.0 / s) / r[1],
        ),
        Some(s) => Err(Error::InvalidParameter(format!("RH(s) needs s > 1, got {s}"))),
    }
}

/// A constructed weight and the number of cells raised to [`WEIGHT_FLOOR`].
#[derive(Clone, Debug)]
pub struct BuiltWeight {
    pub weight: GridFunction,
    pub floored: usize,
}

/// Builds a weight from a recipe:
/// `const:c`, `power:(a,center)`, `bump:(σ,center)`, `random:(seed,smoothness)`,
/// `m_power:(base,δ)`, `mg_negpow:(g,β)`, `m_frac:(base,α')`, `m_llogl:(base,δ)`,
/// `m_squared:(base)`. `base` is a weight recipe and `g` a function recipe.
pub fn build_weight(recipe: &str, grid: &Grid) -> Result<BuiltWeight> {
    build_weight_term(&Term::parse(recipe)?, grid)
}

pub fn build_weight_term(t: &Term, grid: &Grid) -> Result<BuiltWeight> {
    let raw = raw_weight(t, grid)?;
    let mut floored = 0;
    let vals = raw
        .values()
        .iter()
        .map(|&v| {
            if v < WEIGHT_FLOOR || v.is_nan() {
                floored += 1;
                WEIGHT_FLOOR
            } else {
                v.min(f64::MAX)
            }
        })
        .collect();
    Ok(BuiltWeight {
        weight: GridFunction::nonnegative(*grid, vals)?,
        floored,
    })
}

fn base_weight(t: &Term, i: usize, grid: &Grid) -> Result<GridFunction> {
    Ok(build_weight_term(t.term(i)?, grid)?.weight)
}

fn raw_weight(t: &Term, grid: &Grid) -> Result<GridFunction> {
    let dim = grid.dim();
    let h = grid.cell_size();
    match t.name.as_str() {
        "const" => {
            t.expect_arity(0, 1)?;
            let c = t.num_or(0, 1.0)?;
            if !(c > 0.0 && c.is_finite()) {
                return Err(t.bad("constant weight must be positive"));
            }
            GridFunction::constant(*grid, c)
        }
        "power" => {
            t.expect_arity(1, 2)?;
            let a = t.num(0)?;
            let c = t.num_or(1, 0.5 * grid.extent())?;
            // distances below half a cell are clipped to it
            GridFunction::from_fn(*grid, |x| {
                let d = x.iter().map(|v| (v - c) * (v - c)).sum::<f64>().sqrt();
                d.max(0.5 * h).powf(a)
            })
        }
        "bump" => {
            t.expect_arity(1, 2)?;
            let sigma = t.num(0)?;
            if !(sigma > 0.0) {
                return Err(t.bad("sigma must be positive"));
            }
            let c = t.num_or(1, 0.5 * grid.extent())?;
            GridFunction::from_fn(*grid, |x| {
                let d2 = x.iter().map(|v| (v - c) * (v - c)).sum::<f64>();
                (-d2 / (2.0 * sigma * sigma)).exp()
            })
        }
        "random" => {
            t.expect_arity(1, 2)?;
            let seed = t.num(0)? as u64;
            let smooth = t.num_or(1, 2.0)?;
            let modes = 8;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let normal = Normal::new(0.0, 0.5).expect("valid sigma");
            let coef: Vec<[f64; 2]> = (0..modes * dim)
                .map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)])
                .collect();
            let l = grid.extent();
            GridFunction::from_fn(*grid, |x| {
                let mut s = 0.0;
                for d in 0..dim {
                    for k in 1..=modes {
                        let [a, b] = coef[d * modes + k - 1];
                        let th = 2.0 * std::f64::consts::PI * k as f64 * x[d] / l;
                        s += (a * th.cos() + b * th.sin()) / (k as f64).powf(smooth);
                    }
                }
                s.exp()
            })
        }
        "m_power" => {
            t.expect_arity(2, 2)?;
            let delta = t.num(1)?;
            hardy_littlewood(&base_weight(t, 0, grid)?)?.map(|v| v.powf(delta))
        }
        "mg_negpow" => {
            t.expect_arity(2, 2)?;
            let g = build_function_term(t.term(0)?, grid)?;
            let beta = t.num(1)?;
            if !(beta > 0.0) {
                return Err(t.bad("beta must be positive"));
            }
            hardy_littlewood(&g)?.map(|v| if v > 0.0 { v.powf(-beta) } else { f64::INFINITY })
        }
        "m_frac" => {
            t.expect_arity(2, 2)?;
            let a = t.num(1)?;
            if !(a >= 0.0 && a < dim as f64) {
                return Err(t.bad("fractional order must lie in [0, n)"));
            }
            fractional_maximal(&base_weight(t, 0, grid)?, a)
        }
        "m_llogl" => {
            t.expect_arity(2, 2)?;
            let delta = t.num(1)?;
            if !(delta > 0.0) {
                return Err(t.bad("delta must be positive"));
            }
            orlicz_maximal(&base_weight(t, 0, grid)?, &YoungFunction::llogl(delta))
        }
        "m_squared" => {
            t.expect_arity(1, 1)?;
            hardy_littlewood(&hardy_littlewood(&base_weight(t, 0, grid)?)?)
        }
        other => Err(t.bad(&format!("unknown weight recipe `{other}`"))),
    }
}
