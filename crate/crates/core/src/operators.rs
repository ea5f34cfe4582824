//! Maximal operators over cube families and the multilinear fractional integral.
//!
//! Costs: `maximal` visits every cube of the family and every cell of each cube,
//! `O(N^3)` for `n = 1` with family `All`. `fractional_integral` is a direct sum
//! over all node tuples, `O(N^{n(m+1)})`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{translate, Cube, CubeFamily, Grid, GridFunction, MAX_DIM};
use crate::norms::{average_slice, AverageTag};
use crate::orlicz::{PhiFunction, YoungFunction};

/// Largest number of slots accepted.
pub const MAX_SLOTS: usize = 4;

/// `(f_1, ..., f_m)` on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionVector {
    parts: Vec<GridFunction>,
}

impl FunctionVector {
    pub fn new(parts: Vec<GridFunction>) -> Result<Self> {
        if parts.is_empty() || parts.len() > MAX_SLOTS {
            return Err(Error::InvalidParameter(format!(
                "need 1..={MAX_SLOTS} functions, got {}",
                parts.len()
            )));
        }
        if parts.iter().any(|f| f.grid() != parts[0].grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { parts })
    }

    pub fn single(f: GridFunction) -> Self {
        Self { parts: vec![f] }
    }

    pub fn m(&self) -> usize {
        self.parts.len()
    }

    pub fn grid(&self) -> &Grid {
        self.parts[0].grid()
    }

    pub fn parts(&self) -> &[GridFunction] {
        &self.parts
    }

    pub fn get(&self, i: usize) -> &GridFunction {
        &self.parts[i]
    }

    pub fn map(&self, f: impl Fn(usize, &GridFunction) -> Result<GridFunction>) -> Result<Self> {
        Self::new(
            self.parts
                .iter()
                .enumerate()
                .map(|(i, g)| f(i, g))
                .collect::<Result<_>>()?,
        )
    }

    /// `τ_t f_i` for every slot.
    pub fn translate(&self, offset: &[i64]) -> Self {
        Self {
            parts: self.parts.iter().map(|f| translate(f, offset)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().any(GridFunction::is_zero)
    }
}

/// Configuration of a maximal operator `sup_{Q ∋ x} weight(Q) ∏ ‖f_i‖_{X_i,Q}`.
#[derive(Clone, Debug)]
pub struct MaximalSpec {
    pub alpha: f64,
    /// One tag per slot, or a single tag shared by every slot.
    pub slots: Vec<AverageTag>,
    pub family: CubeFamily,
    /// Replaces `|Q|^{α/n}` by `φ(|Q|)`.
    pub phi: Option<PhiFunction>,
}

impl MaximalSpec {
    /// `M_α` over all cubes; `alpha = 0` gives `M`.
    pub fn fractional(alpha: f64) -> Self {
        Self {
            alpha,
            slots: vec![AverageTag::L1],
            family: CubeFamily::All,
            phi: None,
        }
    }

    /// `M_{α,B}` over all cubes.
    pub fn orlicz(alpha: f64, b: YoungFunction) -> Self {
        Self {
            alpha,
            slots: vec![AverageTag::Orlicz(b).normalized()],
            family: CubeFamily::All,
            phi: None,
        }
    }

    /// `M_φ` with plain averages.
    pub fn phi(phi: PhiFunction) -> Self {
        Self {
            alpha: 0.0,
            slots: vec![AverageTag::L1],
            family: CubeFamily::All,
            phi: Some(phi),
        }
    }

    pub fn with_family(mut self, family: CubeFamily) -> Self {
        self.family = family;
        self
    }

    pub fn with_slots(mut self, slots: Vec<AverageTag>) -> Self {
        self.slots = slots.into_iter().map(AverageTag::normalized).collect();
        self
    }

    fn tag(&self, i: usize) -> &AverageTag {
        if self.slots.len() == 1 {
            &self.slots[0]
        } else {
            &self.slots[i]
        }
    }

    fn validate(&self, f: &FunctionVector) -> Result<()> {
        let m = f.m();
        if self.slots.len() != 1 && self.slots.len() != m {
            return Err(Error::InvalidParameter(format!(
                "{} average tags for {m} functions",
                self.slots.len()
            )));
        }
        let nm = (f.grid().dim() * m) as f64;
        if self.phi.is_none() && !(self.alpha >= 0.0 && self.alpha < nm) {
            return Err(Error::AlphaOutOfRange {
                alpha: self.alpha,
                range: format!("[0, {nm})"),
            });
        }
        Ok(())
    }

    fn weight(&self, grid: &Grid, side: usize) -> f64 {
        let len = side as f64 * grid.cell_size();
        match &self.phi {
            Some(phi) => phi.eval(len.powi(grid.dim() as i32)),
            None if self.alpha == 0.0 => 1.0,
            None => len.powf(self.alpha),
        }
    }
}

/// Evaluates `spec` at every cell by exhaustive enumeration of the family.
pub fn maximal(spec: &MaximalSpec, f: &FunctionVector) -> Result<GridFunction> {
    spec.validate(f)?;
    let grid = *f.grid();
    let out = if grid.dim() == 1 {
        maximal_line(spec, f)?
    } else {
        maximal_general(spec, f)?
    };
    GridFunction::nonnegative(grid, out)
}

/// Value `weight(Q) ∏ avg_i` of a single cube.
pub fn cube_value(spec: &MaximalSpec, f: &FunctionVector, cube: &Cube) -> Result<f64> {
    spec.validate(f)?;
    let grid = f.grid();
    grid.check_cube(cube)?;
    let mut buf = Vec::new();
    cube_value_buffered(spec, f, cube, &mut buf)
}

fn cube_value_buffered(spec: &MaximalSpec, f: &FunctionVector, cube: &Cube, buf: &mut Vec<f64>) -> Result<f64> {
    let grid = f.grid();
    let mut prod = spec.weight(grid, cube.side);
    for (i, part) in f.parts().iter().enumerate() {
        buf.clear();
        grid.for_each_cell(cube, |c| buf.push(part.get(c)));
        let avg = average_slice(spec.tag(i), buf)?;
        if avg == 0.0 {
            return Ok(0.0);
        }
        prod *= avg;
    }
    Ok(prod)
}

fn maximal_general(spec: &MaximalSpec, f: &FunctionVector) -> Result<Vec<f64>> {
    let grid = *f.grid();
    let cubes = spec.family.enumerate(&grid);
    let values: Vec<f64> = cubes
        .par_iter()
        .map_init(Vec::new, |buf, cube| cube_value_buffered(spec, f, cube, buf))
        .collect::<Result<_>>()?;
    let mut out = vec![0.0f64; grid.len()];
    for (cube, &v) in cubes.iter().zip(&values) {
        if v > 0.0 {
            grid.for_each_cell(cube, |c| {
                if v > out[c] {
                    out[c] = v;
                }
            });
        }
    }
    Ok(out)
}

/// `n = 1`: intervals are slices, plain averages are running sums, and the
/// scatter uses per-anchor suffix maxima.
fn maximal_line(spec: &MaximalSpec, f: &FunctionVector) -> Result<Vec<f64>> {
    let grid = *f.grid();
    let n = grid.cells_per_side();
    let abs: Vec<Vec<f64>> = f
        .parts()
        .iter()
        .map(|p| p.values().iter().map(|v| v.abs()).collect())
        .collect();
    let admitted = |a: usize, k: usize| spec.family.admits(&grid, &Cube::new(&[a], k));
    // suffix[a][j] = max over admitted sides k >= j+1 of the interval value at anchor a
    let suffix: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|a| -> Result<Vec<f64>> {
            let room = n - a;
            let mut vals = vec![0.0f64; room];
            let mut sums = vec![0.0f64; abs.len()];
            for k in 1..=room {
                for (s, v) in sums.iter_mut().zip(&abs) {
                    *s += v[a + k - 1];
                }
                if !admitted(a, k) {
                    continue;
                }
                let mut prod = spec.weight(&grid, k);
                for (i, v) in abs.iter().enumerate() {
                    let avg = match spec.tag(i) {
                        AverageTag::L1 => sums[i] / k as f64,
                        tag => average_slice(tag, &v[a..a + k])?,
                    };
                    prod *= avg;
                    if prod == 0.0 {
                        break;
                    }
                }
                vals[k - 1] = prod;
            }
            for j in (0..room.saturating_sub(1)).rev() {
                vals[j] = vals[j].max(vals[j + 1]);
            }
            Ok(vals)
        })
        .collect::<Result<_>>()?;
    let out = (0..n)
        .map(|c| (0..=c).map(|a| suffix[a][c - a]).fold(0.0f64, f64::max))
        .collect();
    Ok(out)
}

/// `M f`, the Hardy-Littlewood maximal function over all cubes.
pub fn hardy_littlewood(f: &GridFunction) -> Result<GridFunction> {
    maximal(&MaximalSpec::fractional(0.0), &FunctionVector::single(f.clone()))
}

/// Linear `M_α f` with `0 <= α < n`.
pub fn fractional_maximal(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    maximal(&MaximalSpec::fractional(alpha), &FunctionVector::single(f.clone()))
}

/// Linear `M_B f`.
pub fn orlicz_maximal(f: &GridFunction, b: &YoungFunction) -> Result<GridFunction> {
    maximal(&MaximalSpec::orlicz(0.0, b.clone()), &FunctionVector::single(f.clone()))
}

/// `M_δ g = M(g^δ)^{1/δ}`.
pub fn m_delta(g: &GridFunction, delta: f64) -> Result<GridFunction> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be positive")));
    }
    if delta == 1.0 {
        return hardy_littlewood(g);
    }
    hardy_littlewood(&g.powf(delta)?)?.map(|v| v.powf(1.0 / delta))
}

/// `h^{nm} Σ_{c_1..c_m} ∏ f_i(c_i) (Σ |x - c_i|)^{α - nm}` at every cell center,
/// omitting only the tuple with every `c_i = x`.
pub fn fractional_integral(alpha: f64, f: &FunctionVector) -> Result<GridFunction> {
    let grid = *f.grid();
    let m = f.m();
    let nm = (grid.dim() * m) as f64;
    if !(alpha > 0.0 && alpha < nm) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            range: format!("(0, {nm})"),
        });
    }
    let out = if f.is_zero() {
        vec![0.0; grid.len()]
    } else if grid.dim() == 1 {
        integral_line(alpha, f)
    } else {
        integral_general(alpha, f)
    };
    GridFunction::from_values(grid, out)
}

/// Kernel depends only on the total index distance `s`, tabulated for `s <= m (N-1)`.
fn integral_line(alpha: f64, f: &FunctionVector) -> Vec<f64> {
    let grid = *f.grid();
    let n = grid.cells_per_side();
    let m = f.m();
    let h = grid.cell_size();
    let expo = alpha - m as f64;
    let table: Vec<f64> = (0..=m * (n - 1))
        .map(|s| if s == 0 { 0.0 } else { (s as f64 * h).powf(expo) })
        .collect();
    let parts: Vec<Vec<(usize, f64)>> = f
        .parts()
        .iter()
        .map(|p| {
            p.values()
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(c, v)| (c, *v))
                .collect()
        })
        .collect();
    let scale = h.powi(m as i32);
    (0..n)
        .into_par_iter()
        .map(|x| {
            let mut total = 0.0;
            line_recurse(x, &parts, &table, 0, 0, 1.0, &mut total);
            total * scale
        })
        .collect()
}

fn line_recurse(
    x: usize,
    parts: &[Vec<(usize, f64)>],
    table: &[f64],
    slot: usize,
    dist: usize,
    prod: f64,
    total: &mut f64,
) {
    if slot == parts.len() {
        *total += prod * table[dist];
        return;
    }
    for &(c, v) in &parts[slot] {
        line_recurse(x, parts, table, slot + 1, dist + x.abs_diff(c), prod * v, total);
    }
}

fn integral_general(alpha: f64, f: &FunctionVector) -> Vec<f64> {
    let grid = *f.grid();
    let m = f.m();
    let dim = grid.dim();
    let expo = alpha - (dim * m) as f64;
    let h = grid.cell_size();
    let parts: Vec<Vec<(usize, f64)>> = f
        .parts()
        .iter()
        .map(|p| {
            p.values()
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(c, v)| (c, *v))
                .collect()
        })
        .collect();
    let idx: Vec<[usize; MAX_DIM]> = (0..grid.len()).map(|c| grid.multi_index(c)).collect();
    let scale = grid.cell_volume().powi(m as i32);
    (0..grid.len())
        .into_par_iter()
        .map(|x| {
            let dist: Vec<f64> = idx
                .iter()
                .map(|c| {
                    let s: usize = (0..dim).map(|d| c[d].abs_diff(idx[x][d]).pow(2)).sum();
                    (s as f64).sqrt() * h
                })
                .collect();
            let mut total = 0.0;
            general_recurse(&parts, &dist, expo, 0, 0.0, 1.0, &mut total);
            total * scale
        })
        .collect()
}

fn general_recurse(
    parts: &[Vec<(usize, f64)>],
    dist: &[f64],
    expo: f64,
    slot: usize,
    acc: f64,
    prod: f64,
    total: &mut f64,
) {
    if slot == parts.len() {
        if acc > 0.0 {
            *total += prod * acc.powf(expo);
        }
        return;
    }
    for &(c, v) in &parts[slot] {
        general_recurse(parts, dist, expo, slot + 1, acc + dist[c], prod * v, total);
    }
}

/// Both sides of the comparison between the truncated maximal operator and an
/// average of translated dyadic ones, raised to the power `q`.
#[derive(Clone, Debug)]
pub struct RelationData {
    /// `M^k(f)(x)^q`, family `Truncated(k)`.
    pub lhs: GridFunction,
    /// Equal-weight mean over offsets `t` in `Q_k` of `M^d(τ_t f)(x + t)^q`.
    pub rhs: GridFunction,
    pub offsets: usize,
}

/// Offsets range over cells with `|t_d| h <= 2^{k+1}` on every axis, the lattice
/// points of the cube of side `2^{k+2}` centred at 0. Points `x + t` outside the
/// box read 0.
pub fn truncated_relation_data(spec: &MaximalSpec, f: &FunctionVector, k: i32, q: f64) -> Result<RelationData> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("q = {q} must be positive and finite")));
    }
    let grid = *f.grid();
    let h = grid.cell_size();
    let side = 2f64.powi(k);
    if side < h {
        return Err(Error::Truncation {
            k,
            reason: format!("side bound {side} is below the cell size {h}"),
        });
    }
    if 4.0 * side > grid.extent() {
        return Err(Error::Truncation {
            k,
            reason: format!("offset cube of side {} exceeds the box", 4.0 * side),
        });
    }
    let trunc = MaximalSpec {
        family: CubeFamily::Truncated(k),
        ..spec.clone()
    };
    let dyadic = MaximalSpec {
        family: CubeFamily::Dyadic,
        ..spec.clone()
    };
    let lhs = maximal(&trunc, f)?.map(|v| v.powf(q))?;
    let reach = (2.0 * side / h + 1e-9).floor() as i64;
    let dim = grid.dim();
    let span = (2 * reach + 1) as usize;
    let offsets: Vec<Vec<i64>> = (0..span.pow(dim as u32))
        .map(|mut flat| {
            let mut t = vec![0i64; dim];
            for d in (0..dim).rev() {
                t[d] = (flat % span) as i64 - reach;
                flat /= span;
            }
            t
        })
        .collect();
    let cells = grid.cells_per_side() as i64;
    let contributions: Vec<Vec<f64>> = offsets
        .par_iter()
        .map(|t| -> Result<Vec<f64>> {
            let md = maximal(&dyadic, &f.translate(t))?;
            let mut out = vec![0.0; grid.len()];
            for (x, o) in out.iter_mut().enumerate() {
                let idx = grid.multi_index(x);
                let mut shifted = [0usize; MAX_DIM];
                let mut inside = true;
                for d in 0..dim {
                    let s = idx[d] as i64 + t[d];
                    if s < 0 || s >= cells {
                        inside = false;
                        break;
                    }
                    shifted[d] = s as usize;
                }
                if inside {
                    *o = md.get(grid.flat_index(&shifted)).powf(q);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut rhs = vec![0.0; grid.len()];
    for c in &contributions {
        for (r, v) in rhs.iter_mut().zip(c) {
            *r += v;
        }
    }
    let count = offsets.len() as f64;
    rhs.iter_mut().for_each(|r| *r /= count);
    Ok(RelationData {
        lhs,
        rhs: GridFunction::nonnegative(grid, rhs)?,
        offsets: offsets.len(),
    })
}
