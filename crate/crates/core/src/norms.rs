//! Weighted Lebesgue, weak-Lebesgue and cube-average norms.

use crate::error::{Error, Result};
use crate::lattice::{Cube, Grid, GridFunction};
use crate::orlicz::{luxemburg_slice, YoungFunction};

/// The measure `u(E) = h^n Σ_E u`.
#[derive(Clone, Debug)]
pub struct WeightedMeasure {
    u: GridFunction,
}

impl WeightedMeasure {
    pub fn new(u: GridFunction) -> Result<Self> {
        if let Some((cell, &value)) = u.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::Negative { cell, value });
        }
        Ok(Self { u })
    }

    /// Lebesgue measure on the grid.
    pub fn lebesgue(grid: Grid) -> Self {
        Self {
            u: GridFunction::constant(grid, 1.0).expect("constant is finite"),
        }
    }

    pub fn density(&self) -> &GridFunction {
        &self.u
    }

    pub fn measure(&self, cells: impl IntoIterator<Item = usize>) -> f64 {
        cells.into_iter().map(|c| self.u.get(c)).sum::<f64>() * self.u.grid().cell_volume()
    }

    pub fn measure_where(&self, pred: impl Fn(usize) -> bool) -> f64 {
        self.measure((0..self.u.grid().len()).filter(|&c| pred(c)))
    }

    pub fn cube(&self, cube: &Cube) -> f64 {
        let mut s = 0.0;
        self.u.grid().for_each_cell(cube, |c| s += self.u.get(c));
        s * self.u.grid().cell_volume()
    }
}

fn weight_at(u: Option<&GridFunction>, c: usize) -> f64 {
    u.map_or(1.0, |w| w.get(c))
}

fn check_weight(f: &GridFunction, u: Option<&GridFunction>) -> Result<()> {
    match u {
        Some(w) if w.grid() != f.grid() => Err(Error::GridMismatch),
        _ => Ok(()),
    }
}

/// `(h^n Σ |f|^p u)^{1/p}`, with `u ≡ 1` when absent.
pub fn lp_norm(f: &GridFunction, p: f64, u: Option<&GridFunction>) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must be positive")));
    }
    check_weight(f, u)?;
    let s: f64 = f
        .values()
        .iter()
        .enumerate()
        .map(|(c, v)| {
            let a = v.abs();
            let ap = if p == 1.0 { a } else { a.powf(p) };
            ap * weight_at(u, c)
        })
        .sum();
    let s = s * f.grid().cell_volume();
    Ok(if p == 1.0 { s } else { s.powf(1.0 / p) })
}

/// `sup_λ λ u({|f| > λ})^{1/q}`, exact on grid data: the supremum is approached as
/// `λ` rises to each distinct value `v`, where it equals `v u({|f| >= v})^{1/q}`.
pub fn weak_norm(f: &GridFunction, q: f64, u: Option<&GridFunction>) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::InvalidParameter(format!("q = {q} must be positive")));
    }
    check_weight(f, u)?;
    let mut cells: Vec<(f64, f64)> = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(c, v)| (v.abs(), weight_at(u, c)))
        .collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let h = f.grid().cell_volume();
    let mut acc = 0.0;
    let mut best = 0.0f64;
    for i in 0..cells.len() {
        acc += cells[i].1;
        let boundary = i + 1 == cells.len() || cells[i + 1].0 != cells[i].0;
        if boundary {
            best = best.max(cells[i].0 * (acc * h).powf(1.0 / q));
        }
    }
    Ok(best)
}

/// Which average a maximal-operator slot takes over each cube.
#[derive(Clone, Debug, PartialEq)]
pub enum AverageTag {
    L1,
    /// `((1/|Q|) ∫_Q |f|^r)^{1/r}`.
    Lr(f64),
    Orlicz(YoungFunction),
}

impl AverageTag {
    pub fn label(&self) -> String {
        match self {
            AverageTag::L1 => "L1".into(),
            AverageTag::Lr(r) => format!("L{r}"),
            AverageTag::Orlicz(b) => b.label(),
        }
    }

    /// Plain average when the tag reduces to it.
    pub fn normalized(self) -> Self {
        match self {
            AverageTag::Lr(r) if r == 1.0 => AverageTag::L1,
            AverageTag::Orlicz(b) if b.is_identity() => AverageTag::L1,
            t => t,
        }
    }
}

/// The tag's average of equally weighted samples `|v_j|`.
pub fn average_slice(tag: &AverageTag, vals: &[f64]) -> Result<f64> {
    if vals.is_empty() {
        return Ok(0.0);
    }
    let len = vals.len() as f64;
    match tag {
        AverageTag::L1 => Ok(vals.iter().map(|v| v.abs()).sum::<f64>() / len),
        AverageTag::Lr(r) => {
            if !(*r > 0.0) {
                return Err(Error::InvalidParameter(format!("r = {r} must be positive")));
            }
            if r.is_infinite() {
                return Ok(vals.iter().fold(0.0f64, |m, v| m.max(v.abs())));
            }
            let s = vals.iter().map(|v| v.abs().powf(*r)).sum::<f64>() / len;
            Ok(s.powf(1.0 / r))
        }
        AverageTag::Orlicz(b) => luxemburg_slice(b, vals),
    }
}

/// The `X`-average `‖f‖_{X,Q}` for `X = L^r` or an Orlicz space.
pub fn x_average(f: &GridFunction, cube: &Cube, tag: &AverageTag) -> Result<f64> {
    let grid = f.grid();
    grid.check_cube(cube)?;
    let mut vals = Vec::with_capacity(cube.cell_count(grid));
    grid.for_each_cell(cube, |c| vals.push(f.get(c)));
    average_slice(tag, &vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::luxemburg_average;

    fn half() -> GridFunction {
        let g = Grid::unit(1, 8).unwrap();
        GridFunction::from_fn(g, |x| if x[0] < 0.5 { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn lp_examples() {
        let g = Grid::unit(2, 4).unwrap();
        let one = GridFunction::constant(g, 1.0).unwrap();
        for p in [0.5, 1.0, 3.0] {
            assert!((lp_norm(&one, p, None).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!((lp_norm(&half(), 2.0, None).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(lp_norm(&one, 0.0, None).is_err());
    }

    #[test]
    fn weak_examples() {
        let f = half();
        assert!((weak_norm(&f, 2.0, None).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(weak_norm(&GridFunction::zeros(*f.grid()), 1.0, None).unwrap(), 0.0);
        // two levels: 2 on a quarter, 1 on another quarter
        let g = *f.grid();
        let two = GridFunction::nonnegative(g, vec![2.0, 2.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let w = weak_norm(&two, 1.0, None).unwrap();
        assert!((w - 0.5).abs() < 1e-15);
        let w = weak_norm(&two, 0.5, None).unwrap();
        assert!((w - 0.25).abs() < 1e-15);
    }

    #[test]
    fn x_average_tags() {
        let f = half();
        let q = f.grid().full_cube();
        assert_eq!(x_average(&f, &q, &AverageTag::L1).unwrap(), 0.5);
        assert!((x_average(&f, &q, &AverageTag::Lr(2.0)).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let b = YoungFunction::llogl(1.0);
        assert_eq!(
            x_average(&f, &q, &AverageTag::Orlicz(b.clone())).unwrap(),
            luxemburg_average(&b, &f, &q).unwrap()
        );
    }

    #[test]
    fn measures_add() {
        let g = Grid::unit(1, 8).unwrap();
        let u = WeightedMeasure::new(GridFunction::from_fn(g, |x| x[0]).unwrap()).unwrap();
        let total = u.measure(0..8);
        assert!((u.measure(0..3) + u.measure(3..8) - total).abs() < 1e-15);
        assert_eq!(u.measure(std::iter::empty()), 0.0);
        assert!((u.cube(&g.full_cube()) - total).abs() < 1e-15);
    }
}
