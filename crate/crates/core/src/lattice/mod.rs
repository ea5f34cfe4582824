//! Discrete model of a box in R^n: uniform cell lattices, grid functions sampled
//! at cell centers, lattice-aligned cubes and the cube families the maximal
//! operators take suprema over.
//!
//! Functions live on a fixed box and are extended by zero outside it. Flat cell
//! indices are row-major with the last axis contiguous.

mod czd;
mod io;

pub use czd::{czd_decompose, CzDecomposition, CzInvariants, CzLevel, CzRoot};
pub use io::{read_fixture, write_fixture, FixtureFormat};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// Multi-index of a cell; entries past `dim` are zero.
pub type CellIndex = [usize; MAX_DIM];

/// Uniform lattice of `cells^dim` cells over the box `[0, extent)^dim`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    cells: usize,
    extent: f64,
}

impl Grid {
    pub fn new(dim: usize, cells: usize, extent: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if cells < 2 || !cells.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "cells per side must be a power of two >= 2, got {cells}"
            )));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidGrid(format!("extent must be positive, got {extent}")));
        }
        Ok(Self { dim, cells, extent })
    }

    /// Grid over the unit box.
    pub fn unit(dim: usize, cells: usize) -> Result<Self> {
        Self::new(dim, cells, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// Cell side `h = L / N`; exact because `N` is a power of two.
    pub fn cell_size(&self) -> f64 {
        self.extent / self.cells as f64
    }

    /// `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.cell_size().powi(self.dim as i32)
    }

    /// Number of cells, `N^n`.
    pub fn len(&self) -> usize {
        self.cells.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Measure of the whole box.
    pub fn box_measure(&self) -> f64 {
        self.extent.powi(self.dim as i32)
    }

    pub fn multi_index(&self, flat: usize) -> CellIndex {
        let mut idx = [0; MAX_DIM];
        let mut rest = flat;
        for d in (0..self.dim).rev() {
            idx[d] = rest % self.cells;
            rest /= self.cells;
        }
        idx
    }

    pub fn flat_index(&self, idx: &CellIndex) -> usize {
        idx[..self.dim]
            .iter()
            .fold(0, |acc, &i| acc * self.cells + i)
    }

    /// Coordinates of the center of a cell.
    pub fn center(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.multi_index(flat);
        let h = self.cell_size();
        let mut x = [0.0; MAX_DIM];
        for d in 0..self.dim {
            x[d] = (idx[d] as f64 + 0.5) * h;
        }
        x
    }

    /// Box center.
    pub fn midpoint(&self) -> [f64; MAX_DIM] {
        let mut c = [0.0; MAX_DIM];
        for v in c.iter_mut().take(self.dim) {
            *v = 0.5 * self.extent;
        }
        c
    }

    /// The cube covering the whole box.
    pub fn full_cube(&self) -> Cube {
        Cube {
            anchor: [0; MAX_DIM],
            side: self.cells,
        }
    }

    pub fn contains_cube(&self, cube: &Cube) -> bool {
        cube.side >= 1
            && cube.side <= self.cells
            && (0..self.dim).all(|d| cube.anchor[d] + cube.side <= self.cells)
            && (self.dim..MAX_DIM).all(|d| cube.anchor[d] == 0)
    }

    pub fn check_cube(&self, cube: &Cube) -> Result<()> {
        if self.contains_cube(cube) {
            Ok(())
        } else {
            Err(Error::CubeOutOfBounds {
                anchor: cube.anchor[..self.dim].to_vec(),
                side: cube.side,
                cells: self.cells,
            })
        }
    }

    /// Calls `visit` with the flat index of every cell of `cube`, in row-major order.
    pub fn for_each_cell(&self, cube: &Cube, mut visit: impl FnMut(usize)) {
        let n = self.cells;
        let [a0, a1, a2] = cube.anchor;
        let k = cube.side;
        match self.dim {
            1 => (a0..a0 + k).for_each(visit),
            2 => {
                for i in a0..a0 + k {
                    let row = i * n;
                    for j in a1..a1 + k {
                        visit(row + j);
                    }
                }
            }
            _ => {
                for i in a0..a0 + k {
                    for j in a1..a1 + k {
                        let row = (i * n + j) * n;
                        for l in a2..a2 + k {
                            visit(row + l);
                        }
                    }
                }
            }
        }
    }

    /// Flat indices of the cells of `cube`, row-major.
    pub fn cube_cells(&self, cube: &Cube) -> Vec<usize> {
        let mut out = Vec::with_capacity(cube.side.pow(self.dim as u32));
        self.for_each_cell(cube, |c| out.push(c));
        out
    }

    /// Whether a cell lies in a cube.
    pub fn cube_contains_cell(&self, cube: &Cube, flat: usize) -> bool {
        let idx = self.multi_index(flat);
        (0..self.dim).all(|d| idx[d] >= cube.anchor[d] && idx[d] < cube.anchor[d] + cube.side)
    }

    /// The concentric cube with three times the side, clipped to the box.
    /// Returns the per-axis cell ranges as a box (it need not be a cube after clipping).
    pub fn tripled_clipped(&self, cube: &Cube) -> CellBox {
        let mut lo = [0; MAX_DIM];
        let mut hi = [1; MAX_DIM];
        for d in 0..self.dim {
            lo[d] = cube.anchor[d].saturating_sub(cube.side);
            hi[d] = (cube.anchor[d] + 2 * cube.side).min(self.cells);
        }
        CellBox { lo, hi }
    }
}

/// Axis-aligned block of cells `lo[d] .. hi[d]`; used for clipped dilations of cubes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellBox {
    pub lo: CellIndex,
    pub hi: CellIndex,
}

impl CellBox {
    pub fn cell_count(&self, grid: &Grid) -> usize {
        (0..grid.dim()).map(|d| self.hi[d] - self.lo[d]).product()
    }

    pub fn for_each_cell(&self, grid: &Grid, mut visit: impl FnMut(usize)) {
        let n = grid.cells_per_side();
        match grid.dim() {
            1 => (self.lo[0]..self.hi[0]).for_each(visit),
            2 => {
                for i in self.lo[0]..self.hi[0] {
                    for j in self.lo[1]..self.hi[1] {
                        visit(i * n + j);
                    }
                }
            }
            _ => {
                for i in self.lo[0]..self.hi[0] {
                    for j in self.lo[1]..self.hi[1] {
                        for l in self.lo[2]..self.hi[2] {
                            visit((i * n + j) * n + l);
                        }
                    }
                }
            }
        }
    }
}

/// Lattice-aligned cube: anchor cell plus side length in cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cube {
    pub anchor: CellIndex,
    pub side: usize,
}

impl Cube {
    pub fn new(anchor: &[usize], side: usize) -> Self {
        let mut a = [0; MAX_DIM];
        a[..anchor.len()].copy_from_slice(anchor);
        Self { anchor: a, side }
    }

    /// `|Q| = (k h)^n`.
    pub fn measure(&self, grid: &Grid) -> f64 {
        (self.side as f64 * grid.cell_size()).powi(grid.dim() as i32)
    }

    pub fn side_length(&self, grid: &Grid) -> f64 {
        self.side as f64 * grid.cell_size()
    }

    pub fn cell_count(&self, grid: &Grid) -> usize {
        self.side.pow(grid.dim() as u32)
    }

    pub fn is_dyadic(&self, grid: &Grid) -> bool {
        let n = grid.cells_per_side();
        self.side.is_power_of_two()
            && n % self.side == 0
            && (0..grid.dim()).all(|d| self.anchor[d] % self.side == 0)
    }

    /// Dyadic parent, if this dyadic cube is not the whole box.
    pub fn dyadic_parent(&self, grid: &Grid) -> Option<Cube> {
        if self.side >= grid.cells_per_side() {
            return None;
        }
        let side = self.side * 2;
        let mut anchor = [0; MAX_DIM];
        for d in 0..grid.dim() {
            anchor[d] = self.anchor[d] / side * side;
        }
        Some(Cube { anchor, side })
    }

    /// The `2^n` dyadic children; empty for a single cell.
    pub fn dyadic_children(&self, grid: &Grid) -> Vec<Cube> {
        if self.side < 2 {
            return Vec::new();
        }
        let half = self.side / 2;
        let dim = grid.dim();
        (0..1usize << dim)
            .map(|bits| {
                let mut anchor = self.anchor;
                for d in 0..dim {
                    // bit for axis 0 is the most significant so children come out row-major
                    if bits >> (dim - 1 - d) & 1 == 1 {
                        anchor[d] += half;
                    }
                }
                Cube { anchor, side: half }
            })
            .collect()
    }
}

/// Which cubes a supremum ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CubeFamily {
    /// Every lattice-aligned cube inside the box.
    All,
    /// Cubes of side `N / 2^j` anchored at multiples of their side.
    Dyadic,
    /// Lattice cubes of physical side length at most `2^k`.
    Truncated(i32),
}

impl CubeFamily {
    pub fn admits(&self, grid: &Grid, cube: &Cube) -> bool {
        grid.contains_cube(cube)
            && match *self {
                CubeFamily::All => true,
                CubeFamily::Dyadic => cube.is_dyadic(grid),
                CubeFamily::Truncated(k) => cube.side_length(grid) <= 2f64.powi(k),
            }
    }

    fn admits_side(&self, grid: &Grid, side: usize) -> bool {
        match *self {
            CubeFamily::All => true,
            CubeFamily::Dyadic => side.is_power_of_two(),
            CubeFamily::Truncated(k) => side as f64 * grid.cell_size() <= 2f64.powi(k),
        }
    }

    /// All members, anchor-major (row-major over anchors) then by increasing side.
    pub fn enumerate(&self, grid: &Grid) -> Vec<Cube> {
        let n = grid.cells_per_side();
        let mut out = Vec::new();
        for flat in 0..grid.len() {
            let anchor = grid.multi_index(flat);
            let room = (0..grid.dim()).map(|d| n - anchor[d]).min().unwrap_or(n);
            for side in 1..=room {
                if !self.admits_side(grid, side) {
                    continue;
                }
                let cube = Cube { anchor, side };
                if *self == CubeFamily::Dyadic && !cube.is_dyadic(grid) {
                    continue;
                }
                out.push(cube);
            }
        }
        out
    }

    /// Dyadic cubes ordered coarse to fine; within a level, row-major by anchor.
    pub fn dyadic_levels(grid: &Grid) -> Vec<Vec<Cube>> {
        let mut levels = vec![vec![grid.full_cube()]];
        while levels.last().map_or(false, |l| l[0].side > 1) {
            let next: Vec<Cube> = levels
                .last()
                .unwrap()
                .iter()
                .flat_map(|c| c.dyadic_children(grid))
                .collect();
            levels.push(next);
        }
        for level in &mut levels {
            level.sort_by_key(|c| grid.flat_index(&c.anchor));
        }
        levels
    }
}

/// Whether a grid function is known to be nonnegative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignClass {
    Nonnegative,
    Signed,
}

/// Samples of a function at the cell centers of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
    sign: SignClass,
}

impl GridFunction {
    /// Builds a nonnegative grid function; rejects negative or non-finite samples.
    pub fn nonnegative(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::check_len(&grid, &values)?;
        for (cell, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { cell, value });
            }
            if value < 0.0 {
                return Err(Error::Negative { cell, value });
            }
        }
        Ok(Self {
            grid,
            values,
            sign: SignClass::Nonnegative,
        })
    }

    /// Builds a grid function with no sign constraint.
    pub fn signed(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::check_len(&grid, &values)?;
        if let Some((cell, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { cell, value });
        }
        Ok(Self {
            grid,
            values,
            sign: SignClass::Signed,
        })
    }

    /// Nonnegative when every sample is, signed otherwise.
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.iter().all(|v| *v >= 0.0) {
            Self::nonnegative(grid, values)
        } else {
            Self::signed(grid, values)
        }
    }

    /// Samples `f` at every cell center.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|c| f(&grid.center(c)[..grid.dim()]))
            .collect();
        Self::from_values(grid, values)
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        Self::from_values(grid, vec![c; grid.len()])
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
            sign: SignClass::Nonnegative,
        }
    }

    fn check_len(grid: &Grid, values: &[f64]) -> Result<()> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sign_class(&self) -> SignClass {
        self.sign
    }

    pub fn get(&self, cell: usize) -> f64 {
        self.values[cell]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Pointwise map; the sign class is recomputed.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_values(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn abs(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v.abs()).collect(),
            sign: SignClass::Nonnegative,
        }
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_values(self.grid, values)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    pub fn powf(&self, e: f64) -> Result<Self> {
        self.map(|v| v.abs().powf(e))
    }
}

/// `∫_Q f = h^n Σ_{cells of Q} f`.
pub fn integrate(f: &GridFunction, cube: &Cube) -> Result<f64> {
    let grid = f.grid();
    grid.check_cube(cube)?;
    let mut sum = 0.0;
    grid.for_each_cell(cube, |c| sum += f.values[c]);
    Ok(sum * grid.cell_volume())
}

/// `(1/|Q|) ∫_Q |f|`.
pub fn average(f: &GridFunction, cube: &Cube) -> Result<f64> {
    let grid = f.grid();
    grid.check_cube(cube)?;
    let mut sum = 0.0;
    grid.for_each_cell(cube, |c| sum += f.values[c].abs());
    Ok(sum / cube.cell_count(grid) as f64)
}

/// Members of `family` containing cell `x`, anchor-major then by side.
pub fn cubes_containing(grid: &Grid, x: usize, family: CubeFamily) -> Result<Vec<Cube>> {
    if x >= grid.len() {
        return Err(Error::CellOutOfBounds(x));
    }
    let n = grid.cells_per_side();
    let xi = grid.multi_index(x);
    let dim = grid.dim();
    let mut out = Vec::new();
    for side in 1..=n {
        if !family.admits_side(grid, side) {
            continue;
        }
        // per-axis anchor ranges [max(0, x-side+1), min(x, n-side)]
        let mut lo = [0; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        for d in 0..dim {
            lo[d] = (xi[d] + 1).saturating_sub(side);
            hi[d] = xi[d].min(n - side);
        }
        let block = CellBox {
            lo,
            hi: {
                let mut h = [1; MAX_DIM];
                for d in 0..dim {
                    h[d] = hi[d] + 1;
                }
                h
            },
        };
        block.for_each_cell(grid, |a| {
            let cube = Cube {
                anchor: grid.multi_index(a),
                side,
            };
            if family.admits(grid, &cube) {
                out.push(cube);
            }
        });
    }
    out.sort_by_key(|c| (grid.flat_index(&c.anchor), c.side));
    Ok(out)
}

/// `τ_t f(x) = f(x - t)` with zero extension: cells whose source lies outside the box read 0.
pub fn translate(f: &GridFunction, offset: &[i64]) -> GridFunction {
    let grid = *f.grid();
    let n = grid.cells_per_side() as i64;
    let mut values = vec![0.0; grid.len()];
    for (cell, out) in values.iter_mut().enumerate() {
        let idx = grid.multi_index(cell);
        let mut src = [0usize; MAX_DIM];
        let mut inside = true;
        for d in 0..grid.dim() {
            let s = idx[d] as i64 - offset.get(d).copied().unwrap_or(0);
            if s < 0 || s >= n {
                inside = false;
                break;
            }
            src[d] = s as usize;
        }
        if inside {
            *out = f.values[grid.flat_index(&src)];
        }
    }
    GridFunction {
        grid,
        values,
        sign: f.sign,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> Grid {
        Grid::unit(1, n).unwrap()
    }

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(Grid::unit(1, 6).is_err());
        assert!(Grid::unit(1, 1).is_err());
        assert!(Grid::unit(4, 4).is_err());
        assert!(Grid::new(2, 8, 0.0).is_err());
        let g = Grid::new(2, 8, 3.0).unwrap();
        assert_eq!(g.cell_size() * 8.0, 3.0);
    }

    #[test]
    fn index_roundtrip() {
        let g = Grid::unit(3, 4).unwrap();
        for c in 0..g.len() {
            assert_eq!(g.flat_index(&g.multi_index(c)), c);
        }
        assert_eq!(g.multi_index(1), [0, 0, 1]);
    }

    #[test]
    fn integrate_constant_over_box() {
        let g = Grid::unit(2, 8).unwrap();
        let f = GridFunction::constant(g, 1.0).unwrap();
        assert!((integrate(&f, &g.full_cube()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn integrate_half_indicator() {
        let g = line(8);
        let f = GridFunction::from_fn(g, |x| if x[0] < 0.5 { 1.0 } else { 0.0 }).unwrap();
        assert_eq!(integrate(&f, &g.full_cube()).unwrap(), 0.5);
        assert_eq!(average(&f, &g.full_cube()).unwrap(), 0.5);
    }

    #[test]
    fn out_of_bounds_cube_is_an_error() {
        let g = line(8);
        let f = GridFunction::zeros(g);
        assert!(integrate(&f, &Cube::new(&[5], 4)).is_err());
        assert!(average(&f, &Cube::new(&[0], 0)).is_err());
    }

    #[test]
    fn average_of_constant() {
        let g = Grid::unit(2, 4).unwrap();
        let f = GridFunction::constant(g, 2.5).unwrap();
        assert_eq!(average(&f, &Cube::new(&[1, 1], 2)).unwrap(), 2.5);
    }

    #[test]
    fn cubes_containing_first_cell() {
        // Only anchor 0 keeps an interval containing cell 0 inside [0, 4).
        let g = line(4);
        let cubes = cubes_containing(&g, 0, CubeFamily::All).unwrap();
        assert_eq!(cubes.len(), 4);
        assert_eq!(CubeFamily::All.enumerate(&g).len(), 10);
    }

    #[test]
    fn cubes_containing_matches_anchor_count() {
        for n in [2usize, 4, 8, 16] {
            let g = line(n);
            for x in 0..n {
                let expected: usize = (1..=n)
                    .map(|k| (0..=n - k).filter(|&a| a <= x && x < a + k).count())
                    .sum();
                assert_eq!(cubes_containing(&g, x, CubeFamily::All).unwrap().len(), expected);
            }
        }
    }

    #[test]
    fn dyadic_chain_length() {
        for dim in 1..=3 {
            let g = Grid::unit(dim, 8).unwrap();
            for x in [0, g.len() / 3, g.len() - 1] {
                let cubes = cubes_containing(&g, x, CubeFamily::Dyadic).unwrap();
                assert_eq!(cubes.len(), 4);
            }
        }
    }

    #[test]
    fn truncated_zero_with_unit_cells() {
        let g = Grid::new(1, 8, 8.0).unwrap();
        let cubes = cubes_containing(&g, 3, CubeFamily::Truncated(0)).unwrap();
        assert_eq!(cubes, vec![Cube::new(&[3], 1)]);
    }

    #[test]
    fn enumeration_order_is_anchor_major() {
        let g = line(4);
        let all = CubeFamily::All.enumerate(&g);
        assert_eq!(all[0], Cube::new(&[0], 1));
        assert_eq!(all[3], Cube::new(&[0], 4));
        assert_eq!(all[4], Cube::new(&[1], 1));
        let dy = CubeFamily::Dyadic.enumerate(&g);
        assert_eq!(dy.len(), 7);
        assert!(dy.iter().all(|c| c.is_dyadic(&g)));
    }

    #[test]
    fn dyadic_levels_cover_box() {
        let g = Grid::unit(2, 8).unwrap();
        let levels = CubeFamily::dyadic_levels(&g);
        assert_eq!(levels.len(), 4);
        for level in &levels {
            let covered: usize = level.iter().map(|c| c.cell_count(&g)).sum();
            assert_eq!(covered, g.len());
        }
        let child = levels[2][5];
        let parent = child.dyadic_parent(&g).unwrap();
        assert!(levels[1].contains(&parent));
    }

    #[test]
    fn translate_identity_and_back() {
        let g = line(16);
        let f = GridFunction::from_fn(g, |x| if (0.25..0.5).contains(&x[0]) { 1.0 + x[0] } else { 0.0 })
            .unwrap();
        assert_eq!(translate(&f, &[0]), f);
        let moved = translate(&f, &[3]);
        let sum = |h: &GridFunction| h.values().iter().sum::<f64>();
        assert_eq!(sum(&moved), sum(&f));
        assert_eq!(translate(&moved, &[-3]), f);
        // support pushed out of the box is lost, not wrapped
        let gone = translate(&f, &[12]);
        assert!(gone.is_zero());
    }

    #[test]
    fn nonnegative_constructor_rejects_negatives() {
        let g = line(2);
        assert!(GridFunction::nonnegative(g, vec![1.0, -1.0]).is_err());
        assert!(GridFunction::signed(g, vec![1.0, f64::NAN]).is_err());
        let s = GridFunction::from_values(g, vec![1.0, -1.0]).unwrap();
        assert_eq!(s.sign_class(), SignClass::Signed);
    }

    #[test]
    fn tripled_cube_is_clipped() {
        let g = line(8);
        let b = g.tripled_clipped(&Cube::new(&[0], 2));
        assert_eq!((b.lo[0], b.hi[0]), (0, 4));
        let b = g.tripled_clipped(&Cube::new(&[2], 2));
        assert_eq!((b.lo[0], b.hi[0]), (0, 6));
        assert_eq!(b.cell_count(&g), 6);
    }
}
