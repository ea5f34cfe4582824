//! Level-set decomposition into maximal dyadic cubes.
//!
//! For a cube functional `F` and `a > 2^{mn}`, level `k` selects the maximal dyadic
//! cubes with `F(Q) > a^k`; their union is `Ω_k` and `E_{k,j} = Q_{k,j} \ Ω_{k+1}`.

use serde::Serialize;

use super::{Cube, CubeFamily, Grid};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct CzLevel {
    pub k: i32,
    pub threshold: f64,
    pub cubes: Vec<Cube>,
    pub values: Vec<f64>,
    /// Per-cell membership in `Ω_k`.
    #[serde(skip)]
    pub omega: Vec<bool>,
    /// Cells of `E_{k,j}`, one list per selected cube.
    #[serde(skip)]
    pub e_sets: Vec<Vec<usize>>,
}

/// The whole box with the cells outside the coarsest level set.
#[derive(Clone, Debug, Serialize)]
pub struct CzRoot {
    pub cube: Cube,
    pub value: f64,
    #[serde(skip)]
    pub e_set: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CzDecomposition {
    pub a: f64,
    /// Growth factor allowed between parent and child, `2^{mn}`.
    pub upper_factor: f64,
    pub levels: Vec<CzLevel>,
    pub root: Option<CzRoot>,
    #[serde(skip)]
    grid: Option<Grid>,
}

/// Outcome of the structural checks on a decomposition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CzInvariants {
    pub nested: bool,
    pub cubes_disjoint: bool,
    pub e_disjoint: bool,
    pub level_bounds: bool,
    /// Largest `F(Q) / (2^{mn} a^k)` over selected cubes; at most 1 when the bounds hold.
    pub worst_upper: f64,
    /// Smallest `F(Q) / a^k`; strictly above 1 when the bounds hold.
    pub worst_lower: f64,
    /// Measured `max |Q_{k,j}| / |E_{k,j}|`; infinite when some `E_{k,j}` is empty.
    pub beta: f64,
}

impl CzInvariants {
    pub fn holds(&self) -> bool {
        self.nested && self.cubes_disjoint && self.e_disjoint && self.level_bounds
    }
}

/// Decomposes the box at every level `k` in `k_range` (inclusive), or at the levels
/// between the box value and the largest dyadic value when `k_range` is `None`.
///
/// `functional` is evaluated once on every dyadic cube. `m` only enters the
/// admissibility bound `a > 2^{mn}`.
pub fn czd_decompose(
    grid: &Grid,
    m: usize,
    functional: impl Fn(&Cube) -> f64,
    a: f64,
    k_range: Option<(i32, i32)>,
) -> Result<CzDecomposition> {
    let upper_factor = 2f64.powi((m * grid.dim()) as i32);
    if !(a > upper_factor) {
        return Err(Error::CzParameter {
            a,
            bound: upper_factor,
        });
    }
    let tree = CubeFamily::dyadic_levels(grid);
    let values: Vec<Vec<f64>> = tree
        .iter()
        .map(|lvl| lvl.iter().map(|c| functional(c)).collect())
        .collect();
    let box_value = values[0][0];
    let max_value = values
        .iter()
        .flatten()
        .copied()
        .fold(0.0f64, f64::max);

    let mut out = CzDecomposition {
        a,
        upper_factor,
        levels: Vec::new(),
        root: None,
        grid: Some(*grid),
    };
    if !(max_value > 0.0) {
        return Ok(out);
    }
    let ln_a = a.ln();
    let (k_lo, k_hi) = match k_range {
        Some(r) => r,
        None => {
            let mut k_hi = (max_value.ln() / ln_a).ceil() as i32;
            while a.powi(k_hi) >= max_value {
                k_hi -= 1;
            }
            // smallest k with a^k >= F(box), so the box itself is never selected
            let k_lo = if box_value > 0.0 {
                let mut k = (box_value.ln() / ln_a).ceil() as i32;
                while a.powi(k) < box_value {
                    k += 1;
                }
                while a.powi(k - 1) >= box_value {
                    k -= 1;
                }
                k
            } else {
                k_hi
            };
            (k_lo, k_hi)
        }
    };

    for k in k_lo..=k_hi {
        let threshold = a.powi(k);
        let mut level = CzLevel {
            k,
            threshold,
            cubes: Vec::new(),
            values: Vec::new(),
            omega: vec![false; grid.len()],
            e_sets: Vec::new(),
        };
        // walk coarse to fine, skipping cubes already covered by a selected ancestor
        for (depth, cubes) in tree.iter().enumerate() {
            for (i, cube) in cubes.iter().enumerate() {
                let v = values[depth][i];
                if v > threshold && !level.omega[grid.flat_index(&cube.anchor)] {
                    level.cubes.push(*cube);
                    level.values.push(v);
                    grid.for_each_cell(cube, |c| level.omega[c] = true);
                }
            }
        }
        out.levels.push(level);
    }

    for i in 0..out.levels.len() {
        let next = out.levels.get(i + 1).map(|l| l.omega.clone());
        let level = &mut out.levels[i];
        level.e_sets = level
            .cubes
            .iter()
            .map(|cube| {
                let mut e = Vec::new();
                grid.for_each_cell(cube, |c| {
                    if next.as_ref().map_or(true, |o| !o[c]) {
                        e.push(c);
                    }
                });
                e
            })
            .collect();
    }

    let box_cube = grid.full_cube();
    let coarsest = out.levels.first().map(|l| l.omega.clone());
    let e_set = (0..grid.len())
        .filter(|&c| coarsest.as_ref().map_or(true, |o| !o[c]))
        .collect();
    out.root = Some(CzRoot {
        cube: box_cube,
        value: box_value,
        e_set,
    });
    Ok(out)
}

impl CzDecomposition {
    pub fn is_empty(&self) -> bool {
        self.levels.iter().all(|l| l.cubes.is_empty())
    }

    pub fn cube_count(&self) -> usize {
        self.levels.iter().map(|l| l.cubes.len()).sum()
    }

    /// Checks nesting, disjointness and the two-sided level bounds.
    pub fn invariants(&self) -> CzInvariants {
        let mut inv = CzInvariants {
            nested: true,
            cubes_disjoint: true,
            e_disjoint: true,
            level_bounds: true,
            worst_upper: 0.0,
            worst_lower: f64::INFINITY,
            beta: 1.0,
        };
        let Some(grid) = self.grid else {
            return inv;
        };
        let tol = 1e-12;
        for pair in self.levels.windows(2) {
            if pair[1].omega.iter().zip(&pair[0].omega).any(|(&fine, &coarse)| fine && !coarse) {
                inv.nested = false;
            }
        }
        let mut owner = vec![false; grid.len()];
        if let Some(root) = &self.root {
            for &c in &root.e_set {
                owner[c] = true;
            }
        }
        for level in &self.levels {
            let mut covered = vec![false; grid.len()];
            for (j, cube) in level.cubes.iter().enumerate() {
                grid.for_each_cell(cube, |c| {
                    if covered[c] {
                        inv.cubes_disjoint = false;
                    }
                    covered[c] = true;
                });
                for &c in &level.e_sets[j] {
                    if owner[c] {
                        inv.e_disjoint = false;
                    }
                    owner[c] = true;
                }
                let v = level.values[j];
                let lower = v / level.threshold;
                let upper = v / (self.upper_factor * level.threshold);
                inv.worst_lower = inv.worst_lower.min(lower);
                inv.worst_upper = inv.worst_upper.max(upper);
                if !(lower > 1.0) || upper > 1.0 + tol {
                    inv.level_bounds = false;
                }
                let e = level.e_sets[j].len();
                let ratio = if e == 0 {
                    f64::INFINITY
                } else {
                    cube.cell_count(&grid) as f64 / e as f64
                };
                inv.beta = inv.beta.max(ratio);
            }
        }
        inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{average, GridFunction};

    fn frac_functional(f: &GridFunction) -> impl Fn(&Cube) -> f64 + '_ {
        move |q: &Cube| {
            let g = f.grid();
            q.measure(g).powf(0.5) * average(f, q).unwrap()
        }
    }

    #[test]
    fn zero_input_gives_empty_decomposition() {
        let g = Grid::unit(1, 8).unwrap();
        let f = GridFunction::zeros(g);
        let d = czd_decompose(&g, 1, frac_functional(&f), 3.0, None).unwrap();
        assert!(d.is_empty());
        assert!(d.root.is_none());
    }

    #[test]
    fn rejects_small_a() {
        let g = Grid::unit(1, 8).unwrap();
        let f = GridFunction::zeros(g);
        assert!(czd_decompose(&g, 2, frac_functional(&f), 4.0, None).is_err());
    }

    #[test]
    fn single_bump_gives_a_chain() {
        let g = Grid::unit(1, 8).unwrap();
        let mut v = vec![0.0; 8];
        v[5] = 64.0;
        let f = GridFunction::nonnegative(g, v).unwrap();
        let d = czd_decompose(&g, 1, |q| average(&f, q).unwrap(), 3.0, None).unwrap();
        // every selected cube contains cell 5, one per level
        for level in &d.levels {
            assert!(level.cubes.len() <= 1);
            for c in &level.cubes {
                assert!(g.cube_contains_cell(c, 5));
            }
        }
        assert!(d.invariants().holds());
        // averages 8, 16, 32, 64 along the chain: thresholds 9 and 27 pick sides 4 and 2
        assert_eq!(d.cube_count(), 2);
        assert_eq!(d.levels[0].cubes, vec![Cube::new(&[4], 4)]);
        assert_eq!(d.levels[1].cubes, vec![Cube::new(&[4], 2)]);
    }

    #[test]
    fn box_is_never_selected() {
        let g = Grid::unit(2, 8).unwrap();
        let f = GridFunction::from_fn(g, |x| 1.0 + 10.0 * x[0] * x[1]).unwrap();
        let d = czd_decompose(&g, 1, frac_functional(&f), 5.0, None).unwrap();
        for level in &d.levels {
            assert!(level.cubes.iter().all(|c| c.side < 8));
        }
        assert!(d.invariants().holds());
    }
}
