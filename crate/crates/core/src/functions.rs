//! Input functions described by recipes, sampled at cell centers.
//!
//! Recipes describe functions on the continuum, so the same recipe sampled on a
//! finer grid is a refinement of the same function.
//!
//! | recipe | meaning |
//! |---|---|
//! | `const:c` | `c` everywhere |
//! | `indicator:(a,b)` | 1 on `[a,b)^n` |
//! | `ball:(amp,r,c1[,c2,c3])` | `amp` on the open ball |
//! | `bump:(amp,r,c1[,c2,c3])` | `amp (1 - |x-c|^2/r^2)_+^2` |
//! | `sum:(t1,t2,...)` | pointwise sum |
//! | `random:seed` or `random:(seed,lo,hi)` | 1 to 3 balls and bumps inside `[lo,hi]^n` |
//! | `file:path` | fixture file, `.csv` or binary |

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{read_fixture, FixtureFormat, Grid, GridFunction};
use crate::recipe::{Arg, Term};

pub fn build_function(recipe: &str, grid: &Grid) -> Result<GridFunction> {
    build_function_term(&Term::parse(recipe)?, grid)
}

pub fn build_function_term(t: &Term, grid: &Grid) -> Result<GridFunction> {
    match t.name.as_str() {
        "file" => {
            let path = &t.term(0)?.name;
            let f = read_fixture(Path::new(path), FixtureFormat::from_path(Path::new(path)))?;
            if f.grid() != grid {
                return Err(Error::Fixture(format!(
                    "{path} holds a grid with N = {}, n = {}; expected N = {}, n = {}",
                    f.grid().cells_per_side(),
                    f.grid().dim(),
                    grid.cells_per_side(),
                    grid.dim()
                )));
            }
            Ok(f)
        }
        "random" => {
            t.expect_arity(1, 3)?;
            let seed = t.num(0)?;
            let lo = t.num_or(1, 0.0)?;
            let hi = t.num_or(2, 1.0)?;
            if !(0.0..hi).contains(&lo) || hi > grid.extent() {
                return Err(t.bad("support bounds must satisfy 0 <= lo < hi <= L"));
            }
            let expanded = random_recipe(seed as u64, grid.dim(), lo, hi);
            build_function_term(&expanded, grid)
        }
        _ => {
            let eval = shape(t, grid.dim())?;
            GridFunction::from_fn(*grid, |x| eval(x))
        }
    }
}

type Shape = Box<dyn Fn(&[f64]) -> f64>;

fn center_of(t: &Term, from: usize, dim: usize) -> Result<Vec<f64>> {
    let given = t.args.len() - from;
    if given == 1 {
        return Ok(vec![t.num(from)?; dim]);
    }
    if given != dim {
        return Err(t.bad(&format!("center needs 1 or {dim} coordinates")));
    }
    (from..t.args.len()).map(|i| t.num(i)).collect()
}

fn dist2(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn shape(t: &Term, dim: usize) -> Result<Shape> {
    match t.name.as_str() {
        "const" => {
            t.expect_arity(0, 1)?;
            let c = t.num_or(0, 1.0)?;
            Ok(Box::new(move |_| c))
        }
        "indicator" => {
            t.expect_arity(2, 2)?;
            let (a, b) = (t.num(0)?, t.num(1)?);
            Ok(Box::new(move |x| {
                if x.iter().all(|v| (a..b).contains(v)) {
                    1.0
                } else {
                    0.0
                }
            }))
        }
        "ball" | "bump" => {
            t.expect_arity(3, 2 + dim)?;
            let amp = t.num(0)?;
            let r = t.num(1)?;
            if !(r > 0.0) {
                return Err(t.bad("radius must be positive"));
            }
            let c = center_of(t, 2, dim)?;
            if t.name == "ball" {
                Ok(Box::new(move |x| if dist2(x, &c) < r * r { amp } else { 0.0 }))
            } else {
                Ok(Box::new(move |x| {
                    let s = 1.0 - dist2(x, &c) / (r * r);
                    if s > 0.0 {
                        amp * s * s
                    } else {
                        0.0
                    }
                }))
            }
        }
        "sum" => {
            let parts: Vec<Shape> = t
                .args
                .iter()
                .map(|a| match a {
                    Arg::Term(inner) => shape(inner, dim),
                    Arg::Num(c) => {
                        let c = *c;
                        Ok(Box::new(move |_: &[f64]| c) as Shape)
                    }
                })
                .collect::<Result<_>>()?;
            Ok(Box::new(move |x| parts.iter().map(|p| p(x)).sum()))
        }
        other => Err(t.bad(&format!("unknown function recipe `{other}`"))),
    }
}

/// The explicit recipe behind `random:(seed,lo,hi)`.
pub fn random_recipe(seed: u64, dim: usize, lo: f64, hi: f64) -> Term {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = hi - lo;
    let count = rng.random_range(1..=3);
    let parts = (0..count)
        .map(|_| {
            let r = width * rng.random_range(0.05..0.2);
            let amp = rng.random_range(0.5..2.0);
            let name = if rng.random_bool(0.5) { "ball" } else { "bump" };
            let mut args = vec![Arg::Num(round6(amp)), Arg::Num(round6(r))];
            for _ in 0..dim {
                args.push(Arg::Num(round6(rng.random_range(lo + r..hi - r))));
            }
            Arg::Term(Term {
                name: name.into(),
                args,
            })
        })
        .collect();
    Term {
        name: "sum".into(),
        args: parts,
    }
}

/// Rounds so the printed recipe reproduces the function exactly.
fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_recipes() {
        let g = Grid::unit(1, 8).unwrap();
        let c = build_function("const:2.5", &g).unwrap();
        assert!(c.values().iter().all(|v| *v == 2.5));
        let ind = build_function("indicator:(0,0.5)", &g).unwrap();
        assert_eq!(ind.values().iter().sum::<f64>(), 4.0);
        let b = build_function("ball:(3,0.2,0.5)", &g).unwrap();
        assert_eq!(b.values().iter().filter(|v| **v == 3.0).count(), 4);
        assert!(build_function("nope", &g).is_err());
    }

    #[test]
    fn random_is_reproducible_and_supported() {
        let g = Grid::unit(2, 16).unwrap();
        let a = build_function("random:(7,0.35,0.65)", &g).unwrap();
        let b = build_function("random:(7,0.35,0.65)", &g).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_zero());
        for c in 0..g.len() {
            let x = g.center(c);
            if a.get(c) > 0.0 {
                assert!((0.35..=0.65).contains(&x[0]) && (0.35..=0.65).contains(&x[1]));
            }
        }
        let expanded = random_recipe(7, 2, 0.35, 0.65).to_string();
        assert_eq!(build_function(&expanded, &g).unwrap(), a);
    }
}
