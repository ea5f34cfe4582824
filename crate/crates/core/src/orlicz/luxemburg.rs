use super::{YoungFunction, YoungKind};
use crate::error::{Error, Result};
use crate::lattice::{Cube, GridFunction};

/// Relative width at which the bisection stops.
pub const LUX_REL_TOL: f64 = 1e-12;
/// Iteration cap, counting bracket expansion.
pub const LUX_MAX_ITER: usize = 200;

/// `‖f‖_{B,Q} = inf { λ > 0 : (1/|Q|) ∫_Q B(|f|/λ) <= 1 }`.
pub fn luxemburg_average(b: &YoungFunction, f: &GridFunction, cube: &Cube) -> Result<f64> {
    let grid = f.grid();
    grid.check_cube(cube)?;
    let mut vals = Vec::with_capacity(cube.cell_count(grid));
    grid.for_each_cell(cube, |c| vals.push(f.get(c).abs()));
    luxemburg_slice(b, &vals)
}

/// Luxemburg average of equally weighted samples `|v_j|`.
pub fn luxemburg_slice(b: &YoungFunction, vals: &[f64]) -> Result<f64> {
    if vals.is_empty() {
        return Ok(0.0);
    }
    let len = vals.len() as f64;
    let (mut sum, mut max) = (0.0f64, 0.0f64);
    for v in vals {
        let a = v.abs();
        sum += a;
        max = max.max(a);
    }
    if max == 0.0 {
        return Ok(0.0);
    }
    // closed forms: the functional is a pure power of 1/λ
    match b.kind() {
        YoungKind::Power { p } if *p == 1.0 => return Ok(sum / len),
        YoungKind::Power { p } => return Ok(power_mean(vals, *p, 1.0)),
        YoungKind::Scaled { coef, base } => {
            if let YoungKind::Power { p } = base.kind() {
                return Ok(power_mean(vals, *p, *coef));
            }
        }
        _ => {}
    }

    let phi = |lambda: f64| {
        let inv = 1.0 / lambda;
        vals.iter().map(|v| b.eval(v.abs() * inv)).sum::<f64>() / len
    };
    let mut iters = 0;
    let mut hi = sum / len + max;
    while phi(hi) > 1.0 {
        hi *= 2.0;
        iters += 1;
        if iters >= LUX_MAX_ITER {
            return Err(Error::NoConvergence(iters));
        }
    }
    let mut lo = 0.5 * hi;
    while phi(lo) <= 1.0 {
        hi = lo;
        lo *= 0.5;
        iters += 1;
        if iters >= LUX_MAX_ITER || lo == 0.0 {
            return Err(Error::NoConvergence(iters));
        }
    }
    while hi - lo > LUX_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iters += 1;
        if iters >= LUX_MAX_ITER {
            return Err(Error::NoConvergence(iters));
        }
    }
    Ok(hi)
}

fn power_mean(vals: &[f64], p: f64, coef: f64) -> f64 {
    let s: f64 = if p == 2.0 {
        vals.iter().map(|v| v * v).sum()
    } else {
        vals.iter().map(|v| v.abs().powf(p)).sum()
    };
    (coef * s / vals.len() as f64).powf(1.0 / p)
}
