use serde::Serialize;

use super::{complementary, log_grid, log_plus, luxemburg_slice, make_psi, YoungFunction};
use crate::error::{Error, Result};
use crate::lattice::{Cube, GridFunction};

const PROBE_POINTS: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condi1Result {
    /// `t^{α/nm} B^{-1}(t^{1-α/nm}) <= (1 + 1e-9) B^{-1}(t)` at every probe point.
    pub passes: bool,
    pub worst_ratio: f64,
    pub worst_t: f64,
    /// The ratio stays bounded: finite, and it grows by less than 1.5x over the
    /// last two decades of the probe. This is the inequality up to a constant.
    pub bounded: bool,
}

/// Scans `t^{α/nm} B^{-1}(t^{1-α/nm}) / B^{-1}(t)` over `t ∈ [1e-6, 1e8]`.
pub fn check_condi1(b: &YoungFunction, n: usize, m: usize, alpha: f64) -> Condi1Result {
    let a = alpha / (n * m) as f64;
    let ts = log_grid(1e-6, 1e8, PROBE_POINTS);
    let ratio = |t: f64| t.powf(a) * b.inverse(t.powf(1.0 - a)) / b.inverse(t);
    let mut worst = 0.0f64;
    let mut worst_t = ts[0];
    for &t in &ts {
        let r = ratio(t);
        if r > worst || r.is_nan() {
            worst = r;
            worst_t = t;
        }
    }
    let tail = ratio(1e8) / ratio(1e6);
    Condi1Result {
        passes: worst <= 1.0 + 1e-9,
        worst_ratio: worst,
        worst_t,
        bounded: worst.is_finite() && tail < 1.5,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrResult {
    pub converges: bool,
    /// Integral up to where the scan stopped, plus the tail estimate when convergent.
    pub integral: f64,
    pub tail_estimate: f64,
    /// `ln T` at which the scan stopped.
    pub log_upper: f64,
}

/// Tests `∫_c^∞ B(t) t^{-r} dt/t < ∞`, integrating in `u = ln t` chunk by chunk.
///
/// Stops as soon as a decaying chunk falls below `1e-8 max(1, I)`. If the scan
/// reaches `u = 2000` the chunk decay is fitted to `u^{-β}` and the tail is
/// declared summable only for `β > 1.01`.
pub fn check_br(b: &YoungFunction, r: f64, c: f64) -> BrResult {
    let h = |u: f64| (b.log_eval(u) - r * u).exp();
    let u0 = c.max(f64::MIN_POSITIVE).ln();
    let u_max = 2000.0;
    let steps = 16;
    let simpson = |a: f64, w: f64| {
        let dx = w / steps as f64;
        let mut s = h(a) + h(a + w);
        for i in 1..steps {
            s += h(a + i as f64 * dx) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * dx / 3.0
    };
    let mut integral = 0.0;
    let mut prev = f64::INFINITY;
    let mut chunks = Vec::new();
    let mut u = u0;
    while u < u0 + u_max {
        let chunk = simpson(u, 1.0);
        u += 1.0;
        if !chunk.is_finite() {
            return BrResult {
                converges: false,
                integral: f64::INFINITY,
                tail_estimate: f64::INFINITY,
                log_upper: u,
            };
        }
        integral += chunk;
        chunks.push(chunk);
        if chunk < prev && chunk < 1e-8 * integral.max(1.0) {
            // geometric tail bound from the last ratio
            let q = chunk / prev;
            let tail = if q < 1.0 { chunk * q / (1.0 - q) } else { 0.0 };
            return BrResult {
                converges: true,
                integral: integral + tail,
                tail_estimate: tail,
                log_upper: u,
            };
        }
        prev = chunk;
    }
    let last = *chunks.last().unwrap();
    let mid = chunks[chunks.len() / 2];
    let (u_end, u_mid) = (u - u0, (chunks.len() / 2) as f64 + 1.0);
    let beta = if last > 0.0 && mid > 0.0 {
        -(last / mid).ln() / (u_end / u_mid).ln()
    } else {
        f64::INFINITY
    };
    if beta > 1.01 {
        let tail = last * u_end / (beta - 1.0);
        BrResult {
            converges: true,
            integral: integral + tail,
            tail_estimate: tail,
            log_upper: u,
        }
    } else {
        BrResult {
            converges: false,
            integral: f64::INFINITY,
            tail_estimate: f64::INFINITY,
            log_upper: u,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub worst_t: f64,
}

impl SandwichReport {
    /// `1 <= B^{-1}(t) B~^{-1}(t) / t <= 2` within relative `1e-6`.
    pub fn holds(&self) -> bool {
        self.min_ratio >= 1.0 - 1e-6 && self.max_ratio <= 2.0 * (1.0 + 1e-6)
    }

    pub fn into_result(self) -> Result<Self> {
        if self.holds() {
            Ok(self)
        } else {
            let ratio = if self.min_ratio < 1.0 - 1e-6 {
                self.min_ratio
            } else {
                self.max_ratio
            };
            Err(Error::SandwichViolation {
                t: self.worst_t,
                ratio,
            })
        }
    }
}

/// Ratios `B^{-1}(t) B~^{-1}(t) / t` on the probe grid.
pub fn sandwich_ratios(b: &YoungFunction) -> SandwichReport {
    let bt = complementary(b);
    let mut rep = SandwichReport {
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
        worst_t: 0.0,
    };
    let mut worst_excess = 0.0;
    for t in log_grid(1e-6, 1e8, PROBE_POINTS) {
        let r = b.inverse(t) * bt.inverse(t) / t;
        rep.min_ratio = rep.min_ratio.min(r);
        rep.max_ratio = rep.max_ratio.max(r);
        let excess = (1.0 - r).max(r - 2.0);
        if excess > worst_excess || rep.worst_t == 0.0 {
            worst_excess = excess;
            rep.worst_t = t;
        }
    }
    rep
}

/// Whether `A^{-1}(t) B^{-1}(t) <= C^{-1}(t)` on the probe grid; also returns the worst ratio.
pub fn inverse_product_holds(a: &YoungFunction, b: &YoungFunction, c: &YoungFunction) -> (bool, f64) {
    let worst = log_grid(1e-6, 1e8, PROBE_POINTS)
        .into_iter()
        .map(|t| a.inverse(t) * b.inverse(t) / c.inverse(t))
        .fold(0.0f64, f64::max);
    (worst <= 1.0 + 1e-9, worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub skipped: Option<String>,
}

impl HolderCheck {
    pub fn passes(&self, rel: f64) -> bool {
        self.skipped.is_some() || self.slack >= -rel * self.rhs
    }
}

fn cube_values(f: &GridFunction, cube: &Cube) -> Vec<f64> {
    let grid = f.grid();
    let mut v = Vec::with_capacity(cube.cell_count(grid));
    grid.for_each_cell(cube, |c| v.push(f.get(c).abs()));
    v
}

/// `‖fg‖_{C,Q} <= 2 ‖f‖_{A,Q} ‖g‖_{B,Q}` when `A^{-1} B^{-1} <= C^{-1}`.
pub fn generalized_holder_check(
    a: &YoungFunction,
    b: &YoungFunction,
    c: &YoungFunction,
    f: &GridFunction,
    g: &GridFunction,
    cube: &Cube,
) -> Result<HolderCheck> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    f.grid().check_cube(cube)?;
    let (ok, worst) = inverse_product_holds(a, b, c);
    if !ok {
        return Ok(HolderCheck {
            lhs: f64::NAN,
            rhs: f64::NAN,
            slack: f64::NAN,
            skipped: Some(format!("A^-1 B^-1 <= C^-1 fails on the probe (worst ratio {worst})")),
        });
    }
    let fv = cube_values(f, cube);
    let gv = cube_values(g, cube);
    let fg: Vec<f64> = fv.iter().zip(&gv).map(|(x, y)| x * y).collect();
    let lhs = luxemburg_slice(c, &fg)?;
    let rhs = 2.0 * luxemburg_slice(a, &fv)? * luxemburg_slice(b, &gv)?;
    Ok(HolderCheck {
        lhs,
        rhs,
        slack: rhs - lhs,
        skipped: None,
    })
}

/// `(1/|Q|) ∫_Q |fg| <= ‖f‖_{B,Q} ‖g‖_{B~,Q}` exactly as stated, with constant 1.
pub fn holder_pair_slack(b: &YoungFunction, f: &GridFunction, g: &GridFunction, cube: &Cube) -> Result<HolderCheck> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    f.grid().check_cube(cube)?;
    let fv = cube_values(f, cube);
    let gv = cube_values(g, cube);
    let lhs = fv.iter().zip(&gv).map(|(x, y)| x * y).sum::<f64>() / fv.len() as f64;
    let rhs = luxemburg_slice(b, &fv)? * luxemburg_slice(&complementary(b), &gv)?;
    Ok(HolderCheck {
        lhs,
        rhs,
        slack: rhs - lhs,
        skipped: None,
    })
}

/// Two-sided bounds of `ψ_k(t) / (t (1 + log^+ t)^{k nm/(nm-α)})` on `t ∈ [1e-4, 1e8]`.
pub fn psi_comparability(k: f64, n: usize, m: usize, alpha: f64) -> Result<(f64, f64)> {
    let psi = make_psi(&YoungFunction::llogl(k), n, m, alpha)?;
    let nm = (n * m) as f64;
    let e = k * nm / (nm - alpha);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for t in log_grid(1e-4, 1e8, PROBE_POINTS) {
        let r = psi.eval(t) / (t * (1.0 + log_plus(t)).powf(e));
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Grid;

    #[test]
    fn condi1_identity_is_equality() {
        let r = check_condi1(&YoungFunction::identity(), 1, 2, 1.0);
        assert!(r.passes && r.bounded);
        assert!((r.worst_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn condi1_exponential_is_unbounded() {
        let b = YoungFunction::custom("exp", |t| t.exp_m1());
        let r = check_condi1(&b, 1, 2, 1.0);
        assert!(!r.passes);
        assert!(!r.bounded);
    }

    #[test]
    fn br_power_cases() {
        assert!(check_br(&YoungFunction::identity(), 2.0, 1.0).converges);
        assert!(!check_br(&YoungFunction::identity(), 1.0, 1.0).converges);
        // t^p/(1+log t)^2 against r = p converges only through the log
        assert!(check_br(&YoungFunction::power_log(1.5, -2.0), 1.5, 1.0).converges);
        assert!(!check_br(&YoungFunction::power_log(1.5, -0.5), 1.5, 1.0).converges);
        let v = check_br(&YoungFunction::identity(), 2.0, 1.0);
        assert!((v.integral - 1.0).abs() < 1e-7);
    }

    #[test]
    fn sandwich_for_builtins() {
        for b in [YoungFunction::identity(), YoungFunction::power(2.0), YoungFunction::llogl(1.0)] {
            let s = sandwich_ratios(&b);
            assert!(s.holds(), "{}: {s:?}", b.label());
        }
    }

    #[test]
    fn cauchy_schwarz_case() {
        let g = Grid::unit(1, 16).unwrap();
        let f = GridFunction::from_fn(g, |x| 1.0 + x[0]).unwrap();
        let h = GridFunction::from_fn(g, |x| (3.0 * x[0]).sin().abs()).unwrap();
        let sq = YoungFunction::power(2.0);
        let r = generalized_holder_check(&sq, &sq, &YoungFunction::identity(), &f, &h, &g.full_cube()).unwrap();
        assert!(r.skipped.is_none() && r.slack >= 0.0);
        let z = GridFunction::zeros(g);
        let r = generalized_holder_check(&sq, &sq, &YoungFunction::identity(), &z, &h, &g.full_cube()).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.slack, r.rhs);
    }

    #[test]
    fn holder_pair_constant_counterexample() {
        // f = g = 1 under t^2: ‖1‖ = 1, ‖1‖ under s^2/4 is 1/2, the average is 1
        let g = Grid::unit(1, 8).unwrap();
        let one = GridFunction::constant(g, 1.0).unwrap();
        let r = holder_pair_slack(&YoungFunction::power(2.0), &one, &one, &g.full_cube()).unwrap();
        assert!((r.rhs - 0.5).abs() < 1e-12);
        assert_eq!(r.lhs, 1.0);
        let r = holder_pair_slack(&YoungFunction::identity(), &one, &one, &g.full_cube()).unwrap();
        assert!(r.slack.abs() < 1e-12);
    }

    #[test]
    fn psi_k_is_comparable() {
        let (lo, hi) = psi_comparability(1.0, 1, 2, 1.0).unwrap();
        assert!(lo > 0.2 && hi < 5.0, "{lo} {hi}");
    }
}
