//! Young functions, Luxemburg averages and the structural conditions on them.

mod conditions;
mod luxemburg;

pub use conditions::{
    check_br, check_condi1, generalized_holder_check, holder_pair_slack, inverse_product_holds,
    psi_comparability, sandwich_ratios, BrResult, Condi1Result, HolderCheck, SandwichReport,
};
pub use luxemburg::{luxemburg_average, luxemburg_slice, LUX_MAX_ITER, LUX_REL_TOL};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::recipe::Term;

/// `ln t` for `t > 1`, else 0.
pub fn log_plus(t: f64) -> f64 {
    if t > 1.0 {
        t.ln()
    } else {
        0.0
    }
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum YoungKind {
    /// `t^p`.
    Power { p: f64 },
    /// `t^p (1 + log^+ t)^k`; `p = 1` is `L(log L)^k`. `k` may be negative.
    PowerLog { p: f64, k: f64 },
    /// `c B(t)`.
    Scaled { coef: f64, base: YoungFunction },
    /// `B(t^γ)^{1/γ}`, optionally remembering the `(n, m, α)` it was built from.
    Psi {
        base: YoungFunction,
        gamma: f64,
        origin: Option<(usize, usize, f64)>,
    },
    /// `sup_t (s t - B(t))`.
    Complementary { base: YoungFunction },
    Custom { name: String, eval: Evaluator },
}

/// A Young function `B` together with its inverse.
#[derive(Clone)]
pub struct YoungFunction(Arc<YoungKind>);

impl fmt::Debug for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "YoungFunction({})", self.label())
    }
}

impl PartialEq for YoungFunction {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.label() == other.label()
    }
}

const LEGENDRE_T_MAX: f64 = 1e200;

impl YoungFunction {
    pub fn power(p: f64) -> Self {
        Self(Arc::new(YoungKind::Power { p }))
    }

    /// `B(t) = t`.
    pub fn identity() -> Self {
        Self::power(1.0)
    }

    /// `B_k(t) = t (1 + log^+ t)^k`.
    pub fn llogl(k: f64) -> Self {
        if k == 0.0 {
            return Self::identity();
        }
        Self::power_log(1.0, k)
    }

    pub fn power_log(p: f64, k: f64) -> Self {
        Self(Arc::new(YoungKind::PowerLog { p, k }))
    }

    pub fn scaled(coef: f64, base: YoungFunction) -> Self {
        Self(Arc::new(YoungKind::Scaled { coef, base }))
    }

    pub fn custom(name: &str, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(YoungKind::Custom {
            name: name.to_string(),
            eval: Arc::new(eval),
        }))
    }

    /// `B(t^γ)^{1/γ}` for `0 < γ <= 1`.
    pub fn psi_gamma(base: YoungFunction, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!("gamma = {gamma} must lie in (0, 1]")));
        }
        Ok(Self(Arc::new(YoungKind::Psi {
            base,
            gamma,
            origin: None,
        })))
    }

    pub fn kind(&self) -> &YoungKind {
        &self.0
    }

    /// Resolves labels such as `power:2`, `llogl:1`, `powerlog:(2,-1)`,
    /// `psi:(llogl:1,1,2,1)` or `complementary:(power:2)`.
    pub fn from_label(label: &str) -> Result<Self> {
        Self::from_term(&Term::parse(label)?)
    }

    pub fn from_term(t: &Term) -> Result<Self> {
        match t.name.as_str() {
            "identity" | "t" => {
                t.expect_arity(0, 0)?;
                Ok(Self::identity())
            }
            "power" => {
                t.expect_arity(1, 1)?;
                let p = t.num(0)?;
                if !(p >= 1.0 && p.is_finite()) {
                    return Err(t.bad("power exponent must be >= 1"));
                }
                Ok(Self::power(p))
            }
            "llogl" => {
                t.expect_arity(1, 1)?;
                let k = t.num(0)?;
                if !(k >= 0.0 && k.is_finite()) {
                    return Err(t.bad("log exponent must be >= 0"));
                }
                Ok(Self::llogl(k))
            }
            "powerlog" => {
                t.expect_arity(2, 2)?;
                let p = t.num(0)?;
                if !(p >= 1.0 && p.is_finite()) {
                    return Err(t.bad("power exponent must be >= 1"));
                }
                Ok(Self::power_log(p, t.num(1)?))
            }
            "scaled" => {
                t.expect_arity(2, 2)?;
                let c = t.num(0)?;
                if !(c > 0.0 && c.is_finite()) {
                    return Err(t.bad("scale must be positive"));
                }
                Ok(Self::scaled(c, Self::from_term(t.term(1)?)?))
            }
            "psi" => {
                t.expect_arity(4, 4)?;
                let base = Self::from_term(t.term(0)?)?;
                let n = t.num(1)?;
                let m = t.num(2)?;
                if n.fract() != 0.0 || m.fract() != 0.0 || n < 1.0 || m < 1.0 {
                    return Err(t.bad("n and m must be positive integers"));
                }
                make_psi(&base, n as usize, m as usize, t.num(3)?)
            }
            "complementary" => {
                t.expect_arity(1, 1)?;
                Ok(complementary(&Self::from_term(t.term(0)?)?))
            }
            other => Err(t.bad(&format!("unknown Young function `{other}`"))),
        }
    }

    pub fn label(&self) -> String {
        match self.kind() {
            YoungKind::Power { p } if *p == 1.0 => "power:1".to_string(),
            YoungKind::Power { p } => format!("power:{p}"),
            YoungKind::PowerLog { p, k } if *p == 1.0 => format!("llogl:{k}"),
            YoungKind::PowerLog { p, k } => format!("powerlog:({p},{k})"),
            YoungKind::Scaled { coef, base } => format!("scaled:({coef},{})", base.label()),
            YoungKind::Psi {
                base,
                origin: Some((n, m, a)),
                ..
            } => format!("psi:({},{n},{m},{a})", base.label()),
            YoungKind::Psi { base, gamma, .. } => format!("psi_gamma:({},{gamma})", base.label()),
            YoungKind::Complementary { base } => format!("complementary:({})", base.label()),
            YoungKind::Custom { name, .. } => format!("custom:{name}"),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind(), YoungKind::Power { p } if *p == 1.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.kind() {
            YoungKind::Power { p } => {
                if *p == 1.0 {
                    t
                } else if *p == 2.0 {
                    t * t
                } else {
                    t.powf(*p)
                }
            }
            YoungKind::PowerLog { p, k } => {
                let base = if *p == 1.0 { t } else { t.powf(*p) };
                if t <= 1.0 {
                    base
                } else if *k == 1.0 {
                    base * (1.0 + t.ln())
                } else {
                    base * (1.0 + t.ln()).powf(*k)
                }
            }
            YoungKind::Scaled { coef, base } => coef * base.eval(t),
            YoungKind::Psi { base, gamma, .. } => base.eval(t.powf(*gamma)).powf(1.0 / gamma),
            YoungKind::Complementary { base } => legendre(base, t),
            YoungKind::Custom { eval, .. } => eval(t),
        }
    }

    /// `sup { t >= 0 : B(t) <= y }`.
    pub fn inverse(&self, y: f64) -> f64 {
        if y < 0.0 || y.is_nan() {
            return 0.0;
        }
        if y == f64::INFINITY {
            return f64::INFINITY;
        }
        match self.kind() {
            YoungKind::Power { p } => {
                if *p == 1.0 {
                    y
                } else {
                    y.powf(1.0 / p)
                }
            }
            YoungKind::PowerLog { p, .. } if y <= 1.0 => y.powf(1.0 / p),
            YoungKind::Scaled { coef, base } => base.inverse(y / coef),
            YoungKind::Psi { base, gamma, .. } => base.inverse(y.powf(*gamma)).powf(1.0 / gamma),
            YoungKind::Complementary { base } => match base.kind() {
                YoungKind::Power { p } if *p == 1.0 => 1.0,
                _ => self.inverse_by_bisection(y),
            },
            _ => self.inverse_by_bisection(y),
        }
    }

    fn inverse_by_bisection(&self, y: f64) -> f64 {
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.eval(hi) <= y {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
        if lo == 0.0 {
            // shrink toward zero so the bracket is relative
            let mut probe = hi / 2.0;
            while probe > 1e-300 && self.eval(probe) > y {
                hi = probe;
                probe /= 2.0;
            }
            lo = if self.eval(probe) <= y { probe } else { 0.0 };
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) <= y {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        lo
    }

    /// Right derivative `b(t)` where a closed form exists.
    pub fn density(&self, t: f64) -> Option<f64> {
        let t = t.max(0.0);
        match self.kind() {
            YoungKind::Power { p } => Some(if *p == 1.0 { 1.0 } else { p * t.powf(p - 1.0) }),
            YoungKind::PowerLog { p, k } => {
                if t < 1.0 {
                    Some(p * t.powf(p - 1.0))
                } else {
                    let l = 1.0 + t.ln();
                    Some(t.powf(p - 1.0) * l.powf(k - 1.0) * (p * l + k))
                }
            }
            YoungKind::Scaled { coef, base } => base.density(t).map(|b| coef * b),
            _ => None,
        }
    }

    /// `ln B(e^u)`, finite far beyond the range where `B(e^u)` itself overflows.
    pub fn log_eval(&self, u: f64) -> f64 {
        match self.kind() {
            YoungKind::Power { p } => p * u,
            YoungKind::PowerLog { p, k } => p * u + k * (1.0 + u.max(0.0)).ln(),
            YoungKind::Scaled { coef, base } => coef.ln() + base.log_eval(u),
            YoungKind::Psi { base, gamma, .. } => base.log_eval(gamma * u) / gamma,
            _ => self.eval(u.exp()).ln(),
        }
    }

    /// Probes the Young-function axioms on a log-spaced grid.
    pub fn probe(&self) -> YoungProbe {
        let ts = log_grid(1e-6, 1e8, 512);
        let vals: Vec<f64> = ts.iter().map(|&t| self.eval(t)).collect();
        let rel = 1e-9;
        let zero_at_origin = self.eval(0.0) == 0.0;
        let nondecreasing = vals.windows(2).all(|w| w[1] >= w[0] * (1.0 - rel));
        let mut convex = true;
        let mut ratio_increasing = true;
        for i in 1..ts.len() - 1 {
            if !(vals[i + 1].is_finite()) {
                break;
            }
            let s0 = (vals[i] - vals[i - 1]) / (ts[i] - ts[i - 1]);
            let s1 = (vals[i + 1] - vals[i]) / (ts[i + 1] - ts[i]);
            if s1 < s0 - rel * s0.abs().max(f64::MIN_POSITIVE) - 1e-300 {
                convex = false;
            }
        }
        for i in 1..ts.len() {
            let a = vals[i - 1] / ts[i - 1];
            let b = vals[i] / ts[i];
            if b.is_finite() && b < a * (1.0 - rel) {
                ratio_increasing = false;
            }
        }
        let unbounded = self.eval(1e12) > 1e6 || self.eval(1e12) == f64::INFINITY;
        YoungProbe {
            zero_at_origin,
            nondecreasing,
            convex,
            ratio_increasing,
            unbounded,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.probe();
        if p.passes() {
            Ok(())
        } else {
            Err(Error::NotYoung(format!("{} fails probe: {p:?}", self.label())))
        }
    }
}

/// Results of the axiom probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct YoungProbe {
    pub zero_at_origin: bool,
    pub nondecreasing: bool,
    pub convex: bool,
    pub ratio_increasing: bool,
    pub unbounded: bool,
}

impl YoungProbe {
    pub fn passes(&self) -> bool {
        self.zero_at_origin && self.nondecreasing && self.convex && self.ratio_increasing && self.unbounded
    }
}

/// `count` points log-spaced from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// The complementary function `B~(s) = sup_t (s t - B(t))`.
pub fn complementary(b: &YoungFunction) -> YoungFunction {
    YoungFunction(Arc::new(YoungKind::Complementary { base: b.clone() }))
}

fn legendre(b: &YoungFunction, s: f64) -> f64 {
    match b.kind() {
        YoungKind::Power { p } if *p == 1.0 => {
            if s <= 1.0 {
                0.0
            } else {
                f64::INFINITY
            }
        }
        YoungKind::Power { p } => {
            let q = p / (p - 1.0);
            (p - 1.0) * (s / p).powf(q)
        }
        YoungKind::Scaled { coef, base } => coef * legendre(base, s / coef),
        YoungKind::PowerLog { p, k } if *p == 1.0 && *k == 1.0 => {
            // b = 1 below 1 and 2 + ln t above; the kink at t = 1 absorbs slopes in [1, 2]
            if s <= 1.0 {
                0.0
            } else if s <= 2.0 {
                s - 1.0
            } else {
                (s - 2.0).exp()
            }
        }
        _ => legendre_numeric(b, s),
    }
}

/// Golden-section maximization of the concave `t -> s t - B(t)` in `ln t`.
fn legendre_numeric(b: &YoungFunction, s: f64) -> f64 {
    let g = |t: f64| s * t - b.eval(t);
    // bracket the maximizer by doubling
    let mut hi = 1.0;
    while g(2.0 * hi) > g(hi) {
        hi *= 2.0;
        if hi > LEGENDRE_T_MAX {
            return f64::INFINITY;
        }
    }
    let hi = 2.0 * hi;
    let mut lo = hi / 4.0;
    while lo > 1e-300 && g(lo / 2.0) >= g(lo) {
        lo /= 2.0;
    }
    let lo = (lo / 2.0).max(1e-300);
    let (mut a, mut c) = (lo.ln(), hi.ln());
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = c - phi * (c - a);
    let mut x2 = a + phi * (c - a);
    let mut g1 = g(x1.exp());
    let mut g2 = g(x2.exp());
    for _ in 0..200 {
        if c - a < 1e-13 {
            break;
        }
        if g1 < g2 {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + phi * (c - a);
            g2 = g(x2.exp());
        } else {
            c = x2;
            x2 = x1;
            g2 = g1;
            x1 = c - phi * (c - a);
            g1 = g(x1.exp());
        }
    }
    g1.max(g2).max(0.0)
}

/// `ψ(t) = B(t^γ)^{1/γ}` with `γ = 1 - α/(nm)`.
pub fn make_psi(b: &YoungFunction, n: usize, m: usize, alpha: f64) -> Result<YoungFunction> {
    let nm = (n * m) as f64;
    if !(alpha > 0.0 && alpha < nm) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            range: format!("(0, {nm})"),
        });
    }
    let gamma = 1.0 - alpha / nm;
    if b.is_identity() {
        return Ok(b.clone());
    }
    Ok(YoungFunction(Arc::new(YoungKind::Psi {
        base: b.clone(),
        gamma,
        origin: Some((n, m, alpha)),
    })))
}

/// An essentially nondecreasing `φ: (0, ∞) → (0, ∞)` replacing `|Q|^{α/n}`.
#[derive(Clone)]
pub struct PhiFunction {
    label: String,
    eval: Evaluator,
    rho: f64,
    vanishes: bool,
}

impl fmt::Debug for PhiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhiFunction")
            .field("label", &self.label)
            .field("rho", &self.rho)
            .field("vanishes", &self.vanishes)
            .finish()
    }
}

/// Largest accepted essential-monotonicity constant.
pub const PHI_RHO_LIMIT: f64 = 1e3;

impl PhiFunction {
    /// Wraps `φ`, measuring `ρ = sup_{t <= s} φ(t)/φ(s)` on a log probe grid.
    pub fn new(label: &str, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let ts = log_grid(1e-12, 1e12, 481);
        let mut running_max: f64 = 0.0;
        let mut rho: f64 = 1.0;
        for &t in &ts {
            let v = eval(t);
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("phi({t}) = {v} is not positive")));
            }
            running_max = running_max.max(v);
            rho = rho.max(running_max / v);
        }
        if rho > PHI_RHO_LIMIT {
            return Err(Error::PhiNotMonotone {
                rho,
                limit: PHI_RHO_LIMIT,
            });
        }
        let vanishes = eval(1e12) / 1e12 <= 1e-6 * eval(1.0).max(1.0);
        Ok(Self {
            label: label.to_string(),
            eval: Arc::new(eval),
            rho,
            vanishes,
        })
    }

    /// `φ(t) = t^e`.
    pub fn power(e: f64) -> Result<Self> {
        Self::new(&format!("power:{e}"), move |t| t.powf(e))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Whether `φ(t)/t → 0` on the probe; when false the function is accepted with a warning.
    pub fn vanishes_relative_to_t(&self) -> bool {
        self.vanishes
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}
