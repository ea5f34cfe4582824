use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::checks::{variants, CheckId, Ctx, ALL_CHECKS};
use super::protocol::{Verdict, VerificationReport};
use crate::error::{Error, Result};
use crate::weights::ExponentSystem;

/// Parameters of a suite run. Missing fields take the defaults of [`SuiteConfig::default`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Check ids to run; empty means all of them.
    pub checks: Vec<String>,
    pub dim: usize,
    pub m: usize,
    pub alpha: f64,
    pub p: Vec<f64>,
    pub grids: Vec<usize>,
    pub extent: f64,
    pub seed: u64,
    pub instances: usize,
    /// Young function label overriding the default `B` of the Orlicz checks.
    pub young: Option<String>,
    /// Index of `B_k = L(log L)^k`.
    pub k: u32,
    /// Exponent of `L(log L)^δ`.
    pub delta: f64,
    /// Welland splitting parameter; defaults to `min(α, nm - α) / 2`.
    pub eps: Option<f64>,
    /// `A_i = t^{r p_i'}`.
    pub r: f64,
    pub small_p: Vec<f64>,
    pub relation_q: Vec<f64>,
    pub relation_k: i32,
    /// Exponent of `v = (Mg)^{-β}`.
    pub beta: f64,
    /// `s_i` of variant `ii` of `check_corollary_mphi`; defaults to `p_i'`.
    pub s: Option<Vec<f64>>,
    /// Fixed function recipes, one per slot.
    pub functions: Option<Vec<String>>,
    /// Fixed weight recipes, one per slot (a single recipe is reused).
    pub weights: Option<Vec<String>>,
    #[serde(skip)]
    pub jobs: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            checks: Vec::new(),
            dim: 1,
            m: 2,
            alpha: 1.0,
            p: vec![4.0 / 3.0, 4.0 / 3.0],
            grids: vec![32, 64, 128],
            extent: 1.0,
            seed: 42,
            instances: 100,
            young: None,
            k: 1,
            delta: 1.0,
            eps: None,
            r: 2.0,
            small_p: vec![0.5, 1.0],
            relation_q: vec![1.0, 2.0],
            relation_k: -3,
            beta: 0.5,
            s: None,
            functions: None,
            weights: None,
            jobs: None,
        }
    }
}

impl SuiteConfig {
    pub fn eps_or_default(&self) -> f64 {
        self.eps
            .unwrap_or_else(|| self.alpha.min((self.dim * self.m) as f64 - self.alpha) / 2.0)
    }

    pub fn exponents(&self) -> Result<ExponentSystem> {
        ExponentSystem::new(self.dim, self.m, self.alpha, &self.p)
    }

    pub fn selected(&self) -> Result<Vec<CheckId>> {
        if self.checks.is_empty() || self.checks.iter().any(|c| c == "all") {
            return Ok(ALL_CHECKS.to_vec());
        }
        self.checks.iter().map(|c| c.parse()).collect()
    }

    /// Rejects configurations that no check can run with.
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidParameter(format!("dimension {} must be 1, 2 or 3", self.dim)));
        }
        if self.m == 0 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        if self.p.len() != self.m {
            return Err(Error::InvalidParameter(format!(
                "{} exponents given for m = {}",
                self.p.len(),
                self.m
            )));
        }
        if self.grids.len() < 2 {
            return Err(Error::InvalidParameter("at least two grid sizes are needed".into()));
        }
        for w in self.grids.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidParameter("grid sizes must increase".into()));
            }
        }
        if let Some(g) = self.grids.iter().find(|g| !g.is_power_of_two()) {
            return Err(Error::InvalidGrid(format!("{g} cells per side is not a power of two")));
        }
        if !(self.extent > 0.0 && self.extent.is_finite()) {
            return Err(Error::InvalidGrid(format!("side length {} must be positive", self.extent)));
        }
        if self.instances == 0 {
            return Err(Error::InvalidParameter("instances must be positive".into()));
        }
        for (name, v) in [("functions", &self.functions), ("weights", &self.weights)] {
            if let Some(v) = v {
                if v.is_empty() || (name == "functions" && v.len() != self.m) {
                    return Err(Error::InvalidParameter(format!("{} {name} given for m = {}", v.len(), self.m)));
                }
            }
        }
        if let Some(s) = &self.s {
            if s.len() != self.m {
                return Err(Error::InvalidParameter(format!("{} values of s for m = {}", s.len(), self.m)));
            }
        }
        if let Some(y) = &self.young {
            crate::orlicz::YoungFunction::from_label(y)?;
        }
        self.exponents()?;
        self.selected()?;
        Ok(())
    }
}

/// Every report of a run, with the configuration that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub reports: Vec<VerificationReport>,
}

impl SuiteReport {
    pub fn failed(&self) -> bool {
        self.reports.iter().any(|r| r.verdict.is_fail())
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.reports.iter().filter(|r| r.verdict == v).count()
    }
}

/// All variants of one check.
pub fn run_check(cfg: &SuiteConfig, id: CheckId) -> Result<Vec<VerificationReport>> {
    cfg.validate()?;
    let ctx = Ctx {
        cfg,
        sys: cfg.exponents()?,
        id,
    };
    variants(&ctx)
}

/// Runs the selected checks, on a pool of `cfg.jobs` threads when set.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let run = || -> Result<SuiteReport> {
        let mut reports = Vec::new();
        for id in cfg.selected()? {
            reports.extend(run_check(cfg, id)?);
        }
        Ok(SuiteReport {
            config: cfg.clone(),
            reports,
        })
    };
    match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

/// One row per report and grid size: `check variant cells constant ratio hypothesis verdict`.
pub fn refinement_table(report: &SuiteReport) -> String {
    let mut out = String::from("check\tvariant\tcells\tconstant\tratio\thypothesis\tverdict\n");
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.6e}"));
    for r in &report.reports {
        for g in &r.refinement {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{:.6e}\t{}\t{}\t{}",
                r.check,
                if r.variant.is_empty() { "-" } else { &r.variant },
                g.cells,
                g.constant,
                opt(g.ratio),
                opt(g.hypothesis),
                r.verdict
            );
        }
    }
    out
}
