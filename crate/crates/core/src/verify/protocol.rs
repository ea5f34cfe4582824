use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use serde::Serialize;

use super::instance::InstanceDescriptor;

/// Relative slack tolerated by exact checks.
pub const EXACT_REL_TOL: f64 = 1e-6;
/// Allowed factor between empirical constants at consecutive grid sizes.
pub const STABILITY_WINDOW: f64 = 1.5;
/// Largest growth of a hypothesis constant across one refinement before the
/// instance counts as violating the hypothesis.
pub const HYPOTHESIS_GROWTH: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "EXACT-PASS")]
    ExactPass,
    #[serde(rename = "STABLE-PASS")]
    StablePass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "SKIPPED")]
    Skipped,
}

impl Verdict {
    pub fn is_fail(self) -> bool {
        self == Verdict::Fail
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ExactPass => "EXACT-PASS",
            Verdict::StablePass => "STABLE-PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIPPED(hypothesis unmet)",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Holds with constant 1 on discrete data.
    Exact,
    /// Holds with an unspecified constant; judged by refinement stability.
    Stable,
}

/// One side-condition evaluated alongside a check on one instance and grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SubSample {
    pub name: &'static str,
    pub holds: bool,
    pub worst: f64,
}

impl SubSample {
    /// `lhs <= rhs` up to [`EXACT_REL_TOL`]; `worst` is `lhs / rhs`.
    pub fn bound(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Self {
            name,
            holds: lhs - rhs <= EXACT_REL_TOL * rhs.abs(),
            worst: ratio(lhs, rhs),
        }
    }

    pub fn flag(name: &'static str, holds: bool, worst: f64) -> Self {
        Self { name, holds, worst }
    }
}

/// Both sides of a check on one instance at one grid size.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Sample {
    pub lhs: f64,
    pub rhs: f64,
    /// Hypothesis constant of the instance at this grid size, when the check has one.
    pub hypothesis: Option<f64>,
    pub subs: Vec<SubSample>,
    pub measurements: Vec<(&'static str, f64)>,
}

impl Sample {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            ..Self::default()
        }
    }

    pub fn with_hypothesis(mut self, h: f64) -> Self {
        self.hypothesis = Some(h);
        self
    }

    pub fn with_sub(mut self, s: SubSample) -> Self {
        self.subs.push(s);
        self
    }

    pub fn with_measurement(mut self, name: &'static str, v: f64) -> Self {
        self.measurements.push((name, v));
        self
    }

    pub fn ratio(&self) -> f64 {
        ratio(self.lhs, self.rhs)
    }
}

/// `lhs / rhs` with `0/0 = 0` and `x/0 = ∞`.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs > 0.0 {
        let r = lhs / rhs;
        if r.is_nan() {
            f64::INFINITY
        } else {
            r
        }
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridConstant {
    pub cells: usize,
    pub constant: f64,
    /// `Ĉ` at the previous grid size divided by `Ĉ` here.
    pub ratio: Option<f64>,
    /// Largest hypothesis constant among the admissible instances.
    pub hypothesis: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubAssertion {
    pub name: String,
    pub verdict: Verdict,
    pub worst: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub variant: String,
    pub inequality: String,
    pub kind: CheckKind,
    /// The instance attaining the empirical constant on the finest grid.
    pub instance: InstanceDescriptor,
    pub instances: usize,
    pub skipped_instances: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub constant: f64,
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub refinement: Vec<GridConstant>,
    pub sub_assertions: Vec<SubAssertion>,
    pub measurements: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub runtime: Duration,
}

impl VerificationReport {
    pub fn label(&self) -> String {
        if self.variant.is_empty() {
            self.check.clone()
        } else {
            format!("{}[{}]", self.check, self.variant)
        }
    }
}

/// What the protocol concluded from a table of samples.
#[derive(Clone, Debug)]
pub(crate) struct Conclusion {
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub refinement: Vec<GridConstant>,
    pub constant: f64,
    /// Index of the instance attaining the constant on the finest grid.
    pub worst: usize,
    pub skipped: usize,
    pub subs: Vec<SubAssertion>,
    pub measurements: BTreeMap<String, f64>,
}

fn admissible(row: &[Sample]) -> Result<(), f64> {
    let hyps: Vec<f64> = row.iter().filter_map(|s| s.hypothesis).collect();
    if hyps.is_empty() {
        return Ok(());
    }
    if hyps.iter().any(|h| !h.is_finite()) {
        return Err(f64::INFINITY);
    }
    let growth = hyps.windows(2).map(|w| w[1] / w[0]).fold(1.0f64, f64::max);
    if growth > HYPOTHESIS_GROWTH {
        Err(growth)
    } else {
        Ok(())
    }
}

/// Applies the protocol to `samples[instance][grid]`.
pub(crate) fn conclude(kind: CheckKind, grids: &[usize], samples: &[Vec<Sample>]) -> Conclusion {
    let mut kept = Vec::new();
    let mut worst_growth = 0.0f64;
    for (i, row) in samples.iter().enumerate() {
        match admissible(row) {
            Ok(()) => kept.push(i),
            Err(g) => worst_growth = worst_growth.max(g),
        }
    }
    let skipped = samples.len() - kept.len();
    let mut refinement = Vec::with_capacity(grids.len());
    for (g, &cells) in grids.iter().enumerate() {
        let constant = kept.iter().map(|&i| samples[i][g].ratio()).fold(0.0f64, f64::max);
        let hypothesis = kept
            .iter()
            .filter_map(|&i| samples[i][g].hypothesis)
            .reduce(f64::max);
        let ratio = refinement
            .last()
            .map(|prev: &GridConstant| prev.constant / constant);
        refinement.push(GridConstant {
            cells,
            constant,
            ratio,
            hypothesis,
        });
    }
    let last = grids.len() - 1;
    let worst = kept
        .iter()
        .copied()
        .max_by(|&a, &b| samples[a][last].ratio().total_cmp(&samples[b][last].ratio()))
        .unwrap_or(0);
    let constant = refinement[last].constant;

    let mut subs: BTreeMap<&'static str, (bool, f64)> = BTreeMap::new();
    let mut measurements: BTreeMap<String, f64> = BTreeMap::new();
    for &i in &kept {
        for s in &samples[i] {
            for sub in &s.subs {
                let e = subs.entry(sub.name).or_insert((true, f64::NEG_INFINITY));
                e.0 &= sub.holds;
                e.1 = e.1.max(sub.worst);
            }
            for (name, v) in &s.measurements {
                let e = measurements.entry(name.to_string()).or_insert(f64::NEG_INFINITY);
                *e = e.max(*v);
            }
        }
    }
    let subs: Vec<SubAssertion> = subs
        .into_iter()
        .map(|(name, (holds, worst))| SubAssertion {
            name: name.to_string(),
            verdict: if holds { Verdict::ExactPass } else { Verdict::Fail },
            worst,
        })
        .collect();

    let (verdict, reason) = if kept.is_empty() {
        (
            Verdict::Skipped,
            Some(format!(
                "hypothesis constant unbounded under refinement on every instance (growth {worst_growth:.3})"
            )),
        )
    } else if let Some(bad) = subs.iter().find(|s| s.verdict.is_fail()) {
        (
            Verdict::Fail,
            Some(format!("sub-assertion `{}` violated (worst ratio {:e})", bad.name, bad.worst)),
        )
    } else if kept.iter().all(|&i| samples[i].iter().all(|s| s.lhs == 0.0)) {
        (Verdict::ExactPass, Some("every LHS vanishes".into()))
    } else {
        match kind {
            CheckKind::Exact => {
                let violated = kept.iter().any(|&i| {
                    samples[i]
                        .iter()
                        .any(|s| !(s.lhs - s.rhs <= EXACT_REL_TOL * s.rhs.abs()))
                });
                if violated {
                    let c = refinement.iter().map(|r| r.constant).fold(0.0, f64::max);
                    (Verdict::Fail, Some(format!("LHS exceeds RHS (largest ratio {c:e})")))
                } else {
                    (Verdict::ExactPass, None)
                }
            }
            CheckKind::Stable => stable_verdict(&refinement),
        }
    };
    Conclusion {
        verdict,
        reason,
        refinement,
        constant,
        worst,
        skipped,
        subs,
        measurements,
    }
}

fn stable_verdict(refinement: &[GridConstant]) -> (Verdict, Option<String>) {
    if refinement.len() < 2 {
        return (Verdict::Fail, Some("stability needs at least two grid sizes".into()));
    }
    if let Some(r) = refinement.iter().find(|r| !r.constant.is_finite()) {
        return (Verdict::Fail, Some(format!("empirical constant infinite at N = {}", r.cells)));
    }
    for r in &refinement[1..] {
        let q = r.ratio.unwrap_or(f64::NAN);
        if !(q >= 1.0 / STABILITY_WINDOW && q <= STABILITY_WINDOW) {
            return (
                Verdict::Fail,
                Some(format!("refinement ratio {q:.4} at N = {} leaves the window", r.cells)),
            );
        }
    }
    (Verdict::StablePass, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(ratios: &[(f64, f64)]) -> Vec<Sample> {
        ratios.iter().map(|&(l, r)| Sample::new(l, r)).collect()
    }

    #[test]
    fn stable_window() {
        let grids = [32, 64];
        let ok = conclude(CheckKind::Stable, &grids, &[row(&[(1.0, 1.0), (1.3, 1.0)])]);
        assert_eq!(ok.verdict, Verdict::StablePass);
        let bad = conclude(CheckKind::Stable, &grids, &[row(&[(1.0, 1.0), (1.6, 1.0)])]);
        assert_eq!(bad.verdict, Verdict::Fail);
        let inf = conclude(CheckKind::Stable, &grids, &[row(&[(1.0, 0.0), (1.0, 1.0)])]);
        assert_eq!(inf.verdict, Verdict::Fail);
    }

    #[test]
    fn exact_tolerance() {
        let grids = [32];
        let ok = conclude(CheckKind::Exact, &grids, &[row(&[(1.0 + 5e-7, 1.0)])]);
        assert_eq!(ok.verdict, Verdict::ExactPass);
        let bad = conclude(CheckKind::Exact, &grids, &[row(&[(1.0 + 2e-6, 1.0)])]);
        assert_eq!(bad.verdict, Verdict::Fail);
    }

    #[test]
    fn zero_lhs_is_exact() {
        let c = conclude(CheckKind::Stable, &[32, 64], &[row(&[(0.0, 0.0), (0.0, 1.0)])]);
        assert_eq!(c.verdict, Verdict::ExactPass);
    }

    #[test]
    fn hypothesis_gate() {
        let grow = vec![
            Sample::new(1.0, 1.0).with_hypothesis(1.0),
            Sample::new(1.0, 1.0).with_hypothesis(2.0),
        ];
        let steady = vec![
            Sample::new(2.0, 1.0).with_hypothesis(1.0),
            Sample::new(2.0, 1.0).with_hypothesis(1.1),
        ];
        let c = conclude(CheckKind::Stable, &[32, 64], &[grow.clone(), steady]);
        assert_eq!(c.verdict, Verdict::StablePass);
        assert_eq!(c.skipped, 1);
        assert_eq!(c.worst, 1);
        let c = conclude(CheckKind::Stable, &[32, 64], &[grow]);
        assert_eq!(c.verdict, Verdict::Skipped);
    }

    #[test]
    fn failing_sub_assertion_fails() {
        let s = Sample::new(1.0, 2.0).with_sub(SubSample::bound("split", 3.0, 1.0));
        let c = conclude(CheckKind::Exact, &[32], &[vec![s]]);
        assert_eq!(c.verdict, Verdict::Fail);
        assert_eq!(c.subs[0].verdict, Verdict::Fail);
    }
}
