//! Acceptance criteria, one test each. Every test prints a single PASS/FAIL line.

use std::time::{Duration, Instant};

use multifrac::functions::{build_function_term, random_recipe};
use multifrac::lattice::{czd_decompose, Cube, CubeFamily, Grid, GridFunction};
use multifrac::operators::{cube_value, fractional_integral, maximal, FunctionVector, MaximalSpec};
use multifrac::orlicz::{
    check_condi1, generalized_holder_check, holder_pair_slack, inverse_product_holds, make_psi, sandwich_ratios,
    PhiFunction, YoungFunction,
};
use multifrac::verify::{
    instance_rng, run_check, run_suite, CheckId, SuiteConfig, Verdict, VerificationReport, STABILITY_WINDOW,
};
use multifrac::weights::{
    ap_constant, apq_constant, build_weight, multilinear_ap_constant, rh_constant, ExponentSystem, WeightVector,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-6;

fn report_line(n: u32, ok: bool, detail: &str) {
    println!("criterion {n}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
}

fn random_function(rng: &mut ChaCha8Rng, grid: &Grid) -> GridFunction {
    let t = random_recipe(rng.random(), grid.dim(), 0.0, grid.extent());
    build_function_term(&t, grid).unwrap()
}

fn random_cube(rng: &mut ChaCha8Rng, grid: &Grid) -> Cube {
    let n = grid.cells_per_side();
    let side = rng.random_range(1..=n);
    Cube::new(&[rng.random_range(0..=n - side)], side)
}

fn b1() -> YoungFunction {
    YoungFunction::llogl(1.0)
}

/// `(A, B')` with `A^{-1} B'^{-1} <= C^{-1}`.
fn holder_partners(c: &YoungFunction) -> (YoungFunction, YoungFunction) {
    match c.label().as_str() {
        "power:1" => (YoungFunction::power(2.0), YoungFunction::power(2.0)),
        "power:2" => (YoungFunction::power(4.0), YoungFunction::power(4.0)),
        _ => {
            let a = YoungFunction::power(2.0);
            let mut coef = 1.0;
            loop {
                let b = YoungFunction::scaled(coef, YoungFunction::power_log(2.0, 2.0));
                if inverse_product_holds(&a, &b, c).0 {
                    return (a, b);
                }
                coef *= 2.0;
            }
        }
    }
}

#[test]
fn criterion_1_exact_holder_suite() {
    let start = Instant::now();
    let grid = Grid::unit(1, 64).unwrap();
    let bs = [YoungFunction::identity(), YoungFunction::power(2.0), b1()];
    let mut failures: Vec<String> = Vec::new();
    let mut worst_pair = f64::INFINITY;

    for b in &bs {
        let s = sandwich_ratios(b);
        if s.min_ratio < 1.0 - TOL || s.max_ratio > 2.0 * (1.0 + TOL) {
            failures.push(format!("sandwich {}: [{}, {}]", b.label(), s.min_ratio, s.max_ratio));
        }
    }
    let partners: Vec<_> = bs.iter().map(holder_partners).collect();
    for i in 0..200 {
        let mut rng = instance_rng(1, 1000, i);
        let f = random_function(&mut rng, &grid);
        let g = random_function(&mut rng, &grid);
        let q = random_cube(&mut rng, &grid);
        for (b, (a, bp)) in bs.iter().zip(&partners) {
            let pair = holder_pair_slack(b, &f, &g, &q).unwrap();
            if pair.rhs > 0.0 {
                worst_pair = worst_pair.min(pair.slack / pair.rhs);
            }
            if !pair.passes(TOL) {
                failures.push(format!("pair holder {} instance {i}: lhs {} rhs {}", b.label(), pair.lhs, pair.rhs));
            }
            let three = generalized_holder_check(a, bp, b, &f, &g, &q).unwrap();
            if three.skipped.is_some() || !three.passes(TOL) {
                failures.push(format!("three-function holder {} instance {i}: {three:?}", b.label()));
            }
        }
        let m = 1 + i % 2;
        let fv = FunctionVector::new((0..m).map(|_| random_function(&mut rng, &grid)).collect()).unwrap();
        let alpha = rng.random_range(0.1..0.9 * m as f64);
        let plain = maximal(&MaximalSpec::fractional(alpha), &fv).unwrap();
        for b in &bs {
            let orl = maximal(&MaximalSpec::orlicz(alpha, b.clone()), &fv).unwrap();
            for c in 0..grid.len() {
                if plain.get(c) - orl.get(c) > TOL * orl.get(c) {
                    failures.push(format!("M_a <= M_a,B {} instance {i} cell {c}", b.label()));
                    break;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && elapsed < Duration::from_secs(120);
    report_line(
        1,
        ok,
        &format!(
            "{} violations ({}), worst pair-holder relative slack {worst_pair:.4}, {:.1}s",
            failures.len(),
            ["sandwich", "pair holder", "three-function", "M_a <= M_a,B"]
                .iter()
                .map(|k| format!("{k}: {}", failures.iter().filter(|f| f.starts_with(k)).count()))
                .collect::<Vec<_>>()
                .join(", "),
            elapsed.as_secs_f64()
        ),
    );
    for f in failures.iter().take(5) {
        println!("  {f}");
    }
    assert!(ok);
}

#[test]
fn criterion_2_pointwise_lemma() {
    let start = Instant::now();
    let cfg = SuiteConfig {
        grids: vec![32, 64],
        instances: 100,
        ..SuiteConfig::default()
    };
    let reports = run_check(&cfg, CheckId::PointwiseLemma).unwrap();
    let elapsed = start.elapsed();
    let summary: Vec<String> = reports
        .iter()
        .map(|r| format!("{} {} max ratio {:.4}", r.variant, r.verdict, r.constant))
        .collect();
    let ok = reports.len() == 2
        && reports.iter().all(|r| r.verdict == Verdict::ExactPass)
        && elapsed < Duration::from_secs(300);
    report_line(2, ok, &format!("{}; {:.1}s", summary.join("; "), elapsed.as_secs_f64()));
    assert!(ok);
}

#[test]
fn criterion_3_welland() {
    let start = Instant::now();
    let cfg = SuiteConfig {
        grids: vec![64, 128],
        instances: 50,
        eps: Some(0.25),
        ..SuiteConfig::default()
    };
    let r = run_check(&cfg, CheckId::Welland).unwrap().remove(0);
    let elapsed = start.elapsed();
    let ratio = r.refinement[1].ratio.unwrap();
    let finite = r.refinement.iter().all(|g| g.constant.is_finite());
    let ok = finite
        && (1.0 / STABILITY_WINDOW..=STABILITY_WINDOW).contains(&ratio)
        && r.verdict == Verdict::StablePass
        && elapsed < Duration::from_secs(600);
    report_line(
        3,
        ok,
        &format!(
            "C(64) {:.4}, C(128) {:.4}, ratio {ratio:.4}, {:.1}s",
            r.refinement[0].constant,
            r.refinement[1].constant,
            elapsed.as_secs_f64()
        ),
    );
    assert!(ok);
}

fn suite_config() -> SuiteConfig {
    SuiteConfig {
        grids: vec![32, 64, 128],
        instances: 100,
        ..SuiteConfig::default()
    }
}

fn judge(reports: &[VerificationReport]) -> (bool, Vec<String>) {
    let mut ok = true;
    let mut lines = Vec::new();
    for r in reports {
        let admissible = r.instances > r.skipped_instances;
        let good = if admissible {
            r.verdict == Verdict::StablePass || r.verdict == Verdict::ExactPass
        } else {
            r.verdict == Verdict::Skipped
        };
        let subs_ok = r.sub_assertions.iter().all(|s| s.verdict == Verdict::ExactPass);
        ok &= good && subs_ok;
        lines.push(format!("{} {}", r.label(), r.verdict));
    }
    (ok, lines)
}

#[test]
fn criterion_4_weak_and_strong_bounds() {
    let cfg = suite_config();
    let ids = [
        CheckId::WeakMalpha,
        CheckId::StrongMalpha,
        CheckId::CorollaryDebil2,
        CheckId::MfracPair,
        CheckId::OrliczStrong,
        CheckId::CorollaryAcotacionap,
        CheckId::BanachMphi,
        CheckId::CorollaryMphi,
    ];
    let mut reports = Vec::new();
    for id in ids {
        reports.extend(run_check(&cfg, id).unwrap());
    }
    let (mut ok, lines) = judge(&reports);

    // fixtures outside the weight classes
    let mut fixtures = Vec::new();
    for w in ["power:(1,0.5)", "power:(-0.9,0.5)"] {
        let cfg = SuiteConfig {
            instances: 5,
            weights: Some(vec![w.into()]),
            ..suite_config()
        };
        for id in [
            CheckId::WeakMalpha,
            CheckId::StrongMalpha,
            CheckId::OrliczStrong,
            CheckId::CorollaryAcotacionap,
            CheckId::BanachMphi,
        ] {
            for r in run_check(&cfg, id).unwrap() {
                ok &= r.verdict == Verdict::Skipped;
                fixtures.push(format!("{w} {} {}", r.label(), r.verdict));
            }
        }
    }
    let b_cfg = SuiteConfig {
        instances: 5,
        young: Some("llogl:1".into()),
        weights: Some(vec!["power:(1,0.5)".into()]),
        ..suite_config()
    };
    for r in run_check(&b_cfg, CheckId::OrliczStrong).unwrap() {
        ok &= r.verdict == Verdict::Skipped;
        fixtures.push(format!("B=llogl:1 {} {}", r.label(), r.verdict));
    }
    report_line(4, ok, &format!("{} reports, {} fixtures", lines.len(), fixtures.len()));
    for l in lines.iter().chain(&fixtures) {
        println!("  {l}");
    }
    assert!(ok);
}

#[test]
fn criterion_5_control_suite() {
    let cfg = suite_config();
    let ids = [
        CheckId::WeakMaximal,
        CheckId::IalphaWeakControl,
        CheckId::Debildebil,
        CheckId::Dospesos,
        CheckId::PLe1,
        CheckId::Discreta,
        CheckId::DyadicRelation,
    ];
    let mut reports = Vec::new();
    for id in ids {
        reports.extend(run_check(&cfg, id).unwrap());
    }
    let (mut ok, lines) = judge(&reports);
    for (check, name) in [("check_p_le_1", "reverse_holder"), ("check_ialpha_weak_control", "product_splitting")] {
        let present = reports
            .iter()
            .filter(|r| r.check == check)
            .flat_map(|r| &r.sub_assertions)
            .any(|s| s.name == name && s.verdict == Verdict::ExactPass);
        ok &= present;
    }
    let variants: Vec<&str> = reports.iter().map(|r| r.variant.as_str()).collect();
    ok &= ["p=0.5", "p=1", "q=1", "q=2"].iter().all(|v| variants.contains(v));
    report_line(5, ok, &format!("{} reports", lines.len()));
    for l in &lines {
        println!("  {l}");
    }
    assert!(ok);
}

#[test]
fn criterion_6_structure_suite() {
    let mut failures = Vec::new();
    for i in 0..100 {
        let mut rng = instance_rng(6, 1000, i);
        let (dim, cells) = if i % 4 == 3 { (2, 16) } else { (1, 64) };
        let grid = Grid::unit(dim, cells).unwrap();
        let m = 2;
        let f = FunctionVector::new((0..m).map(|_| random_function(&mut rng, &grid)).collect()).unwrap();
        let alpha = rng.random_range(0.1..0.9 * (dim * m) as f64);
        let spec = MaximalSpec::fractional(alpha).with_family(CubeFamily::Dyadic);
        let a = 2f64.powi((m * dim) as i32) + 1.0;
        let d = czd_decompose(&grid, m, |c| cube_value(&spec, &f, c).unwrap(), a, None).unwrap();
        let inv = d.invariants();
        if !inv.holds() {
            failures.push(format!("cz instance {i}: {inv:?}"));
        }
    }
    for b in [YoungFunction::identity(), YoungFunction::power(2.0), b1(), YoungFunction::llogl(2.0)] {
        let psi = make_psi(&b, 1, 2, 1.0).unwrap();
        if !psi.probe().passes() {
            failures.push(format!("psi of {} fails the probe: {:?}", b.label(), psi.probe()));
        }
    }
    for b in [YoungFunction::identity(), b1(), YoungFunction::llogl(2.0)] {
        let c = check_condi1(&b, 1, 2, 1.0);
        if !c.passes {
            failures.push(format!(
                "condition on {} fails literally: worst ratio {:.6} at t = {:e} (bounded: {})",
                b.label(),
                c.worst_ratio,
                c.worst_t,
                c.bounded
            ));
        }
    }
    let ok = failures.is_empty();
    report_line(6, ok, &format!("{} violations", failures.len()));
    for f in &failures {
        println!("  {f}");
    }
    assert!(ok);
}

#[test]
fn criterion_7_weight_classes() {
    let mut failures = Vec::new();
    let sys = ExponentSystem::new(1, 2, 1.0, &[4.0 / 3.0, 4.0 / 3.0]).unwrap();

    let grid = Grid::unit(1, 64).unwrap();
    for i in 0..20 {
        let mut rng = instance_rng(7, 1000, i);
        let recipes: Vec<String> = (0..2)
            .map(|_| {
                if rng.random_bool(0.5) {
                    format!("random:({},2)", rng.random_range(0..1_000_000u64))
                } else {
                    format!("power:({:.3},{:.3})", rng.random_range(-0.4..0.8), rng.random_range(0.2..0.8))
                }
            })
            .collect();
        let ws: Vec<GridFunction> = recipes.iter().map(|r| build_weight(r, &grid).unwrap().weight).collect();
        let wv = WeightVector::new(ws.clone()).unwrap();
        let mut constants = vec![
            ap_constant(&ws[0], 2.0, CubeFamily::All).unwrap(),
            ap_constant(&ws[1], 3.0, CubeFamily::Dyadic).unwrap(),
            multilinear_ap_constant(&wv, &[1.5, 3.0], CubeFamily::All).unwrap(),
            rh_constant(&ws[0], Some(2.0), CubeFamily::All).unwrap(),
            rh_constant(&ws[1], None, CubeFamily::All).unwrap(),
        ];
        if let Ok(c) = apq_constant(&wv, &sys, CubeFamily::All) {
            constants.push(c);
        }
        if constants.iter().any(|c| *c < 1.0 - 1e-12) {
            failures.push(format!("constant below 1 for {recipes:?}: {constants:?}"));
        }
    }

    let one = GridFunction::constant(grid, 1.0).unwrap();
    let ones = WeightVector::new(vec![one.clone(), one.clone()]).unwrap();
    let unit = [
        ap_constant(&one, 2.0, CubeFamily::All).unwrap(),
        multilinear_ap_constant(&ones, &[1.5, 3.0], CubeFamily::All).unwrap(),
        rh_constant(&one, Some(3.0), CubeFamily::All).unwrap(),
        rh_constant(&one, None, CubeFamily::All).unwrap(),
    ];
    if unit.iter().any(|c| *c != 1.0) {
        failures.push(format!("unit weight constants {unit:?}"));
    }

    let ap_series = |a: f64| -> Vec<f64> {
        [32, 64, 128, 256]
            .iter()
            .map(|&n| {
                let g = Grid::unit(1, n).unwrap();
                ap_constant(&build_weight(&format!("power:({a},0.5)"), &g).unwrap().weight, 2.0, CubeFamily::All)
                    .unwrap()
            })
            .collect()
    };
    let good = ap_series(0.5);
    let bad = ap_series(1.5);
    let good_ratios: Vec<f64> = good.windows(2).map(|w| w[1] / w[0]).collect();
    let bad_ratios: Vec<f64> = bad.windows(2).map(|w| w[1] / w[0]).collect();
    if good_ratios.iter().any(|r| !(1.0 / STABILITY_WINDOW..=STABILITY_WINDOW).contains(r)) {
        failures.push(format!("a = 0.5 not stable: {good:?}"));
    }
    if bad_ratios.iter().any(|r| *r <= 2.0) {
        failures.push(format!("a = 1.5 refinement ratios {bad_ratios:?} not above 2 (constants {bad:?})"));
    }

    for i in 0..20 {
        let mut rng = instance_rng(7, 2000, i);
        let g = random_recipe(rng.random(), 1, 0.0, 1.0);
        let series: Vec<f64> = [32, 64, 128]
            .iter()
            .map(|&n| {
                let grid = Grid::unit(1, n).unwrap();
                let v = build_weight(&format!("mg_negpow:({g},0.5)"), &grid).unwrap().weight;
                rh_constant(&v, None, CubeFamily::All).unwrap()
            })
            .collect();
        if series.iter().any(|c| !c.is_finite()) || series.windows(2).any(|w| w[1] > STABILITY_WINDOW * w[0]) {
            failures.push(format!("RH_inf of (Mg)^-1/2 for {g}: {series:?}"));
        }
    }
    let ok = failures.is_empty();
    report_line(7, ok, &format!("{} violations", failures.len()));
    for f in &failures {
        println!("  {f}");
    }
    assert!(ok);
}

fn oracle_maximal(vals: &[Vec<f64>], h: f64, family: CubeFamily, weight: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = vals[0].len();
    let mut out = vec![0.0f64; n];
    for a in 0..n {
        for k in 1..=n - a {
            let admitted = match family {
                CubeFamily::Dyadic => k.is_power_of_two() && a % k == 0,
                _ => true,
            };
            if !admitted {
                continue;
            }
            let mut v = weight(k as f64 * h);
            for f in vals {
                let mut s = 0.0;
                for x in &f[a..a + k] {
                    s += x.abs();
                }
                v *= s / k as f64;
            }
            for o in &mut out[a..a + k] {
                *o = o.max(v);
            }
        }
    }
    out
}

fn oracle_integral(vals: &[Vec<f64>], h: f64, alpha: f64) -> Vec<f64> {
    let n = vals[0].len();
    let center = |i: usize| (i as f64 + 0.5) * h;
    (0..n)
        .map(|x| {
            let mut s = 0.0;
            for c1 in 0..n {
                for c2 in 0..n {
                    if c1 == x && c2 == x {
                        continue;
                    }
                    let d = (center(x) - center(c1)).abs() + (center(x) - center(c2)).abs();
                    s += vals[0][c1] * vals[1][c2] * d.powf(alpha - 2.0);
                }
            }
            s * h * h
        })
        .collect()
}

#[test]
fn criterion_8_oracle_equivalence() {
    let grid = Grid::unit(1, 16).unwrap();
    let h = grid.cell_size();
    let mut worst = 0.0f64;
    let mut rel = |a: f64, b: f64| {
        let r = if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) };
        worst = worst.max(r);
    };
    for seed in 0..50 {
        let mut rng = instance_rng(8, 1000, seed);
        let parts: Vec<GridFunction> = (0..2)
            .map(|_| {
                let v: Vec<f64> = (0..16).map(|_| rng.random_range(-2.0..3.0)).collect();
                GridFunction::signed(grid, v).unwrap()
            })
            .collect();
        let vals: Vec<Vec<f64>> = parts.iter().map(|p| p.values().to_vec()).collect();
        let f = FunctionVector::new(parts).unwrap();
        let alpha = rng.random_range(0.1..1.9);
        for family in [CubeFamily::All, CubeFamily::Dyadic] {
            let got = maximal(&MaximalSpec::fractional(alpha).with_family(family), &f).unwrap();
            let want = oracle_maximal(&vals, h, family, |l| l.powf(alpha));
            for (a, b) in got.values().iter().zip(&want) {
                rel(*a, *b);
            }
        }
        let e = alpha / 2.0;
        let phi = PhiFunction::power(e).unwrap();
        let got = maximal(&MaximalSpec::phi(phi), &f).unwrap();
        let want = oracle_maximal(&vals, h, CubeFamily::All, |l| l.powf(e));
        for (a, b) in got.values().iter().zip(&want) {
            rel(*a, *b);
        }
        let got = fractional_integral(alpha, &f).unwrap();
        let want = oracle_integral(&vals, h, alpha);
        for (a, b) in got.values().iter().zip(&want) {
            rel(*a, *b);
        }
    }
    let ok = worst <= 1e-13;
    report_line(8, ok, &format!("worst relative difference {worst:e}"));
    assert!(ok);
}

#[test]
fn criterion_9_determinism() {
    let base = SuiteConfig {
        checks: vec![
            "check_weak_malpha".into(),
            "check_orlicz_strong".into(),
            "check_welland".into(),
            "check_discreta".into(),
            "check_p_le_1".into(),
        ],
        grids: vec![16, 32],
        instances: 8,
        ..SuiteConfig::default()
    };
    let render = |jobs: usize| {
        let cfg = SuiteConfig {
            jobs: Some(jobs),
            ..base.clone()
        };
        serde_json::to_string(&run_suite(&cfg).unwrap()).unwrap()
    };
    let (one, eight) = (render(1), render(8));
    let ok = one == eight;
    report_line(9, ok, &format!("{} bytes", one.len()));
    assert!(ok);
}
