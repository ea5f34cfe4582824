use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use multifrac::verify::{refinement_table, run_suite, SuiteConfig, SuiteReport, Verdict};

/// Runs the weighted-inequality checks and writes a JSON report plus a refinement table.
#[derive(Debug, Parser)]
#[command(name = "verify", version)]
struct Args {
    /// `all`, or a comma-separated list of check ids.
    #[arg(long)]
    suite: Option<String>,
    /// TOML file with suite parameters; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dimension.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    grids: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    instances: Option<usize>,
    /// Side length of the box.
    #[arg(long)]
    extent: Option<f64>,
    /// Young function label, e.g. `llogl:1`.
    #[arg(long = "B")]
    young: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    /// Weight recipes separated by `;`, one per slot.
    #[arg(long, value_delimiter = ';')]
    weights: Option<Vec<String>>,
    /// Function recipes separated by `;`, one per slot.
    #[arg(long, value_delimiter = ';')]
    functions: Option<Vec<String>>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Output stem; `<out>.json` and `<out>.tsv` are written. `VERIFY_OUT_DIR` overrides the directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip the verdict table on stdout.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Core(#[from] multifrac::Error),
    #[error("config file {path}: {source}")]
    Toml {
        path: String,
        source: Box<toml::de::Error>,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    out: Option<PathBuf>,
    jobs: Option<usize>,
}

fn read_config(path: &Path) -> Result<(SuiteConfig, RunSection), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let bad = |source: toml::de::Error| CliError::Toml {
        path: path.display().to_string(),
        source: Box::new(source),
    };
    let mut table: toml::Table = toml::from_str(&text).map_err(bad)?;
    let run = match table.remove("run") {
        Some(v) => v.try_into().map_err(bad)?,
        None => RunSection::default(),
    };
    let cfg = toml::Value::Table(table).try_into().map_err(bad)?;
    Ok((cfg, run))
}

fn build_config(args: &Args) -> Result<(SuiteConfig, PathBuf), CliError> {
    let (mut cfg, run) = match &args.config {
        Some(path) => read_config(path)?,
        None => (SuiteConfig::default(), RunSection::default()),
    };
    if let Some(s) = &args.suite {
        cfg.checks = s.split(',').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect();
    }
    macro_rules! apply {
        ($($flag:ident => $field:ident),*) => {
            $(if let Some(v) = &args.$flag { cfg.$field = v.clone(); })*
        };
    }
    apply!(n => dim, m => m, alpha => alpha, p => p, grids => grids, seed => seed, instances => instances, extent => extent);
    if args.young.is_some() {
        cfg.young = args.young.clone();
    }
    if args.eps.is_some() {
        cfg.eps = args.eps;
    }
    if args.weights.is_some() {
        cfg.weights = args.weights.clone();
    }
    if args.functions.is_some() {
        cfg.functions = args.functions.clone();
    }
    if args.m.is_some() && args.p.is_none() && cfg.p.len() != cfg.m {
        // keep the default exponent for every slot
        cfg.p = vec![cfg.p[0]; cfg.m];
    }
    cfg.jobs = args.jobs.or(run.jobs);
    let mut out = args.out.clone().or(run.out).unwrap_or_else(|| PathBuf::from("report"));
    if let Some(dir) = std::env::var_os("VERIFY_OUT_DIR") {
        let name = out.file_name().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("report"));
        out = PathBuf::from(dir).join(name);
    }
    cfg.validate()?;
    Ok((cfg, out))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn print_table(report: &SuiteReport) {
    let width = report.reports.iter().map(|r| r.label().len()).max().unwrap_or(5).max(5);
    println!("{:width$}  {:6}  {:>12}  {:>9}  verdict", "check", "kind", "constant", "time");
    for r in &report.reports {
        let kind = format!("{:?}", r.kind).to_lowercase();
        println!(
            "{:width$}  {:6}  {:>12.5e}  {:>8.2}s  {}",
            r.label(),
            kind,
            r.constant,
            r.runtime.as_secs_f64(),
            r.verdict
        );
        if let Some(reason) = &r.reason {
            println!("{:width$}  {reason}", "");
        }
    }
    println!(
        "{} exact, {} stable, {} skipped, {} failed",
        report.count(Verdict::ExactPass),
        report.count(Verdict::StablePass),
        report.count(Verdict::Skipped),
        report.count(Verdict::Fail)
    );
}

fn run(args: &Args) -> Result<bool, CliError> {
    let (cfg, out) = build_config(args)?;
    let report = run_suite(&cfg)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write(&with_ext(&out, "json"), &json)?;
    write(&with_ext(&out, "tsv"), &refinement_table(&report))?;
    if !args.quiet {
        print_table(&report);
    }
    Ok(report.failed())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
