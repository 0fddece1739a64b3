//! Command pipelines and artifact writing.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hororadon::volterra::{FirstKindProblem, Kernel, SecondKindProblem};
use hororadon::{
    exterior_data_multi, fourier_slices, fubini_integral, reconstruct_all, solve_abel, solve_abel_product,
    solve_first_kind, solve_second_kind, transform_sphere, transform_via_isometry, verify_support_with, AbelProblem,
    Error, ExteriorDataset, Provenance, SupportTolerance, UniformGrid, Verdict, VerifyPlan,
};
use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Command, ExperimentConfig};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Clone, Debug, PartialEq)]
pub enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Numerical(_) => EXIT_NUMERICAL,
            Failure::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

fn classify(e: &Error) -> fn(String) -> Failure {
    match e {
        Error::Frequency { source, .. } => classify(source),
        Error::Io(_) => Failure::Io,
        Error::InvalidInput(_)
        | Error::DimensionMismatch { .. }
        | Error::UnsupportedDimension(_)
        | Error::NotNormalized(_)
        | Error::NonIntegrable { .. }
        | Error::GridTooCoarse { .. }
        | Error::SupportClaimViolated { .. }
        | Error::Format { .. } => Failure::Config,
        _ => Failure::Numerical,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        classify(&e)(e.to_string())
    }
}

/// One pass/fail line of a report; a check always carries both numbers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub achieved: f64,
    /// `"<="` when `achieved` must not exceed `tolerance`, `">="` otherwise.
    pub comparison: &'static str,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, achieved: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            tolerance,
            achieved,
            comparison: "<=",
            passed: achieved <= tolerance,
        }
    }

    pub fn at_least(name: &str, achieved: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            tolerance,
            achieved,
            comparison: ">=",
            passed: achieved >= tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    /// `passed`, `failed` (a check missed its tolerance) or `error`.
    pub status: String,
    /// True when the run stopped before all artifacts were written.
    pub partial: bool,
    pub error: Option<String>,
    pub threads: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub summary: Map<String, Value>,
    pub warnings: Vec<String>,
    pub artifacts: Vec<String>,
    pub elapsed_seconds: f64,
    pub config: Value,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub output_dir: PathBuf,
    /// Worker threads; `None` leaves the choice to rayon.
    pub threads: Option<usize>,
}

/// Fixed-column table written as CSV.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn eta_columns(n: usize) -> Vec<String> {
    (1..n).map(|j| format!("eta_{j}")).collect()
}

#[derive(Default)]
struct CommandResult {
    table: Table,
    checks: Vec<Check>,
    summary: Map<String, Value>,
    warnings: Vec<String>,
    artifacts: Vec<String>,
}

/// Runs the configured command and writes the CSV and JSON report into
/// `opts.output_dir`.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Outcome {
    let start = Instant::now();
    let mut report = Report {
        command: cfg.command.to_string(),
        status: "error".into(),
        partial: true,
        error: None,
        threads: 0,
        seed: cfg.seed,
        checks: Vec::new(),
        summary: Map::new(),
        warnings: Vec::new(),
        artifacts: Vec::new(),
        elapsed_seconds: 0.0,
        config: serde_json::to_value(cfg).unwrap_or(Value::Null),
    };
    if let Err(e) = std::fs::create_dir_all(&opts.output_dir) {
        let failure = Failure::Io(format!("cannot create {}: {e}", opts.output_dir.display()));
        report.error = Some(failure.to_string());
        return Outcome {
            report,
            exit_code: failure.exit_code(),
        };
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = opts.threads {
        builder = builder.num_threads(k);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let failure = Failure::Config(format!("cannot start {} threads: {e}", opts.threads.unwrap_or(0)));
            report.error = Some(failure.to_string());
            return finish(report, Err(failure), opts, start);
        }
    };
    report.threads = pool.current_num_threads();
    info!(
        "running `{}` (n = {}) on {} threads",
        cfg.command, cfg.n, report.threads
    );
    let result = pool.install(|| execute(cfg, &opts.output_dir));
    let result = result.and_then(|mut r| {
        let csv_path = opts.output_dir.join(&cfg.output.csv);
        write_csv(&csv_path, &r.table)?;
        r.artifacts.push(cfg.output.csv.clone());
        Ok(r)
    });
    let result = result.map(|r| {
        report.checks = r.checks;
        report.summary = r.summary;
        report.warnings = r.warnings;
        report.artifacts = r.artifacts;
    });
    finish(report, result, opts, start)
}

fn finish(mut report: Report, result: Result<(), Failure>, opts: &RunOptions, start: Instant) -> Outcome {
    let mut exit_code = match &result {
        Ok(()) if report.checks.iter().all(|c| c.passed) => {
            report.status = "passed".into();
            report.partial = false;
            EXIT_OK
        }
        Ok(()) => {
            report.status = "failed".into();
            report.partial = false;
            for c in report.checks.iter().filter(|c| !c.passed) {
                warn!(
                    "check {} failed: {:e} vs tolerance {:e}",
                    c.name, c.achieved, c.tolerance
                );
            }
            EXIT_NUMERICAL
        }
        Err(f) => {
            report.status = "error".into();
            report.error = Some(f.to_string());
            f.exit_code()
        }
    };
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    let report_name = report_file_name(&report);
    let path = opts.output_dir.join(&report_name);
    let text = serde_json::to_string_pretty(&report).unwrap_or_default();
    if let Err(e) = std::fs::write(&path, text + "\n") {
        let failure = Failure::Io(format!("cannot write {}: {e}", path.display()));
        report.error.get_or_insert(failure.to_string());
        if exit_code == EXIT_OK {
            exit_code = EXIT_IO;
        }
    }
    Outcome { report, exit_code }
}

fn report_file_name(report: &Report) -> String {
    report
        .config
        .pointer("/output/report")
        .and_then(Value::as_str)
        .unwrap_or("report.json")
        .to_string()
}

fn write_csv(path: &Path, table: &Table) -> Result<(), Failure> {
    let io = |e: csv::Error| Failure::Io(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&table.header).map_err(io)?;
    for row in &table.rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn execute(cfg: &ExperimentConfig, out: &Path) -> Result<CommandResult, Failure> {
    match cfg.command {
        Command::Transform => transform(cfg),
        Command::Synthesize => synthesize(cfg, out),
        Command::Reconstruct => reconstruct(cfg, out),
        Command::VerifySupport => verify(cfg),
        Command::SolveSelftest => selftest(cfg),
    }
}

fn function(cfg: &ExperimentConfig) -> Result<hororadon::DecayFunction, Failure> {
    let spec = cfg
        .function
        .as_ref()
        .ok_or_else(|| Failure::Config(format!("command `{}` needs a [function] table", cfg.command)))?;
    Ok(spec.build(cfg.n)?)
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn transform(cfg: &ExperimentConfig) -> Result<CommandResult, Failure> {
    let f = function(cfg)?;
    let q = cfg.quadrature.spec();
    let g = &cfg.grids;
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let horocycles: Vec<(Vec<f64>, f64)> = (0..g.horocycles)
        .map(|_| {
            let r = rng.gen_range(g.r_min..=g.r_max);
            let c = (0..n - 1)
                .map(|_| rng.gen_range(-g.contact_spread..=g.contact_spread))
                .collect();
            (c, r)
        })
        .collect();
    let results: Result<Vec<_>, Error> = horocycles
        .par_iter()
        .map(|(c, r)| Ok((transform_sphere(&f, c, *r, &q)?, transform_via_isometry(&f, c, *r, &q)?)))
        .collect();
    let results = results?;
    let mut table = Table {
        header: ["index", "r"].iter().map(|s| s.to_string()).collect(),
        rows: Vec::new(),
    };
    table.header.extend((1..n).map(|j| format!("contact_{j}")));
    table.header.extend(
        [
            "sphere",
            "via_isometry",
            "relative_difference",
            "error_estimate",
            "tail",
        ]
        .map(String::from),
    );
    let mut worst: f64 = 0.0;
    let mut warnings = Vec::new();
    for (i, ((c, r), (a, b))) in horocycles.iter().zip(&results).enumerate() {
        let rel = relative(a.value, b.value);
        worst = worst.max(rel);
        let mut row = vec![i.to_string(), fmt_f64(*r)];
        row.extend(c.iter().map(|v| fmt_f64(*v)));
        row.extend([a.value, b.value, rel, a.error, a.tail].map(fmt_f64));
        table.rows.push(row);
        warnings.extend(a.warnings.iter().chain(&b.warnings).cloned());
    }
    warnings.sort();
    warnings.dedup();
    let mut summary = Map::new();
    summary.insert("horocycles".into(), json!(horocycles.len()));
    summary.insert("max_relative_difference".into(), json!(worst));
    Ok(CommandResult {
        table,
        checks: vec![Check::at_most("sphere_vs_isometry", worst, cfg.tolerances.cross_check)],
        summary,
        warnings,
        artifacts: Vec::new(),
    })
}

fn write_dataset(data: &ExteriorDataset, out: &Path, name: &str) -> Result<(), Failure> {
    data.save(&out.join(name))
        .map_err(|e| Failure::Io(format!("cannot write dataset {name}: {e}")))
}

fn synthesize(cfg: &ExperimentConfig, out: &Path) -> Result<CommandResult, Failure> {
    let f = function(cfg)?;
    let q = cfg.quadrature.spec();
    let n = cfg.n;
    let etas = cfg.etas();
    let r_grid = cfg.r_grid();
    info!("synthesizing {} frequencies on {} radii", etas.len(), r_grid.len());
    let est = exterior_data_multi(&f, &etas, &r_grid, &q)?;
    let values = est.iter().map(|row| row.iter().map(|e| e.value).collect()).collect();
    let data = ExteriorDataset::new(n, etas.clone(), r_grid.clone(), values, Provenance::Synthesized)?;
    write_dataset(&data, out, &cfg.output.dataset)?;

    let mut table = Table {
        header: vec!["eta_index".into()],
        rows: Vec::new(),
    };
    table.header.extend(eta_columns(n));
    table
        .header
        .extend(["r", "re", "im", "error_estimate"].map(String::from));
    let mut warnings = Vec::new();
    for (k, row) in est.iter().enumerate() {
        for (r, e) in r_grid.iter().zip(row) {
            let mut line = vec![k.to_string()];
            line.extend(etas[k].iter().map(|v| fmt_f64(*v)));
            line.extend([*r, e.value.re, e.value.im, e.error].map(fmt_f64));
            table.rows.push(line);
            warnings.extend(e.warnings.iter().cloned());
        }
    }
    warnings.sort();
    warnings.dedup();

    // Fubini cross-check at seeded (frequency, radius) pairs with r ≥ 0.2
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let eligible: Vec<usize> = (0..r_grid.len()).filter(|&j| r_grid[j] >= 0.2).collect();
    let picks: Vec<(usize, usize)> = if eligible.is_empty() {
        Vec::new()
    } else {
        (0..cfg.grids.fubini_samples)
            .map(|_| (rng.gen_range(0..etas.len()), eligible[rng.gen_range(0..eligible.len())]))
            .collect()
    };
    let fub: Result<Vec<f64>, Error> = picks
        .par_iter()
        .map(|&(k, j)| {
            let direct = fubini_integral(&f, &etas[k], r_grid[j], &q, 128)?;
            let g = est[k][j].value;
            let scale = g.norm().max(direct.norm());
            Ok(if scale == 0.0 { 0.0 } else { (g - direct).norm() / scale })
        })
        .collect();
    let fub = fub?;
    let worst = fub.iter().copied().fold(0.0, f64::max);
    let mut summary = Map::new();
    summary.insert("frequencies".into(), json!(etas.len()));
    summary.insert("radii".into(), json!(r_grid.len()));
    summary.insert("max_modulus".into(), json!(data.max_modulus()));
    summary.insert(
        "fubini_samples".into(),
        json!(picks
            .iter()
            .zip(&fub)
            .map(|(&(k, j), e)| json!({"eta_index": k, "r": r_grid[j], "relative_error": e}))
            .collect::<Vec<_>>()),
    );
    let checks = if picks.is_empty() {
        Vec::new()
    } else {
        vec![Check::at_most("fubini_identity", worst, cfg.tolerances.fubini)]
    };
    Ok(CommandResult {
        table,
        checks,
        summary,
        warnings,
        artifacts: vec![cfg.output.dataset.clone()],
    })
}

fn reconstruct(cfg: &ExperimentConfig, out: &Path) -> Result<CommandResult, Failure> {
    let q = cfg.quadrature.spec();
    let f = match &cfg.function {
        Some(spec) => Some(spec.build(cfg.n)?),
        None => None,
    };
    let mut artifacts = Vec::new();
    let data = match &cfg.input.dataset {
        Some(path) => {
            let p = cfg.resolve_input(path);
            info!("loading dataset {}", p.display());
            let data = ExteriorDataset::load(&p).map_err(|e| match e {
                Error::Io(io) => Failure::Io(format!("cannot read {}: {io}", p.display())),
                other => Failure::Config(format!("{}: {other}", p.display())),
            })?;
            if data.n != cfg.n {
                return Err(Failure::Config(format!(
                    "dataset has n = {}, config has n = {}",
                    data.n, cfg.n
                )));
            }
            data
        }
        None => {
            let f = f.as_ref().expect("validated: function present without input dataset");
            info!("synthesizing dataset for reconstruction");
            let data = hororadon::synthesize_dataset(f, &cfg.etas(), &cfg.r_grid(), &q)?;
            write_dataset(&data, out, &cfg.output.dataset)?;
            artifacts.push(cfg.output.dataset.clone());
            data
        }
    };
    info!("reconstructing {} frequencies", data.etas.len());
    let recs = reconstruct_all(&data)?;
    let references: Option<Vec<_>> = match &f {
        Some(f) => {
            let r: Result<Vec<_>, Error> = recs
                .par_iter()
                .map(|rec| fourier_slices(f, &rec.slice.eta, &rec.slice.u_grid, &q))
                .collect();
            Some(r?)
        }
        None => None,
    };
    let n = data.n;
    let mut table = Table {
        header: vec!["eta_index".into()],
        rows: Vec::new(),
    };
    table.header.extend(eta_columns(n));
    table
        .header
        .extend(["u", "re", "im", "reference_re", "reference_im", "abs_error"].map(String::from));
    let mut warnings = Vec::new();
    let mut per_freq = Vec::new();
    for (k, rec) in recs.iter().enumerate() {
        warnings.extend(rec.warnings.iter().cloned());
        let reference = references.as_ref().map(|r| &r[k]);
        let mut max_err: f64 = 0.0;
        for (j, (u, v)) in rec.slice.u_grid.iter().zip(&rec.slice.values).enumerate() {
            let mut line = vec![k.to_string()];
            line.extend(rec.slice.eta.iter().map(|x| fmt_f64(*x)));
            line.extend([*u, v.re, v.im].map(fmt_f64));
            match reference {
                Some(r) => {
                    let err = (v - r.values[j]).norm();
                    max_err = max_err.max(err);
                    line.extend([r.values[j].re, r.values[j].im, err].map(fmt_f64));
                }
                None => line.extend([String::new(), String::new(), String::new()]),
            }
            table.rows.push(line);
        }
        if let Some(r) = reference {
            let scale = r.max_modulus();
            per_freq.push(if scale > 0.0 { max_err / scale } else { max_err });
        }
    }
    warnings.sort();
    warnings.dedup();
    let mut summary = Map::new();
    summary.insert(
        "provenance".into(),
        json!(format!("{:?}", data.provenance).to_lowercase()),
    );
    summary.insert("frequencies".into(), json!(data.etas.len()));
    summary.insert("nodes".into(), json!(data.r_grid.len()));
    summary.insert(
        "max_slice_magnitude".into(),
        json!(recs.iter().map(|r| r.slice.max_modulus()).fold(0.0, f64::max)),
    );
    let mut checks = Vec::new();
    if references.is_some() {
        summary.insert("relative_linf_per_frequency".into(), json!(per_freq));
        let worst = per_freq.iter().copied().fold(0.0, f64::max);
        checks.push(Check::at_most(
            "round_trip_relative_linf",
            worst,
            cfg.tolerances.round_trip_for(n),
        ));
    } else {
        warnings.push("no [function] given: reconstruction not compared with a reference".into());
    }
    Ok(CommandResult {
        table,
        checks,
        summary,
        warnings,
        artifacts,
    })
}

fn verify(cfg: &ExperimentConfig) -> Result<CommandResult, Failure> {
    let f = function(cfg)?;
    let q = cfg.quadrature.spec();
    let t = &cfg.tolerances;
    let tol = SupportTolerance {
        data: t.data,
        slice: t.slice,
    };
    let plan = VerifyPlan {
        eta_norms: if cfg.grids.etas.is_empty() {
            cfg.grids.eta_norms.clone()
        } else {
            cfg.grids
                .etas
                .iter()
                .map(|e| e.iter().map(|v| v * v).sum::<f64>().sqrt())
                .collect()
        },
        s_nodes: cfg.grids.s_nodes,
        eps: cfg.grids.eps,
        ..VerifyPlan::default()
    };
    let rep = verify_support_with(&f, cfg.support.delta, &q, tol, &plan)?;
    let n = cfg.n;
    let mut table = Table {
        header: vec!["eta_index".into()],
        rows: Vec::new(),
    };
    table.header.extend(eta_columns(n));
    table.header.push("max_slice_magnitude".into());
    for (k, (eta, m)) in rep.profile.iter().enumerate() {
        let mut line = vec![k.to_string()];
        line.extend(eta.iter().map(|v| fmt_f64(*v)));
        line.push(fmt_f64(*m));
        table.rows.push(line);
    }
    let mut summary = Map::new();
    summary.insert(
        "verdict".into(),
        json!(match rep.verdict {
            Verdict::ConsistentWithZero => "consistent-with-zero",
            Verdict::Nonzero => "nonzero",
        }),
    );
    summary.insert("max_slice_magnitude".into(), json!(rep.max_slice_magnitude));
    summary.insert("forward_max".into(), json!(rep.forward_max));
    summary.insert("data_max".into(), json!(rep.data_max));
    summary.insert("delta".into(), json!(cfg.support.delta));
    Ok(CommandResult {
        table,
        checks: vec![
            Check::at_most("forward_transform_zero", rep.forward_max, t.data),
            Check::at_most("exterior_data_zero", rep.data_max, t.data),
            Check::at_most("reconstructed_slices_zero", rep.max_slice_magnitude, t.slice),
        ],
        summary,
        warnings: rep.warnings,
        artifacts: Vec::new(),
    })
}

fn second_kind_error(nodes: usize, sine: bool) -> Result<f64, Failure> {
    let grid = UniformGrid::new(0.0, 1.0, nodes)?;
    let (kernel, exact): (Kernel<'static>, fn(f64) -> f64) = if sine {
        (Box::new(|s, t| s - t), f64::sin)
    } else {
        (Box::new(|_, _| 1.0), |s: f64| (-s).exp())
    };
    let rhs: fn(f64) -> f64 = if sine { |s| s } else { |_| 1.0 };
    let p = SecondKindProblem::from_fn(grid, kernel, rhs)?;
    let sol = solve_second_kind(&p)?;
    Ok(max_error(&grid, &sol.values, exact))
}

fn max_error(grid: &UniformGrid, values: &[f64], exact: impl Fn(f64) -> f64) -> f64 {
    grid.nodes()
        .iter()
        .zip(values)
        .fold(0.0, |m, (s, v)| m.max((v - exact(*s)).abs()))
}

/// The analytic solver examples: `φ = e^{-s}`, `φ = sin s`, `ψ ≡ 1`, and the Abel
/// equation with `f = 2√s`.
fn selftest(cfg: &ExperimentConfig) -> Result<CommandResult, Failure> {
    let t = &cfg.tolerances;
    let mut rows: Vec<(String, usize, Check)> = Vec::new();
    for (name, sine) in [("second_kind_exp", false), ("second_kind_sin", true)] {
        let e512 = second_kind_error(512, sine)?;
        rows.push((name.into(), 512, Check::at_most(name, e512, t.solver)));
        let coarse = second_kind_error(257, sine)?;
        let fine = second_kind_error(513, sine)?;
        let order = format!("{name}_order");
        rows.push((
            order.clone(),
            513,
            Check::at_least(&order, coarse / fine, t.order_ratio),
        ));
    }

    let grid = UniformGrid::new(0.0, 1.0, 512)?;
    let first = FirstKindProblem {
        grid,
        kernel: Box::new(|_, _| 1.0),
        kernel_ds: Some(Box::new(|_, _| 0.0)),
        rhs: grid.nodes(),
        rhs_derivative: None,
    };
    let sol = solve_first_kind(&first)?;
    rows.push((
        "first_kind_constant".into(),
        512,
        Check::at_most("first_kind_constant", max_error(&grid, &sol.values, |_| 1.0), t.solver),
    ));

    let abel = AbelProblem {
        grid,
        alpha: 0.5,
        g: Box::new(|_, _| 1.0),
        g_ds: Some(Box::new(|_, _| 0.0)),
        rhs: grid.nodes().iter().map(|s| 2.0 * s.sqrt()).collect(),
    };
    let a = solve_abel(&abel)?;
    rows.push((
        "abel_sqrt".into(),
        512,
        Check::at_most("abel_sqrt", max_error(&grid, &a.values, |_| 1.0), t.abel),
    ));
    let b = solve_abel_product(&abel)?;
    rows.push((
        "abel_sqrt_product_route".into(),
        512,
        Check::at_most("abel_sqrt_product_route", max_error(&grid, &b.values, |_| 1.0), t.abel),
    ));

    let table = Table {
        header: ["check", "nodes", "achieved", "tolerance", "comparison", "passed"]
            .map(String::from)
            .to_vec(),
        rows: rows
            .iter()
            .map(|(name, nodes, c)| {
                vec![
                    name.clone(),
                    nodes.to_string(),
                    fmt_f64(c.achieved),
                    fmt_f64(c.tolerance),
                    c.comparison.to_string(),
                    c.passed.to_string(),
                ]
            })
            .collect(),
    };
    let mut summary = Map::new();
    summary.insert("examples".into(), json!(rows.len()));
    Ok(CommandResult {
        table,
        checks: rows.into_iter().map(|(_, _, c)| c).collect(),
        summary,
        warnings: a.warnings,
        artifacts: Vec::new(),
    })
}
