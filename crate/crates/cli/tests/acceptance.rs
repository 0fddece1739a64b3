//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use hororadon::functions::{gaussian, smooth_bump, vertical_bump};
use hororadon::quadrature::{linspace, SphereRule};
use hororadon::volterra::{Kernel, SecondKindProblem};
use hororadon::{
    exterior_data, fourier_slices, fubini_integral, reconstruct_all, reduce_even_step, solve_abel, solve_second_kind,
    sphere_phase_integral, synthesize_dataset, transform_sphere, transform_via_isometry, verify_support, AbelProblem,
    BesselProfile, Complex64, DecayFunction, ExteriorDataset, FnProfile, KernelEquation, Profile, QuadratureSpec,
    SupportTolerance, UniformGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn axis_etas(n: usize, norms: &[f64]) -> Vec<Vec<f64>> {
    norms
        .iter()
        .map(|&k| {
            let mut e = vec![0.0; n - 1];
            e[0] = k;
            e
        })
        .collect()
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cross_check() -> Outcome {
    let q = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for n in [2, 3, 4] {
        // off-center, so the Cartesian rules are exercised
        let center: Vec<f64> = (0..n - 1).map(|j| 0.3 - 0.25 * j as f64).collect();
        let f = gaussian(n, center, 0.8, 0.5, 0.3).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let r = rng.gen_range(0.1..=0.5);
            let c: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let a = transform_sphere(&f, &c, r, &q).map_err(|e| e.to_string())?.value;
            let b = transform_via_isometry(&f, &c, r, &q).map_err(|e| e.to_string())?.value;
            worst = worst.max((a - b).abs() / a.abs().max(b.abs()));
        }
    }
    verdict(
        worst <= 1e-5,
        format!("max relative difference {worst:.2e} (tolerance 1e-5)"),
    )
}

fn fubini() -> Outcome {
    let q = QuadratureSpec::default();
    let n = 3;
    let f = gaussian(n, vec![], 0.9, 0.3, 0.5).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let eta = vec![rng.gen_range(-1.5..=1.5), rng.gen_range(-1.5..=1.5)];
        let r = rng.gen_range(0.1..=0.5);
        let g = exterior_data(&f, &eta, &[r], &q).map_err(|e| e.to_string())?[0].value;
        let direct = fubini_integral(&f, &eta, r, &q, 128).map_err(|e| e.to_string())?;
        worst = worst.max((g - direct).norm() / direct.norm());
    }
    verdict(
        worst <= 1e-3,
        format!("max relative difference {worst:.2e} (tolerance 1e-3)"),
    )
}

fn second_kind_error(nodes: usize, sine: bool) -> Result<f64, String> {
    let grid = UniformGrid::new(0.0, 1.0, nodes).map_err(|e| e.to_string())?;
    let kernel: Kernel<'static> = if sine {
        Box::new(|s, t| s - t)
    } else {
        Box::new(|_, _| 1.0)
    };
    let p = SecondKindProblem::from_fn(grid, kernel, move |s: f64| if sine { s } else { 1.0 })
        .map_err(|e| e.to_string())?;
    let sol = solve_second_kind(&p).map_err(|e| e.to_string())?;
    let exact = |s: f64| if sine { s.sin() } else { (-s).exp() };
    Ok(grid
        .nodes()
        .iter()
        .zip(&sol.values)
        .fold(0.0, |m, (s, v)| m.max((v - exact(*s)).abs())))
}

fn solver_analytics() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (label, sine) in [("e^-s", false), ("sin s", true)] {
        let e = second_kind_error(512, sine)?;
        let ratio = second_kind_error(257, sine)? / second_kind_error(513, sine)?;
        ok &= e <= 1e-4 && ratio >= 3.5;
        lines.push(format!("{label}: error {e:.2e}, ratio {ratio:.2}"));
    }
    let grid = UniformGrid::new(0.0, 1.0, 512).map_err(|e| e.to_string())?;
    let abel = AbelProblem {
        grid,
        alpha: 0.5,
        g: Box::new(|_, _| 1.0),
        g_ds: Some(Box::new(|_, _| 0.0)),
        rhs: grid.nodes().iter().map(|s| 2.0 * s.sqrt()).collect(),
    };
    let sol = solve_abel(&abel).map_err(|e| e.to_string())?;
    let e = sol.values.iter().fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
    ok &= e <= 1e-3;
    lines.push(format!("abel: error {e:.2e}"));
    verdict(ok, lines.join("; "))
}

fn support() -> Outcome {
    let q = QuadratureSpec::default();
    let mut zero_max: f64 = 0.0;
    for n in 2..=5 {
        let data = ExteriorDataset::zero(n, axis_etas(n, &[0.0, 1.0, 3.0]), linspace(5e-4, 0.5, 256))
            .map_err(|e| e.to_string())?;
        for rec in reconstruct_all(&data).map_err(|e| e.to_string())? {
            zero_max = zero_max.max(rec.slice.max_modulus());
        }
    }
    let (mut data_max, mut slice_max) = (0.0f64, 0.0f64);
    for n in 2..=5 {
        let f = vertical_bump(n, vec![], 1.0, 1.2, 2.0).map_err(|e| e.to_string())?;
        let rep = verify_support(&f, 0.2, &q, SupportTolerance::default()).map_err(|e| e.to_string())?;
        data_max = data_max.max(rep.data_max).max(rep.forward_max);
        slice_max = slice_max.max(rep.max_slice_magnitude);
    }
    verdict(
        zero_max <= 1e-10 && data_max <= 1e-8 && slice_max <= 1e-6,
        format!("zero data → {zero_max:.2e} (≤ 1e-10); exterior data {data_max:.2e} (≤ 1e-8); slices {slice_max:.2e} (≤ 1e-6)"),
    )
}

fn round_trip_error(f: &DecayFunction, data: &ExteriorDataset, q: &QuadratureSpec) -> Result<f64, String> {
    let recs = reconstruct_all(data).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (k, rec) in recs.iter().enumerate() {
        let direct = fourier_slices(f, &data.etas[k], &rec.slice.u_grid, q).map_err(|e| e.to_string())?;
        let err = rec
            .slice
            .values
            .iter()
            .zip(&direct.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        worst = worst.max(err / direct.max_modulus());
    }
    Ok(worst)
}

fn round_trip() -> Outcome {
    let q = QuadratureSpec::default();
    let mut ok = true;
    let mut lines = Vec::new();
    for (n, tol) in [(2, 5e-2), (3, 5e-2), (4, 1e-1)] {
        let f = vertical_bump(n, vec![], 1.0, 0.2, 0.8).map_err(|e| e.to_string())?;
        let data = synthesize_dataset(&f, &axis_etas(n, &[0.0, 1.0, 2.5]), &linspace(5e-4, 0.5, 256), &q)
            .map_err(|e| e.to_string())?;
        let err = round_trip_error(&f, &data, &q)?;
        ok &= err <= tol;
        lines.push(format!("n={n}: {err:.2e} (≤ {tol:e})"));
    }
    verdict(ok, lines.join("; "))
}

fn even_step() -> Outcome {
    let profiles: Vec<(usize, Arc<dyn Profile>)> = vec![
        (4, Arc::new(FnProfile::new("cos", f64::cos))),
        (4, Arc::new(FnProfile::new("gauss", |x: f64| (-x * x).exp()))),
        (4, Arc::new(BesselProfile::new(4, 2.0).map_err(|e| e.to_string())?)),
        (8, Arc::new(BesselProfile::new(8, 1.0).map_err(|e| e.to_string())?)),
        (6, Arc::new(BesselProfile::new(6, 1.5).map_err(|e| e.to_string())?)),
    ];
    let unknown = |u: f64| smooth_bump((u - 0.4) / 0.3) + 0.5 * u;
    let mut worst: f64 = 0.0;
    for (n, profile) in profiles {
        let eq = KernelEquation::new(
            n,
            profile,
            0,
            vec![1.0],
            vec![Complex64::new(0.0, 0.0)],
            "F".into(),
            vec![],
        )
        .map_err(|e| e.to_string())?;
        let reduced = reduce_even_step(&eq).map_err(|e| e.to_string())?;
        for s in [0.2, 0.5, 0.8, 1.0] {
            let h = 1e-4;
            let lhs = (eq.apply(s + h, 400, unknown) - eq.apply(s - h, 400, unknown)) / (2.0 * h);
            let rhs = 0.5 * reduced.apply(s, 400, unknown);
            worst = worst.max((lhs - rhs).abs() / rhs.abs());
        }
    }
    verdict(
        worst <= 1e-4,
        format!("max relative mismatch {worst:.2e} (tolerance 1e-4)"),
    )
}

fn phase_function() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=6 {
        let rule = SphereRule::new(n, 40);
        for i in 0..=80 {
            let z = 0.25 * i as f64;
            let direct: f64 = rule.iter().map(|(w, wt)| wt * (z * w[n - 2]).cos()).sum();
            let v = sphere_phase_integral(z, n).map_err(|e| e.to_string())?;
            worst = worst.max((v - direct).abs());
        }
    }
    // spot value: 2π J₀(1)
    let j01 = sphere_phase_integral(1.0, 3).map_err(|e| e.to_string())? / (2.0 * PI);
    verdict(
        worst <= 1e-10,
        format!("max |Bessel − sphere rule| {worst:.2e} (tolerance 1e-10); J0(1) = {j01:.7}"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let configs = [
        (
            "transform",
            "command = \"transform\"\nn = 3\nseed = 42\n[function]\nkind = \"gaussian-bump\"\ncenter = [0.2, -0.1]\n[grids]\nhorocycles = 8\n",
        ),
        (
            "synthesize",
            "command = \"synthesize\"\nn = 2\nseed = 42\n[function]\nkind = \"vertical-bump\"\nlow = 0.2\nhigh = 0.8\n[grids]\ns_nodes = 64\n",
        ),
    ];
    let mut sizes = Vec::new();
    for (name, text) in configs {
        let cfg = dir.path().join(format!("{name}.toml"));
        std::fs::write(&cfg, text).map_err(|e| e.to_string())?;
        let mut outputs = Vec::new();
        for (run, threads) in [(0, "1"), (1, "1"), (2, "2")] {
            let out = dir.path().join(format!("{name}_{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_hororadon"))
                .arg("--config")
                .arg(&cfg)
                .arg("--output-dir")
                .arg(&out)
                .args(["--threads", threads])
                .output()
                .map_err(|e| e.to_string())?
                .status;
            if !status.success() {
                return Err(format!("{name} run {run} exited with {status}"));
            }
            outputs.push(std::fs::read(out.join("results.csv")).map_err(|e| e.to_string())?);
        }
        if outputs.iter().any(|o| *o != outputs[0]) {
            return Err(format!("{name}: CSV differs between runs"));
        }
        sizes.push(format!("{name} {} bytes", outputs[0].len()));
    }
    Ok(format!("byte-identical CSV over 3 runs each ({})", sizes.join(", ")))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "forward transform cross-check",
            budget: Some(Duration::from_secs(60)),
            run: cross_check,
        },
        Criterion {
            id: 2,
            name: "Fubini slice identity",
            budget: Some(Duration::from_secs(120)),
            run: fubini,
        },
        Criterion {
            id: 3,
            name: "solver analytics",
            budget: None,
            run: solver_analytics,
        },
        Criterion {
            id: 4,
            name: "support theorem, homogeneous direction",
            budget: Some(Duration::from_secs(300)),
            run: support,
        },
        Criterion {
            id: 5,
            name: "reconstruction round trip",
            budget: Some(Duration::from_secs(300)),
            run: round_trip,
        },
        Criterion {
            id: 6,
            name: "even-step constant",
            budget: None,
            run: even_step,
        },
        Criterion {
            id: 7,
            name: "phase function vs sphere quadrature",
            budget: None,
            run: phase_function,
        },
        Criterion {
            id: 8,
            name: "CLI determinism",
            budget: None,
            run: determinism,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let over = c.budget.is_some_and(|b| elapsed > b);
        let budget = c.budget.map(|b| format!(" ≤ {} s", b.as_secs())).unwrap_or_default();
        let (ok, detail) = match result {
            Ok(d) if !over => (true, d),
            Ok(d) => (false, format!("{d}; over time budget")),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} [{}] {}: {} ({:.1} s{budget})",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
