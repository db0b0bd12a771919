//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nodal_atlas::asymptotics::{
    density_one_extract, omega, qer_statistic, weight_integral, windows_nonincreasing,
    AsymptoticsError, CurveLabel, FitWindow, KuznecovSeries, QerKind,
};
use nodal_atlas::mesh::{fixed_point_set, gen_flat_torus, gen_genus2, Involution};
use nodal_atlas::nodal::{
    build_nodal_graph, count_nodal_domains, detect_singular_points, euler_check, lemma1_bounds,
};
use nodal_atlas::restriction::{
    count_sign_changes, make_path, period_integral, restrict, CurveTrace, TraceKind,
};
use nodal_atlas::spectral::{
    assemble_operators, assemble_operators_with, solve_eigenpairs_with, solve_with_parity,
    sup_norm, MassKind, ParityOptions, Parity, SolverOptions,
};
use nodal_atlas::{CurvePath64, EigenPair64, SurfaceMesh64};
use nodal_atlas_cli::{run_pipeline, verify_bundle, Bundle, PipelineConfig, SUMMARY_FILE};

const TAU: f64 = 2.0 * std::f64::consts::PI;

const TORUS_REL_ERR: f64 = 0.02;
const TORUS_SECONDS: f64 = 60.0;
const MIN_GRAPH_PAIRS: usize = 200;
const TRACE_TOL: f64 = 1e-6;
const KUZNECOV_EXPONENT: f64 = 0.5;
const KUZNECOV_TOL: f64 = 0.05;
const QUADRATURE_TOL: f64 = 1e-6;
const TORUS_QER_TOL: f64 = 1e-4;
const CAUCHY_REL_TOL: f64 = 1e-6;
const MIN_WINDOWS: usize = 3;
const MIN_VARIANCE_CONFIGS: usize = 2;
const EXTRACTION_DENSITY: f64 = 0.99;
const EXTRACTION_SECONDS: f64 = 5.0;
const PROPERTY_CASES: usize = 1000;
const LINEARITY_TOL: f64 = 1e-10;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn analytic_torus_eigenvalues(count: usize) -> Vec<f64> {
    let r = (count as f64).sqrt() as i64 + 2;
    let mut v: Vec<f64> = (-r..=r)
        .flat_map(|m| (-r..=r).map(move |n| (m * m + n * n) as f64))
        .collect();
    v.sort_by(f64::total_cmp);
    v.truncate(count);
    v
}

fn max_relative_error(pairs: &[EigenPair64], exact: &[f64]) -> (f64, bool) {
    let mut worst = 0.0f64;
    let mut zero_ok = true;
    for (p, e) in pairs.iter().zip(exact) {
        if *e == 0.0 {
            zero_ok &= p.eigenvalue.abs() < 1e-8;
        } else {
            worst = worst.max((p.eigenvalue - e).abs() / e);
        }
    }
    (worst, zero_ok)
}

fn torus_spectrum() -> Outcome {
    let start = Instant::now();
    let (mesh, _) = gen_flat_torus::<f64>(32, TAU, TAU).unwrap();
    let ops = assemble_operators(&mesh).unwrap();
    let pairs = solve_eigenpairs_with(&ops, 60, &SolverOptions::default()).unwrap();
    let seconds = start.elapsed().as_secs_f64();
    let exact = analytic_torus_eigenvalues(60);
    let (worst, zero_ok) = max_relative_error(&pairs, &exact);
    let over = pairs
        .iter()
        .zip(&exact)
        .filter(|(p, e)| **e > 0.0 && (p.eigenvalue - **e).abs() / **e > TORUS_REL_ERR)
        .count();
    // Reported for comparison only: the consistent mass matrix errs upward.
    let consistent = assemble_operators_with(&mesh, MassKind::Consistent).unwrap();
    let cpairs = solve_eigenpairs_with(&consistent, 60, &SolverOptions::default()).unwrap();
    let (cworst, _) = max_relative_error(&cpairs, &exact);
    outcome(
        worst <= TORUS_REL_ERR && zero_ok && seconds <= TORUS_SECONDS,
        format!(
            "max rel err {:.2}% over 59 nonzero eigenvalues, {over} above {:.0}% (consistent mass: {:.2}%), {seconds:.1} s (limit {TORUS_SECONDS} s)",
            100.0 * worst,
            100.0 * TORUS_REL_ERR,
            100.0 * cworst
        ),
    )
}

struct Surface {
    name: &'static str,
    mesh: SurfaceMesh64,
    inv: Involution,
    path: CurvePath64,
    pairs: Vec<EigenPair64>,
}

fn surface(name: &'static str, mesh: SurfaceMesh64, inv: Involution, k: usize) -> Surface {
    let ops = assemble_operators(&mesh).unwrap();
    let pairs = solve_with_parity(&ops, &inv, k, &SolverOptions::default(), &ParityOptions::default()).unwrap();
    let fixed = fixed_point_set(&mesh, &inv).unwrap();
    let path = make_path(&mesh, &fixed.components[0]).unwrap();
    Surface {
        name,
        mesh,
        inv,
        path,
        pairs,
    }
}

fn graph_surfaces() -> Vec<Surface> {
    let (t, ti) = gen_flat_torus(16, TAU, TAU).unwrap();
    let (g, gi) = gen_genus2(1).unwrap();
    vec![surface("torus n=16", t, ti, 100), surface("genus2 s=1", g, gi, 120)]
}

#[derive(Default)]
struct GraphTally {
    pairs: usize,
    euler_fail: usize,
    bound_fail: usize,
    min_slack: i64,
}

fn graph_tally(surfaces: &[Surface]) -> GraphTally {
    let mut t = GraphTally {
        min_slack: i64::MAX,
        ..GraphTally::default()
    };
    for s in surfaces {
        let g = s.mesh.genus();
        for p in &s.pairs {
            let graph = build_nodal_graph(p, &s.mesh, &s.inv, &s.path).unwrap();
            let domains = count_nodal_domains(p, &s.mesh, Some(&s.inv)).unwrap();
            let (bound, holds) = lemma1_bounds(&domains, &graph, g).unwrap();
            t.pairs += 1;
            if !euler_check(&graph, g) {
                t.euler_fail += 1;
            }
            if !holds {
                t.bound_fail += 1;
            }
            t.min_slack = t.min_slack.min(domains.count as i64 - bound);
        }
    }
    t
}

fn torus_mode(n: usize, parity: Parity, lambda: f64, f: impl Fn(f64, f64) -> f64) -> EigenPair64 {
    let h = TAU / n as f64;
    let coefficients = (0..n * n)
        .map(|v| f((v % n) as f64 * h, (v / n) as f64 * h))
        .collect();
    EigenPair64 {
        index: 0,
        eigenvalue: lambda,
        coefficients,
        parity,
        residual: 0.0,
    }
}

fn hand_built_cases() -> (bool, String) {
    let n = 16;
    let (mesh, inv) = gen_flat_torus::<f64>(n, TAU, TAU).unwrap();
    let path = make_path(&mesh, &(0..n).collect::<Vec<_>>()).unwrap();
    let even = torus_mode(n, Parity::Even, 1.0, |x, _| x.sin());
    let g = build_nodal_graph(&even, &mesh, &inv, &path).unwrap();
    let d = count_nodal_domains(&even, &mesh, Some(&inv)).unwrap();
    let (bound, holds) = lemma1_bounds(&d, &g, 1).unwrap();
    let even_ok = d.count == 2 && g.n == 2 && bound == 1 && holds;
    let odd = torus_mode(n, Parity::Odd, 2.0, |x, y| y.sin() * x.cos());
    let singular = detect_singular_points(&odd, &mesh, &path, None).unwrap();
    (
        even_ok && singular.len() == 2,
        format!(
            "sin x even: N={} n={} bound={bound}; sin y cos x odd: {} singular points",
            d.count,
            g.n,
            singular.len()
        ),
    )
}

fn parity_traces(surfaces: &[Surface]) -> Outcome {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for s in surfaces {
        for p in &s.pairs {
            let kind = match p.parity {
                Parity::Even if p.eigenvalue > 1e-8 => TraceKind::NeumannNormalized,
                Parity::Odd => TraceKind::Dirichlet,
                _ => continue,
            };
            let tr = restrict(p, &s.mesh, &s.path, kind).unwrap();
            let m = tr.samples.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            worst = worst.max(m / sup_norm(p));
            checked += 1;
        }
    }
    outcome(
        worst <= TRACE_TOL,
        format!("max |trace| / sup = {worst:.2e} over {checked} pairs (tol {TRACE_TOL:e})"),
    )
}

fn analytic_kuznecov(scale: f64) -> KuznecovSeries<f64> {
    let lambda_max = 10_000i64;
    let r = 101;
    let mut modes: Vec<(i64, i64, i64, u8)> = vec![(0, 0, 0, 0)];
    for m in -r..=r {
        for n in -r..=r {
            let positive = m > 0 || (m == 0 && n > 0);
            if positive && m * m + n * n <= lambda_max {
                modes.push((m * m + n * n, m, n, 0));
                modes.push((m * m + n * n, m, n, 1));
            }
        }
    }
    modes.sort();
    let lambda = modes.iter().map(|m| m.0 as f64).collect();
    let periods = modes
        .iter()
        .map(|&(l, m, _, sine)| {
            scale
                * if l == 0 {
                    1.0
                } else if m == 0 && sine == 0 {
                    2f64.sqrt()
                } else {
                    0.0
                }
        })
        .collect();
    KuznecovSeries::from_periods(lambda, periods, scale * TAU, TAU, scale, FitWindow::Range(100.0, 1e4))
        .unwrap()
}

fn kuznecov_scaling() -> Outcome {
    let s1 = analytic_kuznecov(1.0);
    let s2 = analytic_kuznecov(2.0);
    let exponent = s1.fit.map_or(f64::NAN, |f| f.exponent);
    let exact = s1
        .partial_sums
        .iter()
        .zip(&s2.partial_sums)
        .all(|(a, b)| 4.0 * a == *b);
    outcome(
        (exponent - KUZNECOV_EXPONENT).abs() <= KUZNECOV_TOL && exact,
        format!(
            "fitted exponent {exponent:.4} on lambda in [100, 1e4] ({} modes), f -> 2f quadruples S exactly: {exact}",
            s1.eigenvalues.len()
        ),
    )
}

/// Solver eigenvectors projected onto functions of y alone; the projection
/// of an eigenspace containing cos(ny) is that mode.
fn torus_qer_identity() -> (bool, String) {
    let n = 32;
    let (mesh, inv) = gen_flat_torus::<f64>(n, TAU, TAU).unwrap();
    let ops = assemble_operators(&mesh).unwrap();
    let pairs = solve_with_parity(&ops, &inv, 60, &SolverOptions::default(), &ParityOptions::default()).unwrap();
    let path = make_path(&mesh, &(0..n).collect::<Vec<_>>()).unwrap();
    let ones = vec![1.0; n];
    let target = omega(&ones, &path, mesh.total_area(), QerKind::Dirichlet).unwrap();
    let mut modes = Vec::new();
    let mut i = 1;
    while i < pairs.len() {
        let mut j = i;
        while j < pairs.len() && (pairs[j].eigenvalue - pairs[i].eigenvalue).abs() < 1e-6 * (1.0 + pairs[i].eigenvalue) {
            j += 1;
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        for p in pairs[i..j].iter().filter(|p| p.parity == Parity::Even) {
            let v = y_average(&p.coefficients, n);
            let norm = ops.mass_inner(&v, &v).sqrt();
            if best.as_ref().is_none_or(|b| norm > b.0) {
                best = Some((norm, v));
            }
        }
        if let Some((norm, v)) = best.filter(|b| b.0 > 0.5) {
            let mode = EigenPair64 {
                index: pairs[i].index,
                eigenvalue: pairs[i].eigenvalue,
                coefficients: v.iter().map(|x| x / norm).collect(),
                parity: Parity::Even,
                residual: 0.0,
            };
            modes.push(mode);
        }
        i = j;
    }
    let sample = qer_statistic(&modes, &mesh, Some(&inv), &path, &ones, QerKind::Dirichlet, CurveLabel::Fixed).unwrap();
    let worst = sample.statistics.iter().fold(0.0f64, |a, s| a.max((s - target).abs()));
    let pi_inv = 1.0 / std::f64::consts::PI;
    (
        worst <= TORUS_QER_TOL && (target - pi_inv).abs() < 1e-12 && modes.len() >= 3,
        format!(
            "{} cos(ny) modes, max |stat - omega(1)| = {worst:.1e}, omega(1) - 1/pi = {:.1e}",
            modes.len(),
            target - pi_inv
        ),
    )
}

/// Replaces each vertex value by the mean over its row, i.e. over x.
fn y_average(v: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for j in 0..n {
        let mean = (0..n).map(|i| v[i + n * j]).sum::<f64>() / n as f64;
        for i in 0..n {
            out[i + n * j] = mean;
        }
    }
    out
}

/// `\int f ((1 + h^2 D^2) phi) phi ds` computed directly from the trace.
fn renormalized_dirichlet(tr: &CurveTrace<f64>, lambda: f64) -> f64 {
    let n = tr.samples.len();
    let u = &tr.samples;
    let l = &tr.edge_lengths;
    let w: Vec<f64> = (0..n)
        .map(|i| {
            let prev = (i + n - 1) % n;
            let next = (i + 1) % n;
            let d2 = 2.0 * ((u[next] - u[i]) / l[i] - (u[i] - u[prev]) / l[prev]) / (l[i] + l[prev]);
            (u[i] + d2 / lambda) * u[i]
        })
        .collect();
    (0..n).map(|i| 0.5 * l[i] * (w[i] + w[(i + 1) % n])).sum()
}

fn cauchy_drop_out(s: &Surface) -> (bool, String) {
    let even: Vec<EigenPair64> = s
        .pairs
        .iter()
        .filter(|p| p.parity == Parity::Even && p.eigenvalue > 1e-8)
        .cloned()
        .collect();
    let ones = vec![1.0; s.path.len()];
    let c = qer_statistic(&even, &s.mesh, Some(&s.inv), &s.path, &ones, QerKind::Cauchy, CurveLabel::Fixed).unwrap();
    let mut worst = 0.0f64;
    for (p, stat) in even.iter().zip(&c.statistics) {
        let tr = restrict(p, &s.mesh, &s.path, TraceKind::Dirichlet).unwrap();
        let part = renormalized_dirichlet(&tr, p.eigenvalue);
        worst = worst.max((stat - part).abs() / part.abs().max(f64::MIN_POSITIVE));
    }
    (
        worst <= CAUCHY_REL_TOL,
        format!("{}: {} even pairs, max relative gap {worst:.1e}", s.name, even.len()),
    )
}

fn genus2_bundles() -> Vec<(String, Bundle)> {
    let mut paths: Vec<PathBuf> = fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("genus2"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|path| {
            let dir = tempfile::tempdir().unwrap();
            let mut cfg = PipelineConfig::load(path).unwrap();
            cfg.output = dir.path().to_path_buf();
            let name = path.file_stem().unwrap().to_string_lossy().into_owned();
            (name, run_pipeline(&cfg).unwrap())
        })
        .collect()
}

/// Bounded-remainder trend of the mean-zero series, logged only.
fn kuznecov_trend(bundles: &[(String, Bundle)]) {
    for (name, b) in bundles {
        for k in b.report.kuznecov.iter().filter(|k| k.flagged) {
            let peak = k.trend.iter().fold(0.0f64, |a, t| a.max(t.1.abs()));
            let last = k.trend.last().map_or(f64::NAN, |t| t.1);
            println!(
                "INFO mean-zero Kuznecov trend {name} {} {:?}: {} samples, max |S| {peak:.4}, S at lambda {:.1} = {last:.4}",
                k.observable,
                k.kind,
                k.trend.len(),
                k.trend.last().map_or(f64::NAN, |t| t.0),
            );
        }
    }
}

fn window_variance(bundles: &[(String, Bundle)]) -> (bool, String) {
    let mut passing = 0;
    let mut notes = Vec::new();
    for (name, bundle) in bundles {
        let sample = bundle
            .report
            .qer
            .iter()
            .find(|q| q.sample.kind == QerKind::Dirichlet)
            .map(|q| &q.sample)
            .unwrap();
        let ok = sample.windows.len() >= MIN_WINDOWS && windows_nonincreasing(&sample.windows);
        if ok {
            passing += 1;
        }
        let vars: Vec<String> = sample.windows.iter().map(|w| format!("{:.4}", w.variance)).collect();
        notes.push(format!("{name} [{}]", vars.join(", ")));
    }
    (
        passing >= MIN_VARIANCE_CONFIGS,
        format!("{passing}/{} configs nonincreasing: {}", bundles.len(), notes.join("; ")),
    )
}

fn qer_constants(surfaces: &[Surface], bundles: &[(String, Bundle)]) -> Outcome {
    let pi = std::f64::consts::PI;
    let wd = weight_integral(QerKind::Dirichlet);
    let wn = weight_integral(QerKind::Neumann);
    let quad_ok = (wd - pi).abs() <= QUADRATURE_TOL && (wn - pi / 2.0).abs() <= QUADRATURE_TOL;
    let (torus_ok, torus_note) = torus_qer_identity();
    let (cauchy_ok, cauchy_note) = cauchy_drop_out(&surfaces[1]);
    let (var_ok, var_note) = window_variance(bundles);
    outcome(
        quad_ok && torus_ok && cauchy_ok && var_ok,
        format!(
            "quadratures {}; torus identity {} ({torus_note}); Cauchy {} ({cauchy_note}); window variance {} ({var_note})",
            if quad_ok { "ok" } else { "FAIL" },
            if torus_ok { "ok" } else { "FAIL" },
            if cauchy_ok { "ok" } else { "FAIL" },
            if var_ok { "ok" } else { "FAIL" },
        ),
    )
}

fn extraction() -> Outcome {
    let start = Instant::now();
    let a: Vec<f64> = (1..=1_000_000).map(|n| (1.0 + n as f64).ln()).collect();
    let ex = density_one_extract(&a).unwrap();
    let mut members = 0usize;
    let mut bad = 0usize;
    for (k, block) in ex.blocks.iter().enumerate() {
        for &j in block {
            members += 1;
            if !(a[j - 1] > (k + 1) as f64) {
                bad += 1;
            }
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    let ones = vec![1.0; 1000];
    let fails = density_one_extract(&ones) == Err(AsymptoticsError::HypothesisFailed);
    outcome(
        ex.density >= EXTRACTION_DENSITY && bad == 0 && fails && seconds <= EXTRACTION_SECONDS,
        format!(
            "density {:.6} with {} certified thresholds, {members} members checked, {bad} violations; constant 1 -> HypothesisFailed: {fails}; {seconds:.2} s",
            ex.density,
            ex.certified()
        ),
    )
}

fn random_trace(rng: &mut ChaCha8Rng, n: usize) -> CurveTrace<f64> {
    let edge_lengths: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let mut s = vec![0.0];
    for l in &edge_lengths[..n - 1] {
        s.push(s.last().unwrap() + l);
    }
    let samples = (0..n)
        .map(|_| if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(-1.0..1.0) })
        .collect();
    CurveTrace {
        kind: TraceKind::Dirichlet,
        samples,
        s,
        edge_lengths,
        eigen_index: 0,
        eigenvalue: 1.0,
    }
}

fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let mut odd_counts = 0;
    let mut worst_linearity = 0.0f64;
    for _ in 0..PROPERTY_CASES {
        let n = rng.gen_range(3..64);
        let tr = random_trace(&mut rng, n);
        let tol = rng.gen_range(0.0..0.2);
        if let Ok((flips, _)) = count_sign_changes(&tr, tol) {
            if flips % 2 != 0 {
                odd_counts += 1;
            }
        }
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (a, b) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let combo: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let lhs = period_integral(&tr, &combo).unwrap();
        let rhs = a * period_integral(&tr, &f).unwrap() + b * period_integral(&tr, &g).unwrap();
        worst_linearity = worst_linearity.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
    }

    let torus = configs_dir().join("torus_minimal.json");
    let run = |dir: &Path| {
        let mut cfg = PipelineConfig::load(&torus).unwrap();
        cfg.output = dir.to_path_buf();
        run_pipeline(&cfg).unwrap();
        fs::read(dir.join(SUMMARY_FILE)).unwrap()
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let identical = run(a.path()) == run(b.path());

    let fresh_ok = verify_bundle(a.path()).unwrap().all_passed();
    inject_face_fault(a.path(), 11);
    let report = verify_bundle(a.path()).unwrap();
    let failures: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    let detected = failures == ["pair 11 euler"];

    outcome(
        odd_counts == 0 && worst_linearity <= LINEARITY_TOL && identical && fresh_ok && detected,
        format!(
            "{PROPERTY_CASES} cases: {odd_counts} odd sign-change counts, worst linearity gap {worst_linearity:.1e}; summaries identical: {identical}; injected fault -> failures {failures:?}"
        ),
    )
}

fn inject_face_fault(dir: &Path, record: usize) {
    let path = dir.join(SUMMARY_FILE);
    let mut json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let genus = json["mesh"]["genus"].as_i64().unwrap();
    let r = &mut json["records"][record];
    let get = |k: &str| r[k].as_i64().unwrap();
    let lhs = get("v") - get("e") + get("f") - get("m");
    r["f"] = serde_json::json!((get("f") - (lhs - (1 - 2 * genus)) - 1).max(0));
    fs::write(&path, serde_json::to_string_pretty(&json).unwrap()).unwrap();
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut report = |name: &'static str, o: Outcome| {
        println!("{} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        results.push((name, o));
    };

    report("torus spectral oracle", torus_spectrum());

    let surfaces = graph_surfaces();
    let tally = graph_tally(&surfaces);
    report(
        "Euler inequality",
        outcome(
            tally.pairs >= MIN_GRAPH_PAIRS && tally.euler_fail == 0,
            format!("{} pairs (torus g=1, genus2 g=2), {} exceptions", tally.pairs, tally.euler_fail),
        ),
    );
    let (hand_ok, hand_note) = hand_built_cases();
    report(
        "nodal domain bounds",
        outcome(
            tally.pairs >= MIN_GRAPH_PAIRS && tally.bound_fail == 0 && hand_ok,
            format!(
                "{} pairs, {} exceptions, min N - bound = {}; {hand_note}",
                tally.pairs, tally.bound_fail, tally.min_slack
            ),
        ),
    );
    report("parity trace vanishing", parity_traces(&surfaces));
    report("Kuznecov scaling", kuznecov_scaling());
    let bundles = genus2_bundles();
    kuznecov_trend(&bundles);
    report("QER constants", qer_constants(&surfaces, &bundles));
    report("density-one extraction", extraction());
    report("property suite", property_suite());

    let failed = results.iter().filter(|r| !r.1.passed).count();
    println!("{} criteria, {} passed, {failed} failed", results.len(), results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
