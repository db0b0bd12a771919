use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use nodal_atlas::asymptotics::{
    chebyshev_density, growth_report, kuznecov, omega, qer_statistic, CurveLabel, DensityWindow,
    FitWindow, GrowthReport, KuznecovSeries, PowerFit, QerKind, QerSample,
};
use nodal_atlas::io;
use nodal_atlas::mesh::{
    fixed_point_set, gen_flat_torus, gen_genus2_with, validate_involution, Genus2Metric, Involution,
};
use nodal_atlas::nodal::{
    build_nodal_graph, count_nodal_domains, euler_check, extract_nodal_set, lemma1_bounds, NodalSet,
};
use nodal_atlas::restriction::{
    count_sign_changes, make_path, restrict, CurveTrace, TraceKind,
};
use nodal_atlas::spectral::{
    assemble_operators, solve_eigenpairs_with, solve_with_parity, sup_norm, ParityOptions, Parity,
    SolverOptions,
};
use nodal_atlas::{CurvePath64, EigenPair64, SurfaceMesh64};

use crate::config::{Analyses, CurveChoice, MeshSource, MetricChoice, PipelineConfig};
use crate::PipelineError;

pub const SCHEMA_VERSION: u32 = 1;
pub const SUMMARY_FILE: &str = "summary.json";
pub const REPORT_FILE: &str = "report.json";
pub const MESH_FILE: &str = "mesh.off";
pub const LENGTHS_FILE: &str = "mesh_lengths.json";
pub const INVOLUTION_FILE: &str = "involution.json";
pub const PAIRS_DIR: &str = "pairs";

/// Parity traces on the fixed curve must stay below this multiple of the
/// sup norm.
pub const TRACE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshInfo {
    pub source: String,
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub genus: usize,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveInfo {
    pub vertices: Vec<usize>,
    pub length: f64,
    /// Every vertex is fixed by the involution.
    pub fixed: bool,
}

/// `omega(1)` for both weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaOne {
    pub dirichlet: f64,
    pub neumann: f64,
}

/// One record per eigenpair. Fields of analyses that did not run, or do not
/// apply to the pair, are null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub index: usize,
    pub lambda: f64,
    pub parity: Parity,
    pub residual: f64,
    pub sup_norm: f64,
    /// Largest normalized Neumann trace (even) or Dirichlet trace (odd) on
    /// the fixed curve.
    pub parity_trace: Option<f64>,
    #[serde(rename = "N")]
    pub nodal_domains: Option<usize>,
    pub inert: Option<usize>,
    pub split: Option<usize>,
    pub nodal_length: Option<f64>,
    pub sign_changes: Option<usize>,
    pub v: Option<usize>,
    pub e: Option<usize>,
    pub f: Option<usize>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub bound: Option<i64>,
    pub holds: Option<bool>,
    pub euler_ok: Option<bool>,
    pub qer: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub mesh: MeshInfo,
    pub curve: CurveInfo,
    pub k: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub analyses: Analyses,
    pub omega_one: OmegaOne,
    pub records: Vec<PairSummary>,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KuznecovReport {
    pub observable: String,
    pub kind: TraceKind,
    pub f_integral: f64,
    pub flagged: bool,
    pub fit: Option<PowerFit>,
    pub exponent: Option<f64>,
    pub coefficient: Option<f64>,
    pub windows: Vec<DensityWindow>,
    /// For flagged (mean-zero) observables: `(lambda, S)` at evenly spaced
    /// indices, the bounded-remainder trend.
    pub trend: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QerReport {
    pub observable: String,
    /// `omega(f)` with the first-kind and second-kind weights, whatever the
    /// statistic's own kind.
    pub omega_first_kind: f64,
    pub omega_second_kind: f64,
    pub sample: QerSample,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub kuznecov: Vec<KuznecovReport>,
    pub qer: Vec<QerReport>,
    pub growth: Vec<GrowthReport>,
}

/// What a run produced, with the bundle already on disk.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub summary: Summary,
    pub report: Report,
}

impl Bundle {
    pub fn ok(&self) -> bool {
        self.summary.violations.is_empty()
    }
}

struct Context<'a> {
    mesh: &'a SurfaceMesh64,
    inv: Option<&'a Involution>,
    path: &'a CurvePath64,
    fixed: bool,
    genus: usize,
    analyses: Analyses,
    lambda_floor: f64,
}

struct PairOutcome {
    summary: PairSummary,
    nodal_set: Option<NodalSet<f64>>,
    traces: Vec<CurveTrace<f64>>,
}

fn load_mesh(source: &MeshSource) -> Result<(SurfaceMesh64, Option<Involution>, String), PipelineError> {
    let fail = |e: String| PipelineError::MeshLoadFailed(e);
    match source {
        MeshSource::Torus { n, l1, l2 } => {
            let (m, i) = gen_flat_torus(*n, *l1, *l2).map_err(|e| fail(e.to_string()))?;
            Ok((m, Some(i), format!("torus n={n} l1={l1} l2={l2}")))
        }
        MeshSource::Genus2 { subdiv, metric } => {
            let metric = match metric {
                MetricChoice::UniformCurvature => Genus2Metric::UniformCurvature,
                MetricChoice::Grid => Genus2Metric::Grid,
            };
            let (m, i) = gen_genus2_with(*subdiv, metric).map_err(|e| fail(e.to_string()))?;
            Ok((m, Some(i), format!("genus2 subdiv={subdiv} metric={metric:?}")))
        }
        MeshSource::File {
            off,
            lengths,
            involution,
        } => {
            let mesh: SurfaceMesh64 = io::load_mesh(off, lengths).map_err(|e| fail(e.to_string()))?;
            let inv = match involution {
                Some(p) => {
                    let perm = io::read_involution(p).map_err(|e| fail(e.to_string()))?;
                    Some(validate_involution(&mesh, &perm).map_err(|e| fail(e.to_string()))?)
                }
                None => None,
            };
            let name = off.file_name().map(|s| s.to_string_lossy().into_owned());
            Ok((mesh, inv, format!("file {}", name.unwrap_or_default())))
        }
    }
}

fn analyse_pair(ctx: &Context, p: &EigenPair64) -> Result<PairOutcome, PipelineError> {
    let analysis = |e: String| PipelineError::AnalysisFailed(format!("pair {}: {e}", p.index));
    let sup = sup_norm(p);
    let mut s = PairSummary {
        index: p.index,
        lambda: p.eigenvalue,
        parity: p.parity,
        residual: p.residual,
        sup_norm: sup,
        parity_trace: None,
        nodal_domains: None,
        inert: None,
        split: None,
        nodal_length: None,
        sign_changes: None,
        v: None,
        e: None,
        f: None,
        m: None,
        n: None,
        bound: None,
        holds: None,
        euler_ok: None,
        qer: None,
    };
    let nonconstant = p.eigenvalue > ctx.lambda_floor;
    let mut traces = vec![restrict(p, ctx.mesh, ctx.path, TraceKind::Dirichlet).map_err(|e| analysis(e.to_string()))?];
    if nonconstant {
        traces.push(
            restrict(p, ctx.mesh, ctx.path, TraceKind::NeumannNormalized)
                .map_err(|e| analysis(e.to_string()))?,
        );
    }
    if ctx.fixed {
        s.parity_trace = match p.parity {
            Parity::Even if nonconstant => Some(max_abs(&traces[1].samples)),
            Parity::Odd => Some(max_abs(&traces[0].samples)),
            _ => None,
        };
    }
    // Sign changes of the Dirichlet trace; odd pairs vanish on the fixed curve.
    if nonconstant && !(ctx.fixed && p.parity == Parity::Odd) {
        if let Ok((flips, false)) = count_sign_changes(&traces[0], 1e-6 * sup) {
            s.sign_changes = Some(flips);
        }
    }
    let mut nodal_set = None;
    if ctx.analyses.nodal || ctx.analyses.graph {
        let domains = count_nodal_domains(p, ctx.mesh, ctx.inv).map_err(|e| analysis(e.to_string()))?;
        s.nodal_domains = Some(domains.count);
        s.inert = domains.inert_count();
        s.split = domains.split_count();
        if ctx.analyses.nodal {
            let set = extract_nodal_set(p, ctx.mesh, ctx.inv).map_err(|e| analysis(e.to_string()))?;
            s.nodal_length = Some(set.total_length);
            nodal_set = Some(set);
        }
        if ctx.analyses.graph {
            let inv = ctx.inv.expect("graph analysis checked for an involution");
            let g = build_nodal_graph(p, ctx.mesh, inv, ctx.path).map_err(|e| analysis(e.to_string()))?;
            let (bound, holds) = lemma1_bounds(&domains, &g, ctx.genus).map_err(|e| analysis(e.to_string()))?;
            s.euler_ok = Some(euler_check(&g, ctx.genus));
            s.v = Some(g.v);
            s.e = Some(g.e);
            s.f = Some(g.f);
            s.m = Some(g.m);
            s.n = Some(g.n);
            s.bound = Some(bound);
            s.holds = Some(holds);
        }
    }
    Ok(PairOutcome {
        summary: s,
        nodal_set,
        traces,
    })
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Relative threshold below which an eigenvalue is the constant mode.
pub(crate) fn constant_floor(lambda_max: f64) -> f64 {
    1e-8 * lambda_max.abs().max(1.0)
}

/// Runs mesh, spectral, restriction, nodal-graph and asymptotics stages in
/// order and writes the bundle to `config.output`.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Bundle, PipelineError> {
    config.validate()?;
    let (mesh, inv, source) = load_mesh(&config.mesh)?;
    let genus = mesh.genus();

    let vertices = match &config.curve {
        CurveChoice::FixedComponent(c) => {
            let inv = inv.as_ref().ok_or_else(|| {
                PipelineError::ConfigInvalid("a fixed-set curve needs an involution".into())
            })?;
            let fixed = fixed_point_set(&mesh, inv).map_err(|e| PipelineError::MeshLoadFailed(e.to_string()))?;
            fixed.components.get(*c).cloned().ok_or_else(|| {
                PipelineError::ConfigInvalid(format!(
                    "fixed set has {} components, asked for component {c}",
                    fixed.component_count()
                ))
            })?
        }
        CurveChoice::Vertices(v) => v.clone(),
    };
    let path = make_path(&mesh, &vertices).map_err(|e| PipelineError::ConfigInvalid(format!("curve: {e}")))?;
    let fixed = inv
        .as_ref()
        .is_some_and(|i| path.vertices().iter().all(|&v| i.is_fixed(v)));
    if config.analyses.graph && !fixed {
        return Err(PipelineError::ConfigInvalid(
            "graph analysis needs a curve in the fixed set of an involution".into(),
        ));
    }

    let ops = assemble_operators(&mesh).map_err(|e| PipelineError::SolverFailed(e.to_string()))?;
    let options = SolverOptions {
        tol: config.tolerance,
        seed: config.seed,
        ..SolverOptions::default()
    };
    let pairs = match &inv {
        Some(i) => solve_with_parity(&ops, i, config.k, &options, &ParityOptions::default()),
        None => solve_eigenpairs_with(&ops, config.k, &options),
    }
    .map_err(|e| PipelineError::SolverFailed(e.to_string()))?;

    let lambda_max = pairs.last().map_or(1.0, |p| p.eigenvalue);
    let ctx = Context {
        mesh: &mesh,
        inv: inv.as_ref(),
        path: &path,
        fixed,
        genus,
        analyses: config.analyses,
        lambda_floor: constant_floor(lambda_max),
    };
    let outcomes: Vec<PairOutcome> = pairs
        .par_iter()
        .map(|p| analyse_pair(&ctx, p))
        .collect::<Result<_, _>>()?;

    let area = mesh.total_area();
    let ones = vec![1.0; path.len()];
    let omega_one = OmegaOne {
        dirichlet: omega(&ones, &path, area, QerKind::Dirichlet).map_err(analysis_err)?,
        neumann: omega(&ones, &path, area, QerKind::Neumann).map_err(analysis_err)?,
    };
    let mut records: Vec<PairSummary> = outcomes.iter().map(|o| o.summary.clone()).collect();
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        ..Report::default()
    };
    let nonconstant: Vec<EigenPair64> = pairs
        .iter()
        .filter(|p| p.eigenvalue > ctx.lambda_floor)
        .cloned()
        .collect();
    let s_positions: Vec<f64> = path.arc_positions().to_vec();
    let mut series_files: Vec<(String, KuznecovSeries<f64>)> = Vec::new();

    if config.analyses.kuznecov {
        for obs in &config.observables {
            let f = obs.sample(&s_positions, path.length())?;
            for kind in [TraceKind::Dirichlet, TraceKind::NeumannNormalized] {
                let series = kuznecov(&pairs, &mesh, &path, &f, kind, FitWindow::TopHalf).map_err(analysis_err)?;
                let above_e: Vec<usize> = (0..series.eigenvalues.len())
                    .filter(|&i| series.eigenvalues[i] > std::f64::consts::E)
                    .collect();
                let windows = if above_e.is_empty() { Vec::new() } else { chebyshev_density(&series, 1.0) };
                let trend = if series.flagged {
                    let n = series.eigenvalues.len();
                    (1..=8).map(|q| {
                        let i = (q * n / 8).min(n) - 1;
                        (series.eigenvalues[i], series.partial_sums[i])
                    }).collect()
                } else {
                    Vec::new()
                };
                report.kuznecov.push(KuznecovReport {
                    observable: obs.label(),
                    kind,
                    f_integral: series.f_integral,
                    flagged: series.flagged,
                    fit: series.fit,
                    exponent: series.fit.map(|f| f.exponent),
                    coefficient: series.fit.map(|f| f.coefficient),
                    windows,
                    trend,
                });
                let kind_name = match kind {
                    TraceKind::Dirichlet => "dirichlet",
                    TraceKind::NeumannNormalized => "neumann",
                };
                series_files.push((format!("series_{}_{kind_name}.csv", obs.label()), series));
            }
        }
    }

    if config.analyses.qer {
        let (label, subset): (CurveLabel, Vec<EigenPair64>) = if fixed {
            (
                CurveLabel::Fixed,
                nonconstant.iter().filter(|p| p.parity == Parity::Even).cloned().collect(),
            )
        } else {
            (CurveLabel::Asymmetric, nonconstant.clone())
        };
        let kinds: &[QerKind] = if fixed {
            &[QerKind::Dirichlet, QerKind::Neumann, QerKind::Cauchy]
        } else {
            &[QerKind::Dirichlet, QerKind::Neumann]
        };
        for (oi, obs) in config.observables.iter().enumerate() {
            let f = obs.sample(&s_positions, path.length())?;
            for &kind in kinds {
                let sample = qer_statistic(&subset, &mesh, inv.as_ref(), &path, &f, kind, label)
                    .map_err(analysis_err)?;
                if oi == 0 && kind == QerKind::Dirichlet {
                    for (j, v) in sample.eigen_indices.iter().zip(&sample.statistics) {
                        if let Some(r) = records.iter_mut().find(|r| r.index == *j) {
                            r.qer = Some(*v);
                        }
                    }
                }
                report.qer.push(QerReport {
                    observable: obs.label(),
                    omega_first_kind: omega(&f, &path, area, QerKind::Dirichlet).map_err(analysis_err)?,
                    omega_second_kind: omega(&f, &path, area, QerKind::Neumann).map_err(analysis_err)?,
                    sample,
                });
            }
        }
    }

    if config.analyses.growth {
        let pick = |keep: &dyn Fn(&PairSummary) -> Option<usize>| -> Vec<f64> {
            records
                .iter()
                .filter(|r| r.lambda > ctx.lambda_floor)
                .filter_map(|r| keep(r).map(|c| c as f64))
                .collect()
        };
        let even = |r: &PairSummary| r.parity == Parity::Even;
        let odd = |r: &PairSummary| r.parity == Parity::Odd;
        let sequences: Vec<(&str, Vec<f64>)> = vec![
            ("nodal_domains", pick(&|r| r.nodal_domains)),
            ("sign_changes", pick(&|r| r.sign_changes)),
            ("gamma_intersections", pick(&|r| if even(r) { r.n } else { None })),
            ("singular_points", pick(&|r| if odd(r) { r.n } else { None })),
            ("inert_domains", pick(&|r| if even(r) { r.inert } else { None })),
        ];
        for (label, counts) in sequences {
            if !counts.is_empty() {
                report.growth.push(growth_report(&counts, label));
            }
        }
    }

    let mut violations = Vec::new();
    for r in &records {
        if r.euler_ok == Some(false) {
            violations.push(format!("pair {}: Euler inequality fails", r.index));
        }
        if r.holds == Some(false) {
            violations.push(format!("pair {}: nodal domain bound fails", r.index));
        }
        if let Some(t) = r.parity_trace {
            if t > TRACE_TOL * r.sup_norm {
                violations.push(format!("pair {}: parity trace {t:e} above tolerance", r.index));
            }
        }
    }

    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        mesh: MeshInfo {
            source,
            vertices: mesh.vertex_count(),
            edges: mesh.edge_count(),
            triangles: mesh.triangle_count(),
            genus,
            area,
        },
        curve: CurveInfo {
            vertices: path.vertices().to_vec(),
            length: path.length(),
            fixed,
        },
        k: config.k,
        seed: config.seed,
        tolerance: config.tolerance,
        analyses: config.analyses,
        omega_one,
        records,
        violations,
    };

    let out = &config.output;
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    io::write_off(&mesh, &out.join(MESH_FILE))?;
    io::write_lengths(&mesh, &out.join(LENGTHS_FILE))?;
    if let Some(i) = &inv {
        io::write_involution(i, &out.join(INVOLUTION_FILE))?;
    }
    io::write_pairs(&pairs, &out.join(PAIRS_DIR))?;
    let traces: Vec<CurveTrace<f64>> = outcomes.iter().flat_map(|o| o.traces.iter().cloned()).collect();
    io::write_traces(&traces, &out.join("traces.csv"))?;
    if config.analyses.nodal {
        let sets: Vec<(usize, &NodalSet<f64>)> = outcomes
            .iter()
            .filter_map(|o| o.nodal_set.as_ref().map(|s| (o.summary.index, s)))
            .collect();
        io::write_nodal_segments(&sets, &out.join("nodal_segments.csv"))?;
    }
    if config.analyses.graph {
        let graphs: Vec<io::GraphRecord> = summary
            .records
            .iter()
            .map(|r| io::GraphRecord {
                v: r.v.unwrap_or(0),
                e: r.e.unwrap_or(0),
                f: r.f.unwrap_or(0),
                m: r.m.unwrap_or(0),
                n: r.n.unwrap_or(0),
                parity: r.parity,
                bound: r.bound.unwrap_or(0),
                holds: r.holds.unwrap_or(false),
                euler_ok: r.euler_ok.unwrap_or(false),
            })
            .collect();
        io::write_json(&graphs, &out.join("graphs.json"))?;
    }
    for (name, series) in &series_files {
        io::write_series(series, &out.join(name))?;
    }
    io::write_json(&summary, &out.join(SUMMARY_FILE))?;
    io::write_json(&report, &out.join(REPORT_FILE))?;
    Ok(Bundle { summary, report })
}

fn analysis_err(e: impl std::fmt::Display) -> PipelineError {
    PipelineError::AnalysisFailed(e.to_string())
}

fn io_err(path: &Path, e: std::io::Error) -> PipelineError {
    PipelineError::Io(io::IoError::File {
        path: path.to_path_buf(),
        source: e,
    })
}
