use std::path::Path;

use nodal_atlas::asymptotics::{omega, QerKind};
use nodal_atlas::io;
use nodal_atlas::restriction::{make_path, restrict, TraceKind};
use nodal_atlas::spectral::{sup_norm, Parity};
use nodal_atlas::{EigenPair64, SurfaceMesh64};

use crate::pipeline::{
    constant_floor, Summary, LENGTHS_FILE, MESH_FILE, PAIRS_DIR, SCHEMA_VERSION, SUMMARY_FILE,
    TRACE_TOL,
};
use crate::PipelineError;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: String, passed: bool, detail: String) {
        self.checks.push(Check { name, passed, detail });
    }
}

fn corrupt(msg: impl std::fmt::Display) -> PipelineError {
    PipelineError::BundleCorrupt(msg.to_string())
}

/// Re-checks every recorded invariant of a bundle from its files alone.
pub fn verify_bundle(dir: &Path) -> Result<VerifyReport, PipelineError> {
    let summary_path = dir.join(SUMMARY_FILE);
    if !summary_path.is_file() {
        return Err(corrupt(format!("{} is missing", summary_path.display())));
    }
    let summary: Summary = io::read_json(&summary_path).map_err(corrupt)?;
    if summary.schema_version != SCHEMA_VERSION {
        return Err(corrupt(format!(
            "schema version {} (expected {SCHEMA_VERSION})",
            summary.schema_version
        )));
    }
    let mesh: SurfaceMesh64 =
        io::load_mesh(&dir.join(MESH_FILE), &dir.join(LENGTHS_FILE)).map_err(corrupt)?;
    let pairs: Vec<EigenPair64> = io::read_pairs(&dir.join(PAIRS_DIR)).map_err(corrupt)?;
    let path = make_path(&mesh, &summary.curve.vertices).map_err(corrupt)?;
    let genus = mesh.genus() as i64;
    let mut report = VerifyReport::default();

    let consistent = pairs.len() == summary.records.len()
        && pairs.iter().zip(&summary.records).all(|(p, r)| {
            p.index == r.index && p.eigenvalue == r.lambda && p.parity == r.parity
        })
        && mesh.genus() == summary.mesh.genus;
    report.push(
        "pairs match records".into(),
        consistent,
        format!("{} dumped pairs, {} records", pairs.len(), summary.records.len()),
    );

    for r in &summary.records {
        if let (Some(v), Some(e), Some(f), Some(m)) = (r.v, r.e, r.f, r.m) {
            let lhs = v as i64 - e as i64 + f as i64 - m as i64;
            let ok = lhs >= 1 - 2 * genus;
            report.push(
                format!("pair {} euler", r.index),
                ok && r.euler_ok == Some(ok),
                format!("v-e+f-m = {lhs}, 1-2g = {}", 1 - 2 * genus),
            );
        }
        if let (Some(big_n), Some(n), Some(bound)) = (r.nodal_domains, r.n, r.bound) {
            let n = n as i64;
            let expect = match r.parity {
                Parity::Odd => Some(n + 2 - 2 * genus),
                Parity::Even => Some(n / 2 + 1 - genus),
                Parity::Untagged => None,
            };
            let holds = big_n as i64 >= bound;
            report.push(
                format!("pair {} nodal bound", r.index),
                expect == Some(bound) && holds && r.holds == Some(holds),
                format!("N = {big_n}, bound = {bound}"),
            );
        }
    }

    if summary.curve.fixed {
        let floor = constant_floor(pairs.last().map_or(1.0, |p| p.eigenvalue));
        for p in &pairs {
            let kind = match p.parity {
                Parity::Even if p.eigenvalue > floor => TraceKind::NeumannNormalized,
                Parity::Odd => TraceKind::Dirichlet,
                _ => continue,
            };
            let tr = restrict(p, &mesh, &path, kind).map_err(corrupt)?;
            let worst = tr.samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let sup = sup_norm(p);
            report.push(
                format!("pair {} parity trace", p.index),
                worst <= TRACE_TOL * sup,
                format!("max |trace| = {worst:e}, sup = {sup:e}"),
            );
        }
    }

    let ones = vec![1.0; path.len()];
    let area = mesh.total_area();
    let od = omega(&ones, &path, area, QerKind::Dirichlet).map_err(corrupt)?;
    let on = omega(&ones, &path, area, QerKind::Neumann).map_err(corrupt)?;
    let scale = area / path.length();
    let ok = (od * scale - 2.0).abs() < 1e-12
        && (on * scale - 1.0).abs() < 1e-12
        && (od - summary.omega_one.dirichlet).abs() <= 1e-12 * od.abs()
        && (on - summary.omega_one.neumann).abs() <= 1e-12 * on.abs();
    report.push(
        "omega identities".into(),
        ok,
        format!("omega_d(1) Area/l = {}, omega_n(1) Area/l = {}", od * scale, on * scale),
    );
    Ok(report)
}
