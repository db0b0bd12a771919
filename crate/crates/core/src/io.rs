//! File formats: OFF-style connectivity with a JSON edge-length sidecar,
//! involution permutations, eigenpair dumps and CSV/JSON reports.
//!
//! Every file carries `f64`, whatever scalar the caller computes in.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymptotics::KuznecovSeries;
use crate::mesh::{EdgeKey, EdgeLengths, Involution, MeshError, SurfaceMesh};
use crate::nodal::{NodalGraph, NodalSet};
use crate::restriction::{CurveTrace, TraceKind};
use crate::spectral::{EigenPair, Parity};
use crate::Real;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

fn file_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::File {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, message: impl Into<String>) -> IoError {
    IoError::Parse {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Connectivity without coordinates: `OFF`, then `V F 0`, then one
/// `3 a b c` line per triangle.
pub fn write_off<T: Real>(mesh: &SurfaceMesh<T>, path: &Path) -> Result<(), IoError> {
    let mut out = String::new();
    out.push_str("OFF\n");
    out.push_str(&format!("{} {} 0\n", mesh.vertex_count(), mesh.triangle_count()));
    for t in mesh.triangles() {
        out.push_str(&format!("3 {} {} {}\n", t[0], t[1], t[2]));
    }
    fs::write(path, out).map_err(file_err(path))
}

/// Reads the vertex count and triangles of an OFF file. Vertex coordinate
/// lines, if present, are skipped; lengths come from the sidecar.
pub fn read_off(path: &Path) -> Result<(usize, Vec<[usize; 3]>), IoError> {
    let file = fs::File::open(path).map_err(file_err(path))?;
    let mut lines = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(file_err(path))?;
        let body = line.split('#').next().unwrap_or("").trim().to_string();
        if !body.is_empty() {
            lines.push(body);
        }
    }
    let mut it = lines.into_iter();
    let header = it.next().ok_or_else(|| parse_err(path, "empty file"))?;
    let counts_line = if header == "OFF" {
        it.next().ok_or_else(|| parse_err(path, "missing counts line"))?
    } else if let Some(rest) = header.strip_prefix("OFF") {
        rest.trim().to_string()
    } else {
        return Err(parse_err(path, "missing OFF header"));
    };
    let counts: Vec<usize> = counts_line
        .split_whitespace()
        .map(|x| x.parse().map_err(|_| parse_err(path, format!("bad count {x:?}"))))
        .collect::<Result<_, _>>()?;
    if counts.len() < 2 {
        return Err(parse_err(path, "counts line needs V and F"));
    }
    let (nv, nf) = (counts[0], counts[1]);
    let rest: Vec<String> = it.collect();
    let skip = match rest.len() {
        n if n == nf => 0,
        n if n == nv + nf => nv,
        n => return Err(parse_err(path, format!("expected {nf} faces, found {n} lines"))),
    };
    let mut triangles = Vec::with_capacity(nf);
    for line in &rest[skip..] {
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| parse_err(path, format!("bad index {x:?}"))))
            .collect::<Result<_, _>>()?;
        if nums.len() != 4 || nums[0] != 3 {
            return Err(parse_err(path, format!("not a triangle: {line:?}")));
        }
        triangles.push([nums[1], nums[2], nums[3]]);
    }
    Ok((nv, triangles))
}

#[derive(Debug, Serialize, Deserialize)]
struct LengthsFile {
    /// `[a, b, length]` per edge.
    edges: Vec<(usize, usize, f64)>,
}

pub fn write_lengths<T: Real>(mesh: &SurfaceMesh<T>, path: &Path) -> Result<(), IoError> {
    let edges = mesh
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.lo, e.hi, mesh.edge_length(i).as_f64()))
        .collect();
    write_json(&LengthsFile { edges }, path)
}

pub fn read_lengths<T: Real>(path: &Path) -> Result<EdgeLengths<T>, IoError> {
    let file: LengthsFile = read_json(path)?;
    Ok(file
        .edges
        .into_iter()
        .map(|(a, b, l)| (EdgeKey::new(a, b), T::lit(l)))
        .collect())
}

pub fn load_mesh<T: Real>(off: &Path, lengths: &Path) -> Result<SurfaceMesh<T>, IoError> {
    let (nv, tris) = read_off(off)?;
    let lengths = read_lengths(lengths)?;
    Ok(SurfaceMesh::new(nv, tris, &lengths)?)
}

pub fn write_involution(inv: &Involution, path: &Path) -> Result<(), IoError> {
    write_json(&inv.vertex_map(), path)
}

pub fn read_involution(path: &Path) -> Result<Vec<usize>, IoError> {
    read_json(path)
}

pub fn write_json<S: Serialize + ?Sized>(value: &S, path: &Path) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(file_err(path))
}

pub fn read_json<D: for<'de> Deserialize<'de>>(path: &Path) -> Result<D, IoError> {
    let text = fs::read_to_string(path).map_err(file_err(path))?;
    serde_json::from_str(&text).map_err(|e| parse_err(path, e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub index: usize,
    pub eigenvalue: f64,
    pub parity: Parity,
    pub residual: f64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairIndex {
    pub vertex_count: usize,
    pub pairs: Vec<PairRecord>,
}

pub const PAIR_INDEX: &str = "index.json";

/// Writes `index.json` plus one raw little-endian `f64` coefficient file per
/// pair into `dir`.
pub fn write_pairs<T: Real>(pairs: &[EigenPair<T>], dir: &Path) -> Result<(), IoError> {
    fs::create_dir_all(dir).map_err(file_err(dir))?;
    let mut records = Vec::with_capacity(pairs.len());
    for p in pairs {
        let file = format!("pair_{:05}.f64", p.index);
        let bytes: Vec<u8> = p
            .coefficients
            .iter()
            .flat_map(|x| x.as_f64().to_le_bytes())
            .collect();
        let path = dir.join(&file);
        fs::write(&path, bytes).map_err(file_err(&path))?;
        records.push(PairRecord {
            index: p.index,
            eigenvalue: p.eigenvalue.as_f64(),
            parity: p.parity,
            residual: p.residual.as_f64(),
            file,
        });
    }
    let vertex_count = pairs.first().map_or(0, |p| p.coefficients.len());
    write_json(
        &PairIndex {
            vertex_count,
            pairs: records,
        },
        &dir.join(PAIR_INDEX),
    )
}

pub fn read_pairs<T: Real>(dir: &Path) -> Result<Vec<EigenPair<T>>, IoError> {
    let index: PairIndex = read_json(&dir.join(PAIR_INDEX))?;
    index
        .pairs
        .into_iter()
        .map(|r| {
            let path = dir.join(&r.file);
            let bytes = fs::read(&path).map_err(file_err(&path))?;
            if bytes.len() != 8 * index.vertex_count {
                return Err(parse_err(
                    &path,
                    format!("expected {} bytes, found {}", 8 * index.vertex_count, bytes.len()),
                ));
            }
            let coefficients = bytes
                .chunks_exact(8)
                .map(|c| T::lit(f64::from_le_bytes(c.try_into().unwrap())))
                .collect();
            Ok(EigenPair {
                index: r.index,
                eigenvalue: T::lit(r.eigenvalue),
                coefficients,
                parity: r.parity,
                residual: T::lit(r.residual),
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct TraceRow {
    s: f64,
    value: f64,
    kind: TraceKind,
    j: usize,
    lambda: f64,
}

/// Appends rows `s, value, kind, j, lambda` for each trace.
pub fn write_traces<T: Real>(traces: &[CurveTrace<T>], path: &Path) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    for tr in traces {
        for (s, v) in tr.s.iter().zip(&tr.samples) {
            w.serialize(TraceRow {
                s: s.as_f64(),
                value: v.as_f64(),
                kind: tr.kind,
                j: tr.eigen_index,
                lambda: tr.eigenvalue.as_f64(),
            })?;
        }
    }
    w.flush().map_err(file_err(path))
}

/// Graph counts with the bound and both checks, as dumped per pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub v: usize,
    pub e: usize,
    pub f: usize,
    pub m: usize,
    pub n: usize,
    pub parity: Parity,
    pub bound: i64,
    pub holds: bool,
    pub euler_ok: bool,
}

impl GraphRecord {
    pub fn new(graph: &NodalGraph, bound: i64, holds: bool, euler_ok: bool) -> Self {
        Self {
            v: graph.v,
            e: graph.e,
            f: graph.f,
            m: graph.m,
            n: graph.n,
            parity: graph.parity,
            bound,
            holds,
            euler_ok,
        }
    }
}

/// Segment endpoints in (triangle, barycentric) coordinates, one row per
/// segment, tagged with the eigenpair index `j`.
pub fn write_nodal_segments<T: Real>(
    sets: &[(usize, &NodalSet<T>)],
    path: &Path,
) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["j", "triangle", "start_b0", "start_b1", "start_b2", "end_b0", "end_b1", "end_b2"])?;
    for (j, set) in sets {
        for s in &set.segments {
            let mut row = vec![j.to_string(), s.triangle.to_string()];
            row.extend(s.start.iter().chain(&s.end).map(|x| x.as_f64().to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(file_err(path))
}

/// Kuznecov series as `lambda, p, S`.
pub fn write_series<T: Real>(series: &KuznecovSeries<T>, path: &Path) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["lambda", "p", "S"])?;
    for ((l, p), s) in series.eigenvalues.iter().zip(&series.periods).zip(&series.partial_sums) {
        w.write_record([l.as_f64().to_string(), p.as_f64().to_string(), s.as_f64().to_string()])?;
    }
    w.flush().map_err(file_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{gen_genus2, validate_involution};
    use crate::spectral::{assemble_operators, solve_eigenpairs};

    #[test]
    fn mesh_involution_and_pairs_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let (mesh, inv) = gen_genus2(0).unwrap();
        write_off(&mesh, &dir.path().join("m.off")).unwrap();
        write_lengths(&mesh, &dir.path().join("m.json")).unwrap();
        write_involution(&inv, &dir.path().join("inv.json")).unwrap();
        let back: SurfaceMesh<f64> =
            load_mesh(&dir.path().join("m.off"), &dir.path().join("m.json")).unwrap();
        assert_eq!(back.triangles(), mesh.triangles());
        for i in 0..mesh.edge_count() {
            assert_eq!(back.edge_length(i), mesh.edge_length(i));
        }
        let perm = read_involution(&dir.path().join("inv.json")).unwrap();
        assert!(validate_involution(&back, &perm).is_ok());

        let ops = assemble_operators(&mesh).unwrap();
        let pairs = solve_eigenpairs(&ops, 5, 1e-9).unwrap();
        write_pairs(&pairs, &dir.path().join("pairs")).unwrap();
        let read: Vec<EigenPair<f64>> = read_pairs(&dir.path().join("pairs")).unwrap();
        assert_eq!(read, pairs);
    }

    #[test]
    fn off_with_coordinates_is_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.off");
        fs::write(&p, "OFF\n# tetra\n4 4 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 1 2 3\n3 0 3 2\n").unwrap();
        let (nv, tris) = read_off(&p).unwrap();
        assert_eq!(nv, 4);
        assert_eq!(tris[3], [0, 3, 2]);
        fs::write(&p, "OFF\n4 1 0\n4 0 1 2 3\n").unwrap();
        assert!(matches!(read_off(&p), Err(IoError::Parse { .. })));
    }
}
