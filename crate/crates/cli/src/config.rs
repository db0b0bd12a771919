use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::PipelineError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSource {
    Torus {
        n: usize,
        #[serde(default = "two_pi")]
        l1: f64,
        #[serde(default = "two_pi")]
        l2: f64,
    },
    Genus2 {
        subdiv: u32,
        #[serde(default)]
        metric: MetricChoice,
    },
    /// OFF connectivity, edge-length sidecar and optional involution.
    File {
        off: PathBuf,
        lengths: PathBuf,
        #[serde(default)]
        involution: Option<PathBuf>,
    },
}

fn two_pi() -> f64 {
    2.0 * std::f64::consts::PI
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricChoice {
    #[default]
    UniformCurvature,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveChoice {
    /// Component of the fixed-point set, ordered as `fixed_point_set` returns them.
    FixedComponent(usize),
    /// Explicit closed vertex loop.
    Vertices(Vec<usize>),
}

impl Default for CurveChoice {
    fn default() -> Self {
        CurveChoice::FixedComponent(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Observable {
    /// `f = value`.
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    /// `f(s) = cos(2 pi m s / length)`.
    Cosine { harmonic: u32 },
    /// One value per curve vertex.
    Samples { values: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl Observable {
    pub fn label(&self) -> String {
        match self {
            Observable::Constant { value } => format!("constant_{value}"),
            Observable::Cosine { harmonic } => format!("cosine_{harmonic}"),
            Observable::Samples { .. } => "samples".to_string(),
        }
    }

    pub fn sample(&self, s: &[f64], length: f64) -> Result<Vec<f64>, PipelineError> {
        match self {
            Observable::Constant { value } => Ok(vec![*value; s.len()]),
            Observable::Cosine { harmonic } => Ok(s
                .iter()
                .map(|x| (2.0 * std::f64::consts::PI * *harmonic as f64 * x / length).cos())
                .collect()),
            Observable::Samples { values } => {
                if values.len() != s.len() {
                    return Err(PipelineError::ConfigInvalid(format!(
                        "observable has {} samples, curve has {} vertices",
                        values.len(),
                        s.len()
                    )));
                }
                Ok(values.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Analyses {
    pub nodal: bool,
    pub graph: bool,
    pub kuznecov: bool,
    pub qer: bool,
    pub growth: bool,
}

impl Analyses {
    fn any(&self) -> bool {
        self.nodal || self.graph || self.kuznecov || self.qer || self.growth
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub mesh: MeshSource,
    pub k: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub curve: CurveChoice,
    #[serde(default = "default_observables")]
    pub observables: Vec<Observable>,
    pub analyses: Analyses,
    pub output: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_tolerance() -> f64 {
    1e-9
}

fn default_observables() -> Vec<Observable> {
    vec![Observable::Constant { value: 1.0 }]
}

fn default_seed() -> u64 {
    0x5eed
}

impl PipelineConfig {
    /// Reads a config; relative paths inside it resolve against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::ConfigInvalid(format!("{}: {e}", path.display())))?;
        let mut cfg: PipelineConfig = serde_json::from_str(&text)
            .map_err(|e| PipelineError::ConfigInvalid(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let MeshSource::File {
            off,
            lengths,
            involution,
        } = &mut cfg.mesh
        {
            *off = base.join(&*off);
            *lengths = base.join(&*lengths);
            if let Some(i) = involution {
                *i = base.join(&*i);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::ConfigInvalid(m));
        if self.k < 2 {
            return bad(format!("k = {} but at least 2 eigenpairs are required", self.k));
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-2) {
            return bad(format!("tolerance {} outside (0, 1e-2]", self.tolerance));
        }
        if !self.analyses.any() {
            return bad("no analysis enabled".into());
        }
        if self.observables.is_empty() && (self.analyses.kuznecov || self.analyses.qer) {
            return bad("kuznecov and qer need at least one observable".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> PipelineConfig {
        serde_json::from_str(
            r#"{"mesh": {"generator": "torus", "n": 16}, "k": 30,
                "analyses": {"nodal": true, "graph": true}, "output": "out"}"#,
        )
        .unwrap()
    }

    #[test]
    fn defaults_and_validation() {
        let cfg = minimal();
        assert_eq!(cfg.curve, CurveChoice::FixedComponent(0));
        assert_eq!(cfg.tolerance, 1e-9);
        assert!(cfg.validate().is_ok());
        for broken in [
            PipelineConfig { k: 1, ..minimal() },
            PipelineConfig { tolerance: 0.0, ..minimal() },
            PipelineConfig { tolerance: 0.05, ..minimal() },
            PipelineConfig { analyses: Analyses::default(), ..minimal() },
        ] {
            assert!(matches!(broken.validate(), Err(PipelineError::ConfigInvalid(_))));
        }
    }

    #[test]
    fn observables_sample() {
        let s = [0.0, 1.0, 2.0, 3.0];
        let c = Observable::Cosine { harmonic: 1 }.sample(&s, 4.0).unwrap();
        assert!((c[1]).abs() < 1e-15 && c[2] == -1.0);
        assert!(Observable::Samples { values: vec![1.0] }.sample(&s, 4.0).is_err());
    }
}
