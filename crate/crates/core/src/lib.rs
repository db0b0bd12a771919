pub mod asymptotics;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod nodal;
pub mod restriction;
pub mod spectral;
mod scalar;
pub mod union_find;

pub use scalar::Real;

/// Double-precision aliases for the common case.
pub type SurfaceMesh64 = mesh::SurfaceMesh<f64>;
pub type EigenPair64 = spectral::EigenPair<f64>;
pub type OperatorPair64 = spectral::OperatorPair<f64>;
pub type CurvePath64 = restriction::CurvePath<f64>;
pub type CurveTrace64 = restriction::CurveTrace<f64>;
pub type KuznecovSeries64 = asymptotics::KuznecovSeries<f64>;

/// Single-precision aliases.
pub type SurfaceMesh32 = mesh::SurfaceMesh<f32>;
pub type EigenPair32 = spectral::EigenPair<f32>;
