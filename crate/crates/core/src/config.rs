//! Run configuration, named tolerances and the frozen interpolation constants.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("unknown tolerance '{0}'")]
    UnknownTolerance(String),
    #[error("invalid tolerance value for '{name}': {value}")]
    InvalidValue { name: String, value: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Unconditional root merge radius, relative to `1 + max|root|`.
    pub root_cluster: f64,
    /// Root residual acceptance, relative to the absolute-value polynomial.
    pub root_residual: f64,
    /// Relative tolerance for multiplicity types of root vectors.
    pub multiplicity: f64,
    /// Snap radius of ψ at `0` and at the `a_i`, relative to the input scale.
    pub snap: f64,
    /// Zero test for `F_i(x)`, relative to `‖F_i‖_1 ‖x‖^deg`.
    pub zero_test: f64,
    /// Residual target of `psi_inverse`, relative to the input scale.
    pub inverse: f64,
    /// Singular-value threshold below which two tangent spaces do not span.
    pub transversality: f64,
    /// Newton residual target for intersection solving.
    pub newton: f64,
    /// Radius under which located intersection points are identified.
    pub cluster_radius: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            root_cluster: 1e-9,
            root_residual: 1e-8,
            multiplicity: 1e-9,
            snap: 1e-12,
            zero_test: 1e-9,
            inverse: 1e-9,
            transversality: 1e-6,
            newton: 1e-10,
            cluster_radius: 1e-6,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 9] = [
        "root_cluster",
        "root_residual",
        "multiplicity",
        "snap",
        "zero_test",
        "inverse",
        "transversality",
        "newton",
        "cluster_radius",
    ];

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), ConfigError> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(ConfigError::InvalidValue { name: name.to_string(), value });
        }
        let slot = match name {
            "root_cluster" => &mut self.root_cluster,
            "root_residual" => &mut self.root_residual,
            "multiplicity" => &mut self.multiplicity,
            "snap" => &mut self.snap,
            "zero_test" => &mut self.zero_test,
            "inverse" => &mut self.inverse,
            "transversality" => &mut self.transversality,
            "newton" => &mut self.newton,
            "cluster_radius" => &mut self.cluster_radius,
            _ => return Err(ConfigError::UnknownTolerance(name.to_string())),
        };
        *slot = value;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Largest root-vector length accepted by the interpolation machinery.
    pub n_cap: usize,
    pub t_radius: Option<f64>,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    /// Largest total degree allowed along a completed discriminant chain.
    pub degree_cap: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { seed: 0, tolerances: Tolerances::default(), n_cap: 8, t_radius: None, jobs: 0, degree_cap: 64 }
    }
}

/// Empirical constant `C(N)` in the Lipschitz bound `1 + C(γ + |η|)` of ψ,
/// indexed by `N`. Largest observed `max(Lip(ψ) - 1, 1 - coLip(ψ)) / (γ + |η|)`
/// over 600 random configurations per `N` (2000 pairs each), times 3, rounded
/// up to a power of two and made non-decreasing.
const FITTED_C: [f64; 9] = [0.0, 2.0, 16.0, 64.0, 512.0, 2048.0, 4096.0, 32768.0, 32768.0];

pub fn fitted_c(n: usize) -> f64 {
    FITTED_C.get(n).copied().unwrap_or(f64::INFINITY)
}
