use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable consulted for the seed when neither a flag nor the config sets one.
pub const SEED_ENV: &str = "ZTSTFT_SEED";

/// Every checker name accepted by `verify`.
pub const CHECKS: [&str; 21] = [
    "plancherel",
    "orthogonality",
    "inversion",
    "kernel_bound",
    "reproducing",
    "lp_bound",
    "convolution",
    "covariance",
    "orthonormal_sum",
    "donoho_stark",
    "small_set",
    "support_bound",
    "support_bound_p",
    "joint_concentration",
    "cardinality",
    "dispersion_cardinality",
    "heisenberg",
    "local_uncertainty",
    "corollary",
    "entropy",
    "benedicks",
];

/// One experiment, read from a JSON document; every field is optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub half_width: usize,
    /// Defaults to `half_width`.
    pub window_half_width: Option<usize>,
    /// Points per torus axis; 0 selects the plan default.
    pub grid: usize,
    pub seed: Option<u64>,
    pub trials: usize,
    /// First trial index; lets a replay file target a single trial.
    pub first_trial: usize,
    pub checks: Vec<String>,
    /// `delta`, `gaussian_sampled(σ)`, `random_complex` or a signal file.
    pub signal: String,
    pub window: String,
    /// `fiber`, `box`, `box(h, width)`, `ball(r, resolution)`, `empty`, `random` or a tile file.
    pub sigma: String,
    /// Moment order; 0 cycles through 0.5, 1 and 2 by trial.
    pub s: f64,
    /// Lebesgue exponent; 0 cycles through 3, 4 and 8 by trial.
    pub p: f64,
    /// Concentration level for the cardinality check.
    pub eps: f64,
    /// Ball radius for the cardinality check and `count`.
    pub radius: f64,
    /// Dispersion bound for the dispersion-cardinality check; 0 picks one from the data.
    pub dispersion_bound: f64,
    pub resolution: usize,
    pub family_size: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Multiplies every transform before checking; 1 disables fault injection.
    pub fault_scale: f64,
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dimension: 1,
            half_width: 2,
            window_half_width: None,
            grid: 0,
            seed: None,
            trials: 20,
            first_trial: 0,
            checks: CHECKS.iter().map(|s| s.to_string()).collect(),
            signal: "random_complex".into(),
            window: "random_complex".into(),
            sigma: "random".into(),
            s: 0.0,
            p: 0.0,
            eps: 0.5,
            radius: 1.5,
            dispersion_bound: 0.0,
            resolution: 16,
            family_size: 3,
            tol: crate::operators::DEFAULT_TOL,
            max_iter: crate::operators::DEFAULT_MAX_ITER,
            fault_scale: 1.0,
            jobs: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
    }

    pub fn window_half_width(&self) -> usize {
        self.window_half_width.unwrap_or(self.half_width)
    }

    /// Seed from the config, else the environment, else 0.
    pub fn resolved_seed(&self) -> Result<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
            Err(_) => Ok(0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let unknown: Vec<&String> = self
            .checks
            .iter()
            .filter(|c| !CHECKS.contains(&c.as_str()))
            .collect();
        if !unknown.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "unknown check(s) {unknown:?}; valid checks: {}",
                CHECKS.join(", ")
            )));
        }
        if self.s < 0.0 || !self.s.is_finite() {
            return Err(Error::InvalidParameter(format!("s must be positive (or 0 for auto), got {}", self.s)));
        }
        if self.p != 0.0 && !(self.p > 2.0) {
            return Err(Error::InvalidParameter(format!("p must exceed 2 (or be 0 for auto), got {}", self.p)));
        }
        if !(0.0..1.0).contains(&self.eps) {
            return Err(Error::InvalidParameter(format!("eps must lie in [0, 1), got {}", self.eps)));
        }
        if !(self.fault_scale.is_finite()) {
            return Err(Error::InvalidParameter("fault_scale must be finite".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    pub fn moment_order(&self, trial: usize) -> f64 {
        if self.s > 0.0 {
            self.s
        } else {
            [0.5, 1.0, 2.0][trial % 3]
        }
    }

    pub fn exponent(&self, trial: usize) -> f64 {
        if self.p > 0.0 {
            self.p
        } else {
            [3.0, 4.0, 8.0][trial % 3]
        }
    }
}
