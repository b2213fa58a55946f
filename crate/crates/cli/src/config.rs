//! Run configuration: a single TOML file with nested blocks, parsed into
//! validated model inputs. Unknown keys are rejected so typos fail loudly.

use atomfield::model::ModelParams;
use atomfield::wavefunction::PositionGrid;
use atomfield::QubitAmplitudes;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone)]
pub enum ConfigError {
    Parse(String),
    Field(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Parse(msg) => write!(f, "config parse error: {msg}"),
            ConfigError::Field(msg) => write!(f, "config error: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsBlock {
    pub omega0: f64,
    pub omega: f64,
    pub g: f64,
    pub m: f64,
    pub alpha0: f64,
}

/// Initial qubit state: either explicit complex amplitudes (re/im pairs)
/// or Bloch angles.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitBlock {
    pub alpha: Option<[f64; 2]>,
    pub beta: Option<[f64; 2]>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub x_max: Option<f64>,
    pub n_points: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockBlock {
    /// Fock cutoff; for `compare` this is the start of the doubling ladder.
    pub cutoff: Option<usize>,
    /// Cap on the compare cutoff ladder.
    pub max_cutoff: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeBlock {
    pub t_max: f64,
    pub n_samples: usize,
    pub spacing: Option<Spacing>,
    /// Smallest sample for log spacing (default t_max * 1e-3).
    pub t_min: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub formats: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnsatzKind {
    AtomField,
    Jcm,
    Trivial,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    pub n_theta: Option<usize>,
    pub n_phi: Option<usize>,
    pub ansatz: Option<AnsatzKind>,
    /// Explicit scan times; defaults depend on the ansatz.
    pub times: Option<Vec<f64>>,
    /// Coupling of the JCM reference ansatz.
    pub jcm_g: Option<f64>,
    /// Mean photon number of the JCM coherent environment state.
    pub jcm_nbar: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    /// PASS threshold on both regime ratios (default 100).
    pub regime_threshold: Option<f64>,
    pub params: ParamsBlock,
    pub qubit: Option<QubitBlock>,
    pub grid: Option<GridBlock>,
    pub fock: Option<FockBlock>,
    pub time: Option<TimeBlock>,
    pub output: Option<OutputBlock>,
    pub scan: Option<ScanBlock>,
}

impl RunConfig {
    pub fn from_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    pub fn model_params(&self) -> Result<ModelParams, ConfigError> {
        ModelParams::new(
            self.params.omega0,
            self.params.omega,
            self.params.g,
            self.params.m,
            self.params.alpha0,
        )
        .map_err(|e| ConfigError::Field(format!("[params] {e}")))
    }

    pub fn qubit(&self) -> Result<QubitAmplitudes, ConfigError> {
        let block = self
            .qubit
            .as_ref()
            .ok_or_else(|| ConfigError::Field("[qubit] block is required".into()))?;
        match (block.alpha, block.beta, block.theta, block.phi) {
            (Some(a), Some(b), None, None) => {
                QubitAmplitudes::new(C64::new(a[0], a[1]), C64::new(b[0], b[1]))
                    .map_err(|e| ConfigError::Field(format!("[qubit] {e}")))
            }
            (None, None, Some(theta), phi) => {
                QubitAmplitudes::from_bloch_angles(theta, phi.unwrap_or(0.0))
                    .map_err(|e| ConfigError::Field(format!("[qubit] {e}")))
            }
            _ => Err(ConfigError::Field(
                "[qubit] give either alpha and beta (re/im pairs) or theta (and phi)".into(),
            )),
        }
    }

    pub fn grid(&self) -> Result<PositionGrid, ConfigError> {
        let default_x_max = 8.0 / self.params.alpha0.sqrt();
        let (x_max, n_points) = match &self.grid {
            Some(g) => (g.x_max.unwrap_or(default_x_max), g.n_points.unwrap_or(2048)),
            None => (default_x_max, 2048),
        };
        PositionGrid::new(x_max, n_points).map_err(|e| ConfigError::Field(format!("[grid] {e}")))
    }

    /// Sample times from the `[time]` block; required and nonempty.
    pub fn times(&self) -> Result<Vec<f64>, ConfigError> {
        let block = self
            .time
            .as_ref()
            .ok_or_else(|| ConfigError::Field("[time] block is required".into()))?;
        if block.n_samples == 0 {
            return Err(ConfigError::Field("[time] n_samples must be >= 1".into()));
        }
        if !block.t_max.is_finite() || block.t_max <= 0.0 {
            return Err(ConfigError::Field(format!(
                "[time] t_max = {} must be finite and > 0",
                block.t_max
            )));
        }
        let n = block.n_samples;
        let times = match block.spacing.unwrap_or(Spacing::Linear) {
            Spacing::Linear => (0..n)
                .map(|k| block.t_max * k as f64 / (n.max(2) - 1) as f64)
                .collect::<Vec<_>>(),
            Spacing::Log => {
                let t_min = block.t_min.unwrap_or(block.t_max * 1e-3);
                if t_min <= 0.0 || t_min >= block.t_max {
                    return Err(ConfigError::Field(format!(
                        "[time] t_min = {t_min} must lie in (0, t_max)"
                    )));
                }
                let ratio = (block.t_max / t_min).ln();
                (0..n)
                    .map(|k| t_min * (ratio * k as f64 / (n.max(2) - 1) as f64).exp())
                    .collect()
            }
        };
        Ok(times)
    }

    pub fn ladder_start(&self) -> usize {
        self.fock.as_ref().and_then(|f| f.cutoff).unwrap_or(128)
    }

    pub fn ladder_max(&self) -> usize {
        self.fock.as_ref().and_then(|f| f.max_cutoff).unwrap_or(4096)
    }

    pub fn wants_csv(&self) -> bool {
        self.format_enabled("csv")
    }

    pub fn wants_json(&self) -> bool {
        self.format_enabled("json")
    }

    fn format_enabled(&self, name: &str) -> bool {
        match self.output.as_ref().and_then(|o| o.formats.as_ref()) {
            Some(list) => list.iter().any(|f| f == name),
            None => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "[params]\nomega0 = 1.0\nomega = 1e-3\ng = 5.0\nm = 2e5\nalpha0 = 100.0\n";

    #[test]
    fn qubit_forms() {
        let cfg = RunConfig::from_str(&format!("{BASE}[qubit]\ntheta = 0.5\nphi = 0.25\n")).unwrap();
        let q = cfg.qubit().unwrap();
        assert!((q.alpha.re - 0.25_f64.cos()).abs() < 1e-15);

        let cfg = RunConfig::from_str(&format!(
            "{BASE}[qubit]\nalpha = [0.6, 0.0]\nbeta = [0.0, 0.8]\n"
        ))
        .unwrap();
        let q = cfg.qubit().unwrap();
        assert_eq!(q.beta, C64::new(0.0, 0.8));

        // mixing the two forms is rejected
        let cfg = RunConfig::from_str(&format!(
            "{BASE}[qubit]\nalpha = [1.0, 0.0]\ntheta = 0.5\n"
        ))
        .unwrap();
        assert!(cfg.qubit().is_err());
    }

    #[test]
    fn time_spacing() {
        let cfg = RunConfig::from_str(&format!(
            "{BASE}[time]\nt_max = 2.0\nn_samples = 5\n"
        ))
        .unwrap();
        let t = cfg.times().unwrap();
        assert_eq!(t, vec![0.0, 0.5, 1.0, 1.5, 2.0]);

        let cfg = RunConfig::from_str(&format!(
            "{BASE}[time]\nt_max = 1.0\nn_samples = 4\nspacing = \"log\"\nt_min = 1e-3\n"
        ))
        .unwrap();
        let t = cfg.times().unwrap();
        assert!((t[0] - 1e-3).abs() < 1e-18);
        assert!((t[3] - 1.0).abs() < 1e-12);
        assert!((t[1] / t[0] - t[2] / t[1]).abs() < 1e-9);
    }

    #[test]
    fn defaults_and_overrides() {
        let cfg = RunConfig::from_str(BASE).unwrap();
        let grid = cfg.grid().unwrap();
        assert_eq!(grid.n_points, 2048);
        assert!((grid.x_max - 0.8).abs() < 1e-15);
        assert_eq!(cfg.ladder_start(), 128);
        assert!(cfg.wants_csv() && cfg.wants_json());
        assert!(cfg.regime_threshold.is_none());

        let cfg = RunConfig::from_str(&format!(
            "regime_threshold = 50.0\n{BASE}[output]\nformats = [\"csv\"]\n"
        ))
        .unwrap();
        assert_eq!(cfg.regime_threshold, Some(50.0));
        assert!(cfg.wants_csv() && !cfg.wants_json());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_str(&format!("{BASE}[tim]\nt_max = 1.0\n")).is_err());
        assert!(RunConfig::from_str(
            "[params]\nomega0 = 1.0\nomega = 1.0\ng = 1.0\nm = 1.0\nalpha_zero = 1.0\n"
        )
        .is_err());
    }
}
