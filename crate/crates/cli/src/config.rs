//! Run configuration: structured TOML with strict schemas (unknown keys are
//! rejected before any compute starts).

use serde::Deserialize;
use speclab_core::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub window: WindowConfig,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub experiments: ExperimentsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    /// "harmonic" | "quartic-separable" | "quartic-isotropic" | "inline"
    pub kind: String,
    pub dimension: usize,
    /// sparse-monomial text for kind = "inline"
    #[serde(default)]
    pub text: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_h")]
    pub h: f64,
    pub n_axis: usize,
    /// basis scale; omitted = energy-adapted default
    #[serde(default)]
    pub sigma: Option<f64>,
    /// energy used for the sigma default
    #[serde(default)]
    pub target_energy: Option<f64>,
}

fn default_h() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowConfig {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub big_d: f64,
    pub h_list: Vec<f64>,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            a: 2.0,
            b: 2.5,
            delta: 0.0,
            big_d: 0.5,
            h_list: vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleConfig {
    pub dist: String,
    pub m: usize,
    pub seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            dist: "complex-gaussian".into(),
            m: 300,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentsConfig {
    /// experiments executed by the `suite` subcommand
    pub run: Vec<String>,
    pub sobolev: SobolevConfigToml,
    pub lr: LrConfigToml,
    pub two_sided: TwoSidedConfigToml,
    pub uniformity: UniformityConfigToml,
    pub ergodicity: ErgodicityConfigToml,
    pub que: QueConfigToml,
    pub heat: HeatConfigToml,
    pub smoothing: SmoothingConfigToml,
    pub weyl: WeylConfigToml,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SobolevConfigToml {
    pub theta_list: Vec<f64>,
    pub refine: usize,
    pub spread_tol: f64,
}

impl Default for SobolevConfigToml {
    fn default() -> Self {
        SobolevConfigToml {
            theta_list: vec![0.0, 2.0],
            refine: 4,
            spread_tol: 3.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LrConfigToml {
    pub h: f64,
    pub r_list: Vec<f64>,
    pub oversample: f64,
    pub slope_range: (f64, f64),
    pub ratio82_range: (f64, f64),
}

impl Default for LrConfigToml {
    fn default() -> Self {
        LrConfigToml {
            h: 1.0 / 32.0,
            r_list: vec![2.0, 4.0, 8.0, 16.0],
            oversample: 6.0,
            slope_range: (0.35, 0.65),
            ratio82_range: (1.2, 2.8),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoSidedConfigToml {
    pub p_list: Vec<usize>,
    pub theta_list: Vec<f64>,
    pub spread_tol: f64,
}

impl Default for TwoSidedConfigToml {
    fn default() -> Self {
        TwoSidedConfigToml {
            p_list: vec![1, 2, 4],
            theta_list: vec![0.0, 2.0],
            spread_tol: 25.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UniformityConfigToml {
    pub lambda_list: Vec<f64>,
    pub mu_factor: f64,
    pub delta: f64,
    pub theta_list: Vec<f64>,
}

impl Default for UniformityConfigToml {
    fn default() -> Self {
        UniformityConfigToml {
            lambda_list: vec![20.0, 30.0, 40.0, 50.0, 60.0],
            mu_factor: 0.5,
            delta: 0.0,
            theta_list: vec![0.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ErgodicityConfigToml {
    pub observables: Vec<String>,
    pub liouville_samples: u64,
    pub mean_tol: f64,
    pub slope_tol: f64,
}

impl Default for ErgodicityConfigToml {
    fn default() -> Self {
        ErgodicityConfigToml {
            observables: vec!["pair-share".into(), "angular-momentum".into()],
            liouville_samples: 400_000,
            mean_tol: 0.05,
            slope_tol: 0.2,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QueConfigToml {
    pub j_list: Vec<usize>,
    pub bases_per_level: usize,
    pub cutoff_eps: f64,
    pub cheb_deg: usize,
    pub decay_factor: f64,
}

impl Default for QueConfigToml {
    fn default() -> Self {
        QueConfigToml {
            j_list: vec![6, 12, 24, 48],
            bases_per_level: 200,
            cutoff_eps: 1.0,
            cheb_deg: 48,
            decay_factor: 0.5,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeatConfigToml {
    pub t_list: Vec<f64>,
    pub x_list: Vec<f64>,
    pub c_max: f64,
    pub check_mehler: bool,
    /// Dedicated basis size for the heat sums (small t needs deep trusted
    /// spectrum); None = reuse the run's basis.
    pub n_axis: Option<usize>,
}

impl Default for HeatConfigToml {
    fn default() -> Self {
        HeatConfigToml {
            t_list: vec![0.05, 0.1, 0.5, 1.0],
            x_list: vec![0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0],
            c_max: 20.0,
            check_mehler: false,
            n_axis: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmoothingConfigToml {
    pub s: f64,
    pub cutoffs: Vec<f64>,
    pub ratio_range: Vec<usize>,
}

impl Default for SmoothingConfigToml {
    fn default() -> Self {
        SmoothingConfigToml {
            s: 0.5,
            cutoffs: vec![4.0, 16.0, 64.0, 256.0, 1024.0, 4094.0],
            ratio_range: vec![5, 25],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeylConfigToml {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub points: usize,
    pub slope_tol: f64,
    pub ratio_at: Option<f64>,
}

impl Default for WeylConfigToml {
    fn default() -> Self {
        WeylConfigToml {
            lambda_lo: 4.0,
            lambda_hi: 40.0,
            points: 9,
            slope_tol: 0.1,
            ratio_at: Some(40.0),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
    pub svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: "out".into(),
            svg: true,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }
}
