//! Experiment file schema. Every optional field is filled in during resolution so the echoed
//! `config.resolved.toml` shows exactly what ran.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub evaluation: EvaluationSpec,
    pub problem: ProblemSpec,
    #[serde(default, rename = "method", skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<MethodSpec>,
    #[serde(default, rename = "policy", skip_serializing_if = "Vec::is_empty")]
    pub policies: Vec<PolicySpec>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: String,
    pub seed: u64,
    /// Repeats use seeds `seed, seed + 1, ...`.
    #[serde(default = "one")]
    pub repeat: usize,
    /// Relative to `HCOPT_OUTPUT_ROOT` (or the working directory); defaults to `name`.
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub record_timing: bool,
}

fn default_scenarios() -> usize {
    5000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationSpec {
    #[serde(default = "default_scenarios")]
    pub n_scenarios: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for EvaluationSpec {
    fn default() -> Self {
        Self {
            n_scenarios: default_scenarios(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    Synthetic(SyntheticSpec),
    Nrm(NrmSpec),
}

/// `min E[sum_i w_i (phi_i(x, xi) - c_i)^2]` over a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    #[serde(default)]
    pub phi: PhiSpec,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// One entry per coordinate, or a single entry shared by all.
    pub xi: Vec<DistSpec>,
    pub center: Vec<f64>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub outer_lipschitz: Option<f64>,
    #[serde(default)]
    pub mu_g: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiSpec {
    #[default]
    TruncMin,
    Product {
        lipschitz: f64,
    },
    Saturating {
        alpha: f64,
        kappa: f64,
        lipschitz: f64,
    },
    Share {
        k: f64,
        lipschitz: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistSpec {
    Uniform {
        a: f64,
        b: f64,
    },
    TruncatedNormal {
        mu: f64,
        sigma: f64,
    },
    Discrete {
        support: Vec<f64>,
        weights: Vec<f64>,
    },
    Poisson {
        mean: f64,
    },
    Binomial {
        n: u64,
        p: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    #[default]
    DualApprox,
    ExactDiff,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NrmSpec {
    #[serde(default)]
    pub gradient_mode: ModeName,
    pub instance: InstanceConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TotalsName {
    #[default]
    Poisson,
    Binomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InstanceConfig {
    Tiny(TinyConfig),
    HubSpoke(HubSpokeConfig),
    AirCargo(AirCargoConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TinyConfig {
    pub capacity_cv: f64,
}

/// Either a `label = "(N,kappa,delta,sigma,p,rho,gamma)"` tuple or the individual fields.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HubSpokeConfig {
    pub label: Option<String>,
    pub spokes: Option<usize>,
    pub kappa: Option<f64>,
    pub delta: Option<f64>,
    pub sigma: Option<f64>,
    pub show_up_prob: Option<f64>,
    pub load_factor: Option<f64>,
    pub capacity_cv: Option<f64>,
    pub leg_capacity: Option<f64>,
    pub periods: Option<u64>,
    pub demand_totals: Option<TotalsName>,
    pub upper: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AirCargoConfig {
    /// Class-parameter table; relative paths resolve against the config file. Bundled table if absent.
    pub table: Option<String>,
    pub routing: Option<bool>,
    pub consumption_cv: Option<f64>,
    pub capacity_cv: Option<f64>,
    pub load_factor: Option<f64>,
    pub theta2: Option<f64>,
    pub penalty_mult: Option<f64>,
    pub correlation: Option<f64>,
    pub periods: Option<u64>,
    pub arrival_prob: Option<f64>,
    pub demand_totals: Option<TotalsName>,
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "schedule", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepSpec {
    Constant { a: f64 },
    InvSqrt { a: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "schedule", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaSpec {
    Zero,
    Inverse,
    Constant { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    /// `SG`, `RSG`, `MSG` or `SAA_SG`.
    pub method: String,
    pub label: Option<String>,
    /// `"theory"` selects the stepsizes from the convergence theorems.
    pub preset: Option<String>,
    pub max_iters: usize,
    pub step: Option<StepSpec>,
    pub lambda: Option<LambdaSpec>,
    pub big_k: Option<usize>,
    pub n: Option<usize>,
    pub delta0: Option<f64>,
    /// Target accuracy for the theory MSG preset.
    pub epsilon: Option<f64>,
    pub init: Option<Vec<f64>>,
    /// `"uniform"`, `"last"` or `"tail:<window>"`.
    pub output: Option<String>,
    /// `"fixed"` or `"drift:<window>:<tol>"`.
    pub stop: Option<String>,
    pub eval_every: Option<usize>,
    pub eval_samples: Option<usize>,
    pub thin: Option<usize>,
    pub coord_estimator: Option<bool>,
}

/// Extra policies for `compare`; every `[[method]]` is compared as well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    Dlp {
        label: Option<String>,
    },
    Fixed {
        label: Option<String>,
        x: Vec<f64>,
    },
    /// Best integer vector in `{0..max}^d` on the evaluation scenarios.
    Enumerate {
        label: Option<String>,
        max: u32,
    },
}

impl PolicySpec {
    pub fn label(&self) -> String {
        match self {
            PolicySpec::Dlp { label } => label.clone().unwrap_or_else(|| "DLP".into()),
            PolicySpec::Fixed { label, .. } => label.clone().unwrap_or_else(|| "fixed".into()),
            PolicySpec::Enumerate { label, .. } => {
                label.clone().unwrap_or_else(|| "enumerated".into())
            }
        }
    }
}
