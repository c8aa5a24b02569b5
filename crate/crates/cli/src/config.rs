//! Experiment configuration: JSON file, then command-line overrides, over defaults.

use std::path::{Path, PathBuf};

use qgf_core::cv::CvWeight;
use qgf_core::noise::Channel;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub filter: FilterConfig,
    pub initial_state: InitialState,
    pub scan: ScanConfig,
    pub mode: ModeConfig,
    pub cv: CvConfig,
    pub response: ResponseConfig,
    pub budget: BudgetConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub n: usize,
    #[serde(rename = "J", alias = "j")]
    pub j: f64,
    pub g: f64,
    pub periodic: bool,
    pub shift: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { n: 4, j: 1.0, g: 2.0, periodic: true, shift: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub delta_y: f64,
    pub m_y: usize,
    /// Cutoffs for `iterate` and `noise`; `[m_y]` when absent.
    pub schedule: Option<Vec<usize>>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self { delta_y: 0.16, m_y: 50, schedule: None }
    }
}

impl FilterConfig {
    pub fn cutoffs(&self) -> Vec<usize> {
        self.schedule.clone().unwrap_or_else(|| vec![self.m_y])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    GhzZ,
    XGround,
    QaoaRandom { seed: u64 },
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::QaoaRandom { seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// `[from, to]`; when absent, from `-Σ|c_l|` up to the initial Rayleigh quotient.
    pub mu_range: Option<[f64; 2]>,
    pub mu_step: f64,
    pub inv_sigma_sq_range: [f64; 2],
    pub inv_sigma_sq_step: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { mu_range: None, mu_step: 0.1, inv_sigma_sq_range: [0.5, 3.0], inv_sigma_sq_step: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeConfig {
    Exact {
        #[serde(default)]
        trotter_steps_per_slice: Option<usize>,
    },
    Sampled {
        shots: u64,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        trotter_steps_per_slice: Option<usize>,
    },
    Noisy {
        #[serde(default = "default_channel")]
        channel: Channel,
        p: f64,
        steps_per_slice: Option<usize>,
        #[serde(default = "default_scales")]
        zne_scales: Vec<f64>,
    },
}

fn default_channel() -> Channel {
    Channel::BitFlip
}

fn default_scales() -> Vec<f64> {
    vec![1.0, 2.0]
}

impl Default for ModeConfig {
    fn default() -> Self {
        ModeConfig::Exact { trotter_steps_per_slice: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvConfig {
    pub s: f64,
    /// Shift energies; when absent, `-λ_0 + 0.5 i` for `i = 0..8`.
    pub schedule: Option<Vec<f64>>,
    pub weight: CvWeight,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self { s: 1.0, schedule: None, weight: CvWeight::Squeezing }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResponseConfig {
    pub mu: f64,
    pub inv_sigma_sq: f64,
    pub phi_m: Vec<f64>,
    pub lambda_range: [f64; 2],
    pub lambda_step: f64,
    /// Even power of the comparison cosine filter; `null` drops that column.
    pub cosine_power: Option<u32>,
}

impl Default for ResponseConfig {
    fn default() -> Self {
        Self {
            mu: 0.0,
            inv_sigma_sq: 2.0,
            phi_m: vec![4.0, 8.0, 12.0],
            lambda_range: [-1.0, 6.0],
            lambda_step: 0.01,
            cosine_power: Some(64),
        }
    }
}

/// Unset fields are filled from the model: `a0_sq` and `delta_gap` from its
/// spectrum, `big_l` from its term count, `eps_term` from `epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetConfig {
    pub a0_sq: Option<f64>,
    pub epsilon: f64,
    pub sigma_sq: f64,
    pub lambda_m: f64,
    pub big_l: Option<f64>,
    pub delta_gap: Option<f64>,
    pub eps_term: Option<f64>,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self { a0_sq: None, epsilon: 1e-2, sigma_sq: 0.5, lambda_m: 2.0, big_l: None, delta_gap: None, eps_term: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: PathBuf::from("qgf-out"), format: Format::Csv }
    }
}

/// Values given on the command line; each one replaces the file's field.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for sampling and for the random initial state
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "J", alias = "j")]
    pub j: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub periodic: Option<bool>,
    #[arg(long)]
    pub shift: Option<f64>,
    #[arg(long)]
    pub delta_y: Option<f64>,
    #[arg(long)]
    pub m_y: Option<usize>,
    /// Comma-separated cutoffs, e.g. `30,50,70`
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<usize>>,
    /// `from,to`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu_range: Option<Vec<f64>>,
    #[arg(long)]
    pub mu_step: Option<f64>,
    /// `from,to`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub inv_sigma_sq_range: Option<Vec<f64>>,
    #[arg(long)]
    pub inv_sigma_sq_step: Option<f64>,
    /// Noise probability (noisy mode only)
    #[arg(long)]
    pub p: Option<f64>,
    /// Squeezing factor for `cv`
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Config(format!("line {}, column {}, field `{path}`: {inner}", inner.line(), inner.column()))
    })?;
    de.end().map_err(|e| CliError::Config(format!("line {}: {e}", e.line())))?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(v) = &o.out {
            self.output.directory = v.clone();
        }
        if let Some(seed) = o.seed {
            if let InitialState::QaoaRandom { seed: s } = &mut self.initial_state {
                *s = seed;
            }
            if let ModeConfig::Sampled { seed: s, .. } = &mut self.mode {
                *s = seed;
            }
        }
        set(&mut self.model.n, o.n);
        set(&mut self.model.j, o.j);
        set(&mut self.model.g, o.g);
        set(&mut self.model.periodic, o.periodic);
        set(&mut self.model.shift, o.shift);
        set(&mut self.filter.delta_y, o.delta_y);
        set(&mut self.filter.m_y, o.m_y);
        if let Some(v) = &o.schedule {
            self.filter.schedule = Some(v.clone());
        }
        if let Some(v) = &o.mu_range {
            self.scan.mu_range = Some(pair("--mu-range", v)?);
        }
        set(&mut self.scan.mu_step, o.mu_step);
        if let Some(v) = &o.inv_sigma_sq_range {
            self.scan.inv_sigma_sq_range = pair("--inv-sigma-sq-range", v)?;
        }
        set(&mut self.scan.inv_sigma_sq_step, o.inv_sigma_sq_step);
        if let Some(p) = o.p {
            match &mut self.mode {
                ModeConfig::Noisy { p: q, .. } => *q = p,
                _ => return Err(CliError::Config("--p: only meaningful with mode.kind = \"noisy\"".into())),
            }
        }
        set(&mut self.cv.s, o.s);
        if let Some(f) = o.format {
            self.output.format = match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
        }
        Ok(())
    }

    /// Field-level checks that need no Hamiltonian.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, msg: &str| Err(CliError::Config(format!("{field}: {msg}")));
        let m = &self.model;
        if m.n == 0 {
            return bad("model.n", "must be at least 1");
        }
        if m.periodic && m.n < 2 {
            return bad("model.periodic", "a periodic chain needs n >= 2");
        }
        if !(m.j.is_finite() && m.g.is_finite() && m.shift.is_finite()) {
            return bad("model", "J, g and shift must be finite");
        }
        if matches!(self.initial_state, InitialState::QaoaRandom { .. }) && m.n < 2 {
            return bad("initial_state", "qaoa_random needs n >= 2");
        }
        let f = &self.filter;
        if !(f.delta_y > 0.0 && f.delta_y.is_finite()) {
            return bad("filter.delta_y", "must be positive");
        }
        if let Some(s) = &f.schedule {
            if s.is_empty() {
                return bad("filter.schedule", "must not be empty");
            }
            if s.windows(2).any(|w| w[1] <= w[0]) {
                return bad("filter.schedule", "must be strictly increasing");
            }
        }
        let s = &self.scan;
        if let Some([a, b]) = s.mu_range {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return bad("scan.mu_range", "needs finite from <= to");
            }
        }
        if !(s.mu_step > 0.0 && s.mu_step.is_finite()) {
            return bad("scan.mu_step", "must be positive");
        }
        let [a, b] = s.inv_sigma_sq_range;
        if !(a > 0.0 && b.is_finite() && a <= b) {
            return bad("scan.inv_sigma_sq_range", "needs 0 < from <= to");
        }
        if !(s.inv_sigma_sq_step > 0.0 && s.inv_sigma_sq_step.is_finite()) {
            return bad("scan.inv_sigma_sq_step", "must be positive");
        }
        match &self.mode {
            ModeConfig::Exact { trotter_steps_per_slice } | ModeConfig::Sampled { trotter_steps_per_slice, .. } => {
                if *trotter_steps_per_slice == Some(0) {
                    return bad("mode.trotter_steps_per_slice", "must be at least 1");
                }
                if let ModeConfig::Sampled { shots: 0, .. } = self.mode {
                    return bad("mode.shots", "must be at least 1");
                }
            }
            ModeConfig::Noisy { p, steps_per_slice, zne_scales, .. } => {
                if !(0.0..=1.0).contains(p) {
                    return bad("mode.p", "must lie in [0, 1]");
                }
                match steps_per_slice {
                    None => return bad("mode.steps_per_slice", "required in noisy mode"),
                    Some(0) => return bad("mode.steps_per_slice", "must be at least 1"),
                    _ => {}
                }
                if zne_scales.len() < 2 {
                    return bad("mode.zne_scales", "needs at least two scales");
                }
                if zne_scales.iter().any(|c| !(*c >= 1.0 && c.is_finite())) {
                    return bad("mode.zne_scales", "scales must be finite and >= 1");
                }
                if zne_scales.iter().any(|c| p * c > 1.0) {
                    return bad("mode.zne_scales", "scaled probability exceeds 1");
                }
            }
        }
        if !(self.cv.s > 0.0 && self.cv.s.is_finite()) {
            return bad("cv.s", "must be positive");
        }
        if let Some(s) = &self.cv.schedule {
            if s.is_empty() || s.iter().any(|x| !x.is_finite()) {
                return bad("cv.schedule", "needs at least one finite shift");
            }
            if s.windows(2).any(|w| w[1] < w[0]) {
                return bad("cv.schedule", "must be nondecreasing");
            }
        }
        let r = &self.response;
        if !(r.inv_sigma_sq > 0.0 && r.inv_sigma_sq.is_finite()) {
            return bad("response.inv_sigma_sq", "must be positive");
        }
        if r.phi_m.is_empty() || r.phi_m.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return bad("response.phi_m", "needs at least one non-negative value");
        }
        let [a, b] = r.lambda_range;
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return bad("response.lambda_range", "needs finite from <= to");
        }
        if !(r.lambda_step > 0.0) {
            return bad("response.lambda_step", "must be positive");
        }
        if let Some(p) = r.cosine_power {
            if p < 2 || p % 2 != 0 {
                return bad("response.cosine_power", "must be an even integer >= 2");
            }
        }
        let bu = &self.budget;
        for (name, v) in [
            ("budget.epsilon", Some(bu.epsilon)),
            ("budget.sigma_sq", Some(bu.sigma_sq)),
            ("budget.lambda_m", Some(bu.lambda_m)),
            ("budget.a0_sq", bu.a0_sq),
            ("budget.big_l", bu.big_l),
            ("budget.delta_gap", bu.delta_gap),
            ("budget.eps_term", bu.eps_term),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(name, "must be positive");
                }
            }
        }
        if bu.a0_sq.is_some_and(|a| a > 1.0) {
            return bad("budget.a0_sq", "cannot exceed 1");
        }
        Ok(())
    }
}

fn pair(flag: &str, v: &[f64]) -> Result<[f64; 2], CliError> {
    match v {
        [a, b] => Ok([*a, *b]),
        _ => Err(CliError::Config(format!("{flag}: expected `from,to`"))),
    }
}

fn set<T>(field: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *field = v;
    }
}
