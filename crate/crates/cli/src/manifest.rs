//! Manifest format and validation.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use besov_core::{BesovSpace, GradedSeries, Precision, WeightConfig};
use num_complex::Complex64;
use serde::Deserialize;

/// A manifest problem located by its field path.
#[derive(Debug)]
pub struct ManifestError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ManifestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for ManifestError {}

fn err(path: impl Into<String>, message: impl fmt::Display) -> ManifestError {
    ManifestError {
        path: path.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionArg {
    #[default]
    Double,
    Extended,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Precision {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    precision: PrecisionArg,
    tasks: Vec<RawTask>,
}

/// A task as written: common fields plus exactly one table named after the
/// task kind.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    id: String,
    output: String,
    #[serde(default)]
    expected_negative: bool,
    seed: Option<u64>,
    moments: Option<MomentsTask>,
    shift: Option<ShiftTask>,
    kernel: Option<KernelTask>,
    classify: Option<ClassifyTask>,
    pick: Option<PickTask>,
    kacnelson: Option<KacnelsonTask>,
    multnorm: Option<MultnormTask>,
    colrow: Option<ColrowTask>,
    #[serde(rename = "derivative-report")]
    derivative_report: Option<DerivativeTask>,
}

impl RawTask {
    fn into_task(self, i: usize) -> Result<Task, ManifestError> {
        let mut specs = Vec::new();
        specs.extend(self.moments.map(TaskSpec::Moments));
        specs.extend(self.shift.map(TaskSpec::Shift));
        specs.extend(self.kernel.map(TaskSpec::Kernel));
        specs.extend(self.classify.map(TaskSpec::Classify));
        specs.extend(self.pick.map(TaskSpec::Pick));
        specs.extend(self.kacnelson.map(TaskSpec::Kacnelson));
        specs.extend(self.multnorm.map(TaskSpec::Multnorm));
        specs.extend(self.colrow.map(TaskSpec::Colrow));
        specs.extend(self.derivative_report.map(TaskSpec::DerivativeReport));
        if specs.len() != 1 {
            return Err(err(
                format!("tasks[{i}]"),
                "need exactly one of moments, shift, kernel, classify, pick, kacnelson, multnorm, colrow, derivative-report",
            ));
        }
        Ok(Task {
            id: self.id,
            output: self.output,
            expected_negative: self.expected_negative,
            seed: self.seed,
            spec: specs.pop().expect("one spec"),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Manifest {
    pub seed: u64,
    pub precision: PrecisionArg,
    pub tasks: Vec<Task>,
}

#[derive(Debug, Clone)]
pub struct Task {
    pub id: String,
    pub output: String,
    /// The task passes when its mathematical check fails, and vice versa.
    pub expected_negative: bool,
    /// Overrides the manifest seed for this task.
    pub seed: Option<u64>,
    pub spec: TaskSpec,
}

#[derive(Debug, Clone)]
pub enum TaskSpec {
    Moments(MomentsTask),
    Shift(ShiftTask),
    Kernel(KernelTask),
    Classify(ClassifyTask),
    Pick(PickTask),
    Kacnelson(KacnelsonTask),
    Multnorm(MultnormTask),
    Colrow(ColrowTask),
    DerivativeReport(DerivativeTask),
}

impl TaskSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            TaskSpec::Moments(_) => "moments",
            TaskSpec::Shift(_) => "shift",
            TaskSpec::Kernel(_) => "kernel",
            TaskSpec::Classify(_) => "classify",
            TaskSpec::Pick(_) => "pick",
            TaskSpec::Kacnelson(_) => "kacnelson",
            TaskSpec::Multnorm(_) => "multnorm",
            TaskSpec::Colrow(_) => "colrow",
            TaskSpec::DerivativeReport(_) => "derivative-report",
        }
    }

    /// File extension of the report this kind writes.
    pub fn extension(&self) -> &'static str {
        match self {
            TaskSpec::Classify(_) | TaskSpec::Pick(_) | TaskSpec::DerivativeReport(_) => "json",
            _ => "csv",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsTask {
    pub weight: WeightConfig,
    pub n_max: usize,
}

fn default_t0() -> f64 {
    0.5
}
fn default_k_max() -> u32 {
    10
}
fn default_per_octave() -> u32 {
    4
}
fn default_shift_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_t0")]
    pub t0: f64,
    #[serde(default = "default_k_max")]
    pub k_max: u32,
    #[serde(default = "default_per_octave")]
    pub per_octave: u32,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            t0: default_t0(),
            k_max: default_k_max(),
            per_octave: default_per_octave(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftTask {
    pub weight: WeightConfig,
    pub x: f64,
    /// When set, the semigroup identity (v_x)_y = v_{x+y} is checked.
    pub y: Option<f64>,
    #[serde(default = "default_shift_tol")]
    pub tolerance: f64,
    #[serde(default)]
    pub grid: GridConfig,
}

/// A space given by a weight (with s from the task), by a binomial kernel
/// (1 − ⟨z,w⟩)^{−γ}, or by explicit kernel coefficients b_0, b_1, ...
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub weight: Option<WeightConfig>,
    pub binomial: Option<f64>,
    pub b: Option<Vec<f64>>,
    pub dim: Option<usize>,
}

impl SpaceConfig {
    /// Builds the space; `s` is required for weight-defined spaces and
    /// forbidden otherwise.
    pub fn build(&self, s: Option<f64>, n_max: usize, path: &str) -> Result<BesovSpace, ManifestError> {
        let given = [self.weight.is_some(), self.binomial.is_some(), self.b.is_some()];
        if given.iter().filter(|x| **x).count() != 1 {
            return Err(err(path, "exactly one of weight, binomial, b is required"));
        }
        if let Some(w) = &self.weight {
            if self.dim.is_some() {
                return Err(err(format!("{path}.dim"), "set dim inside the weight"));
            }
            let s = s.ok_or_else(|| err(format!("{path}.s"), "a weight-defined space needs s"))?;
            let rw = w.radial().map_err(|e| err(format!("{path}.weight"), e))?;
            return BesovSpace::new(&rw, s, n_max).map_err(|e| err(path, e));
        }
        if s.is_some() {
            return Err(err(format!("{path}.s"), "s only applies to weight-defined spaces"));
        }
        let dim = self.dim.unwrap_or(1);
        if let Some(g) = self.binomial {
            return BesovSpace::binomial(g, dim, n_max).map_err(|e| err(format!("{path}.binomial"), e));
        }
        let b = self.b.as_ref().expect("checked above");
        BesovSpace::from_kernel(dim, b, "explicit").map_err(|e| err(format!("{path}.b"), e))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelTask {
    pub space: SpaceConfig,
    pub s: Option<f64>,
    pub n_max: usize,
}

fn default_order_tol() -> f64 {
    0.25
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyTask {
    pub weight: WeightConfig,
    /// IN_DHAT, NOT_DHAT or INCONCLUSIVE.
    pub expect_doubling: Option<String>,
    /// Expected weak-normality order; `none` is written as a negative number.
    pub expect_order: Option<f64>,
    #[serde(default = "default_order_tol")]
    pub order_tolerance: f64,
}

fn default_pick_n() -> usize {
    besov_core::pick::DEFAULT_PICK_N
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PickTask {
    pub space: SpaceConfig,
    pub s: Option<f64>,
    #[serde(default = "default_pick_n")]
    pub n: usize,
}

fn default_max_dim() -> usize {
    12
}
fn default_block() -> usize {
    1
}
fn default_slack() -> f64 {
    besov_core::lab::CONTRACTION_SLACK
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KacnelsonTask {
    pub instances: usize,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
    /// Block level r; 1 is the scalar case.
    #[serde(default = "default_block")]
    pub block: usize,
    #[serde(default = "default_slack")]
    pub slack: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub index: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

pub fn build_symbol(terms: &[TermConfig], dim: usize, path: &str) -> Result<GradedSeries, ManifestError> {
    if terms.is_empty() {
        return Err(err(path, "symbol needs at least one term"));
    }
    let mut s = GradedSeries::zero(dim);
    for (i, t) in terms.iter().enumerate() {
        s.add_term(t.index.clone(), Complex64::new(t.re, t.im))
            .map_err(|e| err(format!("{path}[{i}].index"), e))?;
    }
    Ok(s)
}

pub fn build_symbols(families: &[Vec<TermConfig>], dim: usize, path: &str) -> Result<Vec<GradedSeries>, ManifestError> {
    if families.is_empty() {
        return Err(err(path, "need at least one symbol"));
    }
    families
        .iter()
        .enumerate()
        .map(|(i, f)| build_symbol(f, dim, &format!("{path}[{i}]")))
        .collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultnormTask {
    pub space: SpaceConfig,
    /// Smoothness of the domain; weight-defined spaces only.
    pub s: Option<f64>,
    /// Smoothness of the codomain; defaults to s.
    pub t: Option<f64>,
    pub symbol: Vec<TermConfig>,
    /// Degree caps; the section norm must be nondecreasing along them.
    pub n_list: Vec<usize>,
}

fn default_band() -> f64 {
    besov_core::lab::DEFAULT_ROW_COL_BAND
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColrowTask {
    pub space: SpaceConfig,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub symbols: Vec<Vec<TermConfig>>,
    pub n: usize,
    /// Harness band on row/col; empirical, not a theorem.
    #[serde(default = "default_band")]
    pub band: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivativeTask {
    pub weight: WeightConfig,
    pub s: f64,
    pub t: f64,
    pub symbols: Vec<Vec<TermConfig>>,
    pub n_levels: u32,
    pub n: usize,
}

/// Reads and parses a manifest; parse errors carry the field path.
pub fn load(path: &Path) -> Result<Manifest, ManifestError> {
    let text = std::fs::read_to_string(path).map_err(|e| err(path.display().to_string(), e))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Manifest, ManifestError> {
    let de = toml::Deserializer::new(text);
    let raw: RawManifest = serde_path_to_error::deserialize(de).map_err(|e| {
        let p = e.path().to_string();
        let inner = e.into_inner();
        err(if p.is_empty() || p == "." { "manifest".to_string() } else { p }, inner.message().trim())
    })?;
    let tasks = raw
        .tasks
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.into_task(i))
        .collect::<Result<Vec<_>, _>>()?;
    let m = Manifest {
        seed: raw.seed,
        precision: raw.precision,
        tasks,
    };
    validate(&m)?;
    Ok(m)
}

fn symbol_dim(space: &SpaceConfig) -> usize {
    space
        .weight
        .as_ref()
        .map(|w| w.dim)
        .or(space.dim)
        .unwrap_or(1)
}

/// Checks everything that can be checked without running a task: ids and
/// outputs, weights, spaces and symbols.
pub fn validate(m: &Manifest) -> Result<(), ManifestError> {
    if m.tasks.is_empty() {
        return Err(err("tasks", "manifest has no tasks"));
    }
    let mut ids = BTreeSet::new();
    let mut outputs = BTreeSet::new();
    for (i, task) in m.tasks.iter().enumerate() {
        let p = format!("tasks[{i}]");
        if task.id.is_empty() || !ids.insert(task.id.clone()) {
            return Err(err(format!("{p}.id"), format!("id {:?} is empty or repeated", task.id)));
        }
        let out = Path::new(&task.output);
        if out.is_absolute() || out.components().any(|c| matches!(c, std::path::Component::ParentDir)) {
            return Err(err(format!("{p}.output"), "must be a relative path inside the output directory"));
        }
        if task.output == crate::SUMMARY_FILE || !outputs.insert(task.output.clone()) {
            return Err(err(format!("{p}.output"), format!("output {:?} is reserved or repeated", task.output)));
        }
        let ext = task.spec.extension();
        if out.extension().and_then(|e| e.to_str()) != Some(ext) {
            return Err(err(format!("{p}.output"), format!("{} tasks write .{ext} files", task.spec.kind())));
        }
        let k = format!("{p}.{}", task.spec.kind());
        match &task.spec {
            TaskSpec::Moments(t) => {
                t.weight.radial().map_err(|e| err(format!("{k}.weight"), e))?;
            }
            TaskSpec::Shift(t) => {
                t.weight.radial().map_err(|e| err(format!("{k}.weight"), e))?;
                if !(t.x > 0.0) {
                    return Err(err(format!("{k}.x"), "shift order must be > 0"));
                }
                if t.y.is_some_and(|y| !(y > 0.0)) {
                    return Err(err(format!("{k}.y"), "shift order must be > 0"));
                }
            }
            TaskSpec::Kernel(t) => {
                t.space.build(t.s, t.n_max, &format!("{k}.space"))?;
            }
            TaskSpec::Classify(t) => {
                t.weight.radial().map_err(|e| err(format!("{k}.weight"), e))?;
                if let Some(v) = &t.expect_doubling {
                    if !["IN_DHAT", "NOT_DHAT", "INCONCLUSIVE"].contains(&v.as_str()) {
                        return Err(err(format!("{k}.expect_doubling"), "expected IN_DHAT, NOT_DHAT or INCONCLUSIVE"));
                    }
                }
            }
            TaskSpec::Pick(t) => {
                t.space.build(t.s, t.n, &format!("{k}.space"))?;
            }
            TaskSpec::Kacnelson(t) => {
                if t.max_dim == 0 || t.max_dim > 12 {
                    return Err(err(format!("{k}.max_dim"), "must be in 1..=12"));
                }
                if !(1..=3).contains(&t.block) {
                    return Err(err(format!("{k}.block"), "block level must be 1, 2 or 3"));
                }
            }
            TaskSpec::Multnorm(t) => {
                if t.n_list.is_empty() {
                    return Err(err(format!("{k}.n_list"), "need at least one degree cap"));
                }
                build_symbol(&t.symbol, symbol_dim(&t.space), &format!("{k}.symbol"))?;
                t.space.build(t.s, 0, &format!("{k}.space"))?;
            }
            TaskSpec::Colrow(t) => {
                build_symbols(&t.symbols, symbol_dim(&t.space), &format!("{k}.symbols"))?;
                t.space.build(t.s, 0, &format!("{k}.space"))?;
            }
            TaskSpec::DerivativeReport(t) => {
                t.weight.radial().map_err(|e| err(format!("{k}.weight"), e))?;
                build_symbols(&t.symbols, t.weight.dim, &format!("{k}.symbols"))?;
            }
        }
    }
    Ok(())
}
