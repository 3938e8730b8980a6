//! Experiment configuration (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ExperimentError;

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelConfig,
    #[serde(default)]
    pub partition: PartitionConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub symmetry: SymmetryConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default = "default_steps")]
    pub trotter_steps: usize,
    /// Trotter steps for baseline QITE; defaults to `trotter_steps`.
    #[serde(default)]
    pub qite_steps: Option<usize>,
    #[serde(default)]
    pub algorithm: AlgorithmChoice,
    /// Directory of the config file; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_steps() -> usize {
    10
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Tfim { n: usize, h_over_j: f64 },
    Xxz { n: usize, j: f64 },
    Hubbard { n_sites: usize, u: f64 },
    Molecule { fcidump: PathBuf },
    /// Explicit Pauli sum, e.g. `terms = [[1.0, "Z"], [0.5, "X"]]`.
    PauliSum { terms: Vec<(f64, String)> },
}

impl ModelConfig {
    pub fn tag(&self) -> String {
        match self {
            ModelConfig::Tfim { n, h_over_j } => format!("tfim_n{n}_h{h_over_j}"),
            ModelConfig::Xxz { n, j } => format!("xxz_n{n}_j{j}"),
            ModelConfig::Hubbard { n_sites, u } => format!("hubbard_l{n_sites}_u{u}"),
            ModelConfig::Molecule { fcidump } => {
                let stem = fcidump.file_stem().map(|s| s.to_string_lossy().into_owned());
                format!("molecule_{}", stem.unwrap_or_default())
            }
            ModelConfig::PauliSum { terms } => {
                let n = terms.first().map_or(0, |t| t.1.len());
                format!("pauli_sum_n{n}_t{}", terms.len())
            }
        }
    }

    pub fn is_molecule(&self) -> bool {
        matches!(self, ModelConfig::Molecule { .. })
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    #[serde(default)]
    pub kind: PartitionKind,
    /// Explicit groups of Hamiltonian term indices (`groups` kind).
    #[serde(default)]
    pub groups: Vec<Vec<usize>>,
    /// Inclusive qubit windows (`windows` kind).
    #[serde(default)]
    pub windows: Vec<[usize; 2]>,
    /// Number of groups (`greedy` kind).
    #[serde(default)]
    pub count: Option<usize>,
    /// Domain size D; the full register when absent.
    #[serde(default)]
    pub domain_size: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PartitionKind {
    #[default]
    Trivial,
    EvenOdd,
    Groups,
    Windows,
    Greedy,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_l")]
    pub l: usize,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_true")]
    pub include_zero: bool,
    /// Explicit values; overrides `l` and `t_max`.
    #[serde(default)]
    pub values: Option<Vec<f64>>,
}

fn default_l() -> usize {
    12
}

fn default_t_max() -> f64 {
    0.5
}

fn default_true() -> bool {
    true
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            l: default_l(),
            t_max: default_t_max(),
            include_zero: true,
            values: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    /// Qubit 0 is the leftmost character.
    Bitstring { bits: String },
    HartreeFock,
    SymmetricBatch {
        #[serde(default = "default_count")]
        count: usize,
        #[serde(default = "default_half")]
        x_prob: f64,
        #[serde(default = "default_half")]
        h_prob: f64,
        #[serde(default = "default_beta")]
        projection_beta: f64,
    },
}

fn default_count() -> usize {
    1
}

fn default_half() -> f64 {
    0.5
}

fn default_beta() -> f64 {
    10.0
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig::SymmetricBatch {
            count: default_count(),
            x_prob: default_half(),
            h_prob: default_half(),
            projection_beta: default_beta(),
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FormulationKind {
    Pauli,
    Antihermitian,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Defaults to `pauli` for spin models and `antihermitian` for molecules.
    #[serde(default)]
    pub formulation: Option<FormulationKind>,
    #[serde(default = "default_order")]
    pub order: u8,
    #[serde(default = "default_rcond")]
    pub rcond: f64,
    #[serde(default = "default_drop")]
    pub drop_threshold: f64,
    #[serde(default)]
    pub ordering: OrderingKind,
    #[serde(default)]
    pub application: ApplicationKind,
}

fn default_order() -> u8 {
    2
}

fn default_rcond() -> f64 {
    1e-8
}

fn default_drop() -> f64 {
    1e-10
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            formulation: None,
            order: default_order(),
            rcond: default_rcond(),
            drop_threshold: default_drop(),
            ordering: OrderingKind::default(),
            application: ApplicationKind::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum OrderingKind {
    #[default]
    FirstTermInnermost,
    LastTermInnermost,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ApplicationKind {
    #[default]
    RotationProduct,
    ExactGenerator,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    Off,
    #[default]
    WhenDefinite,
    Always,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SymmetryConfig {
    /// Reduce Pauli bases by the Z2 stabilizer of the Hamiltonian.
    #[serde(default = "default_true")]
    pub reduce: bool,
    /// Sector per stabilizer generator; all +1 when absent.
    #[serde(default)]
    pub sector: Option<Vec<i8>>,
    #[serde(default)]
    pub links: LinkKind,
    #[serde(default)]
    pub verify_links: bool,
}

impl Default for SymmetryConfig {
    fn default() -> Self {
        Self {
            reduce: true,
            sector: None,
            links: LinkKind::default(),
            verify_links: false,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory; falls back to `$MTQITE_OUTPUT_DIR`, then `results`.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub json: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmChoice {
    Qite,
    Mtqite,
    #[default]
    Both,
}

impl AlgorithmChoice {
    pub fn runs_qite(self) -> bool {
        matches!(self, AlgorithmChoice::Qite | AlgorithmChoice::Both)
    }

    pub fn runs_mtqite(self) -> bool {
        matches!(self, AlgorithmChoice::Mtqite | AlgorithmChoice::Both)
    }
}

pub const OUTPUT_DIR_ENV: &str = "MTQITE_OUTPUT_DIR";

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, ExperimentError> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_value(value: toml::Value, base_dir: &Path) -> Result<Self, ExperimentError> {
        let mut cfg: ExperimentConfig = value
            .try_into()
            .map_err(|e: toml::de::Error| ExperimentError::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let (value, base) = load_value(path)?;
        Self::from_toml_value(value, &base)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        match &self.output.dir {
            Some(d) => self.resolve(d),
            None => std::env::var_os(OUTPUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("results")),
        }
    }

    pub fn csv_path(&self) -> PathBuf {
        let file = self.output.csv.clone().unwrap_or_else(|| format!("{}.csv", self.name));
        self.output_dir().join(file)
    }

    pub fn json_path(&self) -> PathBuf {
        let file = self.output.json.clone().unwrap_or_else(|| format!("{}.json", self.name));
        self.output_dir().join(file)
    }

    pub fn qite_steps(&self) -> usize {
        self.qite_steps.unwrap_or(self.trotter_steps)
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad(format!("invalid experiment name {:?}", self.name));
        }
        match &self.model {
            ModelConfig::Tfim { n, h_over_j } if *n < 2 || !h_over_j.is_finite() => {
                return bad(format!("tfim needs n ≥ 2 and finite h/J (got n = {n})"))
            }
            ModelConfig::Xxz { n, j } if *n < 2 || !j.is_finite() => {
                return bad(format!("xxz needs n ≥ 2 and finite J (got n = {n})"))
            }
            ModelConfig::Hubbard { n_sites, u } if *n_sites < 1 || !u.is_finite() => {
                return bad(format!("hubbard needs n_sites ≥ 1 and finite U (got {n_sites})"))
            }
            ModelConfig::PauliSum { terms } if terms.is_empty() => return bad("pauli_sum needs `terms`".into()),
            ModelConfig::Molecule { fcidump } if !self.resolve(fcidump).is_file() => {
                return bad(format!("FCIDUMP file {} not found", self.resolve(fcidump).display()))
            }
            _ => {}
        }
        let p = &self.partition;
        match p.kind {
            PartitionKind::Groups if p.groups.is_empty() => return bad("groups partition needs `groups`".into()),
            PartitionKind::Windows if p.windows.is_empty() => {
                return bad("windows partition needs `windows`".into())
            }
            PartitionKind::Greedy if p.count.unwrap_or(0) == 0 => {
                return bad("greedy partition needs `count` ≥ 1".into())
            }
            _ => {}
        }
        if p.domain_size == Some(0) {
            return bad("domain_size must be positive".into());
        }
        if let Some(v) = &self.grid.values {
            if v.is_empty() {
                return bad("grid values must not be empty".into());
            }
        } else if self.grid.l == 0 || !(self.grid.t_max > 0.0) {
            return bad(format!("grid needs L ≥ 1 and t_max > 0 (got {}, {})", self.grid.l, self.grid.t_max));
        }
        match &self.initial {
            InitialConfig::Bitstring { bits } if bits.is_empty() || !bits.chars().all(|c| c == '0' || c == '1') => {
                return bad(format!("bitstring {bits:?} must be a non-empty string of 0/1"))
            }
            InitialConfig::HartreeFock if !self.model.is_molecule() => {
                return bad("hartree_fock initial state needs a molecule model".into())
            }
            InitialConfig::SymmetricBatch {
                count,
                x_prob,
                h_prob,
                projection_beta,
            } => {
                if *count == 0 {
                    return bad("batch count must be ≥ 1".into());
                }
                if !(0.0..=1.0).contains(x_prob) || !(0.0..=1.0).contains(h_prob) {
                    return bad("batch probabilities must lie in [0, 1]".into());
                }
                if !(*projection_beta >= 0.0) {
                    return bad("projection_beta must be ≥ 0".into());
                }
            }
            _ => {}
        }
        let s = &self.solver;
        if s.order != 1 && s.order != 2 {
            return bad(format!("order must be 1 or 2 (got {})", s.order));
        }
        if s.formulation == Some(FormulationKind::Antihermitian) && s.order != 2 {
            return bad("the anti-hermitian formulation is second order only".into());
        }
        if !(s.rcond > 0.0) || !(s.drop_threshold >= 0.0) {
            return bad("rcond must be > 0 and drop_threshold ≥ 0".into());
        }
        if let Some(sec) = &self.symmetry.sector {
            if sec.iter().any(|&v| v != 1 && v != -1) {
                return bad("sector entries must be ±1".into());
            }
        }
        Ok(())
    }
}

/// Reads a config file as a raw TOML value (for overrides) plus its directory.
pub fn load_value(path: &Path) -> Result<(toml::Value, PathBuf), ExperimentError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: toml::Value = toml::from_str(&text).map_err(|e| ExperimentError::Config(e.to_string()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((value, base))
}

/// Sets a dotted key such as `model.u` inside a TOML document.
pub fn set_dotted(doc: &mut toml::Value, key: &str, value: toml::Value) -> Result<(), ExperimentError> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| ExperimentError::Config(format!("bad key {key:?}")))?;
    let mut cur = doc;
    for p in parts {
        let table = cur
            .as_table_mut()
            .ok_or_else(|| ExperimentError::Config(format!("{key}: {p} is not a table")))?;
        cur = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    cur.as_table_mut()
        .ok_or_else(|| ExperimentError::Config(format!("{key}: parent is not a table")))?
        .insert(last.to_string(), value);
    Ok(())
}

/// Parses a command-line value as TOML, falling back to a plain string.
pub fn parse_scalar(text: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {text}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(text.to_string()))
}
