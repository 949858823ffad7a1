//! Run configuration: a TOML document with a `[params]` table and exactly one
//! mode block. Unknown keys are rejected so typos cannot silently change a
//! run, and a parsed configuration can be emitted back in canonical form with
//! every default spelled out.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use fermicav::model::{Sign, SystemParams};
use fermicav::SystemParams64;

/// Dispatch mode; must match the mode block present in the configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Coeffs,
    Steady,
    SweepAtoms,
    SweepPump,
    Dynamics,
    Basins,
    StabilityCheck,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Coeffs => "coeffs",
            Mode::Steady => "steady",
            Mode::SweepAtoms => "sweep-atoms",
            Mode::SweepPump => "sweep-pump",
            Mode::Dynamics => "dynamics",
            Mode::Basins => "basins",
            Mode::StabilityCheck => "stability-check",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Configuration error: names the offending key or constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

// Raw serde mirror of the document. All mode blocks are optional here;
// validation enforces that exactly one is present.

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct Document {
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    params: ParamsBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeffs: Option<CoeffsBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steady: Option<SolverBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep_atoms: Option<SweepAtomsBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep_pump: Option<SweepPumpBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dynamics: Option<DynamicsBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    basins: Option<BasinsBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stability_check: Option<StabilityCheckBlock>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct ParamsBlock {
    u0: f64,
    delta_c: f64,
    eta: f64,
    kappa: f64,
    n_atoms: usize,
    n_sites: usize,
    s: i8,
    #[serde(skip_serializing_if = "Option::is_none")]
    y_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct CoeffsBlock {
    y_min: f64,
    y_max: f64,
    points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct SolverBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    y_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_scan: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classify: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classify_t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classify_n_floor: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct SweepAtomsBlock {
    n_list: Vec<usize>,
    #[serde(flatten)]
    solver: SolverBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct SweepPumpBlock {
    eta_list: Vec<f64>,
    #[serde(flatten)]
    solver: SolverBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct DynamicsBlock {
    n0: f64,
    #[serde(flatten)]
    integration: IntegrationBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct BasinsBlock {
    n0_list: Vec<f64>,
    #[serde(flatten)]
    integration: IntegrationBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct IntegrationBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stride: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    band: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct StabilityCheckBlock {
    n_photons: f64,
    trials: usize,
}

// Validated run description.

/// Branch-search settings of the steady-state modes, defaults applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveTask {
    pub y_lo: f64,
    pub y_hi: f64,
    pub n_scan: usize,
    pub classify: bool,
    pub classify_t_max: f64,
    pub classify_n_floor: f64,
}

impl SolveTask {
    fn from_block(block: &SolverBlock, kappa: f64) -> Result<Self, ConfigError> {
        let task = SolveTask {
            y_lo: block.y_lo.unwrap_or(1e-3),
            y_hi: block.y_hi.unwrap_or(1.0),
            n_scan: block.n_scan.unwrap_or(800),
            classify: block.classify.unwrap_or(false),
            classify_t_max: block.classify_t_max.unwrap_or(50.0 / kappa),
            classify_n_floor: block.classify_n_floor.unwrap_or(1.05),
        };
        if !(task.y_lo > 0.0) || !(task.y_lo < task.y_hi) {
            return Err(err("y_lo/y_hi: need 0 < y_lo < y_hi"));
        }
        if task.n_scan < 100 {
            return Err(err("n_scan: must be >= 100"));
        }
        if !(task.classify_t_max > 0.0) {
            return Err(err("classify_t_max: must be > 0"));
        }
        Ok(task)
    }

    fn to_block(self) -> SolverBlock {
        SolverBlock {
            y_lo: Some(self.y_lo),
            y_hi: Some(self.y_hi),
            n_scan: Some(self.n_scan),
            classify: Some(self.classify),
            classify_t_max: Some(self.classify_t_max),
            classify_n_floor: Some(self.classify_n_floor),
        }
    }
}

/// Integration settings with defaults applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationTask {
    pub dt: f64,
    pub t_max: f64,
    pub stride: usize,
    pub n_floor: f64,
    pub window: usize,
    pub band: f64,
}

impl IntegrationTask {
    fn from_block(block: &IntegrationBlock) -> Result<Self, ConfigError> {
        let task = IntegrationTask {
            dt: block.dt.unwrap_or(1e-3),
            t_max: block.t_max.unwrap_or(200.0),
            stride: block.stride.unwrap_or(100),
            n_floor: block.n_floor.unwrap_or(1.05),
            window: block.window.unwrap_or(100),
            band: block.band.unwrap_or(1e-3),
        };
        if !(task.dt > 0.0) || !(task.t_max > task.dt) {
            return Err(err("dt/t_max: need dt > 0 and t_max > dt"));
        }
        if task.stride == 0 || task.window < 2 {
            return Err(err("stride/window: need stride >= 1 and window >= 2"));
        }
        if !(task.band > 0.0) {
            return Err(err("band: must be > 0"));
        }
        Ok(task)
    }

    fn to_block(self) -> IntegrationBlock {
        IntegrationBlock {
            dt: Some(self.dt),
            t_max: Some(self.t_max),
            stride: Some(self.stride),
            n_floor: Some(self.n_floor),
            window: Some(self.window),
            band: Some(self.band),
        }
    }

    pub fn to_settings(self) -> fermicav::dynamics::IntegrationSettings<f64> {
        fermicav::dynamics::IntegrationSettings {
            dt: self.dt,
            t_max: self.t_max,
            stride: self.stride,
            n_floor: self.n_floor,
            window: self.window,
            band: self.band,
        }
    }
}

/// Mode-specific work description.
#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Coeffs {
        y_min: f64,
        y_max: f64,
        points: usize,
    },
    Steady(SolveTask),
    SweepAtoms {
        n_list: Vec<usize>,
        solve: SolveTask,
    },
    SweepPump {
        eta_list: Vec<f64>,
        solve: SolveTask,
    },
    Dynamics {
        n0: f64,
        integration: IntegrationTask,
    },
    Basins {
        n0_list: Vec<f64>,
        integration: IntegrationTask,
    },
    StabilityCheck {
        n_photons: f64,
        trials: usize,
    },
}

/// A fully validated run: parameters, one task, optional output path.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub params: SystemParams64,
    pub task: Task,
    pub output: Option<PathBuf>,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let doc: Document = toml::from_str(text).map_err(|e| err(e.to_string()))?;

    let p = &doc.params;
    let s = Sign::from_i8(p.s).map_err(|e| err(format!("params.s: {e}")))?;
    let mut params = SystemParams::new(
        p.u0, p.delta_c, p.eta, p.kappa, p.n_atoms, p.n_sites, s,
    )
    .map_err(|e| err(format!("params: {e}")))?;
    if let Some(y_max) = p.y_max {
        params = params
            .with_y_max(y_max)
            .map_err(|e| err(format!("params.y_max: {e}")))?;
    }

    let mut tasks: Vec<(Mode, Task)> = Vec::new();
    if let Some(b) = &doc.coeffs {
        if !(b.y_min > 0.0) || !(b.y_min < b.y_max) || b.points < 2 {
            return Err(err(
                "coeffs: need 0 < y_min < y_max and points >= 2",
            ));
        }
        tasks.push((
            Mode::Coeffs,
            Task::Coeffs {
                y_min: b.y_min,
                y_max: b.y_max,
                points: b.points,
            },
        ));
    }
    if let Some(b) = &doc.steady {
        tasks.push((Mode::Steady, Task::Steady(SolveTask::from_block(b, params.kappa)?)));
    }
    if let Some(b) = &doc.sweep_atoms {
        if b.n_list.is_empty() {
            return Err(err("sweep_atoms.n_list: must be nonempty"));
        }
        tasks.push((
            Mode::SweepAtoms,
            Task::SweepAtoms {
                n_list: b.n_list.clone(),
                solve: SolveTask::from_block(&b.solver, params.kappa)?,
            },
        ));
    }
    if let Some(b) = &doc.sweep_pump {
        if b.eta_list.is_empty() {
            return Err(err("sweep_pump.eta_list: must be nonempty"));
        }
        tasks.push((
            Mode::SweepPump,
            Task::SweepPump {
                eta_list: b.eta_list.clone(),
                solve: SolveTask::from_block(&b.solver, params.kappa)?,
            },
        ));
    }
    if let Some(b) = &doc.dynamics {
        if !(b.n0 > 0.0) {
            return Err(err("dynamics.n0: must be > 0"));
        }
        tasks.push((
            Mode::Dynamics,
            Task::Dynamics {
                n0: b.n0,
                integration: IntegrationTask::from_block(&b.integration)?,
            },
        ));
    }
    if let Some(b) = &doc.basins {
        if b.n0_list.is_empty() || b.n0_list.iter().any(|&v| !(v > 0.0)) {
            return Err(err("basins.n0_list: must be nonempty with every value > 0"));
        }
        tasks.push((
            Mode::Basins,
            Task::Basins {
                n0_list: b.n0_list.clone(),
                integration: IntegrationTask::from_block(&b.integration)?,
            },
        ));
    }
    if let Some(b) = &doc.stability_check {
        if !(b.n_photons > 0.0) || b.trials == 0 {
            return Err(err(
                "stability_check: need n_photons > 0 and trials >= 1",
            ));
        }
        tasks.push((
            Mode::StabilityCheck,
            Task::StabilityCheck {
                n_photons: b.n_photons,
                trials: b.trials,
            },
        ));
    }

    match tasks.len() {
        0 => Err(err("no mode block present; add exactly one")),
        1 => {
            let (mode, task) = tasks.pop().unwrap();
            Ok(RunConfig {
                mode,
                params,
                task,
                output: doc.output.map(PathBuf::from),
            })
        }
        n => Err(err(format!("{n} mode blocks present; keep exactly one"))),
    }
}

/// Emits the canonical form of a run configuration: every default is written
/// out, so the document alone reproduces the run. Re-parsing the canonical
/// form yields an equal `RunConfig`.
pub fn emit_canonical(config: &RunConfig) -> String {
    let params = ParamsBlock {
        u0: config.params.u0,
        delta_c: config.params.delta_c,
        eta: config.params.eta,
        kappa: config.params.kappa,
        n_atoms: config.params.n_atoms,
        n_sites: config.params.n_sites,
        s: config.params.s.as_i8(),
        y_max: Some(config.params.y_max),
    };
    let mut doc = Document {
        output: config
            .output
            .as_ref()
            .map(|p| p.to_string_lossy().into_owned()),
        params,
        coeffs: None,
        steady: None,
        sweep_atoms: None,
        sweep_pump: None,
        dynamics: None,
        basins: None,
        stability_check: None,
    };
    match &config.task {
        Task::Coeffs {
            y_min,
            y_max,
            points,
        } => {
            doc.coeffs = Some(CoeffsBlock {
                y_min: *y_min,
                y_max: *y_max,
                points: *points,
            });
        }
        Task::Steady(solve) => doc.steady = Some(solve.to_block()),
        Task::SweepAtoms { n_list, solve } => {
            doc.sweep_atoms = Some(SweepAtomsBlock {
                n_list: n_list.clone(),
                solver: solve.to_block(),
            });
        }
        Task::SweepPump { eta_list, solve } => {
            doc.sweep_pump = Some(SweepPumpBlock {
                eta_list: eta_list.clone(),
                solver: solve.to_block(),
            });
        }
        Task::Dynamics { n0, integration } => {
            doc.dynamics = Some(DynamicsBlock {
                n0: *n0,
                integration: integration.to_block(),
            });
        }
        Task::Basins {
            n0_list,
            integration,
        } => {
            doc.basins = Some(BasinsBlock {
                n0_list: n0_list.clone(),
                integration: integration.to_block(),
            });
        }
        Task::StabilityCheck { n_photons, trials } => {
            doc.stability_check = Some(StabilityCheckBlock {
                n_photons: *n_photons,
                trials: *trials,
            });
        }
    }
    toml::to_string(&doc).expect("canonical config serializes")
}
