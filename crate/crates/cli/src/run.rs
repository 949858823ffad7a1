//! Run dispatch and CSV assembly.
//!
//! Every artifact starts with a `#`-prefixed header holding the artifact
//! version, the seed, and the canonical configuration, so the file alone
//! reproduces the run. Rows are assembled in memory in input order and
//! written once; identical configuration and seed give byte-identical files.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fermicav::dynamics::{basin_scan, integrate, TrajectoryStatus};
use fermicav::fermisea::{
    build_fermi_sea, hopping_expectation, variational_stability_check, MomentumGrid,
};
use fermicav::model::{gaussian_coefficients, photons_from_y, y_from_photons};
use fermicav::steadystate::{
    sweep_atoms, sweep_pump, StabilitySettings, SteadyStateBranch, SweepPoint, SweepSettings,
};

use crate::config::{IntegrationTask, RunConfig, SolveTask, Task};

pub const ARTIFACT_VERSION: u32 = 1;

/// Failure classes mapped to process exit codes 2 and 1.
#[derive(Debug)]
pub enum RunError {
    /// Configuration or I/O problem detected before computation; exit 2.
    Setup(String),
    /// Numerical failure during computation; exit 1, partial output written.
    Numerical(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Setup(m) => write!(f, "{m}"),
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

/// Outcome summary: where the artifact went and whether any row failed.
#[derive(Debug)]
pub struct RunOutcome {
    pub output: PathBuf,
    /// Some rows carry a failure flag; the artifact notes them and the
    /// process exits with code 1.
    pub flagged_rows: usize,
}

fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn header(config: &RunConfig, seed: u64) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# fermicav simulate artifact-version={ARTIFACT_VERSION} mode={}\n",
        config.mode
    ));
    out.push_str(&format!("# seed={seed}\n"));
    out.push_str("# config-begin\n");
    for line in crate::config::emit_canonical(config).lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("# config-end\n");
    out
}

fn branch_rows(
    out: &mut String,
    label_n: usize,
    label_eta: f64,
    branches: &Result<Vec<SteadyStateBranch<f64>>, String>,
) -> usize {
    match branches {
        Err(msg) => {
            out.push_str(&format!(
                "{label_n},{},,,,,,error:{}\n",
                fmt_f64(label_eta),
                msg.replace(',', ";")
            ));
            1
        }
        Ok(list) if list.is_empty() => {
            out.push_str(&format!("{label_n},{},,,,,,no_roots\n", fmt_f64(label_eta)));
            0
        }
        Ok(list) => {
            for (i, b) in list.iter().enumerate() {
                out.push_str(&format!(
                    "{label_n},{},{i},{},{},{},{},{},ok\n",
                    fmt_f64(label_eta),
                    fmt_f64(b.n_bar),
                    fmt_f64(b.y),
                    fmt_f64(b.xi),
                    b.stability.as_str(),
                    b.valid_tb,
                ));
            }
            0
        }
    }
}

fn solve_settings(task: &SolveTask) -> SweepSettings<f64> {
    SweepSettings {
        y_lo: task.y_lo,
        y_hi: task.y_hi,
        n_scan: task.n_scan,
        stability: None,
    }
}

fn stability_settings(task: &SolveTask, params: &fermicav::SystemParams64) -> StabilitySettings<f64> {
    let mut st = StabilitySettings::default_for(params);
    st.integration.t_max = task.classify_t_max;
    st.integration.n_floor = task.classify_n_floor;
    st
}

const BRANCH_HEADER: &str = "n_atoms,eta,branch,n_bar,y,xi,stability,valid_tb,status\n";

fn run_branch_table(points: &[SweepPoint<f64>]) -> (String, usize) {
    let mut body = String::from(BRANCH_HEADER);
    let mut flagged = 0;
    for p in points {
        flagged += branch_rows(&mut body, p.n_atoms, p.eta, &p.branches);
    }
    (body, flagged)
}

fn dynamics_csv(
    config: &RunConfig,
    n0: f64,
    integration: &IntegrationTask,
) -> Result<(String, usize), RunError> {
    let params = &config.params;
    let grid = MomentumGrid::new(params.n_sites).map_err(|e| RunError::Setup(e.to_string()))?;
    let sea =
        build_fermi_sea(params.n_atoms, &grid).map_err(|e| RunError::Setup(e.to_string()))?;
    let summary = hopping_expectation(&sea, &grid);
    let traj = integrate(n0, &summary, params, &integration.to_settings())
        .map_err(|e| RunError::Setup(e.to_string()))?;

    let mut body = String::from("t,re_alpha,im_alpha,n_bar,alpha_sq,y,valid_tb\n");
    for s in &traj.states {
        let (y, valid) = if params.u0 != 0.0 && s.n_bar > 0.0 {
            let y = y_from_photons(s.n_bar, params.u0);
            (fmt_f64(y), (y <= params.y_max).to_string())
        } else {
            (String::new(), "false".into())
        };
        body.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_f64(s.t),
            fmt_f64(s.alpha.re),
            fmt_f64(s.alpha.im),
            fmt_f64(s.n_bar),
            fmt_f64(s.alpha.norm_sqr()),
            y,
            valid,
        ));
    }
    body.push_str(&format!(
        "# status={} converged={} attractor={} truncation_deviation={}\n",
        status_tag(&traj.status),
        traj.converged,
        fmt_opt(traj.attractor),
        fmt_f64(traj.truncation_deviation),
    ));
    let flagged = usize::from(matches!(traj.status, TrajectoryStatus::Diverged { .. }));
    Ok((body, flagged))
}

fn status_tag(status: &TrajectoryStatus<f64>) -> String {
    match status {
        TrajectoryStatus::Converged => "converged".into(),
        TrajectoryStatus::ReachedTMax => "reached_t_max".into(),
        TrajectoryStatus::LeftDomain { t } => format!("left_domain@t={}", fmt_f64(*t)),
        TrajectoryStatus::Diverged { t, retry_dt } => {
            format!("diverged@t={};retry_dt={}", fmt_f64(*t), fmt_f64(*retry_dt))
        }
    }
}

/// Executes the run and writes the CSV artifact.
///
/// The output file is opened before any computation so an unwritable path
/// fails fast with a setup error.
pub fn run(config: &RunConfig, seed: u64, out_override: Option<&Path>) -> Result<RunOutcome, RunError> {
    let output: PathBuf = match (out_override, &config.output) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => p.clone(),
        (None, None) => {
            return Err(RunError::Setup(
                "no output path: set `output` in the config or pass --out".into(),
            ))
        }
    };
    let mut file = fs::File::create(&output)
        .map_err(|e| RunError::Setup(format!("cannot write {}: {e}", output.display())))?;

    let params = &config.params;
    let (body, flagged) = match &config.task {
        Task::Coeffs {
            y_min,
            y_max,
            points,
        } => {
            if params.u0 == 0.0 {
                return Err(RunError::Setup(
                    "coeffs mode needs u0 != 0 to map widths to photon numbers".into(),
                ));
            }
            let mut body = String::from("y,n_bar,e,j,e1,j1,de,dj,de1,dj1\n");
            for i in 0..*points {
                let y = y_min + (y_max - y_min) * i as f64 / (*points as f64 - 1.0);
                let n = photons_from_y(y, params.u0);
                let c = gaussian_coefficients(n, params)
                    .map_err(|e| RunError::Numerical(e.to_string()))?;
                body.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    fmt_f64(y),
                    fmt_f64(n),
                    fmt_f64(c.e_onsite),
                    fmt_f64(c.j_onsite),
                    fmt_f64(c.e_hop),
                    fmt_f64(c.j_hop),
                    fmt_f64(c.d_e),
                    fmt_f64(c.d_j),
                    fmt_f64(c.d_e_hop),
                    fmt_f64(c.d_j_hop),
                ));
            }
            (body, 0)
        }
        Task::Steady(solve) => {
            let mut settings = solve_settings(solve);
            if solve.classify {
                settings.stability = Some(stability_settings(solve, params));
            }
            let points = sweep_atoms(params, &[params.n_atoms], &settings)
                .map_err(|e| RunError::Setup(e.to_string()))?;
            run_branch_table(&points)
        }
        Task::SweepAtoms { n_list, solve } => {
            let mut settings = solve_settings(solve);
            if solve.classify {
                settings.stability = Some(stability_settings(solve, params));
            }
            let points = sweep_atoms(params, n_list, &settings)
                .map_err(|e| RunError::Setup(e.to_string()))?;
            run_branch_table(&points)
        }
        Task::SweepPump { eta_list, solve } => {
            let mut settings = solve_settings(solve);
            if solve.classify {
                settings.stability = Some(stability_settings(solve, params));
            }
            let points = sweep_pump(params, eta_list, &settings)
                .map_err(|e| RunError::Setup(e.to_string()))?;
            run_branch_table(&points)
        }
        Task::Dynamics { n0, integration } => dynamics_csv(config, *n0, integration)?,
        Task::Basins {
            n0_list,
            integration,
        } => {
            let grid =
                MomentumGrid::new(params.n_sites).map_err(|e| RunError::Setup(e.to_string()))?;
            let sea = build_fermi_sea(params.n_atoms, &grid)
                .map_err(|e| RunError::Setup(e.to_string()))?;
            let summary = hopping_expectation(&sea, &grid);
            let scan = basin_scan(n0_list, &summary, params, &integration.to_settings())
                .map_err(|e| RunError::Setup(e.to_string()))?;
            let mut body = String::from("n0,attractor,converged,cluster,status\n");
            let mut flagged = 0;
            for row in &scan.rows {
                if matches!(row.status, TrajectoryStatus::Diverged { .. }) {
                    flagged += 1;
                }
                body.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt_f64(row.n0),
                    fmt_opt(row.attractor),
                    row.converged,
                    row.cluster.map(|c| c.to_string()).unwrap_or_default(),
                    status_tag(&row.status),
                ));
            }
            body.push_str(&format!(
                "# attractor-set: [{}]\n",
                scan.clusters
                    .iter()
                    .map(|&c| fmt_f64(c))
                    .collect::<Vec<_>>()
                    .join(" ")
            ));
            (body, flagged)
        }
        Task::StabilityCheck { n_photons, trials } => {
            let grid =
                MomentumGrid::new(params.n_sites).map_err(|e| RunError::Setup(e.to_string()))?;
            let sea = build_fermi_sea(params.n_atoms, &grid)
                .map_err(|e| RunError::Setup(e.to_string()))?;
            let coeffs = gaussian_coefficients(*n_photons, params)
                .map_err(|e| RunError::Setup(e.to_string()))?;
            let report = variational_stability_check(&sea, &grid, &coeffs, params, *trials, seed)
                .map_err(|e| RunError::Numerical(e.to_string()))?;
            let mut body = String::from("trials_run,n_lower,min_delta\n");
            body.push_str(&format!(
                "{},{},{}\n",
                report.trials_run,
                report.n_lower,
                fmt_opt(report.min_delta),
            ));
            (body, 0)
        }
    };

    let mut artifact = header(config, seed);
    if flagged > 0 {
        artifact.push_str(&format!("# flagged-rows={flagged}\n"));
    }
    artifact.push_str(&body);
    file.write_all(artifact.as_bytes())
        .map_err(|e| RunError::Setup(format!("write {}: {e}", output.display())))?;

    Ok(RunOutcome {
        output,
        flagged_rows: flagged,
    })
}
