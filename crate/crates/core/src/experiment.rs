//! Parameter sweeps over (c, Γ), figure presets and CSV/JSON export.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{window_summary, WindowSummary};
use crate::error::{Error, Result};
use crate::integrator::{evolve, IntegratorConfig, Sample, TimeGrid, Trajectory};
use crate::model::{
    density_from_initial, DensityMatrix, InitialState, LindbladSpec, ModelParams, C64,
};

/// Environment variable capping the sweep worker pool.
pub const THREADS_ENV: &str = "DUETDYN_THREADS";

/// Long-form CSV header, one row per recorded sample.
pub const CSV_HEADER: [&str; 10] = [
    "c",
    "gamma_rate",
    "t",
    "rho_rr",
    "rho_ll",
    "re_rho_rl",
    "im_rho_rl",
    "z",
    "coherence",
    "purity",
];

pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Evenly spaced axis of `steps` points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Axis { min, max, steps }
    }

    pub fn single(value: f64) -> Self {
        Axis::new(value, value, 1)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let width = self.max - self.min;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.min + width * i as f64 / last)
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::validation("c axis needs at least one step"));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::validation("c axis bounds must be finite"));
        }
        if self.steps > 1 && !(self.max > self.min) {
            return Err(Error::validation("c axis max must exceed min"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Z,
    Coherence,
    Purity,
}

fn all_observables() -> Vec<Observable> {
    vec![Observable::Z, Observable::Coherence, Observable::Purity]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Template parameters; `c` and `decoherence_rate` are overridden per cell.
    pub base: ModelParams,
    pub c_axis: Axis,
    pub gamma_axis: Vec<f64>,
    pub init: InitialState,
    pub grid: TimeGrid,
    #[serde(default)]
    pub cfg: IntegratorConfig,
    #[serde(default = "all_observables")]
    pub observables: Vec<Observable>,
    pub summary_window: (f64, f64),
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.c_axis.validate()?;
        if self.gamma_axis.is_empty() {
            return Err(Error::validation("gamma axis must not be empty"));
        }
        self.init.validate()?;
        self.grid.validate()?;
        self.cfg.validate()?;
        let (t0, t1) = self.summary_window;
        if !(t0 < t1 && t0 >= 0.0 && t1 <= self.grid.t_final) {
            return Err(Error::validation(format!(
                "summary window [{t0}, {t1}] must lie inside [0, {}]",
                self.grid.t_final
            )));
        }
        for &rate in &self.gamma_axis {
            for &c in &[self.c_axis.min, self.c_axis.max] {
                self.cell_params(c, rate).validate()?;
            }
        }
        Ok(())
    }

    pub fn c_values(&self) -> Vec<f64> {
        self.c_axis.values()
    }

    pub fn cell_count(&self) -> usize {
        self.c_axis.steps * self.gamma_axis.len()
    }

    pub fn cell_params(&self, c: f64, rate: f64) -> ModelParams {
        ModelParams {
            c,
            decoherence_rate: rate,
            ..self.base
        }
    }
}

/// One recorded sample as stored in a sweep result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSample {
    pub t: f64,
    pub rho_rr: f64,
    pub rho_ll: f64,
    pub re_rho_rl: f64,
    pub im_rho_rl: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purity: Option<f64>,
}

impl CellSample {
    fn from_sample(s: &Sample, observables: &[Observable]) -> Self {
        let has = |o| observables.contains(&o);
        CellSample {
            t: s.t,
            rho_rr: s.rho.rr.re,
            rho_ll: s.rho.ll.re,
            re_rho_rl: s.rho.rl.re,
            im_rho_rl: s.rho.rl.im,
            z: has(Observable::Z).then_some(s.z),
            coherence: has(Observable::Coherence).then_some(s.coherence),
            purity: has(Observable::Purity).then_some(s.purity),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        let rl = C64::new(self.re_rho_rl, self.im_rho_rl);
        DensityMatrix {
            rr: C64::new(self.rho_rr, 0.0),
            rl,
            lr: rl.conj(),
            ll: C64::new(self.rho_ll, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub message: String,
    /// Simulation time at which a guard tripped, if any.
    pub t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub c_index: usize,
    pub gamma_index: usize,
    pub c: f64,
    pub gamma_rate: f64,
    pub samples: Vec<CellSample>,
    pub summary: Option<WindowSummary>,
    pub error: Option<CellError>,
}

impl Cell {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    /// Rebuilds the trajectory from the stored samples.
    pub fn trajectory(&self) -> Result<Trajectory> {
        Trajectory::from_samples(
            self.samples
                .iter()
                .map(|s| Sample::new(s.t, s.density()))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec: SweepSpec,
    pub code_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub c_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    /// Row-major in (gamma_index, c_index).
    pub cells: Vec<Cell>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn cell(&self, c_index: usize, gamma_index: usize) -> Option<&Cell> {
        if c_index >= self.c_values.len() {
            return None;
        }
        self.cells.get(gamma_index * self.c_values.len() + c_index)
    }

    /// Cells sharing one decoherence rate, ordered by c.
    pub fn gamma_slice(&self, gamma_index: usize) -> &[Cell] {
        let n = self.c_values.len();
        let start = (gamma_index * n).min(self.cells.len());
        let end = (start + n).min(self.cells.len());
        &self.cells[start..end]
    }

    /// (c, window-mean z) for one decoherence rate. Fails if any cell in the
    /// slice carries an error.
    pub fn summary_curve(&self, gamma_index: usize) -> Result<Vec<(f64, f64)>> {
        self.gamma_slice(gamma_index)
            .iter()
            .map(|cell| match (&cell.summary, &cell.error) {
                (Some(s), None) => Ok((cell.c, s.mean_z)),
                (_, Some(e)) => Err(Error::validation(format!(
                    "cell (c = {}, Γ = {}) failed: {}",
                    cell.c, cell.gamma_rate, e.message
                ))),
                (None, None) => Err(Error::validation(format!(
                    "cell (c = {}, Γ = {}) has no summary",
                    cell.c, cell.gamma_rate
                ))),
            })
            .collect()
    }

    pub fn failed_cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| !c.is_ok())
    }
}

fn run_cell(spec: &SweepSpec, c_index: usize, gamma_index: usize, c: f64) -> Cell {
    let gamma_rate = spec.gamma_axis[gamma_index];
    let mut cell = Cell {
        c_index,
        gamma_index,
        c,
        gamma_rate,
        samples: Vec::new(),
        summary: None,
        error: None,
    };
    let params = spec.cell_params(c, gamma_rate);
    let outcome = density_from_initial(&spec.init)
        .and_then(|rho0| evolve(&rho0, &params, &spec.grid, &spec.cfg))
        .and_then(|traj| {
            let summary = window_summary(&traj, spec.summary_window.0, spec.summary_window.1)?;
            Ok((traj, summary))
        });
    match outcome {
        Ok((traj, summary)) => {
            cell.samples = traj
                .samples()
                .iter()
                .map(|s| CellSample::from_sample(s, &spec.observables))
                .collect();
            cell.summary = Some(summary);
        }
        Err(e) => {
            cell.error = Some(CellError {
                message: e.to_string(),
                t: e.time(),
            })
        }
    }
    cell
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs every (c, Γ) cell, using a pool capped by `DUETDYN_THREADS`.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_with_threads(spec, threads_from_env())
}

/// Runs every (c, Γ) cell on a pool of `threads` workers (rayon's default
/// when `None`). Cell failures are recorded in place.
pub fn run_sweep_with_threads(spec: &SweepSpec, threads: Option<usize>) -> Result<SweepResult> {
    spec.validate()?;
    let c_values = spec.c_values();
    let jobs: Vec<(usize, usize, f64)> = (0..spec.gamma_axis.len())
        .flat_map(|gi| c_values.iter().enumerate().map(move |(ci, &c)| (ci, gi, c)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::validation(format!("cannot build worker pool: {e}")))?;
    let cells = pool.install(|| {
        jobs.par_iter()
            .map(|&(ci, gi, c)| run_cell(spec, ci, gi, c))
            .collect::<Vec<_>>()
    });
    Ok(SweepResult {
        c_values,
        gamma_values: spec.gamma_axis.clone(),
        cells,
        provenance: Provenance {
            spec: spec.clone(),
            code_version: CODE_VERSION.to_string(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureName {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl FigureName {
    pub const ALL: [FigureName; 6] = [
        FigureName::Fig1,
        FigureName::Fig2,
        FigureName::Fig3,
        FigureName::Fig4,
        FigureName::Fig5,
        FigureName::Fig6,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureName::Fig1 => "fig1",
            FigureName::Fig2 => "fig2",
            FigureName::Fig3 => "fig3",
            FigureName::Fig4 => "fig4",
            FigureName::Fig5 => "fig5",
            FigureName::Fig6 => "fig6",
        }
    }
}

impl fmt::Display for FigureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureName::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::validation(format!("unknown figure preset '{s}'")))
    }
}

/// c-axis used by the surface figures: [0, 4V] with 201 points (0.02V spacing).
pub const SURFACE_C_AXIS: Axis = Axis {
    min: 0.0,
    max: 4.0,
    steps: 201,
};

/// Sweep specification regenerating the data behind one figure.
///
/// Operator, decoherence rates, c values and initial state follow the
/// figure captions. Run length (50/V), step (1e-3/V), the c-grid of the
/// surfaces and the summary window (last half of the run) are defaults.
pub fn figure_preset(name: FigureName) -> SweepSpec {
    let right = InitialState::right();
    let surface = |rates: Vec<f64>, observables: Vec<Observable>| SweepSpec {
        base: ModelParams::new(0.0, 0.0, LindbladSpec::sigma_plus()),
        c_axis: SURFACE_C_AXIS,
        gamma_axis: rates,
        init: right,
        grid: TimeGrid {
            t_final: 50.0,
            dt: 1e-3,
            record_stride: 100,
        },
        cfg: IntegratorConfig::default(),
        observables,
        summary_window: (25.0, 50.0),
    };
    let trace = |c: f64| SweepSpec {
        base: ModelParams::new(c, 0.0, LindbladSpec::sigma_x()),
        c_axis: Axis::single(c),
        gamma_axis: vec![0.01, 0.0],
        init: right,
        grid: TimeGrid {
            t_final: 50.0,
            dt: 1e-3,
            record_stride: 10,
        },
        cfg: IntegratorConfig::default(),
        observables: all_observables(),
        summary_window: (25.0, 50.0),
    };
    match name {
        FigureName::Fig1 => surface(vec![0.1, 0.0], vec![Observable::Z]),
        FigureName::Fig2 => surface(vec![0.3, 0.5], vec![Observable::Z]),
        FigureName::Fig3 => surface(vec![0.1], vec![Observable::Coherence]),
        FigureName::Fig4 => trace(3.0),
        FigureName::Fig5 => trace(1.0),
        FigureName::Fig6 => trace(2.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::validation(format!(
                "unknown export format '{other}'"
            ))),
        }
    }
}

/// Formats a float with 17 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_error(context: impl Into<String>, path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        context: context.into(),
        path: path.to_path_buf(),
        source,
    }
}

fn csv_error(context: String, path: &Path, err: csv::Error) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(source) => io_error(context, path, source),
        other => Error::Format {
            context,
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

/// Writes the long-form CSV rows of `cells`; returns the number of data rows.
pub fn write_csv<'a>(cells: impl IntoIterator<Item = &'a Cell>, path: &Path) -> Result<usize> {
    let mut writer =
        csv::Writer::from_path(path).map_err(|e| csv_error("creating CSV".into(), path, e))?;
    writer
        .write_record(CSV_HEADER)
        .map_err(|e| csv_error("writing CSV header".into(), path, e))?;
    let mut rows = 0;
    for cell in cells {
        for s in &cell.samples {
            let rho = s.density();
            let record = [
                cell.c,
                cell.gamma_rate,
                s.t,
                s.rho_rr,
                s.rho_ll,
                s.re_rho_rl,
                s.im_rho_rl,
                rho.imbalance(),
                rho.coherence(),
                rho.purity(),
            ]
            .map(format_number);
            writer.write_record(&record).map_err(|e| {
                csv_error(
                    format!(
                        "writing CSV row for cell (c = {}, gamma_rate = {})",
                        cell.c, cell.gamma_rate
                    ),
                    path,
                    e,
                )
            })?;
            rows += 1;
        }
    }
    writer
        .flush()
        .map_err(|e| io_error("flushing CSV", path, e))?;
    Ok(rows)
}

pub fn write_json(result: &SweepResult, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| io_error("creating JSON", path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer(&mut out, result).map_err(|e| Error::Format {
        context: "serializing sweep result".into(),
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    out.flush().map_err(|e| io_error("flushing JSON", path, e))
}

pub fn read_json(path: &Path) -> Result<SweepResult> {
    let file = File::open(path).map_err(|e| io_error("opening JSON", path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Format {
        context: "parsing sweep result".into(),
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Writes a sweep result to `path` in the given format.
pub fn export(result: &SweepResult, format: ExportFormat, path: &Path) -> Result<()> {
    match format {
        ExportFormat::Csv => write_csv(&result.cells, path).map(|_| ()),
        ExportFormat::Json => write_json(result, path),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: ExportFormat,
}

/// Run-config file: a [`SweepSpec`] plus an `output` block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub spec: SweepSpec,
    pub output: OutputSpec,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| io_error("opening run config", path, e))?;
        serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Format {
            context: "parsing run config".into(),
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}
