//! Parameter sweeps, figure presets and CSV emission behind the CLI.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{AtomicProductState, Level, SystemConfig, DEFAULT_TAIL_TOLERANCE};
use crate::oracle::Oracle;
use crate::reduced::{NegativitySeries, ReducedStateSolver};

pub const DEFAULT_T_MAX: f64 = 25.0;
pub const DEFAULT_STEPS: usize = 1001;

/// Initial atomic state together with the label used in output.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedState {
    pub label: String,
    pub state: AtomicProductState,
}

impl NamedState {
    pub fn new(label: impl Into<String>, state: AtomicProductState) -> Self {
        Self {
            label: label.into(),
            state,
        }
    }

    pub fn excited_ground() -> Self {
        Self::new("pm", AtomicProductState::from_levels(Level::Excited, Level::Ground))
    }

    pub fn ground_ground() -> Self {
        Self::new("mm", AtomicProductState::from_levels(Level::Ground, Level::Ground))
    }

    pub fn excited_excited() -> Self {
        Self::new("pp", AtomicProductState::from_levels(Level::Excited, Level::Excited))
    }

    pub fn coherent() -> Self {
        Self::new("coherent", AtomicProductState::symmetric_coherent())
    }
}

/// Figure presets: caption parameters of the published curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig1d,
    Fig2,
    Fig3,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fig1a" => Self::Fig1a,
            "fig1b" => Self::Fig1b,
            "fig1c" => Self::Fig1c,
            "fig1d" => Self::Fig1d,
            "fig2" => Self::Fig2,
            "fig3" => Self::Fig3,
            other => return Err(Error::InvalidRunSpec(format!("unknown preset `{other}`"))),
        })
    }
}

impl Preset {
    pub fn spec(self) -> RunSpec {
        let base = RunSpec::default();
        match self {
            Self::Fig1a | Self::Fig1b | Self::Fig1c | Self::Fig1d => {
                let state = match self {
                    Self::Fig1a => NamedState::excited_ground(),
                    Self::Fig1b => NamedState::ground_ground(),
                    Self::Fig1c => NamedState::excited_excited(),
                    _ => NamedState::coherent(),
                };
                RunSpec {
                    states: vec![state],
                    nbar: vec![0.01],
                    alpha: vec![0.5],
                    ..base
                }
            }
            Self::Fig2 => RunSpec {
                states: vec![NamedState::excited_ground(), NamedState::coherent()],
                nbar: vec![1.0, 2.0],
                alpha: vec![0.5],
                ..base
            },
            // caption value; the body text quotes nbar = 1, reachable with --nbar 1
            Self::Fig3 => RunSpec {
                states: vec![NamedState::excited_ground(), NamedState::coherent()],
                nbar: vec![0.5],
                alpha: vec![0.1, 1.0],
                ..base
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub states: Vec<NamedState>,
    /// Sweep axis for the mean photon number; a single entry for plain runs.
    pub nbar: Vec<f64>,
    pub alpha: Vec<f64>,
    pub omega: f64,
    pub t_max: f64,
    pub steps: usize,
    pub tail_tolerance: f64,
    pub oracle: bool,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            states: vec![NamedState::excited_ground()],
            nbar: vec![0.01],
            alpha: vec![0.5],
            omega: 0.0,
            t_max: DEFAULT_T_MAX,
            steps: DEFAULT_STEPS,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            oracle: false,
        }
    }
}

impl RunSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidRunSpec(msg.to_owned()));
        if self.steps < 2 {
            return bad("steps must be at least 2");
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return bad("tmax must be positive");
        }
        if self.states.is_empty() || self.nbar.is_empty() || self.alpha.is_empty() {
            return bad("sweep lists must be nonempty");
        }
        for cell in self.cells() {
            cell.config(self)?;
        }
        Ok(())
    }

    /// `gt_i = i * t_max / (steps - 1)`
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps).map(|i| i as f64 * self.t_max / last).collect()
    }

    /// Every (state, nbar, alpha) combination, state-major.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for state in &self.states {
            for &nbar in &self.nbar {
                for &alpha in &self.alpha {
                    cells.push(Cell {
                        state: state.clone(),
                        nbar,
                        alpha,
                    });
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub state: NamedState,
    pub nbar: f64,
    pub alpha: f64,
}

impl Cell {
    pub fn config(&self, spec: &RunSpec) -> Result<SystemConfig> {
        SystemConfig::new(self.nbar, self.alpha)?
            .with_omega(spec.omega)
            .with_tail_tolerance(spec.tail_tolerance)
    }

    /// File-name fragment, e.g. `pm_nbar0.01_alpha0.5`.
    pub fn tag(&self) -> String {
        format!("{}_nbar{}_alpha{}", self.state.label, self.nbar, self.alpha)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub cell: Cell,
    pub series: NegativitySeries,
    pub oracle: Option<Vec<f64>>,
}

impl CellResult {
    pub fn summary(&self) -> String {
        let (max, at) = self.series.peak();
        format!(
            "state={} nbar={} alpha={} max_negativity={} at gt={}",
            self.cell.state.label,
            self.cell.nbar,
            self.cell.alpha,
            fmt_num(max),
            fmt_num(at)
        )
    }

    /// Largest pointwise gap between the sector path and the oracle.
    pub fn oracle_gap(&self) -> Option<f64> {
        self.oracle.as_ref().map(|o| {
            o.iter()
                .zip(&self.series.negativity)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }
}

pub fn run_cell(spec: &RunSpec, cell: &Cell) -> Result<CellResult> {
    let config = cell.config(spec)?;
    let grid = spec.grid();
    let series = ReducedStateSolver::new(config)?.negativity_series(&cell.state.state, &grid)?;
    let oracle = if spec.oracle {
        let oracle = Oracle::new(&config)?;
        Some(
            grid.par_iter()
                .map(|&gt| oracle.reduced_density(&cell.state.state, gt).negativity())
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    Ok(CellResult {
        cell: cell.clone(),
        series,
        oracle,
    })
}

pub fn run(spec: &RunSpec) -> Result<Vec<CellResult>> {
    spec.validate()?;
    spec.cells().par_iter().map(|cell| run_cell(spec, cell)).collect()
}

/// Scientific notation with 16 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.15e}")
}

pub fn write_cell_csv(result: &CellResult, out: &mut impl Write) -> io::Result<()> {
    let mut buf = String::from("gt,negativity");
    if result.oracle.is_some() {
        buf.push_str(",negativity_oracle");
    }
    buf.push('\n');
    for (i, (&gt, &eps)) in result.series.gt.iter().zip(&result.series.negativity).enumerate() {
        write!(buf, "{},{}", fmt_num(gt), fmt_num(eps)).unwrap();
        if let Some(oracle) = &result.oracle {
            write!(buf, ",{}", fmt_num(oracle[i])).unwrap();
        }
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())
}

/// All cells in one table with `state,nbar,alpha` key columns.
pub fn write_long_csv(results: &[CellResult], out: &mut impl Write) -> io::Result<()> {
    let with_oracle = results.iter().any(|r| r.oracle.is_some());
    let mut buf = String::from("state,nbar,alpha,gt,negativity");
    if with_oracle {
        buf.push_str(",negativity_oracle");
    }
    buf.push('\n');
    for r in results {
        for (i, (&gt, &eps)) in r.series.gt.iter().zip(&r.series.negativity).enumerate() {
            write!(
                buf,
                "{},{},{},{},{}",
                r.cell.state.label,
                fmt_num(r.cell.nbar),
                fmt_num(r.cell.alpha),
                fmt_num(gt),
                fmt_num(eps)
            )
            .unwrap();
            if with_oracle {
                let v = r.oracle.as_ref().map_or(f64::NAN, |o| o[i]);
                write!(buf, ",{}", fmt_num(v)).unwrap();
            }
            buf.push('\n');
        }
    }
    out.write_all(buf.as_bytes())
}

/// Output path of one cell when a sweep writes one file per cell:
/// `dir/stem_<tag>.ext`.
pub fn cell_path(base: &Path, cell: &Cell) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("negativity");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    base.with_file_name(format!("{stem}_{}.{ext}", cell.tag()))
}

/// Parse flat `key = value` text. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidRunSpec(format!("config line {}: expected `key = value`", lineno + 1)))?;
        map.insert(key.trim().to_owned(), value.trim().to_owned());
    }
    Ok(map)
}

pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidRunSpec(format!("`{s}` is not a number")))
        })
        .collect()
}
