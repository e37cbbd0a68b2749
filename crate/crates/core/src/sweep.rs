//! Negativity/coherence sweeps along the equal-γ axis and their file formats.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::ChannelKind;
use crate::esd::{esd_report, EsdReport, DEFAULT_BISECTION_TOL};
use crate::evolution::{coherence_l1, evolve, EvolutionError, Mode, NoiseSetting, Transcription};
use crate::negativity::{negativity_analytic, negativity_numeric};
use crate::states::StateParams;

pub const CSV_HEADER: [&str; 4] = ["gamma", "negativity", "negativity_analytic", "coherence"];
pub const DEFAULT_GRID_POINTS: usize = 513;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid gamma grid: {0}")]
    Grid(String),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed CSV: {0}")]
    Parse(String),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// `points` evenly spaced values from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaGrid {
    start: f64,
    stop: f64,
    points: usize,
}

impl GammaGrid {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self, SweepError> {
        if points < 2 {
            return Err(SweepError::Grid(format!(
                "need at least 2 points, got {points}"
            )));
        }
        if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) {
            return Err(SweepError::Grid(format!(
                "bounds {start}..{stop} must lie in [0, 1]"
            )));
        }
        if start >= stop {
            return Err(SweepError::Grid(format!(
                "start {start} must be below stop {stop}"
            )));
        }
        Ok(GammaGrid {
            start,
            stop,
            points,
        })
    }

    pub fn unit(points: usize) -> Result<Self, SweepError> {
        Self::new(0.0, 1.0, points)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn values(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|k| {
                if k == last {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / last as f64
                }
            })
            .collect()
    }
}

impl Default for GammaGrid {
    fn default() -> Self {
        GammaGrid {
            start: 0.0,
            stop: 1.0,
            points: DEFAULT_GRID_POINTS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub setting: NoiseSetting,
    pub params: StateParams,
    pub grid: GammaGrid,
    pub tol: f64,
}

impl SweepConfig {
    pub fn new(kind: ChannelKind, mode: Mode, params: StateParams) -> Self {
        SweepConfig {
            setting: NoiseSetting::new(kind, mode),
            params,
            grid: GammaGrid::default(),
            tol: DEFAULT_BISECTION_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub negativity: f64,
    pub negativity_analytic: Option<f64>,
    pub coherence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub kind: ChannelKind,
    pub mode: Mode,
    pub b: f64,
    pub c: f64,
    pub a: f64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub metadata: SweepMetadata,
    pub rows: Vec<SweepRow>,
    pub esd: EsdReport,
}

pub fn sweep_row(
    setting: NoiseSetting,
    p: &StateParams,
    gamma: f64,
) -> Result<SweepRow, EvolutionError> {
    let scenario = setting.at(gamma)?;
    let rho = evolve(&scenario, p)?;
    Ok(SweepRow {
        gamma,
        negativity: negativity_numeric(&rho).value,
        negativity_analytic: negativity_analytic(&scenario, p, Transcription::Corrected).ok(),
        coherence: coherence_l1(&rho),
    })
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult, SweepError> {
    let rows = config
        .grid
        .values()
        .into_iter()
        .map(|g| sweep_row(config.setting, &config.params, g))
        .collect::<Result<Vec<_>, _>>()?;
    let esd = esd_report(config.setting, &config.params, config.tol)?;
    Ok(SweepResult {
        metadata: SweepMetadata {
            kind: config.setting.kind,
            mode: config.setting.mode,
            b: config.params.b(),
            c: config.params.c(),
            a: config.params.a(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        rows,
        esd,
    })
}

// `Display` for f64 prints the shortest string that parses back to the same
// bits, so the CSV round-trips exactly.
fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// RFC-4180 CSV with LF line endings; empty analytic cells mean no closed form.
pub fn rows_to_csv(rows: &[SweepRow]) -> Result<String, SweepError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.write_record([
            fmt_f64(row.gamma),
            fmt_f64(row.negativity),
            row.negativity_analytic.map(fmt_f64).unwrap_or_default(),
            fmt_f64(row.coherence),
        ])?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| SweepError::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| SweepError::Parse(e.to_string()))
}

pub fn rows_from_csv(text: &str) -> Result<Vec<SweepRow>, SweepError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(SweepError::Parse(format!("unexpected header {header:?}")));
    }
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| SweepError::Parse(format!("'{s}': {e}")))
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != CSV_HEADER.len() {
            return Err(SweepError::Parse(format!(
                "row with {} fields",
                record.len()
            )));
        }
        rows.push(SweepRow {
            gamma: num(&record[0])?,
            negativity: num(&record[1])?,
            negativity_analytic: match &record[2] {
                "" => None,
                s => Some(num(s)?),
            },
            coherence: num(&record[3])?,
        });
    }
    Ok(rows)
}

pub fn to_json(result: &SweepResult) -> Result<String, SweepError> {
    let mut s = serde_json::to_string_pretty(result)?;
    s.push('\n');
    Ok(s)
}
