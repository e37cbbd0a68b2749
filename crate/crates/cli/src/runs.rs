use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use qutrit_esd::channels::ChannelKind;
use qutrit_esd::esd::{esd_report, reproduce_table1_with_tol, EsdReport, EsdTable};
use qutrit_esd::evolution::{Mode, NoiseSetting};
use qutrit_esd::states::StateParams;
use qutrit_esd::sweep::{rows_to_csv, run_sweep, to_json, GammaGrid, SweepConfig};
use serde::Deserialize;

use crate::output::emit;
use crate::{config, CliError, Format};

/// One sweep curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub kind: ChannelKind,
    pub mode: Mode,
    pub params: StateParams,
    pub gamma_steps: usize,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunSpec {
    fn file_name(&self) -> String {
        format!(
            "{}_{}_b{}_c{}.{}",
            self.kind.name(),
            self.mode.name(),
            self.params.b(),
            self.params.c(),
            self.format.extension()
        )
    }
}

/// Batch file entry. `c` may be omitted together with `a_zero: true`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    kind: String,
    mode: String,
    b: f64,
    c: Option<f64>,
    #[serde(default)]
    a_zero: bool,
    gamma_steps: Option<usize>,
    tol: Option<f64>,
    format: Option<String>,
    out: Option<PathBuf>,
}

fn state(b: f64, c: f64) -> Result<StateParams, CliError> {
    StateParams::new(b, c).map_err(config)
}

pub fn params_from_args(args: &crate::StateArgs) -> Result<Vec<StateParams>, CliError> {
    if args.b.is_empty() {
        return Err(CliError::Config("--b is required".into()));
    }
    if args.a_zero {
        return args
            .b
            .iter()
            .map(|&b| StateParams::a_zero(b).map_err(config))
            .collect();
    }
    match (args.b.len(), args.c.len()) {
        (_, 0) => Err(CliError::Config("--c or --a-zero is required".into())),
        (nb, nc) if nb == nc => args
            .b
            .iter()
            .zip(&args.c)
            .map(|(&b, &c)| state(b, c))
            .collect(),
        (_, 1) => args.b.iter().map(|&b| state(b, args.c[0])).collect(),
        (1, _) => args.c.iter().map(|&c| state(args.b[0], c)).collect(),
        (nb, nc) => Err(CliError::Config(format!(
            "--b has {nb} values and --c has {nc}; give equal counts or a single value"
        ))),
    }
}

pub fn load_batch(
    path: &Path,
    default_format: Format,
    default_tol: f64,
) -> Result<Vec<RunSpec>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let raw: Vec<RawRun> = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if raw.is_empty() {
        return Err(CliError::Config(format!("{}: no runs", path.display())));
    }
    raw.into_iter()
        .enumerate()
        .map(|(i, r)| {
            let ctx = |msg: String| CliError::Config(format!("run {i}: {msg}"));
            let params = match (r.c, r.a_zero) {
                (Some(_), true) => return Err(ctx("give either c or a_zero".into())),
                (Some(c), false) => state(r.b, c),
                (None, true) => StateParams::a_zero(r.b).map_err(config),
                (None, false) => return Err(ctx("c is required unless a_zero is set".into())),
            }
            .map_err(|e| ctx(e.to_string()))?;
            let format = match r.format.as_deref() {
                None => default_format,
                Some("csv") => Format::Csv,
                Some("json") => Format::Json,
                Some(other) => return Err(ctx(format!("unknown format '{other}'"))),
            };
            let tol = r.tol.unwrap_or(default_tol);
            if !(tol > 0.0 && tol < 0.1) {
                return Err(ctx(format!("tol must lie in (0, 0.1), got {tol}")));
            }
            Ok(RunSpec {
                kind: r.kind.parse().map_err(ctx)?,
                mode: r.mode.parse().map_err(ctx)?,
                params,
                gamma_steps: r
                    .gamma_steps
                    .unwrap_or(qutrit_esd::sweep::DEFAULT_GRID_POINTS - 1),
                tol,
                format,
                out: r.out,
            })
        })
        .collect()
}

fn render(spec: &RunSpec) -> Result<String, CliError> {
    let mut cfg = SweepConfig::new(spec.kind, spec.mode, spec.params);
    cfg.grid = GammaGrid::unit(spec.gamma_steps + 1).map_err(config)?;
    cfg.tol = spec.tol;
    let result = run_sweep(&cfg).map_err(config)?;
    match spec.format {
        Format::Csv => rows_to_csv(&result.rows).map_err(config),
        Format::Json => to_json(&result).map_err(config),
        Format::Text => Err(CliError::Config("sweep writes csv or json".into())),
    }
}

/// Where each curve goes: `None` means stdout.
fn destinations(specs: &[RunSpec], out: Option<&Path>) -> Result<Vec<Option<PathBuf>>, CliError> {
    let single = specs.len() == 1 && specs[0].out.is_none();
    if single {
        return Ok(vec![match out {
            Some(p) if p.is_dir() => Some(p.join(specs[0].file_name())),
            other => other.map(Path::to_path_buf),
        }]);
    }
    specs
        .iter()
        .map(|s| match (&s.out, out) {
            (Some(own), Some(dir)) if own.is_relative() => Ok(Some(dir.join(own))),
            (Some(own), _) => Ok(Some(own.clone())),
            (None, Some(dir)) => Ok(Some(dir.join(s.file_name()))),
            (None, None) => Err(CliError::Config(
                "several curves need --out <directory> or a per-run out path".into(),
            )),
        })
        .collect()
}

/// Computes every curve concurrently, then writes them in input order.
pub fn execute(specs: &[RunSpec], out: Option<&Path>) -> Result<(), CliError> {
    let targets = destinations(specs, out)?;
    if targets.len() > 1 {
        if let Some(dir) = out {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
    }
    let rendered: Vec<Result<String, CliError>> = thread::scope(|scope| {
        let handles: Vec<_> = specs
            .iter()
            .map(|s| scope.spawn(move || render(s)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    for (text, target) in rendered.into_iter().zip(targets) {
        emit(target.as_deref(), &text?)?;
    }
    Ok(())
}

pub fn esd_reports(
    kind: Option<ChannelKind>,
    mode: Option<Mode>,
    params: &[StateParams],
    tol: f64,
) -> Result<Vec<EsdReport>, CliError> {
    let settings: Vec<NoiseSetting> = NoiseSetting::all()
        .into_iter()
        .filter(|s| kind.is_none_or(|k| s.kind == k) && mode.is_none_or(|m| s.mode == m))
        .collect();
    let mut reports = Vec::new();
    for p in params {
        for &s in &settings {
            reports.push(esd_report(s, p, tol).map_err(config)?);
        }
    }
    Ok(reports)
}

pub fn table(params: &[StateParams], tol: f64) -> Result<EsdTable, CliError> {
    reproduce_table1_with_tol(params, tol).map_err(config)
}
