//! Command-line front end: `animate`, `metrics`, and `ablate`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::config::RunConfig;
use super::export::{loss_csv, write_file, write_ppm_frames, write_svg_frames};
use super::metrics::{compute_metrics, run_metrics, MetricsReport};
use crate::error::{Error, Result};
use crate::geometry::QuadratureSpec;
use crate::losses::{FitMode, LengthAnchor, LossBreakdown};
use crate::motion::save_checkpoint;
use crate::optim::{train, TrainReport, Wiring};
use crate::sketch::{parse_svg, CompositionMode, SketchFrame};

#[derive(Debug, Parser)]
#[command(name = "sketchmotion", version, about = "Animate vector sketches")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a motion model on one sketch and export the frames.
    Animate(RunArgs),
    /// Recompute geometric metrics of an exported frame directory.
    Metrics(MetricsArgs),
    /// Train the full, no_la, and no_arap variants and compare them.
    Ablate(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitModeArg {
    RotationOnly,
    RotationThenScale,
}

impl From<FitModeArg> for FitMode {
    fn from(v: FitModeArg) -> Self {
        match v {
            FitModeArg::RotationOnly => FitMode::RotationOnly,
            FitModeArg::RotationThenScale => FitMode::RotationThenScale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WiringArg {
    Joint,
    PostHocRefine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompositionArg {
    Recurrent,
    Anchored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnchorArg {
    InitialFrame,
    PreviousFrame,
}

/// Flags shared by `animate` and `ablate`. Every flag overrides the
/// corresponding field of `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input SVG sketch.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub frames: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_l: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_arap: Option<f64>,
    #[arg(long, value_enum)]
    pub length_anchor: Option<AnchorArg>,
    #[arg(long, value_enum)]
    pub fit_mode: Option<FitModeArg>,
    /// `rigid:angle=A,tx=X,ty=Y,weight=W`, `static[:weight=W]`, or
    /// `target:dir=DIR[,weight=W]`.
    #[arg(long)]
    pub oracle: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lr: Option<f64>,
    /// Decay the learning rate to zero with a half cosine over the run.
    #[arg(long)]
    pub cosine: bool,
    #[arg(long, value_enum)]
    pub wiring: Option<WiringArg>,
    #[arg(long, value_enum)]
    pub composition: Option<CompositionArg>,
    #[arg(long)]
    pub samples_u: Option<usize>,
    #[arg(long)]
    pub samples_t: Option<usize>,
    #[arg(long)]
    pub log_every: Option<usize>,
    /// Also write PPM rasters of every frame.
    #[arg(long)]
    pub ppm: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MetricsArgs {
    /// Directory holding frame_*.svg files.
    pub dir: PathBuf,
    #[arg(long, value_enum, default_value = "rotation-then-scale")]
    pub fit_mode: FitModeArg,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    /// Resolves flag > config file > built-in default.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_json_file(path).map_err(|e| match e {
                Error::Io { path, source } => {
                    Error::InvalidConfig(format!("cannot read config {}: {source}", path.display()))
                }
                other => other,
            })?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($flag:expr => $field:expr) => {
                if let Some(v) = $flag.clone() {
                    $field = v.into();
                }
            };
        }
        set!(self.input => cfg.input);
        set!(self.out => cfg.out);
        set!(self.frames => cfg.train.frames);
        set!(self.iters => cfg.train.iterations);
        set!(self.lambda_l => cfg.la.lambda_l);
        set!(self.lambda_a => cfg.la.lambda_a);
        set!(self.lambda_arap => cfg.arap.lambda_arap);
        set!(self.oracle => cfg.oracle);
        set!(self.seed => cfg.train.seed);
        set!(self.lr => cfg.train.adam.lr);
        set!(self.log_every => cfg.train.log_every);
        set!(self.fit_mode => cfg.arap.fit_mode);
        if let Some(a) = self.length_anchor {
            cfg.la.length_anchor = match a {
                AnchorArg::InitialFrame => LengthAnchor::InitialFrame,
                AnchorArg::PreviousFrame => LengthAnchor::PreviousFrame,
            };
        }
        if let Some(w) = self.wiring {
            cfg.train.wiring = match w {
                WiringArg::Joint => Wiring::Joint,
                WiringArg::PostHocRefine => Wiring::PostHocRefine,
            };
        }
        if let Some(c) = self.composition {
            cfg.train.composition = match c {
                CompositionArg::Recurrent => CompositionMode::Recurrent,
                CompositionArg::Anchored => CompositionMode::Anchored,
            };
        }
        if let Some(u) = self.samples_u {
            cfg.train.quadrature.samples_u = u;
        }
        if let Some(t) = self.samples_t {
            cfg.train.quadrature.samples_t = t;
        }
        if self.cosine {
            cfg.train.adam.cosine_steps = Some(cfg.train.iterations.max(1) as u64);
        }
        if self.ppm {
            cfg.export.ppm = true;
        }
        Ok(cfg)
    }
}

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) => 2,
        Error::NonFiniteLoss { .. } => 3,
        _ => 1,
    }
}

pub fn load_sketch(path: &Path) -> Result<SketchFrame> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_svg(&text).map_err(|e| match e {
        Error::MalformedSvg(msg) => Error::MalformedSvg(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Result of one training run together with its metrics.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: TrainReport,
    pub metrics: MetricsReport,
}

fn train_and_measure(cfg: &RunConfig, sketch: &SketchFrame) -> Result<RunOutput> {
    let oracle = cfg.oracle_spec()?.build(cfg.train.frames)?;
    let report = train(sketch, oracle.as_ref(), &cfg.la, &cfg.arap, &cfg.train)?;
    let mut metrics =
        compute_metrics(&report.video, cfg.arap.fit_mode, &QuadratureSpec::default())?;
    metrics.training = Some(report.final_breakdown);
    log::info!(
        "trained {} iterations in {:.2?}; final loss {:.6e}",
        report.history.len(),
        report.wall_clock,
        report.final_breakdown.total
    );
    Ok(RunOutput { report, metrics })
}

fn export_run(cfg: &RunConfig, out: &Path, run: &RunOutput) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    if cfg.export.svg {
        write_svg_frames(out, &run.report.video)?;
    }
    if cfg.export.ppm {
        write_ppm_frames(out, &run.report.video)?;
    }
    if cfg.export.loss_csv {
        write_file(&out.join("loss.csv"), loss_csv(&run.report.history))?;
    }
    if cfg.export.metrics {
        write_file(&out.join("metrics.json"), to_json(&run.metrics)?)?;
    }
    if cfg.export.checkpoint {
        save_checkpoint(&out.join("params.smv"), &run.report.params)?;
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidConfig(format!("cannot serialize: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn prepare(cfg: &RunConfig) -> Result<(SketchFrame, PathBuf)> {
    cfg.validate()?;
    let input = cfg.input.as_deref().expect("validated");
    let sketch = load_sketch(input)?;
    Ok((sketch, cfg.out.clone().expect("validated")))
}

pub fn run_animate(cfg: &RunConfig) -> Result<RunOutput> {
    let (sketch, out) = prepare(cfg)?;
    let run = train_and_measure(cfg, &sketch)?;
    export_run(cfg, &out, &run)?;
    Ok(run)
}

pub const ABLATION_LABELS: [&str; 3] = ["full", "no_la", "no_arap"];

#[derive(Debug, Clone)]
pub struct AblationRow {
    pub label: &'static str,
    pub final_loss: LossBreakdown,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone)]
pub struct AblationTable {
    pub rows: Vec<AblationRow>,
}

impl AblationTable {
    pub fn row(&self, label: &str) -> Option<&AblationRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "config,max_length_deviation,mean_length_deviation,total_swept_area,arap_energy,mean_speed,mean_acceleration,final_total\n",
        );
        for r in &self.rows {
            let m = &r.metrics;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.label,
                m.max_length_deviation,
                m.mean_length_deviation,
                m.total_swept_area,
                m.total_arap_energy,
                m.mean_speed,
                m.mean_acceleration,
                r.final_loss.total
            );
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<8} {:>14} {:>14} {:>14} {:>14} {:>12} {:>12}\n",
            "config", "max_len_dev", "mean_len_dev", "swept_area", "arap_energy", "speed", "accel"
        );
        for r in &self.rows {
            let m = &r.metrics;
            let _ = writeln!(
                out,
                "{:<8} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>12.4e} {:>12.4e}",
                r.label,
                m.max_length_deviation,
                m.mean_length_deviation,
                m.total_swept_area,
                m.total_arap_energy,
                m.mean_speed,
                m.mean_acceleration
            );
        }
        out
    }
}

/// Runs `full`, `no_la` (both LA weights zero), and `no_arap` with the same
/// seed. Each run is exported into a subdirectory of the output directory.
pub fn run_ablation(cfg: &RunConfig) -> Result<AblationTable> {
    let (sketch, out) = prepare(cfg)?;
    let mut rows = Vec::with_capacity(3);
    for label in ABLATION_LABELS {
        let mut variant = cfg.clone();
        match label {
            "no_la" => {
                variant.la.lambda_l = 0.0;
                variant.la.lambda_a = 0.0;
            }
            "no_arap" => variant.arap.lambda_arap = 0.0,
            _ => {}
        }
        log::info!("ablation run '{label}'");
        let run = train_and_measure(&variant, &sketch)?;
        export_run(&variant, &out.join(label), &run)?;
        rows.push(AblationRow {
            label,
            final_loss: run.report.final_breakdown,
            metrics: run.metrics,
        });
    }
    let table = AblationTable { rows };
    write_file(&out.join("ablation.csv"), table.to_csv())?;
    Ok(table)
}

/// Parses arguments, runs the command, and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_command(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn run_command(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Animate(args) => {
            let cfg = args.resolve()?;
            let run = run_animate(&cfg)?;
            let out = cfg.out.as_deref().expect("validated");
            println!(
                "wrote {} frames to {} (final loss {:.6e})",
                run.report.video.frame_count(),
                out.display(),
                run.report.final_breakdown.total
            );
        }
        Command::Metrics(args) => {
            let report = run_metrics(&args.dir, args.fit_mode.into())?;
            let json = to_json(&report)?;
            match &args.out {
                Some(path) => write_file(path, json)?,
                None => print!("{json}"),
            }
        }
        Command::Ablate(args) => {
            let cfg = args.resolve()?;
            print!("{}", run_ablation(&cfg)?.to_table());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("sketchmotion").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_file_and_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(
            &path,
            r#"{"train": {"iterations": 7, "frames": 5}, "la": {"lambda_l": 0.3}, "oracle": "static"}"#,
        )
        .unwrap();
        let Command::Animate(args) = parse(&[
            "animate",
            "--config",
            path.to_str().unwrap(),
            "--frames",
            "9",
            "--lambda-a",
            "2e-5",
        ])
        .command
        else {
            panic!("expected animate");
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.train.frames, 9);
        assert_eq!(cfg.train.iterations, 7);
        assert_eq!(cfg.la.lambda_l, 0.3);
        assert_eq!(cfg.la.lambda_a, 2e-5);
        assert_eq!(cfg.arap.lambda_arap, 0.1);
        assert_eq!(cfg.oracle, "static");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::InvalidConfig("x".into())), 2);
        assert_eq!(exit_code(&Error::NonFiniteLoss { iteration: 3 }), 3);
        assert_eq!(exit_code(&Error::MalformedSvg("x".into())), 1);
        assert_eq!(exit_code(&Error::UnsupportedCommand('Q')), 1);
        assert_eq!(
            main_with_args([
                "sketchmotion",
                "animate",
                "--iters",
                "0",
                "--input",
                "x.svg",
                "--out",
                "o"
            ]),
            2
        );
        assert_eq!(main_with_args(["sketchmotion", "bogus"]), 2);
    }

    #[test]
    fn missing_config_file_is_a_config_error() {
        let args = RunArgs {
            config: Some("/nonexistent/cfg.json".into()),
            ..RunArgs::default()
        };
        assert!(matches!(args.resolve(), Err(Error::InvalidConfig(_))));
    }
}
