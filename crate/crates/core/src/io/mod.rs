//! Configuration, exporters, metrics, and the command-line front end.

mod cli;
mod config;
mod export;
mod metrics;

pub use cli::{
    exit_code, load_sketch, main_with_args, run_ablation, run_animate, AblationRow, AblationTable,
    Cli, Command, RunArgs, RunOutput, ABLATION_LABELS,
};
pub use config::{ExportConfig, OracleSpec, RunConfig};
pub use export::{
    frame_file_name, frame_paths, loss_csv, read_frame_dir, render_ppm, write_ppm_frames,
    write_svg_frames, LOSS_CSV_HEADER, RASTER_SAMPLES, RASTER_SIZE,
};
pub use metrics::{compute_metrics, run_metrics, MetricsReport, METRICS_SCHEMA};
