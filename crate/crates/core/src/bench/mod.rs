//! Monte Carlo experiments: trial batches, summaries, convergence curves and
//! result files.

mod batch;
mod campaign;
mod config;
mod convergence;
mod export;

pub use batch::{
    histogram_data, run_batch, summarize, with_workers, BenchSummary, Histogram, Quantiles,
    TrialBatch, REDRAW_ATTEMPTS,
};
pub use campaign::{
    prepare_output_dir, run_campaign, write_campaign, CampaignOptions, CampaignResult,
    ConvergenceRecord, HistogramRecord, RunManifest, ThetaRecord, OUTPUT_FILES,
};
pub use config::{
    resolve_matrix, zoo_matrix, BenchConfig, ConvergenceConfig, MatrixEntry, MatrixOverride,
    ZOO_IDS, ZOO_SEED,
};
pub use convergence::{convergence_curve, ConvergencePoint};
pub use export::{export_results, summaries_to_csv, ExportFormat, CSV_COLUMNS};
