//! `bpd experiment`: run the factorial grid and write results, the
//! confusion sidecar, the matched-point summary, and provenance files.

use std::path::{Path, PathBuf};

use bpd_core::dataset::io::load_recording;
use bpd_core::dataset::Recording;
use bpd_core::experiments::{
    matched_points, run_grid, write_confusion_csv, write_matched_csv, write_results_csv,
    SubjectData,
};
use bpd_core::Result as CoreResult;

use crate::commands::{annotation_path, ensure_dir, signal_path};
use crate::config::RunConfig;
use crate::CliError;

/// Loads recordings from the data directory, one subject at a time.
struct DiskData {
    data_dir: PathBuf,
    sample_rate: f64,
}

impl SubjectData for DiskData {
    fn contains(&self, subject: &str) -> bool {
        signal_path(&self.data_dir, subject).exists()
            && annotation_path(&self.data_dir, subject).exists()
    }

    fn load(&self, subject: &str) -> CoreResult<Recording> {
        load_recording(
            &signal_path(&self.data_dir, subject),
            &annotation_path(&self.data_dir, subject),
            subject,
            self.sample_rate,
        )
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_experiment(config: &RunConfig) -> Result<(), CliError> {
    config.validate()?;
    let data = DiskData {
        data_dir: config.data_dir.clone(),
        sample_rate: config.sample_rate,
    };
    for subject in &config.subjects {
        if !data.contains(subject) {
            return Err(CliError::Data(format!(
                "no recording for subject {subject:?} in {}",
                config.data_dir.display()
            )));
        }
    }
    ensure_dir(&config.out_dir)?;

    let grid = config.grid();
    let window = config.window_spec();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
    let results = pool
        .install(|| run_grid(&grid, &window, &data))
        .map_err(CliError::data)?;

    write_results_csv(&results, &config.out_dir.join("results.csv")).map_err(CliError::data)?;
    write_confusion_csv(&results, &config.out_dir.join("confusion.csv"))
        .map_err(CliError::data)?;
    let points = matched_points(&results);
    if points.is_empty() {
        eprintln!("experiment: no matched k-means/time-based points in this grid");
    }
    write_matched_csv(&points, &config.out_dir.join("summary.csv")).map_err(CliError::data)?;

    write_file(&config.out_dir.join("config.txt"), &config.render())?;
    write_file(
        &config.out_dir.join("run_metadata.txt"),
        &metadata(config, results.len()),
    )?;
    println!(
        "experiment: {} result rows, {} matched points -> {}",
        results.len(),
        points.len(),
        config.out_dir.display()
    );
    Ok(())
}

fn metadata(config: &RunConfig, rows: usize) -> String {
    format!(
        "result_rows = {rows}\n\
         oracle_bpd = true  # BPD models are built on the full subject data before splitting\n\
         split = window-level uniform, unstratified\n\
         seed_derivation = splitmix64 chain over (master, fnv1a tags); \
         cluster <- (\"cluster\", subject, strategy, k, segment_min); \
         split <- (\"split\", subject, rep); \
         train <- (\"train\", subject, rep, classifier)\n\
         master_seed = {}\n\
         subjects = {}\n",
        config.master_seed,
        config.subjects.join(",")
    )
}
