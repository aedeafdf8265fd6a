//! One module per subcommand.

mod cluster;
mod experiment;
mod featurize;
mod report;
mod synth;

pub use cluster::cmd_cluster;
pub use experiment::cmd_experiment;
pub use featurize::cmd_featurize;
pub use report::cmd_report;
pub use synth::cmd_synth;

use std::path::{Path, PathBuf};

use crate::CliError;

pub(crate) fn signal_path(data_dir: &Path, subject: &str) -> PathBuf {
    data_dir.join(format!("{subject}_signal.csv"))
}

pub(crate) fn annotation_path(data_dir: &Path, subject: &str) -> PathBuf {
    data_dir.join(format!("{subject}_annotations.csv"))
}

pub(crate) fn ground_truth_path(data_dir: &Path, subject: &str) -> PathBuf {
    data_dir.join(format!("{subject}_ground_truth.csv"))
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))
}
