//! `bpd featurize`: export the per-window feature matrix as CSV.

use std::fmt::Write as _;

use bpd_core::dataset::io::load_recording;
use bpd_core::dataset::segment_day;
use bpd_core::features::{featurize_recording, FEATURE_LEN};

use crate::commands::{annotation_path, ensure_dir, signal_path};
use crate::config::RunConfig;
use crate::CliError;

pub fn cmd_featurize(config: &RunConfig) -> Result<(), CliError> {
    config.validate()?;
    ensure_dir(&config.out_dir)?;
    let window = config.window_spec();
    for subject in &config.subjects {
        let recording = load_recording(
            &signal_path(&config.data_dir, subject),
            &annotation_path(&config.data_dir, subject),
            subject,
            config.sample_rate,
        )
        .map_err(CliError::data)?;
        let segments = segment_day(&recording, config.featurize_segment_min)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let features =
            featurize_recording(&recording, &window, &segments).map_err(CliError::data)?;

        let mut out = String::from("window_start_ms,segment_id,label");
        for i in 0..FEATURE_LEN {
            let _ = write!(out, ",f{i:02}");
        }
        out.push('\n');
        for f in &features {
            let _ = write!(out, "{},{},{}", f.window_start_ms, f.segment, f.label);
            for v in &f.values {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        let path = config.out_dir.join(format!("{subject}_features.csv"));
        std::fs::write(&path, out)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
        println!("featurize: {subject} -> {} windows", features.len());
    }
    Ok(())
}
