//! `bpd synth`: write synthetic recordings plus ground truth to disk.

use bpd_core::dataset::io::{write_ground_truth, write_recording};
use bpd_core::dataset::synth::{generate_recording, SynthesisSpec};
use bpd_core::seeding;

use crate::commands::{annotation_path, ensure_dir, ground_truth_path, signal_path};
use crate::config::RunConfig;
use crate::CliError;

/// Loads the synthesis spec (the built-in eight subjects when none is
/// configured). Spec problems are configuration errors.
pub(crate) fn load_spec(config: &RunConfig) -> Result<SynthesisSpec, CliError> {
    match &config.synthesis_spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read synthesis spec {}: {e}", path.display()))
            })?;
            SynthesisSpec::from_json(&text).map_err(|e| CliError::Config(e.to_string()))
        }
        None => Ok(SynthesisSpec::default_eight_subjects()),
    }
}

/// Per-subject generation seed; `bpd synth` and the in-process synthetic
/// data source use the same derivation, so they produce identical data.
pub fn subject_seed(master_seed: u64, subject: &str) -> u64 {
    seeding::derive(master_seed, &[seeding::fnv1a(subject)])
}

pub fn cmd_synth(config: &RunConfig) -> Result<(), CliError> {
    config.validate()?;
    let spec = load_spec(config)?;
    ensure_dir(&config.data_dir)?;
    for subject in &spec.subjects {
        let seed = subject_seed(config.master_seed, &subject.subject_id);
        let (recording, truth) =
            generate_recording(subject, spec.start_date, config.days, seed)
                .map_err(|e| CliError::Config(e.to_string()))?;
        write_recording(
            &recording,
            &signal_path(&config.data_dir, &subject.subject_id),
            &annotation_path(&config.data_dir, &subject.subject_id),
        )
        .map_err(CliError::data)?;
        write_ground_truth(
            &ground_truth_path(&config.data_dir, &subject.subject_id),
            &truth,
        )
        .map_err(CliError::data)?;
        println!(
            "synth: {} ({} days, {} samples, {} annotations)",
            subject.subject_id,
            config.days,
            recording.samples.len(),
            recording.annotations.len()
        );
    }
    println!(
        "synth: wrote {} recordings to {}",
        spec.subjects.len(),
        config.data_dir.display()
    );
    Ok(())
}
