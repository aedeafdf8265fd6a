//! `bpd cluster`: build and export the BPD model of each subject.
//!
//! Uses the same clustering seed derivation as the experiment runner, so
//! the exported model is exactly the one a grid cell with these levels
//! would use.

use std::fmt::Write as _;

use bpd_core::bpd::{build_histograms, kmeans_cluster, time_based_assign, BpdStrategy};
use bpd_core::dataset::io::load_annotations;
use bpd_core::dataset::{segment_day, Recording};
use bpd_core::seeding;

use crate::commands::{annotation_path, ensure_dir};
use crate::config::RunConfig;
use crate::CliError;

pub fn cmd_cluster(config: &RunConfig) -> Result<(), CliError> {
    config.validate()?;
    ensure_dir(&config.out_dir)?;
    for subject in &config.subjects {
        let annotations =
            load_annotations(&annotation_path(&config.data_dir, subject)).map_err(CliError::data)?;
        let recording = Recording::new(subject.clone(), config.sample_rate, vec![], annotations)
            .map_err(CliError::data)?;
        let segments = segment_day(&recording, config.cluster_segment_min)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let histograms = build_histograms(&segments, &recording.annotations);
        let model = match config.cluster_strategy {
            BpdStrategy::Kmeans => {
                let seed = seeding::derive(
                    config.master_seed,
                    &[
                        seeding::fnv1a("cluster"),
                        seeding::fnv1a(subject),
                        0,
                        config.cluster_k as u64,
                        u64::from(config.cluster_segment_min),
                    ],
                );
                kmeans_cluster(&histograms, config.cluster_k, seed).map_err(CliError::data)?
            }
            BpdStrategy::TimeBased => {
                time_based_assign(&segments, config.cluster_k).map_err(CliError::data)?
            }
        };

        let mut out = String::from("segment_id,date,start_minute,bpd\n");
        for segment in &segments {
            if let Some(&d) = model.assignment.get(&segment.id) {
                let _ = writeln!(
                    out,
                    "{},{},{},{d}",
                    segment.id,
                    segment.day.format("%Y-%m-%d"),
                    segment.start_minute
                );
            }
        }
        let path = config.out_dir.join(format!("{subject}_bpd.csv"));
        std::fs::write(&path, out)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;

        if let Some(centroids) = &model.centroids {
            let mut out = String::from("bpd,p0,p1,p2,p3,p4,p5,p6\n");
            for (d, centroid) in centroids.iter().enumerate() {
                let _ = write!(out, "{d}");
                for p in centroid {
                    let _ = write!(out, ",{p}");
                }
                out.push('\n');
            }
            let path = config.out_dir.join(format!("{subject}_centroids.csv"));
            std::fs::write(&path, out)
                .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
        }
        println!(
            "cluster: {subject} -> {} segments, {} BPDs ({})",
            model.assignment.len(),
            model.k,
            model.strategy.name()
        );
    }
    Ok(())
}
