//! Flat key=value run configuration.
//!
//! One documented key per line, `#` comments, flags override file values.
//! The effective configuration is copied into the output directory of every
//! run, so an experiment's provenance is a single diff-able file.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `data_dir` | `data` | recording CSVs live here |
//! | `out_dir` | `out` | all outputs land here |
//! | `subjects` | the 8 built-in subjects | comma-separated ids |
//! | `strategies` | `kmeans,time_based` | BPD strategies to run |
//! | `ks` | `1-20` | cluster counts; comma list, `a-b` ranges allowed |
//! | `segment_lengths` | `5,10,15,30,60,120` | histogram segment minutes (k-means only) |
//! | `classifiers` | `majority,naive_bayes,svm` | classifier kinds |
//! | `repetitions` | `10` | evaluations per grid cell |
//! | `train_fraction` | `0.7` | train share of the window split |
//! | `master_seed` | `42` | root of all derived seeds |
//! | `window_seconds` | `60` | feature window length |
//! | `overlap` | `0.5` | window overlap fraction |
//! | `sample_rate` | `50` | nominal signal rate (Hz) |
//! | `days` | `6` | days per subject for `synth` |
//! | `synthesis_spec` | built-in 8-subject spec | path to a JSON spec |
//! | `featurize_segment_min` | `30` | segment length for `featurize` export |
//! | `cluster_strategy` | `kmeans` | strategy for the `cluster` command |
//! | `cluster_k` | `4` | k for the `cluster` command |
//! | `cluster_segment_min` | `30` | segment length for the `cluster` command |
//! | `heatmap_cell` | best mean-F1 cell | `strategy:k:segment:classifier` for the report heat map |
//! | `jobs` | `0` | worker threads, 0 = all cores |

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bpd_core::bpd::BpdStrategy;
use bpd_core::classifiers::ClassifierKind;
use bpd_core::dataset::synth::SynthesisSpec;
use bpd_core::experiments::ExperimentGrid;
use bpd_core::features::WindowSpec;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data_dir: PathBuf,
    pub out_dir: PathBuf,
    pub subjects: Vec<String>,
    pub strategies: Vec<BpdStrategy>,
    pub ks: Vec<usize>,
    pub segment_lengths: Vec<u32>,
    pub classifiers: Vec<ClassifierKind>,
    pub repetitions: u32,
    pub train_fraction: f64,
    pub master_seed: u64,
    pub window_seconds: u32,
    pub overlap: f64,
    pub sample_rate: f64,
    pub days: u32,
    pub synthesis_spec: Option<PathBuf>,
    pub featurize_segment_min: u32,
    pub cluster_strategy: BpdStrategy,
    pub cluster_k: usize,
    pub cluster_segment_min: u32,
    pub heatmap_cell: Option<String>,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data_dir: PathBuf::from("data"),
            out_dir: PathBuf::from("out"),
            subjects: SynthesisSpec::default_eight_subjects()
                .subjects
                .iter()
                .map(|s| s.subject_id.clone())
                .collect(),
            strategies: vec![BpdStrategy::Kmeans, BpdStrategy::TimeBased],
            ks: (1..=20).collect(),
            segment_lengths: vec![5, 10, 15, 30, 60, 120],
            classifiers: ClassifierKind::ALL.to_vec(),
            repetitions: 10,
            train_fraction: 0.7,
            master_seed: 42,
            window_seconds: 60,
            overlap: 0.5,
            sample_rate: 50.0,
            days: 6,
            synthesis_spec: None,
            featurize_segment_min: 30,
            cluster_strategy: BpdStrategy::Kmeans,
            cluster_k: 4,
            cluster_segment_min: 30,
            heatmap_cell: None,
            jobs: 0,
        }
    }
}

fn config_err(message: impl Into<String>) -> CliError {
    CliError::Config(message.into())
}

fn parse_list<T, F>(value: &str, what: &str, parse: F) -> Result<Vec<T>, CliError>
where
    F: Fn(&str) -> Result<T, CliError>,
{
    let items: Vec<T> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(&parse)
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(config_err(format!("{what} must not be empty")));
    }
    Ok(items)
}

/// Parses `1-20` ranges and plain integers into a sorted, deduplicated list.
fn parse_ks(value: &str) -> Result<Vec<usize>, CliError> {
    let mut ks = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = item.split_once('-') {
            let lo: usize = a
                .trim()
                .parse()
                .map_err(|_| config_err(format!("bad k range start {a:?}")))?;
            let hi: usize = b
                .trim()
                .parse()
                .map_err(|_| config_err(format!("bad k range end {b:?}")))?;
            if lo == 0 || hi < lo {
                return Err(config_err(format!("bad k range {item:?}")));
            }
            ks.extend(lo..=hi);
        } else {
            let k: usize = item
                .parse()
                .map_err(|_| config_err(format!("bad k {item:?}")))?;
            ks.push(k);
        }
    }
    if ks.is_empty() {
        return Err(config_err("ks must not be empty"));
    }
    ks.sort_unstable();
    ks.dedup();
    Ok(ks)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        let mut config = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {}: expected key = value", i + 1)))?;
            config.set(key.trim(), value.trim())
                .map_err(|e| config_err(format!("line {}: {e}", i + 1)))?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let uint = |v: &str, what: &str| -> Result<u64, CliError> {
            v.parse()
                .map_err(|_| config_err(format!("bad {what} {v:?}")))
        };
        let real = |v: &str, what: &str| -> Result<f64, CliError> {
            v.parse()
                .map_err(|_| config_err(format!("bad {what} {v:?}")))
        };
        match key {
            "data_dir" => self.data_dir = PathBuf::from(value),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "subjects" => {
                self.subjects = parse_list(value, "subjects", |s| Ok(s.to_owned()))?;
            }
            "strategies" => {
                self.strategies = parse_list(value, "strategies", |s| {
                    BpdStrategy::from_name(s).map_err(|e| config_err(e.to_string()))
                })?;
            }
            "ks" => self.ks = parse_ks(value)?,
            "segment_lengths" => {
                self.segment_lengths = parse_list(value, "segment_lengths", |s| {
                    uint(s, "segment length").map(|v| v as u32)
                })?;
            }
            "classifiers" => {
                self.classifiers = parse_list(value, "classifiers", |s| {
                    ClassifierKind::from_name(s).map_err(|e| config_err(e.to_string()))
                })?;
            }
            "repetitions" => self.repetitions = uint(value, "repetitions")? as u32,
            "train_fraction" => self.train_fraction = real(value, "train_fraction")?,
            "master_seed" => self.master_seed = uint(value, "master_seed")?,
            "window_seconds" => self.window_seconds = uint(value, "window_seconds")? as u32,
            "overlap" => self.overlap = real(value, "overlap")?,
            "sample_rate" => self.sample_rate = real(value, "sample_rate")?,
            "days" => self.days = uint(value, "days")? as u32,
            "synthesis_spec" => self.synthesis_spec = Some(PathBuf::from(value)),
            "featurize_segment_min" => {
                self.featurize_segment_min = uint(value, "featurize_segment_min")? as u32;
            }
            "cluster_strategy" => {
                self.cluster_strategy =
                    BpdStrategy::from_name(value).map_err(|e| config_err(e.to_string()))?;
            }
            "cluster_k" => self.cluster_k = uint(value, "cluster_k")? as usize,
            "cluster_segment_min" => {
                self.cluster_segment_min = uint(value, "cluster_segment_min")? as u32;
            }
            "heatmap_cell" => self.heatmap_cell = Some(value.to_owned()),
            "jobs" => self.jobs = uint(value, "jobs")? as usize,
            other => return Err(config_err(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// The experiment grid this configuration describes.
    pub fn grid(&self) -> ExperimentGrid {
        ExperimentGrid {
            strategies: self.strategies.clone(),
            ks: self.ks.clone(),
            segment_lengths_min: self.segment_lengths.clone(),
            classifier_kinds: self.classifiers.clone(),
            subjects: self.subjects.clone(),
            repetitions: self.repetitions,
            train_fraction: self.train_fraction,
            master_seed: self.master_seed,
        }
    }

    pub fn window_spec(&self) -> WindowSpec {
        WindowSpec {
            window_seconds: self.window_seconds,
            overlap_fraction: self.overlap,
        }
    }

    /// Re-validates every invariant the pipeline relies on. Called by each
    /// command before any work.
    pub fn validate(&self) -> Result<(), CliError> {
        self.grid()
            .validate()
            .map_err(|e| config_err(e.to_string()))?;
        self.window_spec()
            .stride_seconds()
            .map_err(|e| config_err(e.to_string()))?;
        if !self.sample_rate.is_finite() || self.sample_rate <= 0.0 {
            return Err(config_err("sample_rate must be positive"));
        }
        if self.days == 0 {
            return Err(config_err("days must be at least 1"));
        }
        if let Some(path) = &self.synthesis_spec {
            if !path.exists() {
                return Err(config_err(format!(
                    "synthesis_spec {} does not exist",
                    path.display()
                )));
            }
        }
        Ok(())
    }

    /// The effective configuration as a key=value file, written into the
    /// output directory for provenance.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let join_u32 = |v: &[u32]| {
            v.iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        let _ = writeln!(out, "data_dir = {}", self.data_dir.display());
        let _ = writeln!(out, "out_dir = {}", self.out_dir.display());
        let _ = writeln!(out, "subjects = {}", self.subjects.join(","));
        let _ = writeln!(
            out,
            "strategies = {}",
            self.strategies
                .iter()
                .map(|s| s.name())
                .collect::<Vec<_>>()
                .join(",")
        );
        let _ = writeln!(
            out,
            "ks = {}",
            self.ks
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(",")
        );
        let _ = writeln!(out, "segment_lengths = {}", join_u32(&self.segment_lengths));
        let _ = writeln!(
            out,
            "classifiers = {}",
            self.classifiers
                .iter()
                .map(|c| c.name())
                .collect::<Vec<_>>()
                .join(",")
        );
        let _ = writeln!(out, "repetitions = {}", self.repetitions);
        let _ = writeln!(out, "train_fraction = {}", self.train_fraction);
        let _ = writeln!(out, "master_seed = {}", self.master_seed);
        let _ = writeln!(out, "window_seconds = {}", self.window_seconds);
        let _ = writeln!(out, "overlap = {}", self.overlap);
        let _ = writeln!(out, "sample_rate = {}", self.sample_rate);
        let _ = writeln!(out, "days = {}", self.days);
        if let Some(path) = &self.synthesis_spec {
            let _ = writeln!(out, "synthesis_spec = {}", path.display());
        }
        let _ = writeln!(out, "featurize_segment_min = {}", self.featurize_segment_min);
        let _ = writeln!(out, "cluster_strategy = {}", self.cluster_strategy.name());
        let _ = writeln!(out, "cluster_k = {}", self.cluster_k);
        let _ = writeln!(out, "cluster_segment_min = {}", self.cluster_segment_min);
        if let Some(cell) = &self.heatmap_cell {
            let _ = writeln!(out, "heatmap_cell = {cell}");
        }
        let _ = writeln!(out, "jobs = {}", self.jobs);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_render_and_parse() {
        let config = RunConfig::default();
        let parsed = RunConfig::parse(&config.render()).unwrap();
        assert_eq!(parsed, config);
    }

    #[test]
    fn ranges_and_lists_parse() {
        let config = RunConfig::parse("ks = 1-3,10\nsubjects = a, b\n").unwrap();
        assert_eq!(config.ks, vec![1, 2, 3, 10]);
        assert_eq!(config.subjects, vec!["a", "b"]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::parse("no_such_key = 1\n").unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let config = RunConfig::parse("# comment\n\nmaster_seed = 7\n").unwrap();
        assert_eq!(config.master_seed, 7);
    }
}
