//! The factorial experiment: strategy x k x segment length x classifier x
//! subject x repetition, scored by macro F1.
//!
//! Per subject the runner featurizes the recording once, builds the BPD
//! model on the full data (the oracle-BPD assumption: the evaluation asks
//! what the classifiers gain when the true cluster of every segment is
//! known), then per repetition splits the windows 70/30 at window level,
//! trains one classifier bank on the training side and scores the test
//! side with the oracle BPD labels.
//!
//! Seed derivation per stage (see [`crate::seeding`]):
//!
//! * clustering: `derive(master, [fnv("cluster"), fnv(subject), strategy, k, segment_min])`
//! * splitting:  `derive(master, [fnv("split"), fnv(subject), rep])`
//! * training:   `derive(master, [fnv("train"), fnv(subject), rep, classifier])`
//!
//! The split and train seeds deliberately exclude the strategy, k and
//! segment length, so rows that degenerate to the same global classifier
//! (both strategies at k = 1) are bit-identical under shared repetition
//! seeds. Cells are pure functions of `(data, factor tuple, master seed)`
//! and may run in parallel; rows are sorted into canonical factor order
//! before writing, so the output never depends on scheduling.

pub mod metrics;
pub mod split;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::bpd::{
    build_histograms, kmeans_cluster, label_windows, time_based_assign, BpdModel, BpdStrategy,
};
use crate::classifiers::{predict_bank, train_bank, ClassifierKind, MajorityModel};
use crate::dataset::{segment_day, AnnotationLabel, Recording, N_LABELS, SLOT_MINUTES};
use crate::error::{Error, Result};
use crate::features::{bind_segments, compute_window_features, FeatureVector, WindowSpec};
use crate::seeding;

pub use metrics::{confusion_matrix, f1_macro, ConfusionMatrix, F1Scores};
pub use split::split_train_test;

/// Factor levels of the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub strategies: Vec<BpdStrategy>,
    pub ks: Vec<usize>,
    /// Histogram segment lengths in minutes; k-means only.
    pub segment_lengths_min: Vec<u32>,
    pub classifier_kinds: Vec<ClassifierKind>,
    pub subjects: Vec<String>,
    pub repetitions: u32,
    pub train_fraction: f64,
    pub master_seed: u64,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        ExperimentGrid {
            strategies: vec![BpdStrategy::Kmeans, BpdStrategy::TimeBased],
            ks: (1..=20).collect(),
            segment_lengths_min: vec![5, 10, 15, 30, 60, 120],
            classifier_kinds: ClassifierKind::ALL.to_vec(),
            subjects: Vec::new(),
            repetitions: 10,
            train_fraction: 0.7,
            master_seed: 42,
        }
    }
}

impl ExperimentGrid {
    pub fn validate(&self) -> Result<()> {
        if self.subjects.is_empty() {
            return Err(Error::InvalidArgument("no subjects in the grid".into()));
        }
        if self.strategies.is_empty() || self.ks.is_empty() || self.classifier_kinds.is_empty() {
            return Err(Error::InvalidArgument(
                "strategies, ks and classifiers must be non-empty".into(),
            ));
        }
        if self.strategies.contains(&BpdStrategy::Kmeans) && self.segment_lengths_min.is_empty() {
            return Err(Error::InvalidArgument(
                "k-means strategy needs at least one segment length".into(),
            ));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument("repetitions must be >= 1".into()));
        }
        if !(self.train_fraction.is_finite() && self.train_fraction > 0.0 && self.train_fraction < 1.0)
        {
            return Err(Error::InvalidArgument(format!(
                "train fraction {} outside (0, 1)",
                self.train_fraction
            )));
        }
        if self.ks.contains(&0) {
            return Err(Error::InvalidArgument("k = 0 is not a valid level".into()));
        }
        for &len in &self.segment_lengths_min {
            if len == 0 || len % SLOT_MINUTES != 0 || 600 % len != 0 {
                return Err(Error::InvalidArgument(format!(
                    "segment length {len} must be a multiple of 5 dividing 600"
                )));
            }
        }
        Ok(())
    }

    /// Number of result rows the grid produces.
    pub fn row_count(&self) -> usize {
        let per_classifier_subject: usize = self
            .strategies
            .iter()
            .map(|s| match s {
                BpdStrategy::Kmeans => self.ks.len() * self.segment_lengths_min.len(),
                BpdStrategy::TimeBased => self.ks.len(),
            })
            .sum();
        per_classifier_subject
            * self.classifier_kinds.len()
            * self.subjects.len()
            * self.repetitions as usize
    }
}

/// One row of the factorial design.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub strategy: BpdStrategy,
    pub k: usize,
    /// 0 for time-based rows (no histogram segment length applies).
    pub segment_min: u32,
    pub classifier: ClassifierKind,
    pub subject: String,
    pub rep: u32,
    pub f1_macro: f64,
    pub per_class_f1: [f64; N_LABELS],
    pub confusion: ConfusionMatrix,
    pub n_train: usize,
    pub n_test: usize,
    /// Test windows whose BPD had no classifier (all its windows landed in
    /// the test split); scored by the global modal fallback.
    pub n_fallback: usize,
}

impl ExperimentResult {
    fn sort_key(&self) -> (BpdStrategy, usize, u32, ClassifierKind, String, u32) {
        (
            self.strategy,
            self.k,
            self.segment_min,
            self.classifier,
            self.subject.clone(),
            self.rep,
        )
    }
}

/// Supplies recordings one subject at a time, so the runner never holds
/// more than one signal in memory.
pub trait SubjectData: Sync {
    /// Cheap availability check, used to fail before any work starts.
    fn contains(&self, subject: &str) -> bool;
    fn load(&self, subject: &str) -> Result<Recording>;
}

/// In-memory data source for tests and small runs.
pub struct InMemoryData(pub BTreeMap<String, Recording>);

impl SubjectData for InMemoryData {
    fn contains(&self, subject: &str) -> bool {
        self.0.contains_key(subject)
    }

    fn load(&self, subject: &str) -> Result<Recording> {
        self.0
            .get(subject)
            .cloned()
            .ok_or_else(|| Error::InvalidArgument(format!("unknown subject {subject:?}")))
    }
}

/// Generates recordings on demand from a synthesis spec.
pub struct SynthSource {
    pub spec: crate::dataset::synth::SynthesisSpec,
    pub n_days: u32,
    pub seed: u64,
}

impl SubjectData for SynthSource {
    fn contains(&self, subject: &str) -> bool {
        self.spec.subjects.iter().any(|s| s.subject_id == subject)
    }

    fn load(&self, subject: &str) -> Result<Recording> {
        let spec = self
            .spec
            .subjects
            .iter()
            .find(|s| s.subject_id == subject)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown subject {subject:?}")))?;
        let subject_seed = seeding::derive(self.seed, &[seeding::fnv1a(subject)]);
        let (recording, _) =
            crate::dataset::synth::generate_recording(spec, self.spec.start_date, self.n_days, subject_seed)?;
        Ok(recording)
    }
}

/// Runs the whole grid and returns one row per factor-level combination and
/// repetition, in canonical order.
pub fn run_grid(
    grid: &ExperimentGrid,
    window: &WindowSpec,
    data: &dyn SubjectData,
) -> Result<Vec<ExperimentResult>> {
    grid.validate()?;
    window.stride_seconds()?;
    for subject in &grid.subjects {
        if !data.contains(subject) {
            return Err(Error::InvalidArgument(format!(
                "subject {subject:?} missing from the data source"
            )));
        }
    }

    let mut rows = Vec::with_capacity(grid.row_count());
    for subject in &grid.subjects {
        rows.extend(run_subject(grid, window, data, subject)?);
    }
    rows.sort_by_key(|r| r.sort_key());
    Ok(rows)
}

/// The per-(strategy, k, length, classifier) work unit.
struct Cell {
    strategy: BpdStrategy,
    k: usize,
    segment_min: u32,
    classifier: ClassifierKind,
    model: Arc<BpdModel>,
    windows: Arc<Vec<FeatureVector>>,
}

fn run_subject(
    grid: &ExperimentGrid,
    window: &WindowSpec,
    data: &dyn SubjectData,
    subject: &str,
) -> Result<Vec<ExperimentResult>> {
    let recording = data.load(subject)?;
    let (features, _gap_dropped) = compute_window_features(&recording, window)?;
    let annotations = recording.annotations.clone();

    // Segment lengths needed: the grid's lengths for k-means, the 5-minute
    // annotation grid for the time-based strategy (a BPD there depends only
    // on the time of day, so the finest tiling is the faithful one).
    let mut lengths: BTreeSet<u32> = BTreeSet::new();
    if grid.strategies.contains(&BpdStrategy::Kmeans) {
        lengths.extend(grid.segment_lengths_min.iter().copied());
    }
    if grid.strategies.contains(&BpdStrategy::TimeBased) {
        lengths.insert(SLOT_MINUTES);
    }

    struct PerLength {
        windows: Arc<Vec<FeatureVector>>,
        histograms: Vec<crate::bpd::AnnotationHistogram>,
        segments: Vec<crate::dataset::TimeSegment>,
    }
    let mut per_length: BTreeMap<u32, PerLength> = BTreeMap::new();
    for &len in &lengths {
        let segments = segment_day(&recording, len)?;
        let windows = Arc::new(bind_segments(&features, &segments));
        let histograms = build_histograms(&segments, &annotations);
        per_length.insert(
            len,
            PerLength {
                windows,
                histograms,
                segments,
            },
        );
    }
    drop(recording);

    let cluster_tag = seeding::fnv1a("cluster");
    let subject_tag = seeding::fnv1a(subject);
    let mut cells = Vec::new();
    for &strategy in &grid.strategies {
        match strategy {
            BpdStrategy::Kmeans => {
                for &len in &grid.segment_lengths_min {
                    let entry = &per_length[&len];
                    for &k in &grid.ks {
                        let seed = seeding::derive(
                            grid.master_seed,
                            &[cluster_tag, subject_tag, 0, k as u64, u64::from(len)],
                        );
                        let model = Arc::new(kmeans_cluster(&entry.histograms, k, seed)?);
                        for &classifier in &grid.classifier_kinds {
                            cells.push(Cell {
                                strategy,
                                k,
                                segment_min: len,
                                classifier,
                                model: Arc::clone(&model),
                                windows: Arc::clone(&entry.windows),
                            });
                        }
                    }
                }
            }
            BpdStrategy::TimeBased => {
                let entry = &per_length[&SLOT_MINUTES];
                for &k in &grid.ks {
                    let model = Arc::new(time_based_assign(&entry.segments, k)?);
                    for &classifier in &grid.classifier_kinds {
                        cells.push(Cell {
                            strategy,
                            k,
                            segment_min: 0,
                            classifier,
                            model: Arc::clone(&model),
                            windows: Arc::clone(&entry.windows),
                        });
                    }
                }
            }
        }
    }

    let rows: Result<Vec<Vec<ExperimentResult>>> = cells
        .into_par_iter()
        .map(|cell| run_cell(grid, subject, &cell))
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

fn run_cell(grid: &ExperimentGrid, subject: &str, cell: &Cell) -> Result<Vec<ExperimentResult>> {
    let labeled = label_windows(&cell.model, &cell.windows);
    if labeled.windows.len() < 2 {
        return Err(Error::Validation(format!(
            "subject {subject}: fewer than 2 labeled windows in cell (k = {}, segment = {})",
            cell.k, cell.segment_min
        )));
    }
    let split_tag = seeding::fnv1a("split");
    let train_tag = seeding::fnv1a("train");
    let subject_tag = seeding::fnv1a(subject);
    let classifier_code = cell.classifier as u64;

    let mut rows = Vec::with_capacity(grid.repetitions as usize);
    for rep in 0..grid.repetitions {
        let split_seed = seeding::derive(
            grid.master_seed,
            &[split_tag, subject_tag, u64::from(rep)],
        );
        let (train, test) =
            split_train_test(&labeled.windows, grid.train_fraction, split_seed)?;
        let train_seed = seeding::derive(
            grid.master_seed,
            &[train_tag, subject_tag, u64::from(rep), classifier_code],
        );
        let bank = train_bank(cell.classifier, &train, train_seed)?;
        let fallback = MajorityModel::train(train.iter().map(|(f, _)| f.label)).predict();

        let mut n_fallback = 0usize;
        let pairs: Vec<(AnnotationLabel, AnnotationLabel)> = test
            .iter()
            .map(|(f, d)| {
                let predicted = match predict_bank(&bank, &f.values, *d) {
                    Ok(label) => label,
                    Err(Error::MissingBpd(_)) => {
                        n_fallback += 1;
                        fallback
                    }
                    Err(other) => return Err(other),
                };
                Ok((f.label, predicted))
            })
            .collect::<Result<_>>()?;
        let confusion = confusion_matrix(&pairs);
        let scores = f1_macro(&confusion);
        rows.push(ExperimentResult {
            strategy: cell.strategy,
            k: cell.k,
            segment_min: cell.segment_min,
            classifier: cell.classifier,
            subject: subject.to_owned(),
            rep,
            f1_macro: scores.macro_f1,
            per_class_f1: scores.per_class,
            confusion,
            n_train: train.len(),
            n_test: test.len(),
            n_fallback,
        });
    }
    Ok(rows)
}

/// A matched comparison point: time-based k against k-means at the segment
/// length closest to one k-th of the day (exactly `600 / k` minutes).
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedPoint {
    pub classifier: ClassifierKind,
    pub k: usize,
    pub segment_min: u32,
    pub f1_kmeans_mean: f64,
    pub f1_time_mean: f64,
    /// `f1_kmeans_mean - f1_time_mean`.
    pub delta: f64,
}

/// Pairs k-means and time-based rows at comparable BPD structures: every k
/// present in both strategies where `600 / k` is itself a k-means segment
/// length in the results. Means average repetitions within each subject
/// first, then subjects. Returns an empty list when either strategy is
/// absent.
pub fn matched_points(results: &[ExperimentResult]) -> Vec<MatchedPoint> {
    let kmeans_cells: BTreeSet<(usize, u32)> = results
        .iter()
        .filter(|r| r.strategy == BpdStrategy::Kmeans)
        .map(|r| (r.k, r.segment_min))
        .collect();
    let time_ks: BTreeSet<usize> = results
        .iter()
        .filter(|r| r.strategy == BpdStrategy::TimeBased)
        .map(|r| r.k)
        .collect();
    let classifiers: BTreeSet<ClassifierKind> = results.iter().map(|r| r.classifier).collect();

    let mut points = Vec::new();
    for classifier in classifiers {
        for &k in &time_ks {
            if 600 % k != 0 {
                continue;
            }
            let len = (600 / k) as u32;
            if !kmeans_cells.contains(&(k, len)) {
                continue;
            }
            let kmeans_mean = subject_mean(results, |r| {
                r.strategy == BpdStrategy::Kmeans
                    && r.k == k
                    && r.segment_min == len
                    && r.classifier == classifier
            });
            let time_mean = subject_mean(results, |r| {
                r.strategy == BpdStrategy::TimeBased && r.k == k && r.classifier == classifier
            });
            let (Some(f1_kmeans_mean), Some(f1_time_mean)) = (kmeans_mean, time_mean) else {
                continue;
            };
            points.push(MatchedPoint {
                classifier,
                k,
                segment_min: len,
                f1_kmeans_mean,
                f1_time_mean,
                delta: f1_kmeans_mean - f1_time_mean,
            });
        }
    }
    points.sort_by_key(|p| (p.classifier, p.k));
    points
}

/// Mean over subjects of the per-subject repetition means.
fn subject_mean(results: &[ExperimentResult], select: impl Fn(&ExperimentResult) -> bool) -> Option<f64> {
    let mut by_subject: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for r in results.iter().filter(|r| select(r)) {
        let entry = by_subject.entry(&r.subject).or_insert((0.0, 0));
        entry.0 += r.f1_macro;
        entry.1 += 1;
    }
    if by_subject.is_empty() {
        return None;
    }
    let total: f64 = by_subject.values().map(|(sum, n)| sum / *n as f64).sum();
    Some(total / by_subject.len() as f64)
}

/// Writes the results CSV:
/// `strategy,k,segment_min,classifier,subject,rep,f1_macro,f1_c0..f1_c6,n_train,n_test,n_fallback`.
pub fn write_results_csv(results: &[ExperimentResult], path: &Path) -> Result<()> {
    let mut out = String::from(
        "strategy,k,segment_min,classifier,subject,rep,f1_macro,f1_c0,f1_c1,f1_c2,f1_c3,f1_c4,f1_c5,f1_c6,n_train,n_test,n_fallback\n",
    );
    for r in results {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            r.strategy.name(),
            r.k,
            r.segment_min,
            r.classifier.name(),
            r.subject,
            r.rep,
            r.f1_macro
        );
        for f1 in &r.per_class_f1 {
            let _ = write!(out, ",{f1}");
        }
        let _ = writeln!(out, ",{},{},{}", r.n_train, r.n_test, r.n_fallback);
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Writes the confusion-matrix sidecar: one row per true label per result
/// row, keyed by the full factor tuple.
pub fn write_confusion_csv(results: &[ExperimentResult], path: &Path) -> Result<()> {
    let mut out = String::from(
        "strategy,k,segment_min,classifier,subject,rep,true_label,c0,c1,c2,c3,c4,c5,c6\n",
    );
    for r in results {
        for (i, row) in r.confusion.iter().enumerate() {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{}",
                r.strategy.name(),
                r.k,
                r.segment_min,
                r.classifier.name(),
                r.subject,
                r.rep,
                AnnotationLabel::ALL[i].name()
            );
            for count in row {
                let _ = write!(out, ",{count}");
            }
            out.push('\n');
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Writes the matched-point summary CSV:
/// `classifier,k,segment_min,f1_kmeans_mean,f1_time_mean,delta`.
pub fn write_matched_csv(points: &[MatchedPoint], path: &Path) -> Result<()> {
    let mut out = String::from("classifier,k,segment_min,f1_kmeans_mean,f1_time_mean,delta\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            p.classifier.name(),
            p.k,
            p.segment_min,
            p.f1_kmeans_mean,
            p.f1_time_mean,
            p.delta
        );
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
