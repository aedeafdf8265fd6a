//! Behavioral predispositions: per-segment annotation histograms and their
//! grouping into BPDs.
//!
//! A BPD is a set of time segments whose annotation mixes are similar. Two
//! strategies produce one: k-means clustering of the histograms (Euclidean
//! distance on the raw probability vectors) or a plain time-of-day
//! partition that ignores the annotations entirely.

pub mod kmeans;

use std::collections::{BTreeMap, HashMap};

use chrono::NaiveDate;

use crate::dataset::{
    AnnotationRecord, SegmentId, TimeSegment, DAY_MINUTES, DAY_START_MINUTE, N_LABELS,
    SLOT_MINUTES,
};
use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// The normalized annotation mix of one time segment.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationHistogram {
    pub segment: SegmentId,
    /// Relative label frequencies in canonical order; sums to 1.
    pub probs: [f64; N_LABELS],
    /// Number of annotations counted.
    pub count: usize,
}

/// How segments were grouped into BPDs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BpdStrategy {
    Kmeans,
    TimeBased,
}

impl BpdStrategy {
    pub fn name(self) -> &'static str {
        match self {
            BpdStrategy::Kmeans => "kmeans",
            BpdStrategy::TimeBased => "time_based",
        }
    }

    pub fn from_name(name: &str) -> Result<BpdStrategy> {
        match name {
            "kmeans" => Ok(BpdStrategy::Kmeans),
            "time_based" => Ok(BpdStrategy::TimeBased),
            other => Err(Error::InvalidArgument(format!(
                "unknown BPD strategy {other:?}"
            ))),
        }
    }
}

/// The mapping from time segments to BPD labels `d` in `[0, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BpdModel {
    pub strategy: BpdStrategy,
    pub k: usize,
    /// Cluster centroids, k-means only; row `d` is the annotation
    /// distribution characterizing BPD `d`.
    pub centroids: Option<Vec<[f64; N_LABELS]>>,
    pub assignment: BTreeMap<SegmentId, usize>,
}

/// Windows annotated with their oracle BPD label.
#[derive(Debug, Clone)]
pub struct LabeledWindows {
    pub windows: Vec<(FeatureVector, usize)>,
    /// Windows whose segment has no BPD assignment.
    pub dropped: usize,
}

/// Builds one histogram per segment that contains at least one annotation;
/// empty segments are omitted.
pub fn build_histograms(
    segments: &[TimeSegment],
    annotations: &[AnnotationRecord],
) -> Vec<AnnotationHistogram> {
    let by_slot: HashMap<(NaiveDate, u32), usize> = annotations
        .iter()
        .map(|a| ((a.day, a.start_minute), a.label.index()))
        .collect();
    let mut histograms = Vec::new();
    for segment in segments {
        let mut counts = [0usize; N_LABELS];
        let mut total = 0usize;
        for &slot in &segment.slots {
            if let Some(&label) = by_slot.get(&(segment.day, slot)) {
                counts[label] += 1;
                total += 1;
            }
        }
        if total == 0 {
            continue;
        }
        let mut probs = [0.0; N_LABELS];
        for i in 0..N_LABELS {
            probs[i] = counts[i] as f64 / total as f64;
        }
        histograms.push(AnnotationHistogram {
            segment: segment.id,
            probs,
            count: total,
        });
    }
    histograms
}

/// Clusters histograms into `k` BPDs with seeded multi-restart k-means.
pub fn kmeans_cluster(
    histograms: &[AnnotationHistogram],
    k: usize,
    seed: u64,
) -> Result<BpdModel> {
    let points: Vec<[f64; N_LABELS]> = histograms.iter().map(|h| h.probs).collect();
    let outcome = kmeans::run_kmeans(&points, k, seed)?;
    let assignment = histograms
        .iter()
        .zip(&outcome.assignment)
        .map(|(h, &d)| (h.segment, d))
        .collect();
    Ok(BpdModel {
        strategy: BpdStrategy::Kmeans,
        k,
        centroids: Some(outcome.centroids),
        assignment,
    })
}

/// The time-of-day part index of `start_minute` when the 600-minute day is
/// split into `k` equal parts, the last absorbing any remainder.
pub fn time_part_of_minute(start_minute: u32, k: usize) -> usize {
    let part_minutes = DAY_MINUTES / k as u32;
    let offset = start_minute.saturating_sub(DAY_START_MINUTE);
    ((offset / part_minutes) as usize).min(k - 1)
}

/// Assigns every segment to a BPD purely by its time of day, identically
/// across days.
pub fn time_based_assign(segments: &[TimeSegment], k: usize) -> Result<BpdModel> {
    let max_k = (DAY_MINUTES / SLOT_MINUTES) as usize;
    if k == 0 || k > max_k {
        return Err(Error::InvalidArgument(format!(
            "time-based k = {k} outside 1..={max_k}"
        )));
    }
    let assignment = segments
        .iter()
        .map(|s| (s.id, time_part_of_minute(s.start_minute, k)))
        .collect();
    Ok(BpdModel {
        strategy: BpdStrategy::TimeBased,
        k,
        centroids: None,
        assignment,
    })
}

/// Attaches the oracle BPD label to each window; windows in segments the
/// model does not cover are dropped and counted.
pub fn label_windows(model: &BpdModel, features: &[FeatureVector]) -> LabeledWindows {
    let mut windows = Vec::with_capacity(features.len());
    let mut dropped = 0usize;
    for f in features {
        match model.assignment.get(&f.segment) {
            Some(&d) => windows.push((f.clone(), d)),
            None => dropped += 1,
        }
    }
    LabeledWindows { windows, dropped }
}

/// Adjusted Rand index between two cluster labelings of the same items.
///
/// 1.0 means identical partitions up to relabeling, 0.0 is the chance
/// level. Both inputs must have the same length.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "partitions must label the same items");
    let n = a.len();
    if n == 0 {
        return 1.0;
    }
    let mut contingency: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *contingency.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let choose2 = |v: u64| (v * v.saturating_sub(1)) as f64 / 2.0;
    let sum_cells: f64 = contingency.values().map(|&v| choose2(v)).sum();
    let sum_rows: f64 = rows.values().map(|&v| choose2(v)).sum();
    let sum_cols: f64 = cols.values().map(|&v| choose2(v)).sum();
    let total = choose2(n as u64);
    let expected = sum_rows * sum_cols / total;
    let max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index - expected).abs() < 1e-12 {
        // Both partitions are trivial; identical by construction.
        return 1.0;
    }
    (sum_cells - expected) / (max_index - expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::synth::{generate_labels, one_hot, RegimeSpec, ScheduleEntry, SubjectSpec};
    use crate::dataset::{segment_day, AnnotationLabel, Recording, DAY_END_MINUTE};

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn segment(id: u32, day: NaiveDate, start: u32, end: u32) -> TimeSegment {
        TimeSegment {
            id: SegmentId(id),
            day,
            start_minute: start,
            end_minute: end,
            slots: (start..end).step_by(SLOT_MINUTES as usize).collect(),
        }
    }

    #[test]
    fn histogram_is_the_relative_frequency() {
        use AnnotationLabel::*;
        let day = date("2023-01-02");
        let labels = [Apathy, Apathy, Apathy, Pacing, Pacing, Normal];
        let annotations: Vec<AnnotationRecord> = labels
            .iter()
            .enumerate()
            .map(|(i, &label)| AnnotationRecord {
                day,
                start_minute: 480 + i as u32 * 5,
                label,
            })
            .collect();
        let segments = vec![segment(0, day, 480, 510)];
        let histograms = build_histograms(&segments, &annotations);
        assert_eq!(histograms.len(), 1);
        let h = &histograms[0];
        assert_eq!(h.count, 6);
        assert!((h.probs[0] - 0.5).abs() < 1e-15);
        assert!((h.probs[3] - 1.0 / 3.0).abs() < 1e-15);
        assert!((h.probs[6] - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(h.probs[1] + h.probs[2] + h.probs[4] + h.probs[5], 0.0);
    }

    #[test]
    fn single_annotation_is_one_hot_and_empty_segments_are_omitted() {
        let day = date("2023-01-02");
        let annotations = vec![AnnotationRecord {
            day,
            start_minute: 480,
            label: AnnotationLabel::Pacing,
        }];
        let segments = vec![segment(0, day, 480, 485), segment(1, day, 485, 490)];
        let histograms = build_histograms(&segments, &annotations);
        assert_eq!(histograms.len(), 1);
        assert_eq!(histograms[0].segment, SegmentId(0));
        assert_eq!(histograms[0].probs[3], 1.0);
        assert_eq!(histograms[0].count, 1);
    }

    #[test]
    fn time_based_parts() {
        let day = date("2023-01-02");
        let segments: Vec<TimeSegment> = (0..20)
            .map(|i| segment(i, day, 480 + i * 30, 510 + i * 30))
            .collect();

        let k1 = time_based_assign(&segments, 1).unwrap();
        assert!(k1.assignment.values().all(|&d| d == 0));

        let k20 = time_based_assign(&segments, 20).unwrap();
        assert_eq!(k20.assignment[&SegmentId(0)], 0); // 8:00
        assert_eq!(k20.assignment[&SegmentId(19)], 19); // 17:30

        // k = 7: six 85-minute parts plus a final 90-minute part.
        assert_eq!(time_part_of_minute(480 + 84, 7), 0);
        assert_eq!(time_part_of_minute(480 + 85, 7), 1);
        assert_eq!(time_part_of_minute(1075, 7), 6);

        assert!(time_based_assign(&segments, 0).is_err());
        assert!(time_based_assign(&segments, 121).is_err());
    }

    #[test]
    fn label_windows_attaches_and_drops() {
        let day = date("2023-01-02");
        let segments = vec![segment(0, day, 480, 510)];
        let model = time_based_assign(&segments, 1).unwrap();
        let make = |seg: u32| FeatureVector {
            values: [0.0; crate::features::FEATURE_LEN],
            window_start_ms: 0,
            label: AnnotationLabel::Apathy,
            segment: SegmentId(seg),
        };
        let features = vec![make(0), make(0), make(5)];
        let labeled = label_windows(&model, &features);
        assert_eq!(labeled.windows.len(), 2);
        assert!(labeled.windows.iter().all(|(_, d)| *d == 0));
        assert_eq!(labeled.dropped, 1);
    }

    #[test]
    fn shuffling_input_changes_labels_only_up_to_relabeling() {
        let mut rng = crate::seeding::rng(17);
        use rand::Rng;
        let histograms: Vec<AnnotationHistogram> = (0..24)
            .map(|i| {
                let mut probs = [0.0; N_LABELS];
                let hot = if i < 8 { 0 } else if i < 16 { 3 } else { 6 };
                probs[hot] = 0.8 + 0.2 * rng.random::<f64>();
                let rest = (1.0 - probs[hot]) / 6.0;
                for (j, p) in probs.iter_mut().enumerate() {
                    if j != hot {
                        *p = rest;
                    }
                }
                AnnotationHistogram {
                    segment: SegmentId(i as u32),
                    probs,
                    count: 10,
                }
            })
            .collect();
        let model_a = kmeans_cluster(&histograms, 3, 5).unwrap();
        let mut shuffled = histograms.clone();
        shuffled.reverse();
        let model_b = kmeans_cluster(&shuffled, 3, 5).unwrap();
        // Same partition of segment ids up to relabeling: compare via ARI.
        let order: Vec<SegmentId> = histograms.iter().map(|h| h.segment).collect();
        let a: Vec<usize> = order.iter().map(|s| model_a.assignment[s]).collect();
        let b: Vec<usize> = order.iter().map(|s| model_b.assignment[s]).collect();
        assert_eq!(adjusted_rand_index(&a, &b), 1.0);
    }

    #[test]
    fn recovers_well_separated_regimes_exactly() {
        use AnnotationLabel::*;
        let spec = SubjectSpec {
            subject_id: "t".into(),
            regimes: [Apathy, Pacing, Normal, Mannerisms]
                .iter()
                .enumerate()
                .map(|(i, &label)| RegimeSpec {
                    regime_id: i,
                    behavior_distribution: one_hot(label),
                    dirichlet_concentration: 1.0,
                })
                .collect(),
            daily_schedule: (0..4)
                .map(|i| ScheduleEntry {
                    start_minute: DAY_START_MINUTE + i * 150,
                    end_minute: DAY_START_MINUTE + (i + 1) * 150,
                    regime_id: i as usize,
                })
                .collect(),
        };
        let (annotations, truth) = generate_labels(&spec, date("2023-01-02"), 5, 1).unwrap();
        let recording = Recording::new("t", 50.0, vec![], annotations).unwrap();
        let segments = segment_day(&recording, 30).unwrap();
        let histograms = build_histograms(&segments, &recording.annotations);
        let model = kmeans_cluster(&histograms, 4, 9).unwrap();

        // Ground-truth regime per segment (segments never straddle regimes
        // here because 150 is a multiple of 30).
        let truth_by_slot: HashMap<(NaiveDate, u32), usize> = truth
            .iter()
            .map(|t| ((t.day, t.start_minute), t.regime_id))
            .collect();
        let mut predicted = Vec::new();
        let mut actual = Vec::new();
        for s in &segments {
            predicted.push(model.assignment[&s.id]);
            actual.push(truth_by_slot[&(s.day, s.start_minute)]);
        }
        assert_eq!(adjusted_rand_index(&predicted, &actual), 1.0);
        assert_eq!(segments.len(), 100);
        assert_eq!(DAY_END_MINUTE, 1080);
    }

    #[test]
    fn ari_reference_values() {
        assert_eq!(adjusted_rand_index(&[0, 0, 1, 1], &[1, 1, 0, 0]), 1.0);
        assert_eq!(adjusted_rand_index(&[0, 0, 0, 0], &[0, 0, 0, 0]), 1.0);
        let ari = adjusted_rand_index(&[0, 0, 1, 1], &[0, 1, 0, 1]);
        assert!(ari < 0.01, "independent partitions: {ari}");
    }
}
