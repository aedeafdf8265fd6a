//! Sliding-window feature extraction over the 3-axis acceleration stream.
//!
//! Each window yields a fixed 39-entry vector in this order:
//!
//! | index | feature |
//! |-------|---------|
//! | 0..10, 10..20, 20..30 | per axis (x, y, z): mean, standard deviation, minimum, maximum, median, interquartile range, skewness, kurtosis, root mean square, zero-crossing rate |
//! | 30..33 | Pearson correlations xy, xz, yz |
//! | 33..39 | per axis: dominant frequency (Hz), normalized spectral entropy |
//!
//! Details pinned down for reproducibility: standard deviation and the
//! higher moments use the population (1/n) normalization; quartiles
//! interpolate linearly between order statistics; skewness and kurtosis
//! (excess) are 0 for a constant window; the zero-crossing rate counts
//! strict sign changes of the mean-removed signal divided by `n - 1`;
//! correlations are 0 when either axis is constant; the spectrum is the DFT
//! of the mean-removed, Hann-windowed axis with the zero-signal convention
//! of [`spectrum`].

pub mod spectrum;

use chrono::NaiveDate;
use std::collections::HashMap;

use crate::dataset::{
    day_epoch_ms, AccelSample, AnnotationLabel, Recording, SegmentId, TimeSegment,
    DAY_END_MINUTE, DAY_START_MINUTE, SLOT_MINUTES,
};
use crate::error::{Error, Result};

/// Number of features per window.
pub const FEATURE_LEN: usize = 39;

/// Sliding-window geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub window_seconds: u32,
    /// In `[0, 1)`; the stride is `window_seconds * (1 - overlap_fraction)`.
    pub overlap_fraction: f64,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            window_seconds: 60,
            overlap_fraction: 0.5,
        }
    }
}

impl WindowSpec {
    /// The stride in whole seconds.
    pub fn stride_seconds(&self) -> Result<u32> {
        if self.window_seconds == 0 {
            return Err(Error::InvalidArgument("window length must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(Error::InvalidArgument(format!(
                "overlap fraction {} outside [0, 1)",
                self.overlap_fraction
            )));
        }
        let stride = self.window_seconds as f64 * (1.0 - self.overlap_fraction);
        if stride.fract().abs() > 1e-9 || stride < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "stride {stride} is not a positive whole number of seconds"
            )));
        }
        Ok(stride.round() as u32)
    }
}

/// One complete raw window: a contiguous run of samples.
#[derive(Debug, Clone, Copy)]
pub struct RawWindow<'a> {
    pub window_start_ms: i64,
    pub day: NaiveDate,
    pub samples: &'a [AccelSample],
}

/// A featurized, labeled window.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: [f64; FEATURE_LEN],
    pub window_start_ms: i64,
    pub label: AnnotationLabel,
    /// The [`TimeSegment`] containing the window's center.
    pub segment: SegmentId,
}

/// A featurized window before segment binding; carries the center slot so
/// segment ids for any segmentation can be attached later without touching
/// the raw signal again.
#[derive(Debug, Clone)]
pub struct WindowFeatures {
    pub values: [f64; FEATURE_LEN],
    pub window_start_ms: i64,
    pub day: NaiveDate,
    /// Start minute of the 5-minute slot containing the window center.
    pub center_slot_minute: u32,
    pub label: AnnotationLabel,
}

/// Cuts a recording into complete raw windows on the stride grid anchored at
/// 8:00 of each recorded day. Returns the windows and the number of grid
/// positions dropped because of sample gaps.
pub fn window_signal<'a>(
    recording: &'a Recording,
    spec: &WindowSpec,
) -> Result<(Vec<RawWindow<'a>>, usize)> {
    let stride_s = spec.stride_seconds()?;
    let window_ms = i64::from(spec.window_seconds) * 1000;
    let expected = (f64::from(spec.window_seconds) * recording.sample_rate_hz).round() as usize;
    if expected == 0 {
        return Err(Error::InvalidArgument(
            "window too short for the sample rate".into(),
        ));
    }
    let day_start_s = i64::from(DAY_START_MINUTE) * 60;
    let day_end_s = i64::from(DAY_END_MINUTE) * 60;

    let mut windows = Vec::new();
    let mut dropped = 0usize;
    for day in recording.recorded_days() {
        let epoch = day_epoch_ms(day);
        let lo = recording
            .samples
            .partition_point(|s| s.timestamp_ms < epoch);
        let hi = recording
            .samples
            .partition_point(|s| s.timestamp_ms < epoch + 86_400_000);
        let day_samples = &recording.samples[lo..hi];
        if day_samples.is_empty() {
            continue;
        }
        if i64::from(spec.window_seconds) > day_end_s - day_start_s {
            // The window cannot fit in the day at all.
            dropped += 1;
            continue;
        }
        let span_first = day_samples[0].timestamp_ms;
        let span_last = day_samples[day_samples.len() - 1].timestamp_ms;
        let mut start_s = day_start_s;
        while start_s + i64::from(spec.window_seconds) <= day_end_s {
            let t0 = epoch + start_s * 1000;
            let t1 = t0 + window_ms;
            start_s += i64::from(stride_s);
            // Ignore grid positions entirely outside the recorded span.
            if t1 <= span_first || t0 > span_last {
                continue;
            }
            let a = day_samples.partition_point(|s| s.timestamp_ms < t0);
            let b = day_samples.partition_point(|s| s.timestamp_ms < t1);
            if b - a == expected {
                windows.push(RawWindow {
                    window_start_ms: t0,
                    day,
                    samples: &day_samples[a..b],
                });
            } else {
                dropped += 1;
            }
        }
    }
    Ok((windows, dropped))
}

/// Extracts the 39-entry feature vector from one complete window.
pub fn extract_features(window: &RawWindow<'_>, rate_hz: f64) -> Result<[f64; FEATURE_LEN]> {
    let n = window.samples.len();
    let mut axes: [Vec<f64>; 3] = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    for (i, s) in window.samples.iter().enumerate() {
        for (axis, values) in axes.iter_mut().enumerate() {
            let v = s.axis(axis);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { axis, index: i });
            }
            values.push(v);
        }
    }

    let mut out = [0.0; FEATURE_LEN];
    for (axis, values) in axes.iter().enumerate() {
        let stats = axis_stats(values);
        out[axis * 10..(axis + 1) * 10].copy_from_slice(&stats);
    }
    out[30] = pearson(&axes[0], &axes[1]);
    out[31] = pearson(&axes[0], &axes[2]);
    out[32] = pearson(&axes[1], &axes[2]);
    for (axis, values) in axes.iter().enumerate() {
        let mags = spectrum::half_spectrum(values, true);
        out[33 + axis * 2] = spectrum::dominant_frequency(&mags, n, rate_hz);
        out[34 + axis * 2] = spectrum::spectral_entropy(&mags);
    }
    Ok(out)
}

/// Featurizes every complete window whose center slot carries an
/// annotation; unannotated centers are dropped. Returns the window features
/// and the gap-dropped grid position count from [`window_signal`].
pub fn compute_window_features(
    recording: &Recording,
    spec: &WindowSpec,
) -> Result<(Vec<WindowFeatures>, usize)> {
    let (raw, dropped) = window_signal(recording, spec)?;
    let annotation_by_slot: HashMap<(NaiveDate, u32), AnnotationLabel> = recording
        .annotations
        .iter()
        .map(|a| ((a.day, a.start_minute), a.label))
        .collect();
    let half_window_ms = i64::from(spec.window_seconds) * 500;
    let mut features = Vec::with_capacity(raw.len());
    for window in &raw {
        let center_ms = window.window_start_ms + half_window_ms;
        let center_minute = ((center_ms - day_epoch_ms(window.day)) / 60_000) as u32;
        let slot_minute = center_minute - center_minute % SLOT_MINUTES;
        let Some(&label) = annotation_by_slot.get(&(window.day, slot_minute)) else {
            continue;
        };
        features.push(WindowFeatures {
            values: extract_features(window, recording.sample_rate_hz)?,
            window_start_ms: window.window_start_ms,
            day: window.day,
            center_slot_minute: slot_minute,
            label,
        });
    }
    Ok((features, dropped))
}

/// Attaches segment ids to precomputed window features. Windows whose
/// center slot falls outside every segment are dropped.
pub fn bind_segments(windows: &[WindowFeatures], segments: &[TimeSegment]) -> Vec<FeatureVector> {
    let mut slot_to_segment: HashMap<(NaiveDate, u32), SegmentId> = HashMap::new();
    for segment in segments {
        for &slot in &segment.slots {
            slot_to_segment.insert((segment.day, slot), segment.id);
        }
    }
    windows
        .iter()
        .filter_map(|w| {
            let segment = *slot_to_segment.get(&(w.day, w.center_slot_minute))?;
            Some(FeatureVector {
                values: w.values,
                window_start_ms: w.window_start_ms,
                label: w.label,
                segment,
            })
        })
        .collect()
}

/// Full featurization: windows, features, labels, and segment binding.
pub fn featurize_recording(
    recording: &Recording,
    spec: &WindowSpec,
    segments: &[TimeSegment],
) -> Result<Vec<FeatureVector>> {
    let (windows, _dropped) = compute_window_features(recording, spec)?;
    Ok(bind_segments(&windows, segments))
}

fn axis_stats(values: &[f64]) -> [f64; 10] {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    let mut sum_sq = 0.0;
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
        sum_sq += v * v;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let std = m2.sqrt();
    let (skewness, kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };

    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let median = quantile(&sorted, 0.5);
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);

    let rms = (sum_sq / n).sqrt();

    let mut crossings = 0usize;
    let mut prev = values[0] - mean;
    for &v in &values[1..] {
        let cur = v - mean;
        if prev * cur < 0.0 {
            crossings += 1;
        }
        prev = cur;
    }
    let zcr = crossings as f64 / (values.len() - 1) as f64;

    [
        mean,
        std,
        sorted[0],
        sorted[sorted.len() - 1],
        median,
        iqr,
        skewness,
        kurtosis,
        rms,
        zcr,
    ]
}

/// Linear-interpolation quantile of a sorted slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let position = q * (sorted.len() - 1) as f64;
    let lo = position.floor() as usize;
    let frac = position - lo as f64;
    if lo + 1 < sorted.len() {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}

/// Pearson correlation with the 0 convention for constant inputs.
fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    (cov / (vx * vy).sqrt()).clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AnnotationRecord, DAY_START_MINUTE};

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    /// A full synthetic day with constant-ish samples for window math.
    fn full_day_recording() -> Recording {
        let day = date("2023-01-02");
        let epoch = day_epoch_ms(day) + i64::from(DAY_START_MINUTE) * 60_000;
        let samples = (0..600 * 60 * 50)
            .map(|i| AccelSample {
                timestamp_ms: epoch + i * 20,
                ax: 0.0,
                ay: 0.0,
                az: 9.81,
            })
            .collect();
        let annotations = (0..120)
            .map(|i| AnnotationRecord {
                day,
                start_minute: DAY_START_MINUTE + i * 5,
                label: AnnotationLabel::Apathy,
            })
            .collect();
        Recording::new("s", 50.0, samples, annotations).unwrap()
    }

    #[test]
    fn window_counts_match_the_grid() {
        let recording = full_day_recording();
        let (windows, dropped) = window_signal(&recording, &WindowSpec::default()).unwrap();
        assert_eq!(windows.len(), 1199);
        assert_eq!(dropped, 0);
        // Consecutive starts differ by the 30 s stride.
        for pair in windows.windows(2) {
            assert_eq!(pair[1].window_start_ms - pair[0].window_start_ms, 30_000);
        }

        let spec = WindowSpec {
            window_seconds: 60,
            overlap_fraction: 0.0,
        };
        let (windows, _) = window_signal(&recording, &spec).unwrap();
        assert_eq!(windows.len(), 600);
    }

    #[test]
    fn gap_windows_are_dropped_and_counted() {
        let mut recording = full_day_recording();
        // Remove two minutes of samples starting at 10:00.
        let day = date("2023-01-02");
        let gap_start = day_epoch_ms(day) + 600 * 60_000;
        let gap_end = gap_start + 2 * 60_000;
        recording
            .samples
            .retain(|s| s.timestamp_ms < gap_start || s.timestamp_ms >= gap_end);
        let (windows, dropped) = window_signal(&recording, &WindowSpec::default()).unwrap();
        // Starts in (9:59, 10:02) intersect the gap: 9:59:30, 10:00:00,
        // 10:00:30, 10:01:00, 10:01:30 = 5 grid slots.
        assert_eq!(dropped, 5);
        assert_eq!(windows.len(), 1199 - 5);
        for w in &windows {
            let end = w.window_start_ms + 60_000;
            assert!(end <= gap_start || w.window_start_ms >= gap_end);
        }
    }

    #[test]
    fn constant_window_features() {
        let day = date("2023-01-02");
        let samples: Vec<AccelSample> = (0..3000)
            .map(|i| AccelSample {
                timestamp_ms: i * 20,
                ax: 1.0,
                ay: 0.0,
                az: 0.0,
            })
            .collect();
        let window = RawWindow {
            window_start_ms: 0,
            day,
            samples: &samples,
        };
        let f = extract_features(&window, 50.0).unwrap();
        // Means.
        assert_eq!(f[0], 1.0);
        assert_eq!(f[10], 0.0);
        assert_eq!(f[20], 0.0);
        // std, iqr, zero-crossing rate all zero per axis.
        for axis in 0..3 {
            assert_eq!(f[axis * 10 + 1], 0.0, "std axis {axis}");
            assert_eq!(f[axis * 10 + 5], 0.0, "iqr axis {axis}");
            assert_eq!(f[axis * 10 + 9], 0.0, "zcr axis {axis}");
        }
        // Zero-signal convention for the spectral features.
        for axis in 0..3 {
            assert_eq!(f[33 + axis * 2], 0.0, "dominant axis {axis}");
            assert_eq!(f[34 + axis * 2], 0.0, "entropy axis {axis}");
        }
    }

    #[test]
    fn two_hz_tone_dominates_axis_x() {
        let day = date("2023-01-02");
        let samples: Vec<AccelSample> = (0..3000)
            .map(|i| AccelSample {
                timestamp_ms: i * 20,
                ax: (std::f64::consts::TAU * 2.0 * i as f64 / 50.0).sin(),
                ay: 0.0,
                az: 9.81,
            })
            .collect();
        let window = RawWindow {
            window_start_ms: 0,
            day,
            samples: &samples,
        };
        let f = extract_features(&window, 50.0).unwrap();
        assert_eq!(f[33], 2.0);
    }

    #[test]
    fn identical_axes_correlate_perfectly() {
        let day = date("2023-01-02");
        let samples: Vec<AccelSample> = (0..500)
            .map(|i| {
                let v = (i as f64 * 0.37).sin() + 0.2 * i as f64;
                AccelSample {
                    timestamp_ms: i * 20,
                    ax: v,
                    ay: v,
                    az: 9.81,
                }
            })
            .collect();
        let window = RawWindow {
            window_start_ms: 0,
            day,
            samples: &samples,
        };
        let f = extract_features(&window, 50.0).unwrap();
        assert_eq!(f[30], 1.0);
    }

    #[test]
    fn nan_sample_is_reported_with_its_index() {
        let day = date("2023-01-02");
        let mut samples: Vec<AccelSample> = (0..100)
            .map(|i| AccelSample {
                timestamp_ms: i * 20,
                ax: 0.0,
                ay: 0.0,
                az: 9.81,
            })
            .collect();
        samples[17].ay = f64::NAN;
        let window = RawWindow {
            window_start_ms: 0,
            day,
            samples: &samples,
        };
        match extract_features(&window, 50.0) {
            Err(Error::NonFiniteSample { axis, index }) => {
                assert_eq!(axis, 1);
                assert_eq!(index, 17);
            }
            other => panic!("expected NonFiniteSample, got {other:?}"),
        }
    }

    #[test]
    fn center_slot_labeling() {
        use crate::dataset::segment_day;
        let mut recording = full_day_recording();
        // Annotate the slot at 480 as pacing, everything else apathy.
        recording.annotations[0].label = AnnotationLabel::Pacing;
        let segments = segment_day(&recording, 30).unwrap();
        let features = featurize_recording(&recording, &WindowSpec::default(), &segments).unwrap();
        assert_eq!(features.len(), 1199);
        // A window centers in slot [480, 485) iff its start lies in
        // [479.5, 484.5); on the 30 s grid that is 480.0 ..= 484.0.
        let day_epoch = day_epoch_ms(date("2023-01-02"));
        for f in &features {
            let start_min = (f.window_start_ms - day_epoch) as f64 / 60_000.0;
            let expected = if start_min < 484.5 {
                AnnotationLabel::Pacing
            } else {
                AnnotationLabel::Apathy
            };
            assert_eq!(f.label, expected, "window at {start_min}");
        }
        // The window starting at minute 482.0 centers at 482.5 -> slot 480.
        let w482 = features
            .iter()
            .find(|f| f.window_start_ms == day_epoch + 482 * 60_000)
            .unwrap();
        assert_eq!(w482.label, AnnotationLabel::Pacing);
        // All windows bound to the first segment come from the first 30 min.
        assert_eq!(w482.segment, segments[0].id);
    }

    #[test]
    fn unannotated_centers_are_dropped() {
        let mut recording = full_day_recording();
        recording.annotations.remove(0); // slot 480 now unannotated
        recording.coverage_gaps.clear();
        let (windows, _) = compute_window_features(&recording, &WindowSpec::default()).unwrap();
        // The 9 windows centered in slot 480 disappear (starts 480.0 ..= 484.0).
        assert_eq!(windows.len(), 1199 - 9);
    }

    #[test]
    fn scale_equivariance_of_mean_and_zcr() {
        let day = date("2023-01-02");
        let base: Vec<f64> = (0..600).map(|i| (i as f64 * 0.61).sin() * 1.3 + 0.4).collect();
        for c in [0.5, 2.0, 17.0] {
            let make = |scale: f64| -> Vec<AccelSample> {
                base.iter()
                    .enumerate()
                    .map(|(i, &v)| AccelSample {
                        timestamp_ms: i as i64 * 20,
                        ax: v * scale,
                        ay: 0.0,
                        az: 0.0,
                    })
                    .collect()
            };
            let s1 = make(1.0);
            let s2 = make(c);
            let w1 = RawWindow {
                window_start_ms: 0,
                day,
                samples: &s1,
            };
            let w2 = RawWindow {
                window_start_ms: 0,
                day,
                samples: &s2,
            };
            let f1 = extract_features(&w1, 50.0).unwrap();
            let f2 = extract_features(&w2, 50.0).unwrap();
            assert!((f2[0] - c * f1[0]).abs() < 1e-9, "mean scale c={c}");
            assert_eq!(f1[9], f2[9], "zcr invariant c={c}");
        }
    }
}
