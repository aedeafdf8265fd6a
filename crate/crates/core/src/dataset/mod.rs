//! Recording schema, validation, and day segmentation.
//!
//! A recording is one subject's 3-axis wrist acceleration stream plus the
//! 5-minute annotation log, restricted to the 8:00-18:00 day window. CSV
//! load/store lives in [`io`], the synthetic generator in [`synth`].

pub mod io;
pub mod synth;

use std::collections::BTreeSet;
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// First annotated minute of the day window (8:00).
pub const DAY_START_MINUTE: u32 = 480;
/// End of the day window, exclusive (18:00).
pub const DAY_END_MINUTE: u32 = 1080;
/// Length of the day window in minutes.
pub const DAY_MINUTES: u32 = DAY_END_MINUTE - DAY_START_MINUTE;
/// Annotation grid resolution.
pub const SLOT_MINUTES: u32 = 5;
/// Number of annotation slots per day.
pub const SLOTS_PER_DAY: u32 = DAY_MINUTES / SLOT_MINUTES;
/// Number of annotation classes.
pub const N_LABELS: usize = 7;

/// The seven annotated behaviors, in canonical order.
///
/// The discriminant is the canonical index; `index 0 = apathy`,
/// `index 6 = normal`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationLabel {
    Apathy = 0,
    Restlessness = 1,
    Mannerisms = 2,
    Pacing = 3,
    Aggression = 4,
    LocomotionIntent = 5,
    Normal = 6,
}

impl AnnotationLabel {
    /// All labels in canonical order.
    pub const ALL: [AnnotationLabel; N_LABELS] = [
        AnnotationLabel::Apathy,
        AnnotationLabel::Restlessness,
        AnnotationLabel::Mannerisms,
        AnnotationLabel::Pacing,
        AnnotationLabel::Aggression,
        AnnotationLabel::LocomotionIntent,
        AnnotationLabel::Normal,
    ];

    /// Canonical index in `[0, 6]`.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Canonical lowercase name, as written in annotation CSV files.
    pub fn name(self) -> &'static str {
        match self {
            AnnotationLabel::Apathy => "apathy",
            AnnotationLabel::Restlessness => "restlessness",
            AnnotationLabel::Mannerisms => "mannerisms",
            AnnotationLabel::Pacing => "pacing",
            AnnotationLabel::Aggression => "aggression",
            AnnotationLabel::LocomotionIntent => "locomotion_intent",
            AnnotationLabel::Normal => "normal",
        }
    }

    pub fn from_index(index: usize) -> Result<AnnotationLabel> {
        Self::ALL
            .get(index)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("label index {index} out of range 0..7")))
    }

    pub fn from_name(name: &str) -> Result<AnnotationLabel> {
        Self::ALL
            .iter()
            .copied()
            .find(|l| l.name() == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown annotation label {name:?}")))
    }
}

impl fmt::Display for AnnotationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One expert annotation: the behavior observed in a single 5-minute slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub day: NaiveDate,
    /// Minutes since midnight; a multiple of 5 in `[480, 1075]`.
    pub start_minute: u32,
    pub label: AnnotationLabel,
}

impl AnnotationRecord {
    /// Checks the 5-minute-grid and day-window invariants.
    pub fn validate(&self) -> Result<()> {
        if !self.start_minute.is_multiple_of(SLOT_MINUTES) {
            return Err(Error::Validation(format!(
                "annotation at {} minute {} is off the 5-minute grid",
                self.day, self.start_minute
            )));
        }
        if self.start_minute < DAY_START_MINUTE || self.start_minute + SLOT_MINUTES > DAY_END_MINUTE
        {
            return Err(Error::Validation(format!(
                "annotation at {} minute {} outside the day window {}..{}",
                self.day, self.start_minute, DAY_START_MINUTE, DAY_END_MINUTE
            )));
        }
        Ok(())
    }
}

/// One accelerometer sample, acceleration in m/s^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelSample {
    pub timestamp_ms: i64,
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

impl AccelSample {
    pub fn axis(&self, axis: usize) -> f64 {
        match axis {
            0 => self.ax,
            1 => self.ay,
            _ => self.az,
        }
    }
}

/// Epoch milliseconds of midnight at the start of `day`.
pub fn day_epoch_ms(day: NaiveDate) -> i64 {
    day.and_hms_opt(0, 0, 0)
        .expect("midnight is always valid")
        .and_utc()
        .timestamp_millis()
}

/// The date containing an epoch-millisecond timestamp.
pub fn date_of_timestamp(timestamp_ms: i64) -> NaiveDate {
    chrono::DateTime::from_timestamp_millis(timestamp_ms)
        .expect("timestamp in representable range")
        .date_naive()
}

/// One subject's time series: acceleration stream plus annotation log.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub subject_id: String,
    pub sample_rate_hz: f64,
    /// Strictly increasing in `timestamp_ms`.
    pub samples: Vec<AccelSample>,
    /// Sorted by (day, start_minute); at most one record per slot.
    pub annotations: Vec<AnnotationRecord>,
    /// Annotation slots not fully covered by samples, flagged at
    /// construction. Windows over these slots are dropped downstream.
    pub coverage_gaps: Vec<(NaiveDate, u32)>,
}

impl Recording {
    /// Builds a recording and checks every schema invariant.
    ///
    /// Annotations are sorted into canonical order. Sample gaps inside a day
    /// do not fail validation; the slots they touch are flagged in
    /// `coverage_gaps` instead.
    pub fn new(
        subject_id: impl Into<String>,
        sample_rate_hz: f64,
        samples: Vec<AccelSample>,
        mut annotations: Vec<AnnotationRecord>,
    ) -> Result<Recording> {
        if !sample_rate_hz.is_finite() || sample_rate_hz <= 0.0 {
            return Err(Error::Validation(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        for pair in samples.windows(2) {
            if pair[1].timestamp_ms <= pair[0].timestamp_ms {
                return Err(Error::Validation(format!(
                    "timestamps not strictly increasing at {} -> {}",
                    pair[0].timestamp_ms, pair[1].timestamp_ms
                )));
            }
        }
        annotations.sort_by_key(|a| (a.day, a.start_minute));
        for a in &annotations {
            a.validate()?;
        }
        for pair in annotations.windows(2) {
            if pair[0].day == pair[1].day && pair[0].start_minute == pair[1].start_minute {
                return Err(Error::Validation(format!(
                    "duplicate annotation for {} minute {}",
                    pair[0].day, pair[0].start_minute
                )));
            }
        }
        let mut recording = Recording {
            subject_id: subject_id.into(),
            sample_rate_hz,
            samples,
            annotations,
            coverage_gaps: Vec::new(),
        };
        recording.coverage_gaps = recording.find_coverage_gaps();
        Ok(recording)
    }

    /// Distinct dates carrying samples or annotations, ascending.
    pub fn recorded_days(&self) -> Vec<NaiveDate> {
        let mut days: BTreeSet<NaiveDate> = self
            .annotations
            .iter()
            .map(|a| a.day)
            .collect();
        days.extend(self.samples.iter().map(|s| date_of_timestamp(s.timestamp_ms)));
        days.into_iter().collect()
    }

    /// Annotation slots whose 5-minute interval is not fully sampled at the
    /// nominal rate.
    fn find_coverage_gaps(&self) -> Vec<(NaiveDate, u32)> {
        let slot_ms = i64::from(SLOT_MINUTES) * 60_000;
        let expected = (f64::from(SLOT_MINUTES) * 60.0 * self.sample_rate_hz).round() as usize;
        let mut gaps = Vec::new();
        for a in &self.annotations {
            let start = day_epoch_ms(a.day) + i64::from(a.start_minute) * 60_000;
            let end = start + slot_ms;
            let lo = self.samples.partition_point(|s| s.timestamp_ms < start);
            let hi = self.samples.partition_point(|s| s.timestamp_ms < end);
            if hi - lo < expected {
                gaps.push((a.day, a.start_minute));
            }
        }
        gaps
    }
}

/// Identifier of a [`TimeSegment`] within one segmentation of a recording.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SegmentId(pub u32);

impl fmt::Display for SegmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One contiguous slice of a specific day (e.g. June 15th, 10:00-10:30).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeSegment {
    pub id: SegmentId,
    pub day: NaiveDate,
    pub start_minute: u32,
    /// Exclusive.
    pub end_minute: u32,
    /// Start minutes of the annotation slots falling in `[start, end)`.
    pub slots: Vec<u32>,
}

/// Tiles each recorded day of `recording` with segments of
/// `segment_minutes`.
///
/// `segment_minutes` must be a positive multiple of 5 that divides the
/// 600-minute day window. Each segment lists exactly the annotation slots
/// whose start minute lies inside it.
pub fn segment_day(recording: &Recording, segment_minutes: u32) -> Result<Vec<TimeSegment>> {
    if segment_minutes == 0 || !segment_minutes.is_multiple_of(SLOT_MINUTES) {
        return Err(Error::InvalidArgument(format!(
            "segment length {segment_minutes} is not a positive multiple of {SLOT_MINUTES}"
        )));
    }
    if !DAY_MINUTES.is_multiple_of(segment_minutes) {
        return Err(Error::InvalidArgument(format!(
            "segment length {segment_minutes} does not divide the {DAY_MINUTES}-minute day window"
        )));
    }
    let per_day = DAY_MINUTES / segment_minutes;
    let mut segments = Vec::new();
    for day in recording.recorded_days() {
        for i in 0..per_day {
            let start_minute = DAY_START_MINUTE + i * segment_minutes;
            let end_minute = start_minute + segment_minutes;
            let slots = (start_minute..end_minute)
                .step_by(SLOT_MINUTES as usize)
                .collect();
            segments.push(TimeSegment {
                id: SegmentId(segments.len() as u32),
                day,
                start_minute,
                end_minute,
                slots,
            });
        }
    }
    Ok(segments)
}
