//! CSV load/store for recordings and synthesis ground truth.
//!
//! Three fixed schemas, all UTF-8 with `.` as the decimal separator:
//!
//! * signal:       `timestamp_ms,ax,ay,az`
//! * annotations:  `date,start_minute,label`
//! * ground truth: `date,start_minute,regime_id`
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! write/load cycle reproduces the recording exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::NaiveDate;

use crate::dataset::synth::RegimeAssignment;
use crate::dataset::{AccelSample, AnnotationLabel, AnnotationRecord, Recording};
use crate::error::{Error, Result};

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(str::to_owned).collect())
}

fn check_header(path: &Path, lines: &[String], expected: &str) -> Result<()> {
    match lines.first() {
        Some(h) if h == expected => Ok(()),
        Some(h) => Err(Error::parse(
            path,
            1,
            format!("expected header {expected:?}, found {h:?}"),
        )),
        None => Err(Error::parse(path, 1, "empty file")),
    }
}

fn parse_date(path: &Path, line: usize, field: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(field, "%Y-%m-%d")
        .map_err(|e| Error::parse(path, line, format!("bad date {field:?}: {e}")))
}

fn parse_num<T: std::str::FromStr>(path: &Path, line: usize, field: &str, what: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    field
        .parse()
        .map_err(|e| Error::parse(path, line, format!("bad {what} {field:?}: {e}")))
}

/// Loads a recording from its signal and annotation CSV files.
///
/// `sample_rate_hz` is the nominal rate of the signal file; the schema does
/// not carry it. All schema invariants are validated before returning.
pub fn load_recording(
    signal_path: &Path,
    annotation_path: &Path,
    subject_id: &str,
    sample_rate_hz: f64,
) -> Result<Recording> {
    let signal_lines = read_lines(signal_path)?;
    check_header(signal_path, &signal_lines, "timestamp_ms,ax,ay,az")?;
    let mut samples = Vec::with_capacity(signal_lines.len().saturating_sub(1));
    for (i, row) in signal_lines.iter().enumerate().skip(1) {
        let line = i + 1;
        let mut fields = row.split(',');
        let mut next = |what: &str| {
            fields
                .next()
                .ok_or_else(|| Error::parse(signal_path, line, format!("missing {what} field")))
        };
        let timestamp_ms = parse_num(signal_path, line, next("timestamp_ms")?, "timestamp")?;
        let ax = parse_num(signal_path, line, next("ax")?, "ax")?;
        let ay = parse_num(signal_path, line, next("ay")?, "ay")?;
        let az = parse_num(signal_path, line, next("az")?, "az")?;
        if fields.next().is_some() {
            return Err(Error::parse(signal_path, line, "too many fields"));
        }
        samples.push(AccelSample {
            timestamp_ms,
            ax,
            ay,
            az,
        });
    }

    let annotations = load_annotations(annotation_path)?;
    Recording::new(subject_id, sample_rate_hz, samples, annotations)
}

/// Loads an annotation CSV on its own (no signal required).
pub fn load_annotations(path: &Path) -> Result<Vec<AnnotationRecord>> {
    let lines = read_lines(path)?;
    check_header(path, &lines, "date,start_minute,label")?;
    let mut annotations = Vec::with_capacity(lines.len().saturating_sub(1));
    for (i, row) in lines.iter().enumerate().skip(1) {
        let line = i + 1;
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                path,
                line,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let day = parse_date(path, line, fields[0])?;
        let start_minute = parse_num(path, line, fields[1], "start_minute")?;
        let label = AnnotationLabel::from_name(fields[2])
            .map_err(|e| Error::parse(path, line, e.to_string()))?;
        annotations.push(AnnotationRecord {
            day,
            start_minute,
            label,
        });
    }
    Ok(annotations)
}

/// Writes the two CSV files of a recording.
pub fn write_recording(
    recording: &Recording,
    signal_path: &Path,
    annotation_path: &Path,
) -> Result<()> {
    let mut signal = String::from("timestamp_ms,ax,ay,az\n");
    for s in &recording.samples {
        let _ = writeln!(signal, "{},{},{},{}", s.timestamp_ms, s.ax, s.ay, s.az);
    }
    fs::write(signal_path, signal).map_err(|e| Error::io(signal_path, e))?;

    let mut ann = String::from("date,start_minute,label\n");
    for a in &recording.annotations {
        let _ = writeln!(
            ann,
            "{},{},{}",
            a.day.format("%Y-%m-%d"),
            a.start_minute,
            a.label
        );
    }
    fs::write(annotation_path, ann).map_err(|e| Error::io(annotation_path, e))
}

/// Writes the per-slot regime ground truth of a synthetic recording.
pub fn write_ground_truth(path: &Path, truth: &[RegimeAssignment]) -> Result<()> {
    let mut out = String::from("date,start_minute,regime_id\n");
    for t in truth {
        let _ = writeln!(
            out,
            "{},{},{}",
            t.day.format("%Y-%m-%d"),
            t.start_minute,
            t.regime_id
        );
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Loads a ground-truth CSV written by [`write_ground_truth`].
pub fn load_ground_truth(path: &Path) -> Result<Vec<RegimeAssignment>> {
    let lines = read_lines(path)?;
    check_header(path, &lines, "date,start_minute,regime_id")?;
    let mut truth = Vec::with_capacity(lines.len().saturating_sub(1));
    for (i, row) in lines.iter().enumerate().skip(1) {
        let line = i + 1;
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                path,
                line,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        truth.push(RegimeAssignment {
            day: parse_date(path, line, fields[0])?,
            start_minute: parse_num(path, line, fields[1], "start_minute")?,
            regime_id: parse_num(path, line, fields[2], "regime_id")?,
        });
    }
    Ok(truth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_reproduces_an_equal_recording() {
        let dir = tempfile::tempdir().unwrap();
        let day = NaiveDate::parse_from_str("2023-01-02", "%Y-%m-%d").unwrap();
        let samples = (0..10)
            .map(|i| AccelSample {
                timestamp_ms: super::super::day_epoch_ms(day) + 480 * 60_000 + i * 20,
                ax: -0.0514 + i as f64 * 0.001,
                ay: 0.3128,
                az: 9.8021,
            })
            .collect();
        let annotations = vec![AnnotationRecord {
            day,
            start_minute: 480,
            label: AnnotationLabel::LocomotionIntent,
        }];
        let recording = Recording::new("s01", 50.0, samples, annotations).unwrap();

        let signal = dir.path().join("s01_signal.csv");
        let ann = dir.path().join("s01_annotations.csv");
        write_recording(&recording, &signal, &ann).unwrap();
        let loaded = load_recording(&signal, &ann, "s01", 50.0).unwrap();
        assert_eq!(loaded, recording);
    }

    #[test]
    fn malformed_row_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "timestamp_ms,ax,ay,az\n0,0.0,0.0,9.81\nnot_a_number,0,0,0\n")
            .unwrap();
        let ann = dir.path().join("ann.csv");
        std::fs::write(&ann, "date,start_minute,label\n").unwrap();
        let err = load_recording(&path, &ann, "s", 50.0).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn off_grid_annotation_fails_validation() {
        let dir = tempfile::tempdir().unwrap();
        let signal = dir.path().join("signal.csv");
        std::fs::write(&signal, "timestamp_ms,ax,ay,az\n").unwrap();
        let ann = dir.path().join("ann.csv");
        std::fs::write(&ann, "date,start_minute,label\n2023-01-02,482,apathy\n").unwrap();
        let err = load_recording(&signal, &ann, "s", 50.0).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn unknown_label_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let ann = dir.path().join("ann.csv");
        std::fs::write(&ann, "date,start_minute,label\n2023-01-02,480,sleeping\n").unwrap();
        let err = load_annotations(&ann).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }
}
