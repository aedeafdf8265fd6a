//! `bpd report`: render the result CSVs into SVG charts and text tables.
//!
//! Outputs, under `<out_dir>/report/`:
//!
//! * `f1_vs_k_<classifier>.svg` — mean F1 against k, one series per
//!   k-means segment length plus the time-based series, matched points
//!   boxed;
//! * `confusion_heatmap.svg` — row-normalized confusion matrix of one
//!   selected cell (`heatmap_cell` config key, default: best mean F1);
//! * `annotation_distribution.svg` — per-subject distribution of true
//!   labels over all test windows;
//! * `matched_points.txt` — the matched-point comparison as a text table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use bpd_core::bpd::BpdStrategy;
use bpd_core::classifiers::ClassifierKind;
use bpd_core::dataset::{AnnotationLabel, N_LABELS};
use bpd_core::experiments::{matched_points, ExperimentResult, MatchedPoint};

use crate::charts::{self, Series, PALETTE};
use crate::commands::ensure_dir;
use crate::config::RunConfig;
use crate::CliError;

struct ConfusionRow {
    strategy: BpdStrategy,
    k: usize,
    segment_min: u32,
    classifier: ClassifierKind,
    subject: String,
    true_label: usize,
    counts: [u64; N_LABELS],
}

fn parse_err(path: &Path, line: usize, message: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}:{line}: {message}", path.display()))
}

fn parse_results(path: &Path) -> Result<Vec<ExperimentResult>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    if !header.1.starts_with("strategy,k,segment_min,classifier,subject,rep,f1_macro") {
        return Err(parse_err(path, 1, "unrecognized results header"));
    }
    let mut rows = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 17 {
            return Err(parse_err(
                path,
                line,
                format!("expected 17 fields, found {}", fields.len()),
            ));
        }
        let num = |idx: usize, what: &str| -> Result<f64, CliError> {
            fields[idx]
                .parse()
                .map_err(|_| parse_err(path, line, format!("bad {what} {:?}", fields[idx])))
        };
        let mut per_class_f1 = [0.0; N_LABELS];
        for (c, slot) in per_class_f1.iter_mut().enumerate() {
            *slot = num(7 + c, "per-class f1")?;
        }
        rows.push(ExperimentResult {
            strategy: BpdStrategy::from_name(fields[0])
                .map_err(|e| parse_err(path, line, e))?,
            k: num(1, "k")? as usize,
            segment_min: num(2, "segment_min")? as u32,
            classifier: ClassifierKind::from_name(fields[3])
                .map_err(|e| parse_err(path, line, e))?,
            subject: fields[4].to_owned(),
            rep: num(5, "rep")? as u32,
            f1_macro: num(6, "f1_macro")?,
            per_class_f1,
            confusion: [[0; N_LABELS]; N_LABELS],
            n_train: num(14, "n_train")? as usize,
            n_test: num(15, "n_test")? as usize,
            n_fallback: num(16, "n_fallback")? as usize,
        });
    }
    if rows.is_empty() {
        return Err(parse_err(path, 1, "no result rows"));
    }
    Ok(rows)
}

fn parse_confusion(path: &Path) -> Result<Vec<ConfusionRow>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let mut rows = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 14 {
            return Err(parse_err(
                path,
                line,
                format!("expected 14 fields, found {}", fields.len()),
            ));
        }
        let mut counts = [0u64; N_LABELS];
        for (c, slot) in counts.iter_mut().enumerate() {
            *slot = fields[7 + c]
                .parse()
                .map_err(|_| parse_err(path, line, format!("bad count {:?}", fields[7 + c])))?;
        }
        rows.push(ConfusionRow {
            strategy: BpdStrategy::from_name(fields[0]).map_err(|e| parse_err(path, line, e))?,
            k: fields[1]
                .parse()
                .map_err(|_| parse_err(path, line, "bad k"))?,
            segment_min: fields[2]
                .parse()
                .map_err(|_| parse_err(path, line, "bad segment_min"))?,
            classifier: ClassifierKind::from_name(fields[3])
                .map_err(|e| parse_err(path, line, e))?,
            subject: fields[4].to_owned(),
            true_label: AnnotationLabel::from_name(fields[6])
                .map_err(|e| parse_err(path, line, e))?
                .index(),
            counts,
        });
    }
    Ok(rows)
}

/// Mean over subjects of per-subject repetition means.
fn subject_mean(rows: &[ExperimentResult], select: impl Fn(&ExperimentResult) -> bool) -> Option<f64> {
    let mut by_subject: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for r in rows.iter().filter(|r| select(r)) {
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

fn f1_chart_for(
    classifier: ClassifierKind,
    rows: &[ExperimentResult],
    points: &[MatchedPoint],
) -> String {
    let kmeans_lengths: BTreeSet<u32> = rows
        .iter()
        .filter(|r| r.strategy == BpdStrategy::Kmeans && r.classifier == classifier)
        .map(|r| r.segment_min)
        .collect();
    let ks: BTreeSet<usize> = rows
        .iter()
        .filter(|r| r.classifier == classifier)
        .map(|r| r.k)
        .collect();

    let mut series = Vec::new();
    for (i, &len) in kmeans_lengths.iter().enumerate() {
        let mut pts = Vec::new();
        for &k in &ks {
            if let Some(mean) = subject_mean(rows, |r| {
                r.strategy == BpdStrategy::Kmeans
                    && r.classifier == classifier
                    && r.k == k
                    && r.segment_min == len
            }) {
                pts.push((k as f64, mean));
            }
        }
        if !pts.is_empty() {
            series.push(Series {
                name: format!("kmeans {len} min"),
                color: PALETTE[i % PALETTE.len()].to_owned(),
                points: pts,
            });
        }
    }
    let mut time_points = Vec::new();
    for &k in &ks {
        if let Some(mean) = subject_mean(rows, |r| {
            r.strategy == BpdStrategy::TimeBased && r.classifier == classifier && r.k == k
        }) {
            time_points.push((k as f64, mean));
        }
    }
    if !time_points.is_empty() {
        series.push(Series {
            name: "time-based".to_owned(),
            color: "#000000".to_owned(),
            points: time_points,
        });
    }

    let markers: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.classifier == classifier)
        .flat_map(|p| {
            [
                (p.k as f64, p.f1_kmeans_mean),
                (p.k as f64, p.f1_time_mean),
            ]
        })
        .collect();
    charts::f1_line_chart(
        &format!("mean F1 vs number of BPDs ({})", classifier.name()),
        &series,
        &markers,
    )
}

type CellKey = (BpdStrategy, usize, u32, ClassifierKind);

fn heatmap_cell(config: &RunConfig, rows: &[ExperimentResult]) -> Result<CellKey, CliError> {
    if let Some(spec) = &config.heatmap_cell {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 4 {
            return Err(CliError::Config(format!(
                "heatmap_cell {spec:?} is not strategy:k:segment:classifier"
            )));
        }
        let strategy =
            BpdStrategy::from_name(parts[0]).map_err(|e| CliError::Config(e.to_string()))?;
        let k: usize = parts[1]
            .parse()
            .map_err(|_| CliError::Config(format!("bad k in heatmap_cell {spec:?}")))?;
        let segment: u32 = parts[2]
            .parse()
            .map_err(|_| CliError::Config(format!("bad segment in heatmap_cell {spec:?}")))?;
        let classifier =
            ClassifierKind::from_name(parts[3]).map_err(|e| CliError::Config(e.to_string()))?;
        return Ok((strategy, k, segment, classifier));
    }
    // Default: the cell with the highest mean F1, ties to canonical order.
    let cells: BTreeSet<CellKey> = rows
        .iter()
        .map(|r| (r.strategy, r.k, r.segment_min, r.classifier))
        .collect();
    let mut best: Option<(f64, CellKey)> = None;
    for cell in cells {
        let mean = subject_mean(rows, |r| {
            (r.strategy, r.k, r.segment_min, r.classifier) == cell
        })
        .expect("cell came from the rows");
        let better = match &best {
            None => true,
            Some((best_mean, _)) => mean > *best_mean,
        };
        if better {
            best = Some((mean, cell));
        }
    }
    Ok(best.expect("non-empty rows").1)
}

fn matched_table(points: &[MatchedPoint]) -> String {
    if points.is_empty() {
        return "no matched points (need both strategies at a k with 600/k on the segment grid)\n"
            .to_owned();
    }
    let mut out = String::from(
        "classifier   k   segment_min  f1_kmeans  f1_time   delta\n",
    );
    for p in points {
        let _ = writeln!(
            out,
            "{:<12} {:<3} {:<12} {:<10.4} {:<9.4} {:+.4}",
            p.classifier.name(),
            p.k,
            p.segment_min,
            p.f1_kmeans_mean,
            p.f1_time_mean,
            p.delta
        );
    }
    out
}

pub fn cmd_report(config: &RunConfig) -> Result<(), CliError> {
    let results_path = config.out_dir.join("results.csv");
    let rows = parse_results(&results_path)?;
    let confusion_rows = parse_confusion(&config.out_dir.join("confusion.csv"))?;
    let report_dir = config.out_dir.join("report");
    ensure_dir(&report_dir)?;

    let points = matched_points(&rows);
    let classifiers: BTreeSet<ClassifierKind> = rows.iter().map(|r| r.classifier).collect();
    let mut written = 0usize;
    for classifier in &classifiers {
        let svg = f1_chart_for(*classifier, &rows, &points);
        let path = report_dir.join(format!("f1_vs_k_{}.svg", classifier.name()));
        std::fs::write(&path, svg)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
        written += 1;
    }

    // Heat map of the selected cell, rows aggregated over subjects and reps.
    let (strategy, k, segment_min, classifier) = heatmap_cell(config, &rows)?;
    let mut matrix = [[0u64; N_LABELS]; N_LABELS];
    for row in confusion_rows.iter().filter(|c| {
        c.strategy == strategy
            && c.k == k
            && c.segment_min == segment_min
            && c.classifier == classifier
    }) {
        for (j, &count) in row.counts.iter().enumerate() {
            matrix[row.true_label][j] += count;
        }
    }
    let mut normalized = [[0.0; N_LABELS]; N_LABELS];
    for (i, row) in matrix.iter().enumerate() {
        let total: u64 = row.iter().sum();
        if total > 0 {
            for (j, &count) in row.iter().enumerate() {
                normalized[i][j] = count as f64 / total as f64;
            }
        }
    }
    let title = format!(
        "confusion ({} k={k} segment={segment_min} {})",
        strategy.name(),
        classifier.name()
    );
    std::fs::write(
        report_dir.join("confusion_heatmap.svg"),
        charts::confusion_heatmap(&title, &normalized),
    )
    .map_err(CliError::data)?;

    // Per-subject distribution of true labels over all test windows.
    let subjects: BTreeSet<&str> = confusion_rows.iter().map(|c| c.subject.as_str()).collect();
    let mut distributions = Vec::new();
    for subject in subjects {
        let mut counts = [0u64; N_LABELS];
        for row in confusion_rows.iter().filter(|c| c.subject == subject) {
            counts[row.true_label] += row.counts.iter().sum::<u64>();
        }
        let total: u64 = counts.iter().sum();
        let mut dist = [0.0; N_LABELS];
        if total > 0 {
            for (c, &count) in counts.iter().enumerate() {
                dist[c] = count as f64 / total as f64;
            }
        }
        distributions.push((subject.to_owned(), dist));
    }
    std::fs::write(
        report_dir.join("annotation_distribution.svg"),
        charts::distribution_chart("annotation distribution per subject", &distributions),
    )
    .map_err(CliError::data)?;

    std::fs::write(report_dir.join("matched_points.txt"), matched_table(&points))
        .map_err(CliError::data)?;

    println!(
        "report: {written} F1 charts, heat map, distribution chart -> {}",
        report_dir.display()
    );
    Ok(())
}
