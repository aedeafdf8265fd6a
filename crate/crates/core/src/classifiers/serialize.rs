//! Versioned text serialization for classifier banks.
//!
//! Format `bpdbank v1`, one file per bank, line-oriented, fields separated
//! by single spaces, floats in Rust's shortest round-trip notation:
//!
//! ```text
//! bpdbank v1
//! kind <majority|naive_bayes|svm>
//! k <number of bpd blocks>
//! bpd <d>
//! classes <label> [<label> ...]
//! <kind-specific fields>
//! end
//! ...repeated per block, ascending d...
//! ```
//!
//! Kind-specific fields, in this exact order:
//!
//! * `majority`: `label <name>`
//! * `naive_bayes`: `dim <n>`, then per class (ascending canonical index)
//!   `class <name>`, `prior <f>`, `means <f>...`, `variances <f>...`
//! * `svm`: `dim <n>`, `feature_means <f>...`, `feature_scales <f>...`,
//!   then per class `class <name>`, `weights <f>...`, `bias <f>`.
//!   A single-class block carries no per-class sections.

use std::fs;
use std::path::Path;

use crate::classifiers::{
    BpdClassifierBank, ClassifierKind, MajorityModel, NaiveBayesModel, SvmModel, TrainedClassifier,
};
use crate::classifiers::naive_bayes::ClassDensity;
use crate::dataset::AnnotationLabel;
use crate::error::{Error, Result};

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Writes a bank to `path` in the `bpdbank v1` format.
pub fn save_bank(bank: &BpdClassifierBank, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("bpdbank v1\n");
    out.push_str(&format!("kind {}\n", bank.kind.name()));
    out.push_str(&format!("k {}\n", bank.classifiers.len()));
    for (d, classifier) in &bank.classifiers {
        out.push_str(&format!("bpd {d}\n"));
        let classes = classifier
            .classes_seen()
            .iter()
            .map(|l| l.name())
            .collect::<Vec<_>>()
            .join(" ");
        out.push_str(&format!("classes {classes}\n"));
        match classifier {
            TrainedClassifier::Majority(m) => {
                out.push_str(&format!("label {}\n", m.label));
            }
            TrainedClassifier::NaiveBayes(m) => {
                out.push_str(&format!("dim {}\n", m.dim));
                for c in &m.classes {
                    out.push_str(&format!("class {}\n", c.label));
                    out.push_str(&format!("prior {}\n", c.prior));
                    out.push_str(&format!("means {}\n", join(&c.means)));
                    out.push_str(&format!("variances {}\n", join(&c.variances)));
                }
            }
            TrainedClassifier::Svm(m) => {
                out.push_str(&format!("dim {}\n", m.dim));
                out.push_str(&format!("feature_means {}\n", join(&m.feature_means)));
                out.push_str(&format!("feature_scales {}\n", join(&m.feature_scales)));
                for (c, class) in m.classes.iter().enumerate() {
                    if m.weights.is_empty() {
                        break;
                    }
                    out.push_str(&format!("class {class}\n"));
                    out.push_str(&format!("weights {}\n", join(&m.weights[c])));
                    out.push_str(&format!("bias {}\n", m.biases[c]));
                }
            }
        }
        out.push_str("end\n");
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

struct Reader<'a> {
    path: &'a Path,
    lines: Vec<&'a str>,
    cursor: usize,
}

impl<'a> Reader<'a> {
    fn next(&mut self) -> Result<&'a str> {
        let line = self
            .lines
            .get(self.cursor)
            .ok_or_else(|| Error::parse(self.path, self.cursor + 1, "unexpected end of file"))?;
        self.cursor += 1;
        Ok(line)
    }

    fn expect_field(&mut self, key: &str) -> Result<&'a str> {
        let line_no = self.cursor + 1;
        let line = self.next()?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' ').or(Some(rest).filter(|r| r.is_empty())))
            .ok_or_else(|| {
                Error::parse(self.path, line_no, format!("expected {key:?}, found {line:?}"))
            })
    }

    fn floats(&mut self, key: &str) -> Result<Vec<f64>> {
        let line_no = self.cursor + 1;
        let raw = self.expect_field(key)?;
        raw.split(' ')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::parse(self.path, line_no, format!("bad float {s:?}: {e}")))
            })
            .collect()
    }

    fn usize_field(&mut self, key: &str) -> Result<usize> {
        let line_no = self.cursor + 1;
        let raw = self.expect_field(key)?;
        raw.parse()
            .map_err(|e| Error::parse(self.path, line_no, format!("bad integer {raw:?}: {e}")))
    }
}

/// Loads a bank written by [`save_bank`].
pub fn load_bank(path: &Path) -> Result<BpdClassifierBank> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = Reader {
        path,
        lines: text.lines().collect(),
        cursor: 0,
    };
    let header = reader.next()?;
    if header != "bpdbank v1" {
        return Err(Error::parse(path, 1, format!("bad header {header:?}")));
    }
    let kind = ClassifierKind::from_name(reader.expect_field("kind")?)
        .map_err(|e| Error::parse(path, reader.cursor, e.to_string()))?;
    let blocks = reader.usize_field("k")?;

    let mut classifiers = std::collections::BTreeMap::new();
    for _ in 0..blocks {
        let d = reader.usize_field("bpd")?;
        let class_line = reader.expect_field("classes")?;
        let classes: Vec<AnnotationLabel> = class_line
            .split(' ')
            .filter(|s| !s.is_empty())
            .map(AnnotationLabel::from_name)
            .collect::<Result<_>>()
            .map_err(|e| Error::parse(path, reader.cursor, e.to_string()))?;

        let classifier = match kind {
            ClassifierKind::Majority => {
                let name = reader.expect_field("label")?;
                let label = AnnotationLabel::from_name(name)
                    .map_err(|e| Error::parse(path, reader.cursor, e.to_string()))?;
                TrainedClassifier::Majority(MajorityModel {
                    label,
                    classes_seen: classes,
                })
            }
            ClassifierKind::NaiveBayes => {
                let dim = reader.usize_field("dim")?;
                let mut densities = Vec::with_capacity(classes.len());
                for &expected in &classes {
                    let name = reader.expect_field("class")?;
                    if name != expected.name() {
                        return Err(Error::parse(
                            path,
                            reader.cursor,
                            format!("expected class {expected}, found {name:?}"),
                        ));
                    }
                    let prior = reader.floats("prior")?;
                    let means = reader.floats("means")?;
                    let variances = reader.floats("variances")?;
                    if prior.len() != 1 || means.len() != dim || variances.len() != dim {
                        return Err(Error::parse(path, reader.cursor, "field length mismatch"));
                    }
                    densities.push(ClassDensity {
                        label: expected,
                        prior: prior[0],
                        means,
                        variances,
                    });
                }
                TrainedClassifier::NaiveBayes(NaiveBayesModel {
                    dim,
                    classes: densities,
                })
            }
            ClassifierKind::Svm => {
                let dim = reader.usize_field("dim")?;
                let feature_means = reader.floats("feature_means")?;
                let feature_scales = reader.floats("feature_scales")?;
                let mut weights = Vec::new();
                let mut biases = Vec::new();
                if classes.len() > 1 {
                    for &expected in &classes {
                        let name = reader.expect_field("class")?;
                        if name != expected.name() {
                            return Err(Error::parse(
                                path,
                                reader.cursor,
                                format!("expected class {expected}, found {name:?}"),
                            ));
                        }
                        let w = reader.floats("weights")?;
                        let b = reader.floats("bias")?;
                        if w.len() != dim || b.len() != 1 {
                            return Err(Error::parse(path, reader.cursor, "field length mismatch"));
                        }
                        weights.push(w);
                        biases.push(b[0]);
                    }
                }
                TrainedClassifier::Svm(SvmModel {
                    dim,
                    classes,
                    weights,
                    biases,
                    feature_means,
                    feature_scales,
                })
            }
        };
        let end_line = reader.next()?;
        if end_line != "end" {
            return Err(Error::parse(
                path,
                reader.cursor,
                format!("expected \"end\", found {end_line:?}"),
            ));
        }
        classifiers.insert(d, classifier);
    }
    Ok(BpdClassifierBank { kind, classifiers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::train_bank;
    use crate::dataset::SegmentId;
    use crate::features::{FeatureVector, FEATURE_LEN};
    use AnnotationLabel::*;

    fn toy_bank(kind: ClassifierKind) -> BpdClassifierBank {
        let mut labeled = Vec::new();
        for i in 0..30 {
            let mut values = [0.0; FEATURE_LEN];
            values[0] = (i as f64 * 1.3).sin() * 4.0;
            values[5] = i as f64;
            let label = match i % 3 {
                0 => Apathy,
                1 => Pacing,
                _ => Normal,
            };
            labeled.push((
                FeatureVector {
                    values,
                    window_start_ms: i as i64,
                    label,
                    segment: SegmentId(i as u32),
                },
                (i % 2) as usize,
            ));
        }
        // One extra single-class partition to exercise constant models.
        labeled.push((
            FeatureVector {
                values: [1.0; FEATURE_LEN],
                window_start_ms: 0,
                label: Aggression,
                segment: SegmentId(99),
            },
            7,
        ));
        train_bank(kind, &labeled, 21).unwrap()
    }

    #[test]
    fn save_load_round_trips_each_kind() {
        let dir = tempfile::tempdir().unwrap();
        for kind in ClassifierKind::ALL {
            let bank = toy_bank(kind);
            let path = dir.path().join(format!("{}.bank", kind.name()));
            save_bank(&bank, &path).unwrap();
            let loaded = load_bank(&path).unwrap();
            assert_eq!(loaded, bank, "{kind:?}");
        }
    }

    #[test]
    fn truncated_file_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bank.txt");
        std::fs::write(&path, "bpdbank v1\nkind majority\nk 1\nbpd 0\n").unwrap();
        assert!(matches!(load_bank(&path), Err(Error::Parse { .. })));
    }
}
