//! The majority baseline: always predicts the modal training label.

use crate::dataset::{AnnotationLabel, N_LABELS};

#[derive(Debug, Clone, PartialEq)]
pub struct MajorityModel {
    pub label: AnnotationLabel,
    pub classes_seen: Vec<AnnotationLabel>,
}

impl MajorityModel {
    /// Ties break toward the lowest canonical label index.
    pub fn train(labels: impl Iterator<Item = AnnotationLabel>) -> MajorityModel {
        let mut counts = [0usize; N_LABELS];
        for label in labels {
            counts[label.index()] += 1;
        }
        let modal = AnnotationLabel::ALL
            .iter()
            .copied()
            .max_by_key(|l| counts[l.index()])
            .expect("seven labels");
        // max_by_key returns the last maximum; scan forward for the lowest.
        let best = counts[modal.index()];
        let label = AnnotationLabel::ALL
            .iter()
            .copied()
            .find(|l| counts[l.index()] == best)
            .expect("a maximum exists");
        let classes_seen = AnnotationLabel::ALL
            .iter()
            .copied()
            .filter(|l| counts[l.index()] > 0)
            .collect();
        MajorityModel {
            label,
            classes_seen,
        }
    }

    pub fn predict(&self) -> AnnotationLabel {
        self.label
    }
}
