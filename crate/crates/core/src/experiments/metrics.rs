//! Confusion matrices and F1 scoring.

use crate::dataset::{AnnotationLabel, N_LABELS};

/// Row = true label, column = predicted label, canonical order both ways.
pub type ConfusionMatrix = [[u64; N_LABELS]; N_LABELS];

/// Counts `(true, predicted)` pairs into a 7x7 matrix.
pub fn confusion_matrix(pairs: &[(AnnotationLabel, AnnotationLabel)]) -> ConfusionMatrix {
    let mut matrix = [[0u64; N_LABELS]; N_LABELS];
    for (truth, predicted) in pairs {
        matrix[truth.index()][predicted.index()] += 1;
    }
    matrix
}

/// Per-class and macro-averaged F1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F1Scores {
    /// Unweighted mean over classes present in the true labels
    /// (row sum > 0); 0 when no class is present.
    pub macro_f1: f64,
    /// Per-class F1 with the 0/0 -> 0 convention; absent classes score 0.
    pub per_class: [f64; N_LABELS],
}

/// Computes per-class F1 (`2pr / (p + r)`, 0 when the denominator is 0) and
/// the macro average over present classes.
pub fn f1_macro(matrix: &ConfusionMatrix) -> F1Scores {
    let mut per_class = [0.0; N_LABELS];
    let mut present = 0usize;
    let mut total = 0.0;
    for c in 0..N_LABELS {
        let tp = matrix[c][c] as f64;
        let row: u64 = matrix[c].iter().sum();
        let col: u64 = (0..N_LABELS).map(|r| matrix[r][c]).sum();
        let precision = if col > 0 { tp / col as f64 } else { 0.0 };
        let recall = if row > 0 { tp / row as f64 } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        per_class[c] = f1;
        if row > 0 {
            present += 1;
            total += f1;
        }
    }
    F1Scores {
        macro_f1: if present > 0 {
            total / present as f64
        } else {
            0.0
        },
        per_class,
    }
}
