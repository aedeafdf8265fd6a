//! The three base classifiers and the BPD-conditioned bank: one classifier
//! trained per BPD, applied by routing each window to the classifier of its
//! (oracle) BPD label.

pub mod majority;
pub mod naive_bayes;
mod serialize;
pub mod svm;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::dataset::AnnotationLabel;
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::seeding;

pub use majority::MajorityModel;
pub use naive_bayes::NaiveBayesModel;
pub use serialize::{load_bank, save_bank};
pub use svm::{SvmModel, SvmTrainOutcome};

/// The classifier families of the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassifierKind {
    Majority,
    NaiveBayes,
    Svm,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [
        ClassifierKind::Majority,
        ClassifierKind::NaiveBayes,
        ClassifierKind::Svm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Majority => "majority",
            ClassifierKind::NaiveBayes => "naive_bayes",
            ClassifierKind::Svm => "svm",
        }
    }

    pub fn from_name(name: &str) -> Result<ClassifierKind> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown classifier {name:?}")))
    }
}

/// A trained classifier of any kind.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedClassifier {
    Majority(MajorityModel),
    NaiveBayes(NaiveBayesModel),
    Svm(SvmModel),
}

impl TrainedClassifier {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            TrainedClassifier::Majority(_) => ClassifierKind::Majority,
            TrainedClassifier::NaiveBayes(_) => ClassifierKind::NaiveBayes,
            TrainedClassifier::Svm(_) => ClassifierKind::Svm,
        }
    }

    /// Labels present in this classifier's training partition; predictions
    /// never leave this set.
    pub fn classes_seen(&self) -> Vec<AnnotationLabel> {
        match self {
            TrainedClassifier::Majority(m) => m.classes_seen.clone(),
            TrainedClassifier::NaiveBayes(m) => m.classes_seen(),
            TrainedClassifier::Svm(m) => m.classes_seen(),
        }
    }

    pub fn predict(&self, x: &[f64]) -> AnnotationLabel {
        match self {
            TrainedClassifier::Majority(m) => m.predict(),
            TrainedClassifier::NaiveBayes(m) => m.predict(x),
            TrainedClassifier::Svm(m) => m.predict(x),
        }
    }
}

/// Trains one classifier on `(feature values, label)` pairs.
///
/// The seed only matters for the SVM's sample shuffling; majority and naive
/// Bayes are closed-form.
pub fn train(
    kind: ClassifierKind,
    data: &[(&[f64], AnnotationLabel)],
    seed: u64,
) -> Result<TrainedClassifier> {
    if data.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot train a classifier on empty data".into(),
        ));
    }
    Ok(match kind {
        ClassifierKind::Majority => {
            TrainedClassifier::Majority(MajorityModel::train(data.iter().map(|(_, l)| *l)))
        }
        ClassifierKind::NaiveBayes => TrainedClassifier::NaiveBayes(NaiveBayesModel::train(data)),
        ClassifierKind::Svm => TrainedClassifier::Svm(svm::train_svm(data, seed).model),
    })
}

/// One classifier per BPD: the model `m(s, d) = c_d(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BpdClassifierBank {
    pub kind: ClassifierKind,
    /// BPDs that had at least one training window.
    pub classifiers: BTreeMap<usize, TrainedClassifier>,
}

/// Partitions windows by BPD label and trains one classifier per non-empty
/// partition. Per-BPD seeds are derived as `derive(seed, [d])`, so the
/// result does not depend on training order.
pub fn train_bank(
    kind: ClassifierKind,
    labeled: &[(FeatureVector, usize)],
    seed: u64,
) -> Result<BpdClassifierBank> {
    if labeled.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot train a bank on empty data".into(),
        ));
    }
    let mut partitions: BTreeMap<usize, Vec<(&[f64], AnnotationLabel)>> = BTreeMap::new();
    for (f, d) in labeled {
        partitions
            .entry(*d)
            .or_default()
            .push((f.values.as_slice(), f.label));
    }
    let classifiers = partitions
        .into_iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(d, partition)| {
            let classifier = train(kind, &partition, seeding::derive(seed, &[d as u64]))?;
            Ok((d, classifier))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(BpdClassifierBank { kind, classifiers })
}

/// Predicts with the classifier trained for BPD `d`.
///
/// A `d` never seen in training is an explicit error; the experiment runner
/// maps it to the global modal label and counts the event.
pub fn predict_bank(bank: &BpdClassifierBank, x: &[f64], d: usize) -> Result<AnnotationLabel> {
    bank.classifiers
        .get(&d)
        .map(|c| c.predict(x))
        .ok_or(Error::MissingBpd(d))
}
