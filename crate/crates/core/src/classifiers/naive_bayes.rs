//! Gaussian naive Bayes with empirical class priors and per-feature
//! mean/variance likelihoods.
//!
//! Variances are floored at `1e-9 * max_j var(feature j)` computed over the
//! whole training set of this classifier (or `1e-9` absolute when every
//! feature is constant), so single-class or constant-feature partitions
//! keep finite likelihoods.

use crate::dataset::AnnotationLabel;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDensity {
    pub label: AnnotationLabel,
    pub prior: f64,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    pub dim: usize,
    /// In canonical label order; priors sum to 1.
    pub classes: Vec<ClassDensity>,
}

impl NaiveBayesModel {
    pub fn train(data: &[(&[f64], AnnotationLabel)]) -> NaiveBayesModel {
        let dim = data[0].0.len();
        let n = data.len() as f64;

        // Global per-feature variance for the floor.
        let mut global_mean = vec![0.0; dim];
        for (x, _) in data {
            for (m, &v) in global_mean.iter_mut().zip(x.iter()) {
                *m += v;
            }
        }
        for m in &mut global_mean {
            *m /= n;
        }
        let mut global_var = vec![0.0; dim];
        for (x, _) in data {
            for j in 0..dim {
                let d = x[j] - global_mean[j];
                global_var[j] += d * d;
            }
        }
        for v in &mut global_var {
            *v /= n;
        }
        let max_var = global_var.iter().cloned().fold(0.0, f64::max);
        let floor = if max_var > 0.0 { 1e-9 * max_var } else { 1e-9 };

        let mut classes = Vec::new();
        for label in AnnotationLabel::ALL {
            let members: Vec<&[f64]> = data
                .iter()
                .filter(|(_, l)| *l == label)
                .map(|(x, _)| *x)
                .collect();
            if members.is_empty() {
                continue;
            }
            let count = members.len() as f64;
            let mut means = vec![0.0; dim];
            for x in &members {
                for (m, &v) in means.iter_mut().zip(x.iter()) {
                    *m += v;
                }
            }
            for m in &mut means {
                *m /= count;
            }
            let mut variances = vec![0.0; dim];
            for x in &members {
                for j in 0..dim {
                    let d = x[j] - means[j];
                    variances[j] += d * d;
                }
            }
            for v in &mut variances {
                *v = (*v / count).max(floor);
            }
            classes.push(ClassDensity {
                label,
                prior: count / n,
                means,
                variances,
            });
        }
        NaiveBayesModel { dim, classes }
    }

    fn log_joint(&self, x: &[f64]) -> Vec<f64> {
        self.classes
            .iter()
            .map(|c| {
                let mut lp = c.prior.ln();
                for ((&xj, &mean), &var) in x.iter().zip(&c.means).zip(&c.variances) {
                    let d = xj - mean;
                    lp += -0.5 * (std::f64::consts::TAU * var).ln() - d * d / (2.0 * var);
                }
                lp
            })
            .collect()
    }

    /// Normalized class posteriors in the order of `self.classes`;
    /// sums to 1 for any finite input.
    pub fn posteriors(&self, x: &[f64]) -> Vec<f64> {
        let log_joint = self.log_joint(x);
        let max = log_joint.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let unnormalized: Vec<f64> = log_joint.iter().map(|lp| (lp - max).exp()).collect();
        let total: f64 = unnormalized.iter().sum();
        unnormalized.into_iter().map(|p| p / total).collect()
    }

    /// Argmax posterior; ties break toward the lowest canonical index.
    pub fn predict(&self, x: &[f64]) -> AnnotationLabel {
        let log_joint = self.log_joint(x);
        let mut best = 0usize;
        for (i, &lp) in log_joint.iter().enumerate() {
            if lp > log_joint[best] {
                best = i;
            }
        }
        self.classes[best].label
    }

    pub fn classes_seen(&self) -> Vec<AnnotationLabel> {
        self.classes.iter().map(|c| c.label).collect()
    }
}
