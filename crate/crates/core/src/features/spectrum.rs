//! DFT helpers for the frequency features.
//!
//! The feature path works on the mean-removed, Hann-windowed signal and
//! looks only at the positive-frequency bins `1..=n/2`. A constant window
//! therefore produces an all-zero spectrum, and both frequency features are
//! defined as 0 in that case (the zero-signal convention).

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Magnitudes of the positive-frequency bins `1..=n/2` of the mean-removed
/// signal, Hann-windowed when `hann` is set.
pub fn half_spectrum(x: &[f64], hann: bool) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return Vec::new();
    }
    let m = mean(x);
    let mut buf: Vec<Complex<f64>> = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let w = if hann {
                0.5 * (1.0 - (std::f64::consts::TAU * i as f64 / (n - 1) as f64).cos())
            } else {
                1.0
            };
            Complex::new((v - m) * w, 0.0)
        })
        .collect();
    plan(n).process(&mut buf);
    buf[1..=n / 2].iter().map(|c| c.norm()).collect()
}

/// Frequency in Hz of the strongest positive-frequency bin; 0 for an
/// all-zero spectrum. Ties resolve to the lowest bin.
pub fn dominant_frequency(mags: &[f64], n: usize, rate_hz: f64) -> f64 {
    let mut best = 0.0;
    let mut best_bin = 0usize;
    for (i, &m) in mags.iter().enumerate() {
        if m > best {
            best = m;
            best_bin = i + 1;
        }
    }
    if best == 0.0 {
        return 0.0;
    }
    best_bin as f64 * rate_hz / n as f64
}

/// Shannon entropy of the normalized power spectrum over the positive bins,
/// itself normalized by `ln(#bins)` into `[0, 1]`; 0 for an all-zero
/// spectrum or a single bin.
pub fn spectral_entropy(mags: &[f64]) -> f64 {
    let total: f64 = mags.iter().map(|m| m * m).sum();
    if total == 0.0 || mags.len() < 2 {
        return 0.0;
    }
    let mut h = 0.0;
    for &m in mags {
        let p = m * m / total;
        if p > 0.0 {
            h -= p * p.ln();
        }
    }
    h / (mags.len() as f64).ln()
}

/// Spectral energy of the mean-removed, un-windowed signal excluding the
/// zero-frequency bin: `sum_{k=1}^{n-1} |X_k|^2 / n`.
///
/// By Parseval's identity this equals the time-domain energy
/// `sum_i (x_i - mean)^2` up to floating-point error; the test suites hold
/// the two within 1e-6 relative.
pub fn spectral_energy_excluding_dc(x: &[f64]) -> f64 {
    let n = x.len();
    if n == 0 {
        return 0.0;
    }
    let m = mean(x);
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v - m, 0.0)).collect();
    plan(n).process(&mut buf);
    buf[1..].iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64
}
