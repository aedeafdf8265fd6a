//! Synthetic recordings with known ground-truth behavioral regimes.
//!
//! Real ward recordings are not distributable, so every end-to-end claim is
//! exercised against generated data instead. A subject is described by a set
//! of regimes (categorical behavior distributions) and a daily schedule that
//! tiles the 8:00-18:00 window with regime intervals. Per day and regime the
//! generator draws a day-specific distribution from
//! `Dirichlet(concentration * behavior_distribution)`, samples one label per
//! 5-minute slot from it, and emits a 50 Hz 3-axis signal per slot from the
//! per-behavior signal model below. Day-to-day variance is controlled by the
//! concentration: large values pin each day to the regime mean, small values
//! make days differ wildly.
//!
//! Per-behavior signal model (axes x/y/z, gravity 9.81 on z, all in m/s^2),
//! nominal parameters before slot modulation:
//!
//! * `apathy`            white noise sigma 0.05 on all axes
//! * `restlessness`      sum of 6 random tones in 0.5-4 Hz, total sigma 0.8
//! * `mannerisms`        1 Hz tone amplitude 1.0 on one axis, sigma 0.05 noise
//! * `pacing`            2 Hz tone amplitude 2.0, sigma 0.3 noise
//! * `aggression`        sigma 0.3 noise plus sparse +-8 m/s^2 spikes
//! * `locomotion_intent` 2 Hz tone amplitude 1.2, sigma 0.3 noise
//! * `normal`            sigma 0.3 noise plus occasional 1 s noise bursts
//!
//! Every slot additionally draws a log-normal intensity factor
//! (`exp(1.1 N)`, applied to amplitudes, noise and spikes alike), a
//! log-normal tone-frequency factor (`exp(0.5 N)`), and the axis carrying
//! the tone (x or y). Wrist placement and movement vigor vary this way in
//! real recordings; without the modulation each class would be a nearly
//! deterministic template and classifiers would separate them almost
//! perfectly, which real annotated wrist data never allows. Pacing vs.
//! locomotion intent and apathy vs. normal differ only in scale, so they
//! stay genuinely confusable. Samples are quantized to 1e-4 m/s^2 so the
//! CSV round trip is exact.
//!
//! All sampling is keyed by `(seed, day, slot)` through [`crate::seeding`],
//! so equal `(spec, n_days, seed)` produce bit-identical recordings and the
//! label stream never depends on whether the signal is generated.

use chrono::{Days, NaiveDate};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{
    day_epoch_ms, AccelSample, AnnotationLabel, AnnotationRecord, Recording, DAY_END_MINUTE,
    DAY_START_MINUTE, N_LABELS, SLOT_MINUTES,
};
use crate::error::{Error, Result};
use crate::seeding;

/// Synthesis sample rate; the schema's nominal wrist-sensor rate.
pub const SIGNAL_RATE_HZ: f64 = 50.0;
const SAMPLE_INTERVAL_MS: i64 = 20;
const SAMPLES_PER_SLOT: usize = (SLOT_MINUTES as usize) * 60 * 50;
const GRAVITY: f64 = 9.81;

/// One behavioral regime: a categorical distribution over the seven labels
/// plus the Dirichlet concentration that sets its day-to-day variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub regime_id: usize,
    /// Nonnegative, sums to 1 within 1e-9.
    pub behavior_distribution: [f64; N_LABELS],
    /// Positive; larger means less day-to-day variance.
    pub dirichlet_concentration: f64,
}

/// One interval of the daily schedule, `[start_minute, end_minute)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub start_minute: u32,
    pub end_minute: u32,
    pub regime_id: usize,
}

/// A subject's full synthesis description: its regimes plus the daily
/// schedule tiling 480-1080 with regime intervals. The schedule repeats
/// every day; only the per-day Dirichlet draw changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectSpec {
    pub subject_id: String,
    pub regimes: Vec<RegimeSpec>,
    pub daily_schedule: Vec<ScheduleEntry>,
}

/// A whole synthetic dataset: one subject spec per subject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisSpec {
    /// Date of the first recorded day.
    pub start_date: NaiveDate,
    pub subjects: Vec<SubjectSpec>,
}

/// Ground-truth regime of one 5-minute slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeAssignment {
    pub day: NaiveDate,
    pub start_minute: u32,
    pub regime_id: usize,
}

impl SubjectSpec {
    /// Checks distribution and schedule invariants.
    ///
    /// The schedule must consist of disjoint intervals on the 5-minute grid
    /// covering the whole day window; a gap or overlap is a validation
    /// error.
    pub fn validate(&self) -> Result<()> {
        if self.regimes.is_empty() {
            return Err(Error::Validation(format!(
                "subject {}: no regimes",
                self.subject_id
            )));
        }
        for regime in &self.regimes {
            let sum: f64 = regime.behavior_distribution.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Validation(format!(
                    "subject {}: regime {} distribution sums to {sum}, expected 1",
                    self.subject_id, regime.regime_id
                )));
            }
            if regime.behavior_distribution.iter().any(|&p| p < 0.0) {
                return Err(Error::Validation(format!(
                    "subject {}: regime {} has a negative probability",
                    self.subject_id, regime.regime_id
                )));
            }
            if !regime.dirichlet_concentration.is_finite() || regime.dirichlet_concentration <= 0.0
            {
                return Err(Error::Validation(format!(
                    "subject {}: regime {} concentration must be positive",
                    self.subject_id, regime.regime_id
                )));
            }
        }
        let mut ids: Vec<usize> = self.regimes.iter().map(|r| r.regime_id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.regimes.len() {
            return Err(Error::Validation(format!(
                "subject {}: duplicate regime ids",
                self.subject_id
            )));
        }

        let mut schedule = self.daily_schedule.clone();
        schedule.sort_by_key(|e| e.start_minute);
        let mut cursor = DAY_START_MINUTE;
        for entry in &schedule {
            if entry.start_minute % SLOT_MINUTES != 0 || entry.end_minute % SLOT_MINUTES != 0 {
                return Err(Error::Validation(format!(
                    "subject {}: schedule interval {}..{} off the 5-minute grid",
                    self.subject_id, entry.start_minute, entry.end_minute
                )));
            }
            if entry.start_minute != cursor {
                return Err(Error::Validation(format!(
                    "subject {}: schedule gap or overlap at minute {} (next interval starts {})",
                    self.subject_id, cursor, entry.start_minute
                )));
            }
            if entry.end_minute <= entry.start_minute {
                return Err(Error::Validation(format!(
                    "subject {}: empty schedule interval at minute {}",
                    self.subject_id, entry.start_minute
                )));
            }
            if self.regime(entry.regime_id).is_none() {
                return Err(Error::Validation(format!(
                    "subject {}: schedule references unknown regime {}",
                    self.subject_id, entry.regime_id
                )));
            }
            cursor = entry.end_minute;
        }
        if cursor != DAY_END_MINUTE {
            return Err(Error::Validation(format!(
                "subject {}: schedule ends at minute {cursor}, expected {DAY_END_MINUTE}",
                self.subject_id
            )));
        }
        Ok(())
    }

    fn regime(&self, id: usize) -> Option<&RegimeSpec> {
        self.regimes.iter().find(|r| r.regime_id == id)
    }

    fn sorted_schedule(&self) -> Vec<ScheduleEntry> {
        let mut schedule = self.daily_schedule.clone();
        schedule.sort_by_key(|e| e.start_minute);
        schedule
    }
}

impl SynthesisSpec {
    pub fn validate(&self) -> Result<()> {
        if self.subjects.is_empty() {
            return Err(Error::Validation("synthesis spec has no subjects".into()));
        }
        for subject in &self.subjects {
            subject.validate()?;
        }
        Ok(())
    }

    /// Parses a synthesis spec from its JSON form.
    pub fn from_json(text: &str) -> Result<SynthesisSpec> {
        let spec: SynthesisSpec = serde_json::from_str(text)
            .map_err(|e| Error::Validation(format!("bad synthesis spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// The built-in eight-subject dataset used by default.
    ///
    /// Each subject has four regimes of 150 minutes, each dominated by a
    /// different behavior (weight 0.7, remainder spread evenly), with
    /// concentration 1.3 so the realized mix swings strongly from day to day.
    pub fn default_eight_subjects() -> SynthesisSpec {
        use AnnotationLabel::*;
        let plans: [(&str, [AnnotationLabel; 4]); 8] = [
            ("s01", [Apathy, Normal, Pacing, Mannerisms]),
            ("s02", [Normal, Apathy, LocomotionIntent, Restlessness]),
            ("s03", [Mannerisms, Pacing, Normal, Apathy]),
            ("s04", [Restlessness, Mannerisms, Apathy, Normal]),
            ("s05", [Apathy, Restlessness, Normal, Pacing]),
            ("s06", [Normal, LocomotionIntent, Mannerisms, Apathy]),
            ("s07", [Pacing, Normal, Restlessness, Mannerisms]),
            ("s08", [Apathy, Mannerisms, Normal, LocomotionIntent]),
        ];
        let subjects = plans
            .iter()
            .map(|(id, dominants)| SubjectSpec {
                subject_id: (*id).to_owned(),
                regimes: dominants
                    .iter()
                    .enumerate()
                    .map(|(r, &dominant)| RegimeSpec {
                        regime_id: r,
                        behavior_distribution: dominated_distribution(dominant, 0.7),
                        dirichlet_concentration: 1.3,
                    })
                    .collect(),
                daily_schedule: (0..4)
                    .map(|r| ScheduleEntry {
                        start_minute: DAY_START_MINUTE + r * 150,
                        end_minute: DAY_START_MINUTE + (r + 1) * 150,
                        regime_id: r as usize,
                    })
                    .collect(),
            })
            .collect();
        SynthesisSpec {
            start_date: NaiveDate::from_ymd_opt(2023, 1, 2).expect("fixed date"),
            subjects,
        }
    }
}

/// A distribution putting `weight` on `dominant` and spreading the rest
/// evenly over the other six labels.
pub fn dominated_distribution(dominant: AnnotationLabel, weight: f64) -> [f64; N_LABELS] {
    let rest = (1.0 - weight) / (N_LABELS - 1) as f64;
    let mut probs = [rest; N_LABELS];
    probs[dominant.index()] = weight;
    probs
}

/// A distribution concentrated entirely on one label.
pub fn one_hot(label: AnnotationLabel) -> [f64; N_LABELS] {
    let mut probs = [0.0; N_LABELS];
    probs[label.index()] = 1.0;
    probs
}

/// Samples the annotation stream and ground truth without synthesizing the
/// signal. Identical to the label part of [`generate_recording`].
pub fn generate_labels(
    spec: &SubjectSpec,
    start_date: NaiveDate,
    n_days: u32,
    seed: u64,
) -> Result<(Vec<AnnotationRecord>, Vec<RegimeAssignment>)> {
    spec.validate()?;
    if n_days == 0 {
        return Err(Error::InvalidArgument("n_days must be at least 1".into()));
    }
    let tag = seeding::fnv1a("synth-labels");
    let schedule = spec.sorted_schedule();
    let mut annotations = Vec::new();
    let mut truth = Vec::new();
    for day_index in 0..n_days {
        let day = start_date + Days::new(u64::from(day_index));
        for (interval_index, entry) in schedule.iter().enumerate() {
            let regime = spec
                .regime(entry.regime_id)
                .expect("validated schedule references known regimes");
            let mut rng = seeding::rng(seeding::derive(
                seed,
                &[tag, u64::from(day_index), interval_index as u64],
            ));
            let day_distribution = dirichlet_day_distribution(regime, &mut rng);
            let mut minute = entry.start_minute;
            while minute < entry.end_minute {
                let label = sample_categorical(&day_distribution, &mut rng);
                annotations.push(AnnotationRecord {
                    day,
                    start_minute: minute,
                    label,
                });
                truth.push(RegimeAssignment {
                    day,
                    start_minute: minute,
                    regime_id: entry.regime_id,
                });
                minute += SLOT_MINUTES;
            }
        }
    }
    Ok((annotations, truth))
}

/// Generates a full synthetic recording plus its per-slot regime ground
/// truth. Deterministic given `(spec, start_date, n_days, seed)`.
pub fn generate_recording(
    spec: &SubjectSpec,
    start_date: NaiveDate,
    n_days: u32,
    seed: u64,
) -> Result<(Recording, Vec<RegimeAssignment>)> {
    let (annotations, truth) = generate_labels(spec, start_date, n_days, seed)?;
    let tag = seeding::fnv1a("synth-signal");
    let mut samples = Vec::with_capacity(annotations.len() * SAMPLES_PER_SLOT);
    for (slot_index, a) in annotations.iter().enumerate() {
        let day_index = (a.day - start_date).num_days() as u64;
        let slot = u64::from((a.start_minute - DAY_START_MINUTE) / SLOT_MINUTES);
        let mut rng = seeding::rng(seeding::derive(seed, &[tag, day_index, slot]));
        let slot_start_ms = day_epoch_ms(a.day) + i64::from(a.start_minute) * 60_000;
        synthesize_slot(a.label, slot_start_ms, &mut rng, &mut samples);
        debug_assert_eq!(samples.len(), (slot_index + 1) * SAMPLES_PER_SLOT);
    }
    let recording = Recording::new(spec.subject_id.clone(), SIGNAL_RATE_HZ, samples, annotations)?;
    Ok((recording, truth))
}

fn dirichlet_day_distribution(regime: &RegimeSpec, rng: &mut ChaCha8Rng) -> [f64; N_LABELS] {
    let mut weights = [0.0; N_LABELS];
    let mut total = 0.0;
    for (i, &p) in regime.behavior_distribution.iter().enumerate() {
        let alpha = regime.dirichlet_concentration * p;
        if alpha > 0.0 {
            weights[i] = sample_gamma(alpha, rng);
            total += weights[i];
        }
    }
    if total > 0.0 {
        for w in &mut weights {
            *w /= total;
        }
        weights
    } else {
        // All gamma draws underflowed; fall back to the regime mean.
        regime.behavior_distribution
    }
}

fn sample_categorical(probs: &[f64; N_LABELS], rng: &mut ChaCha8Rng) -> AnnotationLabel {
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return AnnotationLabel::ALL[i];
        }
    }
    // Rounding left u just above the final cumulative sum.
    *AnnotationLabel::ALL.last().expect("seven labels")
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; the second variate is discarded to keep the stream
    // position a simple function of the draw count.
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Marsaglia-Tsang gamma sampling, shape `alpha`, scale 1.
fn sample_gamma(alpha: f64, rng: &mut ChaCha8Rng) -> f64 {
    if alpha < 1.0 {
        // Boost: Gamma(a) = Gamma(a + 1) * U^(1/a).
        let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        return sample_gamma(alpha + 1.0, rng) * u.powf(1.0 / alpha);
    }
    let d = alpha - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = standard_normal(rng);
        let v = (1.0 + c * x).powi(3);
        if v <= 0.0 {
            continue;
        }
        let u: f64 = rng.random();
        if u < 1.0 - 0.0331 * x.powi(4) {
            return d * v;
        }
        if u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

fn quantize(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

/// Per-slot modulation of the nominal class template.
struct SlotMod {
    /// Log-normal scale on amplitudes, noise and spikes.
    intensity: f64,
    /// Log-normal scale on tone frequencies.
    freq_scale: f64,
    /// Axis carrying the tone: 0 (x) or 1 (y).
    tone_axis: usize,
}

impl SlotMod {
    fn draw(rng: &mut ChaCha8Rng) -> SlotMod {
        SlotMod {
            intensity: (1.1 * standard_normal(rng)).exp(),
            freq_scale: (0.5 * standard_normal(rng)).exp(),
            tone_axis: usize::from(rng.random::<f64>() < 0.5),
        }
    }
}

fn synthesize_slot(
    label: AnnotationLabel,
    slot_start_ms: i64,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<AccelSample>,
) {
    use AnnotationLabel::*;
    let slot_mod = SlotMod::draw(rng);
    match label {
        Apathy => noise_slot(slot_start_ms, 0.05 * slot_mod.intensity, rng, out),
        Normal => burst_noise_slot(slot_start_ms, &slot_mod, rng, out),
        Pacing => tone_slot(slot_start_ms, 2.0, 2.0, 0.3, &slot_mod, rng, out),
        LocomotionIntent => tone_slot(slot_start_ms, 2.0, 1.2, 0.3, &slot_mod, rng, out),
        Mannerisms => tone_slot(slot_start_ms, 1.0, 1.0, 0.05, &slot_mod, rng, out),
        Restlessness => band_noise_slot(slot_start_ms, &slot_mod, rng, out),
        Aggression => spike_slot(slot_start_ms, &slot_mod, rng, out),
    }
}

fn push_sample(out: &mut Vec<AccelSample>, t_ms: i64, ax: f64, ay: f64, az: f64) {
    out.push(AccelSample {
        timestamp_ms: t_ms,
        ax: quantize(ax),
        ay: quantize(ay),
        az: quantize(az + GRAVITY),
    });
}

fn noise_slot(start_ms: i64, sigma: f64, rng: &mut ChaCha8Rng, out: &mut Vec<AccelSample>) {
    for i in 0..SAMPLES_PER_SLOT {
        let t = start_ms + i as i64 * SAMPLE_INTERVAL_MS;
        push_sample(
            out,
            t,
            sigma * standard_normal(rng),
            sigma * standard_normal(rng),
            sigma * standard_normal(rng),
        );
    }
}

/// sigma 0.3 noise with 1-second bursts of sigma 1.0 noise;
/// each second opens a burst with probability 0.1.
fn burst_noise_slot(
    start_ms: i64,
    slot_mod: &SlotMod,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<AccelSample>,
) {
    let per_second = SIGNAL_RATE_HZ as usize;
    let mut sigma = 0.3;
    for i in 0..SAMPLES_PER_SLOT {
        if i % per_second == 0 {
            sigma = slot_mod.intensity * if rng.random::<f64>() < 0.1 { 1.0 } else { 0.3 };
        }
        let t = start_ms + i as i64 * SAMPLE_INTERVAL_MS;
        push_sample(
            out,
            t,
            sigma * standard_normal(rng),
            sigma * standard_normal(rng),
            sigma * standard_normal(rng),
        );
    }
}

/// A tone of `freq_hz`/`amplitude` on the slot's tone axis with a random
/// phase, plus white noise on all axes.
fn tone_slot(
    start_ms: i64,
    freq_hz: f64,
    amplitude: f64,
    sigma: f64,
    slot_mod: &SlotMod,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<AccelSample>,
) {
    let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    let freq = freq_hz * slot_mod.freq_scale;
    let amplitude = amplitude * slot_mod.intensity;
    let sigma = sigma * slot_mod.intensity;
    for i in 0..SAMPLES_PER_SLOT {
        let t = start_ms + i as i64 * SAMPLE_INTERVAL_MS;
        let seconds = i as f64 / SIGNAL_RATE_HZ;
        let tone = amplitude * (std::f64::consts::TAU * freq * seconds + phase).sin();
        let mut value = [
            sigma * standard_normal(rng),
            sigma * standard_normal(rng),
            sigma * standard_normal(rng),
        ];
        value[slot_mod.tone_axis] += tone;
        push_sample(out, t, value[0], value[1], value[2]);
    }
}

/// Band-limited noise: six tones with frequencies uniform in 0.5-4 Hz and
/// random phases per axis, scaled to total sigma 0.8.
fn band_noise_slot(
    start_ms: i64,
    slot_mod: &SlotMod,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<AccelSample>,
) {
    const TONES: usize = 6;
    let amplitude = slot_mod.intensity * 0.8 * (2.0 / TONES as f64).sqrt();
    let mut banks = [[(0.0, 0.0); TONES]; 3];
    for axis_bank in &mut banks {
        for tone in axis_bank.iter_mut() {
            let freq = (0.5 + rng.random::<f64>() * 3.5) * slot_mod.freq_scale;
            let phase = rng.random::<f64>() * std::f64::consts::TAU;
            *tone = (freq, phase);
        }
    }
    for i in 0..SAMPLES_PER_SLOT {
        let t = start_ms + i as i64 * SAMPLE_INTERVAL_MS;
        let seconds = i as f64 / SIGNAL_RATE_HZ;
        let mut value = [0.0; 3];
        for (axis, axis_bank) in banks.iter().enumerate() {
            value[axis] = axis_bank
                .iter()
                .map(|&(f, p)| amplitude * (std::f64::consts::TAU * f * seconds + p).sin())
                .sum();
        }
        push_sample(out, t, value[0], value[1], value[2]);
    }
}

/// sigma 0.3 noise with sparse spikes: each second holds a 3-sample spike of
/// +-8 m/s^2 on one axis with probability 0.25.
fn spike_slot(
    start_ms: i64,
    slot_mod: &SlotMod,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<AccelSample>,
) {
    let per_second = SIGNAL_RATE_HZ as usize;
    let seconds = SAMPLES_PER_SLOT / per_second;
    let sigma = 0.3 * slot_mod.intensity;
    let spike_amp = 8.0 * slot_mod.intensity;
    // (sample offset, axis, signed amplitude) per spiking second.
    let mut spikes: Vec<(usize, usize, f64)> = Vec::new();
    for s in 0..seconds {
        if rng.random::<f64>() < 0.25 {
            let offset = rng.random_range(0..per_second - 2);
            let axis = rng.random_range(0..3usize);
            let sign = if rng.random::<f64>() < 0.5 { -1.0 } else { 1.0 };
            spikes.push((s * per_second + offset, axis, sign * spike_amp));
        }
    }
    let mut next_spike = 0;
    let mut active: Option<(usize, usize, f64)> = None;
    for i in 0..SAMPLES_PER_SLOT {
        if next_spike < spikes.len() && spikes[next_spike].0 == i {
            active = Some(spikes[next_spike]);
            next_spike += 1;
        }
        let mut value = [
            sigma * standard_normal(rng),
            sigma * standard_normal(rng),
            sigma * standard_normal(rng),
        ];
        if let Some((start, axis, amp)) = active {
            if i < start + 3 {
                value[axis] += amp;
            } else {
                active = None;
            }
        }
        let t = start_ms + i as i64 * SAMPLE_INTERVAL_MS;
        push_sample(out, t, value[0], value[1], value[2]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn start() -> NaiveDate {
        NaiveDate::from_ymd_opt(2023, 1, 2).unwrap()
    }

    fn single_regime_spec(probs: [f64; N_LABELS], concentration: f64) -> SubjectSpec {
        SubjectSpec {
            subject_id: "t".into(),
            regimes: vec![RegimeSpec {
                regime_id: 0,
                behavior_distribution: probs,
                dirichlet_concentration: concentration,
            }],
            daily_schedule: vec![ScheduleEntry {
                start_minute: DAY_START_MINUTE,
                end_minute: DAY_END_MINUTE,
                regime_id: 0,
            }],
        }
    }

    #[test]
    fn one_hot_regime_yields_only_that_label() {
        let spec = single_regime_spec(one_hot(AnnotationLabel::Apathy), 1.0);
        let (annotations, truth) = generate_labels(&spec, start(), 2, 7).unwrap();
        assert_eq!(annotations.len(), 240);
        assert!(annotations.iter().all(|a| a.label == AnnotationLabel::Apathy));
        assert!(truth.iter().all(|t| t.regime_id == 0));
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = single_regime_spec(dominated_distribution(AnnotationLabel::Pacing, 0.6), 2.0);
        let (first, truth_a) = generate_recording(&spec, start(), 1, 99).unwrap();
        let (second, truth_b) = generate_recording(&spec, start(), 1, 99).unwrap();
        assert_eq!(first, second);
        assert_eq!(truth_a, truth_b);
        let (third, _) = generate_recording(&spec, start(), 1, 100).unwrap();
        assert_ne!(first, third);
    }

    #[test]
    fn two_one_hot_regimes_split_the_day_exactly() {
        let spec = SubjectSpec {
            subject_id: "t".into(),
            regimes: vec![
                RegimeSpec {
                    regime_id: 0,
                    behavior_distribution: one_hot(AnnotationLabel::Apathy),
                    dirichlet_concentration: 1.0,
                },
                RegimeSpec {
                    regime_id: 1,
                    behavior_distribution: one_hot(AnnotationLabel::Pacing),
                    dirichlet_concentration: 1.0,
                },
            ],
            daily_schedule: vec![
                ScheduleEntry {
                    start_minute: 480,
                    end_minute: 780,
                    regime_id: 0,
                },
                ScheduleEntry {
                    start_minute: 780,
                    end_minute: 1080,
                    regime_id: 1,
                },
            ],
        };
        let (annotations, _) = generate_labels(&spec, start(), 5, 3).unwrap();
        // Count labels per slot position over the 5 days: mornings must be
        // all apathy, afternoons all pacing, exactly.
        for a in &annotations {
            let expected = if a.start_minute < 780 {
                AnnotationLabel::Apathy
            } else {
                AnnotationLabel::Pacing
            };
            assert_eq!(a.label, expected, "slot {} on {}", a.start_minute, a.day);
        }
    }

    #[test]
    fn high_concentration_matches_target_frequencies() {
        let probs = [0.3, 0.1, 0.05, 0.25, 0.05, 0.05, 0.2];
        let spec = single_regime_spec(probs, 1e6);
        // 2 days x 120 slots = 240 slots >= the 200 required by the check.
        let (annotations, _) = generate_labels(&spec, start(), 2, 11).unwrap();
        let mut counts = [0usize; N_LABELS];
        for a in &annotations {
            counts[a.label.index()] += 1;
        }
        let n = annotations.len() as f64;
        for (i, &c) in counts.iter().enumerate() {
            let freq = c as f64 / n;
            assert!(
                (freq - probs[i]).abs() <= 0.05,
                "label {i}: empirical {freq:.3} vs target {}",
                probs[i]
            );
        }
    }

    #[test]
    fn schedule_gap_is_rejected() {
        let mut spec = single_regime_spec(one_hot(AnnotationLabel::Normal), 1.0);
        spec.daily_schedule[0].end_minute = 1000;
        let err = generate_labels(&spec, start(), 1, 0).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn signal_has_expected_shape() {
        let spec = single_regime_spec(one_hot(AnnotationLabel::Apathy), 1.0);
        let (recording, _) = generate_recording(&spec, start(), 1, 5).unwrap();
        assert_eq!(recording.samples.len(), 120 * SAMPLES_PER_SLOT);
        assert_eq!(recording.sample_rate_hz, SIGNAL_RATE_HZ);
        assert!(recording.coverage_gaps.is_empty());
        // Apathy hugs the gravity axis.
        let mean_az: f64 = recording.samples.iter().map(|s| s.az).sum::<f64>()
            / recording.samples.len() as f64;
        assert!((mean_az - GRAVITY).abs() < 0.01, "mean az {mean_az}");
        // Quantization: every value is a multiple of 1e-4.
        for s in recording.samples.iter().take(1000) {
            assert_eq!(quantize(s.ax), s.ax);
        }
    }

    #[test]
    fn default_spec_is_valid_and_has_eight_subjects() {
        let spec = SynthesisSpec::default_eight_subjects();
        spec.validate().unwrap();
        assert_eq!(spec.subjects.len(), 8);
        for subject in &spec.subjects {
            assert_eq!(subject.regimes.len(), 4);
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = SynthesisSpec::default_eight_subjects();
        let parsed = SynthesisSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(parsed, spec);
    }
}
