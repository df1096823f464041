//! Kneedle knee detection on an ascending score curve.

use serde::{Deserialize, Serialize};

pub const DEFAULT_SENSITIVITY: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KneeResult {
    pub cutoff: f64,
    /// Position of `cutoff` in the ascending list.
    pub index: usize,
    pub found: bool,
}

impl KneeResult {
    pub fn none() -> KneeResult {
        KneeResult { cutoff: 0.0, index: 0, found: false }
    }
}

/// Knee of `scores`, which must be sorted ascending. The curve is treated as
/// convex and increasing: it is normalized to the unit square, flipped so the
/// knee becomes a maximum of the difference curve, and a local maximum counts
/// as a knee once the curve afterwards falls below its sensitivity threshold.
/// Of several knees the one with the largest difference value wins.
pub fn find_knee(scores: &[f64], sensitivity: f64) -> KneeResult {
    let n = scores.len();
    if n < 3 || scores.iter().any(|s| !s.is_finite()) {
        return KneeResult::none();
    }
    let (lo, hi) = (scores[0], scores[n - 1]);
    if hi - lo <= 0.0 {
        return KneeResult::none();
    }
    let step = 1.0 / (n - 1) as f64;
    // Flipped curve: position t corresponds to index n - 1 - t of `scores`.
    let diff: Vec<f64> = (0..n)
        .map(|t| {
            let y = (scores[n - 1 - t] - lo) / (hi - lo);
            1.0 - y - t as f64 * step
        })
        .collect();
    let (dmin, dmax) = diff.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &d| (a.min(d), b.max(d)));
    if dmax - dmin < 1e-9 {
        return KneeResult::none();
    }

    let is_max = |i: usize| (i == 0 || diff[i] >= diff[i - 1]) && (i == n - 1 || diff[i] >= diff[i + 1]);
    let is_min = |i: usize| (i == 0 || diff[i] <= diff[i - 1]) && (i == n - 1 || diff[i] <= diff[i + 1]);
    let Some(first_max) = (0..n).find(|&i| is_max(i)) else { return KneeResult::none() };

    let mut threshold = f64::NEG_INFINITY;
    let mut threshold_index = first_max;
    let mut best: Option<usize> = None;
    for i in first_max..n - 1 {
        if is_max(i) {
            threshold = diff[i] - sensitivity * step;
            threshold_index = i;
        }
        if is_min(i) {
            threshold = 0.0;
        }
        if diff[i + 1] < threshold && best.map_or(true, |b| diff[threshold_index] > diff[b]) {
            best = Some(threshold_index);
        }
    }
    match best {
        Some(t) => {
            let index = n - 1 - t;
            KneeResult { cutoff: scores[index], index, found: true }
        }
        None => KneeResult::none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn two_regimes() {
        let mut s = linspace(0.0, 0.1, 900);
        s.extend(linspace(0.7, 1.0, 100));
        let k = find_knee(&s, DEFAULT_SENSITIVITY);
        assert!(k.found);
        assert!((0.1..=0.7).contains(&k.cutoff), "{k:?}");
        assert_eq!(s[k.index], k.cutoff);
    }

    #[test]
    fn linear_ramp_and_constant() {
        assert!(!find_knee(&linspace(0.0, 1.0, 500), DEFAULT_SENSITIVITY).found);
        assert!(!find_knee(&[0.4; 50], DEFAULT_SENSITIVITY).found);
        assert!(!find_knee(&[0.1, 0.9], DEFAULT_SENSITIVITY).found);
    }

    #[test]
    fn zero_mass_then_high() {
        let mut s = vec![0.0; 500];
        s.extend(linspace(0.8, 1.0, 500));
        let k = find_knee(&s, DEFAULT_SENSITIVITY);
        assert!(k.found);
        assert_eq!((k.index, k.cutoff), (499, 0.0));
    }

    #[test]
    fn convex_curve_knee() {
        // y = x^4 on [0,1]: knee of the flipped difference curve near x = 0.67.
        let s: Vec<f64> = linspace(0.0, 1.0, 101).iter().map(|x| x.powi(4)).collect();
        let k = find_knee(&s, DEFAULT_SENSITIVITY);
        assert!(k.found);
        let x = k.index as f64 / 100.0;
        let expected = (1.0f64 / 4.0).powf(1.0 / 3.0);
        assert!((x - expected).abs() <= 0.011, "{x} vs {expected}");
    }
}
