//! Peak detection on sampled trajectories.

use serde::{Deserialize, Serialize};

/// Default prominence for [`first_prominent_maximum`], in the units of the
/// signal (populations and fidelities here).
pub const PEAK_PROMINENCE: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Sample index of the discrete maximum.
    pub index: usize,
    /// Refined time and value.
    pub time: f64,
    pub value: f64,
}

/// Vertex of the parabola through the samples at `i-1, i, i+1`, assuming a
/// uniform grid. Falls back to the sample itself at the ends or on a
/// degenerate (flat or convex) bracket.
pub fn refine(times: &[f64], values: &[f64], i: usize) -> Peak {
    let fallback = Peak { index: i, time: times[i], value: values[i] };
    if i == 0 || i + 1 >= values.len() {
        return fallback;
    }
    let (ym, y0, yp) = (values[i - 1], values[i], values[i + 1]);
    let curv = ym - 2.0 * y0 + yp;
    if !(curv < 0.0) {
        return fallback;
    }
    let h = 0.5 * (times[i + 1] - times[i - 1]);
    let shift = (0.5 * (ym - yp) / curv).clamp(-0.5, 0.5);
    Peak { index: i, time: times[i] + shift * h, value: y0 + 0.5 * shift * (yp - ym) + 0.5 * shift * shift * curv }
}

/// Quadratic interpolation of `values` at the refined position of `peak`,
/// using the same three samples.
pub fn value_at(times: &[f64], values: &[f64], peak: &Peak) -> f64 {
    let i = peak.index;
    if i == 0 || i + 1 >= values.len() {
        return values[i];
    }
    let h = 0.5 * (times[i + 1] - times[i - 1]);
    let s = (peak.time - times[i]) / h;
    let (ym, y0, yp) = (values[i - 1], values[i], values[i + 1]);
    y0 + 0.5 * s * (yp - ym) + 0.5 * s * s * (yp - 2.0 * y0 + ym)
}

/// First discrete local maximum at or after `start` (strictly above the
/// previous sample, not below the next; ties go to the earlier sample).
pub fn first_local_maximum(values: &[f64], start: usize) -> Option<usize> {
    (start.max(1)..values.len().saturating_sub(1)).find(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1] && descends_after(values, i))
}

/// First local maximum at or after `start` that is not a ripple: before the
/// signal climbs above it again it must fall by at least `prominence`
/// (or it is never exceeded later).
pub fn first_prominent_maximum(values: &[f64], start: usize, prominence: f64) -> Option<usize> {
    let mut i = start.max(1);
    while i + 1 < values.len() {
        if values[i] > values[i - 1] && values[i] >= values[i + 1] && descends_after(values, i) {
            let top = values[i];
            let mut prominent = true;
            for &v in &values[i + 1..] {
                if v > top {
                    prominent = false;
                    break;
                }
                if v <= top - prominence {
                    break;
                }
            }
            if prominent {
                return Some(i);
            }
        }
        i += 1;
    }
    None
}

/// Index of the global maximum; ties go to the earliest sample.
pub fn global_maximum(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

/// On a plateau starting at `i`, the next differing sample must be lower.
fn descends_after(values: &[f64], i: usize) -> bool {
    values[i + 1..].iter().find(|&&v| v != values[i]).is_none_or(|&v| v < values[i])
}
