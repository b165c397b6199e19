//! Finite sets of scales.

use crate::error::{Error, Result};

/// Strictly increasing positive scales, with the positions of exact powers of
/// two recorded as dyadic anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
    anchors: Vec<usize>,
}

/// `true` when `t` is exactly `2^k` for some integer `k`.
pub fn is_power_of_two(t: f64) -> bool {
    t.is_normal() && t > 0.0 && t.to_bits() & ((1u64 << 52) - 1) == 0
}

/// The `k` with `t ∈ (2^k, 2^{k+1}]`.
pub fn dyadic_block(t: f64) -> i32 {
    assert!(t.is_normal() && t > 0.0, "scale {t} must be a positive normal float");
    let e = ((t.to_bits() >> 52) & 0x7ff) as i32 - 1023;
    if is_power_of_two(t) {
        e - 1
    } else {
        e
    }
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if let Some(t) = times.iter().find(|t| !(t.is_normal() && **t > 0.0)) {
            return Err(Error::InvalidTimeGrid(format!("scale {t} is not a positive number")));
        }
        if let Some(w) = times.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidTimeGrid(format!("scales {} and {} are not increasing", w[0], w[1])));
        }
        let anchors = times
            .iter()
            .enumerate()
            .filter(|(_, t)| is_power_of_two(**t))
            .map(|(i, _)| i)
            .collect();
        Ok(Self { times, anchors })
    }

    /// `2^kmin, …, 2^kmax`.
    pub fn dyadic(kmin: i32, kmax: i32) -> Result<Self> {
        Self::new((kmin..=kmax).map(|k| 2f64.powi(k)).collect())
    }

    /// Sorts, removes duplicates and adds the closing anchor `2^{k+1}` of the
    /// block `(2^k, 2^{k+1}]` of every scale.
    pub fn with_closing_anchors(mut times: Vec<f64>) -> Result<Self> {
        let extra: Vec<f64> = times
            .iter()
            .filter(|t| t.is_normal() && **t > 0.0)
            .map(|&t| 2f64.powi(dyadic_block(t) + 1))
            .collect();
        times.extend(extra);
        times.sort_by(f64::total_cmp);
        times.dedup();
        Self::new(times)
    }

    /// `per_octave` geometrically spaced scales per dyadic block covering
    /// `[t_min, t_max]`, anchors included.
    pub fn geometric(t_min: f64, t_max: f64, per_octave: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_min < t_max && per_octave >= 1) {
            return Err(Error::InvalidTimeGrid(format!(
                "need 0 < t_min < t_max and per_octave >= 1, got ({t_min}, {t_max}, {per_octave})"
            )));
        }
        let mut times = Vec::new();
        let mut k = dyadic_block(t_min);
        loop {
            let base = 2f64.powi(k);
            for i in 1..=per_octave {
                let t = if i == per_octave { 2.0 * base } else { base * 2f64.powf(i as f64 / per_octave as f64) };
                if t >= t_min && t <= t_max {
                    times.push(t);
                }
            }
            if 2.0 * base >= t_max {
                break;
            }
            k += 1;
        }
        Self::with_closing_anchors(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Indices of the exact powers of two.
    pub fn anchors(&self) -> &[usize] {
        &self.anchors
    }

    /// Every scale's block has its closing anchor in the grid.
    pub fn has_closing_anchors(&self) -> bool {
        self.times.iter().all(|&t| {
            let a = 2f64.powi(dyadic_block(t) + 1);
            self.times.binary_search_by(|x| x.total_cmp(&a)).is_ok()
        })
    }

    /// Index ranges of the blocks `(2^k, 2^{k+1}]`, in increasing `k`.
    pub fn blocks(&self) -> Vec<(i32, std::ops::Range<usize>)> {
        let mut out: Vec<(i32, std::ops::Range<usize>)> = Vec::new();
        for (i, &t) in self.times.iter().enumerate() {
            let k = dyadic_block(t);
            match out.last_mut() {
                Some((kk, r)) if *kk == k => r.end = i + 1,
                _ => out.push((k, i..i + 1)),
            }
        }
        out
    }
}
