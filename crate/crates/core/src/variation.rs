//! q-variation of finite sequences.
//!
//! For a finite index set the supremum over increasing subsequences is a
//! maximum, found by a quadratic dynamic program. On a finite set of scales
//! the result is a lower bound for the variation over all `t > 0`.

use crate::error::{Error, Result};
use crate::time::TimeGrid;

/// Largest accepted exponent.
pub const Q_MAX: f64 = 16.0;

#[derive(Debug, Clone, PartialEq)]
pub struct VariationOutcome {
    pub q: f64,
    pub value: f64,
    /// Increasing indices of a subsequence attaining `value`.
    pub witness: Vec<usize>,
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 1.0 && q <= Q_MAX) {
        return Err(Error::InvalidExponent(q));
    }
    Ok(())
}

/// Exact `V_q` of `a` over all increasing subsequences.
///
/// `best[j] = max(0, max_{i<j} best[i] + |a_j − a_i|^q)`; ties keep the
/// earlier predecessor and the earlier endpoint. Rounded addition is
/// monotone, so the result is the largest rounded chain sum exactly.
/// Differences are divided by the range of `a` only when raw powers would
/// overflow or underflow.
pub fn vq_exact(a: &[f64], q: f64) -> Result<VariationOutcome> {
    check_q(q)?;
    if let Some(i) = a.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if a.len() < 2 {
        return Ok(VariationOutcome { q, value: 0.0, witness: (0..a.len()).collect() });
    }
    let (lo, hi) = a.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let total = a.len() as f64 * (hi - lo).powf(q);
    let scale = if hi > lo && !(total.is_finite() && (hi - lo).powf(q) >= f64::MIN_POSITIVE) { hi - lo } else { 1.0 };
    let m = a.len();
    let mut best = vec![0.0f64; m];
    let mut prev = vec![usize::MAX; m];
    for j in 1..m {
        for i in 0..j {
            let cand = best[i] + ((a[j] - a[i]).abs() / scale).powf(q);
            if cand > best[j] {
                best[j] = cand;
                prev[j] = i;
            }
        }
    }
    let mut end = 0;
    for j in 1..m {
        if best[j] > best[end] {
            end = j;
        }
    }
    let mut witness = vec![end];
    while prev[*witness.last().unwrap()] != usize::MAX {
        witness.push(prev[*witness.last().unwrap()]);
    }
    witness.reverse();
    Ok(VariationOutcome { q, value: scale * best[end].powf(1.0 / q), witness })
}

/// `Σ |a_{w_{k+1}} − a_{w_k}|^q` along a subsequence.
pub fn chain_sum(a: &[f64], witness: &[usize], q: f64) -> f64 {
    witness.windows(2).map(|w| (a[w[1]] - a[w[0]]).abs().powf(q)).sum()
}

/// Long variation: `V_q` of the entries at the dyadic anchors of `grid`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongVariation {
    pub value: f64,
    /// Set when the grid has no anchors; `value` is then 0.
    pub no_anchors: bool,
}

fn check_len(a: &[f64], grid: &TimeGrid) -> Result<()> {
    if a.len() != grid.len() {
        return Err(Error::InvalidTimeGrid(format!(
            "{} values for a grid of {} scales",
            a.len(),
            grid.len()
        )));
    }
    Ok(())
}

pub fn long_variation(a: &[f64], grid: &TimeGrid, q: f64) -> Result<LongVariation> {
    check_q(q)?;
    check_len(a, grid)?;
    if grid.anchors().is_empty() {
        return Ok(LongVariation { value: 0.0, no_anchors: true });
    }
    let sub: Vec<f64> = grid.anchors().iter().map(|&i| a[i]).collect();
    Ok(LongVariation { value: vq_exact(&sub, q)?.value, no_anchors: false })
}

/// Short variation: the ℓ^q sum over blocks `(2^k, 2^{k+1}]` of the
/// variation inside each block.
pub fn short_variation(a: &[f64], grid: &TimeGrid, q: f64) -> Result<f64> {
    check_q(q)?;
    check_len(a, grid)?;
    let mut sum = 0.0;
    for (_, r) in grid.blocks() {
        sum += vq_exact(&a[r], q)?.value.powf(q);
    }
    Ok(sum.powf(1.0 / q))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, holds: lhs <= rhs + 1e-12 * (1.0 + rhs.abs()) }
    }
}

fn sup_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `V_q(a·b) ≤ sup|a|·V_q(b) + sup|b|·V_q(a)`.
pub fn product_rule_check(a: &[f64], b: &[f64], q: f64) -> Result<InequalityReport> {
    if a.len() != b.len() {
        return Err(Error::InvalidTimeGrid(format!("lengths {} and {} differ", a.len(), b.len())));
    }
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let lhs = vq_exact(&ab, q)?.value;
    let rhs = sup_abs(a) * vq_exact(b, q)?.value + sup_abs(b) * vq_exact(a, q)?.value;
    Ok(InequalityReport::new(lhs, rhs))
}

/// `sup|a| ≤ |a_{t0}| + 2 V_q(a)`.
pub fn sup_vs_variation_check(a: &[f64], q: f64, t0: usize) -> Result<InequalityReport> {
    if t0 >= a.len() {
        return Err(Error::InvalidTimeGrid(format!("index {t0} outside a sequence of {}", a.len())));
    }
    let v = vq_exact(a, q)?.value;
    Ok(InequalityReport::new(sup_abs(a), a[t0].abs() + 2.0 * v))
}

/// `V_q(full) ≤ LV_q + 2·SV_q`. Needs a grid holding the closing anchor of
/// every block.
pub fn split_domination_check(a: &[f64], grid: &TimeGrid, q: f64) -> Result<InequalityReport> {
    if !grid.has_closing_anchors() {
        return Err(Error::InvalidTimeGrid("some block lacks its closing anchor".into()));
    }
    let full = vq_exact(a, q)?.value;
    let lv = long_variation(a, grid, q)?.value;
    let sv = short_variation(a, grid, q)?;
    Ok(InequalityReport::new(full, lv + 2.0 * sv))
}

#[cfg(test)]
pub(crate) fn exhaustive(a: &[f64], q: f64) -> f64 {
    let m = a.len();
    let mut best = 0.0f64;
    for mask in 1u32..(1 << m) {
        let idx: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        best = best.max(chain_sum(a, &idx, q));
    }
    best.powf(1.0 / q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let c = vq_exact(&[2.0; 5], 2.0).unwrap();
        assert_eq!(c.value, 0.0);
        let alt = vq_exact(&[0.0, 1.0, 0.0, 1.0, 0.0, 1.0], 2.0).unwrap();
        assert_eq!(alt.value, 5f64.sqrt());
        assert_eq!(alt.witness, vec![0, 1, 2, 3, 4, 5]);
        let mono = vq_exact(&[0.0, 1.0, 2.0], 2.0).unwrap();
        assert_eq!(mono.value, 2.0);
        assert_eq!(mono.witness, vec![0, 2]);
        assert_eq!(vq_exact(&[3.0], 2.0).unwrap().value, 0.0);
        assert!(vq_exact(&[0.0, 1.0], 1.0).is_err());
        assert!(vq_exact(&[0.0, 1.0], 17.0).is_err());
    }

    #[test]
    fn long_and_short_examples() {
        let g = TimeGrid::new(vec![1.0, 2.0, 4.0]).unwrap();
        assert_eq!(long_variation(&[0.0, 1.0, 0.0], &g, 2.0).unwrap().value, 2f64.sqrt());
        assert_eq!(short_variation(&[0.0, 1.0, 0.0], &g, 2.0).unwrap(), 0.0);
        let seq = [5.0, 1.0, 4.0];
        assert_eq!(long_variation(&seq, &g, 3.0).unwrap().value, vq_exact(&seq, 3.0).unwrap().value);

        let none = TimeGrid::new(vec![1.5, 3.0]).unwrap();
        let lv = long_variation(&[0.0, 1.0], &none, 2.0).unwrap();
        assert!(lv.no_anchors && lv.value == 0.0);

        // one block (2, 4] holding (0, 1)
        let one = TimeGrid::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(short_variation(&[0.0, 1.0], &one, 2.0).unwrap(), 1.0);
        // blocks (1, 2] and (2, 4] holding (0, 1) and (0, 2)
        let two = TimeGrid::new(vec![1.5, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(short_variation(&[0.0, 1.0, 0.0, 2.0], &two, 2.0).unwrap(), 5f64.sqrt());
    }

    #[test]
    fn inequality_examples() {
        let r = product_rule_check(&[0.0, 1.0], &[0.0, 1.0], 2.0).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (1.0, 2.0, true));
        let c = product_rule_check(&[0.0, 2.0, -1.0], &[3.0, 3.0, 3.0], 2.0).unwrap();
        assert!((c.lhs - 3.0 * vq_exact(&[0.0, 2.0, -1.0], 2.0).unwrap().value).abs() < 1e-12);
        let s = sup_vs_variation_check(&[0.0, 5.0], 2.0, 0).unwrap();
        assert_eq!((s.lhs, s.rhs), (5.0, 10.0));
        let k = sup_vs_variation_check(&[-2.0; 4], 3.0, 2).unwrap();
        assert_eq!((k.lhs, k.rhs), (2.0, 2.0));
    }

    #[test]
    fn large_q_uses_the_range() {
        let a = [1e-30, 3e-30, 0.0, 2e-30];
        let v = vq_exact(&a, 12.0).unwrap();
        let exact = exhaustive(&a.map(|x| x * 1e30), 12.0) * 1e-30;
        assert!((v.value - exact).abs() < 1e-12 * exact);
        let big = vq_exact(&[0.0, 1e30, -1e30], 16.0).unwrap();
        assert!((big.value / 1e30 - (1.0 + 2f64.powi(16)).powf(1.0 / 16.0)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn dp_matches_enumeration(a in prop::collection::vec(-3.0f64..3.0, 0..10), q in prop::sample::select(vec![1.5, 2.0, 3.0, 4.5])) {
            let v = vq_exact(&a, q).unwrap();
            prop_assert_eq!(v.value, exhaustive(&a, q));
            let w = chain_sum(&a, &v.witness, q);
            prop_assert!((w - v.value.powf(q)).abs() <= 1e-12 * v.value.powf(q).max(1e-300));
        }

        #[test]
        fn monotone_in_q(a in prop::collection::vec(-3.0f64..3.0, 2..20)) {
            let vals: Vec<f64> = [2.0, 2.5, 3.0, 4.0].iter().map(|&q| vq_exact(&a, q).unwrap().value).collect();
            for w in vals.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
        }

        #[test]
        fn subadditive(a in prop::collection::vec(-3.0f64..3.0, 12), b in prop::collection::vec(-3.0f64..3.0, 12)) {
            let s: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let q = 2.5;
            prop_assert!(vq_exact(&s, q).unwrap().value <= vq_exact(&a, q).unwrap().value + vq_exact(&b, q).unwrap().value + 1e-12);
        }

        #[test]
        fn split_domination(a in prop::collection::vec(-3.0f64..3.0, 1..12), ts in prop::collection::btree_set(1u32..200, 1..12)) {
            let times: Vec<f64> = ts.into_iter().map(|t| t as f64 / 16.0).collect();
            let grid = TimeGrid::with_closing_anchors(times).unwrap();
            let vals: Vec<f64> = (0..grid.len()).map(|i| a[i % a.len()] * (i as f64 + 1.0).sqrt()).collect();
            prop_assert!(split_domination_check(&vals, &grid, 3.0).unwrap().holds);
        }
    }
}
