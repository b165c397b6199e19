//! The bilinear square function `𝓛 = (Σ_k |𝓛_k|²)^{1/2}` with
//! `𝓛_k(f1, f2) = A_{2^k h}(f1, f2) − E_k f1 · E_k f2`.

use std::ops::RangeInclusive;

use crate::average::{avg_fields, Mode};
use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::field::{Field, GridBox};
use crate::martingale::cond_expect;
use crate::time::TimeGrid;
use crate::variation::vq_exact;

fn check_body(body: &ConvexBody) -> Result<()> {
    if body.is_normalized() {
        Ok(())
    } else {
        Err(Error::Hypothesis("the body must be normalized".into()))
    }
}

/// `𝓛_k(f1, f2)` on `out`. The average runs at `t = 2^k·h` in continuum mode.
pub fn square_piece(f1: &Field, f2: &Field, body: &ConvexBody, k: i64, out: &GridBox) -> Result<Field> {
    check_body(body)?;
    if !(0..=48).contains(&k) {
        return Err(Error::MisalignedLevel(k));
    }
    let t = 2f64.powi(k as i32) * f1.grid().mesh();
    let avg = avg_fields(body, f1, f2, Mode::Continuum, &TimeGrid::new(vec![t])?, out)?.remove(0);
    let e1 = cond_expect(f1, k)?;
    let e2 = cond_expect(f2, k)?;
    Ok(Field::from_fn(out.clone(), |p| avg.get(p) - e1.get(p) * e2.get(p)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquarePieces {
    pub k_range: RangeInclusive<u32>,
    /// `𝓛_k` for each `k` of the range, in order.
    pub pieces: Vec<Field>,
    pub aggregate: Field,
    /// `max_x |𝓛_{k_max+1}(x)|`: how much the truncated range leaves out at
    /// the next scale.
    pub tail: f64,
}

/// The level range used when none is given: cells up to one level above the
/// cube covering both supports.
pub fn default_k_range(f1: &Field, f2: &Field) -> Result<RangeInclusive<u32>> {
    Ok(0..=f1.grid().union(f2.grid())?.top_level())
}

/// The box on which every `𝓛_k`, `k ≤ k_max`, can be nonzero.
pub fn support_box(f1: &Field, f2: &Field, body: &ConvexBody, k_max: u32) -> Result<GridBox> {
    let reach = (2f64.powi(k_max as i32) * body.r_out()).ceil() as usize + 1;
    Ok(f1.grid().union(f2.grid())?.aligned_hull(k_max).padded(reach))
}

pub fn square_function(
    f1: &Field,
    f2: &Field,
    body: &ConvexBody,
    k_range: RangeInclusive<u32>,
) -> Result<SquarePieces> {
    check_body(body)?;
    if k_range.is_empty() {
        return Err(Error::Hypothesis("empty level range".into()));
    }
    let k_max = *k_range.end();
    let out = support_box(f1, f2, body, k_max + 1)?;
    let pieces = k_range
        .clone()
        .map(|k| square_piece(f1, f2, body, k as i64, &out))
        .collect::<Result<Vec<_>>>()?;
    let aggregate = Field::from_fn(out.clone(), |p| {
        pieces.iter().map(|f| f.get(p).powi(2)).sum::<f64>().sqrt()
    });
    let tail = square_piece(f1, f2, body, k_max as i64 + 1, &out)?.max_abs();
    Ok(SquarePieces { k_range, pieces, aggregate, tail })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LongDominationReport {
    pub points: usize,
    pub violations: usize,
    /// Largest `V_q(A) − (2𝓛 + V_q(E f1·E f2))`.
    pub max_excess: f64,
}

/// Pointwise `V_q(A_{2^k}: k ∈ range) ≤ 2·𝓛(f1, f2) + V_q(E_k f1·E_k f2: k ∈ range)`.
pub fn long_variation_domination(
    f1: &Field,
    f2: &Field,
    body: &ConvexBody,
    k_range: RangeInclusive<u32>,
    q: f64,
) -> Result<LongDominationReport> {
    let sq = square_function(f1, f2, body, k_range.clone())?;
    let out = sq.aggregate.grid().clone();
    let e1: Vec<Field> = k_range.clone().map(|k| cond_expect(f1, k as i64)).collect::<Result<_>>()?;
    let e2: Vec<Field> = k_range.clone().map(|k| cond_expect(f2, k as i64)).collect::<Result<_>>()?;
    let n = sq.pieces.len();
    let mut avg = vec![0.0; n];
    let mut mart = vec![0.0; n];
    let mut report = LongDominationReport { points: out.len(), violations: 0, max_excess: f64::NEG_INFINITY };
    for (i, p) in out.points().enumerate() {
        for j in 0..n {
            mart[j] = e1[j].get(&p) * e2[j].get(&p);
            avg[j] = sq.pieces[j].samples()[i] + mart[j];
        }
        let lhs = vq_exact(&avg, q)?.value;
        let rhs = 2.0 * sq.aggregate.samples()[i] + vq_exact(&mart, q)?.value;
        let excess = lhs - rhs;
        if excess > 1e-12 * (1.0 + rhs) {
            report.violations += 1;
        }
        report.max_excess = report.max_excess.max(excess);
    }
    Ok(report)
}
