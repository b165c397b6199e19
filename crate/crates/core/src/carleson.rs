//! Carleson-measure quantities built from martingale differences of a BMO
//! function.
//!
//! The tent mass of a level-`j` cube `Q` is
//! `μ_n(T(Q)) = Σ_{2^k ≤ ℓ(Q)} ∫_Q |E_{k+1−n} b − E_{k−n} b|²`. Since
//! `E_m b = b` for `m ≤ 0`, only the terms with `m = k + 1 − n ≥ 1` survive,
//! so `μ_n(T(Q)) = Σ_{m=1}^{j+1−n} ∫_Q |d_m b|²`.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{CubeId, Error, Result};
use crate::field::Field;
use crate::martingale::{coarsen, expectations};

/// `μ_n(T(Q))` for one cube.
pub fn carleson_tent_mass(b: &Field, cube: &CubeId, n: u32) -> Result<f64> {
    if cube.corner.len() != b.dim() {
        return Err(Error::DimensionMismatch { expected: b.dim(), found: cube.corner.len() });
    }
    let side = 1i64 << cube.level;
    if cube.corner.iter().any(|c| c.rem_euclid(side) != 0) {
        return Err(Error::Hypothesis(format!("{cube} is not aligned")));
    }
    let last = cube.level as i64 + 1 - n as i64;
    if last < 1 {
        return Ok(0.0);
    }
    let last = last as u32;
    let work = b.grid().union(&crate::field::GridBox::new(
        cube.corner.clone(),
        vec![side as usize; b.dim()],
        b.grid().mesh(),
    )?)?;
    let e = expectations(&b.embed(&work)?, last);
    let mut total = 0.0;
    for m in 1..=last as usize {
        let d = e[m - 1].sub(&e[m])?;
        for (i, v) in d.samples().iter().enumerate() {
            let p = d.grid().point(i);
            if p.iter().zip(&cube.corner).all(|(x, c)| *x >= *c && *x < c + side) {
                total += v * v;
            }
        }
    }
    Ok(total * b.grid().cell_measure())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TentSweep {
    /// `sup_Q μ_n(T(Q)) / (|Q|·‖b‖²_BMO)` for each `n` of the sweep.
    pub ratios: Vec<f64>,
    /// The cube attaining each supremum.
    pub argmax: Vec<Option<CubeId>>,
    pub bmo: f64,
}

/// Sweeps every dyadic cube meeting the level-`(top+1)` hull of `b`'s box, at
/// levels `0..=top+1`, for each `n` in `0..=n_max`.
pub fn carleson_tent_sweep(b: &Field, n_max: u32) -> Result<TentSweep> {
    let bmo = b.bmo_dyadic_norm();
    let top = b.grid().top_level() + 1;
    let work = b.grid().aligned_hull(top + 1);
    let e = expectations(&b.embed(&work)?, top + 1);
    let d = b.dim();
    // cube integrals of |d_m b|² at every level j, by m
    let sq: Vec<Field> = (1..=top as usize + 1).map(|m| {
        let diff = e[m - 1].sub(&e[m]).expect("same box");
        diff.map(|v| v * v)
    }).collect();
    let mut ratios = vec![0.0; n_max as usize + 1];
    let mut argmax = vec![None; n_max as usize + 1];
    let h_d = b.grid().cell_measure();
    for j in 0..=top {
        let vol = (1u64 << (j as usize * d)) as f64 * h_d;
        let per_m: Vec<Field> = sq.iter().map(|f| coarsen(f, j)).collect();
        let cubes = per_m[0].grid().clone();
        for c in 0..cubes.len() {
            // prefix over m so μ_n is a single lookup per n
            let mut prefix = vec![0.0; per_m.len() + 1];
            for (m, f) in per_m.iter().enumerate() {
                prefix[m + 1] = prefix[m] + f.samples()[c] * vol;
            }
            for n in 0..=n_max {
                let last = j as i64 + 1 - n as i64;
                if last < 1 {
                    continue;
                }
                let mass = prefix[(last as usize).min(per_m.len())];
                let ratio = if mass == 0.0 { 0.0 } else { mass / (vol * bmo * bmo) };
                if ratio > ratios[n as usize] {
                    ratios[n as usize] = ratio;
                    let corner = cubes.point(c).iter().map(|x| x << j).collect();
                    argmax[n as usize] = Some(CubeId { level: j, corner });
                }
            }
        }
    }
    Ok(TentSweep { ratios, argmax, bmo })
}

fn zeta_scaled(r: f64, s: f64, eps: f64, d: usize) -> f64 {
    let v = (1.0 + r / s).powf(-(d as f64) - eps);
    if v < 1e-12 {
        0.0
    } else {
        v / s.powi(d as i32)
    }
}

/// Cell-constant samples as `(centre, value)` pairs, zeros dropped.
fn atoms(f: &Field) -> Vec<(f64, f64)> {
    let h = f.grid().mesh();
    f.samples()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, &v)| ((f.grid().point(i)[0] as f64 + 0.5) * h, v))
        .collect()
}

fn smooth(atoms: &[(f64, f64)], x: f64, s: f64, eps: f64, h: f64) -> f64 {
    atoms.iter().map(|&(c, v)| v * zeta_scaled((x - c).abs(), s, eps, 1)).sum::<f64>() * h
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSumReport {
    pub value: f64,
    /// `value / (‖f‖₂²·‖b‖²_BMO)`, `0/0` reported as 0.
    pub ratio: f64,
}

/// `Σ_k ∫ (ζ_k ∗ |f|^l)^{2/l} (ζ_k ∗ |E_{k+1−n} b − E_{k−n} b|^l)^{2/l} dx`
/// with `ζ(x) = (1 + |x|)^{−d−ε}`, `ζ_k(x) = 2^{−kd} ζ(2^{−k} x)` on the
/// physical scale `2^k h`, truncated below `1e-12` of its peak. Only `d = 1`.
///
/// The `x` integral is a cell sum within four scales of the supports and
/// Gauss–Legendre on doubling panels beyond, out to the truncation radius.
pub fn carleson_weighted_sum(f: &Field, b: &Field, l: f64, eps: f64, n: u32) -> Result<WeightedSumReport> {
    if !(l > 1.0 && l < 2.0) {
        return Err(Error::InvalidExponent(l));
    }
    if !(eps > 0.0) {
        return Err(Error::Hypothesis(format!("ε = {eps} must be positive")));
    }
    if f.dim() != 1 || b.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: f.dim().max(b.dim()) });
    }
    if f.grid().mesh() != b.grid().mesh() {
        return Err(Error::BoxMismatch);
    }
    let h = f.grid().mesh();
    let top = b.grid().top_level();
    let work = b.grid().aligned_hull(top);
    let e = expectations(&b.embed(&work)?, top);
    let fa = atoms(&f.map(|v| v.abs().powf(l)));
    let gl = GaussLegendre::new(NonZeroUsize::new(8).expect("nonzero"));
    let mut value = 0.0;
    for m in 1..=top as usize {
        let k = m as i64 - 1 + n as i64;
        let s = 2f64.powi(k as i32) * h;
        let diff = e[m - 1].sub(&e[m])?;
        let da = atoms(&diff.map(|v| v.abs().powf(l)));
        if fa.is_empty() || da.is_empty() {
            continue;
        }
        let integrand = |x: f64| (smooth(&fa, x, s, eps, h) * smooth(&da, x, s, eps, h)).powf(2.0 / l);
        let lo_c = f.grid().origin()[0].min(work.origin()[0]);
        let hi_c = f.grid().end(0).max(work.end(0));
        let pad = 4 * (1i64 << k.min(40));
        let (near_lo, near_hi) = (lo_c - pad, hi_c + pad);
        let mut sum = 0.0;
        for c in near_lo..near_hi {
            sum += integrand((c as f64 + 0.5) * h) * h;
        }
        // ζ vanishes beyond this distance from every atom
        let r_trunc = s * (1e12f64.powf(1.0 / (1.0 + eps)) - 1.0);
        let span = (hi_c - lo_c) as f64 * h;
        for side in [-1.0, 1.0] {
            let start = if side > 0.0 { near_hi as f64 * h } else { -(near_lo as f64) * h };
            let mut a = start;
            let mut w = pad as f64 * h;
            while a - start < r_trunc + span {
                let panel = gl.integrate(a, a + w, |y| integrand(side * y));
                sum += panel;
                a += w;
                w *= 2.0;
            }
        }
        value += sum;
    }
    let den = f.lp_norm(2.0)?.powi(2) * b.bmo_dyadic_norm().powi(2);
    let ratio = if value == 0.0 { 0.0 } else { value / den };
    Ok(WeightedSumReport { value, ratio })
}
