//! The extremal example: indicator pairs whose ball averages alternate
//! between large and small values along the scales `α^i`, so their
//! q-variation grows with the number of alternations while the inputs stay
//! bounded.
//!
//! The body is the Euclidean unit ball of `ℝ^{2d}`. `E_n` is the union of the
//! annuli `α^{2i} ≤ |u| < α^{2i+1}` for `i = 0..=n` and `F_n = {|u| < α^{2n+2}}`.
//! At an odd scale the ball of radius `α^{2i+1}` sees mostly the outermost
//! annulus; at an even scale `α^{2i}` the set `E_n` only reaches radius
//! `α^{2i−1}`, a thin strip of the ball.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::variation::vq_exact;

/// `∫₀^z √(1 − s²) ds`.
fn segment_antiderivative(z: f64) -> f64 {
    let z = z.clamp(-1.0, 1.0);
    0.5 * (z * (1.0 - z * z).sqrt() + z.asin())
}

/// `∫_a^b 2√(t² − s²) ds` for `[a, b] ⊂ [−t, t]`: the area of the part of the
/// disk of radius `t` between two vertical lines.
fn disk_slab(a: f64, b: f64, t: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    2.0 * t * t * (segment_antiderivative(b / t) - segment_antiderivative(a / t))
}

fn check_dim(d: usize) -> Result<()> {
    if d == 1 || d == 2 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: 1, found: d })
    }
}

/// Fraction of the ball of radius `α` in `ℝ^{2d}`, centred at `(x, x)`,
/// whose first block `y₁` satisfies `|x + y₁| < 1`. Closed form.
pub fn strip_fraction(d: usize, alpha: f64, x: &[f64]) -> Result<f64> {
    check_dim(d)?;
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: x.len() });
    }
    if d == 1 {
        let lo = (-1.0f64).max(x[0] - alpha);
        let hi = 1.0f64.min(x[0] + alpha);
        return Ok(disk_slab(lo - x[0], hi - x[0], alpha) / (PI * alpha * alpha));
    }
    let r2 = x[0] * x[0] + x[1] * x[1];
    if alpha < 1.0 + r2.sqrt() {
        return Err(Error::Hypothesis(format!("the closed form needs α ≥ 1 + |x|, got α = {alpha}")));
    }
    // ∫_{|u|<1} π(α² − |u − x|²) du over π²α⁴/2
    Ok(2.0 * (alpha * alpha - 0.5 - r2) / alpha.powi(4))
}

/// The same fraction at `x = 0` by Gauss–Legendre quadrature of the slice
/// volumes, for cross-checking.
pub fn strip_fraction_quadrature(d: usize, alpha: f64, nodes: usize) -> Result<f64> {
    check_dim(d)?;
    let gl = GaussLegendre::new(NonZeroUsize::new(nodes.max(1)).expect("nonzero"));
    if d == 1 {
        let w = alpha.min(1.0);
        let area = gl.integrate(-w, w, |y| 2.0 * (alpha * alpha - y * y).max(0.0).sqrt());
        Ok(area / (PI * alpha * alpha))
    } else {
        let w = alpha.min(1.0);
        let vol = gl.integrate(0.0, w, |r| 2.0 * PI * r * PI * (alpha * alpha - r * r));
        Ok(vol / (PI * PI * alpha.powi(4) / 2.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRatio {
    pub d: usize,
    pub alpha: f64,
    /// `1 − strip_fraction` at `x = 0`: must exceed 4/5.
    pub fraction: f64,
    /// Probe radius: at every probe `x` with `|x| ≤ ε₀` the shifted fraction
    /// outside the strip exceeds 3/4 and the strip fraction stays below 1/4.
    pub eps0: f64,
}

/// Probe points in the ball of radius `eps0`: 9 points on a diameter for
/// `d = 1`, a 3×3 grid in the inscribed square for `d = 2`.
pub fn probes(d: usize, eps0: f64) -> Vec<Vec<f64>> {
    if d == 1 {
        (-4..=4).map(|j| vec![eps0 * j as f64 / 4.0]).collect()
    } else {
        let s = eps0 / 2f64.sqrt();
        let mut out = Vec::new();
        for i in -1..=1 {
            for j in -1..=1 {
                out.push(vec![s * i as f64, s * j as f64]);
            }
        }
        out
    }
}

/// Smallest `α` on the lattice `1 + 0.01k` with `|{|y₁| ≥ 1} ∩ B_α| > 4/5·|B_α|`,
/// and the largest `ε₀ = 2^{−m}` passing the shifted checks at every probe.
pub fn find_growth_ratio(d: usize) -> Result<GrowthRatio> {
    check_dim(d)?;
    let zero = vec![0.0; d];
    let mut found = None;
    for k in 1..=99_900u32 {
        let alpha = (100 + k) as f64 / 100.0;
        let frac = 1.0 - strip_fraction(d, alpha, &zero)?;
        if frac > 0.8 {
            found = Some((alpha, frac));
            break;
        }
    }
    let (alpha, fraction) =
        found.ok_or_else(|| Error::SearchFailed(format!("no growth ratio up to 1000 in d = {d}")))?;
    for m in 0..40 {
        let eps0 = 2f64.powi(-m);
        let ok = probes(d, eps0).iter().all(|x| match strip_fraction(d, alpha, x) {
            Ok(s) => 1.0 - s > 0.75 && s < 0.25,
            Err(_) => false,
        });
        if ok {
            return Ok(GrowthRatio { d, alpha, fraction, eps0 });
        }
    }
    Err(Error::SearchFailed("no probe radius found".into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub alpha: f64,
    pub n: u32,
    pub eps0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlternationRow {
    pub n: u32,
    pub i: u32,
    pub scale: f64,
    pub probe: f64,
    pub average: f64,
    /// 3/4 (a lower bound) at odd `i`, 1/4 (an upper bound) at even `i`.
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationReport {
    pub value: f64,
    /// `(n·2^{1−q})^{1/q}`: `2n` jumps, each larger than 1/2.
    pub derived_bound: f64,
    /// `2^{1−q}·n` as printed in the source of the construction.
    pub printed_bound: f64,
    pub holds: bool,
}

impl Counterexample {
    /// One-dimensional instance with the growth ratio found by
    /// [`find_growth_ratio`].
    pub fn new(n: u32) -> Result<Self> {
        let g = find_growth_ratio(1)?;
        Ok(Self { alpha: g.alpha, n, eps0: g.eps0 })
    }

    /// `[α^{2i}, α^{2i+1})`, `i = 0..=n`: the positive half of `E_n`.
    pub fn annuli(&self) -> Vec<(f64, f64)> {
        (0..=self.n).map(|i| (self.alpha.powi(2 * i as i32), self.alpha.powi(2 * i as i32 + 1))).collect()
    }

    /// `A_{α^i}(1_{E_n}, 1_{F_n})(x)` in closed form, for `1 ≤ i ≤ 2n+1`,
    /// where `F_n` covers every `x + y₂` that occurs.
    pub fn average(&self, i: u32, x: f64) -> Result<f64> {
        if i == 0 || i > 2 * self.n + 1 {
            return Err(Error::Hypothesis(format!("scale index {i} is outside 1..={}", 2 * self.n + 1)));
        }
        let t = self.alpha.powi(i as i32);
        let r_f = self.alpha.powi(2 * self.n as i32 + 2);
        if t + x.abs() > r_f {
            return Err(Error::Hypothesis("F_n does not cover the ball".into()));
        }
        let mut area = 0.0;
        for (lo, hi) in self.annuli() {
            for (a, b) in [(lo, hi), (-hi, -lo)] {
                let a = a.max(x - t);
                let b = b.min(x + t);
                area += disk_slab(a - x, b - x, t);
            }
        }
        Ok(area / (PI * t * t))
    }

    pub fn alternation_table(&self) -> Result<Vec<AlternationRow>> {
        let mut rows = Vec::new();
        for i in 1..=2 * self.n + 1 {
            for x in probes(1, self.eps0) {
                let average = self.average(i, x[0])?;
                let (threshold, pass) = if i % 2 == 1 { (0.75, average > 0.75) } else { (0.25, average < 0.25) };
                rows.push(AlternationRow {
                    n: self.n,
                    i,
                    scale: self.alpha.powi(i as i32),
                    probe: x[0],
                    average,
                    threshold,
                    pass,
                });
            }
        }
        Ok(rows)
    }

    /// `V_q` of the averages at `x = 0` over the scales `α^1, …, α^{2n+1}`.
    pub fn variation(&self, q: f64) -> Result<VariationReport> {
        let seq: Vec<f64> = (1..=2 * self.n + 1).map(|i| self.average(i, 0.0)).collect::<Result<_>>()?;
        let value = vq_exact(&seq, q)?.value;
        let derived_bound = (self.n as f64 * 2f64.powf(1.0 - q)).powf(1.0 / q);
        Ok(VariationReport {
            value,
            derived_bound,
            printed_bound: 2f64.powf(1.0 - q) * self.n as f64,
            holds: value >= derived_bound,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_quadrature() {
        for d in [1, 2] {
            for &alpha in &[1.5, 3.1, 6.4, 20.0] {
                let exact = strip_fraction(d, alpha, &vec![0.0; d]).unwrap();
                let quad = strip_fraction_quadrature(d, alpha, 64).unwrap();
                assert!((exact - quad).abs() < 1e-6, "d = {d}, α = {alpha}: {exact} vs {quad}");
            }
        }
    }

    #[test]
    fn disk_slab_is_the_disk_area() {
        assert!((disk_slab(-2.0, 2.0, 2.0) - 4.0 * PI).abs() < 1e-12);
        assert!((disk_slab(0.0, 2.0, 2.0) - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn growth_ratios() {
        let g1 = find_growth_ratio(1).unwrap();
        // 1 − 2(√(α²−1) + α² asin(1/α))/(πα²) first exceeds 4/5 just above 6.37
        assert!(g1.alpha > 6.3 && g1.alpha < 6.5, "{}", g1.alpha);
        assert!(g1.fraction > 0.8);
        let prev = 1.0 - strip_fraction(1, g1.alpha - 0.01, &[0.0]).unwrap();
        assert!(prev <= 0.8);
        // (2α² − 1)/α⁴ < 1/5 iff α² > 5 + √20
        let g2 = find_growth_ratio(2).unwrap();
        let root = (5.0 + 20f64.sqrt()).sqrt();
        assert!(g2.alpha > root && g2.alpha - 0.01 <= root);
        assert!(1.0 - strip_fraction(1, 1.0 + 1e-9, &[0.0]).unwrap() < 1e-3);
    }

    #[test]
    fn fraction_is_monotone_in_alpha() {
        let mut last = 0.0;
        for k in 1..1000 {
            let a = 1.0 + k as f64 / 100.0;
            let f = 1.0 - strip_fraction(1, a, &[0.0]).unwrap();
            assert!(f >= last - 1e-15);
            last = f;
        }
    }

    #[test]
    fn alternation_and_variation() {
        let mut last = 0.0;
        for n in 1..=4 {
            let ce = Counterexample::new(n).unwrap();
            assert!(ce.alternation_table().unwrap().iter().all(|r| r.pass));
            let v = ce.variation(3.0).unwrap();
            assert!(v.holds && v.value > last);
            last = v.value;
        }
        let zero = Counterexample::new(0).unwrap();
        assert_eq!(zero.variation(3.0).unwrap().value, 0.0);
        let ce = Counterexample::new(2).unwrap();
        assert!(ce.average(6, 0.0).is_err());
    }

    #[test]
    fn average_against_quadrature() {
        let ce = Counterexample::new(1).unwrap();
        let gl = GaussLegendre::new(NonZeroUsize::new(200).unwrap());
        for i in 1..=3 {
            let t = ce.alpha.powi(i);
            let x = 0.01;
            let mut area = 0.0;
            for (lo, hi) in ce.annuli() {
                for (a, b) in [(lo, hi), (-hi, -lo)] {
                    let (a, b) = (a.max(x - t), b.min(x + t));
                    if a < b {
                        area += gl.integrate(a, b, |u| 2.0 * (t * t - (u - x) * (u - x)).max(0.0).sqrt());
                    }
                }
            }
            let quad = area / (PI * t * t);
            assert!((quad - ce.average(i as u32, x).unwrap()).abs() < 1e-6);
        }
    }
}
