//! Dyadic conditional expectations and the objects built from them.
//!
//! A level-`j` cube is a block of `2^j` cells per axis whose corner is a
//! multiple of `2^j` in global cell coordinates, so its side is `2^j·h`.
//! Level 0 cubes are single cells; `E_j f = f` for `j ≤ 0`.

use crate::average::{avg_field, AvgRequest, Mode};
use crate::body::ConvexBody;
use crate::error::{CubeId, Error, Result};
use crate::field::{Field, GridBox};
use crate::square::square_piece;
use crate::variation::vq_exact;

fn check_level(j: i64) -> Result<u32> {
    if j < 0 {
        return Err(Error::MisalignedLevel(j));
    }
    u32::try_from(j).ok().filter(|&j| j < 48).ok_or(Error::MisalignedLevel(j))
}

/// Cube means at level `j` as a field on the cube lattice: the cell `c` of
/// the result is the cube with corner `c·2^j`, and its mesh is `h·2^j`.
pub fn coarsen(f: &Field, j: u32) -> Field {
    let hull = f.grid().aligned_hull(j);
    let side = 1i64 << j;
    let d = f.dim();
    let origin: Vec<i64> = hull.origin().iter().map(|o| o / side).collect();
    let extent: Vec<usize> = hull.extent().iter().map(|e| e >> j).collect();
    let grid = GridBox::new(origin, extent, f.grid().mesh() * side as f64).expect("coarse box");
    let mut sums = vec![0.0; grid.len()];
    let mut c = vec![0i64; d];
    for (i, &v) in f.samples().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let p = f.grid().point(i);
        for a in 0..d {
            c[a] = p[a].div_euclid(side);
        }
        sums[grid.flat_index(&c).expect("cube inside hull")] += v;
    }
    let vol = (1u64 << (j as usize * d)) as f64;
    Field::from_raw(grid, sums.into_iter().map(|s| s / vol).collect())
}

/// Inverse of [`coarsen`]'s indexing: spreads cube values over their cells.
pub fn refine(coarse: &Field, j: u32) -> Field {
    let side = 1i64 << j;
    let cg = coarse.grid();
    let grid = GridBox::new(
        cg.origin().iter().map(|o| o * side).collect(),
        cg.extent().iter().map(|e| e << j).collect(),
        cg.mesh() / side as f64,
    )
    .expect("fine box");
    let d = grid.dim();
    let mut c = vec![0i64; d];
    let samples = (0..grid.len())
        .map(|i| {
            let p = grid.point(i);
            for a in 0..d {
                c[a] = p[a].div_euclid(side);
            }
            coarse.get(&c)
        })
        .collect();
    Field::from_raw(grid, samples)
}

/// `E_j f`, on the level-`j` hull of `f`'s box.
pub fn cond_expect(f: &Field, j: i64) -> Result<Field> {
    let j = check_level(j)?;
    if j == 0 {
        return Ok(f.clone());
    }
    Ok(refine(&coarsen(f, j), j))
}

/// `d_j f = E_{j−1} f − E_j f`, for `j ≥ 1`.
pub fn mart_diff(f: &Field, j: i64) -> Result<Field> {
    if j < 1 {
        return Err(Error::MisalignedLevel(j));
    }
    let fine = cond_expect(f, j - 1)?;
    let coarse = cond_expect(f, j)?;
    fine.sub(&coarse)
}

/// `E_0 f, …, E_top f`, all on the level-`top` hull of `f`'s box.
pub fn expectations(f: &Field, top: u32) -> Vec<Field> {
    let work = f.grid().aligned_hull(top);
    let base = f.embed(&work).expect("same mesh");
    (0..=top)
        .map(|j| if j == 0 { base.clone() } else { refine(&coarsen(&base, j), j) })
        .collect()
}

/// The values of a field that is constant on level-`j` cubes (with zero
/// extension), as a coarse field. Fails on the first cube where it is not.
pub fn measurable_values(h: &Field, j: u32) -> Result<Field> {
    let side = 1i64 << j;
    let hull = h.grid().aligned_hull(j);
    let grid = GridBox::new(
        hull.origin().iter().map(|o| o / side).collect(),
        hull.extent().iter().map(|e| e >> j).collect(),
        h.grid().mesh() * side as f64,
    )?;
    // compared exactly against the cube's corner value: a mean of equal
    // samples need not reproduce them bit for bit
    let mut vals: Vec<Option<f64>> = vec![None; grid.len()];
    for p in hull.points() {
        let c: Vec<i64> = p.iter().map(|x| x.div_euclid(side)).collect();
        let slot = &mut vals[grid.flat_index(&c).expect("cube inside hull")];
        let v = h.get(&p);
        match slot {
            None => *slot = Some(v),
            Some(w) if *w == v => {}
            Some(_) => {
                return Err(Error::NotMeasurable(CubeId { level: j, corner: c.iter().map(|x| x * side).collect() }))
            }
        }
    }
    Ok(Field::from_raw(grid, vals.into_iter().map(|v| v.unwrap_or(0.0)).collect()))
}

/// `max |v|` over each coarse cell and its `3^d − 1` neighbours, on the box
/// grown by one cell.
fn star_coarse(c: &Field) -> Field {
    let out = c.grid().padded(1);
    let d = c.dim();
    let mut q = vec![0i64; d];
    Field::from_fn(out, |p| {
        let mut m = 0.0f64;
        for mask in 0..3usize.pow(d as u32) {
            let mut r = mask;
            for a in 0..d {
                q[a] = p[a] + (r % 3) as i64 - 1;
                r /= 3;
            }
            m = m.max(c.get(&q).abs());
        }
        m
    })
}

fn check_n(n: u32) -> Result<u32> {
    if n == 0 {
        return Err(Error::Hypothesis("the maximal functions need n >= 1".into()));
    }
    Ok(n - 1)
}

/// `h*`: for `x` in the level-`(n−1)` cube `Q`, the largest `|h|` on `3Q`.
pub fn star_maximal(h: &Field, n: u32) -> Result<Field> {
    let lv = check_n(n)?;
    Ok(refine(&star_coarse(&measurable_values(h, lv)?), lv))
}

/// `[h1, h2]⁺ = max{(h1*·|h2|)*, (|h1|·h2*)*}`.
pub fn bilinear_maximal(h1: &Field, h2: &Field, n: u32) -> Result<Field> {
    let lv = check_n(n)?;
    let c1 = measurable_values(h1, lv)?;
    let c2 = measurable_values(h2, lv)?;
    let s1 = star_coarse(&c1);
    let s2 = star_coarse(&c2);
    let a = star_coarse(&s1.combine(&c2, |s, v| s * v.abs())?);
    let b = star_coarse(&c1.combine(&s2, |v, s| v.abs() * s)?);
    Ok(refine(&a.combine(&b, f64::max)?, lv))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominationReport {
    pub points: usize,
    pub violations: usize,
    /// Largest `|A| − [h1,h2]⁺` seen (negative when the bound holds strictly
    /// everywhere).
    pub max_excess: f64,
    /// A point with the largest excess, with `|A|` and `[h1,h2]⁺` there.
    pub worst: Option<(Vec<i64>, f64, f64)>,
}

/// Checks `|A_{2^k}(h1, h2)(x)| ≤ [h1, h2]⁺(x)` at every cell where either
/// side can be nonzero. The body must be normalized and `k < n`.
pub fn domination_check(body: &ConvexBody, h1: &Field, h2: &Field, n: u32, k: i32) -> Result<DominationReport> {
    if !body.is_normalized() {
        return Err(Error::Hypothesis("the body must be normalized".into()));
    }
    if k >= n as i32 {
        return Err(Error::Hypothesis(format!("need k < n, got k = {k}, n = {n}")));
    }
    let plus = bilinear_maximal(h1, h2, n)?;
    let t = 2f64.powi(k) * h1.grid().mesh();
    let req = AvgRequest::new(body, t, h1, h2, Mode::Continuum)?;
    let avg = avg_field(&req, plus.grid())?;
    let tol = 1e-12 * (1.0 + h1.max_abs() * h2.max_abs());
    let mut report = DominationReport { points: plus.grid().len(), violations: 0, max_excess: f64::NEG_INFINITY, worst: None };
    for (i, (&a, &m)) in avg.samples().iter().zip(plus.samples()).enumerate() {
        let excess = a.abs() - m;
        if excess > tol {
            report.violations += 1;
        }
        if excess > report.max_excess {
            report.max_excess = excess;
            report.worst = Some((plus.grid().point(i), a.abs(), m));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TelescopeReport {
    /// `max_x |LHS − RHS|`.
    pub max_residual: f64,
    /// `‖𝓛_k(E_{l−1} f1, E_{l−1} f2)‖₂`
    pub fine_boundary: f64,
    /// `‖𝓛_k(E_j f1, E_j f2)‖₂`
    pub coarse_boundary: f64,
}

/// The finite paraproduct identity
/// `𝓛_k(E_{l−1}f1, E_{l−1}f2) − 𝓛_k(E_j f1, E_j f2) = Σ_{n=l}^{j} 𝓛_k(d_{1,n}, E_{n−1}f2) + 𝓛_k(E_n f1, d_{2,n})`,
/// evaluated on every cell where a term can be nonzero.
pub fn paraproduct_telescope(
    f1: &Field,
    f2: &Field,
    body: &ConvexBody,
    k: u32,
    l: u32,
    j: u32,
) -> Result<TelescopeReport> {
    if l > j || l == 0 {
        return Err(Error::Hypothesis(format!("need 1 <= l <= j, got l = {l}, j = {j}")));
    }
    let e = |f: &Field, m: u32| cond_expect(f, m as i64);
    let reach = (2f64.powi(k as i32) * body.r_out()).ceil() as usize + 1;
    let out = f1.grid().union(f2.grid())?.aligned_hull(j.max(k)).padded(reach).aligned_hull(k);
    let piece = |u: &Field, v: &Field| square_piece(u, v, body, k as i64, &out);
    let lhs = piece(&e(f1, l - 1)?, &e(f2, l - 1)?)?;
    let coarse = piece(&e(f1, j)?, &e(f2, j)?)?;
    let mut rhs = Field::zeros(out.clone());
    for n in l..=j {
        let d1 = mart_diff(f1, n as i64)?;
        let d2 = mart_diff(f2, n as i64)?;
        rhs = rhs.add(&piece(&d1, &e(f2, n - 1)?)?)?;
        rhs = rhs.add(&piece(&e(f1, n)?, &d2)?)?;
    }
    let resid = lhs.sub(&coarse)?.sub(&rhs)?;
    Ok(TelescopeReport {
        max_residual: resid.max_abs(),
        fine_boundary: lhs.lp_norm(2.0)?,
        coarse_boundary: coarse.lp_norm(2.0)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, with `0/0` reported as 0.
    pub ratio: f64,
}

impl RatioReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        Self { lhs, rhs, ratio }
    }
}

/// `‖V_q(E_j f1 · E_j f2 : 0 ≤ j ≤ top)‖₂` against
/// `min(‖f1‖₂‖f2‖_∞, ‖f1‖_∞‖f2‖₂)`, with `top` the default coarsest level of
/// the union of the two boxes.
pub fn martingale_product_variation_check(f1: &Field, f2: &Field, q: f64) -> Result<RatioReport> {
    if q <= 2.0 {
        return Err(Error::InvalidExponent(q));
    }
    let union = f1.grid().union(f2.grid())?;
    let top = union.top_level();
    let work = union.aligned_hull(top);
    let e1 = expectations(&f1.embed(&work)?, top);
    let e2 = expectations(&f2.embed(&work)?, top);
    let mut seq = vec![0.0; e1.len()];
    let mut sum = 0.0;
    for i in 0..work.len() {
        for (s, (a, b)) in seq.iter_mut().zip(e1.iter().zip(&e2)) {
            *s = a.samples()[i] * b.samples()[i];
        }
        sum += vq_exact(&seq, q)?.value.powi(2);
    }
    let lhs = (sum * work.cell_measure()).sqrt();
    let rhs = (f1.lp_norm(2.0)? * f2.max_abs()).min(f1.max_abs() * f2.lp_norm(2.0)?);
    Ok(RatioReport::new(lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YoungReport {
    /// `‖σ ∗ a‖²_{ℓ²}`
    pub lhs: f64,
    /// `w = ‖σ‖_{ℓ¹}`
    pub w: f64,
    /// `‖a‖²_{ℓ²}`
    pub a_sq: f64,
    /// `lhs ≤ w²·‖a‖²`: the inequality the proof delivers.
    pub holds_w_squared: bool,
    /// `lhs ≤ w·‖a‖²`: the constant as printed in the statement.
    pub holds_w: bool,
}

/// Young's inequality for sequences, squared: `‖σ ∗ a‖₂² ≤ ‖σ‖₁² ‖a‖₂²`.
pub fn young_convolution_check(a: &[f64], sigma: &[f64]) -> Result<YoungReport> {
    if a.iter().chain(sigma).any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Hypothesis("sequences must be finite and nonnegative".into()));
    }
    if a.is_empty() || sigma.is_empty() {
        return Ok(YoungReport { lhs: 0.0, w: sigma.iter().sum(), a_sq: 0.0, holds_w_squared: true, holds_w: true });
    }
    let mut conv = vec![0.0; a.len() + sigma.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &s) in sigma.iter().enumerate() {
            conv[i + j] += x * s;
        }
    }
    let lhs: f64 = conv.iter().map(|v| v * v).sum();
    let w: f64 = sigma.iter().sum();
    let a_sq: f64 = a.iter().map(|v| v * v).sum();
    let slack = 1e-12 * (1.0 + lhs);
    Ok(YoungReport {
        lhs,
        w,
        a_sq,
        holds_w_squared: lhs <= w * w * a_sq + slack,
        holds_w: lhs <= w * a_sq + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(vals: Vec<f64>, origin: i64) -> Field {
        Field::new(GridBox::line(origin, vals.len(), 1.0).unwrap(), vals).unwrap()
    }

    #[test]
    fn expectation_examples() {
        let c = Field::constant(GridBox::line(0, 8, 1.0).unwrap(), 3.0);
        assert_eq!(cond_expect(&c, 3).unwrap(), c);
        let pair = line(vec![1.0, 0.0], 0);
        assert_eq!(cond_expect(&pair, 1).unwrap().samples(), &[0.5, 0.5]);
        assert_eq!(mart_diff(&pair, 1).unwrap().samples(), &[0.5, -0.5]);
        assert!(mart_diff(&c, 1).unwrap().is_zero());
        assert!(matches!(cond_expect(&c, -1), Err(Error::MisalignedLevel(-1))));
    }

    #[test]
    fn expectation_of_an_offset_box() {
        // box [-3, 2) with level-2 cubes [-4, 0) and [0, 4)
        let f = line(vec![4.0, 1.0, 2.0, 3.0, 5.0], -3);
        let e = cond_expect(&f, 2).unwrap();
        assert_eq!(e.grid().origin(), &[-4]);
        assert_eq!(e.samples(), &[1.75, 1.75, 1.75, 1.75, 2.0, 2.0, 2.0, 2.0]);
        assert_eq!(e.integral(), f.integral());
    }

    #[test]
    fn star_examples() {
        let h = line(vec![0.0, 1.0, 0.0, 0.0], 0);
        let s = star_maximal(&h, 1).unwrap();
        let window: Vec<f64> = (0..4).map(|x| s.get(&[x])).collect();
        assert_eq!(window, vec![1.0, 1.0, 1.0, 0.0]);
        let c = Field::constant(GridBox::line(0, 8, 1.0).unwrap(), -2.0);
        let sc = star_maximal(&c, 2).unwrap();
        assert!((0..8).all(|x| sc.get(&[x]) == 2.0));
        let bad = line(vec![1.0, 2.0], 0);
        let err = star_maximal(&bad, 2).unwrap_err();
        assert!(matches!(err, Error::NotMeasurable(CubeId { level: 1, .. })));
    }

    #[test]
    fn bilinear_maximal_examples() {
        let one = Field::constant(GridBox::line(0, 16, 1.0).unwrap(), 1.0);
        let p = bilinear_maximal(&one, &one, 1).unwrap();
        assert!((0..16).all(|x| p.get(&[x]) == 1.0));
        // adjacent cells: h1·h2 ≡ 0 but [h1,h2]⁺ is 1 near them
        let h1 = line(vec![0.0, 1.0], 0);
        let h2 = line(vec![1.0, 0.0], 0);
        let p = bilinear_maximal(&h1, &h2, 1).unwrap();
        assert!(h1.mul(&h2).unwrap().is_zero());
        assert_eq!(p.get(&[0]), 1.0);
        assert_eq!(p.get(&[1]), 1.0);
    }

    #[test]
    fn disjoint_supports_make_the_l2_ratio_infinite() {
        let h1 = line(vec![0.0, 1.0], 0);
        let h2 = line(vec![1.0, 0.0], 0);
        let p = bilinear_maximal(&h1, &h2, 1).unwrap();
        let num = p.lp_norm(2.0).unwrap().powi(2);
        let den = h1.mul(&h2).unwrap().lp_norm(2.0).unwrap().powi(2);
        assert!(num > 0.0 && den == 0.0);
    }

    #[test]
    fn domination_fails_at_k_equal_n_minus_one() {
        // cubes of 8 cells; h1 on Q − 1, h2 on Q + 1, x in the middle of Q
        let n = 4;
        let h1 = Field::new(GridBox::line(0, 8, 1.0).unwrap(), vec![1.0; 8]).unwrap();
        let h2 = Field::new(GridBox::line(16, 8, 1.0).unwrap(), vec![1.0; 8]).unwrap();
        let body = ConvexBody::ball(1, 1.0).unwrap();
        let r = domination_check(&body, &h1, &h2, n, 3).unwrap();
        assert!(r.violations > 0);
        let (x, a, m) = r.worst.unwrap();
        assert!(x[0] >= 8 && x[0] < 16 && a > 0.0 && m == 0.0);
        // one level finer the bound holds
        assert_eq!(domination_check(&body, &h1, &h2, n, 2).unwrap().violations, 0);
        assert!(domination_check(&body, &h1, &h2, n, 4).is_err());
    }

    #[test]
    fn domination_on_constants_is_equality() {
        let c1 = Field::constant(GridBox::line(0, 64, 1.0).unwrap(), 2.0);
        let c2 = Field::constant(GridBox::line(0, 64, 1.0).unwrap(), -3.0);
        let body = ConvexBody::cube(1, 1.0).unwrap().normalize();
        let r = domination_check(&body, &c1, &c2, 3, 1).unwrap();
        assert_eq!(r.violations, 0);
        assert_eq!(r.max_excess, 0.0);
    }

    #[test]
    fn telescope_small_cases() {
        let body = ConvexBody::ball(1, 1.0).unwrap();
        let f = line((0..16).map(|i| ((i * 5) % 7) as f64 - 3.0).collect(), 0);
        let z = Field::zeros(GridBox::line(0, 16, 1.0).unwrap());
        let r = paraproduct_telescope(&f, &z, &body, 2, 1, 4).unwrap();
        assert_eq!((r.max_residual, r.fine_boundary, r.coarse_boundary), (0.0, 0.0, 0.0));
        let g = line((0..16).map(|i| (i as f64 * 0.7).cos()).collect(), -5);
        let one = paraproduct_telescope(&f, &g, &body, 2, 3, 3).unwrap();
        assert!(one.max_residual < 1e-12);
        assert!(paraproduct_telescope(&f, &g, &body, 2, 4, 3).is_err());
    }

    #[test]
    fn young_examples() {
        let id = young_convolution_check(&[1.0, 2.0, 3.0], &[1.0]).unwrap();
        assert_eq!(id.lhs, 14.0);
        assert!(id.holds_w && id.holds_w_squared);
        let r = young_convolution_check(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!((r.lhs, r.w, r.a_sq), (6.0, 2.0, 2.0));
        assert!(r.holds_w_squared && !r.holds_w);
    }

    #[test]
    fn product_variation_guards() {
        let f = line(vec![1.0, -2.0, 0.5, 3.0], 0);
        let z = Field::zeros(GridBox::line(0, 4, 1.0).unwrap());
        assert_eq!(martingale_product_variation_check(&f, &z, 3.0).unwrap().ratio, 0.0);
        let c = Field::constant(GridBox::line(0, 4, 1.0).unwrap(), 2.0);
        assert!(martingale_product_variation_check(&c, &f, 3.0).unwrap().ratio.is_finite());
        assert!(martingale_product_variation_check(&c, &f, 2.0).is_err());
    }

    fn field1() -> impl Strategy<Value = Field> {
        (-9i64..9, prop::collection::vec(-3.0f64..3.0, 1..40)).prop_map(|(o, v)| line(v, o))
    }

    proptest! {
        #[test]
        fn tower_property(f in field1(), a in 0i64..5, b in 0i64..5) {
            let lhs = cond_expect(&cond_expect(&f, b).unwrap(), a).unwrap();
            let rhs = cond_expect(&f, a.max(b)).unwrap();
            let diff = lhs.sub(&rhs).unwrap().max_abs();
            prop_assert!(diff <= 1e-12 * (1.0 + f.max_abs()));
            prop_assert!(cond_expect(&f, a).unwrap().max_abs() <= f.max_abs() * (1.0 + 1e-15));
            prop_assert!((cond_expect(&f, a).unwrap().integral() - f.integral()).abs() <= 1e-12 * (1.0 + f.abs().integral()));
        }

        #[test]
        fn differences_are_orthogonal_and_telescope(f in field1()) {
            let top = f.grid().top_level();
            let diffs: Vec<Field> = (1..=top as i64).map(|j| mart_diff(&f, j).unwrap()).collect();
            for (i, a) in diffs.iter().enumerate() {
                for b in &diffs[i + 1..] {
                    let dot = a.mul(b).unwrap().integral();
                    prop_assert!(dot.abs() <= 1e-12 * (1.0 + f.lp_norm(2.0).unwrap().powi(2)));
                }
            }
            let mut sum = cond_expect(&f, top as i64).unwrap();
            for d in &diffs {
                sum = sum.add(d).unwrap();
            }
            prop_assert!(sum.sub(&f).unwrap().max_abs() <= 1e-12 * (1.0 + f.max_abs()));
            let sq: f64 = diffs.iter().map(|d| d.lp_norm(2.0).unwrap().powi(2)).sum();
            prop_assert!(sq <= f.lp_norm(2.0).unwrap().powi(2) * (1.0 + 1e-12));
        }

        #[test]
        fn star_l2_bound(v in prop::collection::vec(-3.0f64..3.0, 1..20), n in 1u32..4) {
            let w = 1usize << (n - 1);
            let cells: Vec<f64> = v.iter().flat_map(|&x| std::iter::repeat_n(x, w)).collect();
            let h = line(cells, 0);
            let s = star_maximal(&h, n).unwrap();
            prop_assert!(s.lp_norm(2.0).unwrap().powi(2) <= 3.0 * h.lp_norm(2.0).unwrap().powi(2) * (1.0 + 1e-12));
            prop_assert!(s.combine(&h, |a, b| a - b.abs()).unwrap().samples().iter().all(|&x| x >= 0.0));
        }

        #[test]
        fn young_holds(a in prop::collection::vec(0.0f64..3.0, 1..20), s in prop::collection::vec(0.0f64..3.0, 1..10)) {
            prop_assert!(young_convolution_check(&a, &s).unwrap().holds_w_squared);
        }
    }
}
