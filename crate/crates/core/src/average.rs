//! Bilinear averages over dilates of a convex body.
//!
//! In [`Mode::Continuum`] the integral over `G_t` is replaced by the mean
//! over the nodes `hm`, `m ∈ G_{t/h} ∩ ℤ^{2d}`, of `f1(x + hm₁) f2(x + hm₂)`.
//! Dividing by the node count instead of `|G_t|` makes the rule exact on
//! constants. [`Mode::Lattice`] is the discrete operator on `ℤ^d`, the mean
//! of `f1(x − k) f2(x − m)` over `(k, m) ∈ G_t ∩ ℤ^{2d}`.
//!
//! [`avg_at`] and [`avg_sweep`] sum over lattice points ordered by
//! `(gauge, lexicographic)`, so a sweep that grows the point set shell by
//! shell performs exactly the same floating-point operations as separate
//! evaluations. [`avg_field`] and [`avg_fields`] evaluate whole grids through
//! row slices and prefix sums; they agree with [`avg_at`] up to rounding.

use crate::body::{invert, Block2, ConvexBody, Slice};
use crate::error::{Error, Result};
use crate::field::{Field, GridBox};
use crate::time::TimeGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Continuum,
    Lattice,
}

#[derive(Debug, Clone, Copy)]
pub struct AvgRequest<'a> {
    pub body: &'a ConvexBody,
    pub t: f64,
    pub f1: &'a Field,
    pub f2: &'a Field,
    pub mode: Mode,
}

fn check_inputs(body: &ConvexBody, f1: &Field, f2: &Field) -> Result<()> {
    if f1.dim() != body.d() {
        return Err(Error::DimensionMismatch { expected: body.d(), found: f1.dim() });
    }
    if f2.dim() != body.d() {
        return Err(Error::DimensionMismatch { expected: body.d(), found: f2.dim() });
    }
    if f1.grid().mesh() != f2.grid().mesh() {
        return Err(Error::BoxMismatch);
    }
    Ok(())
}

fn lattice_scale(t: f64, mode: Mode, mesh: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::DegenerateScale(t));
    }
    Ok(match mode {
        Mode::Continuum => t / mesh,
        Mode::Lattice => t,
    })
}

impl<'a> AvgRequest<'a> {
    pub fn new(body: &'a ConvexBody, t: f64, f1: &'a Field, f2: &'a Field, mode: Mode) -> Result<Self> {
        check_inputs(body, f1, f2)?;
        lattice_scale(t, mode, f1.grid().mesh())?;
        Ok(Self { body, t, f1, f2, mode })
    }

    fn scale(&self) -> Result<f64> {
        lattice_scale(self.t, self.mode, self.f1.grid().mesh())
    }
}

struct Term<'a> {
    f1: &'a Field,
    f2: &'a Field,
    sign: i64,
    p1: Vec<i64>,
    p2: Vec<i64>,
}

impl<'a> Term<'a> {
    fn new(f1: &'a Field, f2: &'a Field, mode: Mode) -> Self {
        let d = f1.dim();
        let sign = if mode == Mode::Continuum { 1 } else { -1 };
        Self { f1, f2, sign, p1: vec![0; d], p2: vec![0; d] }
    }

    fn eval(&mut self, x: &[i64], m: &[i64]) -> f64 {
        let d = x.len();
        for i in 0..d {
            self.p1[i] = x[i] + self.sign * m[i];
            self.p2[i] = x[i] + self.sign * m[d + i];
        }
        self.f1.get(&self.p1) * self.f2.get(&self.p2)
    }
}

/// The average at one grid point `x` (global cell coordinates).
pub fn avg_at(req: &AvgRequest<'_>, x: &[i64]) -> Result<f64> {
    if x.len() != req.f1.dim() {
        return Err(Error::DimensionMismatch { expected: req.f1.dim(), found: x.len() });
    }
    let pts = req.body.points_by_gauge(req.scale()?)?;
    if pts.is_empty() {
        return Err(Error::DegenerateScale(req.t));
    }
    let mut term = Term::new(req.f1, req.f2, req.mode);
    let mut s = 0.0;
    for (_, m) in &pts {
        s += term.eval(x, m);
    }
    Ok(s / pts.len() as f64)
}

/// Averages at every scale of `grid`, accumulated shell by shell. Each entry
/// is bit-identical to the corresponding [`avg_at`].
pub fn avg_sweep(
    body: &ConvexBody,
    f1: &Field,
    f2: &Field,
    mode: Mode,
    grid: &TimeGrid,
    x: &[i64],
) -> Result<Vec<f64>> {
    check_inputs(body, f1, f2)?;
    if x.len() != f1.dim() {
        return Err(Error::DimensionMismatch { expected: f1.dim(), found: x.len() });
    }
    let Some(&t_max) = grid.times().last() else {
        return Ok(Vec::new());
    };
    let mesh = f1.grid().mesh();
    let pts = body.points_by_gauge(lattice_scale(t_max, mode, mesh)?)?;
    let mut term = Term::new(f1, f2, mode);
    let mut out = Vec::with_capacity(grid.len());
    let (mut s, mut n) = (0.0, 0usize);
    for &t in grid.times() {
        let scale = lattice_scale(t, mode, mesh)?;
        while n < pts.len() && pts[n].0 <= scale {
            s += term.eval(x, &pts[n].1);
            n += 1;
        }
        if n == 0 {
            return Err(Error::DegenerateScale(t));
        }
        out.push(s / n as f64);
    }
    Ok(out)
}

/// Row slices of one dilate, flattened to offsets into padded arrays.
struct Kernel {
    off1: Vec<i64>,
    off2: Vec<i64>,
    len: Vec<i64>,
    count: usize,
}

struct Padded {
    grid: GridBox,
    f1: Vec<f64>,
    /// prefix sums of f2 along the last axis, one extra entry per row
    pf2: Vec<f64>,
    s1: Vec<i64>,
    s2: Vec<i64>,
}

impl Padded {
    fn new(f1: &Field, f2: &Field, out: &GridBox, reach: usize) -> Result<Self> {
        let grid = out.padded(reach);
        let d = grid.dim();
        let e = grid.extent();
        let a = f1.embed(&grid)?.into_samples();
        let b = f2.embed(&grid)?.into_samples();
        let last = e[d - 1];
        let rows = grid.len() / last;
        let mut pf2 = Vec::with_capacity(rows * (last + 1));
        for r in 0..rows {
            let mut acc = 0.0;
            pf2.push(0.0);
            for v in &b[r * last..(r + 1) * last] {
                acc += v;
                pf2.push(acc);
            }
        }
        let mut s1 = vec![1i64; d];
        let mut s2 = vec![1i64; d];
        for i in (0..d - 1).rev() {
            s1[i] = s1[i + 1] * e[i + 1] as i64;
            let ext = if i + 1 == d - 1 { last + 1 } else { e[i + 1] };
            s2[i] = s2[i + 1] * ext as i64;
        }
        Ok(Self { grid, f1: a, pf2, s1, s2 })
    }

    fn kernel(&self, slices: &[Slice], mode: Mode) -> Kernel {
        let d = self.grid.dim();
        let sign = if mode == Mode::Continuum { 1 } else { -1 };
        let mut k = Kernel { off1: Vec::new(), off2: Vec::new(), len: Vec::new(), count: 0 };
        for s in slices {
            let o1: i64 = (0..d).map(|i| sign * s.prefix[i] * self.s1[i]).sum();
            let start = if mode == Mode::Continuum { s.lo } else { -s.hi };
            let o2: i64 = (0..d - 1).map(|i| sign * s.prefix[d + i] * self.s2[i]).sum::<i64>() + start;
            k.off1.push(o1);
            k.off2.push(o2);
            k.len.push(s.hi - s.lo + 1);
            k.count += s.len();
        }
        k
    }

    fn eval(&self, k: &Kernel, x: &[i64]) -> f64 {
        let o = self.grid.origin();
        let b1: i64 = x.iter().zip(o).zip(&self.s1).map(|((x, o), s)| (x - o) * s).sum();
        let b2: i64 = x.iter().zip(o).zip(&self.s2).map(|((x, o), s)| (x - o) * s).sum();
        let mut acc = 0.0;
        for j in 0..k.off1.len() {
            let v = self.f1[(b1 + k.off1[j]) as usize];
            if v != 0.0 {
                let a = (b2 + k.off2[j]) as usize;
                acc += v * (self.pf2[a + k.len[j] as usize] - self.pf2[a]);
            }
        }
        acc / k.count as f64
    }
}

fn reach(body: &ConvexBody, scale: f64) -> usize {
    (scale * body.r_out()).ceil() as usize + 1
}

/// The average at every cell of `out`.
pub fn avg_field(req: &AvgRequest<'_>, out: &GridBox) -> Result<Field> {
    let grid = TimeGrid::new(vec![req.t])?;
    Ok(avg_fields(req.body, req.f1, req.f2, req.mode, &grid, out)?.remove(0))
}

/// One field of averages per scale of `grid`, evaluated on `out`.
pub fn avg_fields(
    body: &ConvexBody,
    f1: &Field,
    f2: &Field,
    mode: Mode,
    grid: &TimeGrid,
    out: &GridBox,
) -> Result<Vec<Field>> {
    check_inputs(body, f1, f2)?;
    if out.dim() != f1.dim() || out.mesh() != f1.grid().mesh() {
        return Err(Error::BoxMismatch);
    }
    let mesh = f1.grid().mesh();
    let Some(&t_max) = grid.times().last() else {
        return Ok(Vec::new());
    };
    let padded = Padded::new(f1, f2, out, reach(body, lattice_scale(t_max, mode, mesh)?))?;
    let points: Vec<Vec<i64>> = out.points().collect();
    let mut fields = Vec::with_capacity(grid.len());
    for &t in grid.times() {
        let slices = body.slices(lattice_scale(t, mode, mesh)?)?;
        let k = padded.kernel(&slices, mode);
        if k.count == 0 {
            return Err(Error::DegenerateScale(t));
        }
        let vals: Vec<f64> = points.iter().map(|x| padded.eval(&k, x)).collect();
        fields.push(Field::new(out.clone(), vals)?);
    }
    Ok(fields)
}

/// The d = 1 discrete average through one prefix-sum query per row of
/// `G_t ∩ ℤ²`: `O(t)` work per point instead of `O(t²)`.
pub fn fast_slice_avg(req: &AvgRequest<'_>, x: &[i64]) -> Result<f64> {
    if req.f1.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: req.f1.dim() });
    }
    if req.mode != Mode::Lattice {
        return Err(Error::Hypothesis("the slice path is defined for the discrete operator".into()));
    }
    let out = GridBox::new(x.to_vec(), vec![1], req.f1.grid().mesh())?;
    Ok(avg_field(req, &out)?.samples()[0])
}

/// Continuum-mode average of functions given as closures on ℝ^d, at an
/// arbitrary point `x`, with quadrature mesh `h`.
pub fn avg_fn(
    body: &ConvexBody,
    t: f64,
    h: f64,
    f1: impl Fn(&[f64]) -> f64,
    f2: impl Fn(&[f64]) -> f64,
    x: &[f64],
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidBox(format!("mesh {h} must be positive")));
    }
    let d = body.d();
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: x.len() });
    }
    let pts = body.points_by_gauge(lattice_scale(t, Mode::Continuum, h)?)?;
    let mut y1 = vec![0.0; d];
    let mut y2 = vec![0.0; d];
    let mut s = 0.0;
    for (_, m) in &pts {
        for i in 0..d {
            y1[i] = x[i] + h * m[i] as f64;
            y2[i] = x[i] + h * m[d + i] as f64;
        }
        s += f1(&y1) * f2(&y2);
    }
    Ok(s / pts.len() as f64)
}

/// `M_{Λ,t}(f1, f2)(x)`: the mean of `f1(x + λ11 u1 + λ12 u2) f2(x + λ21 u1 + λ22 u2)`
/// over `|u1| < t, |u2| < t`, by the midpoint rule with `n` nodes per
/// coordinate on `[-t, t]`.
pub fn dtt_avg(
    lambda: Block2,
    d: usize,
    t: f64,
    n: usize,
    f1: impl Fn(&[f64]) -> f64,
    f2: impl Fn(&[f64]) -> f64,
    x: &[f64],
) -> Result<f64> {
    let det = lambda[0][0] * lambda[1][1] - lambda[0][1] * lambda[1][0];
    if !det.is_finite() || det.abs() < 1e-12 {
        return Err(Error::InvalidBody("Λ must be nonsingular".into()));
    }
    if !(t > 0.0) || n == 0 {
        return Err(Error::DegenerateScale(t));
    }
    if x.len() != d || !(1..=2).contains(&d) {
        return Err(Error::DimensionMismatch { expected: d, found: x.len() });
    }
    let step = 2.0 * t / n as f64;
    let nodes: Vec<f64> = (0..n).map(|i| -t + (i as f64 + 0.5) * step).collect();
    // all u ∈ [-t, t]^d with |u| < t
    let mut disk: Vec<Vec<f64>> = Vec::new();
    let mut idx = vec![0usize; d];
    'outer: loop {
        let u: Vec<f64> = idx.iter().map(|&i| nodes[i]).collect();
        if u.iter().map(|v| v * v).sum::<f64>() < t * t {
            disk.push(u);
        }
        for a in (0..d).rev() {
            if idx[a] + 1 < n {
                idx[a] += 1;
                continue 'outer;
            }
            idx[a] = 0;
        }
        break;
    }
    let mut y1 = vec![0.0; d];
    let mut y2 = vec![0.0; d];
    let mut s = 0.0;
    for u1 in &disk {
        for u2 in &disk {
            for i in 0..d {
                y1[i] = x[i] + lambda[0][0] * u1[i] + lambda[0][1] * u2[i];
                y2[i] = x[i] + lambda[1][0] * u1[i] + lambda[1][1] * u2[i];
            }
            s += f1(&y1) * f2(&y2);
        }
    }
    Ok(s / (disk.len() * disk.len()) as f64)
}

/// The same operator computed as an average over `(G_Γ)_t`, `Γ = Λ⁻¹`.
pub fn dtt_via_body(
    lambda: Block2,
    d: usize,
    t: f64,
    h: f64,
    f1: impl Fn(&[f64]) -> f64,
    f2: impl Fn(&[f64]) -> f64,
    x: &[f64],
) -> Result<f64> {
    let body = ConvexBody::gamma(d, invert(lambda))?;
    avg_fn(&body, t, h, f1, f2, x)
}

/// Least-squares slope of `log err` against `log h`: the observed order of
/// convergence.
pub fn observed_order(h: &[f64], err: &[f64]) -> f64 {
    assert_eq!(h.len(), err.len());
    let pts: Vec<(f64, f64)> = h
        .iter()
        .zip(err)
        .filter(|(_, e)| **e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::INFINITY;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_line(vals: Vec<f64>, origin: i64) -> Field {
        Field::new(GridBox::line(origin, vals.len(), 1.0).unwrap(), vals).unwrap()
    }

    #[test]
    fn constants_average_to_their_product() {
        let body = ConvexBody::gamma(1, [[1.0, 0.3], [0.2, 1.0]]).unwrap().normalize();
        let grid = GridBox::line(-40, 80, 0.25).unwrap();
        let f1 = Field::constant(grid.clone(), 3.0);
        let f2 = Field::constant(grid, -0.5);
        for mode in [Mode::Continuum, Mode::Lattice] {
            let req = AvgRequest::new(&body, 2.5, &f1, &f2, mode).unwrap();
            assert_eq!(avg_at(&req, &[0]).unwrap(), -1.5);
        }
    }

    #[test]
    fn lattice_examples() {
        let ball = ConvexBody::ball(1, 1.0).unwrap();
        let delta = unit_line(vec![1.0], 0);
        let req = AvgRequest::new(&ball, 1.0, &delta, &delta, Mode::Lattice).unwrap();
        assert_eq!(avg_at(&req, &[0]).unwrap(), 0.2);
        let at_one = unit_line(vec![1.0], 1);
        let req = AvgRequest::new(&ball, 1.0, &at_one, &delta, Mode::Lattice).unwrap();
        assert_eq!(avg_at(&req, &[0]).unwrap(), 0.2);
        assert_eq!(fast_slice_avg(&req, &[0]).unwrap(), 0.2);
    }

    #[test]
    fn modes_agree_on_symmetric_bodies() {
        // G = -G, so summing f(x - m) or f(x + m) visits the same terms
        let body = ConvexBody::gamma(1, [[1.0, 0.6], [0.1, 1.0]]).unwrap().normalize();
        let f1 = unit_line(vec![1.0, 0.0, 2.0, 0.0], 0);
        let f2 = unit_line(vec![1.0, 3.0, 1.0], -1);
        let lat = AvgRequest::new(&body, 2.0, &f1, &f2, Mode::Lattice).unwrap();
        let cont = AvgRequest::new(&body, 2.0, &f1, &f2, Mode::Continuum).unwrap();
        for x in -3..5 {
            assert_eq!(avg_at(&lat, &[x]).unwrap(), avg_at(&cont, &[x]).unwrap());
        }
    }

    #[test]
    fn sweep_is_bit_identical() {
        let body = ConvexBody::cube(1, 1.0).unwrap().normalize();
        let f1 = unit_line((0..30).map(|i| ((i * 7919) % 13) as f64 * 0.1 - 0.6).collect(), -15);
        let f2 = unit_line((0..30).map(|i| (i as f64 * 0.37).sin()).collect(), -10);
        let grid = TimeGrid::geometric(0.4, 9.0, 5).unwrap();
        for mode in [Mode::Continuum, Mode::Lattice] {
            let sweep = avg_sweep(&body, &f1, &f2, mode, &grid, &[2]).unwrap();
            for (t, a) in grid.times().iter().zip(&sweep) {
                let req = AvgRequest::new(&body, *t, &f1, &f2, mode).unwrap();
                assert_eq!(avg_at(&req, &[2]).unwrap().to_bits(), a.to_bits());
            }
        }
        let empty = TimeGrid::new(vec![]).unwrap();
        assert!(avg_sweep(&body, &f1, &f2, Mode::Lattice, &empty, &[0]).unwrap().is_empty());
    }

    #[test]
    fn field_path_matches_pointwise_in_two_dimensions() {
        let body = ConvexBody::gamma(2, [[1.0, 0.4], [-0.3, 0.9]]).unwrap().normalize();
        let grid = GridBox::new(vec![-3, 0], vec![6, 5], 0.5).unwrap();
        let f1 = Field::from_fn(grid.clone(), |p| (p[0] * 3 + p[1]) as f64 % 5.0);
        let f2 = Field::from_fn(grid.clone(), |p| (p[0] - 2 * p[1]) as f64 * 0.5);
        for mode in [Mode::Continuum, Mode::Lattice] {
            let req = AvgRequest::new(&body, 1.3, &f1, &f2, mode).unwrap();
            let out = grid.padded(1);
            let field = avg_field(&req, &out).unwrap();
            for (i, p) in out.points().enumerate() {
                let a = avg_at(&req, &p).unwrap();
                assert!((field.samples()[i] - a).abs() < 1e-12, "{mode:?} {p:?}");
            }
        }
    }

    #[test]
    fn dtt_identity_and_constants() {
        let id = [[1.0, 0.0], [0.0, 1.0]];
        let c = dtt_avg(id, 1, 1.0, 64, |_| 2.0, |_| 3.0, &[0.3]).unwrap();
        assert!((c - 6.0).abs() < 1e-12);
        // decoupled: product of two interval averages of x ↦ x² around 0.5
        let v = dtt_avg(id, 1, 1.0, 400, |y| y[0] * y[0], |y| y[0], &[0.5]).unwrap();
        let avg_sq = 0.25 + 1.0 / 3.0;
        assert!((v - avg_sq * 0.5).abs() < 1e-5, "{v}");
        assert!(dtt_avg([[1.0, 2.0], [0.5, 1.0]], 1, 1.0, 8, |_| 1.0, |_| 1.0, &[0.0]).is_err());
    }

    #[test]
    fn dtt_routes_converge() {
        let lambda = [[1.0, 0.5], [-0.4, 0.8]];
        let f1 = |y: &[f64]| (1.3 * y[0]).sin() + 0.2;
        let f2 = |y: &[f64]| (0.7 * y[0]).cos();
        let hs = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
        let errs: Vec<f64> = hs
            .iter()
            .map(|&h| {
                let n = (2.0 / h) as usize;
                let m = dtt_avg(lambda, 1, 1.0, n, f1, f2, &[0.1]).unwrap();
                let a = dtt_via_body(lambda, 1, 1.0, h, f1, f2, &[0.1]).unwrap();
                (m - a).abs()
            })
            .collect();
        assert!(errs[3] < errs[0] / 4.0, "{errs:?}");
        assert!(observed_order(&[1.0, 0.5, 0.25], &[4.0, 2.0, 1.0]) == 1.0);
    }

    fn small_field() -> impl Strategy<Value = Field> {
        (-6i64..6, prop::collection::vec(-4i32..5, 1..14))
            .prop_map(|(o, v)| unit_line(v.into_iter().map(f64::from).collect(), o))
    }

    fn body() -> impl Strategy<Value = ConvexBody> {
        (0usize..3, -0.9f64..0.9, -0.9f64..0.9).prop_map(|(k, a, b)| match k {
            0 => ConvexBody::ball(1, 1.0).unwrap(),
            1 => ConvexBody::cube(1, 1.0).unwrap().normalize(),
            _ => ConvexBody::gamma(1, [[1.0, a], [b, 1.0]]).unwrap().normalize(),
        })
    }

    proptest! {
        #[test]
        fn slice_path_is_exact_on_integers(b in body(), f1 in small_field(), f2 in small_field(), t in 0.3f64..9.0, x in -12i64..12) {
            let req = AvgRequest::new(&b, t, &f1, &f2, Mode::Lattice).unwrap();
            prop_assert_eq!(fast_slice_avg(&req, &[x]).unwrap(), avg_at(&req, &[x]).unwrap());
        }

        #[test]
        fn bilinear_positive_bounded(b in body(), f in small_field(), g in small_field(), h in small_field(), t in 0.3f64..6.0, x in -8i64..8, a in -2.0f64..2.0, c in -2.0f64..2.0) {
            let lin = f.scale(a).add(&g.scale(c)).unwrap();
            let at = |u: &Field, v: &Field| avg_at(&AvgRequest::new(&b, t, u, v, Mode::Continuum).unwrap(), &[x]).unwrap();
            let lhs = at(&lin, &h);
            let rhs = a * at(&f, &h) + c * at(&g, &h);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
            prop_assert!(at(&f.abs(), &h.abs()) >= 0.0);
            prop_assert!(at(&f, &h).abs() <= f.max_abs() * h.max_abs() + 1e-12);
            for l in [1.0, 1.5, 2.0] {
                let holder = at(&f.map(|v| v.abs().powf(l)), &h.map(|v| v.abs().powf(l))).powf(1.0 / l);
                prop_assert!(at(&f, &h).abs() <= holder + 1e-12);
            }
        }
    }

    #[test]
    fn zero_inputs() {
        let ball = ConvexBody::ball(1, 1.0).unwrap();
        let f1 = unit_line(vec![1.0, 2.0, 3.0], 0);
        let z = Field::zeros(GridBox::line(0, 3, 1.0).unwrap());
        let req = AvgRequest::new(&ball, 2.0, &f1, &z, Mode::Lattice).unwrap();
        assert_eq!(fast_slice_avg(&req, &[1]).unwrap(), 0.0);
        // δ₀ in the first slot: one row of the lattice set
        let delta = unit_line(vec![1.0], 0);
        let req = AvgRequest::new(&ball, 2.0, &delta, &f1, Mode::Lattice).unwrap();
        let count = ball.enumerate_lattice(2.0).unwrap().count as f64;
        // x = 1, k = 1 ⇒ rows m with (1, m) ∈ G_2: m ∈ {-1, 0, 1}
        let expect = (f1.get(&[2]) + f1.get(&[1]) + f1.get(&[0])) / count;
        assert_eq!(fast_slice_avg(&req, &[1]).unwrap(), expect);
        assert!(AvgRequest::new(&ball, 0.0, &delta, &f1, Mode::Lattice).is_err());
    }
}
