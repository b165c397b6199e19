//! Symmetric convex bodies in ℝ^{2d} and their integer points.
//!
//! Every body is stored through its gauge (Minkowski functional) `γ`, so that
//! the dilate `G_t` is the closed set `{y : γ(y) ≤ t}`. A body carries
//! certified radii `r_in ≤ r_out` with `B(r_in) ⊆ G ⊆ B(r_out)`;
//! [`ConvexBody::normalize`] rescales so that `r_out = 1`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Row-major 2×2 matrix of scalars acting blockwise on `(y1, y2) ∈ ℝ^d × ℝ^d`.
pub type Block2 = [[f64; 2]; 2];

type Predicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

const SPOT_CHECKS: usize = 10_000;
const SPOT_SEED: u64 = 0x5eed_b0d1;

#[derive(Clone)]
enum Shape {
    Ball,
    Cube,
    /// `max_i |γ_{i1} y1 + γ_{i2} y2|`
    Gamma(Block2),
    /// `max(0, max_i a_i·y)`
    Polytope(Vec<Vec<f64>>),
    /// Gauge recovered from a membership oracle by bisection; the radii
    /// bracket the gauge along every ray.
    Custom { inside: Predicate, r_in: f64, r_out: f64 },
}

/// Descriptor of the shape family, for reports.
#[derive(Debug, Clone, PartialEq)]
pub enum BodyKind {
    Ball,
    Cube,
    Gamma(Block2),
    Polytope(usize),
    Custom,
}

impl fmt::Display for BodyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyKind::Ball => f.write_str("ball"),
            BodyKind::Cube => f.write_str("cube"),
            BodyKind::Gamma(g) => write!(f, "gamma[{},{};{},{}]", g[0][0], g[0][1], g[1][0], g[1][1]),
            BodyKind::Polytope(m) => write!(f, "polytope({m} half-spaces)"),
            BodyKind::Custom => f.write_str("custom"),
        }
    }
}

#[derive(Clone)]
pub struct ConvexBody {
    d: usize,
    shape: Shape,
    /// `G = scale · G_unit`, so `γ(y) = γ_unit(y) / scale`.
    scale: f64,
    r_in: f64,
    r_out: f64,
}

impl fmt::Debug for ConvexBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexBody")
            .field("d", &self.d)
            .field("kind", &self.kind())
            .field("r_in", &self.r_in)
            .field("r_out", &self.r_out)
            .finish()
    }
}

fn norm(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl ConvexBody {
    fn check_dim(d: usize) -> Result<()> {
        if d == 0 || d > 2 {
            return Err(Error::InvalidBody(format!("d = {d} is not supported (1 or 2)")));
        }
        Ok(())
    }

    /// Closed Euclidean ball of the given radius in ℝ^{2d}.
    pub fn ball(d: usize, radius: f64) -> Result<Self> {
        Self::check_dim(d)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidBody(format!("radius {radius} must be positive")));
        }
        Ok(Self { d, shape: Shape::Ball, scale: radius, r_in: radius, r_out: radius })
    }

    /// The cube `[-half, half]^{2d}`.
    pub fn cube(d: usize, half: f64) -> Result<Self> {
        Self::check_dim(d)?;
        if !(half > 0.0 && half.is_finite()) {
            return Err(Error::InvalidBody(format!("half side {half} must be positive")));
        }
        let r_out = half * ((2 * d) as f64).sqrt();
        Ok(Self { d, shape: Shape::Cube, scale: half, r_in: half, r_out })
    }

    /// `G_Γ = {(y1, y2) : |γ11 y1 + γ12 y2| ≤ 1, |γ21 y1 + γ22 y2| ≤ 1}` with
    /// Euclidean norms in ℝ^d.
    pub fn gamma(d: usize, g: Block2) -> Result<Self> {
        Self::check_dim(d)?;
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        if !det.is_finite() || det.abs() < 1e-12 || g.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBody("Γ must be a finite nonsingular matrix".into()));
        }
        let row = |i: usize| (g[i][0] * g[i][0] + g[i][1] * g[i][1]).sqrt();
        let r_in = 1.0 / row(0).max(row(1));
        let l = invert(g);
        let a = l[0][0] * l[0][0] + l[1][0] * l[1][0];
        let b = l[0][1] * l[0][1] + l[1][1] * l[1][1];
        let c = l[0][0] * l[0][1] + l[1][0] * l[1][1];
        let r_out = (a + b + 2.0 * c.abs()).sqrt();
        Ok(Self { d, shape: Shape::Gamma(g), scale: 1.0, r_in, r_out })
    }

    /// Symmetric polytope `{y : A·y ≤ 1}` given by the rows of `A`.
    pub fn polytope(d: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::check_dim(d)?;
        let dim = 2 * d;
        if rows.len() < dim + 1 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidBody(format!(
                "need at least {} half-spaces with {dim} coefficients each",
                dim + 1
            )));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBody("non-finite coefficient".into()));
        }
        let r_in = rows
            .iter()
            .map(|r| 1.0 / norm(r))
            .fold(f64::INFINITY, f64::min);
        if !(r_in > 0.0 && r_in.is_finite()) {
            return Err(Error::InvalidBody("a half-space row is zero".into()));
        }
        let r_out = polytope_circumradius(&rows)
            .ok_or_else(|| Error::InvalidBody("polytope has no vertices".into()))?;
        let body = Self { d, shape: Shape::Polytope(rows), scale: 1.0, r_in, r_out };
        body.spot_check(false)?;
        Ok(body)
    }

    /// Body given by a membership oracle with caller-certified radii
    /// `0 < r_in ≤ r_out`. The certificate, symmetry and midpoint convexity
    /// are spot-checked on a fixed random sample before the body is accepted.
    pub fn custom(
        d: usize,
        inside: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
        r_in: f64,
        r_out: f64,
    ) -> Result<Self> {
        Self::check_dim(d)?;
        if !(r_in > 0.0 && r_in <= r_out && r_out.is_finite()) {
            return Err(Error::InvalidBody(format!("radii ({r_in}, {r_out}) must satisfy 0 < r_in <= r_out")));
        }
        let body = Self {
            d,
            shape: Shape::Custom { inside: Arc::new(inside), r_in, r_out },
            scale: 1.0,
            r_in,
            r_out,
        };
        body.spot_check(true)?;
        Ok(body)
    }

    fn spot_check(&self, convexity: bool) -> Result<()> {
        let dim = 2 * self.d;
        let mut rng = ChaCha8Rng::seed_from_u64(SPOT_SEED);
        let mut u = vec![0.0; dim];
        for _ in 0..SPOT_CHECKS {
            random_direction(&mut rng, &mut u);
            let inner: Vec<f64> = u.iter().map(|v| v * self.r_in * (1.0 - 1e-9)).collect();
            let outer: Vec<f64> = u.iter().map(|v| v * self.r_out * (1.0 + 1e-9)).collect();
            if !self.contains(&inner, 1.0) {
                return Err(Error::InvalidBody(format!("r_in = {} is not certified along {u:?}", self.r_in)));
            }
            if self.contains(&outer, 1.0) {
                return Err(Error::InvalidBody(format!("r_out = {} is not certified along {u:?}", self.r_out)));
            }
            let neg: Vec<f64> = u.iter().map(|v| -v).collect();
            if (self.gauge(&u) - self.gauge(&neg)).abs() > 1e-9 * self.gauge(&u) {
                return Err(Error::InvalidBody(format!("body is not symmetric along {u:?}")));
            }
        }
        if convexity {
            let mut a = vec![0.0; dim];
            let mut b = vec![0.0; dim];
            for _ in 0..SPOT_CHECKS {
                self.sample_inside(&mut rng, &mut a);
                self.sample_inside(&mut rng, &mut b);
                let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
                if !self.contains(&mid, 1.0) {
                    return Err(Error::InvalidBody(format!("midpoint of {a:?} and {b:?} lies outside")));
                }
            }
        }
        Ok(())
    }

    fn sample_inside(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        loop {
            for v in out.iter_mut() {
                *v = rng.random_range(-self.r_out..=self.r_out);
            }
            if self.contains(out, 1.0) {
                return;
            }
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r_in(&self) -> f64 {
        self.r_in
    }

    pub fn r_out(&self) -> f64 {
        self.r_out
    }

    /// `τ = r_in / r_out`.
    pub fn tau(&self) -> f64 {
        self.r_in / self.r_out
    }

    pub fn kind(&self) -> BodyKind {
        match &self.shape {
            Shape::Ball => BodyKind::Ball,
            Shape::Cube => BodyKind::Cube,
            Shape::Gamma(g) => BodyKind::Gamma(*g),
            Shape::Polytope(rows) => BodyKind::Polytope(rows.len()),
            Shape::Custom { .. } => BodyKind::Custom,
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.r_out == 1.0
    }

    /// Rescales by `1 / r_out`, so that `B(τ) ⊆ G ⊆ B(1)`.
    pub fn normalize(&self) -> ConvexBody {
        let mut out = self.clone();
        out.scale = self.scale / self.r_out;
        out.r_in = self.r_in / self.r_out;
        out.r_out = 1.0;
        out
    }

    /// The body `s·G`.
    pub fn dilate(&self, s: f64) -> Result<ConvexBody> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidBody(format!("dilation {s} must be positive")));
        }
        let mut out = self.clone();
        out.scale *= s;
        out.r_in *= s;
        out.r_out *= s;
        Ok(out)
    }

    fn unit_gauge(&self, y: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball => norm(y),
            Shape::Cube => y.iter().fold(0.0, |m, v| m.max(v.abs())),
            Shape::Gamma(g) => {
                let d = self.d;
                let mut m = 0.0f64;
                for row in g {
                    let s: f64 = (0..d)
                        .map(|i| {
                            let v = row[0] * y[i] + row[1] * y[d + i];
                            v * v
                        })
                        .sum();
                    m = m.max(s);
                }
                m.sqrt()
            }
            Shape::Polytope(rows) => rows
                .iter()
                .map(|r| r.iter().zip(y).map(|(a, b)| a * b).sum::<f64>())
                .fold(0.0, f64::max),
            Shape::Custom { inside, r_in, r_out } => {
                let len = norm(y);
                if len == 0.0 {
                    return 0.0;
                }
                // γ(y) ∈ [|y|/r_out, |y|/r_in]; y/s ∈ G iff s ≥ γ(y)
                let (mut lo, mut hi) = (len / r_out, len / r_in);
                let mut z = vec![0.0; y.len()];
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    for (zi, yi) in z.iter_mut().zip(y) {
                        *zi = yi / mid;
                    }
                    if inside(&z) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        }
    }

    /// The gauge `γ(y) = inf{t > 0 : y ∈ G_t}`.
    pub fn gauge(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), 2 * self.d);
        self.unit_gauge(y) / self.scale
    }

    pub(crate) fn gauge_int(&self, m: &[i64], buf: &mut Vec<f64>) -> f64 {
        buf.clear();
        buf.extend(m.iter().map(|&v| v as f64));
        self.gauge(buf)
    }

    /// Membership in the closed dilate `G_t`.
    pub fn contains(&self, y: &[f64], t: f64) -> bool {
        match &self.shape {
            Shape::Custom { inside, .. } => {
                let s = t * self.scale;
                let z: Vec<f64> = y.iter().map(|v| v / s).collect();
                inside(&z)
            }
            _ => self.gauge(y) <= t,
        }
    }

    /// All integer points of `G_t`, sorted lexicographically.
    pub fn enumerate_lattice(&self, t: f64) -> Result<LatticePointSet> {
        let mut pts: Vec<Vec<i64>> = self.points_by_gauge(t)?.into_iter().map(|(_, p)| p).collect();
        pts.sort();
        Ok(LatticePointSet { t, count: pts.len(), points: pts })
    }

    /// Integer points of `G_t2 \ G_t1`, sorted lexicographically.
    pub fn shell(&self, t1: f64, t2: f64) -> Result<LatticePointSet> {
        if !(t1 > 0.0 && t1 < t2) {
            return Err(Error::InvalidBody(format!("shell needs 0 < t1 < t2, got ({t1}, {t2})")));
        }
        let mut pts: Vec<Vec<i64>> = self
            .points_by_gauge(t2)?
            .into_iter()
            .filter(|(g, _)| *g > t1)
            .map(|(_, p)| p)
            .collect();
        pts.sort();
        Ok(LatticePointSet { t: t2, count: pts.len(), points: pts })
    }

    /// Integer points of `G_t` tagged with their gauge and sorted by
    /// `(gauge, lexicographic)`. Prefixes of this list are exactly the
    /// point sets of smaller dilates, in the same order.
    pub fn points_by_gauge(&self, t: f64) -> Result<Vec<(f64, Vec<i64>)>> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::DegenerateScale(t));
        }
        let dim = 2 * self.d;
        let r = (t * self.r_out).ceil() as i64;
        let mut out = Vec::new();
        let mut p = vec![-r; dim];
        let mut buf = Vec::with_capacity(dim);
        'outer: loop {
            let g = self.gauge_int(&p, &mut buf);
            if g <= t {
                out.push((g, p.clone()));
            }
            for axis in (0..dim).rev() {
                if p[axis] < r {
                    p[axis] += 1;
                    continue 'outer;
                }
                p[axis] = -r;
            }
            break;
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        Ok(out)
    }

    /// For every prefix `(m_1, …, m_{2d-1})` the integer interval of last
    /// coordinates `m_{2d}` with `γ(m) ≤ t`. Empty rows are omitted.
    pub fn slices(&self, t: f64) -> Result<Vec<Slice>> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::DegenerateScale(t));
        }
        let dim = 2 * self.d;
        let r = (t * self.r_out).ceil() as i64;
        let mut out = Vec::new();
        let mut prefix = vec![-r; dim - 1];
        let mut y = vec![0.0; dim];
        let mut buf = Vec::with_capacity(dim);
        'outer: loop {
            if let Some((lo, hi)) = self.row_interval(&prefix, t, r, &mut y, &mut buf) {
                out.push(Slice { prefix: prefix.clone(), lo, hi });
            }
            for axis in (0..dim - 1).rev() {
                if prefix[axis] < r {
                    prefix[axis] += 1;
                    continue 'outer;
                }
                prefix[axis] = -r;
            }
            break;
        }
        Ok(out)
    }

    fn row_interval(
        &self,
        prefix: &[i64],
        t: f64,
        r: i64,
        y: &mut [f64],
        buf: &mut Vec<f64>,
    ) -> Option<(i64, i64)> {
        let last = y.len() - 1;
        for (yi, &p) in y.iter_mut().zip(prefix) {
            *yi = p as f64;
        }
        let g_at = |s: f64, y: &mut [f64]| {
            y[last] = s;
            self.gauge(y)
        };
        // golden-section search for a minimiser of the convex row gauge
        let (mut a, mut b) = (-(r as f64) - 1.0, r as f64 + 1.0);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - phi * (b - a);
        let mut e = a + phi * (b - a);
        let mut gc = g_at(c, y);
        let mut ge = g_at(e, y);
        for _ in 0..90 {
            if gc <= ge {
                b = e;
                e = c;
                ge = gc;
                c = b - phi * (b - a);
                gc = g_at(c, y);
            } else {
                a = c;
                c = e;
                gc = ge;
                e = a + phi * (b - a);
                ge = g_at(e, y);
            }
        }
        let centre = 0.5 * (a + b);
        // find some integer point of the row, then widen exactly
        let mut m = vec![0i64; y.len()];
        m[..last].copy_from_slice(prefix);
        let mut member = |v: i64| {
            m[last] = v;
            self.gauge_int(&m, buf) <= t
        };
        let seed = [centre.floor() as i64, centre.ceil() as i64]
            .into_iter()
            .find(|&v| member(v))?;
        // real endpoints by bisection, then integer correction
        let upper = {
            let (mut lo, mut hi) = (seed as f64, r as f64 + 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if g_at(mid, y) <= t {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo.floor() as i64
        };
        let lower = {
            let (mut lo, mut hi) = (-(r as f64) - 1.0, seed as f64);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if g_at(mid, y) <= t {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi.ceil() as i64
        };
        let mut hi = upper.max(seed);
        while hi > seed && !member(hi) {
            hi -= 1;
        }
        while member(hi + 1) {
            hi += 1;
        }
        let mut lo = lower.min(seed);
        while lo < seed && !member(lo) {
            lo += 1;
        }
        while member(lo - 1) {
            lo -= 1;
        }
        Some((lo, hi))
    }

    /// Monte Carlo estimate of `|G_t Δ (v + G_t)|` with its standard error.
    pub fn symmetric_difference_volume(&self, t: f64, v: &[f64], samples: usize, seed: u64) -> Result<(f64, f64)> {
        if !(t > 0.0) {
            return Err(Error::DegenerateScale(t));
        }
        if v.len() != 2 * self.d {
            return Err(Error::DimensionMismatch { expected: 2 * self.d, found: v.len() });
        }
        if v.iter().all(|&c| c == 0.0) {
            return Ok((0.0, 0.0));
        }
        let dim = 2 * self.d;
        let half = t * self.r_out + norm(v);
        let box_vol = (2.0 * half).powi(dim as i32);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut y = vec![0.0; dim];
        let mut shifted = vec![0.0; dim];
        let mut hits = 0usize;
        for _ in 0..samples {
            for i in 0..dim {
                y[i] = rng.random_range(-half..half);
                shifted[i] = y[i] - v[i];
            }
            if self.contains(&y, t) != self.contains(&shifted, t) {
                hits += 1;
            }
        }
        let frac = hits as f64 / samples as f64;
        let se = (frac * (1.0 - frac) / samples as f64).sqrt() * box_vol;
        Ok((frac * box_vol, se))
    }

    /// Number of dyadic cubes of side `2^n` meeting `∂G_{2^k}`, detected by
    /// the cube's corners straddling the boundary. Requires `n < k`.
    pub fn boundary_cube_count(&self, k: i32, n: i32) -> Result<usize> {
        if n >= k {
            return Err(Error::Hypothesis(format!("need n < k, got n = {n}, k = {k}")));
        }
        let dim = 2 * self.d;
        let t = 2f64.powi(k);
        let side = 2f64.powi(n);
        let r = (t * self.r_out / side).ceil() as i64;
        let mut count = 0usize;
        let mut c = vec![-r; dim];
        let mut corner = vec![0.0; dim];
        'outer: loop {
            let (mut any_in, mut any_out) = (false, false);
            for mask in 0..(1usize << dim) {
                for i in 0..dim {
                    corner[i] = (c[i] + ((mask >> i) & 1) as i64) as f64 * side;
                }
                if self.contains(&corner, t) {
                    any_in = true;
                } else {
                    any_out = true;
                }
            }
            if any_in && any_out {
                count += 1;
            }
            for axis in (0..dim).rev() {
                if c[axis] < r {
                    c[axis] += 1;
                    continue 'outer;
                }
                c[axis] = -r;
            }
            break;
        }
        Ok(count)
    }
}

/// Integer points of one row of a dilate: `(prefix, m)` for `lo ≤ m ≤ hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub prefix: Vec<i64>,
    pub lo: i64,
    pub hi: i64,
}

impl Slice {
    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticePointSet {
    pub t: f64,
    pub points: Vec<Vec<i64>>,
    pub count: usize,
}

pub(crate) fn invert(g: Block2) -> Block2 {
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]]
}

fn random_direction(rng: &mut ChaCha8Rng, u: &mut [f64]) {
    loop {
        for v in u.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let n = norm(u);
        if n > 1e-12 {
            u.iter_mut().for_each(|v| *v /= n);
            return;
        }
    }
}

/// Largest vertex norm of `{A·y ≤ 1}`, by brute-force vertex enumeration.
fn polytope_circumradius(rows: &[Vec<f64>]) -> Option<f64> {
    let dim = rows[0].len();
    let m = rows.len();
    let mut idx: Vec<usize> = (0..dim).collect();
    let mut best: Option<f64> = None;
    loop {
        let a = DMatrix::from_fn(dim, dim, |i, j| rows[idx[i]][j]);
        if let Some(v) = a.lu().solve(&DVector::from_element(dim, 1.0)) {
            let feasible = v.iter().all(|c| c.is_finite())
                && rows.iter().all(|r| r.iter().zip(v.iter()).map(|(x, y)| x * y).sum::<f64>() <= 1.0 + 1e-9);
            if feasible {
                let n = v.norm();
                best = Some(best.map_or(n, |b: f64| b.max(n)));
            }
        }
        // next combination
        let mut i = dim;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < m - dim + i {
                idx[i] += 1;
                for j in i + 1..dim {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_examples() {
        let b = ConvexBody::ball(1, 5.0).unwrap().normalize();
        assert_eq!(b.tau(), 1.0);
        assert_eq!(b.r_out(), 1.0);

        let c = ConvexBody::cube(1, 1.0).unwrap().normalize();
        assert!((c.tau() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(c.contains(&[0.7, -0.7], 1.0));
        assert!(!c.contains(&[0.71, 0.0], 1.0));

        let g = ConvexBody::gamma(1, [[1.0, 0.0], [0.0, 1.0]]).unwrap().normalize();
        assert!((g.tau() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(ConvexBody::ball(1, 0.0).is_err());
    }

    #[test]
    fn lattice_examples() {
        let b = ConvexBody::ball(1, 1.0).unwrap();
        assert_eq!(b.enumerate_lattice(0.5).unwrap().points, vec![vec![0, 0]]);
        let five = b.enumerate_lattice(1.0).unwrap();
        assert_eq!(five.count, 5);
        assert_eq!(five.points, vec![vec![-1, 0], vec![0, -1], vec![0, 0], vec![0, 1], vec![1, 0]]);
        let b2 = ConvexBody::ball(2, 1.0).unwrap();
        assert_eq!(b2.enumerate_lattice(1.0).unwrap().count, 9);
    }

    #[test]
    fn shell_examples() {
        let b = ConvexBody::ball(1, 1.0).unwrap();
        assert_eq!(b.shell(1.0, 1.2).unwrap().count, 0);
        let s = b.shell(1.0, 2f64.sqrt()).unwrap();
        assert_eq!(s.points, vec![vec![-1, -1], vec![-1, 1], vec![1, -1], vec![1, 1]]);
        assert!(b.shell(1.0, 1.0).is_err());
    }

    #[test]
    fn gamma_radii_are_tight() {
        let g = [[1.0, 0.5], [-0.25, 2.0]];
        let body = ConvexBody::gamma(1, g).unwrap();
        // a brute-force circle scan of the boundary
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..20_000 {
            let a = i as f64 * std::f64::consts::TAU / 20_000.0;
            let u = [a.cos(), a.sin()];
            let rho = 1.0 / body.gauge(&u);
            lo = lo.min(rho);
            hi = hi.max(rho);
        }
        assert!((lo - body.r_in()).abs() < 1e-6, "{lo} vs {}", body.r_in());
        assert!(hi <= body.r_out() && hi > body.r_out() - 1e-3, "{hi} vs {}", body.r_out());
        // the outer radius is attained at a vertex Λ(±1, ±1)
        let l = invert(g);
        let v = [l[0][0] + l[0][1], l[1][0] + l[1][1]];
        let w = [l[0][0] - l[0][1], l[1][0] - l[1][1]];
        assert!((norm(&v).max(norm(&w)) - body.r_out()).abs() < 1e-14);
    }

    #[test]
    fn polytope_matches_cube() {
        let rows = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let p = ConvexBody::polytope(1, rows).unwrap();
        assert!((p.r_out() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(p.r_in(), 1.0);
        let c = ConvexBody::cube(1, 1.0).unwrap();
        for t in [0.5, 1.0, 2.5, 3.0] {
            assert_eq!(p.enumerate_lattice(t).unwrap(), c.enumerate_lattice(t).unwrap());
        }
        // half-plane pair only: unbounded
        assert!(ConvexBody::polytope(1, vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![2.0, 0.0]]).is_err());
    }

    #[test]
    fn custom_body_checks() {
        let disk = ConvexBody::custom(1, |y| y[0] * y[0] + y[1] * y[1] <= 4.0, 2.0, 2.0).unwrap();
        assert!((disk.gauge(&[3.0, 4.0]) - 2.5).abs() < 1e-12);
        assert!(ConvexBody::custom(1, |y| y[0] * y[0] + y[1] * y[1] <= 4.0, 1.0, 1.5).is_err());
        // an annulus-like cross is not convex
        let cross = |y: &[f64]| (y[0].abs() <= 1.0 && y[1].abs() <= 0.1) || (y[1].abs() <= 1.0 && y[0].abs() <= 0.1);
        assert!(ConvexBody::custom(1, cross, 0.1, 1.01).is_err());
        // shifted disk is not symmetric
        let off = |y: &[f64]| (y[0] - 0.2).powi(2) + y[1] * y[1] <= 1.0;
        assert!(ConvexBody::custom(1, off, 0.7, 1.3).is_err());
    }

    #[test]
    fn slices_cover_the_lattice_set() {
        let bodies = [
            ConvexBody::ball(1, 1.0).unwrap(),
            ConvexBody::cube(1, 1.0).unwrap().normalize(),
            ConvexBody::gamma(1, [[1.0, 0.7], [-0.3, 1.5]]).unwrap().normalize(),
            ConvexBody::gamma(2, [[0.4, 1.0], [1.2, -0.2]]).unwrap().normalize(),
        ];
        for body in &bodies {
            for t in [0.3, 1.0, 2.7, 6.0] {
                let mut from_slices: Vec<Vec<i64>> = Vec::new();
                for s in body.slices(t).unwrap() {
                    for m in s.lo..=s.hi {
                        let mut p = s.prefix.clone();
                        p.push(m);
                        from_slices.push(p);
                    }
                }
                from_slices.sort();
                assert_eq!(from_slices, body.enumerate_lattice(t).unwrap().points, "{body:?} t={t}");
            }
        }
    }

    #[test]
    fn symmetric_difference_of_disks() {
        let b = ConvexBody::ball(1, 1.0).unwrap();
        assert_eq!(b.symmetric_difference_volume(1.0, &[0.0, 0.0], 10, 1).unwrap(), (0.0, 0.0));
        let dist: f64 = 0.2;
        let lens = 2.0 * (dist / 2.0).acos() - (dist / 2.0) * (4.0 - dist * dist).sqrt();
        let exact = 2.0 * (std::f64::consts::PI - lens);
        let (est, se) = b.symmetric_difference_volume(1.0, &[dist, 0.0], 400_000, 7).unwrap();
        assert!((est - exact).abs() < 5.0 * se, "{est} ± {se} vs {exact}");
        let (far, _) = b.symmetric_difference_volume(1.0, &[2.5, 0.0], 200_000, 7).unwrap();
        assert!((far - 2.0 * std::f64::consts::PI).abs() < 0.1);
    }

    #[test]
    fn boundary_cubes_scale_like_the_surface() {
        let b = ConvexBody::ball(1, 1.0).unwrap();
        // in ℝ², cubes of side 2^n meeting a circle of radius 2^k grow like 2^{k-n}
        let c: Vec<f64> = (1..6)
            .map(|m| b.boundary_cube_count(6, 6 - m).unwrap() as f64 / 2f64.powi(m))
            .collect();
        for v in c {
            assert!(v > 1.0 && v < 16.0, "{v}");
        }
    }
}
