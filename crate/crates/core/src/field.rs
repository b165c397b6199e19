//! Finitely supported real functions on uniform grids.
//!
//! A [`Field`] stores one sample per cell of a [`GridBox`]. Cells are indexed
//! by global integer coordinates, so the cell with index `p` covers
//! `[p·h, (p+1)·h)` per axis and its sample is read at the node `p·h`.
//! Everything outside the box is zero. With `h = 1` the same data describes a
//! function on `ℤ^d` with counting measure.

use std::fmt;

use crate::error::{Error, Result};

/// Axis-aligned box of grid cells with a uniform mesh width.
#[derive(Debug, Clone, PartialEq)]
pub struct GridBox {
    origin: Vec<i64>,
    extent: Vec<usize>,
    mesh: f64,
}

impl GridBox {
    pub fn new(origin: Vec<i64>, extent: Vec<usize>, mesh: f64) -> Result<Self> {
        if origin.is_empty() || origin.len() != extent.len() {
            return Err(Error::InvalidBox(format!(
                "origin has {} coordinates, extent has {}",
                origin.len(),
                extent.len()
            )));
        }
        if extent.contains(&0) {
            return Err(Error::InvalidBox("every extent must be at least 1".into()));
        }
        if !(mesh > 0.0 && mesh.is_finite()) {
            return Err(Error::InvalidBox(format!("mesh {mesh} is not a positive number")));
        }
        Ok(Self { origin, extent, mesh })
    }

    /// One-dimensional box `[origin, origin + len)`.
    pub fn line(origin: i64, len: usize, mesh: f64) -> Result<Self> {
        Self::new(vec![origin], vec![len], mesh)
    }

    /// Cube `[0, side)^dim` with unit mesh.
    pub fn unit_cells(dim: usize, side: usize) -> Result<Self> {
        Self::new(vec![0; dim], vec![side; dim], 1.0)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self) -> &[i64] {
        &self.origin
    }

    pub fn extent(&self) -> &[usize] {
        &self.extent
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    /// Exclusive upper corner along `axis`.
    pub fn end(&self, axis: usize) -> i64 {
        self.origin[axis] + self.extent[axis] as i64
    }

    pub fn len(&self) -> usize {
        self.extent.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lebesgue measure of one cell, `h^d`.
    pub fn cell_measure(&self) -> f64 {
        self.mesh.powi(self.dim() as i32)
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.iter()
            .zip(&self.origin)
            .zip(&self.extent)
            .all(|((&x, &o), &e)| x >= o && x < o + e as i64)
    }

    pub fn flat_index(&self, p: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for ((&x, &o), &e) in p.iter().zip(&self.origin).zip(&self.extent) {
            let off = x - o;
            if off < 0 || off >= e as i64 {
                return None;
            }
            idx = idx * e + off as usize;
        }
        Some(idx)
    }

    /// Global coordinates of the cell with flat index `flat`.
    pub fn point(&self, mut flat: usize) -> Vec<i64> {
        let mut p = vec![0i64; self.dim()];
        for axis in (0..self.dim()).rev() {
            let e = self.extent[axis];
            p[axis] = self.origin[axis] + (flat % e) as i64;
            flat /= e;
        }
        p
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn same_geometry(&self, other: &GridBox) -> bool {
        self == other
    }

    /// Smallest box containing `self` whose faces lie on the level-`level`
    /// dyadic lattice (multiples of `2^level` cells, anchored at 0).
    pub fn aligned_hull(&self, level: u32) -> GridBox {
        let side = 1i64 << level;
        let mut origin = Vec::with_capacity(self.dim());
        let mut extent = Vec::with_capacity(self.dim());
        for axis in 0..self.dim() {
            let lo = self.origin[axis].div_euclid(side) * side;
            let hi = (self.end(axis) + side - 1).div_euclid(side) * side;
            origin.push(lo);
            extent.push((hi - lo) as usize);
        }
        GridBox { origin, extent, mesh: self.mesh }
    }

    pub fn is_aligned(&self, level: u32) -> bool {
        self.aligned_hull(level) == *self
    }

    /// Grows the box by `cells` on every side.
    pub fn padded(&self, cells: usize) -> GridBox {
        GridBox {
            origin: self.origin.iter().map(|&o| o - cells as i64).collect(),
            extent: self.extent.iter().map(|&e| e + 2 * cells).collect(),
            mesh: self.mesh,
        }
    }

    /// Smallest box containing both boxes. Meshes must agree.
    pub fn union(&self, other: &GridBox) -> Result<GridBox> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        if self.mesh != other.mesh {
            return Err(Error::BoxMismatch);
        }
        let mut origin = Vec::with_capacity(self.dim());
        let mut extent = Vec::with_capacity(self.dim());
        for axis in 0..self.dim() {
            let lo = self.origin[axis].min(other.origin[axis]);
            let hi = self.end(axis).max(other.end(axis));
            origin.push(lo);
            extent.push((hi - lo) as usize);
        }
        Ok(GridBox { origin, extent, mesh: self.mesh })
    }

    /// Largest extent in cells.
    pub fn side(&self) -> usize {
        self.extent.iter().copied().max().unwrap_or(1)
    }

    /// Default coarsest dyadic level for fields on this box: `⌈log₂ S⌉ + 1`.
    pub fn top_level(&self) -> u32 {
        ceil_log2(self.side()) + 1
    }
}

pub(crate) fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Kind of (quasi)norm carried by a [`NormReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Strong,
    Weak,
    BmoDyadic,
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::Strong => "strong",
            NormKind::Weak => "weak",
            NormKind::BmoDyadic => "bmo_dyadic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub exponent: f64,
    pub kind: NormKind,
    pub value: f64,
}

/// Samples of a compactly supported function on a [`GridBox`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridBox,
    samples: Vec<f64>,
}

impl Field {
    pub fn new(grid: GridBox, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::SampleCount { expected: grid.len(), found: samples.len() });
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: GridBox) -> Self {
        let n = grid.len();
        Self { grid, samples: vec![0.0; n] }
    }

    pub fn constant(grid: GridBox, value: f64) -> Self {
        assert!(value.is_finite());
        let n = grid.len();
        Self { grid, samples: vec![value; n] }
    }

    /// Samples `f` at every cell. Panics if `f` returns a non-finite value.
    pub fn from_fn(grid: GridBox, mut f: impl FnMut(&[i64]) -> f64) -> Self {
        let samples: Vec<f64> = (0..grid.len())
            .map(|i| {
                let v = f(&grid.point(i));
                assert!(v.is_finite(), "non-finite sample at cell {i}");
                v
            })
            .collect();
        Self { grid, samples }
    }

    /// One-dimensional field on `[0, values.len())` with the given mesh.
    pub fn line(values: Vec<f64>, mesh: f64) -> Result<Self> {
        let grid = GridBox::line(0, values.len().max(1), mesh)?;
        if values.is_empty() {
            return Err(Error::InvalidBox("empty sample list".into()));
        }
        Self::new(grid, values)
    }

    pub(crate) fn from_raw(grid: GridBox, samples: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), samples.len());
        Self { grid, samples }
    }

    pub fn grid(&self) -> &GridBox {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Value at global cell coordinates, zero outside the box.
    pub fn get(&self, p: &[i64]) -> f64 {
        self.grid.flat_index(p).map_or(0.0, |i| self.samples[i])
    }

    /// Zero-extends or truncates onto `target`.
    pub fn embed(&self, target: &GridBox) -> Result<Field> {
        if target.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: target.dim() });
        }
        if target.mesh() != self.grid.mesh() {
            return Err(Error::BoxMismatch);
        }
        if target == &self.grid {
            return Ok(self.clone());
        }
        let mut out = vec![0.0; target.len()];
        if self.dim() == 1 {
            let lo = self.grid.origin[0].max(target.origin[0]);
            let hi = self.grid.end(0).min(target.end(0));
            for x in lo..hi {
                out[(x - target.origin[0]) as usize] = self.samples[(x - self.grid.origin[0]) as usize];
            }
        } else {
            for (i, v) in self.samples.iter().enumerate() {
                if let Some(j) = target.flat_index(&self.grid.point(i)) {
                    out[j] = *v;
                }
            }
        }
        Ok(Field::from_raw(target.clone(), out))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        let samples: Vec<f64> = self.samples.iter().map(|&v| f(v)).collect();
        assert!(samples.iter().all(|v| v.is_finite()), "map produced a non-finite sample");
        Field::from_raw(self.grid.clone(), samples)
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::BoxMismatch);
        }
        let samples: Vec<f64> =
            self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect();
        Ok(Field::from_raw(self.grid.clone(), samples))
    }

    /// Pointwise combination after embedding both fields in the union of
    /// their boxes.
    pub fn combine(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        let grid = self.grid.union(&other.grid)?;
        let a = self.embed(&grid)?;
        let b = other.embed(&grid)?;
        a.zip_with(&b, f)
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.combine(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.combine(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|v| c * v)
    }

    pub fn abs(&self) -> Field {
        self.map(f64::abs)
    }

    /// `∫ f`, i.e. the sample sum times the cell measure.
    pub fn integral(&self) -> f64 {
        self.samples.iter().sum::<f64>() * self.grid.cell_measure()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|&v| v == 0.0)
    }

    /// `(Σ|f|^p h^d)^{1/p}`, or `max|f|` for `p = ∞`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p <= 0.0 {
            return Err(Error::InvalidExponent(p));
        }
        if p.is_infinite() {
            return Ok(self.max_abs());
        }
        let sum: f64 = if p == 1.0 {
            self.samples.iter().map(|v| v.abs()).sum()
        } else if p == 2.0 {
            self.samples.iter().map(|v| v * v).sum()
        } else {
            self.samples.iter().map(|v| v.abs().powf(p)).sum()
        };
        Ok((sum * self.grid.cell_measure()).powf(1.0 / p))
    }

    /// `sup_λ λ·|{|f| > λ}|^{1/p}`, evaluated exactly from the sorted samples.
    pub fn weak_lp_quasinorm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p <= 0.0 || p.is_infinite() {
            return Err(Error::InvalidExponent(p));
        }
        let mut mags: Vec<f64> = self.samples.iter().map(|v| v.abs()).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        let cell = self.grid.cell_measure();
        Ok(mags
            .iter()
            .enumerate()
            .map(|(i, &v)| v * ((i + 1) as f64 * cell).powf(1.0 / p))
            .fold(0.0, f64::max))
    }

    /// Dyadic BMO seminorm with the infimum over constants realised by a
    /// median. Scans every dyadic cube meeting the box from single cells up
    /// to one level above the first level at which the box fits in one cube
    /// per axis (two per axis when it straddles a lattice hyperplane through
    /// the origin).
    pub fn bmo_dyadic_norm(&self) -> f64 {
        self.bmo_dyadic_profile().into_iter().fold(0.0, f64::max)
    }

    /// Largest mean oscillation per level, index = level.
    pub fn bmo_dyadic_profile(&self) -> Vec<f64> {
        let top = self.bmo_scan_top();
        (0..=top).map(|j| self.max_oscillation(j)).collect()
    }

    fn bmo_scan_top(&self) -> u32 {
        let mut j = 0;
        loop {
            let hull = self.grid.aligned_hull(j);
            let side = 1usize << j;
            if hull.extent().iter().all(|&e| e / side <= 2) {
                let fits_one = hull.extent().iter().all(|&e| e / side <= 1);
                let first = if fits_one { j } else { j + 1 };
                return first.max(self.grid.top_level()) + 1;
            }
            j += 1;
        }
    }

    fn max_oscillation(&self, level: u32) -> f64 {
        if level == 0 {
            return 0.0;
        }
        let hull = self.grid.aligned_hull(level);
        let side = 1i64 << level;
        let cube_cells = 1usize << (level as usize * self.dim());
        let coarse_extent: Vec<usize> = hull.extent().iter().map(|&e| e / side as usize).collect();
        let n_cubes: usize = coarse_extent.iter().product();
        let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); n_cubes];
        for (i, &v) in self.samples.iter().enumerate() {
            let p = self.grid.point(i);
            let mut idx = 0usize;
            for axis in 0..self.dim() {
                let c = ((p[axis] - hull.origin()[axis]) / side) as usize;
                idx = idx * coarse_extent[axis] + c;
            }
            buckets[idx].push(v);
        }
        buckets
            .into_iter()
            .filter(|b| !b.is_empty())
            .map(|mut vals| {
                let zeros = cube_cells - vals.len();
                mean_abs_deviation_from_median(&mut vals, zeros) / cube_cells as f64
            })
            .fold(0.0, f64::max)
    }
}

/// `Σ|v - m|` over `vals` plus `zeros` implicit zero samples, with `m` a
/// median of the combined multiset.
fn mean_abs_deviation_from_median(vals: &mut [f64], zeros: usize) -> f64 {
    vals.sort_by(f64::total_cmp);
    let total = vals.len() + zeros;
    // lower median of the merged multiset
    let target = (total - 1) / 2;
    let neg = vals.partition_point(|&v| v < 0.0);
    let median = if target < neg {
        vals[target]
    } else if target < neg + zeros {
        0.0
    } else {
        vals[target - zeros]
    };
    vals.iter().map(|v| (v - median).abs()).sum::<f64>() + zeros as f64 * median.abs()
}

impl Field {
    pub fn norm(&self, kind: NormKind, p: f64) -> Result<NormReport> {
        let value = match kind {
            NormKind::Strong => self.lp_norm(p)?,
            NormKind::Weak => self.weak_lp_quasinorm(p)?,
            NormKind::BmoDyadic => self.bmo_dyadic_norm(),
        };
        Ok(NormReport { exponent: p, kind, value })
    }
}
