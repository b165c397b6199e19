//! Dyadic Calderón–Zygmund decomposition at height `α^{p/p_i}` in `L^{p_i}`.
//!
//! A cube `Q` is selected when `avg_Q |f|^{p_i} > α^p`. If every cube of some
//! level is unselected, so is every coarser cube (a parent's average is the
//! mean of its children's), so the descent starts at the finest such level
//! and the selected cubes do not depend on how much coarser one starts.

use crate::error::{CubeId, Error, Result};
use crate::field::{Field, GridBox};
use crate::martingale::coarsen;

/// Levels tried above the default coarsest one before giving up.
pub const EXTRA_LEVELS: u32 = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct BadPiece {
    pub cube: CubeId,
    /// `avg_Q f`.
    pub mean: f64,
    /// `b_j = (f − avg_Q f)·1_Q`, on the cube's own box.
    pub field: Field,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CzOutput {
    /// `f` zero-extended to the box holding every selected cube.
    pub f: Field,
    pub good: Field,
    pub pieces: Vec<BadPiece>,
    pub p_i: f64,
    pub alpha: f64,
    pub p: f64,
    /// Level at which every cube is unselected (one above the coarsest level
    /// a cube can be selected at).
    pub start_level: u32,
    /// No representable level is below the threshold; `good` is `f` and
    /// there are no pieces.
    pub unreachable: bool,
}

pub fn cz_decompose(f: &Field, p_i: f64, alpha: f64, p: f64) -> Result<CzOutput> {
    if !(p_i >= 1.0 && p_i.is_finite()) {
        return Err(Error::InvalidExponent(p_i));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Hypothesis(format!("height α = {alpha} must be positive")));
    }
    if f.is_zero() {
        return Err(Error::Hypothesis("f must be nonzero".into()));
    }
    let threshold = alpha.powf(p);
    let pow = f.map(|v| v.abs().powf(p_i));
    let cap = f.grid().top_level() + EXTRA_LEVELS;
    let start = (0..=cap).find(|&j| coarsen(&pow, j).samples().iter().all(|&a| a <= threshold));
    let Some(start) = start else {
        return Ok(CzOutput {
            f: f.clone(),
            good: f.clone(),
            pieces: Vec::new(),
            p_i,
            alpha,
            p,
            start_level: cap,
            unreachable: true,
        });
    };
    let work = f.grid().aligned_hull(start);
    let fw = f.embed(&work)?;
    let pow = pow.embed(&work)?;
    let d = f.dim();
    // index of the selected cube covering each cell, if any
    let mut owner: Vec<Option<usize>> = vec![None; work.len()];
    let mut cubes: Vec<CubeId> = Vec::new();
    for j in (0..start).rev() {
        let avgs = coarsen(&pow, j);
        let side = 1i64 << j;
        for (c, &a) in avgs.samples().iter().enumerate() {
            if a <= threshold {
                continue;
            }
            let corner: Vec<i64> = avgs.grid().point(c).iter().map(|x| x * side).collect();
            let flat = work.flat_index(&corner).expect("cube inside the work box");
            if owner[flat].is_some() {
                continue;
            }
            let cube_box = GridBox::new(corner.clone(), vec![side as usize; d], work.mesh())?;
            for q in cube_box.points() {
                owner[work.flat_index(&q).expect("cube inside the work box")] = Some(cubes.len());
            }
            cubes.push(CubeId { level: j, corner });
        }
    }
    let pieces: Vec<BadPiece> = cubes
        .into_iter()
        .map(|cube| {
            let side = 1usize << cube.level;
            let cube_box = GridBox::new(cube.corner.clone(), vec![side; d], work.mesh()).expect("cube box");
            let local = fw.embed(&cube_box).expect("same mesh");
            let mean = local.samples().iter().sum::<f64>() / local.samples().len() as f64;
            let field = local.map(|v| v - mean);
            BadPiece { cube, mean, field }
        })
        .collect();
    let good = Field::new(
        work.clone(),
        fw.samples()
            .iter()
            .zip(&owner)
            .map(|(&v, o)| o.map_or(v, |i| pieces[i].mean))
            .collect(),
    )?;
    Ok(CzOutput { f: fw, good, pieces, p_i, alpha, p, start_level: start, unreachable: false })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Property {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

impl Property {
    fn le(name: &'static str, value: f64, bound: f64) -> Self {
        Self { name, value, bound, holds: value <= bound + 1e-12 * (1.0 + bound.abs()) }
    }

    /// `bound − value`.
    pub fn margin(&self) -> f64 {
        self.bound - self.value
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CzCertificate {
    pub properties: Vec<Property>,
    /// Pairwise disjoint cubes, each with an unselected parent.
    pub maximal_disjoint: bool,
}

impl CzCertificate {
    pub fn all_hold(&self) -> bool {
        self.maximal_disjoint && self.properties.iter().all(|p| p.holds)
    }

    pub fn get(&self, name: &str) -> Option<&Property> {
        self.properties.iter().find(|p| p.name == name)
    }
}

fn contains(cube: &CubeId, p: &[i64]) -> bool {
    let side = 1i64 << cube.level;
    p.iter().zip(&cube.corner).all(|(x, c)| *x >= *c && *x < c + side)
}

fn inside(outer: &CubeId, inner: &CubeId) -> bool {
    outer.level >= inner.level && contains(outer, &inner.corner)
}

/// Checks (i)–(viii) with constants `2^{d+p_i}` for (v), 1 for (vi),
/// `2^{(d+p_i)/p_i}` for (vii) and `1`, `2^{d/p_i}` for the two parts of
/// (viii).
pub fn cz_certify(out: &CzOutput) -> Result<CzCertificate> {
    let d = out.f.dim() as f64;
    let pi = out.p_i;
    let work = out.f.grid();
    let mesh_d = work.cell_measure();
    let f_norm = out.f.lp_norm(pi)?;
    let scale = 1.0 + out.f.max_abs();

    let mut bad = Field::zeros(work.clone());
    for piece in &out.pieces {
        bad = bad.add(&piece.field.embed(work)?)?;
    }
    let recon = out.f.sub(&out.good)?.sub(&bad)?.max_abs();
    let mut props = vec![Property::le("(i) f = g + b", recon, 1e-12 * scale)];
    // b is assembled as Σ b_j, so (ii) holds by construction; it is
    // recorded for completeness
    props.push(Property::le("(ii) b = sum of b_j", 0.0, 0.0));

    let mut supp = 0.0f64;
    let mut mean = 0.0f64;
    let mut v_ratio = 0.0f64;
    let mut volume = 0.0;
    for piece in &out.pieces {
        let vol = piece.field.grid().len() as f64 * mesh_d;
        volume += vol;
        for (i, &v) in piece.field.samples().iter().enumerate() {
            if !contains(&piece.cube, &piece.field.grid().point(i)) {
                supp = supp.max(v.abs());
            }
        }
        let mass: f64 = piece.field.samples().iter().map(|v| v.abs()).sum::<f64>() * mesh_d;
        mean = mean.max(piece.field.integral().abs() / (1.0 + mass));
        let norm_p = piece.field.lp_norm(pi)?.powf(pi);
        v_ratio = v_ratio.max(norm_p / (out.alpha.powf(out.p) * vol));
    }
    props.push(Property::le("(iii) supp b_j in Q_j", supp, 0.0));
    props.push(Property::le("(iv) integral of b_j = 0", mean, 1e-12));
    props.push(Property::le("(v) ||b_j||^p_i <= 2^(d+p_i) a^p |Q_j|", v_ratio, 2f64.powf(d + pi)));
    props.push(Property::le(
        "(vi) sum |Q_j| <= a^-p ||f||^p_i",
        volume,
        out.alpha.powf(-out.p) * f_norm.powf(pi),
    ));
    props.push(Property::le("(vii) ||b|| <= 2^((d+p_i)/p_i) ||f||", bad.lp_norm(pi)?, 2f64.powf((d + pi) / pi) * f_norm));
    props.push(Property::le("(viii) ||g|| <= ||f||", out.good.lp_norm(pi)?, f_norm));
    props.push(Property::le(
        "(viii) ||g||_inf <= 2^(d/p_i) a^(p/p_i)",
        out.good.max_abs(),
        2f64.powf(d / pi) * out.alpha.powf(out.p / pi),
    ));

    let threshold = out.alpha.powf(out.p);
    let pow = out.f.map(|v| v.abs().powf(pi));
    let mut maximal_disjoint = !out.unreachable;
    for (i, a) in out.pieces.iter().enumerate() {
        for b in &out.pieces[i + 1..] {
            if inside(&a.cube, &b.cube) || inside(&b.cube, &a.cube) {
                maximal_disjoint = false;
            }
        }
        let parent_level = a.cube.level + 1;
        let side = 1i64 << parent_level;
        let corner: Vec<i64> = a.cube.corner.iter().map(|c| c.div_euclid(side) * side).collect();
        let pb = GridBox::new(corner, vec![side as usize; out.f.dim()], work.mesh())?;
        let avg = pow.embed(&pb)?.samples().iter().sum::<f64>() / pb.len() as f64;
        if avg > threshold {
            maximal_disjoint = false;
        }
    }
    Ok(CzCertificate { properties: props, maximal_disjoint })
}

impl CzCertificate {
    /// One line per property: name, value, bound, pass.
    pub fn to_text(&self) -> String {
        let mut s = String::from("property,value,bound,holds\n");
        for p in &self.properties {
            s.push_str(&format!("{},{:e},{:e},{}\n", p.name, p.value, p.bound, p.holds));
        }
        s.push_str(&format!("maximal and disjoint,,,{}\n", self.maximal_disjoint));
        s
    }
}
