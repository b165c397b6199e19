//! Empirical operator norms of `(f1, f2) ↦ V_q(A_t(f1, f2) : t)` on `[0, 1]`.
//!
//! Each trial draws two continuum functions, samples them at every grid size
//! and measures `‖V_q‖ / (‖f1‖_{p1} ‖f2‖_{p2})` in the strong, weak or dyadic
//! BMO norm. Scales run from `h/2` to `T = 2`, four per octave plus dyadic
//! anchors, and `V_q` is evaluated on `[−T, 1 + T]`, outside of which every
//! average vanishes.

use bilinear_variation::average::avg_fields;
use bilinear_variation::random::trial_rng;
use bilinear_variation::variation::vq_exact;
use bilinear_variation::{ConvexBody, Field, GridBox, Mode, TimeGrid};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Target};
use crate::continuum::Continuum;

pub const T_MAX: f64 = 2.0;
pub const PER_OCTAVE: usize = 4;
pub const GRID_SIZES: [usize; 3] = [64, 128, 256];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub p1: f64,
    pub p2: f64,
    pub p: f64,
    pub q: f64,
    pub target: Target,
}

impl SweepSpec {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self { p1: cfg.p1, p2: cfg.p2, p: cfg.p, q: cfg.q, target: cfg.target }
    }

    /// Key of this sweep in the ceilings file.
    pub fn key(&self) -> String {
        match self.target {
            Target::Strong => format!("sweep_strong_{}_{}", self.p1, self.p2),
            Target::Weak => format!("sweep_weak_{}_{}", self.p1, self.p2),
            Target::Bmo => "sweep_bmo".into(),
        }
    }
}

/// `V_q` of the averaging sweep at every cell of the window.
pub fn variation_field(body: &ConvexBody, f1: &Field, f2: &Field, q: f64) -> bilinear_variation::Result<Field> {
    let n = f1.grid().len() as i64;
    let h = f1.grid().mesh();
    let times = TimeGrid::geometric(h / 2.0, T_MAX, PER_OCTAVE)?;
    let reach = (T_MAX / h).ceil() as i64;
    let out = GridBox::line(-reach, (n + 2 * reach) as usize, h)?;
    let avgs = avg_fields(body, f1, f2, Mode::Continuum, &times, &out)?;
    let mut seq = vec![0.0; avgs.len()];
    let vals = (0..out.len())
        .map(|i| {
            for (s, a) in seq.iter_mut().zip(&avgs) {
                *s = a.samples()[i];
            }
            vq_exact(&seq, q).map(|o| o.value)
        })
        .collect::<bilinear_variation::Result<Vec<f64>>>()?;
    Field::new(out, vals)
}

pub fn ratio(body: &ConvexBody, f1: &Field, f2: &Field, spec: &SweepSpec) -> bilinear_variation::Result<f64> {
    let v = variation_field(body, f1, f2, spec.q)?;
    let num = match spec.target {
        Target::Strong => v.lp_norm(spec.p)?,
        Target::Weak => v.weak_lp_quasinorm(spec.p)?,
        Target::Bmo => v.bmo_dyadic_norm(),
    };
    let den = f1.lp_norm(spec.p1)? * f2.lp_norm(spec.p2)?;
    Ok(if num == 0.0 { 0.0 } else { num / den })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub families: (String, String),
    /// One ratio per grid size.
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub key: String,
    pub spec: SweepSpec,
    pub grids: Vec<usize>,
    pub rows: Vec<TrialRow>,
    pub max_per_grid: Vec<f64>,
    pub mean_per_grid: Vec<f64>,
    /// `max/min − 1` over the per-grid maxima.
    pub spread: f64,
}

impl RatioReport {
    pub fn max(&self) -> f64 {
        self.max_per_grid.iter().copied().fold(0.0, f64::max)
    }
}

pub fn run_norm_sweep(
    body: &ConvexBody,
    spec: &SweepSpec,
    grids: &[usize],
    seed: u64,
    trials: u64,
) -> bilinear_variation::Result<RatioReport> {
    let rows = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let c1 = Continuum::random(&mut rng);
            let c2 = Continuum::random(&mut rng);
            let ratios = grids
                .iter()
                .map(|&n| ratio(body, &c1.sample(n), &c2.sample(n), spec))
                .collect::<bilinear_variation::Result<Vec<f64>>>()?;
            Ok(TrialRow { trial, families: (c1.family().into(), c2.family().into()), ratios })
        })
        .collect::<bilinear_variation::Result<Vec<TrialRow>>>()?;
    let max_per_grid: Vec<f64> =
        (0..grids.len()).map(|g| rows.iter().map(|r| r.ratios[g]).fold(0.0, f64::max)).collect();
    let mean_per_grid: Vec<f64> =
        (0..grids.len()).map(|g| rows.iter().map(|r| r.ratios[g]).sum::<f64>() / rows.len() as f64).collect();
    let hi = max_per_grid.iter().copied().fold(0.0, f64::max);
    let lo = max_per_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if lo > 0.0 { hi / lo - 1.0 } else { f64::INFINITY };
    Ok(RatioReport {
        key: spec.key(),
        spec: *spec,
        grids: grids.to_vec(),
        rows,
        max_per_grid,
        mean_per_grid,
        spread,
    })
}

/// The four sweeps of the norm-stability check: two strong-type points, the
/// weak-type endpoint and the BMO endpoint, all at `q = 3`.
pub fn standard_specs() -> [SweepSpec; 4] {
    let q = 3.0;
    [
        SweepSpec { p1: 2.0, p2: 2.0, p: 1.0, q, target: Target::Strong },
        SweepSpec { p1: 4.0, p2: 4.0, p: 2.0, q, target: Target::Strong },
        SweepSpec { p1: 1.0, p2: 2.0, p: 2.0 / 3.0, q, target: Target::Weak },
        SweepSpec { p1: f64::INFINITY, p2: f64::INFINITY, p: f64::INFINITY, q, target: Target::Bmo },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_second_slot_reduces_to_the_linear_case() {
        let body = ConvexBody::ball(1, 1.0).unwrap();
        let f1 = Continuum::Indicators(vec![(0.2, 0.45)]).sample(32);
        // a constant wide enough to cover every x + y₂ that occurs
        let wide = GridBox::line(-200, 432, 1.0 / 32.0).unwrap();
        let c = Field::constant(wide.clone(), -2.5);
        let one = Field::constant(wide, 1.0);
        let a = variation_field(&body, &f1, &c, 3.0).unwrap();
        let b = variation_field(&body, &f1, &one, 3.0).unwrap();
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert!((x - 2.5 * y).abs() <= 1e-12 * (1.0 + y));
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let body = ConvexBody::ball(1, 1.0).unwrap();
        let spec = standard_specs()[0];
        let a = run_norm_sweep(&body, &spec, &[16, 32], 5, 3).unwrap();
        let b = run_norm_sweep(&body, &spec, &[16, 32], 5, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.rows.iter().all(|r| r.ratios.iter().all(|v| v.is_finite() && *v >= 0.0)));
    }
}
