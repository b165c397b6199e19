//! Random inputs for property suites: fields, bodies and sequences.
//!
//! Every trial draws from its own ChaCha stream, selected by the trial index,
//! so results do not depend on the order in which trials run.

use std::f64::consts::TAU;
use std::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::body::ConvexBody;
use crate::field::{Field, GridBox};

/// The generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Unions of a few boxes, value 1.
    Indicators,
    /// A few random Fourier modes on the box.
    Trig,
    /// A handful of isolated cells with random values.
    Spikes,
    /// Constant on aligned blocks of a random dyadic width.
    Steps,
}

impl Family {
    pub const MIXTURE: [Family; 3] = [Family::Indicators, Family::Trig, Family::Spikes];

    pub fn name(self) -> &'static str {
        match self {
            Family::Indicators => "indicators",
            Family::Trig => "trig",
            Family::Spikes => "spikes",
            Family::Steps => "steps",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn random_box_in<R: Rng>(rng: &mut R, grid: &GridBox) -> (Vec<i64>, Vec<i64>) {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for a in 0..grid.dim() {
        let e = grid.extent()[a] as i64;
        let len = rng.random_range(1..=e.max(1).min(1 + e / 2));
        let start = grid.origin()[a] + rng.random_range(0..=(e - len).max(0));
        lo.push(start);
        hi.push(start + len);
    }
    (lo, hi)
}

pub fn random_field<R: Rng>(rng: &mut R, family: Family, grid: &GridBox) -> Field {
    match family {
        Family::Indicators => {
            let boxes: Vec<_> = (0..rng.random_range(1..=4)).map(|_| random_box_in(rng, grid)).collect();
            Field::from_fn(grid.clone(), |p| {
                let hit = boxes.iter().any(|(lo, hi)| p.iter().zip(lo.iter().zip(hi)).all(|(x, (l, h))| x >= l && x < h));
                if hit {
                    1.0
                } else {
                    0.0
                }
            })
        }
        Family::Trig => {
            let modes: Vec<(Vec<f64>, f64, f64)> = (0..rng.random_range(1..=4))
                .map(|_| {
                    let k = (0..grid.dim()).map(|_| rng.random_range(0..=6) as f64).collect();
                    (k, rng.random_range(-1.0..1.0), rng.random_range(0.0..TAU))
                })
                .collect();
            Field::from_fn(grid.clone(), |p| {
                modes
                    .iter()
                    .map(|(k, a, phi)| {
                        let arg: f64 = (0..p.len())
                            .map(|i| k[i] * (p[i] - grid.origin()[i]) as f64 / grid.extent()[i] as f64)
                            .sum();
                        a * (TAU * arg + phi).cos()
                    })
                    .sum()
            })
        }
        Family::Spikes => {
            let mut f = vec![0.0; grid.len()];
            for _ in 0..rng.random_range(1..=5) {
                let i = rng.random_range(0..grid.len());
                let mag = rng.random_range(0.5..3.0);
                f[i] = if rng.random_bool(0.5) { mag } else { -mag };
            }
            Field::new(grid.clone(), f).expect("finite samples")
        }
        Family::Steps => {
            let level = rng.random_range(0..=grid.top_level().saturating_sub(2).min(4));
            random_measurable(rng, grid, level, 0.0)
        }
    }
}

/// A field drawn from a uniformly chosen family of [`Family::MIXTURE`].
pub fn mixture_field<R: Rng>(rng: &mut R, grid: &GridBox) -> (Family, Field) {
    let family = *Family::MIXTURE.choose(rng).expect("nonempty");
    (family, random_field(rng, family, grid))
}

/// Constant on level-`level` cubes of `grid`'s aligned hull, each cube zero
/// with probability `zero_prob` and otherwise uniform in `(−2, 2)`.
pub fn random_measurable<R: Rng>(rng: &mut R, grid: &GridBox, level: u32, zero_prob: f64) -> Field {
    let hull = grid.aligned_hull(level);
    let side = 1i64 << level;
    let coarse = GridBox::new(
        hull.origin().iter().map(|o| o / side).collect(),
        hull.extent().iter().map(|e| e >> level).collect(),
        grid.mesh(),
    )
    .expect("coarse box");
    let vals: Vec<f64> = (0..coarse.len())
        .map(|_| if rng.random_bool(zero_prob) { 0.0 } else { rng.random_range(-2.0..2.0) })
        .collect();
    Field::from_fn(hull, |p| {
        let c: Vec<i64> = p.iter().map(|x| x.div_euclid(side)).collect();
        vals[coarse.flat_index(&c).expect("inside")]
    })
}

/// A normalized ball, cube or `G_Γ` with `Γ` a random perturbation of the
/// identity.
pub fn random_body<R: Rng>(rng: &mut R, d: usize) -> ConvexBody {
    let body = match rng.random_range(0..3) {
        0 => ConvexBody::ball(d, 1.0),
        1 => ConvexBody::cube(d, 1.0),
        _ => {
            let mut g = [[1.0, 0.0], [0.0, 1.0]];
            for row in g.iter_mut() {
                for v in row.iter_mut() {
                    *v += rng.random_range(-0.5..0.5);
                }
            }
            ConvexBody::gamma(d, g)
        }
    };
    body.expect("valid body").normalize()
}

/// Sequences with ties, monotone runs, oscillation and wide dynamic range.
pub fn random_sequence<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    match rng.random_range(0..4) {
        0 => (0..len).map(|_| rng.random_range(-1.0..1.0)).collect(),
        1 => (0..len).map(|_| rng.random_range(-2..=2) as f64).collect(),
        2 => {
            let mut x = 0.0;
            (0..len)
                .map(|_| {
                    x += rng.random_range(-0.2..1.0);
                    x
                })
                .collect()
        }
        _ => (0..len)
            .map(|_| {
                let e = rng.random_range(-6..6);
                rng.random_range(-1.0..1.0) * 10f64.powi(e)
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = trial_rng(7, 3).random();
        let b: u64 = trial_rng(7, 3).random();
        let c: u64 = trial_rng(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn generators_respect_their_contracts() {
        let grid = GridBox::new(vec![-5, 2], vec![12, 9], 0.5).unwrap();
        let mut rng = trial_rng(1, 0);
        for _ in 0..50 {
            let f = random_field(&mut rng, Family::Indicators, &grid);
            assert!(f.samples().iter().all(|&v| v == 0.0 || v == 1.0) && !f.is_zero());
            let s = random_field(&mut rng, Family::Spikes, &grid);
            assert!(s.samples().iter().filter(|v| **v != 0.0).count() <= 5);
            let m = random_measurable(&mut rng, &grid, 2, 0.3);
            assert!(crate::martingale::measurable_values(&m, 2).is_ok());
            let b = random_body(&mut rng, 2);
            assert!(b.is_normalized());
            let seq = random_sequence(&mut rng, 9);
            assert_eq!(seq.len(), 9);
        }
    }
}
