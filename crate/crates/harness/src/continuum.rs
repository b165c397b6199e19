//! Random functions on `[0, 1]`, defined independently of any grid so the
//! same draw can be sampled at several resolutions.

use std::f64::consts::TAU;

use bilinear_variation::{Field, GridBox};
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub enum Continuum {
    /// Union of intervals `[a, b)`, value 1.
    Indicators(Vec<(f64, f64)>),
    /// `Σ a_k cos(2πkx + φ_k)` on `[0, 1)`, zero elsewhere.
    Trig(Vec<(f64, f64, f64)>),
    /// Raised-cosine bumps of width 1/32: `(centre, height)`.
    Bumps(Vec<(f64, f64)>),
}

const BUMP_HALF_WIDTH: f64 = 1.0 / 64.0;

impl Continuum {
    pub fn family(&self) -> &'static str {
        match self {
            Continuum::Indicators(_) => "indicators",
            Continuum::Trig(_) => "trig",
            Continuum::Bumps(_) => "bumps",
        }
    }

    pub fn random<R: Rng>(rng: &mut R) -> Self {
        match rng.random_range(0..3) {
            0 => Continuum::Indicators(
                (0..rng.random_range(1..=3))
                    .map(|_| {
                        let a = rng.random_range(0.0..15.0 / 16.0);
                        let b = rng.random_range(a + 1.0 / 16.0..=1.0);
                        (a, b)
                    })
                    .collect(),
            ),
            1 => Continuum::Trig(
                (1..=rng.random_range(1..=4))
                    .map(|k| (k as f64, rng.random_range(-1.0..1.0), rng.random_range(0.0..TAU)))
                    .collect(),
            ),
            _ => Continuum::Bumps(
                (0..rng.random_range(1..=4))
                    .map(|_| (rng.random_range(BUMP_HALF_WIDTH..1.0 - BUMP_HALF_WIDTH), rng.random_range(-3.0..3.0)))
                    .collect(),
            ),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Continuum::Indicators(iv) => {
                if iv.iter().any(|&(a, b)| x >= a && x < b) {
                    1.0
                } else {
                    0.0
                }
            }
            Continuum::Trig(modes) => {
                if !(0.0..1.0).contains(&x) {
                    return 0.0;
                }
                modes.iter().map(|&(k, a, phi)| a * (TAU * k * x + phi).cos()).sum()
            }
            Continuum::Bumps(bumps) => bumps
                .iter()
                .map(|&(c, h)| {
                    let r = (x - c).abs() / BUMP_HALF_WIDTH;
                    if r < 1.0 {
                        h * 0.5 * (1.0 + (std::f64::consts::PI * r).cos())
                    } else {
                        0.0
                    }
                })
                .sum(),
        }
    }

    /// Samples `f(p/N)` on the cells `0..N` with mesh `1/N`.
    pub fn sample(&self, n: usize) -> Field {
        let grid = GridBox::line(0, n, 1.0 / n as f64).expect("nonempty grid");
        Field::from_fn(grid, |p| self.eval(p[0] as f64 / n as f64))
    }
}
