//! Bilinear averages along the rotation flow `T^x ω = ω + β⊙x mod 1` on the
//! torus `𝕋^d`.

use crate::average::avg_fn;
use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::time::TimeGrid;
use crate::variation::vq_exact;

/// `ω + β⊙x` reduced to `[0, 1)^d`.
pub fn flow(beta: &[f64], omega: &[f64], x: &[f64]) -> Vec<f64> {
    omega.iter().zip(beta).zip(x).map(|((w, b), x)| (w + b * x).rem_euclid(1.0)).collect()
}

fn check(beta: &[f64], omega: &[f64], body: &ConvexBody, mesh: f64) -> Result<()> {
    let d = body.d();
    if beta.len() != d || omega.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: beta.len().max(omega.len()) });
    }
    let n = (1.0 / mesh).round();
    if !(mesh > 0.0) || (n * mesh - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidBox(format!("quadrature mesh {mesh} must divide 1")));
    }
    Ok(())
}

/// `(1/|G_t|) ∫_{G_t} f1(T^{y₁} ω) f2(T^{y₂} ω) dy`, by the self-normalized
/// node rule with mesh `mesh`.
pub fn ergodic_bilinear_avg(
    beta: &[f64],
    f1: impl Fn(&[f64]) -> f64,
    f2: impl Fn(&[f64]) -> f64,
    body: &ConvexBody,
    t: f64,
    omega: &[f64],
    mesh: f64,
) -> Result<f64> {
    check(beta, omega, body, mesh)?;
    let origin = vec![0.0; body.d()];
    avg_fn(
        body,
        t,
        mesh,
        |y| f1(&flow(beta, omega, y)),
        |y| f2(&flow(beta, omega, y)),
        &origin,
    )
}

/// `V_q` over the scales of `grid` of the averages at `ω`.
#[allow(clippy::too_many_arguments)]
pub fn ergodic_variation(
    beta: &[f64],
    f1: impl Fn(&[f64]) -> f64,
    f2: impl Fn(&[f64]) -> f64,
    body: &ConvexBody,
    grid: &TimeGrid,
    omega: &[f64],
    mesh: f64,
    q: f64,
) -> Result<f64> {
    let seq: Vec<f64> = grid
        .times()
        .iter()
        .map(|&t| ergodic_bilinear_avg(beta, &f1, &f2, body, t, omega, mesh))
        .collect::<Result<_>>()?;
    Ok(vq_exact(&seq, q)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn constants_and_identity_flow() {
        let body = ConvexBody::ball(1, 1.0).unwrap();
        let c = ergodic_bilinear_avg(&[0.3], |_| 2.0, |_| -1.5, &body, 2.0, &[0.1], 1.0 / 16.0).unwrap();
        assert!((c + 3.0).abs() < 1e-14);
        let f = |w: &[f64]| (TAU * w[0]).sin() + 0.3;
        let g = |w: &[f64]| (TAU * w[0]).cos();
        let v = ergodic_bilinear_avg(&[0.0], f, g, &body, 2.0, &[0.37], 1.0 / 16.0).unwrap();
        assert!((v - f(&[0.37]) * g(&[0.37])).abs() < 1e-12);
        assert!(ergodic_bilinear_avg(&[0.3], f, g, &body, 2.0, &[0.0], 0.3).is_err());
    }

    #[test]
    fn mean_zero_averages_decay() {
        let body = ConvexBody::ball(1, 1.0).unwrap();
        let beta = [2f64.sqrt()];
        let f = |w: &[f64]| (TAU * w[0]).sin();
        let g = |w: &[f64]| (TAU * w[0]).cos();
        let vals: Vec<f64> = [4.0, 8.0, 16.0]
            .iter()
            .map(|&t| {
                // sup over a few starting points
                (0..8)
                    .map(|k| ergodic_bilinear_avg(&beta, f, g, &body, t, &[k as f64 / 8.0], 1.0 / 16.0).unwrap().abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        assert!(vals[0] > vals[1] && vals[1] > vals[2], "{vals:?}");
        let flow_pt = flow(&[0.5, 0.25], &[0.75, 0.5], &[1.0, -4.0]);
        assert_eq!(flow_pt, vec![0.25, 0.5]);
    }
}
