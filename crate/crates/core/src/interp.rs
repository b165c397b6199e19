//! Barycentric weights of `(1/p₁, 1/p₂)` over the five restricted weak-type
//! endpoints `(1,∞,1)`, `(∞,1,1)`, `(1,1,1/2)`, `(∞,s,s)` and `(s,∞,s)`.

use crate::error::{Error, Result};

/// `(1/p₁, 1/p₂)` of each endpoint.
pub fn vertices(s: f64) -> [[f64; 2]; 5] {
    [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.0, 1.0 / s], [1.0 / s, 0.0]]
}

/// `1/q` of each endpoint.
pub fn vertex_targets(s: f64) -> [f64; 5] {
    [1.0, 1.0, 2.0, 1.0 / s, 1.0 / s]
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpPoint {
    pub point: [f64; 2],
    pub weights: [f64; 5],
    /// `Σ η_k / q_k`.
    pub inv_q: f64,
    /// Vertex indices of the triangle that produced the weights.
    pub triangle: [usize; 3],
}

impl InterpPoint {
    /// `|Σ η_k P_k − P|_∞`.
    pub fn residual(&self, s: f64) -> f64 {
        let v = vertices(s);
        let mut r = [0.0; 2];
        for (w, p) in self.weights.iter().zip(&v) {
            r[0] += w * p[0];
            r[1] += w * p[1];
        }
        (r[0] - self.point[0]).abs().max((r[1] - self.point[1]).abs())
    }
}

fn check_hull(u: f64, v: f64, s: f64) -> Result<()> {
    let facets = [
        ("1/p1 <= 1", u <= 1.0),
        ("1/p2 <= 1", v <= 1.0),
        ("1/p1 >= 0", u >= 0.0),
        ("1/p2 >= 0", v >= 0.0),
        ("1/p1 + 1/p2 >= 1/s", u + v >= 1.0 / s),
    ];
    match facets.iter().find(|(_, ok)| !ok) {
        Some((name, _)) => Err(Error::OutsideHull((*name).into())),
        None => Ok(()),
    }
}

/// Weights from the first triangle of vertices, in lexicographic order of
/// index triples, whose closure contains the point.
pub fn interp_weights_reciprocal(u: f64, v: f64, s: f64) -> Result<InterpPoint> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::InvalidExponent(s));
    }
    if !(u.is_finite() && v.is_finite()) {
        return Err(Error::Hypothesis("reciprocal exponents must be finite".into()));
    }
    check_hull(u, v, s)?;
    let pts = vertices(s);
    let targets = vertex_targets(s);
    for a in 0..5 {
        for b in a + 1..5 {
            for c in b + 1..5 {
                let (pa, pb, pc) = (pts[a], pts[b], pts[c]);
                let det = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]);
                if det.abs() < 1e-14 {
                    continue;
                }
                let lb = ((u - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (v - pa[1])) / det;
                let lc = ((pb[0] - pa[0]) * (v - pa[1]) - (u - pa[0]) * (pb[1] - pa[1])) / det;
                let la = 1.0 - lb - lc;
                let tol = -1e-14;
                if la < tol || lb < tol || lc < tol {
                    continue;
                }
                let mut weights = [0.0; 5];
                weights[a] = la.clamp(0.0, 1.0);
                weights[b] = lb.clamp(0.0, 1.0);
                weights[c] = lc.clamp(0.0, 1.0);
                let inv_q = (0..5).map(|k| weights[k] * targets[k]).sum();
                return Ok(InterpPoint { point: [u, v], weights, inv_q, triangle: [a, b, c] });
            }
        }
    }
    Err(Error::SearchFailed(format!("no triangle contains ({u}, {v})")))
}

/// [`interp_weights_reciprocal`] at `(1/p₁, 1/p₂)`.
pub fn interp_weights(p1: f64, p2: f64, s: f64) -> Result<InterpPoint> {
    if !(p1 >= 1.0) || !(p2 >= 1.0) {
        return Err(Error::InvalidExponent(if p1 >= 1.0 { p2 } else { p1 }));
    }
    interp_weights_reciprocal(1.0 / p1, 1.0 / p2, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn midpoint_of_the_first_two_vertices() {
        let r = interp_weights(2.0, 2.0, 10.0).unwrap();
        assert_eq!(r.weights, [0.5, 0.5, 0.0, 0.0, 0.0]);
        assert_eq!(r.inv_q, 1.0);
    }

    #[test]
    fn vertex_and_outside_points() {
        let r = interp_weights_reciprocal(1.0, 1.0, 10.0).unwrap();
        assert_eq!(r.weights[2], 1.0);
        assert_eq!(r.inv_q, 2.0);
        match interp_weights_reciprocal(1.2, 0.5, 10.0) {
            Err(Error::OutsideHull(f)) => assert_eq!(f, "1/p1 <= 1"),
            other => panic!("{other:?}"),
        }
        match interp_weights_reciprocal(0.01, 0.01, 10.0) {
            Err(Error::OutsideHull(f)) => assert_eq!(f, "1/p1 + 1/p2 >= 1/s"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scaling_line_is_reproduced() {
        // on the edge between (1,0) and (0,1) every point has 1/q = 1
        for k in 1..10 {
            let u = k as f64 / 10.0;
            let r = interp_weights_reciprocal(u, 1.0 - u, 10.0).unwrap();
            assert!((r.inv_q - 1.0).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn interior_points(u in 0.0f64..1.0, v in 0.0f64..1.0) {
            prop_assume!(u + v > 0.1 + 1e-9);
            let r = interp_weights_reciprocal(u, v, 10.0).unwrap();
            prop_assert!(r.residual(10.0) < 1e-12);
            prop_assert!(r.weights.iter().all(|w| (0.0..=1.0).contains(w)));
            prop_assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
