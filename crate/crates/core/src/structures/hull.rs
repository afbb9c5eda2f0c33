//! Distance between convex hulls of two finite point sets.
//!
//! The hull distance is `min ||w||` over `w` in the difference polytope
//! `conv{a_i - b_j}`. It is minimised with away-step Frank-Wolfe on
//! `f(w) = ||w||^2 / 2`; the linear oracle splits as `argmin_i <w, a_i>` and
//! `argmax_j <w, b_j>`, so the `|A| * |B|` vertices are never materialised.
//! For the Frank-Wolfe vertex `s`, every `v` in the polytope satisfies
//! `<w, v> >= <w, s>`, so `<w, s> / ||w||` is a certified lower bound.

use serde::{Deserialize, Serialize};

const RELATIVE_TOLERANCE: f64 = 1e-7;
const ZERO_TOLERANCE: f64 = 1e-12;
const MAX_ITERATIONS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullDistance {
    /// Achieved distance (an upper bound), reported as `0.0` once below `1e-12`.
    pub distance: f64,
    /// Certified lower bound, never negative.
    pub lower_bound: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimum distance between `conv(a)` and `conv(b)`.
///
/// # Panics
/// If either set is empty or the points disagree on dimension.
pub fn hull_distance(a: &[&[f64]], b: &[&[f64]]) -> f64 {
    hull_distance_bounds(a, b).distance
}

/// As [`hull_distance`], also returning the certified lower bound.
pub fn hull_distance_bounds(a: &[&[f64]], b: &[&[f64]]) -> HullDistance {
    assert!(!a.is_empty() && !b.is_empty(), "hull distance needs non-empty sets");
    let dim = a[0].len();
    assert!(
        a.iter().chain(b).all(|p| p.len() == dim),
        "hull distance needs points of one dimension"
    );
    let vertex = |(i, j): (usize, usize)| -> Vec<f64> {
        a[i].iter().zip(b[j]).map(|(x, y)| x - y).collect()
    };

    // Active set: (vertex, weight), weights positive and summing to one.
    let mut active: Vec<((usize, usize), f64)> = vec![((0, 0), 1.0)];
    let mut w = vertex((0, 0));
    let mut lower = 0.0f64;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let norm_sq = dot(&w, &w);
        if norm_sq.sqrt() <= ZERO_TOLERANCE {
            return HullDistance {
                distance: 0.0,
                lower_bound: 0.0,
                iterations,
            };
        }
        let fi = (0..a.len())
            .min_by(|&x, &y| dot(&w, a[x]).total_cmp(&dot(&w, a[y])))
            .unwrap();
        let fj = (0..b.len())
            .max_by(|&x, &y| dot(&w, b[x]).total_cmp(&dot(&w, b[y])))
            .unwrap();
        let s = vertex((fi, fj));
        let ws = dot(&w, &s);
        lower = lower.max(ws / norm_sq.sqrt());
        let fw_gap = norm_sq - ws;
        if fw_gap <= RELATIVE_TOLERANCE * norm_sq {
            break;
        }

        let (away_pos, away_value) = active
            .iter()
            .enumerate()
            .map(|(p, &(v, _))| (p, dot(&w, &vertex(v))))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        let away_gap = away_value - norm_sq;

        let (direction, max_step, fw_step) = if fw_gap >= away_gap {
            let d: Vec<f64> = s.iter().zip(&w).map(|(x, y)| x - y).collect();
            (d, 1.0, true)
        } else {
            let v = vertex(active[away_pos].0);
            let alpha = active[away_pos].1;
            let d: Vec<f64> = w.iter().zip(&v).map(|(x, y)| x - y).collect();
            (d, alpha / (1.0 - alpha), false)
        };
        let dd = dot(&direction, &direction);
        if dd == 0.0 {
            break;
        }
        let step = (-dot(&w, &direction) / dd).clamp(0.0, max_step);
        if step == 0.0 {
            break;
        }

        if fw_step {
            for entry in active.iter_mut() {
                entry.1 *= 1.0 - step;
            }
            match active.iter_mut().find(|e| e.0 == (fi, fj)) {
                Some(e) => e.1 += step,
                None => active.push(((fi, fj), step)),
            }
            if step >= 1.0 {
                active.retain(|e| e.0 == (fi, fj));
                active[0].1 = 1.0;
            }
        } else {
            for entry in active.iter_mut() {
                entry.1 *= 1.0 + step;
            }
            active[away_pos].1 -= step;
            if step >= max_step {
                active.remove(away_pos);
            }
        }
        active.retain(|e| e.1 > 0.0);

        // Rebuild from the weights periodically to shed drift.
        if iterations % 64 == 0 {
            let total: f64 = active.iter().map(|e| e.1).sum();
            w = vec![0.0; dim];
            for &(v, alpha) in &active {
                for (acc, x) in w.iter_mut().zip(vertex(v)) {
                    *acc += alpha / total * x;
                }
            }
        } else {
            for (acc, d) in w.iter_mut().zip(&direction) {
                *acc += step * d;
            }
        }
    }
    let distance = dot(&w, &w).sqrt();
    HullDistance {
        distance: if distance <= ZERO_TOLERANCE { 0.0 } else { distance },
        lower_bound: lower.max(0.0).min(distance),
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[&[f64]]) -> Vec<Vec<f64>> {
        v.iter().map(|p| p.to_vec()).collect()
    }

    fn refs(v: &[Vec<f64>]) -> Vec<&[f64]> {
        v.iter().map(Vec::as_slice).collect()
    }

    #[test]
    fn intervals_on_the_line() {
        let a = pts(&[&[0.0], &[1.0]]);
        let b = pts(&[&[3.0], &[5.0], &[4.0]]);
        let h = hull_distance_bounds(&refs(&a), &refs(&b));
        assert!((h.distance - 2.0).abs() < 1e-7, "{h:?}");
        assert!(h.lower_bound <= h.distance && h.lower_bound > 2.0 - 1e-6);
    }

    #[test]
    fn overlapping_hulls() {
        let a = pts(&[&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0]]);
        let b = pts(&[&[0.5, 0.5], &[5.0, 5.0]]);
        assert_eq!(hull_distance(&refs(&a), &refs(&b)), 0.0);
        let c = pts(&[&[1.0, -1.0], &[1.0, 3.0]]);
        assert_eq!(hull_distance(&refs(&a), &refs(&c)), 0.0);
    }

    /// Exhaustive grid over both segment parameters.
    fn segment_grid_distance(p0: &[f64], p1: &[f64], q0: &[f64], q1: &[f64], steps: usize) -> f64 {
        let mut best = f64::INFINITY;
        for s in 0..=steps {
            let s = s as f64 / steps as f64;
            let u: Vec<f64> = p0.iter().zip(p1).map(|(a, b)| a + s * (b - a)).collect();
            for t in 0..=steps {
                let t = t as f64 / steps as f64;
                let v: Vec<f64> = q0.iter().zip(q1).map(|(a, b)| a + t * (b - a)).collect();
                best = best.min(crate::metricspace::euclidean(&u, &v));
            }
        }
        best
    }

    #[test]
    fn segments_match_grid_oracle() {
        let cases: [[[f64; 2]; 4]; 3] = [
            [[0.0, 0.0], [1.0, 0.0], [2.0, 1.0], [3.0, 2.5]],
            [[0.0, 0.0], [1.0, 1.0], [0.0, 2.0], [2.0, 1.4]],
            [[-1.0, 0.3], [1.0, -0.2], [0.2, 1.0], [0.1, 3.0]],
        ];
        for [p0, p1, q0, q1] in cases {
            let oracle = segment_grid_distance(&p0, &p1, &q0, &q1, 4000);
            let a = [&p0[..], &p1[..]];
            let b = [&q0[..], &q1[..]];
            let h = hull_distance_bounds(&a, &b);
            assert!((h.distance - oracle).abs() < 1e-5, "{h:?} vs {oracle}");
            assert!(h.lower_bound <= oracle + 1e-9);
        }
    }

    #[test]
    fn clouds_in_three_dimensions() {
        let a = pts(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let b = pts(&[&[2.0, 2.0, 2.0], &[3.0, 2.0, 2.0], &[2.0, 3.0, 4.0]]);
        // Closest pair: face x+y+z=1 of the simplex to vertex (2,2,2).
        let expected = (6.0 - 1.0) / 3f64.sqrt();
        let h = hull_distance_bounds(&refs(&a), &refs(&b));
        assert!((h.distance - expected).abs() < 1e-6 * expected, "{h:?}");
        assert!(h.lower_bound >= expected * (1.0 - 1e-6));
    }
}
