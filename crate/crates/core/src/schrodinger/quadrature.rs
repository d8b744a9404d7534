//! Tensor trapezoid rules on growing boxes.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub half_width: f64,
    pub points: usize,
    pub rel_tol: f64,
    /// Largest admissible ratio of the boundary maximum to the peak.
    pub tail_tol: f64,
    pub max_levels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            half_width: 3.0,
            points: 13,
            rel_tol: 1e-9,
            tail_tol: 1e-12,
            max_levels: 12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    /// Largest integrand value on the outer faces of the final box.
    pub tail_bound: f64,
    pub half_width: f64,
    pub points: usize,
    pub levels: usize,
}

/// Trapezoid sum over `[-L, L]^dim` with `points` nodes per axis; returns the
/// sum, the boundary maximum and the interior peak.
pub fn trapezoid(f: &dyn Fn(&[f64]) -> f64, dim: usize, half_width: f64, points: usize) -> (f64, f64, f64) {
    let (sum, faces, peak) = trapezoid_box(f, &vec![half_width; dim], &vec![points; dim]);
    (sum, faces.into_iter().fold(0.0, f64::max), peak)
}

/// Trapezoid sum over the box `Π [-L_d, L_d]` with `points[d]` nodes on axis
/// `d`; returns the sum, the maximum over each pair of opposite faces and the
/// peak.
pub fn trapezoid_box(f: &dyn Fn(&[f64]) -> f64, half_widths: &[f64], points: &[usize]) -> (f64, Vec<f64>, f64) {
    let dim = half_widths.len();
    let h: Vec<f64> = (0..dim)
        .map(|d| 2.0 * half_widths[d] / (points[d] - 1) as f64)
        .collect();
    let total: usize = points.iter().product();
    let mut x = vec![0.0; dim];
    let mut sum = 0.0;
    let mut faces = vec![0.0f64; dim];
    let mut peak: f64 = 0.0;
    for flat in 0..total {
        let mut k = flat;
        let mut w = 1.0;
        let mut edge_mask = 0u64;
        for d in (0..dim).rev() {
            let i = k % points[d];
            k /= points[d];
            x[d] = -half_widths[d] + i as f64 * h[d];
            if i == 0 || i == points[d] - 1 {
                w *= 0.5;
                edge_mask |= 1 << d;
            }
        }
        let v = f(&x);
        sum += w * v;
        peak = peak.max(v.abs());
        if edge_mask != 0 {
            for (d, face) in faces.iter_mut().enumerate() {
                if edge_mask & (1 << d) != 0 {
                    *face = face.max(v.abs());
                }
            }
        }
    }
    (sum * h.iter().product::<f64>(), faces, peak)
}

/// Cap on integrand evaluations for a single trapezoid pass.
const MAX_NODES: usize = 60_000_000;

/// Enlarges the box at fixed spacing along every axis whose faces still see
/// the integrand, then halves the spacing until successive sums agree.
pub fn integrate(f: &dyn Fn(&[f64]) -> f64, dim: usize, opts: QuadOptions) -> Result<QuadResult> {
    let mut l = vec![opts.half_width; dim];
    let mut n = vec![opts.points.max(3) | 1; dim];
    let mut prev: Option<f64> = None;
    let mut last = (f64::NAN, f64::NAN);
    for level in 0..=opts.max_levels {
        if n.iter()
            .try_fold(1usize, |a, &b| a.checked_mul(b))
            .is_none_or(|t| t > MAX_NODES)
        {
            break;
        }
        let (val, faces, peak) = trapezoid_box(f, &l, &n);
        if !val.is_finite() {
            return Err(Error::NonConvergent(format!("integrand not finite on box {l:?}")));
        }
        let edge = faces.iter().copied().fold(0.0, f64::max);
        last = (val, edge);
        let cut = opts.tail_tol * peak.max(f64::MIN_POSITIVE);
        if edge > cut {
            // Same spacing on a box enlarged along the visible axes.
            for d in 0..dim {
                if faces[d] > cut {
                    let h = 2.0 * l[d] / (n[d] - 1) as f64;
                    l[d] *= 1.5;
                    n[d] = ((2.0 * l[d] / h).round() as usize + 1) | 1;
                }
            }
            prev = None;
            continue;
        }
        if let Some(p) = prev {
            let err = (val - p).abs();
            if err <= opts.rel_tol * val.abs() {
                return Ok(QuadResult {
                    value: val,
                    error_estimate: err,
                    tail_bound: edge,
                    half_width: l.iter().copied().fold(0.0, f64::max),
                    points: n.iter().copied().max().unwrap_or(0),
                    levels: level,
                });
            }
        }
        prev = Some(val);
        for k in n.iter_mut() {
            *k = 2 * *k - 1;
        }
    }
    Err(Error::NonConvergent(format!(
        "no agreement within {} levels: last value {:.6e}, boundary maximum {:.3e} on box {:?}",
        opts.max_levels, last.0, last.1, l
    )))
}

/// Per-axis length scales `1/sqrt(-∂²g)` of a log-integrand at `center`,
/// from central second differences.
pub fn axis_scales(log_f: &dyn Fn(&[f64]) -> f64, center: &[f64]) -> Vec<f64> {
    const STEP: f64 = 1e-2;
    let g0 = log_f(center);
    (0..center.len())
        .map(|d| {
            let mut x = center.to_vec();
            x[d] = center[d] + STEP;
            let gp = log_f(&x);
            x[d] = center[d] - STEP;
            let gm = log_f(&x);
            let curv = -(gp - 2.0 * g0 + gm) / (STEP * STEP);
            if curv.is_finite() && curv > 0.0 {
                (1.0 / curv.sqrt()).clamp(1e-3, 1e3)
            } else {
                1.0
            }
        })
        .collect()
}

/// [`integrate`] after the substitution `x_d = scales[d] s_d`.
pub fn integrate_scaled(f: &dyn Fn(&[f64]) -> f64, scales: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    let jac: f64 = scales.iter().product();
    let g = |s: &[f64]| {
        let x: Vec<f64> = s.iter().zip(scales).map(|(a, b)| a * b).collect();
        f(&x) * jac
    };
    integrate(&g, scales.len(), opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_volume() {
        let f = |x: &[f64]| (-std::f64::consts::PI * x.iter().map(|v| v * v).sum::<f64>()).exp();
        for d in 1..=3 {
            let r = integrate(&f, d, QuadOptions::default()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-10, "{d}: {}", r.value);
        }
    }

    #[test]
    fn slow_tail_is_reported() {
        let f = |x: &[f64]| 1.0 / (1.0 + x[0] * x[0]);
        let opts = QuadOptions {
            max_levels: 3,
            ..QuadOptions::default()
        };
        assert!(matches!(integrate(&f, 1, opts), Err(Error::NonConvergent(_))));
    }

    #[test]
    fn elongated_gaussian_grows_one_axis() {
        let f = |x: &[f64]| (-std::f64::consts::PI * (x[0] * x[0] / 400.0 + x[1] * x[1])).exp();
        let r = integrate(&f, 2, QuadOptions::default()).unwrap();
        assert!((r.value - 20.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn scaled_rule_handles_mixed_widths() {
        let log_f = |x: &[f64]| -std::f64::consts::PI * (x[0] * x[0] * 400.0 + x[1] * x[1] / 25.0);
        let sc = axis_scales(&log_f, &[0.0, 0.0]);
        let want = (1.0 / (2.0 * std::f64::consts::PI)).sqrt();
        assert!((sc[0] * 20.0 / want - 1.0).abs() < 1e-6);
        let r = integrate_scaled(&|x: &[f64]| log_f(x).exp(), &sc, QuadOptions::default()).unwrap();
        assert!((r.value - 0.25).abs() < 1e-10, "{}", r.value);
    }
}
