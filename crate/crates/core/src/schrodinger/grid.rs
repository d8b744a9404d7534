//! Uniform tensor-grid states on `[-L, L]^D` with trapezoidal inner products
//! and cubic convolution interpolation between nodes.

use nalgebra::DVector;
use num_complex::Complex64 as C;

use super::ops::PhaseAffine;

#[derive(Clone, Debug, PartialEq)]
pub struct GridState {
    pub dim: usize,
    pub points: usize,
    pub half_width: f64,
    pub data: Vec<C>,
}

/// Keys cubic convolution kernel with `a = -1/2`.
fn keys(t: f64) -> f64 {
    let t = t.abs();
    if t < 1.0 {
        (1.5 * t - 2.5) * t * t + 1.0
    } else if t < 2.0 {
        ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0
    } else {
        0.0
    }
}

impl GridState {
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.spacing()
    }

    fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for d in (0..self.dim).rev() {
            idx[d] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    pub fn point(&self, flat: usize) -> DVector<f64> {
        DVector::from_iterator(self.dim, self.multi_index(flat).into_iter().map(|k| self.node(k)))
    }

    pub fn from_fn(dim: usize, points: usize, half_width: f64, f: impl Fn(&DVector<f64>) -> C) -> Self {
        let mut g = GridState {
            dim,
            points,
            half_width,
            data: Vec::new(),
        };
        let total = points.pow(dim as u32);
        g.data = (0..total).map(|k| f(&g.point(k))).collect();
        g
    }

    pub fn inner(&self, other: &GridState) -> C {
        let w = self.spacing().powi(self.dim as i32);
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum::<C>() * w
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self).re
    }

    /// Interpolated value; zero outside the grid.
    pub fn interpolate(&self, s: &DVector<f64>) -> C {
        let h = self.spacing();
        let mut base = Vec::with_capacity(self.dim);
        let mut weights = Vec::with_capacity(self.dim);
        for d in 0..self.dim {
            let u = (s[d] + self.half_width) / h;
            if u < -2.0 || u > (self.points + 1) as f64 {
                return C::new(0.0, 0.0);
            }
            let k0 = u.floor() as i64 - 1;
            base.push(k0);
            weights.push([0, 1, 2, 3].map(|j| keys(u - (k0 + j) as f64)));
        }
        let mut acc = C::new(0.0, 0.0);
        let stencil = 4usize.pow(self.dim as u32);
        'outer: for code in 0..stencil {
            let mut idx = 0usize;
            let mut w = 1.0;
            let mut c = code;
            for d in 0..self.dim {
                let j = c % 4;
                c /= 4;
                let k = base[d] + j as i64;
                if k < 0 || k >= self.points as i64 {
                    continue 'outer;
                }
                w *= weights[d][j];
                idx = idx * self.points + k as usize;
            }
            acc += self.data[idx] * w;
        }
        acc
    }

    /// Samples `Uψ` at the nodes by interpolating `ψ` at the source points.
    pub fn apply(&self, u: &PhaseAffine) -> GridState {
        let data = (0..self.data.len())
            .map(|k| {
                let s = self.point(k);
                let ph = C::from_polar(1.0, std::f64::consts::TAU * u.phase(&s));
                ph * self.interpolate(&u.source(&s))
            })
            .collect();
        GridState { data, ..self.clone() }
    }

    /// Largest node difference, for comparing two states on the same grid.
    pub fn max_diff(&self, other: &GridState) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &GridState) -> f64 {
        let w = self.spacing().powi(self.dim as i32);
        (self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * w)
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schrodinger::gaussian::GaussianState;

    #[test]
    fn trapezoid_norm_of_gaussian() {
        let g = GaussianState::standard(2);
        let s = GridState::from_fn(2, 101, 5.0, |x| g.eval(x));
        assert!((s.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_is_third_order() {
        let g = GaussianState::packet(&[1.0, 0.7], &[0.2, -0.1], &[0.3, 0.1]);
        let s = GridState::from_fn(2, 257, 4.0, |x| g.eval(x));
        let mut worst: f64 = 0.0;
        for p in [[0.013, -0.27], [1.111, 0.5], [-0.77, 0.031]] {
            let x = DVector::from_vec(p.to_vec());
            worst = worst.max((s.interpolate(&x) - g.eval(&x)).norm());
        }
        assert!(worst < 1e-4, "{worst}");
        let node = s.point(1234);
        assert!((s.interpolate(&node) - s.data[1234]).norm() < 1e-14);
    }
}
