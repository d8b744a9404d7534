//! Complex Gaussian states `ψ(s) = exp(-π sᵀAs + 2π bᵀs + c)` with `A`
//! complex symmetric and `Re A` positive definite.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;

use super::ops::PhaseAffine;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    pub a: DMatrix<C>,
    pub b: DVector<C>,
    pub c: C,
}

fn cplx(m: &DMatrix<f64>) -> DMatrix<C> {
    m.map(|x| C::new(x, 0.0))
}

fn cvec(v: &DVector<f64>) -> DVector<C> {
    v.map(|x| C::new(x, 0.0))
}

impl GaussianState {
    /// `2^{d/4} e^{-π|s|²}`, a unit vector.
    pub fn standard(d: usize) -> Self {
        GaussianState {
            a: DMatrix::identity(d, d),
            b: DVector::zeros(d),
            c: C::new(d as f64 * 0.25 * std::f64::consts::LN_2, 0.0),
        }
    }

    /// `exp(-π w |s - m|² + 2πi ξᵀs)` scaled to unit norm.
    pub fn packet(width: &[f64], center: &[f64], freq: &[f64]) -> Self {
        let d = width.len();
        let a = DMatrix::from_diagonal(&DVector::from_iterator(d, width.iter().map(|&w| C::new(w, 0.0))));
        let b = DVector::from_iterator(d, (0..d).map(|i| C::new(width[i] * center[i], freq[i])));
        let c0: f64 = (0..d).map(|i| -PI * width[i] * center[i] * center[i]).sum();
        let mut g = GaussianState {
            a,
            b,
            c: C::new(c0, 0.0),
        };
        let n = g.norm_sq().expect("positive width");
        g.c -= C::new(0.5 * n.ln(), 0.0);
        g
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn eval(&self, s: &DVector<f64>) -> C {
        let sc = cvec(s);
        let q = (sc.transpose() * &self.a * &sc)[(0, 0)];
        let l = (self.b.transpose() * &sc)[(0, 0)];
        (-PI * q + 2.0 * PI * l + self.c).exp()
    }

    pub fn log_eval(&self, s: &DVector<f64>) -> C {
        let sc = cvec(s);
        let q = (sc.transpose() * &self.a * &sc)[(0, 0)];
        let l = (self.b.transpose() * &sc)[(0, 0)];
        -PI * q + 2.0 * PI * l + self.c
    }

    /// `Uψ` for a phase-affine operator `U`.
    pub fn apply(&self, u: &PhaseAffine) -> GaussianState {
        let g = cplx(&u.g_mat);
        let gv = cvec(&u.g_vec);
        let gt = g.transpose();
        let ag = &self.a * &gv;
        let i = C::new(0.0, 1.0);
        GaussianState {
            a: &gt * &self.a * &g - cplx(&u.k_mat) * i,
            b: &gt * &self.b - &gt * &ag + cvec(&u.k_vec) * i,
            c: self.c - PI * gv.dot(&ag) + 2.0 * PI * self.b.dot(&gv) + 2.0 * PI * i * u.theta,
        }
    }

    pub fn scale(&self, z: C) -> GaussianState {
        GaussianState {
            c: self.c + z.ln(),
            ..self.clone()
        }
    }

    pub fn norm_sq(&self) -> Result<f64> {
        Ok(log_inner(self, self)?.re.exp())
    }
}

/// `log ∫ exp(-π sᵀAs + 2π bᵀs + c) ds`, the square root of the determinant
/// taken pivot by pivot so the branch follows from `Re A > 0`.
pub fn log_integral(a: &DMatrix<C>, b: &DVector<C>, c: C) -> Result<C> {
    let d = b.len();
    if d == 0 {
        return Ok(c);
    }
    let mut m = a.clone();
    let mut log_det_half = C::new(0.0, 0.0);
    for k in 0..d {
        let p = m[(k, k)];
        if p.re <= 0.0 {
            return Err(Error::Singular("Gaussian with non-decaying real part".into()));
        }
        log_det_half += 0.5 * p.ln();
        for i in k + 1..d {
            let f = m[(i, k)] / p;
            for j in k + 1..d {
                let t = f * m[(k, j)];
                m[(i, j)] -= t;
            }
        }
    }
    let x = a
        .clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Singular("Gaussian matrix".into()))?;
    Ok(-log_det_half + PI * b.dot(&x) + c)
}

/// `log ⟨u, w⟩`, antilinear in `u`.
pub fn log_inner(u: &GaussianState, w: &GaussianState) -> Result<C> {
    log_integral(
        &(u.a.map(|z| z.conj()) + &w.a),
        &(u.b.map(|z| z.conj()) + &w.b),
        u.c.conj() + w.c,
    )
}

pub fn inner(u: &GaussianState, w: &GaussianState) -> Result<C> {
    Ok(log_inner(u, w)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_is_unit() {
        for d in 1..4 {
            assert!((GaussianState::standard(d).norm_sq().unwrap() - 1.0).abs() < 1e-14);
        }
        let p = GaussianState::packet(&[0.5, 2.0], &[1.0, -0.3], &[0.2, 0.7]);
        assert!((p.norm_sq().unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn inner_matches_quadrature() {
        let u = GaussianState::packet(&[0.7], &[0.3], &[0.4]);
        let w = GaussianState::packet(&[1.3], &[-0.2], &[-0.1]);
        let h = 0.01;
        let mut acc = C::new(0.0, 0.0);
        for k in -1000..=1000 {
            let s = DVector::from_vec(vec![k as f64 * h]);
            acc += u.eval(&s).conj() * w.eval(&s) * h;
        }
        let exact = inner(&u, &w).unwrap();
        assert!((acc - exact).norm() < 1e-12, "{acc} vs {exact}");
    }

    #[test]
    fn apply_matches_pointwise() {
        let g = GaussianState::packet(&[0.8, 1.1], &[0.1, 0.2], &[0.3, -0.4]);
        let u = PhaseAffine::linear(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]))
            .compose(&PhaseAffine::chirp(DMatrix::from_row_slice(
                2,
                2,
                &[0.3, 0.1, 0.1, -0.2],
            )))
            .compose(&PhaseAffine::translation(&DVector::from_vec(vec![0.5, -0.25])))
            .compose(&PhaseAffine::modulation(&DVector::from_vec(vec![1.0, 0.0])))
            .compose(&PhaseAffine::scalar(2, 0.3));
        let ug = g.apply(&u);
        for s in [[0.0, 0.0], [0.4, -0.9], [-1.2, 0.3]] {
            let s = DVector::from_vec(s.to_vec());
            let ph = C::from_polar(1.0, std::f64::consts::TAU * u.phase(&s));
            let want = ph * g.eval(&u.source(&s));
            assert!((ug.eval(&s) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn chirped_integral_branch() {
        // ∫ e^{-π(1 - 3i)s²} ds = (1 - 3i)^{-1/2}, principal branch.
        let a = DMatrix::from_element(1, 1, C::new(1.0, -3.0));
        let v = log_integral(&a, &DVector::zeros(1), C::new(0.0, 0.0)).unwrap().exp();
        let want = C::new(1.0, -3.0).powf(-0.5);
        assert!((v - want).norm() < 1e-14);
    }
}
