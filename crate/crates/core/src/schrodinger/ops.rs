//! Operators of the form
//! `(Uψ)(s) = exp(2πi(½ sᵀKs + kᵀs + θ)) ψ(Gs + g)`.
//!
//! Every operator the harness representations produce (translations,
//! modulations, central characters, linear point maps and chirps) has this
//! shape, and the family is closed under composition.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseAffine {
    pub g_mat: DMatrix<f64>,
    pub g_vec: DVector<f64>,
    pub k_mat: DMatrix<f64>,
    pub k_vec: DVector<f64>,
    pub theta: f64,
}

impl PhaseAffine {
    pub fn identity(d: usize) -> Self {
        PhaseAffine {
            g_mat: DMatrix::identity(d, d),
            g_vec: DVector::zeros(d),
            k_mat: DMatrix::zeros(d, d),
            k_vec: DVector::zeros(d),
            theta: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.g_vec.len()
    }

    /// Multiplication by `e^{2πiθ}`.
    pub fn scalar(d: usize, theta: f64) -> Self {
        let mut u = Self::identity(d);
        u.theta = theta;
        u
    }

    /// `ψ(s) ↦ ψ(s - y)`.
    pub fn translation(y: &DVector<f64>) -> Self {
        let mut u = Self::identity(y.len());
        u.g_vec = -y;
        u
    }

    /// `ψ(s) ↦ e^{2πi kᵀs} ψ(s)`.
    pub fn modulation(k: &DVector<f64>) -> Self {
        let mut u = Self::identity(k.len());
        u.k_vec = k.clone();
        u
    }

    /// `ψ(s) ↦ ψ(G s)`.
    pub fn linear(g: DMatrix<f64>) -> Self {
        let mut u = Self::identity(g.nrows());
        u.g_mat = g;
        u
    }

    /// `ψ(s) ↦ e^{πi sᵀKs} ψ(s)`.
    pub fn chirp(k: DMatrix<f64>) -> Self {
        let mut u = Self::identity(k.nrows());
        u.k_mat = k;
        u
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &PhaseAffine) -> PhaseAffine {
        let (g1, v1) = (&self.g_mat, &self.g_vec);
        let k2g1 = &other.k_mat * v1;
        PhaseAffine {
            g_mat: &other.g_mat * g1,
            g_vec: &other.g_mat * v1 + &other.g_vec,
            k_mat: &self.k_mat + g1.transpose() * &other.k_mat * g1,
            k_vec: &self.k_vec + g1.transpose() * (&k2g1 + &other.k_vec),
            theta: self.theta + other.theta + 0.5 * v1.dot(&k2g1) + other.k_vec.dot(v1),
        }
    }

    /// Places a block operator at `offset` inside a `total`-dimensional space.
    pub fn embed(&self, offset: usize, total: usize) -> PhaseAffine {
        let d = self.dim();
        let mut u = Self::identity(total);
        u.g_mat.view_mut((offset, offset), (d, d)).copy_from(&self.g_mat);
        u.k_mat.view_mut((offset, offset), (d, d)).copy_from(&self.k_mat);
        u.g_vec.rows_mut(offset, d).copy_from(&self.g_vec);
        u.k_vec.rows_mut(offset, d).copy_from(&self.k_vec);
        u.theta = self.theta;
        u
    }

    /// Phase in turns at `s`.
    pub fn phase(&self, s: &DVector<f64>) -> f64 {
        0.5 * s.dot(&(&self.k_mat * s)) + self.k_vec.dot(s) + self.theta
    }

    /// Source point `G s + g`.
    pub fn source(&self, s: &DVector<f64>) -> DVector<f64> {
        &self.g_mat * s + &self.g_vec
    }

    /// Largest parameter discrepancy, with the constant phase taken mod 1.
    pub fn distance(&self, other: &PhaseAffine) -> f64 {
        let m = |a: &DMatrix<f64>, b: &DMatrix<f64>| (a - b).amax();
        let v = |a: &DVector<f64>, b: &DVector<f64>| (a - b).amax();
        let dt = (self.theta - other.theta).rem_euclid(1.0);
        [
            m(&self.g_mat, &other.g_mat),
            v(&self.g_vec, &other.g_vec),
            m(&self.k_mat, &other.k_mat),
            v(&self.k_vec, &other.k_vec),
            dt.min(1.0 - dt),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(
        u: &PhaseAffine,
        f: &dyn Fn(&DVector<f64>) -> num_complex::Complex64,
        s: &DVector<f64>,
    ) -> num_complex::Complex64 {
        let ph = num_complex::Complex64::from_polar(1.0, std::f64::consts::TAU * u.phase(s));
        ph * f(&u.source(s))
    }

    #[test]
    fn composition_matches_pointwise() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.0, 1.0]);
        let k = DMatrix::from_row_slice(2, 2, &[0.2, -0.1, -0.1, 0.5]);
        let a = PhaseAffine::linear(g).compose(&PhaseAffine::chirp(k));
        let b = PhaseAffine::translation(&DVector::from_vec(vec![0.4, -1.1]))
            .compose(&PhaseAffine::modulation(&DVector::from_vec(vec![0.7, 0.2])));
        let ab = a.compose(&b);
        let f = |s: &DVector<f64>| num_complex::Complex64::new((-s.norm_squared()).exp(), s[0]);
        let bf = |s: &DVector<f64>| apply(&b, &f, s);
        for s in [[0.1, 0.2], [-1.0, 0.7], [2.0, -0.3]] {
            let s = DVector::from_vec(s.to_vec());
            let lhs = apply(&ab, &f, &s);
            let rhs = apply(&a, &bf, &s);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_and_distance() {
        let u = PhaseAffine::scalar(2, 0.25);
        assert_eq!(PhaseAffine::identity(2).compose(&u), u);
        assert!(PhaseAffine::scalar(1, 0.999_999).distance(&PhaseAffine::scalar(1, 0.0)) < 1e-5);
    }

    #[test]
    fn embed_commutes_across_blocks() {
        let a = PhaseAffine::translation(&DVector::from_vec(vec![1.0])).embed(0, 2);
        let b = PhaseAffine::modulation(&DVector::from_vec(vec![2.0])).embed(1, 2);
        assert!(a.compose(&b).distance(&b.compose(&a)) < 1e-15);
    }
}
