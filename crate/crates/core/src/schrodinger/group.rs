//! Float matrix model of a harness group in ordered layer coordinates
//! `g = exp(ξ_1) exp(ξ_2) ... exp(ξ_m)` with `ξ_r ∈ l_r`.

use nalgebra::DMatrix;

use crate::cascade::{decompose, CascadeDecomposition};
use crate::error::{Error, Result};
use crate::nilalg::{layer_subalgebras, Layer, NilpotentAlgebra};
use crate::rational::to_f64;
use crate::rootsys::{build, RootSystem, Series};

#[derive(Clone, Debug)]
pub struct HarnessGroup {
    pub system: RootSystem,
    pub alg: NilpotentAlgebra,
    pub decomp: CascadeDecomposition,
    pub layers: Vec<Layer>,
    basis: Vec<DMatrix<f64>>,
    primary: Vec<(usize, usize, f64)>,
    size: usize,
}

/// `exp` of a nilpotent matrix by its finite series.
pub fn expm_nil(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let mut out = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=n {
        term = &term * x / k as f64;
        if term.amax() == 0.0 {
            break;
        }
        out += &term;
    }
    out
}

/// `log` of a unipotent matrix by its finite series.
pub fn logm_unip(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let x = m - DMatrix::identity(n, n);
    let mut out = DMatrix::zeros(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=n {
        term = &term * &x;
        if term.amax() == 0.0 {
            break;
        }
        let s = if k % 2 == 1 { 1.0 } else { -1.0 };
        out += &term * (s / k as f64);
    }
    out
}

impl HarnessGroup {
    pub fn new(series: Series, rank: usize) -> Result<Self> {
        Self::from_system(build(series, rank)?)
    }

    pub fn from_system(system: RootSystem) -> Result<Self> {
        let alg = NilpotentAlgebra::realize(&system)?;
        let decomp = decompose(&system)?;
        let layers = layer_subalgebras(&alg, &decomp)?;
        let size = alg.matrix_size();
        let basis: Vec<DMatrix<f64>> = (0..alg.dim())
            .map(|i| {
                let rows = alg.basis_matrix(i).to_f64_rows();
                DMatrix::from_fn(size, size, |a, b| rows[a][b])
            })
            .collect();
        let primary = (0..alg.dim())
            .map(|i| {
                let (a, b, v) = alg
                    .basis_matrix(i)
                    .entries()
                    .find(|(_, _, v)| !num_traits::Zero::is_zero(*v))
                    .expect("nonzero root vector");
                (a, b, to_f64(v))
            })
            .collect();
        Ok(HarnessGroup {
            system,
            alg,
            decomp,
            layers,
            basis,
            primary,
            size,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn m(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, r: usize) -> &Layer {
        &self.layers[r - 1]
    }

    /// Layer index (1-based) of each coordinate.
    pub fn coord_layer(&self, i: usize) -> usize {
        self.layers
            .iter()
            .find(|l| l.z_index == i || l.v_indices.contains(&i))
            .map(|l| l.r)
            .expect("layers cover the algebra")
    }

    pub fn algebra_matrix(&self, x: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.size, self.size);
        for (c, b) in x.iter().zip(&self.basis) {
            if *c != 0.0 {
                m += b * *c;
            }
        }
        m
    }

    pub fn algebra_coords(&self, m: &DMatrix<f64>) -> Vec<f64> {
        self.primary.iter().map(|&(a, b, v)| m[(a, b)] / v).collect()
    }

    /// Matrix of `exp(ξ_1) ... exp(ξ_m)`.
    pub fn element_matrix(&self, xi: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::identity(self.size, self.size);
        for l in &self.layers {
            let mut part = vec![0.0; self.dim()];
            for i in l.indices() {
                part[i] = xi[i];
            }
            if part.iter().any(|v| *v != 0.0) {
                out *= expm_nil(&self.algebra_matrix(&part));
            }
        }
        out
    }

    /// Inverse of [`element_matrix`]: peel off one layer at a time, using
    /// that each tail of layers spans an ideal.
    pub fn layer_coords(&self, m: &DMatrix<f64>) -> Vec<f64> {
        let mut rest = m.clone();
        let mut xi = vec![0.0; self.dim()];
        for l in &self.layers {
            let x = self.algebra_coords(&logm_unip(&rest));
            let mut part = vec![0.0; self.dim()];
            for i in l.indices() {
                part[i] = x[i];
                xi[i] = x[i];
            }
            rest = expm_nil(&(-self.algebra_matrix(&part))) * rest;
        }
        xi
    }

    pub fn mul(&self, g: &[f64], h: &[f64]) -> Vec<f64> {
        self.layer_coords(&(self.element_matrix(g) * self.element_matrix(h)))
    }

    pub fn inv(&self, g: &[f64]) -> Vec<f64> {
        let m = self.element_matrix(g);
        let inv = m.try_inverse().expect("unipotent matrices are invertible");
        self.layer_coords(&inv)
    }

    /// Layer coordinates of `exp(X)` for algebra coordinates `X`.
    pub fn from_log(&self, x: &[f64]) -> Vec<f64> {
        self.layer_coords(&expm_nil(&self.algebra_matrix(x)))
    }

    /// Algebra coordinates of `log g`.
    pub fn to_log(&self, g: &[f64]) -> Vec<f64> {
        self.algebra_coords(&logm_unip(&self.element_matrix(g)))
    }

    /// `Ad(g)` on the full algebra in basis coordinates; column `j` is the
    /// image of basis vector `j`.
    pub fn ad(&self, g: &[f64]) -> DMatrix<f64> {
        let m = self.element_matrix(g);
        let mi = m.clone().try_inverse().expect("invertible");
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for j in 0..d {
            let img = &m * &self.basis[j] * &mi;
            let c = self.algebra_coords(&img);
            if (self.algebra_matrix(&c) - &img).amax() > 1e-9 * (1.0 + img.amax()) {
                panic!("Ad(g) left the algebra");
            }
            for i in 0..d {
                out[(i, j)] = c[i];
            }
        }
        out
    }

    /// `[X, Y]` in algebra coordinates.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let (a, b) = (self.algebra_matrix(x), self.algebra_matrix(y));
        self.algebra_coords(&(&a * &b - &b * &a))
    }

    /// `log(exp X exp Y)` in algebra coordinates.
    pub fn log_product(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let m = expm_nil(&self.algebra_matrix(x)) * expm_nil(&self.algebra_matrix(y));
        self.algebra_coords(&logm_unip(&m))
    }

    /// Checks that an algebra element lies in the given coordinate set.
    pub fn supported_in(&self, x: &[f64], allowed: &[usize], tol: f64) -> Result<()> {
        for (i, v) in x.iter().enumerate() {
            if !allowed.contains(&i) && v.abs() > tol {
                return Err(Error::Invariant(format!(
                    "coordinate {i} = {v} outside the expected span"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coords_round_trip_and_group_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (s, l) in [(Series::A, 3), (Series::C, 2), (Series::B, 3), (Series::A, 4)] {
            let g = HarnessGroup::new(s, l).unwrap();
            for _ in 0..10 {
                let x: Vec<f64> = (0..g.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let y: Vec<f64> = (0..g.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let back = g.layer_coords(&g.element_matrix(&x));
                for (a, b) in x.iter().zip(&back) {
                    assert!((a - b).abs() < 1e-10);
                }
                let xy = g.mul(&x, &y);
                let lhs = g.element_matrix(&xy);
                let rhs = g.element_matrix(&x) * g.element_matrix(&y);
                assert!((lhs - rhs).amax() < 1e-10);
                let e = g.mul(&x, &g.inv(&x));
                assert!(e.iter().all(|v| v.abs() < 1e-10));
                let lx = g.from_log(&g.to_log(&x));
                assert!(lx.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-10));
            }
        }
    }
}
