//! Characters as coadjoint orbit integrals and the Fourier inversion formula
//! `f(x) = c ∫_{t*} Θ_γ(r_x f) |P(γ)| dγ` on harness groups.
//!
//! Test functions live on the subgroup generated by a set of active layers
//! and are described through their lift `f₁(ξ) = f(exp ξ)` in algebra
//! coordinates. Fourier transforms use `e^{-2πi⟨ξ*,ξ⟩}`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use num_traits::{ToPrimitive, Zero};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plancherel::{b_lambda_matrix, pfaffian, plancherel_constant};
use crate::rational::{to_f64, Q};
use crate::schrodinger::gaussian::{log_integral, GaussianState};
use crate::schrodinger::{HarnessGroup, HarnessId};

/// The subgroup `L_{r_1} ... L_{r_k}` of a harness group.
#[derive(Clone, Debug)]
pub struct Stage {
    pub group: Arc<HarnessGroup>,
    pub active: Vec<usize>,
    coords: Vec<usize>,
    t_local: Vec<usize>,
    v_local: Vec<usize>,
    pf_unit: Vec<f64>,
    d: Vec<usize>,
    c: f64,
}

impl Stage {
    pub fn new(group: Arc<HarnessGroup>, active: Vec<usize>) -> Result<Self> {
        let mut coords: Vec<usize> = active.iter().flat_map(|&r| group.layer(r).indices()).collect();
        coords.sort_unstable();
        let local = |i: usize| coords.binary_search(&i).expect("active coordinate");
        let t_local = active.iter().map(|&r| local(group.layer(r).z_index)).collect();
        let mut v_local: Vec<usize> = active
            .iter()
            .flat_map(|&r| group.layer(r).v_indices.clone())
            .map(local)
            .collect();
        v_local.sort_unstable();
        let mut pf_unit = Vec::new();
        let mut d = Vec::new();
        for &r in &active {
            let l = group.layer(r);
            let p = if l.d == 0 {
                1.0
            } else {
                to_f64(&pfaffian(&b_lambda_matrix(&group.alg, l, &Q::from_integer(1.into()))?)?).abs()
            };
            pf_unit.push(p);
            d.push(l.d);
        }
        let c = plancherel_constant(&d).to_f64().unwrap_or(f64::INFINITY);
        let stage = Stage {
            group,
            active,
            coords,
            t_local,
            v_local,
            pf_unit,
            d,
            c,
        };
        // The active layers must span a subalgebra.
        for i in 0..stage.dim() {
            for j in 0..stage.dim() {
                let b = stage
                    .group
                    .bracket(&stage.embed(&stage.unit(i)), &stage.embed(&stage.unit(j)));
                stage
                    .group
                    .supported_in(&b, &stage.coords, 1e-12)
                    .map_err(|_| Error::Incompatible("active layers do not span a subalgebra".into()))?;
            }
        }
        Ok(stage)
    }

    /// Top layer of `A_{d+1}` alone.
    pub fn heisenberg(d: usize) -> Result<Self> {
        let g = Arc::new(HarnessId::Heis(d).group()?);
        let m = g.m();
        Stage::new(g, vec![m])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn t_dim(&self) -> usize {
        self.active.len()
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    /// Local positions of the layer centres, in the order of `active`.
    pub fn t_local(&self) -> &[usize] {
        &self.t_local
    }

    pub fn v_local(&self) -> &[usize] {
        &self.v_local
    }

    pub fn plancherel_constant(&self) -> f64 {
        self.c
    }

    fn unit(&self, i: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.dim()];
        e[i] = 1.0;
        e
    }

    /// `|P(γ)| = Π |Pf_r(γ_r)|`, using `Pf_r(sλ) = s^{d_r} Pf_r(λ)`.
    pub fn pf_abs(&self, gamma: &[f64]) -> f64 {
        gamma
            .iter()
            .zip(self.pf_unit.iter().zip(&self.d))
            .map(|(g, (p, &d))| p * g.abs().powi(d as i32))
            .product()
    }

    pub fn embed(&self, local: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.group.dim()];
        for (v, &i) in local.iter().zip(&self.coords) {
            out[i] = *v;
        }
        out
    }

    pub fn restrict(&self, full: &[f64]) -> Result<Vec<f64>> {
        self.group
            .supported_in(full, &self.coords, 1e-9)
            .map_err(|_| Error::Incompatible("element leaves the stage".into()))?;
        Ok(self.coords.iter().map(|&i| full[i]).collect())
    }

    /// `log(exp ξ exp η)` in local coordinates.
    pub fn log_product(&self, xi: &[f64], eta: &[f64]) -> Result<Vec<f64>> {
        self.restrict(&self.group.log_product(&self.embed(xi), &self.embed(eta)))
    }

    /// `ad η` on local coordinates; column `j` is `[e_j, η]`.
    pub fn ad(&self, eta: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let e = self.embed(eta);
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            let b = self.group.bracket(&self.embed(&self.unit(j)), &e);
            for (i, &k) in self.coords.iter().enumerate() {
                out[(i, j)] = b[k];
            }
        }
        out
    }

    pub fn is_two_step(&self) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let b = self
                    .group
                    .bracket(&self.embed(&self.unit(i)), &self.embed(&self.unit(j)));
                for k in 0..n {
                    let t = self.group.bracket(&b, &self.embed(&self.unit(k)));
                    if t.iter().any(|v| v.abs() > 1e-12) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// `f₁(ξ) = amp · exp(-π (ξ-c)ᵀ S (ξ-c))`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianTestFunction {
    pub s: DMatrix<f64>,
    pub center: DVector<f64>,
    pub amp: f64,
}

impl GaussianTestFunction {
    pub fn standard(n: usize) -> Self {
        GaussianTestFunction {
            s: DMatrix::identity(n, n),
            center: DVector::zeros(n),
            amp: 1.0,
        }
    }

    pub fn new(s: DMatrix<f64>, center: DVector<f64>, amp: f64) -> Result<Self> {
        if s.nrows() != center.len() || !s.is_square() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                found: s.nrows(),
            });
        }
        if (&s - s.transpose()).amax() > 1e-12 || s.clone().cholesky().is_none() {
            return Err(Error::Config(
                "Gaussian covariance must be symmetric positive definite".into(),
            ));
        }
        Ok(GaussianTestFunction { s, center, amp })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        let d = DVector::from_column_slice(xi) - &self.center;
        self.amp * (-std::f64::consts::PI * d.dot(&(&self.s * &d))).exp()
    }

    pub fn sup_norm(&self) -> f64 {
        self.amp.abs()
    }

    pub fn scaled(&self, k: f64) -> Self {
        GaussianTestFunction {
            amp: self.amp * k,
            ..self.clone()
        }
    }

    /// `ξ ↦ f₁(Aξ + η)`.
    pub fn pullback(&self, a: &DMatrix<f64>, eta: &DVector<f64>) -> Result<Self> {
        let ainv = a
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("affine pullback".into()))?;
        let s = a.transpose() * &self.s * a;
        Ok(GaussianTestFunction {
            s: (&s + s.transpose()) * 0.5,
            center: ainv * (&self.center - eta),
            amp: self.amp,
        })
    }
}

/// Closed-form `f̂₁` as a complex Gaussian in `ξ*`.
pub fn euclidean_ft(f: &GaussianTestFunction) -> Result<GaussianState> {
    let chol =
        f.s.clone()
            .cholesky()
            .ok_or_else(|| Error::Singular("Gaussian covariance".into()))?;
    let log_det: f64 = chol.l().diagonal().iter().map(|x| 2.0 * x.ln()).sum();
    let sinv = chol.inverse();
    Ok(GaussianState {
        a: sinv.map(|x| C::new(x, 0.0)),
        b: f.center.map(|x| C::new(0.0, -x)),
        c: C::new(f.amp.ln() - 0.5 * log_det, 0.0),
    })
}

/// Transform of samples on `[-L, L]^dim` (row-major, last axis fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct FtGrid {
    pub dim: usize,
    pub freqs: Vec<f64>,
    pub data: Vec<C>,
}

impl FtGrid {
    pub fn index(&self, k: &[usize]) -> usize {
        k.iter().fold(0, |acc, &i| acc * self.freqs.len() + i)
    }
}

/// FFT path of [`euclidean_ft`]: `h^dim Σ f(x_j) e^{-2πi⟨ξ_k, x_j⟩}` on
/// the grid dual to the sample grid.
pub fn euclidean_ft_grid(samples: &[C], dim: usize, points: usize, half_width: f64) -> Result<FtGrid> {
    if samples.len() != points.pow(dim as u32) {
        return Err(Error::DimensionMismatch {
            expected: points.pow(dim as u32),
            found: samples.len(),
        });
    }
    let h = 2.0 * half_width / points as f64;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(points);
    let mut data = samples.to_vec();
    let freqs: Vec<f64> = (0..points)
        .map(|k| {
            let k = if k < points.div_ceil(2) {
                k as f64
            } else {
                k as f64 - points as f64
            };
            k / (points as f64 * h)
        })
        .collect();
    let mut line = vec![C::zero(); points];
    for axis in 0..dim {
        let stride = points.pow((dim - 1 - axis) as u32);
        let outer = samples.len() / points;
        for o in 0..outer {
            let base = (o / stride) * stride * points + o % stride;
            for (k, v) in line.iter_mut().enumerate() {
                *v = data[base + k * stride];
            }
            fft.process(&mut line);
            for (k, v) in line.iter().enumerate() {
                let shift = C::from_polar(h, std::f64::consts::TAU * freqs[k] * half_width);
                data[base + k * stride] = v * shift;
            }
        }
    }
    Ok(FtGrid { dim, freqs, data })
}

/// `(r_x f)₁` for a two-step stage: `log(exp ξ exp η) = ξ + η + ½[ξ, η]`.
pub fn right_translate(stage: &Stage, f: &GaussianTestFunction, eta: &[f64]) -> Result<GaussianTestFunction> {
    if !stage.is_two_step() {
        return Err(Error::Incompatible(
            "closed-form translate needs a two-step stage".into(),
        ));
    }
    let n = stage.dim();
    let a = DMatrix::identity(n, n) - stage.ad(eta) * 0.5;
    f.pullback(&a, &DVector::from_column_slice(eta))
}

/// `h ↦ f(g h g⁻¹)` for a two-step stage, `g = exp η`.
pub fn conjugate(stage: &Stage, f: &GaussianTestFunction, eta: &[f64]) -> Result<GaussianTestFunction> {
    if !stage.is_two_step() {
        return Err(Error::Incompatible(
            "closed-form conjugate needs a two-step stage".into(),
        ));
    }
    let n = stage.dim();
    let a = DMatrix::identity(n, n) - stage.ad(eta);
    f.pullback(&a, &DVector::zeros(n))
}

/// The affine subspace `v* + γ` of the stage's dual.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitDescriptor {
    pub gamma: Vec<f64>,
    pub base: DVector<f64>,
    pub v_basis: Vec<usize>,
}

impl OrbitDescriptor {
    pub fn new(stage: &Stage, gamma: &[f64]) -> Result<Self> {
        if gamma.len() != stage.t_dim() {
            return Err(Error::DimensionMismatch {
                expected: stage.t_dim(),
                found: gamma.len(),
            });
        }
        if stage.pf_abs(gamma) == 0.0 {
            return Err(Error::Singular("gamma lies off the nonsingular set".into()));
        }
        let mut base = DVector::zeros(stage.dim());
        for (g, &i) in gamma.iter().zip(stage.t_local()) {
            base[i] = *g;
        }
        Ok(OrbitDescriptor {
            gamma: gamma.to_vec(),
            base,
            v_basis: stage.v_local().to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.v_basis.len()
    }
}

/// `Θ_γ(f) = c⁻¹|P(γ)|⁻¹ ∫_{v*+γ} f̂₁` with `f̂₁` a complex Gaussian.
pub fn orbit_integral(stage: &Stage, fhat: &GaussianState, orbit: &OrbitDescriptor) -> Result<C> {
    let n = stage.dim();
    let k = orbit.dim();
    let mut e = DMatrix::<C>::zeros(n, k);
    for (j, &i) in orbit.v_basis.iter().enumerate() {
        e[(i, j)] = C::new(1.0, 0.0);
    }
    let base = orbit.base.map(|x| C::new(x, 0.0));
    let ab = &fhat.a * &base;
    let a = e.transpose() * &fhat.a * &e;
    let b = e.transpose() * (&fhat.b - &ab);
    let c = fhat.c - std::f64::consts::PI * base.dot(&ab) + std::f64::consts::TAU * fhat.b.dot(&base);
    let slice = log_integral(&a, &b, c)?.exp();
    Ok(slice / (stage.plancherel_constant() * stage.pf_abs(&orbit.gamma)))
}

/// Samples of `f₁` on the quasi-centre `s = span{z_r}`. By the slice
/// theorem `∫_{v*+γ} f̂₁ = ∫_s f₁(s) e^{-2πiγ(s)} ds`, so `Θ_γ` follows
/// from these samples alone.
#[derive(Clone, Debug)]
pub struct SliceSamples {
    pub half_width: f64,
    pub points: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
    values: Vec<C>,
    c: f64,
    pf_unit: Vec<f64>,
    d: Vec<usize>,
}

impl SliceSamples {
    pub fn new(stage: &Stage, f1: &dyn Fn(&[f64]) -> Result<C>, half_width: f64, points: usize) -> Result<Self> {
        let k = stage.t_dim();
        let h = 2.0 * half_width / (points - 1) as f64;
        let total = points.pow(k as u32);
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut values = Vec::with_capacity(total);
        let mut xi = vec![0.0; stage.dim()];
        for flat in 0..total {
            let mut rem = flat;
            let mut w = h.powi(k as i32);
            let mut s = vec![0.0; k];
            for a in (0..k).rev() {
                let i = rem % points;
                rem /= points;
                s[a] = -half_width + i as f64 * h;
                if i == 0 || i == points - 1 {
                    w *= 0.5;
                }
            }
            for (v, &i) in s.iter().zip(stage.t_local()) {
                xi[i] = *v;
            }
            values.push(f1(&xi)?);
            nodes.push(s);
            weights.push(w);
        }
        Ok(SliceSamples {
            half_width,
            points,
            nodes,
            weights,
            values,
            c: stage.plancherel_constant(),
            pf_unit: stage.pf_unit.clone(),
            d: stage.d.clone(),
        })
    }

    /// Largest sample on the boundary of the box.
    pub fn edge(&self) -> f64 {
        self.nodes
            .iter()
            .zip(&self.values)
            .filter(|(s, _)| s.iter().any(|x| (x.abs() - self.half_width).abs() < 1e-12))
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    fn pf_abs(&self, gamma: &[f64]) -> f64 {
        gamma
            .iter()
            .zip(self.pf_unit.iter().zip(&self.d))
            .map(|(g, (p, &d))| p * g.abs().powi(d as i32))
            .product()
    }

    pub fn theta(&self, gamma: &[f64]) -> Result<C> {
        let p = self.pf_abs(gamma);
        if p == 0.0 {
            return Err(Error::Singular("gamma lies off the nonsingular set".into()));
        }
        let mut acc = C::zero();
        for ((s, w), v) in self.nodes.iter().zip(&self.weights).zip(&self.values) {
            let ph: f64 = s.iter().zip(gamma).map(|(a, b)| a * b).sum();
            acc += v * C::from_polar(*w, -std::f64::consts::TAU * ph);
        }
        Ok(acc / (self.c * p))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InversionOptions {
    /// Midpoint nodes per axis of `t*`.
    pub resolution: usize,
    pub tolerance: f64,
    pub lambda_start: f64,
    pub max_widenings: usize,
}

impl Default for InversionOptions {
    fn default() -> Self {
        InversionOptions {
            resolution: 64,
            tolerance: 1e-4,
            lambda_start: 2.0,
            max_widenings: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InversionResult {
    pub value: [f64; 2],
    pub expected: [f64; 2],
    pub rel_residual: f64,
    pub lambda_max: f64,
    /// Largest integrand on the outermost cells relative to the peak.
    pub tail_ratio: f64,
    /// `|F(ε) - F(-ε)|` across each singular hyperplane `γ_r = 0`.
    pub continuity_gap: f64,
    pub nodes: usize,
}

fn midpoint_sum(k: usize, n: usize, lam: f64, f: &dyn Fn(&[f64]) -> Result<C>) -> Result<(C, f64, f64)> {
    let h = 2.0 * lam / n as f64;
    let mut acc = C::zero();
    let mut edge: f64 = 0.0;
    let mut peak: f64 = 0.0;
    let mut g = vec![0.0; k];
    for flat in 0..n.pow(k as u32) {
        let mut rem = flat;
        let mut outer = false;
        for a in (0..k).rev() {
            let i = rem % n;
            rem /= n;
            g[a] = -lam + (i as f64 + 0.5) * h;
            outer |= i == 0 || i == n - 1;
        }
        let v = f(&g)?;
        acc += v;
        peak = peak.max(v.norm());
        if outer {
            edge = edge.max(v.norm());
        }
    }
    Ok((acc * h.powi(k as i32), edge, peak))
}

/// `c ∫_{t*} Θ_γ(r_x f)|P(γ)| dγ` by the midpoint rule on a box widened until
/// the integrand is below `tolerance/10` of its peak on the outer cells.
pub fn fourier_inversion(
    stage: &Stage,
    theta: &dyn Fn(&[f64]) -> Result<C>,
    expected: C,
    sup_norm: f64,
    opts: InversionOptions,
) -> Result<InversionResult> {
    let k = stage.t_dim();
    let c = stage.plancherel_constant();
    let integrand = |g: &[f64]| -> Result<C> { Ok(theta(g)? * (c * stage.pf_abs(g))) };
    let mut lam = opts.lambda_start;
    for _ in 0..=opts.max_widenings {
        let (val, edge, peak) = midpoint_sum(k, opts.resolution, lam, &integrand)?;
        let tail_ratio = edge / peak.max(f64::MIN_POSITIVE);
        if tail_ratio <= opts.tolerance / 10.0 {
            let eps = 1e-7;
            let mut gap: f64 = 0.0;
            let base: Vec<f64> = (0..k).map(|i| 0.37 + 0.11 * i as f64).collect();
            for r in 0..k {
                if stage.d[r] == 0 {
                    continue;
                }
                let mut lo = base.clone();
                let mut hi = base.clone();
                lo[r] = -eps;
                hi[r] = eps;
                gap = gap.max((integrand(&hi)? - integrand(&lo)?).norm());
            }
            return Ok(InversionResult {
                value: [val.re, val.im],
                expected: [expected.re, expected.im],
                rel_residual: (val - expected).norm() / sup_norm,
                lambda_max: lam,
                tail_ratio,
                continuity_gap: gap,
                nodes: opts.resolution.pow(k as u32),
            });
        }
        lam *= 1.5;
    }
    Err(Error::NonConvergent(format!(
        "t* integrand not negligible on |γ| <= {lam} at resolution {}",
        opts.resolution
    )))
}

/// Closed-form pipeline on a two-step stage: translate, transform, slice.
pub fn heisenberg_inversion(
    stage: &Stage,
    f: &GaussianTestFunction,
    x: &[f64],
    opts: InversionOptions,
) -> Result<InversionResult> {
    let fx = right_translate(stage, f, x)?;
    let fhat = euclidean_ft(&fx)?;
    let theta = |g: &[f64]| orbit_integral(stage, &fhat, &OrbitDescriptor::new(stage, g)?);
    fourier_inversion(stage, &theta, C::new(f.eval(x), 0.0), f.sup_norm(), opts)
}

/// Slice pipeline on any stage: `Θ_γ(r_x f)` from samples of
/// `s ↦ f(exp(s) x)` on the quasi-centre.
pub fn slice_inversion(
    stage: &Stage,
    f1: &dyn Fn(&[f64]) -> f64,
    sup_norm: f64,
    x: &[f64],
    slice_box: (f64, usize),
    opts: InversionOptions,
) -> Result<InversionResult> {
    let translated = |xi: &[f64]| -> Result<C> { Ok(C::new(f1(&stage.log_product(xi, x)?), 0.0)) };
    let samples = SliceSamples::new(stage, &translated, slice_box.0, slice_box.1)?;
    if samples.edge() > opts.tolerance / 10.0 * sup_norm {
        return Err(Error::NonConvergent(format!(
            "test function not negligible on the quasi-centre box of half-width {}",
            slice_box.0
        )));
    }
    fourier_inversion(stage, &|g| samples.theta(g), C::new(f1(x), 0.0), sup_norm, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitInversionReport {
    pub coherence_gap: f64,
    pub stages: Vec<InversionResult>,
    pub constants: Vec<f64>,
    pub agreement: f64,
}

/// Inversion at a small stage and at a larger one for `x` in the small
/// stage. `f_small` defaults to the restriction of `f_big`; an explicit
/// `f_small` is first checked against that restriction on a grid.
pub fn limit_inversion_check(
    small: &Stage,
    big: &Stage,
    f_big: &GaussianTestFunction,
    f_small: Option<&dyn Fn(&[f64]) -> f64>,
    x_small: &[f64],
    opts: InversionOptions,
) -> Result<LimitInversionReport> {
    if !Arc::ptr_eq(&small.group, &big.group) || !small.coords().iter().all(|i| big.coords().contains(i)) {
        return Err(Error::Incompatible("stages are not nested in one group".into()));
    }
    let to_big = |xi: &[f64]| big.restrict(&small.embed(xi)).expect("nested stages");
    let restricted = |xi: &[f64]| f_big.eval(&to_big(xi));
    let fs: &dyn Fn(&[f64]) -> f64 = f_small.unwrap_or(&restricted);
    // Coherence: f_small must be the restriction of f_big.
    let mut gap: f64 = 0.0;
    let n = small.dim();
    let pts = 9usize;
    for flat in 0..pts.pow(n as u32) {
        let mut rem = flat;
        let xi: Vec<f64> = (0..n)
            .map(|_| {
                let i = rem % pts;
                rem /= pts;
                -2.0 + 4.0 * i as f64 / (pts - 1) as f64
            })
            .collect();
        gap = gap.max((fs(&xi) - restricted(&xi)).abs());
    }
    if gap > 1e-12 * f_big.sup_norm() {
        return Err(Error::Incompatible(format!(
            "incoherent family: restriction mismatch {gap:.3e} on the small stage"
        )));
    }
    let box_ = (6.0, 97);
    let r_small = slice_inversion(small, fs, f_big.sup_norm(), x_small, box_, opts)?;
    let f_big_eval = |xi: &[f64]| f_big.eval(xi);
    let r_big = slice_inversion(big, &f_big_eval, f_big.sup_norm(), &to_big(x_small), box_, opts)?;
    let agreement = ((r_small.value[0] - r_big.value[0]).powi(2) + (r_small.value[1] - r_big.value[1]).powi(2)).sqrt()
        / f_big.sup_norm();
    Ok(LimitInversionReport {
        coherence_gap: gap,
        constants: vec![small.plancherel_constant(), big.plancherel_constant()],
        stages: vec![r_small, r_big],
        agreement,
    })
}

/// Stages of the `A_1 ⊂ A_3` chain inside the `A_3` group.
pub fn a1_a3_stages() -> Result<(Stage, Stage)> {
    let g = Arc::new(HarnessId::A1InA3.group()?);
    let all: Vec<usize> = (1..=g.m()).collect();
    Ok((Stage::new(g.clone(), vec![1])?, Stage::new(g, all)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn heis_theta_oracle(t: f64) -> f64 {
        (-std::f64::consts::PI * t * t).exp() / (2.0 * t.abs())
    }

    #[test]
    fn heisenberg_character_of_standard_gaussian() {
        let st = Stage::heisenberg(1).unwrap();
        let fhat = euclidean_ft(&GaussianTestFunction::standard(3)).unwrap();
        for t in [0.3, -1.0, 2.5] {
            let th = orbit_integral(&st, &fhat, &OrbitDescriptor::new(&st, &[t]).unwrap()).unwrap();
            assert!((th.re - heis_theta_oracle(t)).abs() < 1e-12 && th.im.abs() < 1e-12);
        }
        assert!(OrbitDescriptor::new(&st, &[0.0]).is_err());
    }

    #[test]
    fn slice_and_closed_characters_agree() {
        let st = Stage::heisenberg(1).unwrap();
        let f = GaussianTestFunction::new(
            DMatrix::from_row_slice(3, 3, &[1.2, 0.1, 0.0, 0.1, 0.9, 0.2, 0.0, 0.2, 1.5]),
            DVector::from_vec(vec![0.1, -0.2, 0.3]),
            1.0,
        )
        .unwrap();
        let fhat = euclidean_ft(&f).unwrap();
        let ss = SliceSamples::new(&st, &|x| Ok(C::new(f.eval(x), 0.0)), 6.0, 121).unwrap();
        for t in [0.4, -0.9, 1.7] {
            let a = orbit_integral(&st, &fhat, &OrbitDescriptor::new(&st, &[t]).unwrap()).unwrap();
            let b = ss.theta(&[t]).unwrap();
            assert!((a - b).norm() < 1e-10, "{a} {b}");
        }
    }

    #[test]
    fn fft_matches_closed_form_in_three_dims() {
        let f = GaussianTestFunction::new(
            DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.2, 1.3, 0.1, 0.0, 0.1, 0.8]),
            DVector::from_vec(vec![0.2, 0.0, -0.3]),
            1.0,
        )
        .unwrap();
        let (n, l) = (48usize, 4.0);
        let h = 2.0 * l / n as f64;
        let mut samples = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let x = [-l + i as f64 * h, -l + j as f64 * h, -l + k as f64 * h];
                    samples.push(C::new(f.eval(&x), 0.0));
                }
            }
        }
        let ft = euclidean_ft_grid(&samples, 3, n, l).unwrap();
        let exact = euclidean_ft(&f).unwrap();
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let xs = DVector::from_vec(vec![ft.freqs[i], ft.freqs[j], ft.freqs[k]]);
                    err = err.max((ft.data[ft.index(&[i, j, k])] - exact.eval(&xs)).norm());
                }
            }
        }
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn translate_gives_phase() {
        let f = GaussianTestFunction::standard(2);
        let a = DVector::from_vec(vec![0.5, -0.25]);
        let g = f.pullback(&DMatrix::identity(2, 2), &(-&a)).unwrap();
        let (fh, gh) = (euclidean_ft(&f).unwrap(), euclidean_ft(&g).unwrap());
        let xs = DVector::from_vec(vec![0.3, 0.7]);
        let phase = C::from_polar(1.0, -std::f64::consts::TAU * xs.dot(&a));
        assert!((gh.eval(&xs) - phase * fh.eval(&xs)).norm() < 1e-12);
    }

    #[test]
    fn central_translate_and_conjugation() {
        let st = Stage::heisenberg(1).unwrap();
        let f = GaussianTestFunction::new(
            DMatrix::from_row_slice(3, 3, &[1.0, 0.3, 0.0, 0.3, 1.1, 0.0, 0.0, 0.0, 0.7]),
            DVector::from_vec(vec![0.2, 0.1, 0.0]),
            1.0,
        )
        .unwrap();
        let z = st.t_local()[0];
        let mut zeta = vec![0.0; 3];
        zeta[z] = 0.6;
        let t = 1.3;
        let orbit = OrbitDescriptor::new(&st, &[t]).unwrap();
        let th = |g: &GaussianTestFunction| orbit_integral(&st, &euclidean_ft(g).unwrap(), &orbit).unwrap();
        let shifted = right_translate(&st, &f, &zeta).unwrap();
        let want = th(&f) * C::from_polar(1.0, std::f64::consts::TAU * t * 0.6);
        assert!((th(&shifted) - want).norm() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let eta: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let conj = conjugate(&st, &f, &eta).unwrap();
            assert!((th(&conj) - th(&f)).norm() < 1e-12);
        }
        let sum = GaussianTestFunction::standard(3);
        let lin = th(&f) + th(&sum);
        let parts = th(&f.scaled(1.0)) + th(&sum);
        assert!((lin - parts).norm() < 1e-15);
    }

    #[test]
    fn heisenberg_inversion_at_identity_and_random_points() {
        let st = Stage::heisenberg(1).unwrap();
        let f = GaussianTestFunction::standard(3);
        let r = heisenberg_inversion(&st, &f, &[0.0; 3], InversionOptions::default()).unwrap();
        assert!(r.rel_residual < 1e-4, "{r:?}");
        assert!(r.continuity_gap < 1e-5, "{r:?}");
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..3 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = heisenberg_inversion(&st, &f, &x, InversionOptions::default()).unwrap();
            assert!(r.rel_residual < 1e-4, "{r:?}");
        }
    }

    #[test]
    fn inversion_is_linear_and_refines() {
        let st = Stage::heisenberg(1).unwrap();
        let f = GaussianTestFunction::standard(3);
        let x = [0.3, -0.2, 0.5];
        let a = heisenberg_inversion(&st, &f, &x, InversionOptions::default()).unwrap();
        let b = heisenberg_inversion(&st, &f.scaled(3.0), &x, InversionOptions::default()).unwrap();
        assert!((b.value[0] - 3.0 * a.value[0]).abs() < 1e-12);
        let mut last = f64::INFINITY;
        for res in [8, 16, 32, 64] {
            let o = InversionOptions {
                resolution: res,
                // Fixed box: every cell is an outer cell at low resolution.
                tolerance: 10.0,
                lambda_start: 3.0,
                max_widenings: 0,
            };
            let r = heisenberg_inversion(&st, &f, &x, o).unwrap();
            assert!(r.rel_residual <= last * 1.01 + 1e-14, "{res}: {r:?}");
            last = r.rel_residual;
        }
    }

    #[test]
    fn constants_of_the_chain() {
        let (s1, s2) = a1_a3_stages().unwrap();
        assert_eq!(s1.plancherel_constant(), 1.0);
        assert_eq!(s2.plancherel_constant(), 8.0);
    }

    #[test]
    fn limit_inversion_on_the_chain() {
        let (s1, s2) = a1_a3_stages().unwrap();
        let f = GaussianTestFunction::standard(s2.dim());
        let opts = InversionOptions {
            resolution: 48,
            ..InversionOptions::default()
        };
        let r = limit_inversion_check(&s1, &s2, &f, None, &[0.0], opts).unwrap();
        assert!(r.agreement < 1e-3, "{r:?}");
        assert!(r.stages.iter().all(|s| s.rel_residual < 1e-3), "{r:?}");
        let bad = |xi: &[f64]| (-std::f64::consts::PI * xi[0] * xi[0]).exp() * 1.01;
        assert!(matches!(
            limit_inversion_check(&s1, &s2, &f, Some(&bad), &[0.0], opts),
            Err(Error::Incompatible(_))
        ));
    }
}
