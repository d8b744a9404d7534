//! Schrödinger models for the layers of a harness group and their stepwise
//! tensor products.
//!
//! Each nonabelian layer `l_q` is split as `a_q ⊕ b_q ⊕ z_q`; the layer acts
//! on functions of the `b_q` coordinates by
//! `π(exp(x·a + y·b + t z))φ(s) = e^{2πi[λt + xᵀM(s - y/2)]} φ(s - y)`
//! with `M = diag(λ κ_i)` and `[a_i, b_i] = κ_i z`. Earlier layers act on the
//! same space through the metaplectic-type operator that implements their
//! adjoint action; abelian layers contribute a character.

pub mod gaussian;
pub mod grid;
pub mod group;
pub mod ops;
pub mod quadrature;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use num_traits::{One, Zero};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::cascade::sigma_r;
use crate::error::{Error, Result};
use crate::plancherel::{b_lambda_matrix, pfaffian};
use crate::rational::{to_f64, Q};
use crate::rootsys::Series;

pub use gaussian::GaussianState;
pub use grid::GridState;
pub use group::HarnessGroup;
pub use ops::PhaseAffine;
pub use quadrature::{QuadOptions, QuadResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HarnessId {
    /// Top layer of `A_{d+1}`, a Heisenberg group of dimension `2d + 1`.
    Heis(usize),
    A3,
    C2,
    B2,
    /// `A_1 ⊂ A_3`: stage one is the first layer of `A_3`.
    A1InA3,
}

impl HarnessId {
    pub const ALL_FIXED: [HarnessId; 4] = [HarnessId::A3, HarnessId::C2, HarnessId::B2, HarnessId::A1InA3];

    pub fn group(self) -> Result<HarnessGroup> {
        match self {
            HarnessId::Heis(d) if d >= 1 => HarnessGroup::new(Series::A, d + 1),
            HarnessId::Heis(_) => Err(Error::UnknownHarness("HEIS0".into())),
            HarnessId::A3 | HarnessId::A1InA3 => HarnessGroup::new(Series::A, 3),
            HarnessId::C2 => HarnessGroup::new(Series::C, 2),
            HarnessId::B2 => HarnessGroup::new(Series::B, 2),
        }
    }

    /// Layers carried by the full representation of this harness.
    pub fn active_layers(self, group: &HarnessGroup) -> Vec<usize> {
        match self {
            HarnessId::Heis(_) => vec![group.m()],
            _ => (1..=group.m()).collect(),
        }
    }
}

impl FromStr for HarnessId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(d) = t.strip_prefix("HEIS") {
            return d
                .parse::<usize>()
                .ok()
                .filter(|&d| d >= 1)
                .map(HarnessId::Heis)
                .ok_or_else(|| Error::UnknownHarness(s.to_string()));
        }
        match t {
            "A3" => Ok(HarnessId::A3),
            "C2" => Ok(HarnessId::C2),
            "B2" => Ok(HarnessId::B2),
            "A1<A3" | "A1inA3" | "A1-A3" | "A1⊂A3" => Ok(HarnessId::A1InA3),
            _ => Err(Error::UnknownHarness(s.to_string())),
        }
    }
}

impl fmt::Display for HarnessId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessId::Heis(d) => write!(f, "HEIS{d}"),
            HarnessId::A3 => write!(f, "A3"),
            HarnessId::C2 => write!(f, "C2"),
            HarnessId::B2 => write!(f, "B2"),
            HarnessId::A1InA3 => write!(f, "A1<A3"),
        }
    }
}

/// Split of one layer's `v` part into `a ⊕ b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polarization {
    pub r: usize,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub kappa: Vec<Q>,
    pub m: Vec<f64>,
    pub lambda: f64,
    pub offset: usize,
}

impl Polarization {
    pub fn d(&self) -> usize {
        self.a.len()
    }
}

#[derive(Clone, Debug)]
pub struct RepInstance {
    pub group: Arc<HarnessGroup>,
    pub active: Vec<usize>,
    /// `λ_r` indexed by layer, zero off the active set.
    pub lambda: Vec<Q>,
    pub pols: Vec<Option<Polarization>>,
    pub state_dim: usize,
    pub pf_product: Q,
}

fn polarize(group: &HarnessGroup, r: usize, lambda: &Q, offset: usize) -> Result<Option<Polarization>> {
    let layer = group.layer(r);
    if layer.d == 0 {
        return Ok(None);
    }
    if lambda.is_zero() {
        return Err(Error::Singular(format!("lambda_{r} = 0 on a nonabelian layer")));
    }
    let alg = &group.alg;
    let mut pairs = Vec::new();
    for &i in &layer.v_indices {
        let alpha = &alg.roots()[i];
        let partner = sigma_r(&group.decomp, alpha, r)?;
        if alpha > &partner {
            pairs.push((alpha.clone(), partner));
        }
    }
    pairs.sort_by(|x, y| y.0.cmp(&x.0));
    let mut pol = Polarization {
        r,
        a: Vec::new(),
        b: Vec::new(),
        kappa: Vec::new(),
        m: Vec::new(),
        lambda: to_f64(lambda),
        offset,
    };
    for (a, b) in pairs {
        let ia = alg.index_of(&a).expect("layer root");
        let ib = alg.index_of(&b).expect("layer root");
        let k = alg.bracket(&alg.unit(ia), &alg.unit(ib))?[layer.z_index].clone();
        if k.is_zero() {
            return Err(Error::DegeneratePairing(r));
        }
        pol.m.push(to_f64(&(lambda * &k)));
        pol.kappa.push(k);
        pol.a.push(ia);
        pol.b.push(ib);
    }
    Ok(Some(pol))
}

impl RepInstance {
    /// `gamma` lists `λ_r` for the active layers in increasing order.
    pub fn new(group: Arc<HarnessGroup>, active: Vec<usize>, gamma: &[Q]) -> Result<Self> {
        if gamma.len() != active.len() {
            return Err(Error::DimensionMismatch {
                expected: active.len(),
                found: gamma.len(),
            });
        }
        let m = group.m();
        let mut lambda = vec![Q::zero(); m];
        for (&r, g) in active.iter().zip(gamma) {
            if r == 0 || r > m {
                return Err(Error::Config(format!("layer {r} out of range")));
            }
            lambda[r - 1] = g.clone();
        }
        let mut pols = vec![None; m];
        let mut offset = 0;
        for &r in &active {
            let p = polarize(&group, r, &lambda[r - 1], offset)?;
            if let Some(p) = &p {
                offset += p.d();
            }
            pols[r - 1] = p;
        }
        // Earlier active layers must preserve each later `a_q`.
        let alg = &group.alg;
        for &q in &active {
            let Some(pq) = &pols[q - 1] else { continue };
            for &r in active.iter().filter(|&&r| r < q) {
                for i in group.layer(r).indices() {
                    for &j in &pq.a {
                        let c = alg.bracket(&alg.unit(i), &alg.unit(j))?;
                        if c.iter().enumerate().any(|(k, v)| !v.is_zero() && !pq.a.contains(&k)) {
                            return Err(Error::PolarizationNotNormalized { earlier: r, layer: q });
                        }
                    }
                }
            }
        }
        let mut pf_product = Q::one();
        for &r in &active {
            let layer = group.layer(r);
            if layer.d > 0 {
                pf_product *= pfaffian(&b_lambda_matrix(alg, layer, &lambda[r - 1])?)?;
            }
        }
        Ok(RepInstance {
            group,
            active,
            lambda,
            pols,
            state_dim: offset,
            pf_product,
        })
    }

    pub fn lambda_f(&self, r: usize) -> f64 {
        to_f64(&self.lambda[r - 1])
    }

    /// Coordinates of the section `exp'(v)` of `N/S`: the `v` coordinates of
    /// the active nonabelian layers.
    pub fn section_coords(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for &r in &self.active {
            if self.pols[r - 1].is_some() {
                out.extend(&self.group.layer(r).v_indices);
            }
        }
        out.sort_unstable();
        out
    }

    /// Coordinates that belong to the active layers.
    pub fn active_coords(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .active
            .iter()
            .flat_map(|&r| self.group.layer(r).indices())
            .collect();
        out.sort_unstable();
        out
    }

    fn layer_op(&self, p: &Polarization, xi: &[f64]) -> PhaseAffine {
        let d = p.d();
        let z = self.group.layer(p.r).z_index;
        let x: Vec<f64> = p.a.iter().map(|&i| xi[i]).collect();
        let y: Vec<f64> = p.b.iter().map(|&i| xi[i]).collect();
        let mut op = PhaseAffine::identity(d);
        op.k_vec = DVector::from_iterator(d, (0..d).map(|i| p.m[i] * x[i]));
        op.g_vec = -DVector::from_vec(y.clone());
        op.theta = p.lambda * xi[z] - 0.5 * (0..d).map(|i| p.m[i] * x[i] * y[i]).sum::<f64>();
        op
    }

    /// Operator for an element of an earlier layer `r` acting on layer `q`.
    fn extension_op(&self, p: &Polarization, r: usize, xi: &[f64]) -> Result<PhaseAffine> {
        let d = p.d();
        let mut g = vec![0.0; self.group.dim()];
        for i in self.group.layer(r).indices() {
            g[i] = xi[i];
        }
        if g.iter().all(|v| *v == 0.0) {
            return Ok(PhaseAffine::identity(d));
        }
        let ad = self.group.ad(&g);
        let z = self.group.layer(p.r).z_index;
        let tol = 1e-9 * (1.0 + ad.amax());
        let (mut pm, mut qm, mut rm) = (DMatrix::zeros(d, d), DMatrix::zeros(d, d), DMatrix::zeros(d, d));
        for j in 0..d {
            let col_a = ad.column(p.a[j]);
            let col_b = ad.column(p.b[j]);
            for i in 0..d {
                pm[(i, j)] = col_a[p.a[i]];
                rm[(i, j)] = col_b[p.a[i]];
                qm[(i, j)] = col_b[p.b[i]];
            }
            let stray_a = (0..ad.nrows())
                .filter(|k| !p.a.contains(k))
                .map(|k| col_a[k].abs())
                .fold(0.0, f64::max);
            let stray_b = (0..ad.nrows())
                .filter(|k| !p.a.contains(k) && !p.b.contains(k))
                .map(|k| col_b[k].abs())
                .fold(0.0, f64::max);
            if stray_a > tol || stray_b > tol || (ad[(z, z)] - 1.0).abs() > tol {
                return Err(Error::PolarizationNotNormalized { earlier: r, layer: p.r });
            }
        }
        let _ = pm;
        let qinv = qm
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("adjoint block on b".into()))?;
        let mdiag = DMatrix::from_diagonal(&DVector::from_vec(p.m.clone()));
        let k = &mdiag * &rm * &qinv;
        if (&k - k.transpose()).amax() > 1e-9 * (1.0 + k.amax()) {
            return Err(Error::Invariant("chirp of the extension is not symmetric".into()));
        }
        let k = (&k + k.transpose()) * 0.5;
        Ok(PhaseAffine::chirp(k).compose(&PhaseAffine::linear(qinv)))
    }

    /// `π(g)` for `g` in layer coordinates.
    pub fn op(&self, xi: &[f64]) -> Result<PhaseAffine> {
        if xi.len() != self.group.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.group.dim(),
                found: xi.len(),
            });
        }
        let dd = self.state_dim;
        let mut total = PhaseAffine::identity(dd);
        let mut char_theta = 0.0;
        for &q in &self.active {
            match &self.pols[q - 1] {
                None => {
                    let z = self.group.layer(q).z_index;
                    char_theta += self.lambda_f(q) * xi[z];
                }
                Some(p) => {
                    let mut block = PhaseAffine::identity(p.d());
                    for &r in self.active.iter().filter(|&&r| r < q) {
                        block = block.compose(&self.extension_op(p, r, xi)?);
                    }
                    block = block.compose(&self.layer_op(p, xi));
                    total = total.compose(&block.embed(p.offset, dd));
                }
            }
        }
        total.theta += char_theta;
        Ok(total)
    }

    /// `⟨u, π(g) v⟩` for Gaussian states.
    pub fn coefficient(&self, u: &GaussianState, v: &GaussianState, xi: &[f64]) -> Result<C> {
        Ok(self.log_coefficient(u, v, xi)?.exp())
    }

    pub fn log_coefficient(&self, u: &GaussianState, v: &GaussianState, xi: &[f64]) -> Result<C> {
        gaussian::log_inner(u, &v.apply(&self.op(xi)?))
    }

    /// `‖u‖²‖v‖² / |P(γ)|`.
    pub fn predicted_norm_sq(&self, u_norm_sq: f64, v_norm_sq: f64) -> f64 {
        u_norm_sq * v_norm_sq / to_f64(&self.pf_product).abs()
    }

    pub fn section_element(&self, w: &[f64]) -> Vec<f64> {
        let mut xi = vec![0.0; self.group.dim()];
        for (c, &i) in w.iter().zip(&self.section_coords()) {
            xi[i] = *c;
        }
        xi
    }
}

pub fn build_layer_rep(group: Arc<HarnessGroup>, r: usize, lambda_r: Q) -> Result<RepInstance> {
    if group.layer(r).d == 0 {
        return Err(Error::Config(format!("layer {r} is abelian")));
    }
    RepInstance::new(group, vec![r], &[lambda_r])
}

pub fn stepwise_rep(harness: HarnessId, gamma: &[Q]) -> Result<RepInstance> {
    let g = Arc::new(harness.group()?);
    let active = harness.active_layers(&g);
    RepInstance::new(g, active, gamma)
}

/// Unit product state: a standard Gaussian on every axis.
pub fn unit_state(rep: &RepInstance) -> GaussianState {
    GaussianState::standard(rep.state_dim)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub method: String,
    pub measured: f64,
    pub predicted: f64,
    pub rel_err: f64,
    pub tail_bound: f64,
}

/// `log f` on the section is a quadratic polynomial when the section acts
/// without point maps; recover it from finitely many values.
fn quadratic_fit(f: &dyn Fn(&[f64]) -> Result<C>, n: usize) -> Result<(C, Vec<C>, Vec<Vec<C>>)> {
    let e = |i: usize, s: f64| {
        let mut w = vec![0.0; n];
        w[i] = s;
        w
    };
    let c0 = f(&vec![0.0; n])?;
    let mut c1 = vec![C::zero(); n];
    let mut c2 = vec![vec![C::zero(); n]; n];
    let mut plus = vec![C::zero(); n];
    for i in 0..n {
        let p = f(&e(i, 1.0))?;
        let m = f(&e(i, -1.0))?;
        plus[i] = p;
        c1[i] = (p - m) * 0.5;
        c2[i][i] = (p + m) * 0.5 - c0;
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut w = vec![0.0; n];
            w[i] = 1.0;
            w[j] = 1.0;
            let v = f(&w)? - plus[i] - plus[j] + c0;
            c2[i][j] = v * 0.5;
            c2[j][i] = v * 0.5;
        }
    }
    Ok((c0, c1, c2))
}

fn eval_quadratic(c0: C, c1: &[C], c2: &[Vec<C>], w: &[f64]) -> C {
    let n = w.len();
    let mut v = c0;
    for i in 0..n {
        v += c1[i] * w[i];
        for j in 0..n {
            v += c2[i][j] * w[i] * w[j];
        }
    }
    v
}

/// `∫_{N/S} |f|²` in closed form from the Gaussian structure of `log f`.
pub fn coefficient_norm_sq_closed(rep: &RepInstance, u: &GaussianState, v: &GaussianState) -> Result<NormReport> {
    let n = rep.section_coords().len();
    let logf = |w: &[f64]| rep.log_coefficient(u, v, &rep.section_element(w));
    let (c0, c1, c2) = quadratic_fit(&logf, n)?;
    for w in [[0.37, -0.81, 0.5, 1.3, -0.2, 0.9], [-1.1, 0.25, -0.6, 0.05, 0.7, -0.4]] {
        let w = &w.iter().cycle().take(n).copied().collect::<Vec<_>>();
        let err = (eval_quadratic(c0, &c1, &c2, w) - logf(w)?).norm();
        if err > 1e-8 * (1.0 + c0.norm()) {
            return Err(Error::Incompatible(format!(
                "log-coefficient is not quadratic on the section (residual {err:.2e})"
            )));
        }
    }
    let p = DMatrix::from_fn(n, n, |i, j| -2.0 * c2[i][j].re);
    let beta = DVector::from_iterator(n, c1.iter().map(|c| 2.0 * c.re));
    let chol = p
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NonConvergent("|f|² is not integrable on the section".into()))?;
    let det: f64 = chol.l().diagonal().iter().map(|x| x * x).product();
    let x = chol.solve(&beta);
    let measured = (2.0 * c0.re + 0.25 * beta.dot(&x)).exp() * std::f64::consts::PI.powf(n as f64 / 2.0) / det.sqrt();
    let predicted = rep.predicted_norm_sq(u.norm_sq()?, v.norm_sq()?);
    Ok(NormReport {
        method: "closed".into(),
        measured,
        predicted,
        rel_err: (measured - predicted).abs() / predicted,
        tail_bound: 0.0,
    })
}

/// `∫_{N/S} |f|²` by adaptive trapezoid quadrature of closed-form values.
pub fn coefficient_norm_sq_quadrature(
    rep: &RepInstance,
    u: &GaussianState,
    v: &GaussianState,
    opts: QuadOptions,
) -> Result<NormReport> {
    let n = rep.section_coords().len();
    let log_f = |w: &[f64]| {
        rep.log_coefficient(u, v, &rep.section_element(w))
            .map(|l| 2.0 * l.re)
            .unwrap_or(f64::NAN)
    };
    let f = |w: &[f64]| log_f(w).exp();
    let r = quadrature::integrate_scaled(&f, &quadrature::axis_scales(&log_f, &vec![0.0; n]), opts)?;
    let predicted = rep.predicted_norm_sq(u.norm_sq()?, v.norm_sq()?);
    Ok(NormReport {
        method: "quadrature".into(),
        measured: r.value,
        predicted,
        rel_err: (r.value - predicted).abs() / predicted,
        tail_bound: r.tail_bound,
    })
}

/// One-axis Heisenberg coefficient from sampled states: shifts are taken in
/// whole grid steps so no interpolation enters. On the grid the coefficient
/// is periodic in `x` with period `1/(|m|h)`, so `x` runs over one period
/// with the periodic trapezoid rule.
fn grid_axis_norm_sq(u: &[C], v: &[C], h: f64, half_width: f64, m: f64) -> (f64, f64) {
    let n = u.len();
    let s = |k: usize| -half_width + k as f64 * h;
    let x_pts = 2 * n;
    let period = 1.0 / (m.abs() * h);
    let hx = period / x_pts as f64;
    let mut total = 0.0;
    let mut edge: f64 = 0.0;
    for j in -(n as i64 - 1)..=(n as i64 - 1) {
        let y = j as f64 * h;
        for ix in 0..x_pts {
            let x = -0.5 * period + ix as f64 * hx;
            let mut acc = C::zero();
            for k in 0..n {
                let src = k as i64 - j;
                if src < 0 || src >= n as i64 {
                    continue;
                }
                let ph = std::f64::consts::TAU * m * x * (s(k) - 0.5 * y);
                acc += u[k].conj() * C::from_polar(1.0, ph) * v[src as usize];
            }
            let val = (acc * h).norm_sqr();
            if j.unsigned_abs() as usize == n - 1 {
                edge = edge.max(val);
            }
            total += val;
        }
    }
    (total * h * hx, edge)
}

/// Grid path for single-layer Heisenberg harnesses with product states:
/// states are sampled, coefficients are discrete inner products and the
/// `N/S` integral is a trapezoid sum.
pub fn coefficient_norm_sq_grid(
    rep: &RepInstance,
    u: &GaussianState,
    v: &GaussianState,
    points: usize,
    half_width: f64,
) -> Result<NormReport> {
    if rep.active.len() != 1 {
        return Err(Error::Incompatible("grid path needs a single-layer harness".into()));
    }
    let p = rep.pols[rep.active[0] - 1]
        .as_ref()
        .ok_or_else(|| Error::Incompatible("grid path needs a nonabelian layer".into()))?;
    let offdiag = |g: &GaussianState| (0..g.dim()).any(|i| (0..g.dim()).any(|j| i != j && g.a[(i, j)].norm() > 0.0));
    if offdiag(u) || offdiag(v) {
        return Err(Error::Incompatible("grid path needs product states".into()));
    }
    let axis = |g: &GaussianState, i: usize| {
        let c = if i == 0 { g.c } else { C::zero() };
        GaussianState {
            a: DMatrix::from_element(1, 1, g.a[(i, i)]),
            b: DVector::from_element(1, g.b[i]),
            c,
        }
    };
    let h = 2.0 * half_width / (points - 1) as f64;
    let mut measured = 1.0;
    let mut tail: f64 = 0.0;
    for i in 0..p.d() {
        let (ui, vi) = (axis(u, i), axis(v, i));
        let su = GridState::from_fn(1, points, half_width, |s| ui.eval(s));
        let sv = GridState::from_fn(1, points, half_width, |s| vi.eval(s));
        let (val, edge) = grid_axis_norm_sq(&su.data, &sv.data, h, half_width, p.m[i]);
        measured *= val;
        tail = tail.max(edge);
    }
    let predicted = rep.predicted_norm_sq(u.norm_sq()?, v.norm_sq()?);
    Ok(NormReport {
        method: "grid".into(),
        measured,
        predicted,
        rel_err: (measured - predicted).abs() / predicted,
        tail_bound: tail,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub unitarity_err: f64,
    pub homomorphism_err: f64,
    pub samples: usize,
}

/// Unitarity and homomorphism on random elements in the closed-form path.
pub fn check_rep_closed(
    rep: &RepInstance,
    elems: &[(Vec<f64>, Vec<f64>)],
    v: &GaussianState,
) -> Result<InvariantReport> {
    let mut un: f64 = 0.0;
    let mut hom: f64 = 0.0;
    let n0 = v.norm_sq()?;
    for (g, h) in elems {
        let pg = rep.op(g)?;
        let ph = rep.op(h)?;
        let gh = rep.group.mul(g, h);
        let pgh = rep.op(&gh)?;
        hom = hom.max(pg.compose(&ph).distance(&pgh));
        un = un.max((v.apply(&pg).norm_sq()? - n0).abs());
    }
    Ok(InvariantReport {
        unitarity_err: un,
        homomorphism_err: hom,
        samples: elems.len(),
    })
}

/// The same checks with sampled states and interpolation at every step.
pub fn check_rep_grid(
    rep: &RepInstance,
    elems: &[(Vec<f64>, Vec<f64>)],
    v: &GaussianState,
    points: usize,
    half_width: f64,
) -> Result<InvariantReport> {
    let sv = GridState::from_fn(rep.state_dim, points, half_width, |s| v.eval(s));
    let n0 = sv.norm_sq();
    let mut un: f64 = 0.0;
    let mut hom: f64 = 0.0;
    for (g, h) in elems {
        let step = sv.apply(&rep.op(h)?).apply(&rep.op(g)?);
        let direct = sv.apply(&rep.op(&rep.group.mul(g, h))?);
        hom = hom.max(step.distance(&direct));
        un = un.max((sv.apply(&rep.op(g)?).norm_sq() - n0).abs());
    }
    Ok(InvariantReport {
        unitarity_err: un,
        homomorphism_err: hom,
        samples: elems.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictionReport {
    /// `max |f_{γ',u⊗x,v⊗y}(a) - ⟨x,y⟩ f_{γ,u,v}(a)|` over the small-group grid.
    pub pointwise_err: f64,
    /// Same comparison with the overlap `⟨x, π'(a) y⟩` in place of `⟨x,y⟩`.
    pub corrected_err: f64,
    pub factor_sq: f64,
    pub norm_ratio_measured: f64,
    pub norm_ratio_predicted: f64,
    pub samples: usize,
}

/// Compares coefficients of the big stage restricted to the small stage.
///
/// `small` and `big` must share the group; the small active layers must be
/// an initial segment of the big ones. States of the big stage are
/// `u ⊗ x` and `v ⊗ y` with `x, y` on the complementary factor.
pub fn restrict_and_renormalize(
    big: &RepInstance,
    small: &RepInstance,
    u: &GaussianState,
    v: &GaussianState,
    x: &GaussianState,
    y: &GaussianState,
    small_grid: &[Vec<f64>],
) -> Result<RestrictionReport> {
    if !Arc::ptr_eq(&big.group, &small.group) && big.group.dim() != small.group.dim() {
        return Err(Error::Incompatible("stages live on different groups".into()));
    }
    if big.active.len() < small.active.len() || big.active[..small.active.len()] != small.active[..] {
        return Err(Error::Incompatible("small stage is not an initial segment".into()));
    }
    for &r in &small.active {
        if big.lambda[r - 1] != small.lambda[r - 1] {
            return Err(Error::Incompatible(format!("gamma differs on layer {r}")));
        }
    }
    let ux = tensor(u, x);
    let vy = tensor(v, y);
    let xy = gaussian::inner(x, y)?;
    let mut pointwise: f64 = 0.0;
    let mut corrected: f64 = 0.0;
    let small_coords = small.active_coords();
    for a in small_grid {
        big.group
            .supported_in(a, &small_coords, 0.0)
            .map_err(|_| Error::Incompatible("grid point outside the small group".into()))?;
        let fb = big.coefficient(&ux, &vy, a)?;
        let fs = small.coefficient(u, v, a)?;
        pointwise = pointwise.max((fb - xy * fs).norm());
        // Overlap of the complementary factor under the extension.
        let full = big.op(a)?;
        let off = small.state_dim;
        let dd = big.state_dim - off;
        let mut tail = PhaseAffine::identity(dd);
        tail.g_mat = full.g_mat.view((off, off), (dd, dd)).into_owned();
        tail.g_vec = full.g_vec.rows(off, dd).into_owned();
        tail.k_mat = full.k_mat.view((off, off), (dd, dd)).into_owned();
        tail.k_vec = full.k_vec.rows(off, dd).into_owned();
        let overlap = gaussian::inner(x, &y.apply(&tail))?;
        corrected = corrected.max((fb - overlap * fs).norm());
    }
    let ratio_pred = (to_f64(&small.pf_product) / to_f64(&big.pf_product)).abs();
    let nb = coefficient_norm_sq_closed(big, &ux, &vy)?.measured;
    let ns = if small.section_coords().is_empty() {
        small.coefficient(u, v, &vec![0.0; small.group.dim()])?.norm_sqr()
    } else {
        coefficient_norm_sq_closed(small, u, v)?.measured
    };
    Ok(RestrictionReport {
        pointwise_err: pointwise,
        corrected_err: corrected,
        factor_sq: ratio_pred,
        norm_ratio_measured: nb / ns,
        norm_ratio_predicted: ratio_pred,
        samples: small_grid.len(),
    })
}

/// `u ⊗ w` for Gaussian states on disjoint variables.
pub fn tensor(u: &GaussianState, w: &GaussianState) -> GaussianState {
    let (p, q) = (u.dim(), w.dim());
    let mut a = DMatrix::zeros(p + q, p + q);
    a.view_mut((0, 0), (p, p)).copy_from(&u.a);
    a.view_mut((p, p), (q, q)).copy_from(&w.a);
    let mut b = DVector::zeros(p + q);
    b.rows_mut(0, p).copy_from(&u.b);
    b.rows_mut(p, q).copy_from(&w.b);
    GaussianState { a, b, c: u.c + w.c }
}

/// Samples along the central direction, one row per non-central point.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralSamples {
    pub t0: f64,
    pub h: f64,
    pub rows: Vec<Vec<C>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CenterTransform {
    pub gammas: Vec<f64>,
    pub rows: Vec<Vec<C>>,
    pub t0: f64,
    pub h: f64,
}

/// `f_γ(x) = ∫ f(x exp(tz)) e^{2πiγt} dt` on the FFT frequency grid.
pub fn partial_center_transform(samples: &CentralSamples, gamma_max: f64) -> Result<CenterTransform> {
    let n = samples.rows.first().map_or(0, Vec::len);
    let nyquist = 0.5 / samples.h;
    if gamma_max > nyquist {
        return Err(Error::Config(format!(
            "requested |gamma| <= {gamma_max} exceeds the grid limit {nyquist}"
        )));
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(n);
    let gammas: Vec<f64> = (0..n)
        .map(|k| {
            let k = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            k / (n as f64 * samples.h)
        })
        .collect();
    let rows = samples
        .rows
        .iter()
        .map(|row| {
            let mut buf = row.clone();
            fft.process(&mut buf);
            buf.iter()
                .zip(&gammas)
                .map(|(v, g)| v * samples.h * C::from_polar(1.0, std::f64::consts::TAU * g * samples.t0))
                .collect()
        })
        .collect();
    Ok(CenterTransform {
        gammas,
        rows,
        t0: samples.t0,
        h: samples.h,
    })
}

pub fn inverse_center_transform(t: &CenterTransform) -> CentralSamples {
    let n = t.gammas.len();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let rows = t
        .rows
        .iter()
        .map(|row| {
            let mut buf: Vec<C> = row
                .iter()
                .zip(&t.gammas)
                .map(|(v, g)| v * C::from_polar(1.0, -std::f64::consts::TAU * g * t.t0))
                .collect();
            fft.process(&mut buf);
            buf.iter().map(|v| v / (n as f64 * t.h)).collect()
        })
        .collect();
    CentralSamples { t0: t.t0, h: t.h, rows }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub boxes: Vec<f64>,
    /// `sup[k][b]` is the weighted sup over box `b` with weight `(1+|x|²)^k`.
    pub sup: Vec<Vec<f64>>,
    pub l1: Vec<f64>,
    pub sup_stable: bool,
    pub l1_cauchy: f64,
    pub decays: bool,
}

/// Weighted sup norms and truncated `L¹` integrals over nested boxes at a
/// fixed spacing.
pub fn schwartz_decay_report(
    field: &dyn Fn(&[f64]) -> f64,
    dim: usize,
    boxes: &[f64],
    k_max: usize,
    h: f64,
    l1_tol: f64,
) -> DecayReport {
    let mut sup = vec![Vec::new(); k_max + 1];
    let mut l1 = Vec::new();
    for &l in boxes {
        let n = (l / h).round() as i64;
        let side = (2 * n + 1) as usize;
        let total = side.pow(dim as u32);
        let mut s = vec![0.0f64; k_max + 1];
        let mut acc = 0.0;
        let mut x = vec![0.0; dim];
        for flat in 0..total {
            let mut k = flat;
            let mut w = 1.0;
            for d in 0..dim {
                let i = (k % side) as i64;
                k /= side;
                x[d] = (i - n) as f64 * h;
                if i == 0 || i == 2 * n {
                    w *= 0.5;
                }
            }
            let v = field(&x).abs();
            let r2: f64 = x.iter().map(|t| t * t).sum();
            for (kk, sk) in s.iter_mut().enumerate() {
                *sk = sk.max((1.0 + r2).powi(kk as i32) * v);
            }
            acc += w * v;
        }
        for kk in 0..=k_max {
            sup[kk].push(s[kk]);
        }
        l1.push(acc * h.powi(dim as i32));
    }
    let sup_stable = sup
        .iter()
        .all(|row| row.windows(2).last().is_none_or(|w| w[1] <= w[0] * (1.0 + 1e-9)));
    let l1_cauchy = match l1.len() {
        0 | 1 => f64::INFINITY,
        n => (l1[n - 1] - l1[n - 2]).abs(),
    };
    DecayReport {
        boxes: boxes.to_vec(),
        sup,
        l1,
        sup_stable,
        l1_cauchy,
        decays: sup_stable && l1_cauchy <= l1_tol,
    }
}
