//! Split matrix models of the nilradical, graded by positive roots.
//!
//! Type A lives in `gl(l+1)`. Types B, C and D use the antidiagonal form on
//! `2l(+1)` coordinates so that every positive root vector is strictly upper
//! triangular. Position `p < l` carries weight `e_p`, its mirror `N-1-p`
//! carries `-e_p`, and the B middle position has weight zero.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cascade::CascadeDecomposition;
use crate::error::{Error, Result};
use crate::rational::{q, QMatrix, Q};
use crate::rootsys::{RankParams, Root, RootSystem, Series};

/// Coordinates in the root-vector basis.
pub type Vector = Vec<Q>;

#[derive(Clone, Debug)]
pub struct NilpotentAlgebra {
    params: RankParams,
    size: usize,
    roots: Vec<Root>,
    index: HashMap<Root, usize>,
    basis: Vec<QMatrix>,
    cartan: Vec<QMatrix>,
    /// `table[i][j] = Some((k, c))` means `[x_i, x_j] = c x_k`.
    table: Vec<Vec<Option<(usize, Q)>>>,
    corrupted: bool,
}

fn weight(p: &RankParams, pos: usize) -> Root {
    let l = p.rank();
    let dim = p.ambient_dim();
    match p.series() {
        Series::A => Root::basis(dim, pos, 1),
        _ => {
            let n = size_of(p);
            if pos < l {
                Root::basis(dim, pos, 1)
            } else if n % 2 == 1 && pos == l {
                Root::zero(dim)
            } else {
                Root::basis(dim, n - 1 - pos, -1)
            }
        }
    }
}

fn size_of(p: &RankParams) -> usize {
    match p.series() {
        Series::A => p.rank() + 1,
        Series::B => 2 * p.rank() + 1,
        Series::C | Series::D => 2 * p.rank(),
    }
}

/// Sign of the symplectic form at `(p, N-1-p)`.
fn sp_sign(l: usize, p: usize) -> i64 {
    if p < l {
        1
    } else {
        -1
    }
}

fn form(p: &RankParams) -> Option<QMatrix> {
    let n = size_of(p);
    let l = p.rank();
    match p.series() {
        Series::A => None,
        Series::C => {
            let mut j = QMatrix::zeros(n, n);
            for i in 0..n {
                j.set(i, n - 1 - i, q(sp_sign(l, i)));
            }
            Some(j)
        }
        _ => {
            let mut j = QMatrix::zeros(n, n);
            for i in 0..n {
                j.set(i, n - 1 - i, q(1));
            }
            Some(j)
        }
    }
}

fn root_vector(p: &RankParams, alpha: &Root) -> Result<QMatrix> {
    let n = size_of(p);
    let l = p.rank();
    let mut hit = None;
    for a in 0..n {
        for b in a + 1..n {
            if weight(p, a).try_sub(&weight(p, b))? == *alpha {
                hit = Some((a, b));
                break;
            }
        }
        if hit.is_some() {
            break;
        }
    }
    let (a, b) = hit.ok_or_else(|| Error::NotInAlgebra(alpha.to_string()))?;
    let bar = |x: usize| n - 1 - x;
    let mut m = QMatrix::unit(n, a, b, q(1));
    match p.series() {
        Series::A => {}
        Series::C => {
            if bar(b) != a {
                let c = -q(sp_sign(l, bar(a)) * sp_sign(l, bar(b)));
                m.set(bar(b), bar(a), c);
            }
        }
        _ => m.set(bar(b), bar(a), q(-1)),
    }
    Ok(m)
}

impl NilpotentAlgebra {
    pub fn realize(system: &RootSystem) -> Result<Self> {
        let p = system
            .params()
            .ok_or_else(|| Error::UnsupportedSeries("raw root data has no matrix model".into()))?;
        let n = size_of(&p);
        let roots = system.positives().to_vec();
        let basis = roots.iter().map(|a| root_vector(&p, a)).collect::<Result<Vec<_>>>()?;
        let cartan: Vec<QMatrix> = (0..p.ambient_dim())
            .map(|i| {
                let mut h = QMatrix::unit(n, i, i, q(1));
                if p.series() != Series::A {
                    h.set(n - 1 - i, n - 1 - i, q(-1));
                }
                h
            })
            .collect();
        let index = roots.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let mut alg = NilpotentAlgebra {
            params: p,
            size: n,
            roots,
            index,
            basis,
            cartan,
            table: Vec::new(),
            corrupted: false,
        };
        alg.check_matrices()?;
        alg.table = alg.derive_table(system)?;
        Ok(alg)
    }

    pub fn realize_split_nilradical(series: Series, params: RankParams) -> Result<Self> {
        Self::realize(&crate::rootsys::build_root_system(series, params)?)
    }

    fn check_matrices(&self) -> Result<()> {
        let j = form(&self.params);
        for (alpha, x) in self.roots.iter().zip(&self.basis) {
            for (i, h) in self.cartan.iter().enumerate() {
                let lhs = h.commutator(x)?;
                if lhs != x.scale(&alpha.coords()[i]) {
                    return Err(Error::Invariant(format!("[h_{i}, x_{alpha}] has the wrong weight")));
                }
            }
            for (a, b, v) in x.entries() {
                if b <= a && !v.is_zero() {
                    return Err(Error::Invariant(format!("x_{alpha} is not strictly upper triangular")));
                }
            }
            if let Some(j) = &j {
                let lhs = &x.transpose().try_mul(j)? + &j.try_mul(x)?;
                if !lhs.is_zero() {
                    return Err(Error::Invariant(format!("x_{alpha} does not preserve the form")));
                }
            }
        }
        Ok(())
    }

    fn derive_table(&self, system: &RootSystem) -> Result<Vec<Vec<Option<(usize, Q)>>>> {
        let d = self.dim();
        let mut t = vec![vec![None; d]; d];
        for i in 0..d {
            for j in 0..d {
                let c = self.basis[i].commutator(&self.basis[j])?;
                let sum = self.roots[i].try_add(&self.roots[j])?;
                match self.index.get(&sum) {
                    Some(&k) => {
                        let x = &self.basis[k];
                        let (a, b, xv) = x
                            .entries()
                            .find(|(_, _, v)| !v.is_zero())
                            .expect("root vectors are nonzero");
                        let coef = c.get(a, b) / xv;
                        if c != x.scale(&coef) {
                            return Err(Error::Invariant(format!(
                                "[x_{}, x_{}] is not a multiple of x_{sum}",
                                self.roots[i], self.roots[j]
                            )));
                        }
                        if !coef.is_zero() {
                            t[i][j] = Some((k, coef));
                        }
                    }
                    None => {
                        if !c.is_zero() {
                            return Err(Error::Invariant(format!(
                                "[x_{}, x_{}] is nonzero but {sum} is not a positive root",
                                self.roots[i], self.roots[j]
                            )));
                        }
                        debug_assert!(!system.is_positive(&sum));
                    }
                }
            }
        }
        Ok(t)
    }

    pub fn params(&self) -> RankParams {
        self.params
    }

    pub fn dim(&self) -> usize {
        self.roots.len()
    }

    pub fn matrix_size(&self) -> usize {
        self.size
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn index_of(&self, alpha: &Root) -> Option<usize> {
        self.index.get(alpha).copied()
    }

    pub fn basis_matrix(&self, i: usize) -> &QMatrix {
        &self.basis[i]
    }

    pub fn cartan(&self) -> &[QMatrix] {
        &self.cartan
    }

    pub fn is_corrupted(&self) -> bool {
        self.corrupted
    }

    pub fn structure_constant(&self, i: usize, j: usize) -> Option<&(usize, Q)> {
        self.table[i][j].as_ref()
    }

    pub fn unit(&self, i: usize) -> Vector {
        let mut v = vec![Q::zero(); self.dim()];
        v[i] = Q::one();
        v
    }

    /// Bracket of coordinate vectors through the structure-constant table.
    pub fn bracket(&self, x: &[Q], y: &[Q]) -> Result<Vector> {
        let d = self.dim();
        if x.len() != d || y.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if x.len() != d { x.len() } else { y.len() },
            });
        }
        let mut out = vec![Q::zero(); d];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                if let Some((k, c)) = &self.table[i][j] {
                    out[*k] += xi * yj * c;
                }
            }
        }
        Ok(out)
    }

    pub fn to_matrix(&self, x: &[Q]) -> QMatrix {
        let mut m = QMatrix::zeros(self.size, self.size);
        for (c, b) in x.iter().zip(&self.basis) {
            if !c.is_zero() {
                m = &m + &b.scale(c);
            }
        }
        m
    }

    /// Reads off root-vector coordinates from a matrix in the span.
    pub fn from_matrix(&self, m: &QMatrix) -> Result<Vector> {
        let mut v = vec![Q::zero(); self.dim()];
        for (i, b) in self.basis.iter().enumerate() {
            let (a, c, bv) = b.entries().find(|(_, _, x)| !x.is_zero()).unwrap();
            v[i] = m.get(a, c) / bv;
        }
        if self.to_matrix(&v) != *m {
            return Err(Error::NotInAlgebra("matrix outside the nilradical".into()));
        }
        Ok(v)
    }

    /// Negative-control fixture: plants a nonzero bracket between a root
    /// vector of an earlier layer and the center of a later one.
    pub fn corrupt_bridge(&mut self, decomp: &CascadeDecomposition) -> Option<(Root, Root)> {
        if decomp.m() < 2 {
            return None;
        }
        let z = self.index_of(decomp.beta_r(2))?;
        let a = self.index_of(decomp.beta_r(1))?;
        self.table[a][z] = Some((z, Q::one()));
        self.table[z][a] = Some((z, -Q::one()));
        self.corrupted = true;
        Some((decomp.beta_r(1).clone(), decomp.beta_r(2).clone()))
    }

    pub fn to_json(&self) -> AlgebraJson {
        AlgebraJson {
            series: self.params.series().to_string(),
            params: self.params,
            basis: self
                .roots
                .iter()
                .zip(&self.basis)
                .map(|(r, m)| BasisJson {
                    root: r.to_strings(),
                    matrix: m.to_strings(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisJson {
    pub root: Vec<String>,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub series: String,
    pub params: RankParams,
    pub basis: Vec<BasisJson>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub r: usize,
    pub beta: Root,
    pub z_index: usize,
    pub v_indices: Vec<usize>,
    pub d: usize,
}

impl Layer {
    pub fn indices(&self) -> Vec<usize> {
        let mut v = vec![self.z_index];
        v.extend(&self.v_indices);
        v
    }

    pub fn dim(&self) -> usize {
        1 + self.v_indices.len()
    }
}

fn span_contains(allowed: &[usize], v: &[Q]) -> bool {
    v.iter().enumerate().all(|(i, c)| c.is_zero() || allowed.contains(&i))
}

pub fn layer_subalgebras(alg: &NilpotentAlgebra, decomp: &CascadeDecomposition) -> Result<Vec<Layer>> {
    let mut out = Vec::new();
    for r in 1..=decomp.m() {
        let beta = decomp.beta_r(r).clone();
        let z_index = alg
            .index_of(&beta)
            .ok_or_else(|| Error::NotInAlgebra(beta.to_string()))?;
        let v_indices = decomp
            .layer(r)
            .iter()
            .map(|a| alg.index_of(a).ok_or_else(|| Error::NotInAlgebra(a.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let layer = Layer {
            r,
            beta,
            z_index,
            d: v_indices.len() / 2,
            v_indices,
        };
        for &i in &layer.indices() {
            for &j in &layer.indices() {
                let c = alg.bracket(&alg.unit(i), &alg.unit(j))?;
                let ok = if i == z_index || j == z_index {
                    c.iter().all(Zero::is_zero)
                } else {
                    span_contains(&[z_index], &c)
                };
                if !ok {
                    return Err(Error::Invariant(format!("layer {r} is not two-step with center z_{r}")));
                }
            }
        }
        out.push(layer);
    }
    let total: usize = out.iter().map(Layer::dim).sum();
    if total != alg.dim() {
        return Err(Error::Invariant(format!(
            "layers span {total} of {} dimensions",
            alg.dim()
        )));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub r: usize,
    pub s: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
    pub all_pass: bool,
}

/// Checks, for r < s: `[l_r, z_s] = 0`, `[l_r, l_s] ⊆ v_s`, and that every
/// tail `l_{r+1} + ... + l_m` is an ideal.
pub fn verify_setup_axioms(alg: &NilpotentAlgebra, layers: &[Layer]) -> Result<AxiomReport> {
    let mut checks = Vec::new();
    let br = |i: usize, j: usize| alg.bracket(&alg.unit(i), &alg.unit(j));
    for (ri, lr) in layers.iter().enumerate() {
        for ls in &layers[ri + 1..] {
            let mut centre = true;
            let mut into_v = true;
            for &i in &lr.indices() {
                centre &= br(i, ls.z_index)?.iter().all(Zero::is_zero);
                for &j in &ls.indices() {
                    into_v &= span_contains(&ls.v_indices, &br(i, j)?);
                }
            }
            checks.push(AxiomCheck {
                axiom: "centralizes_later_center".into(),
                r: lr.r,
                s: ls.r,
                pass: centre,
            });
            checks.push(AxiomCheck {
                axiom: "bracket_into_later_v".into(),
                r: lr.r,
                s: ls.r,
                pass: into_v,
            });
        }
    }
    for cut in 1..layers.len() {
        let tail: Vec<usize> = layers[cut..].iter().flat_map(Layer::indices).collect();
        let mut ideal = true;
        for i in 0..alg.dim() {
            for &j in &tail {
                ideal &= span_contains(&tail, &br(i, j)?);
            }
        }
        checks.push(AxiomCheck {
            axiom: "tail_is_ideal".into(),
            r: cut,
            s: layers.len(),
            pass: ideal,
        });
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(AxiomReport { checks, all_pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::decompose;
    use crate::rootsys::build;
    use proptest::prelude::*;

    fn setup(s: Series, l: usize) -> (NilpotentAlgebra, CascadeDecomposition) {
        let sys = build(s, l).unwrap();
        (NilpotentAlgebra::realize(&sys).unwrap(), decompose(&sys).unwrap())
    }

    #[test]
    fn dimensions() {
        assert_eq!(setup(Series::A, 2).0.dim(), 3);
        assert_eq!(setup(Series::A, 2).0.matrix_size(), 3);
        assert_eq!(setup(Series::A, 3).0.dim(), 6);
        assert_eq!(setup(Series::C, 2).0.dim(), 4);
        assert_eq!(setup(Series::B, 3).0.matrix_size(), 7);
    }

    #[test]
    fn a3_bracket_sign() {
        let (alg, _) = setup(Series::A, 3);
        let a = alg.index_of(&Root::from_ints(&[1, -1, 0, 0])).unwrap();
        let b = alg.index_of(&Root::from_ints(&[0, 1, 0, -1])).unwrap();
        let c = alg.index_of(&Root::from_ints(&[1, 0, 0, -1])).unwrap();
        let v = alg.bracket(&alg.unit(a), &alg.unit(b)).unwrap();
        assert!(v[c] == q(1) || v[c] == q(-1));
        assert!(alg
            .bracket(&alg.unit(a), &alg.unit(a))
            .unwrap()
            .iter()
            .all(Zero::is_zero));
    }

    #[test]
    fn b2_sign_convention() {
        let (alg, _) = setup(Series::B, 2);
        let e1 = alg.index_of(&Root::from_ints(&[1, 0])).unwrap();
        let e2 = alg.index_of(&Root::from_ints(&[0, 1])).unwrap();
        let s = alg.index_of(&Root::from_ints(&[1, 1])).unwrap();
        assert_eq!(alg.structure_constant(e1, e2), Some(&(s, q(-1))));
    }

    #[test]
    fn layers_and_d() {
        let (alg, d) = setup(Series::A, 3);
        let ls = layer_subalgebras(&alg, &d).unwrap();
        assert_eq!((ls[0].dim(), ls[0].d), (1, 0));
        assert_eq!((ls[1].dim(), ls[1].d), (5, 2));
        for s in [Series::C, Series::B] {
            let (alg, d) = setup(s, 2);
            let ls = layer_subalgebras(&alg, &d).unwrap();
            assert_eq!((ls[1].dim(), ls[1].d), (3, 1));
        }
    }

    #[test]
    fn axioms_hold_and_fixture_breaks() {
        for (s, l) in [(Series::A, 3), (Series::C, 3), (Series::B, 3), (Series::D, 4)] {
            let (alg, d) = setup(s, l);
            let ls = layer_subalgebras(&alg, &d).unwrap();
            assert!(verify_setup_axioms(&alg, &ls).unwrap().all_pass, "{s}{l}");
        }
        let (mut alg, d) = setup(Series::A, 3);
        let ls = layer_subalgebras(&alg, &d).unwrap();
        alg.corrupt_bridge(&d).unwrap();
        assert!(!verify_setup_axioms(&alg, &ls).unwrap().all_pass);
    }

    #[test]
    fn matrix_round_trip() {
        let (alg, _) = setup(Series::C, 3);
        let v: Vector = (0..alg.dim()).map(|i| q(i as i64 - 3)).collect();
        assert_eq!(alg.from_matrix(&alg.to_matrix(&v)).unwrap(), v);
    }

    fn small_vec(d: usize) -> impl Strategy<Value = Vector> {
        prop::collection::vec(-3i64..=3, d).prop_map(|v| v.into_iter().map(q).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn jacobi_and_matrix_agreement(
            pick in 0usize..4,
            x in small_vec(16), y in small_vec(16), z in small_vec(16),
        ) {
            let (s, l) = [(Series::A, 3), (Series::B, 3), (Series::C, 3), (Series::D, 4)][pick];
            let (alg, _) = setup(s, l);
            let d = alg.dim();
            let (x, y, z) = (&x[..d.min(16)], &y[..d.min(16)], &z[..d.min(16)]);
            let pad = |v: &[Q]| { let mut w = v.to_vec(); w.resize(d, Q::zero()); w };
            let (x, y, z) = (pad(x), pad(y), pad(z));
            let j1 = alg.bracket(&x, &alg.bracket(&y, &z).unwrap()).unwrap();
            let j2 = alg.bracket(&y, &alg.bracket(&z, &x).unwrap()).unwrap();
            let j3 = alg.bracket(&z, &alg.bracket(&x, &y).unwrap()).unwrap();
            for i in 0..d {
                prop_assert!((&j1[i] + &j2[i] + &j3[i]).is_zero());
            }
            let m = alg.to_matrix(&x).commutator(&alg.to_matrix(&y)).unwrap();
            prop_assert_eq!(alg.to_matrix(&alg.bracket(&x, &y).unwrap()), m);
            let yx = alg.bracket(&y, &x).unwrap();
            let xy = alg.bracket(&x, &y).unwrap();
            for i in 0..d {
                prop_assert!((&xy[i] + &yx[i]).is_zero());
            }
        }
    }
}
