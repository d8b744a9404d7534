//! Direct systems of root systems: propagation inside one family,
//! well-alignment, cascade stability, and the exact factors relating
//! Pfaffian densities of consecutive stages.

use std::collections::{BTreeSet, HashSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cascade::{decompose, CascadeDecomposition};
use crate::error::{Error, Result};
use crate::nilalg::{layer_subalgebras, Layer, NilpotentAlgebra};
use crate::plancherel::{plancherel_density, QuasiCenterFunctional};
use crate::rational::{format_rational, q, Q};
use crate::rootsys::{build_root_system, inner, nonmultipliable, Family, RankParams, Root, RootSystem, Series};

/// Simple-root labels are stable under propagation, so an embedding is
/// determined by the label sets of its two ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub from_labels: Vec<i32>,
    pub to_labels: Vec<i32>,
}

impl Embedding {
    pub fn between(from: &RootSystem, to: &RootSystem) -> Option<Embedding> {
        let f: Vec<i32> = from.simple().iter().map(|s| s.index).collect();
        let t: Vec<i32> = to.simple().iter().map(|s| s.index).collect();
        f.iter().all(|i| t.contains(i)).then_some(Embedding {
            from_labels: f,
            to_labels: t,
        })
    }

    pub fn added(&self) -> Vec<i32> {
        self.to_labels
            .iter()
            .filter(|i| !self.from_labels.contains(i))
            .copied()
            .collect()
    }

    pub fn map_root(&self, from: &RootSystem, to: &RootSystem, v: &Root) -> Result<Root> {
        let c = from
            .simple_coefficients(v)
            .ok_or_else(|| Error::Invariant(format!("{v} is not in the root lattice")))?;
        let mut out = Root::zero(to.ambient_dim());
        for (ci, label) in c.iter().zip(&self.from_labels) {
            let s = to
                .simple_root(*label)
                .ok_or_else(|| Error::Invariant(format!("label {label} missing from target")))?;
            out = out.try_add(&s.scale(ci))?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct DirectChain {
    pub systems: Vec<RootSystem>,
    pub embeddings: Vec<Option<Embedding>>,
}

impl DirectChain {
    /// Stages `n, n+1, ..., n+steps` of one family.
    pub fn propagate(params: RankParams, steps: usize) -> Result<Self> {
        let systems = (0..=steps)
            .map(|k| {
                let p = RankParams::new(params.family, params.n + k)?;
                build_root_system(p.series(), p)
            })
            .collect::<Result<Vec<_>>>()?;
        let chain = DirectChain::from_systems(systems);
        for (k, e) in chain.embeddings.iter().enumerate() {
            let e = e
                .as_ref()
                .ok_or_else(|| Error::Invariant(format!("stage {k} does not embed")))?;
            check_embedding(&chain.systems[k], &chain.systems[k + 1], e)?;
        }
        Ok(chain)
    }

    /// A chain from arbitrary systems; pairs whose labels do not nest get
    /// no embedding.
    pub fn from_systems(systems: Vec<RootSystem>) -> Self {
        let embeddings = systems.windows(2).map(|w| Embedding::between(&w[0], &w[1])).collect();
        DirectChain { systems, embeddings }
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    /// Embedding from stage `i` into stage `j > i`, composed stepwise.
    pub fn map_root(&self, i: usize, j: usize, v: &Root) -> Result<Root> {
        let mut cur = v.clone();
        for k in i..j {
            let e = self.embeddings[k]
                .as_ref()
                .ok_or_else(|| Error::Incompatible(format!("no embedding at stage {k}")))?;
            cur = e.map_root(&self.systems[k], &self.systems[k + 1], &cur)?;
        }
        Ok(cur)
    }

    /// Direct embedding from stage `i` into stage `j` by labels.
    pub fn map_root_direct(&self, i: usize, j: usize, v: &Root) -> Result<Root> {
        let e = Embedding::between(&self.systems[i], &self.systems[j])
            .ok_or_else(|| Error::Incompatible(format!("stage {i} does not embed in stage {j}")))?;
        e.map_root(&self.systems[i], &self.systems[j], v)
    }
}

/// Inner products, positivity and the end at which new simple roots attach.
pub fn check_embedding(from: &RootSystem, to: &RootSystem, e: &Embedding) -> Result<()> {
    for a in from.simple() {
        for b in from.simple() {
            let ia = inner(&a.root, &b.root)?;
            let ib = inner(
                to.simple_root(a.index).expect("nested labels"),
                to.simple_root(b.index).expect("nested labels"),
            )?;
            if ia != ib {
                return Err(Error::Invariant(format!(
                    "<ψ{}, ψ{}> changes under the embedding",
                    a.index, b.index
                )));
            }
        }
    }
    for p in from.positives() {
        let img = e.map_root(from, to, p)?;
        if !to.is_positive(&img) {
            return Err(Error::Invariant(format!("{p} maps to the non-positive {img}")));
        }
    }
    let added = e.added();
    let lo = *e.from_labels.iter().min().expect("nonempty");
    let hi = *e.from_labels.iter().max().expect("nonempty");
    let series = to.series();
    let ends: Vec<i32> = match series {
        Some(Series::A) => {
            let set: HashSet<i32> = added.iter().copied().collect();
            if added.iter().any(|k| !set.contains(&-k)) {
                return Err(Error::Invariant("type A extension is not symmetric".into()));
            }
            vec![lo, hi]
        }
        _ => {
            if added.iter().any(|&k| k <= hi) {
                return Err(Error::Invariant("new simple roots must extend the far end".into()));
            }
            vec![hi]
        }
    };
    for &k in &added {
        let nk = to.simple_root(k).expect("target label");
        for old in from.simple() {
            let linked = !inner(nk, to.simple_root(old.index).expect("target label"))?.is_zero();
            if linked && !ends.contains(&old.index) {
                return Err(Error::Invariant(format!(
                    "ψ{k} attaches to ψ{} away from the end",
                    old.index
                )));
            }
        }
    }
    Ok(())
}

/// Series whose rank-`ℓ` system is isomorphic to the given one.
pub fn possible_types(system: &RootSystem) -> BTreeSet<Series> {
    let cartan = system.cartan_matrix();
    let rank = cartan.len();
    let mut out = BTreeSet::new();
    if rank == 0 {
        return out;
    }
    if rank == 1 {
        return [Series::A, Series::B, Series::C].into_iter().collect();
    }
    let lens: Vec<Q> = system.simple().iter().map(|s| s.root.norm_sq()).collect();
    let long = lens.iter().max().expect("rank >= 1").clone();
    let n_long = lens.iter().filter(|l| **l == long).count();
    let degree = |i: usize| (0..rank).filter(|&j| j != i && cartan[i][j] != 0).count();
    let multi_bond = (0..rank).any(|i| (0..rank).any(|j| cartan[i][j] < -2));
    if multi_bond {
        return out;
    }
    if n_long == rank {
        let branch = (0..rank).any(|i| degree(i) == 3);
        if branch {
            out.insert(Series::D);
        } else {
            out.insert(Series::A);
            if rank == 3 {
                out.insert(Series::D);
            }
        }
    } else if rank == 2 {
        out.insert(Series::B);
        out.insert(Series::C);
    } else if rank - n_long == 1 {
        out.insert(Series::B);
    } else if n_long == 1 {
        out.insert(Series::C);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentRow {
    pub stage: usize,
    pub same_type: bool,
    pub embeds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub rows: Vec<AlignmentRow>,
    pub common_types: Vec<String>,
    pub aligned: bool,
}

/// All nonmultipliable systems share one type and every step embeds.
pub fn check_well_aligned(chain: &DirectChain) -> AlignmentReport {
    let types: Vec<BTreeSet<Series>> = chain
        .systems
        .iter()
        .map(|s| possible_types(&nonmultipliable(s)))
        .collect();
    let mut common = types.first().cloned().unwrap_or_default();
    for t in &types {
        common = common.intersection(t).copied().collect();
    }
    let mut rows = Vec::new();
    for k in 0..chain.len().saturating_sub(1) {
        let pair: BTreeSet<Series> = types[k].intersection(&types[k + 1]).copied().collect();
        let (embeds, detail) = match &chain.embeddings[k] {
            None => (false, "simple-root labels do not nest".to_string()),
            Some(e) => match check_embedding(&chain.systems[k], &chain.systems[k + 1], e) {
                Ok(()) => (true, String::new()),
                Err(err) => (false, err.to_string()),
            },
        };
        rows.push(AlignmentRow {
            stage: k,
            same_type: !pair.is_empty(),
            embeds,
            detail,
        });
    }
    let aligned = !common.is_empty() && rows.iter().all(|r| r.same_type && r.embeds);
    AlignmentReport {
        rows,
        common_types: common.iter().map(|s| s.to_string()).collect(),
        aligned,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub stage: usize,
    pub r: usize,
    pub beta_stable: bool,
    pub layer_stable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub rows: Vec<StabilityRow>,
    pub stable: bool,
}

/// `β_r` and `Δ⁺_r` of each stage reappear unchanged in the next one.
pub fn cascade_stability(chain: &DirectChain) -> Result<StabilityReport> {
    let decomps = chain.systems.iter().map(decompose).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for k in 0..chain.len().saturating_sub(1) {
        let (small, big) = (&decomps[k], &decomps[k + 1]);
        let image: HashSet<Root> = chain.systems[k]
            .positives()
            .iter()
            .map(|p| chain.map_root(k, k + 1, p))
            .collect::<Result<_>>()?;
        for r in 1..=small.m() {
            let beta_stable = r <= big.m() && chain.map_root(k, k + 1, small.beta_r(r))? == *big.beta_r(r);
            let mapped: HashSet<Root> = small
                .layer(r)
                .iter()
                .map(|a| chain.map_root(k, k + 1, a))
                .collect::<Result<_>>()?;
            let layer_stable = r <= big.m() && {
                let cut: HashSet<Root> = big.layer(r).iter().filter(|a| image.contains(*a)).cloned().collect();
                cut == mapped
            };
            rows.push(StabilityRow {
                stage: k,
                r,
                beta_stable,
                layer_stable,
            });
        }
    }
    let stable = rows.iter().all(|r| r.beta_stable && r.layer_stable);
    Ok(StabilityReport { rows, stable })
}

/// Layers `q > m_k` of the last stage: the kernel of the projection onto
/// stage `k`.
pub fn tail_layers(chain: &DirectChain, k: usize) -> Result<Vec<usize>> {
    let m_k = decompose(&chain.systems[k])?.m();
    let m_last = decompose(chain.systems.last().expect("nonempty chain"))?.m();
    Ok((m_k + 1..=m_last).collect())
}

/// Exact Pfaffian data of one stage.
#[derive(Clone, Debug)]
pub struct StageAlgebra {
    pub alg: NilpotentAlgebra,
    pub decomp: CascadeDecomposition,
    pub layers: Vec<Layer>,
}

impl StageAlgebra {
    pub fn new(system: &RootSystem) -> Result<Self> {
        let alg = NilpotentAlgebra::realize(system)?;
        let decomp = decompose(system)?;
        let layers = layer_subalgebras(&alg, &decomp)?;
        Ok(StageAlgebra { alg, decomp, layers })
    }

    pub fn m(&self) -> usize {
        self.layers.len()
    }

    /// `P(γ)` with `γ = (λ_1, ..., λ_m)`.
    pub fn pf_product(&self, gamma: &[Q]) -> Result<Q> {
        if gamma.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: gamma.len(),
            });
        }
        Ok(plancherel_density(&self.alg, &self.layers, &QuasiCenterFunctional::new(gamma.to_vec()))?.product)
    }
}

/// `|P_n(γ) / P_{n'}(γ')|` for `γ'` restricting to `γ`.
pub fn restriction_projection_factor(
    small: &StageAlgebra,
    big: &StageAlgebra,
    gamma_small: &[Q],
    gamma_big: &[Q],
) -> Result<Q> {
    if gamma_big.len() < gamma_small.len() || gamma_big[..gamma_small.len()] != *gamma_small {
        return Err(Error::Incompatible("gamma' does not restrict to gamma".into()));
    }
    let ps = small.pf_product(gamma_small)?;
    let pb = big.pf_product(gamma_big)?;
    if ps.is_zero() || pb.is_zero() {
        return Err(Error::Singular("gamma is off the nonsingular set".into()));
    }
    Ok((ps / pb).abs())
}

/// `|P_{n'}| · (|P_n|/|P_{n'}|) = |P_n|`, the squared form of the rescaling
/// compatibility.
pub fn rescaling_commutes(p_small: &Q, p_big: &Q) -> bool {
    let f = (p_small / p_big).abs();
    p_big.abs() * f == p_small.abs()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitivityRow {
    pub stages: [usize; 3],
    pub direct: String,
    pub composed: String,
    pub holds: bool,
}

/// Checks `factor(i→k) = factor(i→j)·factor(j→k)` on every triple, with
/// `γ` taken as initial segments of `gamma`.
pub fn factor_transitivity(chain: &DirectChain, gamma: &[Q]) -> Result<Vec<TransitivityRow>> {
    let stages = chain
        .systems
        .iter()
        .map(StageAlgebra::new)
        .collect::<Result<Vec<_>>>()?;
    let seg = |k: usize| -> Result<&[Q]> {
        gamma
            .get(..stages[k].m())
            .ok_or_else(|| Error::Config(format!("gamma has fewer than {} entries", stages[k].m())))
    };
    let mut rows = Vec::new();
    for i in 0..stages.len() {
        for j in i + 1..stages.len() {
            for k in j + 1..stages.len() {
                let fij = restriction_projection_factor(&stages[i], &stages[j], seg(i)?, seg(j)?)?;
                let fjk = restriction_projection_factor(&stages[j], &stages[k], seg(j)?, seg(k)?)?;
                let fik = restriction_projection_factor(&stages[i], &stages[k], seg(i)?, seg(k)?)?;
                let composed = &fij * &fjk;
                rows.push(TransitivityRow {
                    stages: [i, j, k],
                    direct: format_rational(&fik),
                    composed: format_rational(&composed),
                    holds: fik == composed,
                });
            }
        }
    }
    Ok(rows)
}

/// `γ = (1, 2, 3, ...)`, nonsingular on every classical stage.
pub fn default_gamma(m: usize) -> Vec<Q> {
    (1..=m as i64).map(q).collect()
}

/// Propagation chains used by the acceptance suite: four stages per family.
pub fn standard_chains() -> Result<Vec<(Family, DirectChain)>> {
    Family::ALL
        .into_iter()
        .map(|f| Ok((f, DirectChain::propagate(RankParams::new(f, f.min_n())?, 3)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::build;
    use num_traits::One;

    #[test]
    fn c_chain_keeps_first_labels() {
        let ch = DirectChain::propagate(RankParams::new(Family::C, 2).unwrap(), 2).unwrap();
        assert_eq!(ch.len(), 3);
        assert_eq!(ch.embeddings[0].as_ref().unwrap().added(), vec![3]);
        assert!(check_well_aligned(&ch).aligned);
        assert!(cascade_stability(&ch).unwrap().stable);
    }

    #[test]
    fn a_chain_spreads_from_centre() {
        let ch = DirectChain::propagate(RankParams::new(Family::AOdd, 0).unwrap(), 2).unwrap();
        let mut added = ch.embeddings[0].as_ref().unwrap().added();
        added.sort();
        assert_eq!(added, vec![-1, 1]);
        let d = decompose(&ch.systems[2]).unwrap();
        let psi0 = ch.systems[2].simple_root(0).unwrap();
        assert_eq!(d.beta_r(1), psi0);
    }

    #[test]
    fn composition_matches_direct_embedding() {
        for f in Family::ALL {
            let ch = DirectChain::propagate(RankParams::new(f, f.min_n()).unwrap(), 3).unwrap();
            for p in ch.systems[0].positives() {
                assert_eq!(
                    ch.map_root(0, 3, p).unwrap(),
                    ch.map_root_direct(0, 3, p).unwrap(),
                    "{f:?}"
                );
            }
        }
    }

    #[test]
    fn mixed_chain_is_not_aligned() {
        let ch = DirectChain::from_systems(vec![build(Series::A, 3).unwrap(), build(Series::B, 3).unwrap()]);
        let r = check_well_aligned(&ch);
        assert!(!r.aligned);
        assert!(!r.rows[0].same_type);
    }

    #[test]
    fn every_family_is_aligned_and_stable() {
        for (f, ch) in standard_chains().unwrap() {
            assert!(check_well_aligned(&ch).aligned, "{f:?}");
            let s = cascade_stability(&ch).unwrap();
            assert!(
                s.stable,
                "{f:?}: {:?}",
                s.rows
                    .iter()
                    .filter(|r| !(r.beta_stable && r.layer_stable))
                    .collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn types_up_to_isomorphism() {
        assert!(possible_types(&build(Series::B, 2).unwrap()).contains(&Series::C));
        assert_eq!(
            possible_types(&build(Series::D, 5).unwrap()),
            [Series::D].into_iter().collect()
        );
        assert_eq!(
            possible_types(&build(Series::C, 4).unwrap()),
            [Series::C].into_iter().collect()
        );
        assert_eq!(
            possible_types(&build(Series::B, 4).unwrap()),
            [Series::B].into_iter().collect()
        );
    }

    #[test]
    fn a1_a3_factor() {
        let s1 = StageAlgebra::new(&build(Series::A, 1).unwrap()).unwrap();
        let s2 = StageAlgebra::new(&build(Series::A, 3).unwrap()).unwrap();
        for (l1, l2) in [(1, 1), (2, 3), (-1, 5)] {
            let f = restriction_projection_factor(&s1, &s2, &[q(l1)], &[q(l1), q(l2)]).unwrap();
            assert_eq!(f, Q::one() / q(l2 * l2));
        }
        assert_eq!(
            restriction_projection_factor(&s2, &s2, &[q(1), q(2)], &[q(1), q(2)]).unwrap(),
            Q::one()
        );
        assert!(restriction_projection_factor(&s1, &s2, &[q(1)], &[q(2), q(1)]).is_err());
        assert!(restriction_projection_factor(&s1, &s2, &[q(1)], &[q(1), q(0)]).is_err());
    }

    #[test]
    fn transitivity_and_rescaling() {
        for f in [Family::AOdd, Family::C, Family::BOdd, Family::DEven] {
            let ch = DirectChain::propagate(RankParams::new(f, f.min_n()).unwrap(), 2).unwrap();
            let m = decompose(ch.systems.last().unwrap()).unwrap().m();
            let rows = factor_transitivity(&ch, &default_gamma(m)).unwrap();
            assert!(!rows.is_empty() && rows.iter().all(|r| r.holds), "{f:?}");
        }
        assert!(rescaling_commutes(&q(3), &q(-12)));
    }

    #[test]
    fn tails_of_the_chain() {
        let ch = DirectChain::propagate(RankParams::new(Family::C, 1).unwrap(), 3).unwrap();
        assert_eq!(tail_layers(&ch, 0).unwrap(), vec![2, 3, 4]);
        assert!(tail_layers(&ch, 3).unwrap().is_empty());
    }
}
