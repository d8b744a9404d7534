//! Kostant cascade, its reversed enumeration and the layer partition of the
//! positive roots.

use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::q;
use crate::rootsys::{inner, Family, RankParams, Root, RootSystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tie {
    pub step: usize,
    pub candidates: Vec<Vec<String>>,
    pub chosen: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cascade {
    pub beta_prime: Vec<Root>,
    pub ties: Vec<Tie>,
}

/// Greedy cascade: at each step take a maximal positive root strongly
/// orthogonal to everything chosen so far. Several maximal candidates are
/// broken toward the lexicographically greatest coordinates.
pub fn kostant_cascade(system: &RootSystem) -> Result<Cascade> {
    let mut chosen: Vec<Root> = Vec::new();
    let mut ties = Vec::new();
    loop {
        let mut cands = Vec::new();
        for a in system.positives() {
            let mut ok = true;
            for b in &chosen {
                if !system.strongly_orthogonal(a, b)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                cands.push(a);
            }
        }
        if cands.is_empty() {
            break;
        }
        let maximal: Vec<&Root> = cands
            .iter()
            .copied()
            .filter(|c| !cands.iter().any(|d| d != c && system.dominates(d, c)))
            .collect();
        let pick = (*maximal.iter().max().expect("finite poset has maximal elements")).clone();
        if maximal.len() > 1 {
            ties.push(Tie {
                step: chosen.len() + 1,
                candidates: maximal.iter().map(|r| r.to_strings()).collect(),
                chosen: pick.to_strings(),
            });
        }
        chosen.push(pick);
    }
    Ok(Cascade {
        beta_prime: chosen,
        ties,
    })
}

pub fn reverse_cascade(beta_prime: &[Root]) -> Vec<Root> {
    beta_prime.iter().rev().cloned().collect()
}

#[derive(Clone, Debug)]
pub struct CascadeDecomposition {
    pub beta_prime: Vec<Root>,
    pub beta: Vec<Root>,
    /// `layers[r - 1]` holds the sorted members of the r-th layer set.
    pub layers: Vec<Vec<Root>>,
    pub layer_of: HashMap<Root, usize>,
    pub ties: Vec<Tie>,
}

impl CascadeDecomposition {
    pub fn m(&self) -> usize {
        self.beta.len()
    }

    pub fn beta_r(&self, r: usize) -> &Root {
        &self.beta[r - 1]
    }

    pub fn layer(&self, r: usize) -> &[Root] {
        &self.layers[r - 1]
    }

    pub fn d(&self, r: usize) -> usize {
        self.layers[r - 1].len() / 2
    }

    pub fn d_list(&self) -> Vec<usize> {
        (1..=self.m()).map(|r| self.d(r)).collect()
    }

    pub fn to_json(&self) -> CascadeJson {
        CascadeJson {
            beta_prime: self.beta_prime.iter().map(Root::to_strings).collect(),
            beta: self.beta.iter().map(Root::to_strings).collect(),
            layers: (1..=self.m())
                .map(|r| LayerJson {
                    r,
                    beta: self.beta_r(r).to_strings(),
                    members: self.layer(r).iter().map(Root::to_strings).collect(),
                })
                .collect(),
            ties: self.ties.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerJson {
    pub r: usize,
    pub beta: Vec<String>,
    pub members: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeJson {
    pub beta_prime: Vec<Vec<String>>,
    pub beta: Vec<Vec<String>>,
    pub layers: Vec<LayerJson>,
    pub ties: Vec<Tie>,
}

/// Builds the layers top down: the last layer collects the positive roots
/// whose complement in `β_m` is positive, then each lower layer does the same
/// for its `β_r` among roots not yet placed.
pub fn layer_partition(system: &RootSystem, beta: &[Root]) -> Result<CascadeDecomposition> {
    let m = beta.len();
    let mut layer_of: HashMap<Root, usize> = HashMap::new();
    for (i, b) in beta.iter().enumerate() {
        if !system.is_positive(b) {
            return Err(Error::Invariant(format!("cascade root {b} is not positive")));
        }
        layer_of.insert(b.clone(), i + 1);
    }
    let mut layers = vec![Vec::new(); m];
    for r in (1..=m).rev() {
        let b = &beta[r - 1];
        for a in system.positives() {
            if layer_of.contains_key(a) {
                continue;
            }
            if system.is_positive(&b.try_sub(a)?) {
                layers[r - 1].push(a.clone());
            }
        }
        for a in &layers[r - 1] {
            layer_of.insert(a.clone(), r);
        }
    }
    let decomp = CascadeDecomposition {
        beta_prime: reverse_cascade(beta),
        beta: beta.to_vec(),
        layers,
        layer_of,
        ties: Vec::new(),
    };
    check_partition(system, &decomp)?;
    check_layer_characterization(system, &decomp)?;
    check_pairing(system, &decomp)?;
    Ok(decomp)
}

/// Cascade, reversal and partition in one call, keeping tie metadata.
pub fn decompose(system: &RootSystem) -> Result<CascadeDecomposition> {
    let c = kostant_cascade(system)?;
    let mut d = layer_partition(system, &reverse_cascade(&c.beta_prime))?;
    d.ties = c.ties;
    Ok(d)
}

pub fn check_partition(system: &RootSystem, d: &CascadeDecomposition) -> Result<()> {
    let total: usize = d.m() + d.layers.iter().map(Vec::len).sum::<usize>();
    if total != system.positives().len() {
        return Err(Error::Invariant(format!(
            "layers cover {total} of {} positive roots",
            system.positives().len()
        )));
    }
    for a in system.positives() {
        let hits = d.beta.iter().filter(|b| *b == a).count() + d.layers.iter().filter(|l| l.contains(a)).count();
        if hits != 1 {
            return Err(Error::Invariant(format!("{a} lies in {hits} classes")));
        }
    }
    Ok(())
}

/// Layer r plus `β_r` is exactly the set of positive roots orthogonal to all
/// later `β_i` with positive inner product against `β_r`.
pub fn check_layer_characterization(system: &RootSystem, d: &CascadeDecomposition) -> Result<()> {
    for r in 1..=d.m() {
        let mut want = Vec::new();
        for a in system.positives() {
            let mut ok = inner(a, d.beta_r(r))?.is_positive();
            for i in r + 1..=d.m() {
                ok &= inner(a, d.beta_r(i))?.is_zero();
            }
            if ok {
                want.push(a.clone());
            }
        }
        let mut have = d.layer(r).to_vec();
        have.push(d.beta_r(r).clone());
        have.sort();
        want.sort();
        if have != want {
            return Err(Error::Invariant(format!("layer {r} characterization fails")));
        }
    }
    Ok(())
}

/// `α + σ_r(α) = β_r` on each layer, and any root sum of two layer roots is `β_r`.
pub fn check_pairing(system: &RootSystem, d: &CascadeDecomposition) -> Result<()> {
    for r in 1..=d.m() {
        for a in d.layer(r) {
            let s = sigma_r(d, a, r)?;
            if sigma_r(d, &s, r)? != *a {
                return Err(Error::Invariant(format!("sigma_{r} is not an involution at {a}")));
            }
            for b in d.layer(r) {
                let sum = a.try_add(b)?;
                if system.is_root(&sum)? && sum != *d.beta_r(r) {
                    return Err(Error::Invariant(format!("{a} + {b} is a root other than beta_{r}")));
                }
            }
        }
    }
    Ok(())
}

/// `-s_{β_r}(α)`, the partner of `α` inside layer r.
pub fn sigma_r(d: &CascadeDecomposition, alpha: &Root, r: usize) -> Result<Root> {
    if r == 0 || r > d.m() || d.layer_of.get(alpha) != Some(&r) || alpha == d.beta_r(r) {
        return Err(Error::NotInLayer {
            root: alpha.to_string(),
            layer: r,
        });
    }
    let b = d.beta_r(r);
    let c = q(2) * inner(alpha, b)? / b.norm_sq();
    let s = b.scale(&c).try_sub(alpha)?;
    if d.layer_of.get(&s) != Some(&r) || s == *b {
        return Err(Error::Invariant(format!("sigma_{r}({alpha}) = {s} leaves the layer")));
    }
    if alpha.try_add(&s)? != *b {
        return Err(Error::Invariant(format!(
            "{alpha} + sigma_{r}({alpha}) differs from beta_{r}"
        )));
    }
    Ok(s)
}

/// A combination of simple roots keyed by index.
pub type SimpleCombo = BTreeMap<i32, i64>;

fn span(lo: i32, hi: i32, coef: i64, skip_zero: bool) -> SimpleCombo {
    (lo..=hi)
        .filter(|&k| !(skip_zero && k == 0))
        .map(|k| (k, coef))
        .collect()
}

fn plus(mut a: SimpleCombo, b: SimpleCombo) -> SimpleCombo {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a.retain(|_, v| *v != 0);
    a
}

/// The cascade written directly in simple roots, family by family.
pub fn closed_form_beta(params: RankParams) -> Result<Vec<SimpleCombo>> {
    let p = RankParams::new(params.family, params.n)?;
    let n = p.n as i32;
    let one = |k: i32| span(k, k, 1, false);
    let mut out = Vec::new();
    match p.family {
        Family::AOdd => {
            for r in 1..=n + 1 {
                out.push(span(-r + 1, r - 1, 1, false));
            }
        }
        Family::AEven => {
            for r in 1..=n {
                out.push(span(-r, r, 1, true));
            }
        }
        Family::BOdd => {
            out.push(one(1));
            for r in 1..=n {
                out.push(one(2 * r + 1));
                out.push(plus(span(1, 2 * r, 2, false), one(2 * r + 1)));
            }
        }
        Family::BEven => {
            for r in 1..=n {
                out.push(one(2 * r));
                out.push(plus(span(1, 2 * r - 1, 2, false), one(2 * r)));
            }
        }
        Family::C => {
            for r in 1..=n {
                out.push(plus(one(1), span(2, r, 2, false)));
            }
        }
        Family::DOdd => {
            for r in 1..=n {
                out.push(one(2 * r + 1));
                let head = plus(plus(one(1), one(2)), span(3, 2 * r, 2, false));
                out.push(plus(head, one(2 * r + 1)));
            }
        }
        Family::DEven => {
            out.push(one(1));
            out.push(one(2));
            for r in 2..=n {
                out.push(one(2 * r));
                let head = plus(plus(one(1), one(2)), span(3, 2 * r - 1, 2, false));
                out.push(plus(head, one(2 * r)));
            }
        }
    }
    Ok(out)
}

pub fn expand(system: &RootSystem, combo: &SimpleCombo) -> Result<Root> {
    let mut out = Root::zero(system.ambient_dim());
    for (&k, &c) in combo {
        let psi = system
            .simple_root(k)
            .ok_or_else(|| Error::Invariant(format!("no simple root with index {k}")))?;
        out = out.try_add(&psi.scale(&q(c)))?;
    }
    Ok(out)
}

/// Renders e.g. `ψ-1+ψ0+ψ1` or `ψ1+2ψ2`.
pub fn format_combo(c: &SimpleCombo) -> String {
    let parts: Vec<String> = c
        .iter()
        .map(|(k, v)| if *v == 1 { format!("ψ{k}") } else { format!("{v}ψ{k}") })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{build, build_root_system, Series};
    use proptest::prelude::*;

    fn r(v: &[i64]) -> Root {
        Root::from_ints(v)
    }

    // Brute force: every maximal-length chain of pairwise strongly orthogonal
    // positives, built greedily from maxima, must agree with the cascade.
    fn brute_cascade(s: &RootSystem) -> Vec<Root> {
        let mut chosen: Vec<Root> = Vec::new();
        loop {
            let cands: Vec<&Root> = s
                .positives()
                .iter()
                .filter(|a| chosen.iter().all(|b| s.strongly_orthogonal(a, b).unwrap()))
                .collect();
            // Every candidate must be dominated by or incomparable to the pick.
            let Some(best) = cands
                .iter()
                .filter(|c| cands.iter().all(|d| d == *c || !s.dominates(d, c)))
                .max()
            else {
                return chosen;
            };
            chosen.push((*best).clone());
        }
    }

    #[test]
    fn a3_cascade() {
        let s = build(Series::A, 3).unwrap();
        let c = kostant_cascade(&s).unwrap();
        assert_eq!(c.beta_prime, vec![r(&[1, 0, 0, -1]), r(&[0, 1, -1, 0])]);
        assert_eq!(c.beta_prime, brute_cascade(&s));
        let beta = reverse_cascade(&c.beta_prime);
        assert_eq!(beta, vec![r(&[0, 1, -1, 0]), r(&[1, 0, 0, -1])]);
        let d = layer_partition(&s, &beta).unwrap();
        let mut want = vec![
            r(&[1, -1, 0, 0]),
            r(&[1, 0, -1, 0]),
            r(&[0, 1, 0, -1]),
            r(&[0, 0, 1, -1]),
        ];
        want.sort();
        assert_eq!(d.layer(2), &want[..]);
        assert!(d.layer(1).is_empty());
        assert_eq!(d.d_list(), vec![0, 2]);
    }

    #[test]
    fn c2_and_b2() {
        let c2 = build(Series::C, 2).unwrap();
        let d = decompose(&c2).unwrap();
        assert_eq!(d.beta_prime, vec![r(&[2, 0]), r(&[0, 2])]);
        let mut want = vec![r(&[1, -1]), r(&[1, 1])];
        want.sort();
        assert_eq!(d.layer(2), &want[..]);
        assert!(d.layer(1).is_empty());

        let b2 = build(Series::B, 2).unwrap();
        let d = decompose(&b2).unwrap();
        let mut want = vec![r(&[1, 0]), r(&[0, 1])];
        want.sort();
        assert_eq!(d.layer(2), &want[..]);
        assert!(d.layer(1).is_empty());
    }

    #[test]
    fn a1_single() {
        let s = build(Series::A, 1).unwrap();
        let d = decompose(&s).unwrap();
        assert_eq!(d.beta, vec![r(&[1, -1])]);
        assert_eq!(reverse_cascade(&d.beta), d.beta);
    }

    #[test]
    fn sigma_example() {
        let s = build(Series::A, 3).unwrap();
        let d = decompose(&s).unwrap();
        let a = r(&[1, -1, 0, 0]);
        let sa = sigma_r(&d, &a, 2).unwrap();
        assert_eq!(sa, r(&[0, 1, 0, -1]));
        assert_eq!(a.try_add(&sa).unwrap(), *d.beta_r(2));
        assert!(matches!(sigma_r(&d, &a, 1), Err(Error::NotInLayer { .. })));
    }

    #[test]
    fn d4_tie_recorded() {
        let s = build(Series::D, 4).unwrap();
        let d = decompose(&s).unwrap();
        assert!(!d.ties.is_empty());
        assert_eq!(d.beta[0], r(&[0, 0, 1, -1]));
        assert_eq!(d.beta[1], r(&[0, 0, 1, 1]));
    }

    #[test]
    fn closed_form_examples() {
        let c3 = closed_form_beta(RankParams::new(Family::C, 3).unwrap()).unwrap();
        let f: Vec<String> = c3.iter().map(format_combo).collect();
        assert_eq!(f, vec!["ψ1", "ψ1+2ψ2", "ψ1+2ψ2+2ψ3"]);
        let b2 = closed_form_beta(RankParams::new(Family::BEven, 1).unwrap()).unwrap();
        let f: Vec<String> = b2.iter().map(format_combo).collect();
        assert_eq!(f, vec!["ψ2", "2ψ1+ψ2"]);
        let a3 = closed_form_beta(RankParams::new(Family::AOdd, 1).unwrap()).unwrap();
        let f: Vec<String> = a3.iter().map(format_combo).collect();
        assert_eq!(f, vec!["ψ0", "ψ-1+ψ0+ψ1"]);
    }

    #[test]
    fn closed_form_matches_cascade_small() {
        for fam in Family::ALL {
            for n in fam.min_n()..fam.min_n() + 4 {
                let p = RankParams::new(fam, n).unwrap();
                let s = build_root_system(fam.series(), p).unwrap();
                let d = decompose(&s).unwrap();
                let want: Vec<Root> = closed_form_beta(p)
                    .unwrap()
                    .iter()
                    .map(|c| expand(&s, c).unwrap())
                    .collect();
                assert_eq!(d.beta, want, "{p}");
                assert_eq!(d.beta_prime, brute_cascade(&s), "{p}");
            }
        }
    }

    #[test]
    fn half_beta_fixed_point_never_arises_in_reduced_systems() {
        for fam in Family::ALL {
            let p = RankParams::new(fam, fam.min_n() + 1).unwrap();
            let s = build_root_system(fam.series(), p).unwrap();
            let d = decompose(&s).unwrap();
            for rr in 1..=d.m() {
                let half = d.beta_r(rr).scale(&crate::rational::qf(1, 2));
                assert!(!d.layer(rr).contains(&half));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn reverse_is_involution(v in prop::collection::vec(prop::collection::vec(-3i64..4, 3), 0..8)) {
            let roots: Vec<Root> = v.iter().map(|c| Root::from_ints(c)).collect();
            prop_assert_eq!(reverse_cascade(&reverse_cascade(&roots)), roots);
        }
    }
}
