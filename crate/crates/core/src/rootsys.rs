//! Classical root systems in exact rational coordinates.
//!
//! Simple roots are indexed outward from a fixed end of the Dynkin diagram so
//! that growing the rank only adds roots at the far end. For B, C and D the
//! index 1 sits next to the double bond (B: short root, C: long root) or at a
//! fork tip (D). For A the indices spread symmetrically from the middle.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, q, QMatrix, Q};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root {
    coords: Vec<Q>,
}

impl Root {
    pub fn new(coords: Vec<Q>) -> Self {
        Root { coords }
    }

    pub fn zero(dim: usize) -> Self {
        Root {
            coords: vec![Q::zero(); dim],
        }
    }

    /// `e_i` scaled by `c`, zero-based `i`.
    pub fn basis(dim: usize, i: usize, c: i64) -> Self {
        let mut r = Self::zero(dim);
        r.coords[i] = q(c);
        r
    }

    /// `e_i + s * e_j`, zero-based.
    pub fn pair(dim: usize, i: usize, j: usize, s: i64) -> Self {
        let mut r = Self::zero(dim);
        r.coords[i] += q(1);
        r.coords[j] += q(s);
        r
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Root::new(v.iter().map(|&x| q(x)).collect())
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// First nonzero coordinate is positive.
    pub fn is_lex_positive(&self) -> bool {
        self.coords
            .iter()
            .find(|c| !c.is_zero())
            .is_some_and(|c| c.is_positive())
    }

    pub fn norm_sq(&self) -> Q {
        self.coords.iter().map(|c| c * c).sum()
    }

    pub fn scale(&self, s: &Q) -> Root {
        Root::new(self.coords.iter().map(|c| c * s).collect())
    }

    fn zip(&self, other: &Root, f: impl Fn(&Q, &Q) -> Q) -> Result<Root> {
        check_dim(self, other)?;
        Ok(Root::new(
            self.coords.iter().zip(&other.coords).map(|(a, b)| f(a, b)).collect(),
        ))
    }

    pub fn try_add(&self, other: &Root) -> Result<Root> {
        self.zip(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Root) -> Result<Root> {
        self.zip(other, |a, b| a - b)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(format_rational).collect()
    }

    pub fn from_strings(v: &[String]) -> Result<Root> {
        Ok(Root::new(v.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(crate::rational::to_f64).collect()
    }
}

impl std::ops::Neg for &Root {
    type Output = Root;
    fn neg(self) -> Root {
        Root::new(self.coords.iter().map(|c| -c).collect())
    }
}

/// Renders as a signed sum like `e1-e4` or `2e2`.
impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let coef = if mag == q(1) {
                String::new()
            } else if mag.is_integer() {
                mag.to_string()
            } else {
                format!("({})", mag)
            };
            write!(f, "{sign}{coef}e{}", i + 1)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Root({self})")
    }
}

fn check_dim(a: &Root, b: &Root) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

pub fn inner(a: &Root, b: &Root) -> Result<Q> {
    check_dim(a, b)?;
    Ok(a.coords.iter().zip(&b.coords).map(|(x, y)| x * y).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
}

impl Series {
    pub fn parse(s: &str) -> Result<Series> {
        match s.trim() {
            "A" | "a" => Ok(Series::A),
            "B" | "b" => Ok(Series::B),
            "C" | "c" => Ok(Series::C),
            "D" | "d" => Ok(Series::D),
            other => Err(Error::UnsupportedSeries(other.to_string())),
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The seven parity families, each carrying its own `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "A2n+1")]
    AOdd,
    #[serde(rename = "A2n")]
    AEven,
    #[serde(rename = "B2n+1")]
    BOdd,
    #[serde(rename = "B2n")]
    BEven,
    #[serde(rename = "Cn")]
    C,
    #[serde(rename = "D2n+1")]
    DOdd,
    #[serde(rename = "D2n")]
    DEven,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::AOdd,
        Family::AEven,
        Family::BOdd,
        Family::BEven,
        Family::C,
        Family::DOdd,
        Family::DEven,
    ];

    pub fn series(self) -> Series {
        match self {
            Family::AOdd | Family::AEven => Series::A,
            Family::BOdd | Family::BEven => Series::B,
            Family::C => Series::C,
            Family::DOdd | Family::DEven => Series::D,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Family::AOdd => "A2n+1",
            Family::AEven => "A2n",
            Family::BOdd => "B2n+1",
            Family::BEven => "B2n",
            Family::C => "Cn",
            Family::DOdd => "D2n+1",
            Family::DEven => "D2n",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.tag() == s.trim())
            .ok_or_else(|| Error::UnsupportedSeries(s.to_string()))
    }

    pub fn rank(self, n: usize) -> usize {
        match self {
            Family::AOdd | Family::BOdd | Family::DOdd => 2 * n + 1,
            Family::AEven | Family::BEven | Family::DEven => 2 * n,
            Family::C => n,
        }
    }

    /// Smallest admissible `n`.
    pub fn min_n(self) -> usize {
        match self {
            Family::AOdd | Family::BOdd => 0,
            Family::AEven | Family::BEven | Family::C => 1,
            Family::DOdd | Family::DEven => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RankParams {
    pub family: Family,
    pub n: usize,
}

impl RankParams {
    pub fn new(family: Family, n: usize) -> Result<Self> {
        let p = RankParams { family, n };
        if n < family.min_n() {
            let min = family.rank(family.min_n());
            let reason = match family.series() {
                Series::D => "D2 and D3 are not simple of type D; the fork needs rank at least 4",
                Series::A => "type A needs at least one simple root",
                _ => "rank must be positive",
            };
            return Err(Error::RankTooSmall {
                family: family.tag().to_string(),
                rank: family.rank(n),
                min,
                reason: reason.to_string(),
            });
        }
        Ok(p)
    }

    /// Picks the parity family for a series and Lie rank.
    pub fn from_series_rank(series: Series, rank: usize) -> Result<Self> {
        let (family, n) = match series {
            Series::A if rank % 2 == 1 => (Family::AOdd, (rank - 1) / 2),
            Series::A => (Family::AEven, rank / 2),
            Series::B if rank % 2 == 1 => (Family::BOdd, (rank - 1) / 2),
            Series::B => (Family::BEven, rank / 2),
            Series::C => (Family::C, rank),
            Series::D if rank % 2 == 1 => (Family::DOdd, (rank - 1) / 2),
            Series::D => (Family::DEven, rank / 2),
        };
        if rank == 0 || (series == Series::D && rank < 4) {
            let min = if series == Series::D { 4 } else { 1 };
            return Err(Error::RankTooSmall {
                family: series.to_string(),
                rank,
                min,
                reason: if series == Series::D {
                    "D2 and D3 are not simple of type D; the fork needs rank at least 4".into()
                } else {
                    "rank must be positive".into()
                },
            });
        }
        RankParams::new(family, n)
    }

    pub fn series(&self) -> Series {
        self.family.series()
    }

    pub fn rank(&self) -> usize {
        self.family.rank(self.n)
    }

    pub fn ambient_dim(&self) -> usize {
        match self.series() {
            Series::A => self.rank() + 1,
            _ => self.rank(),
        }
    }

    /// Simple-root indices in enumeration order.
    pub fn indices(&self) -> Vec<i32> {
        let n = self.n as i32;
        match self.family {
            Family::AOdd => (-n..=n).collect(),
            Family::AEven => (-n..=-1).chain(1..=n).collect(),
            _ => (1..=self.rank() as i32).collect(),
        }
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.series(), self.rank())
    }
}

impl fmt::Display for RankParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleRoot {
    pub index: i32,
    pub root: Root,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemKind {
    Classical(RankParams),
    Raw,
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    kind: SystemKind,
    dim: usize,
    roots: Vec<Root>,
    root_set: HashSet<Root>,
    positives: Vec<Root>,
    simple: Vec<SimpleRoot>,
    gram_inv: Option<QMatrix>,
    pos_coeffs: HashMap<Root, Vec<i64>>,
}

fn simple_roots(p: &RankParams) -> Vec<SimpleRoot> {
    let dim = p.ambient_dim();
    let l = p.rank();
    let n = p.n as i32;
    p.indices()
        .into_iter()
        .map(|k| {
            let root = match p.family {
                Family::AOdd => {
                    let pos = (k + n) as usize;
                    Root::pair(dim, pos, pos + 1, -1)
                }
                Family::AEven => {
                    let pos = if k < 0 { n + k } else { n + k - 1 } as usize;
                    Root::pair(dim, pos, pos + 1, -1)
                }
                _ => {
                    let k = k as usize;
                    match (p.series(), k) {
                        (Series::B, 1) => Root::basis(dim, l - 1, 1),
                        (Series::C, 1) => Root::basis(dim, l - 1, 2),
                        (Series::D, 1) => Root::pair(dim, l - 2, l - 1, -1),
                        (Series::D, 2) => Root::pair(dim, l - 2, l - 1, 1),
                        _ => Root::pair(dim, l - k, l - k + 1, -1),
                    }
                }
            };
            SimpleRoot { index: k, root }
        })
        .collect()
}

fn classical_positives(p: &RankParams) -> Vec<Root> {
    let dim = p.ambient_dim();
    let mut out = Vec::new();
    for i in 0..dim {
        for j in i + 1..dim {
            out.push(Root::pair(dim, i, j, -1));
            if p.series() != Series::A {
                out.push(Root::pair(dim, i, j, 1));
            }
        }
        match p.series() {
            Series::B => out.push(Root::basis(dim, i, 1)),
            Series::C => out.push(Root::basis(dim, i, 2)),
            _ => {}
        }
    }
    out
}

pub fn build_root_system(series: Series, params: RankParams) -> Result<RootSystem> {
    if params.series() != series {
        return Err(Error::UnsupportedSeries(format!(
            "{} with family {}",
            series,
            params.family.tag()
        )));
    }
    let params = RankParams::new(params.family, params.n)?;
    let positives = classical_positives(&params);
    let simple = simple_roots(&params);
    let k = simple.len();
    let mut gram = QMatrix::zeros(k, k);
    for (i, a) in simple.iter().enumerate() {
        for (j, b) in simple.iter().enumerate() {
            gram.set(i, j, inner(&a.root, &b.root)?);
        }
    }
    let mut gram_inv = QMatrix::zeros(k, k);
    for j in 0..k {
        let mut e = vec![Q::zero(); k];
        e[j] = q(1);
        let col = gram
            .solve(&e)?
            .ok_or_else(|| Error::Invariant("simple roots are linearly dependent".into()))?;
        for (i, v) in col.into_iter().enumerate() {
            gram_inv.set(i, j, v);
        }
    }
    let sys = assemble(
        SystemKind::Classical(params),
        params.ambient_dim(),
        positives,
        simple,
        Some(gram_inv),
    );
    sys.check_invariants()?;
    Ok(sys)
}

/// Convenience constructor from a series and Lie rank.
pub fn build(series: Series, rank: usize) -> Result<RootSystem> {
    build_root_system(series, RankParams::from_series_rank(series, rank)?)
}

fn assemble(
    kind: SystemKind,
    dim: usize,
    mut positives: Vec<Root>,
    simple: Vec<SimpleRoot>,
    gram_inv: Option<QMatrix>,
) -> RootSystem {
    positives.sort();
    positives.dedup();
    let mut roots: Vec<Root> = positives.iter().flat_map(|r| [r.clone(), -r]).collect();
    roots.sort();
    let root_set = roots.iter().cloned().collect();
    let mut sys = RootSystem {
        kind,
        dim,
        roots,
        root_set,
        positives,
        simple,
        gram_inv,
        pos_coeffs: HashMap::new(),
    };
    let coeffs = sys
        .positives
        .iter()
        .filter_map(|r| {
            let c = sys.simple_coefficients(r)?;
            let ints = c
                .iter()
                .map(|x| x.is_integer().then(|| x.to_integer().try_into().ok()).flatten())
                .collect::<Option<Vec<i64>>>()?;
            Some((r.clone(), ints))
        })
        .collect();
    sys.pos_coeffs = coeffs;
    sys
}

impl RootSystem {
    /// Ingests an explicit root list; only closure under negation is checked.
    pub fn from_raw(vectors: Vec<Root>) -> Result<RootSystem> {
        let dim = vectors.first().map_or(0, Root::dim);
        let set: HashSet<Root> = vectors.iter().cloned().collect();
        for v in &vectors {
            check_dim(&vectors[0], v)?;
            if v.is_zero() {
                return Err(Error::Invariant("zero vector in root list".into()));
            }
            if !set.contains(&-v) {
                return Err(Error::Invariant(format!("{v} present but its negative is not")));
            }
        }
        let positives = set.into_iter().filter(Root::is_lex_positive).collect();
        Ok(assemble(SystemKind::Raw, dim, positives, Vec::new(), None))
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn params(&self) -> Option<RankParams> {
        match self.kind {
            SystemKind::Classical(p) => Some(p),
            SystemKind::Raw => None,
        }
    }

    pub fn series(&self) -> Option<Series> {
        self.params().map(|p| p.series())
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn positives(&self) -> &[Root] {
        &self.positives
    }

    pub fn simple(&self) -> &[SimpleRoot] {
        &self.simple
    }

    pub fn simple_root(&self, index: i32) -> Option<&Root> {
        self.simple.iter().find(|s| s.index == index).map(|s| &s.root)
    }

    pub fn is_root(&self, v: &Root) -> Result<bool> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        Ok(self.root_set.contains(v))
    }

    pub fn is_positive(&self, v: &Root) -> bool {
        self.root_set.contains(v) && self.positives.binary_search(v).is_ok()
    }

    /// True iff neither `a + b` nor `a - b` is a root; `a = ±b` gives false.
    pub fn strongly_orthogonal(&self, a: &Root, b: &Root) -> Result<bool> {
        check_dim(a, b)?;
        if a == b || a == &-b {
            return Ok(false);
        }
        let so = !self.is_root(&a.try_add(b)?)? && !self.is_root(&a.try_sub(b)?)?;
        if so && self.root_set.contains(a) && self.root_set.contains(b) && !inner(a, b)?.is_zero() {
            return Err(Error::Invariant(format!(
                "{a} and {b} are strongly orthogonal but not orthogonal"
            )));
        }
        Ok(so)
    }

    /// Coefficients of `v` in the simple roots, if `v` lies in their span.
    pub fn simple_coefficients(&self, v: &Root) -> Option<Vec<Q>> {
        let gi = self.gram_inv.as_ref()?;
        let rhs: Vec<Q> = self
            .simple
            .iter()
            .map(|s| inner(v, &s.root).ok())
            .collect::<Option<_>>()?;
        let k = rhs.len();
        let c: Vec<Q> = (0..k).map(|i| (0..k).map(|j| gi.get(i, j) * &rhs[j]).sum()).collect();
        let back = self.combine(&c).ok()?;
        (back == *v).then_some(c)
    }

    /// `Σ c_i ψ_i` in enumeration order.
    pub fn combine(&self, c: &[Q]) -> Result<Root> {
        if c.len() != self.simple.len() {
            return Err(Error::DimensionMismatch {
                expected: self.simple.len(),
                found: c.len(),
            });
        }
        let mut out = Root::zero(self.dim);
        for (ci, s) in c.iter().zip(&self.simple) {
            out = out.try_add(&s.root.scale(ci))?;
        }
        Ok(out)
    }

    /// `a >= b` in the simple-root partial order.
    pub fn dominates(&self, a: &Root, b: &Root) -> bool {
        if let (Some(ca), Some(cb)) = (self.pos_coeffs.get(a), self.pos_coeffs.get(b)) {
            return ca.iter().zip(cb).all(|(x, y)| x >= y);
        }
        a.try_sub(b)
            .ok()
            .and_then(|d| self.simple_coefficients(&d))
            .is_some_and(|c| c.iter().all(|x| !x.is_negative()))
    }

    /// `A_ij = 2<ψ_i, ψ_j> / <ψ_j, ψ_j>` in enumeration order.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        self.simple
            .iter()
            .map(|a| {
                self.simple
                    .iter()
                    .map(|b| {
                        let v = q(2) * inner(&a.root, &b.root).unwrap() / b.root.norm_sq();
                        v.to_integer().try_into().unwrap_or(i64::MAX)
                    })
                    .collect()
            })
            .collect()
    }

    fn check_invariants(&self) -> Result<()> {
        let pos: HashSet<&Root> = self.positives.iter().collect();
        for r in &self.roots {
            if pos.contains(r) == pos.contains(&-r) {
                return Err(Error::Invariant(format!("{r}: positivity split broken")));
            }
        }
        for r in &self.positives {
            let c = self
                .simple_coefficients(r)
                .ok_or_else(|| Error::Invariant(format!("{r} not in simple span")))?;
            if c.iter().any(|x| x.is_negative() || !x.is_integer()) {
                return Err(Error::Invariant(format!("{r} not a nonnegative integer combination")));
            }
        }
        for a in &self.simple {
            for b in &self.simple {
                if a.index != b.index && inner(&a.root, &b.root)?.is_positive() {
                    return Err(Error::Invariant("simple roots at an acute angle".into()));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> RootSystemJson {
        RootSystemJson {
            series: self.series().map(|s| s.to_string()),
            params: self.params(),
            simple: self
                .simple
                .iter()
                .map(|s| SimpleJson {
                    index: s.index,
                    coords: s.root.to_strings(),
                })
                .collect(),
            positives: self.positives.iter().map(Root::to_strings).collect(),
        }
    }

    pub fn from_json(j: &RootSystemJson) -> Result<RootSystem> {
        match (&j.series, j.params) {
            (Some(s), Some(p)) => build_root_system(Series::parse(s)?, p),
            _ => {
                let pos = j
                    .positives
                    .iter()
                    .map(|c| Root::from_strings(c))
                    .collect::<Result<Vec<_>>>()?;
                let all = pos.iter().flat_map(|r| [r.clone(), -r]).collect();
                RootSystem::from_raw(all)
            }
        }
    }
}

/// Restricts to `{γ : 2γ ∉ Δ}`.
pub fn nonmultipliable(system: &RootSystem) -> RootSystem {
    let keep: BTreeSet<Root> = system
        .positives
        .iter()
        .filter(|g| !system.root_set.contains(&g.scale(&q(2))))
        .cloned()
        .collect();
    if keep.len() == system.positives.len() {
        return system.clone();
    }
    assemble(
        SystemKind::Raw,
        system.dim,
        keep.into_iter().collect(),
        Vec::new(),
        None,
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleJson {
    pub index: i32,
    pub coords: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSystemJson {
    pub series: Option<String>,
    pub params: Option<RankParams>,
    pub simple: Vec<SimpleJson>,
    pub positives: Vec<Vec<String>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fam(f: Family, n: usize) -> RootSystem {
        build_root_system(f.series(), RankParams::new(f, n).unwrap()).unwrap()
    }

    fn classical_count(s: Series, l: usize) -> usize {
        match s {
            Series::A => l * (l + 1) / 2,
            Series::B | Series::C => l * l,
            Series::D => l * (l - 1),
        }
    }

    #[test]
    fn a3_counts() {
        let s = build(Series::A, 3).unwrap();
        assert_eq!(s.roots().len(), 12);
        assert_eq!(s.positives().len(), 6);
        let idx: Vec<i32> = s.simple().iter().map(|x| x.index).collect();
        assert_eq!(idx, vec![-1, 0, 1]);
        assert_eq!(s.simple_root(0).unwrap(), &Root::from_ints(&[0, 1, -1, 0]));
    }

    #[test]
    fn c2_enumeration() {
        let s = build(Series::C, 2).unwrap();
        let mut want = vec![
            Root::from_ints(&[2, 0]),
            Root::from_ints(&[0, 2]),
            Root::from_ints(&[1, 1]),
            Root::from_ints(&[1, -1]),
        ];
        want.sort();
        assert_eq!(s.positives(), &want[..]);
        assert_eq!(s.simple_root(1).unwrap(), &Root::from_ints(&[0, 2]));
        assert_eq!(s.simple_root(2).unwrap(), &Root::from_ints(&[1, -1]));
    }

    #[test]
    fn b2_enumeration() {
        let s = build(Series::B, 2).unwrap();
        assert_eq!(s.simple_root(1).unwrap(), &Root::from_ints(&[0, 1]));
        assert_eq!(s.simple_root(2).unwrap(), &Root::from_ints(&[1, -1]));
    }

    #[test]
    fn a_even_center_nodes() {
        let s = build(Series::A, 4).unwrap();
        // ψ_{-1} sits immediately left of ψ_1.
        assert_eq!(s.simple_root(-1).unwrap(), &Root::from_ints(&[0, 1, -1, 0, 0]));
        assert_eq!(s.simple_root(1).unwrap(), &Root::from_ints(&[0, 0, 1, -1, 0]));
        assert_eq!(s.simple_root(-2).unwrap(), &Root::from_ints(&[1, -1, 0, 0, 0]));
    }

    #[test]
    fn rejects_small_d() {
        for l in [2, 3] {
            let e = build(Series::D, l).unwrap_err();
            assert!(matches!(e, Error::RankTooSmall { min: 4, .. }), "{e}");
        }
        assert!(Series::parse("E").is_err());
        assert!(build(Series::A, 0).is_err());
    }

    #[test]
    fn counts_match_classical() {
        for s in [Series::A, Series::B, Series::C, Series::D] {
            let lo = if s == Series::D { 4 } else { 1 };
            for l in lo..=9 {
                let sys = build(s, l).unwrap();
                assert_eq!(sys.positives().len(), classical_count(s, l), "{s}{l}");
                assert_eq!(sys.roots().len(), 2 * classical_count(s, l));
            }
        }
    }

    // Expected diagram edges as (i, j, bond multiplicity), with the first
    // endpoint of a multiple bond being the longer root.
    fn diagram(p: &RankParams) -> Vec<(i32, i32, i64)> {
        let l = p.rank() as i32;
        let idx = p.indices();
        match p.series() {
            Series::A => idx.windows(2).map(|w| (w[0], w[1], 1)).collect(),
            Series::B => {
                let mut e: Vec<_> = (2..l).map(|k| (k, k + 1, 1)).collect();
                if l >= 2 {
                    e.push((2, 1, 2));
                }
                e
            }
            Series::C => {
                let mut e: Vec<_> = (2..l).map(|k| (k, k + 1, 1)).collect();
                if l >= 2 {
                    e.push((1, 2, 2));
                }
                e
            }
            Series::D => {
                let mut e: Vec<_> = (3..l).map(|k| (k, k + 1, 1)).collect();
                e.push((1, 3, 1));
                e.push((2, 3, 1));
                e
            }
        }
    }

    #[test]
    fn cartan_matches_diagram() {
        for s in [Series::A, Series::B, Series::C, Series::D] {
            let lo = if s == Series::D { 4 } else { 1 };
            for l in lo..=8 {
                let sys = build(s, l).unwrap();
                let p = sys.params().unwrap();
                let idx = p.indices();
                let pos = |k: i32| idx.iter().position(|&x| x == k).unwrap();
                let mut want = vec![vec![0i64; idx.len()]; idx.len()];
                for i in 0..idx.len() {
                    want[i][i] = 2;
                }
                for (a, b, m) in diagram(&p) {
                    // a is the long end: A_ab = -m, A_ba = -1.
                    want[pos(a)][pos(b)] = -m;
                    want[pos(b)][pos(a)] = -1;
                }
                assert_eq!(sys.cartan_matrix(), want, "{s}{l}");
            }
        }
    }

    #[test]
    fn strong_orthogonality_examples() {
        let s = build(Series::A, 3).unwrap();
        let a = Root::from_ints(&[1, 0, 0, -1]);
        let b = Root::from_ints(&[0, 1, -1, 0]);
        assert!(s.strongly_orthogonal(&a, &b).unwrap());
        assert!(inner(&a, &b).unwrap().is_zero());
        assert!(!s.strongly_orthogonal(&a, &a).unwrap());
        let c = Root::from_ints(&[1, -1, 0, 0]);
        let d = Root::from_ints(&[0, 1, -1, 0]);
        assert!(!s.strongly_orthogonal(&c, &d).unwrap());
        assert!(s.strongly_orthogonal(&c, &Root::from_ints(&[1, 0])).is_err());
    }

    #[test]
    fn strong_implies_orthogonal_all_pairs() {
        for s in [Series::A, Series::B, Series::C, Series::D] {
            let lo = if s == Series::D { 4 } else { 1 };
            for l in lo..=8 {
                let sys = build(s, l).unwrap();
                for a in sys.roots() {
                    for b in sys.roots() {
                        if sys.strongly_orthogonal(a, b).unwrap() {
                            assert!(inner(a, b).unwrap().is_zero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn nonmultipliable_cases() {
        let s = fam(Family::C, 3);
        assert_eq!(nonmultipliable(&s).positives(), s.positives());
        let raw = RootSystem::from_raw(vec![
            Root::from_ints(&[1]),
            Root::from_ints(&[-1]),
            Root::from_ints(&[2]),
            Root::from_ints(&[-2]),
        ])
        .unwrap();
        let d0 = nonmultipliable(&raw);
        assert_eq!(d0.roots(), &[Root::from_ints(&[-2]), Root::from_ints(&[2])]);
        assert!(RootSystem::from_raw(vec![Root::from_ints(&[1])]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = fam(Family::DEven, 2);
        let j = s.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back: RootSystemJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, j);
        assert_eq!(RootSystem::from_json(&back).unwrap().positives(), s.positives());
        assert!(text.contains("\"D2n\""));
    }

    fn raw_vectors() -> impl Strategy<Value = Vec<Root>> {
        let v = prop::collection::vec(-2i64..=2, 2);
        prop::collection::vec(v, 1..8).prop_map(|vs| {
            let mut out = Vec::new();
            for c in vs {
                let r = Root::from_ints(&c);
                if !r.is_zero() {
                    out.push(-&r);
                    out.push(r);
                }
            }
            out
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn nonmultipliable_idempotent(vs in raw_vectors()) {
            prop_assume!(!vs.is_empty());
            let s = RootSystem::from_raw(vs).unwrap();
            let once = nonmultipliable(&s);
            let twice = nonmultipliable(&once);
            prop_assert_eq!(once.roots(), twice.roots());
        }
    }
}
