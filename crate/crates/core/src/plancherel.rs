//! Pfaffians of the layer forms and the resulting Plancherel density.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nilalg::{Layer, NilpotentAlgebra};
use crate::rational::{format_rational, QMatrix, Q};

/// `λ_r` coefficients against the dual of `x_{β_r}`, one per layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiCenterFunctional {
    pub lambda: Vec<Q>,
}

impl QuasiCenterFunctional {
    pub fn new(lambda: Vec<Q>) -> Self {
        QuasiCenterFunctional { lambda }
    }

    pub fn get(&self, r: usize) -> Q {
        self.lambda.get(r - 1).cloned().unwrap_or_else(Q::zero)
    }
}

/// `M[i][j] = λ_r([v_i, v_j])` on the layer's ordered `v` basis.
pub fn b_lambda_matrix(alg: &NilpotentAlgebra, layer: &Layer, lambda_r: &Q) -> Result<QMatrix> {
    let k = layer.v_indices.len();
    let mut m = QMatrix::zeros(k, k);
    for (a, &i) in layer.v_indices.iter().enumerate() {
        for (b, &j) in layer.v_indices.iter().enumerate() {
            let c = alg.bracket(&alg.unit(i), &alg.unit(j))?;
            m.set(a, b, lambda_r * &c[layer.z_index]);
        }
    }
    if let Some((i, j)) = m.is_skew() {
        return Err(Error::NotSkew(i, j));
    }
    Ok(m)
}

fn minor(a: &QMatrix, drop: [usize; 2]) -> QMatrix {
    let keep: Vec<usize> = (0..a.rows()).filter(|i| !drop.contains(i)).collect();
    let mut m = QMatrix::zeros(keep.len(), keep.len());
    for (x, &i) in keep.iter().enumerate() {
        for (y, &j) in keep.iter().enumerate() {
            m.set(x, y, a.get(i, j).clone());
        }
    }
    m
}

fn pf_expand(a: &QMatrix) -> Q {
    let n = a.rows();
    if n == 0 {
        return Q::one();
    }
    let mut total = Q::zero();
    for j in 1..n {
        let aij = a.get(0, j);
        if aij.is_zero() {
            continue;
        }
        let term = aij * pf_expand(&minor(a, [0, j]));
        if j % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn pf_eliminate(a: &QMatrix) -> Q {
    let n = a.rows();
    let mut m: Vec<Vec<Q>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut pf = Q::one();
    let mut k = 0;
    while k + 1 < n {
        let Some(p) = (k + 1..n).find(|&j| !m[k][j].is_zero()) else {
            return Q::zero();
        };
        if p != k + 1 {
            m.swap(p, k + 1);
            for row in m.iter_mut() {
                row.swap(p, k + 1);
            }
            pf = -pf;
        }
        let piv = m[k][k + 1].clone();
        pf *= &piv;
        for i in k + 2..n {
            for j in k + 2..n {
                let t = (&m[k + 1][i] * &m[k][j] - &m[k][i] * &m[k + 1][j]) / &piv;
                m[i][j] += t;
            }
        }
        k += 2;
    }
    pf
}

/// Exact Pfaffian. Odd order gives zero and the empty matrix gives one.
pub fn pfaffian(a: &QMatrix) -> Result<Q> {
    if let Some((i, j)) = a.is_skew() {
        return Err(Error::NotSkew(i, j));
    }
    let n = a.rows();
    if n % 2 == 1 {
        return Ok(Q::zero());
    }
    let pf = if n <= 8 { pf_expand(a) } else { pf_eliminate(a) };
    debug_assert_eq!(&pf * &pf, a.determinant().unwrap());
    Ok(pf)
}

/// The elimination path regardless of size, exposed for cross-checks.
pub fn pfaffian_by_elimination(a: &QMatrix) -> Result<Q> {
    if let Some((i, j)) = a.is_skew() {
        return Err(Error::NotSkew(i, j));
    }
    if a.rows() % 2 == 1 {
        return Ok(Q::zero());
    }
    Ok(pf_eliminate(a))
}

/// `2^{Σd} Π d!`.
pub fn plancherel_constant(d_list: &[usize]) -> BigInt {
    let mut c = BigInt::one();
    for &d in d_list {
        c <<= d;
        for k in 2..=d {
            c *= k;
        }
    }
    c
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlancherelData {
    pub pf: Vec<Q>,
    pub product: Q,
    pub d_list: Vec<usize>,
    pub c: BigInt,
    pub in_t_star: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlancherelJson {
    pub pf: Vec<String>,
    pub product: String,
    pub c: String,
    pub in_t_star: bool,
}

impl PlancherelData {
    pub fn to_json(&self) -> PlancherelJson {
        PlancherelJson {
            pf: self.pf.iter().map(format_rational).collect(),
            product: format_rational(&self.product),
            c: self.c.to_string(),
            in_t_star: self.in_t_star,
        }
    }
}

/// Layers with `d_r = 0` contribute a factor of one.
pub fn plancherel_density(
    alg: &NilpotentAlgebra,
    layers: &[Layer],
    gamma: &QuasiCenterFunctional,
) -> Result<PlancherelData> {
    if gamma.lambda.len() > layers.len() {
        return Err(Error::DimensionMismatch {
            expected: layers.len(),
            found: gamma.lambda.len(),
        });
    }
    let mut pf = Vec::with_capacity(layers.len());
    for l in layers {
        let v = if l.d == 0 {
            Q::one()
        } else {
            let m = b_lambda_matrix(alg, l, &gamma.get(l.r))?;
            let p = pfaffian(&m)?;
            if &p * &p != m.determinant()? {
                return Err(Error::Invariant(format!("Pf^2 != det in layer {}", l.r)));
            }
            p
        };
        pf.push(v);
    }
    let product: Q = pf.iter().product();
    let d_list: Vec<usize> = layers.iter().map(|l| l.d).collect();
    Ok(PlancherelData {
        in_t_star: !product.is_zero(),
        c: plancherel_constant(&d_list),
        pf,
        product,
        d_list,
    })
}

/// Checks `Pf(s λ) = s^d Pf(λ)` for the given layer and scale.
pub fn homogeneity_holds(alg: &NilpotentAlgebra, layer: &Layer, lambda: &Q, s: &Q) -> Result<bool> {
    let base = pfaffian(&b_lambda_matrix(alg, layer, lambda)?)?;
    let scaled = pfaffian(&b_lambda_matrix(alg, layer, &(s * lambda))?)?;
    let mut f = Q::one();
    for _ in 0..layer.d {
        f *= s;
    }
    Ok(scaled == base * f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::decompose;
    use crate::nilalg::layer_subalgebras;
    use crate::rational::{q, qf};
    use crate::rootsys::{build, Series};
    use proptest::prelude::*;

    fn skew(n: usize, vals: &[i64]) -> QMatrix {
        let mut m = QMatrix::zeros(n, n);
        let mut it = vals.iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = q(*it.next().unwrap());
                m.set(i, j, v.clone());
                m.set(j, i, -v);
            }
        }
        m
    }

    #[test]
    fn small_cases() {
        assert_eq!(pfaffian(&QMatrix::zeros(0, 0)).unwrap(), q(1));
        assert_eq!(pfaffian(&QMatrix::zeros(3, 3)).unwrap(), q(0));
        assert_eq!(pfaffian(&skew(2, &[5])).unwrap(), q(5));
        // p12 p13 p14 p23 p24 p34
        let p = [2, 3, 5, 7, 11, 13];
        let want = 2 * 13 - 3 * 11 + 5 * 7;
        assert_eq!(pfaffian(&skew(4, &p)).unwrap(), q(want));
        assert_eq!(pfaffian_by_elimination(&skew(4, &p)).unwrap(), q(want));
        let mut bad = skew(2, &[1]);
        bad.set(1, 0, q(1));
        assert!(matches!(pfaffian(&bad), Err(Error::NotSkew(..))));
    }

    #[test]
    fn constants() {
        assert_eq!(plancherel_constant(&[1]), BigInt::from(2));
        assert_eq!(plancherel_constant(&[0, 2]), BigInt::from(8));
        assert_eq!(plancherel_constant(&[0, 1]), BigInt::from(2));
    }

    fn setup(s: Series, l: usize) -> (NilpotentAlgebra, Vec<Layer>) {
        let sys = build(s, l).unwrap();
        let alg = NilpotentAlgebra::realize(&sys).unwrap();
        let ls = layer_subalgebras(&alg, &decompose(&sys).unwrap()).unwrap();
        (alg, ls)
    }

    #[test]
    fn heisenberg_density() {
        let (alg, ls) = setup(Series::A, 2);
        for t in [-3, 1, 2] {
            let d = plancherel_density(&alg, &ls, &QuasiCenterFunctional::new(vec![q(t)])).unwrap();
            assert_eq!(d.product.clone() * d.product.clone(), q(t * t));
            assert_eq!(d.c, BigInt::from(2));
            assert!(d.in_t_star);
        }
        let d = plancherel_density(&alg, &ls, &QuasiCenterFunctional::new(vec![q(0)])).unwrap();
        assert!(!d.in_t_star);
        assert!(b_lambda_matrix(&alg, &ls[0], &q(0)).unwrap().is_zero());
    }

    #[test]
    fn a3_density() {
        let (alg, ls) = setup(Series::A, 3);
        let m = b_lambda_matrix(&alg, &ls[1], &q(1)).unwrap();
        assert_eq!(m.entries().filter(|(i, j, v)| i < j && !v.is_zero()).count(), 2);
        for (l1, l2) in [(q(1), q(1)), (q(5), qf(2, 3)), (q(0), q(-2))] {
            let d = plancherel_density(&alg, &ls, &QuasiCenterFunctional::new(vec![l1, l2.clone()])).unwrap();
            let p2 = &l2 * &l2;
            assert!(d.product == p2 || d.product == -p2);
            assert_eq!(d.c, BigInt::from(8));
            assert!(d.in_t_star);
        }
        let d = plancherel_density(&alg, &ls, &QuasiCenterFunctional::new(vec![q(1), q(0)])).unwrap();
        assert!(!d.in_t_star);
    }

    #[test]
    fn homogeneity_per_layer() {
        for (s, l) in [(Series::A, 5), (Series::C, 4), (Series::D, 5), (Series::B, 4)] {
            let (alg, ls) = setup(s, l);
            for layer in ls.iter().filter(|x| x.d > 0) {
                assert!(homogeneity_holds(&alg, layer, &qf(3, 2), &qf(-5, 7)).unwrap());
            }
        }
    }

    fn rand_skew() -> impl Strategy<Value = QMatrix> {
        (1usize..=10).prop_flat_map(|n| {
            prop::collection::vec((-9i64..=9, 1i64..=4), n * (n - 1) / 2).prop_map(move |v| {
                let mut m = QMatrix::zeros(n, n);
                let mut it = v.iter();
                for i in 0..n {
                    for j in i + 1..n {
                        let (a, b) = it.next().unwrap();
                        m.set(i, j, qf(*a, *b));
                        m.set(j, i, -qf(*a, *b));
                    }
                }
                m
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn pf_squared_is_det(m in rand_skew()) {
            let pf = pfaffian(&m).unwrap();
            prop_assert_eq!(&pf * &pf, m.determinant().unwrap());
            prop_assert_eq!(pfaffian_by_elimination(&m).unwrap(), pf);
        }

        #[test]
        fn t_star_scale_invariant(a in -5i64..=5, b in -5i64..=5, s in 1i64..=6) {
            let (alg, ls) = setup(Series::A, 3);
            let g = QuasiCenterFunctional::new(vec![q(a), q(b)]);
            let gs = QuasiCenterFunctional::new(vec![q(a * s), q(-b * s)]);
            let d1 = plancherel_density(&alg, &ls, &g).unwrap();
            let d2 = plancherel_density(&alg, &ls, &gs).unwrap();
            prop_assert_eq!(d1.in_t_star, d2.in_t_star);
        }
    }
}
