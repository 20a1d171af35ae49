use std::collections::BTreeMap;

use num_traits::One;

use crate::diffop::{DerivKey, DiffOp};
use crate::error::{Error, Result};
use crate::symcore::{int, Chart, MultiIndex, Poly, Rational, Space};

/// Christoffel-type table `Γ^k_{ij}(x)`, symmetric in `i, j`. Missing entries are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gamma {
    chart: Chart,
    entries: BTreeMap<(usize, usize, usize), Poly>,
}

impl Gamma {
    /// Entries are `((k, i, j), Γ^k_{ij})`, 1-based. The chart must have `m = n`.
    pub fn new(
        chart: Chart,
        entries: impl IntoIterator<Item = ((usize, usize, usize), Poly)>,
    ) -> Result<Self> {
        if chart.base_dim != chart.fiber_rank {
            return Err(Error::RankMismatch(format!(
                "a metric of this form needs fiber_rank = base_dim, got chart {chart}"
            )));
        }
        let n = chart.base_dim;
        let mut table = BTreeMap::new();
        for ((k, i, j), c) in entries {
            if [k, i, j].iter().any(|&l| l == 0 || l > n) {
                return Err(Error::IndexOutOfRange {
                    name: format!("Gamma^{k}_{i}{j}"),
                    offset: 0,
                    chart,
                });
            }
            chart.ensure_same(&c.chart())?;
            if !c.is_base_only() {
                return Err(Error::NotHomogeneous(format!(
                    "Gamma^{k}_{i}{j} = {c} depends on the fiber"
                )));
            }
            let c = c.with_space(Space::E)?;
            if !c.is_zero() {
                table.insert((k, i, j), c);
            }
        }
        let gamma = Gamma {
            chart,
            entries: table,
        };
        for k in 1..=n {
            for i in 1..=n {
                for j in (i + 1)..=n {
                    if gamma.get(k, i, j) != gamma.get(k, j, i) {
                        return Err(Error::AsymmetricGamma { k, i, j });
                    }
                }
            }
        }
        Ok(gamma)
    }

    pub fn zero(chart: Chart) -> Result<Self> {
        Gamma::new(chart, [])
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> Poly {
        self.entries
            .get(&(k, i, j))
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.chart, Space::E))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize), &Poly)> {
        self.entries.iter()
    }
}

pub(crate) type Matrix = Vec<Vec<Poly>>;

/// Cofactor expansion along the first row.
pub(crate) fn determinant(m: &Matrix) -> Poly {
    let size = m.len();
    let chart = m[0][0].chart();
    if size == 1 {
        return m[0][0].clone();
    }
    let mut acc = Poly::zero(chart, Space::E);
    for col in 0..size {
        if m[0][col].is_zero() {
            continue;
        }
        let minor: Matrix = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != col)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][col] * &determinant(&minor);
        acc = if col % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    acc
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let size = a.len();
    let chart = a[0][0].chart();
    (0..size)
        .map(|r| {
            (0..size)
                .map(|c| {
                    (0..size).fold(Poly::zero(chart, Space::E), |acc, k| {
                        &acc + &(&a[r][k] * &b[k][c])
                    })
                })
                .collect()
        })
        .collect()
}

/// The metric matrix and its claimed inverse.
fn metric(gamma: &Gamma) -> (Matrix, Matrix) {
    let chart = gamma.chart();
    let n = chart.base_dim;
    let zero = Poly::zero(chart, Space::E);
    let one = Poly::one(chart, Space::E);
    let gamma_p = |i: usize, j: usize| -> Poly {
        (1..=n).fold(zero.clone(), |acc, k| {
            &acc + &(&gamma.get(k, i, j) * &Poly::fiber(chart, Space::E, k))
        })
    };

    let mut g: Matrix = vec![vec![zero.clone(); 2 * n]; 2 * n];
    let mut g_inv: Matrix = g.clone();
    for i in 0..n {
        for j in 0..n {
            g[i][j] = gamma_p(i + 1, j + 1).scale(&int(-2));
            g_inv[n + i][n + j] = gamma_p(i + 1, j + 1).scale(&int(2));
        }
        g[i][n + i] = one.clone();
        g[n + i][i] = one.clone();
        g_inv[i][n + i] = one.clone();
        g_inv[n + i][i] = one.clone();
    }
    (g, g_inv)
}

/// `det g` of the fiber-wise linear metric, by cofactor expansion.
pub fn metric_determinant(gamma: &Gamma) -> Poly {
    determinant(&metric(gamma).0)
}

/// The Laplace–Beltrami operator of the fiber-wise linear metric
/// `g = dp_i ⊙ dx^i − Γ^k_{ij}(x) p_k dx^i ⊙ dx^j` on `T*M` (coordinates
/// `x = x_i`, `p = u_i`), with `a ⊙ b = a ⊗ b + b ⊗ a`.
///
/// In the ordered coordinates `(x, p)` the metric is `[[−2Γ·p, I], [I, 0]]`,
/// its inverse is `[[0, I], [I, 2Γ·p]]` and `det g = (−1)^n`. Both facts are
/// checked symbolically before the operator is assembled.
pub fn fwl_metric_laplacian(gamma: &Gamma) -> Result<DiffOp> {
    let chart = gamma.chart();
    let n = chart.base_dim;
    let (g, g_inv) = metric(gamma);

    let det = determinant(&g);
    match det.as_constant() {
        Some(c) if c != Rational::from_integer(0.into()) => {}
        _ => return Err(Error::NonConstantDeterminant(det.to_string())),
    }
    let product = matmul(&g, &g_inv);
    for (r, row) in product.iter().enumerate() {
        for (c, entry) in row.iter().enumerate() {
            let expected = if r == c { Rational::one() } else { int(0) };
            assert_eq!(
                entry.as_constant(),
                Some(expected),
                "g * g^-1 is not the identity"
            );
        }
    }

    // coordinate μ < n is x_{μ+1}, μ >= n is p_{μ-n+1}
    let key_of = |mus: &[usize]| {
        DerivKey::new(
            MultiIndex::new(mus.iter().filter(|&&m| m < n).map(|m| m + 1).collect()),
            MultiIndex::new(mus.iter().filter(|&&m| m >= n).map(|m| m - n + 1).collect()),
        )
    };
    let d = |p: &Poly, mu: usize| p.partial_multi(&key_of(&[mu]).base, &key_of(&[mu]).fiber);
    let mut terms = Vec::new();
    for mu in 0..2 * n {
        for nu in 0..2 * n {
            let entry = &g_inv[mu][nu];
            if !entry.is_zero() {
                terms.push((key_of(&[mu, nu]), entry.clone()));
                let div = d(entry, mu);
                if !div.is_zero() {
                    terms.push((key_of(&[nu]), div));
                }
            }
        }
    }
    let laplacian = DiffOp::from_terms(chart, Space::E, terms)?;
    assert!(
        laplacian.is_fwl(2)?,
        "metric Laplacian is not fiber-wise linear: {laplacian}"
    );
    Ok(laplacian)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_case_by_hand() {
        let chart = Chart::new(1, 1).unwrap();
        let lap = fwl_metric_laplacian(&Gamma::zero(chart).unwrap()).unwrap();
        let expected = DiffOp::monomial(
            &Poly::constant(chart, Space::E, int(2)),
            DerivKey::new(MultiIndex::single(1), MultiIndex::single(1)),
        )
        .unwrap();
        assert_eq!(lap, expected);
    }

    #[test]
    fn determinant_sign() {
        for n in 1..=3 {
            let chart = Chart::new(n, n).unwrap();
            let x1 = Poly::x(chart, Space::E, 1);
            let gamma = Gamma::new(chart, [((1, 1, 1), x1)]).unwrap();
            assert!(fwl_metric_laplacian(&gamma).unwrap().is_fwl(2).unwrap());
        }
    }

    #[test]
    fn asymmetric_gamma_rejected() {
        let chart = Chart::new(2, 2).unwrap();
        let one = Poly::one(chart, Space::E);
        let err = Gamma::new(chart, [((1, 1, 2), one)]).unwrap_err();
        assert_eq!(err, Error::AsymmetricGamma { k: 1, i: 1, j: 2 });
        assert!(matches!(
            Gamma::zero(Chart::new(2, 1).unwrap()),
            Err(Error::RankMismatch(_))
        ));
    }
}
