//! Derivations of vector bundles in a frame, derivations of the line bundle
//! `L_{E*}` in the `Vol_u` frame, rank-one multivector pairs and the
//! isomorphism between fiber-wise linear operators and homogeneous
//! derivations of `L_{E*}`.

mod iso;
mod pair;

use std::fmt;

use crate::error::{Error, Result};
use crate::multivec::laplacian::{determinant, Matrix};
use crate::multivec::PolyVectorField;
use crate::symcore::{Chart, Poly, Space};

pub use iso::{a_inverse, a_iso, a_iso_closed_form, ad_field, phi_delta, psi};
pub use pair::{LMultivector, LPair};

/// A derivation of a rank-`r` bundle over the base, written in a frame:
/// `D(s)^a = X(s^a) + Σ_b M^a_b s^b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrameDerivation {
    chart: Chart,
    field: Vec<Poly>,
    matrix: Matrix,
}

fn base_function(chart: Chart, p: &Poly, what: &str) -> Result<Poly> {
    chart.ensure_same(&p.chart())?;
    if !p.is_base_only() {
        return Err(Error::NotHomogeneous(format!(
            "{what} {p} is not a base function"
        )));
    }
    p.with_space(Space::E)
}

impl FrameDerivation {
    pub fn new(chart: Chart, field: Vec<Poly>, matrix: Matrix) -> Result<Self> {
        if field.len() != chart.base_dim {
            return Err(Error::RankMismatch(format!(
                "{} field components for base dimension {}",
                field.len(),
                chart.base_dim
            )));
        }
        let r = matrix.len();
        if r == 0 || matrix.iter().any(|row| row.len() != r) {
            return Err(Error::RankMismatch(
                "the matrix must be square and nonempty".into(),
            ));
        }
        let field = field
            .iter()
            .map(|p| base_function(chart, p, "field component"))
            .collect::<Result<_>>()?;
        let matrix = matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| base_function(chart, p, "matrix entry"))
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(FrameDerivation {
            chart,
            field,
            matrix,
        })
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn field(&self) -> &[Poly] {
        &self.field
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// The symbol `l_D(f) = Σ X^i ∂f/∂x_i`.
    pub fn symbol_apply(&self, f: &Poly) -> Result<Poly> {
        let f = base_function(self.chart, f, "argument")?;
        let mut out = Poly::zero(self.chart, Space::E);
        for (i, x) in self.field.iter().enumerate() {
            out = &out + &(x * &f.partial(crate::Var::x(i + 1))?);
        }
        Ok(out)
    }

    pub fn apply(&self, section: &[Poly]) -> Result<Vec<Poly>> {
        if section.len() != self.rank() {
            return Err(Error::RankMismatch(format!(
                "section with {} components for rank {}",
                section.len(),
                self.rank()
            )));
        }
        let section = section
            .iter()
            .map(|p| base_function(self.chart, p, "section component"))
            .collect::<Result<Vec<_>>>()?;
        self.matrix
            .iter()
            .zip(&section)
            .map(|(row, s)| {
                let mut out = self.symbol_apply(s)?;
                for (m, t) in row.iter().zip(&section) {
                    out = &out + &(m * t);
                }
                Ok(out)
            })
            .collect()
    }

    /// `⟨D*φ, e⟩ = l_D⟨φ, e⟩ − ⟨φ, De⟩`: same field, matrix `−Mᵀ`.
    pub fn dual(&self) -> FrameDerivation {
        let r = self.rank();
        let matrix = (0..r)
            .map(|a| (0..r).map(|b| -&self.matrix[b][a]).collect())
            .collect();
        FrameDerivation {
            chart: self.chart,
            field: self.field.clone(),
            matrix,
        }
    }

    pub fn trace(&self) -> Poly {
        (0..self.rank()).fold(Poly::zero(self.chart, Space::E), |acc, a| {
            &acc + &self.matrix[a][a]
        })
    }

    /// The induced derivation of the top exterior power, in the frame
    /// `e_1 ∧ ⋯ ∧ e_r`.
    pub fn top_power_action(&self) -> FrameDerivation {
        FrameDerivation {
            chart: self.chart,
            field: self.field.clone(),
            matrix: vec![vec![self.trace()]],
        }
    }

    /// `D(s_1 ∧ ⋯ ∧ s_r) = Σ_i s_1 ∧ ⋯ ∧ Ds_i ∧ ⋯ ∧ s_r`, as the coefficient
    /// of `e_1 ∧ ⋯ ∧ e_r`. The sections are the columns.
    pub fn wedge_action(&self, sections: &[Vec<Poly>]) -> Result<Poly> {
        let r = self.rank();
        if sections.len() != r {
            return Err(Error::RankMismatch(format!(
                "{} sections for rank {r}",
                sections.len()
            )));
        }
        let images = sections
            .iter()
            .map(|s| self.apply(s))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Poly::zero(self.chart, Space::E);
        for i in 0..r {
            let columns: Vec<&Vec<Poly>> = (0..r)
                .map(|j| if j == i { &images[j] } else { &sections[j] })
                .collect();
            let m: Matrix = (0..r)
                .map(|row| {
                    columns
                        .iter()
                        .map(|c| c[row].with_space(Space::E))
                        .collect()
                })
                .collect::<Result<_>>()?;
            out = &out + &determinant(&m);
        }
        Ok(out)
    }

    /// `[D1, D2]`: field bracket, matrix `X1(M2) − X2(M1) + [M1, M2]`.
    pub fn commutator(&self, other: &FrameDerivation) -> Result<FrameDerivation> {
        self.chart.ensure_same(&other.chart)?;
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch(format!(
                "ranks {} and {}",
                self.rank(),
                other.rank()
            )));
        }
        let r = self.rank();
        let field = self
            .field
            .iter()
            .zip(&other.field)
            .map(|(a, b)| Ok(&self.symbol_apply(b)? - &other.symbol_apply(a)?))
            .collect::<Result<_>>()?;
        let mut matrix = vec![vec![Poly::zero(self.chart, Space::E); r]; r];
        for a in 0..r {
            for b in 0..r {
                let mut e = &self.symbol_apply(&other.matrix[a][b])?
                    - &other.symbol_apply(&self.matrix[a][b])?;
                for k in 0..r {
                    e = &e + &(&self.matrix[a][k] * &other.matrix[k][b]);
                    e = &e - &(&other.matrix[a][k] * &self.matrix[k][b]);
                }
                matrix[a][b] = e;
            }
        }
        Ok(FrameDerivation {
            chart: self.chart,
            field,
            matrix,
        })
    }
}

/// Pairing of a section of `E*` with a section of `E`.
pub fn pairing(phi: &[Poly], e: &[Poly]) -> Result<Poly> {
    let chart = phi
        .first()
        .or(e.first())
        .map(Poly::chart)
        .ok_or(Error::RankMismatch("empty section".into()))?;
    phi.iter()
        .zip(e)
        .try_fold(Poly::zero(chart, Space::E), |acc, (a, b)| {
            Ok(&acc + &a.with_space(Space::E)?.try_mul(&b.with_space(Space::E)?)?)
        })
}

/// A derivation of `L_{E*}` in the frame `Vol_u`:
/// `D(f·Vol_u) = (W(f) + c·f)·Vol_u`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LDerivation {
    field: PolyVectorField,
    mult: Poly,
}

impl LDerivation {
    pub fn new(field: PolyVectorField, mult: Poly) -> Result<Self> {
        field.chart().ensure_same(&mult.chart())?;
        mult.space().ensure(&[Space::Estar])?;
        Ok(LDerivation { field, mult })
    }

    pub fn zero(chart: Chart) -> Self {
        LDerivation {
            field: PolyVectorField::zero(chart),
            mult: Poly::zero(chart, Space::Estar),
        }
    }

    pub fn chart(&self) -> Chart {
        self.field.chart()
    }

    pub fn field(&self) -> &PolyVectorField {
        &self.field
    }

    pub fn mult(&self) -> &Poly {
        &self.mult
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero() && self.mult.is_zero()
    }

    pub fn apply(&self, f: &Poly) -> Result<Poly> {
        f.space().ensure(&[Space::Estar])?;
        Ok(&self.field.apply(f)? + &self.mult.try_mul(f)?)
    }

    /// `([W1, W2], W1(c2) − W2(c1))`.
    pub fn commutator(&self, other: &LDerivation) -> Result<LDerivation> {
        self.chart().ensure_same(&other.chart())?;
        Ok(LDerivation {
            field: self.field.bracket(&other.field)?,
            mult: &self.field.apply(&other.mult)? - &other.field.apply(&self.mult)?,
        })
    }

    pub fn try_add(&self, other: &LDerivation) -> Result<LDerivation> {
        Ok(LDerivation {
            field: self.field.try_add(&other.field)?,
            mult: self.mult.try_add(&other.mult)?,
        })
    }

    /// `F·D`, for a polynomial `F` on `E*`.
    pub fn left_mul(&self, f: &Poly) -> Result<LDerivation> {
        Ok(LDerivation {
            field: self.field.left_mul(f)?,
            mult: f.try_mul(&self.mult)?,
        })
    }

    /// True when `W` has degree `d` and `c` has fiber degree `d`; zero parts
    /// are homogeneous of every degree.
    pub fn is_homogeneous_of(&self, d: i64) -> bool {
        let field_ok = self.field.is_zero() || self.field.homogeneous_degree() == Some(d);
        let mult_ok =
            self.mult.is_zero() || self.mult.homogeneous_fiber_degree().map(i64::from) == Some(d);
        field_ok && mult_ok
    }

    /// The degree if `self` is nonzero and homogeneous.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let d = if self.field.is_zero() {
            i64::from(self.mult.homogeneous_fiber_degree()?)
        } else {
            self.field.homogeneous_degree()?
        };
        self.is_homogeneous_of(d).then_some(d)
    }
}

impl fmt::Display for LDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W = {}; c = {}", self.field, self.mult)
    }
}
