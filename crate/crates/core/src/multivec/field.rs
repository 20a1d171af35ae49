use std::fmt;

use crate::diffop::{DerivKey, DiffOp};
use crate::error::{Error, Result};
use crate::symcore::{Chart, MultiIndex, Poly, Space};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SectionRole {
    /// A section `e` of `E`, seen as the linear function `ℓ_e` on `E*`.
    OfE,
    /// A section `φ` of `E*`, seen as the linear function `ℓ_φ` on `E`.
    OfEstar,
}

/// A section of `E` or `E*` in the coordinate frame: `m` base functions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Section {
    pub role: SectionRole,
    components: Vec<Poly>,
}

impl Section {
    /// Components must be base-only; they are stored on space `E`.
    pub fn new(role: SectionRole, components: Vec<Poly>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::RankMismatch(
                "a section needs at least one component".into(),
            ));
        };
        let chart = first.chart();
        if components.len() != chart.fiber_rank {
            return Err(Error::RankMismatch(format!(
                "{} components for fiber rank {}",
                components.len(),
                chart.fiber_rank
            )));
        }
        let components = components
            .iter()
            .map(|c| {
                chart.ensure_same(&c.chart())?;
                if !c.is_base_only() {
                    return Err(Error::NotHomogeneous(format!(
                        "section component {c} is not a base function"
                    )));
                }
                c.with_space(Space::E)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Section { role, components })
    }

    /// The `a`-th element of the coordinate frame.
    pub fn basis(chart: Chart, role: SectionRole, a: usize) -> Section {
        let components = (1..=chart.fiber_rank)
            .map(|b| {
                if a == b {
                    Poly::one(chart, Space::E)
                } else {
                    Poly::zero(chart, Space::E)
                }
            })
            .collect();
        Section { role, components }
    }

    pub fn chart(&self) -> Chart {
        self.components[0].chart()
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn scale_by(&self, f: &Poly) -> Result<Section> {
        let f = f.with_space(Space::E)?;
        Ok(Section {
            role: self.role,
            components: self.components.iter().map(|c| &f * c).collect(),
        })
    }

    /// `ℓ = Σ s_a z^a`, with `z = u` for sections of `E*` and `z = v` for sections of `E`.
    pub fn linear_function(&self, expected: SectionRole) -> Result<Poly> {
        if self.role != expected {
            return Err(Error::RankMismatch(format!(
                "expected a section with role {expected:?}, got {:?}",
                self.role
            )));
        }
        let space = match self.role {
            SectionRole::OfEstar => Space::E,
            SectionRole::OfE => Space::Estar,
        };
        let chart = self.chart();
        let mut out = Poly::zero(chart, space);
        for (a, c) in self.components.iter().enumerate() {
            out = &out + &(&c.with_space(space)? * &Poly::fiber(chart, space, a + 1));
        }
        Ok(out)
    }

    /// Read a fiber-linear function back as a section.
    pub fn from_linear_function(f: &Poly, role: SectionRole) -> Result<Section> {
        if !(f.is_zero() || f.homogeneous_fiber_degree() == Some(1)) {
            return Err(Error::NotHomogeneous(format!("{f} is not fiber-linear")));
        }
        let chart = f.chart();
        let mut components = vec![Poly::zero(chart, Space::E); chart.fiber_rank];
        for (a, coeff) in f.fiber_coefficients() {
            components[a.letters()[0] - 1] = coeff.with_space(Space::E)?;
        }
        Ok(Section { role, components })
    }

    /// The vertical lift `e↑ = Σ e^a ∂u_a`, an order-1 core operator on `E`.
    pub fn vertical_lift(&self) -> Result<DiffOp> {
        let chart = self.chart();
        DiffOp::from_terms(
            chart,
            Space::E,
            self.components
                .iter()
                .enumerate()
                .map(|(a, c)| (DerivKey::fiber(&[a + 1]), c.clone())),
        )
    }
}

/// A polynomial vector field `Σ W^i ∂x_i + Σ W_a ∂v_a` on `E*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyVectorField {
    pub base: Vec<Poly>,
    pub dual: Vec<Poly>,
}

impl PolyVectorField {
    pub fn zero(chart: Chart) -> Self {
        PolyVectorField {
            base: vec![Poly::zero(chart, Space::Estar); chart.base_dim],
            dual: vec![Poly::zero(chart, Space::Estar); chart.fiber_rank],
        }
    }

    pub fn new(base: Vec<Poly>, dual: Vec<Poly>) -> Result<Self> {
        let chart = base
            .first()
            .or(dual.first())
            .map(Poly::chart)
            .ok_or_else(|| Error::RankMismatch("empty vector field".into()))?;
        if base.len() != chart.base_dim || dual.len() != chart.fiber_rank {
            return Err(Error::RankMismatch(format!(
                "{} base and {} fiber components in chart {chart}",
                base.len(),
                dual.len()
            )));
        }
        for c in base.iter().chain(&dual) {
            chart.ensure_same(&c.chart())?;
            c.space().ensure(&[Space::Estar])?;
        }
        Ok(PolyVectorField { base, dual })
    }

    pub fn chart(&self) -> Chart {
        self.base[0].chart()
    }

    pub fn is_zero(&self) -> bool {
        self.components().all(Poly::is_zero)
    }

    fn components(&self) -> impl Iterator<Item = &Poly> {
        self.base.iter().chain(&self.dual)
    }

    pub fn apply(&self, f: &Poly) -> Result<Poly> {
        self.as_diffop().apply(f)
    }

    /// The field as an order-1 operator on `E*`.
    pub fn as_diffop(&self) -> DiffOp {
        let chart = self.chart();
        let terms = self
            .base
            .iter()
            .enumerate()
            .map(|(i, c)| (DerivKey::base(&[i + 1]), c.clone()))
            .chain(
                self.dual
                    .iter()
                    .enumerate()
                    .map(|(a, c)| (DerivKey::fiber(&[a + 1]), c.clone())),
            );
        DiffOp::from_terms(chart, Space::Estar, terms).expect("components live on E*")
    }

    pub fn try_add(&self, other: &PolyVectorField) -> Result<PolyVectorField> {
        self.chart().ensure_same(&other.chart())?;
        let zip = |a: &[Poly], b: &[Poly]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Ok(PolyVectorField {
            base: zip(&self.base, &other.base),
            dual: zip(&self.dual, &other.dual),
        })
    }

    pub fn left_mul(&self, f: &Poly) -> Result<PolyVectorField> {
        let mul = |v: &[Poly]| v.iter().map(|c| f.try_mul(c)).collect::<Result<Vec<_>>>();
        Ok(PolyVectorField {
            base: mul(&self.base)?,
            dual: mul(&self.dual)?,
        })
    }

    /// `[W1, W2]^μ = W1(W2^μ) − W2(W1^μ)`.
    pub fn bracket(&self, other: &PolyVectorField) -> Result<PolyVectorField> {
        self.chart().ensure_same(&other.chart())?;
        let comp = |a: &Poly, b: &Poly| -> Result<Poly> { Ok(&self.apply(b)? - &other.apply(a)?) };
        Ok(PolyVectorField {
            base: self
                .base
                .iter()
                .zip(&other.base)
                .map(|(a, b)| comp(a, b))
                .collect::<Result<_>>()?,
            dual: self
                .dual
                .iter()
                .zip(&other.dual)
                .map(|(a, b)| comp(a, b))
                .collect::<Result<_>>()?,
        })
    }

    /// Degree `k`: base components of fiber degree `k`, fiber components of
    /// degree `k + 1`. `None` if inhomogeneous or zero.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut degree: Option<i64> = None;
        let shifted = self
            .base
            .iter()
            .map(|c| (c, 0))
            .chain(self.dual.iter().map(|c| (c, 1)));
        for (c, shift) in shifted {
            if c.is_zero() {
                continue;
            }
            let d = c.homogeneous_fiber_degree()? as i64 - shift;
            match degree {
                None => degree = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        degree
    }

    /// Vertical divergence `Σ_a ∂W_a/∂v_a`.
    pub fn div_v(&self) -> Poly {
        let chart = self.chart();
        let mut out = Poly::zero(chart, Space::Estar);
        for (a, c) in self.dual.iter().enumerate() {
            out = &out + &c.partial_multi(&MultiIndex::empty(), &MultiIndex::single(a + 1));
        }
        out
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.base.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("({c})*dx{}", i + 1));
            }
        }
        for (a, c) in self.dual.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("({c})*dv{}", a + 1));
            }
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}
