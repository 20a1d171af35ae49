use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{Chart, MultiIndex, Rational, Space, Var};
use crate::error::{Error, Result};

/// Exponent vector over the `n + m` chart coordinates, base slots first.
///
/// Ordered by total degree, then lexicographically, so a `BTreeMap` walked in
/// reverse yields the printing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub(crate) Vec<u32>);

impl Monomial {
    pub(crate) fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub(crate) fn fiber_degree(&self, n: usize) -> u32 {
        self.0[n..].iter().sum()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in the coordinates of one chart, with exact rational
/// coefficients. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    chart: Chart,
    space: Space,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(chart: Chart, space: Space) -> Self {
        Poly {
            chart,
            space,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(chart: Chart, space: Space, c: Rational) -> Self {
        let mut p = Poly::zero(chart, space);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(chart.nvars()), c);
        }
        p
    }

    pub fn one(chart: Chart, space: Space) -> Self {
        Poly::constant(chart, space, Rational::one())
    }

    pub fn var(chart: Chart, space: Space, var: Var) -> Result<Self> {
        let slot = var.slot(&chart, space)?;
        let mut mono = Monomial::one(chart.nvars());
        mono.0[slot] = 1;
        Ok(Poly::from_terms(chart, space, [(mono, Rational::one())]))
    }

    /// `x_i`. Panics if `i` is out of range.
    pub fn x(chart: Chart, space: Space, i: usize) -> Self {
        Poly::var(chart, space, Var::x(i)).expect("base index in range")
    }

    /// The fiber-slot coordinate `u_a` (or `v_a` on `Estar`). Panics if out of range.
    pub fn fiber(chart: Chart, space: Space, a: usize) -> Self {
        let var = Var {
            kind: space.fiber_kind(),
            index: a,
        };
        Poly::var(chart, space, var).expect("fiber index in range")
    }

    /// `u_C = prod_{c in C} u_c` (resp. `v_C`).
    pub fn fiber_monomial(chart: Chart, space: Space, c: &MultiIndex) -> Self {
        let mut mono = Monomial::one(chart.nvars());
        for &l in c.letters() {
            assert!(l >= 1 && l <= chart.fiber_rank, "fiber index in range");
            mono.0[chart.base_dim + l - 1] += 1;
        }
        Poly::from_terms(chart, space, [(mono, Rational::one())])
    }

    pub(crate) fn from_terms(
        chart: Chart,
        space: Space,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Self {
        let mut p = Poly::zero(chart, space);
        for (mono, c) in terms {
            p.add_term(mono, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, mono: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant coefficient, if the polynomial has no other terms.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (mono, c) = self.terms.iter().next()?;
                (mono.degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_base_only(&self) -> bool {
        let n = self.chart.base_dim;
        self.terms.keys().all(|m| m.fiber_degree(n) == 0)
    }

    /// Largest fiber degree of a monomial, `None` for the zero polynomial.
    pub fn max_fiber_degree(&self) -> Option<u32> {
        let n = self.chart.base_dim;
        self.terms.keys().map(|m| m.fiber_degree(n)).max()
    }

    /// The common fiber degree if every monomial shares it, `None` otherwise or for zero.
    pub fn homogeneous_fiber_degree(&self) -> Option<u32> {
        let parts = self.fiber_degree_decompose();
        if parts.len() == 1 {
            parts.keys().next().copied()
        } else {
            None
        }
    }

    /// Relabel the space. Allowed between `E` and `Ambient` freely, and between
    /// any two spaces when the polynomial only involves base coordinates.
    pub fn with_space(&self, space: Space) -> Result<Poly> {
        if space.fiber_kind() == self.space.fiber_kind() || self.is_base_only() {
            Ok(Poly {
                chart: self.chart,
                space,
                terms: self.terms.clone(),
            })
        } else {
            Err(Error::SpaceMismatch {
                expected: space.to_string(),
                found: self.space,
            })
        }
    }

    fn check_compatible(&self, other: &Poly) -> Result<()> {
        self.chart.ensure_same(&other.chart)?;
        if self.space != other.space {
            return Err(Error::SpaceMismatch {
                expected: self.space.to_string(),
                found: other.space,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_compatible(other)?;
        let mut out = Poly::zero(self.chart, self.space);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.times(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.chart, self.space);
        }
        Poly {
            chart: self.chart,
            space: self.space,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(self.chart, self.space);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn partial(&self, var: Var) -> Result<Poly> {
        let slot = var.slot(&self.chart, self.space)?;
        Ok(self.partial_slot(slot))
    }

    pub(crate) fn partial_slot(&self, slot: usize) -> Poly {
        let mut out = Poly::zero(self.chart, self.space);
        for (m, c) in &self.terms {
            let e = m.0[slot];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[slot] -= 1;
            out.add_term(dm, c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Iterated derivative along base multi-index `base` and fiber multi-index
    /// `fiber` (fiber letters address the fiber slot of this space).
    pub fn partial_multi(&self, base: &MultiIndex, fiber: &MultiIndex) -> Poly {
        let n = self.chart.base_dim;
        let mut out = self.clone();
        for &i in base.letters() {
            out = out.partial_slot(i - 1);
        }
        for &a in fiber.letters() {
            out = out.partial_slot(n + a - 1);
        }
        out
    }

    /// Set every fiber coordinate to zero.
    pub fn restrict_fiber_zero(&self) -> Result<Poly> {
        self.space.ensure(&[Space::E, Space::Ambient])?;
        Ok(self.drop_fiber())
    }

    pub(crate) fn drop_fiber(&self) -> Poly {
        let n = self.chart.base_dim;
        Poly {
            chart: self.chart,
            space: self.space,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.fiber_degree(n) == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Split into fiber-homogeneous parts. The zero polynomial maps to an empty map.
    pub fn fiber_degree_decompose(&self) -> BTreeMap<u32, Poly> {
        let n = self.chart.base_dim;
        let mut parts: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            parts
                .entry(m.fiber_degree(n))
                .or_insert_with(|| Poly::zero(self.chart, self.space))
                .terms
                .insert(m.clone(), c.clone());
        }
        parts
    }

    /// Coefficients with respect to fiber monomials: `p = sum_C p_C(x) * u^C`.
    /// The map keys are the fiber exponent multi-indices, values are base-only.
    pub fn fiber_coefficients(&self) -> BTreeMap<MultiIndex, Poly> {
        let n = self.chart.base_dim;
        let mut out: BTreeMap<MultiIndex, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let counts: Vec<usize> = m.0[n..].iter().map(|&e| e as usize).collect();
            let key = MultiIndex::from_counts(&counts);
            let mut base = m.clone();
            for e in &mut base.0[n..] {
                *e = 0;
            }
            out.entry(key)
                .or_insert_with(|| Poly::zero(self.chart, self.space))
                .add_term(base, c.clone());
        }
        out
    }

    /// The pullback `h_t^* p`: every fiber coordinate scaled by `t`.
    pub fn scale_fiber(&self, t: &Rational) -> Poly {
        let n = self.chart.base_dim;
        let mut out = Poly::zero(self.chart, self.space);
        for (m, c) in &self.terms {
            let k = m.fiber_degree(n);
            let mut f = c.clone();
            for _ in 0..k {
                f *= t;
            }
            out.add_term(m.clone(), f);
        }
        out
    }

    pub fn parse(text: &str, chart: Chart, space: Space) -> Result<Poly> {
        super::parse::parse_poly(text, chart, space)
    }

    fn var_of_slot(&self, slot: usize) -> Var {
        let n = self.chart.base_dim;
        if slot < n {
            Var::x(slot + 1)
        } else {
            Var {
                kind: self.space.fiber_kind(),
                index: slot - n + 1,
            }
        }
    }
}

fn write_monomial(p: &Poly, m: &Monomial, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut first = true;
    for (slot, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        write!(f, "{}", p.var_of_slot(slot))?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if m.degree() == 0 {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                write_monomial(self, m, f)?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        self.try_add(rhs).expect("compatible polynomials")
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        self.try_sub(rhs).expect("compatible polynomials")
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        self.try_mul(rhs).expect("compatible polynomials")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{int, rat};

    fn chart() -> Chart {
        Chart::new(2, 2).unwrap()
    }

    fn p(s: &str) -> Poly {
        Poly::parse(s, chart(), Space::E).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(&p("x1 + u1") * &p("x1 - u1"), p("x1^2 - u1^2"));
        assert_eq!((&p("x1 + u1") * &p("x1 - u1")).to_string(), "x1^2 - u1^2");
        assert_eq!(&p("x1*u2 + 3") + &p("0"), p("x1*u2 + 3"));
    }

    #[test]
    fn rational_product_matches_scaled_integers() {
        let a = p("1/2*u1");
        let b = p("2/3*u1");
        assert_eq!(&a * &b, p("1/3*u1^2"));
        // integer-scaled oracle: (3u1)(4u1) = 12u1^2, divide by 6*6
        let scaled = &p("3*u1") * &p("4*u1");
        assert_eq!(scaled.scale(&rat(1, 36)), &a * &b);
    }

    #[test]
    fn mismatched_operands_are_rejected() {
        let other = Poly::parse("x1", Chart::new(1, 2).unwrap(), Space::E).unwrap();
        assert!(matches!(
            p("x1").try_add(&other),
            Err(Error::ChartMismatch(..))
        ));
        let amb = p("x1").with_space(Space::Ambient).unwrap();
        assert!(matches!(
            p("x1").try_mul(&amb),
            Err(Error::SpaceMismatch { .. })
        ));
    }

    #[test]
    fn partials() {
        assert_eq!(p("u1^2*x1").partial(Var::u(1)).unwrap(), p("2*u1*x1"));
        assert!(p("u1").partial(Var::x(2)).unwrap().is_zero());
        let once = p("u1^3").partial(Var::u(1)).unwrap();
        assert_eq!(once.partial(Var::u(1)).unwrap(), p("6*u1"));
        assert!(matches!(
            p("u1").partial(Var::v(1)),
            Err(Error::SpaceMismatch { .. })
        ));
    }

    #[test]
    fn restriction() {
        assert_eq!(
            p("x1 + u1*x2 + u1^2").restrict_fiber_zero().unwrap(),
            p("x1")
        );
        assert_eq!(p("x1^2").restrict_fiber_zero().unwrap(), p("x1^2"));
        let dual = Poly::parse("v1 + x1", chart(), Space::Estar).unwrap();
        assert!(dual.restrict_fiber_zero().is_err());
    }

    #[test]
    fn decomposition() {
        let parts = p("x1 + u1*x2 + u1*u2").fiber_degree_decompose();
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[&0], p("x1"));
        assert_eq!(parts[&1], p("u1*x2"));
        assert_eq!(parts[&2], p("u1*u2"));
        assert!(p("0").fiber_degree_decompose().is_empty());
        let lin = p("x1*u1 + 3*x2^2*u2");
        let parts = lin.fiber_degree_decompose();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[&1], lin);
    }

    #[test]
    fn fiber_scaling_is_homogeneous() {
        let q = p("x1 + 2*u1*x2 - u1*u2^2");
        for (k, part) in q.fiber_degree_decompose() {
            let t = rat(3, 2);
            let mut tk = int(1);
            for _ in 0..k {
                tk *= &t;
            }
            assert_eq!(part.scale_fiber(&t), part.scale(&tk));
        }
    }

    #[test]
    fn fiber_coefficients_reassemble() {
        let q = p("x1*u1 + x2*u1 + 3*u1*u2 - x1");
        let mut acc = Poly::zero(chart(), Space::E);
        for (c, coeff) in q.fiber_coefficients() {
            assert!(coeff.is_base_only());
            acc = &acc + &(&coeff * &Poly::fiber_monomial(chart(), Space::E, &c));
        }
        assert_eq!(acc, q);
    }
}
