//! Scalar differential operators with polynomial coefficients: the term table
//! `Δ = Σ Δ^{I,B}(x,u) ∂^I_x ∂^B_u`, composition, commutators, the fiber
//! grading and the core / fiber-wise linear classification.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::One;

use crate::error::{Error, Result};
use crate::symcore::{int, Chart, MultiIndex, Poly, Rational, Space};

/// A derivative `∂^I_x ∂^B_u` (or `∂^B_v` on `E*`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DerivKey {
    pub base: MultiIndex,
    pub fiber: MultiIndex,
}

impl DerivKey {
    pub fn new(base: MultiIndex, fiber: MultiIndex) -> Self {
        DerivKey { base, fiber }
    }

    pub fn base(base: &[usize]) -> Self {
        DerivKey::new(MultiIndex::new(base.to_vec()), MultiIndex::empty())
    }

    pub fn fiber(fiber: &[usize]) -> Self {
        DerivKey::new(MultiIndex::empty(), MultiIndex::new(fiber.to_vec()))
    }

    pub fn len(&self) -> usize {
        self.base.len() + self.fiber.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `J!` for the combined multi-index.
    pub fn factorial(&self) -> Rational {
        self.base.factorial() * self.fiber.factorial()
    }

    pub fn concat(&self, other: &DerivKey) -> DerivKey {
        DerivKey::new(
            self.base.concat(&other.base),
            self.fiber.concat(&other.fiber),
        )
    }

    /// All keys of total length `len` in a chart.
    pub fn all_of_len(chart: &Chart, len: usize) -> Vec<DerivKey> {
        let mut out = Vec::new();
        for k in 0..=len {
            for base in MultiIndex::all_of_len(chart.base_dim, k) {
                for fiber in MultiIndex::all_of_len(chart.fiber_rank, len - k) {
                    out.push(DerivKey::new(base.clone(), fiber));
                }
            }
        }
        out
    }
}

/// The fiber weight of a coefficient monomial against a derivative.
pub(crate) fn weight(fiber_degree: u32, key: &DerivKey) -> i64 {
    fiber_degree as i64 - key.fiber.len() as i64
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiffOp {
    chart: Chart,
    space: Space,
    terms: BTreeMap<DerivKey, Poly>,
}

impl DiffOp {
    pub fn zero(chart: Chart, space: Space) -> Self {
        DiffOp {
            chart,
            space,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(chart: Chart, space: Space) -> Self {
        DiffOp::multiplication(&Poly::one(chart, space))
    }

    /// The order-0 operator `g ↦ f·g`.
    pub fn multiplication(f: &Poly) -> Self {
        DiffOp::from_terms(f.chart(), f.space(), [(DerivKey::default(), f.clone())])
            .expect("multiplication operator is well formed")
    }

    /// `c·∂^I_x ∂^B_u` as a single-term operator.
    pub fn monomial(coeff: &Poly, key: DerivKey) -> Result<Self> {
        DiffOp::from_terms(coeff.chart(), coeff.space(), [(key, coeff.clone())])
    }

    /// `∂/∂x_i`.
    pub fn d_base(chart: Chart, space: Space, i: usize) -> Self {
        DiffOp::monomial(&Poly::one(chart, space), DerivKey::base(&[i])).expect("index in range")
    }

    /// `∂/∂u_a` (or `∂/∂v_a` on `E*`).
    pub fn d_fiber(chart: Chart, space: Space, a: usize) -> Self {
        DiffOp::monomial(&Poly::one(chart, space), DerivKey::fiber(&[a])).expect("index in range")
    }

    /// Build from `(key, coefficient)` pairs; repeated keys are summed.
    pub fn from_terms(
        chart: Chart,
        space: Space,
        terms: impl IntoIterator<Item = (DerivKey, Poly)>,
    ) -> Result<Self> {
        let mut op = DiffOp::zero(chart, space);
        for (key, coeff) in terms {
            chart.ensure_same(&coeff.chart())?;
            if coeff.space() != space {
                return Err(Error::SpaceMismatch {
                    expected: space.to_string(),
                    found: coeff.space(),
                });
            }
            if key.base.max_letter() > chart.base_dim || key.fiber.max_letter() > chart.fiber_rank {
                return Err(Error::IndexOutOfRange {
                    name: format!("d{}{}", key.base, key.fiber),
                    offset: 0,
                    chart,
                });
            }
            op.add_term(key, coeff);
        }
        Ok(op)
    }

    pub(crate) fn add_term(&mut self, key: DerivKey, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
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

    pub fn terms(&self) -> impl Iterator<Item = (&DerivKey, &Poly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &DerivKey) -> Poly {
        self.terms
            .get(key)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.chart, self.space))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `|I| + |B|` over stored terms; `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().map(DerivKey::len).max()
    }

    /// The sub-table of terms with `|I| + |B| = k`.
    pub fn order_part(&self, k: usize) -> DiffOp {
        DiffOp {
            chart: self.chart,
            space: self.space,
            terms: self
                .terms
                .iter()
                .filter(|(key, _)| key.len() == k)
                .map(|(key, c)| (key.clone(), c.clone()))
                .collect(),
        }
    }

    /// Relabel the space, see [`Poly::with_space`].
    pub fn with_space(&self, space: Space) -> Result<DiffOp> {
        let mut out = DiffOp::zero(self.chart, space);
        for (key, c) in &self.terms {
            out.terms.insert(key.clone(), c.with_space(space)?);
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &DiffOp) -> Result<()> {
        self.chart.ensure_same(&other.chart)?;
        if self.space != other.space {
            return Err(Error::SpaceMismatch {
                expected: self.space.to_string(),
                found: other.space,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (key, c) in &other.terms {
            out.add_term(key.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> DiffOp {
        let mut out = DiffOp::zero(self.chart, self.space);
        for (key, coeff) in &self.terms {
            out.add_term(key.clone(), coeff.scale(c));
        }
        out
    }

    /// `f·Δ`: multiply every coefficient by `f`.
    pub fn left_mul(&self, f: &Poly) -> Result<DiffOp> {
        let mut out = DiffOp::zero(self.chart, self.space);
        for (key, coeff) in &self.terms {
            out.add_term(key.clone(), f.try_mul(coeff)?);
        }
        Ok(out)
    }

    pub fn apply(&self, f: &Poly) -> Result<Poly> {
        self.chart.ensure_same(&f.chart())?;
        if f.space() != self.space {
            return Err(Error::SpaceMismatch {
                expected: self.space.to_string(),
                found: f.space(),
            });
        }
        let mut out = Poly::zero(self.chart, self.space);
        for (key, coeff) in &self.terms {
            out = &out + &(coeff * &f.partial_multi(&key.base, &key.fiber));
        }
        Ok(out)
    }

    /// `Δ1 ∘ Δ2` by the multiset Leibniz rule.
    pub fn compose(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check_compatible(other)?;
        let mut out = DiffOp::zero(self.chart, self.space);
        for (j, c1) in &self.terms {
            let base_splits = j.base.splits();
            let fiber_splits = j.fiber.splits();
            for (k, c2) in &other.terms {
                for (sb, rb, wb) in &base_splits {
                    for (sf, rf, wf) in &fiber_splits {
                        let dc2 = c2.partial_multi(sb, sf);
                        if dc2.is_zero() {
                            continue;
                        }
                        let coeff = (c1 * &dc2).scale(&int((wb * wf) as i64));
                        let key = DerivKey::new(rb.concat(&k.base), rf.concat(&k.fiber));
                        out.add_term(key, coeff);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `[Δ1, Δ2] = Δ1∘Δ2 − Δ2∘Δ1`. The order bound `q + r − 1` is asserted.
    pub fn commutator(&self, other: &DiffOp) -> Result<DiffOp> {
        let out = &self.compose(other)? - &other.compose(self)?;
        if let (Some(q), Some(r), Some(s)) = (self.order(), other.order(), out.order()) {
            assert!(s < q + r, "commutator order {s} exceeds {q} + {r} - 1");
        }
        Ok(out)
    }

    /// Split into parts homogeneous under the fiber grading, keyed by weight
    /// `fiberdeg(coefficient) − |B|`.
    pub fn grade_decompose(&self) -> Result<BTreeMap<i64, DiffOp>> {
        self.space.ensure(&[Space::E, Space::Estar])?;
        let mut parts: BTreeMap<i64, DiffOp> = BTreeMap::new();
        for (key, coeff) in &self.terms {
            for (deg, piece) in coeff.fiber_degree_decompose() {
                parts
                    .entry(weight(deg, key))
                    .or_insert_with(|| DiffOp::zero(self.chart, self.space))
                    .add_term(key.clone(), piece);
            }
        }
        Ok(parts)
    }

    /// The weight if `self` is nonzero and homogeneous.
    pub fn homogeneous_weight(&self) -> Option<i64> {
        let parts = self.grade_decompose().ok()?;
        (parts.len() == 1).then(|| *parts.keys().next().expect("one part"))
    }

    /// `h_t^* ∘ Δ ∘ h_{1/t}^*`, computed term by term.
    pub fn conjugate_scaling(&self, t: &Rational) -> DiffOp {
        let mut out = DiffOp::zero(self.chart, self.space);
        let inv = Rational::one() / t;
        for (key, coeff) in &self.terms {
            let mut factor = Rational::one();
            for _ in 0..key.fiber.len() {
                factor *= &inv;
            }
            out.add_term(key.clone(), coeff.scale_fiber(t).scale(&factor));
        }
        out
    }

    /// Core operator of order `q`: nonzero, and every term is `Δ^B(x)∂^B_u`
    /// with `|B| = q`.
    pub fn is_core(&self, q: usize) -> Result<bool> {
        self.space.ensure(&[Space::E])?;
        Ok(!self.is_zero()
            && self
                .terms
                .iter()
                .all(|(key, c)| key.base.is_empty() && key.fiber.len() == q && c.is_base_only()))
    }

    /// Fiber-wise linear operator of order `q`: nonzero, order at most `q`,
    /// homogeneous of weight `1 − q`.
    ///
    /// The shape test (every term is one of `Δ^{i|A}(x)∂x_i∂u^A`,
    /// `Δ^B_α(x)u^α∂u^B`, `Δ^C(x)∂u^C`) is evaluated as well and must agree.
    pub fn is_fwl(&self, q: usize) -> Result<bool> {
        self.space.ensure(&[Space::E])?;
        if self.is_zero() {
            return Ok(false);
        }
        let by_weight =
            self.order().is_some_and(|o| o <= q) && self.homogeneous_weight() == Some(1 - q as i64);
        let by_shape = self.terms.iter().all(|(key, c)| {
            let fib = c.homogeneous_fiber_degree();
            match (key.base.len(), key.fiber.len()) {
                (1, a) if a + 1 == q => fib == Some(0),
                (0, b) if b == q => fib == Some(1),
                (0, c_len) if c_len + 1 == q => fib == Some(0),
                _ => false,
            }
        });
        assert_eq!(
            by_weight, by_shape,
            "weight and shape classification disagree on {self}"
        );
        Ok(by_weight)
    }

    /// Membership in the (non-homogeneous) algebra generated by core operators:
    /// no base derivatives and base-only coefficients.
    pub fn in_core_algebra(&self) -> bool {
        self.terms
            .iter()
            .all(|(key, c)| key.base.is_empty() && c.is_base_only())
    }

    /// Membership in the non-homogeneous fiber-wise linear algebra: every term
    /// has at most one base derivative; with one, the coefficient is base-only;
    /// with none, the coefficient has fiber degree at most one.
    pub fn in_lin_algebra(&self) -> bool {
        self.terms.iter().all(|(key, c)| match key.base.len() {
            0 => c.max_fiber_degree().unwrap_or(0) <= 1,
            1 => c.is_base_only(),
            _ => false,
        })
    }

    /// `[…[Δ, z_{j1}], …, z_{jk}](1) / J!` for every `J` of length at most the
    /// order, computed with literal operator commutators against the
    /// coordinate functions. Reproduces the term table.
    pub fn recover_coefficients(&self) -> BTreeMap<DerivKey, Poly> {
        let mut out = BTreeMap::new();
        let Some(order) = self.order() else {
            return out;
        };
        let n = self.chart.base_dim;
        let nvars = self.chart.nvars();
        let one = Poly::one(self.chart, self.space);
        let coord = |slot: usize| -> DiffOp {
            let mut mono = crate::symcore::Monomial::one(nvars);
            mono.0[slot] = 1;
            DiffOp::multiplication(&Poly::from_terms(
                self.chart,
                self.space,
                [(mono, Rational::one())],
            ))
        };
        // depth-first over sorted words in the combined letters 0..nvars
        let mut stack: Vec<(DiffOp, Vec<usize>)> = vec![(self.clone(), Vec::new())];
        while let Some((op, word)) = stack.pop() {
            let key = DerivKey::new(
                MultiIndex::new(word.iter().filter(|&&s| s < n).map(|s| s + 1).collect()),
                MultiIndex::new(
                    word.iter()
                        .filter(|&&s| s >= n)
                        .map(|s| s - n + 1)
                        .collect(),
                ),
            );
            let value = op.apply(&one).expect("same space");
            if !value.is_zero() {
                out.insert(
                    key.clone(),
                    value.scale(&(Rational::one() / key.factorial())),
                );
            }
            if word.len() == order || op.is_zero() {
                continue;
            }
            let start = word.last().copied().unwrap_or(0);
            for slot in start..nvars {
                let next = op.commutator(&coord(slot)).expect("same space");
                let mut w = word.clone();
                w.push(slot);
                stack.push((next, w));
            }
        }
        out
    }

    /// Decompose a fiber-wise linear operator of order `q` as
    /// `Σ F_k ∘ G_k` with every `F_k` core (or order 0 base function) and
    /// every `G_k` the identity, a fiber-linear function or a linear vector field.
    pub fn fwl_generators(&self, q: usize) -> Result<Vec<(DiffOp, Generator)>> {
        if !self.is_fwl(q)? {
            return Err(Error::NotFwl(self.to_string()));
        }
        let chart = self.chart;
        let mut out = Vec::new();
        let mut built = DiffOp::zero(chart, Space::E);
        for (key, c) in &self.terms {
            match (key.base.len(), key.fiber.len()) {
                (1, _) => {
                    let f =
                        DiffOp::monomial(c, DerivKey::new(MultiIndex::empty(), key.fiber.clone()))?;
                    let g = DiffOp::d_base(chart, Space::E, key.base.letters()[0]);
                    built = &built + &f.compose(&g)?;
                    out.push((f, Generator::LinearField(g)));
                }
                (0, 0) if q == 0 => {
                    let g = DiffOp::multiplication(c);
                    built = &built + &g;
                    out.push((DiffOp::identity(chart, Space::E), Generator::Linear(g)));
                }
                (0, b) if b == q => {
                    let last = *key.fiber.letters().last().expect("q >= 1");
                    let rest = key.fiber.without(last).expect("letter present");
                    for (alpha, coeff) in c.fiber_coefficients() {
                        let a = alpha.letters()[0];
                        let f = DiffOp::monomial(
                            &coeff,
                            DerivKey::new(MultiIndex::empty(), rest.clone()),
                        )?;
                        let u = Poly::fiber(chart, Space::E, a);
                        let g = DiffOp::monomial(&u, DerivKey::fiber(&[last]))?;
                        built = &built + &f.compose(&g)?;
                        out.push((f, Generator::LinearField(g)));
                    }
                }
                _ => {}
            }
        }
        // what is left is of the form Δ^C(x)∂u^C
        let residual = self - &built;
        if !residual.is_zero() {
            debug_assert!(residual.in_core_algebra());
            out.push((
                residual,
                Generator::Identity(DiffOp::identity(chart, Space::E)),
            ));
        }
        Ok(out)
    }
}

/// Generators of the fiber-wise linear operators as a module over core operators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    Identity(DiffOp),
    Linear(DiffOp),
    LinearField(DiffOp),
}

impl Generator {
    pub fn op(&self) -> &DiffOp {
        match self {
            Generator::Identity(d) | Generator::Linear(d) | Generator::LinearField(d) => d,
        }
    }
}

impl<'a> Add<&'a DiffOp> for &'a DiffOp {
    type Output = DiffOp;
    fn add(self, rhs: &'a DiffOp) -> DiffOp {
        self.try_add(rhs).expect("compatible operators")
    }
}

impl<'a> Sub<&'a DiffOp> for &'a DiffOp {
    type Output = DiffOp;
    fn sub(self, rhs: &'a DiffOp) -> DiffOp {
        self.try_add(&-rhs).expect("compatible operators")
    }
}

impl Neg for &DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let d = self.space.fiber_letter();
        for (k, (key, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for &i in key.base.letters() {
                write!(f, "*dx{i}")?;
            }
            for &a in key.fiber.letters() {
                write!(f, "*d{d}{a}")?;
            }
        }
        Ok(())
    }
}

/// Nested commutator `[…[Δ, f1], …, fk](1)` expanded over subsets:
/// `Σ_{S ⊆ [k]} (−1)^{k−|S|} (Π_{i∉S} f_i) · Δ(Π_{i∈S} f_i)`.
pub(crate) fn nested_commutator_at_one(op: &DiffOp, args: &[Poly]) -> Result<Poly> {
    let k = args.len();
    let mut out = Poly::zero(op.chart(), op.space());
    for mask in 0u32..(1 << k) {
        let mut inside = Poly::one(op.chart(), op.space());
        let mut outside = Poly::one(op.chart(), op.space());
        for (i, f) in args.iter().enumerate() {
            if mask & (1 << i) != 0 {
                inside = inside.try_mul(f)?;
            } else {
                outside = outside.try_mul(f)?;
            }
        }
        let term = outside.try_mul(&op.apply(&inside)?)?;
        if (k - mask.count_ones() as usize).is_multiple_of(2) {
            out = &out + &term;
        } else {
            out = &out - &term;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c11() -> Chart {
        Chart::new(1, 1).unwrap()
    }

    fn p(s: &str, chart: Chart) -> Poly {
        Poly::parse(s, chart, Space::E).unwrap()
    }

    fn op(chart: Chart, terms: &[(&str, &[usize], &[usize])]) -> DiffOp {
        DiffOp::from_terms(
            chart,
            Space::E,
            terms.iter().map(|(c, dx, du)| {
                (
                    DerivKey::new(MultiIndex::new(dx.to_vec()), MultiIndex::new(du.to_vec())),
                    p(c, chart),
                )
            }),
        )
        .unwrap()
    }

    #[test]
    fn apply_examples() {
        let c = c11();
        assert_eq!(
            op(c, &[("1", &[], &[1, 1])]).apply(&p("u1^3", c)).unwrap(),
            p("6*u1", c)
        );
        let d = op(c, &[("u1", &[], &[1, 1])]);
        let f = p("u1^2", c);
        assert_eq!(d.apply(&f).unwrap(), p("2*u1", c));
        // oracle: the same through partial()
        let twice = f
            .partial(crate::Var::u(1))
            .unwrap()
            .partial(crate::Var::u(1))
            .unwrap();
        assert_eq!(d.apply(&f).unwrap(), &p("u1", c) * &twice);
        let g = p("x1*u1 + 3", c);
        assert_eq!(DiffOp::identity(c, Space::E).apply(&g).unwrap(), g);
    }

    #[test]
    fn compose_examples() {
        let c = c11();
        let du = DiffOp::d_fiber(c, Space::E, 1);
        let u = DiffOp::multiplication(&p("u1", c));
        assert_eq!(
            du.compose(&u).unwrap(),
            op(c, &[("u1", &[], &[1]), ("1", &[], &[])])
        );
        let d2 = op(c, &[("u1", &[], &[1, 1])]);
        let composed = du.compose(&d2).unwrap();
        assert_eq!(
            composed,
            op(c, &[("u1", &[], &[1, 1, 1]), ("1", &[], &[1, 1])])
        );
        for k in 0..=5 {
            let f = p("u1", c).pow(k);
            assert_eq!(
                composed.apply(&f).unwrap(),
                du.apply(&d2.apply(&f).unwrap()).unwrap()
            );
        }
        assert_eq!(d2.compose(&DiffOp::identity(c, Space::E)).unwrap(), d2);
    }

    #[test]
    fn commutator_examples() {
        let c = c11();
        let du = DiffOp::d_fiber(c, Space::E, 1);
        let u = DiffOp::multiplication(&p("u1", c));
        assert_eq!(du.commutator(&u).unwrap(), DiffOp::identity(c, Space::E));
        let d2 = op(c, &[("u1", &[], &[1, 1])]);
        assert_eq!(du.commutator(&d2).unwrap(), op(c, &[("1", &[], &[1, 1])]));
        assert!(d2.commutator(&d2).unwrap().is_zero());
    }

    #[test]
    fn grading_examples() {
        let c = c11();
        let d2 = op(c, &[("u1", &[], &[1, 1])]);
        let parts = d2.grade_decompose().unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[&-1], d2);
        assert_eq!(op(c, &[("1", &[], &[1, 1])]).homogeneous_weight(), Some(-2));
        assert_eq!(op(c, &[("x1", &[1], &[])]).homogeneous_weight(), Some(0));
        let amb = op(c, &[("1", &[1], &[])])
            .with_space(Space::Ambient)
            .unwrap();
        assert!(amb.grade_decompose().is_err());
    }

    #[test]
    fn classification_examples() {
        let c = c11();
        let core2 = op(c, &[("1", &[], &[1, 1])]);
        assert!(core2.is_core(2).unwrap());
        assert!(!op(c, &[("u1", &[], &[1, 1])]).is_core(2).unwrap());
        assert!(!DiffOp::d_base(c, Space::E, 1).is_core(1).unwrap());

        assert!(op(c, &[("u1", &[], &[1, 1])]).is_fwl(2).unwrap());
        assert!(DiffOp::d_fiber(c, Space::E, 1).is_fwl(2).unwrap());
        assert!(!DiffOp::d_fiber(c, Space::E, 1).is_fwl(1).unwrap());
        // multiplication by a fiber-linear function has weight +1
        let lin = DiffOp::multiplication(&p("x1*u1", c));
        assert!(lin.is_fwl(0).unwrap());
        assert!(!lin.is_fwl(1).unwrap());
        assert!(DiffOp::identity(c, Space::E).is_fwl(1).unwrap());
        let c12 = Chart::new(1, 2).unwrap();
        assert!(!op(c12, &[("u1*u2", &[], &[1])]).is_fwl(2).unwrap());
        assert!(!DiffOp::zero(c, Space::E).is_fwl(1).unwrap());
        assert!(!DiffOp::zero(c, Space::E).is_core(0).unwrap());
    }

    #[test]
    fn recovery_examples() {
        let c = c11();
        let dxx = op(c, &[("1", &[1, 1], &[])]);
        let rec = dxx.recover_coefficients();
        assert_eq!(rec.len(), 1);
        assert_eq!(rec[&DerivKey::base(&[1, 1])], p("1", c));
        // the un-normalized bracket is 2 = (11)!
        let x = p("x1", c);
        assert_eq!(
            nested_commutator_at_one(&dxx, &[x.clone(), x]).unwrap(),
            p("2", c)
        );
        let id = DiffOp::identity(c, Space::E);
        assert_eq!(id.recover_coefficients()[&DerivKey::default()], p("1", c));
    }

    #[test]
    fn generators_rebuild_fwl_operator() {
        let c = Chart::new(1, 2).unwrap();
        let d = op(
            c,
            &[
                ("x1", &[1], &[2]),
                ("u1 + x1*u2", &[], &[1, 2]),
                ("2*u1", &[], &[1, 1]),
                ("x1^2", &[], &[2]),
            ],
        );
        assert!(d.is_fwl(2).unwrap());
        let gens = d.fwl_generators(2).unwrap();
        let mut acc = DiffOp::zero(c, Space::E);
        for (f, g) in &gens {
            assert!(f.in_core_algebra());
            acc = &acc + &f.compose(g.op()).unwrap();
        }
        assert_eq!(acc, d);
    }
}
