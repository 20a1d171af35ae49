//! Symmetric multivectors on `E`, stored as the top coefficient table of an
//! order-`q` operator and evaluated by nested commutators.

mod field;
pub(crate) mod laplacian;

use std::fmt;

use itertools::Itertools;
use num_traits::One;

use crate::diffop::{nested_commutator_at_one, weight, DerivKey, DiffOp};
use crate::error::{Error, Result};
use crate::symcore::{Chart, Monomial, MultiIndex, Poly, Rational, Space};

pub use field::{PolyVectorField, Section, SectionRole};
pub use laplacian::{fwl_metric_laplacian, metric_determinant, Gamma};

/// A symmetric `q`-multivector: every key of the table has length exactly `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymMultivector {
    order: usize,
    table: DiffOp,
}

impl SymMultivector {
    pub fn new(table: DiffOp, order: usize) -> Result<Self> {
        if let Some((key, _)) = table.terms().find(|(k, _)| k.len() != order) {
            return Err(Error::NotHomogeneous(format!(
                "term d{}{} has length {} in a {order}-multivector",
                key.base,
                key.fiber,
                key.len()
            )));
        }
        Ok(SymMultivector { order, table })
    }

    pub fn zero(chart: Chart, space: Space, order: usize) -> Self {
        SymMultivector {
            order,
            table: DiffOp::zero(chart, space),
        }
    }

    /// Build from a homogeneous operator, taking its order from the table.
    pub fn from_homogeneous(table: DiffOp) -> Result<Self> {
        let order = table
            .order()
            .ok_or(Error::ZeroOperator("multivector order"))?;
        SymMultivector::new(table, order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn chart(&self) -> Chart {
        self.table.chart()
    }

    pub fn space(&self) -> Space {
        self.table.space()
    }

    pub fn as_diffop(&self) -> &DiffOp {
        &self.table
    }

    pub fn coeff(&self, key: &DerivKey) -> Poly {
        self.table.coeff(key)
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_zero()
    }

    pub fn scale(&self, c: &Rational) -> SymMultivector {
        SymMultivector {
            order: self.order,
            table: self.table.scale(c),
        }
    }

    pub fn try_add(&self, other: &SymMultivector) -> Result<SymMultivector> {
        if self.order != other.order {
            return Err(Error::ArityMismatch {
                expected: self.order,
                found: other.order,
            });
        }
        Ok(SymMultivector {
            order: self.order,
            table: self.table.try_add(&other.table)?,
        })
    }

    /// `P(f_1, …, f_q) = […[Δ_P, f_1], …, f_q](1)`.
    pub fn eval(&self, args: &[Poly]) -> Result<Poly> {
        if args.len() != self.order {
            return Err(Error::ArityMismatch {
                expected: self.order,
                found: args.len(),
            });
        }
        nested_commutator_at_one(&self.table, args)
    }

    /// Coordinate functions, indexed by combined slot (base slots first).
    pub(crate) fn coordinates(&self) -> Vec<Poly> {
        let chart = self.chart();
        (0..chart.nvars())
            .map(|slot| {
                let mut mono = Monomial::one(chart.nvars());
                mono.0[slot] = 1;
                Poly::from_terms(chart, self.space(), [(mono, Rational::one())])
            })
            .collect()
    }

    /// Rebuild a `q`-multivector from its values on coordinate functions:
    /// `P^J = P(z_{j_1}, …, z_{j_q}) / J!`.
    pub(crate) fn from_coordinate_values(
        chart: Chart,
        space: Space,
        order: usize,
        mut value: impl FnMut(&[Poly]) -> Result<Poly>,
        coords: &[Poly],
    ) -> Result<SymMultivector> {
        let n = chart.base_dim;
        let mut table = DiffOp::zero(chart, space);
        for word in (0..chart.nvars()).combinations_with_replacement(order) {
            let args: Vec<Poly> = word.iter().map(|&s| coords[s].clone()).collect();
            let v = value(&args)?;
            if v.is_zero() {
                continue;
            }
            let key = DerivKey::new(
                MultiIndex::new(word.iter().filter(|&&s| s < n).map(|s| s + 1).collect()),
                MultiIndex::new(
                    word.iter()
                        .filter(|&&s| s >= n)
                        .map(|s| s - n + 1)
                        .collect(),
                ),
            );
            let scaled = v.scale(&(Rational::one() / key.factorial()));
            table.add_term(key, scaled);
        }
        Ok(SymMultivector { order, table })
    }

    /// The Poisson bracket, computed from its defining unshuffle sums:
    ///
    /// `{P1,P2}(f) = Σ_{S(q2, q1−1)} P1(P2(f_σ…), f_σ…) − Σ_{S(q1, q2−1)} P2(P1(f_σ…), f_σ…)`.
    pub fn poisson(&self, other: &SymMultivector) -> Result<SymMultivector> {
        self.chart().ensure_same(&other.chart())?;
        if self.space() != other.space() {
            return Err(Error::SpaceMismatch {
                expected: self.space().to_string(),
                found: other.space(),
            });
        }
        let (q1, q2) = (self.order, other.order);
        if q1 + q2 == 0 {
            return Ok(SymMultivector::zero(self.chart(), self.space(), 0));
        }
        let q = q1 + q2 - 1;
        let half =
            |outer: &SymMultivector, inner: &SymMultivector, args: &[Poly]| -> Result<Poly> {
                let mut acc = Poly::zero(outer.chart(), outer.space());
                if outer.order == 0 {
                    return Ok(acc);
                }
                for first in (0..q).combinations(inner.order) {
                    let inner_args: Vec<Poly> = first.iter().map(|&i| args[i].clone()).collect();
                    let mut outer_args = vec![inner.eval(&inner_args)?];
                    outer_args.extend(
                        (0..q)
                            .filter(|i| !first.contains(i))
                            .map(|i| args[i].clone()),
                    );
                    acc = &acc + &outer.eval(&outer_args)?;
                }
                Ok(acc)
            };
        let coords = self.coordinates();
        SymMultivector::from_coordinate_values(
            self.chart(),
            self.space(),
            q,
            |args| Ok(&half(self, other, args)? - &half(other, self, args)?),
            &coords,
        )
    }

    /// Symmetric product: coefficients multiply, multi-indices concatenate.
    pub fn sym_product(&self, other: &SymMultivector) -> Result<SymMultivector> {
        self.chart().ensure_same(&other.chart())?;
        let mut table = DiffOp::zero(self.chart(), self.space());
        for (k1, c1) in self.table.terms() {
            for (k2, c2) in other.table.terms() {
                table.add_term(k1.concat(k2), c1.try_mul(c2)?);
            }
        }
        Ok(SymMultivector {
            order: self.order + other.order,
            table,
        })
    }

    /// FWL test by weight: every term has weight `1 − q`. Cross-checked
    /// against the evaluation conditions on coordinate linear and core functions.
    pub fn is_fwl(&self) -> bool {
        let target = 1 - self.order as i64;
        let by_weight = self.space() == Space::E
            && self.table.terms().all(|(key, c)| {
                c.fiber_degree_decompose()
                    .keys()
                    .all(|&d| weight(d, key) == target)
            });
        if self.space() == Space::E {
            assert_eq!(
                by_weight,
                self.fwl_by_conditions(),
                "weight and evaluation tests disagree on {self}"
            );
        }
        by_weight
    }

    /// `P(f…) ∈ C_lin`, `P(f…, h) ∈ C_core`, `P(f…, h1, h2) = 0` for linear
    /// coordinates `f` and core coordinates `h`.
    pub fn fwl_by_conditions(&self) -> bool {
        let n = self.chart().base_dim;
        let coords = self.coordinates();
        (0..self.chart().nvars())
            .combinations_with_replacement(self.order)
            .all(|word| {
                let cores = word.iter().filter(|&&s| s < n).count();
                let args: Vec<Poly> = word.iter().map(|&s| coords[s].clone()).collect();
                let v = self.eval(&args).expect("arity matches");
                match cores {
                    0 => v.is_zero() || v.homogeneous_fiber_degree() == Some(1),
                    1 => v.is_base_only(),
                    _ => v.is_zero(),
                }
            })
    }

    /// Core multivector: every term is `P^A(x) ∂u^A`.
    pub fn is_core(&self) -> bool {
        self.space() == Space::E
            && self
                .table
                .terms()
                .all(|(key, c)| key.base.is_empty() && c.is_base_only())
    }

    fn ensure_fwl(&self) -> Result<()> {
        if self.is_fwl() {
            Ok(())
        } else {
            Err(Error::NotFwl(self.to_string()))
        }
    }

    /// `D_P(φ_1, …, φ_q)`: the section whose linear function is `P(ℓ_φ1, …, ℓ_φq)`.
    pub fn multiderivation_d(&self, phis: &[Section]) -> Result<Section> {
        self.ensure_fwl()?;
        let args = phis
            .iter()
            .map(|phi| phi.linear_function(SectionRole::OfEstar))
            .collect::<Result<Vec<_>>>()?;
        let value = self.eval(&args)?;
        Section::from_linear_function(&value, SectionRole::OfEstar)
    }

    /// `l_P(φ_1, …, φ_{q−1})(f) = P(ℓ_φ1, …, ℓ_φ(q−1), f)` for base-only `f`.
    pub fn multiderivation_l(&self, phis: &[Section], f: &Poly) -> Result<Poly> {
        self.ensure_fwl()?;
        if !f.is_base_only() {
            return Err(Error::NotHomogeneous(format!("{f} is not a base function")));
        }
        let mut args = phis
            .iter()
            .map(|phi| phi.linear_function(SectionRole::OfEstar))
            .collect::<Result<Vec<_>>>()?;
        args.push(f.with_space(Space::E)?);
        self.eval(&args)
    }

    /// `F_P = Σ_A P^A(x) v_A`, the polynomial on `E*` of a core multivector.
    pub fn core_to_dualpoly(&self) -> Result<Poly> {
        if !self.is_core() {
            return Err(Error::NotCore(self.to_string()));
        }
        let chart = self.chart();
        let mut out = Poly::zero(chart, Space::Estar);
        for (key, c) in self.table.terms() {
            let v = Poly::fiber_monomial(chart, Space::Estar, &key.fiber);
            out = &out + &(&c.with_space(Space::Estar)? * &v);
        }
        Ok(out)
    }

    /// Inverse of [`core_to_dualpoly`](Self::core_to_dualpoly) on a
    /// homogeneous polynomial of `E*`.
    pub fn from_dualpoly(f: &Poly) -> Result<SymMultivector> {
        f.space().ensure(&[Space::Estar])?;
        let chart = f.chart();
        let order = match f.homogeneous_fiber_degree() {
            Some(d) => d as usize,
            None if f.is_zero() => 0,
            None => return Err(Error::NotHomogeneous(f.to_string())),
        };
        let mut table = DiffOp::zero(chart, Space::E);
        for (c, coeff) in f.fiber_coefficients() {
            table.add_term(
                DerivKey::new(MultiIndex::empty(), c),
                coeff.with_space(Space::E)?,
            );
        }
        Ok(SymMultivector { order, table })
    }

    /// `H_P = {P, −}` as a polynomial vector field on `E*`:
    /// `Σ P^{i|A} v_A ∂x_i − Σ P^B_α v_B ∂v_α`.
    pub fn hamiltonian_field(&self) -> Result<PolyVectorField> {
        self.ensure_fwl()?;
        let chart = self.chart();
        let mut field = PolyVectorField::zero(chart);
        for (key, c) in self.table.terms() {
            match key.base.len() {
                1 => {
                    let i = key.base.letters()[0];
                    let v = Poly::fiber_monomial(chart, Space::Estar, &key.fiber);
                    field.base[i - 1] = &field.base[i - 1] + &(&c.with_space(Space::Estar)? * &v);
                }
                0 => {
                    let v = Poly::fiber_monomial(chart, Space::Estar, &key.fiber);
                    for (alpha, coeff) in c.fiber_coefficients() {
                        let a = alpha.letters()[0];
                        let term = &coeff.with_space(Space::Estar)? * &v;
                        field.dual[a - 1] = &field.dual[a - 1] - &term;
                    }
                }
                _ => unreachable!("fwl multivectors have at most one base slot"),
            }
        }
        Ok(field)
    }

    /// The fiber-wise linear multivector with a given Hamiltonian field.
    pub fn from_hamiltonian_field(field: &PolyVectorField) -> Result<SymMultivector> {
        let degree = field
            .homogeneous_degree()
            .ok_or_else(|| Error::NotHomogeneous(field.to_string()))?;
        let order = (degree + 1) as usize;
        let chart = field.chart();
        let mut table = DiffOp::zero(chart, Space::E);
        for (i, comp) in field.base.iter().enumerate() {
            for (a, coeff) in comp.fiber_coefficients() {
                let key = DerivKey::new(MultiIndex::single(i + 1), a);
                table.add_term(key, coeff.with_space(Space::E)?);
            }
        }
        for (alpha, comp) in field.dual.iter().enumerate() {
            let u = Poly::fiber(chart, Space::E, alpha + 1);
            for (b, coeff) in comp.fiber_coefficients() {
                let key = DerivKey::new(MultiIndex::empty(), b);
                table.add_term(key, -&(&coeff.with_space(Space::E)? * &u));
            }
        }
        SymMultivector::new(table, order)
    }
}

impl DiffOp {
    /// The top-order table as a symmetric multivector.
    pub fn symbol(&self) -> Result<SymMultivector> {
        let q = self
            .order()
            .ok_or(Error::ZeroOperator("symbol of the zero operator"))?;
        SymMultivector::new(self.order_part(q), q)
    }
}

impl fmt::Display for SymMultivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::int;

    fn c11() -> Chart {
        Chart::new(1, 1).unwrap()
    }

    fn mv(chart: Chart, terms: &[(&str, &[usize], &[usize])]) -> SymMultivector {
        let table = DiffOp::from_terms(
            chart,
            Space::E,
            terms.iter().map(|(c, dx, du)| {
                (
                    DerivKey::new(MultiIndex::new(dx.to_vec()), MultiIndex::new(du.to_vec())),
                    Poly::parse(c, chart, Space::E).unwrap(),
                )
            }),
        )
        .unwrap();
        SymMultivector::from_homogeneous(table).unwrap()
    }

    fn e(s: &str, chart: Chart) -> Poly {
        Poly::parse(s, chart, Space::E).unwrap()
    }

    fn dual(s: &str, chart: Chart) -> Poly {
        Poly::parse(s, chart, Space::Estar).unwrap()
    }

    #[test]
    fn evaluation() {
        let c = c11();
        let dxx = mv(c, &[("1", &[1, 1], &[])]);
        assert_eq!(dxx.eval(&[e("x1", c), e("x1", c)]).unwrap(), e("2", c));
        let core = mv(c, &[("x1", &[], &[1, 1])]);
        assert!(core.eval(&[e("u1*x1", c), e("3", c)]).unwrap().is_zero());
        let p = mv(c, &[("u1", &[1], &[1])]);
        let (f, g) = (e("x1*u1", c), e("u1^2", c));
        assert_eq!(
            p.eval(&[f.clone(), g.clone()]).unwrap(),
            p.eval(&[g, f]).unwrap()
        );
        assert!(matches!(
            p.eval(&[e("x1", c)]),
            Err(Error::ArityMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn poisson_examples() {
        let c = Chart::new(2, 1).unwrap();
        let dx1 = mv(c, &[("1", &[1], &[])]);
        let du = mv(c, &[("1", &[], &[1, 1])]);
        assert!(dx1.poisson(&du).unwrap().is_zero());
        let c = c11();
        let p1 = mv(c, &[("1", &[], &[1])]);
        let p2 = mv(c, &[("u1", &[], &[1])]);
        assert_eq!(p1.poisson(&p2).unwrap(), p1);
        // worked by hand: {u∂u∂u, ∂u} = −∂u∂u
        let p = mv(c, &[("u1", &[], &[1, 1])]);
        assert_eq!(
            p.poisson(&p1).unwrap(),
            mv(c, &[("1", &[], &[1, 1])]).scale(&int(-1))
        );
    }

    #[test]
    fn symbol_of_commutator_is_the_bracket_of_symbols() {
        let c = c11();
        let d1 = mv(c, &[("u1", &[], &[1, 1])])
            .as_diffop()
            .try_add(&DiffOp::d_fiber(c, Space::E, 1))
            .unwrap();
        let d2 = mv(c, &[("x1^2 + u1", &[1], &[])]).as_diffop().clone();
        let bracket = d1.commutator(&d2).unwrap();
        let lhs = d1.symbol().unwrap().poisson(&d2.symbol().unwrap()).unwrap();
        assert_eq!(lhs.as_diffop(), &bracket.order_part(2));
    }

    #[test]
    fn fwl_checks() {
        let c = c11();
        assert!(mv(c, &[("u1", &[], &[1, 1])]).is_fwl());
        assert!(!mv(c, &[("1", &[], &[1, 1])]).is_fwl());
        assert!(mv(c, &[("x1", &[1], &[1])]).is_fwl());
    }

    #[test]
    fn multiderivations() {
        let c = c11();
        let p = mv(c, &[("u1", &[], &[1, 1])]);
        let eps = Section::basis(c, SectionRole::OfEstar, 1);
        let d = p.multiderivation_d(&[eps.clone(), eps.clone()]).unwrap();
        assert_eq!(d.components(), &[e("2", c)]);
        assert!(p
            .multiderivation_l(std::slice::from_ref(&eps), &e("x1", c))
            .unwrap()
            .is_zero());
        let q = mv(c, &[("1", &[1], &[1])]);
        assert_eq!(
            q.multiderivation_l(std::slice::from_ref(&eps), &e("x1", c))
                .unwrap(),
            e("1", c)
        );
        assert!(q.multiderivation_l(&[eps], &e("5", c)).unwrap().is_zero());
        let core = mv(c, &[("1", &[], &[1, 1])]);
        assert!(matches!(core.multiderivation_d(&[]), Err(Error::NotFwl(_))));
    }

    #[test]
    fn dual_polynomials() {
        let c = c11();
        assert_eq!(
            mv(c, &[("1", &[], &[1, 1])]).core_to_dualpoly().unwrap(),
            dual("v1^2", c)
        );
        let c2 = Chart::new(1, 2).unwrap();
        let lift = mv(c2, &[("x1", &[], &[1]), ("3", &[], &[2])]);
        assert_eq!(lift.core_to_dualpoly().unwrap(), dual("x1*v1 + 3*v2", c2));
        let f = SymMultivector::new(DiffOp::multiplication(&e("x1^2", c)), 0).unwrap();
        assert_eq!(f.core_to_dualpoly().unwrap(), dual("x1^2", c));
        assert!(mv(c, &[("u1", &[], &[1])]).core_to_dualpoly().is_err());
    }

    #[test]
    fn hamiltonian_examples() {
        let c = c11();
        let h = mv(c, &[("u1", &[], &[1, 1])]).hamiltonian_field().unwrap();
        assert_eq!(h.base, vec![dual("0", c)]);
        assert_eq!(h.dual, vec![dual("-v1^2", c)]);
        let h = mv(c, &[("1", &[1], &[1])]).hamiltonian_field().unwrap();
        assert_eq!(h.base, vec![dual("v1", c)]);
        assert!(h.dual[0].is_zero());
        // linear vector field x1 ∂x1 + 2 u1 ∂u1 maps to its dual x1 ∂x1 − 2 v1 ∂v1
        let h = mv(c, &[("x1", &[1], &[]), ("2*u1", &[], &[1])])
            .hamiltonian_field()
            .unwrap();
        assert_eq!(h.base, vec![dual("x1", c)]);
        assert_eq!(h.dual, vec![dual("-2*v1", c)]);
    }
}
