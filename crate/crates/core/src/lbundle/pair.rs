use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_traits::One;

use super::LDerivation;
use crate::diffop::{DerivKey, DiffOp};
use crate::error::{Error, Result};
use crate::multivec::{Section, SectionRole, SymMultivector};
use crate::symcore::{Chart, MultiIndex, Poly, Rational, Space};

/// A symmetric multivector of the trivial line bundle over `E`:
/// `D(f_1, …, f_{K−1} | g) = P(f_1, …, f_{K−1}, g) + R(f_1, …, f_{K−1})·g`,
/// with `P` of order `K` and `R` of order `K − 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LMultivector {
    p: SymMultivector,
    r: SymMultivector,
}

impl LMultivector {
    pub fn new(p: SymMultivector, r: SymMultivector) -> Result<Self> {
        p.chart().ensure_same(&r.chart())?;
        p.space().ensure(&[Space::E])?;
        r.space().ensure(&[Space::E])?;
        if p.order() == 0 || r.order() + 1 != p.order() {
            return Err(Error::ArityMismatch {
                expected: p.order().max(1) - 1,
                found: r.order(),
            });
        }
        Ok(LMultivector { p, r })
    }

    pub fn chart(&self) -> Chart {
        self.p.chart()
    }

    /// `K`: the number of function slots plus one.
    pub fn order(&self) -> usize {
        self.p.order()
    }

    /// The symbol `L_D = P`.
    pub fn symbol(&self) -> &SymMultivector {
        &self.p
    }

    pub fn mult_part(&self) -> &SymMultivector {
        &self.r
    }

    pub fn eval(&self, fs: &[Poly], g: &Poly) -> Result<Poly> {
        let mut args = fs.to_vec();
        args.push(g.clone());
        Ok(&self.p.eval(&args)? + &self.r.eval(fs)?.try_mul(g)?)
    }

    /// Rebuild from an evaluator on coordinate functions:
    /// `R(z_J) = D(z_J | 1)` and `P(z_J, z_j) = D(z_J | z_j) − R(z_J)·z_j`.
    fn from_evaluator(
        chart: Chart,
        order: usize,
        eval: impl Fn(&[Poly], &Poly) -> Result<Poly>,
    ) -> Result<LMultivector> {
        let one = Poly::one(chart, Space::E);
        let coords = SymMultivector::zero(chart, Space::E, 0).coordinates();
        let r = SymMultivector::from_coordinate_values(
            chart,
            Space::E,
            order - 1,
            |fs| eval(fs, &one),
            &coords,
        )?;
        let p = SymMultivector::from_coordinate_values(
            chart,
            Space::E,
            order,
            |args| {
                let (g, fs) = args.split_last().expect("order is positive");
                Ok(&eval(fs, g)? - &r.eval(fs)?.try_mul(g)?)
            },
            &coords,
        )?;
        LMultivector::new(p, r)
    }

    /// The associative product, from its defining unshuffle sums:
    /// `Σ_{S(k1+1,k2)} L_{D1}(f…) D2(f…|g) + Σ_{S(k2+1,k1)} L_{D2}(f…) D1(f…|g)`.
    pub fn product(&self, other: &LMultivector) -> Result<LMultivector> {
        self.chart().ensure_same(&other.chart())?;
        let order = self.order() + other.order();
        let slots = order - 1;
        let half = |a: &LMultivector, b: &LMultivector, fs: &[Poly], g: &Poly| -> Result<Poly> {
            let mut acc = Poly::zero(a.chart(), Space::E);
            for chosen in (0..slots).combinations(a.order()) {
                let (inside, outside) = split(fs, &chosen);
                acc = &acc + &a.p.eval(&inside)?.try_mul(&b.eval(&outside, g)?)?;
            }
            Ok(acc)
        };
        LMultivector::from_evaluator(self.chart(), order, |fs, g| {
            Ok(&half(self, other, fs, g)? + &half(other, self, fs, g)?)
        })
    }

    /// `D1 • D2 (f… | g) = Σ_{S(k1,k2)} D1(f… | D2(f… | g)) + Σ_{S(k1−1,k2+1)} D1(f…, L_{D2}(f…) | g)`.
    fn bullet(&self, other: &LMultivector, fs: &[Poly], g: &Poly) -> Result<Poly> {
        let k1 = self.order() - 1;
        let slots = fs.len();
        let mut acc = Poly::zero(self.chart(), Space::E);
        for chosen in (0..slots).combinations(k1) {
            let (inside, outside) = split(fs, &chosen);
            acc = &acc + &self.eval(&inside, &other.eval(&outside, g)?)?;
        }
        if let Some(k) = k1.checked_sub(1) {
            for chosen in (0..slots).combinations(k) {
                let (mut inside, outside) = split(fs, &chosen);
                inside.push(other.p.eval(&outside)?);
                acc = &acc + &self.eval(&inside, g)?;
            }
        }
        Ok(acc)
    }

    /// `{D1, D2} = D1 • D2 − D2 • D1`.
    pub fn bracket(&self, other: &LMultivector) -> Result<LMultivector> {
        self.chart().ensure_same(&other.chart())?;
        let order = self.order() + other.order() - 1;
        LMultivector::from_evaluator(self.chart(), order, |fs, g| {
            Ok(&self.bullet(other, fs, g)? - &other.bullet(self, fs, g)?)
        })
    }
}

fn split(fs: &[Poly], chosen: &[usize]) -> (Vec<Poly>, Vec<Poly>) {
    let inside = chosen.iter().map(|&i| fs[i].clone()).collect();
    let outside = (0..fs.len())
        .filter(|i| !chosen.contains(i))
        .map(|i| fs[i].clone())
        .collect();
    (inside, outside)
}

impl fmt::Display for LMultivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P = {}; R = {}", self.p, self.r)
    }
}

/// A pair `(P, Φ)`: a fiber-wise linear `q`-multivector `P` on `E` and, for
/// each fiber multi-index `C` of length `q − 1`, the derivation `Φ(ε^C)` of
/// `L_{E*}` written in the frame `Vol_u` as `(X_C, c_C)`.
///
/// The frame splitting is chart dependent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LPair {
    p: SymMultivector,
    phi: BTreeMap<MultiIndex, (Vec<Poly>, Poly)>,
}

fn basis_sections(chart: Chart, c: &MultiIndex) -> Vec<Section> {
    c.letters()
        .iter()
        .map(|&a| Section::basis(chart, SectionRole::OfEstar, a))
        .collect()
}

/// `X_C^i = l_P(ε^C)(x^i)`.
fn symbol_field(p: &SymMultivector, c: &MultiIndex) -> Result<Vec<Poly>> {
    let chart = p.chart();
    let sections = basis_sections(chart, c);
    (1..=chart.base_dim)
        .map(|i| p.multiderivation_l(&sections, &Poly::x(chart, Space::E, i)))
        .collect()
}

impl LPair {
    /// Entries missing from `phi` are zero. Fails with `IncompatiblePair`
    /// unless every `X_C` equals `l_P(ε^C)`.
    pub fn new(p: SymMultivector, phi: BTreeMap<MultiIndex, (Vec<Poly>, Poly)>) -> Result<Self> {
        if !p.is_fwl() {
            return Err(Error::NotFwl(p.to_string()));
        }
        let q = p.order();
        if q == 0 {
            return Err(Error::NotFwl(
                "a pair needs a multivector of order at least 1".into(),
            ));
        }
        let chart = p.chart();
        let zero = Poly::zero(chart, Space::E);
        for (c, (x, m)) in &phi {
            if c.len() != q - 1 || c.max_letter() > chart.fiber_rank {
                return Err(Error::NotHomogeneous(format!(
                    "multi-index {c} in a pair of order {q}"
                )));
            }
            if x.len() != chart.base_dim {
                return Err(Error::RankMismatch(format!(
                    "X_{c} has {} components",
                    x.len()
                )));
            }
            for f in x.iter().chain([m]) {
                chart.ensure_same(&f.chart())?;
                if !f.is_base_only() {
                    return Err(Error::NotHomogeneous(format!("{f} is not a base function")));
                }
            }
        }
        let mut table = BTreeMap::new();
        for c in MultiIndex::all_of_len(chart.fiber_rank, q - 1) {
            let expected = symbol_field(&p, &c)?;
            let (x, m) = match phi.get(&c) {
                Some((x, m)) => (
                    x.iter()
                        .map(|f| f.with_space(Space::E))
                        .collect::<Result<Vec<_>>>()?,
                    m.with_space(Space::E)?,
                ),
                None => (vec![zero.clone(); chart.base_dim], zero.clone()),
            };
            if x != expected {
                return Err(Error::IncompatiblePair(format!(
                    "X_{c} = [{}] but l_P gives [{}]",
                    x.iter().join(", "),
                    expected.iter().join(", ")
                )));
            }
            table.insert(c, (x, m));
        }
        Ok(LPair { p, phi: table })
    }

    /// The pair with the given `c_C` (missing ones are zero) and the `X_C`
    /// forced by `P`.
    pub fn from_mult_table(p: SymMultivector, mult: BTreeMap<MultiIndex, Poly>) -> Result<Self> {
        let mut phi = BTreeMap::new();
        if p.order() > 0 {
            for c in MultiIndex::all_of_len(p.chart().fiber_rank, p.order() - 1) {
                let m = mult
                    .get(&c)
                    .cloned()
                    .unwrap_or_else(|| Poly::zero(p.chart(), Space::E));
                phi.insert(c.clone(), (symbol_field(&p, &c)?, m));
            }
        }
        if let Some(c) = mult.keys().find(|c| !phi.contains_key(*c)) {
            return Err(Error::NotHomogeneous(format!(
                "multi-index {c} in a pair of order {}",
                p.order()
            )));
        }
        LPair::new(p, phi)
    }

    pub fn chart(&self) -> Chart {
        self.p.chart()
    }

    pub fn order(&self) -> usize {
        self.p.order()
    }

    pub fn multivector(&self) -> &SymMultivector {
        &self.p
    }

    pub fn phi(&self) -> &BTreeMap<MultiIndex, (Vec<Poly>, Poly)> {
        &self.phi
    }

    /// `(P, R)` with the core multivector `R = Σ_C (c_C / C!) ∂u^C`.
    pub fn to_lmultivector(&self) -> LMultivector {
        let chart = self.chart();
        let terms = self.phi.iter().map(|(c, (_, m))| {
            (
                DerivKey::new(MultiIndex::empty(), c.clone()),
                m.scale(&(Rational::one() / c.factorial())),
            )
        });
        let table = DiffOp::from_terms(chart, Space::E, terms).expect("keys are in range");
        let r = SymMultivector::new(table, self.order() - 1).expect("keys have length q - 1");
        LMultivector::new(self.p.clone(), r).expect("orders are consistent")
    }

    pub fn from_lmultivector(d: &LMultivector) -> Result<LPair> {
        let r = d.mult_part();
        if !(r.is_zero() || r.is_core()) {
            return Err(Error::NotCore(r.to_string()));
        }
        let mult = r
            .as_diffop()
            .terms()
            .map(|(key, m)| (key.fiber.clone(), m.scale(&key.fiber.factorial())))
            .collect();
        LPair::from_mult_table(d.symbol().clone(), mult)
    }

    /// `(H_P, Σ_C (c_C / C!) v_C)`, homogeneous of degree `q − 1`.
    pub fn to_lderivation(&self) -> Result<LDerivation> {
        let field = self.p.hamiltonian_field()?;
        let mult = self.to_lmultivector().mult_part().core_to_dualpoly()?;
        LDerivation::new(field, mult)
    }

    pub fn from_lderivation(d: &LDerivation, q: usize) -> Result<LPair> {
        if q == 0 || !d.is_homogeneous_of(q as i64 - 1) {
            return Err(Error::NotHomogeneous(format!(
                "{d} is not homogeneous of degree {}",
                q as i64 - 1
            )));
        }
        let chart = d.chart();
        let p = if d.field().is_zero() {
            SymMultivector::zero(chart, Space::E, q)
        } else {
            SymMultivector::from_hamiltonian_field(d.field())?
        };
        let r = if d.mult().is_zero() {
            SymMultivector::zero(chart, Space::E, q - 1)
        } else {
            SymMultivector::from_dualpoly(d.mult())?
        };
        LPair::from_lmultivector(&LMultivector::new(p, r)?)
    }

    pub fn bracket(&self, other: &LPair) -> Result<LPair> {
        LPair::from_lmultivector(&self.to_lmultivector().bracket(&other.to_lmultivector())?)
    }

    pub fn product(&self, other: &LPair) -> Result<LMultivector> {
        self.to_lmultivector().product(&other.to_lmultivector())
    }
}

impl fmt::Display for LPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P = {}", self.p)?;
        for (c, (x, m)) in &self.phi {
            write!(f, "; Phi{c} = ([{}], {m})", x.iter().join(", "))?;
        }
        Ok(())
    }
}
