//! Bounded random generators. Coefficients are `p/q` with `|p|, q ≤ 9`.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Bounds;
use crate::diffop::{DerivKey, DiffOp};
use crate::lbundle::{FrameDerivation, LDerivation};
use crate::multivec::{Gamma, PolyVectorField, Section, SectionRole, SymMultivector};
use crate::symcore::{Chart, MultiIndex, Poly, Rational, Space};

pub(crate) const MAX_COEFF: i64 = 9;
pub(crate) const MAX_TERMS: usize = 4;

pub(crate) struct Gen {
    pub rng: ChaCha8Rng,
    pub bounds: Bounds,
}

impl Gen {
    pub fn rational(&mut self) -> Rational {
        let mut num = 0;
        while num == 0 {
            num = self.rng.gen_range(-MAX_COEFF..=MAX_COEFF);
        }
        let den = self.rng.gen_range(1..=MAX_COEFF);
        Rational::new(num.into(), den.into())
    }

    pub fn chart(&mut self) -> Chart {
        let n = self.rng.gen_range(1..=self.bounds.n);
        let m = self.rng.gen_range(1..=self.bounds.m);
        Chart::new(n, m).expect("bounds are positive")
    }

    /// A chart with `n = m`, as needed by the metric Laplacian.
    pub fn square_chart(&mut self) -> Chart {
        let n = self.rng.gen_range(1..=self.bounds.n.min(self.bounds.m));
        Chart::new(n, n).expect("bounds are positive")
    }

    pub fn order(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi.max(lo))
    }

    fn letters(&mut self, dim: usize, len: usize) -> MultiIndex {
        MultiIndex::new((0..len).map(|_| self.rng.gen_range(1..=dim)).collect())
    }

    /// A monomial with base degree at most 2 and the given fiber multi-index.
    fn monomial(&mut self, chart: Chart, space: Space, fiber: &MultiIndex) -> Poly {
        let mut out = Poly::fiber_monomial(chart, space, fiber);
        for _ in 0..self.rng.gen_range(0..=2) {
            out = &out * &Poly::x(chart, space, self.rng.gen_range(1..=chart.base_dim));
        }
        out.scale(&self.rational())
    }

    /// Up to `MAX_TERMS` terms, each of fiber degree in `degrees`.
    pub fn poly(&mut self, chart: Chart, space: Space, degrees: &[usize]) -> Poly {
        let mut out = Poly::zero(chart, space);
        for _ in 0..self.rng.gen_range(1..=MAX_TERMS) {
            let d = *degrees.choose(&mut self.rng).expect("nonempty degrees");
            let fiber = self.letters(chart.fiber_rank, d);
            out = &out + &self.monomial(chart, space, &fiber);
        }
        out
    }

    pub fn base_poly(&mut self, chart: Chart) -> Poly {
        self.poly(chart, Space::E, &[0])
    }

    /// Sometimes zero.
    pub fn maybe_base_poly(&mut self, chart: Chart) -> Poly {
        if self.rng.gen_bool(0.3) {
            Poly::zero(chart, Space::E)
        } else {
            self.base_poly(chart)
        }
    }

    fn key(&mut self, chart: Chart, len: usize) -> DerivKey {
        let slots: Vec<usize> = (0..len)
            .map(|_| self.rng.gen_range(0..chart.nvars()))
            .collect();
        let n = chart.base_dim;
        DerivKey::new(
            MultiIndex::new(slots.iter().filter(|&&s| s < n).map(|s| s + 1).collect()),
            MultiIndex::new(
                slots
                    .iter()
                    .filter(|&&s| s >= n)
                    .map(|s| s - n + 1)
                    .collect(),
            ),
        )
    }

    /// Any operator of order at most `max_order`.
    pub fn op(&mut self, chart: Chart, space: Space, max_order: usize) -> DiffOp {
        let mut out = DiffOp::zero(chart, space);
        for _ in 0..self.rng.gen_range(1..=MAX_TERMS) {
            let len = self.rng.gen_range(0..=max_order);
            let key = self.key(chart, len);
            let coeff = self.poly(chart, space, &[0, 1, 2]);
            out.add_term(key, coeff);
        }
        out
    }

    pub fn nonzero_op(&mut self, chart: Chart, space: Space, max_order: usize) -> DiffOp {
        loop {
            let op = self.op(chart, space, max_order);
            if !op.is_zero() {
                return op;
            }
        }
    }

    /// A fiber-wise linear operator of order `q`, built from the three
    /// admissible term shapes.
    pub fn fwl(&mut self, chart: Chart, q: usize) -> DiffOp {
        loop {
            let mut out = DiffOp::zero(chart, Space::E);
            for _ in 0..self.rng.gen_range(1..=MAX_TERMS) {
                let shape = if q == 0 { 1 } else { self.rng.gen_range(0..3) };
                match shape {
                    0 => {
                        let i = self.rng.gen_range(1..=chart.base_dim);
                        let a = self.letters(chart.fiber_rank, q - 1);
                        out.add_term(
                            DerivKey::new(MultiIndex::single(i), a),
                            self.base_poly(chart),
                        );
                    }
                    1 => {
                        let b = self.letters(chart.fiber_rank, q);
                        let coeff = self.poly(chart, Space::E, &[1]);
                        out.add_term(DerivKey::new(MultiIndex::empty(), b), coeff);
                    }
                    _ => {
                        let c = self.letters(chart.fiber_rank, q - 1);
                        out.add_term(DerivKey::new(MultiIndex::empty(), c), self.base_poly(chart));
                    }
                }
            }
            if !out.is_zero() {
                return out;
            }
        }
    }

    pub fn core(&mut self, chart: Chart, p: usize) -> DiffOp {
        loop {
            let mut out = DiffOp::zero(chart, Space::E);
            for _ in 0..self.rng.gen_range(1..=MAX_TERMS) {
                let c = self.letters(chart.fiber_rank, p);
                out.add_term(DerivKey::new(MultiIndex::empty(), c), self.base_poly(chart));
            }
            if !out.is_zero() {
                return out;
            }
        }
    }

    /// A term that fits no fiber-wise linear shape at any order.
    pub fn shape_violation(&mut self, chart: Chart, max_order: usize) -> DiffOp {
        loop {
            let (key, degree) = match self.rng.gen_range(0..3) {
                0 if max_order >= 2 => {
                    let extra = self.rng.gen_range(0..=max_order - 2);
                    let base = MultiIndex::new(
                        (0..2)
                            .map(|_| self.rng.gen_range(1..=chart.base_dim))
                            .collect(),
                    );
                    let fiber = self.letters(chart.fiber_rank, extra);
                    (DerivKey::new(base, fiber), self.rng.gen_range(0..=1))
                }
                1 if max_order >= 1 => {
                    let extra = self.rng.gen_range(0..max_order);
                    let key = DerivKey::new(
                        MultiIndex::single(self.rng.gen_range(1..=chart.base_dim)),
                        self.letters(chart.fiber_rank, extra),
                    );
                    (key, self.rng.gen_range(1..=2))
                }
                _ => {
                    let len = self.rng.gen_range(0..=max_order);
                    (
                        DerivKey::new(MultiIndex::empty(), self.letters(chart.fiber_rank, len)),
                        2,
                    )
                }
            };
            let fiber = self.letters(chart.fiber_rank, degree);
            let coeff = self.monomial(chart, Space::E, &fiber);
            if let Ok(op) = DiffOp::monomial(&coeff, key) {
                if !op.is_zero() {
                    return op;
                }
            }
        }
    }

    /// Homogeneous of degree `d ≥ −1` on `E*`; components may vanish.
    pub fn field(&mut self, chart: Chart, d: i64) -> PolyVectorField {
        let mut field = PolyVectorField::zero(chart);
        if d >= 0 {
            for comp in field.base.iter_mut() {
                if self.rng.gen_bool(0.6) {
                    *comp = self.poly(chart, Space::Estar, &[d as usize]);
                }
            }
        }
        for comp in field.dual.iter_mut() {
            if self.rng.gen_bool(0.6) {
                *comp = self.poly(chart, Space::Estar, &[(d + 1) as usize]);
            }
        }
        field
    }

    pub fn lderivation(&mut self, chart: Chart, d: i64) -> LDerivation {
        let field = self.field(chart, d);
        let mult = if d >= 0 && self.rng.gen_bool(0.7) {
            self.poly(chart, Space::Estar, &[d as usize])
        } else {
            Poly::zero(chart, Space::Estar)
        };
        LDerivation::new(field, mult).expect("same chart")
    }

    /// Any derivation of `L_{E*}` with small mixed degrees.
    pub fn any_lderivation(&mut self, chart: Chart) -> LDerivation {
        let mut field = PolyVectorField::zero(chart);
        for comp in field.base.iter_mut().chain(field.dual.iter_mut()) {
            *comp = self.poly(chart, Space::Estar, &[0, 1, 2]);
        }
        LDerivation::new(field, self.poly(chart, Space::Estar, &[0, 1])).expect("same chart")
    }

    pub fn section(&mut self, chart: Chart, role: SectionRole) -> Section {
        let comps = (0..chart.fiber_rank)
            .map(|_| self.maybe_base_poly(chart))
            .collect();
        Section::new(role, comps).expect("base components")
    }

    pub fn vector(&mut self, chart: Chart, len: usize) -> Vec<Poly> {
        (0..len).map(|_| self.maybe_base_poly(chart)).collect()
    }

    pub fn frame_derivation(&mut self, chart: Chart, rank: usize) -> FrameDerivation {
        let field = self.vector(chart, chart.base_dim);
        let matrix = (0..rank).map(|_| self.vector(chart, rank)).collect();
        FrameDerivation::new(chart, field, matrix).expect("valid shape")
    }

    pub fn gamma(&mut self, chart: Chart) -> Gamma {
        let n = chart.base_dim;
        let mut entries = Vec::new();
        for k in 1..=n {
            for i in 1..=n {
                for j in i..=n {
                    if self.rng.gen_bool(0.5) {
                        let c = self.base_poly(chart);
                        entries.push(((k, i, j), c.clone()));
                        if i != j {
                            entries.push(((k, j, i), c));
                        }
                    }
                }
            }
        }
        Gamma::new(chart, entries).expect("symmetric by construction")
    }

    /// An ambient function vanishing on `M`.
    pub fn vanishing(&mut self, chart: Chart) -> Poly {
        self.poly(chart, Space::Ambient, &[1, 1, 2])
    }

    /// An ambient function vanishing to second order on `M`.
    pub fn second_order(&mut self, chart: Chart) -> Poly {
        self.poly(chart, Space::Ambient, &[2])
    }

    /// A linearizable ambient `q`-multivector.
    pub fn linearizable_multivector(&mut self, chart: Chart, q: usize) -> SymMultivector {
        let mut table = DiffOp::zero(chart, Space::Ambient);
        for _ in 0..self.rng.gen_range(1..=MAX_TERMS) {
            let key = self.key(chart, q);
            let coeff = if key.base.is_empty() {
                self.vanishing(chart)
            } else {
                self.poly(chart, Space::Ambient, &[0, 1, 2])
            };
            table.add_term(key, coeff);
        }
        SymMultivector::new(table, q).expect("keys of length q")
    }

    /// An ambient operator of order at most `q` that is order-`q` linearizable.
    pub fn linearizable_op(&mut self, chart: Chart, q: usize) -> DiffOp {
        let top = self.linearizable_multivector(chart, q).as_diffop().clone();
        if q == 0 {
            return top;
        }
        let lower = self.op(chart, Space::Ambient, q - 1);
        top.try_add(&lower).expect("same chart and space")
    }
}
