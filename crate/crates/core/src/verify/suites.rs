use std::collections::BTreeMap;

use num_traits::{One, Pow, Zero};
use rand::Rng;
use serde_json::{json, Value};

use super::Trial;
use crate::diffop::{DerivKey, DiffOp, Generator};
use crate::error::Result;
use crate::lbundle::{a_inverse, a_iso, ad_field, pairing, psi, LDerivation, LPair};
use crate::linearize::{
    is_linearizable_multivector, is_order_q_linearizable, linearize_do, linearize_function,
    linearize_multivector, psi_ambient,
};
use crate::multivec::{
    fwl_metric_laplacian, metric_determinant, PolyVectorField, Section, SectionRole, SymMultivector,
};
use crate::symcore::{Chart, MultiIndex, Poly, Rational, Space, Var};

pub(crate) type SuiteFn = fn(&mut Trial) -> Result<()>;

pub(crate) const SUITES: &[(&str, SuiteFn)] = &[
    ("recovery", recovery),
    ("symbol-bracket", symbol_bracket),
    ("stabilizer", stabilizer),
    ("exact-seq", exact_seq),
    ("iso-a", iso_a),
    ("pair-bracket", pair_bracket),
    ("dual-deriv", dual_deriv),
    ("laplacian", laplacian),
    ("lin-fn", lin_fn),
    ("lin-mv", lin_mv),
    ("lin-do", lin_do),
    ("zero-section", zero_section),
];

fn op_doc(op: &DiffOp) -> Value {
    serde_json::to_value(op.to_doc()).expect("documents serialize")
}

fn mv_doc(p: &SymMultivector) -> Value {
    op_doc(p.as_diffop())
}

fn ld_doc(d: &LDerivation) -> Value {
    serde_json::to_value(d.to_doc()).expect("documents serialize")
}

fn polys(ps: &[Poly]) -> Value {
    Value::from(ps.iter().map(Poly::to_string).collect::<Vec<_>>())
}

fn power(t: &Rational, k: i64) -> Rational {
    let p: Rational = Pow::pow(t.clone(), k.unsigned_abs() as u32);
    if k < 0 {
        Rational::one() / p
    } else {
        p
    }
}

fn mv_of(op: &DiffOp, q: usize) -> Result<SymMultivector> {
    SymMultivector::new(op.order_part(q), q)
}

/// `F_Δ` for a (possibly zero) homogeneous core operator.
fn dual_poly(op: &DiffOp) -> Result<Poly> {
    if op.is_zero() {
        return Ok(Poly::zero(op.chart(), Space::Estar));
    }
    SymMultivector::from_homogeneous(op.clone())?.core_to_dualpoly()
}

/// Operator coefficients and polynomial identities, plus grading coherence.
fn recovery(t: &mut Trial) -> Result<()> {
    let b = t.gen.bounds;
    let chart = Chart::new(b.n, b.m)?;
    let delta = t.gen.op(chart, Space::E, b.q);
    let table: BTreeMap<DerivKey, Poly> =
        delta.terms().map(|(k, c)| (k.clone(), c.clone())).collect();
    t.check(
        "recover_coefficients(delta) = table",
        delta.recover_coefficients() == table,
        || json!({ "delta": op_doc(&delta) }),
    );

    // grading: term weights against h_t conjugation
    let f = t.gen.poly(chart, Space::E, &[0, 1, 2, 3]);
    let s = t.gen.rational();
    let parts = delta.grade_decompose()?;
    let sum = parts
        .values()
        .fold(DiffOp::zero(chart, Space::E), |acc, p| &acc + p);
    t.check(
        "sum of weight parts = delta",
        sum == delta,
        || json!({ "delta": op_doc(&delta) }),
    );
    for (&k, part) in &parts {
        let lhs = part.apply(&f.scale_fiber(&s))?;
        let rhs = part.apply(&f)?.scale_fiber(&s).scale(&power(&s, -k));
        let ctx =
            || json!({ "part": op_doc(part), "weight": k, "f": f.to_string(), "t": s.to_string() });
        t.check("delta_k(h_t f) = t^-k h_t(delta_k f)", lhs == rhs, ctx);
        let conj = part.conjugate_scaling(&s) == part.scale(&power(&s, k));
        t.check("h_t o delta_k o h_1/t = t^k delta_k", conj, ctx);
    }

    // commutator algebra on smaller operators
    let small = b.q.min(2);
    let (d1, d2, d3) = (
        t.gen.op(chart, Space::E, small),
        t.gen.op(chart, Space::E, small),
        t.gen.op(chart, Space::E, small),
    );
    let br = |a: &DiffOp, b: &DiffOp| a.commutator(b);
    let jacobi =
        &(&br(&d1, &br(&d2, &d3)?)? + &br(&d2, &br(&d3, &d1)?)?) + &br(&d3, &br(&d1, &d2)?)?;
    let ctx3 = || json!({ "d1": op_doc(&d1), "d2": op_doc(&d2), "d3": op_doc(&d3) });
    t.check("Jacobi identity for the commutator", jacobi.is_zero(), ctx3);
    let lambda = t.gen.rational();
    let lhs = br(&(&d1 + &d2.scale(&lambda)), &d3)?;
    let rhs = &br(&d1, &d3)? + &br(&d2, &d3)?.scale(&lambda);
    t.check("commutator is bilinear", lhs == rhs, ctx3);
    let c12 = br(&d1, &d2)?;
    let bound = match (c12.order(), d1.order(), d2.order()) {
        (Some(o), Some(o1), Some(o2)) => o < o1 + o2,
        (None, _, _) => true,
        _ => false,
    };
    t.check("order([d1, d2]) <= order d1 + order d2 - 1", bound, ctx3);
    let (p1, p2) = (t.gen.order(0, small), t.gen.order(0, small));
    let (f1, f2) = (t.gen.core(chart, p1), t.gen.core(chart, p2));
    t.check(
        "core operators commute",
        br(&f1, &f2)?.is_zero(),
        || json!({ "f1": op_doc(&f1), "f2": op_doc(&f2) }),
    );

    // polynomial ring and calculus identities
    let (p, q, r) = (
        t.gen.poly(chart, Space::E, &[0, 1, 2]),
        t.gen.poly(chart, Space::E, &[0, 1, 2]),
        t.gen.poly(chart, Space::E, &[0, 1, 2]),
    );
    let ctxp = || json!({ "p": p.to_string(), "q": q.to_string(), "r": r.to_string() });
    t.check("(pq)r = p(qr)", &(&p * &q) * &r == &p * &(&q * &r), ctxp);
    t.check(
        "p(q + r) = pq + pr",
        &p * &(&q + &r) == &(&p * &q) + &(&p * &r),
        ctxp,
    );
    t.check("pq = qp", &p * &q == &q * &p, ctxp);
    let vars: Vec<Var> = (1..=chart.base_dim)
        .map(Var::x)
        .chain((1..=chart.fiber_rank).map(Var::u))
        .collect();
    let v = vars[t.gen.rng.gen_range(0..vars.len())];
    let w = vars[t.gen.rng.gen_range(0..vars.len())];
    t.check(
        "partial derivatives commute",
        p.partial(v)?.partial(w)? == p.partial(w)?.partial(v)?,
        ctxp,
    );
    t.check(
        "Leibniz rule for partial",
        (&p * &q).partial(v)? == &(&p.partial(v)? * &q) + &(&p * &q.partial(v)?),
        ctxp,
    );
    let pieces = p.fiber_degree_decompose();
    let total = pieces
        .values()
        .fold(Poly::zero(chart, Space::E), |acc, x| &acc + x);
    let homogeneous = pieces
        .iter()
        .all(|(&d, x)| x.scale_fiber(&s) == x.scale(&power(&s, d as i64)));
    t.check(
        "fiber degree parts sum to p and scale homogeneously",
        total == p && homogeneous,
        ctxp,
    );
    t.check(
        "parse(print(p)) = p",
        Poly::parse(&p.to_string(), chart, Space::E)? == p,
        ctxp,
    );
    Ok(())
}

/// Symmetric multivectors: Poisson bracket, symbols, multiderivations, `F_P`, `H_P`.
fn symbol_bracket(t: &mut Trial) -> Result<()> {
    let chart = t.gen.chart();
    let qmax = t.gen.bounds.q;
    let d1 = t.gen.nonzero_op(chart, Space::E, qmax);
    let d2 = t.gen.nonzero_op(chart, Space::E, qmax);
    let (o1, o2) = (d1.order().unwrap_or(0), d2.order().unwrap_or(0));
    if o1 + o2 > 0 {
        let q = o1 + o2 - 1;
        let pb = d1.symbol()?.poisson(&d2.symbol()?)?;
        let ctx = || json!({ "delta": op_doc(&d1), "delta_prime": op_doc(&d2) });
        t.check(
            "poisson(sigma D, sigma D') = sigma_(q+q'-1)([D, D'])",
            pb == mv_of(&d1.commutator(&d2)?, q)?,
            ctx,
        );
        t.check(
            "sigma_(q+q'-1)([D', D]) = -poisson(sigma D, sigma D')",
            pb.scale(&-Rational::one()) == mv_of(&d2.commutator(&d1)?, q)?,
            ctx,
        );
    }

    // Jacobi for the Poisson bracket
    let mut small = || -> Result<SymMultivector> {
        let q = t.gen.order(1, 2);
        let op = t.gen.op(chart, Space::E, q);
        mv_of(&op, q)
    };
    let (p1, p2, p3) = (small()?, small()?, small()?);
    let lhs = p1.poisson(&p2.poisson(&p3)?)?;
    let rhs = p1
        .poisson(&p2)?
        .poisson(&p3)?
        .try_add(&p2.poisson(&p1.poisson(&p3)?)?)?;
    t.check(
        "{P1,{P2,P3}} = {{P1,P2},P3} + {P2,{P1,P3}}",
        lhs == rhs,
        || json!({ "p1": mv_doc(&p1), "p2": mv_doc(&p2), "p3": mv_doc(&p3) }),
    );

    // multiderivations of a fiber-wise linear P
    let q = t.gen.order(1, qmax);
    let p = mv_of(&t.gen.fwl(chart, q), q)?;
    let phis: Vec<Section> = (0..q - 1)
        .map(|_| t.gen.section(chart, SectionRole::OfEstar))
        .collect();
    let last = t.gen.section(chart, SectionRole::OfEstar);
    let f = t.gen.base_poly(chart);
    let g = t.gen.base_poly(chart);
    let with = |s: Section| -> Vec<Section> {
        let mut v = phis.clone();
        v.push(s);
        v
    };
    let ctx = || {
        json!({
            "p": mv_doc(&p),
            "sections": phis.iter().map(|s| polys(s.components())).collect::<Vec<_>>(),
            "last": polys(last.components()),
            "f": f.to_string(),
        })
    };
    let lhs = p.multiderivation_d(&with(last.scale_by(&f)?))?;
    let base = p.multiderivation_d(&with(last.clone()))?;
    let l = p.multiderivation_l(&phis, &f)?;
    let leibniz = lhs
        .components()
        .iter()
        .zip(base.components())
        .zip(last.components())
        .all(|((a, b), e)| a == &(&(&f * b) + &(&l * e)));
    t.check(
        "D_P(phi.., f phi') = f D_P(phi.., phi') + l_P(phi..)(f) phi'",
        leibniz,
        ctx,
    );
    if let Some(first) = phis.first() {
        let mut scaled = phis.clone();
        scaled[0] = first.scale_by(&f)?;
        let lin = p.multiderivation_l(&scaled, &g)? == &f * &p.multiderivation_l(&phis, &g)?;
        t.check("l_P is C(M)-linear in the sections", lin, ctx);
    }

    // pure-fiber shape <=> l_P vanishes
    let l_zero = MultiIndex::all_of_len(chart.fiber_rank, q - 1)
        .iter()
        .all(|c| {
            let secs: Vec<Section> = c
                .letters()
                .iter()
                .map(|&a| Section::basis(chart, SectionRole::OfEstar, a))
                .collect();
            (1..=chart.base_dim).all(|i| {
                p.multiderivation_l(&secs, &Poly::x(chart, Space::E, i))
                    .is_ok_and(|v| v.is_zero())
            })
        });
    let pure = p.as_diffop().terms().all(|(k, _)| k.base.is_empty());
    t.check(
        "l_P = 0 exactly when P has only pure-fiber terms",
        l_zero == pure,
        || json!({ "p": mv_doc(&p) }),
    );

    // F_P for core multivectors
    let (a, b) = (t.gen.order(0, 2), t.gen.order(0, 2));
    let (fa, fb) = (
        mv_of(&t.gen.core(chart, a), a)?,
        mv_of(&t.gen.core(chart, b), b)?,
    );
    let ctx = || json!({ "f1": mv_doc(&fa), "f2": mv_doc(&fb) });
    t.check(
        "F_(P1 . P2) = F_P1 F_P2",
        fa.sym_product(&fb)?.core_to_dualpoly()?
            == &fa.core_to_dualpoly()? * &fb.core_to_dualpoly()?,
        ctx,
    );
    let phi = t.gen.section(chart, SectionRole::OfEstar);
    let l = phi.linear_function(SectionRole::OfEstar)?;
    let value = fa
        .eval(&vec![l; a])?
        .scale(&(Rational::one() / crate::symcore::factorial(a)));
    let mut at_phi = Poly::zero(chart, Space::E);
    for (c, coeff) in fa.core_to_dualpoly()?.fiber_coefficients() {
        let mut term = coeff.with_space(Space::E)?;
        for &letter in c.letters() {
            term = &term * &phi.components()[letter - 1];
        }
        at_phi = &at_phi + &term;
    }
    t.check("F_P(phi) = P(l_phi, .., l_phi) / q!", value == at_phi, ctx);

    // Hamiltonian fields
    let (q1, q2) = (t.gen.order(0, 2), t.gen.order(0, 2));
    let h1 = mv_of(&t.gen.fwl(chart, q1), q1)?;
    let h2 = mv_of(&t.gen.fwl(chart, q2), q2)?;
    let ctx = || json!({ "p1": mv_doc(&h1), "p2": mv_doc(&h2), "core": mv_doc(&fa) });
    let bracket = h1.poisson(&h2)?;
    t.check(
        "H_{P1,P2} = [H_P1, H_P2]",
        bracket.hamiltonian_field()?
            == h1.hamiltonian_field()?.bracket(&h2.hamiltonian_field()?)?,
        ctx,
    );
    let pq = h1.poisson(&fa)?;
    let f_pq = if pq.is_zero() {
        Poly::zero(chart, Space::Estar)
    } else {
        pq.core_to_dualpoly()?
    };
    t.check(
        "H_P(F_Q) = F_{P,Q}",
        h1.hamiltonian_field()?.apply(&fa.core_to_dualpoly()?)? == f_pq,
        ctx,
    );
    Ok(())
}

fn core_generators(chart: Chart, max_order: usize) -> Vec<DiffOp> {
    let mut out: Vec<DiffOp> = (1..=chart.base_dim)
        .map(|i| DiffOp::multiplication(&Poly::x(chart, Space::E, i)))
        .collect();
    for len in 1..=max_order {
        for c in MultiIndex::all_of_len(chart.fiber_rank, len) {
            let key = DerivKey::new(MultiIndex::empty(), c);
            out.push(DiffOp::monomial(&Poly::one(chart, Space::E), key.clone()).expect("in range"));
            for i in 1..=chart.base_dim {
                out.push(
                    DiffOp::monomial(&Poly::x(chart, Space::E, i), key.clone()).expect("in range"),
                );
            }
        }
    }
    out
}

/// The stabilizer of the core operators and the generators of the FWL module.
fn stabilizer(t: &mut Trial) -> Result<()> {
    let chart = t.gen.chart();
    let q = t.gen.order(0, t.gen.bounds.q);
    let delta = t.gen.fwl(chart, q);
    let gens = core_generators(chart, 3);
    let ctx = || json!({ "delta": op_doc(&delta), "order": q });
    let mut stable = true;
    for g in &gens {
        stable &= delta.commutator(g)?.in_core_algebra();
    }
    t.check(
        "FWL delta maps core generators to core operators",
        stable,
        ctx,
    );
    t.check(
        "FWL delta lies in the linear algebra",
        delta.in_lin_algebra(),
        ctx,
    );

    let pieces = delta.fwl_generators(q)?;
    let mut rebuilt = DiffOp::zero(chart, Space::E);
    let mut kinds_ok = true;
    for (f, g) in &pieces {
        kinds_ok &= f.in_core_algebra();
        kinds_ok &= match g {
            Generator::Identity(op) => *op == DiffOp::identity(chart, Space::E),
            Generator::Linear(op) => op.is_fwl(0)?,
            Generator::LinearField(op) => op.is_fwl(1)?,
        };
        rebuilt = &rebuilt + &f.compose(g.op())?;
    }
    t.check(
        "delta = sum of core o generator",
        rebuilt == delta && kinds_ok,
        ctx,
    );

    let bad = &delta + &t.gen.shape_violation(chart, t.gen.bounds.q);
    let witness = gens
        .iter()
        .map(|g| bad.commutator(g))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .any(|c| !c.in_core_algebra());
    let ctx = || json!({ "delta": op_doc(&bad) });
    t.check(
        "shape-violating delta has a witness generator",
        witness,
        ctx,
    );
    t.check(
        "shape-violating delta is outside the linear algebra",
        !bad.in_lin_algebra(),
        ctx,
    );
    Ok(())
}

/// The operator with a prescribed homogeneous `ad` field, read off term by term.
fn operator_with_field(field: &PolyVectorField) -> Result<DiffOp> {
    let chart = field.chart();
    let mut out = DiffOp::zero(chart, Space::E);
    for (i, comp) in field.base.iter().enumerate() {
        for (a, coeff) in comp.fiber_coefficients() {
            let term = DiffOp::monomial(
                &coeff.with_space(Space::E)?,
                DerivKey::new(MultiIndex::single(i + 1), a),
            )?;
            out = &out + &term;
        }
    }
    for (alpha, comp) in field.dual.iter().enumerate() {
        for (b, coeff) in comp.fiber_coefficients() {
            let c = -&(&coeff.with_space(Space::E)? * &Poly::fiber(chart, Space::E, alpha + 1));
            out = &out + &DiffOp::monomial(&c, DerivKey::new(MultiIndex::empty(), b))?;
        }
    }
    Ok(out)
}

/// Kernel and image of `ad`, and the anchor.
fn exact_seq(t: &mut Trial) -> Result<()> {
    let chart = t.gen.chart();
    let qmax = t.gen.bounds.q;
    let (p1, p2) = (t.gen.order(0, qmax - 1), t.gen.order(0, qmax - 1));
    let f = t.gen.core(chart, p1);
    let g = t.gen.core(chart, p2);
    let ctx = || json!({ "f": op_doc(&f), "g": op_doc(&g) });
    t.check("ad(F) = 0 for core F", ad_field(&f)?.is_zero(), ctx);
    t.check("[F, G] = 0 for core F, G", f.commutator(&g)?.is_zero(), ctx);

    let q = t.gen.order(0, qmax);
    let delta = t.gen.fwl(chart, q);
    let ctx = || json!({ "delta": op_doc(&delta), "order": q });
    t.check(
        "ad(delta) = 0 exactly when delta is core",
        ad_field(&delta)?.is_zero() == delta.in_core_algebra(),
        ctx,
    );

    let d = t.gen.order(0, 3) as i64 - 1;
    let v = t.gen.field(chart, d);
    if !v.is_zero() {
        let built = operator_with_field(&v)?;
        let ok = built.is_fwl((d + 1) as usize)? && ad_field(&built)? == v;
        t.check(
            "every homogeneous field of degree <= 2 is ad of a FWL operator",
            ok,
            || json!({ "field": { "dx": polys(&v.base), "dv": polys(&v.dual) }, "degree": d }),
        );
    }

    let p = t.gen.order(0, 2);
    let core = t.gen.core(chart, p);
    let a = a_iso(&delta, q)?;
    let lhs = a.field().apply(&dual_poly(&core)?)?;
    let rhs = dual_poly(&delta.commutator(&core)?)?;
    t.check(
        "W(F_F) = F_[delta, F]",
        lhs == rhs,
        || json!({ "delta": op_doc(&delta), "order": q, "core": op_doc(&core) }),
    );
    Ok(())
}

/// The isomorphism between FWL operators and derivations of `L_{E*}`.
fn iso_a(t: &mut Trial) -> Result<()> {
    let chart = t.gen.chart();
    let qmax = t.gen.bounds.q;
    let q = t.gen.order(0, qmax);
    let delta = t.gen.fwl(chart, q);
    let a = a_iso(&delta, q)?;
    let ctx = || json!({ "delta": op_doc(&delta), "order": q });
    t.check(
        "a_inverse(a_iso(delta)) = delta",
        a_inverse(&a, q)? == delta,
        ctx,
    );
    let d = t.gen.lderivation(chart, q as i64 - 1);
    if !d.is_zero() {
        let back = a_iso(&a_inverse(&d, q)?, q)?;
        t.check(
            "a_iso(a_inverse(D)) = D",
            back == d,
            || json!({ "d": ld_doc(&d), "order": q }),
        );
    }

    let q2 = t.gen.order(0, qmax.min(2));
    let delta2 = t.gen.fwl(chart, q2);
    let ctx2 = || json!({ "delta": op_doc(&delta), "order": q, "delta_prime": op_doc(&delta2), "order_prime": q2 });
    let comm = a.commutator(&a_iso(&delta2, q2)?)?;
    let br = delta.commutator(&delta2)?;
    let ok = if br.is_zero() {
        comm.is_zero()
    } else {
        a_iso(&br, q + q2 - 1)? == comm
    };
    t.check("a_iso([D, D']) = [a_iso D, a_iso D']", ok, ctx2);

    let p = t.gen.order(0, 2);
    let core = t.gen.core(chart, p);
    let lhs = a_iso(&core.compose(&delta)?, p + q)?;
    let rhs = a.left_mul(&dual_poly(&core)?)?;
    t.check(
        "a_iso(F o D) = F_F a_iso(D)",
        lhs == rhs,
        || json!({ "delta": op_doc(&delta), "order": q, "core": op_doc(&core) }),
    );

    // the three generator cases
    let unit = LDerivation::new(PolyVectorField::zero(chart), Poly::one(chart, Space::Estar))?;
    t.check(
        "A(1) = (0, 1)",
        a_iso(&DiffOp::identity(chart, Space::E), 1)? == unit,
        || json!({}),
    );
    let phi = t.gen.section(chart, SectionRole::OfEstar);
    let lphi = phi.linear_function(SectionRole::OfEstar)?;
    if !lphi.is_zero() {
        let mut field = PolyVectorField::zero(chart);
        for (alpha, c) in phi.components().iter().enumerate() {
            field.dual[alpha] = -&c.with_space(Space::Estar)?;
        }
        let expected = LDerivation::new(field, Poly::zero(chart, Space::Estar))?;
        t.check(
            "A(l_phi) = (-phi^vertical, 0)",
            a_iso(&DiffOp::multiplication(&lphi), 0)? == expected,
            || json!({ "phi": polys(phi.components()) }),
        );
    }
    let base = t.gen.vector(chart, chart.base_dim);
    let m = chart.fiber_rank;
    let matrix: Vec<Vec<Poly>> = (0..m).map(|_| t.gen.vector(chart, m)).collect();
    // X = Σ X^i ∂x_i + Σ X^β_α u^α ∂u_β with X^β_α = matrix[β][α]
    let mut x = DiffOp::zero(chart, Space::E);
    for (i, c) in base.iter().enumerate() {
        x = &x + &DiffOp::monomial(c, DerivKey::base(&[i + 1]))?;
    }
    for (beta, row) in matrix.iter().enumerate() {
        for (alpha, c) in row.iter().enumerate() {
            let coeff = c * &Poly::fiber(chart, Space::E, alpha + 1);
            x = &x + &DiffOp::monomial(&coeff, DerivKey::fiber(&[beta + 1]))?;
        }
    }
    if !x.is_zero() {
        let mut field = PolyVectorField::zero(chart);
        for (i, c) in base.iter().enumerate() {
            field.base[i] = c.with_space(Space::Estar)?;
        }
        let mut trace = Poly::zero(chart, Space::Estar);
        for alpha in 0..m {
            for beta in 0..m {
                let term = &matrix[beta][alpha].with_space(Space::Estar)?
                    * &Poly::fiber(chart, Space::Estar, beta + 1);
                field.dual[alpha] = &field.dual[alpha] - &term;
            }
            trace = &trace - &matrix[alpha][alpha].with_space(Space::Estar)?;
        }
        let expected = LDerivation::new(field, trace)?;
        t.check(
            "A(X) = (X*, -tr X) for a linear vector field",
            a_iso(&x, 1)? == expected,
            || json!({ "x": op_doc(&x) }),
        );
    }

    // Ψ Leibniz
    if q >= 2 {
        let phis: Vec<Section> = (0..q - 2)
            .map(|_| t.gen.section(chart, SectionRole::OfEstar))
            .collect();
        let last = t.gen.section(chart, SectionRole::OfEstar);
        let f = t.gen.base_poly(chart);
        let mut scaled = phis.clone();
        scaled.push(last.scale_by(&f)?);
        let mut plain = phis.clone();
        plain.push(last.clone());
        let sigma = mv_of(&delta, q)?;
        let rhs = &(&f * &psi(&delta, q, &plain)?) + &sigma.multiderivation_l(&plain, &f)?;
        t.check(
            "Psi(phi.., f phi') = f Psi(phi.., phi') + l(phi.., phi')(f)",
            psi(&delta, q, &scaled)? == rhs,
            || json!({ "delta": op_doc(&delta), "order": q, "f": f.to_string() }),
        );
    }
    Ok(())
}

/// Rank-one multivector pairs.
fn pair_bracket(t: &mut Trial) -> Result<()> {
    let chart = t.gen.chart();
    let pair = |t: &mut Trial| -> Result<LPair> {
        let q = t.gen.order(1, 2);
        let p = mv_of(&t.gen.fwl(chart, q), q)?;
        let mult = MultiIndex::all_of_len(chart.fiber_rank, q - 1)
            .into_iter()
            .map(|c| (c, t.gen.maybe_base_poly(chart)))
            .collect();
        LPair::from_mult_table(p, mult)
    };
    let (p1, p2) = (pair(t)?, pair(t)?);
    let ctx = || {
        json!({
            "d1": ld_doc(&p1.to_lderivation().expect("valid pair")), "order1": p1.order(),
            "d2": ld_doc(&p2.to_lderivation().expect("valid pair")), "order2": p2.order(),
        })
    };
    let br = p1.bracket(&p2)?;
    t.check(
        "L(bracket) = poisson(L p1, L p2)",
        br.multivector() == &p1.multivector().poisson(p2.multivector())?,
        ctx,
    );
    t.check(
        "L(product) = L p1 . L p2",
        p1.product(&p2)?.symbol() == &p1.multivector().sym_product(p2.multivector())?,
        ctx,
    );
    let comm = p1.to_lderivation()?.commutator(&p2.to_lderivation()?)?;
    t.check(
        "pair_to_lderivation intertwines the brackets",
        br.to_lderivation()? == comm,
        ctx,
    );
    t.check(
        "pair -> derivation -> pair is the identity",
        LPair::from_lderivation(&p1.to_lderivation()?, p1.order())? == p1,
        ctx,
    );
    t.check(
        "bracket(p, p) = 0",
        p1.bracket(&p1)?.to_lderivation()?.is_zero(),
        ctx,
    );
    Ok(())
}

/// Frame derivations, duals, top powers and derivations of `L_{E*}`.
fn dual_deriv(t: &mut Trial) -> Result<()> {
    let chart = t.gen.chart();
    let m = chart.fiber_rank;
    let d = t.gen.frame_derivation(chart, m);
    let d2 = t.gen.frame_derivation(chart, m);
    let phi = t.gen.vector(chart, m);
    let e = t.gen.vector(chart, m);
    let f = t.gen.base_poly(chart);
    let ctx = || {
        json!({
            "field": polys(d.field()),
            "matrix": d.matrix().iter().map(|r| polys(r)).collect::<Vec<_>>(),
            "phi": polys(&phi), "e": polys(&e),
        })
    };
    let lhs = &pairing(&d.dual().apply(&phi)?, &e)? + &pairing(&phi, &d.apply(&e)?)?;
    t.check(
        "<D*phi, e> + <phi, De> = l_D <phi, e>",
        lhs == d.symbol_apply(&pairing(&phi, &e)?)?,
        ctx,
    );
    t.check("D** = D", d.dual().dual() == d, ctx);
    t.check(
        "[D1, D2]* = [D1*, D2*]",
        d.commutator(&d2)?.dual() == d.dual().commutator(&d2.dual())?,
        ctx,
    );
    let fe: Vec<Poly> = e.iter().map(|c| &f * c).collect();
    let df = d.symbol_apply(&f)?;
    let leibniz = d
        .apply(&fe)?
        .iter()
        .zip(d.apply(&e)?)
        .zip(&e)
        .all(|((a, b), s)| *a == &(&f * &b) + &(&df * s));
    t.check("D(f s) = f D(s) + l_D(f) s", leibniz, ctx);
    let sections: Vec<Vec<Poly>> = (0..m).map(|_| t.gen.vector(chart, m)).collect();
    let det = {
        let rows: Vec<Vec<Poly>> = (0..m)
            .map(|r| sections.iter().map(|s| s[r].clone()).collect())
            .collect();
        crate::multivec::laplacian::determinant(&rows)
    };
    let by_trace = &d.symbol_apply(&det)? + &(&d.top_power_action().matrix()[0][0] * &det);
    t.check(
        "wedge expansion = trace action on the top power",
        d.wedge_action(&sections)? == by_trace,
        ctx,
    );

    let l1 = t.gen.any_lderivation(chart);
    let l2 = t.gen.any_lderivation(chart);
    let g = t.gen.poly(chart, Space::Estar, &[0, 1, 2]);
    let lhs = l1.commutator(&l2)?.apply(&g)?;
    let rhs = &l1.apply(&l2.apply(&g)?)? - &l2.apply(&l1.apply(&g)?)?;
    t.check(
        "[D1, D2] acts as D1 D2 - D2 D1 on L",
        lhs == rhs,
        || json!({ "d1": ld_doc(&l1), "d2": ld_doc(&l2), "section": g.to_string() }),
    );
    Ok(())
}

fn laplacian(t: &mut Trial) -> Result<()> {
    let chart = t.gen.square_chart();
    let gamma = t.gen.gamma(chart);
    let ctx = || serde_json::to_value(gamma.to_doc()).expect("documents serialize");
    let det = metric_determinant(&gamma).as_constant();
    t.check(
        "det g is a nonzero constant",
        det.is_some_and(|c| !c.is_zero()),
        ctx,
    );
    t.check(
        "the metric Laplacian is FWL of order 2",
        fwl_metric_laplacian(&gamma)?.is_fwl(2)?,
        ctx,
    );
    Ok(())
}

fn lin_fn(t: &mut Trial) -> Result<()> {
    let chart = t.gen.chart();
    let f = t.gen.vanishing(chart);
    let g = t.gen.vanishing(chart);
    let h = t.gen.poly(chart, Space::Ambient, &[0, 1, 2]);
    let lambda = t.gen.rational();
    let ctx = || json!({ "f": f.to_string(), "g": g.to_string(), "h": h.to_string() });
    let fl = linearize_function(&f)?;
    let expected = f
        .fiber_degree_decompose()
        .remove(&1)
        .map_or(Ok(Poly::zero(chart, Space::E)), |p| p.with_space(Space::E))?;
    t.check("F_lin = first-order part of F", fl == expected, ctx);
    t.check(
        "(F + lambda G)_lin = F_lin + lambda G_lin",
        linearize_function(&(&f + &g.scale(&lambda)))?
            == &fl + &linearize_function(&g)?.scale(&lambda),
        ctx,
    );
    let h_m = h.restrict_fiber_zero()?.with_space(Space::E)?;
    t.check(
        "(H G)_lin = H|_M G_lin",
        linearize_function(&(&h * &g))? == &h_m * &linearize_function(&g)?,
        ctx,
    );
    let o2 = t.gen.second_order(chart);
    t.check(
        "second-order terms do not change F_lin",
        linearize_function(&(&f + &o2))? == fl,
        ctx,
    );
    Ok(())
}

fn lin_mv(t: &mut Trial) -> Result<()> {
    let chart = t.gen.chart();
    let qmax = t.gen.bounds.q.min(3);
    let q = t.gen.order(1, qmax);
    let p = t.gen.linearizable_multivector(chart, q);
    let pl = linearize_multivector(&p)?;
    let fs: Vec<Poly> = (0..q).map(|_| t.gen.vanishing(chart)).collect();
    let lin = fs
        .iter()
        .map(linearize_function)
        .collect::<Result<Vec<_>>>()?;
    t.check(
        "P_lin(F_lin..) = P(F..)_lin",
        pl.eval(&lin)? == linearize_function(&p.eval(&fs)?)?,
        || json!({ "p": mv_doc(&p), "functions": polys(&fs) }),
    );
    let q2 = t.gen.order(1, 2);
    let r = t.gen.linearizable_multivector(chart, q2);
    let br = p.poisson(&r)?;
    let ctx = || json!({ "p": mv_doc(&p), "q": mv_doc(&r) });
    t.check(
        "{P, Q} is linearizable",
        is_linearizable_multivector(&br),
        ctx,
    );
    t.check(
        "{P, Q}_lin = {P_lin, Q_lin}",
        linearize_multivector(&br)? == pl.poisson(&linearize_multivector(&r)?)?,
        ctx,
    );
    Ok(())
}

fn lin_do(t: &mut Trial) -> Result<()> {
    let chart = t.gen.chart();
    let qmax = t.gen.bounds.q.min(2);
    let (q1, q2) = (t.gen.order(0, qmax), t.gen.order(0, qmax));
    let d1 = t.gen.linearizable_op(chart, q1);
    let d2 = t.gen.linearizable_op(chart, q2);
    let ctx = || json!({ "delta": op_doc(&d1), "order": q1, "delta_prime": op_doc(&d2), "order_prime": q2 });
    let (l1, l2) = (linearize_do(&d1, q1)?, linearize_do(&d2, q2)?);
    if q1 + q2 > 0 {
        let q = q1 + q2 - 1;
        let br = d1.commutator(&d2)?;
        t.check(
            "[D, D'] is order-(q+q'-1) linearizable",
            is_order_q_linearizable(&br, q)?,
            ctx,
        );
        t.check(
            "[D, D']_lin = [D_lin, D'_lin]",
            linearize_do(&br, q)? == l1.commutator(&l2)?,
            ctx,
        );
    }
    let top = linearize_multivector(&mv_of(&d1, q1)?)?;
    t.check(
        "sigma(D_lin) = P_lin",
        l1.order_part(q1) == *top.as_diffop(),
        ctx,
    );

    // ψ_C at q ≥ 2 with canonical against perturbed representatives
    let q = t.gen.order(2, t.gen.bounds.q.max(2));
    let d3 = t.gen.linearizable_op(chart, q);
    let c = MultiIndex::new(
        (0..q - 1)
            .map(|_| t.gen.rng.gen_range(1..=chart.fiber_rank))
            .collect(),
    );
    let canonical: Vec<Poly> = c
        .letters()
        .iter()
        .map(|&a| Poly::fiber(chart, Space::Ambient, a))
        .collect();
    let perturbed: Vec<Poly> = canonical
        .iter()
        .map(|u| u + &t.gen.second_order(chart))
        .collect();
    t.check(
        "psi_C is independent of the representatives",
        psi_ambient(&d3, &canonical)? == psi_ambient(&d3, &perturbed)?,
        || json!({ "delta": op_doc(&d3), "order": q, "representatives": polys(&perturbed) }),
    );
    Ok(())
}

fn zero_section(t: &mut Trial) -> Result<()> {
    let chart = t.gen.chart();
    let q = t.gen.order(0, t.gen.bounds.q);
    let delta = t.gen.fwl(chart, q);
    let ambient = delta.with_space(Space::Ambient)?;
    t.check(
        "FWL operators are their own linearization",
        linearize_do(&ambient, q)? == delta,
        || json!({ "delta": op_doc(&ambient), "order": q }),
    );
    Ok(())
}
