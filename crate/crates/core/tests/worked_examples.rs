//! Small hand-checked instances, one per construction, through the public API.

use fwlop::lbundle::{a_inverse, a_iso, ad_field, FrameDerivation};
use fwlop::linearize::{
    is_linearizable_multivector, is_order_q_linearizable, linearize_do, linearize_function,
    linearize_multivector,
};
use fwlop::multivec::{fwl_metric_laplacian, metric_determinant, Gamma};
use fwlop::{
    Chart, DerivKey, DiffOp, Error, LDerivation, MultiIndex, Poly, PolyVectorField, Section,
    SectionRole, Space, SymMultivector,
};

type Term<'a> = (&'a str, &'a [usize], &'a [usize]);

fn chart(n: usize, m: usize) -> Chart {
    Chart::new(n, m).unwrap()
}

fn poly(c: Chart, space: Space, s: &str) -> Poly {
    Poly::parse(s, c, space).unwrap()
}

fn op_on(c: Chart, space: Space, terms: &[Term]) -> DiffOp {
    DiffOp::from_terms(
        c,
        space,
        terms.iter().map(|(coeff, dx, du)| {
            (
                DerivKey::new(MultiIndex::new(dx.to_vec()), MultiIndex::new(du.to_vec())),
                poly(c, space, coeff),
            )
        }),
    )
    .unwrap()
}

fn op(terms: &[Term]) -> DiffOp {
    op_on(chart(1, 1), Space::E, terms)
}

fn mv(terms: &[Term], q: usize) -> SymMultivector {
    SymMultivector::new(op(terms), q).unwrap()
}

fn lder(dx: &str, dv: &str, mult: &str) -> LDerivation {
    let c = chart(1, 1);
    let field = PolyVectorField::new(
        vec![poly(c, Space::Estar, dx)],
        vec![poly(c, Space::Estar, dv)],
    )
    .unwrap();
    LDerivation::new(field, poly(c, Space::Estar, mult)).unwrap()
}

#[test]
fn polynomial_arithmetic() {
    let c = chart(2, 2);
    let p = |s| poly(c, Space::E, s);
    assert_eq!(&p("x1 + u1") * &p("x1 - u1"), p("x1^2 - u1^2"));
    assert_eq!(&p("1/2*u1") * &p("2/3*u1"), p("1/3*u1^2"));
    assert_eq!(
        p("u1^2*x1").partial(fwlop::Var::u(1)).unwrap(),
        p("2*u1*x1")
    );
    assert_eq!(
        p("x1 + u1*x2 + u1^2").restrict_fiber_zero().unwrap(),
        p("x1")
    );
    assert_eq!(p("x1+x1").to_string(), "2*x1");
    assert!(matches!(
        Poly::parse("u1^0", c, Space::E),
        Err(Error::Syntax { .. })
    ));
}

#[test]
fn operator_action_and_commutators() {
    let c = chart(1, 1);
    let p = |s| poly(c, Space::E, s);
    assert_eq!(
        op(&[("1", &[], &[1, 1])]).apply(&p("u1^3")).unwrap(),
        p("6*u1")
    );
    assert_eq!(
        op(&[("u1", &[], &[1, 1])]).apply(&p("u1^2")).unwrap(),
        p("2*u1")
    );

    let du = op(&[("1", &[], &[1])]);
    let u = DiffOp::multiplication(&p("u1"));
    assert_eq!(
        du.compose(&u).unwrap(),
        op(&[("u1", &[], &[1]), ("1", &[], &[])])
    );
    assert_eq!(du.commutator(&u).unwrap(), DiffOp::identity(c, Space::E));
    let ud2 = op(&[("u1", &[], &[1, 1])]);
    assert_eq!(du.commutator(&ud2).unwrap(), op(&[("1", &[], &[1, 1])]));
    assert!(ud2.commutator(&ud2).unwrap().is_zero());
}

#[test]
fn grading_and_classification() {
    let weights = |d: &DiffOp| d.grade_decompose().unwrap().into_keys().collect::<Vec<_>>();
    assert_eq!(weights(&op(&[("u1", &[], &[1, 1])])), vec![-1]);
    assert_eq!(weights(&op(&[("1", &[], &[1, 1])])), vec![-2]);
    assert_eq!(weights(&op(&[("x1", &[1], &[])])), vec![0]);

    assert!(op(&[("1", &[], &[1, 1])]).is_core(2).unwrap());
    assert!(!op(&[("u1", &[], &[1, 1])]).is_core(2).unwrap());
    assert!(!op(&[("1", &[1], &[])]).is_core(1).unwrap());
    assert!(op(&[("u1", &[], &[1, 1])]).is_fwl(2).unwrap());
    assert!(op(&[("1", &[], &[1])]).is_fwl(2).unwrap());
    let c = chart(1, 2);
    assert!(!op_on(c, Space::E, &[("u1*u2", &[], &[1])])
        .is_fwl(2)
        .unwrap());
}

#[test]
fn symbols_and_multivectors() {
    let d = op(&[("u1", &[], &[1, 1]), ("1", &[], &[1])]);
    assert_eq!(d.symbol().unwrap(), mv(&[("u1", &[], &[1, 1])], 2));

    let c = chart(1, 1);
    let x = poly(c, Space::E, "x1");
    assert_eq!(
        mv(&[("1", &[1, 1], &[])], 2).eval(&[x.clone(), x]).unwrap(),
        poly(c, Space::E, "2")
    );

    let p1 = mv(&[("1", &[], &[1])], 1);
    let p2 = mv(&[("u1", &[], &[1])], 1);
    assert_eq!(p1.poisson(&p2).unwrap(), p1);

    assert!(mv(&[("u1", &[], &[1, 1])], 2).is_fwl());
    assert!(!mv(&[("1", &[], &[1, 1])], 2).is_fwl());
    assert!(mv(&[("x1", &[1], &[1])], 2).is_fwl());
}

#[test]
fn multiderivations() {
    let c = chart(1, 1);
    let p = mv(&[("u1", &[], &[1, 1])], 2);
    let e1 = Section::basis(c, SectionRole::OfEstar, 1);
    let d = p.multiderivation_d(&[e1.clone(), e1.clone()]).unwrap();
    assert_eq!(d.components(), &[poly(c, Space::E, "2")]);
    let x = poly(c, Space::E, "x1");
    assert!(p
        .multiderivation_l(std::slice::from_ref(&e1), &x)
        .unwrap()
        .is_zero());
    let mixed = mv(&[("1", &[1], &[1])], 2);
    assert_eq!(
        mixed
            .multiderivation_l(std::slice::from_ref(&e1), &x)
            .unwrap(),
        poly(c, Space::E, "1")
    );
    assert!(mixed
        .multiderivation_l(&[e1], &poly(c, Space::E, "5"))
        .unwrap()
        .is_zero());
}

#[test]
fn dual_polynomials_and_hamiltonians() {
    let c = chart(1, 1);
    let v = |s| poly(c, Space::Estar, s);
    assert_eq!(
        mv(&[("1", &[], &[1, 1])], 2).core_to_dualpoly().unwrap(),
        v("v1^2")
    );
    assert_eq!(
        mv(&[("x1", &[], &[1])], 1).core_to_dualpoly().unwrap(),
        v("x1*v1")
    );

    let h = mv(&[("u1", &[], &[1, 1])], 2).hamiltonian_field().unwrap();
    assert_eq!(h.dual[0], v("-v1^2"));
    assert!(h.base[0].is_zero());
    let h = mv(&[("1", &[1], &[1])], 2).hamiltonian_field().unwrap();
    assert_eq!(h.base[0], v("v1"));
}

#[test]
fn frame_derivations() {
    let c = chart(1, 2);
    let zero = || Poly::zero(c, Space::E);
    let one = Poly::one(c, Space::E);
    let elementary = FrameDerivation::new(
        c,
        vec![zero()],
        vec![vec![zero(), one.clone()], vec![zero(), zero()]],
    )
    .unwrap();
    let dual = elementary.dual();
    assert_eq!(dual.matrix()[1][0], one.scale(&fwlop::symcore::int(-1)));
    assert!(dual.matrix()[0][1].is_zero());

    let identity = FrameDerivation::new(
        c,
        vec![zero()],
        vec![vec![one.clone(), zero()], vec![zero(), one]],
    )
    .unwrap();
    assert_eq!(identity.trace(), poly(c, Space::E, "2"));
    assert!(elementary.trace().is_zero());
}

#[test]
fn a_isomorphism_examples() {
    let c = chart(1, 1);
    assert_eq!(
        a_iso(&DiffOp::identity(c, Space::E), 1).unwrap(),
        lder("0", "0", "1")
    );
    let phi = DiffOp::multiplication(&poly(c, Space::E, "x1*u1"));
    assert_eq!(a_iso(&phi, 0).unwrap(), lder("0", "-x1", "0"));

    // The multiplication part comes out as -v1 here; see the README.
    let d = op(&[("u1", &[], &[1, 1]), ("1", &[], &[1])]);
    let a = a_iso(&d, 2).unwrap();
    assert_eq!(a, lder("0", "-v1^2", "-v1"));
    assert_eq!(a_inverse(&a, 2).unwrap(), d);
    assert_eq!(
        a_inverse(&lder("0", "-v1^2", "v1"), 2).unwrap(),
        op(&[("u1", &[], &[1, 1]), ("3", &[], &[1])])
    );

    assert_eq!(
        a_inverse(&lder("0", "0", "1"), 1).unwrap(),
        DiffOp::identity(c, Space::E)
    );
    let mixed = a_inverse(&lder("v1", "0", "0"), 2).unwrap();
    assert_eq!(mixed, op(&[("1", &[1], &[1])]));
    assert_eq!(a_iso(&mixed, 2).unwrap(), lder("v1", "0", "0"));
    assert_eq!(
        ad_field(&mixed).unwrap(),
        lder("v1", "0", "0").field().clone()
    );

    assert!(matches!(
        a_iso(&op(&[("1", &[], &[1, 1])]), 2),
        Err(Error::NotFwl(_))
    ));
}

#[test]
fn metric_laplacian() {
    let c = chart(1, 1);
    let flat = Gamma::zero(c).unwrap();
    assert_eq!(
        fwl_metric_laplacian(&flat).unwrap(),
        op(&[("2", &[1], &[1])])
    );
    let curved = Gamma::new(c, [((1, 1, 1), poly(c, Space::E, "x1"))]).unwrap();
    assert!(fwl_metric_laplacian(&curved).unwrap().is_fwl(2).unwrap());
    for n in 1..=2 {
        let det = metric_determinant(&Gamma::zero(chart(n, n)).unwrap());
        assert_eq!(det.to_string(), if n == 1 { "-1" } else { "1" });
    }
    assert!(Gamma::zero(chart(1, 2)).is_err());
}

#[test]
fn linearization_examples() {
    let c = chart(1, 2);
    let amb = |s| poly(c, Space::Ambient, s);
    let e = |s| poly(c, Space::E, s);
    assert_eq!(linearize_function(&amb("u1 + u1^2")).unwrap(), e("u1"));
    assert_eq!(linearize_function(&amb("x1*u2")).unwrap(), e("x1*u2"));
    assert!(matches!(
        linearize_function(&amb("1")),
        Err(Error::NotLinearizable(_))
    ));

    let c = chart(1, 1);
    let amv = |terms: &[Term], q| SymMultivector::new(op_on(c, Space::Ambient, terms), q).unwrap();
    assert!(is_linearizable_multivector(&amv(
        &[("u1", &[], &[1, 1])],
        2
    )));
    assert!(!is_linearizable_multivector(&amv(
        &[("1", &[], &[1, 1])],
        2
    )));
    assert!(is_linearizable_multivector(&amv(&[("1", &[1], &[1])], 2)));
    assert_eq!(
        linearize_multivector(&amv(&[("u1", &[], &[1, 1])], 2)).unwrap(),
        mv(&[("u1", &[], &[1, 1])], 2)
    );
    assert!(linearize_multivector(&amv(&[("u1", &[1], &[])], 1))
        .unwrap()
        .is_zero());

    let delta = op_on(
        c,
        Space::Ambient,
        &[("u1", &[], &[1, 1]), ("u1^2", &[1], &[])],
    );
    assert!(is_order_q_linearizable(&delta, 2).unwrap());
    assert_eq!(
        linearize_do(&delta, 2).unwrap(),
        op(&[("u1", &[], &[1, 1])])
    );
    assert!(
        !is_order_q_linearizable(&op_on(c, Space::Ambient, &[("1", &[], &[1, 1])]), 2).unwrap()
    );
    assert!(
        linearize_do(&op_on(c, Space::Ambient, &[("u1", &[1], &[])]), 1)
            .unwrap()
            .is_zero()
    );
}
