use fwlop::verify::{run_suite, suite_names, Bounds};
use fwlop::{Chart, DerivKey, DiffOp, Error, MultiIndex, Poly, Rational, Space};
use proptest::prelude::*;

fn chart() -> Chart {
    Chart::new(2, 2).unwrap()
}

/// Terms `(num, den, [x1, x2, u1, u2] exponents)`.
fn poly_strategy() -> impl Strategy<Value = Poly> {
    prop::collection::vec((-9i64..=9, 1i64..=9, prop::array::uniform4(0u32..3)), 0..5).prop_map(
        |terms| {
            let c = chart();
            terms
                .into_iter()
                .fold(Poly::zero(c, Space::E), |acc, (num, den, e)| {
                    let vars = [
                        Poly::x(c, Space::E, 1),
                        Poly::x(c, Space::E, 2),
                        Poly::fiber(c, Space::E, 1),
                        Poly::fiber(c, Space::E, 2),
                    ];
                    let mono = vars
                        .iter()
                        .zip(e)
                        .fold(Poly::one(c, Space::E), |m, (v, k)| &m * &v.pow(k));
                    &acc + &mono.scale(&Rational::new(num.into(), den.into()))
                })
        },
    )
}

fn multi_index() -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(1usize..=2, 0..4).prop_map(MultiIndex::new)
}

fn op_strategy() -> impl Strategy<Value = DiffOp> {
    prop::collection::vec((multi_index(), multi_index(), poly_strategy()), 0..4).prop_map(|terms| {
        DiffOp::from_terms(
            chart(),
            Space::E,
            terms.into_iter().map(|(b, f, c)| (DerivKey::new(b, f), c)),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn print_parse_round_trip(p in poly_strategy()) {
        prop_assert_eq!(Poly::parse(&p.to_string(), chart(), Space::E).unwrap(), p);
    }

    #[test]
    fn multi_index_concat_is_commutative(a in multi_index(), b in multi_index()) {
        prop_assert_eq!(a.concat(&b), b.concat(&a));
        prop_assert_eq!(a.concat(&MultiIndex::empty()), a);
    }

    #[test]
    fn operator_documents_are_canonical(d in op_strategy()) {
        let text = d.to_json();
        let back = DiffOp::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(back, d);
    }

    #[test]
    fn composition_is_associative(a in op_strategy(), b in op_strategy(), c in op_strategy()) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn composition_matches_action(a in op_strategy(), b in op_strategy(), f in poly_strategy()) {
        let composed = a.compose(&b).unwrap().apply(&f).unwrap();
        prop_assert_eq!(composed, a.apply(&b.apply(&f).unwrap()).unwrap());
    }
}

#[test]
fn reports_are_reproducible() {
    let bounds = Bounds::default();
    for suite in ["stabilizer", "lin-fn"] {
        let a = run_suite(suite, 30, 99, bounds).unwrap();
        let b = run_suite(suite, 30, 99, bounds).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.passed());
    }
}

#[test]
fn suite_names_and_bounds() {
    assert_eq!(suite_names().len(), 13);
    assert!(matches!(
        run_suite("nope", 1, 0, Bounds::default()),
        Err(Error::UnknownSuite(_))
    ));
    assert_eq!(
        "1,2,3".parse::<Bounds>().unwrap(),
        Bounds { n: 1, m: 2, q: 3 }
    );
    assert!("1,0,3".parse::<Bounds>().is_err());
    assert!("1,2".parse::<Bounds>().is_err());
}

#[test]
fn small_bounds_run_every_suite() {
    let report = run_suite("all", 10, 5, Bounds { n: 1, m: 1, q: 1 }).unwrap();
    assert!(report.passed(), "{}", report.to_json());
}
