//! Linearization around `M = {U = 0}` in an ambient chart `(X, U)`. The
//! normal bundle uses the same chart on space `E`, with `u^α = dU^α|_M`.

use crate::diffop::{nested_commutator_at_one, DerivKey, DiffOp};
use crate::error::{Error, Result};
use crate::multivec::SymMultivector;
use crate::symcore::{MultiIndex, Poly, Rational, Space, Var};

/// `F_lin = Σ_α ∂F/∂U^α(x, 0) u^α`, for `F` vanishing on `M`.
pub fn linearize_function(f: &Poly) -> Result<Poly> {
    f.space().ensure(&[Space::Ambient])?;
    let restricted = f.restrict_fiber_zero()?;
    if !restricted.is_zero() {
        return Err(Error::NotLinearizable(format!(
            "{f} restricts to {restricted} on M"
        )));
    }
    let chart = f.chart();
    let mut out = Poly::zero(chart, Space::E);
    for a in 1..=chart.fiber_rank {
        let coeff = f
            .partial(Var::u(a))?
            .restrict_fiber_zero()?
            .with_space(Space::E)?;
        out = &out + &(&coeff * &Poly::fiber(chart, Space::E, a));
    }
    Ok(out)
}

/// Every pure-fiber coefficient vanishes on `M`.
pub fn is_linearizable_multivector(p: &SymMultivector) -> bool {
    p.as_diffop()
        .terms()
        .filter(|(key, _)| key.base.is_empty())
        .all(|(_, c)| c.restrict_fiber_zero().is_ok_and(|r| r.is_zero()))
}

/// The fiber-wise linear multivector `P_lin` with
/// `P_lin(F_1,lin, …, F_q,lin) = P(F_1, …, F_q)_lin`.
pub fn linearize_multivector(p: &SymMultivector) -> Result<SymMultivector> {
    p.space().ensure(&[Space::Ambient])?;
    if !is_linearizable_multivector(p) {
        return Err(Error::NotLinearizable(p.to_string()));
    }
    let chart = p.chart();
    let mut table = DiffOp::zero(chart, Space::E);
    for (key, c) in p.as_diffop().terms() {
        match key.base.len() {
            0 => table.add_term(key.clone(), linearize_function(c)?),
            1 => table.add_term(key.clone(), c.restrict_fiber_zero()?.with_space(Space::E)?),
            _ => {}
        }
    }
    let lin = SymMultivector::new(table, p.order())?;
    assert!(lin.is_fwl(), "linearization {lin} is not fiber-wise linear");
    Ok(lin)
}

/// The order-`q` table of `Δ` as a `q`-multivector (zero if the order is lower).
fn level_symbol(delta: &DiffOp, q: usize) -> Result<SymMultivector> {
    delta.space().ensure(&[Space::Ambient])?;
    if let Some(order) = delta.order().filter(|&o| o > q) {
        return Err(Error::OrderExceeded { order, limit: q });
    }
    SymMultivector::new(delta.order_part(q), q)
}

pub fn is_order_q_linearizable(delta: &DiffOp, q: usize) -> Result<bool> {
    Ok(is_linearizable_multivector(&level_symbol(delta, q)?))
}

/// `[…[Δ, F_1], …, F_k](1)` restricted to `M`.
pub fn psi_ambient(delta: &DiffOp, reps: &[Poly]) -> Result<Poly> {
    delta.space().ensure(&[Space::Ambient])?;
    let value = nested_commutator_at_one(delta, reps)?;
    value.restrict_fiber_zero()?.with_space(Space::E)
}

/// The fiber-wise linear operator `Δ_lin` on `E` of an order-`q`
/// linearizable operator on the ambient chart.
pub fn linearize_do(delta: &DiffOp, q: usize) -> Result<DiffOp> {
    let symbol = level_symbol(delta, q)?;
    let top = linearize_multivector(&symbol)?.as_diffop().clone();
    let chart = delta.chart();
    let mut out = top.clone();
    if q > 0 {
        for c in MultiIndex::all_of_len(chart.fiber_rank, q - 1) {
            let reps: Vec<Poly> = c
                .letters()
                .iter()
                .map(|&a| Poly::fiber(chart, Space::Ambient, a))
                .collect();
            let lin: Vec<Poly> = c
                .letters()
                .iter()
                .map(|&a| Poly::fiber(chart, Space::E, a))
                .collect();
            let psi = psi_ambient(delta, &reps)?;
            let psi_top = nested_commutator_at_one(&top, &lin)?;
            let coeff =
                (&psi - &psi_top).scale(&(Rational::from_integer(1.into()) / c.factorial()));
            out.add_term(DerivKey::new(MultiIndex::empty(), c), coeff);
        }
    }
    assert!(
        out.is_zero() || out.is_fwl(q)?,
        "linearization {out} is not fiber-wise linear of order {q}"
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::Chart;

    fn c11() -> Chart {
        Chart::new(1, 1).unwrap()
    }

    fn amb(s: &str) -> Poly {
        Poly::parse(s, c11(), Space::Ambient).unwrap()
    }

    fn op(space: Space, terms: &[(&str, &[usize], &[usize])]) -> DiffOp {
        DiffOp::from_terms(
            c11(),
            space,
            terms.iter().map(|(c, dx, du)| {
                (
                    DerivKey::new(MultiIndex::new(dx.to_vec()), MultiIndex::new(du.to_vec())),
                    Poly::parse(c, c11(), space).unwrap(),
                )
            }),
        )
        .unwrap()
    }

    fn mv(terms: &[(&str, &[usize], &[usize])], q: usize) -> SymMultivector {
        SymMultivector::new(op(Space::Ambient, terms), q).unwrap()
    }

    #[test]
    fn functions() {
        let e = |s: &str| Poly::parse(s, c11(), Space::E).unwrap();
        assert_eq!(linearize_function(&amb("u1 + u1^2")).unwrap(), e("u1"));
        assert_eq!(
            linearize_function(&amb("x1*u1 + x1^3*u1^2")).unwrap(),
            e("x1*u1")
        );
        assert!(matches!(
            linearize_function(&amb("1")),
            Err(Error::NotLinearizable(_))
        ));
    }

    #[test]
    fn multivectors() {
        assert!(is_linearizable_multivector(&mv(&[("u1", &[], &[1, 1])], 2)));
        assert!(!is_linearizable_multivector(&mv(&[("1", &[], &[1, 1])], 2)));
        assert!(is_linearizable_multivector(&mv(&[("1", &[1], &[1])], 2)));

        let p = mv(&[("u1", &[], &[1, 1])], 2);
        let lin = linearize_multivector(&p).unwrap();
        assert_eq!(lin.as_diffop(), &op(Space::E, &[("u1", &[], &[1, 1])]));
        // defining identity on F = U1, G = U1 + U1^2
        let (f, g) = (amb("u1"), amb("u1 + u1^2"));
        let lhs = lin
            .eval(&[
                linearize_function(&f).unwrap(),
                linearize_function(&g).unwrap(),
            ])
            .unwrap();
        assert_eq!(lhs, linearize_function(&p.eval(&[f, g]).unwrap()).unwrap());

        assert!(linearize_multivector(&mv(&[("u1", &[1], &[])], 1))
            .unwrap()
            .is_zero());
        let mixed = mv(&[("1", &[1], &[1])], 2);
        assert_eq!(
            linearize_multivector(&mixed).unwrap().as_diffop(),
            &op(Space::E, &[("1", &[1], &[1])])
        );
    }

    #[test]
    fn operators() {
        let delta = op(Space::Ambient, &[("u1", &[], &[1, 1]), ("u1^2", &[1], &[])]);
        assert!(is_order_q_linearizable(&delta, 2).unwrap());
        assert_eq!(
            linearize_do(&delta, 2).unwrap(),
            op(Space::E, &[("u1", &[], &[1, 1])])
        );
        assert!(!is_order_q_linearizable(&op(Space::Ambient, &[("1", &[], &[1, 1])]), 2).unwrap());
        assert!(is_order_q_linearizable(&op(Space::Ambient, &[("1", &[1], &[])]), 2).unwrap());
        assert!(matches!(
            is_order_q_linearizable(&delta, 1),
            Err(Error::OrderExceeded { order: 2, limit: 1 })
        ));
        assert!(linearize_do(&op(Space::Ambient, &[("u1", &[1], &[])]), 1)
            .unwrap()
            .is_zero());

        let fwl = op(
            Space::E,
            &[("u1", &[], &[1, 1]), ("x1", &[1], &[1]), ("3", &[], &[1])],
        );
        assert_eq!(
            linearize_do(&fwl.with_space(Space::Ambient).unwrap(), 2).unwrap(),
            fwl
        );
    }
}
