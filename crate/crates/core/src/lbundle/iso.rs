use std::collections::BTreeMap;

use super::{FrameDerivation, LDerivation, LPair};
use crate::diffop::{nested_commutator_at_one, DerivKey, DiffOp};
use crate::error::{Error, Result};
use crate::multivec::{PolyVectorField, Section, SectionRole, SymMultivector};
use crate::symcore::{MultiIndex, Poly, Space};

fn ensure_fwl(delta: &DiffOp, q: usize) -> Result<()> {
    if delta.is_fwl(q)? {
        Ok(())
    } else {
        Err(Error::NotFwl(format!("{delta} (order {q})")))
    }
}

/// `F_Δ = Σ Δ^B(x) v_B` for a core operator (or zero).
fn core_poly(op: &DiffOp) -> Result<Poly> {
    let chart = op.chart();
    let mut out = Poly::zero(chart, Space::Estar);
    for (key, c) in op.terms() {
        if !key.base.is_empty() || !c.is_base_only() {
            return Err(Error::NotCore(op.to_string()));
        }
        let v = Poly::fiber_monomial(chart, Space::Estar, &key.fiber);
        out = &out + &(&c.with_space(Space::Estar)? * &v);
    }
    Ok(out)
}

/// `Ψ_Δ(φ_1, …, φ_{q−1}) = […[Δ, ℓ_φ1], …, ℓ_φ(q−1)](1)`, a base function.
pub fn psi(delta: &DiffOp, q: usize, sections: &[Section]) -> Result<Poly> {
    ensure_fwl(delta, q)?;
    if sections.len() + 1 != q {
        return Err(Error::ArityMismatch {
            expected: q.saturating_sub(1),
            found: sections.len(),
        });
    }
    let args = sections
        .iter()
        .map(|s| s.linear_function(SectionRole::OfEstar))
        .collect::<Result<Vec<_>>>()?;
    let value = nested_commutator_at_one(delta, &args)?;
    assert!(
        value.is_base_only(),
        "Psi of {delta} is not a base function: {value}"
    );
    Ok(value)
}

/// The vector field of `ad_Δ` on `E*`, read off from the anchor:
/// `W(x^i) = F_{[Δ, x^i]}` and `W(v_α) = F_{[Δ, ∂u_α]}`.
pub fn ad_field(delta: &DiffOp) -> Result<PolyVectorField> {
    delta.space().ensure(&[Space::E])?;
    let chart = delta.chart();
    let base = (1..=chart.base_dim)
        .map(|i| {
            core_poly(&delta.commutator(&DiffOp::multiplication(&Poly::x(chart, Space::E, i)))?)
        })
        .collect::<Result<_>>()?;
    let dual = (1..=chart.fiber_rank)
        .map(|a| core_poly(&delta.commutator(&DiffOp::d_fiber(chart, Space::E, a))?))
        .collect::<Result<_>>()?;
    PolyVectorField::new(base, dual)
}

/// `Φ_Δ(ε^C) = (σ(Δ)(ε^C, −))^* acting on `Vol_u` plus `Ψ_Δ(ε^C)`, for
/// every `C` of length `q − 1`.
pub fn phi_delta(delta: &DiffOp, q: usize) -> Result<LPair> {
    ensure_fwl(delta, q)?;
    if q == 0 {
        return Err(Error::NotFwl(
            "a pair needs an operator of order at least 1".into(),
        ));
    }
    let chart = delta.chart();
    let m = chart.fiber_rank;
    let p = SymMultivector::new(delta.order_part(q), q)?;
    let mut phi = BTreeMap::new();
    for c in MultiIndex::all_of_len(m, q - 1) {
        let sections: Vec<Section> = c
            .letters()
            .iter()
            .map(|&a| Section::basis(chart, SectionRole::OfEstar, a))
            .collect();
        let field = (1..=chart.base_dim)
            .map(|i| p.multiderivation_l(&sections, &Poly::x(chart, Space::E, i)))
            .collect::<Result<Vec<_>>>()?;
        // the derivation σ(Δ)(ε^C, −) of E*, column α holds its value on ε^α
        let mut matrix = vec![vec![Poly::zero(chart, Space::E); m]; m];
        for alpha in 1..=m {
            let mut args = sections.clone();
            args.push(Section::basis(chart, SectionRole::OfEstar, alpha));
            let image = p.multiderivation_d(&args)?;
            for (gamma, comp) in image.components().iter().enumerate() {
                matrix[gamma][alpha - 1] = comp.clone();
            }
        }
        let on_estar = FrameDerivation::new(chart, field.clone(), matrix)?;
        let on_volume = on_estar.dual().top_power_action();
        let mult = &on_volume.matrix()[0][0] + &psi(delta, q, &sections)?;
        phi.insert(c, (field, mult));
    }
    LPair::new(p, phi)
}

/// The closed coordinate form: `W = ad_Δ` and `c = Σ_C Δ'^C v_C`, where
/// `Δ'^C` are the core coefficients once every `Δ^B_α u^α ∂u^B` is
/// rewritten as `(Δ^B_α ∂u^B) ∘ u^α` plus lower order terms.
pub fn a_iso_closed_form(delta: &DiffOp, q: usize) -> Result<LDerivation> {
    ensure_fwl(delta, q)?;
    let chart = delta.chart();
    let field = ad_field(delta)?;
    if q == 0 {
        return LDerivation::new(field, Poly::zero(chart, Space::Estar));
    }
    let mut rest = delta.clone();
    for (key, coeff) in delta.terms() {
        if !key.base.is_empty() {
            rest = &rest - &DiffOp::monomial(coeff, key.clone())?;
        } else if key.fiber.len() == q {
            for (alpha, c) in coeff.fiber_coefficients() {
                let right = DiffOp::monomial(&c, key.clone())?.compose(&DiffOp::multiplication(
                    &Poly::fiber_monomial(chart, Space::E, &alpha),
                ))?;
                rest = &rest - &right;
            }
        }
    }
    LDerivation::new(field, core_poly(&rest)?)
}

/// `A(Δ)`: the derivation of `L_{E*}` attached to a fiber-wise linear operator
/// of order `q`. Computed from the pair `(σ(Δ), Φ_Δ)` and checked against
/// [`a_iso_closed_form`].
pub fn a_iso(delta: &DiffOp, q: usize) -> Result<LDerivation> {
    ensure_fwl(delta, q)?;
    let via_pair = if q == 0 {
        let p = SymMultivector::new(delta.order_part(0), 0)?;
        LDerivation::new(
            p.hamiltonian_field()?,
            Poly::zero(delta.chart(), Space::Estar),
        )?
    } else {
        phi_delta(delta, q)?.to_lderivation()?
    };
    let closed = a_iso_closed_form(delta, q)?;
    assert_eq!(
        via_pair, closed,
        "the two computations of A({delta}) disagree"
    );
    Ok(via_pair)
}

/// Inverse of [`a_iso`] on derivations homogeneous of degree `q − 1`.
pub fn a_inverse(d: &LDerivation, q: usize) -> Result<DiffOp> {
    if !d.is_homogeneous_of(q as i64 - 1) {
        return Err(Error::NotHomogeneous(format!(
            "{d} is not homogeneous of degree {}",
            q as i64 - 1
        )));
    }
    let chart = d.chart();
    let field = d.field();
    let mut out = DiffOp::zero(chart, Space::E);
    for (i, comp) in field.base.iter().enumerate() {
        for (a, coeff) in comp.fiber_coefficients() {
            out.add_term(
                DerivKey::new(MultiIndex::single(i + 1), a),
                coeff.with_space(Space::E)?,
            );
        }
    }
    for (alpha, comp) in field.dual.iter().enumerate() {
        let u = Poly::fiber(chart, Space::E, alpha + 1);
        for (b, coeff) in comp.fiber_coefficients() {
            out.add_term(
                DerivKey::new(MultiIndex::empty(), b),
                -&(&coeff.with_space(Space::E)? * &u),
            );
        }
    }
    // c = Σ Δ'^C v_C with Δ'^C = Δ^C + div_v W read off at C
    let core = d.mult() - &field.div_v();
    for (c, coeff) in core.fiber_coefficients() {
        out.add_term(
            DerivKey::new(MultiIndex::empty(), c),
            coeff.with_space(Space::E)?,
        );
    }
    Ok(out)
}
