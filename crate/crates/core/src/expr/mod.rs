//! Exact symbolic kernel: canonical rational expressions over the jet
//! generators, the `f(u)` realizations, and coordinate-wise calculus.

mod display;
mod generator;
mod jet_expr;
mod poly;
mod spec;
mod tree;

pub use generator::Generator;
pub use jet_expr::JetExpr;
pub use poly::{gcd, Coeff, Monomial, Poly};
pub use spec::FunctionSpec;
pub use tree::{normalize, Tree};

use crate::error::{Error, Result};
use crate::jet::total_x;

/// ∂g/∂u for the generators that depend on `u`.
pub(crate) fn u_image(g: &Generator) -> Option<JetExpr> {
    match g {
        Generator::Jet(0) => Some(JetExpr::one()),
        Generator::FnSym { name, order } => Some(JetExpr::fn_sym(name, order + 1)),
        Generator::Log { shift } => {
            let w = &JetExpr::u() + &JetExpr::param(shift);
            Some(w.recip().expect("u + c is nonzero"))
        }
        _ => None,
    }
}

/// ∂e/∂u with the chain rule through `f` and `ln(u + c)`, all other
/// generators held fixed.
pub(crate) fn d_du(e: &JetExpr) -> JetExpr {
    e.derive_with(u_image)
}

pub fn is_zero(e: &JetExpr) -> bool {
    e.is_zero()
}

pub fn partial(e: &JetExpr, g: &Generator) -> JetExpr {
    e.partial(g)
}

/// ∂e/∂u for a point function of `u`, applying `f^(k) ↦ f^(k+1)`.
pub fn partial_u_total(e: &JetExpr) -> Result<JetExpr> {
    if e.contains_any(|g| matches!(g, Generator::Jet(i) | Generator::JetT(i) if *i >= 1))
        || e.contains(&Generator::JetT(0))
    {
        return Err(Error::NotAPointFunction);
    }
    Ok(d_du(e))
}

pub fn specialize_f(e: &JetExpr, spec: &FunctionSpec) -> JetExpr {
    spec.specialize(e)
}

/// Replaces `g` by `v`. Replacing `u` replaces every `u_{ix}` by `D_x^i(v)`.
pub fn substitute(e: &JetExpr, g: &Generator, v: &JetExpr) -> Result<JetExpr> {
    match g {
        Generator::Jet(0) => {
            if e.contains_any(|h| matches!(h, Generator::FnSym { .. } | Generator::Log { .. })) {
                return Err(Error::InconsistentJetSubstitution(
                    "u occurs inside an opaque function of u".into(),
                ));
            }
            let top = e.max_jet().unwrap_or(0);
            let mut images = vec![v.clone()];
            for i in 1..=top {
                images.push(total_x(&images[i as usize - 1]));
            }
            e.substitute_with(|h| match h {
                Generator::Jet(i) => Some(images[*i as usize].clone()),
                _ => None,
            })
        }
        Generator::Jet(k) => {
            if e.max_jet().is_some_and(|m| m > *k) {
                return Err(Error::InconsistentJetSubstitution(format!(
                    "replacing {g} while higher jets are present"
                )));
            }
            e.substitute_with(|h| (h == g).then(|| v.clone()))
        }
        _ => e.substitute_with(|h| (h == g).then(|| v.clone())),
    }
}
