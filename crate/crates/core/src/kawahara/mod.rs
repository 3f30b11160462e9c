//! The generalized Kawahara equation `u_t = u_5x + b u_xxx + f(u) u_x`: its
//! construction, the normalization of quadratic `f`, the catalog of known
//! symmetries and conservation laws, and one-shot theorem verifiers.

mod catalog;
mod normalize;
mod verify;

use crate::error::{Error, Result};
use crate::expr::{FunctionSpec, JetExpr};
use crate::jet::EvolutionEquation;

pub use catalog::{catalog, Catalog, CatalogDensity, CatalogSymmetry, Domain, FluxDiff};
pub use normalize::{normalize_quadratic_f, QuadraticNormalization};
pub use verify::{linear_dependence_gate, verify_theorem, Check, Gate, TheoremReport};

/// `b` and `f` of the equation, with the coefficient of `u_5x` scaled to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GKESpec {
    pub b: JetExpr,
    pub f: FunctionSpec,
}

impl GKESpec {
    pub fn new(f: FunctionSpec) -> Self {
        GKESpec { b: JetExpr::param("b"), f }
    }

    pub fn with_b(b: JetExpr, f: FunctionSpec) -> Self {
        GKESpec { b, f }
    }

    /// `u_5x + b u_xxx + f(u) u_x` before `f` is specialized.
    pub fn rhs(&self) -> JetExpr {
        let j = JetExpr::jet;
        &(&j(5) + &(&self.b * &j(3))) + &(&JetExpr::fn_sym("f", 0) * &j(1))
    }
}

/// The evolution equation of a spec; `f` must depend on `u`.
pub fn gke(spec: &GKESpec) -> Result<EvolutionEquation> {
    if let Some(df) = spec.f.image(1) {
        if df.is_zero() {
            return Err(Error::ConstantF);
        }
    }
    EvolutionEquation::new(spec.rhs(), spec.f.clone())
}
