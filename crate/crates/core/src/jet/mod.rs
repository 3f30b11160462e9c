//! Total derivatives, Fréchet derivatives, the Euler operator and formal
//! integration in `x` on the jet space of one dependent variable.

mod integrate;

use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::expr::{d_du, FunctionSpec, Generator, JetExpr};

pub use integrate::formal_x_integrate;

/// `u_t = K(x, t, u, …, u_nx)`.
///
/// `D_x^i(K)` is cached on first use; clones share the cache.
#[derive(Clone)]
pub struct EvolutionEquation {
    rhs: JetExpr,
    order: u32,
    spec: FunctionSpec,
    dx_powers: Arc<Mutex<Vec<JetExpr>>>,
}

impl fmt::Debug for EvolutionEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EvolutionEquation")
            .field("rhs", &self.rhs.to_string())
            .field("order", &self.order)
            .field("spec", &self.spec)
            .finish()
    }
}

impl PartialEq for EvolutionEquation {
    fn eq(&self, other: &Self) -> bool {
        self.rhs == other.rhs && self.spec == other.spec
    }
}

impl EvolutionEquation {
    /// Builds the equation after rewriting `f` per `spec`. The order must be
    /// at least 2 and the right-hand side free of unknowns of `t` and `u_t`.
    pub fn new(rhs: JetExpr, spec: FunctionSpec) -> Result<Self> {
        let rhs = spec.specialize(&rhs);
        if rhs.contains_any(|g| matches!(g, Generator::UnknownT { .. })) {
            return Err(Error::InvalidEquation("right-hand side contains an unknown function of t".into()));
        }
        if rhs.contains_any(|g| matches!(g, Generator::JetT(_))) {
            return Err(Error::InvalidEquation("right-hand side contains u_t".into()));
        }
        let order = match order(&rhs) {
            Order::Finite(n) if n >= 2 => n,
            o => return Err(Error::InvalidEquation(format!("order {o} is below 2"))),
        };
        let dx_powers = Arc::new(Mutex::new(vec![rhs.clone()]));
        Ok(EvolutionEquation { rhs, order, spec, dx_powers })
    }

    pub fn rhs(&self) -> &JetExpr {
        &self.rhs
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn spec(&self) -> &FunctionSpec {
        &self.spec
    }

    /// `D_x^i(K)`.
    pub fn dx_rhs(&self, i: u32) -> JetExpr {
        let mut cache = self.dx_powers.lock().expect("cache lock");
        while cache.len() <= i as usize {
            let next = total_x(cache.last().expect("nonempty cache"));
            cache.push(next);
        }
        cache[i as usize].clone()
    }
}

/// Order of a differential function; `NegInfinity` for functions free of `u`
/// and its jets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    NegInfinity,
    Finite(u32),
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::NegInfinity => f.write_str("-inf"),
            Order::Finite(n) => write!(f, "{n}"),
        }
    }
}

fn x_image(g: &Generator) -> Option<JetExpr> {
    match g {
        Generator::IndepX => Some(JetExpr::one()),
        Generator::Jet(i) => Some(JetExpr::jet(i + 1)),
        Generator::JetT(i) => Some(JetExpr::gen(Generator::JetT(i + 1))),
        Generator::FnSym { name, order } => Some(&JetExpr::fn_sym(name, order + 1) * &JetExpr::jet(1)),
        Generator::Log { shift } => {
            let w = &JetExpr::u() + &JetExpr::param(shift);
            Some(JetExpr::jet(1).checked_div(&w).expect("u + c is nonzero"))
        }
        _ => None,
    }
}

/// `D_x = ∂_x + Σ u_{(i+1)x} ∂/∂u_{ix}`, with the chain rule through `f`
/// and `ln(u + c)`.
pub fn total_x(e: &JetExpr) -> JetExpr {
    e.derive_with(x_image)
}

pub fn total_x_n(e: &JetExpr, n: u32) -> JetExpr {
    (0..n).fold(e.clone(), |acc, _| total_x(&acc))
}

/// `D_t = ∂_t + Σ D_x^i(K) ∂/∂u_{ix}` on the equation. `u_t` jets are
/// off-equation coordinates and are rejected.
pub fn total_t(e: &JetExpr, eq: &EvolutionEquation) -> JetExpr {
    assert!(
        !e.contains_any(|g| matches!(g, Generator::JetT(_))),
        "total_t applies to functions on the equation, not to u_t jets"
    );
    let k = eq.rhs();
    let d = e.derive_with(|g| match g {
        Generator::IndepT => Some(JetExpr::one()),
        Generator::Jet(i) => Some(eq.dx_rhs(*i)),
        Generator::FnSym { name, order } => Some(&JetExpr::fn_sym(name, order + 1) * k),
        Generator::Log { shift } => {
            let w = &JetExpr::u() + &JetExpr::param(shift);
            Some(k.checked_div(&w).expect("u + c is nonzero"))
        }
        Generator::UnknownT { name, order } => Some(JetExpr::unknown_t(name, order + 1)),
        _ => None,
    });
    eq.spec().specialize(&d)
}

/// Off-equation `D_t`: `u_{ix}` maps to the free coordinate `u_{t,ix}`.
pub fn total_t_free(e: &JetExpr) -> JetExpr {
    e.derive_with(|g| match g {
        Generator::IndepT => Some(JetExpr::one()),
        Generator::Jet(i) => Some(JetExpr::gen(Generator::JetT(*i))),
        Generator::FnSym { name, order } => {
            Some(&JetExpr::fn_sym(name, order + 1) * &JetExpr::gen(Generator::JetT(0)))
        }
        Generator::Log { shift } => {
            let w = &JetExpr::u() + &JetExpr::param(shift);
            Some(JetExpr::gen(Generator::JetT(0)).checked_div(&w).expect("u + c is nonzero"))
        }
        Generator::UnknownT { name, order } => Some(JetExpr::unknown_t(name, order + 1)),
        Generator::JetT(_) => panic!("second t-derivatives are outside the jet space in use"),
        _ => None,
    })
}

/// `∂F/∂u_{jx}`; for `j = 0` the chain rule through `f` is applied.
pub fn jet_partial(e: &JetExpr, j: u32) -> JetExpr {
    if j == 0 {
        d_du(e)
    } else {
        e.partial(&Generator::Jet(j))
    }
}

pub fn order(e: &JetExpr) -> Order {
    match e.max_jet() {
        Some(m) if m >= 1 => Order::Finite(m),
        _ if e.contains_any(Generator::depends_on_u) => Order::Finite(0),
        _ => Order::NegInfinity,
    }
}

/// `D_F(Q) = Σ_j ∂F/∂u_{jx} D_x^j(Q)`.
pub fn frechet(f: &JetExpr, q: &JetExpr) -> JetExpr {
    let Order::Finite(n) = order(f) else { return JetExpr::zero() };
    let mut out = JetExpr::zero();
    let mut dq = q.clone();
    for j in 0..=n {
        let c = jet_partial(f, j);
        if !c.is_zero() {
            out = &out + &(&c * &dq);
        }
        if j < n {
            dq = total_x(&dq);
        }
    }
    out
}

/// Variational derivative `Σ_{i≥0} (−D_x)^i ∂F/∂u_{ix}`.
pub fn euler(f: &JetExpr) -> JetExpr {
    let Order::Finite(n) = order(f) else { return JetExpr::zero() };
    // Horner form: c_0 − D_x(c_1 − D_x(c_2 − …))
    let mut acc = JetExpr::zero();
    for i in (0..=n).rev() {
        acc = &jet_partial(f, i) - &total_x(&acc);
    }
    acc
}
