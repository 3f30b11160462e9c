//! Symmetry and conservation-law verifiers, the formal-symmetry rank test,
//! the obstruction scan and a linear-ansatz solver.

mod ansatz;
mod scan;

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Generator, JetExpr};
use crate::jet::{
    euler, formal_x_integrate, frechet, jet_partial, order, total_t, total_t_free, total_x, EvolutionEquation,
    Order,
};
use crate::psd::{frechet_hat, Degree, PsdSeries};

pub use ansatz::{linear_relations, solve_linear_ansatz, AnsatzMode, AnsatzSolution};
pub use scan::{formal_symmetry_scan, Condition, ScanReport, ScanStep, ScanVerdict};

/// A generalized symmetry `v_Q = Q ∂/∂u`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryCharacteristic {
    pub q: JetExpr,
    pub order: Order,
    pub label: String,
}

impl SymmetryCharacteristic {
    pub fn new(label: &str, q: JetExpr) -> Self {
        SymmetryCharacteristic { order: order(&q), q, label: label.to_string() }
    }

    pub fn verify(&self, eq: &EvolutionEquation) -> bool {
        symmetry_residual(eq, &self.q).is_zero()
    }
}

/// A conservation law `D_t(ρ) = D_x(σ)` with characteristic `P = δρ/δu`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFluxPair {
    pub rho: JetExpr,
    pub sigma: JetExpr,
    pub characteristic: JetExpr,
    pub verified: bool,
    pub flux_reconstructed: bool,
}

impl DensityFluxPair {
    /// Checks `ρ` and reconstructs its flux.
    pub fn reconstruct(eq: &EvolutionEquation, rho: JetExpr) -> Result<Self> {
        let sigma = reconstruct_flux(eq, &rho)?;
        let verified = conservation_residual(eq, &rho, &sigma).is_zero();
        Ok(DensityFluxPair {
            characteristic: characteristic_of_density(&rho),
            rho,
            sigma,
            verified,
            flux_reconstructed: true,
        })
    }

    /// Checks a density together with a given flux.
    pub fn with_flux(eq: &EvolutionEquation, rho: JetExpr, sigma: JetExpr) -> Self {
        let verified = conservation_residual(eq, &rho, &sigma).is_zero();
        DensityFluxPair {
            characteristic: characteristic_of_density(&rho),
            rho,
            sigma,
            verified,
            flux_reconstructed: false,
        }
    }
}

/// `D_t(Q) − D_K(Q)`.
pub fn symmetry_residual(eq: &EvolutionEquation, q: &JetExpr) -> JetExpr {
    let q = eq.spec().specialize(q);
    let r = &total_t(&q, eq) - &frechet(eq.rhs(), &q);
    eq.spec().specialize(&r)
}

/// `D_t(ρ) − D_x(σ)`.
pub fn conservation_residual(eq: &EvolutionEquation, rho: &JetExpr, sigma: &JetExpr) -> JetExpr {
    let rho = eq.spec().specialize(rho);
    let sigma = eq.spec().specialize(sigma);
    eq.spec().specialize(&(&total_t(&rho, eq) - &total_x(&sigma)))
}

/// `δ(D_tρ)/δu = 0` and `D_tρ` has a preimage under `D_x`.
pub fn is_conserved_density(eq: &EvolutionEquation, rho: &JetExpr) -> bool {
    let d = total_t(&eq.spec().specialize(rho), eq);
    if !eq.spec().specialize(&euler(&d)).is_zero() {
        return false;
    }
    formal_x_integrate(&d).1.is_zero()
}

/// The flux `σ` with `D_t(ρ) = D_x(σ)`, without additive functions of `t`.
pub fn reconstruct_flux(eq: &EvolutionEquation, rho: &JetExpr) -> Result<JetExpr> {
    let d = total_t(&eq.spec().specialize(rho), eq);
    let (sigma, residual) = formal_x_integrate(&d);
    if residual.is_zero() {
        Ok(eq.spec().specialize(&sigma))
    } else {
        Err(Error::NotConserved)
    }
}

pub fn characteristic_of_density(rho: &JetExpr) -> JetExpr {
    euler(rho)
}

/// `ρ = D_x(ζ)` for some differential function `ζ`.
pub fn is_trivial_density(rho: &JetExpr) -> bool {
    formal_x_integrate(rho).1.is_zero()
}

/// `D_x(δρ/δu)`, a symmetry whenever `ρ` is conserved and `D_x` is a
/// Hamiltonian operator for the equation.
pub fn symmetry_from_density(eq: &EvolutionEquation, rho: &JetExpr) -> JetExpr {
    eq.spec().specialize(&total_x(&euler(&eq.spec().specialize(rho))))
}

/// `D_t(ρ) − D_x(σ + B) − P·(u_t − K)` in the free jet space, where `u_t` is a
/// fresh coordinate and `B` collects the integration by parts that turns
/// `Σ ∂ρ/∂u_{ix} D_x^i` into `P`. Zero for every conservation law.
pub fn characteristic_identity_residual(eq: &EvolutionEquation, rho: &JetExpr, sigma: &JetExpr) -> JetExpr {
    let rho = eq.spec().specialize(rho);
    let p = euler(&rho);
    let ord = match order(&rho) {
        Order::Finite(n) => n,
        Order::NegInfinity => 0,
    };
    // w_j = D_x^j(u_t − K)
    let mut w = vec![&JetExpr::gen(Generator::JetT(0)) - eq.rhs()];
    for j in 1..ord {
        w.push(&JetExpr::gen(Generator::JetT(j)) - &eq.dx_rhs(j));
    }
    let mut b = JetExpr::zero();
    for i in 1..=ord {
        let mut c = jet_partial(&rho, i);
        for k in 0..i {
            b = &b + &(&c * &w[(i - 1 - k) as usize]);
            c = -&total_x(&c);
        }
    }
    let lhs = &total_t_free(&rho) - &total_x(&(&eq.spec().specialize(sigma) + &b));
    eq.spec().specialize(&(&lhs - &(&p * &w[0])))
}

/// `D_t(L) − [D̂_K, L]`, with `D_t` acting on coefficients.
pub fn formal_symmetry_residual(eq: &EvolutionEquation, l: &PsdSeries) -> PsdSeries {
    let dk = frechet_hat(eq.rhs());
    let dt = l.map_coeffs(|c| total_t(c, eq));
    let r = &dt - &dk.commutator(l);
    r.map_coeffs(|c| eq.spec().specialize(c))
}

/// Rank of a formal symmetry, `k = deg L + ord K − deg(residual)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Exactly(i64),
    /// The residual vanishes on its whole guaranteed window.
    AtLeast(i64),
    /// The residual is exactly zero.
    Unbounded,
}

impl Rank {
    /// Whether the rank is known to be at least `k`.
    pub fn at_least(&self, k: i64) -> bool {
        match self {
            Rank::Exactly(r) | Rank::AtLeast(r) => *r >= k,
            Rank::Unbounded => true,
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Exactly(k) => write!(f, "{k}"),
            Rank::AtLeast(k) => write!(f, ">= {k}"),
            Rank::Unbounded => f.write_str("unbounded"),
        }
    }
}

pub fn rank_of(eq: &EvolutionEquation, l: &PsdSeries) -> Result<Rank> {
    let Degree::Finite(m) = l.degree() else { return Ok(Rank::Unbounded) };
    let n = eq.order() as i64;
    let r = formal_symmetry_residual(eq, l);
    match (r.degree(), r.floor()) {
        (Degree::Finite(d), _) => Ok(Rank::Exactly(m + n - d)),
        (Degree::NegInfinity, None) => Ok(Rank::Unbounded),
        (Degree::NegInfinity, Some(f)) if f <= m + n => Ok(Rank::AtLeast(m + n - f + 1)),
        (Degree::NegInfinity, Some(f)) => Err(Error::InsufficientPrecision { needed: m + n, available: f }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Coeff, FunctionSpec};

    fn j(i: u32) -> JetExpr {
        JetExpr::jet(i)
    }

    fn gke(spec: FunctionSpec) -> EvolutionEquation {
        let rhs = &(&j(5) + &(&JetExpr::param("b") * &j(3))) + &(&JetExpr::fn_sym("f", 0) * &j(1));
        EvolutionEquation::new(rhs, spec).unwrap()
    }

    fn rho3() -> JetExpr {
        let b = JetExpr::param("b");
        let e = &(&j(2) * &j(2)) - &(&b * &(&j(1) * &j(1)));
        &e.scale(&Coeff::new(1.into(), 2.into())) + &JetExpr::fn_sym("f", -2)
    }

    #[test]
    fn symmetry_residuals() {
        let eq = gke(FunctionSpec::Abstract);
        assert!(symmetry_residual(&eq, &j(1)).is_zero());
        assert!(symmetry_residual(&eq, eq.rhs()).is_zero());
        let expect = -&(&(&JetExpr::fn_sym("f", 1) * &JetExpr::u()) * &j(1));
        assert_eq!(symmetry_residual(&eq, &JetExpr::u()), expect);
        let (a, b) = (JetExpr::param("alpha"), JetExpr::param("beta"));
        let lin = gke(FunctionSpec::linear(a.clone(), b));
        let q3 = &(&JetExpr::t() * &j(1)) + &a.recip().unwrap();
        assert!(symmetry_residual(&lin, &q3).is_zero());
    }

    #[test]
    fn densities_and_fluxes() {
        let eq = gke(FunctionSpec::Abstract);
        let u = JetExpr::u();
        let sigma1 = &(&j(4) + &(&JetExpr::param("b") * &j(2))) + &JetExpr::fn_sym("f", -1);
        assert!(conservation_residual(&eq, &u, &sigma1).is_zero());
        assert_eq!(conservation_residual(&eq, &u, &JetExpr::zero()), eq.rhs().clone());
        assert_eq!(reconstruct_flux(&eq, &u).unwrap(), sigma1);
        assert!(is_conserved_density(&eq, &(&u * &u)));
        assert!(is_conserved_density(&eq, &rho3()));
        assert!(!is_conserved_density(&eq, &u.powi(3).unwrap()));
        assert_eq!(reconstruct_flux(&eq, &u.powi(3).unwrap()), Err(Error::NotConserved));
    }

    #[test]
    fn quadratic_flux_has_half_u_fourth() {
        let eq = gke(FunctionSpec::power(2));
        let u = JetExpr::u();
        let sigma = reconstruct_flux(&eq, &(&u * &u)).unwrap();
        assert!(conservation_residual(&eq, &(&u * &u), &sigma).is_zero());
        let quartic = sigma.numerator().coeff_of(&crate::expr::Monomial::var(Generator::Jet(0), 4));
        assert_eq!(quartic, Coeff::new(1.into(), 2.into()));
    }

    #[test]
    fn characteristics_and_triviality() {
        let u = JetExpr::u();
        assert_eq!(characteristic_of_density(&(&u * &u)), u.scale_int(2));
        assert!(is_trivial_density(&j(1)));
        assert!(!is_trivial_density(&u));
        assert!(is_trivial_density(&(&(&u * &j(2)) + &(&j(1) * &j(1)))));
    }

    #[test]
    fn lemma_one_chain() {
        let eq = gke(FunctionSpec::Abstract);
        assert_eq!(symmetry_from_density(&eq, &rho3()), eq.rhs().clone());
        assert!(symmetry_from_density(&eq, &JetExpr::u()).is_zero());
    }

    #[test]
    fn off_equation_identity() {
        let eq = gke(FunctionSpec::Abstract);
        let rho = rho3();
        let sigma = reconstruct_flux(&eq, &rho).unwrap();
        assert!(characteristic_identity_residual(&eq, &rho, &sigma).is_zero());
        let u2 = &JetExpr::u() * &JetExpr::u();
        let s2 = reconstruct_flux(&eq, &u2).unwrap();
        assert!(characteristic_identity_residual(&eq, &u2, &s2).is_zero());
    }

    #[test]
    fn ranks() {
        let eq = gke(FunctionSpec::Abstract);
        assert_eq!(rank_of(&eq, &PsdSeries::one()).unwrap(), Rank::Unbounded);
        assert_eq!(rank_of(&eq, &frechet_hat(&j(1))).unwrap(), Rank::Exactly(5));
        let r = rank_of(&eq, &frechet_hat(eq.rhs())).unwrap();
        assert!(r.at_least(9));
        let res = formal_symmetry_residual(&eq, &frechet_hat(eq.rhs()));
        assert!(res.degree() <= Degree::Finite(1));
    }
}
