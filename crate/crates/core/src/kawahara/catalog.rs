use std::fmt;

use crate::error::Result;
use crate::expr::{FunctionSpec, JetExpr};
use crate::jet::{total_t, total_x, EvolutionEquation};
use crate::symmetry::{conservation_residual, reconstruct_flux, symmetry_residual, DensityFluxPair, SymmetryCharacteristic};

use super::{gke, GKESpec};

/// Where a catalog entry is claimed to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Any nonconstant `f`.
    Abstract,
    /// `f = αu + β`.
    Linear,
    /// `f = γ ln(u + c) + δ`.
    Log,
}

impl Domain {
    pub fn spec(&self) -> FunctionSpec {
        let p = JetExpr::param;
        match self {
            Domain::Abstract => FunctionSpec::Abstract,
            Domain::Linear => FunctionSpec::linear(p("alpha"), p("beta")),
            Domain::Log => FunctionSpec::log_shift(p("gamma"), p("delta"), "c"),
        }
    }

    pub fn equation(&self) -> EvolutionEquation {
        gke(&GKESpec::new(self.spec())).expect("catalog domains have nonconstant f")
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Abstract => "f(u) arbitrary",
            Domain::Linear => "f = alpha*u + beta",
            Domain::Log => "f = gamma*ln(u + c) + delta",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogSymmetry {
    pub label: &'static str,
    pub domain: Domain,
    /// As printed, before `f` is specialized.
    pub q: JetExpr,
    pub characteristic: SymmetryCharacteristic,
    pub residual: JetExpr,
}

impl CatalogSymmetry {
    pub fn verified(&self) -> bool {
        self.residual.is_zero()
    }
}

/// A printed flux against the reconstructed one.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxDiff {
    pub label: &'static str,
    pub printed: JetExpr,
    /// Reconstructed on the domain, or with `f = αu` when `ρ` is not
    /// conserved on its whole domain.
    pub reconstructed: Option<JetExpr>,
    /// `printed − reconstructed`.
    pub difference: Option<JetExpr>,
    /// `D_t(ρ) − D_x(printed)` on the entry's domain.
    pub printed_residual: JetExpr,
    /// The same residual with `f = αu`.
    pub printed_residual_alpha_u: JetExpr,
    /// `k` with `D_x(printed) = k·D_t(ρ)` for `f = αu`, when `k ≠ 1` is a
    /// nonzero rational: the printed flux belongs to `kρ`.
    pub density_scale: Option<JetExpr>,
}

impl FluxDiff {
    pub fn printed_is_valid(&self) -> bool {
        self.printed_residual.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogDensity {
    pub label: &'static str,
    pub domain: Domain,
    pub rho: JetExpr,
    pub pair: Result<DensityFluxPair>,
    pub printed_flux: FluxDiff,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub symmetries: Vec<CatalogSymmetry>,
    pub densities: Vec<CatalogDensity>,
}

fn j(i: u32) -> JetExpr {
    JetExpr::jet(i)
}

fn p(name: &str) -> JetExpr {
    JetExpr::param(name)
}

fn q(n: i64, d: i64) -> JetExpr {
    JetExpr::ratio(n, d)
}

fn prod(factors: &[&JetExpr]) -> JetExpr {
    factors.iter().fold(JetExpr::one(), |acc, f| &acc * *f)
}

fn sum(terms: &[JetExpr]) -> JetExpr {
    terms.iter().cloned().sum()
}

fn f(k: i32) -> JetExpr {
    JetExpr::fn_sym("f", k)
}

pub(crate) fn q1() -> JetExpr {
    GKESpec::new(FunctionSpec::Abstract).rhs()
}

pub(crate) fn q3() -> JetExpr {
    &(&JetExpr::t() * &j(1)) + &p("alpha").recip().expect("nonzero")
}

pub(crate) fn q4() -> JetExpr {
    let w = &JetExpr::u() + &p("c");
    &(&JetExpr::t() * &j(1)) + &w.checked_div(&p("gamma")).expect("nonzero")
}

pub(crate) fn rho3() -> JetExpr {
    let b = p("b");
    let e = &prod(&[&j(2), &j(2)]) - &prod(&[&b, &j(1), &j(1)]);
    &(&e * &q(1, 2)) + &f(-2)
}

/// `xu + αtu²/2` as printed.
pub(crate) fn rho4() -> JetExpr {
    let u = JetExpr::u();
    &prod(&[&JetExpr::x(), &u]) + &prod(&[&q(1, 2), &p("alpha"), &JetExpr::t(), &u, &u])
}

fn printed_sigma(label: &str) -> JetExpr {
    let (u, b, x, t, alpha) = (JetExpr::u(), p("b"), JetExpr::x(), JetExpr::t(), p("alpha"));
    let r = f(-1);
    match label {
        "rho1" => sum(&[prod(&[&q(1, 2), &f(1), &u, &u]), prod(&[&j(2), &b]), j(4)]),
        "rho2" => sum(&[
            prod(&[&u, &j(4)]),
            -&prod(&[&j(3), &j(1)]),
            prod(&[&q(1, 2), &j(2), &j(2)]),
            prod(&[&b, &u, &j(2)]),
            -&prod(&[&q(1, 2), &b, &j(1), &j(1)]),
            prod(&[&q(1, 3), &f(1), &u, &u, &u]),
        ]),
        "rho3" => sum(&[
            -&prod(&[&f(0), &b, &j(1), &j(1)]),
            prod(&[&f(1), &j(1), &j(1), &j(2)]),
            -&prod(&[&b, &b, &j(1), &j(3)]),
            prod(&[&q(1, 2), &b, &b, &j(2), &j(2)]),
            prod(&[&r, &b, &j(2)]),
            -&prod(&[&f(0), &j(1), &j(3)]),
            prod(&[&f(0), &j(2), &j(2)]),
            prod(&[&JetExpr::int(2), &b, &j(4), &j(2)]),
            -&prod(&[&b, &j(5), &j(1)]),
            -&prod(&[&b, &j(3), &j(3)]),
            prod(&[&q(1, 2), &r, &r]),
            prod(&[&r, &j(4)]),
            prod(&[&q(1, 2), &j(4), &j(4)]),
            -&prod(&[&j(5), &j(3)]),
            prod(&[&j(2), &j(6)]),
        ]),
        "rho4" => {
            let inner = sum(&[
                prod(&[&JetExpr::int(-3), &b, &j(1), &j(1)]),
                prod(&[&JetExpr::int(6), &b, &u, &j(2)]),
                prod(&[&JetExpr::int(6), &j(4), &u]),
                prod(&[&JetExpr::int(-6), &j(3), &j(1)]),
                prod(&[&JetExpr::int(3), &j(2), &j(2)]),
            ]);
            let bracket = &(&inner * &t) + &prod(&[&JetExpr::int(3), &x, &u, &u]);
            sum(&[
                prod(&[&q(1, 6), &alpha, &bracket]),
                prod(&[&q(1, 2), &alpha, &alpha, &t, &u, &u, &u]),
                prod(&[&JetExpr::int(3), &b, &(&(&x * &j(2)) - &j(1))]),
                prod(&[&x, &j(4)]),
                -&j(3),
            ])
        }
        _ => unreachable!("no printed flux for {label}"),
    }
}

/// `f = αu`.
fn alpha_u() -> FunctionSpec {
    FunctionSpec::linear(p("alpha"), JetExpr::zero())
}

fn flux_diff(label: &'static str, domain: Domain, rho: &JetExpr, pair: &Result<DensityFluxPair>) -> FluxDiff {
    let eq = domain.equation();
    let printed = eq.spec().specialize(&printed_sigma(label));
    let lin = gke(&GKESpec::new(alpha_u())).expect("alpha is nonzero");
    let rho_lin = lin.spec().specialize(rho);
    let printed_lin = lin.spec().specialize(&printed_sigma(label));
    let reconstructed = match pair {
        Ok(p) => Some(p.sigma.clone()),
        Err(_) => reconstruct_flux(&lin, &rho_lin).ok(),
    };
    let difference = reconstructed.as_ref().map(|s| match pair {
        Ok(_) => &printed - s,
        Err(_) => &printed_lin - s,
    });
    let printed_residual = conservation_residual(&eq, rho, &printed);
    let printed_residual_alpha_u = conservation_residual(&lin, &rho_lin, &printed_lin);
    let density_scale = total_x(&printed_lin)
        .checked_div(&total_t(&rho_lin, &lin))
        .ok()
        .filter(|k| k.as_rational().is_some_and(|c| !num_traits::Zero::is_zero(&c) && !num_traits::One::is_one(&c)));
    FluxDiff { label, printed, reconstructed, difference, printed_residual, printed_residual_alpha_u, density_scale }
}

/// The known symmetries and conservation laws with their verification
/// against the equation of their domain.
pub fn catalog() -> Catalog {
    let sym = |label: &'static str, domain: Domain, q: JetExpr| {
        let eq = domain.equation();
        let residual = symmetry_residual(&eq, &q);
        let characteristic = SymmetryCharacteristic::new(label, eq.spec().specialize(&q));
        CatalogSymmetry { label, domain, q, characteristic, residual }
    };
    let symmetries = vec![
        sym("Q1", Domain::Abstract, q1()),
        sym("Q2", Domain::Abstract, j(1)),
        sym("Q3", Domain::Linear, q3()),
        sym("Q4", Domain::Log, q4()),
    ];
    let dens = |label: &'static str, domain: Domain, rho: JetExpr| {
        let eq = domain.equation();
        let rho_s = eq.spec().specialize(&rho);
        let pair = DensityFluxPair::reconstruct(&eq, rho_s.clone());
        let printed_flux = flux_diff(label, domain, &rho_s, &pair);
        CatalogDensity { label, domain, rho, pair, printed_flux }
    };
    let u = JetExpr::u();
    let densities = vec![
        dens("rho1", Domain::Abstract, u.clone()),
        dens("rho2", Domain::Abstract, &u * &u),
        dens("rho3", Domain::Abstract, rho3()),
        dens("rho4", Domain::Linear, rho4()),
    ];
    Catalog { symmetries, densities }
}

impl Catalog {
    /// Every expression of the catalog with a name, for round-trip checks.
    pub fn expressions(&self) -> Vec<(String, JetExpr)> {
        let mut out = Vec::new();
        for s in &self.symmetries {
            out.push((s.label.to_string(), s.q.clone()));
        }
        for d in &self.densities {
            out.push((d.label.to_string(), d.rho.clone()));
            out.push((format!("{}.printed_flux", d.label), printed_sigma(d.label)));
            if let Ok(p) = &d.pair {
                out.push((format!("{}.flux", d.label), p.sigma.clone()));
                out.push((format!("{}.characteristic", d.label), p.characteristic.clone()));
            }
        }
        out
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn symmetries_verify_on_their_domains() {
        let c = catalog();
        for s in &c.symmetries {
            assert!(s.verified(), "{} residual {}", s.label, s.residual);
        }
        assert_eq!(c.symmetries[3].characteristic.q.to_string(), "t*u_x + u/gamma + c/gamma");
    }

    #[test]
    fn densities_and_printed_fluxes() {
        let c = catalog();
        for d in &c.densities[..3] {
            let pair = d.pair.as_ref().unwrap();
            assert!(pair.verified, "{}", d.label);
        }
        // xu + αtu²/2 needs βtu as well when β ≠ 0
        assert_eq!(c.densities[3].pair, Err(Error::NotConserved));
        let fd: Vec<&FluxDiff> = c.densities.iter().map(|d| &d.printed_flux).collect();
        // the printed fluxes take f = alpha*u
        assert!(!fd[0].printed_is_valid());
        assert!(fd[0].printed_residual_alpha_u.is_zero());
        // the printed flux of u^2 is the flux of u^2/2
        assert_eq!(fd[1].density_scale, Some(JetExpr::ratio(1, 2)));
        assert!(fd[2].printed_is_valid());
        assert_eq!(fd[2].difference, Some(JetExpr::zero()));
        // two printed coefficients of the xu flux are off
        let d4 = fd[3].difference.as_ref().unwrap();
        assert_eq!(d4.to_string(), "2*b*x*u_xx - 2*b*u_x + alpha^2*t*u^3/6");
    }
}
