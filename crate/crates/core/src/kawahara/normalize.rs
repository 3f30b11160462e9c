use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::expr::{Coeff, FunctionSpec, Generator, JetExpr, Poly};
use crate::jet::total_x;

use super::GKESpec;

/// The change of variables taking `f = p₂u² + p₁u + p₀` to `f = u²`:
/// `u = w/s − p₁/(2p₂)`, `X = x + p̃₀ t` with `p̃₀ = p₀ − p₁²/(4p₂)` and
/// `s² = p₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticNormalization {
    pub p2: JetExpr,
    pub p1: JetExpr,
    pub p0: JetExpr,
    /// `p₁/(2p₂)`.
    pub shift: JetExpr,
    /// `p̃₀`.
    pub drift: JetExpr,
    /// `s`, a rational number or a fresh parameter.
    pub scale: JetExpr,
    /// Name of the fresh parameter standing for `√p₂`, if one was needed.
    pub scale_param: Option<String>,
}

fn rational_sqrt(q: &Coeff) -> Option<Coeff> {
    if q.is_negative() {
        return None;
    }
    let root = |z: &BigInt| -> Option<BigInt> {
        let r = z.sqrt();
        (&r * &r == *z).then_some(r)
    };
    Some(Coeff::new(root(q.numer())?, root(q.denom())?))
}

/// Normalizes a quadratic `f` to `u²`; errors with `NotQuadratic` unless
/// `f` is a polynomial of degree exactly 2.
pub fn normalize_quadratic_f(spec: &GKESpec) -> Result<(GKESpec, QuadraticNormalization)> {
    let FunctionSpec::Polynomial(c) = &spec.f else { return Err(Error::NotQuadratic) };
    if spec.f.degree() != Some(2) {
        return Err(Error::NotQuadratic);
    }
    let (p0, p1, p2) = (c[0].clone(), c[1].clone(), c[2].clone());
    let shift = p1.checked_div(&p2.scale_int(2))?;
    let drift = &p0 - &(&p1 * &p1).checked_div(&p2.scale_int(4))?;
    let (scale, scale_param) = match p2.as_rational().as_ref().and_then(rational_sqrt) {
        Some(r) => (JetExpr::rational(r), None),
        None => (JetExpr::param("s"), Some("s".to_string())),
    };
    let record = QuadraticNormalization { p2, p1, p0, shift, drift, scale, scale_param };
    Ok((GKESpec::with_b(spec.b.clone(), FunctionSpec::power(2)), record))
}

impl QuadraticNormalization {
    pub fn is_identity(&self) -> bool {
        self.shift.is_zero() && self.drift.is_zero() && self.scale.is_one()
    }

    /// Rewrites powers of the fresh scale parameter with `s² = p₂` and clears
    /// it from denominators.
    pub fn reduce(&self, e: &JetExpr) -> JetExpr {
        let Some(name) = &self.scale_param else { return e.clone() };
        let s = Generator::param(name);
        let split = |p: &Poly| -> (JetExpr, JetExpr) {
            let mut even = JetExpr::zero();
            let mut odd = JetExpr::zero();
            for (k, c) in p.coefficients_in(&s) {
                let term = &JetExpr::from_poly(c) * &self.p2.powi((k / 2) as i32).expect("nonnegative power");
                if k % 2 == 0 {
                    even = &even + &term;
                } else {
                    odd = &odd + &term;
                }
            }
            (even, odd)
        };
        let sv = JetExpr::gen(s.clone());
        let (a, b) = split(e.numerator());
        let (c, d) = split(e.denominator());
        if d.is_zero() {
            return (&a + &(&b * &sv)).checked_div(&c).expect("nonzero denominator");
        }
        let norm = &(&c * &c) - &(&(&d * &d) * &self.p2);
        let even = &(&a * &c) - &(&(&b * &d) * &self.p2);
        let odd = &(&b * &c) - &(&a * &d);
        (&even + &(&odd * &sv)).checked_div(&norm).expect("nonzero norm")
    }

    /// Right-hand side in the new variables: `w_T = s·K − p̃₀ w_X` with
    /// `u = w/s − shift`.
    pub fn transform_rhs(&self, rhs: &JetExpr) -> Result<JetExpr> {
        let u_of_w = &JetExpr::u().checked_div(&self.scale)? - &self.shift;
        let k = crate::expr::substitute(rhs, &Generator::Jet(0), &u_of_w)?;
        let new = &(&self.scale * &k) - &(&self.drift * &total_x(&JetExpr::u()));
        Ok(self.reduce(&new))
    }

    /// A function of the new variables written in the old ones:
    /// `w = s(u + shift)`, `X = x + p̃₀ t`.
    pub fn pull_back(&self, e: &JetExpr) -> Result<JetExpr> {
        let moved = e.substitute_with(|g| {
            (*g == Generator::IndepX).then(|| &JetExpr::x() + &(&self.drift * &JetExpr::t()))
        })?;
        let w_of_u = &self.scale * &(&JetExpr::u() + &self.shift);
        let out = crate::expr::substitute(&moved, &Generator::Jet(0), &w_of_u)?;
        Ok(self.reduce(&out))
    }
}
