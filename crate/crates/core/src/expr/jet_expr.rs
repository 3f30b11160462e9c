use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::generator::Generator;
use super::poly::{gcd, Coeff, Monomial, Poly};
use crate::error::{Error, Result};

/// Canonical quotient of two polynomials over ℚ in the jet generators.
///
/// The numerator and denominator are coprime and the denominator has coprime
/// integer coefficients with a positive leading coefficient; a constant
/// denominator is exactly `1`. Two values are equal on this class iff they are
/// structurally equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JetExpr {
    num: Poly,
    den: Poly,
}

impl Default for JetExpr {
    fn default() -> Self {
        JetExpr::zero()
    }
}

impl JetExpr {
    pub fn zero() -> Self {
        JetExpr { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        JetExpr::from_poly(Poly::one())
    }

    pub fn from_poly(num: Poly) -> Self {
        JetExpr { num, den: Poly::one() }
    }

    pub fn int(n: i64) -> Self {
        JetExpr::rational(Coeff::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        JetExpr::rational(Coeff::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn rational(c: Coeff) -> Self {
        JetExpr::from_poly(Poly::constant(c))
    }

    pub fn gen(g: Generator) -> Self {
        JetExpr::from_poly(Poly::var(g))
    }

    pub fn x() -> Self {
        JetExpr::gen(Generator::IndepX)
    }

    pub fn t() -> Self {
        JetExpr::gen(Generator::IndepT)
    }

    pub fn u() -> Self {
        JetExpr::jet(0)
    }

    pub fn jet(i: u32) -> Self {
        JetExpr::gen(Generator::Jet(i))
    }

    pub fn param(name: &str) -> Self {
        JetExpr::gen(Generator::param(name))
    }

    pub fn fn_sym(name: &str, order: i32) -> Self {
        JetExpr::gen(Generator::fn_sym(name, order))
    }

    pub fn unknown_t(name: &str, order: u32) -> Self {
        JetExpr::gen(Generator::unknown_t(name, order))
    }

    /// Builds `num / den` in canonical form.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(JetExpr::zero());
        }
        if let Some(c) = den.as_constant() {
            let inv = c.recip();
            return Ok(JetExpr::from_poly(num.scale(&inv)));
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Ok(JetExpr::normalized_den(num, den))
    }

    /// Assumes `num` and `den` are already coprime.
    fn normalized_den(num: Poly, den: Poly) -> Self {
        if let Some(c) = den.as_constant() {
            let inv = c.recip();
            return JetExpr::from_poly(num.scale(&inv));
        }
        let k = den.integer_normalizer();
        if k.is_one() {
            JetExpr { num, den }
        } else {
            JetExpr { num: num.scale(&k), den: den.scale(&k) }
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The value when the expression is a rational constant.
    pub fn as_rational(&self) -> Option<Coeff> {
        if !self.den.is_one() {
            return None;
        }
        if self.num.is_zero() {
            return Some(Coeff::zero());
        }
        self.num.as_constant().cloned()
    }

    pub fn generators(&self) -> BTreeSet<Generator> {
        let mut g = self.num.generators();
        g.extend(self.den.generators());
        g
    }

    pub fn contains(&self, g: &Generator) -> bool {
        self.num.contains(g) || self.den.contains(g)
    }

    pub fn contains_any(&self, pred: impl Fn(&Generator) -> bool) -> bool {
        self.num.contains_any(&pred) || self.den.contains_any(&pred)
    }

    /// Highest `i` with `Jet(i)` present.
    pub fn max_jet(&self) -> Option<u32> {
        self.generators()
            .iter()
            .filter_map(|g| match g {
                Generator::Jet(i) => Some(*i),
                _ => None,
            })
            .max()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(JetExpr::normalized_den(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &JetExpr) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        if c.is_zero() {
            return JetExpr::zero();
        }
        JetExpr { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&Coeff::from_integer(BigInt::from(n)))
    }

    pub fn powi(&self, e: i32) -> Result<Self> {
        if e >= 0 {
            let e = e as u32;
            Ok(JetExpr { num: self.num.pow(e), den: self.den.pow(e) })
        } else {
            self.recip()?.powi(-e)
        }
    }

    /// Formal partial derivative treating every generator as an independent
    /// coordinate (no chain rule through `f(u)`).
    pub fn partial(&self, g: &Generator) -> Self {
        let dn = self.num.partial(g);
        if self.den.is_one() {
            return JetExpr::from_poly(dn);
        }
        let dd = self.den.partial(g);
        if dd.is_zero() {
            return JetExpr::from_parts(dn, self.den.clone()).expect("nonzero denominator");
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        JetExpr::from_parts(num, self.den.pow(2)).expect("nonzero denominator")
    }

    /// Applies the derivation determined by the images of the generators.
    ///
    /// `image` returns `None` for generators mapped to zero.
    pub fn derive_with(&self, mut image: impl FnMut(&Generator) -> Option<JetExpr>) -> Self {
        let mut images: BTreeMap<Generator, Option<JetExpr>> = BTreeMap::new();
        for g in self.generators() {
            let img = image(&g);
            images.insert(g, img);
        }
        let d_poly = |p: &Poly| -> JetExpr {
            let mut poly_part = Poly::zero();
            let mut rational_part = JetExpr::zero();
            for g in p.generators() {
                let Some(Some(img)) = images.get(&g) else { continue };
                let dp = p.partial(&g);
                if img.den.is_one() {
                    poly_part = &poly_part + &(&dp * &img.num);
                } else {
                    rational_part = &rational_part + &(&JetExpr::from_poly(dp) * img);
                }
            }
            &JetExpr::from_poly(poly_part) + &rational_part
        };
        let dn = d_poly(&self.num);
        if self.den.is_one() {
            return dn;
        }
        let dd = d_poly(&self.den);
        let den = JetExpr::from_poly(self.den.clone());
        let num = JetExpr::from_poly(self.num.clone());
        let top = &(&dn * &den) - &(&num * &dd);
        top.checked_div(&(&den * &den)).expect("nonzero denominator")
    }

    /// Replaces generators simultaneously; `value` returns `None` to keep a
    /// generator as is.
    pub fn substitute_with(
        &self,
        mut value: impl FnMut(&Generator) -> Option<JetExpr>,
    ) -> Result<Self> {
        let mut table: BTreeMap<Generator, JetExpr> = BTreeMap::new();
        for g in self.generators() {
            if let Some(v) = value(&g) {
                table.insert(g, v);
            }
        }
        if table.is_empty() {
            return Ok(self.clone());
        }
        let eval = |p: &Poly| -> Result<JetExpr> {
            let mut kept = Poly::zero();
            let mut replaced = JetExpr::zero();
            let mut pow_cache: BTreeMap<(Generator, u32), JetExpr> = BTreeMap::new();
            for (m, c) in p.terms() {
                if !m.factors().iter().any(|(g, _)| table.contains_key(g)) {
                    kept = &kept + &Poly::term(c.clone(), m.clone());
                    continue;
                }
                let (hit, rest) = m.split(|g| table.contains_key(g));
                let mut term = JetExpr::from_poly(Poly::term(c.clone(), rest));
                for (g, e) in hit.factors() {
                    let key = (g.clone(), *e);
                    if !pow_cache.contains_key(&key) {
                        let pw = table[g].powi(*e as i32)?;
                        pow_cache.insert(key.clone(), pw);
                    }
                    term = &term * &pow_cache[&key];
                }
                replaced = &replaced + &term;
            }
            Ok(&JetExpr::from_poly(kept) + &replaced)
        };
        let n = eval(&self.num)?;
        if self.den.is_one() {
            return Ok(n);
        }
        let d = eval(&self.den)?;
        n.checked_div(&d)
    }

    /// Coefficients with respect to the monomials in the generators selected
    /// by `pred`, after clearing the denominator when it is free of them.
    ///
    /// Returns `None` when the denominator involves a selected generator.
    pub fn coefficients_wrt(
        &self,
        pred: impl Fn(&Generator) -> bool,
    ) -> Option<BTreeMap<Monomial, JetExpr>> {
        if self.den.contains_any(&pred) {
            return None;
        }
        Some(
            self.num
                .coefficients_wrt(&pred)
                .into_iter()
                .map(|(m, c)| {
                    let e = JetExpr::from_parts(c, self.den.clone()).expect("nonzero denominator");
                    (m, e)
                })
                .collect(),
        )
    }
}

impl From<Generator> for JetExpr {
    fn from(g: Generator) -> Self {
        JetExpr::gen(g)
    }
}

impl From<i64> for JetExpr {
    fn from(n: i64) -> Self {
        JetExpr::int(n)
    }
}

impl<'a> Add<&'a JetExpr> for &'a JetExpr {
    type Output = JetExpr;
    fn add(self, rhs: &'a JetExpr) -> JetExpr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return JetExpr::from_poly(num);
            }
            return JetExpr::from_parts(num, self.den.clone()).expect("nonzero denominator");
        }
        let g = gcd(&self.den, &rhs.den);
        let a_co = self.den.div_exact(&g).expect("gcd divides");
        let b_co = rhs.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &b_co) + &(&rhs.num * &a_co);
        let den = &self.den * &b_co;
        JetExpr::from_parts(num, den).expect("nonzero denominator")
    }
}

impl<'a> Sub<&'a JetExpr> for &'a JetExpr {
    type Output = JetExpr;
    fn sub(self, rhs: &'a JetExpr) -> JetExpr {
        self + &(-rhs)
    }
}

impl Neg for &JetExpr {
    type Output = JetExpr;
    fn neg(self) -> JetExpr {
        JetExpr { num: -&self.num, den: self.den.clone() }
    }
}

impl<'a> Mul<&'a JetExpr> for &'a JetExpr {
    type Output = JetExpr;
    fn mul(self, rhs: &'a JetExpr) -> JetExpr {
        if self.is_zero() || rhs.is_zero() {
            return JetExpr::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return JetExpr::from_poly(&self.num * &rhs.num);
        }
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = rhs.den.div_exact(&g1).expect("gcd divides");
        let n2 = rhs.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        JetExpr::normalized_den(&n1 * &n2, &d1 * &d2)
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<JetExpr> for JetExpr {
            type Output = JetExpr;
            fn $m(self, rhs: JetExpr) -> JetExpr { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a JetExpr> for JetExpr {
            type Output = JetExpr;
            fn $m(self, rhs: &'a JetExpr) -> JetExpr { (&self).$m(rhs) }
        }
        impl<'a> $tr<JetExpr> for &'a JetExpr {
            type Output = JetExpr;
            fn $m(self, rhs: JetExpr) -> JetExpr { self.$m(&rhs) }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for JetExpr {
    type Output = JetExpr;
    fn neg(self) -> JetExpr {
        -&self
    }
}

impl std::iter::Sum for JetExpr {
    fn sum<I: Iterator<Item = JetExpr>>(iter: I) -> JetExpr {
        iter.fold(JetExpr::zero(), |a, b| &a + &b)
    }
}

impl Zero for JetExpr {
    fn zero() -> Self {
        JetExpr::zero()
    }
    fn is_zero(&self) -> bool {
        JetExpr::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> JetExpr {
        JetExpr::u()
    }
    fn ux() -> JetExpr {
        JetExpr::jet(1)
    }

    #[test]
    fn like_terms_collect() {
        assert_eq!(&ux() + &ux(), ux().scale_int(2));
    }

    #[test]
    fn polynomial_cancellation() {
        let num = &(&u() * &u()) - &(&ux() * &ux());
        let den = &u() - &ux();
        assert_eq!(num.checked_div(&den).unwrap(), &u() + &ux());
    }

    #[test]
    fn division_by_zero() {
        let z = &u() - &u();
        assert_eq!(ux().checked_div(&z), Err(Error::DivisionByZero));
    }

    #[test]
    fn commuted_products_vanish() {
        assert!((&(&u() * &ux()) - &(&ux() * &u())).is_zero());
    }

    #[test]
    fn independent_generators_do_not_cancel() {
        let f = JetExpr::fn_sym("f", 0);
        let fp = JetExpr::fn_sym("f", 1);
        assert!(!(&(&fp * &u()) - &f).is_zero());
    }

    #[test]
    fn denominators_are_primitive_and_positive() {
        let c = JetExpr::param("c");
        let e = JetExpr::int(3).checked_div(&(&u() + &c).scale_int(-6)).unwrap();
        assert_eq!(e, JetExpr::ratio(-1, 2).checked_div(&(&u() + &c)).unwrap());
        let (_, lc) = e.denominator().leading().unwrap();
        assert!(lc.is_one());
    }

    #[test]
    fn partial_of_quotient() {
        let c = JetExpr::param("c");
        let e = JetExpr::one().checked_div(&(&u() + &c)).unwrap();
        let d = e.partial(&Generator::Jet(0));
        let expect = JetExpr::int(-1).checked_div(&(&u() + &c).powi(2).unwrap()).unwrap();
        assert_eq!(d, expect);
    }

    #[test]
    fn substitution_of_parameters() {
        let a = JetExpr::param("a");
        let e = &(&a * &u()) + &JetExpr::one().checked_div(&a).unwrap();
        let s = e
            .substitute_with(|g| (*g == Generator::param("a")).then(|| JetExpr::int(2)))
            .unwrap();
        assert_eq!(s, &u().scale_int(2) + &JetExpr::ratio(1, 2));
    }
}
