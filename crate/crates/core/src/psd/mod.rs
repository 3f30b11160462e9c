//! Formal Laurent series in `ξ` with differential-function coefficients,
//! multiplied by the generalized Leibniz rule
//! `aξ^i ∘ bξ^j = a Σ_k C(i,k) D_x^k(b) ξ^{i+j−k}`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::expr::{Coeff, JetExpr};
use crate::jet::{jet_partial, order, total_x, Order};

/// Coefficient slots kept when a product has no exact finite expansion.
pub const DEFAULT_PRECISION: usize = 20;

/// `DEFAULT_PRECISION`, or the value of `JETCALC_PRECISION` when it parses.
pub fn default_precision() -> usize {
    std::env::var("JETCALC_PRECISION")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
        .unwrap_or(DEFAULT_PRECISION)
}

/// Degree of a series; `NegInfinity` for the zero series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(i64),
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => f.write_str("-inf"),
            Degree::Finite(n) => write!(f, "{n}"),
        }
    }
}

/// `Σ a_i ξ^i`, known exactly at every exponent `≥ floor`.
///
/// `floor = None` means the series is an exact finite sum. Only nonzero
/// coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsdSeries {
    coeffs: BTreeMap<i64, JetExpr>,
    floor: Option<i64>,
}

impl Default for PsdSeries {
    fn default() -> Self {
        PsdSeries::zero()
    }
}

/// `i(i−1)⋯(i−k+1)/k!`.
fn binomial(i: i64, k: u32) -> Coeff {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for m in 0..k as i64 {
        num *= BigInt::from(i - m);
        den *= BigInt::from(m + 1);
    }
    Coeff::new(num, den)
}

fn max_floor(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Memoized `D_x^k(b)`.
struct DxTower(Vec<JetExpr>);

impl DxTower {
    fn new(b: &JetExpr) -> Self {
        DxTower(vec![b.clone()])
    }

    fn get(&mut self, k: usize) -> &JetExpr {
        while self.0.len() <= k {
            let next = total_x(self.0.last().expect("nonempty"));
            self.0.push(next);
        }
        &self.0[k]
    }
}

impl PsdSeries {
    pub fn zero() -> Self {
        PsdSeries { coeffs: BTreeMap::new(), floor: None }
    }

    pub fn one() -> Self {
        PsdSeries::constant(JetExpr::one())
    }

    pub fn constant(c: JetExpr) -> Self {
        PsdSeries::monomial(c, 0)
    }

    /// `ξ^k`.
    pub fn xi(k: i64) -> Self {
        PsdSeries::monomial(JetExpr::one(), k)
    }

    /// `c ξ^k`.
    pub fn monomial(c: JetExpr, k: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        PsdSeries { coeffs, floor: None }
    }

    /// Exact finite sum of `(exponent, coefficient)` pairs.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, JetExpr)>) -> Self {
        let mut s = PsdSeries::zero();
        for (k, c) in terms {
            s = &s + &PsdSeries::monomial(c, k);
        }
        s
    }

    /// Same terms, with everything below `floor` declared unknown.
    pub fn truncated(&self, floor: i64) -> Self {
        let floor = self.floor.map_or(floor, |f| f.max(floor));
        let coeffs = self.coeffs.range(floor..).map(|(k, c)| (*k, c.clone())).collect();
        PsdSeries { coeffs, floor: Some(floor) }
    }

    /// Keeps `n` slots counting down from the leading exponent.
    pub fn with_precision(&self, n: usize) -> Self {
        match self.leading_exponent() {
            Some(d) => self.truncated(d - n as i64 + 1),
            None => self.clone(),
        }
    }

    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn is_exact(&self) -> bool {
        self.floor.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn leading_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn degree(&self) -> Degree {
        self.leading_exponent().map_or(Degree::NegInfinity, Degree::Finite)
    }

    /// Highest exponent that may be nonzero: the degree, or just below the
    /// floor for a series known to vanish down to it.
    fn top(&self) -> Option<i64> {
        self.leading_exponent().or(self.floor.map(|f| f - 1))
    }

    /// Number of guaranteed coefficient slots counted from the degree.
    pub fn precision(&self) -> Option<usize> {
        match (self.top(), self.floor) {
            (Some(t), Some(f)) => Some((t - f + 1).max(0) as usize),
            _ => None,
        }
    }

    /// Coefficient of `ξ^k`; `InsufficientPrecision` below the floor.
    pub fn coeff(&self, k: i64) -> Result<JetExpr> {
        if let Some(f) = self.floor {
            if k < f {
                return Err(Error::InsufficientPrecision { needed: k, available: f });
            }
        }
        Ok(self.coeffs.get(&k).cloned().unwrap_or_else(JetExpr::zero))
    }

    /// Nonzero known coefficients, highest exponent first.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &JetExpr)> {
        self.coeffs.iter().rev().map(|(k, c)| (*k, c))
    }

    pub fn leading_coeff(&self) -> Option<&JetExpr> {
        self.coeffs.values().next_back()
    }

    /// Applies `op` to every coefficient.
    pub fn map_coeffs(&self, mut op: impl FnMut(&JetExpr) -> JetExpr) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, c)| (*k, op(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        PsdSeries { coeffs, floor: self.floor }
    }

    /// Left multiplication by a function, `c ∘ A`.
    pub fn scale(&self, c: &JetExpr) -> Self {
        self.map_coeffs(|a| c * a)
    }

    /// `A ∘ B` with the default precision.
    pub fn compose(&self, other: &PsdSeries) -> PsdSeries {
        self.compose_prec(other, default_precision())
    }

    /// `A ∘ B` keeping `n` slots below `deg A + deg B` when the product has no
    /// exact finite expansion.
    pub fn compose_prec(&self, other: &PsdSeries, n: usize) -> PsdSeries {
        let (Some(ta), Some(tb)) = (self.top(), other.top()) else {
            return PsdSeries::zero();
        };
        let mut floor = max_floor(self.floor.map(|f| f + tb), other.floor.map(|f| ta + f));
        let infinite = self.coeffs.keys().any(|i| *i < 0);
        if floor.is_some() || infinite {
            floor = max_floor(floor, Some(ta + tb - n as i64 + 1));
        }
        self.compose_to(other, floor)
    }

    /// Product computed at every exponent `≥ floor` (all exponents when
    /// `floor` is `None`, which requires `A` to have no negative powers).
    fn compose_to(&self, other: &PsdSeries, floor: Option<i64>) -> PsdSeries {
        self.compose_window(other, floor, None)
    }

    /// Product restricted to exponents in `[floor, ceil]`.
    fn compose_window(&self, other: &PsdSeries, floor: Option<i64>, ceil: Option<i64>) -> PsdSeries {
        let mut acc: BTreeMap<i64, JetExpr> = BTreeMap::new();
        for (j, b) in &other.coeffs {
            let mut tower = DxTower::new(b);
            for (i, a) in &self.coeffs {
                let mut k: u32 = 0;
                loop {
                    let e = i + j - k as i64;
                    if floor.is_some_and(|f| e < f) || (*i >= 0 && k as i64 > *i) {
                        break;
                    }
                    assert!(floor.is_some() || *i >= 0, "infinite expansion needs a floor");
                    if ceil.is_some_and(|c| e > c) {
                        k += 1;
                        continue;
                    }
                    let dk = tower.get(k as usize);
                    if !dk.is_zero() {
                        let term = (a * dk).scale(&binomial(*i, k));
                        let slot = acc.entry(e).or_insert_with(JetExpr::zero);
                        *slot = &*slot + &term;
                    } else if k > 0 {
                        break;
                    }
                    k += 1;
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        PsdSeries { coeffs: acc, floor }
    }

    /// Exact coefficient of `ξ^e` in `A ∘ B`.
    pub fn product_coeff(&self, other: &PsdSeries, e: i64) -> Result<JetExpr> {
        let (Some(ta), Some(tb)) = (self.top(), other.top()) else {
            return Ok(JetExpr::zero());
        };
        if let Some(f) = max_floor(self.floor.map(|f| f + tb), other.floor.map(|f| ta + f)) {
            if e < f {
                return Err(Error::InsufficientPrecision { needed: e, available: f });
            }
        }
        Ok(self.compose_window(other, Some(e), Some(e)).coeff(e).expect("window holds e"))
    }

    /// `[A, B] = A∘B − B∘A`.
    pub fn commutator(&self, other: &PsdSeries) -> PsdSeries {
        self.commutator_prec(other, default_precision())
    }

    pub fn commutator_prec(&self, other: &PsdSeries, n: usize) -> PsdSeries {
        &self.compose_prec(other, n) - &other.compose_prec(self, n)
    }

    /// `A* = Σ (−ξ)^i ∘ a_i`.
    pub fn adjoint(&self) -> PsdSeries {
        self.adjoint_prec(default_precision())
    }

    pub fn adjoint_prec(&self, n: usize) -> PsdSeries {
        let infinite = self.coeffs.keys().any(|i| *i < 0);
        let floor = match (self.floor, self.top()) {
            (Some(f), _) => Some(f),
            (None, Some(t)) if infinite => Some(t - n as i64 + 1),
            _ => None,
        };
        let mut out = PsdSeries { coeffs: BTreeMap::new(), floor };
        for (i, a) in &self.coeffs {
            let sign = if i.rem_euclid(2) == 0 { JetExpr::one() } else { JetExpr::int(-1) };
            let xi = PsdSeries::monomial(sign, *i);
            out = &out + &xi.compose_to(&PsdSeries::constant(a.clone()), floor);
        }
        out
    }

    /// `A^k` under composition.
    pub fn power_prec(&self, k: u32, n: usize) -> PsdSeries {
        let mut out = PsdSeries::one();
        for _ in 0..k {
            out = out.compose_prec(self, n);
        }
        out
    }

    /// `R` with `deg R = 1` and `R^n = A`, for `deg A = n > 0`.
    pub fn nth_root(&self, n: u32) -> Result<PsdSeries> {
        self.nth_root_prec(n, default_precision())
    }

    pub fn nth_root_prec(&self, n: u32, prec: usize) -> Result<PsdSeries> {
        if n == 0 || self.degree() != Degree::Finite(n as i64) {
            return Err(Error::Unsupported(format!(
                "n-th root needs a series of degree n = {n}, got degree {}",
                self.degree()
            )));
        }
        let lead = self.leading_coeff().expect("nonzero series");
        let r1 = exact_root(lead, n).ok_or(Error::RootNotInClass(n))?;
        let slots = self.precision().unwrap_or(prec).min(prec).max(1);
        let root_floor = 2 - slots as i64;
        let denom = r1.powi(n as i32 - 1)?.scale_int(n as i64);
        let mut root = PsdSeries::monomial(r1, 1);
        for e in (root_floor..=0).rev() {
            // the ξ^e coefficient of R enters R^n first at ξ^{n-1+e}
            let target = n as i64 - 1 + e;
            // R^k must be exact down to target - (n - k): each later factor
            // has degree 1 and lifts lower terms by at most one
            let mut pow = PsdSeries::one();
            for k in 1..=n {
                pow = pow.compose_to(&root, Some(target - (n - k) as i64));
            }
            let gap = &self.coeff(target)? - &pow.coeff(target)?;
            if !gap.is_zero() {
                root = &root + &PsdSeries::monomial(gap.checked_div(&denom)?, e);
            }
        }
        Ok(root.truncated(root_floor))
    }
}

/// Exact `n`-th root of a leading coefficient, when it is a rational number
/// with rational `n`-th root.
fn exact_root(c: &JetExpr, n: u32) -> Option<JetExpr> {
    let q = c.as_rational()?;
    if q.is_negative() && n.is_multiple_of(2) {
        return None;
    }
    let root_int = |z: &BigInt| -> Option<BigInt> {
        let r = z.abs().nth_root(n);
        (r.pow(n) == z.abs()).then(|| if z.is_negative() { -r } else { r })
    };
    let p = root_int(q.numer())?;
    let d = root_int(q.denom())?;
    Some(JetExpr::rational(Coeff::new(p, d)))
}

impl<'a> std::ops::Add<&'a PsdSeries> for &'a PsdSeries {
    type Output = PsdSeries;
    fn add(self, rhs: &'a PsdSeries) -> PsdSeries {
        let floor = max_floor(self.floor, rhs.floor);
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &rhs.coeffs {
            let slot = coeffs.entry(*k).or_insert_with(JetExpr::zero);
            *slot = &*slot + c;
        }
        coeffs.retain(|k, c| !c.is_zero() && floor.is_none_or(|f| *k >= f));
        PsdSeries { coeffs, floor }
    }
}

impl std::ops::Neg for &PsdSeries {
    type Output = PsdSeries;
    fn neg(self) -> PsdSeries {
        self.map_coeffs(|c| -c)
    }
}

impl<'a> std::ops::Sub<&'a PsdSeries> for &'a PsdSeries {
    type Output = PsdSeries;
    fn sub(self, rhs: &'a PsdSeries) -> PsdSeries {
        self + &(-rhs)
    }
}

/// Symbol `D̂_F = Σ_j ∂F/∂u_{jx} ξ^j`.
pub fn frechet_hat(f: &JetExpr) -> PsdSeries {
    let Order::Finite(n) = order(f) else { return PsdSeries::zero() };
    PsdSeries::from_terms((0..=n).map(|j| (j as i64, jet_partial(f, j))))
}

pub fn degree(a: &PsdSeries) -> Degree {
    a.degree()
}

fn coeff_text(c: &JetExpr) -> (bool, String) {
    let s = c.to_string();
    let single = c.numerator().len() == 1;
    match s.strip_prefix('-') {
        Some(rest) if single => (true, rest.to_string()),
        _ if single => (false, s),
        _ => (false, format!("({s})")),
    }
}

impl fmt::Display for PsdSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (k, c) in self.terms() {
            let (neg, body) = coeff_text(c);
            let xi = match k {
                0 => String::new(),
                1 => "xi".to_string(),
                _ => format!("xi^{k}"),
            };
            let text = match (body.as_str(), xi.is_empty()) {
                (b, true) => b.to_string(),
                ("1", false) => xi,
                (b, false) => format!("{b}*{xi}"),
            };
            parts.push((neg, text));
        }
        if let Some(fl) = self.floor {
            parts.push((false, format!("O(xi^{})", fl - 1)));
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        for (i, (neg, text)) in parts.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{text}")?,
                (0, false) => f.write_str(text)?,
                (_, true) => write!(f, " - {text}")?,
                (_, false) => write!(f, " + {text}")?,
            }
        }
        Ok(())
    }
}

impl Zero for PsdSeries {
    fn zero() -> Self {
        PsdSeries::zero()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.floor.is_none()
    }
}

impl std::ops::Add for PsdSeries {
    type Output = PsdSeries;
    fn add(self, rhs: PsdSeries) -> PsdSeries {
        &self + &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::FunctionSpec;
    use crate::jet::EvolutionEquation;

    fn u() -> JetExpr {
        JetExpr::u()
    }

    fn gke_rhs() -> JetExpr {
        &(&JetExpr::jet(5) + &(&JetExpr::param("b") * &JetExpr::jet(3)))
            + &(&JetExpr::fn_sym("f", 0) * &JetExpr::jet(1))
    }

    #[test]
    fn leibniz_cases() {
        let s = PsdSeries::xi(1).compose(&PsdSeries::constant(u()));
        assert_eq!(s, PsdSeries::from_terms([(1, u()), (0, JetExpr::jet(1))]));
        assert!(s.is_exact());
        let inv = PsdSeries::xi(-1).compose_prec(&PsdSeries::constant(u()), 4);
        assert_eq!(inv.coeff(-1).unwrap(), u());
        assert_eq!(inv.coeff(-2).unwrap(), -&JetExpr::jet(1));
        assert_eq!(inv.coeff(-3).unwrap(), JetExpr::jet(2));
        assert_eq!(inv.coeff(-4).unwrap(), -&JetExpr::jet(3));
        assert!(inv.coeff(-5).is_err());
        let one = PsdSeries::xi(5).compose(&PsdSeries::xi(-5));
        assert_eq!(one, PsdSeries::one());
    }

    #[test]
    fn commutators() {
        let c = PsdSeries::xi(1).commutator(&PsdSeries::constant(u()));
        assert_eq!(c, PsdSeries::constant(JetExpr::jet(1)));
        assert!(PsdSeries::xi(5).commutator(&PsdSeries::xi(3)).is_zero());
        assert_eq!(PsdSeries::xi(1).commutator(&PsdSeries::xi(1)).degree(), Degree::NegInfinity);
        let k = frechet_hat(&gke_rhs());
        let c = k.commutator(&PsdSeries::xi(1));
        let expect = -&k.map_coeffs(total_x);
        assert_eq!(c, expect);
    }

    #[test]
    fn adjoints() {
        let a = PsdSeries::monomial(u(), 1).adjoint();
        assert_eq!(a, PsdSeries::from_terms([(1, -&u()), (0, -&JetExpr::jet(1))]));
        assert_eq!(PsdSeries::xi(2).adjoint(), PsdSeries::xi(2));
        let b = PsdSeries::from_terms([(2, u()), (-1, JetExpr::jet(1))]);
        let bb = b.adjoint_prec(8).adjoint_prec(8);
        assert_eq!(bb, b.truncated(bb.floor().unwrap()));
    }

    #[test]
    fn roots() {
        assert_eq!(PsdSeries::xi(5).nth_root(5).unwrap().terms().count(), 1);
        let a = PsdSeries::from_terms([(2, JetExpr::one()), (1, u().scale_int(2))]);
        let r = a.nth_root_prec(2, 6).unwrap();
        assert_eq!(r.coeff(1).unwrap(), JetExpr::one());
        assert_eq!(r.coeff(0).unwrap(), u());
        let back = r.power_prec(2, 6);
        let fl = back.floor().unwrap();
        assert_eq!(back, a.truncated(fl));

        let k = frechet_hat(&gke_rhs());
        let r = k.nth_root_prec(5, 6).unwrap();
        let fifth = JetExpr::ratio(1, 5);
        assert_eq!(r.coeff(0).unwrap(), JetExpr::zero());
        assert_eq!(r.coeff(-1).unwrap(), &fifth * &JetExpr::param("b"));
        // the fifth power of the root has to give the symbol back
        let back = r.power_prec(5, 6);
        assert_eq!(back, k.truncated(back.floor().unwrap()));
        let two = PsdSeries::constant(JetExpr::int(2)).compose(&PsdSeries::xi(2));
        assert!(matches!(two.nth_root(2), Err(Error::RootNotInClass(2))));
        let four = PsdSeries::monomial(JetExpr::int(4), 2);
        assert_eq!(four.nth_root(2).unwrap().coeff(1).unwrap(), JetExpr::int(2));
    }

    #[test]
    fn odd_roots_invert_powers() {
        let b = PsdSeries::from_terms([(1, JetExpr::one()), (0, u()), (-1, JetExpr::jet(1))]);
        for n in [3, 5] {
            let r = b.power_prec(n, 12).nth_root_prec(n, 8).unwrap();
            assert_eq!(r, b.truncated(r.floor().unwrap()), "n = {n}");
        }
    }

    #[test]
    fn degrees_and_symbols() {
        let s = PsdSeries::from_terms([(3, JetExpr::one()), (1, u())]);
        assert_eq!(degree(&s), Degree::Finite(3));
        assert_eq!(degree(&PsdSeries::zero()), Degree::NegInfinity);
        let eq = EvolutionEquation::new(gke_rhs(), FunctionSpec::Abstract).unwrap();
        let k = frechet_hat(eq.rhs());
        let expect = PsdSeries::from_terms([
            (5, JetExpr::one()),
            (3, JetExpr::param("b")),
            (1, JetExpr::fn_sym("f", 0)),
            (0, &JetExpr::fn_sym("f", 1) * &JetExpr::jet(1)),
        ]);
        assert_eq!(k, expect);
        assert_eq!(frechet_hat(&u()), PsdSeries::one());
        let ux2 = &JetExpr::jet(1) * &JetExpr::jet(1);
        assert_eq!(frechet_hat(&ux2), PsdSeries::monomial(JetExpr::jet(1).scale_int(2), 1));
    }

    #[test]
    fn printing() {
        let s = PsdSeries::from_terms([(5, JetExpr::one()), (1, JetExpr::fn_sym("f", 0)), (0, -&JetExpr::jet(1))]);
        assert_eq!(s.to_string(), "xi^5 + f(u)*xi - u_x");
        let t = PsdSeries::monomial(&u() + &JetExpr::jet(1), -2).truncated(-4);
        assert_eq!(t.to_string(), "(u_x + u)*xi^-2 + O(xi^-5)");
    }
}
