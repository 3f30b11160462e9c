use std::collections::BTreeMap;
use std::sync::Arc;

use crate::expr::{d_du, Coeff, Generator, JetExpr, Poly};

use super::total_x;

const U_STRIP_LIMIT: usize = 64;

/// `∫ e d g` for `e` polynomial in `g` with a denominator free of `g`.
fn antiderivative_in(e: &JetExpr, g: &Generator) -> Option<JetExpr> {
    if e.denominator().contains(g) {
        return None;
    }
    let by_power = e.numerator().coefficients_in(g);
    let mut lifted = BTreeMap::new();
    for (k, c) in by_power {
        let c = c.scale(&Coeff::new(1.into(), (k + 1).into()));
        lifted.insert(k + 1, c);
    }
    let num = Poly::from_univariate(g, &lifted);
    Some(JetExpr::from_parts(num, e.denominator().clone()).expect("nonzero denominator"))
}

/// Highest generator of the `f`-tower family present, by canonical order.
fn top_fn_sym(e: &JetExpr) -> Option<Generator> {
    e.generators()
        .into_iter().rfind(|g| matches!(g, Generator::FnSym { .. }))
}

/// `∫ e du` for `e` a Laurent polynomial in `w = u + c` times a polynomial in
/// `L = ln(u + c)`, using `∫ w^k L^m = w^{k+1}L^m/(k+1) − m/(k+1) ∫ w^k L^{m−1}`
/// and `∫ L^m/w = L^{m+1}/(m+1)`.
fn integrate_log(e: &JetExpr, shift: &Arc<str>) -> Option<JetExpr> {
    let log = Generator::Log { shift: shift.clone() };
    if e.contains_any(|g| matches!(g, Generator::Log { shift: s } if s != shift)) {
        return None;
    }
    let c = JetExpr::param(shift);
    let u = JetExpr::u();
    // work in w by shifting u; the log generator now stands for ln(w)
    let shifted = e.substitute_with(|g| (*g == Generator::Jet(0)).then(|| &u - &c)).ok()?;
    let den = shifted.denominator();
    if den.contains(&log) || den.len() != 1 && den.contains(&Generator::Jet(0)) {
        return None;
    }
    let (den_mono, den_coeff) = den.leading().expect("nonzero denominator");
    let d = den_mono.degree_in(&Generator::Jet(0)) as i64;
    let den_rest = JetExpr::from_poly(Poly::term(den_coeff.clone(), den_mono.take(&Generator::Jet(0)).1));
    let w = JetExpr::u();
    let l = JetExpr::gen(log.clone());
    let mut out = JetExpr::zero();
    for (m, coeff) in shifted.numerator().terms() {
        let (k, rest) = m.take(&Generator::Jet(0));
        let (lm, rest) = rest.take(&log);
        let a = JetExpr::from_poly(Poly::term(coeff.clone(), rest));
        out = &out + &(&a * &int_w_log(k as i64 - d, lm, &w, &l));
    }
    let out = out.checked_div(&den_rest).ok()?;
    out.substitute_with(|g| (*g == Generator::Jet(0)).then(|| &u + &c)).ok()
}

/// `c` when the denominator is `(u + c)^k` for a parameter `c`.
fn shift_of_denominator(den: &Poly) -> Option<Arc<str>> {
    let k = den.degree_in(&Generator::Jet(0));
    if k == 0 {
        return None;
    }
    den.generators().into_iter().find_map(|g| match g {
        Generator::Param(name) => {
            let w = &JetExpr::u() + &JetExpr::param(&name);
            let wk = w.powi(k as i32).expect("nonnegative power");
            (wk.numerator() == den).then_some(name)
        }
        _ => None,
    })
}

fn int_w_log(k: i64, m: u32, w: &JetExpr, l: &JetExpr) -> JetExpr {
    let lm = l.powi(m as i32).expect("nonnegative power");
    if k == -1 {
        return (&lm * l).scale(&Coeff::new(1.into(), (m + 1).into()));
    }
    let wk1 = w.powi(k as i32 + 1).expect("w is nonzero");
    let inv = Coeff::new(1.into(), (k + 1).into());
    let head = (&wk1 * &lm).scale(&inv);
    if m == 0 {
        return head;
    }
    let tail = int_w_log(k, m - 1, w, l).scale(&(inv * Coeff::from_integer(m.into())));
    &head - &tail
}

/// `∫ e du`, stripping the `f`-tower from the top as for jets; `None` when the
/// stripping stalls.
fn integrate_u(e: &JetExpr) -> Option<JetExpr> {
    let mut rest = e.clone();
    let mut acc = JetExpr::zero();
    for _ in 0..U_STRIP_LIMIT {
        if rest.is_zero() {
            return Some(acc);
        }
        let Some(top) = top_fn_sym(&rest) else {
            let log = rest
                .generators()
                .into_iter()
                .find_map(|g| match g {
                    Generator::Log { shift } => Some(shift),
                    _ => None,
                })
                .or_else(|| shift_of_denominator(rest.denominator()));
            if let Some(shift) = log {
                return integrate_log(&rest, &shift).map(|p| &acc + &p);
            }
            return antiderivative_in(&rest, &Generator::Jet(0)).map(|p| &acc + &p);
        };
        if rest.contains_any(|g| matches!(g, Generator::Log { .. })) {
            return None;
        }
        let Generator::FnSym { name, order } = &top else { unreachable!() };
        if rest.denominator().contains(&top) || rest.numerator().degree_in(&top) > 1 {
            return None;
        }
        // c·f^(k) = c·∂_u f^(k-1): integrate c in the variable f^(k-1)
        let c = rest.partial(&top);
        let below = Generator::fn_sym(name, order - 1);
        let p = antiderivative_in(&c, &below)?;
        rest = &rest - &d_du(&p);
        acc = &acc + &p;
    }
    None
}

/// Splits `F = D_x(ζ) + residual` by repeated top-order stripping.
///
/// The residual is zero exactly when the stripping finds a preimage. Left-over
/// terms free of `u` that are polynomial in `x` are integrated in `x`, so
/// functions of `t` alone come back as `x·c(t)` rather than as a residual.
pub fn formal_x_integrate(f: &JetExpr) -> (JetExpr, JetExpr) {
    let mut zeta = JetExpr::zero();
    let mut rest = f.clone();
    while let Some(m) = rest.max_jet().filter(|m| *m >= 1) {
        let top = Generator::Jet(m);
        if rest.denominator().contains(&top) || rest.numerator().degree_in(&top) > 1 {
            return (zeta, rest);
        }
        let c = rest.partial(&top);
        let p = if m == 1 { integrate_u(&c) } else { antiderivative_in(&c, &Generator::Jet(m - 1)) };
        let Some(p) = p else { return (zeta, rest) };
        rest = &rest - &total_x(&p);
        zeta = &zeta + &p;
    }
    if rest.is_zero() {
        return (zeta, rest);
    }
    let den = rest.denominator().clone();
    if den.contains_any(|g| g.depends_on_u() || *g == Generator::IndepX) {
        return (zeta, rest);
    }
    let (mut u_part, mut x_part) = (Poly::zero(), Poly::zero());
    for (m, c) in rest.numerator().terms() {
        let t = Poly::term(c.clone(), m.clone());
        if m.factors().iter().any(|(g, _)| g.depends_on_u()) {
            u_part = &u_part + &t;
        } else {
            x_part = &x_part + &t;
        }
    }
    let x_part = JetExpr::from_parts(x_part, den.clone()).expect("nonzero denominator");
    let residual = JetExpr::from_parts(u_part, den).expect("nonzero denominator");
    let p = antiderivative_in(&x_part, &Generator::IndepX).expect("denominator is free of x");
    (&zeta + &p, residual)
}
