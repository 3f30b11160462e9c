use std::cmp::Ordering;
use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::generator::Generator;
use super::jet_expr::JetExpr;
use super::poly::{Coeff, Monomial, Poly};

/// Print order: highest jets first, then by the canonical term order.
fn print_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    let jets = |m: &Monomial| -> Vec<(u32, u32)> {
        m.factors()
            .iter()
            .rev()
            .filter_map(|(g, e)| match g {
                Generator::Jet(i) => Some((*i, *e)),
                _ => None,
            })
            .collect()
    };
    jets(b).cmp(&jets(a)).then_with(|| b.cmp(a))
}

/// Factor order inside a printed monomial: parameters, unknowns of `t`, `x`,
/// `t`, functions of `u`, then jets.
fn factor_rank(g: &Generator) -> u8 {
    match g {
        Generator::Param(_) => 0,
        Generator::UnknownT { .. } => 1,
        Generator::IndepX => 2,
        Generator::IndepT => 3,
        Generator::FnSym { .. } | Generator::Log { .. } => 4,
        Generator::Jet(_) => 5,
        Generator::JetT(_) => 6,
    }
}

fn write_factors(out: &mut String, factors: &[(Generator, u32)]) {
    let mut factors: Vec<_> = factors.iter().collect();
    factors.sort_by(|a, b| factor_rank(&a.0).cmp(&factor_rank(&b.0)).then_with(|| a.0.cmp(&b.0)));
    for (i, (g, e)) in factors.into_iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        write!(out, "{g}").unwrap();
        if *e > 1 {
            write!(out, "^{e}").unwrap();
        }
    }
}

/// Writes `±coef*num_mono/(den_mono)` with the sign handled by the caller.
fn write_term(out: &mut String, coef: &Coeff, num: &Monomial, den: &Monomial) {
    let p = coef.numer().abs();
    let q = coef.denom().clone();
    let mut top = String::new();
    if !p.is_one() || num.is_one() {
        write!(top, "{p}").unwrap();
    }
    if !num.is_one() {
        if !top.is_empty() {
            top.push('*');
        }
        write_factors(&mut top, num.factors());
    }
    out.push_str(&top);
    let mut bottom_count = den.factors().len();
    let mut bottom = String::new();
    if !q.is_one() {
        write!(bottom, "{q}").unwrap();
        bottom_count += 1;
    }
    if !den.is_one() {
        if !bottom.is_empty() {
            bottom.push('*');
        }
        write_factors(&mut bottom, den.factors());
    }
    match bottom_count {
        0 => {}
        1 => write!(out, "/{bottom}").unwrap(),
        _ => write!(out, "/({bottom})").unwrap(),
    }
}

fn sorted_terms(p: &Poly) -> Vec<(&Monomial, &Coeff)> {
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|a, b| print_cmp(a.0, b.0));
    terms
}

fn write_sum<'a>(
    out: &mut String,
    terms: impl Iterator<Item = (&'a Coeff, Monomial, Monomial)>,
) {
    let mut first = true;
    for (c, n, d) in terms {
        if first {
            if c.is_negative() {
                out.push('-');
            }
        } else if c.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        write_term(out, c, &n, &d);
        first = false;
    }
    if first {
        out.push('0');
    }
}

pub(crate) fn poly_to_string(p: &Poly) -> String {
    let mut s = String::new();
    write_sum(
        &mut s,
        sorted_terms(p).into_iter().map(|(m, c)| (c, m.clone(), Monomial::one())),
    );
    s
}

impl fmt::Display for JetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.numerator();
        let den = self.denominator();
        let mut s = String::new();
        if den.is_one() {
            s = poly_to_string(num);
        } else if den.is_monomial() {
            let (dm, dc) = den.leading().expect("nonzero denominator");
            let terms = sorted_terms(num).into_iter().map(|(m, c)| {
                let g = m.gcd(dm);
                let n = m.div(&g).expect("gcd divides");
                let d = dm.div(&g).expect("gcd divides");
                (c / dc, n, d)
            });
            let owned: Vec<(Coeff, Monomial, Monomial)> = terms.collect();
            write_sum(&mut s, owned.iter().map(|(c, n, d)| (c, n.clone(), d.clone())));
        } else {
            let n = poly_to_string(num);
            if num.len() > 1 {
                write!(s, "({n})").unwrap();
            } else {
                s.push_str(&n);
            }
            write!(s, "/({})", poly_to_string(den)).unwrap();
        }
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gke_rhs_prints_in_reading_order() {
        let k = &(&JetExpr::jet(5) + &(&JetExpr::param("b") * &JetExpr::jet(3)))
            + &(&JetExpr::fn_sym("f", 0) * &JetExpr::jet(1));
        assert_eq!(k.to_string(), "u_5x + b*u_xxx + f(u)*u_x");
    }

    #[test]
    fn monomial_denominators_distribute() {
        let alpha = JetExpr::param("alpha");
        let q3 = &(&JetExpr::t() * &JetExpr::jet(1)) + &JetExpr::one().checked_div(&alpha).unwrap();
        assert_eq!(q3.to_string(), "t*u_x + 1/alpha");
        let e = JetExpr::ratio(-3, 25).checked_div(&alpha).unwrap();
        assert_eq!(e.to_string(), "-3/(25*alpha)");
        let h = (&JetExpr::jet(2) * &JetExpr::jet(2)).scale(&Coeff::new(1.into(), 2.into()));
        assert_eq!(h.to_string(), "u_xx^2/2");
    }

    #[test]
    fn general_quotients_parenthesize() {
        let c = JetExpr::param("c");
        let e = JetExpr::param("gamma").checked_div(&(&JetExpr::u() + &c)).unwrap();
        assert_eq!(e.to_string(), "gamma/(u + c)");
        assert_eq!(JetExpr::zero().to_string(), "0");
    }
}
