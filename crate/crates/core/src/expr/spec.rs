use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use super::generator::Generator;
use super::jet_expr::JetExpr;
use super::poly::Coeff;

/// How the abstract function `f(u)` is realized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionSpec {
    /// `f`, `f'`, `f''`, … stay algebraically independent generators.
    Abstract,
    /// `f = Σ c_i u^i`, coefficients listed from the constant term up.
    Polynomial(Vec<JetExpr>),
    /// `f = γ ln(u + c) + δ`, with `c` naming a parameter.
    LogShift { gamma: JetExpr, delta: JetExpr, shift: Arc<str> },
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

impl FunctionSpec {
    pub fn linear(alpha: JetExpr, beta: JetExpr) -> Self {
        FunctionSpec::Polynomial(vec![beta, alpha])
    }

    pub fn log_shift(gamma: JetExpr, delta: JetExpr, shift: &str) -> Self {
        FunctionSpec::LogShift { gamma, delta, shift: shift.into() }
    }

    /// `f = u^n`.
    pub fn power(n: usize) -> Self {
        let mut c = vec![JetExpr::zero(); n + 1];
        c[n] = JetExpr::one();
        FunctionSpec::Polynomial(c)
    }

    /// Concrete value of the `order`-th u-derivative of `f`, or `None` when
    /// the symbol stays opaque under this spec.
    pub fn image(&self, order: i32) -> Option<JetExpr> {
        match self {
            FunctionSpec::Abstract => None,
            FunctionSpec::Polynomial(coeffs) => Some(poly_derivative(coeffs, order)),
            FunctionSpec::LogShift { gamma, delta, shift } => log_derivative(gamma, delta, shift, order),
        }
    }

    /// `f` itself under this spec.
    pub fn f(&self) -> JetExpr {
        self.image(0).unwrap_or_else(|| JetExpr::fn_sym("f", 0))
    }

    /// Rewrites every `f`-symbol that has a concrete value under this spec.
    pub fn specialize(&self, e: &JetExpr) -> JetExpr {
        if matches!(self, FunctionSpec::Abstract) {
            return e.clone();
        }
        e.substitute_with(|g| match g {
            Generator::FnSym { name, order } if &**name == "f" => self.image(*order),
            _ => None,
        })
        .expect("f-images have nonzero denominators")
    }

    /// Polynomial degree in `u`, when the spec is polynomial.
    pub fn degree(&self) -> Option<usize> {
        match self {
            FunctionSpec::Polynomial(c) => c.iter().rposition(|a| !a.is_zero()).or(Some(0)),
            _ => None,
        }
    }
}

impl std::fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FunctionSpec::Abstract => f.write_str("f(u)"),
            _ => write!(f, "{}", self.f()),
        }
    }
}

fn poly_derivative(coeffs: &[JetExpr], order: i32) -> JetExpr {
    let u = JetExpr::u();
    let mut out = JetExpr::zero();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let i = i as i32;
        let p = i - order;
        if p < 0 {
            continue;
        }
        // d^order/du^order u^i = i!/(i-order)! u^(i-order), also for order < 0
        let factor = Coeff::new(factorial(i as u32), factorial(p as u32));
        let term = c * &u.powi(p).expect("nonnegative power");
        out = &out + &term.scale(&factor);
    }
    out
}

fn log_derivative(gamma: &JetExpr, delta: &JetExpr, shift: &str, order: i32) -> Option<JetExpr> {
    let w = &JetExpr::u() + &JetExpr::param(shift);
    let ln = JetExpr::gen(Generator::log(shift));
    let u = JetExpr::u();
    Some(match order {
        k if k >= 1 => {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            let c = Coeff::from_integer(factorial((k - 1) as u32) * sign);
            (gamma * &w.powi(-k).expect("w is nonzero")).scale(&c)
        }
        0 => &(gamma * &ln) + delta,
        -1 => &(gamma * &(&(&w * &ln) - &w)) + &(delta * &u),
        -2 => {
            let w2 = &w * &w;
            let body = &(&w2 * &ln).scale(&Coeff::new(1.into(), 2.into()))
                - &w2.scale(&Coeff::new(3.into(), 4.into()));
            &(gamma * &body) + &(delta * &(&u * &u)).scale(&Coeff::new(1.into(), 2.into()))
        }
        _ => return None,
    })
}
