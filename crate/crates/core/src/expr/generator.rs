use std::fmt;
use std::sync::Arc;

/// A coordinate of the jet space, or one of the auxiliary symbols the engine
/// treats as algebraically independent.
///
/// The derived order is the canonical generator order:
/// `x < t < u < u_x < … < u_t-jets < f-tower < ln(u+c) < unknowns of t < parameters`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    IndepX,
    IndepT,
    /// `u_{ix}`; `Jet(0)` is `u` itself.
    Jet(u32),
    /// `u_t` and its x-derivatives, used only for off-equation identities.
    JetT(u32),
    /// `k`-th u-derivative of an abstract function of `u`. Negative orders are
    /// antiderivatives: for `f`, order `-1` is `r` and `-2` is `r̂`.
    FnSym { name: Arc<str>, order: i32 },
    /// `ln(u + c)` where `c` names a parameter.
    Log { shift: Arc<str> },
    /// `k`-th t-derivative of an undetermined function of `t` alone.
    UnknownT { name: Arc<str>, order: u32 },
    Param(Arc<str>),
}

impl Generator {
    pub fn fn_sym(name: &str, order: i32) -> Self {
        Generator::FnSym { name: name.into(), order }
    }

    pub fn unknown_t(name: &str, order: u32) -> Self {
        Generator::UnknownT { name: name.into(), order }
    }

    pub fn param(name: &str) -> Self {
        Generator::Param(name.into())
    }

    pub fn log(shift: &str) -> Self {
        Generator::Log { shift: shift.into() }
    }

    /// True for generators that depend on `u` through the chain rule.
    pub fn depends_on_u(&self) -> bool {
        matches!(self, Generator::Jet(0) | Generator::FnSym { .. } | Generator::Log { .. })
    }

    /// True for generators annihilated by `D_x`.
    pub fn is_x_constant(&self) -> bool {
        matches!(
            self,
            Generator::IndepT | Generator::UnknownT { .. } | Generator::Param(_)
        )
    }
}

fn primes(k: u32) -> Option<&'static str> {
    match k {
        0 => Some(""),
        1 => Some("'"),
        2 => Some("''"),
        3 => Some("'''"),
        _ => None,
    }
}

fn x_suffix(k: u32) -> String {
    match k {
        1 => "x".to_string(),
        2 => "xx".to_string(),
        3 => "xxx".to_string(),
        _ => format!("{k}x"),
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::IndepX => f.write_str("x"),
            Generator::IndepT => f.write_str("t"),
            Generator::Jet(0) => f.write_str("u"),
            Generator::Jet(k) => write!(f, "u_{}", x_suffix(*k)),
            Generator::JetT(0) => f.write_str("u_t"),
            Generator::JetT(k) => write!(f, "u_t{}", x_suffix(*k)),
            Generator::FnSym { name, order } => {
                if &**name == "f" && *order == -1 {
                    return f.write_str("r(u)");
                }
                if &**name == "f" && *order == -2 {
                    return f.write_str("rhat(u)");
                }
                match (*order >= 0).then(|| primes(*order as u32)).flatten() {
                    Some(p) => write!(f, "{name}{p}(u)"),
                    None => write!(f, "{name}^({order})(u)"),
                }
            }
            Generator::Log { shift } => write!(f, "ln(u + {shift})"),
            Generator::UnknownT { name, order } => match primes(*order) {
                Some(p) => write!(f, "{name}{p}(t)"),
                None => write!(f, "{name}^({order})(t)"),
            },
            Generator::Param(name) => f.write_str(name),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order() {
        let gens = [
            Generator::IndepX,
            Generator::IndepT,
            Generator::Jet(0),
            Generator::Jet(7),
            Generator::JetT(0),
            Generator::fn_sym("f", -2),
            Generator::fn_sym("f", 3),
            Generator::log("c"),
            Generator::unknown_t("g", 1),
            Generator::param("alpha"),
        ];
        for w in gens.windows(2) {
            assert!(w[0] < w[1], "{} !< {}", w[0], w[1]);
        }
    }

    #[test]
    fn spelling() {
        assert_eq!(Generator::Jet(3).to_string(), "u_xxx");
        assert_eq!(Generator::Jet(5).to_string(), "u_5x");
        assert_eq!(Generator::fn_sym("f", 3).to_string(), "f'''(u)");
        assert_eq!(Generator::fn_sym("f", 4).to_string(), "f^(4)(u)");
        assert_eq!(Generator::fn_sym("f", -2).to_string(), "rhat(u)");
        assert_eq!(Generator::unknown_t("g", 1).to_string(), "g'(t)");
        assert_eq!(Generator::JetT(2).to_string(), "u_txx");
    }
}
