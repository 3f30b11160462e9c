//! Equation files and `f` modes.
//!
//! An equation file is a JSON object:
//!
//! ```json
//! { "rhs": "u_5x + b*u_xxx + f(u)*u_x", "params": ["b"], "f_mode": "abstract", "precision": 20 }
//! ```
//!
//! `params` lists every parameter the right-hand side may use besides those
//! named by `f_mode`; `precision` is optional.

use std::collections::BTreeSet;
use std::fmt;

use jetcalc::expr::{FunctionSpec, Generator};
use jetcalc::kawahara::GKESpec;
use jetcalc::{EvolutionEquation, JetExpr};
use serde::Deserialize;

use crate::parse::{parse_expr, SyntaxError};

#[derive(Debug, Clone, PartialEq)]
pub enum InputError {
    Syntax { context: String, error: SyntaxError },
    Json { line: usize, column: usize, message: String },
    Invalid(String),
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Syntax { context, error } => write!(f, "{context}: {error}"),
            InputError::Json { line, column, message } => {
                write!(f, "equation file: line {line}, column {column}: {message}")
            }
            InputError::Invalid(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for InputError {}

fn expr_in(context: &str, src: &str) -> Result<JetExpr, InputError> {
    parse_expr(src).map_err(|error| InputError::Syntax { context: context.to_string(), error })
}

/// `abstract`, `linear:α,β`, `log:γ,δ,c`, `quadratic[:p2,p1,p0]`,
/// `power:n` or `poly:c0,c1,...` (constant term first).
pub fn parse_f_mode(mode: &str) -> Result<FunctionSpec, InputError> {
    let (head, args) = match mode.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a)),
        None => (mode.trim(), None),
    };
    let list = |n: Option<usize>| -> Result<Vec<String>, InputError> {
        let items: Vec<String> = args.unwrap_or("").split(',').map(|s| s.trim().to_string()).collect();
        match n {
            Some(n) if items.len() != n => {
                Err(InputError::Invalid(format!("f mode '{head}' takes {n} comma-separated values")))
            }
            _ => Ok(items),
        }
    };
    let exprs = |items: &[String]| -> Result<Vec<JetExpr>, InputError> {
        items.iter().map(|s| expr_in(&format!("f mode '{mode}'"), s)).collect()
    };
    match (head, args) {
        ("abstract", None) => Ok(FunctionSpec::Abstract),
        ("linear", Some(_)) => {
            let v = exprs(&list(Some(2))?)?;
            Ok(FunctionSpec::linear(v[0].clone(), v[1].clone()))
        }
        ("log", Some(_)) => {
            let items = list(Some(3))?;
            let v = exprs(&items[..2])?;
            let c = &items[2];
            let name_ok = c.chars().next().is_some_and(|ch| ch.is_ascii_alphabetic())
                && c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
                && expr_in("log shift", c)? == JetExpr::param(c);
            if !name_ok {
                return Err(InputError::Invalid(format!("log shift must be a parameter name, got '{c}'")));
            }
            Ok(FunctionSpec::log_shift(v[0].clone(), v[1].clone(), c))
        }
        ("quadratic", None) => Ok(FunctionSpec::Polynomial(["p0", "p1", "p2"].map(JetExpr::param).to_vec())),
        ("quadratic", Some(_)) => {
            let v = exprs(&list(Some(3))?)?;
            Ok(FunctionSpec::Polynomial(vec![v[2].clone(), v[1].clone(), v[0].clone()]))
        }
        ("power", Some(n)) => {
            let n: usize = n.trim().parse().map_err(|_| InputError::Invalid(format!("bad power '{n}'")))?;
            Ok(FunctionSpec::power(n))
        }
        ("poly", Some(_)) => Ok(FunctionSpec::Polynomial(exprs(&list(None)?)?)),
        _ => Err(InputError::Invalid(format!(
            "unknown f mode '{mode}'; expected abstract, linear:a,b, log:g,d,c, quadratic[:p2,p1,p0], power:n or poly:c0,..."
        ))),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEquation {
    rhs: String,
    #[serde(default)]
    params: Vec<String>,
    #[serde(default)]
    f_mode: Option<String>,
    #[serde(default)]
    precision: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct EquationFile {
    pub equation: EvolutionEquation,
    pub params: Vec<String>,
    pub f_mode: String,
    pub precision: Option<usize>,
}

fn params_of(e: &JetExpr) -> BTreeSet<String> {
    e.generators()
        .into_iter()
        .filter_map(|g| match g {
            Generator::Param(p) => Some(p.to_string()),
            _ => None,
        })
        .collect()
}

fn spec_params(spec: &FunctionSpec) -> BTreeSet<String> {
    match spec {
        FunctionSpec::Abstract => BTreeSet::new(),
        FunctionSpec::Polynomial(c) => c.iter().flat_map(params_of).collect(),
        FunctionSpec::LogShift { gamma, delta, shift } => {
            let mut s: BTreeSet<String> = params_of(gamma).into_iter().chain(params_of(delta)).collect();
            s.insert(shift.to_string());
            s
        }
    }
}

pub fn parse_equation_file(text: &str) -> Result<EquationFile, InputError> {
    let raw: RawEquation = serde_json::from_str(text).map_err(|e| InputError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
    })?;
    let f_mode = raw.f_mode.unwrap_or_else(|| "abstract".to_string());
    let spec = parse_f_mode(&f_mode)?;
    let rhs = expr_in("rhs", &raw.rhs)?;
    let declared: BTreeSet<String> = raw.params.iter().cloned().chain(spec_params(&spec)).collect();
    let undeclared: Vec<String> = params_of(&rhs).difference(&declared).cloned().collect();
    if !undeclared.is_empty() {
        return Err(InputError::Invalid(format!("rhs uses undeclared parameters: {}", undeclared.join(", "))));
    }
    let equation = EvolutionEquation::new(rhs, spec).map_err(|e| InputError::Invalid(e.to_string()))?;
    Ok(EquationFile { equation, params: raw.params, f_mode, precision: raw.precision })
}

/// The equation used when no file is given.
pub fn default_equation() -> EvolutionEquation {
    jetcalc::kawahara::gke(&GKESpec::new(FunctionSpec::Abstract)).expect("abstract f is nonconstant")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_modes() {
        assert_eq!(parse_f_mode("abstract"), Ok(FunctionSpec::Abstract));
        let lin = parse_f_mode("linear:alpha,beta").unwrap();
        assert_eq!(lin.f().to_string(), "alpha*u + beta");
        assert_eq!(parse_f_mode("log:gamma,delta,c").unwrap().f().to_string(), "gamma*ln(u + c) + delta");
        assert_eq!(parse_f_mode("quadratic").unwrap().f().to_string(), "p2*u^2 + p1*u + p0");
        assert_eq!(parse_f_mode("quadratic:1,2,0").unwrap().f().to_string(), "u^2 + 2*u");
        assert_eq!(parse_f_mode("power:3"), Ok(FunctionSpec::power(3)));
        assert!(parse_f_mode("log:1,2,3").is_err());
        assert!(parse_f_mode("linear:1").is_err());
        assert!(parse_f_mode("cubic").is_err());
    }

    #[test]
    fn files() {
        let f = parse_equation_file(r#"{"rhs": "u_xxx + 6*u*u_x", "precision": 12}"#).unwrap();
        assert_eq!(f.equation.order(), 3);
        assert_eq!(f.precision, Some(12));
        let e = parse_equation_file("{\"rhs\": \"u_xxx + b*u_x\"}").unwrap_err();
        assert_eq!(e, InputError::Invalid("rhs uses undeclared parameters: b".into()));
        let e = parse_equation_file("{\n \"rhs\": 3,\n}").unwrap_err();
        assert!(matches!(e, InputError::Json { line: 2, .. }), "{e:?}");
        let e = parse_equation_file(r#"{"rhs": "u_xxx +"}"#).unwrap_err();
        assert!(e.to_string().starts_with("rhs: syntax error at line 1, column 8"), "{e}");
        let ok = parse_equation_file(r#"{"rhs": "u_5x + b*u_xxx + f(u)*u_x", "params": ["b"], "f_mode": "linear:alpha,beta"}"#);
        assert_eq!(ok.unwrap().equation.rhs().to_string(), "u_5x + b*u_xxx + alpha*u*u_x + beta*u_x");
    }
}
