use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Generator, JetExpr};
use crate::jet::{euler, formal_x_integrate, jet_partial, total_t, EvolutionEquation};
use crate::psd::{frechet_hat, PsdSeries};

/// A consequence drawn from one exactness constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    /// The unknown vanishes identically.
    Vanishes(String),
    /// The unknown function of `t` is a constant.
    Constant(String),
    /// A constant term dropped because constants are trivial formal
    /// symmetries.
    Dropped(String),
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Vanishes(n) => write!(f, "{n} = 0"),
            Condition::Constant(n) => write!(f, "{n} constant"),
            Condition::Dropped(n) => write!(f, "{n} = 0 (trivial constant)"),
        }
    }
}

/// One `ξ`-coefficient of `D_t(L) − [D̂_K, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanStep {
    pub index: i64,
    /// `g` for the `ξ` coefficient of `L`, `l{k}` for `ξ^{-k}`.
    pub unknown: String,
    /// `c` in `−c·D_x(unknown) = F`, the derivative of `K` in its top jet
    /// times the order.
    pub scale: JetExpr,
    /// The known part `F` of the coefficient equation.
    pub rhs: JetExpr,
    /// Coefficients of `δ(F/(−c))/δu` in the monomials of `x` and the jets,
    /// each required to vanish.
    pub constraints: Vec<JetExpr>,
    pub conditions: Vec<Condition>,
    /// The unknown after solving, `None` when the step failed.
    pub solved: Option<JetExpr>,
}

impl ScanStep {
    pub fn equation(&self) -> String {
        let lhs = format!("-{}*D_x({})", self.scale, self.unknown);
        format!("{lhs} = {}", self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScanVerdict {
    /// A constraint at `index` forces the leading coefficient to vanish.
    ObstructionFound { index: i64, forced: String },
    /// Every coefficient down to `ξ^{m+n−k}` could be made to vanish.
    SurvivedToRank(i64),
    /// The scan stopped on a constraint or integral it cannot resolve.
    Inconclusive { index: i64, reason: String },
}

impl fmt::Display for ScanVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanVerdict::ObstructionFound { index, forced } => write!(f, "obstruction at xi^{index}: {forced}"),
            ScanVerdict::SurvivedToRank(k) => write!(f, "no obstruction up to rank {k}"),
            ScanVerdict::Inconclusive { index, reason } => write!(f, "inconclusive at xi^{index}: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub order: u32,
    pub target_rank: i64,
    pub steps: Vec<ScanStep>,
    pub verdict: ScanVerdict,
    /// `L` as determined when the scan stopped.
    pub series: PsdSeries,
}

impl ScanReport {
    pub fn step(&self, index: i64) -> Option<&ScanStep> {
        self.steps.iter().find(|s| s.index == index)
    }

    /// All conditions in scan order, tagged with their index.
    pub fn conditions(&self) -> Vec<(i64, &Condition)> {
        self.steps.iter().flat_map(|s| s.conditions.iter().map(move |c| (s.index, c))).collect()
    }
}

const LEAD: &str = "g";

fn unknown_name(exponent: i64) -> String {
    if exponent == 1 {
        LEAD.to_string()
    } else {
        format!("l{}", -exponent)
    }
}

/// Mutable scan state: `L` as exponent/coefficient pairs and the unknown
/// names that have become constants.
struct State {
    coeffs: Vec<(i64, JetExpr)>,
    constants: BTreeSet<String>,
}

impl State {
    fn series(&self) -> PsdSeries {
        PsdSeries::from_terms(self.coeffs.iter().cloned())
    }

    fn apply(&mut self, sub: &dyn Fn(&Generator) -> Option<JetExpr>) {
        for (_, c) in self.coeffs.iter_mut() {
            *c = c.substitute_with(sub).expect("substitution by constants");
        }
    }
}

/// Substitution for `name` vanishing or becoming constant.
fn resolve(name: &str, constant: bool) -> impl Fn(&Generator) -> Option<JetExpr> + '_ {
    move |g| match g {
        Generator::UnknownT { name: n, order } if &**n == name => {
            if constant && *order == 0 {
                Some(JetExpr::param(name))
            } else {
                Some(JetExpr::zero())
            }
        }
        Generator::Param(n) if &**n == name && !constant => Some(JetExpr::zero()),
        _ => None,
    }
}

/// The unknown in a one-term constraint `c·h = 0`, with `c` free of unknowns.
fn single_unknown(c: &JetExpr, constants: &BTreeSet<String>) -> Option<(String, u32)> {
    if c.numerator().len() != 1 {
        return None;
    }
    let mut found = None;
    for g in c.numerator().generators() {
        let hit = match &g {
            Generator::UnknownT { name, order } => Some((name.to_string(), *order)),
            Generator::Param(name) if constants.contains(&**name) => Some((name.to_string(), 0)),
            _ => None,
        };
        if let Some(h) = hit {
            if found.is_some() {
                return None;
            }
            found = Some(h);
        }
    }
    found
}

/// Splits a constraint into the coefficients of its monomials in `x`, the
/// jets and the functions of `u`; each must vanish separately.
fn atoms(c: &JetExpr) -> Vec<JetExpr> {
    let pred = |g: &Generator| matches!(g, Generator::IndepX | Generator::Jet(_)) || g.depends_on_u();
    let num = JetExpr::from_poly(c.numerator().clone());
    num.coefficients_wrt(pred).expect("polynomial").into_values().collect()
}

/// Emulates the triangular solve for a formal symmetry
/// `L = gξ + Σ_{k≥0} l_k ξ^{−k}`: for every exponent `i` from `n` down to
/// `1 + n − target_rank` it writes the `ξ^i` coefficient of
/// `D_t(L) − [D̂_K, L]` as `−c·D_x(l) + Φ`, requires `δ(Φ/c)/δu = 0`, resolves
/// the resulting conditions on the unknown functions of `t`, and integrates.
///
/// Independent generators such as `f'''(u)` are taken to be nonzero, so an
/// abstract `f` is scanned under the assumption that no derivative of `f`
/// vanishes.
pub fn formal_symmetry_scan(eq: &EvolutionEquation, target_rank: i64) -> Result<ScanReport> {
    let n = eq.order();
    let lead = jet_partial(eq.rhs(), n);
    if lead.contains_any(|g| !matches!(g, Generator::Param(_))) {
        return Err(Error::UnsupportedEquationShape(format!(
            "the coefficient of the top jet must be constant, got {lead}"
        )));
    }
    let scale = lead.scale_int(n as i64);
    let dk = frechet_hat(eq.rhs());
    let mut state = State { coeffs: Vec::new(), constants: BTreeSet::new() };
    let mut steps = Vec::new();
    let top = n as i64;
    let bottom = 1 + top - target_rank;
    let mut verdict = ScanVerdict::SurvivedToRank(target_rank);

    for index in (bottom..=top).rev() {
        let exponent = index + 1 - top;
        let name = unknown_name(exponent);
        let l = state.series();
        let dt = total_t(&l.coeff(index).expect("exact series"), eq);
        let comm = &dk.product_coeff(&l, index)? - &l.product_coeff(&dk, index)?;
        let mut phi = eq.spec().specialize(&(&dt - &comm));
        let rhs = -&phi;

        let mut step = ScanStep {
            index,
            unknown: name.clone(),
            scale: scale.clone(),
            rhs,
            constraints: Vec::new(),
            conditions: Vec::new(),
            solved: None,
        };

        let g_expr = phi.checked_div(&scale)?;
        let variational = eq.spec().specialize(&euler(&g_expr));
        let pred = |g: &Generator| *g == Generator::IndepX || matches!(g, Generator::Jet(i) if *i >= 1);
        step.constraints = match variational.coefficients_wrt(pred) {
            Some(m) => m.into_values().collect(),
            None => JetExpr::from_poly(variational.numerator().clone())
                .coefficients_wrt(pred)
                .expect("polynomial")
                .into_values()
                .collect(),
        };

        let mut pending: Vec<JetExpr> = step.constraints.iter().flat_map(atoms).collect();
        let mut obstruction = None;
        loop {
            pending.retain(|c| !c.is_zero());
            let Some((pos, (uname, ord))) = pending
                .iter()
                .enumerate()
                .find_map(|(i, c)| single_unknown(c, &state.constants).map(|h| (i, h)))
            else {
                break;
            };
            pending.remove(pos);
            let constant = ord == 1;
            if ord > 1 {
                // h^(k)(t) = 0 leaves a polynomial in t; not needed by any
                // in-scope equation
                pending.push(JetExpr::unknown_t(&uname, ord));
                break;
            }
            let sub = resolve(&uname, constant);
            state.apply(&sub);
            phi = phi.substitute_with(&sub)?;
            for c in pending.iter_mut() {
                *c = c.substitute_with(&sub)?;
            }
            if constant {
                state.constants.insert(uname.clone());
                step.conditions.push(Condition::Constant(uname.clone()));
                if uname == "l0" {
                    let drop = resolve(&uname, false);
                    state.apply(&drop);
                    phi = phi.substitute_with(&drop)?;
                    step.conditions.push(Condition::Dropped(uname.clone()));
                }
            } else {
                step.conditions.push(Condition::Vanishes(uname.clone()));
                if uname == LEAD {
                    obstruction = Some(format!("{LEAD} = 0"));
                    break;
                }
            }
        }
        if let Some(forced) = obstruction {
            steps.push(step);
            verdict = ScanVerdict::ObstructionFound { index, forced };
            break;
        }
        pending.retain(|c| !c.is_zero());
        if !pending.is_empty() {
            let reason = format!("unresolved constraint {} = 0", pending[0]);
            steps.push(step);
            verdict = ScanVerdict::Inconclusive { index, reason };
            break;
        }

        let g_expr = phi.checked_div(&scale)?;
        let (zeta, residual) = formal_x_integrate(&g_expr);
        if !residual.is_zero() {
            steps.push(step);
            verdict = ScanVerdict::Inconclusive { index, reason: format!("no D_x-preimage for {g_expr}") };
            break;
        }
        let solved = &zeta + &JetExpr::unknown_t(&name, 0);
        state.coeffs.push((exponent, solved.clone()));
        step.solved = Some(solved);
        steps.push(step);
    }

    Ok(ScanReport { order: n, target_rank, steps, verdict, series: state.series() })
}
