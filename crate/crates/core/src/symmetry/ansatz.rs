use crate::error::Result;
use crate::expr::{gcd, Generator, JetExpr, Monomial, Poly};
use crate::jet::{euler, total_t, EvolutionEquation};

use super::symmetry_residual;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzMode {
    /// `D_t(Q) = D_K(Q)`.
    Symmetry,
    /// `δ(D_tρ)/δu = 0`.
    Density,
}

/// Basis of the solution space, valid when every recorded pivot is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzSolution {
    pub solutions: Vec<JetExpr>,
    /// Parameter expressions divided by during elimination and normalization.
    pub assumptions: Vec<JetExpr>,
}

fn residual(eq: &EvolutionEquation, e: &JetExpr, mode: AnsatzMode) -> JetExpr {
    match mode {
        AnsatzMode::Symmetry => symmetry_residual(eq, e),
        AnsatzMode::Density => {
            let d = total_t(&eq.spec().specialize(e), eq);
            eq.spec().specialize(&euler(&d))
        }
    }
}

fn lcm(a: &Poly, b: &Poly) -> Poly {
    let g = gcd(a, b);
    (a * &b.div_exact(&g).expect("gcd divides")).monic()
}

/// Solves `Σ c_j R(basis_j) = 0` for constants `c_j` over the field of
/// rational functions in the parameters, treated as transcendental.
pub fn solve_linear_ansatz(eq: &EvolutionEquation, basis: &[JetExpr], mode: AnsatzMode) -> Result<AnsatzSolution> {
    let basis: Vec<JetExpr> = basis.iter().map(|b| eq.spec().specialize(b)).collect();
    let residuals: Vec<JetExpr> = basis.iter().map(|b| residual(eq, b, mode)).collect();
    let (relations, assumptions) = linear_relations(&residuals)?;
    let solutions = relations
        .iter()
        .map(|v| v.iter().zip(&basis).map(|(c, b)| c * b).sum())
        .collect();
    Ok(AnsatzSolution { solutions, assumptions })
}

/// Basis of `{c : Σ c_j e_j = 0}` over the parameters, each vector scaled so
/// its first nonzero entry is 1, and the parameter expressions divided by.
pub fn linear_relations(values: &[JetExpr]) -> Result<(Vec<Vec<JetExpr>>, Vec<JetExpr>)> {
    let non_param = |g: &Generator| !matches!(g, Generator::Param(_));

    let mut common = Poly::one();
    for r in values {
        if r.denominator().contains_any(non_param) {
            common = lcm(&common, r.denominator());
        }
    }
    let common = JetExpr::from_poly(common);

    // rows indexed by monomials in the non-parameter generators
    let mut rows: std::collections::BTreeMap<Monomial, Vec<JetExpr>> = Default::default();
    let cols = values.len();
    for (j, r) in values.iter().enumerate() {
        let cleared = r * &common;
        let coeffs = cleared.coefficients_wrt(non_param).expect("denominator cleared");
        for (m, c) in coeffs {
            rows.entry(m).or_insert_with(|| vec![JetExpr::zero(); cols])[j] = c;
        }
    }
    let mut matrix: Vec<Vec<JetExpr>> = rows.into_values().collect();

    let mut assumptions = Vec::new();
    let note = |e: &JetExpr, assumptions: &mut Vec<JetExpr>| {
        if e.as_rational().is_none() && !assumptions.contains(e) {
            assumptions.push(e.clone());
        }
    };
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..matrix.len()).find(|&r| !matrix[r][col].is_zero()) else { continue };
        matrix.swap(row, p);
        let piv = matrix[row][col].clone();
        note(&piv, &mut assumptions);
        let inv = piv.recip()?;
        for c in col..cols {
            matrix[row][c] = &matrix[row][c] * &inv;
        }
        for r in 0..matrix.len() {
            if r == row || matrix[r][col].is_zero() {
                continue;
            }
            let factor = matrix[r][col].clone();
            for c in col..cols {
                let sub = &factor * &matrix[row][c];
                matrix[r][c] = &matrix[r][c] - &sub;
            }
        }
        pivots.push(col);
        row += 1;
    }

    let mut relations = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![JetExpr::zero(); cols];
        v[free] = JetExpr::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -&matrix[r][free];
        }
        let first = v.iter().find(|c| !c.is_zero()).expect("free column is one").clone();
        note(&first, &mut assumptions);
        let inv = first.recip()?;
        relations.push(v.iter().map(|c| c * &inv).collect());
    }
    Ok((relations, assumptions))
}
