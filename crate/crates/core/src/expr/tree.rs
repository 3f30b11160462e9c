use super::generator::Generator;
use super::jet_expr::JetExpr;
use super::poly::Coeff;
use crate::error::Result;

/// An unnormalized expression as built by a parser or by hand.
#[derive(Debug, Clone, PartialEq)]
pub enum Tree {
    Num(Coeff),
    Gen(Generator),
    Neg(Box<Tree>),
    Add(Box<Tree>, Box<Tree>),
    Sub(Box<Tree>, Box<Tree>),
    Mul(Box<Tree>, Box<Tree>),
    Div(Box<Tree>, Box<Tree>),
    Pow(Box<Tree>, i32),
}

impl Tree {
    pub fn int(n: i64) -> Tree {
        Tree::Num(Coeff::from_integer(n.into()))
    }

    pub fn add(a: Tree, b: Tree) -> Tree {
        Tree::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Tree, b: Tree) -> Tree {
        Tree::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Tree, b: Tree) -> Tree {
        Tree::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Tree, b: Tree) -> Tree {
        Tree::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Tree, e: i32) -> Tree {
        Tree::Pow(Box::new(a), e)
    }
}

/// Brings a raw tree to canonical form.
pub fn normalize(tree: &Tree) -> Result<JetExpr> {
    Ok(match tree {
        Tree::Num(c) => JetExpr::rational(c.clone()),
        Tree::Gen(g) => JetExpr::gen(g.clone()),
        Tree::Neg(a) => -normalize(a)?,
        Tree::Add(a, b) => normalize(a)? + normalize(b)?,
        Tree::Sub(a, b) => normalize(a)? - normalize(b)?,
        Tree::Mul(a, b) => normalize(a)? * normalize(b)?,
        Tree::Div(a, b) => normalize(a)?.checked_div(&normalize(b)?)?,
        Tree::Pow(a, e) => normalize(a)?.powi(*e)?,
    })
}
