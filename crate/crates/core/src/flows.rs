//! One-parameter groups of affine generators and their action on explicit
//! solutions.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coeff::Coeff;
use crate::expr::{Context, Expr, ExprError, Symbol, Var};
use crate::liealg::{matrix_exp, LieError};
use crate::linalg::Matrix;
use crate::vfield::VectorField;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("generator is not affine in the coordinates: {0}")]
    NonAffine(String),
    #[error("the x,t part of the flow depends on the dependent variable")]
    NotProjectable,
    #[error("solution transport needs exactly one dependent variable")]
    MultipleDependents,
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Coordinate maps `(x~, t~, u~...)` as functions of the coordinates and `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneParameterGroup {
    pub s: Symbol,
    pub maps: Vec<Expr>,
}

/// Coordinates `(x, t, deps...)` as variables.
pub fn coordinates(ctx: &Context, deps: &[String]) -> Vec<Var> {
    let mut v = vec![Var::Sym(ctx.indep[0].clone()), Var::Sym(ctx.indep[1].clone())];
    v.extend(deps.iter().map(|d| Var::jet(d, 0, 0)));
    v
}

/// Matrix `B` of `dz/ds = B z` in homogeneous coordinates `z = (x, t, u.., 1)`.
pub fn affine_matrix(v: &VectorField, ctx: &Context) -> Result<Matrix, FlowError> {
    let coords = coordinates(ctx, &v.deps);
    let m = coords.len();
    let mut b = vec![vec![Coeff::zero(); m + 1]; m + 1];
    for (i, c) in v.components().into_iter().enumerate() {
        for (mono, k) in c.terms() {
            let col = if mono.is_one() {
                m
            } else {
                match mono.factors() {
                    [(var, e)] if e.is_integer() && *e.numer() == 1 => coords
                        .iter()
                        .position(|x| x == var)
                        .ok_or_else(|| FlowError::NonAffine(ctx.show(c)))?,
                    _ => return Err(FlowError::NonAffine(ctx.show(c))),
                }
            };
            b[i][col] = k.clone();
        }
    }
    Ok(b)
}

pub fn exponentiate(v: &VectorField, ctx: &Context, s: &Symbol) -> Result<OneParameterGroup, FlowError> {
    let b = affine_matrix(v, ctx)?;
    let e = matrix_exp(&b, s)?;
    let coords = coordinates(ctx, &v.deps);
    let z: Vec<Expr> = coords.iter().map(|c| Expr::var(c.clone())).chain(std::iter::once(Expr::one())).collect();
    let maps = e[..coords.len()]
        .iter()
        .map(|row| row.iter().zip(&z).map(|(a, b)| a * b).sum())
        .collect();
    Ok(OneParameterGroup { s: s.clone(), maps })
}

impl OneParameterGroup {
    /// The maps with `s` replaced by `val`.
    pub fn at(&self, val: &Expr) -> Result<Vec<Expr>, ExprError> {
        self.maps
            .iter()
            .map(|m| m.subs1(Var::Sym(self.s.clone()), val.clone()))
            .collect()
    }

    /// `G(s2)` after `G(s1)`.
    pub fn compose(&self, s1: &Expr, s2: &Expr, coords: &[Var]) -> Result<Vec<Expr>, ExprError> {
        let first = self.at(s1)?;
        let b: BTreeMap<Var, Expr> = coords.iter().cloned().zip(first).collect();
        self.at(s2)?.iter().map(|m| m.substitute(&b)).collect()
    }
}

/// `d/ds` of each map equals the generator coefficient at the mapped point,
/// and `s = 0` gives the identity.
pub fn verify_flow(v: &VectorField, g: &OneParameterGroup, ctx: &Context) -> Result<bool, FlowError> {
    let coords = coordinates(ctx, &v.deps);
    if g.maps.len() != coords.len() {
        return Ok(false);
    }
    let at0 = g.at(&Expr::zero())?;
    if at0.iter().zip(&coords).any(|(m, c)| *m != Expr::var(c.clone())) {
        return Ok(false);
    }
    let b: BTreeMap<Var, Expr> = coords.iter().cloned().zip(g.maps.iter().cloned()).collect();
    let svar = Var::Sym(g.s.clone());
    for (m, c) in g.maps.iter().zip(v.components()) {
        if !(m.partial(&svar) - c.substitute(&b)?).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Image of the graph `u = f(x, t)` under `G(s)`, written again as a graph.
pub fn transform_solution(g: &OneParameterGroup, f: &Expr, ctx: &Context) -> Result<Expr, FlowError> {
    if g.maps.len() != 3 {
        return Err(FlowError::MultipleDependents);
    }
    let u = g.maps[2]
        .vars()
        .into_iter()
        .find_map(|v| v.as_jet().map(|j| Var::Jet(j.clone())))
        .unwrap_or_else(|| Var::jet("u", 0, 0));
    if g.maps[..2].iter().any(|m| m.depends_on(&u)) {
        return Err(FlowError::NotProjectable);
    }
    let back = g.at(&-Expr::sym(g.s.clone()))?;
    let (x, t) = (Var::Sym(ctx.indep[0].clone()), Var::Sym(ctx.indep[1].clone()));
    let mut b = BTreeMap::new();
    b.insert(x.clone(), back[0].clone());
    b.insert(t.clone(), back[1].clone());
    let f0 = f.substitute(&b)?;
    b.insert(u, f0);
    Ok(g.maps[2].substitute(&b)?)
}
