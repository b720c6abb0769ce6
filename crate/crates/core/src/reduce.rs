//! Similarity reduction: invariants of an affine generator, reduction of
//! the PDE to an ODE, reconstruction of explicit solutions, and checks of
//! differential invariants.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::expr::{Context, Expr, ExprError, JetVar, MultiIndex, Symbol, Var};
use crate::flows::{exponentiate, FlowError};
use crate::jet::{on_function, ProblemSpec};
use crate::vfield::{prolong, VectorField, VfieldError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReduceError {
    #[error("no coordinate can serve as the flow pivot")]
    NoPivot,
    #[error("the generator has no invariant involving the dependent variable")]
    NoDependentInvariant,
    #[error("invariant {0} is not annihilated by the generator")]
    NotInvariant(String),
    #[error("reduced equation still contains explicit variables: {0}")]
    ExplicitVariables(String),
    #[error("back-substituted function leaves the nonzero residual {0}")]
    ResidualNonzero(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Vfield(#[from] VfieldError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Similarity variable `y(x, t)`, invariant `w(x, t, u) = alpha u + beta`,
/// and `u = (w - beta) / alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantChart {
    pub y: Expr,
    pub w: Expr,
    /// `u` in terms of `x`, `t` and the placeholder [`InvariantChart::w_var`].
    pub reconstruction: Expr,
    /// Index of the independent variable eliminated through the flow.
    pub pivot: usize,
}

impl InvariantChart {
    /// Placeholder atom for the invariant dependent variable.
    pub fn w_var() -> Var {
        Var::jet("w", 0, 0)
    }

    pub fn y_symbol() -> Symbol {
        Symbol::independent("y", 0)
    }

    /// Context for displaying reduced equations and ODE solutions.
    pub fn ode_context(param: &str) -> Context {
        Context::new(["y", "t"], param, &["w"])
    }
}

/// Invariants of `v` (single dependent variable): integrate the flow, fix
/// the group parameter through the pivot coordinate (t, then x, then u)
/// and read off the remaining coordinates.
pub fn invariants(v: &VectorField, ctx: &Context) -> Result<InvariantChart, ReduceError> {
    let s = Symbol::group("s_flow");
    let g = exponentiate(v, ctx, &s)?;
    let coords = crate::flows::coordinates(ctx, &v.deps);
    let comps = v.components();
    let svar = Var::Sym(s.clone());
    let mut choice = None;
    for pivot in [1usize, 0, 2] {
        let c = comps[pivot];
        if c.is_zero() {
            continue;
        }
        let p = Expr::var(coords[pivot].clone());
        if let Some(k) = c.as_coeff() {
            // translation: the pivot reaches 0 at s = -p / k
            choice = Some((pivot, Some(svar.clone()), p.scale(&-k.inv())));
            break;
        }
        if let Some((m, k)) = c.as_single_term() {
            if m == p.as_single_term().unwrap().0 {
                // scaling by e^{k s}: the pivot reaches 1 at e^s = p^(-1/k)
                let Some(kr) = k.as_rational() else { continue };
                let q = Rational64::new(
                    num_traits::ToPrimitive::to_i64(kr.numer()).unwrap(),
                    num_traits::ToPrimitive::to_i64(kr.denom()).unwrap(),
                );
                choice = Some((pivot, Some(Var::Exp(s.clone())), p.pow(-q.recip())?));
                break;
            }
        }
    }
    let (pivot, var, val) = choice.ok_or(ReduceError::NoPivot)?;
    if pivot == 2 {
        return Err(ReduceError::NoDependentInvariant);
    }
    let var = var.unwrap();
    let at = |e: &Expr| e.subs1(var.clone(), val.clone());
    let other = 1 - pivot;
    let y = at(&g.maps[other])?;
    let mut w = at(&g.maps[2])?;
    let u = Var::jet(&v.deps[0], 0, 0);
    if y.depends_on(&u) || y.depends_on(&svar) || w.depends_on(&svar) {
        return Err(ReduceError::NoPivot);
    }
    // drop additive terms that are themselves invariants
    let (with_u, without_u) = w.split_terms(|m| m.factors().iter().any(|(a, _)| *a == u));
    let mut kept = with_u;
    for (m, c) in without_u.terms() {
        let term = Expr::term(m.clone(), c.clone());
        if !v.apply_point(&term, ctx).is_zero() {
            kept = &kept + &term;
        }
    }
    w = kept;
    for inv in [&y, &w] {
        if !v.apply_point(inv, ctx).is_zero() {
            return Err(ReduceError::NotInvariant(ctx.show(inv)));
        }
    }
    let parts = w.collect_by(&u);
    let one = Rational64::one();
    if parts.keys().any(|k| *k != one && !k.is_zero()) || !parts.contains_key(&one) {
        return Err(ReduceError::NoDependentInvariant);
    }
    let alpha = &parts[&one];
    let beta = parts.get(&Rational64::zero()).cloned().unwrap_or_default();
    let reconstruction = (Expr::var(InvariantChart::w_var()) - beta).checked_div(alpha)?;
    Ok(InvariantChart {
        y,
        w,
        reconstruction,
        pivot,
    })
}

/// Chart built from explicit formulas, e.g. a printed table row.
pub fn chart_from(y: Expr, w: Expr, u: &Var, pivot: usize) -> Result<InvariantChart, ReduceError> {
    let parts = w.collect_by(u);
    let one = Rational64::one();
    let alpha = parts.get(&one).ok_or(ReduceError::NoDependentInvariant)?;
    if parts.keys().any(|k| *k != one && !k.is_zero()) {
        return Err(ReduceError::NoDependentInvariant);
    }
    let beta = parts.get(&Rational64::zero()).cloned().unwrap_or_default();
    let reconstruction = (Expr::var(InvariantChart::w_var()) - beta).checked_div(alpha)?;
    Ok(InvariantChart {
        y,
        w,
        reconstruction,
        pivot,
    })
}

/// Whether `v` annihilates both invariants of the chart.
pub fn chart_is_invariant(v: &VectorField, chart: &InvariantChart, ctx: &Context) -> bool {
    v.apply_point(&chart.y, ctx).is_zero() && v.apply_point(&chart.w, ctx).is_zero()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedEquation {
    /// ODE in `w(y)`: jets `w`, `w_y`, `w_{y,y}`, ... and the symbol `y`.
    pub ode: Expr,
    /// Power of the pivot variable divided out.
    pub factor: Expr,
    /// The equation in `(x, t)` before elimination.
    pub raw: Expr,
}

/// `D_dir` on expressions in `(x, t)` and the chart placeholders `w^{(k)}(y)`.
fn chart_derivative(e: &Expr, dir: usize, chart: &InvariantChart, ctx: &Context) -> Expr {
    let dy = chart.y.partial(&Var::Sym(ctx.indep[dir].clone()));
    e.derive(&|v| match v {
        Var::Sym(s) if s.direction() == Some(dir) && *s == ctx.indep[dir] => Some(Expr::one()),
        Var::Jet(j) if &*j.dep == "w" => Some(&Expr::var(Var::Jet(j.bump(0))) * &dy),
        _ => None,
    })
}

/// Substitute `u = reconstruction(w(y(x,t)))` into every equation of the
/// problem, rewrite in `y`, and divide out the common power of the pivot
/// variable.
pub fn reduce_pde(spec: &ProblemSpec, chart: &InvariantChart) -> Result<ReducedEquation, ReduceError> {
    let ctx = &spec.ctx;
    let lhs: Expr = spec.equations.iter().map(|e| e.lhs.clone()).sum();
    let dep = &spec.deps()[0];
    let mut b = BTreeMap::new();
    for j in lhs.jet_vars() {
        let mut d = chart.reconstruction.clone();
        for (dir, &k) in j.idx.0.iter().enumerate() {
            for _ in 0..k {
                d = chart_derivative(&d, dir, chart, ctx);
            }
        }
        b.insert(Var::Jet(JetVar::new(dep, j.idx)), d);
    }
    let raw = lhs.substitute(&b)?;
    // y = alpha q + beta in the non-pivot variable q
    let q = Var::Sym(ctx.indep[1 - chart.pivot].clone());
    let p = Var::Sym(ctx.indep[chart.pivot].clone());
    let parts = chart.y.collect_by(&q);
    let one = Rational64::one();
    let alpha = parts
        .get(&one)
        .filter(|_| parts.keys().all(|k| *k == one || k.is_zero()))
        .ok_or_else(|| ReduceError::ExplicitVariables(ctx.show(&chart.y)))?;
    let beta = parts.get(&Rational64::zero()).cloned().unwrap_or_default();
    let ysym = Expr::sym(InvariantChart::y_symbol());
    let q_of_y = (&ysym - &beta).checked_div(alpha)?;
    let in_y = raw.subs1(q, q_of_y)?;
    let exps: Vec<Rational64> = in_y.collect_by(&p).keys().cloned().collect();
    if exps.len() > 1 {
        let ode_ctx = InvariantChart::ode_context(&ctx.param);
        return Err(ReduceError::ExplicitVariables(format!(
            "{} (in {})",
            ode_ctx.show(&in_y),
            ctx.indep[chart.pivot].name
        )));
    }
    let k = exps.first().cloned().unwrap_or_else(Rational64::zero);
    let factor = Expr::var_pow(p.clone(), k);
    let ode = in_y.checked_div(&factor)?;
    if ode.depends_on(&p) {
        return Err(ReduceError::ExplicitVariables(ctx.show(&ode)));
    }
    Ok(ReducedEquation { ode, factor, raw })
}

/// Turn a solution `w = F(y)` of the reduced equation into `u(x, t)` and
/// check it against the PDE.
pub fn back_substitute(spec: &ProblemSpec, chart: &InvariantChart, sol: &Expr) -> Result<Expr, ReduceError> {
    let ctx = &spec.ctx;
    let w_xt = sol.subs1(Var::Sym(InvariantChart::y_symbol()), chart.y.clone())?;
    let u = chart.reconstruction.subs1(InvariantChart::w_var(), w_xt)?;
    let dep = &spec.deps()[0];
    let mut residual = Expr::zero();
    for eq in &spec.equations {
        residual = residual + on_function(&eq.lhs, dep, &u, ctx)?;
    }
    if !residual.is_zero() {
        return Err(ReduceError::ResidualNonzero(ctx.show(&residual)));
    }
    Ok(u)
}

/// Residual `Pr^n v (I)`; zero exactly when `I` is a differential invariant.
pub fn differential_invariant_residual(v: &VectorField, inv: &Expr, n: u32, ctx: &Context) -> Result<Expr, ReduceError> {
    Ok(prolong(v, n.max(1)).apply(inv, ctx)?)
}

pub fn verify_differential_invariant(v: &VectorField, inv: &Expr, n: u32, ctx: &Context) -> Result<bool, ReduceError> {
    Ok(differential_invariant_residual(v, inv, n, ctx)?.is_zero())
}

/// `w^{(k)}` in the ODE context.
pub fn ode_jet(k: u32) -> Expr {
    Expr::var(Var::Jet(JetVar::new("w", MultiIndex::new(k, 0))))
}
