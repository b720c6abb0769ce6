//! Jet-space bookkeeping: total derivatives, solved leading-derivative
//! forms, and reduction of expressions modulo a PDE and its differential
//! consequences.

use std::cell::RefCell;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{Context, Expr, ExprError, JetVar, MultiIndex, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("equation {0} is not affine in its leading derivative {1}")]
    NonlinearInLeading(usize, String),
    #[error("leading derivative {1} does not occur in equation {0}")]
    ZeroCoefficient(usize, String),
    #[error("coefficient of leading derivative {1} in equation {0} is not invertible: {2}")]
    NonInvertibleCoefficient(usize, String, String),
    #[error("equation index {0} out of range")]
    NoSuchEquation(usize),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// `D_dir e` for the direction index `dir` (0 = x, 1 = t).
pub fn total_derivative(e: &Expr, dir: usize) -> Expr {
    e.derive(&|v| match v {
        Var::Sym(s) if s.direction() == Some(dir) => Some(Expr::one()),
        Var::Jet(j) => Some(Expr::var(Var::Jet(j.bump(dir)))),
        _ => None,
    })
}

/// `D_x^{k1} D_t^{k2} e`.
pub fn total_derivative_multi(e: &Expr, idx: MultiIndex) -> Expr {
    let mut out = e.clone();
    for (dir, &k) in idx.0.iter().enumerate() {
        for _ in 0..k {
            out = total_derivative(&out, dir);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub lhs: Expr,
    pub leading: JetVar,
}

/// A PDE system with its naming context and chosen leading derivatives.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub ctx: Context,
    pub param_nonzero: bool,
    pub equations: Vec<Equation>,
}

impl ProblemSpec {
    pub fn deps(&self) -> &[String] {
        &self.ctx.deps
    }

    pub fn max_order(&self) -> u32 {
        self.equations
            .iter()
            .flat_map(|eq| eq.lhs.jet_vars())
            .map(|j| j.order())
            .max()
            .unwrap_or(0)
    }

    /// Rules `leading -> solved form` for every equation.
    pub fn solved_rules(&self) -> Result<Vec<(JetVar, Expr)>, JetError> {
        (0..self.equations.len())
            .map(|i| Ok((self.equations[i].leading.clone(), solve_leading(self, i)?)))
            .collect()
    }

    pub fn reducer(&self) -> Result<Reducer, JetError> {
        Ok(Reducer::new(self.solved_rules()?))
    }
}

/// Solve equation `nu` for its leading derivative.
pub fn solve_leading(spec: &ProblemSpec, nu: usize) -> Result<Expr, JetError> {
    let eq = spec.equations.get(nu).ok_or(JetError::NoSuchEquation(nu))?;
    solve_for(&eq.lhs, &eq.leading, nu, &spec.ctx)
}

/// Solve `lhs = 0` for the jet variable `lead`, which must occur affinely
/// with a coefficient that is a nonzero element of `Q(a)`.
pub fn solve_for(lhs: &Expr, lead: &JetVar, nu: usize, ctx: &Context) -> Result<Expr, JetError> {
    let v = Var::Jet(lead.clone());
    let name = crate::expr::var_string(&v, ctx);
    let parts = lhs.collect_by(&v);
    let zero = crate::expr::Exponent::from_integer(0);
    let one = crate::expr::Exponent::from_integer(1);
    if parts.keys().any(|k| *k != zero && *k != one) {
        return Err(JetError::NonlinearInLeading(nu, name));
    }
    let coef = parts.get(&one).ok_or_else(|| JetError::ZeroCoefficient(nu, name.clone()))?;
    let c = coef
        .as_coeff()
        .filter(|c| !c.is_zero())
        .ok_or_else(|| JetError::NonInvertibleCoefficient(nu, name.clone(), ctx.show(coef)))?;
    let rest = parts.get(&zero).cloned().unwrap_or_default();
    Ok((-rest).scale(&c.inv()))
}

/// Reduction modulo solved equations and all their differential
/// consequences: any jet variable that is a derivative of a rule's leading
/// jet is replaced, recursively, until none remain.
pub struct Reducer {
    rules: Vec<(JetVar, Expr)>,
    memo: RefCell<BTreeMap<JetVar, Expr>>,
}

impl Reducer {
    pub fn new(rules: Vec<(JetVar, Expr)>) -> Self {
        Reducer {
            rules,
            memo: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn rules(&self) -> &[(JetVar, Expr)] {
        &self.rules
    }

    fn rule_for(&self, j: &JetVar) -> Option<usize> {
        self.rules
            .iter()
            .position(|(l, _)| l.dep == j.dep && j.idx.checked_sub(&l.idx).is_some())
    }

    fn reduce_jet(&self, j: &JetVar) -> Expr {
        if let Some(e) = self.memo.borrow().get(j) {
            return e.clone();
        }
        let k = self.rule_for(j).expect("reduce_jet called on a free jet");
        let (lead, rhs) = &self.rules[k];
        let diff = j.idx.checked_sub(&lead.idx).unwrap();
        let out = if diff.order() == 0 {
            self.reduce(rhs)
        } else {
            let dir = if diff.0[0] > 0 { 0 } else { 1 };
            let mut prev = j.clone();
            prev.idx.0[dir] -= 1;
            let base = self.reduce_jet(&prev);
            self.reduce(&total_derivative(&base, dir))
        };
        self.memo.borrow_mut().insert(j.clone(), out.clone());
        out
    }

    pub fn reduce(&self, e: &Expr) -> Expr {
        let mut cur = e.clone();
        loop {
            let targets: Vec<JetVar> = cur
                .terms()
                .flat_map(|(m, _)| m.factors().iter())
                .filter_map(|(v, _)| v.as_jet())
                .filter(|j| self.rule_for(j).is_some())
                .cloned()
                .collect();
            if targets.is_empty() {
                return cur;
            }
            let mut b = BTreeMap::new();
            for j in targets {
                let r = self.reduce_jet(&j);
                b.insert(Var::Jet(j), r);
            }
            cur = cur
                .substitute(&b)
                .expect("jet substitution uses non-negative integer powers");
        }
    }
}

/// Maximal x-order and t-order of the jet variables of each dependent
/// variable present in `e`; dependents that do not occur are absent.
pub fn jet_orders(e: &Expr) -> BTreeMap<String, (u32, u32)> {
    let mut out: BTreeMap<String, (u32, u32)> = BTreeMap::new();
    for j in e.jet_vars() {
        let ent = out.entry(j.dep.to_string()).or_insert((0, 0));
        ent.0 = ent.0.max(j.idx.0[0]);
        ent.1 = ent.1.max(j.idx.0[1]);
    }
    out
}

/// Evaluate `e` on the explicit function `dep = f(x, t)`: every jet
/// variable of `dep` becomes the matching partial derivative of `f`.
pub fn on_function(e: &Expr, dep: &str, f: &Expr, ctx: &Context) -> Result<Expr, ExprError> {
    let mut b = BTreeMap::new();
    for j in e.jet_vars() {
        if &*j.dep != dep {
            continue;
        }
        let mut d = f.clone();
        for (dir, &k) in j.idx.0.iter().enumerate() {
            for _ in 0..k {
                d = d.partial(&Var::Sym(ctx.indep[dir].clone()));
            }
        }
        b.insert(Var::Jet(j), d);
    }
    e.substitute(&b)
}
