//! Vector fields on `(x, t, u...)` space and their jet-space prolongations.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coeff::Coeff;
use crate::expr::{Context, Expr, JetVar, MultiIndex, Var};
use crate::jet::total_derivative;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VfieldError {
    #[error("prolongation of order {have} cannot act on an expression of jet order {need}")]
    OrderTooLow { have: u32, need: u32 },
}

/// `xi d/dx + eta d/dt + sum_alpha phi_alpha d/du^alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub xi: Expr,
    pub eta: Expr,
    pub deps: Vec<String>,
    pub phi: Vec<Expr>,
}

impl VectorField {
    pub fn new(xi: Expr, eta: Expr, deps: &[String], phi: Vec<Expr>) -> Self {
        assert_eq!(deps.len(), phi.len(), "one phi per dependent variable");
        VectorField {
            xi,
            eta,
            deps: deps.to_vec(),
            phi,
        }
    }

    /// Single dependent variable `u`.
    pub fn scalar(xi: Expr, eta: Expr, phi: Expr) -> Self {
        VectorField::new(xi, eta, &["u".to_string()], vec![phi])
    }

    pub fn zero(deps: &[String]) -> Self {
        VectorField::new(Expr::zero(), Expr::zero(), deps, vec![Expr::zero(); deps.len()])
    }

    /// All coefficients in order `xi, eta, phi...`.
    pub fn components(&self) -> Vec<&Expr> {
        let mut v = vec![&self.xi, &self.eta];
        v.extend(self.phi.iter());
        v
    }

    pub fn from_components(deps: &[String], mut c: Vec<Expr>) -> Self {
        let phi = c.split_off(2);
        let eta = c.pop().unwrap();
        let xi = c.pop().unwrap();
        VectorField::new(xi, eta, deps, phi)
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        VectorField::from_components(&self.deps, self.components().into_iter().map(f).collect())
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        self.map(|e| e.scale(c))
    }

    pub fn add(&self, o: &VectorField) -> Self {
        let comps = self
            .components()
            .into_iter()
            .zip(o.components())
            .map(|(a, b)| a + b)
            .collect();
        VectorField::from_components(&self.deps, comps)
    }

    pub fn sub(&self, o: &VectorField) -> Self {
        self.add(&o.scale(&-Coeff::one()))
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| c.is_zero())
    }

    /// True when some coefficient depends on derivatives (nonclassical
    /// candidates only).
    pub fn is_jet_dependent(&self) -> bool {
        self.components()
            .iter()
            .any(|c| c.jet_vars().iter().any(|j| j.order() > 0))
    }

    /// Action on a function of the base coordinates.
    pub fn apply_point(&self, f: &Expr, ctx: &Context) -> Expr {
        let mut out = &self.xi * &f.partial(&Var::Sym(ctx.indep[0].clone()))
            + &self.eta * &f.partial(&Var::Sym(ctx.indep[1].clone()));
        for (d, phi) in self.deps.iter().zip(&self.phi) {
            out = out + phi * &f.partial(&Var::jet(d, 0, 0));
        }
        out
    }

    pub fn show(&self, ctx: &Context) -> String {
        let mut parts = vec![
            format!("xi = {}", ctx.show(&self.xi)),
            format!("eta = {}", ctx.show(&self.eta)),
        ];
        for (d, p) in self.deps.iter().zip(&self.phi) {
            parts.push(format!("phi[{}] = {}", d, ctx.show(p)));
        }
        parts.join(", ")
    }
}

/// A vector field together with its coefficients `phi^J` on jet space.
#[derive(Clone, Debug)]
pub struct ProlongedVectorField {
    pub base: VectorField,
    pub order: u32,
    pub coeffs: BTreeMap<(usize, MultiIndex), Expr>,
}

/// `n`-th prolongation via `phi^{J,i} = D_i phi^J - sum_k (D_i xi^k) u_{J,k}`,
/// walking x-derivatives first and then t-derivatives.
pub fn prolong(v: &VectorField, n: u32) -> ProlongedVectorField {
    let dxi = [total_derivative(&v.xi, 0), total_derivative(&v.xi, 1)];
    let deta = [total_derivative(&v.eta, 0), total_derivative(&v.eta, 1)];
    let mut coeffs = BTreeMap::new();
    for (a, dep) in v.deps.iter().enumerate() {
        coeffs.insert((a, MultiIndex::ZERO), v.phi[a].clone());
        for j in MultiIndex::up_to(n) {
            let (prev, dir) = if j.0[1] > 0 {
                (MultiIndex::new(j.0[0], j.0[1] - 1), 1)
            } else {
                (MultiIndex::new(j.0[0] - 1, 0), 0)
            };
            let pj = &coeffs[&(a, prev)];
            let ux = Expr::var(Var::Jet(JetVar::new(dep, prev.bump(0))));
            let ut = Expr::var(Var::Jet(JetVar::new(dep, prev.bump(1))));
            let val = total_derivative(pj, dir) - &dxi[dir] * &ux - &deta[dir] * &ut;
            coeffs.insert((a, j), val);
        }
    }
    ProlongedVectorField {
        base: v.clone(),
        order: n,
        coeffs,
    }
}

/// Closed-form characteristic expression `D_J(phi - xi u_x - eta u_t) + xi u_{J,x} + eta u_{J,t}`.
pub fn prolong_closed_form(v: &VectorField, dep: usize, j: MultiIndex) -> Expr {
    let d = &v.deps[dep];
    let u_at = |idx: MultiIndex| Expr::var(Var::Jet(JetVar::new(d, idx)));
    let q = &v.phi[dep] - &v.xi * &u_at(MultiIndex::new(1, 0)) - &v.eta * &u_at(MultiIndex::new(0, 1));
    crate::jet::total_derivative_multi(&q, j) + &v.xi * &u_at(j.bump(0)) + &v.eta * &u_at(j.bump(1))
}

impl ProlongedVectorField {
    pub fn phi(&self, dep: usize, j: MultiIndex) -> Option<&Expr> {
        self.coeffs.get(&(dep, j))
    }

    /// `Pr v (e)`.
    pub fn apply(&self, e: &Expr, ctx: &Context) -> Result<Expr, VfieldError> {
        let need = e.jet_vars().iter().map(|j| j.order()).max().unwrap_or(0);
        if need > self.order {
            return Err(VfieldError::OrderTooLow {
                have: self.order,
                need,
            });
        }
        let mut out = &self.base.xi * &e.partial(&Var::Sym(ctx.indep[0].clone()))
            + &self.base.eta * &e.partial(&Var::Sym(ctx.indep[1].clone()));
        for j in e.jet_vars() {
            let Some(a) = self.base.deps.iter().position(|d| **d == *j.dep) else {
                continue;
            };
            let coef = &self.coeffs[&(a, j.idx)];
            out = out + coef * &e.partial(&Var::Jet(j));
        }
        Ok(out)
    }
}
