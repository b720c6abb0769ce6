//! Exact symbolic expressions in canonical polynomial normal form.
//!
//! An [`Expr`] is a finite sum of monomials with coefficients in `Q(a)`.
//! Monomial factors are jet variables, unknown-function derivatives,
//! plain symbols and exponential atoms, each raised to a rational power.
//! Construction always goes through the normal form, so structural
//! equality is mathematical equality.

mod eval;
mod parse;
mod print;
mod var;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use crate::coeff::{int, rat, Coeff, Rational};
pub use eval::{equal_by_sampling, eval_at, random_point, zero_by_sampling, Point};
pub use parse::{parse, Ast};
pub use print::var_string;
pub use var::{FuncVar, JetVar, MultiIndex, Symbol, SymbolKind, Var};

pub type Exponent = Rational64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at offset {pos}")]
    UnknownSymbol { name: String, pos: usize },
    #[error("not representable as a polynomial normal form: {0}")]
    NonPolynomial(String),
    #[error("unbound variable `{0}` during evaluation")]
    Unbound(String),
    #[error("division by zero during evaluation")]
    DivisionByZero,
}

/// Naming environment for parsing and printing.
#[derive(Clone, Debug)]
pub struct Context {
    pub indep: [Symbol; 2],
    pub param: String,
    pub deps: Vec<String>,
    pub funcs: BTreeMap<String, Vec<Var>>,
    pub symbols: BTreeMap<String, Symbol>,
}

impl Default for Context {
    fn default() -> Self {
        Context {
            indep: [Symbol::independent("x", 0), Symbol::independent("t", 1)],
            param: "a".into(),
            deps: vec!["u".into()],
            funcs: BTreeMap::new(),
            symbols: BTreeMap::new(),
        }
    }
}

impl Context {
    pub fn new(indep: [&str; 2], param: &str, deps: &[&str]) -> Self {
        Context {
            indep: [Symbol::independent(indep[0], 0), Symbol::independent(indep[1], 1)],
            param: param.into(),
            deps: deps.iter().map(|s| s.to_string()).collect(),
            funcs: BTreeMap::new(),
            symbols: BTreeMap::new(),
        }
    }

    pub fn with_symbol(mut self, s: Symbol) -> Self {
        self.symbols.insert(s.name.to_string(), s);
        self
    }

    pub fn with_dep(mut self, d: &str) -> Self {
        if !self.deps.iter().any(|x| x == d) {
            self.deps.push(d.into());
        }
        self
    }

    pub fn with_func(mut self, name: &str, args: Vec<Var>) -> Self {
        self.funcs.insert(name.into(), args);
        self
    }

    pub fn x(&self) -> Expr {
        Expr::sym(self.indep[0].clone())
    }

    pub fn t(&self) -> Expr {
        Expr::sym(self.indep[1].clone())
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ExprError> {
        parse(text)?.resolve(self)
    }

    pub fn show(&self, e: &Expr) -> String {
        print::expr_string(e, self)
    }
}

/// Product of atoms with rational exponents, sorted by atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, Exponent)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, Exponent::one())])
    }

    pub fn pow(v: Var, e: Exponent) -> Self {
        if e.is_zero() {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn factors(&self) -> &[(Var, Exponent)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Exponent {
        self.0.iter().map(|(_, e)| *e).sum()
    }

    pub fn exponent(&self, v: &Var) -> Exponent {
        self.0
            .iter()
            .find(|(w, _)| w == v)
            .map(|(_, e)| *e)
            .unwrap_or_else(Exponent::zero)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            match self.0[i].0.cmp(&o.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(o.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = self.0[i].1 + o.0[j].1;
                    if !e.is_zero() {
                        out.push((self.0[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        Monomial(out)
    }

    pub fn powr(&self, e: Exponent) -> Monomial {
        if e.is_zero() {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|(v, x)| (v.clone(), x * e)).collect())
    }

    /// Remove the factor `v` entirely, returning its exponent.
    pub fn split_off(&self, v: &Var) -> (Exponent, Monomial) {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut e = Exponent::zero();
        for (w, x) in &self.0 {
            if w == v {
                e = *x;
            } else {
                rest.push((w.clone(), *x));
            }
        }
        (e, Monomial(rest))
    }

    /// Total jet degree, the scaling weight under `u -> lambda u`.
    pub fn jet_degree(&self) -> Exponent {
        self.0
            .iter()
            .filter(|(v, _)| matches!(v, Var::Jet(_)))
            .map(|(_, e)| *e)
            .sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| o.0.len().cmp(&self.0.len()))
            .then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Canonical normal form: ordered map from monomial to nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        Expr::term(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(Coeff::from_int(n))
    }

    pub fn rational(r: Rational) -> Self {
        Expr::constant(Coeff::from_rational(r))
    }

    /// The parameter `a` as an expression.
    pub fn param() -> Self {
        Expr::constant(Coeff::param())
    }

    pub fn term(m: Monomial, c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Expr { terms }
    }

    pub fn var(v: Var) -> Self {
        Expr::term(Monomial::var(v), Coeff::one())
    }

    pub fn var_pow(v: Var, e: Exponent) -> Self {
        Expr::term(Monomial::pow(v, e), Coeff::one())
    }

    pub fn sym(s: Symbol) -> Self {
        Expr::var(Var::Sym(s))
    }

    pub fn jet(dep: &str, kx: u32, kt: u32) -> Self {
        Expr::var(Var::jet(dep, kx, kt))
    }

    /// `exp(q * s)`.
    pub fn exp(q: Exponent, s: &Symbol) -> Self {
        Expr::var_pow(Var::Exp(s.clone()), q)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient if the expression is free of atoms.
    pub fn as_coeff(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.as_coeff()?.as_rational()
    }

    pub fn as_single_term(&self) -> Option<(&Monomial, &Coeff)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn coeff_of(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    fn insert_add(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &Coeff) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Coeff) -> Expr {
        let mut out = Expr::zero();
        for (n, x) in &self.terms {
            out.insert_add(n.mul(m), x * c);
        }
        out
    }

    pub fn pow_int(&self, e: u32) -> Expr {
        let mut acc = Expr::one();
        let mut base = self.clone();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Rational power. Non-negative integers expand; anything else needs a
    /// single term whose coefficient has an exact root.
    pub fn pow(&self, e: Exponent) -> Result<Expr, ExprError> {
        if e.is_integer() && !e.is_negative() {
            return Ok(self.pow_int(*e.numer() as u32));
        }
        if self.is_zero() {
            return Err(ExprError::NonPolynomial("zero to a negative power".into()));
        }
        let (m, c) = self.as_single_term().ok_or_else(|| {
            ExprError::NonPolynomial(format!("power {} of a sum", e))
        })?;
        let c2 = c
            .pow_rational(&e)
            .ok_or_else(|| ExprError::NonPolynomial(format!("inexact root of coefficient {}", c)))?;
        Ok(Expr::term(m.powr(e), c2))
    }

    /// Exact division by a single term or a coefficient.
    pub fn checked_div(&self, d: &Expr) -> Result<Expr, ExprError> {
        if let Some(c) = d.as_coeff() {
            if c.is_zero() {
                return Err(ExprError::NonPolynomial("division by zero".into()));
            }
            return Ok(self.scale(&c.inv()));
        }
        let inv = d.pow(-Exponent::one())?;
        Ok(self * &inv)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        for m in self.terms.keys() {
            for (v, _) in &m.0 {
                s.insert(v.clone());
                if let Var::Func(f) = v {
                    s.extend(f.args.iter().cloned());
                }
            }
        }
        s
    }

    pub fn jet_vars(&self) -> BTreeSet<JetVar> {
        self.vars()
            .into_iter()
            .filter_map(|v| match v {
                Var::Jet(j) => Some(j),
                _ => None,
            })
            .collect()
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(w, _)| w == v))
    }

    pub fn depends_on(&self, v: &Var) -> bool {
        self.vars().contains(v)
    }

    /// Group terms by the exponent of `v`: `self = sum_k coeffs[k] * v^k`.
    pub fn collect_by(&self, v: &Var) -> BTreeMap<Exponent, Expr> {
        let mut out: BTreeMap<Exponent, Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            out.entry(e).or_default().insert_add(rest, c.clone());
        }
        out.retain(|_, x| !x.is_zero());
        out
    }

    /// Split into the part that involves any atom satisfying `pred` and the rest.
    pub fn split_terms(&self, pred: impl Fn(&Monomial) -> bool) -> (Expr, Expr) {
        let mut yes = Expr::zero();
        let mut no = Expr::zero();
        for (m, c) in &self.terms {
            if pred(m) {
                yes.insert_add(m.clone(), c.clone());
            } else {
                no.insert_add(m.clone(), c.clone());
            }
        }
        (yes, no)
    }

    /// Generic derivation: `d(atom)` is supplied by `rule`; unknown-function
    /// atoms are differentiated through their arguments by the chain rule.
    pub fn derive(&self, rule: &dyn Fn(&Var) -> Option<Expr>) -> Expr {
        let mut out = Expr::zero();
        let mut cache: BTreeMap<Var, Option<Expr>> = BTreeMap::new();
        for (m, c) in &self.terms {
            for (i, (v, e)) in m.0.iter().enumerate() {
                let dv = cache
                    .entry(v.clone())
                    .or_insert_with(|| derive_atom(v, rule))
                    .clone();
                let Some(dv) = dv else { continue };
                let mut rest = m.0.clone();
                let e1 = *e - Exponent::one();
                if e1.is_zero() {
                    rest.remove(i);
                } else {
                    rest[i].1 = e1;
                }
                let coef = c * &Coeff::from_rational(exp_to_rational(e));
                for (n, x) in dv.terms {
                    out.insert_add(Monomial(rest.clone()).mul(&n), &coef * &x);
                }
            }
        }
        out
    }

    /// Formal partial derivative, all other atoms independent.
    pub fn partial(&self, w: &Var) -> Expr {
        self.derive(&|v| {
            if v == w {
                return Some(Expr::one());
            }
            match (v, w) {
                (Var::Exp(s), Var::Sym(t)) if s == t => Some(Expr::var(v.clone())),
                _ => None,
            }
        })
    }

    /// Simultaneous substitution of atoms. Binding a group parameter `s`
    /// to a rational-linear combination of symbols also rewrites `exp(q s)`.
    pub fn substitute(&self, bindings: &BTreeMap<Var, Expr>) -> Result<Expr, ExprError> {
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        let mut cache: BTreeMap<(Var, Exponent), Expr> = BTreeMap::new();
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let mut acc = Expr::constant(c.clone());
            let mut kept = Monomial::one();
            for (v, e) in &m.0 {
                let key = (v.clone(), *e);
                if let Some(x) = cache.get(&key) {
                    acc = &acc * x;
                    continue;
                }
                let val = if let Some(b) = bindings.get(v) {
                    Some(b.pow(*e)?)
                } else if let Var::Exp(s) = v {
                    match bindings.get(&Var::Sym(s.clone())) {
                        Some(b) => Some(exp_of_linear(b, *e)?),
                        None => None,
                    }
                } else {
                    None
                };
                match val {
                    Some(x) => {
                        acc = &acc * &x;
                        cache.insert(key, x);
                    }
                    None => kept = kept.mul(&Monomial::pow(v.clone(), *e)),
                }
            }
            out = &out + &acc.mul_monomial(&kept, &Coeff::one());
        }
        Ok(out)
    }

    pub fn subs1(&self, v: Var, with: Expr) -> Result<Expr, ExprError> {
        let mut b = BTreeMap::new();
        b.insert(v, with);
        self.substitute(&b)
    }

    /// Largest power of `v` dividing every term (may be negative or fractional).
    pub fn min_exponent(&self, v: &Var) -> Option<Exponent> {
        self.terms.keys().map(|m| m.exponent(v)).min()
    }

    /// Coefficient of the parameter-free content check: leading term coefficient.
    pub fn leading(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }
}

fn exp_to_rational(e: &Exponent) -> Rational {
    rat(*e.numer(), *e.denom())
}

fn derive_atom(v: &Var, rule: &dyn Fn(&Var) -> Option<Expr>) -> Option<Expr> {
    if let Var::Func(f) = v {
        let mut acc = Expr::zero();
        for (i, a) in f.args.iter().enumerate() {
            if let Some(da) = rule(a) {
                acc = &acc + &(&da * &Expr::var(Var::Func(f.diff(i))));
            }
        }
        if let Some(extra) = rule(v) {
            acc = &acc + &extra;
        }
        return if acc.is_zero() { None } else { Some(acc) };
    }
    rule(v).filter(|x| !x.is_zero())
}

/// `exp(e * b)` for `b` a rational combination of plain symbols.
fn exp_of_linear(b: &Expr, e: Exponent) -> Result<Expr, ExprError> {
    let mut acc = Expr::one();
    for (m, c) in b.terms() {
        let r = c
            .as_rational()
            .ok_or_else(|| ExprError::NonPolynomial("exp of a parameter-dependent argument".into()))?;
        match m.factors() {
            [(Var::Sym(s), one)] if one.is_one() => {
                let q = Exponent::new(
                    num_traits::ToPrimitive::to_i64(r.numer()).unwrap(),
                    num_traits::ToPrimitive::to_i64(r.denom()).unwrap(),
                ) * e;
                acc = &acc * &Expr::exp(q, s);
            }
            _ => {
                return Err(ExprError::NonPolynomial(
                    "exp of a non-linear or constant-shifted argument".into(),
                ))
            }
        }
    }
    Ok(acc)
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, o: &Expr) -> Expr {
        let (big, small) = if self.terms.len() >= o.terms.len() {
            (self, o)
        } else {
            (o, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, o: &Expr) -> Expr {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.insert_add(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, o: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            for (n, d) in &o.terms {
                out.insert_add(m.mul(n), c * d);
            }
        }
        out
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! owned_expr_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr { (&self).$m(&o) }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr { (&self).$m(o) }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr { self.$m(&o) }
        }
    )*};
}
owned_expr_ops!(Add add, Sub sub, Mul mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| &a + &b)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::expr_string(self, &Context::default()))
    }
}
