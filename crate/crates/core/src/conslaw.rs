//! Conservation laws by the multiplier method: Euler operator, multiplier
//! search, and the two-dimensional homotopy operator.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::binomial;
use thiserror::Error;

use crate::coeff::{fmt_poly, Coeff, Rational};
use crate::detsolve::{collect_rows, monomials_up_to};
use crate::expr::{Context, Expr, JetVar, MultiIndex, Var};
use crate::jet::{total_derivative, ProblemSpec};
use crate::linalg::nullspace;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConsLawError {
    #[error("not a total divergence, Euler residual {0}")]
    NotADivergence(String),
    #[error("term {0} has zero jet degree")]
    ZeroJetDegree(String),
    #[error("multiplier search needs a single equation, got {0}")]
    NotScalar(usize),
    #[error("divergence identity failed, residual {0}")]
    IdentityFailed(String),
}

/// `E_u f = sum_J (-D)^J df/du_J`.
pub fn euler(f: &Expr, dep: &str) -> Expr {
    let mut out = Expr::zero();
    for j in f.jet_vars().into_iter().filter(|j| &*j.dep == &*dep) {
        let mut term = f.partial(&Var::Jet(j.clone()));
        for (dir, &k) in j.idx.0.iter().enumerate() {
            for _ in 0..k {
                term = -total_derivative(&term, dir);
            }
        }
        out = out + term;
    }
    out
}

/// One Euler expression per dependent variable of `ctx`.
pub fn euler_apply(f: &Expr, ctx: &Context) -> Vec<Expr> {
    ctx.deps.iter().map(|d| euler(f, d)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Multiplier {
    pub lambda: Expr,
}

/// Flux pair of `D_t Psi + D_x Phi`.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxPair {
    pub psi: Expr,
    pub phi: Expr,
}

impl FluxPair {
    pub fn divergence(&self) -> Expr {
        total_derivative(&self.psi, 1) + total_derivative(&self.phi, 0)
    }

    /// Equal up to a pair with identically vanishing divergence.
    pub fn equivalent(&self, o: &FluxPair) -> bool {
        FluxPair {
            psi: &self.psi - &o.psi,
            phi: &self.phi - &o.phi,
        }
        .divergence()
        .is_zero()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConservationLaw {
    pub multiplier: Multiplier,
    pub flux: FluxPair,
    pub provenance: Vec<String>,
}

/// Multiplier ansatz: a list of independent terms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MultiplierAnsatz {
    pub terms: Vec<Expr>,
}

impl MultiplierAnsatz {
    /// `x^p t^q m` for `p + q <= degree` and `m` in `factors`.
    pub fn products(ctx: &Context, degree: u32, factors: &[Expr]) -> Self {
        let xt = monomials_up_to(&[ctx.x(), ctx.t()], degree);
        let terms = xt
            .iter()
            .flat_map(|p| factors.iter().map(move |m| p * m))
            .collect();
        MultiplierAnsatz { terms }
    }

    /// `1` and all derivatives of `dep` up to `order`.
    pub fn jet_factors(dep: &str, order: u32) -> Vec<Expr> {
        std::iter::once(Expr::one())
            .chain(MultiIndex::up_to(order).into_iter().map(|j| Expr::jet(dep, j.0[0], j.0[1])))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct MultiplierSpace {
    pub multipliers: Vec<Multiplier>,
    pub vectors: Vec<Vec<Coeff>>,
    pub case_splits: Vec<String>,
}

/// Multipliers `Lambda` in the span of the ansatz with `E[Lambda Delta] = 0`.
pub fn find_multipliers(spec: &ProblemSpec, ansatz: &MultiplierAnsatz) -> Result<MultiplierSpace, ConsLawError> {
    if spec.equations.len() != 1 {
        return Err(ConsLawError::NotScalar(spec.equations.len()));
    }
    let n = ansatz.terms.len();
    if n == 0 {
        return Ok(MultiplierSpace {
            multipliers: vec![],
            vectors: vec![],
            case_splits: vec![],
        });
    }
    let delta = &spec.equations[0].lhs;
    let cols: Vec<Vec<Expr>> = ansatz
        .terms
        .iter()
        .map(|m| euler_apply(&(m * delta), &spec.ctx))
        .collect();
    let (rows, _) = collect_rows(&cols);
    let (vectors, ech) = nullspace(&rows, n);
    let multipliers = vectors
        .iter()
        .map(|c| Multiplier {
            lambda: ansatz.terms.iter().zip(c).map(|(t, k)| t.scale(k)).sum(),
        })
        .collect();
    Ok(MultiplierSpace {
        multipliers,
        vectors,
        case_splits: ech.conditions.iter().map(|p| fmt_poly(p, &spec.ctx.param)).collect(),
    })
}

fn binom(n: i64, k: i64) -> Rational {
    if k < 0 || n < 0 || k > n {
        return Rational::from_integer(BigInt::from(0));
    }
    Rational::from_integer(binomial(BigInt::from(n), BigInt::from(k)))
}

/// Combinatorial weight `C(i1+i2, i1) C(k1+k2-i1-i2-1, k1-i1-1) / C(k1+k2, k1)`.
pub fn homotopy_coefficient(i1: u32, i2: u32, k1: u32, k2: u32) -> Rational {
    let (i1, i2, k1, k2) = (i1 as i64, i2 as i64, k1 as i64, k2 as i64);
    binom(i1 + i2, i1) * binom(k1 + k2 - i1 - i2 - 1, k1 - i1 - 1) / binom(k1 + k2, k1)
}

fn neg_total(e: &Expr, dir: usize, k: u32) -> Expr {
    (0..k).fold(e.clone(), |acc, _| -total_derivative(&acc, dir))
}

fn deps_of(f: &Expr) -> BTreeSet<String> {
    f.jet_vars().into_iter().map(|j| j.dep.to_string()).collect()
}

/// Integrand in direction `dir` (0 = x, 1 = t), summed over dependents.
fn integrand(f: &Expr, dir: usize) -> Expr {
    let other = 1 - dir;
    let mut out = Expr::zero();
    for dep in deps_of(f) {
        let jets: Vec<JetVar> = f.jet_vars().into_iter().filter(|j| &*j.dep == &*dep).collect();
        for j in jets {
            let k = j.idx.0;
            if k[dir] == 0 {
                continue;
            }
            let df = f.partial(&Var::Jet(j.clone()));
            for i_d in 0..k[dir] {
                for i_o in 0..=k[other] {
                    let b = homotopy_coefficient(i_d, i_o, k[dir], k[other]);
                    if b == Rational::from_integer(BigInt::from(0)) {
                        continue;
                    }
                    let mut ii = [0; 2];
                    ii[dir] = i_d;
                    ii[other] = i_o;
                    let u = Expr::jet(&dep, ii[0], ii[1]);
                    let rest = neg_total(&neg_total(&df, dir, k[dir] - i_d - 1), other, k[other] - i_o);
                    out = out + (u * rest).scale(&Coeff::from_rational(b));
                }
            }
        }
    }
    out
}

/// `(I^x f, I^t f)`.
pub fn homotopy_integrands(f: &Expr) -> (Expr, Expr) {
    (integrand(f, 0), integrand(f, 1))
}

/// `int_0^1 g[lambda u] dlambda / lambda`, termwise `1/d` for jet degree `d`.
pub fn lambda_integral(g: &Expr) -> Result<Expr, ConsLawError> {
    let mut out = Expr::zero();
    for (m, c) in g.terms() {
        let d = m.jet_degree();
        if d == num_rational::Rational64::from_integer(0) {
            return Err(ConsLawError::ZeroJetDegree(format!("{:?}", m)));
        }
        let w = Rational::new(BigInt::from(*d.denom()), BigInt::from(*d.numer()));
        out = out + Expr::term(m.clone(), c.clone()).scale(&Coeff::from_rational(w));
    }
    Ok(out)
}

/// Fluxes with `D_x Phi + D_t Psi = f` for a total divergence `f`.
pub fn homotopy(f: &Expr, ctx: &Context) -> Result<FluxPair, ConsLawError> {
    if let Some(r) = euler_apply(f, ctx).into_iter().find(|r| !r.is_zero()) {
        return Err(ConsLawError::NotADivergence(ctx.show(&r)));
    }
    if let Some((m, _)) = f.terms().find(|(m, _)| m.jet_degree() == num_rational::Rational64::from_integer(0)) {
        return Err(ConsLawError::ZeroJetDegree(ctx.show(&Expr::term(m.clone(), Coeff::one()))));
    }
    let (ix, it) = homotopy_integrands(f);
    Ok(FluxPair {
        phi: lambda_integral(&ix)?,
        psi: lambda_integral(&it)?,
    })
}

/// Verified conservation law for a multiplier of a single equation.
pub fn conservation_law(spec: &ProblemSpec, m: &Multiplier) -> Result<ConservationLaw, ConsLawError> {
    if spec.equations.len() != 1 {
        return Err(ConsLawError::NotScalar(spec.equations.len()));
    }
    let ctx = &spec.ctx;
    let f = &m.lambda * &spec.equations[0].lhs;
    let flux = homotopy(&f, ctx)?;
    let r = flux.divergence() - &f;
    if !r.is_zero() {
        return Err(ConsLawError::IdentityFailed(ctx.show(&r)));
    }
    Ok(ConservationLaw {
        multiplier: m.clone(),
        flux,
        provenance: vec![
            format!("multiplier {}", ctx.show(&m.lambda)),
            "Euler operator vanishes on multiplier * equation".into(),
            "fluxes by the 2-D homotopy operator".into(),
            "divergence identity checked as a normal form".into(),
        ],
    })
}
