//! Brackets, structure constants, derived series, adjoint matrices and
//! greedy adjoint-orbit reduction.

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::coeff::{Coeff, Poly, Rational};
use crate::detsolve::in_span;
use crate::expr::{Context, Expr, ExprError, Symbol, Var};
use crate::linalg::{self, Matrix};
use crate::vfield::VectorField;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("[{0}, {1}] = {2} is not in the span of the basis")]
    NotClosed(String, String, String),
    #[error("basis vectors are linearly dependent")]
    Dependent,
    #[error("characteristic polynomial has non-rational coefficients: {0}")]
    ParametricSpectrum(String),
    #[error("matrix has eigenvalues outside Q; pass a truncation order")]
    IrrationalEigenvalues,
    #[error("generator index {0} out of range")]
    NoSuchGenerator(usize),
    #[error("zero vector has no orbit representative")]
    ZeroVector,
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// `[v, w]` with coefficients `v(w^k) - w(v^k)`.
pub fn bracket(v: &VectorField, w: &VectorField, ctx: &Context) -> VectorField {
    let comps = v
        .components()
        .into_iter()
        .zip(w.components())
        .map(|(vc, wc)| v.apply_point(wc, ctx) - w.apply_point(vc, ctx))
        .collect();
    VectorField::from_components(&v.deps, comps)
}

/// Linear combination `sum c_i name_i` as text.
pub fn combination_string(c: &[Coeff], names: &[String], ctx: &Context) -> String {
    let e: Expr = c
        .iter()
        .zip(names)
        .map(|(ci, n)| Expr::sym(Symbol::constant(n)).scale(ci))
        .sum();
    ctx.show(&e)
}

#[derive(Clone, Debug)]
pub struct LieAlgebra {
    pub names: Vec<String>,
    pub basis: Vec<VectorField>,
    /// `consts[i][j]` = coordinates of `[v_i, v_j]`.
    pub consts: Vec<Vec<Vec<Coeff>>>,
}

/// Coordinates of every `[v_i, v_j]` in the basis.
pub fn commutator_table(
    basis: &[VectorField],
    names: &[String],
    ctx: &Context,
) -> Result<Vec<Vec<Vec<Coeff>>>, LieError> {
    let n = basis.len();
    let mut t = vec![vec![vec![Coeff::zero(); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            if j < i {
                t[i][j] = t[j][i].iter().map(|c| -c).collect();
                continue;
            }
            let b = bracket(&basis[i], &basis[j], ctx);
            t[i][j] = in_span(basis, &b).ok_or_else(|| {
                LieError::NotClosed(names[i].clone(), names[j].clone(), b.show(ctx))
            })?;
        }
    }
    Ok(t)
}

impl LieAlgebra {
    pub fn new(basis: Vec<VectorField>, names: Vec<String>, ctx: &Context) -> Result<Self, LieError> {
        for (k, v) in basis.iter().enumerate() {
            if in_span(&basis[..k], v).is_some() {
                return Err(LieError::Dependent);
            }
        }
        let consts = commutator_table(&basis, &names, ctx)?;
        Ok(LieAlgebra { names, basis, consts })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket_coords(&self, x: &[Coeff], y: &[Coeff]) -> Vec<Coeff> {
        let n = self.dim();
        let mut out = vec![Coeff::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let f = &x[i] * &y[j];
                for k in 0..n {
                    if !self.consts[i][j][k].is_zero() {
                        out[k] = &out[k] + &(&f * &self.consts[i][j][k]);
                    }
                }
            }
        }
        out
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| (&self.consts[i][j][k] + &self.consts[j][i][k]).is_zero())))
    }

    pub fn jacobi_holds(&self) -> bool {
        let n = self.dim();
        let e = |i: usize| {
            let mut v = vec![Coeff::zero(); n];
            v[i] = Coeff::one();
            v
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = self.bracket_coords(&e(i), &self.consts[j][k]);
                    let b = self.bracket_coords(&e(j), &self.consts[k][i]);
                    let c = self.bracket_coords(&e(k), &self.consts[i][j]);
                    if (0..n).any(|m| !(&(&a[m] + &b[m]) + &c[m]).is_zero()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Subspaces `g, [g,g], ...` as echelon bases, ending at zero or at a
    /// fixed point.
    pub fn derived_series_bases(&self) -> Vec<Matrix> {
        let n = self.dim();
        let mut cur = linalg::identity(n);
        let mut out = vec![cur.clone()];
        loop {
            let mut gens = Vec::new();
            for i in 0..cur.len() {
                for j in i + 1..cur.len() {
                    gens.push(self.bracket_coords(&cur[i], &cur[j]));
                }
            }
            let next = linalg::rref(&gens, n).rows;
            let stalled = next.len() == cur.len();
            out.push(next.clone());
            if next.is_empty() || stalled {
                return out;
            }
            cur = next;
        }
    }

    pub fn derived_series(&self) -> Vec<usize> {
        self.derived_series_bases().iter().map(|b| b.len()).collect()
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_series().last() == Some(&0)
    }

    /// Matrix of `ad(v_i)`: column `j` holds the coordinates of `[v_i, v_j]`.
    pub fn ad_matrix(&self, i: usize) -> Matrix {
        let n = self.dim();
        (0..n).map(|k| (0..n).map(|j| self.consts[i][j][k].clone()).collect()).collect()
    }

    /// Matrix of `w -> Ad(exp(eps v_i)) w = w - eps [v_i, w] + ...` acting on
    /// coordinate columns. `truncate` gives a series order to fall back on
    /// when the spectrum is not rational.
    pub fn adjoint_exp(&self, i: usize, eps: &Symbol, truncate: Option<u32>) -> Result<AdjointMatrix, LieError> {
        if i >= self.dim() {
            return Err(LieError::NoSuchGenerator(i));
        }
        let b = linalg::mat_scale(&self.ad_matrix(i), &-Coeff::one());
        let entries = match matrix_exp(&b, eps) {
            Ok(m) => m,
            Err(LieError::IrrationalEigenvalues | LieError::ParametricSpectrum(_)) if truncate.is_some() => {
                matrix_exp_series(&b, eps, truncate.unwrap())
            }
            Err(e) => return Err(e),
        };
        Ok(AdjointMatrix {
            generator: i,
            eps: eps.clone(),
            entries,
            truncated: truncate.is_some() && !has_rational_spectrum(&b),
        })
    }
}

fn has_rational_spectrum(b: &Matrix) -> bool {
    spectrum(b).is_ok()
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdjointMatrix {
    pub generator: usize,
    pub eps: Symbol,
    pub entries: Vec<Vec<Expr>>,
    pub truncated: bool,
}

impl AdjointMatrix {
    /// `M(eps) V` for a coordinate vector `V`.
    pub fn apply(&self, v: &[Coeff]) -> Vec<Expr> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(v).map(|(m, c)| m.scale(c)).sum())
            .collect()
    }

    /// Entries with `eps` replaced by `e`.
    pub fn at(&self, e: &Expr) -> Result<Vec<Vec<Expr>>, ExprError> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|x| x.subs1(Var::Sym(self.eps.clone()), e.clone())).collect())
            .collect()
    }

    /// True when no entry contains an exponential of the parameter.
    pub fn is_polynomial(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|x| !x.vars().iter().any(|v| matches!(v, Var::Exp(_))))
    }
}

pub fn expr_mat_mul(a: &[Vec<Expr>], b: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    let m = b.first().map(|r| r.len()).unwrap_or(0);
    a.iter()
        .map(|row| (0..m).map(|j| row.iter().zip(b).map(|(x, br)| x * &br[j]).sum()).collect())
        .collect()
}

fn to_r64(r: &Rational) -> Option<Rational64> {
    Some(Rational64::new(r.numer().to_i64()?, r.denom().to_i64()?))
}

/// Eigenvalues with multiplicities; requires a characteristic polynomial
/// over Q that splits over Q.
pub fn spectrum(b: &Matrix) -> Result<Vec<(Rational, usize)>, LieError> {
    let cp = linalg::char_poly(b);
    let mut coeffs = Vec::new();
    for c in &cp {
        match c.as_rational() {
            Some(r) => coeffs.push(r),
            None => return Err(LieError::ParametricSpectrum(c.to_string())),
        }
    }
    let p = Poly::from_coeffs(coeffs);
    let roots = p.rational_roots();
    if roots.iter().map(|r| r.1).sum::<usize>() != b.len() {
        return Err(LieError::IrrationalEigenvalues);
    }
    Ok(roots)
}

/// Closed form of `exp(s B)` by Hermite interpolation on the rational
/// spectrum of `B`: `exp(sB) = sum_k alpha_k(s) B^k` with
/// `sum_k alpha_k d^j/dl^j l^k = s^j e^{l s}` at every eigenvalue.
pub fn matrix_exp(b: &Matrix, s: &Symbol) -> Result<Vec<Vec<Expr>>, LieError> {
    let n = b.len();
    let spec = spectrum(b)?;
    let mut rows: Matrix = Vec::new();
    let mut rhs: Vec<Expr> = Vec::new();
    for (lam, mult) in &spec {
        let l = Coeff::from_rational(lam.clone());
        let q = to_r64(lam).ok_or(LieError::IrrationalEigenvalues)?;
        for j in 0..*mult {
            let row = (0..n)
                .map(|k| {
                    if k < j {
                        Coeff::zero()
                    } else {
                        let fall: i64 = ((k - j + 1)..=k).map(|x| x as i64).product();
                        &Coeff::from_int(fall) * &l.powi((k - j) as i64)
                    }
                })
                .collect();
            rows.push(row);
            let sj = Expr::var_pow(Var::Sym(s.clone()), Rational64::from_integer(j as i64));
            let e = if q.is_zero() { Expr::one() } else { Expr::exp(q, s) };
            rhs.push(&sj * &e);
        }
    }
    let mut inv: Matrix = vec![vec![Coeff::zero(); n]; n];
    for c in 0..n {
        let mut unit = vec![Coeff::zero(); n];
        unit[c] = Coeff::one();
        let col = linalg::solve(&rows, &unit).expect("confluent Vandermonde matrix is invertible");
        for r in 0..n {
            inv[r][c] = col[r].clone();
        }
    }
    let alpha: Vec<Expr> = inv
        .iter()
        .map(|r| r.iter().zip(&rhs).map(|(c, e)| e.scale(c)).sum())
        .collect();
    let mut out = vec![vec![Expr::zero(); n]; n];
    let mut pow = linalg::identity(n);
    for a in &alpha {
        for i in 0..n {
            for j in 0..n {
                if !pow[i][j].is_zero() {
                    out[i][j] = &out[i][j] + &a.scale(&pow[i][j]);
                }
            }
        }
        pow = linalg::mat_mul(&pow, b);
    }
    Ok(out)
}

/// `sum_{k <= order} (sB)^k / k!`.
pub fn matrix_exp_series(b: &Matrix, s: &Symbol, order: u32) -> Vec<Vec<Expr>> {
    let n = b.len();
    let mut out = vec![vec![Expr::zero(); n]; n];
    let mut pow = linalg::identity(n);
    let mut fact = Coeff::one();
    for k in 0..=order {
        if k > 0 {
            pow = linalg::mat_mul(&pow, b);
            fact = &fact * &Coeff::from_int(k as i64);
        }
        let sk = Expr::var_pow(Var::Sym(s.clone()), Rational64::from_integer(k as i64));
        for i in 0..n {
            for j in 0..n {
                if !pow[i][j].is_zero() {
                    out[i][j] = &out[i][j] + &sk.scale(&(&pow[i][j] / &fact));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    /// Act by `Ad(exp(eps v_generator))`.
    Adjoint { generator: usize, eps: Coeff },
    /// Divide by a nonzero constant.
    Scale(Coeff),
}

#[derive(Clone, Debug)]
pub struct OrbitResult {
    pub representative: Vec<Coeff>,
    pub word: Vec<Step>,
    /// No adjoint step was possible.
    pub stalled: bool,
}

/// Termination measure: nonzero coordinates weighted so that earlier basis
/// elements cost more than all later ones together.
fn weight(v: &[Coeff]) -> u128 {
    let n = v.len();
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, _)| 1u128 << (n - 1 - k))
        .sum()
}

fn eval_at_eps(w: &[Expr], eps: &Symbol, val: &Coeff) -> Option<Vec<Coeff>> {
    w.iter()
        .map(|e| e.subs1(Var::Sym(eps.clone()), Expr::constant(val.clone())).ok()?.as_coeff())
        .collect()
}

impl LieAlgebra {
    /// Replay an orbit-reduction word on `v`.
    pub fn apply_word(&self, v: &[Coeff], word: &[Step]) -> Result<Vec<Coeff>, LieError> {
        let eps = Symbol::group("eps");
        let mut cur = v.to_vec();
        for st in word {
            cur = match st {
                Step::Adjoint { generator, eps: e } => {
                    let m = self.adjoint_exp(*generator, &eps, None)?;
                    eval_at_eps(&m.apply(&cur), &eps, e).ok_or_else(|| {
                        LieError::Expr(ExprError::NonPolynomial("exponential step value".into()))
                    })?
                }
                Step::Scale(c) => cur.iter().map(|x| x / c).collect(),
            };
        }
        Ok(cur)
    }

    /// Greedy simplification of `v` under the adjoint action. Only
    /// generators with polynomial adjoint matrices are used, and only
    /// coefficients that depend affinely on the group parameter are zeroed,
    /// and a step is taken only if it lowers a weighted count of nonzero
    /// coordinates.
    /// The result is finally scaled by its last nonzero coordinate.
    pub fn orbit_reduce(&self, v: &[Coeff]) -> Result<OrbitResult, LieError> {
        if v.iter().all(|c| c.is_zero()) {
            return Err(LieError::ZeroVector);
        }
        let eps = Symbol::group("eps");
        let mats: Vec<AdjointMatrix> = (0..self.dim())
            .filter_map(|i| self.adjoint_exp(i, &eps, None).ok())
            .filter(|m| m.is_polynomial())
            .collect();
        let epsv = Var::Sym(eps.clone());
        let mut cur = v.to_vec();
        let mut word = Vec::new();
        'outer: loop {
            for m in &mats {
                let w = m.apply(&cur);
                for (k, wk) in w.iter().enumerate() {
                    if cur[k].is_zero() {
                        continue;
                    }
                    let parts = wk.collect_by(&epsv);
                    if parts.keys().any(|p| *p != Rational64::from_integer(0) && *p != Rational64::from_integer(1)) {
                        continue;
                    }
                    let (Some(slope), c0) = (
                        parts.get(&Rational64::from_integer(1)).and_then(|e| e.as_coeff()),
                        parts.get(&Rational64::from_integer(0)).and_then(|e| e.as_coeff()).unwrap_or_else(Coeff::zero),
                    ) else {
                        continue;
                    };
                    let val = -(&c0 / &slope);
                    let Some(next) = eval_at_eps(&w, &eps, &val) else { continue };
                    if weight(&next) < weight(&cur) {
                        word.push(Step::Adjoint {
                            generator: m.generator,
                            eps: val,
                        });
                        cur = next;
                        continue 'outer;
                    }
                }
            }
            break;
        }
        let stalled = word.is_empty();
        let lead = cur.iter().rev().find(|c| !c.is_zero()).cloned().unwrap();
        if !lead.is_one() {
            cur = cur.iter().map(|x| x / &lead).collect();
            word.push(Step::Scale(lead));
        }
        Ok(OrbitResult {
            representative: cur,
            word,
            stalled,
        })
    }
}
