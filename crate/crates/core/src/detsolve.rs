//! Determining equations for point symmetries over a finite polynomial
//! ansatz, solved by exact elimination.

use thiserror::Error;

use crate::coeff::{fmt_poly, Coeff};
use crate::expr::{Expr, Monomial};
use crate::jet::{JetError, ProblemSpec, Reducer};
use crate::linalg::{nullspace, Matrix};
use crate::vfield::{prolong, VectorField, VfieldError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Vfield(#[from] VfieldError),
    #[error("ansatz slot {0} does not exist")]
    NoSuchSlot(usize),
}

/// Unknown coefficient functions, each spanned by a list of basis terms.
/// Slots are ordered `xi, eta, phi...` for vector fields.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnsatzSpec {
    pub slots: Vec<(String, Vec<Expr>)>,
}

/// All monomials of total degree `<= degree` in `vars`, in canonical term order.
pub fn monomials_up_to(vars: &[Expr], degree: u32) -> Vec<Expr> {
    let mut layer = vec![Expr::one()];
    let mut all = Expr::one();
    for _ in 0..degree {
        let mut next = Vec::new();
        for m in &layer {
            for v in vars {
                next.push(m * v);
            }
        }
        next.sort_by(|a, b| a.leading().map(|x| x.0).cmp(&b.leading().map(|x| x.0)));
        next.dedup();
        for m in &next {
            all = &all + m;
        }
        layer = next;
    }
    all.terms().map(|(m, _)| Expr::term(m.clone(), Coeff::one())).collect()
}

impl AnsatzSpec {
    pub fn empty() -> Self {
        AnsatzSpec::default()
    }

    /// Polynomial ansatz of total degree `<= degree` in `(x, t, deps...)`
    /// for every coefficient of a vector field.
    pub fn classical(spec: &ProblemSpec, degree: u32) -> Self {
        let ctx = &spec.ctx;
        let mut vars = vec![ctx.x(), ctx.t()];
        vars.extend(spec.deps().iter().map(|d| Expr::jet(d, 0, 0)));
        let basis = monomials_up_to(&vars, degree);
        let mut slots = vec![("xi".to_string(), basis.clone()), ("eta".to_string(), basis.clone())];
        for d in spec.deps() {
            slots.push((format!("phi[{}]", d), basis.clone()));
        }
        AnsatzSpec { slots }
    }

    pub fn len(&self) -> usize {
        self.slots.iter().map(|s| s.1.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(slot, basis term)` for every unknown constant, in column order.
    pub fn unknowns(&self) -> Vec<(usize, &Expr)> {
        self.slots
            .iter()
            .enumerate()
            .flat_map(|(i, (_, b))| b.iter().map(move |e| (i, e)))
            .collect()
    }

    /// The vector field obtained by setting the constants to `c`.
    pub fn field(&self, deps: &[String], c: &[Coeff]) -> VectorField {
        let mut comps = vec![Expr::zero(); 2 + deps.len()];
        for ((slot, term), ck) in self.unknowns().into_iter().zip(c) {
            if !ck.is_zero() {
                comps[slot] = &comps[slot] + &term.scale(ck);
            }
        }
        VectorField::from_components(deps, comps)
    }
}

/// Linear equations `rows * c = 0` in the ansatz constants.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub ansatz: AnsatzSpec,
    pub deps: Vec<String>,
    pub rows: Matrix,
    /// `(equation index, collected monomial)` for each row.
    pub labels: Vec<(usize, Monomial)>,
}

#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub fields: Vec<VectorField>,
    pub vectors: Matrix,
    pub rank: usize,
    pub unknowns: usize,
    /// Parameter conditions assumed nonzero by the elimination, e.g. `a - 1`.
    pub case_splits: Vec<String>,
}

impl SolutionSpace {
    pub fn dim(&self) -> usize {
        self.fields.len()
    }
}

/// `Pr v (Delta_nu)` reduced modulo every equation and its consequences.
pub fn invariance_residuals(spec: &ProblemSpec, v: &VectorField) -> Result<Vec<Expr>, DetError> {
    let red = spec.reducer()?;
    residuals_with(spec, &red, v)
}

fn residuals_with(spec: &ProblemSpec, red: &Reducer, v: &VectorField) -> Result<Vec<Expr>, DetError> {
    let pv = prolong(v, spec.max_order().max(1));
    spec.equations
        .iter()
        .map(|eq| Ok(red.reduce(&pv.apply(&eq.lhs, &spec.ctx)?)))
        .collect()
}

/// Residual of a single-equation problem.
pub fn invariance_residual(spec: &ProblemSpec, v: &VectorField) -> Result<Expr, DetError> {
    Ok(invariance_residuals(spec, v)?.into_iter().sum())
}

/// Rows from per-unknown residual columns `cols[k][nu]`.
pub fn collect_rows(cols: &[Vec<Expr>]) -> (Matrix, Vec<(usize, Monomial)>) {
    let mut labels = std::collections::BTreeSet::new();
    for col in cols {
        for (nu, r) in col.iter().enumerate() {
            for (m, _) in r.terms() {
                labels.insert((nu, m.clone()));
            }
        }
    }
    let labels: Vec<(usize, Monomial)> = labels.into_iter().collect();
    let rows = labels
        .iter()
        .map(|(nu, m)| cols.iter().map(|col| col[*nu].coeff_of(m)).collect())
        .collect();
    (rows, labels)
}

pub fn generate_determining(spec: &ProblemSpec, ansatz: &AnsatzSpec) -> Result<LinearSystem, DetError> {
    let deps = spec.deps().to_vec();
    let red = spec.reducer()?;
    let ncomp = 2 + deps.len();
    let mut cols = Vec::new();
    for (slot, term) in ansatz.unknowns() {
        if slot >= ncomp {
            return Err(DetError::NoSuchSlot(slot));
        }
        let mut comps = vec![Expr::zero(); ncomp];
        comps[slot] = term.clone();
        let v = VectorField::from_components(&deps, comps);
        cols.push(residuals_with(spec, &red, &v)?);
    }
    let (rows, labels) = collect_rows(&cols);
    Ok(LinearSystem {
        ansatz: ansatz.clone(),
        deps,
        rows,
        labels,
    })
}

pub fn solve_determining(sys: &LinearSystem, param: &str) -> SolutionSpace {
    let n = sys.ansatz.len();
    let (vectors, ech) = nullspace(&sys.rows, n);
    let fields = vectors.iter().map(|c| sys.ansatz.field(&sys.deps, c)).collect();
    SolutionSpace {
        fields,
        vectors,
        rank: ech.pivots.len(),
        unknowns: n,
        case_splits: ech.conditions.iter().map(|p| fmt_poly(p, param)).collect(),
    }
}

/// Point symmetries with a polynomial ansatz of the given degree.
pub fn classical_symmetries(spec: &ProblemSpec, degree: u32) -> Result<SolutionSpace, DetError> {
    let sys = generate_determining(spec, &AnsatzSpec::classical(spec, degree))?;
    Ok(solve_determining(&sys, &spec.ctx.param))
}

/// Whether `v` lies in the span of `fields` (exact coefficient comparison).
pub fn in_span(fields: &[VectorField], v: &VectorField) -> Option<Vec<Coeff>> {
    let mut labels = std::collections::BTreeSet::new();
    let all: Vec<&VectorField> = fields.iter().chain(std::iter::once(v)).collect();
    for f in &all {
        for (i, c) in f.components().into_iter().enumerate() {
            for (m, _) in c.terms() {
                labels.insert((i, m.clone()));
            }
        }
    }
    let m: Matrix = labels
        .iter()
        .map(|(i, mono)| fields.iter().map(|f| f.components()[*i].coeff_of(mono)).collect())
        .collect();
    let b: Vec<Coeff> = labels.iter().map(|(i, mono)| v.components()[*i].coeff_of(mono)).collect();
    if fields.is_empty() {
        return if v.is_zero() { Some(Vec::new()) } else { None };
    }
    crate::linalg::solve(&m, &b)
}
