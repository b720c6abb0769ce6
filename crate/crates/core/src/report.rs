//! Command dispatch and analysis reports.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coeff::Coeff;
use crate::conslaw::{conservation_law, find_multipliers, MultiplierAnsatz};
use crate::detsolve::{classical_symmetries, in_span, invariance_residual};
use crate::dsl::Problem;
use crate::expr::{equal_by_sampling, Context, Expr, Symbol, Var};
use crate::flows::{exponentiate, transform_solution, verify_flow};
use crate::jet::on_function;
use crate::liealg::{combination_string, expr_mat_mul, LieAlgebra, Step};
use crate::nonclassical::{check_candidate, is_classical_lift, lift_classical, linear_ansatz_solve, nonclassical_determining, AugmentedSystem, Mode};
use crate::reduce::{chart_is_invariant, differential_invariant_residual, invariants, reduce_pde, InvariantChart};
use crate::vfield::VectorField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Command {
    Symmetries,
    Algebra,
    Adjoint,
    Optimal,
    Flows,
    Reduce,
    Invariants,
    Nonclassical,
    Conslaws,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Symmetries => "symmetries",
            Command::Algebra => "algebra",
            Command::Adjoint => "adjoint",
            Command::Optimal => "optimal",
            Command::Flows => "flows",
            Command::Reduce => "reduce",
            Command::Invariants => "invariants",
            Command::Nonclassical => "nonclassical",
            Command::Conslaws => "conslaws",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    pub degree: u32,
    pub jet_order: u32,
    pub xt_degree: u32,
    pub order: u32,
    pub mode: Mode,
    pub seed: u64,
    /// Linear combinations of basis names, e.g. `v1 + a*v3`.
    pub generators: Vec<String>,
    /// Invariant candidates, or `xi, eta, phi, psi` for nonclassical checks.
    pub candidates: Vec<String>,
    /// Coefficient vectors for `optimal`, e.g. `1, 0, 0, 2`.
    pub vectors: Vec<String>,
    /// Explicit solution to transport under the flows.
    pub solution: Option<String>,
    /// `y, w` chart to check against the first generator.
    pub chart: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            degree: 2,
            jet_order: 2,
            xt_degree: 1,
            order: 3,
            mode: Mode::Tau1,
            seed: 0,
            generators: vec![],
            candidates: vec![],
            vectors: vec![],
            solution: None,
            chart: None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{0}")]
    Failed(String),
}

fn failed(e: impl std::fmt::Display) -> RunError {
    RunError::Failed(e.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub label: String,
    pub text: String,
    /// Canonical strings of the expressions behind `text`.
    pub exprs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Section {
    pub title: String,
    /// Names of the symbols the expressions are written in.
    pub variables: Vec<String>,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub sections: Vec<Section>,
    pub diagnostics: Vec<String>,
    pub verified: bool,
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        let _ = writeln!(s, "input: sha256:{}", self.input_digest);
        for sec in &self.sections {
            let _ = writeln!(s, "\n== {} ==", sec.title);
            for e in &sec.entries {
                let flag = match e.verified {
                    Some(true) => "  [ok]",
                    Some(false) => "  [FAILED]",
                    None => "",
                };
                let _ = writeln!(s, "{}: {}{}", e.label, e.text, flag);
            }
        }
        if !self.diagnostics.is_empty() {
            let _ = writeln!(s, "\n== diagnostics ==");
            for d in &self.diagnostics {
                let _ = writeln!(s, "- {d}");
            }
        }
        let _ = writeln!(s, "\nverified: {}", if self.verified { "yes" } else { "NO" });
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn entry(&self, section: &str, label: &str) -> Option<&Entry> {
        self.sections
            .iter()
            .filter(|s| s.title == section)
            .flat_map(|s| &s.entries)
            .find(|e| e.label == label)
    }
}

struct Builder {
    sections: Vec<Section>,
    diagnostics: Vec<String>,
    ok: bool,
}

impl Builder {
    fn new() -> Self {
        Builder { sections: vec![], diagnostics: vec![], ok: true }
    }

    fn section(&mut self, title: impl Into<String>, ctx: &Context) {
        let mut variables = vec![ctx.indep[0].name.to_string(), ctx.indep[1].name.to_string()];
        variables.extend(ctx.deps.iter().cloned());
        variables.extend(ctx.symbols.keys().cloned());
        variables.extend(ctx.funcs.keys().cloned());
        if ctx.param != "_" {
            variables.push(ctx.param.clone());
        }
        self.sections.push(Section { title: title.into(), variables, entries: vec![] });
    }

    fn push(&mut self, label: impl Into<String>, text: impl Into<String>, exprs: Vec<String>, verified: Option<bool>) {
        if verified == Some(false) {
            self.ok = false;
        }
        self.sections
            .last_mut()
            .expect("section opened")
            .entries
            .push(Entry { label: label.into(), text: text.into(), exprs, verified });
    }

    fn note(&mut self, d: impl Into<String>) {
        self.diagnostics.push(d.into());
    }
}

/// `a == b` in normal form, confirmed by exact evaluation at 20 points.
pub fn confirm_equal(a: &Expr, b: &Expr, seed: u64) -> bool {
    a == b && equal_by_sampling(a, b, 20, seed)
}

fn field_exprs(v: &VectorField, ctx: &Context) -> Vec<String> {
    v.components().iter().map(|e| ctx.show(e)).collect()
}

/// Basis declared in the problem, or the computed symmetries.
fn basis(p: &Problem, cfg: &Config) -> Result<Vec<(String, VectorField)>, RunError> {
    if !p.basis.is_empty() {
        return Ok(p.basis.clone());
    }
    let space = classical_symmetries(&p.spec, cfg.degree).map_err(failed)?;
    Ok(space.fields.into_iter().enumerate().map(|(k, f)| (format!("v{}", k + 1), f)).collect())
}

/// Coordinates of a combination such as `v1 + a*v3`.
fn parse_combination(text: &str, names: &[String], ctx: &Context) -> Result<Vec<Coeff>, RunError> {
    let cctx = names.iter().fold(ctx.clone(), |c, n| c.with_symbol(Symbol::constant(n)));
    let e = cctx.parse(text).map_err(|e| RunError::Invalid(e.to_string()))?;
    let mut rest = e.clone();
    let mut out = Vec::new();
    for n in names {
        let var = Var::Sym(Symbol::constant(n));
        let parts = e.collect_by(&var);
        let c = match parts.get(&crate::expr::Exponent::from_integer(1)) {
            Some(c) => c.as_coeff().ok_or_else(|| RunError::Invalid(format!("coefficient of {n} is not constant")))?,
            None => Coeff::zero(),
        };
        rest = rest - Expr::var(var).scale(&c);
        out.push(c);
    }
    if !rest.is_zero() {
        return Err(RunError::Invalid(format!("`{text}` is not a linear combination of {}", names.join(", "))));
    }
    Ok(out)
}

fn combine(c: &[Coeff], basis: &[(String, VectorField)], deps: &[String]) -> VectorField {
    basis
        .iter()
        .zip(c)
        .fold(VectorField::zero(deps), |acc, ((_, v), k)| acc.add(&v.scale(k)))
}

/// Generators requested with `--generator`, or each basis element.
fn generators(p: &Problem, cfg: &Config) -> Result<Vec<(String, VectorField)>, RunError> {
    let b = basis(p, cfg)?;
    if cfg.generators.is_empty() {
        return Ok(b);
    }
    let names: Vec<String> = b.iter().map(|(n, _)| n.clone()).collect();
    cfg.generators
        .iter()
        .map(|g| {
            let c = parse_combination(g, &names, &p.spec.ctx)?;
            Ok((g.trim().to_string(), combine(&c, &b, p.spec.deps())))
        })
        .collect()
}

fn algebra(p: &Problem, cfg: &Config) -> Result<LieAlgebra, RunError> {
    let b = basis(p, cfg)?;
    let (names, fields): (Vec<String>, Vec<VectorField>) = b.into_iter().unzip();
    LieAlgebra::new(fields, names, &p.spec.ctx).map_err(failed)
}

fn combo_exprs(coords: &[Expr], names: &[String], ctx: &Context) -> String {
    let mut s = String::new();
    for (c, n) in coords.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let t = if *c == Expr::one() {
            n.clone()
        } else if *c == -Expr::one() {
            format!("-{n}")
        } else if c.len() == 1 {
            format!("{}*{}", ctx.show(c), n)
        } else {
            format!("({})*{}", ctx.show(c), n)
        };
        if s.is_empty() {
            s = t;
        } else if let Some(t) = t.strip_prefix('-') {
            let _ = write!(s, " - {t}");
        } else {
            let _ = write!(s, " + {t}");
        }
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

fn coeff_exprs(c: &[Coeff]) -> Vec<Expr> {
    c.iter().map(|k| Expr::constant(k.clone())).collect()
}

fn run_symmetries(p: &Problem, cfg: &Config, b: &mut Builder) -> Result<(), RunError> {
    let ctx = &p.spec.ctx;
    let space = classical_symmetries(&p.spec, cfg.degree).map_err(failed)?;
    b.section(format!("point symmetries (ansatz degree {})", cfg.degree), ctx);
    b.push("dimension", space.dim().to_string(), vec![], None);
    b.push("unknowns", format!("{} (rank {})", space.unknowns, space.rank), vec![], None);
    for (k, f) in space.fields.iter().enumerate() {
        let r = invariance_residual(&p.spec, f).map_err(failed)?;
        let ok = confirm_equal(&r, &Expr::zero(), cfg.seed);
        b.push(format!("v{}", k + 1), f.show(ctx), field_exprs(f, ctx), Some(ok));
    }
    for c in &space.case_splits {
        b.note(format!("elimination assumed {c} != 0"));
    }
    if !p.basis.is_empty() {
        b.section("declared basis", ctx);
        for (n, f) in &p.basis {
            let r = invariance_residual(&p.spec, f).map_err(failed)?;
            let ok = r.is_zero() && in_span(&space.fields, f).is_some();
            b.push(n.clone(), f.show(ctx), field_exprs(f, ctx), Some(ok));
        }
    }
    Ok(())
}

fn run_algebra(p: &Problem, cfg: &Config, b: &mut Builder) -> Result<(), RunError> {
    let ctx = &p.spec.ctx;
    let g = algebra(p, cfg)?;
    let n = g.dim();
    b.section("commutator table", ctx);
    for i in 0..n {
        for j in 0..n {
            let c = &g.consts[i][j];
            b.push(
                format!("[{}, {}]", g.names[i], g.names[j]),
                combination_string(c, &g.names, ctx),
                coeff_exprs(c).iter().map(|e| ctx.show(e)).collect(),
                None,
            );
        }
    }
    b.section("structure", ctx);
    b.push("antisymmetry", "[v_i, v_j] = -[v_j, v_i]", vec![], Some(g.is_antisymmetric()));
    b.push("jacobi", "cyclic sum of [v_i, [v_j, v_k]] vanishes", vec![], Some(g.jacobi_holds()));
    let ds = g.derived_series();
    let list: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
    b.push("derived series", format!("[{}]", list.join(", ")), vec![], None);
    b.push("solvable", g.is_solvable().to_string(), vec![], None);
    for (k, basis) in g.derived_series_bases().iter().enumerate().skip(1) {
        let spans: Vec<String> = basis.iter().map(|c| combination_string(c, &g.names, ctx)).collect();
        b.push(format!("g^({k})"), format!("span{{{}}}", spans.join(", ")), vec![], None);
    }
    if ds.len() > 1 && ds[1] < n {
        b.note(format!(
            "the derived algebra g^(1) = [g, g] has dimension {} < {}, so g^(1) != g",
            ds[1], n
        ));
    }
    Ok(())
}

fn run_adjoint(p: &Problem, cfg: &Config, b: &mut Builder) -> Result<(), RunError> {
    let g = algebra(p, cfg)?;
    let eps = Symbol::group("eps");
    let (e1, e2) = (Symbol::group("eps1"), Symbol::group("eps2"));
    let ctx = p.spec.ctx.clone().with_symbol(eps.clone()).with_symbol(e1.clone()).with_symbol(e2.clone());
    let n = g.dim();
    b.section("adjoint representation Ad(exp(eps v_i)) v_j", &ctx);
    let mut checks = Vec::new();
    for i in 0..n {
        let m = g.adjoint_exp(i, &eps, Some(cfg.order.max(8))).map_err(failed)?;
        for j in 0..n {
            let col: Vec<Expr> = m.entries.iter().map(|row| row[j].clone()).collect();
            b.push(
                format!("Ad(exp(eps {})) {}", g.names[i], g.names[j]),
                combo_exprs(&col, &g.names, &ctx),
                col.iter().map(|e| ctx.show(e)).collect(),
                None,
            );
        }
        if m.truncated {
            b.note(format!("Ad(exp(eps {})) is a truncated series", g.names[i]));
        }
        checks.push((i, m));
    }
    b.section("adjoint checks", &ctx);
    for (i, m) in &checks {
        let lhs = expr_mat_mul(&m.at(&Expr::sym(e1.clone())).map_err(failed)?, &m.at(&Expr::sym(e2.clone())).map_err(failed)?);
        let rhs = m.at(&(Expr::sym(e1.clone()) + Expr::sym(e2.clone()))).map_err(failed)?;
        let law = !m.truncated && lhs.iter().flatten().zip(rhs.iter().flatten()).all(|(a, c)| confirm_equal(a, c, cfg.seed));
        b.push(format!("group law {}", g.names[*i]), "M(eps1) M(eps2) = M(eps1 + eps2)", vec![], Some(law));
        let ad = g.ad_matrix(*i);
        let ev = Var::Sym(eps.clone());
        let d0 = m
            .entries
            .iter()
            .zip(&ad)
            .all(|(row, arow)| {
                row.iter().zip(arow).all(|(x, a)| {
                    let d = x.partial(&ev).subs1(ev.clone(), Expr::zero()).unwrap_or_else(|_| x.partial(&ev));
                    d == -Expr::constant(a.clone())
                })
            });
        b.push(format!("generator {}", g.names[*i]), "dM/deps at 0 = -ad", vec![], Some(d0));
        let kind = if m.is_polynomial() { "series terminates" } else { "closed form from the spectrum" };
        b.push(format!("form {}", g.names[*i]), kind, vec![], None);
    }
    Ok(())
}

/// Parenthesize anything but a bare number or name.
fn paren(s: &str) -> String {
    if s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        s.to_string()
    } else {
        format!("({s})")
    }
}

fn word_string(word: &[Step], names: &[String], param: &str) -> String {
    if word.is_empty() {
        return "(none)".into();
    }
    word.iter()
        .map(|s| match s {
            Step::Adjoint { generator, eps } => format!("Ad(exp({} {}))", paren(&eps.fmt_with(param)), names[*generator]),
            Step::Scale(c) => format!("divide by {}", paren(&c.fmt_with(param))),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn run_optimal(p: &Problem, cfg: &Config, b: &mut Builder) -> Result<(), RunError> {
    let ctx = &p.spec.ctx;
    let g = algebra(p, cfg)?;
    let n = g.dim();
    let vectors: Vec<Vec<Coeff>> = if cfg.vectors.is_empty() {
        // every nonzero 0/1 combination of the basis
        (1u32..(1 << n))
            .map(|mask| (0..n).map(|k| if mask >> k & 1 == 1 { Coeff::one() } else { Coeff::zero() }).collect())
            .collect()
    } else {
        cfg.vectors
            .iter()
            .map(|s| {
                let c = s
                    .split(',')
                    .map(|x| ctx.parse(x).ok().and_then(|e| e.as_coeff()).ok_or_else(|| RunError::Invalid(format!("bad coefficient in `{s}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                if c.len() != n {
                    return Err(RunError::Invalid(format!("`{s}` needs {n} coefficients")));
                }
                Ok(c)
            })
            .collect::<Result<_, _>>()?
    };
    b.section("orbit reduction", ctx);
    let mut reps = std::collections::BTreeSet::new();
    for v in vectors {
        let r = g.orbit_reduce(&v).map_err(failed)?;
        let replay = g.apply_word(&v, &r.word).map_err(failed)?;
        let rep = combination_string(&r.representative, &g.names, ctx);
        reps.insert(rep.clone());
        b.push(
            combination_string(&v, &g.names, ctx),
            format!("-> {} via {}", rep, word_string(&r.word, &g.names, &ctx.param)),
            coeff_exprs(&r.representative).iter().map(|e| ctx.show(e)).collect(),
            Some(replay == r.representative),
        );
    }
    b.section("representatives", ctx);
    for (k, r) in reps.iter().enumerate() {
        b.push(format!("{}", k + 1), r.clone(), vec![], None);
    }
    Ok(())
}

fn run_flows(p: &Problem, cfg: &Config, b: &mut Builder) -> Result<(), RunError> {
    let s = Symbol::group("s");
    let ctx = p.spec.ctx.clone().with_symbol(s.clone()).with_symbol(Symbol::constant("c"));
    let sol = cfg
        .solution
        .as_ref()
        .map(|t| ctx.parse(t).map_err(|e| RunError::Invalid(e.to_string())))
        .transpose()?;
    b.section("one-parameter groups", &ctx);
    let mut groups = Vec::new();
    for (n, v) in generators(p, cfg)? {
        let g = match exponentiate(&v, &ctx, &s) {
            Ok(g) => g,
            Err(e) => {
                b.note(format!("{n}: {e}"));
                continue;
            }
        };
        let ok = verify_flow(&v, &g, &ctx).map_err(failed)?;
        let text = g.maps.iter().map(|m| ctx.show(m)).collect::<Vec<_>>().join(", ");
        b.push(n.clone(), format!("({text})"), g.maps.iter().map(|m| ctx.show(m)).collect(), Some(ok));
        groups.push((n, g));
    }
    if let Some(f) = sol {
        let dep = p.spec.deps()[0].clone();
        b.section(format!("transported solution {} = {}", dep, ctx.show(&f)), &ctx);
        for (n, g) in &groups {
            match transform_solution(g, &f, &ctx) {
                Ok(tf) => {
                    let ok = p.spec.equations.iter().all(|eq| {
                        on_function(&eq.lhs, &dep, &tf, &ctx).is_ok_and(|r| confirm_equal(&r, &Expr::zero(), cfg.seed))
                    });
                    b.push(n.clone(), ctx.show(&tf), vec![ctx.show(&tf)], Some(ok));
                }
                Err(e) => b.note(format!("{n}: {e}")),
            }
        }
    }
    Ok(())
}

fn parse_chart(text: &str, ctx: &Context) -> Result<(Expr, Expr), RunError> {
    let (y, w) = text.split_once(',').ok_or_else(|| RunError::Invalid("chart must be `y, w`".into()))?;
    let parse = |s: &str| ctx.parse(s).map_err(|e| RunError::Invalid(e.to_string()));
    Ok((parse(y)?, parse(w)?))
}

fn run_reduce(p: &Problem, cfg: &Config, b: &mut Builder) -> Result<(), RunError> {
    let ctx = &p.spec.ctx;
    let octx = InvariantChart::ode_context(&ctx.param);
    let gens = generators(p, cfg)?;
    b.section("similarity reductions", ctx);
    let mut odes = Vec::new();
    for (n, v) in &gens {
        let chart = match invariants(v, ctx) {
            Ok(c) => c,
            Err(e) => {
                b.note(format!("{n}: {e}"));
                continue;
            }
        };
        let inv = chart_is_invariant(v, &chart, ctx);
        b.push(
            format!("{n} chart"),
            format!("y = {}, w = {}, u = {}", ctx.show(&chart.y), ctx.show(&chart.w), octx.show(&chart.reconstruction)),
            vec![ctx.show(&chart.y), ctx.show(&chart.w)],
            Some(inv),
        );
        match reduce_pde(&p.spec, &chart) {
            Ok(r) => odes.push((n, r.ode)),
            Err(e) => b.note(format!("{n}: {e}")),
        }
    }
    b.section("reduced equations", &octx);
    for (n, ode) in odes {
        b.push(format!("{n} ode"), format!("{} = 0", octx.show(&ode)), vec![octx.show(&ode)], None);
    }
    if let (Some(text), Some((n, v))) = (&cfg.chart, gens.first()) {
        let (y, w) = parse_chart(text, ctx)?;
        b.section(format!("supplied chart for {n}"), ctx);
        let ry = v.apply_point(&y, ctx);
        let rw = v.apply_point(&w, ctx);
        b.push("y", ctx.show(&y), vec![ctx.show(&ry)], Some(ry.is_zero()));
        b.push("w", ctx.show(&w), vec![ctx.show(&rw)], Some(rw.is_zero()));
        if !rw.is_zero() || !ry.is_zero() {
            b.note(format!("supplied chart is not annihilated by {n}: residuals {}, {}", ctx.show(&ry), ctx.show(&rw)));
        }
    }
    Ok(())
}

fn run_invariants(p: &Problem, cfg: &Config, b: &mut Builder) -> Result<(), RunError> {
    let ctx = &p.spec.ctx;
    for (n, v) in generators(p, cfg)? {
        b.section(format!("invariants of {n} (order {})", cfg.order), ctx);
        if cfg.candidates.is_empty() {
            match invariants(&v, ctx) {
                Ok(c) => {
                    for (l, e) in [("y", &c.y), ("w", &c.w)] {
                        let r = differential_invariant_residual(&v, e, 0, ctx).map_err(failed)?;
                        b.push(l, ctx.show(e), vec![ctx.show(e)], Some(confirm_equal(&r, &Expr::zero(), cfg.seed)));
                    }
                }
                Err(e) => b.note(format!("{n}: {e}")),
            }
            continue;
        }
        for c in &cfg.candidates {
            let e = ctx.parse(c).map_err(|e| RunError::Invalid(e.to_string()))?;
            let r = differential_invariant_residual(&v, &e, cfg.order, ctx).map_err(failed)?;
            let ok = confirm_equal(&r, &Expr::zero(), cfg.seed);
            if !ok {
                b.note(format!("{} is not invariant under {n}: residual {}", ctx.show(&e), ctx.show(&r)));
            }
            b.push(ctx.show(&e), format!("residual {}", ctx.show(&r)), vec![ctx.show(&r)], Some(ok));
        }
    }
    Ok(())
}

fn normalizable(v: &VectorField, mode: Mode) -> bool {
    let single = |e: &Expr| !e.is_zero() && e.as_single_term().is_some();
    match mode {
        Mode::Tau1 => single(&v.eta),
        Mode::Tau0 => v.eta.is_zero() && single(&v.xi),
    }
}

fn run_nonclassical(p: &Problem, cfg: &Config, b: &mut Builder) -> Result<(), RunError> {
    let sys = AugmentedSystem::from_scalar(&p.spec, "v").map_err(failed)?;
    let gctx = sys.generic_context();
    let ctx = sys.ctx().clone();
    let tau = cfg.mode.tau();
    b.section(format!("determining expressions (tau = {tau})"), &gctx);
    for (k, r) in nonclassical_determining(&sys, cfg.mode).map_err(failed)?.iter().enumerate() {
        b.push(format!("equation {}", k + 1), format!("{} = 0", gctx.show(r)), vec![gctx.show(r)], None);
    }
    b.section(format!("candidates (tau = {tau})"), &ctx);
    let mut cands: Vec<(String, VectorField)> = Vec::new();
    for (n, v) in basis(p, cfg)? {
        if normalizable(&v, cfg.mode) {
            cands.push((format!("{n} (lifted)"), lift_classical(&sys, &v).map_err(failed)?));
        }
    }
    for c in &cfg.candidates {
        let parts = c.split(',').map(|s| ctx.parse(s)).collect::<Result<Vec<_>, _>>().map_err(|e| RunError::Invalid(e.to_string()))?;
        if parts.len() != 4 {
            return Err(RunError::Invalid("candidate needs `xi, eta, phi, psi`".into()));
        }
        cands.push((c.trim().to_string(), VectorField::from_components(sys.spec.deps(), parts)));
    }
    for (n, v) in cands {
        let r = check_candidate(&sys, &v, cfg.mode).map_err(failed)?;
        let text = r.residuals.iter().map(|e| ctx.show(e)).collect::<Vec<_>>().join("; ");
        if r.jet_dependent {
            b.note(format!("{n}: coefficients depend on derivatives"));
        }
        for k in &r.constraints {
            b.note(format!("{n}: left-over constraint {} = 0", ctx.show(k)));
        }
        b.push(n, format!("residuals {text}"), r.residuals.iter().map(|e| ctx.show(e)).collect(), Some(r.passes()));
    }
    b.section(format!("linear ansatz of degree {} (tau = {tau})", cfg.degree), &ctx);
    let sol = linear_ansatz_solve(&sys, cfg.mode, cfg.degree).map_err(failed)?;
    match &sol.particular {
        None => b.push("solutions", "none", vec![], None),
        Some(pt) => {
            let mut all = is_classical_lift(&sys, &p.spec, pt).map_err(failed)?;
            b.push("particular", pt.show(&ctx), field_exprs(pt, &ctx), Some(all));
            for (k, h) in sol.homogeneous.iter().enumerate() {
                let v = pt.add(h);
                let ok = is_classical_lift(&sys, &p.spec, &v).map_err(failed)?;
                all &= ok;
                b.push(format!("particular + h{}", k + 1), v.show(&ctx), field_exprs(&v, &ctx), Some(ok));
            }
            if all {
                b.note("every solution of the linear ansatz is a lifted point symmetry");
            }
        }
    }
    Ok(())
}

fn run_conslaws(p: &Problem, cfg: &Config, b: &mut Builder) -> Result<(), RunError> {
    let ctx = &p.spec.ctx;
    let dep = p.spec.deps()[0].clone();
    let ansatz = MultiplierAnsatz::products(ctx, cfg.xt_degree, &MultiplierAnsatz::jet_factors(&dep, cfg.jet_order));
    let space = find_multipliers(&p.spec, &ansatz).map_err(failed)?;
    b.section(format!("multipliers ({} ansatz terms)", ansatz.terms.len()), ctx);
    b.push("dimension", space.multipliers.len().to_string(), vec![], None);
    for c in &space.case_splits {
        b.note(format!("elimination assumed {c} != 0"));
    }
    for (k, m) in space.multipliers.iter().enumerate() {
        let label = format!("law {}", k + 1);
        match conservation_law(&p.spec, m) {
            Ok(law) => {
                let f = &m.lambda * &p.spec.equations[0].lhs;
                let ok = confirm_equal(&law.flux.divergence(), &f, cfg.seed);
                b.push(
                    label,
                    format!(
                        "Lambda = {}; Psi = {}; Phi = {}",
                        ctx.show(&m.lambda),
                        ctx.show(&law.flux.psi),
                        ctx.show(&law.flux.phi)
                    ),
                    vec![ctx.show(&m.lambda), ctx.show(&law.flux.psi), ctx.show(&law.flux.phi)],
                    Some(ok),
                );
            }
            Err(e) => {
                b.push(label, format!("Lambda = {}: {e}", ctx.show(&m.lambda)), vec![ctx.show(&m.lambda)], Some(false));
            }
        }
    }
    Ok(())
}

pub fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn run(cmd: Command, p: &Problem, cfg: &Config) -> Result<Report, RunError> {
    let mut b = Builder::new();
    match cmd {
        Command::Symmetries => run_symmetries(p, cfg, &mut b)?,
        Command::Algebra => run_algebra(p, cfg, &mut b)?,
        Command::Adjoint => run_adjoint(p, cfg, &mut b)?,
        Command::Optimal => run_optimal(p, cfg, &mut b)?,
        Command::Flows => run_flows(p, cfg, &mut b)?,
        Command::Reduce => run_reduce(p, cfg, &mut b)?,
        Command::Invariants => run_invariants(p, cfg, &mut b)?,
        Command::Nonclassical => run_nonclassical(p, cfg, &mut b)?,
        Command::Conslaws => run_conslaws(p, cfg, &mut b)?,
    }
    Ok(Report {
        command: cmd.name().into(),
        input_digest: digest(&p.source),
        sections: b.sections,
        diagnostics: b.diagnostics,
        verified: b.ok,
    })
}

/// Re-parse every expression payload of a section in the named context.
pub fn round_trips(r: &Report, ctx_for: impl Fn(&Section) -> Context) -> bool {
    r.sections.iter().all(|s| {
        let ctx = ctx_for(s);
        s.entries.iter().flat_map(|e| &e.exprs).all(|t| ctx.parse(t).is_ok_and(|e| ctx.show(&e) == *t))
    })
}
