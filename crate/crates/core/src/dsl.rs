//! Line-oriented problem files.
//!
//! ```text
//! indep x t;
//! dep u(x,t);
//! param a nonzero;
//! eq: D[u,t] - D[u,x,x,t] + a*D[u,x]*(1 - D[u,t]) = 0;
//! basis v1: [1, 0, 0];
//! ```
//!
//! Statements end with `;`, `#` starts a comment. Jets are written
//! `D[u, x, x, t]` or `u_{x,x,t}`.

use std::path::Path;

use thiserror::Error;

use crate::expr::{Context, Expr, ExprError, JetVar};
use crate::jet::{solve_for, Equation, ProblemSpec};
use crate::vfield::VectorField;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DslError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Validation { line: usize, msg: String },
    #[error("cannot read {0}: {1}")]
    Io(String, String),
}

impl DslError {
    pub fn is_validation(&self) -> bool {
        matches!(self, DslError::Validation { .. })
    }
}

/// A problem together with an optional named basis of generators.
#[derive(Clone, Debug)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub basis: Vec<(String, VectorField)>,
    pub source: String,
}

/// Rewrite `D[u, x, t]` into `u_{x,t}`.
fn expand_d(text: &str, line: usize) -> Result<String, DslError> {
    let mut out = String::new();
    let mut rest = text;
    while let Some(k) = rest.find("D[") {
        let boundary = rest[..k].chars().last().is_none_or(|c| !(c.is_alphanumeric() || c == '_'));
        if !boundary {
            out.push_str(&rest[..k + 2]);
            rest = &rest[k + 2..];
            continue;
        }
        out.push_str(&rest[..k]);
        let close = rest[k..].find(']').ok_or_else(|| DslError::Parse {
            line,
            msg: "unclosed D[".into(),
        })?;
        let parts: Vec<&str> = rest[k + 2..k + close].split(',').map(str::trim).collect();
        if parts.is_empty() || parts[0].is_empty() {
            return Err(DslError::Parse { line, msg: "empty D[]".into() });
        }
        out.push_str(parts[0]);
        if parts.len() > 1 {
            out.push_str(&format!("_{{{}}}", parts[1..].join(",")));
        }
        rest = &rest[k + close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Split `[a, b, c]` at top-level commas.
fn split_list(s: &str, line: usize) -> Result<Vec<String>, DslError> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| DslError::Parse { line, msg: "expected [..]".into() })?;
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in inner.chars() {
        match c {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur.trim().to_string());
    Ok(out)
}

fn expr_error(line: usize, e: ExprError) -> DslError {
    match e {
        ExprError::UnknownSymbol { .. } => DslError::Validation { line, msg: e.to_string() },
        _ => DslError::Parse { line, msg: e.to_string() },
    }
}

fn is_ident(s: &str) -> bool {
    let mut c = s.chars();
    c.next().is_some_and(|c| c.is_alphabetic()) && c.all(|c| c.is_alphanumeric())
}

/// Highest-order jet with an invertible constant coefficient.
fn pick_leading(lhs: &Expr, nu: usize, ctx: &Context) -> Option<JetVar> {
    let mut jets: Vec<JetVar> = lhs.jet_vars().into_iter().collect();
    jets.sort_by_key(|j| std::cmp::Reverse(j.order()));
    jets.into_iter().find(|j| solve_for(lhs, j, nu, ctx).is_ok())
}

pub fn parse_problem(text: &str) -> Result<Problem, DslError> {
    let mut indep: Option<[String; 2]> = None;
    let mut deps: Vec<String> = Vec::new();
    let mut param: Option<(String, bool)> = None;
    let mut eqs: Vec<(usize, String)> = Vec::new();
    let mut basis: Vec<(usize, String, String)> = Vec::new();

    // statements, tagged with the line they start on
    let mut stmts: Vec<(usize, String)> = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    for (i, raw) in text.lines().enumerate() {
        let l = raw.split('#').next().unwrap_or("");
        for piece in l.split_inclusive(';') {
            if cur.trim().is_empty() {
                start = i + 1;
            }
            if let Some(p) = piece.strip_suffix(';') {
                cur.push_str(p);
                stmts.push((start, cur.trim().to_string()));
                cur.clear();
            } else {
                cur.push_str(piece);
                cur.push(' ');
            }
        }
    }
    if !cur.trim().is_empty() {
        return Err(DslError::Parse { line: start, msg: "missing `;`".into() });
    }
    if stmts.is_empty() {
        return Err(DslError::Parse { line: 1, msg: "empty problem".into() });
    }

    for (line, s) in stmts {
        let (kw, rest) = s.split_once(|c: char| c.is_whitespace() || c == ':').unwrap_or((&s, ""));
        let rest = rest.trim().trim_start_matches(':').trim();
        match kw {
            "indep" => {
                let names: Vec<&str> = rest.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
                if names.len() != 2 || !names.iter().all(|n| is_ident(n)) {
                    return Err(DslError::Parse { line, msg: "expected two independent variables".into() });
                }
                indep = Some([names[0].into(), names[1].into()]);
            }
            "dep" => {
                let ind = indep.as_ref().ok_or_else(|| DslError::Validation {
                    line,
                    msg: "dep declared before indep".into(),
                })?;
                let (name, args) = rest.split_once('(').ok_or_else(|| DslError::Parse {
                    line,
                    msg: "expected dep u(x,t)".into(),
                })?;
                let args: Vec<&str> = args.trim_end_matches(')').split(',').map(str::trim).collect();
                if args != [ind[0].as_str(), ind[1].as_str()] {
                    return Err(DslError::Validation {
                        line,
                        msg: format!("dependent variable must depend on ({}, {})", ind[0], ind[1]),
                    });
                }
                let name = name.trim();
                if !is_ident(name) {
                    return Err(DslError::Parse { line, msg: format!("bad name `{name}`") });
                }
                deps.push(name.into());
            }
            "param" => {
                let mut it = rest.split_whitespace();
                let name = it.next().filter(|n| is_ident(n)).ok_or_else(|| DslError::Parse {
                    line,
                    msg: "expected parameter name".into(),
                })?;
                let nonzero = match it.next() {
                    None => false,
                    Some("nonzero") => true,
                    Some(w) => return Err(DslError::Parse { line, msg: format!("unknown qualifier `{w}`") }),
                };
                if param.is_some() {
                    return Err(DslError::Validation { line, msg: "only one parameter is supported".into() });
                }
                param = Some((name.into(), nonzero));
            }
            "eq" => eqs.push((line, rest.to_string())),
            "basis" => {
                let (name, list) = rest.split_once(':').ok_or_else(|| DslError::Parse {
                    line,
                    msg: "expected basis name: [..]".into(),
                })?;
                basis.push((line, name.trim().to_string(), list.trim().to_string()));
            }
            _ => return Err(DslError::Parse { line, msg: format!("unknown statement `{kw}`") }),
        }
    }

    let indep = indep.ok_or(DslError::Validation { line: 1, msg: "no independent variables".into() })?;
    if deps.is_empty() {
        return Err(DslError::Validation { line: 1, msg: "no dependent variable".into() });
    }
    if eqs.is_empty() {
        return Err(DslError::Validation { line: 1, msg: "no equation".into() });
    }
    let (pname, nonzero) = param.unwrap_or_else(|| ("_".into(), false));
    let dep_refs: Vec<&str> = deps.iter().map(String::as_str).collect();
    let ctx = Context::new([&indep[0], &indep[1]], &pname, &dep_refs);

    let mut equations = Vec::new();
    for (nu, (line, e)) in eqs.iter().enumerate() {
        let e = expand_d(e, *line)?;
        let (l, r) = e.split_once('=').ok_or_else(|| DslError::Parse {
            line: *line,
            msg: "expected `lhs = rhs`".into(),
        })?;
        let lhs = ctx.parse(l).map_err(|x| expr_error(*line, x))? - ctx.parse(r).map_err(|x| expr_error(*line, x))?;
        let leading = pick_leading(&lhs, nu, &ctx).ok_or_else(|| DslError::Validation {
            line: *line,
            msg: "no derivative can be solved for".into(),
        })?;
        equations.push(Equation { lhs, leading });
    }

    let mut fields = Vec::new();
    for (line, name, list) in basis {
        if !is_ident(&name) {
            return Err(DslError::Parse { line, msg: format!("bad basis name `{name}`") });
        }
        let items = split_list(&expand_d(&list, line)?, line)?;
        if items.len() != 2 + deps.len() {
            return Err(DslError::Validation {
                line,
                msg: format!("expected {} components", 2 + deps.len()),
            });
        }
        let comps = items
            .iter()
            .map(|s| ctx.parse(s).map_err(|x| expr_error(line, x)))
            .collect::<Result<Vec<_>, _>>()?;
        fields.push((name, VectorField::from_components(&deps, comps)));
    }

    Ok(Problem {
        spec: ProblemSpec {
            ctx,
            param_nonzero: nonzero,
            equations,
        },
        basis: fields,
        source: text.to_string(),
    })
}

pub fn load_problem(path: &Path) -> Result<Problem, DslError> {
    let text = std::fs::read_to_string(path).map_err(|e| DslError::Io(path.display().to_string(), e.to_string()))?;
    parse_problem(&text)
}

/// The bundled Hirota-Ramani problem file.
pub const HIROTA_RAMANI: &str = include_str!("../problems/hirota_ramani.pde");
