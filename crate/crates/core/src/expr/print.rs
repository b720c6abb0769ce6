//! Canonical text form. The output re-parses to the identical normal form.

use num_traits::{One, Signed};

use super::{Context, Exponent, Expr, Monomial, Var};
use crate::coeff::{fmt_poly, fmt_rational, Coeff};

pub fn var_string(v: &Var, ctx: &Context) -> String {
    match v {
        Var::Jet(j) => {
            let k = j.idx.0;
            if k == [0, 0] {
                return j.dep.to_string();
            }
            let mut dirs = Vec::new();
            for (d, &n) in k.iter().enumerate() {
                for _ in 0..n {
                    dirs.push(ctx.indep[d].name.to_string());
                }
            }
            suffixed(&j.dep, &dirs)
        }
        Var::Func(f) => {
            let mut dirs = Vec::new();
            for (i, &n) in f.derivs.iter().enumerate() {
                for _ in 0..n {
                    dirs.push(f.args[i].arg_name());
                }
            }
            if dirs.is_empty() {
                f.name.to_string()
            } else {
                suffixed(&f.name, &dirs)
            }
        }
        Var::Sym(s) => s.name.to_string(),
        Var::Exp(s) => format!("exp({})", s.name),
    }
}

fn suffixed(base: &str, dirs: &[String]) -> String {
    if dirs.len() == 1 {
        format!("{}_{}", base, dirs[0])
    } else {
        format!("{}_{{{}}}", base, dirs.join(","))
    }
}

fn factor_string(v: &Var, e: &Exponent, ctx: &Context) -> String {
    if let Var::Exp(s) = v {
        return if e.is_one() {
            format!("exp({})", s.name)
        } else if *e == -Exponent::from_integer(1) {
            format!("exp(-{})", s.name)
        } else if e.is_integer() {
            format!("exp({}*{})", e.numer(), s.name)
        } else {
            format!("exp({}/{}*{})", e.numer(), e.denom(), s.name)
        };
    }
    let base = var_string(v, ctx);
    if e.is_one() {
        base
    } else if e.is_integer() && e.is_positive() {
        format!("{}^{}", base, e.numer())
    } else if e.is_integer() {
        format!("{}^({})", base, e.numer())
    } else {
        format!("{}^({}/{})", base, e.numer(), e.denom())
    }
}

fn monomial_string(m: &Monomial, ctx: &Context) -> String {
    m.factors()
        .iter()
        .map(|(v, e)| factor_string(v, e, ctx))
        .collect::<Vec<_>>()
        .join("*")
}

/// Coefficient magnitude as a printable factor; `None` when it is 1.
fn coeff_factor(c: &Coeff, ctx: &Context) -> Option<String> {
    if c.is_one() {
        return None;
    }
    if let Some(r) = c.as_rational() {
        return Some(fmt_rational(&r));
    }
    let num = c.num();
    let single = num.coeffs().iter().filter(|x| !num_traits::Zero::is_zero(*x)).count() == 1;
    let ns = fmt_poly(num, &ctx.param);
    let ns = if single { ns } else { format!("({})", ns) };
    if c.den().degree() == Some(0) {
        Some(ns)
    } else {
        let den = c.den();
        let den_single = den.coeffs().iter().filter(|x| !num_traits::Zero::is_zero(*x)).count() == 1;
        let ds = fmt_poly(den, &ctx.param);
        if den_single {
            Some(format!("{}/{}", ns, ds))
        } else {
            Some(format!("{}/({})", ns, ds))
        }
    }
}

pub fn expr_string(e: &Expr, ctx: &Context) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (m, c) in e.terms() {
        let neg = c.is_negative();
        let mag = if neg { -c } else { c.clone() };
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let cf = coeff_factor(&mag, ctx);
        match (cf, m.is_one()) {
            (None, true) => s.push('1'),
            (Some(cs), true) => s.push_str(&cs),
            (None, false) => s.push_str(&monomial_string(m, ctx)),
            (Some(cs), false) => {
                s.push_str(&cs);
                s.push('*');
                s.push_str(&monomial_string(m, ctx));
            }
        }
    }
    s
}
