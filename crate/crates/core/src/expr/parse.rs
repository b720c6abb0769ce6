//! Expression grammar.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' ('-')? atom)?
//! atom    := integer | name | 'exp' '(' sum ')' | 'D' '[' name (',' dir)* ']' | '(' sum ')'
//! name    := ident ( '_' dirs | '_{' dir (',' dir)* '}' )?
//! ```
//!
//! `u_xxt`, `u_{x,x,t}` and `D[u,x,x,t]` denote the same jet variable.
//! Unknown-function derivatives use the same suffix with argument names.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{exp_of_linear, Context, Exponent, Expr, ExprError, FuncVar, JetVar, MultiIndex, Var};
use crate::coeff::Coeff;

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(BigInt),
    Name { name: String, dirs: Vec<String>, pos: usize },
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, Box<Ast>),
    Exp(Box<Ast>, usize),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

pub fn parse(text: &str) -> Result<Ast, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    if p.pos >= p.src.len() {
        return Err(p.err("empty expression"));
    }
    let a = p.sum()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err(&format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(a)
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ExprError {
        ExprError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn sum(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.product()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.product()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let e = self.atom()?;
            let e = if neg { Ast::Neg(Box::new(e)) } else { e };
            return Ok(Ast::Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            Some(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
        } else {
            None
        }
    }

    fn atom(&mut self) -> Result<Ast, ExprError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Ast::Num(s.parse().unwrap()))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let pos = self.pos;
                let name = self.ident().unwrap();
                if name == "exp" && self.peek() == Some(b'(') {
                    self.pos += 1;
                    let e = self.sum()?;
                    self.expect(b')')?;
                    return Ok(Ast::Exp(Box::new(e), pos));
                }
                if name == "D" && self.peek() == Some(b'[') {
                    self.pos += 1;
                    let base = self.ident().ok_or_else(|| self.err("expected a name"))?;
                    let mut dirs = Vec::new();
                    while self.peek() == Some(b',') {
                        self.pos += 1;
                        dirs.push(self.ident().ok_or_else(|| self.err("expected a direction"))?);
                    }
                    self.expect(b']')?;
                    return Ok(Ast::Name {
                        name: base,
                        dirs,
                        pos,
                    });
                }
                let mut dirs = Vec::new();
                if self.pos < self.src.len() && self.src[self.pos] == b'_' {
                    self.pos += 1;
                    if self.pos < self.src.len() && self.src[self.pos] == b'{' {
                        self.pos += 1;
                        loop {
                            dirs.push(self.ident().ok_or_else(|| self.err("expected a direction"))?);
                            match self.peek() {
                                Some(b',') => self.pos += 1,
                                Some(b'}') => {
                                    self.pos += 1;
                                    break;
                                }
                                _ => return Err(self.err("expected `,` or `}`")),
                            }
                        }
                    } else {
                        let start = self.pos;
                        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                            dirs.push((self.src[self.pos] as char).to_string());
                            self.pos += 1;
                        }
                        if start == self.pos {
                            return Err(self.err("expected derivative directions after `_`"));
                        }
                    }
                }
                Ok(Ast::Name { name, dirs, pos })
            }
            Some(c) => Err(self.err(&format!("unexpected `{}`", c as char))),
        }
    }
}

impl Ast {
    /// Resolve names against `ctx` and build the normal form.
    pub fn resolve(&self, ctx: &Context) -> Result<Expr, ExprError> {
        Ok(match self {
            Ast::Num(n) => Expr::rational(crate::coeff::Rational::from_integer(n.clone())),
            Ast::Name { name, dirs, pos } => resolve_name(name, dirs, *pos, ctx)?,
            Ast::Neg(a) => -a.resolve(ctx)?,
            Ast::Add(a, b) => a.resolve(ctx)? + b.resolve(ctx)?,
            Ast::Sub(a, b) => a.resolve(ctx)? - b.resolve(ctx)?,
            Ast::Mul(a, b) => a.resolve(ctx)? * b.resolve(ctx)?,
            Ast::Div(a, b) => a.resolve(ctx)?.checked_div(&b.resolve(ctx)?)?,
            Ast::Pow(a, b) => {
                let base = a.resolve(ctx)?;
                let e = b.resolve(ctx)?;
                let r = e
                    .as_rational()
                    .ok_or_else(|| ExprError::NonPolynomial("non-constant exponent".into()))?;
                let q = Exponent::new(
                    r.numer().to_i64().ok_or_else(|| ExprError::NonPolynomial("exponent too large".into()))?,
                    r.denom().to_i64().ok_or_else(|| ExprError::NonPolynomial("exponent too large".into()))?,
                );
                base.pow(q)?
            }
            Ast::Exp(a, _) => exp_of_linear(&a.resolve(ctx)?, Exponent::from_integer(1))?,
        })
    }
}

fn resolve_name(name: &str, dirs: &[String], pos: usize, ctx: &Context) -> Result<Expr, ExprError> {
    let unknown = || ExprError::UnknownSymbol {
        name: if dirs.is_empty() {
            name.to_string()
        } else {
            format!("{}_{{{}}}", name, dirs.join(","))
        },
        pos,
    };
    if ctx.deps.iter().any(|d| d == name) {
        let mut idx = MultiIndex::ZERO;
        for d in dirs {
            let k = ctx
                .indep
                .iter()
                .position(|s| &*s.name == d.as_str())
                .ok_or_else(unknown)?;
            idx = idx.bump(k);
        }
        return Ok(Expr::var(Var::Jet(JetVar::new(name, idx))));
    }
    if let Some(args) = ctx.funcs.get(name) {
        let mut f = FuncVar::new(name, args);
        for d in dirs {
            let k = args.iter().position(|a| a.arg_name() == *d).ok_or_else(unknown)?;
            f = f.diff(k);
        }
        return Ok(Expr::var(Var::Func(f)));
    }
    if !dirs.is_empty() {
        return Err(unknown());
    }
    if name == ctx.param {
        return Ok(Expr::constant(Coeff::param()));
    }
    if let Some(s) = ctx.indep.iter().find(|s| &*s.name == name) {
        return Ok(Expr::sym(s.clone()));
    }
    if let Some(s) = ctx.symbols.get(name) {
        return Ok(Expr::sym(s.clone()));
    }
    Err(unknown())
}
