//! Exact evaluation at rational points: the independent oracle for
//! symbolic-zero claims.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Expr, ExprError, Var};
use crate::coeff::{exact_root, rat, Rational};

/// Values for every atom, plus the parameter value.
#[derive(Clone, Debug, Default)]
pub struct Point {
    pub vars: BTreeMap<Var, Rational>,
    pub param: Option<Rational>,
}

pub fn eval_at(e: &Expr, p: &Point) -> Result<Rational, ExprError> {
    let mut acc = Rational::zero();
    for (m, c) in e.terms() {
        let cv = if let Some(r) = c.as_rational() {
            r
        } else {
            let a = p.param.as_ref().ok_or_else(|| ExprError::Unbound("parameter".into()))?;
            c.eval(a).ok_or(ExprError::DivisionByZero)?
        };
        let mut term = cv;
        for (v, ex) in m.factors() {
            let x = p
                .vars
                .get(v)
                .ok_or_else(|| ExprError::Unbound(v.to_string()))?;
            let base = if ex.is_integer() {
                x.clone()
            } else {
                exact_root(x, *ex.denom() as u32).ok_or_else(|| {
                    ExprError::NonPolynomial(format!("no exact root of {} for {}", x, v))
                })?
            };
            let k = *ex.numer() as i32;
            if k < 0 && base.is_zero() {
                return Err(ExprError::DivisionByZero);
            }
            term *= num_traits::pow::Pow::pow(&base, k);
        }
        acc += term;
    }
    Ok(acc)
}

/// Random nonzero rational point for every atom of `e`. Atoms carrying
/// fractional exponents are sampled as exact powers so roots stay rational.
pub fn random_point(e: &Expr, rng: &mut impl Rng) -> Point {
    let mut lcm: BTreeMap<Var, i64> = BTreeMap::new();
    for (m, _) in e.terms() {
        for (v, ex) in m.factors() {
            let l = lcm.entry(v.clone()).or_insert(1);
            *l = l.lcm(ex.denom());
        }
    }
    let sample = |rng: &mut dyn rand::RngCore| {
        let mut n: i64 = 0;
        while n == 0 {
            n = rng.gen_range(-9..=9);
        }
        rat(n, rng.gen_range(1..=5))
    };
    let mut p = Point::default();
    for (v, l) in lcm {
        let mut r = sample(rng);
        if l % 2 == 0 {
            r = r.abs();
        }
        p.vars.insert(v, num_traits::pow::Pow::pow(&r, l as i32));
    }
    p.param = Some(sample(rng));
    p
}

/// True when `e` evaluates to zero at `n` random points. Points where a
/// coefficient denominator vanishes are redrawn.
pub fn zero_by_sampling(e: &Expr, n: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut attempts = 0;
    while done < n {
        attempts += 1;
        assert!(attempts < 50 * n + 100, "could not find admissible sample points");
        let p = random_point(e, &mut rng);
        match eval_at(e, &p) {
            Ok(v) if v.is_zero() => done += 1,
            Ok(_) => return false,
            Err(ExprError::DivisionByZero) => continue,
            Err(err) => panic!("oracle evaluation failed: {}", err),
        }
    }
    true
}

/// True when `a` and `b` agree at `n` random points, each expression
/// evaluated separately.
pub fn equal_by_sampling(a: &Expr, b: &Expr, n: usize, seed: u64) -> bool {
    let probe: Expr = a
        .terms()
        .chain(b.terms())
        .map(|(m, _)| Expr::term(m.clone(), crate::coeff::Coeff::one()))
        .sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut attempts = 0;
    while done < n {
        attempts += 1;
        assert!(attempts < 50 * n + 100, "could not find admissible sample points");
        let p = random_point(&probe, &mut rng);
        match (eval_at(a, &p), eval_at(b, &p)) {
            (Ok(x), Ok(y)) if x == y => done += 1,
            (Ok(_), Ok(_)) => return false,
            (Err(ExprError::DivisionByZero), _) | (_, Err(ExprError::DivisionByZero)) => continue,
            (Err(err), _) | (_, Err(err)) => panic!("oracle evaluation failed: {}", err),
        }
    }
    true
}
