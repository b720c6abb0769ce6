//! Exact coefficients: rational functions in the problem parameter.
//!
//! Every expression coefficient lives in `Q(a)`, the field of rational
//! functions in the single declared parameter. Constants are the common
//! case and take a fast path.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Dense univariate polynomial over Q, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly(vec![c]);
        p.trim();
        p
    }

    /// The monomial `c * a^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Poly(v)
    }

    pub fn from_coeffs(v: Vec<Rational>) -> Self {
        let mut p = Poly(v);
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.0.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.0[0].clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.0.get(i).cloned().unwrap_or_else(Rational::zero);
            let b = o.0.get(i).cloned().unwrap_or_else(Rational::zero);
            v.push(a + b);
        }
        Poly::from_coeffs(v)
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|x| -x).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::from_coeffs(v)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.0.len() - 1;
        let dl = d.lead();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = &r[i] / &dl;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.0.iter().enumerate() {
                r[i - dd + j] -= &c * dj;
            }
            q[i - dd] = c;
        }
        r.truncate(dd);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let l = self.lead();
        Poly(self.0.iter().map(|x| x / &l).collect())
    }

    pub fn gcd(&self, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::zero();
        }
        Poly::from_coeffs(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    /// Lowest power of the variable dividing the polynomial.
    pub fn valuation(&self) -> usize {
        self.0.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Rational roots with multiplicities (rational root theorem).
    pub fn rational_roots(&self) -> Vec<(Rational, usize)> {
        let mut out = Vec::new();
        if self.is_zero() {
            return out;
        }
        let mut p = self.clone();
        let v = p.valuation();
        if v > 0 {
            out.push((Rational::zero(), v));
            p = Poly(p.0[v..].to_vec());
        }
        if p.degree() == Some(0) {
            return out;
        }
        // clear denominators
        let l = p
            .0
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.0.iter().map(|c| (c * &l).to_integer()).collect();
        let c0 = ints[0].abs();
        let cn = ints.last().unwrap().abs();
        let divisors = |n: &BigInt| -> Vec<BigInt> {
            let n = n.to_u64().expect("coefficient too large for root search");
            let mut d = Vec::new();
            let mut i = 1u64;
            while i * i <= n {
                if n % i == 0 {
                    d.push(BigInt::from(i));
                    if i * i != n {
                        d.push(BigInt::from(n / i));
                    }
                }
                i += 1;
            }
            d
        };
        let mut cands: Vec<Rational> = Vec::new();
        for num in divisors(&c0) {
            for den in divisors(&cn) {
                let r = BigRational::new(num.clone(), den);
                cands.push(r.clone());
                cands.push(-r);
            }
        }
        cands.sort();
        cands.dedup();
        for r in cands {
            let lin = Poly(vec![-r.clone(), Rational::one()]);
            let mut m = 0;
            loop {
                let (q, rem) = p.divrem(&lin);
                if !rem.is_zero() {
                    break;
                }
                p = q;
                m += 1;
            }
            if m > 0 {
                out.push((r, m));
            }
        }
        out
    }
}

/// Element of Q(a), kept reduced with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coeff {
    num: Poly,
    den: Poly,
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff {
            num: Poly::zero(),
            den: Poly::constant(Rational::one()),
        }
    }

    pub fn one() -> Self {
        Coeff::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        Coeff {
            num: Poly::constant(r),
            den: Poly::constant(Rational::one()),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Coeff::from_rational(int(n))
    }

    /// The parameter itself.
    pub fn param() -> Self {
        Coeff {
            num: Poly::monomial(Rational::one(), 1),
            den: Poly::constant(Rational::one()),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Coeff::new(p, Poly::constant(Rational::one()))
    }

    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator in coefficient");
        if num.is_zero() {
            return Coeff::zero();
        }
        if den.degree() == Some(0) {
            let d = den.lead();
            return Coeff {
                num: num.scale(&(Rational::one() / d)),
                den: Poly::constant(Rational::one()),
            };
        }
        let g = num.gcd(&den);
        let (n, _) = num.divrem(&g);
        let (d, _) = den.divrem(&g);
        let l = d.lead();
        let inv = Rational::one() / l;
        Coeff {
            num: n.scale(&inv),
            den: d.scale(&inv),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.num.as_constant() == Some(Rational::one())
    }

    pub fn is_constant(&self) -> bool {
        self.den.degree() == Some(0) && self.num.degree().unwrap_or(0) == 0
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_constant() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn inv(&self) -> Coeff {
        assert!(!self.is_zero(), "inverse of zero coefficient");
        Coeff::new(self.den.clone(), self.num.clone())
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, e: i64) -> Coeff {
        if e < 0 {
            return self.inv().powi(-e);
        }
        let mut acc = Coeff::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact rational power of a constant coefficient, if it exists.
    pub fn pow_rational(&self, e: &num_rational::Rational64) -> Option<Coeff> {
        if e.is_integer() {
            return Some(self.powi(*e.numer()));
        }
        if self.is_one() {
            return Some(Coeff::one());
        }
        let r = self.as_rational()?;
        let root = exact_root(&r, *e.denom() as u32)?;
        Some(Coeff::from_rational(root).powi(*e.numer()))
    }

    pub fn eval(&self, a: &Rational) -> Option<Rational> {
        let d = self.den.eval(a);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(a) / d)
    }

    /// True when printing should lead with a minus sign.
    pub fn is_negative(&self) -> bool {
        self.num.lead().is_negative()
    }

    /// Sign-stable ordering used only for deterministic output.
    pub fn cmp_key(&self, other: &Coeff) -> Ordering {
        (self.num.coeffs(), self.den.coeffs()).cmp(&(other.num.coeffs(), other.den.coeffs()))
    }

    /// Whether the numerator vanishes only at `a = 0` (covered by the
    /// nonzero assumption on the parameter).
    pub fn nonzero_under_assumption(&self) -> bool {
        let v = self.num.valuation();
        !self.num.is_zero() && self.num.degree() == Some(v)
    }

    /// Numerator with its powers of `a` stripped, i.e. the condition that
    /// must be assumed nonzero beyond `a != 0`.
    pub fn extra_condition(&self) -> Option<Poly> {
        if self.nonzero_under_assumption() {
            return None;
        }
        let v = self.num.valuation();
        Some(Poly::from_coeffs(self.num.coeffs()[v..].to_vec()).monic())
    }

    pub fn fmt_with(&self, param: &str) -> String {
        if let Some(r) = self.as_rational() {
            return fmt_rational(&r);
        }
        let n = fmt_poly(&self.num, param);
        if self.den.degree() == Some(0) {
            return n;
        }
        let d = fmt_poly(&self.den, param);
        format!("({})/({})", n, d)
    }
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn fmt_poly(p: &Poly, param: &str) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let pw = match k {
            0 => String::new(),
            1 => param.to_string(),
            _ => format!("{}^{}", param, k),
        };
        if k == 0 {
            s.push_str(&fmt_rational(&mag));
        } else if mag.is_one() {
            s.push_str(&pw);
        } else {
            s.push_str(&format!("{}*{}", fmt_rational(&mag), pw));
        }
    }
    s
}

/// Exact `n`-th root of a rational, if it is a perfect power.
pub fn exact_root(r: &Rational, n: u32) -> Option<Rational> {
    if n == 1 {
        return Some(r.clone());
    }
    if r.is_negative() {
        if n % 2 == 0 {
            return None;
        }
        return exact_root(&-r, n).map(|x| -x);
    }
    let num = r.numer().nth_root(n);
    let den = r.denom().nth_root(n);
    if num.pow(n) == *r.numer() && den.pow(n) == *r.denom() {
        Some(BigRational::new(num, den))
    } else {
        None
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with("a"))
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        if self.den == o.den {
            return Coeff::new(self.num.add(&o.num), self.den.clone());
        }
        Coeff::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        self + &(-o)
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        if self.is_zero() || o.is_zero() {
            return Coeff::zero();
        }
        if self.is_constant() && o.is_constant() {
            return Coeff::from_rational(self.num.lead() * o.num.lead());
        }
        Coeff::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }
}

impl Div for &Coeff {
    type Output = Coeff;
    fn div(self, o: &Coeff) -> Coeff {
        self * &o.inv()
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Coeff {
            type Output = Coeff;
            fn $m(self, o: Coeff) -> Coeff { (&self).$m(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a_minus(c: i64) -> Coeff {
        &Coeff::param() - &Coeff::from_int(c)
    }

    #[test]
    fn reduces_common_factors() {
        // (a^2 - 1) / (a - 1) = a + 1
        let num = &(&Coeff::param() * &Coeff::param()) - &Coeff::one();
        let q = &num / &a_minus(1);
        assert_eq!(q, &Coeff::param() + &Coeff::one());
    }

    #[test]
    fn inverse_round_trip() {
        let c = &a_minus(1) / &(&Coeff::from_int(3) * &Coeff::param());
        assert!((&c * &c.inv()).is_one());
        assert_eq!(c.fmt_with("a"), "(1/3*a - 1/3)/(a)");
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        // z^2 (z - 1)(z + 3)^2
        let z = Poly::from_coeffs(vec![int(0), int(1)]);
        let zm1 = Poly::from_coeffs(vec![int(-1), int(1)]);
        let zp3 = Poly::from_coeffs(vec![int(3), int(1)]);
        let p = z.mul(&z).mul(&zm1).mul(&zp3).mul(&zp3);
        let mut roots = p.rational_roots();
        roots.sort();
        assert_eq!(roots, vec![(int(-3), 2), (int(0), 2), (int(1), 1)]);
        let half = Poly::from_coeffs(vec![int(-1), int(2)]);
        assert_eq!(half.rational_roots(), vec![(rat(1, 2), 1)]);
        let irr = Poly::from_coeffs(vec![int(-2), int(0), int(1)]);
        assert!(irr.rational_roots().is_empty());
    }

    #[test]
    fn exact_roots() {
        assert_eq!(exact_root(&rat(8, 27), 3), Some(rat(2, 3)));
        assert_eq!(exact_root(&rat(-8, 1), 3), Some(int(-2)));
        assert_eq!(exact_root(&int(2), 2), None);
    }

    #[test]
    fn assumption_conditions() {
        let c = &Coeff::param() * &Coeff::from_int(5);
        assert!(c.nonzero_under_assumption());
        let d = &Coeff::param() * &a_minus(1);
        assert_eq!(d.extra_condition(), Some(Poly::from_coeffs(vec![int(-1), int(1)])));
    }
}
