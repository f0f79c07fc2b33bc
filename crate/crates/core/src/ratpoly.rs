//! Exact rationals and dense univariate polynomials over them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision fraction, always in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale both down to keep the quotient representable.
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
            let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Parse `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Dense polynomial; `coeffs[i]` is the coefficient of `x^i`, never with trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

const KARATSUBA_CUTOFF: usize = 48;

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn x() -> Self {
        Poly::monomial(Rational::one(), 1)
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Poly { coeffs: v }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&v| int(v)).collect())
    }

    /// `1 - x`.
    pub fn one_minus_x() -> Self {
        Poly::one_minus_xpow(1)
    }

    /// `1 - x^n`; zero for `n = 0`.
    pub fn one_minus_xpow(n: usize) -> Self {
        let mut v = vec![Rational::zero(); n + 1];
        v[0] += Rational::one();
        v[n] -= Rational::one();
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficients padded with zeros to length `n` (truncating if longer).
    pub fn padded(&self, n: usize) -> Vec<Rational> {
        (0..n).map(|i| self.coeff(i)).collect()
    }

    /// `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Number of coefficient slots; 0 for the zero polynomial.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| {
                acc * z + rational_to_f64(c)
            })
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    /// Remainder modulo `x^n`.
    pub fn truncate(&self, n: usize) -> Poly {
        Poly::new(self.coeffs.iter().take(n).cloned().collect())
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `self(q(x))` by Horner's rule.
    pub fn compose(&self, q: &Poly) -> Poly {
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, c| {
            &(&acc * q) + &Poly::constant(c.clone())
        })
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    pub fn divmod(&self, b: &Poly) -> Result<(Poly, Poly)> {
        let db = b.degree().ok_or(Error::ZeroDivisor)?;
        let Some(da) = self.degree() else {
            return Ok((Poly::zero(), Poly::zero()));
        };
        if da < db {
            return Ok((Poly::zero(), self.clone()));
        }
        let lc = &b.coeffs[db];
        let inv = if lc.is_one() { None } else { Some(lc.recip()) };
        let mut r = self.coeffs.clone();
        let mut q = vec![Rational::zero(); da - db + 1];
        for k in (0..=da - db).rev() {
            let top = &r[k + db];
            if top.is_zero() {
                continue;
            }
            let c = match &inv {
                Some(i) => top * i,
                None => top.clone(),
            };
            for (i, bc) in b.coeffs.iter().enumerate().take(db) {
                if !bc.is_zero() {
                    r[k + i] -= &c * bc;
                }
            }
            r[k + db] = Rational::zero();
            q[k] = c;
        }
        r.truncate(db);
        Ok((Poly::new(q), Poly::new(r)))
    }

    pub fn rem(&self, b: &Poly) -> Result<Poly> {
        Ok(self.divmod(b)?.1)
    }

    /// Exact quotient; errors if `b` does not divide `self`.
    pub fn div_exact(&self, b: &Poly) -> Result<Poly> {
        let (q, r) = self.divmod(b)?;
        if !r.is_zero() {
            return Err(Error::InvalidForm(format!("{b} does not divide {self}")));
        }
        Ok(q)
    }

    /// Returns `(g, u, v)` with `u*a + v*b = g`, `g` monic.
    pub fn ext_gcd(a: &Poly, b: &Poly) -> Result<(Poly, Poly, Poly)> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::UndefinedGcd);
        }
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1)?;
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        let lc = r0.leading().expect("nonzero gcd").recip();
        Ok((r0.scale(&lc), s0.scale(&lc), t0.scale(&lc)))
    }

    pub fn gcd(a: &Poly, b: &Poly) -> Result<Poly> {
        Ok(Poly::ext_gcd(a, b)?.0)
    }

    /// Convert a `p/q`-scaled integer polynomial check: all coefficients integral.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }
}

/// `1 + x + ... + x^{m-1}`.
pub fn psi(m: usize) -> Result<Poly> {
    if m == 0 {
        return Err(Error::InvalidOrder("psi needs m >= 1".into()));
    }
    Ok(Poly::new(vec![Rational::one(); m]))
}

fn divisors(n: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i * i != n {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// The `d`-th cyclotomic polynomial, by dividing `x^d - 1` by the lower ones.
pub fn cyclotomic(d: usize) -> Poly {
    assert!(d >= 1, "cyclotomic index must be positive");
    let divs = divisors(d);
    let mut known: BTreeMap<usize, Poly> = BTreeMap::new();
    for &e in &divs {
        let mut p = -&Poly::one_minus_xpow(e);
        for f in divisors(e) {
            if f < e {
                p = p.div_exact(&known[&f]).expect("cyclotomic divisibility");
            }
        }
        known.insert(e, p);
    }
    known.remove(&d).unwrap()
}

fn add_slices(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut v = long.to_vec();
    for (x, y) in v.iter_mut().zip(short) {
        *x += y;
    }
    v
}

fn schoolbook(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn karatsuba(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.len().min(b.len()) < KARATSUBA_CUTOFF {
        return schoolbook(a, b);
    }
    let h = a.len().max(b.len()) / 2;
    let (a0, a1) = a.split_at(h.min(a.len()));
    let (b0, b1) = b.split_at(h.min(b.len()));
    let z0 = karatsuba(a0, b0);
    let z2 = karatsuba(a1, b1);
    let mut z1 = karatsuba(&add_slices(a0, a1), &add_slices(b0, b1));
    for (i, c) in z0.iter().enumerate() {
        z1[i] -= c;
    }
    for (i, c) in z2.iter().enumerate() {
        z1[i] -= c;
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, c) in z0.into_iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in z1.into_iter().enumerate() {
        if i + h < out.len() {
            out[i + h] += c;
        }
    }
    for (i, c) in z2.into_iter().enumerate() {
        out[i + 2 * h] += c;
    }
    out
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::new(add_slices(&self.coeffs, &rhs.coeffs))
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        Poly::new(karatsuba(&self.coeffs, &rhs.coeffs))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}*x")?,
                _ => write!(f, "{mag}*x^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

fn parse_term(term: &str, negative: bool) -> Result<(usize, Rational)> {
    let bad = || Error::Parse(format!("invalid term `{term}`"));
    let t: String = term.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    let (coef_part, exp) = match t.find('x') {
        None => (t.as_str(), 0usize),
        Some(pos) => {
            let rest = &t[pos + 1..];
            let exp = if rest.is_empty() {
                1
            } else if let Some(e) = rest.strip_prefix('^') {
                e.trim_matches(|c| c == '{' || c == '}')
                    .parse()
                    .map_err(|_| bad())?
            } else {
                return Err(bad());
            };
            (&t[..pos], exp)
        }
    };
    let coef_part = coef_part.strip_suffix('*').unwrap_or(coef_part);
    let mut c = if coef_part.is_empty() {
        if !t.contains('x') {
            return Err(bad());
        }
        Rational::one()
    } else {
        parse_rational(coef_part)?
    };
    if negative {
        c = -c;
    }
    Ok((exp, c))
}

impl FromStr for Poly {
    type Err = Error;

    /// Accepts `c0 + c1*x + c2*x^2 ...` in any term order; `*` is optional.
    fn from_str(s: &str) -> Result<Poly> {
        let mut terms: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut buf = String::new();
        let mut negative = false;
        let mut prev = ' ';
        let mut flush = |buf: &mut String, negative: bool| -> Result<()> {
            if buf.trim().is_empty() {
                return Err(Error::Parse(format!("dangling sign in `{s}`")));
            }
            let (k, c) = parse_term(buf, negative)?;
            *terms.entry(k).or_insert_with(Rational::zero) += c;
            buf.clear();
            Ok(())
        };
        for ch in s.chars() {
            if (ch == '+' || ch == '-') && !matches!(prev, '^' | '/' | '*') {
                if !buf.trim().is_empty() {
                    flush(&mut buf, negative)?;
                    negative = false;
                }
                if ch == '-' {
                    negative = !negative;
                }
            } else {
                buf.push(ch);
            }
            if !ch.is_whitespace() {
                prev = ch;
            }
        }
        flush(&mut buf, negative)?;
        let deg = terms.keys().next_back().copied().unwrap_or(0);
        let mut v = vec![Rational::zero(); deg + 1];
        for (k, c) in terms {
            v[k] = c;
        }
        Ok(Poly::new(v))
    }
}
