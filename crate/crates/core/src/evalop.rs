//! The symbolic evaluation operator `eval(r/s; a) = rem(alpha*r, a)` with
//! `alpha*s = 1 mod a`, fast remainders, and partial-fraction numerators.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ratpoly::{int, psi, Poly, Rational};

/// A quotient `numerator / denominator`, not necessarily in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalExpr {
    pub numerator: Poly,
    pub denominator: Poly,
}

impl RationalExpr {
    pub fn new(numerator: Poly, denominator: Poly) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        Ok(RationalExpr {
            numerator,
            denominator,
        })
    }

    pub fn poly(p: Poly) -> Self {
        RationalExpr {
            numerator: p,
            denominator: Poly::one(),
        }
    }

    pub fn recip_of(denominator: Poly) -> Result<Self> {
        RationalExpr::new(Poly::one(), denominator)
    }
}

/// `f rem Psi_m` in one pass: `x^j` goes to `x^{j%m}`, except that
/// `x^{m-1}` goes to `-(1 + x + ... + x^{m-2})`.
pub fn rem_psi(f: &Poly, m: usize) -> Result<Poly> {
    if m < 2 {
        return Err(Error::InvalidModulus(format!(
            "rem_psi needs m >= 2, got {m}"
        )));
    }
    let mut out = vec![Rational::zero(); m - 1];
    let mut top = Rational::zero();
    for (j, c) in f.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        match j % m {
            r if r == m - 1 => top += c,
            r => out[r] += c,
        }
    }
    if !top.is_zero() {
        for o in &mut out {
            *o -= &top;
        }
    }
    Ok(Poly::new(out))
}

/// `f rem (1 - x^m)`: exponents fold modulo `m`.
pub fn rem_one_minus_xpow(f: &Poly, m: usize) -> Result<Poly> {
    if m == 0 {
        return Err(Error::InvalidModulus("modulus 1 - x^0 is zero".into()));
    }
    let mut out = vec![Rational::zero(); m.min(f.len())];
    for (j, c) in f.coeffs().iter().enumerate() {
        out[j % m] += c;
    }
    Ok(Poly::new(out))
}

/// `alpha` with `alpha*s = 1 mod a` and `deg(alpha) < deg(a)`.
pub fn inverse_mod(s: &Poly, a: &Poly) -> Result<Poly> {
    if a.is_constant() {
        return Err(Error::ConstantModulus);
    }
    let s = s.rem(a)?;
    let (g, u, _) = Poly::ext_gcd(&s, a)?;
    if !g.is_constant() {
        return Err(Error::NotInvertibleModulus);
    }
    u.rem(a)
}

pub fn eval(expr: &RationalExpr, a: &Poly) -> Result<Poly> {
    let alpha = inverse_mod(&expr.denominator, a)?;
    (&alpha * &expr.numerator.rem(a)?).rem(a)
}

/// `eval(r / prod f_i^{e_i}; a)` without expanding the full denominator.
pub fn eval_factored(numerator: &Poly, factors: &[(Poly, u32)], a: &Poly) -> Result<Poly> {
    if a.is_constant() {
        return Err(Error::ConstantModulus);
    }
    let mut den = Poly::one();
    for (f, e) in factors {
        let fr = f.rem(a)?;
        for _ in 0..*e {
            den = (&den * &fr).rem(a)?;
        }
    }
    eval(&RationalExpr::new(numerator.clone(), den)?, a)
}

/// Smallest positive `a` with `a*m = 1 mod n`.
pub(crate) fn mod_inverse(m: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(1);
    }
    let g = (m as i128).extended_gcd(&(n as i128));
    if g.gcd != 1 {
        return None;
    }
    let a = g.x.rem_euclid(n as i128) as u64;
    Some(if a == 0 { n } else { a })
}

/// `eval(1/Psi_m; Psi_n)` as `rem_psi(sum_{j<a} x^{jm % n}, n)` with `a*m - b*n = 1`.
pub fn eval_inv_psi_mod_psi(n: usize, m: usize) -> Result<Poly> {
    if m < 2 || n < 2 {
        return Err(Error::InvalidModulus(format!(
            "need m, n >= 2, got m={m}, n={n}"
        )));
    }
    let a = mod_inverse(m as u64, n as u64)
        .ok_or_else(|| Error::NotCoprime(format!("gcd({m}, {n}) != 1")))? as usize;
    let mut v = vec![Rational::zero(); n];
    for j in 0..a {
        v[j * m % n] += Rational::one();
    }
    rem_psi(&Poly::new(v), n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwoTermSide {
    /// `a > beta`.
    A,
    /// `a < beta`.
    B,
}

/// `(1-x)/((1-x^m)(1-x^n)) = over_m/(1-x^m) + over_n/(1-x^n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoTermPf {
    pub side: TwoTermSide,
    pub over_m: Poly,
    pub over_n: Poly,
}

impl TwoTermPf {
    /// Numerator over the common denominator; equals `1 - x` when correct.
    pub fn recombine(&self, m: usize, n: usize) -> Poly {
        &(&self.over_m * &Poly::one_minus_xpow(n)) + &(&self.over_n * &Poly::one_minus_xpow(m))
    }
}

fn power_sum(count: u64, step: u64, offset: u64, modulus: u64) -> Poly {
    let mut v = vec![Rational::zero(); modulus as usize];
    for j in 0..count {
        v[((j * step + offset) % modulus) as usize] += Rational::one();
    }
    Poly::new(v)
}

pub fn pf_two_terms(m: usize, n: usize) -> Result<TwoTermPf> {
    if m < 2 || n < 3 {
        return Err(Error::InvalidModulus(format!(
            "need m >= 2, n >= 3, got m={m}, n={n}"
        )));
    }
    let (mu, nu) = (m as u64, n as u64);
    let not_coprime = || Error::NotCoprime(format!("gcd({m}, {n}) != 1"));
    let a = mod_inverse(mu, nu).ok_or_else(not_coprime)?;
    let b = (a * mu - 1) / nu;
    let alpha = mod_inverse(nu, mu).ok_or_else(not_coprime)?;
    let beta = (alpha * nu - 1) / mu;
    if a == beta {
        return Err(Error::InvalidModulus(format!("boundary a = beta = {a}")));
    }
    Ok(if a > beta {
        TwoTermPf {
            side: TwoTermSide::A,
            over_m: power_sum(alpha, nu, 0, mu),
            over_n: -&power_sum(beta, mu, 1, nu),
        }
    } else {
        TwoTermPf {
            side: TwoTermSide::B,
            over_m: -&power_sum(b, nu, 1, mu),
            over_n: power_sum(a, mu, 0, nu),
        }
    })
}

/// Numerators `a_j = eval(f/g_j; p_j)` of `f/prod p_j = sum a_j/p_j`.
pub fn cover_up(f: &Poly, factors: &[Poly]) -> Result<Vec<Poly>> {
    for (i, p) in factors.iter().enumerate() {
        for q in &factors[i + 1..] {
            if !Poly::gcd(p, q)?.is_constant() {
                return Err(Error::NotCoprime(format!("{p} and {q}")));
            }
        }
    }
    let deg_prod: usize = factors.iter().map(|p| p.degree().unwrap_or(0)).sum();
    if let Some(d) = f.degree() {
        if d >= deg_prod {
            return Err(Error::ImproperFraction {
                numerator: d,
                denominator: deg_prod,
            });
        }
    }
    (0..factors.len())
        .map(|j| {
            let others: Vec<(Poly, u32)> = factors
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, p)| (p.clone(), 1))
                .collect();
            eval_factored(f, &others, &factors[j])
        })
        .collect()
}

/// `eval(expr; p^n)` by direct Bezout modulo `p^n`.
pub fn eval_mod_power(expr: &RationalExpr, p: &Poly, n: u32) -> Result<Poly> {
    eval(expr, &p.pow(n))
}

/// `eval(expr; p^n)` via the expansion
/// `p2^{n-1} a2^n sum_{k<n} (p1 q)^k` with `q = sum_{k=1}^{n-1} C(n,k) a1^k a2^{n-k} p2^{n-k} p1^{k-1}`,
/// where `a1 p1 + a2 p2 = 1` and `p2` is the denominator.
pub fn eval_mod_power_expansion(expr: &RationalExpr, p: &Poly, n: u32) -> Result<Poly> {
    if n == 0 || p.is_constant() {
        return Err(Error::ConstantModulus);
    }
    let pn = p.pow(n);
    let p1 = p;
    let p2 = expr.denominator.rem(&pn)?;
    let (g, a1, a2) = Poly::ext_gcd(p1, &p2)?;
    if !g.is_constant() {
        return Err(Error::NotInvertibleModulus);
    }
    let m = |a: &Poly, b: &Poly| -> Result<Poly> { (a * b).rem(&pn) };
    let pw = |a: &Poly, e: u32| -> Result<Poly> {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = m(&acc, a)?;
        }
        Ok(acc)
    };
    let mut q = Poly::zero();
    let mut binom = int(1);
    for k in 1..n {
        binom = binom * int((n - k + 1) as i64) / int(k as i64);
        let term = m(
            &m(&pw(&a1, k)?, &pw(&a2, n - k)?)?,
            &m(&pw(&p2, n - k)?, &pw(p1, k - 1)?)?,
        )?;
        q = &q + &term.scale(&binom);
    }
    let p1q = m(p1, &q)?;
    let mut geo = Poly::zero();
    let mut pk = Poly::one();
    for _ in 0..n {
        geo = &geo + &pk;
        pk = m(&pk, &p1q)?;
    }
    let inv = m(&m(&pw(&p2, n - 1)?, &pw(&a2, n)?)?, &geo)?;
    m(&inv, &expr.numerator.rem(&pn)?)
}

pub(crate) fn psi_poly(m: usize) -> Poly {
    psi(m).expect("m >= 1")
}
