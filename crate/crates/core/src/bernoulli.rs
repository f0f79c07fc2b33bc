//! Reciprocal degenerate Bernoulli numbers through `f_k^{(m)}(x)`, plus the
//! closed form in Bernoulli and Stirling numbers used as an independent check.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::evalop::{psi_poly, rem_psi};
use crate::ratpoly::{int, Poly, Rational};

fn check_order(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidOrder(format!("need m >= 2, got {m}")));
    }
    Ok(())
}

/// `-(1/m) x Psi_m'(x)` reduced modulo `Psi_m`.
fn step_poly(m: usize) -> Poly {
    let q = psi_poly(m)
        .derivative()
        .shift(1)
        .scale(&-Rational::new(1.into(), m.into()));
    rem_psi(&q, m).expect("m >= 2")
}

/// `[f_0, ..., f_{k_max}]` for order `m`, by multiply-then-reduce.
pub fn f_km_sequence(m: usize, k_max: usize) -> Result<Vec<Poly>> {
    check_order(m)?;
    let q = step_poly(m);
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(Poly::one());
    for k in 1..=k_max {
        let next = rem_psi(&(&out[k - 1] * &q), m)?;
        out.push(next);
    }
    Ok(out)
}

pub fn f_km(m: usize, k: usize) -> Result<Poly> {
    Ok(f_km_sequence(m, k)?.pop().unwrap())
}

/// Same value as [`f_km`], by repeated squaring modulo `Psi_m`.
pub fn f_km_fast(m: usize, k: usize) -> Result<Poly> {
    check_order(m)?;
    let mut base = step_poly(m);
    let mut acc = Poly::one();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = rem_psi(&(&acc * &base), m)?;
        }
        e >>= 1;
        if e > 0 {
            base = rem_psi(&(&base * &base), m)?;
        }
    }
    Ok(acc)
}

/// `[f_0(1), ..., f_{k_max}(1)]`; order 1 gives the trivial series `1, 0, 0, ...`.
pub(crate) fn f_at_one_sequence(m: usize, k_max: usize) -> Result<Vec<Rational>> {
    if m == 1 {
        let mut v = vec![Rational::zero(); k_max + 1];
        v[0] = Rational::one();
        return Ok(v);
    }
    Ok(f_km_sequence(m, k_max)?
        .iter()
        .map(|f| f.eval(&Rational::one()))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegBernoulli {
    pub k: usize,
    pub m: usize,
    pub value_poly: Poly,
    pub value_at_one: Rational,
}

impl DegBernoulli {
    pub fn new(m: usize, k: usize) -> Result<Self> {
        let value_poly = f_km(m, k)?;
        let value_at_one = value_poly.eval(&Rational::one());
        Ok(DegBernoulli {
            k,
            m,
            value_poly,
            value_at_one,
        })
    }

    pub fn tilde_beta(&self) -> Rational {
        signed_factorial(self.k) * &self.value_at_one
    }
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

/// `(-1)^k k!`.
fn signed_factorial(k: usize) -> Rational {
    let f = Rational::from_integer(factorial(k));
    if k % 2 == 1 {
        -f
    } else {
        f
    }
}

pub fn tilde_beta(k: usize, m: usize) -> Result<Rational> {
    Ok(DegBernoulli::new(m, k)?.tilde_beta())
}

/// Order-`r` values: the `r`-fold exponential convolution of `tilde_beta`.
pub fn tilde_beta_order_r(k: usize, m: usize, r: usize) -> Result<Rational> {
    check_order(m)?;
    Ok(tilde_beta_order_r_sequence(m, r, k)?.pop().unwrap())
}

/// `[tilde_beta^{(r)}_0(m), ..., tilde_beta^{(r)}_{k_max}(m)]`; `m = 1` allowed.
pub(crate) fn tilde_beta_order_r_sequence(
    m: usize,
    r: usize,
    k_max: usize,
) -> Result<Vec<Rational>> {
    if r == 0 {
        return Err(Error::InvalidOrder("order r must be positive".into()));
    }
    let base: Vec<Rational> = f_at_one_sequence(m, k_max)?
        .into_iter()
        .enumerate()
        .map(|(i, f)| if i % 2 == 1 { -f } else { f })
        .collect();
    let mut acc = base.clone();
    for _ in 1..r {
        acc = (0..=k_max)
            .map(|k| (0..=k).map(|i| &acc[i] * &base[k - i]).sum())
            .collect();
    }
    Ok(acc
        .into_iter()
        .enumerate()
        .map(|(k, v)| v * Rational::from_integer(factorial(k)))
        .collect())
}

/// Stirling numbers conventions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StirlingConvention {
    FirstUnsigned,
    FirstSigned,
    Second,
}

/// The convention under which the closed form reproduces `f_k^{(m)}(1)`.
pub const GESSEL_STIRLING: StirlingConvention = StirlingConvention::FirstUnsigned;

/// Bernoulli numbers `B_0..B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k == 0 {
            b.push(Rational::one());
            continue;
        }
        // sum_{j<=k} C(k+1, j) B_j = 0
        let mut binom = BigInt::one();
        let mut s = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            s += Rational::from_integer(binom.clone()) * bj;
            binom = binom * (k + 1 - j) / (j + 1);
        }
        b.push(-s / Rational::from_integer(binom));
    }
    b
}

/// Triangle `t[n][k]` for `0 <= k <= n <= size`.
pub fn stirling_table(size: usize, conv: StirlingConvention) -> Vec<Vec<BigInt>> {
    let mut t = vec![vec![BigInt::zero(); size + 1]; size + 1];
    t[0][0] = BigInt::one();
    for n in 0..size {
        for k in 0..=n + 1 {
            let down = if k > 0 {
                t[n][k - 1].clone()
            } else {
                BigInt::zero()
            };
            let stay = t[n][k].clone();
            t[n + 1][k] = match conv {
                StirlingConvention::FirstUnsigned => stay * n + down,
                StirlingConvention::FirstSigned => down - stay * n,
                StirlingConvention::Second => stay * k + down,
            };
        }
    }
    t
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StirlingBernoulliTables {
    pub bernoulli_numbers: Vec<Rational>,
    pub stirling: Vec<Vec<BigInt>>,
    pub convention: StirlingConvention,
}

impl StirlingBernoulliTables {
    pub fn new(n: usize, convention: StirlingConvention) -> Self {
        StirlingBernoulliTables {
            bernoulli_numbers: bernoulli_numbers(n),
            stirling: stirling_table(n, convention),
            convention,
        }
    }

    /// `(1/(k-1)!) sum_{j=2}^{k} B_j/j stirl(k-1, j-1) (m^j - 1)`, or `(m-1)/2` at `k = 1`.
    pub fn closed_form(&self, k: usize, m: usize) -> Result<Rational> {
        if k == 0 {
            return Err(Error::IndexOutOfRange("closed form starts at k = 1".into()));
        }
        if k >= self.bernoulli_numbers.len() {
            return Err(Error::IndexOutOfRange(format!(
                "tables too small for k = {k}"
            )));
        }
        let m_big = BigInt::from(m);
        if k == 1 {
            return Ok(Rational::new(m_big - 1, 2.into()));
        }
        let mut s = Rational::zero();
        for j in 2..=k {
            let mj = Rational::from_integer(num_traits::pow(m_big.clone(), j) - 1);
            let st = Rational::from_integer(self.stirling[k - 1][j - 1].clone());
            s += &self.bernoulli_numbers[j] / int(j as i64) * st * mj;
        }
        Ok(s / Rational::from_integer(factorial(k - 1)))
    }
}

pub fn gessel_beta_with(k: usize, m: usize, conv: StirlingConvention) -> Result<Rational> {
    check_order(m)?;
    StirlingBernoulliTables::new(k.max(1), conv).closed_form(k, m)
}

/// Closed form for `f_k^{(m)}(1)`.
pub fn gessel_beta(k: usize, m: usize) -> Result<Rational> {
    gessel_beta_with(k, m, GESSEL_STIRLING)
}

/// Interpolates `g_k(1) = m^k f_k^{(m)}(1)` as a polynomial in `m` through the
/// sample points and returns its coefficients, lowest first.
pub fn gk_at_one_poly_check(k: usize, sample_ms: &[usize]) -> Result<Vec<Rational>> {
    let mut ms = sample_ms.to_vec();
    ms.sort_unstable();
    ms.dedup();
    if ms.len() != sample_ms.len() || ms.len() < 2 * k + 1 {
        return Err(Error::NeedMoreSamples {
            needed: 2 * k + 1,
            got: ms.len(),
        });
    }
    let points: Vec<(Rational, Rational)> = sample_ms
        .iter()
        .map(|&m| {
            let f = f_km(m, k)?.eval(&Rational::one());
            let mk = Rational::from_integer(num_traits::pow(BigInt::from(m), k));
            Ok((int(m as i64), mk * f))
        })
        .collect::<Result<_>>()?;
    Ok(interpolate(&points).padded(points.len()))
}

/// Lagrange interpolation through distinct abscissae.
pub fn interpolate(points: &[(Rational, Rational)]) -> Poly {
    let mut total = Poly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut basis = Poly::constant(yi.clone());
        for (j, (xj, _)) in points.iter().enumerate() {
            if i != j {
                let lin = Poly::new(vec![-xj.clone(), Rational::one()]);
                basis = (&basis * &lin).scale(&(xi - xj).recip());
            }
        }
        total = &total + &basis;
    }
    total
}
