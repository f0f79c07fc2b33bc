//! Denumerants: a counting oracle and the exact quasi-polynomial evaluator.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::qpf::{CoprimeForm, PartTuple, QPFDecomposition};
use crate::ratpoly::Rational;

/// Coefficients `d(0..=t_max)` of `1/prod (1 - x^{a_i})` by the knapsack recurrence.
pub fn oracle_counts(parts: &[u64], t_max: usize) -> Vec<BigUint> {
    let mut d = vec![BigUint::zero(); t_max + 1];
    d[0] = BigUint::one();
    for &a in parts {
        let a = a as usize;
        if a == 0 {
            continue;
        }
        for t in a..=t_max {
            let prev = d[t - a].clone();
            d[t] += prev;
        }
    }
    d
}

pub fn oracle_count(parts: &PartTuple, t: usize) -> BigUint {
    oracle_counts(parts.parts(), t).pop().unwrap()
}

/// First `len` power-series coefficients of a coprime form.
pub fn series_coefficients(form: &CoprimeForm, len: usize) -> Vec<Rational> {
    let den = form.denominator();
    let dc = den.coeffs();
    let mut a: Vec<Rational> = Vec::with_capacity(len);
    for k in 0..len {
        let mut v = form.p.coeff(k);
        for i in 1..dc.len().min(k + 1) {
            v -= &dc[i] * &a[k - i];
        }
        // The denominator has constant term 1.
        a.push(v);
    }
    a
}

/// `C(q + l - 1, l - 1)`, the number of multisets of size `q` from `l` kinds.
pub fn multiset_binomial(q: u64, l: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 1..l as u64 {
        acc = acc * (q + i) / i;
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicBlock {
    pub n: usize,
    pub r: usize,
    /// `tables[i][alpha]` multiplies `C(floor(t/n) + r - i - 1, r - i - 1)` when `t % n = alpha`.
    pub tables: Vec<Vec<Rational>>,
}

impl PeriodicBlock {
    pub fn value(&self, t: u64) -> Rational {
        let q = t / self.n as u64;
        let alpha = (t % self.n as u64) as usize;
        self.tables
            .iter()
            .enumerate()
            .map(|(i, row)| Rational::from_integer(multiset_binomial(q, self.r - i)) * &row[alpha])
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiPolynomial {
    pub s: usize,
    pub c: Vec<Rational>,
    pub periodic_blocks: Vec<PeriodicBlock>,
}

pub fn quasi_polynomial(dec: &QPFDecomposition) -> QuasiPolynomial {
    QuasiPolynomial {
        s: dec.s,
        c: dec.c.clone(),
        periodic_blocks: dec
            .blocks
            .iter()
            .map(|b| PeriodicBlock {
                n: b.n,
                r: b.r,
                tables: b.h_sub.iter().map(|h| h.padded(b.n)).collect(),
            })
            .collect(),
    }
}

impl QuasiPolynomial {
    /// Contribution of the `(1-x)` powers: `sum_j c_j C(t + s - j - 1, s - j - 1)`.
    pub fn polynomial_part(&self, t: u64) -> Rational {
        self.c
            .iter()
            .enumerate()
            .map(|(j, cj)| Rational::from_integer(multiset_binomial(t, self.s - j)) * cj)
            .sum()
    }

    /// Exact value without the integrality check.
    pub fn value(&self, t: u64) -> Rational {
        self.periodic_blocks
            .iter()
            .fold(self.polynomial_part(t), |acc, b| acc + b.value(t))
    }

    pub fn evaluate(&self, t: u64) -> Result<BigUint> {
        let v = self.value(t);
        if !v.is_integer() || v.is_negative() {
            return Err(Error::DecompositionCorrupt(format!("d({t}) = {v}")));
        }
        Ok(v.to_integer().to_biguint().unwrap())
    }
}

pub fn evaluate(q: &QuasiPolynomial, t: u64) -> Result<BigUint> {
    q.evaluate(t)
}
