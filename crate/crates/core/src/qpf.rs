//! Reduction of a part tuple to pairwise coprime blocks and the q-partial
//! fraction decomposition
//! `p/((1-x)^m prod (1-x^{n_j})^{r_j}) = sum c_j/(1-x)^{s-j} + sum h_j/(1-x^{n_j})^{r_j}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::bernoulli::{f_km, tilde_beta_order_r_sequence};
use crate::error::{Error, Result};
use crate::evalop::{eval_factored, eval_inv_psi_mod_psi, psi_poly, rem_one_minus_xpow, rem_psi};
use crate::ratpoly::{cyclotomic, int, Poly, Rational};

/// Non-empty multiset of positive parts with gcd 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartTuple {
    parts: Vec<u64>,
}

impl PartTuple {
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidTuple("no parts given".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidTuple("parts must be positive".into()));
        }
        let g = parts.iter().fold(0u64, |g, &a| g.gcd(&a));
        if g != 1 {
            return Err(Error::NonCoprimeTuple(g));
        }
        Ok(PartTuple { parts })
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// `prod (1 - x^{a_i})`.
    pub fn denominator(&self) -> Poly {
        self.parts.iter().fold(Poly::one(), |acc, &a| {
            &acc * &Poly::one_minus_xpow(a as usize)
        })
    }
}

impl std::str::FromStr for PartTuple {
    type Err = Error;

    /// Comma-separated parts, e.g. `1,2,3`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("invalid part `{}`", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        PartTuple::new(parts)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block {
    pub n: usize,
    pub r: usize,
}

/// `p(x) / ((1-x)^m prod_j (1-x^{n_j})^{r_j})` with pairwise coprime `n_j >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoprimeForm {
    pub m: usize,
    pub p: Poly,
    pub blocks: Vec<Block>,
}

impl CoprimeForm {
    pub fn new(m: usize, p: Poly, blocks: Vec<Block>) -> Result<Self> {
        for (i, b) in blocks.iter().enumerate() {
            if b.n < 2 || b.r == 0 {
                return Err(Error::InvalidForm(format!(
                    "block (n={}, r={}) needs n >= 2 and r >= 1",
                    b.n, b.r
                )));
            }
            for c in &blocks[i + 1..] {
                if b.n.gcd(&c.n) != 1 {
                    return Err(Error::NotCoprime(format!("moduli {} and {}", b.n, c.n)));
                }
            }
        }
        let form = CoprimeForm { m, p, blocks };
        if form.total_power() == 0 {
            return Err(Error::InvalidForm("denominator is constant".into()));
        }
        let bound = form.denominator_degree();
        if let Some(d) = form.p.degree() {
            if d >= bound {
                return Err(Error::ImproperFraction {
                    numerator: d,
                    denominator: bound,
                });
            }
        }
        Ok(form)
    }

    /// `s = m + sum r_j`, the total power of `1 - x`.
    pub fn total_power(&self) -> usize {
        self.m + self.blocks.iter().map(|b| b.r).sum::<usize>()
    }

    pub fn denominator_degree(&self) -> usize {
        self.m + self.blocks.iter().map(|b| b.n * b.r).sum::<usize>()
    }

    pub fn denominator(&self) -> Poly {
        self.blocks
            .iter()
            .fold(Poly::one_minus_x().pow(self.m as u32), |acc, b| {
                &acc * &Poly::one_minus_xpow(b.n).pow(b.r as u32)
            })
    }

    /// True when `denominator() * ... = p * prod (1 - x^{a_i})`, i.e. the form
    /// equals `1 / prod (1 - x^{a_i})`.
    pub fn represents(&self, parts: &PartTuple) -> bool {
        self.denominator() == &self.p * &parts.denominator()
    }
}

/// Canonical reduction to pairwise coprime blocks. Divisors `d > 1` of the
/// parts are grouped by sharing a common factor; each group becomes one block
/// with `n = lcm` and `r = max #{parts divisible by d}`; cyclotomic factors
/// not cancelled by the parts go into the numerator.
pub fn reduce(parts: &PartTuple) -> CoprimeForm {
    let mut e: BTreeMap<usize, usize> = BTreeMap::new();
    for &a in parts.parts() {
        for d in divisors(a as usize).into_iter().filter(|&d| d > 1) {
            *e.entry(d).or_insert(0) += 1;
        }
    }
    let divs: Vec<usize> = e.keys().copied().collect();
    let mut parent: Vec<usize> = (0..divs.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..divs.len() {
        for j in i + 1..divs.len() {
            if divs[i].gcd(&divs[j]) > 1 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut comps: BTreeMap<usize, Block> = BTreeMap::new();
    for (i, d) in divs.iter().enumerate() {
        let root = find(&mut parent, i);
        let blk = comps.entry(root).or_insert(Block { n: 1, r: 0 });
        blk.n = blk.n.lcm(d);
        blk.r = blk.r.max(e[d]);
    }
    let mut blocks: Vec<Block> = comps.into_values().collect();
    blocks.sort();
    let m = parts.parts().len() - blocks.iter().map(|b| b.r).sum::<usize>();
    let mut p = Poly::one();
    for b in &blocks {
        for d in divisors(b.n).into_iter().filter(|&d| d > 1) {
            let have = e.get(&d).copied().unwrap_or(0);
            p = &p * &cyclotomic(d).pow((b.r - have) as u32);
        }
    }
    // Phi_d for d > 1 has constant term 1, so p is already normalized.
    CoprimeForm { m, p, blocks }
}

pub(crate) fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Periodic block `h / (1 - x^n)^r` with `h = sum_i h_sub[i] (1 - x^n)^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockTerm {
    pub n: usize,
    pub r: usize,
    pub h: Poly,
    pub h_sub: Vec<Poly>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPFDecomposition {
    pub form: CoprimeForm,
    pub s: usize,
    pub c: Vec<Rational>,
    pub blocks: Vec<BlockTerm>,
}

impl QPFDecomposition {
    /// Numerator of the sum of all terms over the form's denominator.
    pub fn recombined_numerator(&self) -> Poly {
        let psi_part = self
            .form
            .blocks
            .iter()
            .fold(Poly::one(), |acc, b| &acc * &psi_poly(b.n).pow(b.r as u32));
        let mut total = Poly::zero();
        for (j, cj) in self.c.iter().enumerate() {
            total = &total + &(&psi_part * &Poly::one_minus_x().pow(j as u32)).scale(cj);
        }
        for (j, blk) in self.blocks.iter().enumerate() {
            let cof = self
                .form
                .blocks
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .fold(
                    Poly::one_minus_x().pow(self.form.m as u32),
                    |acc, (_, b)| &acc * &Poly::one_minus_xpow(b.n).pow(b.r as u32),
                );
            total = &total + &(&blk.h * &cof);
        }
        total
    }

    /// Checks every structural invariant; the master correctness check.
    pub fn verify(&self) -> bool {
        let degrees_ok = self.blocks.iter().all(|b| {
            b.h.degree().is_none_or(|d| d < b.n * b.r)
                && b.h_sub.len() == b.r
                && b.h_sub.iter().all(|h| h.degree().is_none_or(|d| d < b.n))
        });
        let subs_ok = self.blocks.iter().all(|b| {
            let base = Poly::one_minus_xpow(b.n);
            let sum = b
                .h_sub
                .iter()
                .enumerate()
                .fold(Poly::zero(), |acc, (i, h)| {
                    &acc + &(h * &base.pow(i as u32))
                });
            sum == b.h
        });
        degrees_ok
            && subs_ok
            && self.c.len() == self.s
            && self.recombined_numerator() == self.form.p
    }
}

/// Taylor coefficients `p^{(i)}(1)/i!` for `i < count`, by exact differentiation.
fn taylor_at_one(p: &Poly, count: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(count);
    let mut d = p.clone();
    let mut fact = BigInt::one();
    for i in 0..count {
        if i > 0 {
            fact *= i;
            d = d.derivative();
        }
        out.push(d.eval(&Rational::one()) / Rational::from_integer(fact.clone()));
    }
    out
}

fn convolve(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
    (0..len)
        .map(|k| {
            (0..=k)
                .filter(|&i| i < a.len() && k - i < b.len())
                .map(|i| &a[i] * &b[k - i])
                .sum()
        })
        .collect()
}

/// `c_0..c_{s-1}` from derivatives of `p` at 1 and order-`r` degenerate Bernoulli values.
pub fn c_block(form: &CoprimeForm) -> Result<Vec<Rational>> {
    let s = form.total_power();
    let sign = |i: usize, v: Rational| if i % 2 == 1 { -v } else { v };
    let mut acc: Vec<Rational> = taylor_at_one(&form.p, s)
        .into_iter()
        .enumerate()
        .map(|(i, v)| sign(i, v))
        .collect();
    let mut scale = BigInt::one();
    for b in &form.blocks {
        let mut fact = BigInt::one();
        let seq: Vec<Rational> = tilde_beta_order_r_sequence(b.n, b.r, s.saturating_sub(1))?
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                if i > 0 {
                    fact *= i;
                }
                sign(i, v / Rational::from_integer(fact.clone()))
            })
            .collect();
        acc = convolve(&acc, &seq, s);
        scale *= num_traits::pow(BigInt::from(b.n), b.r);
    }
    let scale = Rational::from_integer(scale);
    Ok(acc.into_iter().map(|v| v / &scale).collect())
}

/// Same values as [`c_block`], as `eval(p / prod Psi^r; (1-x)^s)` rewritten in powers of `1 - x`.
pub fn c_block_eval(form: &CoprimeForm) -> Result<Vec<Rational>> {
    let s = form.total_power();
    let factors: Vec<(Poly, u32)> = form
        .blocks
        .iter()
        .map(|b| (psi_poly(b.n), b.r as u32))
        .collect();
    let g = eval_factored(&form.p, &factors, &Poly::one_minus_x().pow(s as u32))?;
    Ok(g.compose(&Poly::one_minus_x()).padded(s))
}

/// `h_j = (1-x)^{r_j} eval(p / ((1-x)^s prod_{i != j} Psi_{n_i}^{r_i}); Psi_{n_j}^{r_j})`.
pub fn block_numerator_generic(form: &CoprimeForm, j: usize) -> Result<Poly> {
    let blk = block_at(form, j)?;
    let mut factors = vec![(Poly::one_minus_x(), form.total_power() as u32)];
    factors.extend(
        form.blocks
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, b)| (psi_poly(b.n), b.r as u32)),
    );
    let g = eval_factored(&form.p, &factors, &psi_poly(blk.n).pow(blk.r as u32))?;
    Ok(&Poly::one_minus_x().pow(blk.r as u32) * &g)
}

/// Single-power shortcut: `(1-x) rem_psi(p f_s^{(n_j)} prod_{i != j} inv_i^{r_i}, n_j)`
/// with `inv_i = eval(1/Psi_{n_i}; Psi_{n_j})`.
pub fn block_numerator_fast(form: &CoprimeForm, j: usize) -> Result<Poly> {
    let blk = block_at(form, j)?;
    if blk.r != 1 {
        return Err(Error::InvalidForm(format!(
            "fast route needs r = 1, got {}",
            blk.r
        )));
    }
    let n = blk.n;
    let mut acc = rem_psi(&(&rem_psi(&form.p, n)? * &f_km(n, form.total_power())?), n)?;
    for (i, b) in form.blocks.iter().enumerate() {
        if i == j {
            continue;
        }
        let inv = eval_inv_psi_mod_psi(n, b.n)?;
        for _ in 0..b.r {
            acc = rem_psi(&(&acc * &inv), n)?;
        }
    }
    Ok(&Poly::one_minus_x() * &acc)
}

fn block_at(form: &CoprimeForm, j: usize) -> Result<Block> {
    form.blocks
        .get(j)
        .copied()
        .ok_or_else(|| Error::IndexOutOfRange(format!("block {j} of {}", form.blocks.len())))
}

pub fn decompose(form: &CoprimeForm) -> Result<QPFDecomposition> {
    let s = form.total_power();
    let c = c_block(form)?;
    let blocks = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..form.blocks.len())
            .map(|j| scope.spawn(move || block_term(form, j)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("block worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(QPFDecomposition {
        form: form.clone(),
        s,
        c,
        blocks,
    })
}

fn block_term(form: &CoprimeForm, j: usize) -> Result<BlockTerm> {
    let Block { n, r } = form.blocks[j];
    let h = if r == 1 {
        block_numerator_fast(form, j)?
    } else {
        block_numerator_generic(form, j)?
    };
    let mut fact = BigInt::one();
    let h_sub = taylor_db(&h, n, r)?
        .into_iter()
        .enumerate()
        .map(|(i, hi)| {
            if i > 0 {
                fact *= i;
            }
            let mut coef = Rational::from_integer(fact.clone()).recip();
            if i % 2 == 1 {
                coef = -coef;
            }
            hi.scale(&coef)
        })
        .collect();
    Ok(BlockTerm { n, r, h, h_sub })
}

/// `x^k -> floor(k/b) x^{k-b}`.
pub fn d_b_derivative(h: &Poly, b: usize) -> Poly {
    assert!(b >= 1, "D_b needs b >= 1");
    Poly::new(
        h.coeffs()
            .iter()
            .enumerate()
            .skip(b)
            .map(|(k, c)| c * int((k / b) as i64))
            .collect(),
    )
}

/// `[h^{(0)}, ..., h^{(r-1)}]` with `h^{(j)} = rem_one_minus_xpow(D_b^j h, b)`,
/// so that `h = sum_j (-1)^j h^{(j)}/j! (1-x^b)^j`.
pub fn taylor_db(h: &Poly, b: usize, r: usize) -> Result<Vec<Poly>> {
    if b == 0 {
        return Err(Error::InvalidModulus("D_b needs b >= 1".into()));
    }
    if let Some(d) = h.degree() {
        if d >= r * b {
            return Err(Error::DegreeOverflow {
                degree: d,
                bound: r * b,
            });
        }
    }
    let mut out = Vec::with_capacity(r);
    let mut cur = h.clone();
    for _ in 0..r {
        out.push(rem_one_minus_xpow(&cur, b)?);
        cur = d_b_derivative(&cur, b);
    }
    Ok(out)
}

/// `c_0 = p(1) / prod n_j^{r_j}`.
pub fn leading_coefficient(form: &CoprimeForm) -> Rational {
    let denom = form.blocks.iter().fold(BigInt::one(), |acc, b| {
        acc * num_traits::pow(BigInt::from(b.n), b.r)
    });
    form.p.eval(&Rational::one()) / Rational::from_integer(denom)
}
