//! Generalized Fourier-Dedekind sums
//! `S_t = (1/b^r) sum_{j=1}^{b-1} p(xi^j) xi^{jt} / ((1-xi^j)^m prod_i (1-xi^{j n_i})^r)`,
//! exact and numeric, and machine checks of their reciprocity laws.

use std::f64::consts::PI;
use std::ops::Range;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::denum::{quasi_polynomial, series_coefficients};
use crate::error::{Error, Result};
use crate::evalop::{eval_factored, psi_poly};
use crate::qpf::{c_block, decompose, Block, CoprimeForm};
use crate::ratpoly::{int, Poly, Rational};
use crate::waves::{w1_poly, ComplexPoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FDSParams {
    pub m: usize,
    pub r: usize,
    pub p: Poly,
    pub moduli: Vec<usize>,
    pub b: usize,
    pub t: i64,
}

impl FDSParams {
    pub fn new(m: usize, r: usize, p: Poly, moduli: Vec<usize>, b: usize, t: i64) -> Result<Self> {
        let params = FDSParams {
            m,
            r,
            p,
            moduli,
            b,
            t,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.b == 0 {
            return Err(Error::InvalidModulus("b must be positive".into()));
        }
        if self.r == 0 {
            return Err(Error::InvalidOrder("r must be positive".into()));
        }
        for &n in &self.moduli {
            if n == 0 || n.gcd(&self.b) != 1 {
                return Err(Error::NotCoprime(format!("modulus {n} and b = {}", self.b)));
            }
        }
        Ok(())
    }
}

fn root_of_unity(n: usize, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * k.rem_euclid(n as i64) as f64 / n as f64)
}

/// Direct root-of-unity sum with an arbitrary numerator function.
pub fn fds_numeric_with(
    numerator: &dyn Fn(Complex64) -> Complex64,
    m: usize,
    r: usize,
    moduli: &[usize],
    b: usize,
    t: i64,
) -> ComplexPoint {
    let one = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 1..b as i64 {
        let z = root_of_unity(b, j);
        let mut den = (one - z).powi(m as i32);
        for &n in moduli {
            den *= (one - root_of_unity(b, j * n as i64)).powi(r as i32);
        }
        sum += numerator(z) * root_of_unity(b, j * t.rem_euclid(b as i64)) / den;
    }
    sum / (b as f64).powi(r as i32)
}

pub fn fds_numeric(params: &FDSParams) -> ComplexPoint {
    let p = &params.p;
    fds_numeric_with(
        &|z| p.eval_complex(z),
        params.m,
        params.r,
        &params.moduli,
        params.b,
        params.t,
    )
}

/// Finite-Fourier table `h` with `S_t = h[(-t) mod b] / b^{r-1}`:
/// `h = (1-x) eval(p / ((1-x)^{m+1} prod (1-x^{n_i})^r); Psi_b)`.
pub fn fds_table(params: &FDSParams) -> Result<Poly> {
    params.validate()?;
    if params.b == 1 {
        return Ok(Poly::zero());
    }
    let mut factors = vec![(Poly::one_minus_x(), params.m as u32 + 1)];
    factors.extend(
        params
            .moduli
            .iter()
            .map(|&n| (Poly::one_minus_xpow(n), params.r as u32)),
    );
    let g = eval_factored(&params.p, &factors, &psi_poly(params.b))?;
    Ok(&Poly::one_minus_x() * &g)
}

pub fn fds_exact(params: &FDSParams) -> Result<Rational> {
    let h = fds_table(params)?;
    let b = params.b as i64;
    let scale = Rational::from_integer(num_traits::pow(BigInt::from(b), params.r - 1));
    Ok(h.coeff((-params.t).rem_euclid(b) as usize) / scale)
}

/// `prod (1 + x^{n_i}) + prod (1 - x^{n_i})`, twice the even-cardinality subset sums.
pub fn zagier_theta(moduli: &[usize]) -> Poly {
    let plus = moduli.iter().fold(Poly::one(), |acc, &n| {
        &acc * &(&Poly::one() + &Poly::monomial(Rational::one(), n))
    });
    let minus = moduli
        .iter()
        .fold(Poly::one(), |acc, &n| &acc * &Poly::one_minus_xpow(n));
    &plus + &minus
}

/// `S^{(m, 1, theta)}_t(moduli; b)` for an odd number of moduli.
pub fn zagier_sum(m: usize, moduli: &[usize], b: usize, t: i64) -> Result<Rational> {
    if moduli.len().is_multiple_of(2) {
        return Err(Error::OddArityRequired(moduli.len()));
    }
    fds_exact(&FDSParams::new(
        m,
        1,
        zagier_theta(moduli),
        moduli.to_vec(),
        b,
        t,
    )?)
}

/// One checked value of a reciprocity identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReciprocityEntry {
    pub t: i64,
    pub lhs: Rational,
    /// Second, independent evaluation of the left side when available.
    pub lhs_alt: Option<Rational>,
    pub rhs: Rational,
}

impl ReciprocityEntry {
    pub fn passed(&self) -> bool {
        self.lhs == self.rhs && self.lhs_alt.as_ref().is_none_or(|a| *a == self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReciprocityReport {
    pub identity: String,
    pub entries: Vec<ReciprocityEntry>,
}

impl ReciprocityReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(ReciprocityEntry::passed)
    }

    pub fn failures(&self) -> Vec<&ReciprocityEntry> {
        self.entries.iter().filter(|e| !e.passed()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "identity": self.identity,
            "passed": self.passed(),
            "entries": self.entries.iter().map(|e| {
                let mut v = json!({
                    "t": e.t,
                    "lhs": e.lhs.to_string(),
                    "rhs": e.rhs.to_string(),
                    "passed": e.passed(),
                });
                if let Some(a) = &e.lhs_alt {
                    v["lhs_alt"] = json!(a.to_string());
                }
                v
            }).collect::<Vec<_>>(),
        })
    }
}

fn equal_power_form(moduli: &[usize], m: usize, r: usize, p: &Poly) -> Result<CoprimeForm> {
    if moduli.is_empty() {
        return Err(Error::InvalidForm("need at least one modulus".into()));
    }
    let blocks = moduli.iter().map(|&n| Block { n, r }).collect();
    CoprimeForm::new(m, p.clone(), blocks)
}

fn complement(moduli: &[usize], j: usize) -> Vec<usize> {
    moduli
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, &n)| n)
        .collect()
}

/// `sum_j S^{(m,r,p)}_t(moduli without n_j; n_j)` by the exact route.
pub fn complementary_fds_sum(
    moduli: &[usize],
    m: usize,
    r: usize,
    p: &Poly,
    t: i64,
) -> Result<Rational> {
    let mut total = Rational::zero();
    for (j, &n) in moduli.iter().enumerate() {
        total += fds_exact(&FDSParams::new(
            m,
            r,
            p.clone(),
            complement(moduli, j),
            n,
            t,
        )?)?;
    }
    Ok(total)
}

fn check_range(range: &Range<i64>, limit: i64) -> Result<()> {
    if range.start < 0 || range.end > limit {
        return Err(Error::InvalidRange(format!(
            "t range {}..{} outside 0..{limit}",
            range.start, range.end
        )));
    }
    Ok(())
}

/// Checks `sum_j S_t = p(0) - poly(0)` at `t = 0` and `-poly(-t)` for
/// `1 <= t < sum n_j + m - deg p`, where `poly` is the `W_1` polynomial of
/// `p / ((1-x)^m prod (1-x^{n_j}))`. Defaults to the full range.
pub fn verify_reciprocity_r1(
    moduli: &[usize],
    m: usize,
    p: &Poly,
    t_range: Option<Range<i64>>,
) -> Result<ReciprocityReport> {
    let form = equal_power_form(moduli, m, 1, p)?;
    let limit = (moduli.iter().sum::<usize>() + m) as i64 - p.degree().unwrap_or(0) as i64;
    let range = t_range.unwrap_or(0..limit);
    check_range(&range, limit)?;
    let poly = w1_poly(&c_block(&form)?, form.total_power());
    let entries = range
        .map(|t| {
            let lhs = complementary_fds_sum(moduli, m, 1, p, t)?;
            let rhs = if t == 0 {
                p.coeff(0) - poly.eval(&Rational::zero())
            } else {
                -poly.eval(&int(-t))
            };
            Ok(ReciprocityEntry {
                t,
                lhs,
                lhs_alt: None,
                rhs,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ReciprocityReport {
        identity: "reciprocity_r1".into(),
        entries,
    })
}

/// Parameters of the equal-multiplicity reciprocity law.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReciprocityCase {
    pub moduli: Vec<usize>,
    pub m: usize,
    pub r: usize,
    pub p: Poly,
    pub n_product: usize,
    pub lambda: i64,
    /// `poly'(t) = sum_q C(r-1, q) (-1)^q W_1(t - qN)`.
    pub poly_part: Poly,
    form: CoprimeForm,
}

impl ReciprocityCase {
    pub fn new(moduli: &[usize], m: usize, r: usize, p: Poly) -> Result<Self> {
        let form = equal_power_form(moduli, m, r, &p)?;
        let n_product: usize = moduli.iter().product();
        let sum: usize = moduli.iter().sum();
        let lambda =
            (m + r * sum) as i64 - ((r - 1) * n_product) as i64 - p.degree().unwrap_or(0) as i64;
        if lambda <= 0 {
            return Err(Error::InsufficientM(lambda));
        }
        let w1 = w1_poly(&c_block(&form)?, form.total_power());
        let mut poly_part = Poly::zero();
        let mut binom = BigInt::one();
        for q in 0..r {
            let shift = Poly::new(vec![int(-((q * n_product) as i64)), int(1)]);
            let mut term = w1
                .compose(&shift)
                .scale(&Rational::from_integer(binom.clone()));
            if q % 2 == 1 {
                term = -term;
            }
            poly_part = &poly_part + &term;
            binom = binom * (r - 1 - q) / (q + 1);
        }
        Ok(ReciprocityCase {
            moduli: moduli.to_vec(),
            m,
            r,
            p,
            n_product,
            lambda,
            poly_part,
            form,
        })
    }

    fn n_pow(&self) -> Rational {
        Rational::from_integer(num_traits::pow(BigInt::from(self.n_product), self.r - 1))
    }

    /// Right side of the law at `t` (`0 <= t < lambda`).
    pub fn rhs(&self, t: i64) -> Rational {
        let v = if t == 0 {
            self.p.coeff(0) - self.poly_part.eval(&Rational::zero())
        } else {
            -self.poly_part.eval(&int(-t))
        };
        v / self.n_pow()
    }
}

/// `sum_q C(r-1, q) (-1)^q a(u - qN)` for a coefficient function `a`.
fn alternating_sum(case: &ReciprocityCase, u: u64, a: &dyn Fn(u64) -> Rational) -> Rational {
    let mut total = Rational::zero();
    let mut binom = BigInt::one();
    for q in 0..case.r {
        let v = a(u - (q * case.n_product) as u64) * Rational::from_integer(binom.clone());
        if q % 2 == 1 {
            total -= v;
        } else {
            total += v;
        }
        binom = binom * (case.r - 1 - q) / (q + 1);
    }
    total
}

/// Checks `sum_j S_t = (p(0) - poly'(0))/N^{r-1}` at `t = 0` and
/// `-poly'(-t)/N^{r-1}` for `1 <= t < lambda`. The left side is computed twice:
/// from denumerants as `(b(u) - poly'(u))/N^{r-1}` with `u = (-t mod N) + (r-1)N`
/// and `b` the alternating sum of `d(u - qN)`, and from the exact sums.
pub fn verify_reciprocity_general(
    case: &ReciprocityCase,
    t_range: Option<Range<i64>>,
) -> Result<ReciprocityReport> {
    let range = t_range.unwrap_or(0..case.lambda);
    check_range(&range, case.lambda)?;
    let n = case.n_product as i64;
    let qp = quasi_polynomial(&decompose(&case.form)?);
    let entries = range
        .map(|t| {
            let u = ((-t).rem_euclid(n) + (case.r as i64 - 1) * n) as u64;
            let b = alternating_sum(case, u, &|s| qp.value(s));
            let wave = (b - case.poly_part.eval(&int(u as i64))) / case.n_pow();
            let fds = complementary_fds_sum(&case.moduli, case.m, case.r, &case.p, t)?;
            Ok(ReciprocityEntry {
                t,
                lhs: wave,
                lhs_alt: Some(fds),
                rhs: case.rhs(t),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ReciprocityReport {
        identity: "reciprocity_general".into(),
        entries,
    })
}

/// `b(u)` from the power series of `p (1-x^N)^{r-1} / ((1-x)^m prod (1-x^n)^r)`,
/// an oracle independent of the decomposition.
pub fn alternating_denumerant_series(case: &ReciprocityCase, u: u64) -> Rational {
    let series = series_coefficients(&case.form, u as usize + 1);
    alternating_sum(case, u, &|s| series[s as usize].clone())
}

/// Periodic tables in the normalization used by the coefficient identities:
/// `c^{(j)} = n_j eval(1 / ((1-x)^{k-1} prod_{i != j} Psi_{n_i}); Psi_{n_j})`.
pub fn reference_coefficient_tables(moduli: &[usize]) -> Result<Vec<Vec<Rational>>> {
    let k = moduli.len();
    moduli
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let mut factors = vec![(Poly::one_minus_x(), k as u32 - 1)];
            factors.extend(complement(moduli, j).into_iter().map(|m| (psi_poly(m), 1)));
            let g = eval_factored(&Poly::one(), &factors, &psi_poly(n))?;
            Ok(g.scale(&int(n as i64)).padded(n))
        })
        .collect()
}

fn check_pairwise_coprime(moduli: &[usize]) -> Result<()> {
    for (i, &a) in moduli.iter().enumerate() {
        if a < 2 {
            return Err(Error::InvalidModulus(format!("modulus {a} < 2")));
        }
        for &b in &moduli[i + 1..] {
            if a.gcd(&b) != 1 {
                return Err(Error::NotCoprime(format!("moduli {a} and {b}")));
            }
        }
    }
    Ok(())
}

/// `sum_j (N/n_j) c^{(j)}[sign * n mod n_j]`.
fn weighted_lookup(moduli: &[usize], tables: &[Vec<Rational>], n: i64, sign: i64) -> Rational {
    let big_n: usize = moduli.iter().product();
    moduli
        .iter()
        .zip(tables)
        .map(|(&nj, tab)| {
            &tab[(sign * n).rem_euclid(nj as i64) as usize] * int((big_n / nj) as i64)
        })
        .sum()
}

/// The coefficient identities in their stated form: the two-modulus law
/// (`n1 n2 - 1` at 0, `n - 1` on `1 <= n < n1 n2`), its symmetric companion
/// (`= 1` on the same range), and the three-modulus law
/// (`2s' - s + 1` at 0, `(n-1)(n+1-s)/2` on `1 <= n < s'`).
pub fn rademacher_checks(
    n1: usize,
    n2: usize,
    n3: Option<usize>,
) -> Result<Vec<ReciprocityReport>> {
    let mut moduli = vec![n1, n2];
    moduli.extend(n3);
    check_pairwise_coprime(&moduli)?;
    let tables = reference_coefficient_tables(&moduli)?;
    let big_n: i64 = moduli.iter().product::<usize>() as i64;
    let entry = |n: i64, lhs: Rational, rhs: Rational| ReciprocityEntry {
        t: n,
        lhs,
        lhs_alt: None,
        rhs,
    };
    let mut reports = Vec::new();
    if n3.is_none() {
        reports.push(ReciprocityReport {
            identity: "rademacher_k2".into(),
            entries: (0..big_n)
                .map(|n| {
                    let rhs = if n == 0 { int(big_n - 1) } else { int(n - 1) };
                    entry(n, weighted_lookup(&moduli, &tables, n, -1), rhs)
                })
                .collect(),
        });
        reports.push(ReciprocityReport {
            identity: "sylvester_k2".into(),
            entries: (1..big_n)
                .map(|n| {
                    let sum = weighted_lookup(&moduli, &tables, n, 1)
                        + weighted_lookup(&moduli, &tables, n, -1);
                    entry(n, sum / int(-2), int(1))
                })
                .collect(),
        });
    } else {
        let s: i64 = moduli.iter().sum::<usize>() as i64;
        reports.push(ReciprocityReport {
            identity: "rademacher_k3".into(),
            entries: (0..big_n)
                .map(|n| {
                    let rhs = if n == 0 {
                        int(2 * big_n - s + 1)
                    } else {
                        rat_half((n - 1) * (n + 1 - s))
                    };
                    entry(n, weighted_lookup(&moduli, &tables, n, -1), rhs)
                })
                .collect(),
        });
    }
    Ok(reports)
}

fn rat_half(v: i64) -> Rational {
    Rational::new(v.into(), 2.into())
}

/// The same weighted table sums against values derived from the `r = 1`
/// reciprocity law with `m = 0, p = 1`: `N (c_{k-1} + p(0) - poly(0))` at 0 and
/// `N (c_{k-1} - poly(-n))` for `1 <= n < sum n_j`.
pub fn rademacher_derived_checks(moduli: &[usize]) -> Result<ReciprocityReport> {
    check_pairwise_coprime(moduli)?;
    let tables = reference_coefficient_tables(moduli)?;
    let form = equal_power_form(moduli, 0, 1, &Poly::one())?;
    let c = c_block(&form)?;
    let poly = w1_poly(&c, form.total_power());
    let last = c.last().cloned().unwrap_or_else(Rational::zero);
    let big_n = int(moduli.iter().product::<usize>() as i64);
    let s = moduli.iter().sum::<usize>() as i64;
    let entries = (0..s)
        .map(|n| {
            let inner = if n == 0 {
                Rational::one() - poly.eval(&Rational::zero())
            } else {
                -poly.eval(&int(-n))
            };
            ReciprocityEntry {
                t: n,
                lhs: weighted_lookup(moduli, &tables, n, -1),
                lhs_alt: None,
                rhs: &big_n * (&last + inner),
            }
        })
        .collect();
    Ok(ReciprocityReport {
        identity: "rademacher_derived".into(),
        entries,
    })
}
