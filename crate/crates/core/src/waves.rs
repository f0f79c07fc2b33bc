//! Sylvester waves: the polynomial part `W_1`, the periodic waves `W_n`,
//! their top-order coefficients, and floating root-of-unity cross-checks.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::bernoulli::f_at_one_sequence;
use crate::denum::{multiset_binomial, quasi_polynomial, PeriodicBlock, QuasiPolynomial};
use crate::error::{Error, Result};
use crate::qpf::{c_block, CoprimeForm, PartTuple, QPFDecomposition};
use crate::ratpoly::{int, Poly, Rational};

/// Complex sample point; only ever used by the numeric cross-checks.
pub type ComplexPoint = Complex64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaveSet {
    pub s: usize,
    /// `W_1(t) = sum_j w1_coeffs[j] C(t + s - j - 1, s - j - 1)`.
    pub w1_coeffs: Vec<Rational>,
    pub waves: Vec<PeriodicBlock>,
}

impl From<QuasiPolynomial> for WaveSet {
    fn from(q: QuasiPolynomial) -> Self {
        WaveSet {
            s: q.s,
            w1_coeffs: q.c,
            waves: q.periodic_blocks,
        }
    }
}

impl WaveSet {
    pub fn new(dec: &QPFDecomposition) -> Self {
        quasi_polynomial(dec).into()
    }

    pub fn w1(&self, t: u64) -> Rational {
        w1_from_coeffs(&self.w1_coeffs, self.s, t)
    }

    /// `W_1 + sum_j W_{n_j}`, which is `d(t)`.
    pub fn total(&self, t: u64) -> Rational {
        self.waves
            .iter()
            .fold(self.w1(t), |acc, w| acc + w.value(t))
    }
}

fn w1_from_coeffs(c: &[Rational], s: usize, t: u64) -> Rational {
    c.iter()
        .enumerate()
        .map(|(j, cj)| Rational::from_integer(multiset_binomial(t, s - j)) * cj)
        .sum()
}

/// `C(t + l - 1, l - 1)` as a polynomial in `t`.
pub fn multiset_binomial_poly(l: usize) -> Poly {
    let mut acc = Poly::one();
    let mut fact = BigInt::one();
    for i in 1..l {
        acc = &acc * &Poly::new(vec![int(i as i64), int(1)]);
        fact *= i;
    }
    acc.scale(&Rational::from_integer(fact).recip())
}

/// `W_1` as a polynomial in `t`.
pub fn w1_poly(c: &[Rational], s: usize) -> Poly {
    c.iter().enumerate().fold(Poly::zero(), |acc, (j, cj)| {
        &acc + &multiset_binomial_poly(s - j).scale(cj)
    })
}

/// `W_1(t)` of a coprime form, from the `c` block of its decomposition.
pub fn w1(form: &CoprimeForm, t: u64) -> Result<Rational> {
    Ok(w1_from_coeffs(&c_block(form)?, form.total_power(), t))
}

/// `W_1(t)` straight from the parts:
/// `(1/prod a_i) sum_{j<r} C(t+r-j-1, t) sum_{j_1+..+j_r=j} prod (-1)^{j_i} tb_{j_i}(a_i)/j_i!`.
pub fn w1_from_parts(parts: &PartTuple, t: u64) -> Result<Rational> {
    let a = parts.parts();
    let r = a.len();
    let mut acc = vec![Rational::zero(); r];
    acc[0] = Rational::one();
    let mut prod = BigInt::one();
    for &ai in a {
        // (-1)^j tb_j(a)/j! is f_j^{(a)}(1).
        let seq = f_at_one_sequence(ai as usize, r - 1)?;
        acc = (0..r)
            .map(|k| (0..=k).map(|i| &acc[i] * &seq[k - i]).sum())
            .collect();
        prod *= ai;
    }
    let prod = Rational::from_integer(prod);
    Ok(w1_from_coeffs(&acc, r, t) / prod)
}

pub fn wave_eval(ws: &WaveSet, j: usize, t: u64) -> Result<Rational> {
    Ok(wave(ws, j)?.value(t))
}

fn wave(ws: &WaveSet, j: usize) -> Result<&PeriodicBlock> {
    ws.waves
        .get(j)
        .ok_or_else(|| Error::IndexOutOfRange(format!("wave {j} of {}", ws.waves.len())))
}

/// Coefficient of `t^{r-1}/(r-1)!` in `W_{n_j}(t)`, a period-`n_j` function of `t`.
pub fn top_coefficient(ws: &WaveSet, j: usize, t: u64) -> Result<Rational> {
    let w = wave(ws, j)?;
    let lead = &w.tables[0][(t % w.n as u64) as usize];
    let scale = Rational::from_integer(num_traits::pow(BigInt::from(w.n), w.r - 1));
    Ok(lead / scale)
}

fn root_of_unity(n: usize, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

/// `(1/n^r) sum_{a=1}^{n-1} p(xi^a) xi^{-a t} / ((1 - xi^a)^m prod_{i != j} (1 - xi^{a n_i})^{r_i})`
/// with `xi = exp(2 pi i / n)` for the `j`-th block.
pub fn structure_check_numeric(form: &CoprimeForm, j: usize, t: u64) -> Result<ComplexPoint> {
    let blk = form
        .blocks
        .get(j)
        .ok_or_else(|| Error::IndexOutOfRange(format!("block {j} of {}", form.blocks.len())))?;
    let n = blk.n;
    let one = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for a in 1..n as i64 {
        let z = root_of_unity(n, a);
        let mut den = (one - z).powi(form.m as i32);
        for (i, b) in form.blocks.iter().enumerate() {
            if i != j {
                den *= (one - root_of_unity(n, a * b.n as i64)).powi(b.r as i32);
            }
        }
        let phase = root_of_unity(n, -(a * (t % n as u64) as i64));
        sum += form.p.eval_complex(z) * phase / den;
    }
    Ok(sum / (n as f64).powi(blk.r as i32))
}

/// `(1/b) sum_j h(xi^j) xi^{-t j}`, which recovers the coefficient `h_{t % b}`.
pub fn finite_fourier_numeric(h: &Poly, b: usize, t: i64) -> ComplexPoint {
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..b as i64 {
        sum +=
            h.eval_complex(root_of_unity(b, j)) * root_of_unity(b, -(t.rem_euclid(b as i64) * j));
    }
    sum / b as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denum::oracle_counts;
    use crate::qpf::{decompose, reduce};
    use crate::ratpoly::tests::arb_poly;
    use crate::ratpoly::{rat, rational_to_f64};
    use proptest::prelude::*;

    fn tuple(v: &[u64]) -> PartTuple {
        PartTuple::new(v.to_vec()).unwrap()
    }

    fn waves_of(v: &[u64]) -> (CoprimeForm, WaveSet) {
        let f = reduce(&tuple(v));
        let ws = WaveSet::new(&decompose(&f).unwrap());
        (f, ws)
    }

    #[test]
    fn w1_examples() {
        for t in 0..10 {
            assert_eq!(w1_from_parts(&tuple(&[1]), t).unwrap(), int(1));
        }
        let t = tuple(&[3, 11, 11]);
        let f = reduce(&t);
        for s in 0..=10 {
            assert_eq!(w1(&f, s).unwrap(), w1_from_parts(&t, s).unwrap());
        }
        let t334 = tuple(&[3, 3, 4]);
        for s in 0..=20i64 {
            let want = rat(s * s, 72) + rat(10 * s, 72) + rat(5 * 9 + 16 + 6 * 12, 12 * 9 * 4);
            assert_eq!(w1_from_parts(&t334, s as u64).unwrap(), want);
            assert_eq!(w1(&reduce(&t334), s as u64).unwrap(), want);
        }
    }

    #[test]
    fn w1_routes_agree_on_many_tuples() {
        for parts in [
            vec![1, 2, 3, 4, 5],
            vec![2, 3],
            vec![2, 2, 3],
            vec![6, 10, 15],
            vec![1, 1, 4],
        ] {
            let t = tuple(&parts);
            let f = reduce(&t);
            for s in 0..30 {
                assert_eq!(
                    w1(&f, s).unwrap(),
                    w1_from_parts(&t, s).unwrap(),
                    "{parts:?}"
                );
            }
        }
    }

    #[test]
    fn w1_poly_matches_values() {
        let (f, ws) = waves_of(&[1, 2, 3, 4, 5]);
        let poly = w1_poly(&ws.w1_coeffs, f.total_power());
        for t in 0..40 {
            assert_eq!(poly.eval(&int(t as i64)), ws.w1(t));
        }
    }

    #[test]
    fn waves_of_one_to_five() {
        let (f, ws) = waves_of(&[1, 2, 3, 4, 5]);
        let d = oracle_counts(&[1, 2, 3, 4, 5], 200);
        let idx = |n: usize| f.blocks.iter().position(|b| b.n == n).unwrap();
        let (j3, j4, j5) = (idx(3), idx(4), idx(5));
        for t in 0..=200u64 {
            let total = ws.w1(t)
                + wave_eval(&ws, j3, t).unwrap()
                + wave_eval(&ws, j4, t).unwrap()
                + wave_eval(&ws, j5, t).unwrap();
            assert_eq!(total, Rational::from_integer(d[t as usize].clone().into()));
            assert_eq!(
                wave_eval(&ws, j3, t).unwrap(),
                wave_eval(&ws, j3, t + 3).unwrap()
            );
            assert_eq!(
                wave_eval(&ws, j5, t).unwrap(),
                wave_eval(&ws, j5, t + 5).unwrap()
            );
        }
        // W_4 grows linearly: second differences with step 4 vanish, first ones do not.
        for t in 8..100u64 {
            let w = |s| wave_eval(&ws, j4, s).unwrap();
            assert_eq!(w(t) - w(t - 4), w(t - 4) - w(t - 8));
            assert_ne!(w(t) - w(t - 4), int(0));
        }
        for t in 0..8u64 {
            let want = if t % 2 == 0 { rat(1, 64) } else { rat(-1, 64) };
            assert_eq!(top_coefficient(&ws, j4, t).unwrap(), want);
            let z = structure_check_numeric(&f, j4, t).unwrap();
            assert!((z.re - rational_to_f64(&want)).abs() < 1e-9 && z.im.abs() < 1e-9);
        }
        for (j, _) in f.blocks.iter().enumerate().filter(|(_, b)| b.r == 1) {
            for t in 0..10 {
                assert_eq!(
                    top_coefficient(&ws, j, t).unwrap(),
                    wave_eval(&ws, j, t).unwrap()
                );
            }
        }
    }

    #[test]
    fn structure_check_matches_tables() {
        for parts in [
            vec![1, 2, 3, 4, 5],
            vec![3, 11, 11],
            vec![2, 2, 3, 3, 5],
            vec![9, 17, 31],
        ] {
            let (f, ws) = waves_of(&parts);
            for (j, b) in f.blocks.iter().enumerate() {
                for t in 0..=2 * b.n as u64 {
                    let exact = rational_to_f64(&top_coefficient(&ws, j, t).unwrap());
                    let z = structure_check_numeric(&f, j, t).unwrap();
                    assert!((z.re - exact).abs() < 1e-9, "{parts:?} n={} t={t}", b.n);
                    assert!(z.im.abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn single_block_wave_is_periodic_part() {
        let f = CoprimeForm::new(1, Poly::one(), vec![crate::qpf::Block { n: 3, r: 1 }]).unwrap();
        let dec = decompose(&f).unwrap();
        let ws = WaveSet::new(&dec);
        let series = crate::denum::series_coefficients(&f, 30);
        for t in 0..30u64 {
            assert_eq!(ws.w1(t) + wave_eval(&ws, 0, t).unwrap(), series[t as usize]);
        }
    }

    #[test]
    fn finite_fourier_examples() {
        assert!((finite_fourier_numeric(&Poly::one(), 5, 0) - 1.0).norm() < 1e-12);
        let x2 = Poly::monomial(int(1), 2);
        assert!((finite_fourier_numeric(&x2, 4, 2) - 1.0).norm() < 1e-12);
        assert!(finite_fourier_numeric(&x2, 4, 1).norm() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn finite_fourier_matches_coefficients(h in arb_poly(12), b in 1usize..=12, t in -30i64..30) {
            let h = h.truncate(b);
            let z = finite_fourier_numeric(&h, b, t);
            let want = rational_to_f64(&h.coeff(t.rem_euclid(b as i64) as usize));
            prop_assert!((z.re - want).abs() < 1e-9 && z.im.abs() < 1e-9);
        }
    }
}
