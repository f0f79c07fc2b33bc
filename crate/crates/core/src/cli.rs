//! Command-line front end. `run` is the whole program minus process exit so
//! tests can drive it with in-memory streams.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bernoulli::{f_km, tilde_beta_order_r};
use crate::dedekind::{
    fds_exact, fds_numeric, rademacher_checks, rademacher_derived_checks,
    verify_reciprocity_general, verify_reciprocity_r1, FDSParams, ReciprocityCase,
    ReciprocityReport,
};
use crate::denum::quasi_polynomial;
use crate::error::{Error, Result};
use crate::qpf::{decompose, reduce, Block, BlockTerm, CoprimeForm, PartTuple, QPFDecomposition};
use crate::ratpoly::{parse_rational, Poly, Rational};
use crate::waves::{top_coefficient, WaveSet};

const DEFAULT_MAX_DEGREE: usize = 10_000;

#[derive(Parser, Debug)]
#[command(
    name = "qpf",
    version,
    about = "Exact q-partial fractions and denumerants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce a part tuple and print its q-partial fraction decomposition.
    Decompose {
        #[arg(long, value_parser = parse_parts)]
        parts: Parts,
        #[arg(long, value_enum, default_value_t = DecomposeFormat::Text)]
        format: DecomposeFormat,
    },
    /// Exact denumerant d(t).
    Denumerant {
        #[arg(long, value_parser = parse_parts)]
        parts: Parts,
        #[arg(long)]
        t: u64,
    },
    /// Rows t, d(t), W1(t) and one column per wave, then a checksum row.
    Table {
        #[command(flatten)]
        range: TupleRange,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Wave values and top-order wave coefficients as CSV.
    Waves {
        #[command(flatten)]
        range: TupleRange,
        #[arg(long, value_enum, default_value_t = CsvOnly::Csv)]
        format: CsvOnly,
    },
    /// Reciprocal degenerate Bernoulli numbers.
    Bernoulli {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        /// Print the polynomial f_k^(m)(x) instead of its value at 1.
        #[arg(long)]
        poly: bool,
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
    /// Generalized Fourier-Dedekind sum.
    Fds {
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value = "1")]
        p: Poly,
        #[arg(long, default_value = "", value_parser = parse_moduli)]
        moduli: Moduli,
        #[arg(long)]
        b: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0)]
        t: i64,
        /// Floating root-of-unity evaluation instead of the exact value.
        #[arg(long)]
        numeric: bool,
    },
    /// Verify reciprocity identities; prints a JSON report.
    Check {
        #[command(subcommand)]
        which: CheckCommand,
    },
}

#[derive(Subcommand, Debug)]
enum CheckCommand {
    Reciprocity {
        #[arg(long, value_parser = parse_moduli)]
        moduli: Moduli,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value = "1")]
        p: Poly,
        #[arg(long)]
        t0: Option<i64>,
        /// Exclusive end of the t range; defaults to the law's bound.
        #[arg(long)]
        t1: Option<i64>,
    },
    Rademacher {
        /// Two or three pairwise coprime moduli.
        #[arg(long, value_parser = parse_moduli)]
        moduli: Moduli,
    },
}

#[derive(Args, Debug)]
struct TupleRange {
    #[arg(long, value_parser = parse_parts)]
    parts: Parts,
    #[arg(long, default_value_t = 0)]
    t0: u64,
    /// Inclusive.
    #[arg(long)]
    t1: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DecomposeFormat {
    Text,
    Json,
    Latex,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CsvOnly {
    Csv,
}

#[derive(Clone, Debug)]
struct Moduli(Vec<usize>);

/// Raw parts; the gcd condition is a domain error checked after parsing.
#[derive(Clone, Debug)]
struct Parts(Vec<u64>);

fn parse_parts(s: &str) -> std::result::Result<Parts, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| format!("invalid part `{t}`"))
        })
        .collect::<std::result::Result<_, _>>()
        .map(Parts)
}

fn parse_moduli(s: &str) -> std::result::Result<Moduli, String> {
    if s.trim().is_empty() {
        return Ok(Moduli(Vec::new()));
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid modulus `{t}`"))
        })
        .collect::<std::result::Result<_, _>>()
        .map(Moduli)
}

/// Runs the program on `args` (including the program name). Returns the exit
/// code: 0 on success, 1 on domain errors, 2 on usage errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 2;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            1
        }
    }
}

fn max_degree() -> usize {
    std::env::var("QPF_MAX_DEGREE")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DEGREE)
}

fn guard_degree(degree: usize) -> Result<()> {
    let limit = max_degree();
    if degree > limit {
        return Err(Error::DegreeLimitExceeded { degree, limit });
    }
    Ok(())
}

fn guarded_form(parts: &Parts) -> Result<CoprimeForm> {
    let form = reduce(&PartTuple::new(parts.0.clone())?);
    guard_degree(form.denominator_degree())?;
    Ok(form)
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Decompose { parts, format } => {
            let dec = decompose(&guarded_form(&parts)?)?;
            let text = match format {
                DecomposeFormat::Text => to_text(&dec),
                DecomposeFormat::Json => {
                    serde_json::to_string_pretty(&DecompositionJson::from(&dec)).unwrap() + "\n"
                }
                DecomposeFormat::Latex => to_latex(&dec) + "\n",
            };
            out.write_all(text.as_bytes()).map_err(io)
        }
        Command::Denumerant { parts, t } => {
            let dec = decompose(&guarded_form(&parts)?)?;
            let d = quasi_polynomial(&dec).evaluate(t)?;
            writeln!(out, "{d}").map_err(io)
        }
        Command::Table { range, format } => {
            let rows = wave_rows(&range, false)?;
            let text = match format {
                TableFormat::Csv => rows.to_csv(),
                TableFormat::Json => serde_json::to_string_pretty(&rows.to_json()).unwrap() + "\n",
            };
            out.write_all(text.as_bytes()).map_err(io)
        }
        Command::Waves {
            range,
            format: CsvOnly::Csv,
        } => out
            .write_all(wave_rows(&range, true)?.to_csv().as_bytes())
            .map_err(io),
        Command::Bernoulli { m, k, poly, order } => {
            if poly {
                if order != 1 {
                    return Err(Error::InvalidOrder("--poly needs --order 1".into()));
                }
                guard_degree(m.saturating_sub(1))?;
                writeln!(out, "{}", f_km(m, k)?).map_err(io)
            } else {
                writeln!(out, "{}", tilde_beta_order_r(k, m, order)?).map_err(io)
            }
        }
        Command::Fds {
            m,
            r,
            p,
            moduli,
            b,
            t,
            numeric,
        } => {
            let params = FDSParams::new(m, r, p, moduli.0, b, t)?;
            guard_degree(m + 1 + r * params.moduli.iter().sum::<usize>())?;
            if numeric {
                let z = fds_numeric(&params);
                writeln!(out, "{} {}", z.re, z.im).map_err(io)
            } else {
                writeln!(out, "{}", fds_exact(&params)?).map_err(io)
            }
        }
        Command::Check { which } => {
            let reports = run_check(which)?;
            let doc = json!({
                "passed": reports.iter().all(ReciprocityReport::passed),
                "reports": reports.iter().map(ReciprocityReport::to_json).collect::<Vec<_>>(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap()).map_err(io)?;
            let failed: Vec<&str> = reports
                .iter()
                .filter(|r| !r.passed())
                .map(|r| r.identity.as_str())
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Error::VerificationFailed(failed.join(", ")))
            }
        }
    }
}

fn run_check(which: CheckCommand) -> Result<Vec<ReciprocityReport>> {
    match which {
        CheckCommand::Reciprocity {
            moduli,
            m,
            r,
            p,
            t0,
            t1,
        } => {
            guard_degree(m + r * moduli.0.iter().sum::<usize>())?;
            let range = |limit: i64| t0.unwrap_or(0)..t1.unwrap_or(limit);
            if r == 1 {
                let limit =
                    (moduli.0.iter().sum::<usize>() + m) as i64 - p.degree().unwrap_or(0) as i64;
                Ok(vec![verify_reciprocity_r1(
                    &moduli.0,
                    m,
                    &p,
                    Some(range(limit)),
                )?])
            } else {
                let case = ReciprocityCase::new(&moduli.0, m, r, p)?;
                let limit = case.lambda;
                Ok(vec![verify_reciprocity_general(&case, Some(range(limit)))?])
            }
        }
        CheckCommand::Rademacher { moduli } => {
            let (n1, n2, n3) = match moduli.0[..] {
                [a, b] => (a, b, None),
                [a, b, c] => (a, b, Some(c)),
                _ => {
                    return Err(Error::InvalidTuple(
                        "rademacher needs two or three moduli".into(),
                    ))
                }
            };
            let mut reports = rademacher_checks(n1, n2, n3)?;
            reports.push(rademacher_derived_checks(&moduli.0)?);
            Ok(reports)
        }
    }
}

/// Wire format of a decomposition; rationals and polynomials are strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub reduced: ReducedJson,
    pub c: Vec<String>,
    pub blocks: Vec<BlockJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedJson {
    pub m: usize,
    pub p: String,
    pub blocks: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockJson {
    pub n: usize,
    pub r: usize,
    pub h: String,
    pub h_sub: Vec<String>,
}

impl From<&QPFDecomposition> for DecompositionJson {
    fn from(dec: &QPFDecomposition) -> Self {
        DecompositionJson {
            reduced: ReducedJson {
                m: dec.form.m,
                p: dec.form.p.to_string(),
                blocks: dec.form.blocks.iter().map(|b| (b.n, b.r)).collect(),
            },
            c: dec.c.iter().map(ToString::to_string).collect(),
            blocks: dec
                .blocks
                .iter()
                .map(|b| BlockJson {
                    n: b.n,
                    r: b.r,
                    h: b.h.to_string(),
                    h_sub: b.h_sub.iter().map(ToString::to_string).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&DecompositionJson> for QPFDecomposition {
    type Error = Error;

    fn try_from(j: &DecompositionJson) -> Result<Self> {
        let blocks = j
            .reduced
            .blocks
            .iter()
            .map(|&(n, r)| Block { n, r })
            .collect();
        let form = CoprimeForm::new(j.reduced.m, j.reduced.p.parse()?, blocks)?;
        let s = form.total_power();
        Ok(QPFDecomposition {
            form,
            s,
            c: j.c
                .iter()
                .map(|c| parse_rational(c))
                .collect::<Result<_>>()?,
            blocks: j
                .blocks
                .iter()
                .map(|b| {
                    Ok(BlockTerm {
                        n: b.n,
                        r: b.r,
                        h: b.h.parse()?,
                        h_sub: b.h_sub.iter().map(|h| h.parse()).collect::<Result<_>>()?,
                    })
                })
                .collect::<Result<_>>()?,
        })
    }
}

pub fn decomposition_from_json(text: &str) -> Result<QPFDecomposition> {
    let j: DecompositionJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    QPFDecomposition::try_from(&j)
}

fn to_text(dec: &QPFDecomposition) -> String {
    let f = &dec.form;
    let mut s = format!("m = {}\np = {}\nblocks =", f.m, f.p);
    for b in &f.blocks {
        s += &format!(" ({}, {})", b.n, b.r);
    }
    s += "\n";
    for (j, c) in dec.c.iter().enumerate() {
        s += &format!("c_{j} = {c}    / (1-x)^{}\n", dec.s - j);
    }
    for b in &dec.blocks {
        s += &format!("block n = {} r = {}\n  h = {}\n", b.n, b.r, b.h);
        for (i, h) in b.h_sub.iter().enumerate() {
            s += &format!("  h_{i} = {h}    / (1-x^{})^{}\n", b.n, b.r - i);
        }
    }
    s
}

fn latex_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", q.numer(), q.denom())
    }
}

fn latex_poly(p: &Poly) -> String {
    let mut s = String::new();
    for (k, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if s.is_empty() {
            if c.is_negative() {
                s += "-";
            }
        } else {
            s += if c.is_negative() { " - " } else { " + " };
        }
        let mag = c.abs();
        if k == 0 || !mag.is_one() {
            s += &latex_rational(&mag);
        }
        match k {
            0 => {}
            1 => s += "x",
            _ => s += &format!("x^{{{k}}}"),
        }
    }
    if s.is_empty() {
        s += "0";
    }
    s
}

/// One `\frac{...}{...}` term per line; lines after the first start with `+ `.
pub fn to_latex(dec: &QPFDecomposition) -> String {
    let mut terms = Vec::new();
    for (j, c) in dec.c.iter().enumerate() {
        if !c.is_zero() {
            terms.push(format!(
                "\\frac{{{}}}{{(1-x)^{{{}}}}}",
                latex_rational(c),
                dec.s - j
            ));
        }
    }
    for b in &dec.blocks {
        if !b.h.is_zero() {
            terms.push(format!(
                "\\frac{{{}}}{{(1-x^{{{}}})^{{{}}}}}",
                latex_poly(&b.h),
                b.n,
                b.r
            ));
        }
    }
    if terms.is_empty() {
        return "0".into();
    }
    terms.join("\n+ ")
}

/// Parses `to_latex` output into `(numerator, n, r)` triples meaning
/// `numerator / (1 - x^n)^r`.
pub fn parse_latex(text: &str) -> Result<Vec<(Poly, usize, usize)>> {
    let bad = |what: &str| Error::Parse(format!("latex: {what}"));
    if text.trim() == "0" {
        return Ok(Vec::new());
    }
    text.trim()
        .split("\n+ ")
        .map(|term| {
            let body = term
                .trim()
                .strip_prefix("\\frac")
                .ok_or_else(|| bad("term must start with \\frac"))?;
            let (num, rest) = braced(body).ok_or_else(|| bad("numerator"))?;
            let (den, rest) = braced(rest).ok_or_else(|| bad("denominator"))?;
            if !rest.trim().is_empty() {
                return Err(bad("trailing text"));
            }
            let numerator: Poly = unfrac(num).parse()?;
            let (n, r) = parse_power_denominator(den).ok_or_else(|| bad(den))?;
            Ok((numerator, n, r))
        })
        .collect()
}

/// Splits `{inner}rest` at the matching brace.
fn braced(s: &str) -> Option<(&str, &str)> {
    let s = s.strip_prefix('{')?;
    let mut depth = 1usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some((&s[..i], &s[i + 1..]));
                }
            }
            _ => {}
        }
    }
    None
}

/// Rewrites `\frac{a}{b}` coefficients as `a/b`.
fn unfrac(s: &str) -> String {
    let mut out = String::new();
    let mut rest = s;
    while let Some(pos) = rest.find("\\frac") {
        out += &rest[..pos];
        let after = &rest[pos + 5..];
        match braced(after).and_then(|(a, r)| braced(r).map(|(b, r)| (a, b, r))) {
            Some((a, b, r)) => {
                out += &format!("{a}/{b}");
                rest = r;
            }
            None => {
                out += &rest[pos..];
                rest = "";
            }
        }
    }
    out + rest
}

/// `(1-x)^{k}` or `(1-x^{n})^{r}`.
fn parse_power_denominator(s: &str) -> Option<(usize, usize)> {
    let s = s.trim().strip_prefix("(1-x")?;
    let (n, rest) = match s.strip_prefix(')') {
        Some(rest) => (1, rest),
        None => {
            let (n, rest) = braced(s.strip_prefix('^')?)?;
            (n.parse().ok()?, rest.strip_prefix(')')?)
        }
    };
    let (r, rest) = braced(rest.strip_prefix('^')?)?;
    if !rest.is_empty() {
        return None;
    }
    Some((n, r.parse().ok()?))
}

/// Numerator of `sum numerator_i / (1 - x^{n_i})^{r_i}` over `denominator`,
/// which must be a multiple of every term's denominator.
pub fn latex_numerator_over(terms: &[(Poly, usize, usize)], denominator: &Poly) -> Result<Poly> {
    let mut total = Poly::zero();
    for (num, n, r) in terms {
        let d = Poly::one_minus_xpow(*n).pow(*r as u32);
        let (q, rem) = denominator.divmod(&d)?;
        if !rem.is_zero() {
            return Err(Error::InvalidForm(format!(
                "(1-x^{n})^{r} does not divide the denominator"
            )));
        }
        total = &total + &(num * &q);
    }
    Ok(total)
}

struct WaveRows {
    headers: Vec<String>,
    rows: Vec<(u64, Vec<Rational>)>,
}

impl WaveRows {
    fn sums(&self) -> Vec<Rational> {
        let mut sums = vec![Rational::zero(); self.headers.len() - 1];
        for (_, row) in &self.rows {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        sums
    }

    fn to_csv(&self) -> String {
        let mut s = self.headers.join(",") + "\n";
        for (t, row) in &self.rows {
            s += &t.to_string();
            for v in row {
                s += &format!(",{v}");
            }
            s += "\n";
        }
        s += "sum";
        for v in self.sums() {
            s += &format!(",{v}");
        }
        s + "\n"
    }

    fn to_json(&self) -> Value {
        let cols = &self.headers[1..];
        let obj = |t: Value, row: &[Rational]| {
            let mut m = serde_json::Map::new();
            m.insert("t".into(), t);
            for (h, v) in cols.iter().zip(row) {
                m.insert(h.clone(), json!(v.to_string()));
            }
            Value::Object(m)
        };
        json!({
            "rows": self.rows.iter().map(|(t, row)| obj(json!(t), row)).collect::<Vec<_>>(),
            "sum": obj(json!("sum"), &self.sums()),
        })
    }
}

fn wave_rows(range: &TupleRange, with_top: bool) -> Result<WaveRows> {
    if range.t1 < range.t0 {
        return Err(Error::InvalidRange(format!(
            "t1 = {} < t0 = {}",
            range.t1, range.t0
        )));
    }
    let dec = decompose(&guarded_form(&range.parts)?)?;
    let ws = WaveSet::new(&dec);
    let qp = quasi_polynomial(&dec);
    let mut headers = vec!["t".to_string()];
    if !with_top {
        headers.push("d".into());
    }
    headers.push("W1".into());
    headers.extend(ws.waves.iter().map(|w| format!("W{}", w.n)));
    if with_top {
        headers.extend(ws.waves.iter().map(|w| format!("top{}", w.n)));
    }
    let mut rows = Vec::new();
    for t in range.t0..=range.t1 {
        let mut row = Vec::new();
        if !with_top {
            row.push(Rational::from_integer(qp.evaluate(t)?.into()));
        }
        row.push(ws.w1(t));
        row.extend(ws.waves.iter().map(|w| w.value(t)));
        if with_top {
            for j in 0..ws.waves.len() {
                row.push(top_coefficient(&ws, j, t)?);
            }
        }
        rows.push((t, row));
    }
    Ok(WaveRows { headers, rows })
}
