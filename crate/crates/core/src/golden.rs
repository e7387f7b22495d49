//! Published reference values, embedded from `data/*.toml`, and the
//! verification suite run by `cit verify`.

use num_bigint::BigInt;
use serde::Deserialize;

use crate::dumont;
use crate::enumeration::{self, two_adic_valuation};
use crate::error::{Error, Result};
use crate::model::{Color, Triangle};
use crate::perm;
use crate::poly::{QPolynomial, RationalPolynomialInN};
use crate::psi::{self, PsiValue};
use crate::qenum;
use crate::sampler;

const COUNTS: &str = include_str!("../data/counts.toml");
const VALUATIONS: &str = include_str!("../data/valuations.toml");
const Q_POLYNOMIALS: &str = include_str!("../data/q_polynomials.toml");
const Q_ANALOGS: &str = include_str!("../data/q_analogs.toml");
const LAWS: &str = include_str!("../data/laws.toml");
const PSI_EXAMPLES: &str = include_str!("../data/psi_examples.toml");

#[derive(Clone, Debug, Deserialize)]
pub struct CountRow {
    pub depth: usize,
    pub values: Vec<(usize, String)>,
    #[serde(default)]
    pub slow: Vec<usize>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Divisor {
    pub depth: usize,
    pub n: usize,
    pub divisor: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct PairList<T> {
    pub values: Vec<T>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Counts {
    pub count: Vec<CountRow>,
    pub divisor: Vec<Divisor>,
    pub canonical: PairList<(usize, u64)>,
    pub genocchi: PairList<String>,
}

/// One published count cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountCell {
    pub depth: usize,
    pub n: usize,
    pub value: BigInt,
    pub slow: bool,
}

impl Counts {
    pub fn cells(&self) -> Vec<CountCell> {
        self.count
            .iter()
            .flat_map(|row| {
                row.values.iter().map(move |(n, v)| CountCell {
                    depth: row.depth,
                    n: *n,
                    value: big(v),
                    slow: row.slow.contains(n),
                })
            })
            .collect()
    }

    pub fn get(&self, depth: usize, n: usize) -> Option<BigInt> {
        self.cells()
            .into_iter()
            .find(|c| c.depth == depth && c.n == n)
            .map(|c| c.value)
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct ValuationRow {
    pub depth: usize,
    /// Columns `n = 2, 3, …`.
    pub values: Vec<u64>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Sharpness {
    pub depth: usize,
    pub n: usize,
    pub normalized: u64,
    pub valuation: u64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Valuations {
    pub rows: Vec<ValuationRow>,
    pub sharpness: Sharpness,
}

#[derive(Clone, Debug, Deserialize)]
pub struct HalfPolynomial {
    pub n: usize,
    pub half: Vec<String>,
}

impl HalfPolynomial {
    /// Mirrors the listed half into the full palindrome of degree `C(n, 2)`.
    pub fn full(&self) -> QPolynomial {
        let d = self.n * (self.n - 1) / 2;
        let coeffs = (0..=d)
            .map(|k| big(&self.half[k.min(d - k)]))
            .collect();
        QPolynomial::new(coeffs)
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct LowPrefix {
    pub n: usize,
    pub coeffs: Vec<String>,
}

impl LowPrefix {
    pub fn values(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|c| big(c)).collect()
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct HSigma {
    pub sigma: Vec<usize>,
    pub scale: i64,
    pub coeffs: Vec<i64>,
}

impl HSigma {
    pub fn polynomial(&self) -> QPolynomial {
        QPolynomial::from_i64s(&self.coeffs).scale(&BigInt::from(self.scale))
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct QPolynomials {
    pub p: Vec<HalfPolynomial>,
    pub low: Vec<LowPrefix>,
    pub h_sigma: Vec<HSigma>,
}

impl QPolynomials {
    pub fn p(&self, n: usize) -> Option<QPolynomial> {
        self.p.iter().find(|p| p.n == n).map(HalfPolynomial::full)
    }

    /// Published `a_0(n), …` for any listed `n`, full or prefix.
    pub fn prefix(&self, n: usize) -> Option<Vec<BigInt>> {
        if let Some(p) = self.p(n) {
            return Some(p.coeffs().to_vec());
        }
        self.low.iter().find(|l| l.n == n).map(LowPrefix::values)
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct Factor {
    pub poly: Vec<i64>,
    pub power: u32,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Analog {
    pub name: String,
    pub n: usize,
    pub factors: Vec<Factor>,
}

impl Analog {
    pub fn expanded(&self) -> QPolynomial {
        self.factors.iter().fold(QPolynomial::one(), |acc, f| {
            &acc * &QPolynomial::from_i64s(&f.poly).pow(f.power)
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct QAnalogs {
    pub analog: Vec<Analog>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Law {
    pub k: usize,
    pub numer: Vec<i64>,
    pub denom: i64,
    pub from: i64,
}

impl Law {
    pub fn polynomial(&self) -> RationalPolynomialInN {
        RationalPolynomialInN::from_integer_ratio(&self.numer, self.denom)
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct HankelRoot {
    pub size: usize,
    pub offset: usize,
    pub root: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Laws {
    pub law: Vec<Law>,
    pub cumulants: Vec<[i64; 2]>,
    pub hankel: Vec<HankelRoot>,
}

impl Laws {
    pub fn law(&self, k: usize) -> Option<&Law> {
        self.law.iter().find(|l| l.k == k)
    }

    pub fn cumulant_polynomials(&self) -> Vec<RationalPolynomialInN> {
        self.cumulants
            .iter()
            .map(|c| RationalPolynomialInN::from_integer_ratio(c, 1))
            .collect()
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct PsiExample {
    pub label: String,
    pub n: usize,
    pub rows: Vec<Vec<Color>>,
    /// ψ of each consecutive level pair, bottom up.
    pub psi: Vec<PsiValue>,
}

impl PsiExample {
    pub fn triangle(&self) -> Triangle {
        Triangle::from_rows(self.n, self.rows.clone())
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct PsiExamples {
    pub example: Vec<PsiExample>,
}

fn big(s: &str) -> BigInt {
    s.parse().expect("embedded tables hold decimal integers")
}

fn parse<T: for<'de> Deserialize<'de>>(name: &str, text: &str) -> T {
    toml::from_str(text).unwrap_or_else(|e| panic!("embedded table {name} is malformed: {e}"))
}

pub fn counts() -> Counts {
    parse("counts.toml", COUNTS)
}

pub fn valuations() -> Valuations {
    parse("valuations.toml", VALUATIONS)
}

pub fn q_polynomials() -> QPolynomials {
    parse("q_polynomials.toml", Q_POLYNOMIALS)
}

pub fn q_analogs() -> QAnalogs {
    parse("q_analogs.toml", Q_ANALOGS)
}

pub fn laws() -> Laws {
    parse("laws.toml", LAWS)
}

pub fn psi_examples() -> PsiExamples {
    parse("psi_examples.toml", PSI_EXAMPLES)
}

/// ψ of each consecutive level pair of `t`, by the vertex model.
pub fn psi_per_level(t: &Triangle) -> Result<Vec<PsiValue>> {
    (1..t.depth())
        .map(|k| psi::psi_vertex_slices(t.n(), k, t.row(k), t.row(k + 1)))
        .collect()
}

/// Computes the named q-analog.
pub fn compute_analog(name: &str, n: usize) -> Result<QPolynomial> {
    match name {
        "randrianarivony" => Ok(dumont::q_analog_randrianarivony(n)),
        "han-zeng" => dumont::q_analog_han_zeng(n),
        "zeng-zhou" => Ok(dumont::q_analog_zeng_zhou(n)),
        other => Err(Error::InvalidConfig(format!("unknown q-analog {other:?}"))),
    }
}

/// Outcome of one verification item.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    /// Skip the slow count cells and `P_8`.
    pub fast: bool,
}

/// Sampler settings for the total-variation check.
pub const TV_STEPS: u64 = 10_000_000;
pub const TV_THINNING: u64 = 100;
pub const TV_SEED: u64 = 1;
pub const TV_TOLERANCE: f64 = 0.01;
pub const TV_QS: [&str; 3] = ["0.2", "0.5", "1"];

/// Runs the chain at `n` colors and returns the total variation distance of
/// its state histogram from the exact law.
pub fn sampler_tv(n: usize, q: &str, steps: u64, thinning: u64, seed: u64) -> Result<f64> {
    let exact = sampler::exact_distribution(n, &sampler::parse_decimal(q)?)?;
    let q_f: f64 = q
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {q:?}")))?;
    let cfg = sampler::SamplerConfig {
        n,
        q: q_f,
        steps,
        burn_in: 0,
        thinning,
        seed,
        record_states: true,
    };
    let run = sampler::run(&cfg)?;
    let counts = run.stats.state_counts.expect("state histogram requested");
    Ok(sampler::total_variation(&counts, &exact))
}

/// The reference suite: small count cells, valuations, worked ψ values,
/// `P_n(q)`, the three q-analogs, the linear coefficient law, Hankel roots and the sampler.
pub fn verify(opts: VerifyOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let counts = counts();

    for cell in counts.cells() {
        if cell.slow && opts.fast {
            continue;
        }
        let got = BigInt::from(enumeration::count_triangles(cell.depth, cell.n, true)?.total);
        out.push(Check::new(
            format!("count T_{}({})", cell.depth, cell.n),
            got == cell.value,
            format!("{got} (expected {})", cell.value),
        ));
    }

    let vals = valuations();
    for row in &vals.rows {
        for (i, &v) in row.values.iter().enumerate() {
            let n = i + 2;
            let Some(total) = counts.get(row.depth, n) else {
                continue;
            };
            let fact = BigInt::from(perm::factorial(n));
            let got = two_adic_valuation(&(total / fact))?;
            out.push(Check::new(
                format!("2-adic valuation of T_{}({})/{}!", row.depth, n, n),
                got == v,
                format!("{got} (expected {v})"),
            ));
        }
    }

    for ex in &psi_examples().example {
        let got = psi_per_level(&ex.triangle())?;
        out.push(Check::new(
            format!("psi: {}", ex.label),
            got == ex.psi,
            format!("{got:?} (expected {:?})", ex.psi),
        ));
    }

    let qp = q_polynomials();
    let max_p = if opts.fast { 7 } else { 8 };
    for n in 1..=max_p {
        let want = qp.p(n).expect("listed");
        let got = qenum::p_polynomial(n)?;
        out.push(Check::new(
            format!("P_{n}(q)"),
            got == want,
            format!("{got}"),
        ));
    }

    for a in &q_analogs().analog {
        let got = compute_analog(&a.name, a.n)?;
        let want = a.expanded();
        out.push(Check::new(
            format!("{} q-analog, n = {}", a.name, a.n),
            got == want,
            format!("{got}"),
        ));
    }

    let mut a1_ok = true;
    for n in 3..=15 {
        a1_ok &= qenum::a1_check(n)?;
    }
    out.push(Check::new("a_1(n) = 5(n - 2), 3 <= n <= 15", a1_ok, ""));

    for h in &laws().hankel {
        let report = qenum::hankel_report(h.size, h.offset, 1e-9)?;
        let (ok, detail) = match &report.smallest_positive_root {
            Some(r) => (
                (r.midpoint() - h.root).abs() <= h.tolerance,
                format!("{:.6} (expected {} ± {})", r.midpoint(), h.root, h.tolerance),
            ),
            None => (false, "no root in (0, 1)".to_string()),
        };
        out.push(Check::new(
            format!("Hankel root, size {} offset {}", h.size, h.offset),
            ok,
            detail,
        ));
    }

    for q in TV_QS {
        let tv = sampler_tv(3, q, TV_STEPS, TV_THINNING, TV_SEED)?;
        out.push(Check::new(
            format!("sampler TV distance, n = 3, q = {q}"),
            tv < TV_TOLERANCE,
            format!("{tv:.5} (limit {TV_TOLERANCE})"),
        ));
    }

    Ok(out)
}
