//! Coefficient laws in `n`: interpolation, the leading-term check, the
//! moment-to-cumulant transform, and the coefficient-shape predicates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::{QPolynomial, RationalPolynomialInN};

use super::transfer;

/// `a_1(n) = 5(n − 2)` checked against the transfer for one `n ≥ 3`.
pub fn a1_check(n: usize) -> Result<bool> {
    if n < 3 {
        return Err(Error::OutOfRange {
            what: "colors",
            value: n as i64,
            range: ">= 3".into(),
        });
    }
    let low = transfer::low_coefficients(n, 2, None)?;
    Ok(low.coeffs[1] == BigInt::from(5 * (n as i64 - 2)))
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Exact interpolation of `a_k(n)` by a polynomial of degree at most `k`.
/// The samples are sorted by `n`; the first `k + 1` determine the fit and any
/// further ones must agree with it.
pub fn fit_coefficient_polynomial(
    k: usize,
    samples: &[(i64, BigInt)],
) -> Result<RationalPolynomialInN> {
    let mut pts = samples.to_vec();
    pts.sort_by_key(|(n, _)| *n);
    pts.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InsufficientData(
            "two samples share an n with different values".into(),
        ));
    }
    if pts.len() < k + 1 {
        return Err(Error::InsufficientData(format!(
            "degree {k} needs {} distinct samples, got {}",
            k + 1,
            pts.len()
        )));
    }
    let (basis, extra) = pts.split_at(k + 1);
    let mut fit = RationalPolynomialInN::zero();
    for (i, (xi, yi)) in basis.iter().enumerate() {
        let mut term = RationalPolynomialInN::constant(BigRational::from_integer(yi.clone()));
        for (j, (xj, _)) in basis.iter().enumerate() {
            if i == j {
                continue;
            }
            let factor = RationalPolynomialInN::new(vec![rat(-xj), BigRational::one()]);
            term = &term * &factor;
            term = term.scale(&(BigRational::one() / rat(xi - xj)));
        }
        fit = &fit + &term;
    }
    for (x, y) in extra {
        if fit.eval_int(*x) != BigRational::from_integer(y.clone()) {
            return Err(Error::InconsistentSamples { degree: k, n: *x });
        }
    }
    Ok(fit)
}

/// `k!·poly` has integer coefficients, degree `k` and leading coefficient `5^k`.
pub fn leading_coefficient_check(poly: &RationalPolynomialInN, k: usize) -> bool {
    if poly.degree() != Some(k) {
        return false;
    }
    let fact: BigInt = (1..=k as u64).map(BigInt::from).product();
    let scaled = poly.scale(&BigRational::from_integer(fact));
    scaled.has_integer_coefficients()
        && scaled.leading_coefficient() == BigRational::from_integer(BigInt::from(5).pow(k as u32))
}

/// Cumulants `κ_1, …, κ_K` of the moments `m_0 = 1, m_1, …, m_K`, via
/// `κ_k = m_k − Σ_{j<k} C(k−1, j−1) κ_j m_{k−j}`. Entry `i` of the result is
/// `κ_{i+1}`.
pub fn moments_to_cumulants(
    moments: &[RationalPolynomialInN],
) -> Result<Vec<RationalPolynomialInN>> {
    match moments.first() {
        Some(m0) if *m0 == RationalPolynomialInN::one() => {}
        _ => {
            return Err(Error::InvalidConfig(
                "the zeroth moment must be the constant 1".into(),
            ))
        }
    }
    let mut kappa: Vec<RationalPolynomialInN> = Vec::with_capacity(moments.len() - 1);
    for k in 1..moments.len() {
        let mut acc = moments[k].clone();
        let mut binom = BigInt::one(); // C(k−1, j−1)
        for j in 1..k {
            let term = (&kappa[j - 1] * &moments[k - j]).scale(&BigRational::from_integer(binom.clone()));
            acc = &acc - &term;
            binom = binom * BigInt::from(k - j) / BigInt::from(j);
        }
        kappa.push(acc);
    }
    Ok(kappa)
}

/// Moments `m_k = k!·a_k` from coefficient laws `a_0, a_1, …`.
pub fn normalized_moments(coefficient_laws: &[RationalPolynomialInN]) -> Vec<RationalPolynomialInN> {
    let mut fact = BigInt::one();
    coefficient_laws
        .iter()
        .enumerate()
        .map(|(k, a)| {
            if k > 0 {
                fact *= BigInt::from(k);
            }
            a.scale(&BigRational::from_integer(fact.clone()))
        })
        .collect()
}

pub fn palindrome_check(poly: &QPolynomial, d: usize) -> bool {
    poly.is_palindromic(d)
}

pub fn log_concavity_check(poly: &QPolynomial) -> bool {
    poly.is_log_concave()
}

/// Per-coefficient outcome of comparing a conjectured law with data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawCheck {
    pub n: i64,
    pub expected: BigRational,
    pub actual: BigInt,
}

impl LawCheck {
    pub fn holds(&self) -> bool {
        self.expected == BigRational::from_integer(self.actual.clone())
    }
}

/// Evaluates `law` at every sample.
pub fn check_law(law: &RationalPolynomialInN, samples: &[(i64, BigInt)]) -> Vec<LawCheck> {
    samples
        .iter()
        .map(|(n, a)| LawCheck {
            n: *n,
            expected: law.eval_int(*n),
            actual: a.clone(),
        })
        .collect()
}
