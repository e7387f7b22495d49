//! Exact polynomials: integer polynomials in `q` and rational polynomials in `n`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense polynomial in `q` with arbitrary-precision integer coefficients,
/// index = power of `q`. Trailing zeros are always trimmed, so the zero
/// polynomial has no coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QPolynomial {
    coeffs: Vec<BigInt>,
}

impl QPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPolynomial { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        QPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `c · q^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `q^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QPolynomial::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![BigInt::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Self::new(v)
    }

    /// Divides every coefficient by `d`, failing unless each division is exact.
    pub fn div_exact_scalar(&self, d: &BigInt) -> Result<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (k, c) in self.coeffs.iter().enumerate() {
            let (quot, rem) = c.div_rem(d);
            if !rem.is_zero() {
                return Err(Error::InexactDivision(format!(
                    "coefficient of q^{k} ({c}) is not divisible by {d}"
                )));
            }
            out.push(quot);
        }
        Ok(Self::new(out))
    }

    /// Exact polynomial division over the integers.
    pub fn div_exact(&self, divisor: &QPolynomial) -> Result<Self> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::InexactDivision("division by the zero polynomial".into()))?;
        if self.is_zero() {
            return Ok(QPolynomial::zero());
        }
        let lead = &divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let Some(qd) = rem.len().checked_sub(dd + 1) else {
            return Err(Error::InexactDivision("dividend degree below divisor degree".into()));
        };
        let mut quot = vec![BigInt::zero(); qd + 1];
        for i in (0..=qd).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (c, r) = top.div_rem(lead);
            if !r.is_zero() {
                return Err(Error::InexactDivision(format!(
                    "leading coefficient {lead} does not divide {top}"
                )));
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &c * dc;
            }
            quot[i] = c;
        }
        if rem.iter().any(|r| !r.is_zero()) {
            return Err(Error::InexactDivision("nonzero remainder".into()));
        }
        Ok(Self::new(quot))
    }

    pub fn eval_int(&self, q: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * q + c;
        }
        acc
    }

    pub fn eval_rational(&self, q: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * q + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Exact sign of the value at `num / den` (`den > 0`).
    pub fn sign_at(&self, num: &BigInt, den: &BigInt) -> Sign {
        debug_assert!(den.is_positive());
        // Σ c_i num^i den^{d−i} has the same sign as p(num/den)
        let mut acc = BigInt::zero();
        let mut den_pow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * num + c * &den_pow;
            den_pow *= den;
        }
        acc.sign()
    }

    pub fn eval_f64(&self, q: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * q + c.to_f64().unwrap_or(f64::NAN))
    }

    /// `coeff[j] = coeff[d − j]` for all `j`, with zero outside the support.
    pub fn is_palindromic(&self, d: usize) -> bool {
        if self.degree().is_some_and(|deg| deg > d) {
            return false;
        }
        (0..=d).all(|j| self.coeff(j) == self.coeff(d - j))
    }

    /// `a_k² ≥ a_{k−1} a_{k+1}` for every interior index of the support.
    pub fn is_log_concave(&self) -> bool {
        let Some(lo) = self.coeffs.iter().position(|c| !c.is_zero()) else {
            return true;
        };
        let hi = self.coeffs.len() - 1;
        (lo + 1..hi).all(|k| {
            let a = &self.coeffs;
            &a[k] * &a[k] >= &a[k - 1] * &a[k + 1]
        })
    }

    pub fn sum(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Coefficients rendered low-to-high as decimal strings.
    pub fn to_decimal_strings(&self) -> Vec<String> {
        if self.is_zero() {
            return vec!["0".into()];
        }
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl Add for &QPolynomial {
    type Output = QPolynomial;
    fn add(self, rhs: &QPolynomial) -> QPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        QPolynomial::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &QPolynomial {
    type Output = QPolynomial;
    fn sub(self, rhs: &QPolynomial) -> QPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        QPolynomial::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &QPolynomial {
    type Output = QPolynomial;
    fn neg(self) -> QPolynomial {
        QPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &QPolynomial {
    type Output = QPolynomial;
    fn mul(self, rhs: &QPolynomial) -> QPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return QPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPolynomial::new(out)
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())), "q")
    }
}

fn write_terms(
    f: &mut fmt::Formatter<'_>,
    coeffs: impl DoubleEndedIterator<Item = BigRational> + ExactSizeIterator,
    var: &str,
) -> fmt::Result {
    let terms: Vec<(usize, BigRational)> = coeffs
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .collect();
    if terms.is_empty() {
        return f.write_str("0");
    }
    for (idx, (k, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if idx == 0 {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        let show_coeff = *k == 0 || !mag.is_one();
        if show_coeff {
            write!(f, "{mag}")?;
        }
        match k {
            0 => {}
            1 => f.write_str(var)?,
            _ => write!(f, "{var}^{k}")?,
        }
    }
    Ok(())
}

/// Polynomial in `n` with exact rational coefficients, index = power of `n`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RationalPolynomialInN {
    coeffs: Vec<BigRational>,
}

impl RationalPolynomialInN {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPolynomialInN { coeffs }
    }

    /// `(Σ numer[i] nⁱ) / denom`.
    pub fn from_integer_ratio(numer: &[i64], denom: i64) -> Self {
        let d = BigInt::from(denom);
        Self::new(
            numer
                .iter()
                .map(|&c| BigRational::new(BigInt::from(c), d.clone()))
                .collect(),
        )
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn zero() -> Self {
        RationalPolynomialInN { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, n: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c;
        }
        acc
    }

    pub fn eval_int(&self, n: i64) -> BigRational {
        self.eval(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Least common denominator `L` and the integer numerators of `L · self`.
    pub fn to_integer_ratio(&self) -> (Vec<BigInt>, BigInt) {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let numer = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        (numer, lcm)
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }
}

impl Add for &RationalPolynomialInN {
    type Output = RationalPolynomialInN;
    fn add(self, rhs: &RationalPolynomialInN) -> RationalPolynomialInN {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomialInN::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &RationalPolynomialInN {
    type Output = RationalPolynomialInN;
    fn sub(self, rhs: &RationalPolynomialInN) -> RationalPolynomialInN {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomialInN::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &RationalPolynomialInN {
    type Output = RationalPolynomialInN;
    fn mul(self, rhs: &RationalPolynomialInN) -> RationalPolynomialInN {
        if self.is_zero() || rhs.is_zero() {
            return RationalPolynomialInN::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPolynomialInN::new(out)
    }
}

/// Renders as `(25n^2 - 49n - 116)/2`, or without parentheses when the
/// coefficients are integers.
impl fmt::Display for RationalPolynomialInN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (numer, denom) = self.to_integer_ratio();
        let as_rat = numer.into_iter().rev().map(BigRational::from_integer);
        // write_terms expects low-to-high, so undo the reversal
        let low_to_high: Vec<BigRational> = as_rat.rev().collect();
        if denom.is_one() {
            write_terms(f, low_to_high.into_iter(), "n")
        } else {
            f.write_str("(")?;
            write_terms(f, low_to_high.into_iter(), "n")?;
            write!(f, ")/{denom}")
        }
    }
}
