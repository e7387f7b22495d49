//! Hankel determinants of the sequence `T₂(0; q) = 1, T₂(1; q), …` and
//! location of their smallest positive roots.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::QPolynomial;

use super::t2;

/// Grid resolution used to bracket roots in `(0, 1)`.
pub const ROOT_GRID: u32 = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct RootBracket {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RootBracket {
    pub fn midpoint(&self) -> f64 {
        ((&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2)))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    pub fn width(&self) -> f64 {
        (&self.hi - &self.lo).to_f64().unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HankelReport {
    pub k: usize,
    pub offset: usize,
    pub determinant: QPolynomial,
    pub smallest_positive_root: Option<RootBracket>,
}

/// `T₂(0; q), …, T₂(len−1; q)` with `T₂(0; q) = 1`.
pub fn t2_sequence(len: usize) -> Result<Vec<QPolynomial>> {
    let mut seq = Vec::with_capacity(len);
    for n in 0..len {
        seq.push(if n == 0 {
            QPolynomial::one()
        } else {
            t2::t2_q_polynomial(n)?
        });
    }
    Ok(seq)
}

/// `det[seq[i + j + offset]]_{i,j=0}^{k−1}` by fraction-free elimination over
/// `Z[q]`.
pub fn hankel_determinant(seq: &[QPolynomial], k: usize, offset: usize) -> Result<QPolynomial> {
    if offset > 1 {
        return Err(Error::OutOfRange {
            what: "offset",
            value: offset as i64,
            range: "0..=1".into(),
        });
    }
    if k == 0 {
        return Ok(QPolynomial::one());
    }
    let needed = 2 * k - 1 + offset;
    if seq.len() < needed {
        return Err(Error::InsufficientData(format!(
            "a size-{k} Hankel determinant with offset {offset} needs {needed} terms, got {}",
            seq.len()
        )));
    }
    let m: Vec<Vec<QPolynomial>> = (0..k)
        .map(|i| (0..k).map(|j| seq[i + j + offset].clone()).collect())
        .collect();
    bareiss(m)
}

fn bareiss(mut m: Vec<Vec<QPolynomial>>) -> Result<QPolynomial> {
    let k = m.len();
    let mut negate = false;
    let mut prev = QPolynomial::one();
    for p in 0..k - 1 {
        if m[p][p].is_zero() {
            let Some(r) = (p + 1..k).find(|&r| !m[r][p].is_zero()) else {
                return Ok(QPolynomial::zero());
            };
            m.swap(p, r);
            negate = !negate;
        }
        for i in p + 1..k {
            for j in p + 1..k {
                let num = &(&m[i][j] * &m[p][p]) - &(&m[i][p] * &m[p][j]);
                m[i][j] = num.div_exact(&prev)?;
            }
        }
        prev = m[p][p].clone();
    }
    let det = m[k - 1][k - 1].clone();
    Ok(if negate { -&det } else { det })
}

/// Smallest root of `poly` in `(0, 1)`. The interval is scanned on the grid
/// `j / 10⁴` with exact sign evaluation, and the first sign change is refined
/// by rational bisection until the bracket is narrower than `tolerance`.
/// Roots at `q = 0` are ignored.
pub fn smallest_positive_root(poly: &QPolynomial, tolerance: f64) -> Result<Option<RootBracket>> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidConfig("tolerance must be positive".into()));
    }
    if poly.is_zero() {
        return Err(Error::InvalidConfig("the zero polynomial has no isolated roots".into()));
    }
    // strip the factor q^v so the value at 0 is nonzero
    let v = poly.coeffs().iter().position(|c| !c.is_zero()).unwrap_or(0);
    let p = QPolynomial::new(poly.coeffs()[v..].to_vec());

    let den = BigInt::from(ROOT_GRID);
    let mut prev_sign = p.sign_at(&BigInt::zero(), &den);
    for j in 1..ROOT_GRID {
        let num = BigInt::from(j);
        let s = p.sign_at(&num, &den);
        if s == Sign::NoSign {
            let x = BigRational::new(num, den.clone());
            return Ok(Some(RootBracket { lo: x.clone(), hi: x }));
        }
        if s != prev_sign {
            let lo = BigRational::new(BigInt::from(j - 1), den.clone());
            let hi = BigRational::new(num, den.clone());
            return Ok(Some(bisect(&p, lo, hi, prev_sign, tolerance)));
        }
        prev_sign = s;
    }
    Ok(None)
}

fn bisect(p: &QPolynomial, mut lo: BigRational, mut hi: BigRational, lo_sign: Sign, tol: f64) -> RootBracket {
    let two = BigRational::from_integer(BigInt::from(2));
    while (&hi - &lo).to_f64().unwrap_or(0.0) > tol {
        let mid = (&lo + &hi) / &two;
        let s = p.sign_at(mid.numer(), mid.denom());
        if s == Sign::NoSign {
            return RootBracket { lo: mid.clone(), hi: mid };
        }
        if s == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RootBracket { lo, hi }
}

/// Determinant and smallest positive root for one `(k, offset)` pair, using
/// `T₂(n; q)` for `n < 2k − 1 + offset`.
pub fn hankel_report(k: usize, offset: usize, tolerance: f64) -> Result<HankelReport> {
    let seq = t2_sequence(2 * k - 1 + offset)?;
    let determinant = hankel_determinant(&seq, k, offset)?;
    let smallest_positive_root = if determinant.is_zero() {
        None
    } else {
        smallest_positive_root(&determinant, tolerance)?
    };
    Ok(HankelReport {
        k,
        offset,
        determinant,
        smallest_positive_root,
    })
}
