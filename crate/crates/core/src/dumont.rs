//! Dumont derangements, Genocchi medians, the bijection with depth-2 top rows
//! over the identity bottom, and three classical q-analogs of `H_n`.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{self, Color, Row};
use crate::perm;
use crate::poly::QPolynomial;

/// A permutation of `1..=2n` with `σ(i) > i` at odd `i` and `σ(i) < i` at
/// even `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DumontPermutation {
    sigma: Vec<usize>,
}

impl DumontPermutation {
    pub fn new(sigma: Vec<usize>) -> Result<Self> {
        if is_dumont(&sigma)? {
            Ok(DumontPermutation { sigma })
        } else {
            Err(Error::NotDumont)
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.sigma
    }

    /// Half the length.
    pub fn n(&self) -> usize {
        self.sigma.len() / 2
    }
}

pub fn is_dumont(sigma: &[usize]) -> Result<bool> {
    if sigma.len() % 2 != 0 {
        return Err(Error::OddLength(sigma.len()));
    }
    perm::check_permutation(sigma)?;
    Ok(sigma.iter().enumerate().all(|(idx, &v)| {
        let i = idx + 1;
        if i % 2 == 1 {
            v > i
        } else {
            v < i
        }
    }))
}

/// Backtracking enumerator over Dumont derangements of `1..=2n`. The visitor
/// receives each complete permutation and its inversion count.
struct DumontSearch<'a, F> {
    len: usize,
    sigma: Vec<usize>,
    used: u64,
    visit: &'a mut F,
}

impl<F: FnMut(&[usize], usize)> DumontSearch<'_, F> {
    fn go(&mut self, pos: usize, inv: usize) {
        if pos > self.len {
            (self.visit)(&self.sigma, inv);
            return;
        }
        let (lo, hi) = if pos % 2 == 1 {
            (pos + 1, self.len)
        } else {
            (1, pos - 1)
        };
        for v in lo..=hi {
            if self.used >> v & 1 == 1 {
                continue;
            }
            // values already placed that exceed v
            let above = (self.used >> (v + 1)).count_ones() as usize;
            self.used |= 1 << v;
            self.sigma.push(v);
            self.go(pos + 1, inv + above);
            self.sigma.pop();
            self.used &= !(1 << v);
        }
    }
}

fn for_each_dumont_with_first<F: FnMut(&[usize], usize)>(n: usize, first: usize, visit: &mut F) {
    let len = 2 * n;
    let mut s = DumontSearch {
        len,
        sigma: vec![first],
        used: 1 << first,
        visit,
    };
    s.go(2, 0);
}

/// Calls `visit(σ, inv(σ))` for every Dumont derangement of `1..=2n`.
pub fn for_each_dumont<F: FnMut(&[usize], usize)>(n: usize, mut visit: F) {
    assert!(n <= 31, "Dumont enumeration supports n ≤ 31");
    if n == 0 {
        visit(&[], 0);
        return;
    }
    for first in 2..=2 * n {
        for_each_dumont_with_first(n, first, &mut visit);
    }
}

/// The Genocchi median `H_n`, by enumeration split on the value of `σ(1)`.
pub fn count_dumont(n: usize) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    let total: u64 = (2..=2 * n)
        .into_par_iter()
        .map(|first| {
            let mut c = 0u64;
            for_each_dumont_with_first(n, first, &mut |_, _| c += 1);
            c
        })
        .sum();
    BigUint::from(total)
}

/// Maps a level-2 top row interlacing with the identity bottom to the Dumont
/// derangement with `σ(2c) = p₁`, `σ(2c−1) = p₂`, where `p₁ < p₂` are the
/// positions of color `c`.
pub fn top_row_to_dumont(top: &Row) -> Result<DumontPermutation> {
    let n = top.n();
    if top.level() != 2 {
        return Err(Error::LevelMismatch {
            bottom: 1,
            top: top.level(),
        });
    }
    let id = Row::identity(n);
    if !model::is_interlacing(&id, top)? {
        return Err(Error::NotInterlacing(
            "top row does not interlace with the identity bottom".into(),
        ));
    }
    let mut sigma = vec![0; 2 * n];
    let mut seen = vec![false; n + 1];
    for (idx, &c) in top.entries().iter().enumerate() {
        let c = c as usize;
        let p = idx + 1;
        if !seen[c] {
            sigma[2 * c - 1] = p;
            seen[c] = true;
        } else {
            sigma[2 * c - 2] = p;
        }
    }
    DumontPermutation::new(sigma)
}

pub fn dumont_to_top_row(sigma: &DumontPermutation) -> Result<Row> {
    let n = sigma.n();
    let s = sigma.as_slice();
    let mut top = vec![0 as Color; 2 * n];
    for c in 1..=n {
        top[s[2 * c - 1] - 1] = c as Color;
        top[s[2 * c - 2] - 1] = c as Color;
    }
    Row::new(n, 2, top)
}

/// `Σ q^{inv(σ)}` over Dumont derangements of `1..=2n`.
pub fn q_analog_randrianarivony(n: usize) -> QPolynomial {
    let max_inv = n * (2 * n - 1);
    let counts: Vec<u64> = (2..=2 * n.max(1))
        .into_par_iter()
        .map(|first| {
            let mut c = vec![0u64; max_inv + 1];
            if n > 0 {
                for_each_dumont_with_first(n, first, &mut |_, inv| c[inv] += 1);
            }
            c
        })
        .reduce(
            || vec![0u64; max_inv + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    if n == 0 {
        return QPolynomial::one();
    }
    QPolynomial::new(counts.into_iter().map(BigInt::from).collect())
}

/// Polynomial in `x` whose coefficients are polynomials in `q`.
type Bivariate = Vec<QPolynomial>;

fn bi_trim(mut f: Bivariate) -> Bivariate {
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    f
}

/// `f(1 + qx)`.
fn substitute_one_plus_qx(f: &Bivariate) -> Bivariate {
    let q = QPolynomial::from_i64s(&[0, 1]);
    let mut out: Bivariate = vec![QPolynomial::zero(); f.len()];
    // (1 + qx)^k expanded with binomials, coefficient of x^j is C(k,j) q^j
    for (k, ck) in f.iter().enumerate() {
        let mut binom = BigInt::one();
        for (j, slot) in out.iter_mut().enumerate().take(k + 1) {
            let term = &ck.scale(&binom) * &q.pow(j as u32);
            *slot = &*slot + &term;
            binom = binom * BigInt::from(k - j) / BigInt::from(j + 1);
        }
    }
    bi_trim(out)
}

/// The q-difference operator `(f(1+qx) − f(x)) / (1 + (q−1)x)`, with the
/// division checked for exactness.
fn delta_q(f: &Bivariate) -> Result<Bivariate> {
    let shifted = substitute_one_plus_qx(f);
    let len = shifted.len().max(f.len());
    let zero = QPolynomial::zero();
    let g: Bivariate = (0..len)
        .map(|k| shifted.get(k).unwrap_or(&zero) - f.get(k).unwrap_or(&zero))
        .collect();
    let g = bi_trim(g);
    if g.is_empty() {
        return Ok(g);
    }
    // divisor 1 + (q−1)x has unit constant term: h_k = g_k − (q−1) h_{k−1}
    let q_minus_one = QPolynomial::from_i64s(&[-1, 1]);
    let d = g.len() - 1;
    let mut h: Bivariate = Vec::with_capacity(d);
    for k in 0..d {
        let prev = if k == 0 {
            QPolynomial::zero()
        } else {
            &q_minus_one * &h[k - 1]
        };
        h.push(&g[k] - &prev);
    }
    let last = if d == 0 {
        QPolynomial::zero()
    } else {
        &q_minus_one * &h[d - 1]
    };
    if g[d] != last {
        return Err(Error::InexactDivision(
            "q-difference quotient is not a polynomial".into(),
        ));
    }
    Ok(bi_trim(h))
}

/// `C_n(1, q)` for the q-Gandhi recurrence `C_1 = 1`,
/// `C_n = (1 + qx) Δ_q(x C_{n−1})`.
pub fn q_analog_han_zeng(n: usize) -> Result<QPolynomial> {
    if n == 0 {
        return Ok(QPolynomial::one());
    }
    let mut c: Bivariate = vec![QPolynomial::one()];
    for _ in 2..=n {
        let mut xc = vec![QPolynomial::zero()];
        xc.extend(c.iter().cloned());
        let d = delta_q(&xc)?;
        // multiply by 1 + qx
        let q = QPolynomial::from_i64s(&[0, 1]);
        let mut next: Bivariate = vec![QPolynomial::zero(); d.len() + 1];
        for (k, dk) in d.iter().enumerate() {
            next[k] = &next[k] + dk;
            next[k + 1] = &next[k + 1] + &(&q * dk);
        }
        c = bi_trim(next);
    }
    Ok(c.iter().fold(QPolynomial::zero(), |acc, ck| &acc + ck))
}

/// `g_{2n,1}(q)` of the q-Seidel triangle. Odd row `2i+1` spans
/// `j = 1..=i+1` and fills left to right; even row `2i` spans `j = 1..=i` and
/// fills right to left; entries outside a row are zero.
pub fn q_analog_zeng_zhou(n: usize) -> QPolynomial {
    if n <= 1 {
        return QPolynomial::one();
    }
    let q = QPolynomial::from_i64s(&[0, 1]);
    let get = |row: &Vec<QPolynomial>, j: usize| -> QPolynomial {
        if j >= 1 && j <= row.len() {
            row[j - 1].clone()
        } else {
            QPolynomial::zero()
        }
    };
    // rows[r] holds g_{r, 1..}
    let mut prev: Vec<QPolynomial> = vec![QPolynomial::one()]; // row 2
    for r in 3..=2 * n {
        let i = r / 2;
        let cur = if r % 2 == 1 {
            let mut row: Vec<QPolynomial> = Vec::with_capacity(i + 1);
            for j in 1..=i + 1 {
                let left = if j == 1 {
                    QPolynomial::zero()
                } else {
                    row[j - 2].clone()
                };
                row.push(&left + &(&q.pow(j as u32 - 1) * &get(&prev, j)));
            }
            row
        } else {
            let mut row = vec![QPolynomial::zero(); i];
            for j in (1..=i).rev() {
                let right = if j == i {
                    QPolynomial::zero()
                } else {
                    row[j].clone()
                };
                row[j - 1] = &right + &(&q.pow(j as u32 - 1) * &get(&prev, j));
            }
            row
        };
        prev = cur;
    }
    prev[0].clone()
}

/// All Dumont derangements of `1..=2n`, in lexicographic order.
pub fn all_dumont(n: usize) -> Vec<DumontPermutation> {
    let mut out = Vec::new();
    for_each_dumont(n, |s, _| {
        out.push(DumontPermutation { sigma: s.to_vec() })
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration;

    fn p(c: &[i64]) -> QPolynomial {
        QPolynomial::from_i64s(c)
    }

    fn prod(fs: &[QPolynomial]) -> QPolynomial {
        fs.iter().fold(QPolynomial::one(), |a, f| &a * f)
    }

    #[test]
    fn small_dumont_checks() {
        assert!(is_dumont(&[2, 1]).unwrap());
        assert!(!is_dumont(&[1, 2, 3, 4]).unwrap());
        assert!(matches!(is_dumont(&[2, 1, 3]), Err(Error::OddLength(3))));
        assert!(is_dumont(&[2, 2]).is_err());
        let n2 = perm::all_permutations(4)
            .filter(|s| is_dumont(s).unwrap())
            .count();
        assert_eq!(n2, 2);
    }

    #[test]
    fn genocchi_medians() {
        let expected = [1u64, 1, 2, 8, 56, 608, 9440];
        for (n, &h) in expected.iter().enumerate() {
            assert_eq!(count_dumont(n), BigUint::from(h), "n = {n}");
        }
    }

    #[test]
    fn bijection_examples() {
        let top = Row::new(1, 2, vec![1, 1]).unwrap();
        assert_eq!(top_row_to_dumont(&top).unwrap().as_slice(), &[2, 1]);
        let top = Row::new(2, 2, vec![1, 1, 2, 2]).unwrap();
        let d = top_row_to_dumont(&top).unwrap();
        assert_eq!(d.as_slice(), &[2, 1, 4, 3]);
        assert_eq!(dumont_to_top_row(&d).unwrap(), top);
        let bad = Row::new(2, 2, vec![1, 2, 2, 1]).unwrap();
        assert!(top_row_to_dumont(&bad).is_err());
    }

    #[test]
    fn bijection_round_trips_both_ways() {
        for n in 1..=4 {
            let tops = enumeration::extensions(&Row::identity(n)).unwrap();
            let mut images: Vec<Vec<usize>> = tops
                .iter()
                .map(|t| {
                    let d = top_row_to_dumont(t).unwrap();
                    assert_eq!(&dumont_to_top_row(&d).unwrap(), t);
                    d.as_slice().to_vec()
                })
                .collect();
            images.sort();
            let all: Vec<Vec<usize>> = all_dumont(n).into_iter().map(|d| d.sigma).collect();
            assert_eq!(images, all);
        }
    }

    #[test]
    fn randrianarivony_values() {
        let one_q = p(&[1, 1]);
        assert_eq!(q_analog_randrianarivony(1), p(&[0, 1]));
        assert_eq!(q_analog_randrianarivony(2), prod(&[p(&[0, 0, 1]), one_q.clone()]));
        assert_eq!(
            q_analog_randrianarivony(3),
            prod(&[p(&[0, 0, 0, 1]), one_q.pow(3), p(&[1, -1, 1])])
        );
    }

    #[test]
    fn han_zeng_values() {
        let one_q = p(&[1, 1]);
        assert_eq!(q_analog_han_zeng(1).unwrap(), QPolynomial::one());
        assert_eq!(q_analog_han_zeng(2).unwrap(), one_q);
        assert_eq!(q_analog_han_zeng(3).unwrap(), one_q.pow(3));
        assert_eq!(
            q_analog_han_zeng(5).unwrap(),
            &one_q.pow(5) * &p(&[1, 5, 5, 5, 2, 1])
        );
    }

    #[test]
    fn zeng_zhou_values() {
        let one_q = p(&[1, 1]);
        assert_eq!(q_analog_zeng_zhou(2), one_q);
        assert_eq!(q_analog_zeng_zhou(3), prod(&[one_q.pow(2), p(&[1, 0, 1])]));
        assert_eq!(
            q_analog_zeng_zhou(4),
            prod(&[one_q.pow(2), p(&[1, 0, 1]), p(&[1, 1, 1, 2, 1, 1])])
        );
    }

    #[test]
    fn analogs_specialize_to_genocchi() {
        for n in 1..=6 {
            let h = BigInt::from(count_dumont(n));
            assert_eq!(q_analog_randrianarivony(n).sum(), h);
            assert_eq!(q_analog_han_zeng(n).unwrap().sum(), h);
            assert_eq!(q_analog_zeng_zhou(n).sum(), h);
        }
    }
}
