//! Full q-polynomials for depth 2.
//!
//! Every triangle in `𝒯₂(n)` is `π·(id, t)` for a unique color permutation
//! `π` and a top row `t` over the identity bottom. For such a `t` let `M[c]`
//! be the set of colors `c' ≠ c` that are active (one more top than bottom)
//! just before the bottom entry of color `c`. Then
//! `ψ(π·(id, t)) = Σ_c |{c' ∈ M[c] : π(c') > π(c)}|`, so the sum over all
//! `π` only depends on `M` and is a subset DP that inserts colors in
//! decreasing order of their `π`-value.

use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::enumeration::Extender;
use crate::error::{Error, Result};
use crate::model::{Color, Row};
use crate::perm;
use crate::poly::QPolynomial;
use crate::psi;

/// Largest palette for the full-polynomial routes.
pub const MAX_Q_COLORS: usize = 12;

/// Per-color active sets `M[c]` (bit `c'−1`) for a top row over the identity
/// bottom.
pub(crate) type Incidence = Vec<u32>;

fn incidence(n: usize, top: &[Color]) -> Incidence {
    let mut m = vec![0u32; n];
    let mut open = 0u32;
    for c in 1..=n {
        let (a, b) = (top[2 * c - 2], top[2 * c - 1]);
        open |= 1 << (a - 1);
        // bottom entry of color c sits between the two top slots of triangle c
        m[c - 1] = open & !(1 << (c - 1));
        open &= !(1 << (c - 1));
        open |= 1 << (b - 1);
    }
    m
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "colors",
            value: 0,
            range: ">= 1".into(),
        });
    }
    if n > MAX_Q_COLORS {
        return Err(Error::TooLarge {
            n,
            max: MAX_Q_COLORS,
            what: "full q-polynomial",
        });
    }
    Ok(())
}

/// Canonical top rows over the identity bottom, grouped by incidence.
pub(crate) fn canonical_incidences(n: usize) -> HashMap<Incidence, u64> {
    let mut groups: HashMap<Incidence, u64> = HashMap::new();
    let id = Row::identity(n);
    Extender::new(n, 1, id.entries(), true).run(&mut |top| {
        *groups.entry(incidence(n, top)).or_default() += 1;
    });
    groups
}

/// `Σ_π q^{Σ_c |M[c] ∩ {c' : π(c') > π(c)}|}` over all `π ∈ S_n`.
fn permutation_sum(n: usize, m: &[u32]) -> Vec<u64> {
    let deg = n * (n - 1) / 2;
    let width = deg + 1;
    let full = (1usize << n) - 1;
    let mut f = vec![0u64; (full + 1) * width];
    f[0] = 1;
    for s in 0..full {
        if f[s * width..(s + 1) * width].iter().all(|&x| x == 0) {
            continue;
        }
        for c in 0..n {
            if s >> c & 1 == 1 {
                continue;
            }
            let shift = (m[c] & s as u32).count_ones() as usize;
            let t = s | 1 << c;
            for d in 0..width - shift {
                let v = f[s * width + d];
                if v != 0 {
                    f[t * width + d + shift] += v;
                }
            }
        }
    }
    f[full * width..].to_vec()
}

/// `T₂(n; q) = Σ_{𝝀 ∈ 𝒯₂(n)} q^{ψ(𝝀)}`.
pub fn t2_q_polynomial(n: usize) -> Result<QPolynomial> {
    check_size(n)?;
    let groups: Vec<(Incidence, u64)> = canonical_incidences(n).into_iter().collect();
    let width = n * (n - 1) / 2 + 1;
    let acc = groups
        .par_iter()
        .map(|(m, mult)| {
            permutation_sum(n, m)
                .into_iter()
                .map(|v| v as u128 * *mult as u128)
                .collect::<Vec<u128>>()
        })
        .reduce(|| vec![0u128; width], add_vectors);
    Ok(times_pow2(
        QPolynomial::new(acc.into_iter().map(BigInt::from).collect()),
        n - 1,
    ))
}

/// `P_n(q) = T₂(n; q) / 2^{n−1}`, with the division checked coefficientwise.
pub fn p_polynomial(n: usize) -> Result<QPolynomial> {
    let t2 = t2_q_polynomial(n)?;
    t2.div_exact_scalar(&(BigInt::from(1) << (n - 1)))
}

/// `H_n^σ(q)`: the ψ-generating function of the triangles with bottom row `σ`.
pub fn h_sigma_polynomial(sigma: &[usize]) -> Result<QPolynomial> {
    perm::check_permutation(sigma)?;
    let n = sigma.len();
    check_size(n)?;
    let width = n * (n - 1) / 2 + 1;
    let mut acc = vec![0u64; width];
    for (m, mult) in canonical_incidences(n) {
        let mut psi = 0;
        for c in 0..n {
            let mut set = m[c];
            while set != 0 {
                let c2 = set.trailing_zeros() as usize;
                set &= set - 1;
                if sigma[c2] > sigma[c] {
                    psi += 1;
                }
            }
        }
        acc[psi] += mult;
    }
    Ok(times_pow2(
        QPolynomial::new(acc.into_iter().map(BigInt::from).collect()),
        n - 1,
    ))
}

/// Exhaustive `T₂(n; q)`: every bottom permutation, every interlacing top
/// row, ψ by the vertex model. Only meant as a cross-check for small `n`.
pub fn t2_q_polynomial_exhaustive(n: usize) -> Result<QPolynomial> {
    check_size(n)?;
    let width = n * (n - 1) / 2 + 1;
    let perms: Vec<Vec<usize>> = perm::all_permutations(n).collect();
    let acc = perms
        .par_iter()
        .map(|sigma| {
            let bottom: Vec<Color> = sigma.iter().map(|&c| c as Color).collect();
            let mut acc = vec![0u128; width];
            Extender::new(n, 1, &bottom, false).run(&mut |top| {
                let v = psi::psi_vertex_slices(n, 1, &bottom, top)
                    .expect("extensions always interlace");
                acc[v as usize] += 1;
            });
            acc
        })
        .reduce(|| vec![0u128; width], add_vectors);
    Ok(QPolynomial::new(acc.into_iter().map(BigInt::from).collect()))
}

pub(crate) fn add_vectors(mut a: Vec<u128>, b: Vec<u128>) -> Vec<u128> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    a
}

fn times_pow2(p: QPolynomial, e: usize) -> QPolynomial {
    p.scale(&(BigInt::from(1) << e))
}
