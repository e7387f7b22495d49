//! Low-order coefficients of `P_n(q)` by a right-to-left transfer over the
//! merged order, with bottom row and top row chosen jointly.
//!
//! A state after some suffix of slots is `(A, B)`: `A` the colors currently
//! on the line of the vertex model and `B` the colors whose bottom entry has
//! been placed. A top entry of color `j ∈ A` removes `j`; a bottom entry of
//! color `j ∉ A ∪ B` scores `|A ∩ (j, n]|` and inserts `j` into both. The
//! score only ever grows, so a partial ψ at or above `k_max` can be dropped.
//! Each state carries the truncated vector of its partial-ψ counts.

use num_bigint::BigInt;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::poly::QPolynomial;

/// Palette limit imposed by the packed state key.
pub const MAX_TRANSFER_COLORS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowCoefficients {
    pub n: usize,
    pub k_max: usize,
    /// `a_0(n), …, a_{k_max−1}(n)`.
    pub coeffs: Vec<BigInt>,
    pub inv_cap: Option<usize>,
    /// Set when `inv_cap` restricted the bottom rows: nothing guarantees that
    /// the discarded rows contribute only to higher powers.
    pub heuristic: bool,
    /// Largest number of live states across all slots.
    pub peak_states: usize,
}

const SET_BITS: u32 = 24;
const SET_MASK: u64 = (1 << SET_BITS) - 1;

#[inline]
fn key(a: u32, b: u32, inv: u32) -> u64 {
    a as u64 | (b as u64) << SET_BITS | (inv as u64) << (2 * SET_BITS)
}

#[inline]
fn unkey(k: u64) -> (u32, u32, u32) {
    (
        (k & SET_MASK) as u32,
        (k >> SET_BITS & SET_MASK) as u32,
        (k >> (2 * SET_BITS)) as u32,
    )
}

/// One column of the transfer: live states and their coefficient vectors,
/// stored contiguously (`width` entries per state).
struct Layer {
    width: usize,
    index: FxHashMap<u64, usize>,
    keys: Vec<u64>,
    vals: Vec<u128>,
}

impl Layer {
    fn new(width: usize) -> Self {
        Layer {
            width,
            index: FxHashMap::default(),
            keys: Vec::new(),
            vals: Vec::new(),
        }
    }

    fn slot(&mut self, k: u64) -> usize {
        let next = self.keys.len();
        let idx = *self.index.entry(k).or_insert(next);
        if idx == next {
            self.keys.push(k);
            self.vals.resize(self.vals.len() + self.width, 0);
        }
        idx
    }

    /// Adds `src` shifted up by `shift` into state `k`.
    fn add_shifted(&mut self, k: u64, src: &[u128], shift: usize) {
        let w = self.width;
        let base = self.slot(k) * w;
        let dst = &mut self.vals[base + shift..base + w];
        for (d, &s) in dst.iter_mut().zip(src) {
            *d += s;
        }
    }

    fn len(&self) -> usize {
        self.keys.len()
    }

    fn row(&self, idx: usize) -> &[u128] {
        &self.vals[idx * self.width..(idx + 1) * self.width]
    }
}

/// Raw counts `[q^d] T₂(n; q)` for `d < width`, optionally restricted to
/// bottom rows with at most `inv_cap` inversions. Returns the counts and the
/// peak number of states.
fn transfer_counts(n: usize, width: usize, inv_cap: Option<usize>) -> (Vec<u128>, usize) {
    let full: u32 = ((1u64 << n) - 1) as u32;
    let track_inv = inv_cap.is_some();
    let cap = inv_cap.unwrap_or(usize::MAX);

    let mut layer = Layer::new(width);
    let mut unit = vec![0u128; width];
    unit[0] = 1;
    layer.add_shifted(key(full, 0, 0), &unit, 0);
    let mut peak = 1;

    let top_step = |cur: &Layer| {
        let mut next = Layer::new(width);
        for idx in 0..cur.len() {
            let (a, b, inv) = unkey(cur.keys[idx]);
            let src = cur.row(idx);
            let mut rest = a;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                rest ^= bit;
                next.add_shifted(key(a ^ bit, b, inv), src, 0);
            }
        }
        next
    };

    for _ in 0..n {
        // right to left within a triangle: second top, bottom, first top
        layer = top_step(&layer);
        peak = peak.max(layer.len());

        let mut next = Layer::new(width);
        for idx in 0..layer.len() {
            let (a, b, inv) = unkey(layer.keys[idx]);
            let src = layer.row(idx);
            // smallest partial ψ carried by this state
            let Some(lowest) = src.iter().position(|&v| v != 0) else {
                continue;
            };
            let mut free = full & !a & !b;
            while free != 0 {
                let j = free.trailing_zeros();
                free &= free - 1;
                // colors above j + 1 occupy bits j + 1 and higher
                let score = (a >> (j + 1)).count_ones() as usize;
                if lowest + score >= width {
                    continue;
                }
                let inv2 = if track_inv {
                    let added = (b & ((1u32 << j) - 1)).count_ones();
                    let total = inv + added;
                    if total as usize > cap {
                        continue;
                    }
                    total
                } else {
                    0
                };
                debug_assert!(score < width);
                next.add_shifted(key(a | 1 << j, b | 1 << j, inv2), &src[..width - score], score);
            }
        }
        layer = next;
        peak = peak.max(layer.len());

        layer = top_step(&layer);
        peak = peak.max(layer.len());
    }

    let mut out = vec![0u128; width];
    for idx in 0..layer.len() {
        let (a, b, _) = unkey(layer.keys[idx]);
        if a == 0 && b == full {
            for (o, &v) in out.iter_mut().zip(layer.row(idx)) {
                *o += v;
            }
        }
    }
    (out, peak)
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "colors",
            value: 0,
            range: ">= 1".into(),
        });
    }
    if n > MAX_TRANSFER_COLORS {
        return Err(Error::TooLarge {
            n,
            max: MAX_TRANSFER_COLORS,
            what: "coefficient transfer",
        });
    }
    Ok(())
}

/// The first `k_max` coefficients of `P_n(q)`.
pub fn low_coefficients(n: usize, k_max: usize, inv_cap: Option<usize>) -> Result<LowCoefficients> {
    check_size(n)?;
    if k_max == 0 {
        return Err(Error::OutOfRange {
            what: "k_max",
            value: 0,
            range: ">= 1".into(),
        });
    }
    let (raw, peak) = transfer_counts(n, k_max, inv_cap);
    let orbit = 1u128 << (n - 1);
    let coeffs = raw
        .iter()
        .enumerate()
        .map(|(d, &c)| {
            if c % orbit != 0 {
                return Err(Error::InexactDivision(format!(
                    "[q^{d}] T_2({n}; q) = {c} is not divisible by 2^{}",
                    n - 1
                )));
            }
            Ok(BigInt::from(c / orbit))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LowCoefficients {
        n,
        k_max,
        coeffs,
        inv_cap,
        heuristic: inv_cap.is_some(),
        peak_states: peak,
    })
}

/// `T₂(n; q)` in full through the transfer, an independent route to
/// [`super::t2_q_polynomial`].
pub fn t2_q_polynomial_transfer(n: usize) -> Result<QPolynomial> {
    check_size(n)?;
    let (raw, _) = transfer_counts(n, n * (n - 1) / 2 + 1, None);
    Ok(QPolynomial::new(raw.into_iter().map(BigInt::from).collect()))
}
