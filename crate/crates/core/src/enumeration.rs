//! Exact counts `T_N(n)` by level-by-level frontier expansion.
//!
//! Rows are only ever generated over a bottom row, so the first frontier is
//! the identity row and the final total is multiplied by `n!`. At the last
//! level the boundary involutions are optionally quotiented out, keeping the
//! extensions with `λ[i]^N_N < λ[i+1]^N_1` and multiplying by `2^{n−1}`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::model::{Color, Row};
use crate::perm;

/// Largest palette supported by the bitmask extension search.
pub const MAX_COLORS: usize = 64;

#[derive(Clone, Copy, Debug)]
enum SlotKind {
    Top {
        idx: usize,
        /// First top entry of a triangle other than the first one.
        boundary: bool,
        /// Color of the bottom entry immediately to the right, if any.
        next_bottom: Option<Color>,
    },
    Bottom(Color),
}

/// Depth-first generator of the level-`k+1` rows interlacing a fixed level-`k`
/// row. Walks the merged order left to right; `closed` holds the colors whose
/// tops and bottoms so far balance, which are exactly the colors allowed at
/// the next top slot.
pub(crate) struct Extender {
    slots: Vec<SlotKind>,
    /// Number of top slots at or after each slot.
    tops_from: Vec<u32>,
    canonical: bool,
    top: Vec<Color>,
    full: u64,
}

impl Extender {
    pub(crate) fn new(n: usize, k: usize, bottom: &[Color], canonical: bool) -> Self {
        assert!(n <= MAX_COLORS);
        let mut slots = Vec::with_capacity(n * (2 * k + 1));
        for i in 0..n {
            for j in 0..=k {
                let next_bottom = (j < k).then(|| bottom[i * k + j]);
                slots.push(SlotKind::Top {
                    idx: i * (k + 1) + j,
                    boundary: j == 0 && i > 0,
                    next_bottom,
                });
                if let Some(b) = next_bottom {
                    slots.push(SlotKind::Bottom(b));
                }
            }
        }
        let mut tops_from = vec![0u32; slots.len() + 1];
        for s in (0..slots.len()).rev() {
            tops_from[s] = tops_from[s + 1] + matches!(slots[s], SlotKind::Top { .. }) as u32;
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Extender {
            slots,
            tops_from,
            canonical,
            top: vec![0; n * (k + 1)],
            full,
        }
    }

    /// Visits every extension. Returns the number of search nodes expanded.
    pub(crate) fn run(&mut self, visit: &mut impl FnMut(&[Color])) -> u64 {
        let mut nodes = 0;
        self.rec(0, self.full, 0, visit, &mut nodes);
        nodes
    }

    fn rec(
        &mut self,
        s: usize,
        closed: u64,
        prev_top: Color,
        visit: &mut impl FnMut(&[Color]),
        nodes: &mut u64,
    ) {
        *nodes += 1;
        let Some(&slot) = self.slots.get(s) else {
            if closed == 0 {
                visit(&self.top);
            }
            return;
        };
        match slot {
            SlotKind::Bottom(d) => {
                let bit = 1u64 << (d - 1);
                if closed & bit == 0 {
                    self.rec(s + 1, closed | bit, prev_top, visit, nodes);
                }
            }
            SlotKind::Top {
                idx,
                boundary,
                next_bottom,
            } => {
                if closed.count_ones() > self.tops_from[s] {
                    return;
                }
                let mut cand = closed;
                if let Some(d) = next_bottom {
                    let bit = 1u64 << (d - 1);
                    if closed & bit != 0 {
                        // the bottom entry of color d must be preceded by a d
                        cand = bit;
                    }
                }
                if self.canonical && boundary {
                    // colors strictly above prev_top
                    cand &= u64::MAX.checked_shl(prev_top as u32).unwrap_or(0);
                }
                while cand != 0 {
                    let b = cand.trailing_zeros();
                    cand &= cand - 1;
                    let c = (b + 1) as Color;
                    self.top[idx] = c;
                    self.rec(s + 1, closed & !(1u64 << b), c, visit, nodes);
                }
            }
        }
    }
}

fn check_extendable(row: &Row) -> Result<()> {
    if row.n() > MAX_COLORS {
        return Err(Error::TooLarge {
            n: row.n(),
            max: MAX_COLORS,
            what: "extension search",
        });
    }
    Ok(())
}

/// Calls `visit` on every level-`k+1` row interlacing `row`.
pub fn for_each_extension(row: &Row, mut visit: impl FnMut(&[Color])) -> Result<()> {
    check_extendable(row)?;
    Extender::new(row.n(), row.level(), row.entries(), false).run(&mut visit);
    Ok(())
}

/// Every level-`k+1` row interlacing `row`, in lexicographic order.
pub fn extensions(row: &Row) -> Result<Vec<Row>> {
    let mut out = Vec::new();
    let (n, k) = (row.n(), row.level());
    for_each_extension(row, |t| out.push(t.to_vec()))?;
    out.into_iter().map(|e| Row::new(n, k + 1, e)).collect()
}

/// Extensions that are canonical for the boundary involutions
/// (`λ[i]_{k+1} < λ[i+1]_1` for every `i`).
pub fn canonical_extensions(row: &Row) -> Result<Vec<Row>> {
    check_extendable(row)?;
    let mut out = Vec::new();
    let (n, k) = (row.n(), row.level());
    Extender::new(n, k, row.entries(), true).run(&mut |t| out.push(t.to_vec()));
    out.into_iter().map(|e| Row::new(n, k + 1, e)).collect()
}

type Key = SmallVec<[u64; 2]>;

#[derive(Clone, Copy)]
struct Packing {
    bits: u32,
    per_word: usize,
}

impl Packing {
    fn for_palette(n: usize) -> Self {
        let bits = usize::BITS - n.leading_zeros();
        Packing {
            bits,
            per_word: (64 / bits) as usize,
        }
    }

    fn pack(&self, row: &[Color]) -> Key {
        row.chunks(self.per_word)
            .map(|chunk| {
                chunk
                    .iter()
                    .fold(0u64, |w, &c| (w << self.bits) | c as u64)
            })
            .collect()
    }

    fn unpack(&self, key: &Key, len: usize) -> Vec<Color> {
        let mut out = Vec::with_capacity(len);
        let mask = (1u64 << self.bits) - 1;
        for (w, &word) in key.iter().enumerate() {
            let cnt = self.per_word.min(len - w * self.per_word);
            for j in (0..cnt).rev() {
                out.push((word >> (j as u32 * self.bits) & mask) as Color);
            }
        }
        out
    }
}

/// Tuning knobs for [`count_triangles_with`].
#[derive(Clone, Debug)]
pub struct CountOptions {
    pub use_top_symmetry: bool,
    /// Source rows handed to the worker pool at a time.
    pub batch_size: usize,
    /// Abort with [`Error::ResourceLimit`] when a frontier grows past this.
    pub max_frontier: Option<usize>,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            use_top_symmetry: true,
            batch_size: 10_000_000,
            max_frontier: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountReport {
    pub depth: usize,
    pub n: usize,
    pub total: BigUint,
    pub normalized: BigUint,
    pub two_adic: u64,
    pub elapsed: f64,
    pub states_checked: u64,
    /// Distinct rows at each level `1..N−1` (the last level is never stored).
    pub frontier_sizes: Vec<usize>,
}

pub fn count_triangles(depth: usize, n: usize, use_top_symmetry: bool) -> Result<CountReport> {
    count_triangles_with(
        depth,
        n,
        &CountOptions {
            use_top_symmetry,
            ..CountOptions::default()
        },
    )
}

pub fn count_triangles_with(depth: usize, n: usize, opts: &CountOptions) -> Result<CountReport> {
    if depth == 0 || n == 0 {
        return Err(Error::OutOfRange {
            what: if depth == 0 { "depth" } else { "colors" },
            value: 0,
            range: ">= 1".into(),
        });
    }
    if n > MAX_COLORS {
        return Err(Error::TooLarge {
            n,
            max: MAX_COLORS,
            what: "triangle counting",
        });
    }
    if opts.batch_size == 0 {
        return Err(Error::InvalidConfig("batch size must be positive".into()));
    }
    let start = Instant::now();
    let packing = Packing::for_palette(n);
    let checked = AtomicU64::new(0);

    let mut frontier: HashMap<Key, BigUint> = HashMap::new();
    frontier.insert(packing.pack(Row::identity(n).entries()), BigUint::one());
    let mut frontier_sizes = vec![1];

    for k in 1..depth.saturating_sub(1) {
        let entries: Vec<(Key, BigUint)> = frontier.drain().collect();
        let mut next: HashMap<Key, BigUint> = HashMap::new();
        for batch in entries.chunks(opts.batch_size) {
            let part = batch
                .par_iter()
                .fold(HashMap::new, |mut acc: HashMap<Key, BigUint>, (key, mult)| {
                    let bottom = packing.unpack(key, n * k);
                    debug_assert_eq!(bottom.first(), Some(&1));
                    debug_assert_eq!(bottom.last(), Some(&(n as Color)));
                    let nodes = Extender::new(n, k, &bottom, false).run(&mut |top| {
                        *acc.entry(packing.pack(top)).or_default() += mult;
                    });
                    checked.fetch_add(nodes, Ordering::Relaxed);
                    acc
                })
                .reduce(HashMap::new, merge_maps);
            next = merge_maps(next, part);
            if let Some(limit) = opts.max_frontier {
                if next.len() > limit {
                    return Err(Error::ResourceLimit {
                        level: k + 1,
                        frontier: next.len(),
                        limit,
                        states_checked: checked.load(Ordering::Relaxed),
                    });
                }
            }
        }
        frontier = next;
        frontier_sizes.push(frontier.len());
    }

    let canonical = opts.use_top_symmetry && depth >= 2;
    let mut leaves = BigUint::zero();
    if depth == 1 {
        leaves = BigUint::one();
    } else {
        let k = depth - 1;
        let entries: Vec<(Key, BigUint)> = frontier.into_iter().collect();
        for batch in entries.chunks(opts.batch_size) {
            let part: BigUint = batch
                .par_iter()
                .map(|(key, mult)| {
                    let bottom = packing.unpack(key, n * k);
                    let mut count = 0u64;
                    let nodes = Extender::new(n, k, &bottom, canonical).run(&mut |_| count += 1);
                    checked.fetch_add(nodes, Ordering::Relaxed);
                    mult * BigUint::from(count)
                })
                .sum();
            leaves += part;
        }
    }
    let normalized = if canonical {
        leaves << (n - 1)
    } else {
        leaves
    };
    let total = &normalized * perm::factorial(n);
    let two_adic = normalized.trailing_zeros().unwrap_or(0);
    Ok(CountReport {
        depth,
        n,
        total,
        normalized,
        two_adic,
        elapsed: start.elapsed().as_secs_f64(),
        states_checked: checked.into_inner(),
        frontier_sizes,
    })
}

fn merge_maps(mut a: HashMap<Key, BigUint>, mut b: HashMap<Key, BigUint>) -> HashMap<Key, BigUint> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

/// Largest `e` with `2^e | x`.
pub fn two_adic_valuation(x: &BigInt) -> Result<u64> {
    if !x.is_positive() {
        return Err(Error::OutOfRange {
            what: "valuation argument",
            value: i64::try_from(x).unwrap_or(i64::MIN),
            range: ">= 1".into(),
        });
    }
    Ok(x.trailing_zeros().unwrap_or(0))
}

pub fn divisor_check(x: &BigInt, d: &BigInt) -> Result<bool> {
    if !x.is_positive() || !d.is_positive() {
        return Err(Error::OutOfRange {
            what: "divisibility argument",
            value: if x.is_positive() {
                i64::try_from(d).unwrap_or(i64::MIN)
            } else {
                i64::try_from(x).unwrap_or(i64::MIN)
            },
            range: ">= 1".into(),
        });
    }
    Ok((x % d).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model;

    fn rows(v: &[Row]) -> Vec<Vec<Color>> {
        v.iter().map(|r| r.entries().to_vec()).collect()
    }

    #[test]
    fn extension_examples() {
        let r = Row::new(2, 1, vec![1, 2]).unwrap();
        assert_eq!(rows(&extensions(&r).unwrap()), vec![vec![1, 1, 2, 2], vec![1, 2, 1, 2]]);
        let r = Row::new(1, 1, vec![1]).unwrap();
        assert_eq!(rows(&extensions(&r).unwrap()), vec![vec![1, 1]]);
        assert_eq!(extensions(&Row::identity(3)).unwrap().len(), 8);
    }

    /// Filters every word with the right multiplicities through the
    /// interlacing predicate.
    fn brute_extensions(bottom: &Row) -> Vec<Vec<Color>> {
        let (n, k) = (bottom.n(), bottom.level());
        let mut word: Vec<Color> = (1..=n as Color).flat_map(|c| vec![c; k + 1]).collect();
        let mut out = Vec::new();
        loop {
            let top = Row::new(n, k + 1, word.clone()).unwrap();
            if model::is_interlacing(bottom, &top).unwrap() {
                out.push(word.clone());
            }
            if !perm::next_permutation(&mut word) {
                break;
            }
        }
        out
    }

    #[test]
    fn extensions_match_brute_force() {
        for n in 1..=3 {
            for sigma in perm::all_permutations(n) {
                let b = Row::new(n, 1, sigma.iter().map(|&c| c as Color).collect()).unwrap();
                let ext = extensions(&b).unwrap();
                assert_eq!(rows(&ext), brute_extensions(&b));
                for t in &ext {
                    assert_eq!(t.entries()[0], b.entries()[0]);
                    assert_eq!(t.entries().last(), b.entries().last());
                    for u in extensions(t).unwrap().iter().take(5) {
                        assert!(model::is_interlacing(t, u).unwrap());
                    }
                }
            }
        }
        let b = Row::new(2, 2, vec![1, 1, 2, 2]).unwrap();
        assert_eq!(rows(&extensions(&b).unwrap()), brute_extensions(&b));
    }

    #[test]
    fn canonical_extensions_are_one_per_orbit() {
        for n in 2..=4 {
            let all = extensions(&Row::identity(n)).unwrap();
            let canon = canonical_extensions(&Row::identity(n)).unwrap();
            assert_eq!(all.len(), canon.len() << (n - 1));
        }
    }

    #[test]
    fn packing_round_trip() {
        for n in [1usize, 3, 7, 15, 40] {
            let p = Packing::for_palette(n);
            let row: Vec<Color> = (0..3 * n).map(|i| (i % n + 1) as Color).collect();
            assert_eq!(p.unpack(&p.pack(&row), row.len()), row);
        }
    }

    #[test]
    fn small_table_cells() {
        let t = |d, n| count_triangles(d, n, true).unwrap().total;
        assert_eq!(t(1, 4), BigUint::from(24u32));
        assert_eq!(t(2, 3), BigUint::from(48u32));
        assert_eq!(t(3, 3), BigUint::from(528u32));
        assert_eq!(t(4, 3), BigUint::from(8160u32));
        for depth in 1..=6 {
            assert_eq!(t(depth, 2), BigUint::from(1u32 << depth));
        }
    }

    #[test]
    fn symmetry_flag_does_not_change_counts() {
        for n in 1..=4 {
            for depth in 1..=3 {
                let a = count_triangles(depth, n, true).unwrap();
                let b = count_triangles(depth, n, false).unwrap();
                assert_eq!(a.total, b.total, "N = {depth}, n = {n}");
            }
        }
    }

    #[test]
    fn batching_and_limits() {
        let small = CountOptions {
            batch_size: 3,
            ..CountOptions::default()
        };
        assert_eq!(
            count_triangles_with(4, 3, &small).unwrap().total,
            BigUint::from(8160u32)
        );
        let capped = CountOptions {
            max_frontier: Some(5),
            ..CountOptions::default()
        };
        assert!(matches!(
            count_triangles_with(4, 3, &capped),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn valuations() {
        assert_eq!(two_adic_valuation(&BigInt::from(88)).unwrap(), 3);
        assert_eq!(two_adic_valuation(&BigInt::from(1)).unwrap(), 0);
        assert!(two_adic_valuation(&BigInt::from(0)).is_err());
        assert!(divisor_check(&BigInt::from(73410306048u64), &BigInt::from(331897)).unwrap());
        assert!(divisor_check(&BigInt::from(17), &BigInt::from(1)).unwrap());
        assert!(!divisor_check(&BigInt::from(17), &BigInt::from(2)).unwrap());
    }
}
