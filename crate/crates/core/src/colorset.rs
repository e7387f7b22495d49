//! Sets of colors with constant-time "how many members exceed `j`" queries.
//!
//! Bit `c − 1` represents color `c`. Palettes up to 64 colors use a `u64`,
//! up to 128 a `u128`; anything larger falls back to [`WideSet`].

pub trait ColorSet: Clone {
    fn empty(n: usize) -> Self;
    fn full(n: usize) -> Self;
    fn contains(&self, c: usize) -> bool;
    fn insert(&mut self, c: usize);
    fn remove(&mut self, c: usize);
    fn is_empty(&self) -> bool;
    /// `|self ∩ {j+1, …, n}|`.
    fn count_above(&self, j: usize) -> u32;
}

impl ColorSet for u64 {
    #[inline]
    fn empty(_: usize) -> Self {
        0
    }
    #[inline]
    fn full(n: usize) -> Self {
        if n >= 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }
    #[inline]
    fn contains(&self, c: usize) -> bool {
        self >> (c - 1) & 1 == 1
    }
    #[inline]
    fn insert(&mut self, c: usize) {
        *self |= 1 << (c - 1);
    }
    #[inline]
    fn remove(&mut self, c: usize) {
        *self &= !(1 << (c - 1));
    }
    #[inline]
    fn is_empty(&self) -> bool {
        *self == 0
    }
    #[inline]
    fn count_above(&self, j: usize) -> u32 {
        if j >= 64 {
            0
        } else {
            (self >> j).count_ones()
        }
    }
}

impl ColorSet for u128 {
    #[inline]
    fn empty(_: usize) -> Self {
        0
    }
    #[inline]
    fn full(n: usize) -> Self {
        if n >= 128 {
            u128::MAX
        } else {
            (1u128 << n) - 1
        }
    }
    #[inline]
    fn contains(&self, c: usize) -> bool {
        self >> (c - 1) & 1 == 1
    }
    #[inline]
    fn insert(&mut self, c: usize) {
        *self |= 1 << (c - 1);
    }
    #[inline]
    fn remove(&mut self, c: usize) {
        *self &= !(1 << (c - 1));
    }
    #[inline]
    fn is_empty(&self) -> bool {
        *self == 0
    }
    #[inline]
    fn count_above(&self, j: usize) -> u32 {
        if j >= 128 {
            0
        } else {
            (self >> j).count_ones()
        }
    }
}

/// Multi-word bitset for palettes beyond 128 colors. `count_above` costs one
/// popcount per word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WideSet {
    words: Vec<u64>,
}

impl ColorSet for WideSet {
    fn empty(n: usize) -> Self {
        WideSet {
            words: vec![0; n.div_ceil(64).max(1)],
        }
    }
    fn full(n: usize) -> Self {
        let mut s = WideSet::empty(n);
        for (w, word) in s.words.iter_mut().enumerate() {
            let lo = w * 64;
            let bits = n.saturating_sub(lo).min(64);
            *word = if bits == 64 { u64::MAX } else { (1 << bits) - 1 };
        }
        s
    }
    fn contains(&self, c: usize) -> bool {
        let b = c - 1;
        self.words[b / 64] >> (b % 64) & 1 == 1
    }
    fn insert(&mut self, c: usize) {
        let b = c - 1;
        self.words[b / 64] |= 1 << (b % 64);
    }
    fn remove(&mut self, c: usize) {
        let b = c - 1;
        self.words[b / 64] &= !(1 << (b % 64));
    }
    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
    fn count_above(&self, j: usize) -> u32 {
        let (w, b) = (j / 64, j % 64);
        if w >= self.words.len() {
            return 0;
        }
        let first = (self.words[w] >> b).count_ones();
        first + self.words[w + 1..].iter().map(|x| x.count_ones()).sum::<u32>()
    }
}
