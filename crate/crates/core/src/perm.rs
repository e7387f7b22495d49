//! Small helpers for permutations in one-line notation with 1-based values.

use crate::error::{Error, Result};

/// Checks that `p` is a bijection of `1..=p.len()`.
pub fn check_permutation(p: &[usize]) -> Result<()> {
    let n = p.len();
    let mut seen = vec![false; n + 1];
    for &v in p {
        if v == 0 || v > n || seen[v] {
            return Err(Error::NotPermutation(n));
        }
        seen[v] = true;
    }
    Ok(())
}

pub fn is_permutation(p: &[usize]) -> bool {
    check_permutation(p).is_ok()
}

pub fn identity(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v - 1] = i + 1;
    }
    inv
}

/// `(a ∘ b)(i) = a(b(i))`.
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&v| a[v - 1]).collect()
}

/// Number of pairs `i < j` with `p[i] > p[j]`.
pub fn inversions(p: &[usize]) -> usize {
    let mut count = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                count += 1;
            }
        }
    }
    count
}

/// Rearranges `p` into the next permutation in lexicographic order.
/// Returns `false` (leaving `p` sorted ascending) after the last one.
pub fn next_permutation<T: Ord>(p: &mut [T]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        p.reverse();
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All permutations of `1..=n` in lexicographic order.
pub fn all_permutations(n: usize) -> Permutations {
    Permutations {
        current: identity(n),
        done: false,
    }
}

pub struct Permutations {
    current: Vec<usize>,
    done: bool,
}

impl Iterator for Permutations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.done = !next_permutation(&mut self.current);
        Some(out)
    }
}

pub fn factorial(n: usize) -> num_bigint::BigUint {
    (1..=n).map(num_bigint::BigUint::from).product()
}
