//! The inter-level statistic ψ.
//!
//! [`psi_vertex`] runs the one-row vertex model: arrows of every color enter
//! from the right, a top entry of color `j` lets arrow `j` leave upward, and a
//! bottom entry of color `j` injects arrow `j` from below, scoring the number
//! of strictly larger colors currently on the line. [`psi_formula`] evaluates
//! the equivalent double sum of `T_{<p}(c') − B_{<p}(c')` and serves as an
//! independent cross-check.

use crate::colorset::{ColorSet, WideSet};
use crate::error::{Error, Result};
use crate::model::{self, Color, Origin, Row, Triangle};

/// Value of ψ for one level pair or for a whole triangle.
pub type PsiValue = u64;

fn check_pair(bottom: &Row, top: &Row) -> Result<()> {
    // merge_rows performs the palette and level checks
    model::merge_rows(bottom, top).map(|_| ())
}

/// ψ via the vertex model, scanning the merged order right to left.
pub fn psi_vertex(bottom: &Row, top: &Row) -> Result<PsiValue> {
    check_pair(bottom, top)?;
    psi_vertex_slices(bottom.n(), bottom.level(), bottom.entries(), top.entries())
}

/// Slice-level ψ for a level-`k` row and a level-`k+1` row over `n` colors.
/// Errors if the rows do not interlace.
pub fn psi_vertex_slices(n: usize, k: usize, bottom: &[Color], top: &[Color]) -> Result<PsiValue> {
    if n <= 64 {
        scan::<u64>(n, k, bottom, top)
    } else if n <= 128 {
        scan::<u128>(n, k, bottom, top)
    } else {
        scan::<WideSet>(n, k, bottom, top)
    }
}

fn scan<S: ColorSet>(n: usize, k: usize, bottom: &[Color], top: &[Color]) -> Result<PsiValue> {
    let mut active = S::full(n);
    let mut acc: PsiValue = 0;
    for i in (0..n).rev() {
        let tops = &top[i * (k + 1)..(i + 1) * (k + 1)];
        let bots = &bottom[i * k..(i + 1) * k];
        // right to left: τ_{k+1}, β_k, τ_k, …, β_1, τ_1
        for j in (0..=k).rev() {
            let t = tops[j] as usize;
            if !active.contains(t) {
                return Err(violation(t, "top entry of a color that is not active"));
            }
            active.remove(t);
            if j > 0 {
                let b = bots[j - 1] as usize;
                if active.contains(b) {
                    return Err(violation(b, "bottom entry of a color that is already active"));
                }
                acc += active.count_above(b) as PsiValue;
                active.insert(b);
            }
        }
    }
    if !active.is_empty() {
        return Err(Error::NotInterlacing(
            "arrows remain on the line after the scan".into(),
        ));
    }
    Ok(acc)
}

fn violation(color: usize, what: &str) -> Error {
    Error::NotInterlacing(format!("color {color}: {what}"))
}

/// ψ as `Σ_p Σ_{c' > c(p)} (T_{<p}(c') − B_{<p}(c'))` over bottom positions
/// `p` in the merged order. Every summand is asserted to be 0 or 1.
pub fn psi_formula(bottom: &Row, top: &Row) -> Result<PsiValue> {
    let merged = model::merge_rows(bottom, top)?;
    if !model::is_interlacing(bottom, top)? {
        return Err(Error::NotInterlacing(merged.to_string()));
    }
    let n = bottom.n();
    let mut tops_left = vec![0i64; n + 1];
    let mut bots_left = vec![0i64; n + 1];
    let mut total: PsiValue = 0;
    for slot in merged.slots() {
        let c = slot.color as usize;
        match slot.origin {
            Origin::Top => tops_left[c] += 1,
            Origin::Bottom => {
                for higher in c + 1..=n {
                    let term = tops_left[higher] - bots_left[higher];
                    assert!(
                        (0..=1).contains(&term),
                        "summand {term} outside [0, 1] for interlacing rows"
                    );
                    total += term as PsiValue;
                }
                bots_left[c] += 1;
            }
        }
    }
    Ok(total)
}

/// Total ψ-weight: the sum of ψ over consecutive level pairs.
pub fn psi_total(t: &Triangle) -> Result<PsiValue> {
    let n = t.n();
    (1..t.depth())
        .map(|k| psi_vertex_slices(n, k, t.row(k), t.row(k + 1)))
        .sum()
}
