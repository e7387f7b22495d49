//! Colored interlacing triangles.
//!
//! A triangle with `n` colors and depth `N` is stored as `N` flattened rows.
//! Row `k` (1-based) has `n·k` entries: the concatenation over the `n`
//! sub-triangles of their `k` dots at that level, read left to right. The
//! triangle-wise entry `λ[i]ᵏ_j` lives at flat index `(i−1)·k + (j−1)`.
//!
//! Two consecutive rows are compared in the merged linear order: for each
//! sub-triangle `i`, the top entries `τ[i]₁ … τ[i]_{k+1}` with the bottom
//! entries `β[i]₁ … β[i]_k` slotted between them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm;

/// A 1-based color.
pub type Color = u16;

/// One level of a triangle, validated against the multiplicity invariant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Row {
    n: usize,
    level: usize,
    entries: Vec<Color>,
}

impl Row {
    /// Builds a level-`level` row, checking length, color range and that each
    /// color appears exactly `level` times.
    pub fn new(n: usize, level: usize, entries: Vec<Color>) -> Result<Row> {
        check_row(n, level, &entries)?;
        Ok(Row { n, level, entries })
    }

    /// The level-1 row `(1, 2, …, n)`.
    pub fn identity(n: usize) -> Row {
        Row {
            n,
            level: 1,
            entries: (1..=n as Color).collect(),
        }
    }

    /// The row `(1ᵏ, 2ᵏ, …, nᵏ)`: sub-triangle `i` is filled with color `i`.
    pub fn staircase(n: usize, level: usize) -> Row {
        let entries = (1..=n as Color)
            .flat_map(|c| std::iter::repeat_n(c, level))
            .collect();
        Row { n, level, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn entries(&self) -> &[Color] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Color> {
        self.entries
    }

    /// Triangle-wise access `λ[i]_j`, both indices 1-based.
    pub fn get(&self, i: usize, j: usize) -> Color {
        self.entries[(i - 1) * self.level + (j - 1)]
    }
}

fn check_row(n: usize, level: usize, entries: &[Color]) -> Result<()> {
    if entries.len() != n * level {
        return Err(Error::LengthMismatch {
            level,
            expected: n * level,
            actual: entries.len(),
        });
    }
    let mut counts = vec![0usize; n + 1];
    for &c in entries {
        let c = c as usize;
        if c == 0 || c > n {
            return Err(Error::ColorOutOfRange { color: c, n });
        }
        counts[c] += 1;
    }
    if let Some(color) = (1..=n).find(|&c| counts[c] != level) {
        return Err(Error::Multiplicity {
            level,
            color,
            count: counts[color],
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    Top,
    Bottom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Slot {
    pub origin: Origin,
    pub color: Color,
}

/// Two consecutive rows written in one line using the merged linear order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergedRow {
    n: usize,
    level: usize,
    slots: Vec<Slot>,
}

impl MergedRow {
    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Level of the bottom row.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Writes bottom entries between bars, e.g. `(2|2|13|3|32|1|1)`.
/// Palettes with more than nine colors separate tokens with spaces.
impl fmt::Display for MergedRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spaced = self.n > 9;
        f.write_str("(")?;
        let mut prev_top = false;
        for s in &self.slots {
            match s.origin {
                Origin::Top => {
                    if spaced && prev_top {
                        f.write_str(" ")?;
                    }
                    write!(f, "{}", s.color)?;
                    prev_top = true;
                }
                Origin::Bottom => {
                    write!(f, "|{}|", s.color)?;
                    prev_top = false;
                }
            }
        }
        f.write_str(")")
    }
}

/// Visits the merged order of a level-`k` row and a level-`k+1` row without
/// allocating. The callback receives `(origin, index into its own row)`.
#[inline]
pub(crate) fn for_each_merged_slot(n: usize, k: usize, mut f: impl FnMut(Origin, usize)) {
    for i in 0..n {
        for j in 0..k {
            f(Origin::Top, i * (k + 1) + j);
            f(Origin::Bottom, i * k + j);
        }
        f(Origin::Top, i * (k + 1) + k);
    }
}

fn check_pair(bottom: &Row, top: &Row) -> Result<()> {
    if bottom.n != top.n {
        return Err(Error::PaletteMismatch {
            left: bottom.n,
            right: top.n,
        });
    }
    if bottom.level + 1 != top.level {
        return Err(Error::LevelMismatch {
            bottom: bottom.level,
            top: top.level,
        });
    }
    Ok(())
}

pub fn merge_rows(bottom: &Row, top: &Row) -> Result<MergedRow> {
    check_pair(bottom, top)?;
    let (n, k) = (bottom.n, bottom.level);
    let mut slots = Vec::with_capacity(n * (2 * k + 1));
    for_each_merged_slot(n, k, |origin, idx| {
        let color = match origin {
            Origin::Top => top.entries[idx],
            Origin::Bottom => bottom.entries[idx],
        };
        slots.push(Slot { origin, color });
    });
    Ok(MergedRow { n, level: k, slots })
}

/// First place where the per-color alternation top, bottom, top, …, top
/// breaks, as `(color, 0-based merged slot)`. Slot `n·(2k+1)` means the
/// color ended on a bottom entry.
pub(crate) fn interlacing_violation(
    n: usize,
    k: usize,
    bottom: &[Color],
    top: &[Color],
) -> Option<(Color, usize)> {
    // open[c]: the last slot of color c seen so far was a top entry
    let mut open = vec![false; n + 1];
    let mut slot = 0usize;
    let mut bad = None;
    for_each_merged_slot(n, k, |origin, idx| {
        if bad.is_some() {
            return;
        }
        match origin {
            Origin::Top => {
                let c = top[idx];
                if open[c as usize] {
                    bad = Some((c, slot));
                }
                open[c as usize] = true;
            }
            Origin::Bottom => {
                let c = bottom[idx];
                if !open[c as usize] {
                    bad = Some((c, slot));
                }
                open[c as usize] = false;
            }
        }
        slot += 1;
    });
    if bad.is_some() {
        return bad;
    }
    (1..=n)
        .find(|&c| !open[c])
        .map(|c| (c as Color, n * (2 * k + 1)))
}

/// True iff every color's entries alternate top, bottom, …, top in the
/// merged order.
pub fn is_interlacing(bottom: &Row, top: &Row) -> Result<bool> {
    check_pair(bottom, top)?;
    Ok(interlacing_violation(bottom.n, bottom.level, &bottom.entries, &top.entries).is_none())
}

/// Where a triangle first fails to be a valid colored interlacing triangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyPalette,
    RowLength {
        level: usize,
        expected: usize,
        actual: usize,
    },
    ColorOutOfRange {
        level: usize,
        slot: usize,
        color: Color,
    },
    Multiplicity {
        level: usize,
        color: Color,
        count: usize,
    },
    /// The pair (`level`, `level + 1`) breaks alternation for `color` at the
    /// given 0-based merged slot.
    NotInterlacing {
        level: usize,
        color: Color,
        slot: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyPalette => write!(f, "palette size must be at least 1"),
            Violation::RowLength {
                level,
                expected,
                actual,
            } => write!(f, "level {level}: length {actual}, expected {expected}"),
            Violation::ColorOutOfRange { level, slot, color } => {
                write!(f, "level {level}, slot {slot}: color {color} out of range")
            }
            Violation::Multiplicity {
                level,
                color,
                count,
            } => write!(f, "level {level}: color {color} appears {count} times"),
            Violation::NotInterlacing { level, color, slot } => write!(
                f,
                "levels {level}/{}: color {color} breaks alternation at merged slot {slot}",
                level + 1
            ),
        }
    }
}

/// A colored interlacing triangle, possibly invalid; see [`validate_triangle`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triangle {
    n: usize,
    #[serde(rename = "N")]
    depth: usize,
    rows: Vec<Vec<Color>>,
}

impl Triangle {
    /// Wraps raw rows. Only the shape `rows.len() == depth` is enforced here.
    pub fn from_rows(n: usize, rows: Vec<Vec<Color>>) -> Triangle {
        Triangle {
            n,
            depth: rows.len(),
            rows,
        }
    }

    /// Bottom row `(1..n)`, every level filled triangle-wise with one color.
    pub fn identity_staircase(n: usize, depth: usize) -> Triangle {
        let rows = (1..=depth)
            .map(|k| Row::staircase(n, k).into_entries())
            .collect();
        Triangle::from_rows(n, rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn rows(&self) -> &[Vec<Color>] {
        &self.rows
    }

    /// Row at 1-based level `k`.
    pub fn row(&self, k: usize) -> &[Color] {
        &self.rows[k - 1]
    }

    pub fn validate(&self) -> Result<(), Violation> {
        validate_triangle(self)
    }

    pub fn is_valid(&self) -> bool {
        validate_triangle(self).is_ok()
    }

    /// Text form: `n N` on the first line, then one line per level.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.depth);
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Triangle> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty triangle file".into()))?;
        let head: Vec<usize> = parse_tokens(header)?;
        let [n, depth] = head[..] else {
            return Err(Error::Parse(format!("expected header `n N`, got `{header}`")));
        };
        let mut rows = Vec::with_capacity(depth);
        for k in 1..=depth {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row for level {k}")))?;
            let row: Vec<Color> = parse_tokens(line)?;
            if row.len() != n * k {
                return Err(Error::LengthMismatch {
                    level: k,
                    expected: n * k,
                    actual: row.len(),
                });
            }
            rows.push(row);
        }
        if let Some(extra) = lines.next() {
            return Err(Error::Parse(format!("unexpected trailing line `{extra}`")));
        }
        Ok(Triangle::from_rows(n, rows))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("triangle serializes")
    }

    pub fn from_json(text: &str) -> Result<Triangle> {
        let t: Triangle = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if t.rows.len() != t.depth {
            return Err(Error::Parse(format!(
                "N = {} but {} rows given",
                t.depth,
                t.rows.len()
            )));
        }
        Ok(t)
    }

    /// Parses either format, picking JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Triangle> {
        if text.trim_start().starts_with('{') {
            Triangle::from_json(text)
        } else {
            Triangle::from_text(text)
        }
    }
}

fn parse_tokens<T: std::str::FromStr>(line: &str) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse()
                .map_err(|_| Error::Parse(format!("bad integer `{tok}`")))
        })
        .collect()
}

/// Checks row multiplicities and pairwise interlacing, reporting the first
/// violated constraint.
pub fn validate_triangle(t: &Triangle) -> Result<(), Violation> {
    let n = t.n;
    if n == 0 {
        return Err(Violation::EmptyPalette);
    }
    for (idx, row) in t.rows.iter().enumerate() {
        let level = idx + 1;
        if row.len() != n * level {
            return Err(Violation::RowLength {
                level,
                expected: n * level,
                actual: row.len(),
            });
        }
        let mut counts = vec![0usize; n + 1];
        for (slot, &c) in row.iter().enumerate() {
            if c == 0 || c as usize > n {
                return Err(Violation::ColorOutOfRange {
                    level,
                    slot,
                    color: c,
                });
            }
            counts[c as usize] += 1;
        }
        if let Some(c) = (1..=n).find(|&c| counts[c] != level) {
            return Err(Violation::Multiplicity {
                level,
                color: c as Color,
                count: counts[c],
            });
        }
    }
    for k in 1..t.depth {
        if let Some((color, slot)) = interlacing_violation(n, k, &t.rows[k - 1], &t.rows[k]) {
            return Err(Violation::NotInterlacing {
                level: k,
                color,
                slot,
            });
        }
    }
    Ok(())
}

/// Relabels every color `c ↦ n + 1 − c`.
pub fn color_complement(t: &Triangle) -> Triangle {
    let n = t.n as Color;
    let rows = t
        .rows
        .iter()
        .map(|r| r.iter().map(|&c| n + 1 - c).collect())
        .collect();
    Triangle::from_rows(t.n, rows)
}

/// Relabels every color `c ↦ π(c)`; `pi` is in one-line notation.
pub fn apply_color_permutation(t: &Triangle, pi: &[usize]) -> Result<Triangle> {
    if pi.len() != t.n {
        return Err(Error::PaletteMismatch {
            left: t.n,
            right: pi.len(),
        });
    }
    perm::check_permutation(pi)?;
    let rows = t
        .rows
        .iter()
        .map(|r| r.iter().map(|&c| pi[c as usize - 1] as Color).collect())
        .collect();
    Ok(Triangle::from_rows(t.n, rows))
}

/// Swaps the adjacent top-level entries `λ[i]^N_N` and `λ[i+1]^N_1`.
pub fn boundary_involution(t: &Triangle, i: usize) -> Result<Triangle> {
    if t.depth < 2 {
        return Err(Error::OutOfRange {
            what: "depth",
            value: t.depth as i64,
            range: ">= 2".into(),
        });
    }
    if i == 0 || i >= t.n {
        return Err(Error::OutOfRange {
            what: "boundary index",
            value: i as i64,
            range: format!("1..={}", t.n.saturating_sub(1)),
        });
    }
    let mut out = t.clone();
    let depth = t.depth;
    out.rows[depth - 1].swap(i * depth - 1, i * depth);
    Ok(out)
}

/// Returns `(π·t, π)` where `π` sends the bottom row to `(1, 2, …, n)`.
pub fn canonicalize_bottom(t: &Triangle) -> Result<(Triangle, Vec<usize>)> {
    let bottom: Vec<usize> = t.rows[0].iter().map(|&c| c as usize).collect();
    perm::check_permutation(&bottom)?;
    let pi = perm::inverse(&bottom);
    let canon = apply_color_permutation(t, &pi)?;
    Ok((canon, pi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_example() -> Triangle {
        Triangle::from_rows(
            3,
            vec![
                vec![2, 3, 1],
                vec![2, 1, 3, 3, 2, 1],
                vec![2, 1, 2, 3, 3, 1, 3, 2, 1],
            ],
        )
    }

    fn row(n: usize, level: usize, e: &[Color]) -> Row {
        Row::new(n, level, e.to_vec()).unwrap()
    }

    #[test]
    fn worked_example_merged_order() {
        let t = worked_example();
        let merged = merge_rows(&row(3, 1, t.row(1)), &row(3, 2, t.row(2))).unwrap();
        assert_eq!(merged.to_string(), "(2|2|13|3|32|1|1)");
        assert!(t.is_valid());
    }

    #[test]
    fn worked_example_triangle_view_matches_dot_layout() {
        // sub-triangle 2 is (3 | 3 3 | 3 3 1) from bottom to top
        let t = worked_example();
        let r3 = row(3, 3, t.row(3));
        assert_eq!([r3.get(2, 1), r3.get(2, 2), r3.get(2, 3)], [3, 3, 1]);
        let r2 = row(3, 2, t.row(2));
        assert_eq!([r2.get(3, 1), r2.get(3, 2)], [2, 1]);
    }

    #[test]
    fn small_merges() {
        let m = merge_rows(&row(1, 1, &[1]), &row(1, 2, &[1, 1])).unwrap();
        let origins: Vec<_> = m.slots().iter().map(|s| s.origin).collect();
        assert_eq!(origins, vec![Origin::Top, Origin::Bottom, Origin::Top]);
        let m = merge_rows(&row(2, 1, &[1, 2]), &row(2, 2, &[1, 1, 2, 2])).unwrap();
        assert_eq!(m.to_string(), "(1|1|12|2|2)");
    }

    #[test]
    fn merge_errors() {
        let b = row(2, 1, &[1, 2]);
        assert!(matches!(
            merge_rows(&b, &b),
            Err(Error::LevelMismatch { .. })
        ));
        let other = row(1, 2, &[1, 1]);
        assert!(matches!(
            merge_rows(&b, &other),
            Err(Error::PaletteMismatch { .. })
        ));
        assert!(matches!(
            Row::new(2, 2, vec![1, 2, 1]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            Row::new(2, 2, vec![1, 1, 1, 2]),
            Err(Error::Multiplicity { .. })
        ));
    }

    #[test]
    fn interlacing_examples() {
        assert!(is_interlacing(&row(1, 1, &[1]), &row(1, 2, &[1, 1])).unwrap());
        // merged (1|1|21|2|2): both colors alternate top, bottom, top
        assert!(is_interlacing(&row(2, 1, &[1, 2]), &row(2, 2, &[1, 2, 1, 2])).unwrap());
        // merged (2|1|11|2|2): color 1 has two tops before its bottom
        assert!(!is_interlacing(&row(2, 1, &[1, 2]), &row(2, 2, &[2, 1, 1, 2])).unwrap());
        assert!(!is_interlacing(&row(2, 1, &[1, 2]), &row(2, 2, &[1, 2, 2, 1])).unwrap());
    }

    #[test]
    fn equal_boundary_colors_are_invalid() {
        // top (1,2,2,1) over (1,2): λ[1]²₂ = λ[2]²₁ = 2
        let t = Triangle::from_rows(2, vec![vec![1, 2], vec![1, 2, 2, 1]]);
        assert!(matches!(
            t.validate(),
            Err(Violation::NotInterlacing { .. })
        ));
    }

    #[test]
    fn staircase_is_valid() {
        for n in 1..=4 {
            for depth in 1..=4 {
                assert!(Triangle::identity_staircase(n, depth).is_valid());
            }
        }
    }

    #[test]
    fn diagnostics() {
        let t = Triangle::from_rows(2, vec![vec![1, 3]]);
        assert!(matches!(
            t.validate(),
            Err(Violation::ColorOutOfRange { level: 1, slot: 1, color: 3 })
        ));
        let t = Triangle::from_rows(2, vec![vec![1, 2], vec![1, 1, 1, 2]]);
        assert!(matches!(
            t.validate(),
            Err(Violation::Multiplicity { level: 2, color: 1, count: 3 })
        ));
        let t = Triangle::from_rows(2, vec![vec![1, 2], vec![1, 1, 2]]);
        assert!(matches!(t.validate(), Err(Violation::RowLength { .. })));
    }

    #[test]
    fn complement_examples() {
        let t = Triangle::from_rows(2, vec![vec![1, 2]]);
        assert_eq!(color_complement(&t).row(1), &[2, 1]);
        let t = Triangle::from_rows(3, vec![vec![2, 3, 1]]);
        assert_eq!(color_complement(&t).row(1), &[2, 1, 3]);
        let f = worked_example();
        let c = color_complement(&f);
        assert!(c.is_valid());
        assert_eq!(c.row(1), &[2, 1, 3]);
        assert_eq!(color_complement(&c), f);
        assert_eq!(apply_color_permutation(&f, &[3, 2, 1]).unwrap(), c);
    }

    #[test]
    fn permutation_errors() {
        assert!(apply_color_permutation(&worked_example(), &[1, 1, 2]).is_err());
        assert!(apply_color_permutation(&worked_example(), &[1, 2]).is_err());
    }

    #[test]
    fn involution_example() {
        let t = Triangle::from_rows(2, vec![vec![1, 2], vec![1, 1, 2, 2]]);
        let s = boundary_involution(&t, 1).unwrap();
        assert_eq!(s.row(2), &[1, 2, 1, 2]);
        assert!(s.is_valid());
        assert_eq!(boundary_involution(&s, 1).unwrap(), t);
        assert!(boundary_involution(&t, 0).is_err());
        assert!(boundary_involution(&t, 2).is_err());
        let flat = Triangle::from_rows(2, vec![vec![1, 2]]);
        assert!(boundary_involution(&flat, 1).is_err());
    }

    #[test]
    fn canonicalize_worked_example() {
        let (canon, pi) = canonicalize_bottom(&worked_example()).unwrap();
        assert_eq!(pi, vec![3, 1, 2]); // 1↦3, 2↦1, 3↦2
        assert_eq!(canon.row(1), &[1, 2, 3]);
        assert!(canon.is_valid());
        let back = apply_color_permutation(&canon, &perm::inverse(&pi)).unwrap();
        assert_eq!(back, worked_example());
        let id = Triangle::identity_staircase(3, 2);
        assert_eq!(canonicalize_bottom(&id).unwrap(), (id, vec![1, 2, 3]));
    }

    #[test]
    fn text_and_json_formats() {
        let t = worked_example();
        let text = t.to_text();
        assert_eq!(text, "3 3\n2 3 1\n2 1 3 3 2 1\n2 1 2 3 3 1 3 2 1\n");
        assert_eq!(Triangle::from_text(&text).unwrap(), t);
        let json = t.to_json();
        assert_eq!(
            json,
            r#"{"n":3,"N":3,"rows":[[2,3,1],[2,1,3,3,2,1],[2,1,2,3,3,1,3,2,1]]}"#
        );
        assert_eq!(Triangle::from_json(&json).unwrap(), t);
        assert_eq!(Triangle::parse(&json).unwrap().to_json(), json);
        assert!(Triangle::from_text("2 2\n1 2\n").is_err());
        assert!(Triangle::from_json(r#"{"n":2,"N":2,"rows":[[1,2]]}"#).is_err());
    }
}
