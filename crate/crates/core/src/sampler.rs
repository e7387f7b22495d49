//! Metropolis–Hastings chain on depth-2 triangles with stationary law
//! proportional to `q^ψ`.
//!
//! For depth 2 the merged order of triangle `i` is `τ_{2i−1}, β_i, τ_{2i}`, so
//! interlacing says: the color at bottom position `i` has exactly one top
//! copy in slots `1..=2i−1` and one in `2i..=2n`. Both move types are checked
//! against that rule only where they can change it.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Color, Triangle};
use crate::perm;
use crate::psi::{self, PsiValue};

/// Identifier of the generator written to run metadata.
pub const RNG_ID: &str = "ChaCha8Rng (rand_chacha 0.9) seeded with seed_from_u64";

/// A depth-2 triangle with its cached ψ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Depth2State {
    bottom: Vec<Color>,
    top: Vec<Color>,
    psi: PsiValue,
}

/// Key of a state in exhaustive tables: `(bottom, top)`.
pub type StateKey = (Vec<Color>, Vec<Color>);

impl Depth2State {
    /// The staircase with bottom `(1, …, n)` and top `(1, 1, …, n, n)`.
    pub fn identity(n: usize) -> Self {
        Depth2State {
            bottom: (1..=n as Color).collect(),
            top: (1..=n as Color).flat_map(|c| [c, c]).collect(),
            psi: 0,
        }
    }

    pub fn new(bottom: Vec<Color>, top: Vec<Color>) -> Result<Self> {
        let n = bottom.len();
        let t = Triangle::from_rows(n, vec![bottom.clone(), top.clone()]);
        t.validate()
            .map_err(|v| Error::NotInterlacing(v.to_string()))?;
        let psi = psi::psi_vertex_slices(n, 1, &bottom, &top)?;
        Ok(Depth2State { bottom, top, psi })
    }

    pub fn from_triangle(t: &Triangle) -> Result<Self> {
        if t.depth() != 2 {
            return Err(Error::InvalidConfig(format!(
                "sampler states have depth 2, got {}",
                t.depth()
            )));
        }
        Depth2State::new(t.row(1).to_vec(), t.row(2).to_vec())
    }

    pub fn n(&self) -> usize {
        self.bottom.len()
    }

    pub fn bottom(&self) -> &[Color] {
        &self.bottom
    }

    pub fn top(&self) -> &[Color] {
        &self.top
    }

    pub fn psi(&self) -> PsiValue {
        self.psi
    }

    pub fn key(&self) -> StateKey {
        (self.bottom.clone(), self.top.clone())
    }

    pub fn to_triangle(&self) -> Triangle {
        Triangle::from_rows(self.n(), vec![self.bottom.clone(), self.top.clone()])
    }

    fn recompute_psi(&mut self) {
        self.psi = psi::psi_vertex_slices(self.n(), 1, &self.bottom, &self.top)
            .expect("moves preserve interlacing");
    }
}

/// Outcome of a proposal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveOutcome {
    Invalid,
    Rejected,
    Accepted,
}

/// Level-2 swap of top slots `p` and `p+1` (1-based). Returns `Ok(None)` when
/// the swapped row would no longer interlace. Equal colors give an unchanged
/// state.
pub fn level2_swap(state: &Depth2State, p: usize) -> Result<Option<Depth2State>> {
    let n = state.n();
    if p == 0 || p >= 2 * n {
        return Err(Error::OutOfRange {
            what: "level-2 position",
            value: p as i64,
            range: format!("1..={}", 2 * n - 1),
        });
    }
    if !level2_swap_is_valid(state, p) {
        return Ok(None);
    }
    let mut next = state.clone();
    if next.top[p - 1] != next.top[p] {
        next.top.swap(p - 1, p);
        next.recompute_psi();
    }
    Ok(Some(next))
}

/// Only an odd `p = 2i − 1` moves an entry across the boundary of bottom
/// position `i`, and only the bottom color there is constrained by it.
fn level2_swap_is_valid(state: &Depth2State, p: usize) -> bool {
    let (c, d) = (state.top[p - 1], state.top[p]);
    if c == d || p % 2 == 0 {
        return true;
    }
    let beta = state.bottom[(p + 1) / 2 - 1];
    c != beta && d != beta
}

/// Level-1 swap of bottom positions `i` and `i+1` (1-based) followed by the
/// reconciliation of the top row. The between region is top slots `2i` and
/// `2i+1`, the two entries separating bottom positions `i` and `i+1` in the
/// merged order.
pub fn level1_swap(state: &Depth2State, i: usize) -> Result<Depth2State> {
    let n = state.n();
    if i == 0 || i >= n {
        return Err(Error::OutOfRange {
            what: "level-1 position",
            value: i as i64,
            range: format!("1..={}", n.saturating_sub(1)),
        });
    }
    let mut next = state.clone();
    let (a, b) = (state.bottom[i - 1], state.bottom[i]);
    next.bottom.swap(i - 1, i);
    // 0-based indices of the between region
    let region = [2 * i - 1, 2 * i];
    let top = &mut next.top;
    let a_in = region.iter().find(|&&s| top[s] == a).copied();
    let b_in = region.iter().find(|&&s| top[s] == b).copied();
    let right_of = |top: &[Color], c: Color| (2 * i + 1..2 * n).find(|&s| top[s] == c);
    let left_of = |top: &[Color], c: Color| (0..2 * i - 1).rev().find(|&s| top[s] == c);
    match (a_in, b_in) {
        (None, None) => {}
        (Some(sa), None) => {
            let sb = right_of(top, b).expect("b has a copy right of the region");
            top[sa] = b;
            top[sb] = a;
        }
        (None, Some(sb)) => {
            let sa = left_of(top, a).expect("a has a copy left of the region");
            top[sb] = a;
            top[sa] = b;
        }
        (Some(_), Some(_)) => {
            let sa = left_of(top, a).expect("a has a copy left of the region");
            let sb = right_of(top, b).expect("b has a copy right of the region");
            top.swap(sa, sb);
        }
    }
    next.recompute_psi();
    debug_assert!(next.to_triangle().is_valid());
    Ok(next)
}

/// Number of distinct proposals, `3n − 2`.
pub fn move_count(n: usize) -> usize {
    3 * n - 2
}

/// Applies move `m ∈ 0..3n−2`: the first `2n − 1` are level-2 positions, the
/// rest level-1 positions.
pub fn apply_move(state: &Depth2State, m: usize) -> Option<Depth2State> {
    let n = state.n();
    if m < 2 * n - 1 {
        level2_swap(state, m + 1).expect("position in range")
    } else {
        Some(level1_swap(state, m - (2 * n - 1) + 1).expect("position in range"))
    }
}

/// One Metropolis–Hastings step. A move index and a uniform variate are drawn
/// on every step, whatever the outcome.
pub fn mh_step<R: Rng>(state: &mut Depth2State, q: f64, rng: &mut R) -> MoveOutcome {
    let n = state.n();
    if n < 2 {
        let _ = rng.random::<f64>();
        return MoveOutcome::Accepted;
    }
    let m = rng.random_range(0..move_count(n));
    let u: f64 = rng.random();
    let Some(proposal) = apply_move(state, m) else {
        return MoveOutcome::Invalid;
    };
    let delta = proposal.psi as i64 - state.psi as i64;
    let alpha = if delta <= 0 { 1.0 } else { q.powi(delta as i32) };
    if u < alpha {
        *state = proposal;
        MoveOutcome::Accepted
    } else {
        MoveOutcome::Rejected
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n: usize,
    pub q: f64,
    /// Total steps including burn-in.
    pub steps: u64,
    pub burn_in: u64,
    pub thinning: u64,
    pub seed: u64,
    /// Keep a per-state histogram (small `n` only).
    #[serde(default)]
    pub record_states: bool,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err(Error::InvalidConfig(format!("q = {} is outside (0, 1]", self.q)));
        }
        if self.steps < self.burn_in {
            return Err(Error::InvalidConfig("steps must be at least burn_in".into()));
        }
        if self.thinning == 0 {
            return Err(Error::InvalidConfig("thinning must be at least 1".into()));
        }
        Ok(())
    }

    pub fn expected_samples(&self) -> u64 {
        (self.steps - self.burn_in) / self.thinning
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerStats {
    /// `[color − 1][position − 1]` counts of the bottom row.
    pub level1_heatmap: Vec<Vec<u64>>,
    /// `[color − 1][slot − 1]` counts of the top row.
    pub level2_heatmap: Vec<Vec<u64>>,
    pub psi_histogram: BTreeMap<PsiValue, u64>,
    pub samples: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub invalid: u64,
    pub state_counts: Option<HashMap<StateKey, u64>>,
}

impl SamplerStats {
    fn new(n: usize, record_states: bool) -> Self {
        SamplerStats {
            level1_heatmap: vec![vec![0; n]; n],
            level2_heatmap: vec![vec![0; 2 * n]; n],
            psi_histogram: BTreeMap::new(),
            samples: 0,
            accepted: 0,
            rejected: 0,
            invalid: 0,
            state_counts: record_states.then(HashMap::new),
        }
    }

    fn record(&mut self, s: &Depth2State) {
        for (pos, &c) in s.bottom.iter().enumerate() {
            self.level1_heatmap[c as usize - 1][pos] += 1;
        }
        for (pos, &c) in s.top.iter().enumerate() {
            self.level2_heatmap[c as usize - 1][pos] += 1;
        }
        *self.psi_histogram.entry(s.psi).or_default() += 1;
        if let Some(counts) = &mut self.state_counts {
            *counts.entry(s.key()).or_default() += 1;
        }
        self.samples += 1;
    }

    pub fn acceptance_rate(&self) -> f64 {
        let total = self.accepted + self.rejected + self.invalid;
        if total == 0 {
            0.0
        } else {
            self.accepted as f64 / total as f64
        }
    }
}

#[derive(Clone, Debug)]
pub struct SamplerRun {
    pub config: SamplerConfig,
    pub stats: SamplerStats,
    pub final_state: Depth2State,
}

/// Runs the chain from the identity staircase. Samples are taken after steps
/// `burn_in + thinning, burn_in + 2·thinning, …` up to `steps`.
pub fn run(config: &SamplerConfig) -> Result<SamplerRun> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = Depth2State::identity(config.n);
    let mut stats = SamplerStats::new(config.n, config.record_states);
    for step in 1..=config.steps {
        match mh_step(&mut state, config.q, &mut rng) {
            MoveOutcome::Accepted => stats.accepted += 1,
            MoveOutcome::Rejected => stats.rejected += 1,
            MoveOutcome::Invalid => stats.invalid += 1,
        }
        if cfg!(debug_assertions) && step % 100_000 == 0 {
            let fresh = psi::psi_vertex_slices(config.n, 1, &state.bottom, &state.top);
            debug_assert_eq!(fresh, Ok(state.psi));
            debug_assert!(state.to_triangle().is_valid());
        }
        if step > config.burn_in && (step - config.burn_in) % config.thinning == 0 {
            stats.record(&state);
        }
    }
    Ok(SamplerRun {
        config: config.clone(),
        stats,
        final_state: state,
    })
}

/// All states of `𝒯₂(n)` with ψ, in lexicographic order of `(bottom, top)`.
pub fn all_states(n: usize) -> Result<Vec<Depth2State>> {
    if n == 0 || n > 6 {
        return Err(Error::TooLarge {
            n,
            max: 6,
            what: "exhaustive state enumeration",
        });
    }
    let mut out = Vec::new();
    for sigma in perm::all_permutations(n) {
        let bottom: Vec<Color> = sigma.iter().map(|&c| c as Color).collect();
        let row = crate::model::Row::new(n, 1, bottom.clone())?;
        crate::enumeration::for_each_extension(&row, |top| {
            let psi = psi::psi_vertex_slices(n, 1, &bottom, top).expect("interlacing");
            out.push(Depth2State {
                bottom: bottom.clone(),
                top: top.to_vec(),
                psi,
            });
        })?;
    }
    Ok(out)
}

/// Exact stationary law `q^ψ / T₂(n; q)` over all states.
pub fn exact_distribution(n: usize, q: &BigRational) -> Result<HashMap<StateKey, BigRational>> {
    if !q.is_positive_rational() {
        return Err(Error::InvalidConfig("q must be positive".into()));
    }
    let states = all_states(n)?;
    let max_psi = states.iter().map(|s| s.psi).max().unwrap_or(0) as usize;
    let mut powers = vec![BigRational::one()];
    for d in 1..=max_psi {
        let next = &powers[d - 1] * q;
        powers.push(next);
    }
    let z: BigRational = states
        .iter()
        .fold(BigRational::zero(), |acc, s| acc + &powers[s.psi as usize]);
    Ok(states
        .into_iter()
        .map(|s| {
            let p = &powers[s.psi as usize] / &z;
            ((s.bottom, s.top), p)
        })
        .collect())
}

trait PositiveRational {
    fn is_positive_rational(&self) -> bool;
}

impl PositiveRational for BigRational {
    fn is_positive_rational(&self) -> bool {
        self.numer() * self.denom() > BigInt::zero()
    }
}

/// Total variation distance between the empirical state histogram and an
/// exact law.
pub fn total_variation(
    counts: &HashMap<StateKey, u64>,
    exact: &HashMap<StateKey, BigRational>,
) -> f64 {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return 1.0;
    }
    let mut tv = 0.0;
    for (k, p) in exact {
        let emp = *counts.get(k).unwrap_or(&0) as f64 / total as f64;
        tv += (emp - p.to_f64().unwrap_or(0.0)).abs();
    }
    // mass on states outside the exact support
    for (k, &c) in counts {
        if !exact.contains_key(k) {
            tv += c as f64 / total as f64;
        }
    }
    tv / 2.0
}

/// Parses a decimal such as `0.2` into the exact rational `1/5`.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a decimal number: {s:?}"));
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let denom = BigInt::from(10u32).pow(frac.len() as u32);
    Ok(BigRational::new(numer, denom))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectivityReport {
    pub n: usize,
    pub reached: usize,
    pub expected: usize,
}

impl ConnectivityReport {
    pub fn connected(&self) -> bool {
        self.reached == self.expected
    }
}

/// Breadth-first search over the move graph from the identity staircase.
pub fn connectivity_check(n: usize) -> Result<ConnectivityReport> {
    let expected = all_states(n)?.len();
    let start = Depth2State::identity(n);
    let mut seen: HashSet<StateKey> = HashSet::new();
    seen.insert(start.key());
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        if n < 2 {
            break;
        }
        for m in 0..move_count(n) {
            if let Some(next) = apply_move(&s, m) {
                if seen.insert(next.key()) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(ConnectivityReport {
        n,
        reached: seen.len(),
        expected,
    })
}

/// Named parameter sets for the large-n heatmap runs.
pub fn preset(name: &str, seed: u64) -> Result<Vec<(String, SamplerConfig)>> {
    let cfg = |n, q, steps, burn_in, thinning| SamplerConfig {
        n,
        q,
        steps,
        burn_in,
        thinning,
        seed,
        record_states: false,
    };
    match name {
        "fig2-top" => Ok(vec![("q0.2".into(), cfg(50, 0.2, 10_000_000, 0, 10_000))]),
        "fig2-bottom" => Ok(vec![("q0.98".into(), cfg(50, 0.98, 10_000_000, 0, 10_000))]),
        "fig3" => {
            let (burn, thin, samples) = (1_000_000u64, 10_000u64, 100_000u64);
            Ok([0.2, 0.9]
                .into_iter()
                .map(|q| (format!("q{q}"), cfg(25, q, burn + thin * samples, burn, thin)))
                .collect())
        }
        other => Err(Error::InvalidConfig(format!(
            "unknown preset {other:?} (expected fig2-top, fig2-bottom or fig3)"
        ))),
    }
}

fn write_matrix_csv(path: &Path, m: &[Vec<u64>]) -> std::io::Result<()> {
    let mut s = String::new();
    for row in m {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    fs::write(path, s)
}

/// 8-bit binary PGM, counts rescaled linearly so the maximum maps to 255.
fn write_pgm(path: &Path, m: &[Vec<u64>]) -> std::io::Result<()> {
    let h = m.len();
    let w = m.first().map_or(0, |r| r.len());
    let max = m.iter().flatten().copied().max().unwrap_or(0).max(1);
    let mut f = fs::File::create(path)?;
    write!(f, "P5\n{w} {h}\n255\n")?;
    let bytes: Vec<u8> = m
        .iter()
        .flatten()
        .map(|&v| ((v as u128 * 255 + max as u128 / 2) / max as u128) as u8)
        .collect();
    f.write_all(&bytes)
}

/// Which optional artifacts [`write_outputs`] produces.
#[derive(Clone, Copy, Debug, Default)]
pub struct OutputOptions {
    pub pgm: bool,
    pub final_state: bool,
}

/// Writes `level1.csv`, `level2.csv`, `psi_hist.csv`, `meta.json` and the
/// requested optional files into `dir`.
pub fn write_outputs(dir: &Path, run: &SamplerRun, opts: OutputOptions) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidConfig(format!("cannot write to {}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    write_matrix_csv(&dir.join("level1.csv"), &run.stats.level1_heatmap).map_err(io)?;
    write_matrix_csv(&dir.join("level2.csv"), &run.stats.level2_heatmap).map_err(io)?;
    let mut hist = String::from("psi,count\n");
    for (v, c) in &run.stats.psi_histogram {
        hist.push_str(&format!("{v},{c}\n"));
    }
    fs::write(dir.join("psi_hist.csv"), hist).map_err(io)?;
    let meta = serde_json::json!({
        "config": run.config,
        "rng": RNG_ID,
        "samples": run.stats.samples,
        "accepted": run.stats.accepted,
        "rejected": run.stats.rejected,
        "invalid": run.stats.invalid,
        "acceptance_rate": run.stats.acceptance_rate(),
        "final_psi": run.final_state.psi,
    });
    let meta = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    fs::write(dir.join("meta.json"), meta + "\n").map_err(io)?;
    if opts.pgm {
        write_pgm(&dir.join("level1.pgm"), &run.stats.level1_heatmap).map_err(io)?;
        write_pgm(&dir.join("level2.pgm"), &run.stats.level2_heatmap).map_err(io)?;
    }
    if opts.final_state {
        fs::write(dir.join("final_state.json"), run.final_state.to_triangle().to_json() + "\n")
            .map_err(io)?;
    }
    Ok(())
}
