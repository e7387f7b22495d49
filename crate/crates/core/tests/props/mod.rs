//! Invariants checked by exhaustive small-instance generation against
//! independent oracles. No reference tables are read here. Shared by the
//! `properties` and `acceptance` targets.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cit_core::dumont;
use cit_core::enumeration::{self, count_triangles};
use cit_core::model::{
    self, apply_color_permutation, boundary_involution, color_complement, is_interlacing,
    merge_rows, Color, Origin, Row, Triangle,
};
use cit_core::perm;
use cit_core::poly::QPolynomial;
use cit_core::psi::{psi_formula, psi_total, psi_vertex};
use cit_core::qenum;
use cit_core::sampler::{self, Depth2State};

fn binom2(n: usize) -> u64 {
    (n * (n - 1) / 2) as u64
}

/// Every arrangement of `n` colors with multiplicity `m`.
fn multiset_rows(n: usize, m: usize) -> Vec<Vec<Color>> {
    let mut row: Vec<Color> = (1..=n as Color).flat_map(|c| std::iter::repeat_n(c, m)).collect();
    let mut out = vec![row.clone()];
    while perm::next_permutation(&mut row) {
        out.push(row.clone());
    }
    out
}

/// Merged order written out directly: per sub-triangle, top, bottom, top, …, top.
fn merged_oracle(n: usize, k: usize, bottom: &[Color], top: &[Color]) -> Vec<(bool, Color)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..k {
            out.push((true, top[i * (k + 1) + j]));
            out.push((false, bottom[i * k + j]));
        }
        out.push((true, top[i * (k + 1) + k]));
    }
    out
}

/// Each color reads top, bottom, top, …, top along the merged order.
fn alternates(n: usize, merged: &[(bool, Color)]) -> bool {
    (1..=n as Color).all(|c| {
        let seq: Vec<bool> = merged.iter().filter(|s| s.1 == c).map(|s| s.0).collect();
        seq.iter().enumerate().all(|(i, &is_top)| is_top == (i % 2 == 0)) && seq.len() % 2 == 1
    })
}

/// All triangles of depth `depth` over `n` colors, level by level.
fn all_triangles(n: usize, depth: usize) -> Vec<Triangle> {
    let mut partial: Vec<Vec<Vec<Color>>> = perm::all_permutations(n)
        .map(|p| vec![p.iter().map(|&c| c as Color).collect()])
        .collect();
    for level in 1..depth {
        let mut next = Vec::new();
        for rows in partial {
            let last = Row::new(n, level, rows[level - 1].clone()).unwrap();
            for ext in enumeration::extensions(&last).unwrap() {
                let mut r = rows.clone();
                r.push(ext.into_entries());
                next.push(r);
            }
        }
        partial = next;
    }
    partial.into_iter().map(|r| Triangle::from_rows(n, r)).collect()
}

/// All interlacing `(bottom, top)` pairs at level `k`, by brute force.
fn interlacing_pairs(n: usize, k: usize) -> Vec<(Row, Row)> {
    let bottoms = multiset_rows(n, k);
    let tops = multiset_rows(n, k + 1);
    let mut out = Vec::new();
    for b in &bottoms {
        for t in &tops {
            if alternates(n, &merged_oracle(n, k, b, t)) {
                out.push((
                    Row::new(n, k, b.clone()).unwrap(),
                    Row::new(n, k + 1, t.clone()).unwrap(),
                ));
            }
        }
    }
    out
}

fn complement_row(r: &Row) -> Row {
    let n = r.n() as Color;
    Row::new(r.n(), r.level(), r.entries().iter().map(|&c| n + 1 - c).collect()).unwrap()
}

// core model

pub fn merged_rows_and_interlacing_match_the_alternation_oracle() {
    for n in 1..=3 {
        for k in 1..=2 {
            for b in multiset_rows(n, k) {
                for t in multiset_rows(n, k + 1) {
                    let br = Row::new(n, k, b.clone()).unwrap();
                    let tr = Row::new(n, k + 1, t.clone()).unwrap();
                    let merged = merge_rows(&br, &tr).unwrap();
                    let oracle = merged_oracle(n, k, &b, &t);
                    let got: Vec<(bool, Color)> = merged
                        .slots()
                        .iter()
                        .map(|s| (s.origin == Origin::Top, s.color))
                        .collect();
                    assert_eq!(got, oracle);
                    for c in 1..=n as Color {
                        let tops = got.iter().filter(|s| s.1 == c && s.0).count();
                        let bots = got.iter().filter(|s| s.1 == c && !s.0).count();
                        assert_eq!((tops, bots), (k + 1, k));
                    }
                    assert_eq!(is_interlacing(&br, &tr).unwrap(), alternates(n, &oracle));
                }
            }
        }
    }
}

pub fn relabelings_preserve_validity() {
    for n in 1..=3 {
        for depth in 1..=3 {
            let perms: Vec<Vec<usize>> = perm::all_permutations(n).collect();
            for t in all_triangles(n, depth) {
                assert!(t.is_valid());
                assert!(color_complement(&t).is_valid());
                for pi in &perms {
                    assert!(apply_color_permutation(&t, pi).unwrap().is_valid());
                }
            }
        }
    }
}

pub fn boundary_involutions_generate_orbits_of_size_two_to_the_n_minus_one() {
    for n in 1..=4 {
        let bottom = Row::identity(n);
        for top in enumeration::extensions(&bottom).unwrap() {
            let t = Triangle::from_rows(n, vec![bottom.entries().to_vec(), top.into_entries()]);
            let mut orbit = HashSet::from([t.clone()]);
            let mut stack = vec![t.clone()];
            while let Some(s) = stack.pop() {
                for i in 1..n {
                    let u = boundary_involution(&s, i).unwrap();
                    assert!(u.is_valid());
                    assert_eq!(boundary_involution(&u, i).unwrap(), s);
                    assert_eq!(psi_total(&u).unwrap(), psi_total(&s).unwrap());
                    if orbit.insert(u.clone()) {
                        stack.push(u);
                    }
                }
            }
            assert_eq!(orbit.len(), 1 << (n - 1));
        }
    }
}

pub fn total_count_is_n_factorial_times_canonical_count() {
    for n in 1..=3 {
        for depth in 1..=3 {
            let all = all_triangles(n, depth);
            let canonical = all.iter().filter(|t| t.row(1).iter().enumerate().all(|(i, &c)| c as usize == i + 1)).count();
            assert_eq!(all.len(), perm::factorial(n).to_usize().unwrap() * canonical);
            let counted = count_triangles(depth, n, false).unwrap().total;
            assert_eq!(counted.to_usize().unwrap(), all.len());
        }
    }
}

// ψ statistic

pub fn psi_routes_agree_and_complement_reverses() {
    for (n, k) in [(1, 1), (2, 1), (3, 1), (4, 1), (1, 2), (2, 2), (3, 2)] {
        let pairs = interlacing_pairs(n, k);
        let max = k as u64 * binom2(n);
        let (mut lo, mut hi) = (u64::MAX, 0);
        for (b, t) in &pairs {
            let v = psi_vertex(b, t).unwrap();
            assert_eq!(v, psi_formula(b, t).unwrap(), "{b:?} {t:?}");
            let vc = psi_vertex(&complement_row(b), &complement_row(t)).unwrap();
            assert_eq!(v + vc, max);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert_eq!((lo, hi), (0, max), "n = {n}, k = {k}");
    }
}

// Dumont permutations and Genocchi medians

pub fn dumont_count_matches_top_rows_over_the_identity() {
    for n in 0..=6 {
        let h = dumont::count_dumont(n);
        if n == 0 {
            assert_eq!(h, 1u32.into());
            continue;
        }
        let tops = enumeration::extensions(&Row::identity(n)).unwrap();
        assert_eq!(h, tops.len().into());
        assert_eq!(&h % (1u64 << (n - 1)), 0u32.into());
        if n <= 5 {
            let images: BTreeSet<Vec<usize>> = tops
                .iter()
                .map(|t| {
                    let d = dumont::top_row_to_dumont(t).unwrap();
                    assert_eq!(&dumont::dumont_to_top_row(&d).unwrap(), t);
                    d.as_slice().to_vec()
                })
                .collect();
            assert_eq!(images.len(), tops.len());
            assert!(images.iter().all(|s| dumont::is_dumont(s).unwrap()));
        }
    }
}

pub fn q_analogs_specialize_and_differ() {
    for n in 1..=6 {
        let h = BigInt::from(dumont::count_dumont(n));
        let r = dumont::q_analog_randrianarivony(n);
        let hz = dumont::q_analog_han_zeng(n).unwrap();
        let zz = dumont::q_analog_zeng_zhou(n);
        for p in [&r, &hz, &zz] {
            assert_eq!(p.sum(), h, "n = {n}");
        }
        if n >= 3 {
            assert!(r != hz && hz != zz && r != zz, "n = {n}");
        }
    }
    // none of the H^σ / 2^(n−1) at n = 4 is one of the three analogs
    let analogs = [
        dumont::q_analog_randrianarivony(4),
        dumont::q_analog_han_zeng(4).unwrap(),
        dumont::q_analog_zeng_zhou(4),
    ];
    for sigma in perm::all_permutations(4) {
        let h = qenum::h_sigma_polynomial(&sigma).unwrap();
        let reduced = h.div_exact_scalar(&BigInt::from(8)).unwrap();
        assert!(!analogs.contains(&h) && !analogs.contains(&reduced));
    }
}

// exact enumeration

pub fn frontier_rows_start_with_one_and_end_with_n() {
    for n in 1..=3 {
        let mut rows = vec![Row::identity(n)];
        for _level in 1..3 {
            let mut next = Vec::new();
            for r in &rows {
                next.extend(enumeration::extensions(r).unwrap());
            }
            for r in &next {
                assert_eq!(r.entries().first(), Some(&1));
                assert_eq!(r.entries().last(), Some(&(n as Color)));
            }
            rows = next;
        }
    }
}

pub fn counting_symmetry_and_divisibility() {
    for depth in 1..=3 {
        for n in 1..=4 {
            let with = count_triangles(depth, n, true).unwrap();
            let without = count_triangles(depth, n, false).unwrap();
            assert_eq!(with.total, without.total);
            if depth >= 2 {
                assert!(with.two_adic >= (n - 1) as u64, "T_{depth}({n})");
            }
        }
    }
    for n in 1..=6 {
        let t2 = count_triangles(2, n, true).unwrap().total;
        assert_eq!(t2, perm::factorial(n) * dumont::count_dumont(n));
    }
    for depth in 1..=8 {
        assert_eq!(count_triangles(depth, 2, true).unwrap().total, (1u32 << depth).into());
    }
}

// q-enumeration

pub fn q_polynomial_shape() {
    for n in 1..=7 {
        let t2 = qenum::t2_q_polynomial(n).unwrap();
        let d = binom2(n) as usize;
        assert_eq!(t2.degree(), Some(d));
        assert!(t2.is_palindromic(d));
        assert!(t2.coeffs().iter().all(|c| c % (BigInt::from(1) << (n - 1)) == BigInt::from(0)));
        assert_eq!(
            t2.sum(),
            BigInt::from(perm::factorial(n)) * BigInt::from(dumont::count_dumont(n))
        );
        if n <= 5 {
            assert_eq!(t2, qenum::t2_q_polynomial_exhaustive(n).unwrap());
        }
    }
}

/// `H_n^σ(q)` straight from the definition.
fn h_sigma_direct(sigma: &[usize]) -> QPolynomial {
    let n = sigma.len();
    let bottom = Row::new(n, 1, sigma.iter().map(|&c| c as Color).collect()).unwrap();
    let mut acc = vec![0i64; binom2(n) as usize + 1];
    for top in enumeration::extensions(&bottom).unwrap() {
        acc[psi_vertex(&bottom, &top).unwrap() as usize] += 1;
    }
    QPolynomial::from_i64s(&acc)
}

pub fn h_sigma_complement_specialization_and_lower_bound() {
    for n in 1..=5 {
        let d = binom2(n) as usize;
        let h_n = BigInt::from(dumont::count_dumont(n));
        for sigma in perm::all_permutations(n) {
            let h = qenum::h_sigma_polynomial(&sigma).unwrap();
            assert_eq!(h, h_sigma_direct(&sigma));
            assert_eq!(h.sum(), h_n);
            let bar: Vec<usize> = sigma.iter().map(|&s| n + 1 - s).collect();
            let hb = qenum::h_sigma_polynomial(&bar).unwrap();
            // q^d · H(1/q) reverses the coefficient list
            let rev: Vec<BigInt> = (0..=d).map(|k| h.coeff(d - k)).collect();
            assert_eq!(hb, QPolynomial::new(rev));
            if perm::inversions(&sigma) >= 2 {
                assert!(h.coeff(0) == BigInt::from(0) && h.coeff(1) == BigInt::from(0));
            }
        }
    }
}

pub fn psi_can_fall_below_the_inversion_number() {
    // the lower bound ψ ≥ 2 for inv ≥ 2 does not extend to ψ ≥ inv
    let found = perm::all_permutations(4).any(|sigma| {
        let h = qenum::h_sigma_polynomial(&sigma).unwrap();
        let lowest = h.coeffs().iter().position(|c| *c != BigInt::from(0)).unwrap();
        lowest < perm::inversions(&sigma)
    });
    assert!(found);
}

pub fn low_coefficients_are_prefixes() {
    for n in 1..=8 {
        let p = qenum::p_polynomial(n).unwrap();
        let low = qenum::low_coefficients(n, 6, None).unwrap();
        for (k, c) in low.coeffs.iter().enumerate() {
            assert_eq!(*c, p.coeff(k), "n = {n}, k = {k}");
        }
    }
}

pub fn canonical_top_rows_times_orbit_size_is_the_genocchi_median() {
    for n in 1..=8 {
        let canonical = enumeration::canonical_extensions(&Row::identity(n)).unwrap().len();
        assert_eq!(
            BigInt::from(canonical) << (n - 1),
            BigInt::from(dumont::count_dumont(n))
        );
    }
}

// sampler

pub fn sampler_moves_exhaustively() {
    for n in 1..=4 {
        for s in sampler::all_states(n).unwrap() {
            for m in 0..sampler::move_count(n).max(1) {
                if n == 1 {
                    break;
                }
                if let Some(t) = sampler::apply_move(&s, m) {
                    assert!(t.to_triangle().is_valid());
                    assert_eq!(t.psi(), psi_total(&t.to_triangle()).unwrap());
                }
            }
            for i in 1..n {
                let t = sampler::level1_swap(&s, i).unwrap();
                assert_eq!(sampler::level1_swap(&t, i).unwrap(), s);
            }
            for p in 1..2 * n {
                let local = sampler::level2_swap(&s, p).unwrap().is_some();
                let mut top = s.top().to_vec();
                top.swap(p - 1, p);
                let full = Triangle::from_rows(n, vec![s.bottom().to_vec(), top]).is_valid();
                assert_eq!(local, full);
            }
        }
    }
}

pub fn move_graph_is_connected() {
    for n in 1..=4 {
        let r = sampler::connectivity_check(n).unwrap();
        let expected = count_triangles(2, n, true).unwrap().total;
        assert_eq!(BigInt::from(r.reached), BigInt::from(expected));
    }
}

pub fn chain_is_deterministic_and_valid() {
    let cfg = sampler::SamplerConfig {
        n: 7,
        q: 0.6,
        steps: 100_000,
        burn_in: 10,
        thinning: 3,
        seed: 99,
        record_states: false,
    };
    let a = sampler::run(&cfg).unwrap();
    let b = sampler::run(&cfg).unwrap();
    assert_eq!(a.stats, b.stats);
    assert!(a.final_state.to_triangle().is_valid());
}

// randomized checks at sizes too large for exhaustion

fn random_state(n: usize, seed: u64, steps: usize) -> Depth2State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Depth2State::identity(n);
    for _ in 0..steps {
        sampler::mh_step(&mut s, 1.0, &mut rng);
    }
    s
}

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config { failure_persistence: None, ..Config::with_cases(64) },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

pub fn psi_routes_agree_on_random_depth2_states() {
    runner()
        .run(&(2usize..12, any::<u64>()), |(n, seed)| {
            let s = random_state(n, seed, 2_000);
            let b = Row::new(n, 1, s.bottom().to_vec()).unwrap();
            let t = Row::new(n, 2, s.top().to_vec()).unwrap();
            let v = psi_vertex(&b, &t).unwrap();
            prop_assert_eq!(v, psi_formula(&b, &t).unwrap());
            prop_assert_eq!(v, s.psi());
            let vc = psi_vertex(&complement_row(&b), &complement_row(&t)).unwrap();
            prop_assert_eq!(v + vc, binom2(n));
            Ok(())
        })
        .unwrap();
}

pub fn relabeling_keeps_random_states_valid() {
    runner()
        .run(&(2usize..10, any::<u64>(), 0usize..10), |(n, seed, shift)| {
            let s = random_state(n, seed, 1_000).to_triangle();
            let pi: Vec<usize> = (0..n).map(|i| (i + shift) % n + 1).collect();
            prop_assert!(apply_color_permutation(&s, &pi).unwrap().is_valid());
            prop_assert!(model::validate_triangle(&color_complement(&s)).is_ok());
            Ok(())
        })
        .unwrap();
}

pub fn text_and_json_round_trip() {
    runner()
        .run(&(1usize..8, any::<u64>()), |(n, seed)| {
            let t = random_state(n, seed, 500).to_triangle();
            prop_assert_eq!(Triangle::parse(&t.to_text()).unwrap(), t.clone());
            prop_assert_eq!(Triangle::parse(&t.to_json()).unwrap(), t);
            Ok(())
        })
        .unwrap();
}

pub fn polynomial_ring_laws() {
    let coeffs = || proptest::collection::vec(-50i64..50, 0..6);
    runner()
        .run(&(coeffs(), coeffs(), -4i64..4), |(a, b, q)| {
            let (pa, pb) = (QPolynomial::from_i64s(&a), QPolynomial::from_i64s(&b));
            let qv = BigInt::from(q);
            prop_assert_eq!((&pa * &pb).eval_int(&qv), pa.eval_int(&qv) * pb.eval_int(&qv));
            prop_assert_eq!((&pa + &pb).eval_int(&qv), pa.eval_int(&qv) + pb.eval_int(&qv));
            if !pb.is_zero() {
                prop_assert_eq!((&pa * &pb).div_exact(&pb).unwrap(), pa);
            }
            Ok(())
        })
        .unwrap();
}

/// Every check, by name.
// used by the acceptance runner
#[allow(dead_code)]
pub const ALL: &[(&str, fn())] = &[
    ("merged_rows_and_interlacing_match_the_alternation_oracle", merged_rows_and_interlacing_match_the_alternation_oracle),
    ("relabelings_preserve_validity", relabelings_preserve_validity),
    ("boundary_involutions_generate_orbits_of_size_two_to_the_n_minus_one", boundary_involutions_generate_orbits_of_size_two_to_the_n_minus_one),
    ("total_count_is_n_factorial_times_canonical_count", total_count_is_n_factorial_times_canonical_count),
    ("psi_routes_agree_and_complement_reverses", psi_routes_agree_and_complement_reverses),
    ("dumont_count_matches_top_rows_over_the_identity", dumont_count_matches_top_rows_over_the_identity),
    ("q_analogs_specialize_and_differ", q_analogs_specialize_and_differ),
    ("frontier_rows_start_with_one_and_end_with_n", frontier_rows_start_with_one_and_end_with_n),
    ("counting_symmetry_and_divisibility", counting_symmetry_and_divisibility),
    ("q_polynomial_shape", q_polynomial_shape),
    ("h_sigma_complement_specialization_and_lower_bound", h_sigma_complement_specialization_and_lower_bound),
    ("psi_can_fall_below_the_inversion_number", psi_can_fall_below_the_inversion_number),
    ("low_coefficients_are_prefixes", low_coefficients_are_prefixes),
    ("canonical_top_rows_times_orbit_size_is_the_genocchi_median", canonical_top_rows_times_orbit_size_is_the_genocchi_median),
    ("sampler_moves_exhaustively", sampler_moves_exhaustively),
    ("move_graph_is_connected", move_graph_is_connected),
    ("chain_is_deterministic_and_valid", chain_is_deterministic_and_valid),
    ("psi_routes_agree_on_random_depth2_states", psi_routes_agree_on_random_depth2_states),
    ("relabeling_keeps_random_states_valid", relabeling_keeps_random_states_valid),
    ("text_and_json_round_trip", text_and_json_round_trip),
    ("polynomial_ring_laws", polynomial_ring_laws),
];
