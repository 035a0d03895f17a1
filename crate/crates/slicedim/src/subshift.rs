//! Sofic presentation of binary expansions of points on the extended line,
//! admissibility, and the pressure machinery.
//!
//! A point `(x, y)` of the line has `p x - q y` integer. Reading its binary
//! expansion symbol by symbol, the tail pair `(xt, yt)` keeps the integer
//! `m = p xt - q yt` as state, with transitions
//! `m -> 2m - p bx + q by` on the label `(bx, by)`. Tails take `xt` in
//! `[0, 1]` (the all-ones alternate expansion of a dyadic x-coordinate is
//! reachable) and `yt` in `[0, 1)` (canonical), so the states are the
//! integers in `(-q, p]`. Every such state always keeps at least one
//! incoming and one outgoing edge; the trim pass only guards the invariant.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::arith::{BSymbol, SlopeParam};
use crate::cocycle::GENERATOR_TABLES;
use crate::error::{Error, Result};
use crate::spectral::{dominant_perron, ln_biguint, Enclosure};

/// Cap for the partial pressure approximants.
pub const PRESSURE_CAP: usize = 40;

#[derive(Debug, Clone)]
pub struct SubshiftPresentation {
    slope: SlopeParam,
    /// Ascending state labels.
    states: Vec<i64>,
    /// `edges[i][sym] = Some(target index)`.
    edges: Vec<[Option<usize>; 4]>,
}

pub fn build_line_subshift(slope: &SlopeParam) -> SubshiftPresentation {
    let p = slope.p() as i64;
    let q = slope.q() as i64;
    let mut states: Vec<i64> = (-q + 1..=p).collect();
    loop {
        let index: BTreeMap<i64, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let edges: Vec<[Option<usize>; 4]> = states
            .iter()
            .map(|&m| {
                let mut row = [None; 4];
                for b in BSymbol::ALL {
                    let t = 2 * m - p * b.x() as i64 + q * b.y() as i64;
                    row[b.index()] = index.get(&t).copied();
                }
                row
            })
            .collect();
        let mut has_in = vec![false; states.len()];
        let mut has_out = vec![false; states.len()];
        for (i, row) in edges.iter().enumerate() {
            for t in row.iter().flatten() {
                has_out[i] = true;
                has_in[*t] = true;
            }
        }
        let keep: Vec<i64> = states
            .iter()
            .enumerate()
            .filter(|&(i, _)| has_in[i] && has_out[i])
            .map(|(_, &s)| s)
            .collect();
        if keep.len() == states.len() {
            return SubshiftPresentation {
                slope: *slope,
                states,
                edges,
            };
        }
        states = keep;
    }
}

impl SubshiftPresentation {
    pub fn slope(&self) -> &SlopeParam {
        &self.slope
    }

    pub fn states(&self) -> &[i64] {
        &self.states
    }

    /// Labels retained out of a state, in `BSymbol::ALL` order.
    pub fn labels_from(&self, state: i64) -> Vec<BSymbol> {
        let Some(i) = self.states.iter().position(|&s| s == state) else {
            return Vec::new();
        };
        BSymbol::ALL
            .into_iter()
            .filter(|b| self.edges[i][b.index()].is_some())
            .collect()
    }

    /// True when some start state carries the word along retained edges.
    pub fn admissible(&self, z: &[BSymbol]) -> bool {
        let mut alive: Vec<bool> = vec![true; self.states.len()];
        for b in z {
            let mut next = vec![false; self.states.len()];
            let mut any = false;
            for (i, ok) in alive.iter().enumerate() {
                if *ok {
                    if let Some(t) = self.edges[i][b.index()] {
                        next[t] = true;
                        any = true;
                    }
                }
            }
            if !any {
                return false;
            }
            alive = next;
        }
        true
    }

    /// DOT export, nodes in ascending state order.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph line_subshift {\n");
        out.push_str(&format!(
            "  label=\"line subshift p/q = {}\";\n",
            self.slope
        ));
        for &s in &self.states {
            out.push_str(&format!("  \"{s}\";\n"));
        }
        for (i, row) in self.edges.iter().enumerate() {
            for b in BSymbol::ALL {
                if let Some(t) = row[b.index()] {
                    out.push_str(&format!(
                        "  \"{}\" -> \"{}\" [label=\"({},{})\"];\n",
                        self.states[i],
                        self.states[t],
                        b.x(),
                        b.y()
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Word value as the integer `w = p X - q Y` of the MSB-first bit values.
fn word_value(slope: &SlopeParam, z: &[BSymbol]) -> i128 {
    let (mut x, mut y) = (0i128, 0i128);
    for b in z {
        x = 2 * x + b.x() as i128;
        y = 2 * y + b.y() as i128;
    }
    slope.p() as i128 * x - slope.q() as i128 * y
}

/// Exact test whether the closed binary square of the word meets the
/// extended line. On the square, `f = p x - q y` spans
/// `[(w - q) / 2^n, (w + p) / 2^n]`; the square meets the line iff that
/// interval contains an integer.
pub fn geometric_cylinder_test(slope: &SlopeParam, z: &[BSymbol]) -> bool {
    let n = z.len() as u32;
    let w = word_value(slope, z);
    let lo = w - slope.q() as i128;
    let hi = w + slope.p() as i128;
    let step = 1i128 << n;
    ceil_mult(lo, step) <= hi
}

fn ceil_mult(v: i128, step: i128) -> i128 {
    // smallest multiple of step that is >= v
    let d = v.div_euclid(step);
    if d * step >= v {
        d * step
    } else {
        (d + 1) * step
    }
}

/// The square touches the line set only at its f-minimal corner: the single
/// integer level is `w - q`, which needs the all-ones tail in the
/// y-coordinate that the presentation excludes. These are exactly the words
/// where the geometric test and admissibility disagree.
pub fn sole_min_corner_touch(slope: &SlopeParam, z: &[BSymbol]) -> bool {
    let n = z.len() as u32;
    let w = word_value(slope, z);
    let lo = w - slope.q() as i128;
    let hi = w + slope.p() as i128;
    let step = 1i128 << n;
    lo.rem_euclid(step) == 0 && lo + step > hi
}

/// Count of sole-min-corner words at length `n`, by exact enumeration.
pub fn sole_min_corner_count(slope: &SlopeParam, n: usize) -> u64 {
    let mut count = 0u64;
    let mut word = vec![BSymbol::ZeroZero; n];
    fn rec(slope: &SlopeParam, word: &mut Vec<BSymbol>, depth: usize, n: usize, count: &mut u64) {
        if depth == n {
            if sole_min_corner_touch(slope, word) {
                *count += 1;
            }
            return;
        }
        for b in BSymbol::ALL {
            word[depth] = b;
            rec(slope, word, depth + 1, n, count);
        }
    }
    rec(slope, &mut word, 0, n, &mut count);
    count
}

/// Finite-n pressure approximants and the spectral value.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureEstimate {
    pub n: Option<usize>,
    /// `(1/n) log sum over admissible words of 1 A_z e1`.
    pub lower_approximant: Option<f64>,
    /// `(1/n) log sum over admissible words of 1 A_z 1`.
    pub sum_approximant: Option<f64>,
    /// Log Perron value of the tensor transfer operator.
    pub spectral: Option<Enclosure>,
}

/// Exact big-integer word sums, deduplicated.
///
/// The presentation is deterministic and co-deterministic per label, so the
/// set of end states of a word's carriers evolves by a map of subsets; the DP
/// keyed by that subset sums `1 A_z` over distinct words only. Subsets spread
/// apart under doubling and collapse to singletons within `log2(p + q)`
/// steps, so the profile family stays small.
fn admissible_word_sums(slope: &SlopeParam, n: usize) -> (BigUint, BigUint) {
    let shift = build_line_subshift(slope);
    let p = slope.p() as i64;
    let q = slope.q() as i64;
    let in_range = |m: i64| -q < m && m <= p;
    type Vec4 = [BigUint; 4];
    let ones = || -> Vec4 { std::array::from_fn(|_| BigUint::one()) };
    let mut dp: BTreeMap<Vec<i64>, Vec4> = BTreeMap::new();
    dp.insert(shift.states().to_vec(), ones());
    for _ in 0..n {
        let mut next: BTreeMap<Vec<i64>, Vec4> = BTreeMap::new();
        for (profile, vec) in &dp {
            for b in BSymbol::ALL {
                let mut targets: Vec<i64> = profile
                    .iter()
                    .map(|&m| 2 * m - p * b.x() as i64 + q * b.y() as i64)
                    .filter(|&t| in_range(t))
                    .collect();
                targets.sort_unstable();
                targets.dedup();
                if targets.is_empty() {
                    continue;
                }
                let g = &GENERATOR_TABLES[b.index()];
                let slot = next
                    .entry(targets)
                    .or_insert_with(|| std::array::from_fn(|_| BigUint::zero()));
                for j in 0..4 {
                    for i in 0..4 {
                        if g[i][j] > 0 {
                            slot[j] += &vec[i] * BigUint::from(g[i][j]);
                        }
                    }
                }
            }
        }
        dp = next;
    }
    let mut first_col = BigUint::zero();
    let mut total = BigUint::zero();
    for vec in dp.values() {
        first_col += &vec[0];
        total += vec.iter().sum::<BigUint>();
    }
    (first_col, total)
}

pub fn pressure_partial(slope: &SlopeParam, n: usize) -> Result<PressureEstimate> {
    if n == 0 || n > PRESSURE_CAP {
        return Err(Error::CapExceeded {
            what: "pressure_partial",
            requested: n,
            cap: PRESSURE_CAP,
        });
    }
    let (first_col, total) = admissible_word_sums(slope, n);
    Ok(PressureEstimate {
        n: Some(n),
        lower_approximant: Some(ln_biguint(&first_col) / n as f64),
        sum_approximant: Some(ln_biguint(&total) / n as f64),
        spectral: None,
    })
}

/// Log Perron value of the tensor operator on (state x simplex index),
/// certified on the dominant component.
pub fn spectral_pressure(slope: &SlopeParam) -> PressureEstimate {
    let shift = build_line_subshift(slope);
    let k = shift.states.len();
    let mut mat = vec![vec![0.0f64; 4 * k]; 4 * k];
    for (s, row) in shift.edges.iter().enumerate() {
        for b in BSymbol::ALL {
            if let Some(t) = row[b.index()] {
                let g = &GENERATOR_TABLES[b.index()];
                for i in 0..4 {
                    for j in 0..4 {
                        mat[s * 4 + i][t * 4 + j] += g[i][j] as f64;
                    }
                }
            }
        }
    }
    let enc =
        dominant_perron(&mat, 1e-9, 100_000).expect("tensor operator power iteration converges");
    PressureEstimate {
        n: None,
        lower_approximant: None,
        sum_approximant: None,
        spectral: Some(enc.log()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapCheck {
    pub overlap_growth: Enclosure,
    pub pressure: Enclosure,
    pub ok: bool,
}

/// Runtime check of `N <= P` with slack 1e-6.
pub fn pressure_gap_check(slope: &SlopeParam) -> Result<GapCheck> {
    let automaton = crate::automaton::build_overlap_automaton(slope);
    let n_enc = automaton.overlap_growth(1e-9, 100_000)?;
    let p_enc = spectral_pressure(slope).spectral.unwrap();
    Ok(GapCheck {
        ok: n_enc.upper <= p_enc.lower + 1e-6,
        overlap_growth: n_enc,
        pressure: p_enc,
    })
}

/// CSV of `(n, L_n, S_n)` for `n = 1..=n_max`, fixed column order.
pub fn pressure_csv(slope: &SlopeParam, n_max: usize) -> Result<String> {
    let mut out = String::from("n,lower_approximant,sum_approximant\n");
    for n in 1..=n_max {
        let est = pressure_partial(slope, n)?;
        out.push_str(&format!(
            "{},{:.9},{:.9}\n",
            n,
            est.lower_approximant.unwrap(),
            est.sum_approximant.unwrap()
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{cocycle_product, enumerate_exact_words};

    fn slope(p: u64, q: u64) -> SlopeParam {
        SlopeParam::new(p, q).unwrap()
    }

    fn b(x: u8, y: u8) -> BSymbol {
        BSymbol::new(x, y).unwrap()
    }

    #[test]
    fn presentation_for_diagonal_slope() {
        let s = build_line_subshift(&slope(1, 1));
        assert_eq!(s.states(), &[0, 1]);
        assert_eq!(s.labels_from(0), vec![b(0, 0), b(0, 1), b(1, 1)]);
        assert_eq!(s.labels_from(1), vec![b(1, 0)]);
    }

    #[test]
    fn presentation_for_half_slope() {
        let s = build_line_subshift(&slope(1, 2));
        assert_eq!(s.states(), &[-1, 0, 1]);
        assert_eq!(s.labels_from(0), vec![b(0, 0), b(1, 0), b(1, 1)]);
    }

    #[test]
    fn zero_state_present_with_self_loop() {
        for (p, q) in [(1, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 12)] {
            let s = build_line_subshift(&slope(p, q));
            assert!(s.states().contains(&0));
            assert!(s.labels_from(0).contains(&b(0, 0)));
        }
    }

    #[test]
    fn admissibility_examples() {
        let s = build_line_subshift(&slope(1, 2));
        for sym in BSymbol::ALL {
            assert!(s.admissible(&[sym]));
        }
        let s = build_line_subshift(&slope(1, 1));
        assert!(s.admissible(&[b(1, 0)]));
        assert!(s.admissible(&[]));
    }

    #[test]
    fn geometric_examples() {
        let s12 = slope(1, 2);
        assert!(geometric_cylinder_test(&s12, &[b(0, 0); 4]));
        assert!(geometric_cylinder_test(&s12, &[b(1, 1)]));
        // [1/2,1) x [0,1/2) for p/q = 1: corner touch only, still true
        let s11 = slope(1, 1);
        assert!(geometric_cylinder_test(&s11, &[b(1, 0)]));
        assert!(!sole_min_corner_touch(&s11, &[b(1, 0)]));
        // touching only the excluded corner first happens at n = 2, where
        // the square [1/4,1/2] x [0,1/4] meets y = x only at its top-left
        // corner (1/4, 1/4)
        let w = [b(0, 0), b(1, 0)];
        assert!(sole_min_corner_touch(&s11, &w));
        assert!(geometric_cylinder_test(&s11, &w));
        assert!(!build_line_subshift(&s11).admissible(&w));
        // no sole-corner words exist while 2^n <= p + q
        assert_eq!(sole_min_corner_count(&s11, 1), 0);
    }

    #[test]
    fn cross_validation_with_corner_accounting() {
        for (p, q) in [(1, 1), (1, 2), (1, 3), (2, 3)] {
            let s = slope(p, q);
            let shift = build_line_subshift(&s);
            for n in 1..=6usize {
                let mut mismatches = 0u64;
                let mut word = vec![BSymbol::ZeroZero; n];
                fn rec(
                    shift: &SubshiftPresentation,
                    s: &SlopeParam,
                    word: &mut Vec<BSymbol>,
                    depth: usize,
                    n: usize,
                    mismatches: &mut u64,
                ) {
                    if depth == n {
                        let a = shift.admissible(word);
                        let g = geometric_cylinder_test(s, word);
                        if a != g {
                            assert!(g && !a, "admissible word failed the geometric test");
                            assert!(sole_min_corner_touch(s, word));
                            *mismatches += 1;
                        } else {
                            assert!(
                                !(a && sole_min_corner_touch(s, word)),
                                "sole-min-corner word should not be admissible"
                            );
                        }
                        return;
                    }
                    for bsym in BSymbol::ALL {
                        word[depth] = bsym;
                        rec(shift, s, word, depth + 1, n, mismatches);
                    }
                }
                rec(&shift, &s, &mut word, 0, n, &mut mismatches);
                assert_eq!(mismatches, sole_min_corner_count(&s, n));
            }
        }
    }

    #[test]
    fn exact_words_are_admissible() {
        for (p, q) in [(1, 2), (2, 3), (3, 4)] {
            let s = slope(p, q);
            let shift = build_line_subshift(&s);
            for n in 1..=7 {
                for z in enumerate_exact_words(&s, n).unwrap().words {
                    assert!(shift.admissible(&z));
                }
            }
        }
    }

    #[test]
    fn partial_pressure_examples() {
        // p/q = 1, n = 1: four admissible words, each carried once
        let est = pressure_partial(&slope(1, 1), 1).unwrap();
        assert!((est.sum_approximant.unwrap() - 36f64.ln()).abs() < 1e-12);

        // L2 >= (1/2) log 13 because Z_2 contributes its e1 weights
        let est = pressure_partial(&slope(1, 2), 2).unwrap();
        assert!(est.lower_approximant.unwrap() >= 13f64.ln() / 2.0 - 1e-12);

        for (p, q) in [(1, 1), (1, 2), (2, 3)] {
            for n in 1..=8 {
                let est = pressure_partial(&slope(p, q), n).unwrap();
                assert!(est.lower_approximant.unwrap() <= est.sum_approximant.unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn partial_sums_match_brute_enumeration() {
        for (p, q) in [(1, 1), (1, 2), (2, 3)] {
            let s = slope(p, q);
            let shift = build_line_subshift(&s);
            for n in 1..=6usize {
                let mut first = BigUint::zero();
                let mut total = BigUint::zero();
                let mut word = vec![BSymbol::ZeroZero; n];
                fn rec(
                    shift: &SubshiftPresentation,
                    word: &mut Vec<BSymbol>,
                    depth: usize,
                    n: usize,
                    first: &mut BigUint,
                    total: &mut BigUint,
                ) {
                    if depth == n {
                        if shift.admissible(word) {
                            let m = cocycle_product(word);
                            *first += m.weight_e1();
                            *total += m.weight_total();
                        }
                        return;
                    }
                    for bsym in BSymbol::ALL {
                        word[depth] = bsym;
                        rec(shift, word, depth + 1, n, first, total);
                    }
                }
                rec(&shift, &mut word, 0, n, &mut first, &mut total);
                let (dp_first, dp_total) = admissible_word_sums(&s, n);
                assert_eq!(first, dp_first);
                assert_eq!(total, dp_total);
            }
        }
    }

    #[test]
    fn max_column_sandwich() {
        // |S_n - U_n| <= log 4 / n with U_n the max-column variant
        for (p, q) in [(1, 2), (2, 3)] {
            let s = slope(p, q);
            let shift = build_line_subshift(&s);
            for n in 1..=6usize {
                let mut max_col_sum = 0f64;
                let mut word = vec![BSymbol::ZeroZero; n];
                fn rec(
                    shift: &SubshiftPresentation,
                    word: &mut Vec<BSymbol>,
                    depth: usize,
                    n: usize,
                    acc: &mut f64,
                ) {
                    if depth == n {
                        if shift.admissible(word) {
                            let m = cocycle_product(word);
                            let best = m
                                .column_sums()
                                .iter()
                                .map(|c| u64::try_from(c.clone()).unwrap())
                                .max()
                                .unwrap();
                            *acc += best as f64;
                        }
                        return;
                    }
                    for bsym in BSymbol::ALL {
                        word[depth] = bsym;
                        rec(shift, word, depth + 1, n, acc);
                    }
                }
                rec(&shift, &mut word, 0, n, &mut max_col_sum);
                let s_n = pressure_partial(&s, n).unwrap().sum_approximant.unwrap();
                let u_n = max_col_sum.ln() / n as f64;
                assert!((s_n - u_n).abs() <= 4f64.ln() / n as f64 + 1e-12);
            }
        }
    }

    #[test]
    fn spectral_values() {
        let est = spectral_pressure(&slope(1, 1));
        let enc = est.spectral.unwrap();
        assert!(enc.contains(5f64.ln()));
        assert!(enc.width() <= 1e-9);

        // spectral >= overlap growth (runtime form of the pressure bound)
        let enc12 = spectral_pressure(&slope(1, 2)).spectral.unwrap();
        let expect = ((5.0 + 17f64.sqrt()) / 2.0).ln();
        assert!(enc12.upper >= expect - 1e-9);

        for (p, q) in [(1, 3), (2, 3), (3, 4)] {
            let enc = spectral_pressure(&slope(p, q)).spectral.unwrap();
            assert!(enc.upper >= 3f64.ln());
        }
    }

    #[test]
    fn gap_checks() {
        for (p, q) in [(1, 1), (1, 2), (1, 3), (2, 3)] {
            let g = pressure_gap_check(&slope(p, q)).unwrap();
            assert!(g.ok, "p/q = {p}/{q}: {g:?}");
        }
        let g = pressure_gap_check(&slope(1, 1)).unwrap();
        assert!(g.overlap_growth.contains(5f64.ln()));
        assert!(g.pressure.contains(5f64.ln()));
    }

    #[test]
    fn approximants_approach_spectral() {
        let s = slope(1, 2);
        let p = spectral_pressure(&s).spectral.unwrap().midpoint();
        let s10 = pressure_partial(&s, 10).unwrap().sum_approximant.unwrap();
        let s40 = pressure_partial(&s, 40).unwrap().sum_approximant.unwrap();
        assert!((s40 - p).abs() <= (s10 - p).abs() + 1e-9);
    }

    #[test]
    fn dot_export() {
        let s = build_line_subshift(&slope(1, 1));
        let dot = s.to_dot();
        assert!(dot.contains("\"0\" -> \"1\" [label=\"(0,1)\"]"));
        assert!(!dot.contains("\"-1\""));
    }
}
