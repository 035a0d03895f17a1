//! The weighted overlap automaton on scaled remainders.
//!
//! States are `j in {-q+1, ..., q-1}`; the edge weight from `a` to `b` counts
//! the digit pairs `(x, y) in D x D` with `2a + (xs - ys) = b` in scaled
//! form. Targets outside the state range are dropped: once `|j| >= q` the
//! doubling forces `|2j + delta| >= q` for every digit step, so escaped pairs
//! never collide again. Weighted `0 -> 0` paths of length `n` count exactly
//! the ordered overlapping pairs `N_n`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::arith::{DSymbol, SlopeParam};
use crate::error::{Error, Result};
use crate::spectral::{perron_enclosure_irreducible, strongly_connected_components, Enclosure};

#[derive(Debug, Clone)]
pub struct OverlapAutomaton {
    slope: SlopeParam,
    /// Dense weights, index `j + q - 1`.
    weights: Vec<Vec<u32>>,
}

pub fn build_overlap_automaton(slope: &SlopeParam) -> OverlapAutomaton {
    let q = slope.q() as i64;
    let dim = (2 * q - 1) as usize;
    let mut weights = vec![vec![0u32; dim]; dim];
    for a in -q + 1..q {
        for x in DSymbol::ALL {
            for y in DSymbol::ALL {
                let b = 2 * a + x.scaled(slope) - y.scaled(slope);
                if -q < b && b < q {
                    weights[(a + q - 1) as usize][(b + q - 1) as usize] += 1;
                }
            }
        }
    }
    OverlapAutomaton {
        slope: *slope,
        weights,
    }
}

impl OverlapAutomaton {
    pub fn slope(&self) -> &SlopeParam {
        &self.slope
    }

    pub fn state_count(&self) -> usize {
        self.weights.len()
    }

    /// States in ascending order.
    pub fn states(&self) -> impl Iterator<Item = i64> + '_ {
        let q = self.slope.q() as i64;
        -q + 1..q
    }

    pub fn weight(&self, a: i64, b: i64) -> u32 {
        let q = self.slope.q() as i64;
        if a.abs() >= q || b.abs() >= q {
            return 0;
        }
        self.weights[(a + q - 1) as usize][(b + q - 1) as usize]
    }

    /// Transition probability `w(a, b) / 9`.
    pub fn probability(&self, a: i64, b: i64) -> f64 {
        self.weight(a, b) as f64 / 9.0
    }

    fn zero_index(&self) -> usize {
        self.slope.q() as usize - 1
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        self.weights
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &w)| w > 0)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect()
    }

    /// Every state reachable from every state along positive-weight edges.
    pub fn strong_connectivity(&self) -> bool {
        strongly_connected_components(&self.adjacency()).len() == 1
    }

    /// `(W^n)[0, 0]` by exact big-integer vector iteration.
    pub fn count_via_paths(&self, n: usize) -> BigUint {
        let dim = self.state_count();
        let z = self.zero_index();
        let mut v = vec![BigUint::zero(); dim];
        v[z] = BigUint::one();
        for _ in 0..n {
            let mut next = vec![BigUint::zero(); dim];
            for (i, vi) in v.iter().enumerate() {
                if vi.is_zero() {
                    continue;
                }
                for (j, &w) in self.weights[i].iter().enumerate() {
                    if w > 0 {
                        next[j] += vi * BigUint::from(w);
                    }
                }
            }
            v = next;
        }
        std::mem::take(&mut v[z])
    }

    /// Enclosure of the overlap growth rate `N = log rho(W)` in nats.
    pub fn overlap_growth(&self, tol: f64, max_iter: usize) -> Result<Enclosure> {
        if !self.strong_connectivity() {
            return Err(Error::NotIrreducible);
        }
        let mat: Vec<Vec<f64>> = self
            .weights
            .iter()
            .map(|row| row.iter().map(|&w| w as f64).collect())
            .collect();
        Ok(perron_enclosure_irreducible(&mat, tol, max_iter)?.log())
    }

    /// `(c_l, c_r)` with `c_l mu~ <= mu <= c_r mu~`: `c_r = 1` and `c_l` the
    /// smallest ratio of the start-at-0 step probability to the total
    /// in-probability, over targets of state 0.
    pub fn equivalence_constants(&self) -> (f64, f64) {
        let z = self.zero_index();
        let mut c_l = 1.0f64;
        for (s, &w0s) in self.weights[z].iter().enumerate() {
            if w0s == 0 {
                continue;
            }
            let col_sum: u32 = self.weights.iter().map(|row| row[s]).sum();
            c_l = c_l.min(w0s as f64 / col_sum as f64);
        }
        (c_l, 1.0)
    }

    /// DOT export, nodes in ascending state order, edges labelled `w=k`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph overlap_automaton {\n");
        out.push_str(&format!(
            "  label=\"overlap automaton p/q = {}\";\n",
            self.slope
        ));
        for a in self.states() {
            out.push_str(&format!("  \"{a}\";\n"));
        }
        for a in self.states() {
            for b in self.states() {
                let w = self.weight(a, b);
                if w > 0 {
                    out.push_str(&format!("  \"{a}\" -> \"{b}\" [label=\"w={w}\"];\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn slope(p: u64, q: u64) -> SlopeParam {
        SlopeParam::new(p, q).unwrap()
    }

    #[test]
    fn single_state_for_p_equals_q() {
        let a = build_overlap_automaton(&slope(1, 1));
        assert_eq!(a.state_count(), 1);
        assert_eq!(a.weight(0, 0), 5);
    }

    #[test]
    fn half_slope_weights() {
        let a = build_overlap_automaton(&slope(1, 2));
        assert_eq!(a.weight(0, 0), 3);
        assert_eq!(a.weight(0, 1), 2);
        assert_eq!(a.weight(0, -1), 2);
        assert_eq!(a.weight(1, 0), 1);
        assert_eq!(a.weight(-1, 0), 1);
        assert_eq!(a.weight(1, 1), 2);
        assert_eq!(a.weight(-1, -1), 2);
        assert_eq!(a.weight(1, -1), 0);
    }

    #[test]
    fn diagonal_weight_is_three_when_p_lt_q() {
        for (p, q) in [(1, 2), (1, 3), (2, 3), (3, 4), (2, 5)] {
            let a = build_overlap_automaton(&slope(p, q));
            assert_eq!(a.weight(0, 0), 3);
        }
    }

    #[test]
    fn weight_symmetry() {
        for (p, q) in [(1, 2), (1, 3), (2, 3), (3, 4), (4, 5)] {
            let a = build_overlap_automaton(&slope(p, q));
            for s in a.states() {
                for t in a.states() {
                    assert_eq!(a.weight(s, t), a.weight(-s, -t));
                }
            }
        }
    }

    #[test]
    fn out_weight_never_exceeds_the_nine_digit_pairs() {
        for (p, q) in [(1, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 12)] {
            let a = build_overlap_automaton(&slope(p, q));
            for s in a.states() {
                let total: u32 = a.states().map(|t| a.weight(s, t)).sum();
                assert!(total <= 9);
            }
        }
    }

    #[test]
    fn strongly_connected_small_sweep() {
        for q in 1..=20u64 {
            for p in 1..=q {
                if num_integer::gcd(p, q) != 1 {
                    continue;
                }
                let a = build_overlap_automaton(&slope(p, q));
                assert!(a.strong_connectivity(), "p/q = {p}/{q}");
            }
        }
    }

    #[test]
    fn path_counts() {
        let a = build_overlap_automaton(&slope(1, 2));
        assert_eq!(a.count_via_paths(1), BigUint::from(3u32));
        assert_eq!(a.count_via_paths(2), BigUint::from(13u32));
        let a = build_overlap_automaton(&slope(1, 1));
        assert_eq!(a.count_via_paths(4), BigUint::from(625u32));
    }

    #[test]
    fn path_counts_match_oracle() {
        for (p, q) in [(1, 1), (1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (2, 5)] {
            let s = slope(p, q);
            let a = build_overlap_automaton(&s);
            for n in 1..=8 {
                assert_eq!(
                    a.count_via_paths(n),
                    oracle::overlap_count_exact(&s, n).unwrap(),
                    "p/q = {p}/{q}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn growth_values() {
        let a = build_overlap_automaton(&slope(1, 1));
        let enc = a.overlap_growth(1e-9, 100_000).unwrap();
        assert_eq!(enc.lower, 5f64.ln());
        assert_eq!(enc.upper, 5f64.ln());

        let a = build_overlap_automaton(&slope(1, 2));
        let enc = a.overlap_growth(1e-9, 100_000).unwrap();
        let expect = ((5.0 + 17f64.sqrt()) / 2.0).ln();
        assert!(enc.contains(expect));
        assert!(enc.width() <= 1e-9);

        // N >= log 3 for any slope (diagonal pairs alone)
        for (p, q) in [(1, 3), (2, 3), (3, 4), (2, 5)] {
            let a = build_overlap_automaton(&slope(p, q));
            assert!(a.overlap_growth(1e-9, 100_000).unwrap().upper >= 3f64.ln());
        }
    }

    #[test]
    fn growth_vs_finite_counts() {
        // (1/n) log N_n within the enclosure widened by 2/n
        for (p, q) in [(1, 2), (1, 3), (2, 3)] {
            let a = build_overlap_automaton(&slope(p, q));
            let enc = a.overlap_growth(1e-9, 100_000).unwrap();
            for n in [20usize, 32] {
                let c = a.count_via_paths(n);
                let rate = crate::spectral::ln_biguint(&c) / n as f64;
                let widen = 2.0 / n as f64;
                assert!(rate >= enc.lower - widen && rate <= enc.upper + widen);
            }
        }
    }

    #[test]
    fn equivalence_constant_examples() {
        let a = build_overlap_automaton(&slope(1, 1));
        assert_eq!(a.equivalence_constants(), (1.0, 1.0));
        let a = build_overlap_automaton(&slope(1, 2));
        let (c_l, c_r) = a.equivalence_constants();
        assert_eq!(c_r, 1.0);
        assert!((c_l - 0.5).abs() < 1e-12);
        for (p, q) in [(1, 3), (2, 3), (3, 4), (2, 5)] {
            let a = build_overlap_automaton(&slope(p, q));
            assert!(a.equivalence_constants().0 > 0.0);
        }
    }

    #[test]
    fn escape_property() {
        // outside the state range, every digit step keeps |j| >= q
        for (p, q) in [(1, 2), (2, 3), (3, 5)] {
            let s = slope(p, q);
            let qi = q as i64;
            for j in [-3 * qi, -qi, qi, qi + 1, 2 * qi] {
                for x in DSymbol::ALL {
                    for y in DSymbol::ALL {
                        let j2 = 2 * j + x.scaled(&s) - y.scaled(&s);
                        assert!(j2.abs() >= qi);
                    }
                }
            }
        }
    }

    #[test]
    fn dot_export_is_stable() {
        let a = build_overlap_automaton(&slope(1, 1));
        let dot = a.to_dot();
        assert!(dot.contains("\"0\" -> \"0\" [label=\"w=5\"]"));
        assert!(dot.starts_with("digraph overlap_automaton {"));
    }
}
