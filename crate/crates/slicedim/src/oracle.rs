//! Brute-force enumeration over `D^n`, the ground truth every fast path is
//! checked against. Not a performance path.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::arith::{DSymbol, DWord, SlopeParam};
use crate::error::{Error, Result};

/// Exhaustive enumeration cap; 3^10 words, counting stays class-based.
pub const BRUTE_CAP: usize = 10;
/// The self-similarity probe only streams word values, so it affords a
/// deeper level.
pub const SELFSIM_CAP: usize = 12;

/// Partition of `D^n` by exact value. Keys are numerators over `q * 2^n`.
#[derive(Debug, Clone)]
pub struct CollisionTable {
    pub n: usize,
    pub classes: BTreeMap<i64, Vec<DWord>>,
}

impl CollisionTable {
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.classes.values().map(|v| v.len()).collect();
        sizes.sort_unstable();
        sizes
    }

    pub fn total_words(&self) -> usize {
        self.classes.values().map(|v| v.len()).sum()
    }
}

fn check_cap(what: &'static str, n: usize) -> Result<()> {
    if n > BRUTE_CAP {
        return Err(Error::CapExceeded {
            what,
            requested: n,
            cap: BRUTE_CAP,
        });
    }
    Ok(())
}

pub fn collision_classes(slope: &SlopeParam, n: usize) -> Result<CollisionTable> {
    check_cap("collision_classes", n)?;
    let mut classes: BTreeMap<i64, Vec<DWord>> = BTreeMap::new();
    let mut word = vec![DSymbol::Zero; n];
    enumerate(slope, n, 0, 0, &mut word, &mut |value, w| {
        classes.entry(value).or_default().push(w.to_vec());
    });
    Ok(CollisionTable { n, classes })
}

fn enumerate(
    slope: &SlopeParam,
    n: usize,
    depth: usize,
    acc: i64,
    word: &mut [DSymbol],
    sink: &mut impl FnMut(i64, &[DSymbol]),
) {
    if depth == n {
        sink(acc, word);
        return;
    }
    for d in DSymbol::ALL {
        word[depth] = d;
        enumerate(slope, n, depth + 1, 2 * acc + d.scaled(slope), word, sink);
    }
}

/// `N_n(D, F) = sum over classes of |c|^2`, the exact ordered-pair count.
pub fn overlap_count_exact(slope: &SlopeParam, n: usize) -> Result<BigUint> {
    check_cap("overlap_count_exact", n)?;
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    let mut word = vec![DSymbol::Zero; n];
    enumerate(slope, n, 0, 0, &mut word, &mut |value, _| {
        *counts.entry(value).or_insert(0) += 1;
    });
    let mut total = BigUint::zero();
    for &c in counts.values() {
        total += BigUint::from(c) * BigUint::from(c);
    }
    Ok(total)
}

/// `H_n = n log 3 - sum (|c| / 3^n) log |c|` in nats.
pub fn rw_entropy_term(slope: &SlopeParam, n: usize) -> Result<f64> {
    let table = collision_classes(slope, n)?;
    let total = 3f64.powi(n as i32);
    let mut h = n as f64 * 3f64.ln();
    for class in table.classes.values() {
        let c = class.len() as f64;
        h -= c / total * c.ln();
    }
    Ok(h)
}

/// Half-open dyadic interval `[numer / 2^gen, (numer + 1) / 2^gen)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicInterval {
    pub numer: u64,
    pub generation: u32,
}

impl DyadicInterval {
    /// Endpoints as numerators over `2^generation`.
    fn bounds(&self) -> (i128, i128, u32) {
        (self.numer as i128, self.numer as i128 + 1, self.generation)
    }
}

/// Level-n empirical mass of `[lo, hi)` with bounds given as numerators over
/// `q * 2^n * 2^gen`; word values are numerators over `q * 2^n`.
fn empirical_mass(slope: &SlopeParam, n: usize, lo: i128, hi: i128, gen: u32) -> f64 {
    let mut hits: u64 = 0;
    let mut word = vec![DSymbol::Zero; n];
    enumerate(slope, n, 0, 0, &mut word, &mut |value, _| {
        let v = (value as i128) << gen;
        if lo <= v && v < hi {
            hits += 1;
        }
    });
    hits as f64 / 3f64.powi(n as i32)
}

/// Residual of the self-similarity identity
/// `mu(A) = 1/3 (mu(2A) + mu(2A - 1) + mu(2A - p/q))`
/// between the level-n and level-(n-1) empirical approximants.
///
/// The approximants satisfy the identity exactly on half-open intervals, so
/// this is a correctness probe for the enumeration itself.
pub fn selfsim_residual(slope: &SlopeParam, interval: DyadicInterval, n: usize) -> Result<f64> {
    if n == 0 || n > SELFSIM_CAP {
        return Err(Error::CapExceeded {
            what: "selfsim_residual",
            requested: n,
            cap: SELFSIM_CAP,
        });
    }
    let (lo, hi, gen) = interval.bounds();
    let q = slope.q() as i128;
    // scale interval bounds to numerators over q * 2^n * 2^gen
    let lhs = {
        let scale = q << n;
        empirical_mass(slope, n, lo * scale, hi * scale, gen)
    };
    let mut rhs = 0.0;
    let scale = q << (n - 1);
    for d in DSymbol::ALL {
        // 2A - d, with d = ds / q
        let ds = d.scaled(slope) as i128;
        let shift = (ds << gen) << (n - 1);
        rhs += empirical_mass(
            slope,
            n - 1,
            2 * lo * scale - shift,
            2 * hi * scale - shift,
            gen,
        );
    }
    rhs /= 3.0;
    Ok((lhs - rhs).abs())
}

/// Overlap count recomputed from the remainder calculus, `|{(a,b): R_n = 0}|`.
/// Test-support cross check against the class-based count.
pub fn overlap_count_via_remainders(slope: &SlopeParam, n: usize) -> Result<BigUint> {
    check_cap("overlap_count_via_remainders", n)?;
    // DP over scaled remainder value
    use std::collections::HashMap;
    let mut dist: HashMap<i128, BigUint> = HashMap::new();
    dist.insert(0, BigUint::from(1u32));
    let q = slope.q() as i128;
    for _ in 0..n {
        let mut next: HashMap<i128, BigUint> = HashMap::new();
        for (j, ways) in dist {
            for x in DSymbol::ALL {
                for y in DSymbol::ALL {
                    let j2 = 2 * j + (x.scaled(slope) - y.scaled(slope)) as i128;
                    if j2.unsigned_abs() <= (q - 1) as u128 {
                        *next.entry(j2).or_insert_with(BigUint::zero) += ways.clone();
                    }
                }
            }
        }
        dist = next;
    }
    Ok(dist.remove(&0).unwrap_or_else(BigUint::zero))
}
