//! The fixed 4x4 transfer matrices, their products along two-dimensional
//! binary words, the exact-overlap word set `Z_n`, and the potential built
//! from log-ratios of weighted products.
//!
//! Matrix subscripts follow the index order of [`BSymbol::ALL`]; the symbol's
//! second coordinate is negated when reading the subscript, so `(0,1)` names
//! the matrix usually written with subscript `(0,-1)`. Products are forward,
//! `A_z = A_{z_1} ... A_{z_n}`. The exact pair-counting identity these
//! matrices support pins the start state and matches end states to word
//! values; see [`count_via_cocycle`].

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{BSymbol, BWord, SlopeParam};
use crate::error::{Error, Result};
use crate::spectral::ln_biguint;

/// Generator entries; rows/cols in the order of [`BSymbol::ALL`].
pub const GENERATOR_TABLES: [[[u32; 4]; 4]; 4] = [
    // (0,0)
    [[3, 1, 1, 1], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
    // (1,0)
    [[1, 0, 1, 0], [1, 3, 0, 1], [0, 0, 0, 0], [0, 0, 1, 1]],
    // (0,1), written (0,-1) in subscript form
    [[1, 1, 0, 0], [0, 0, 0, 0], [1, 0, 3, 1], [0, 1, 0, 1]],
    // (1,1), written (1,-1) in subscript form
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [1, 1, 1, 3]],
];

/// 4x4 non-negative matrix with exact entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferMatrix4(pub [[BigUint; 4]; 4]);

impl TransferMatrix4 {
    pub fn zero() -> Self {
        TransferMatrix4(std::array::from_fn(|_| {
            std::array::from_fn(|_| BigUint::zero())
        }))
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = BigUint::one();
        }
        m
    }

    fn from_table(t: &[[u32; 4]; 4]) -> Self {
        TransferMatrix4(std::array::from_fn(|i| {
            std::array::from_fn(|j| BigUint::from(t[i][j]))
        }))
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigUint {
        &self.0[i][j]
    }

    pub fn mul(&self, rhs: &TransferMatrix4) -> TransferMatrix4 {
        let mut out = Self::zero();
        for i in 0..4 {
            for k in 0..4 {
                if self.0[i][k].is_zero() {
                    continue;
                }
                for j in 0..4 {
                    if !rhs.0[k][j].is_zero() {
                        out.0[i][j] += &self.0[i][k] * &rhs.0[k][j];
                    }
                }
            }
        }
        out
    }

    pub fn column_sums(&self) -> [BigUint; 4] {
        std::array::from_fn(|j| (0..4).map(|i| self.0[i][j].clone()).sum())
    }

    /// `1 . M . e1`, the first-column sum.
    pub fn weight_e1(&self) -> BigUint {
        (0..4).map(|i| self.0[i][0].clone()).sum()
    }

    /// `1 . M . 1`, the total entry sum.
    pub fn weight_total(&self) -> BigUint {
        self.0.iter().flatten().sum()
    }

    /// Divide all entries by their common gcd (no-op for the zero matrix).
    pub fn reduce(&mut self) {
        let mut g = BigUint::zero();
        for e in self.0.iter().flatten() {
            g = g.gcd(e);
        }
        if g > BigUint::one() {
            for e in self.0.iter_mut().flatten() {
                *e /= &g;
            }
        }
    }
}

/// The generator attached to a symbol.
pub fn a_matrix(a: BSymbol) -> TransferMatrix4 {
    TransferMatrix4::from_table(&GENERATOR_TABLES[a.index()])
}

/// Ordered product `A_{z_1} ... A_{z_n}`; the empty product is the identity.
pub fn cocycle_product(z: &[BSymbol]) -> TransferMatrix4 {
    let mut acc = TransferMatrix4::identity();
    for &s in z {
        acc = acc.mul(&a_matrix(s));
    }
    acc
}

/// Cap for materializing `Z_n`; the set grows exponentially.
pub const ENUMERATION_CAP: usize = 24;
/// Cap for the counting DP (linear in `n`).
pub const COUNT_CAP: usize = 4096;

/// All `z in B^n` with `p X - q Y = 0`, where `X, Y` are the MSB-first
/// integer values of the two binary coordinates.
#[derive(Debug, Clone)]
pub struct ExactWordSet {
    pub n: usize,
    pub words: Vec<BWord>,
}

/// DP state range for intermediate values `w = p X_k - q Y_k` that can still
/// return to zero: outside `(-p, q)` the value is trapped on its sign.
fn state_range(slope: &SlopeParam) -> (i64, i64) {
    (-(slope.p() as i64) + 1, slope.q() as i64 - 1)
}

fn step(slope: &SlopeParam, w: i64, b: BSymbol) -> i64 {
    2 * w + slope.p() as i64 * b.x() as i64 - slope.q() as i64 * b.y() as i64
}

pub fn enumerate_exact_words(slope: &SlopeParam, n: usize) -> Result<ExactWordSet> {
    if n > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "enumerate_exact_words",
            requested: n,
            cap: ENUMERATION_CAP,
        });
    }
    let (lo, hi) = state_range(slope);
    let width = (hi - lo + 1) as usize;
    let idx = |w: i64| (w - lo) as usize;
    // reach[r][s]: state s can hit 0 in exactly r more steps
    let mut reach = vec![vec![false; width]; n + 1];
    reach[0][idx(0)] = true;
    for r in 0..n {
        for w in lo..=hi {
            'sym: for b in BSymbol::ALL {
                let t = step(slope, w, b);
                if t >= lo && t <= hi && reach[r][idx(t)] {
                    reach[r + 1][idx(w)] = true;
                    break 'sym;
                }
            }
        }
    }
    let mut words = Vec::new();
    let mut word: BWord = Vec::with_capacity(n);
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        slope: &SlopeParam,
        reach: &[Vec<bool>],
        lo: i64,
        hi: i64,
        n: usize,
        w: i64,
        word: &mut BWord,
        out: &mut Vec<BWord>,
    ) {
        let depth = word.len();
        if depth == n {
            if w == 0 {
                out.push(word.clone());
            }
            return;
        }
        for b in BSymbol::ALL {
            let t = step(slope, w, b);
            if t >= lo && t <= hi && reach[n - depth - 1][(t - lo) as usize] {
                word.push(b);
                dfs(slope, reach, lo, hi, n, t, word, out);
                word.pop();
            }
        }
    }
    if reach[n][idx(0)] || n == 0 {
        dfs(slope, &reach, lo, hi, n, 0, &mut word, &mut words);
    }
    Ok(ExactWordSet { n, words })
}

/// `N_n` recovered from the transfer-matrix cocycle.
///
/// The generators satisfy, entry by entry,
/// `A_l[src][tgt] = |{(x, y) in D x D : rtilde(x, y) = val(tgt) + val(l) -
/// 2 val(src)}|` with index values `val` in `{(0,0),(1,0),(0,-1),(1,-1)}`.
/// Telescoping along a path `s_0 -> s_n` reading `z` gives the alpha/beta
/// value of the represented digit-pair history as
/// `val(z) + val(s_n) - 2^n val(s_0)` with `val(z) = (X, -Y)`. Pinning
/// `s_0 = (0,0)`, a path represents an exactly overlapping pair precisely
/// when `p (X + sx) + q (-Y + sy) = 0` at its end state. Diagonal pairs have
/// one representation each and every ordered off-diagonal pair contributes
/// four representations to one of the two orders, so with
///
/// `C_n = sum over words and matching end states of (A_z)[(0,0)][s]`
///
/// the exact count is `N_n = (C_n + 3^n) / 2`. The sum runs as a tensor DP
/// over (value state `w = pX - qY` in `[-p, q]`, row 4-vector); values
/// outside that band are trapped on their sign and never reach a target.
pub fn count_via_cocycle(slope: &SlopeParam, n: usize) -> Result<BigUint> {
    if n > COUNT_CAP {
        return Err(Error::CapExceeded {
            what: "count_via_cocycle",
            requested: n,
            cap: COUNT_CAP,
        });
    }
    let p = slope.p() as i64;
    let q = slope.q() as i64;
    let (lo, hi) = (-p, q);
    let width = (hi - lo + 1) as usize;
    let idx = |w: i64| (w - lo) as usize;
    let zero_vec = || -> [BigUint; 4] { std::array::from_fn(|_| BigUint::zero()) };
    let mut dp: Vec<Option<[BigUint; 4]>> = vec![None; width];
    let mut start = zero_vec();
    start[0] = BigUint::one(); // the row vector e1: start state (0,0)
    dp[idx(0)] = Some(start);
    for _ in 0..n {
        let mut next: Vec<Option<[BigUint; 4]>> = vec![None; width];
        for w in lo..=hi {
            let Some(vec) = dp[idx(w)].as_ref() else {
                continue;
            };
            for b in BSymbol::ALL {
                let t = step(slope, w, b);
                if t < lo || t > hi {
                    continue;
                }
                let g = &GENERATOR_TABLES[b.index()];
                let slot = next[idx(t)].get_or_insert_with(zero_vec);
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
    // end-state targets: s = (sx, sy) matches words with w = -(p sx + q sy)
    let targets = [(0i64, 0usize), (-p, 1), (q, 2), (q - p, 3)];
    let mut doubled = BigUint::zero();
    for (w, comp) in targets {
        if let Some(vec) = dp[idx(w)].as_ref() {
            doubled += &vec[comp];
        }
    }
    doubled += BigUint::from(3u32).pow(n as u32);
    let (half, rem) = doubled.div_rem(&BigUint::from(2u32));
    debug_assert!(rem.is_zero(), "corrected cocycle sum must be even");
    Ok(half)
}

/// `log (1 A_{z_1..z_n} e1 / 1 A_{z_2..z_n} e1)` in nats.
pub fn phi_truncated(z: &[BSymbol]) -> Result<f64> {
    if z.is_empty() {
        return Err(Error::EmptyWord);
    }
    let num = cocycle_product(z).weight_e1();
    let den = cocycle_product(&z[1..]).weight_e1();
    if den.is_zero() {
        return Err(Error::DegenerateDenominator);
    }
    Ok(ln_biguint(&num) - ln_biguint(&den))
}

/// Limit of the potential along the periodic extension `block^infinity`.
///
/// Values are taken at whole-block truncations. Convergence is declared when
/// either the product's image direction stabilizes exactly (detected in
/// integer arithmetic) or the Hilbert diameter of the image cone of the
/// accumulated product drops below `tol`. An empty prefix defaults to the
/// zero symbol.
pub fn phi_limit(block: &[BSymbol], tol: f64, max_blocks: usize) -> Result<f64> {
    let block: BWord = if block.is_empty() {
        vec![BSymbol::ZeroZero]
    } else {
        block.to_vec()
    };
    let a_block = cocycle_product(&block);
    let a_tail = cocycle_product(&block[1..]);

    // u_k = A_block^k e1; t_k = ln(1 u_k) - ln(1 A_tail u_{k-1}). The gcd
    // reduction rescales the running power, so numerator and denominator of
    // each t_k are both taken at the previous step's scale before reducing.
    let mut power = TransferMatrix4::identity();
    let mut prev_u: Option<[BigUint; 4]> = None;
    for _ in 0..max_blocks.max(1) {
        let unreduced = power.mul(&a_block);
        let u: [BigUint; 4] = std::array::from_fn(|i| unreduced.0[i][0].clone());
        let prev_col: [BigUint; 4] = std::array::from_fn(|i| power.0[i][0].clone());
        let num: BigUint = u.iter().sum();
        let den: BigUint = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| &a_tail.0[i][j] * &prev_col[j])
                    .sum::<BigUint>()
            })
            .sum();
        if den.is_zero() {
            return Err(Error::DegenerateDenominator);
        }
        let t = ln_biguint(&num) - ln_biguint(&den);

        power = unreduced;
        power.reduce();

        if tol.is_infinite() {
            return Ok(t);
        }
        if let Some(prev) = &prev_u {
            if directions_equal(prev, &u) {
                return Ok(t);
            }
        }
        if let Some(diam) = image_cone_diameter(&power) {
            if diam < tol {
                return Ok(t);
            }
        }
        prev_u = Some(reduce_vec(u));
    }
    Err(Error::NotConverged)
}

fn reduce_vec(mut v: [BigUint; 4]) -> [BigUint; 4] {
    let mut g = BigUint::zero();
    for e in &v {
        g = g.gcd(e);
    }
    if g > BigUint::one() {
        for e in &mut v {
            *e /= &g;
        }
    }
    v
}

fn directions_equal(a: &[BigUint; 4], b: &[BigUint; 4]) -> bool {
    // cross ratios a_i b_j == a_j b_i for all pairs
    for i in 0..4 {
        for j in (i + 1)..4 {
            if &a[i] * &b[j] != &a[j] * &b[i] {
                return false;
            }
        }
    }
    true
}

/// Hilbert diameter of the cone spanned by the columns, measured on the
/// common support; `None` when column supports differ (infinite diameter).
fn image_cone_diameter(m: &TransferMatrix4) -> Option<f64> {
    let support: Vec<usize> = (0..4)
        .filter(|&i| (0..4).any(|j| !m.0[i][j].is_zero()))
        .collect();
    if support.is_empty() {
        return None;
    }
    for j in 0..4 {
        let nonzero = support.iter().any(|&i| !m.0[i][j].is_zero());
        if nonzero {
            for &i in &support {
                if m.0[i][j].is_zero() {
                    return None; // column support differs from row support
                }
            }
        }
    }
    let cols: Vec<usize> = (0..4)
        .filter(|&j| support.iter().any(|&i| !m.0[i][j].is_zero()))
        .collect();
    let mut diam = 0.0f64;
    for (ai, &a) in cols.iter().enumerate() {
        for &b in &cols[ai + 1..] {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &i in &support {
                let r = ln_biguint(&m.0[i][a]) - ln_biguint(&m.0[i][b]);
                lo = lo.min(r);
                hi = hi.max(r);
            }
            diam = diam.max(hi - lo);
        }
    }
    Some(diam)
}
