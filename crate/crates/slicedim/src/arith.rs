//! Exact arithmetic for digit words and the recoverability calculus.
//!
//! The projected digit set is `D = {0, 1, p/q}`. To keep every identity exact
//! we store digits as integer numerators over the fixed denominator `q`
//! (so `D` becomes `{0, q, p}`) and dyadic evaluations as integers over
//! `q * 2^n`. The scaled remainder of a word pair,
//!
//! ```text
//! j_n = q * R_n(x, y) = sum_i 2^(n-i) * q * (x_i - y_i),
//! ```
//!
//! evolves by `j_{n+1} = 2 j_n + (xs - ys)` with `xs, ys` scaled digits.
//! A pair stays recoverable (can still collide after extension) exactly while
//! `|j_n| <= q - 1`.
//!
//! For reference, the planar digit set behind `D` is
//! `C = {(0,0), (0,1), (1,0)}`; the slope projection `(x, y) -> x + (p/q) y`
//! maps it bijectively onto the symbols of [`DSymbol`], so nothing here ever
//! needs planar coordinates.

use num_bigint::BigInt;
use num_integer::gcd;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Validated co-prime slope pair; the projection angle is `arctan(p/q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlopeParam {
    p: u64,
    q: u64,
}

impl SlopeParam {
    /// Validates `gcd(p, q) = 1` and `1 <= p <= q`.
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p < 1 || q < 1 || p > q {
            return Err(Error::OutOfRange { p, q });
        }
        if gcd(p, q) != 1 {
            return Err(Error::NotCoprime { p, q });
        }
        Ok(SlopeParam { p, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// The angle in radians.
    pub fn theta(&self) -> f64 {
        (self.p as f64 / self.q as f64).atan()
    }

    /// `p/q` as an exact rational.
    pub fn ratio(&self) -> BigRational {
        BigRational::new(BigInt::from(self.p), BigInt::from(self.q))
    }
}

impl std::fmt::Display for SlopeParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

pub fn make_slope(p: u64, q: u64) -> Result<SlopeParam> {
    SlopeParam::new(p, q)
}

/// A projected digit. Words are over symbols, not values: for `p = q` the
/// symbols `One` and `Slope` share the value 1 but stay distinct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DSymbol {
    Zero,
    One,
    Slope,
}

impl DSymbol {
    pub const ALL: [DSymbol; 3] = [DSymbol::Zero, DSymbol::One, DSymbol::Slope];

    /// Digit value scaled by `q`: `{0, q, p}`.
    pub fn scaled(self, slope: &SlopeParam) -> i64 {
        match self {
            DSymbol::Zero => 0,
            DSymbol::One => slope.q as i64,
            DSymbol::Slope => slope.p as i64,
        }
    }
}

/// A two-dimensional binary symbol, one of `(0,0), (1,0), (0,1), (1,1)`.
///
/// The fixed order of `ALL` is the index order used by the transfer matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BSymbol {
    ZeroZero,
    OneZero,
    ZeroOne,
    OneOne,
}

impl BSymbol {
    pub const ALL: [BSymbol; 4] = [
        BSymbol::ZeroZero,
        BSymbol::OneZero,
        BSymbol::ZeroOne,
        BSymbol::OneOne,
    ];

    pub fn new(x: u8, y: u8) -> Option<BSymbol> {
        match (x, y) {
            (0, 0) => Some(BSymbol::ZeroZero),
            (1, 0) => Some(BSymbol::OneZero),
            (0, 1) => Some(BSymbol::ZeroOne),
            (1, 1) => Some(BSymbol::OneOne),
            _ => None,
        }
    }

    pub fn x(self) -> u8 {
        matches!(self, BSymbol::OneZero | BSymbol::OneOne) as u8
    }

    pub fn y(self) -> u8 {
        matches!(self, BSymbol::ZeroOne | BSymbol::OneOne) as u8
    }

    pub fn index(self) -> usize {
        match self {
            BSymbol::ZeroZero => 0,
            BSymbol::OneZero => 1,
            BSymbol::ZeroOne => 2,
            BSymbol::OneOne => 3,
        }
    }
}

pub type DWord = Vec<DSymbol>;
pub type BWord = Vec<BSymbol>;

/// Scaled remainder `j = q * R_n`; recoverable while `|j| <= q - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaledRemainder(pub i128);

impl ScaledRemainder {
    pub fn recoverable(&self, slope: &SlopeParam) -> bool {
        self.0.unsigned_abs() <= (slope.q - 1) as u128
    }
}

/// `pi(w) = sum w_i 2^{-i}` as an exact rational (numerator over `q * 2^n`).
pub fn pi_value(w: &[DSymbol], slope: &SlopeParam) -> BigRational {
    let mut num = BigInt::zero();
    for d in w {
        num = num * 2 + d.scaled(slope);
    }
    let den = BigInt::from(slope.q) * (BigInt::one() << w.len());
    BigRational::new(num, den)
}

/// Membership of `(x, y)` in the extended line `l_theta` on the torus:
/// `p x - q y` is an integer. Both the parametrized line and this closed
/// subgroup are one-dimensional closed connected subgroups through the
/// origin, so they coincide when `gcd(p, q) = 1`.
pub fn line_membership(x: &BigRational, y: &BigRational, slope: &SlopeParam) -> bool {
    let v = x * BigInt::from(slope.p) - y * BigInt::from(slope.q);
    v.is_integer()
}

/// One step of the remainder recursion: `j' = 2 j + (xs - ys)`.
pub fn r_extend(j: ScaledRemainder, x: DSymbol, y: DSymbol, slope: &SlopeParam) -> ScaledRemainder {
    ScaledRemainder(2 * j.0 + (x.scaled(slope) - y.scaled(slope)) as i128)
}

/// Scaled remainder of a word pair, folded from `R_0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RemainderTrace {
    /// `q * R_n(a, b)` at the full length.
    pub value: ScaledRemainder,
    /// First prefix length at which `|j| > q - 1`, if any. Once the bound is
    /// exceeded the pair can never collide again (escape property).
    pub irrecoverable_at: Option<usize>,
}

pub fn r_word(a: &[DSymbol], b: &[DSymbol], slope: &SlopeParam) -> Result<RemainderTrace> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut j = ScaledRemainder(0);
    let mut irrecoverable_at = None;
    for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
        j = r_extend(j, x, y, slope);
        if irrecoverable_at.is_none() && !j.recoverable(slope) {
            irrecoverable_at = Some(i + 1);
        }
    }
    Ok(RemainderTrace {
        value: j,
        irrecoverable_at,
    })
}

/// Least naturals `(alpha, beta)` with `alpha * p - beta * q = j`.
///
/// `alpha` is the smallest non-negative solution of `alpha * p = j (mod q)`
/// with `alpha * p >= j`; for `|j| <= q - 1` this gives `alpha < q`.
pub fn solve_alpha_beta(j: i128, slope: &SlopeParam) -> (u64, u64) {
    let p = slope.p as i128;
    let q = slope.q as i128;
    // p is invertible mod q; find alpha0 in [0, q) with alpha0 * p = j mod q.
    let mut alpha = (0..q)
        .find(|a| ((a * p - j) % q + q) % q == 0)
        .expect("p generates Z/qZ");
    while alpha * p < j {
        alpha += q;
    }
    let beta = (alpha * p - j) / q;
    (alpha as u64, beta as u64)
}

/// Pair of equal-length words over `{-1, 0, 1}` recording how the scaled
/// remainder decomposes as `alpha * p - beta * q` digit by digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaBetaWord {
    pub alpha: Vec<i8>,
    pub beta: Vec<i8>,
}

impl AlphaBetaWord {
    /// MSB-first integer evaluation `value(alpha) * p - value(beta) * q`,
    /// which equals `q * R_n` of the generating word pair.
    pub fn scaled_value(&self, slope: &SlopeParam) -> i128 {
        let (mut va, mut vb) = (0i128, 0i128);
        for (&u, &v) in self.alpha.iter().zip(&self.beta) {
            va = 2 * va + u as i128;
            vb = 2 * vb + v as i128;
        }
        va * slope.p as i128 - vb * slope.q as i128
    }
}

/// The recursive `(alpha, beta)` word of a pair.
///
/// Appended digit pairs by case, scaled contribution `u * p - v * q`:
///
/// ```text
/// x = y          -> ( 0,  0)        x = p/q, y = 0 -> ( 1,  0)
/// x = 1,  y = 0  -> ( 0, -1)        x = 0, y = p/q -> (-1,  0)
/// x = 0,  y = 1  -> ( 0,  1)        x = p/q, y = 1 -> ( 1,  1)
///                                   x = 1, y = p/q -> (-1, -1)
/// ```
///
/// The second coordinate carries the negation that identifies matrix indices
/// with `B`, so pairing with `(p, -q)` reproduces the remainder exactly.
pub fn rtilde_word(a: &[DSymbol], b: &[DSymbol]) -> Result<AlphaBetaWord> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut alpha = Vec::with_capacity(a.len());
    let mut beta = Vec::with_capacity(a.len());
    for (&x, &y) in a.iter().zip(b) {
        let (u, v): (i8, i8) = match (x, y) {
            _ if x == y => (0, 0),
            (DSymbol::One, DSymbol::Zero) => (0, -1),
            (DSymbol::Zero, DSymbol::One) => (0, 1),
            (DSymbol::Slope, DSymbol::Zero) => (1, 0),
            (DSymbol::Zero, DSymbol::Slope) => (-1, 0),
            (DSymbol::Slope, DSymbol::One) => (1, 1),
            (DSymbol::One, DSymbol::Slope) => (-1, -1),
            _ => unreachable!(),
        };
        alpha.push(u);
        beta.push(v);
    }
    Ok(AlphaBetaWord { alpha, beta })
}

/// Frac-free doubling on the torus, used by the line-invariance property.
pub fn double_mod_one(x: &BigRational) -> BigRational {
    let two = BigRational::from(BigInt::from(2));
    let v = x * two;
    let f = v.floor();
    v - f
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn slope(p: u64, q: u64) -> SlopeParam {
        SlopeParam::new(p, q).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn make_slope_validates() {
        assert_eq!(make_slope(1, 2).unwrap(), slope(1, 2));
        assert_eq!(make_slope(1, 1).unwrap(), slope(1, 1));
        assert_eq!(make_slope(2, 4), Err(Error::NotCoprime { p: 2, q: 4 }));
        assert_eq!(make_slope(3, 2), Err(Error::OutOfRange { p: 3, q: 2 }));
        assert_eq!(make_slope(0, 2), Err(Error::OutOfRange { p: 0, q: 2 }));
    }

    #[test]
    fn pi_value_examples() {
        let s = slope(1, 2);
        assert_eq!(pi_value(&[DSymbol::One], &s), rat(1, 2));
        assert_eq!(pi_value(&[DSymbol::Slope, DSymbol::One], &s), rat(1, 2));
        assert_eq!(pi_value(&[], &s), rat(0, 1));
    }

    #[test]
    fn line_membership_examples() {
        let s = slope(1, 2);
        assert!(line_membership(&rat(0, 1), &rat(0, 1), &s));
        assert!(line_membership(&rat(0, 1), &rat(1, 2), &s));
        assert!(!line_membership(&rat(1, 2), &rat(0, 1), &s));
    }

    #[test]
    fn r_extend_examples() {
        let s = slope(1, 2);
        let j = r_extend(ScaledRemainder(0), DSymbol::Slope, DSymbol::Zero, &s);
        assert_eq!(j.0, 1);
        let j = r_extend(ScaledRemainder(1), DSymbol::Zero, DSymbol::One, &s);
        assert_eq!(j.0, 0);
        let j = r_extend(ScaledRemainder(0), DSymbol::One, DSymbol::One, &s);
        assert_eq!(j.0, 0);
    }

    #[test]
    fn r_word_examples() {
        let s = slope(1, 2);
        let t = r_word(
            &[DSymbol::Zero, DSymbol::One],
            &[DSymbol::Slope, DSymbol::Zero],
            &s,
        )
        .unwrap();
        assert_eq!(t.value.0, 0);
        assert_eq!(t.irrecoverable_at, None);

        let t = r_word(
            &[DSymbol::One, DSymbol::Zero],
            &[DSymbol::Zero, DSymbol::Zero],
            &s,
        )
        .unwrap();
        assert_eq!(t.irrecoverable_at, Some(1));

        let t = r_word(&[DSymbol::One], &[DSymbol::One, DSymbol::Zero], &s);
        assert_eq!(t, Err(Error::LengthMismatch { left: 1, right: 2 }));
    }

    #[test]
    fn alpha_beta_examples() {
        let s = slope(1, 2);
        assert_eq!(solve_alpha_beta(0, &s), (0, 0));
        assert_eq!(solve_alpha_beta(1, &s), (1, 0));
        assert_eq!(solve_alpha_beta(-1, &s), (1, 1));
        // q = 1 edge: alpha must grow past q to keep beta natural
        let s11 = slope(1, 1);
        assert_eq!(solve_alpha_beta(1, &s11), (1, 0));
    }

    #[test]
    fn rtilde_examples() {
        let s = slope(1, 2);
        let w = rtilde_word(&[DSymbol::Zero], &[DSymbol::Zero]).unwrap();
        assert_eq!((w.alpha, w.beta), (vec![0], vec![0]));

        let w = rtilde_word(&[DSymbol::Slope], &[DSymbol::Zero]).unwrap();
        assert_eq!((w.alpha, w.beta), (vec![1], vec![0]));

        let w = rtilde_word(
            &[DSymbol::Zero, DSymbol::One],
            &[DSymbol::Slope, DSymbol::Zero],
        )
        .unwrap();
        assert_eq!(
            (w.alpha.clone(), w.beta.clone()),
            (vec![-1, 0], vec![0, -1])
        );
        assert_eq!(w.scaled_value(&s), 0);
    }

    fn arb_slope() -> impl Strategy<Value = SlopeParam> {
        (1u64..=5)
            .prop_flat_map(|q| (1..=q, Just(q)))
            .prop_filter_map("coprime", |(p, q)| SlopeParam::new(p, q).ok())
    }

    fn arb_dword(n: usize) -> impl Strategy<Value = DWord> {
        proptest::collection::vec(proptest::sample::select(&DSymbol::ALL[..]), n)
    }

    proptest! {
        // r_word fold equals the direct sum q * sum 2^{n-i} (a_i - b_i)
        #[test]
        fn r_word_matches_direct_formula(s in arb_slope(), n in 0usize..=10,
                                         seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a: DWord = (0..n).map(|_| DSymbol::ALL[rng.gen_range(0..3)]).collect();
            let b: DWord = (0..n).map(|_| DSymbol::ALL[rng.gen_range(0..3)]).collect();
            let t = r_word(&a, &b, &s).unwrap();
            let mut direct: i128 = 0;
            for i in 0..n {
                let diff = (a[i].scaled(&s) - b[i].scaled(&s)) as i128;
                direct += (1i128 << (n - 1 - i)) * diff;
            }
            prop_assert_eq!(t.value.0, direct);
        }

        // scaled Thm on the binary re-encoding: value(rtilde) . (p, -q) = q R_n
        #[test]
        fn rtilde_consistent_with_r_word(s in arb_slope(), a in arb_dword(10), b in arb_dword(10)) {
            let t = r_word(&a, &b, &s).unwrap();
            let w = rtilde_word(&a, &b).unwrap();
            prop_assert_eq!(w.scaled_value(&s), t.value.0);
        }

        // line membership is invariant under the doubling map
        #[test]
        fn line_doubling_invariance(s in arb_slope(), xn in 0i64..100, yn in 0i64..100) {
            let x = rat(xn, 100);
            let y = rat(yn, 100);
            if line_membership(&x, &y, &s) {
                let x2 = double_mod_one(&x);
                let y2 = double_mod_one(&y);
                prop_assert!(line_membership(&x2, &y2, &s));
            }
        }

        // alpha < q on the recoverable range, and the value check is exact
        #[test]
        fn alpha_beta_value_check(s in arb_slope(), joff in 0i128..20) {
            let q = s.q() as i128;
            let j = joff % (2 * q - 1) - (q - 1);
            let (alpha, beta) = solve_alpha_beta(j, &s);
            prop_assert!(alpha < s.q());
            prop_assert_eq!(alpha as i128 * s.p() as i128 - beta as i128 * q, j);
        }
    }

    #[test]
    fn equal_value_symbols_when_p_equals_q() {
        let s = slope(1, 1);
        assert_eq!(
            pi_value(&[DSymbol::One], &s),
            pi_value(&[DSymbol::Slope], &s)
        );
        assert_ne!(DSymbol::One, DSymbol::Slope);
    }
}
