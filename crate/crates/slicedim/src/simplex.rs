//! Hilbert metrics on the open 4-simplex and its faces, the normalized
//! matrix action, and the contraction classification of words.
//!
//! A word acts on the simplex letter by letter (first letter first), so the
//! composite matrix of `z` is `A_{z_n} ... A_{z_1}`. A matrix is classified
//! contractive when every non-zero row is positive with at least two positive
//! rows; that is exactly the condition for all columns to share a support,
//! i.e. for the image cone to have finite projective diameter, and the sharp
//! contraction coefficient is `tanh(diameter / 4)`.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{BSymbol, BWord};
use crate::cocycle::{a_matrix, TransferMatrix4};
use crate::error::{Error, Result};
use crate::spectral::ln_biguint;

/// Point of the closed 4-simplex with its exact zero pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexPoint {
    coords: [f64; 4],
}

impl SimplexPoint {
    /// Entries must be non-negative and sum to 1 within 1e-12; they are
    /// renormalized to sum exactly.
    pub fn new(coords: [f64; 4]) -> Result<Self> {
        let sum: f64 = coords.iter().sum();
        if coords.iter().any(|&c| c < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::HilbertUndefined);
        }
        let coords = coords.map(|c| c / sum);
        Ok(SimplexPoint { coords })
    }

    pub fn coords(&self) -> [f64; 4] {
        self.coords
    }

    /// Indices of exactly-zero entries.
    pub fn zero_mask(&self) -> Vec<usize> {
        (0..4).filter(|&i| self.coords[i] == 0.0).collect()
    }

    pub fn is_interior(&self) -> bool {
        self.coords.iter().all(|&c| c > 0.0)
    }

    pub fn barycenter() -> Self {
        SimplexPoint { coords: [0.25; 4] }
    }
}

/// Hilbert distance. Defined for two interior points (all four ratios), for
/// two points on the same open face (ratios away from the shared zero), and
/// for points on different single-zero faces, where the cross ratio
/// `x_j / y_i` joins the coordinate ratios as written in the face formula.
pub fn hilbert_distance(x: &SimplexPoint, y: &SimplexPoint) -> Result<f64> {
    let zx = x.zero_mask();
    let zy = y.zero_mask();
    match (zx.len(), zy.len()) {
        (0, 0) => Ok(log_ratio_spread((0..4).map(|k| x.coords[k] / y.coords[k]))),
        (1, 1) => {
            let (i, j) = (zx[0], zy[0]);
            if i == j {
                Ok(log_ratio_spread(
                    (0..4)
                        .filter(|&k| k != i)
                        .map(|k| x.coords[k] / y.coords[k]),
                ))
            } else {
                let ratios = (0..4)
                    .filter(|&k| k != i && k != j)
                    .map(|k| x.coords[k] / y.coords[k])
                    .chain(std::iter::once(x.coords[j] / y.coords[i]));
                Ok(log_ratio_spread(ratios))
            }
        }
        _ => Err(Error::HilbertUndefined),
    }
}

fn log_ratio_spread(ratios: impl Iterator<Item = f64>) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in ratios {
        lo = lo.min(r);
        hi = hi.max(r);
    }
    (hi / lo).ln()
}

/// `M x / |M x|_1`.
pub fn normalized_action(m: &TransferMatrix4, x: &SimplexPoint) -> Result<SimplexPoint> {
    // scale entries by the largest one so arbitrarily large products stay
    // inside f64 range
    let mut max_ln = f64::NEG_INFINITY;
    for e in m.0.iter().flatten() {
        if !e.is_zero() {
            max_ln = max_ln.max(ln_biguint(e));
        }
    }
    if max_ln == f64::NEG_INFINITY {
        return Err(Error::ZeroImage);
    }
    let mut y = [0.0f64; 4];
    for (yi, row) in y.iter_mut().zip(&m.0) {
        for (e, xj) in row.iter().zip(&x.coords) {
            if !e.is_zero() {
                *yi += (ln_biguint(e) - max_ln).exp() * xj;
            }
        }
    }
    let sum: f64 = y.iter().sum();
    if sum <= 0.0 {
        return Err(Error::ZeroImage);
    }
    Ok(SimplexPoint {
        coords: y.map(|v| v / sum),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowProfile {
    pub pos: usize,
    pub zero: usize,
    pub zero_index: Option<usize>,
}

pub fn row_profile(m: &TransferMatrix4) -> RowProfile {
    let mut pos = 0;
    let mut zero = 0;
    let mut zero_index = None;
    for i in 0..4 {
        let nonzero = (0..4).filter(|&j| !m.0[i][j].is_zero()).count();
        if nonzero == 4 {
            pos += 1;
        } else if nonzero == 0 {
            zero += 1;
            zero_index = Some(i);
        }
    }
    if zero != 1 {
        zero_index = None;
    }
    RowProfile {
        pos,
        zero,
        zero_index,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contractivity {
    Contractive,
    NotContractive,
}

fn satisfies_criterion(m: &TransferMatrix4) -> bool {
    let profile = row_profile(m);
    profile.pos + profile.zero == 4 && profile.pos >= 2
}

/// Composite action matrix of a word: `A_{z_n} ... A_{z_1}`.
pub fn action_matrix(z: &[BSymbol]) -> TransferMatrix4 {
    let mut acc = TransferMatrix4::identity();
    for &s in z {
        acc = a_matrix(s).mul(&acc);
    }
    acc
}

/// A word is contractive when its action matrix has every non-zero row
/// positive and at least two positive rows.
pub fn classify_word(z: &[BSymbol]) -> Contractivity {
    if satisfies_criterion(&action_matrix(z)) {
        Contractivity::Contractive
    } else {
        Contractivity::NotContractive
    }
}

/// Sharp contraction coefficient `tanh(delta / 4)` where `delta` is the
/// projective diameter of the image: the largest face-metric distance
/// between normalized columns restricted to the non-zero rows. Matrices
/// failing the classification criterion get coefficient 1.
pub fn birkhoff_coefficient(m: &TransferMatrix4) -> f64 {
    if !satisfies_criterion(m) {
        return 1.0;
    }
    let support: Vec<usize> = (0..4)
        .filter(|&i| (0..4).any(|j| !m.0[i][j].is_zero()))
        .collect();
    let cols: Vec<usize> = (0..4)
        .filter(|&j| support.iter().any(|&i| !m.0[i][j].is_zero()))
        .collect();
    let mut delta = 0.0f64;
    for (ci, &a) in cols.iter().enumerate() {
        for &b in &cols[ci + 1..] {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &i in &support {
                let r = ln_biguint(&m.0[i][a]) - ln_biguint(&m.0[i][b]);
                lo = lo.min(r);
                hi = hi.max(r);
            }
            delta = delta.max(hi - lo);
        }
    }
    (delta / 4.0).tanh()
}

/// All length-3 words whose action matrix passes the criterion.
pub fn contractive_words_length3() -> Vec<BWord> {
    let mut out = Vec::new();
    for a in BSymbol::ALL {
        for b in BSymbol::ALL {
            for c in BSymbol::ALL {
                let z = vec![a, b, c];
                if classify_word(&z) == Contractivity::Contractive {
                    out.push(z);
                }
            }
        }
    }
    out
}

/// Maximal contraction coefficient over the contractive length-3 words.
pub fn max_contraction_tau() -> f64 {
    contractive_words_length3()
        .iter()
        .map(|z| birkhoff_coefficient(&action_matrix(z)))
        .fold(0.0, f64::max)
}

/// Empirical fraction of contractive non-overlapping length-3 blocks in
/// uniform random B-sequences. Deterministic for a given seed.
pub fn contractive_frequency(sample_count: usize, length: usize, seed: u64) -> Result<f64> {
    let blocks_per_sample = length / 3;
    if sample_count == 0 || blocks_per_sample == 0 {
        return Err(Error::EmptySample);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut contractive = 0u64;
    let mut total = 0u64;
    for _ in 0..sample_count {
        for _ in 0..blocks_per_sample {
            let z: BWord = (0..3).map(|_| BSymbol::ALL[rng.gen_range(0..4)]).collect();
            if classify_word(&z) == Contractivity::Contractive {
                contractive += 1;
            }
            total += 1;
        }
    }
    Ok(contractive as f64 / total as f64)
}

/// Uniform sample from the open simplex (symmetric Dirichlet).
pub fn sample_interior(rng: &mut impl Rng) -> SimplexPoint {
    let mut coords = [0.0f64; 4];
    let mut sum = 0.0;
    for c in &mut coords {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        *c = -u.ln();
        sum += *c;
    }
    SimplexPoint {
        coords: coords.map(|c| c / sum),
    }
}
