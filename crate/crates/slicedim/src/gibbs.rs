//! Binary-digit transition matrices on the expanded digit set, the measure
//! on binary cylinders, the n-step potential, and weak-Gibbs diagnostics.
//!
//! The expanded digit set collects the shifts `j/q` for
//! `j in {-q+1, ..., q-1}` (the automaton states scaled down by `q`). For a
//! binary digit `i`, reading it from shift `j` feeds shift `k` with weight
//! `|{d in {0, q, p} : q i + 2 j - d = k}|`; the cylinder-mass vector over
//! shifts then satisfies `V_w = (1/3) M_{w_1} V_{tail}`, and the shift masses
//! of the full interval form an eigenvector of `M_0 + M_1` with eigenvalue 3.
//! That eigenvector is computed exactly over the rationals so cylinder
//! additivity holds with no rounding at all.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{DSymbol, SlopeParam};
use crate::error::{Error, Result};
use crate::spectral::{dominant_perron, Enclosure};

/// Cap for the weak-Gibbs cylinder sweeps (2^n words).
pub const WEAK_GIBBS_CAP: usize = 20;

#[derive(Debug, Clone)]
pub struct GibbsSystem {
    slope: SlopeParam,
    /// `m[i][j][k]`, row j = source shift, column k = target shift,
    /// indices offset by q - 1.
    m: [Vec<Vec<u32>>; 2],
    /// Exact eigenvector of `M0 + M1` for eigenvalue 3, normalized to sum 1.
    r: Vec<BigRational>,
}

pub fn build_gibbs_system(slope: &SlopeParam) -> Result<GibbsSystem> {
    let q = slope.q() as i64;
    let dim = (2 * q - 1) as usize;
    let mut m = [vec![vec![0u32; dim]; dim], vec![vec![0u32; dim]; dim]];
    for (i, mat) in m.iter_mut().enumerate() {
        for j in -q + 1..q {
            for d in DSymbol::ALL {
                let k = q * i as i64 + 2 * j - d.scaled(slope);
                if -q < k && k < q {
                    mat[(j + q - 1) as usize][(k + q - 1) as usize] += 1;
                }
            }
        }
    }
    let r = eigenvector_for_three(&m, dim)?;
    Ok(GibbsSystem {
        slope: *slope,
        m,
        r,
    })
}

/// Exact kernel vector of `M0 + M1 - 3 I`, required one-dimensional and of
/// one sign.
fn eigenvector_for_three(m: &[Vec<Vec<u32>>; 2], dim: usize) -> Result<Vec<BigRational>> {
    let mut a: Vec<Vec<BigRational>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let mut v = BigRational::from(BigInt::from(m[0][i][j] + m[1][i][j]));
                    if i == j {
                        v -= BigRational::from(BigInt::from(3));
                    }
                    v
                })
                .collect()
        })
        .collect();
    // fraction-exact Gaussian elimination to reduced row echelon form
    let mut pivot_col_of_row = Vec::new();
    let mut row = 0usize;
    for col in 0..dim {
        let Some(pr) = (row..dim).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, pr);
        let pv = a[row][col].clone();
        for x in a[row][col..].iter_mut() {
            *x = &*x / &pv;
        }
        let pivot_row = a[row].clone();
        for (r, other) in a.iter_mut().enumerate() {
            if r != row && !other[col].is_zero() {
                let f = other[col].clone();
                for (x, pev) in other[col..].iter_mut().zip(&pivot_row[col..]) {
                    let delta = &f * pev;
                    *x = &*x - delta;
                }
            }
        }
        pivot_col_of_row.push(col);
        row += 1;
        if row == dim {
            break;
        }
    }
    let free: Vec<usize> = (0..dim).filter(|c| !pivot_col_of_row.contains(c)).collect();
    if free.len() != 1 {
        return Err(Error::DegenerateEigenvector);
    }
    let fc = free[0];
    let mut v = vec![BigRational::zero(); dim];
    v[fc] = BigRational::one();
    for (r, &pc) in pivot_col_of_row.iter().enumerate() {
        v[pc] = -a[r][fc].clone();
    }
    let any_neg = v.iter().any(|x| x.is_negative());
    let any_pos = v.iter().any(|x| x.is_positive());
    if any_neg && any_pos {
        return Err(Error::DegenerateEigenvector);
    }
    if any_neg {
        for x in &mut v {
            *x = -x.clone();
        }
    }
    let sum: BigRational = v.iter().cloned().sum();
    if sum.is_zero() {
        return Err(Error::DegenerateEigenvector);
    }
    Ok(v.into_iter().map(|x| x / sum.clone()).collect())
}

impl GibbsSystem {
    pub fn slope(&self) -> &SlopeParam {
        &self.slope
    }

    pub fn dim(&self) -> usize {
        self.r.len()
    }

    pub fn matrix(&self, digit: u8) -> &Vec<Vec<u32>> {
        &self.m[digit as usize]
    }

    pub fn shift_masses(&self) -> &[BigRational] {
        &self.r
    }

    /// Certified Perron enclosure of `M0 + M1` (should contain 3).
    pub fn perron_value(&self) -> Result<Enclosure> {
        let dim = self.dim();
        let mat: Vec<Vec<f64>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| (self.m[0][i][j] + self.m[1][i][j]) as f64)
                    .collect()
            })
            .collect();
        dominant_perron(&mat, 1e-10, 100_000)
    }

    fn apply(&self, digit: u8, v: &[BigRational]) -> Vec<BigRational> {
        let mat = &self.m[digit as usize];
        (0..self.dim())
            .map(|i| {
                let mut acc = BigRational::zero();
                for (j, vj) in v.iter().enumerate() {
                    if mat[i][j] > 0 {
                        acc += vj * BigInt::from(mat[i][j]);
                    }
                }
                acc
            })
            .collect()
    }

    fn product_vector(&self, w: &[u8]) -> Vec<BigRational> {
        let mut v = self.r.clone();
        for &digit in w.iter().rev() {
            v = self.apply(digit, &v);
        }
        v
    }

    /// Exact cylinder mass `3^{-n} 1 M_w R / (1 R)`; `1 R = 1` here since
    /// `R` is normalized.
    pub fn mu_bar_mass_exact(&self, w: &[u8]) -> BigRational {
        let v = self.product_vector(w);
        let num: BigRational = v.into_iter().sum();
        let three_n = BigRational::from(BigInt::from(3)).pow(w.len() as i32);
        num / three_n
    }

    pub fn mu_bar_mass(&self, w: &[u8]) -> f64 {
        rational_to_f64(&self.mu_bar_mass_exact(w))
    }

    /// `log(1 M_{w_1}..M_{w_n} R / 1 M_{w_2}..M_{w_n} R)`.
    pub fn phi_bar(&self, w: &[u8]) -> Result<f64> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        let tail: BigRational = self.product_vector(&w[1..]).into_iter().sum();
        let full: BigRational = self.product_vector(w).into_iter().sum();
        if tail.is_zero() || full.is_zero() {
            return Err(Error::DegenerateDenominator);
        }
        Ok(rational_to_f64(&full).ln() - rational_to_f64(&tail).ln())
    }

    /// Checks `|phi_bar at length k - phi_bar at length m| <= 2 log ||M_{w_1}||`
    /// (entry-sum norm) for every truncation length k >= m.
    pub fn variation_bound_check(&self, w: &[u8], m: usize) -> bool {
        if w.is_empty() || m == 0 || m > w.len() {
            return true;
        }
        let norm: u64 = self.m[w[0] as usize]
            .iter()
            .flatten()
            .map(|&x| x as u64)
            .sum();
        let bound = 2.0 * (norm as f64).ln();
        let at = |k: usize| self.phi_bar(&w[..k]);
        let Ok(base) = at(m) else { return false };
        for k in m..=w.len() {
            match at(k) {
                Ok(v) => {
                    if (v - base).abs() > bound + 1e-9 {
                        return false;
                    }
                }
                Err(_) => return false,
            }
        }
        true
    }

    /// `(n, log C_n / n)` for `n = 1..=n_max`.
    ///
    /// `C_n` is the worst cylinder ratio between `mu_bar[w]` and
    /// `exp(sum of phi_bar terms - n log 3)`, with each Birkhoff term
    /// evaluated on the shifted word zero-padded back to depth n; the
    /// finite-n pressure of the padded potential over the full binary shift
    /// is exactly `log 3` because `R` is the exact eigenvector.
    pub fn weak_gibbs_constants(&self, n_max: usize) -> Result<Vec<(usize, f64)>> {
        if n_max > WEAK_GIBBS_CAP {
            return Err(Error::CapExceeded {
                what: "weak_gibbs_constants",
                requested: n_max,
                cap: WEAK_GIBBS_CAP,
            });
        }
        (1..=n_max)
            .map(|n| Ok((n, self.log_cn(n) / n as f64)))
            .collect()
    }

    /// `log C_n`: DFS over all words of length n, building suffixes.
    fn log_cn(&self, n: usize) -> f64 {
        let dim = self.dim();
        let mats: [Vec<Vec<f64>>; 2] = [to_f64(&self.m[0]), to_f64(&self.m[1])];
        let r0: Vec<f64> = self.r.iter().map(rational_to_f64).collect();
        // padded tails M_0^k R
        let mut pads = vec![r0.clone()];
        for k in 1..=n {
            pads.push(mat_vec(&mats[0], &pads[k - 1]));
        }
        let identity: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| (i == j) as u8 as f64).collect())
            .collect();
        let mut best = 0.0f64;
        // suffix product M_u and the partial Birkhoff sum accumulated so far
        let mut stack: Vec<(usize, Vec<Vec<f64>>, f64)> = vec![(0, identity, 0.0)];
        while let Some((depth, m_u, partial)) = stack.pop() {
            if depth == n {
                let full: f64 = mat_vec(&m_u, &r0).iter().sum();
                let log_ratio = full.ln() - partial;
                best = best.max(log_ratio.abs());
                continue;
            }
            let pad = &pads[n - depth - 1];
            let den: f64 = mat_vec(&m_u, pad).iter().sum();
            for mat_bit in &mats {
                let m_new = mat_mul(mat_bit, &m_u);
                let num: f64 = mat_vec(&m_new, pad).iter().sum();
                stack.push((depth + 1, m_new, partial + num.ln() - den.ln()));
            }
        }
        best
    }

    /// CSV of `(n, log C_n / n)`.
    pub fn weak_gibbs_csv(&self, n_max: usize) -> Result<String> {
        let mut out = String::from("n,log_cn_over_n\n");
        for (n, v) in self.weak_gibbs_constants(n_max)? {
            out.push_str(&format!("{n},{v:.9}\n"));
        }
        Ok(out)
    }

    /// CSV of all cylinder masses at depth n, words in binary order.
    pub fn cylinder_mass_csv(&self, n: usize) -> Result<String> {
        if n > WEAK_GIBBS_CAP {
            return Err(Error::CapExceeded {
                what: "cylinder_mass_csv",
                requested: n,
                cap: WEAK_GIBBS_CAP,
            });
        }
        let mut out = String::from("word,mass\n");
        for bits in 0..(1u64 << n) {
            let w: Vec<u8> = (0..n).map(|i| ((bits >> (n - 1 - i)) & 1) as u8).collect();
            let label: String = w.iter().map(|b| char::from(b'0' + b)).collect();
            out.push_str(&format!("{label},{:.12}\n", self.mu_bar_mass(&w)));
        }
        Ok(out)
    }
}

fn to_f64(m: &[Vec<u32>]) -> Vec<Vec<f64>> {
    m.iter()
        .map(|row| row.iter().map(|&x| x as f64).collect())
        .collect()
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik != 0.0 {
                for j in 0..n {
                    out[i][j] += aik * b[k][j];
                }
            }
        }
    }
    out
}

fn rational_to_f64(r: &BigRational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    let sign = if num.is_negative() { -1.0 } else { 1.0 };
    let n = crate::spectral::ln_biguint(&num.magnitude().clone());
    let d = crate::spectral::ln_biguint(&den.magnitude().clone());
    if num.is_zero() {
        0.0
    } else {
        sign * (n - d).exp()
    }
}
