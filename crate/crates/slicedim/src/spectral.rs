//! Perron values of non-negative matrices with certified Collatz-Wielandt
//! enclosures, plus the strongly-connected-component decomposition they need.
//!
//! For a non-negative matrix `M` and any positive vector `v`,
//! `min_i (Mv)_i / v_i <= rho(M) <= max_i (Mv)_i / v_i`. Iterating `v <- Mv`
//! tightens both sides when `M` is primitive; the shift `M + I` makes every
//! irreducible block primitive without hiding the Perron root
//! (`rho(M + I) = rho(M) + 1`).

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Certified interval around a Perron value (value space, not logs).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Enclosure {
    pub lower: f64,
    pub upper: f64,
}

impl Enclosure {
    pub fn exact(v: f64) -> Self {
        Enclosure { lower: v, upper: v }
    }

    pub fn log(&self) -> Enclosure {
        Enclosure {
            lower: self.lower.ln(),
            upper: self.upper.ln(),
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Tarjan's algorithm, iterative. Components come out in reverse
/// topological order; only edge presence matters.
pub fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut counter = 0usize;
    let mut comps = Vec::new();
    // explicit DFS stack: (node, next child position)
    let mut work: Vec<(usize, usize)> = Vec::new();

    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        work.push((start, 0));
        while let Some(&(v, ci)) = work.last() {
            if ci == 0 {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if ci < adj[v].len() {
                work.last_mut().unwrap().1 += 1;
                let w = adj[v][ci];
                if index[w] == usize::MAX {
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Collatz-Wielandt enclosure of `rho(mat)` for an irreducible non-negative
/// matrix, iterated until the enclosure width in log space is below `tol`.
pub fn perron_enclosure_irreducible(
    mat: &[Vec<f64>],
    tol: f64,
    max_iter: usize,
) -> Result<Enclosure> {
    let n = mat.len();
    if n == 1 {
        return Ok(Enclosure::exact(mat[0][0]));
    }
    // shifted iteration on M + I
    let mut v = vec![1.0f64; n];
    let mut best = Enclosure {
        lower: 0.0,
        upper: f64::INFINITY,
    };
    for _ in 0..max_iter {
        let mut w = vec![0.0f64; n];
        for i in 0..n {
            let mut acc = v[i]; // the +I shift
            for j in 0..n {
                acc += mat[i][j] * v[j];
            }
            w[i] = acc;
        }
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            let r = w[i] / v[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        // bounds for rho(M) = rho(M + I) - 1; intersect with the running best
        best.lower = best.lower.max(lo - 1.0);
        best.upper = best.upper.min(hi - 1.0);
        if best.lower > 0.0 && (best.upper.ln() - best.lower.ln()) < tol {
            return Ok(best);
        }
        let sum: f64 = w.iter().sum();
        for x in &mut w {
            *x /= sum;
        }
        v = w;
    }
    Err(Error::NotConverged)
}

/// Largest per-component Perron value of a general non-negative matrix.
/// This is `rho(mat)` and governs the growth rate of weighted path sums.
pub fn dominant_perron(mat: &[Vec<f64>], tol: f64, max_iter: usize) -> Result<Enclosure> {
    let n = mat.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| mat[i][j] > 0.0).collect())
        .collect();
    let mut best = Enclosure::exact(0.0);
    for comp in strongly_connected_components(&adj) {
        let enc = if comp.len() == 1 {
            let i = comp[0];
            Enclosure::exact(mat[i][i])
        } else {
            let sub: Vec<Vec<f64>> = comp
                .iter()
                .map(|&i| comp.iter().map(|&j| mat[i][j]).collect())
                .collect();
            perron_enclosure_irreducible(&sub, tol, max_iter)?
        };
        if enc.midpoint() > best.midpoint() {
            best = enc;
        }
    }
    Ok(best)
}

/// Natural log of a big unsigned integer, accurate to f64 precision.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 52 {
        let v: u64 = x.try_into().unwrap_or(u64::MAX);
        return (v as f64).ln();
    }
    let shift = bits - 52;
    let top: u64 = (x >> shift).try_into().unwrap_or(u64::MAX);
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `num / den` as f64, robust to operands far beyond f64 range.
pub fn big_ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    (ln_biguint(num) - ln_biguint(den)).exp()
}
