//! Entropy estimates, the Jensen chain, Fourier non-decay, and the per-slope
//! dimension report.

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

use crate::arith::SlopeParam;
use crate::automaton::build_overlap_automaton;
use crate::error::{Error, Result};
use crate::oracle;
use crate::spectral::Enclosure;
use crate::subshift::spectral_pressure;

/// Truncation cap for Fourier partial products.
pub const FOURIER_TERMS_CAP: u32 = 64;
/// Cap for the non-decay scale exponent.
pub const FOURIER_NONDECAY_CAP: u32 = 20;
/// Entropy depth used by the assembled report (within the brute cap).
pub const REPORT_ENTROPY_DEPTH: usize = 8;

/// `H_n` values and the two h_RW estimator sequences.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    /// `(n, H_n)` for `n = 1..=n_max`, in nats.
    pub values: Vec<(usize, f64)>,
    /// `H_n / n`.
    pub ratio_estimates: Vec<f64>,
    /// `H_{n+1} - H_n`.
    pub increment_estimates: Vec<f64>,
    /// All three maps contract by 1/2, so the exponent is the constant log 2.
    pub lyapunov: f64,
}

pub fn hrw_estimates(slope: &SlopeParam, n_max: usize) -> Result<EntropyReport> {
    if n_max == 0 {
        return Err(Error::CapExceeded {
            what: "hrw_estimates needs n_max >= 1",
            requested: 0,
            cap: oracle::BRUTE_CAP,
        });
    }
    let mut values = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        values.push((n, oracle::rw_entropy_term(slope, n)?));
    }
    let ratio_estimates = values.iter().map(|&(n, h)| h / n as f64).collect();
    let increment_estimates = values.windows(2).map(|w| w[1].1 - w[0].1).collect();
    Ok(EntropyReport {
        values,
        ratio_estimates,
        increment_estimates,
        lyapunov: std::f64::consts::LN_2,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct JensenBound {
    /// `H_n`.
    pub lhs: f64,
    /// `n log 9 - log N_n`.
    pub rhs: f64,
    pub ok: bool,
}

/// The entropy-versus-overlap inequality `H_n >= n log 9 - log N_n`.
pub fn jensen_bound(slope: &SlopeParam, n: usize) -> Result<JensenBound> {
    let lhs = oracle::rw_entropy_term(slope, n)?;
    let count = oracle::overlap_count_exact(slope, n)?;
    let rhs = n as f64 * 9f64.ln() - crate::spectral::ln_biguint(&count);
    Ok(JensenBound {
        lhs,
        rhs,
        ok: lhs >= rhs - 1e-9,
    })
}

/// One truncated Fourier evaluation of the measure.
#[derive(Debug, Clone, Copy)]
pub struct FourierSample {
    pub eta: Ratio<i128>,
    pub terms: u32,
    pub value: Complex64,
}

/// `prod_{n=1}^{terms} (1 + e(-eta/2^n) + e(-(p/q) eta/2^n)) / 3` with
/// `e(t) = exp(2 pi i t)`. Arguments are reduced mod 1 in exact rational
/// arithmetic first, so integer arguments contribute a factor of exactly 1.
pub fn fourier_partial(slope: &SlopeParam, eta: Ratio<i128>, terms: u32) -> Result<FourierSample> {
    if terms > FOURIER_TERMS_CAP {
        return Err(Error::CapExceeded {
            what: "fourier_partial",
            requested: terms as usize,
            cap: FOURIER_TERMS_CAP as usize,
        });
    }
    let mut value = Complex64::new(1.0, 0.0);
    for n in 1..=terms {
        let t1 = frac(*eta.numer(), eta.denom() << n);
        let t2 = frac(
            eta.numer() * slope.p() as i128,
            (eta.denom() * slope.q() as i128) << n,
        );
        let f = (Complex64::new(1.0, 0.0) + unit(t1) + unit(t2)) / 3.0;
        value *= f;
    }
    Ok(FourierSample { eta, terms, value })
}

/// Fractional part of `num/den` in `[0, 1)` as f64, exact reduction first.
fn frac(num: i128, den: i128) -> f64 {
    let r = num.rem_euclid(den);
    r as f64 / den as f64
}

fn unit(t: f64) -> Complex64 {
    let arg = -2.0 * std::f64::consts::PI * t;
    Complex64::new(arg.cos(), arg.sin())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FourierNondecay {
    /// Whether `|mu_hat(q 2^N) - mu_hat(q)| < 1e-9` held for all `N <= n_max`
    /// at matching truncation.
    pub holds: bool,
    /// `|mu_hat(q)|` from the high-precision partial product.
    pub base_modulus: f64,
}

/// Non-decay along the scale sequence `eta_N = q 2^N`: the leading `N`
/// factors are exactly 1, so the truncated values must agree.
pub fn fourier_nondecay(slope: &SlopeParam, n_max: u32) -> Result<FourierNondecay> {
    if n_max > FOURIER_NONDECAY_CAP {
        return Err(Error::CapExceeded {
            what: "fourier_nondecay",
            requested: n_max as usize,
            cap: FOURIER_NONDECAY_CAP as usize,
        });
    }
    let base_terms = FOURIER_TERMS_CAP - FOURIER_NONDECAY_CAP;
    let q = Ratio::from_integer(slope.q() as i128);
    let base = fourier_partial(slope, q, base_terms)?;
    let mut holds = true;
    for n in 1..=n_max {
        let eta = q * (1i128 << n);
        let v = fourier_partial(slope, eta, base_terms + n)?;
        if (v.value - base.value).norm() >= 1e-9 {
            holds = false;
        }
    }
    Ok(FourierNondecay {
        holds,
        base_modulus: base.value.norm(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeDto {
    pub p: u64,
    pub q: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportMetadata {
    /// The reading the entropy chain supports.
    pub dim_lower_formula: String,
    /// The alternative display form, not used by the computation.
    pub rejected_reading: String,
    pub entropy_depth: usize,
}

/// Assembled per-slope figures. Serialized field names are stable.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionReport {
    pub slope: SlopeDto,
    /// Enclosure of the overlap growth rate `N` (nats).
    pub n_enclosure: Enclosure,
    /// Enclosure of the pressure `P` (nats).
    pub p_enclosure: Enclosure,
    /// Finite-depth random-walk entropy estimate (nats).
    pub h_rw: f64,
    /// `min(1, h_rw / log 2)`.
    pub dim_estimate: f64,
    /// `max(0, (log 9 - P_upper) / log 2)`.
    pub dim_lower: f64,
    /// `P - N` midpoint gap; the inequality only promises `N <= P`.
    pub pressure_overlap_gap: f64,
    pub fourier_nondecay: bool,
    /// Numerical witness of singularity: non-decay with `|mu_hat(q)| > 1e-3`.
    pub singular: bool,
    pub metadata: ReportMetadata,
}

pub fn dimension_report(slope: &SlopeParam) -> Result<DimensionReport> {
    let automaton = build_overlap_automaton(slope);
    let n_enc = automaton.overlap_growth(1e-9, 100_000)?;
    let p_enc = spectral_pressure(slope).spectral.unwrap();

    let entropy = hrw_estimates(slope, REPORT_ENTROPY_DEPTH)?;
    let last_ratio = *entropy.ratio_estimates.last().unwrap();
    let h_rw = match entropy.increment_estimates.last() {
        Some(&inc) => last_ratio.min(inc),
        None => last_ratio,
    };

    let ln2 = std::f64::consts::LN_2;
    let dim_estimate = (h_rw / ln2).min(1.0);
    let dim_lower = ((9f64.ln() - p_enc.upper) / ln2).max(0.0);

    if dim_lower > dim_estimate + 0.02 {
        return Err(Error::ReportInvariant(format!(
            "dim_lower {dim_lower} exceeds dim_estimate {dim_estimate} + 0.02"
        )));
    }
    if dim_lower >= 1.0 {
        return Err(Error::ReportInvariant(format!(
            "dim_lower {dim_lower} not below 1"
        )));
    }

    let nondecay = fourier_nondecay(slope, FOURIER_NONDECAY_CAP)?;
    Ok(DimensionReport {
        slope: SlopeDto {
            p: slope.p(),
            q: slope.q(),
        },
        n_enclosure: n_enc,
        p_enclosure: p_enc,
        h_rw,
        dim_estimate,
        dim_lower,
        pressure_overlap_gap: p_enc.midpoint() - n_enc.midpoint(),
        fourier_nondecay: nondecay.holds,
        singular: nondecay.holds && nondecay.base_modulus > 1e-3,
        metadata: ReportMetadata {
            dim_lower_formula: "(ln 9 - P_upper) / ln 2".into(),
            rejected_reading: "P / ln 2".into(),
            entropy_depth: REPORT_ENTROPY_DEPTH,
        },
    })
}
