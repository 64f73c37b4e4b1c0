//! The three routes to `r(q) = log R(q)`:
//!
//! - `kummer_r_fft`: one length-`(q-1)/2` transform of the Rader sequence
//!   `c_k = e(k/(q-1)) (2 a_k/q - 1)`, the production path;
//! - `kummer_r_direct`: O(q^2) character sums straight off the power table,
//!   the oracle the transform is checked against;
//! - `kummer_r_digamma`: `L(1,chi) = -(1/q) sum chi(a) psi(a/q)`, a second
//!   independent cross-check.
//!
//! All three share the identity `r(q) = (q-1)/2 (log pi - log(q)/2) +
//! sum over odd characters of log |sum_a (a/q) chi(a)|` (the digamma route
//! replaces the inner sum and drops the `log pi` term).

use std::fmt;

use num_complex::Complex64;

use crate::dft::{cis_frac, AccuracyReport, DftError, DftPlan, PlanError};
use crate::nt::{digamma, is_prime, NtError, PrimeContext};
use crate::sum::NeumaierSum;

pub use crate::maillet::{classical_h1_bounds_check, maillet_h1, H1BoundsReport, MailletError};

/// Which evaluation route produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Fft,
    Direct,
    Digamma,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Fft => "fft",
            Method::Direct => "direct",
            Method::Digamma => "digamma",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KummerError {
    NotPrime(u64),
    /// The requested q exceeds the route's supported range.
    RangeExceeded { q: u64, max: u64, method: Method },
    Plan(PlanError),
    Dft(DftError),
    /// A transform output had modulus zero or was not finite. This would mean
    /// a vanishing L(1, chi), which cannot happen for prime q; it signals a
    /// broken build, not bad input.
    DegenerateTransform { index: usize },
    Nt(NtError),
}

impl fmt::Display for KummerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KummerError::NotPrime(q) => write!(f, "{q} is not an odd prime"),
            KummerError::RangeExceeded { q, max, method } => {
                write!(f, "q={q} exceeds the {method} route's range (max {max})")
            }
            KummerError::Plan(e) => write!(f, "planning failed: {e}"),
            KummerError::Dft(e) => write!(f, "transform failed: {e}"),
            KummerError::DegenerateTransform { index } => {
                write!(f, "transform output {index} is zero or non-finite")
            }
            KummerError::Nt(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for KummerError {}

impl From<PlanError> for KummerError {
    fn from(e: PlanError) -> Self {
        KummerError::Plan(e)
    }
}

impl From<DftError> for KummerError {
    fn from(e: DftError) -> Self {
        KummerError::Dft(e)
    }
}

impl From<NtError> for KummerError {
    fn from(e: NtError) -> Self {
        KummerError::Nt(e)
    }
}

/// One computed Kummer ratio.
#[derive(Debug, Clone)]
pub struct KummerResult {
    pub q: u64,
    /// r(q) = log R(q).
    pub r: f64,
    /// R(q) = exp(r).
    pub big_r: f64,
    pub method: Method,
    /// log10 of the relative class number, (r + log G(q)) / ln 10.
    pub log10_h1: f64,
    /// Round-trip instrumentation (transform route only).
    pub fft_accuracy: Option<AccuracyReport>,
}

/// The decimated sequence `c_k = e(k/(q-1)) (2 a_k/q - 1)`, k < (q-1)/2,
/// whose forward transform runs over exactly the odd characters.
#[derive(Debug, Clone)]
pub struct RaderSequence {
    q: u64,
    values: Vec<Complex64>,
}

impl RaderSequence {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Builds the Rader input for the decimation-in-frequency transform.
///
/// The modulus factor is computed as `(2 a_k - q)/q` in a single division so
/// the scaled value rounds once.
pub fn rader_dif_sequence(ctx: &PrimeContext) -> RaderSequence {
    let q = ctx.q();
    let qm1 = q - 1;
    let half = ctx.half_len();
    let values = ctx.powers()[..half]
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let scaled = (2.0 * a as f64 - q as f64) / q as f64;
            cis_frac(k as u64, qm1) * scaled
        })
        .collect();
    RaderSequence { q, values }
}

/// log G(q) = log(2q) + ((q-1)/4)(log q - 2 log 2pi).
pub fn log_g(q: u64) -> f64 {
    let qf = q as f64;
    (2.0 * qf).ln() + (qf - 1.0) / 4.0 * (qf.ln() - 2.0 * (2.0 * std::f64::consts::PI).ln())
}

fn guard_prime(q: u64) -> Result<(), KummerError> {
    if q < 3 || !is_prime(q) {
        return Err(KummerError::NotPrime(q));
    }
    Ok(())
}

fn finish(q: u64, r: f64, method: Method, acc: Option<AccuracyReport>) -> KummerResult {
    KummerResult {
        q,
        r,
        big_r: r.exp(),
        method,
        log10_h1: (r + log_g(q)) / std::f64::consts::LN_10,
        fft_accuracy: acc,
    }
}

/// r(q) by the transform route, with round-trip accuracy attached.
pub fn kummer_r_fft(q: u64) -> Result<KummerResult, KummerError> {
    kummer_r_fft_with_limit(q, crate::dft::DEFAULT_MEM_LIMIT)
}

/// Transform route with an explicit plan memory ceiling.
pub fn kummer_r_fft_with_limit(q: u64, mem_limit: u64) -> Result<KummerResult, KummerError> {
    guard_prime(q)?;
    // Check the whole working set (power table + transform plan) before
    // allocating anything; the power table alone is 8(q-1) bytes.
    let required = 8 * (q - 1) + crate::dft::plan_memory_estimate(((q - 1) / 2) as usize);
    if required > mem_limit {
        return Err(KummerError::Plan(PlanError::ResourceLimit {
            required_bytes: required,
            limit_bytes: mem_limit,
        }));
    }
    let ctx = PrimeContext::new(q)?;
    let seq = rader_dif_sequence(&ctx);
    let n = seq.len();
    let mut plan = DftPlan::with_mem_limit(n, mem_limit)?;
    let spectrum = plan.forward(seq.values())?;

    let mut log_sum = NeumaierSum::new();
    for (index, z) in spectrum.iter().enumerate() {
        let norm_sqr = z.norm_sqr();
        if !norm_sqr.is_finite() || norm_sqr == 0.0 {
            return Err(KummerError::DegenerateTransform { index });
        }
        log_sum.add(norm_sqr.ln());
    }
    let qf = q as f64;
    let r = n as f64 * (std::f64::consts::PI.ln() - 0.5 * qf.ln()) + 0.5 * log_sum.value();

    // Round-trip measurement reusing the spectrum already in hand.
    let back = plan.inverse(&spectrum)?;
    let eps = crate::dft::unit_roundoff();
    let delta = crate::dft::delta_bound(n, eps);
    let l2 = crate::sum::compensated(seq.values().iter().map(|z| z.norm_sqr())).sqrt();
    let linf = seq.values().iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let mut e2 = NeumaierSum::new();
    let mut einf = 0.0f64;
    for (u, v) in seq.values().iter().zip(&back) {
        let d = (u - v).norm_sqr();
        e2.add(d);
        einf = einf.max(d.sqrt());
    }
    let report = AccuracyReport {
        n,
        epsilon: eps,
        delta,
        l2_input_norm: l2,
        linf_input_norm: linf,
        predicted_e2: delta * (2.0 + delta) * l2,
        predicted_einf: delta * (2.0 + delta) * (n as f64).sqrt() * linf,
        measured_e2: e2.value().sqrt(),
        measured_einf: einf,
    };
    Ok(finish(q, r, Method::Fft, Some(report)))
}

/// Largest q the direct route accepts (quadratic cost).
pub const DIRECT_MAX_Q: u64 = 100_000;
/// Largest q the digamma route accepts (cross-check path).
pub const DIGAMMA_MAX_Q: u64 = 10_000;

/// All (q-1)/2 odd-character sums `S_j = sum_k w_k e(jk/(q-1))`, j odd,
/// evaluated by direct summation over the power table.
fn odd_character_sums_weighted(ctx: &PrimeContext, weights: &[f64]) -> Vec<Complex64> {
    let q = ctx.q();
    let qm1 = (q - 1) as usize;
    debug_assert_eq!(weights.len(), qm1);
    let roots: Vec<Complex64> = (0..qm1 as u64).map(|i| cis_frac(i, q - 1)).collect();
    let mut sums = Vec::with_capacity(qm1 / 2);
    for j in (1..qm1).step_by(2) {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut idx = 0usize;
        for &w in weights {
            let root = roots[idx];
            acc.re += w * root.re;
            acc.im += w * root.im;
            idx += j;
            if idx >= qm1 {
                idx -= qm1;
            }
        }
        sums.push(acc);
    }
    sums
}

/// Odd-character sums with the first chi-Bernoulli weight `a_k/q`.
pub fn odd_character_sums(ctx: &PrimeContext) -> Vec<Complex64> {
    let q = ctx.q();
    let weights: Vec<f64> = ctx.powers().iter().map(|&a| a as f64 / q as f64).collect();
    odd_character_sums_weighted(ctx, &weights)
}

/// r(q) by direct character sums; the oracle for the transform route.
pub fn kummer_r_direct(q: u64) -> Result<KummerResult, KummerError> {
    guard_prime(q)?;
    if q > DIRECT_MAX_Q {
        return Err(KummerError::RangeExceeded { q, max: DIRECT_MAX_Q, method: Method::Direct });
    }
    let ctx = PrimeContext::new(q)?;
    let r = direct_r_with_ctx(&ctx);
    Ok(finish(q, r, Method::Direct, None))
}

pub(crate) fn direct_r_with_ctx(ctx: &PrimeContext) -> f64 {
    let q = ctx.q();
    let sums = odd_character_sums(ctx);
    let mut log_sum = NeumaierSum::new();
    for z in &sums {
        log_sum.add(z.norm_sqr().ln());
    }
    let n = ctx.half_len() as f64;
    n * (std::f64::consts::PI.ln() - 0.5 * (q as f64).ln()) + 0.5 * log_sum.value()
}

/// r(q) through `L(1,chi) = -(1/q) sum chi(a) digamma(a/q)`.
pub fn kummer_r_digamma(q: u64) -> Result<KummerResult, KummerError> {
    guard_prime(q)?;
    if q > DIGAMMA_MAX_Q {
        return Err(KummerError::RangeExceeded { q, max: DIGAMMA_MAX_Q, method: Method::Digamma });
    }
    let ctx = PrimeContext::new(q)?;
    let weights: Vec<f64> = ctx
        .powers()
        .iter()
        .map(|&a| digamma(a as f64 / q as f64).expect("argument in (0,1)"))
        .collect();
    let sums = odd_character_sums_weighted(&ctx, &weights);
    let mut log_sum = NeumaierSum::new();
    for z in &sums {
        log_sum.add(z.norm_sqr().ln());
    }
    let n = ctx.half_len() as f64;
    let r = -n * (q as f64).ln() + 0.5 * log_sum.value();
    Ok(finish(q, r, Method::Digamma, None))
}
