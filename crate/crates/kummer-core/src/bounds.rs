//! Prime-sum approximants and auxiliary constants: the reciprocal sums
//! S_q(b,x), g_q(x), f_q(x) and the truncated prime-power tail t_q; the
//! isolation constants c1(k) and the Ankeny-Chowla-style tail constant; the
//! transform error budget in closed form; and admissible-set measure tests.

use crate::nt::{harmonic, is_prime, NtError, ZETA_3};
use crate::sum::NeumaierSum;

/// Sieve segment size (entries per segment).
const SEGMENT: usize = 1 << 22;

/// Simple sieve of all primes up to `limit` inclusive.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u64);
            let mut j = p * p;
            while j <= n {
                composite[j] = true;
                j += p;
            }
        }
    }
    out
}

/// One segmented-sieve pass over [2, x], accumulating sum(1/p) separately for
/// p = 1 (mod q) and p = -1 (mod q), in ascending order with compensation.
fn reciprocal_sums_both(q: u64, x: u64) -> (f64, f64) {
    if x < 2 {
        return (0.0, 0.0);
    }
    let root = (x as f64).sqrt() as u64 + 1;
    let base = primes_up_to(root);
    let mut plus = NeumaierSum::new();
    let mut minus = NeumaierSum::new();
    let mut tally = |p: u64| {
        let rem = p % q;
        if rem == 1 {
            plus.add(1.0 / p as f64);
        } else if rem == q - 1 {
            minus.add(1.0 / p as f64);
        }
    };
    let mut lo = 2u64;
    let mut mark = vec![false; SEGMENT];
    while lo <= x {
        let hi = (lo + SEGMENT as u64 - 1).min(x);
        let len = (hi - lo + 1) as usize;
        for flag in &mut mark[..len] {
            *flag = false;
        }
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut j = p.max(lo.div_ceil(p)) * p;
            while j <= hi {
                mark[(j - lo) as usize] = true;
                j += p;
            }
        }
        for i in 0..len {
            if !mark[i] {
                let p = lo + i as u64;
                if p >= 2 {
                    tally(p);
                }
            }
        }
        lo = hi + 1;
    }
    (plus.value(), minus.value())
}

/// S_q(b, x) = sum of 1/p over primes p <= x with p = b (mod q), b in {-1, 1}.
pub fn prime_sum_s(q: u64, b: i32, x: u64) -> Result<f64, NtError> {
    if b != 1 && b != -1 {
        return Err(NtError::Domain("residue class must be -1 or +1"));
    }
    let (plus, minus) = reciprocal_sums_both(q, x);
    Ok(if b == 1 { plus } else { minus })
}

/// g_q(x) = S_q(1, x) - S_q(-1, x), both classes from one sieve pass.
pub fn g_q_x(q: u64, x: u64) -> f64 {
    let (plus, minus) = reciprocal_sums_both(q, x);
    plus - minus
}

/// Signed prime-power tail: sum over p^m <= xcap, m >= 2, p^m = +-1 (mod q)
/// of +-1/(m p^m).
pub fn t_q_partial(q: u64, xcap: u64) -> f64 {
    let mut acc = NeumaierSum::new();
    let root = (xcap as f64).sqrt() as u64 + 1;
    for p in primes_up_to(root) {
        let mut power = p * p;
        let mut m = 2u32;
        loop {
            let rem = power % q;
            if rem == 1 {
                acc.add(1.0 / (m as f64 * power as f64));
            } else if rem == q - 1 {
                acc.add(-1.0 / (m as f64 * power as f64));
            }
            if power > xcap / p {
                break;
            }
            power *= p;
            m += 1;
        }
    }
    acc.value()
}

/// f_q(x): the full truncated sum of (1.3)'s limit argument, i.e. signed
/// 1/(m p^m) over all prime powers p^m <= x congruent to +-1 (mod q).
pub fn f_q_x(q: u64, x: u64) -> f64 {
    g_q_x(q, x) + t_q_partial(q, x)
}

/// (q-1)/2 * f_q(x): the prime-sum approximation to r(q).
pub fn r_prime_approx(q: u64, x: u64) -> f64 {
    (q - 1) as f64 / 2.0 * f_q_x(q, x)
}

/// c1(k) = H_((k-1)/2)/4 - log log k, for odd k >= 3.
pub fn c1_of_k(k: u64) -> Result<f64, NtError> {
    if k < 3 || k % 2 == 0 {
        return Err(NtError::Domain("c1 requires odd k >= 3"));
    }
    Ok(harmonic((k - 1) / 2) / 4.0 - (k as f64).ln().ln())
}

/// Minimizes c1 over odd k <= limit; returns (argmin, minimum).
pub fn minimize_c1(limit: u64) -> (u64, f64) {
    let mut best = (3u64, c1_of_k(3).expect("3 is valid"));
    let mut k = 5;
    while k <= limit {
        let value = c1_of_k(k).expect("odd k");
        if value < best.1 {
            best = (k, value);
        }
        k += 2;
    }
    best
}

fn alpha(m: u64) -> u64 {
    (m * m - m) / 2
}

fn beta(m: u64) -> u64 {
    (m * m + m) / 2 - 1
}

/// The double sum sum_{m=2}^{T} (1/m) sum_{r=alpha(m)}^{beta(m)} of
/// (1/r)(1 + 1/(rq - 1)); `q = None` evaluates the limiting form without the
/// 1/(rq-1) factor.
pub fn lemma_direct_sum(q: Option<u64>, t: u64) -> f64 {
    let mut acc = NeumaierSum::new();
    for m in 2..=t {
        let mut inner = NeumaierSum::new();
        for r in alpha(m)..=beta(m) {
            let rf = r as f64;
            let term = match q {
                Some(q) => (1.0 / rf) * (1.0 + 1.0 / (rf * q as f64 - 1.0)),
                None => 1.0 / rf,
            };
            inner.add(term);
        }
        acc.add(inner.value() / m as f64);
    }
    acc.value()
}

/// The tail-bound constant with the first `isolate_up_to_m` terms of the m-sum
/// evaluated exactly and the rest bounded by the per-term estimate
/// `2/(m(m-1)) - (6/c)/m^3`, where `c = (3 m0 + 7)/(m0 + 1)` is the linear
/// relaxation of 3m+4 valid from m0+1 on. At m0 = 2 this is the constant
/// 43/13 - (18/13) zeta(3) = 1.64330...; isolating through m0 = 10 brings it
///下 to 1.60091...
pub fn lemma_limit_constant(isolate_up_to_m: u64) -> Result<f64, NtError> {
    let m0 = isolate_up_to_m;
    if m0 < 2 {
        return Err(NtError::Domain("isolation depth must be at least 2"));
    }
    let mut exact = NeumaierSum::new();
    for m in 2..=m0 {
        let mut inner = NeumaierSum::new();
        for r in alpha(m)..=beta(m) {
            inner.add(1.0 / r as f64);
        }
        exact.add(inner.value() / m as f64);
    }
    let cubes: f64 = crate::sum::compensated((1..=m0).map(|m| (m as f64).powi(-3)));
    let c = (3.0 * m0 as f64 + 7.0) / (m0 as f64 + 1.0);
    let tail = 2.0 / m0 as f64 - (6.0 / c) * (ZETA_3 - cubes);
    Ok(exact.value() + tail)
}

/// Closed-form transform error budget for the Rader sequence at prime q.
#[derive(Debug, Clone, Copy)]
pub struct ErrorBudget {
    pub q: u64,
    /// Transform length (q-1)/2.
    pub n: u64,
    /// Unit roundoff the budget is evaluated at.
    pub epsilon: f64,
    /// 0.6 eps sqrt(log2 N).
    pub delta: f64,
    /// ||x||_2 = sqrt((q-1)(q-2)/(6q)), closed form.
    pub l2_norm: f64,
    /// ||x||_inf = (q-2)/q.
    pub linf_norm: f64,
    /// Delta (2 + Delta).
    pub delta_2p: f64,
    /// Delta * ||x||_2: the bound on the maximal error of the
    /// sqrt(N)-normalized transform.
    pub fft_max_error_bound: f64,
    /// Delta (2 + Delta) ||x||_2: round-trip E_2 bound (and hence E_inf).
    pub e2_bound: f64,
    /// Delta (2 + Delta) sqrt(N) ||x||_inf: the coarser E_inf bound.
    pub einf_bound: f64,
}

/// Evaluates the budget; `epsilon` is typically 2^-53, 2^-64 or 2^-113.
pub fn fft_error_budget(q: u64, epsilon: f64) -> Result<ErrorBudget, NtError> {
    if q < 3 || !is_prime(q) {
        return Err(NtError::NotPrime(q));
    }
    let n = (q - 1) / 2;
    let qf = q as f64;
    let delta = 0.6 * epsilon * ((n as f64).ln() / std::f64::consts::LN_2).sqrt();
    let l2_norm = ((qf - 1.0) * (qf - 2.0) / (6.0 * qf)).sqrt();
    let linf_norm = (qf - 2.0) / qf;
    let delta_2p = delta * (2.0 + delta);
    Ok(ErrorBudget {
        q,
        n,
        epsilon,
        delta,
        l2_norm,
        linf_norm,
        delta_2p,
        fft_max_error_bound: delta * l2_norm,
        e2_bound: delta_2p * l2_norm,
        einf_bound: delta_2p * (n as f64).sqrt() * linf_norm,
    })
}

/// mu(A) = sum of 1/a over the set.
pub fn admissible_measure(set: &[u64]) -> f64 {
    crate::sum::compensated(set.iter().map(|&a| 1.0 / a as f64))
}

/// A set {a_1..a_s} is admissible iff for every prime p <= s+1 the congruence
/// X prod(a_i X + 1) = 0 (mod p) has fewer than p roots.
pub fn is_admissible(set: &[u64]) -> bool {
    let s = set.len() as u64;
    for p in primes_up_to(s + 1) {
        let mut roots = 0u64;
        for x in 0..p {
            let mut value = x % p;
            for &a in set {
                value = value * ((a % p * x + 1) % p) % p;
            }
            if value == 0 {
                roots += 1;
            }
        }
        if roots >= p {
            return false;
        }
    }
    true
}

/// How far a record sits from the e^0.41 log q envelope.
#[derive(Debug, Clone, Copy)]
pub struct TheoremBoundReport {
    pub count: usize,
    /// max over records of exp(|r|) / (e^0.41 log q).
    pub max_ratio: f64,
    pub argmax_q: u64,
}

/// Informational comparison of scanned r(q) values against the unconditional
/// envelope; the underlying statement holds only for sufficiently large q, so
/// this reports rather than asserts.
pub fn theorem_bound_report(records: &[(u64, f64)]) -> Option<TheoremBoundReport> {
    let envelope = 0.41f64.exp();
    let mut best: Option<(u64, f64)> = None;
    for &(q, r) in records {
        let ratio = r.abs().exp() / (envelope * (q as f64).ln());
        if best.map_or(true, |(_, b)| ratio > b) {
            best = Some((q, ratio));
        }
    }
    best.map(|(argmax_q, max_ratio)| TheoremBoundReport { count: records.len(), max_ratio, argmax_q })
}
