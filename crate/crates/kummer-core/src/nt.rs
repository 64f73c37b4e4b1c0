//! Arithmetic primitives and special functions: deterministic 64-bit
//! primality, smallest primitive roots, primitive-root power tables, and the
//! digamma / exponential-integral / harmonic evaluations the `r(q)` formulas
//! need.

use std::fmt;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Apery's constant zeta(3).
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

#[derive(Debug, Clone, PartialEq)]
pub enum NtError {
    /// The argument was expected to be an odd prime.
    NotPrime(u64),
    /// The claimed primitive root does not generate the multiplicative group.
    NotPrimitiveRoot { q: u64, g: u64 },
    /// A special-function argument was outside the supported domain.
    Domain(&'static str),
}

impl fmt::Display for NtError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NtError::NotPrime(n) => write!(f, "{n} is not an odd prime"),
            NtError::NotPrimitiveRoot { q, g } => {
                write!(f, "{g} is not a primitive root modulo {q}")
            }
            NtError::Domain(msg) => write!(f, "domain error: {msg}"),
        }
    }
}

impl std::error::Error for NtError {}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin primality test, valid for all `n < 2^64`.
///
/// The witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is known to
/// have no strong pseudoprime below 3.3 * 10^24.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let trailing = (n - 1).trailing_zeros();
    let odd = (n - 1) >> trailing;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, odd, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..trailing {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest primitive root modulo the odd prime `q`.
pub fn primitive_root(q: u64) -> Result<u64, NtError> {
    if q < 3 || !is_prime(q) {
        return Err(NtError::NotPrime(q));
    }
    let factors = prime_factors(q - 1);
    'cand: for g in 2..q {
        for &p in &factors {
            if pow_mod(g, (q - 1) / p, q) == 1 {
                continue 'cand;
            }
        }
        return Ok(g);
    }
    unreachable!("every prime has a primitive root");
}

/// A prime `q` with a primitive root `g` and the materialized power
/// permutation `a_k = g^k mod q`, `k = 0..q-2`.
///
/// The second half mirrors the first: `a_(k + (q-1)/2) = q - a_k`, which is
/// what lets the decimation-in-frequency step halve the transform length.
#[derive(Debug, Clone)]
pub struct PrimeContext {
    q: u64,
    g: u64,
    powers: Vec<u64>,
}

impl PrimeContext {
    /// Builds the context for `q` using its smallest primitive root.
    pub fn new(q: u64) -> Result<Self, NtError> {
        let g = primitive_root(q)?;
        Self::with_root(q, g)
    }

    /// Builds the power table for a caller-chosen root, rejecting `g` if the
    /// powers fail to be a permutation of `1..q-1`.
    pub fn with_root(q: u64, g: u64) -> Result<Self, NtError> {
        if q < 3 || !is_prime(q) {
            return Err(NtError::NotPrime(q));
        }
        if g < 2 || g >= q {
            return Err(NtError::NotPrimitiveRoot { q, g });
        }
        let len = (q - 1) as usize;
        let mut powers = Vec::with_capacity(len);
        let mut seen = vec![false; len + 1];
        let mut x = 1u64;
        for _ in 0..len {
            if seen[x as usize] {
                return Err(NtError::NotPrimitiveRoot { q, g });
            }
            seen[x as usize] = true;
            powers.push(x);
            x = mul_mod(x, g, q);
        }
        debug_assert_eq!(x, 1, "g^(q-1) must return to 1");
        Ok(Self { q, g, powers })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn root(&self) -> u64 {
        self.g
    }

    /// The full power sequence `a_0, ..., a_(q-2)`.
    pub fn powers(&self) -> &[u64] {
        &self.powers
    }

    /// Half transform length `(q-1)/2`.
    pub fn half_len(&self) -> usize {
        self.powers.len() / 2
    }
}

/// Digamma function psi(x) = Gamma'(x)/Gamma(x) for x > 0.
///
/// Recurrence-shifts the argument to `x >= 16`, then applies the asymptotic
/// expansion `ln x - 1/(2x) - sum B_2n / (2n x^2n)` with eight series terms.
pub fn digamma(x: f64) -> Result<f64, NtError> {
    if !x.is_finite() || x <= 0.0 {
        return Err(NtError::Domain("digamma requires x > 0"));
    }
    // B_2n / 2n for 2n = 2, 4, ..., 16.
    const COEFFS: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
        1.0 / 12.0,
        -3617.0 / 8160.0,
    ];
    let mut shift = 0.0f64;
    let mut x = x;
    while x < 16.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut tail = 0.0f64;
    for &c in COEFFS.iter().rev() {
        tail = (tail + c) * inv2;
    }
    Ok(shift + x.ln() - 0.5 / x - tail)
}

/// Exponential integral E1(x) = int_x^inf e^(-t)/t dt for x > 0.
///
/// Power series `-gamma - ln x - sum (-x)^k/(k! k)` for small x; for larger x
/// the series cancels catastrophically in doubles, so a modified-Lentz
/// continued fraction takes over.
pub fn exp_integral_e1(x: f64) -> Result<f64, NtError> {
    if !x.is_finite() || x <= 0.0 {
        return Err(NtError::Domain("E1 requires x > 0"));
    }
    if x <= 1.5 {
        let mut sum = 0.0f64;
        let mut term = 1.0f64; // (-x)^k / k!
        for k in 1..200 {
            term *= -x / k as f64;
            let contrib = term / k as f64;
            sum += contrib;
            if contrib.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        Ok(-EULER_GAMMA - x.ln() - sum)
    } else {
        // E1(x) = e^(-x) / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...))).
        let mut b = x + 1.0;
        let mut c = 1e308f64;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200u32 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        Ok(h * (-x).exp())
    }
}

/// Harmonic number H_n = 1 + 1/2 + ... + 1/n, compensated, summed ascending.
pub fn harmonic(n: u64) -> f64 {
    crate::sum::compensated((1..=n).map(|j| 1.0 / j as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn is_prime_small_and_table_values() {
        assert!(is_prime(2));
        assert!(is_prime(3));
        assert!(!is_prime(1));
        assert!(!is_prime(1_000_000));
        assert!(is_prime(9_697_282_541));
        assert!(is_prime(9_854_964_401));
    }

    #[test]
    fn is_prime_agrees_with_trial_division_to_1e6() {
        let mut sieve = vec![true; 1_000_001];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2usize;
        while i * i <= 1_000_000 {
            if sieve[i] {
                let mut j = i * i;
                while j <= 1_000_000 {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        for n in 0..=1_000_000u64 {
            assert_eq!(is_prime(n), sieve[n as usize], "disagreement at {n}");
        }
    }

    #[test]
    fn smallest_primitive_roots() {
        assert_eq!(primitive_root(3).unwrap(), 2);
        // Brute-force oracle: order of every candidate below the answer is < q-1.
        for q in [7u64, 41] {
            let g = primitive_root(q).unwrap();
            for cand in 2..=g {
                let mut order = 1u64;
                let mut x = cand % q;
                while x != 1 {
                    x = mul_mod(x, cand, q);
                    order += 1;
                }
                if cand < g {
                    assert!(order < q - 1, "{cand} should not generate mod {q}");
                } else {
                    assert_eq!(order, q - 1);
                }
            }
        }
        assert_eq!(primitive_root(7).unwrap(), 3);
        assert_eq!(primitive_root(41).unwrap(), 6);
        assert!(primitive_root(9).is_err());
    }

    #[test]
    fn power_table_examples() {
        let ctx = PrimeContext::with_root(5, 2).unwrap();
        assert_eq!(ctx.powers(), &[1, 2, 4, 3]);
        let ctx = PrimeContext::with_root(3, 2).unwrap();
        assert_eq!(ctx.powers(), &[1, 2]);
        let ctx = PrimeContext::with_root(7, 3).unwrap();
        assert_eq!(ctx.powers(), &[1, 3, 2, 6, 4, 5]);
        for k in 0..3 {
            assert_eq!(ctx.powers()[k + 3], 7 - ctx.powers()[k]);
        }
        // 2 has order 3 modulo 7, so it must be rejected.
        assert!(PrimeContext::with_root(7, 2).is_err());
    }

    #[test]
    fn power_table_permutation_and_antisymmetry_all_q_to_1e4() {
        for q in (3..=10_000u64).filter(|&q| is_prime(q)) {
            let ctx = PrimeContext::new(q).unwrap();
            let powers = ctx.powers();
            assert_eq!(powers[0], 1);
            let half = ctx.half_len();
            for k in 0..half {
                assert_eq!(powers[k + half] + powers[k], q, "antisymmetry at q={q}, k={k}");
            }
            let mut sorted: Vec<u64> = powers.to_vec();
            sorted.sort_unstable();
            assert!(sorted.iter().enumerate().all(|(i, &a)| a == i as u64 + 1));
        }
    }

    #[test]
    fn digamma_reference_points() {
        // High-precision references: psi(1) = -gamma, psi(1/2) = -gamma - 2 ln 2.
        assert!((digamma(1.0).unwrap() - (-0.5772156649015329)).abs() < 1e-15);
        assert!((digamma(0.5).unwrap() - (-1.9635100260214235)).abs() < 2e-15);
        assert!(digamma(0.0).is_err());
        assert!(digamma(-3.0).is_err());
    }

    #[test]
    fn digamma_recurrence_and_reflection() {
        for i in 1..400 {
            let x = i as f64 * 0.37 + 0.01;
            let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
            assert!(lhs.abs() < 1e-12, "recurrence off at x={x}: {lhs:e}");
        }
        for i in 1..100 {
            let x = i as f64 / 100.0;
            if (x - 0.5).abs() < 1e-9 {
                continue;
            }
            let lhs = digamma(1.0 - x).unwrap() - digamma(x).unwrap();
            let rhs = std::f64::consts::PI / (std::f64::consts::PI * x).tan();
            assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0), "reflection off at x={x}");
        }
    }

    #[test]
    fn e1_reference_and_bracketing() {
        // 200-term extended-precision series oracle value.
        assert!((exp_integral_e1(1.0).unwrap() - 0.21938393439552027).abs() < 1e-15);
        // -gamma - ln x < E1(x) < -gamma - ln x + x on a log grid.
        for i in 0..1000 {
            let x = 10f64.powf(-6.0 + 8.0 * i as f64 / 999.0);
            let e1 = exp_integral_e1(x).unwrap();
            let lo = -EULER_GAMMA - x.ln();
            assert!(e1 > lo, "lower bound violated at x={x}");
            assert!(e1 < lo + x, "upper bound violated at x={x}");
        }
        assert!(exp_integral_e1(0.0).is_err());
    }

    #[test]
    fn e1_asymptotic_trend() {
        // x E1(x) e^x increases toward 1.
        let f = |x: f64| x * exp_integral_e1(x).unwrap() * x.exp();
        let (a, b, c) = (f(10.0), f(20.0), f(40.0));
        assert!(a < b && b < c && c < 1.0);
    }

    #[test]
    fn e1_both_branches_match_oracle() {
        // High-precision references on either side of the series/continued-
        // fraction switch at x = 1.5.
        for (x, want) in [
            (1.3, 0.13545095784912912986),
            (1.5, 0.1000195824066326519),
            (1.7, 0.074654644401253050038),
            (2.0, 0.048900510708061119567),
            (3.0, 0.013048381094197037413),
        ] {
            let got = exp_integral_e1(x).unwrap();
            assert!((got - want).abs() < 1e-12 * want, "E1({x}) = {got:.17e}");
        }
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(1), 1.0);
        assert_eq!(harmonic(2), 1.5);
        // Exact rational oracle: H_27 = 312536252003/80313433200.
        assert!((harmonic(27) - 3.8914567532520823).abs() < 1e-15);
    }
}
