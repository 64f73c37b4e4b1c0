//! AVX2+FMA stage kernels, selected at runtime. Two interleaved complex
//! doubles ride in each 256-bit vector; complex products use fmaddsub, which
//! both halves the rounding of the twiddle multiplies and roughly doubles
//! throughput over the scalar kernels. Layout-compatible with the scalar
//! path: callers pick per stage.

#![cfg(target_arch = "x86_64")]

use core::arch::x86_64::*;

use num_complex::Complex64;

#[inline]
pub(crate) fn available() -> bool {
    is_x86_feature_detected!("avx2") && is_x86_feature_detected!("fma")
}

/// z * w for two packed complexes, w broadcast as (re, im) vectors.
///
/// Compensated: the two lane-products are formed with exact fma residuals and
/// recombined with one final rounding per lane, keeping each twiddle multiply
/// at ~0.5 ulp. The twiddle products dominate the transform's rounding error,
/// and this is what holds the round trip inside the Delta(2+Delta) budget.
#[inline(always)]
unsafe fn cmul_broadcast(z: __m256d, w_re: __m256d, w_im: __m256d) -> __m256d {
    let swapped = _mm256_permute_pd(z, 0b0101);
    // p1 = z * w_re lane-wise, exact residual e1
    let p1 = _mm256_mul_pd(z, w_re);
    let e1 = _mm256_fmsub_pd(z, w_re, p1);
    // p2 = swapped * w_im lane-wise, exact residual e2
    let p2 = _mm256_mul_pd(swapped, w_im);
    let e2 = _mm256_fmsub_pd(swapped, w_im, p2);
    // s = p1 -+ p2 with its exact rounding error (lane-wise two-sum)
    let s = _mm256_addsub_pd(p1, p2);
    let bb = _mm256_sub_pd(s, p1);
    let err_s = _mm256_add_pd(
        _mm256_sub_pd(p1, _mm256_sub_pd(s, bb)),
        _mm256_addsub_pd(_mm256_sub_pd(_mm256_setzero_pd(), bb), p2),
    );
    let tail = _mm256_add_pd(err_s, _mm256_addsub_pd(e1, e2));
    _mm256_add_pd(s, tail)
}

/// Elementwise complex product of two packed pairs (same compensation).
#[inline(always)]
unsafe fn cmul_packed(a: __m256d, b: __m256d) -> __m256d {
    cmul_broadcast(a, _mm256_movedup_pd(b), _mm256_permute_pd(b, 0b1111))
}

/// -i * z for two packed complexes: (re, im) -> (im, -re).
#[inline(always)]
unsafe fn mul_neg_i(z: __m256d) -> __m256d {
    let swapped = _mm256_permute_pd(z, 0b0101);
    _mm256_xor_pd(swapped, _mm256_set_pd(-0.0, 0.0, -0.0, 0.0))
}

/// Radix-4 stage for even `stride` (every stage after the first).
///
/// # Safety
/// Requires avx2+fma; `src`/`dst` have length `n_cur * stride`, `stride`
/// even, `tw` holds 3 twiddles per butterfly row.
#[target_feature(enable = "avx2,fma")]
pub(crate) unsafe fn stage_radix4(
    src: &[Complex64],
    dst: &mut [Complex64],
    n_cur: usize,
    stride: usize,
    tw: &[Complex64],
) {
    debug_assert!(stride % 2 == 0);
    let quarter = n_cur / 4;
    let sp = src.as_ptr() as *const f64;
    let dp = dst.as_mut_ptr() as *mut f64;
    for p in 0..quarter {
        let w1 = tw[3 * p];
        let w2 = tw[3 * p + 1];
        let w3 = tw[3 * p + 2];
        let w1_re = _mm256_set1_pd(w1.re);
        let w1_im = _mm256_set1_pd(w1.im);
        let w2_re = _mm256_set1_pd(w2.re);
        let w2_im = _mm256_set1_pd(w2.im);
        let w3_re = _mm256_set1_pd(w3.re);
        let w3_im = _mm256_set1_pd(w3.im);
        let in0 = p * stride;
        let out0 = 4 * p * stride;
        let mut q = 0;
        while q < stride {
            let a = _mm256_loadu_pd(sp.add(2 * (in0 + q)));
            let b = _mm256_loadu_pd(sp.add(2 * (in0 + quarter * stride + q)));
            let c = _mm256_loadu_pd(sp.add(2 * (in0 + 2 * quarter * stride + q)));
            let d = _mm256_loadu_pd(sp.add(2 * (in0 + 3 * quarter * stride + q)));
            let apc = _mm256_add_pd(a, c);
            let amc = _mm256_sub_pd(a, c);
            let bpd = _mm256_add_pd(b, d);
            let bmd = _mm256_sub_pd(b, d);
            let mjb = mul_neg_i(bmd);
            _mm256_storeu_pd(dp.add(2 * (out0 + q)), _mm256_add_pd(apc, bpd));
            _mm256_storeu_pd(
                dp.add(2 * (out0 + stride + q)),
                cmul_broadcast(_mm256_add_pd(amc, mjb), w1_re, w1_im),
            );
            _mm256_storeu_pd(
                dp.add(2 * (out0 + 2 * stride + q)),
                cmul_broadcast(_mm256_sub_pd(apc, bpd), w2_re, w2_im),
            );
            _mm256_storeu_pd(
                dp.add(2 * (out0 + 3 * stride + q)),
                cmul_broadcast(_mm256_sub_pd(amc, mjb), w3_re, w3_im),
            );
            q += 2;
        }
    }
}

/// Radix-4 first stage (`stride == 1`): two butterflies per iteration, with
/// interleaved twiddle pairs loaded straight from the table.
///
/// # Safety
/// Requires avx2+fma; `n_cur` divisible by 8.
#[target_feature(enable = "avx2,fma")]
pub(crate) unsafe fn stage_radix4_first(
    src: &[Complex64],
    dst: &mut [Complex64],
    n_cur: usize,
    tw: &[Complex64],
) {
    let quarter = n_cur / 4;
    debug_assert!(quarter % 2 == 0);
    let sp = src.as_ptr() as *const f64;
    let dp = dst.as_mut_ptr() as *mut f64;
    let tp = tw.as_ptr() as *const f64;
    let mut p = 0;
    while p < quarter {
        let a = _mm256_loadu_pd(sp.add(2 * p));
        let b = _mm256_loadu_pd(sp.add(2 * (p + quarter)));
        let c = _mm256_loadu_pd(sp.add(2 * (p + 2 * quarter)));
        let d = _mm256_loadu_pd(sp.add(2 * (p + 3 * quarter)));
        let apc = _mm256_add_pd(a, c);
        let amc = _mm256_sub_pd(a, c);
        let bpd = _mm256_add_pd(b, d);
        let bmd = _mm256_sub_pd(b, d);
        let mjb = mul_neg_i(bmd);
        // Twiddles for rows p and p+1: (w1 w2 w3)(p), (w1 w2 w3)(p+1).
        let w1 = _mm256_set_pd(
            *tp.add(6 * p + 7),
            *tp.add(6 * p + 6),
            *tp.add(6 * p + 1),
            *tp.add(6 * p),
        );
        let w2 = _mm256_set_pd(
            *tp.add(6 * p + 9),
            *tp.add(6 * p + 8),
            *tp.add(6 * p + 3),
            *tp.add(6 * p + 2),
        );
        let w3 = _mm256_set_pd(
            *tp.add(6 * p + 11),
            *tp.add(6 * p + 10),
            *tp.add(6 * p + 5),
            *tp.add(6 * p + 4),
        );
        let y0 = _mm256_add_pd(apc, bpd);
        let y1 = cmul_packed(_mm256_add_pd(amc, mjb), w1);
        let y2 = cmul_packed(_mm256_sub_pd(apc, bpd), w2);
        let y3 = cmul_packed(_mm256_sub_pd(amc, mjb), w3);
        // Scatter: butterfly p writes 4p..4p+3, butterfly p+1 writes 4p+4..
        _mm_storeu_pd(dp.add(8 * p), _mm256_castpd256_pd128(y0));
        _mm_storeu_pd(dp.add(8 * p + 2), _mm256_castpd256_pd128(y1));
        _mm_storeu_pd(dp.add(8 * p + 4), _mm256_castpd256_pd128(y2));
        _mm_storeu_pd(dp.add(8 * p + 6), _mm256_castpd256_pd128(y3));
        _mm_storeu_pd(dp.add(8 * p + 8), _mm256_extractf128_pd(y0, 1));
        _mm_storeu_pd(dp.add(8 * p + 10), _mm256_extractf128_pd(y1, 1));
        _mm_storeu_pd(dp.add(8 * p + 12), _mm256_extractf128_pd(y2, 1));
        _mm_storeu_pd(dp.add(8 * p + 14), _mm256_extractf128_pd(y3, 1));
        p += 2;
    }
}

/// Radix-2 stage for even `stride`.
///
/// # Safety
/// Requires avx2+fma; `stride` even.
#[target_feature(enable = "avx2,fma")]
pub(crate) unsafe fn stage_radix2(
    src: &[Complex64],
    dst: &mut [Complex64],
    n_cur: usize,
    stride: usize,
    tw: &[Complex64],
) {
    debug_assert!(stride % 2 == 0);
    let half = n_cur / 2;
    let sp = src.as_ptr() as *const f64;
    let dp = dst.as_mut_ptr() as *mut f64;
    for p in 0..half {
        let w = tw[p];
        let w_re = _mm256_set1_pd(w.re);
        let w_im = _mm256_set1_pd(w.im);
        let in0 = p * stride;
        let out0 = 2 * p * stride;
        let mut q = 0;
        while q < stride {
            let a = _mm256_loadu_pd(sp.add(2 * (in0 + q)));
            let b = _mm256_loadu_pd(sp.add(2 * (in0 + half * stride + q)));
            _mm256_storeu_pd(dp.add(2 * (out0 + q)), _mm256_add_pd(a, b));
            _mm256_storeu_pd(
                dp.add(2 * (out0 + stride + q)),
                cmul_broadcast(_mm256_sub_pd(a, b), w_re, w_im),
            );
            q += 2;
        }
    }
}

/// Chirp pre-multiply: `dst[k] = input[k] * chirp[k]` for `k < input.len()`;
/// the tail of `dst` is assumed already zeroed.
///
/// # Safety
/// Requires avx2+fma; `chirp` and `dst` at least as long as `input`.
#[target_feature(enable = "avx2,fma")]
pub(crate) unsafe fn chirp_premul(input: &[Complex64], chirp: &[Complex64], dst: &mut [Complex64]) {
    let n = input.len();
    let ip = input.as_ptr() as *const f64;
    let cp = chirp.as_ptr() as *const f64;
    let dp = dst.as_mut_ptr() as *mut f64;
    let pairs = n / 2;
    for i in 0..pairs {
        let x = _mm256_loadu_pd(ip.add(4 * i));
        let w = _mm256_loadu_pd(cp.add(4 * i));
        _mm256_storeu_pd(dp.add(4 * i), cmul_packed(x, w));
    }
    if n % 2 == 1 {
        dst[n - 1] = input[n - 1] * chirp[n - 1];
    }
}

/// Filter pass with the inverse-by-conjugation fold:
/// `a[j] = conj(a[j] * h[j]) * scale`.
///
/// # Safety
/// Requires avx2+fma; `a.len() == h.len()` and even.
#[target_feature(enable = "avx2,fma")]
pub(crate) unsafe fn chirp_filter(a: &mut [Complex64], h: &[Complex64], scale: f64) {
    debug_assert_eq!(a.len(), h.len());
    debug_assert_eq!(a.len() % 2, 0);
    let ap = a.as_mut_ptr() as *mut f64;
    let hp = h.as_ptr() as *const f64;
    let conj_scale = _mm256_set_pd(-scale, scale, -scale, scale);
    for i in 0..a.len() / 2 {
        let x = _mm256_loadu_pd(ap.add(4 * i));
        let y = _mm256_loadu_pd(hp.add(4 * i));
        let prod = cmul_packed(x, y);
        _mm256_storeu_pd(ap.add(4 * i), _mm256_mul_pd(prod, conj_scale));
    }
}

/// Extraction pass: `out[j] = conj(a[j]) * chirp[j]` for `j < n`.
///
/// # Safety
/// Requires avx2+fma; `a` and `chirp` at least `n` long, `out` exactly `n`.
#[target_feature(enable = "avx2,fma")]
pub(crate) unsafe fn chirp_postmul(a: &[Complex64], chirp: &[Complex64], out: &mut [Complex64], n: usize) {
    let ap = a.as_ptr() as *const f64;
    let cp = chirp.as_ptr() as *const f64;
    let op = out.as_mut_ptr() as *mut f64;
    let conj_mask = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
    let pairs = n / 2;
    for i in 0..pairs {
        let x = _mm256_xor_pd(_mm256_loadu_pd(ap.add(4 * i)), conj_mask);
        let w = _mm256_loadu_pd(cp.add(4 * i));
        _mm256_storeu_pd(op.add(4 * i), cmul_packed(x, w));
    }
    if n % 2 == 1 {
        out[n - 1] = a[n - 1].conj() * chirp[n - 1];
    }
}
