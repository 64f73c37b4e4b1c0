//! Computation of the Kummer ratio `R(q) = h1(q)/G(q)` for prime cyclotomic
//! fields, where `h1(q)` is the relative class number and
//! `G(q) = 2q (q/4π²)^((q-1)/4)`.
//!
//! The fast path evaluates `r(q) = log R(q)` through a single length-`(q-1)/2`
//! discrete Fourier transform of a primitive-root power sequence (Rader
//! reindexing plus decimation in frequency over the odd Dirichlet characters).
//! Two independent slow paths (direct character sums and a digamma formula)
//! and an exact integer route (the Maillet determinant) cross-check it.
//!
//! Modules:
//! - [`nt`]: primality, primitive roots, power tables, special functions;
//! - [`dft`]: planned forward/inverse transforms of arbitrary length with a
//!   floating-point accuracy model;
//! - [`ratio`]: the three `r(q)` evaluation routes and the Maillet determinant;
//! - [`bounds`]: prime-sum approximants, auxiliary constants and the FFT error
//!   budget.

pub mod bounds;
pub mod dft;
mod maillet;
pub mod nt;
pub mod ratio;
pub mod sum;

pub use dft::{AccuracyReport, DftError, DftPlan, PlanError, Strategy};
pub use nt::{digamma, exp_integral_e1, harmonic, is_prime, primitive_root, NtError, PrimeContext};
pub use ratio::{
    classical_h1_bounds_check, kummer_r_digamma, kummer_r_direct, kummer_r_fft,
    kummer_r_fft_with_limit, log_g, maillet_h1, rader_dif_sequence, H1BoundsReport, KummerError,
    KummerResult, MailletError, Method, RaderSequence,
};
