//! # homlab-core
//!
//! Photon-number statistics at a lossless beam splitter, computed in the
//! Fock basis.
//!
//! The central object is the g-polynomial
//!
//! ```text
//! g(m_a, m_b | n) = sum_q C(n,q) (-1)^q (m_a)_{n-q} T^{n-q} (m_b)_q R^q
//! ```
//!
//! which carries every zero of the post-measurement beam-splitter amplitude
//! for an `n`-photon Fock state in mode `a`. With a rational transmittance
//! `T` it is evaluated exactly, so zeros of the joint distribution can be
//! certified rather than merely observed.
//!
//! Modules:
//!
//! - [`numerics`]: big integers/rationals, falling factorials, binomials.
//! - [`bs`]: beam-splitter settings, amplitudes `f`, the g-polynomial.
//! - [`states`]: Fock, coherent, thermal, odd-cat and photon-added squeezed inputs.
//! - [`joint`]: joint output distributions `P(m_a, m_b)` for pure and mixed inputs.
//! - [`detector`]: Bernoulli loss and two-mode-squeezed heralding statistics.
//! - [`nodal`]: central nodal line checks, Diophantine zero scans and
//!   parametric zero families.
//! - [`dicke`]: the Schwinger / Dicke-state analogue.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bs;
pub mod detector;
pub mod dicke;
pub mod error;
pub mod joint;
pub mod nodal;
pub mod numerics;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64;
