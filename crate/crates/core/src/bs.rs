//! Beam-splitter amplitudes and the g-polynomial.
//!
//! Convention: `a† -> cos(θ/2) a† + sin(θ/2) b†`,
//! `b† -> cos(θ/2) b† - sin(θ/2) a†`, with transmittance `T = cos²(θ/2)`
//! and reflectance `R = sin²(θ/2)`. The balanced splitter is `θ = π/2`.
//!
//! A Fock pair `|n, m⟩` maps to `Σ_p f^{(n,m)}_p |p, n+m-p⟩`. Measuring
//! `(m_a, m_b)` selects `p = m_a` and `m = m_a + m_b - n`, and all the zeros
//! of the amplitude sit in
//!
//! ```text
//! g(m_a, m_b | n) = Σ_q C(n,q) (-1)^q (m_a)_{n-q} T^{n-q} (m_b)_q R^q.
//! ```

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};
use crate::numerics::{
    binomial, binomial_u128, falling_factorial, falling_factorial_i128, factorial_ratio, ratio,
    rational_pow, rational_to_f64, BigRational, RealValue,
};

/// Transmittance setting of a lossless beam splitter.
#[derive(Clone, Debug, PartialEq)]
pub enum BeamSplitter {
    /// Exact rational transmittance `T = cos²(θ/2)`, `0 <= T <= 1`.
    ExactT(BigRational),
    /// Mixing angle `θ` in radians, `0 <= θ <= π`.
    Angle(f64),
}

impl BeamSplitter {
    /// `T = 1/2`.
    pub fn balanced() -> Self {
        BeamSplitter::ExactT(ratio(1, 2))
    }

    pub fn exact(t: BigRational) -> Result<Self> {
        if t.is_negative() || t > BigRational::one() {
            return Err(domain!("transmittance {t} outside [0, 1]"));
        }
        Ok(BeamSplitter::ExactT(t))
    }

    pub fn angle(theta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || theta.is_nan() {
            return Err(domain!("angle {theta} outside [0, π]"));
        }
        Ok(BeamSplitter::Angle(theta))
    }

    pub fn exact_t(&self) -> Option<&BigRational> {
        match self {
            BeamSplitter::ExactT(t) => Some(t),
            BeamSplitter::Angle(_) => None,
        }
    }

    pub fn transmittance(&self) -> f64 {
        match self {
            BeamSplitter::ExactT(t) => rational_to_f64(t),
            BeamSplitter::Angle(theta) => {
                let c = libm::cos(theta / 2.0);
                c * c
            }
        }
    }

    pub fn reflectance(&self) -> f64 {
        match self {
            BeamSplitter::ExactT(t) => rational_to_f64(&(BigRational::one() - t)),
            BeamSplitter::Angle(theta) => {
                let s = libm::sin(theta / 2.0);
                s * s
            }
        }
    }

    /// `cos(θ/2)`, non-negative on `[0, π]`.
    pub fn cos_half(&self) -> f64 {
        match self {
            BeamSplitter::ExactT(_) => libm::sqrt(self.transmittance()),
            BeamSplitter::Angle(theta) => libm::cos(theta / 2.0),
        }
    }

    /// `sin(θ/2)`, non-negative on `[0, π]`.
    pub fn sin_half(&self) -> f64 {
        match self {
            BeamSplitter::ExactT(_) => libm::sqrt(self.reflectance()),
            BeamSplitter::Angle(theta) => libm::sin(theta / 2.0),
        }
    }

    /// The mixing angle; for exact settings `θ = 2 acos(√T)`.
    pub fn theta(&self) -> f64 {
        match self {
            BeamSplitter::ExactT(_) => 2.0 * libm::acos(self.cos_half().min(1.0)),
            BeamSplitter::Angle(theta) => *theta,
        }
    }

    /// The setting with `θ -> π - θ` (swaps `T` and `R`).
    pub fn mirrored(&self) -> Self {
        match self {
            BeamSplitter::ExactT(t) => BeamSplitter::ExactT(BigRational::one() - t),
            BeamSplitter::Angle(theta) => BeamSplitter::Angle(PI - theta),
        }
    }
}

/// Two-mode Fock basis label `|n, m⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockPair {
    pub n: u32,
    pub m: u32,
}

/// Exact evaluator of `g(·, · | n)` at a fixed rational transmittance.
///
/// With `T = t/d`, `R = r/d`, the scaled value `d^n g` is an integer
/// polynomial in `(m_a, m_b)`; that integer is what gets computed, in `i128`
/// when it fits and in big integers otherwise.
#[derive(Clone, Debug)]
pub struct GPolynomial {
    n: u32,
    t: BigRational,
    /// `C(n,q) (-1)^q t^{n-q} r^q` for `q = 0..=n`
    coeffs: Vec<BigInt>,
    small: Option<Vec<i128>>,
    den_pow: BigInt,
}

impl GPolynomial {
    pub fn new(n: u32, t: &BigRational) -> Self {
        let den = t.denom().clone();
        let tn = t.numer().clone();
        let rn = &den - &tn;
        let coeffs: Vec<BigInt> = (0..=n)
            .map(|q| {
                let mut c = binomial(n as u64, q as i64) * num_traits::pow(tn.clone(), (n - q) as usize)
                    * num_traits::pow(rn.clone(), q as usize);
                if q % 2 == 1 {
                    c = -c;
                }
                c
            })
            .collect();
        let small = coeffs.iter().map(|c| c.to_i128()).collect::<Option<Vec<_>>>();
        GPolynomial {
            n,
            t: t.clone(),
            coeffs,
            small,
            den_pow: num_traits::pow(den, n as usize),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn transmittance(&self) -> &BigRational {
        &self.t
    }

    /// `C(n,q) (-1)^q t^{n-q} r^q` for `q = 0..=n`.
    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// `d^n`, the factor between [`GPolynomial::scaled`] and `g`.
    pub fn scale(&self) -> &BigInt {
        &self.den_pow
    }

    fn scaled_i128(&self, m_a: i64, m_b: i64) -> Option<i128> {
        let small = self.small.as_ref()?;
        let mut acc: i128 = 0;
        for (q, c) in small.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let fa = falling_factorial_i128(m_a as i128, self.n - q as u32)?;
            if fa == 0 {
                continue;
            }
            let fb = falling_factorial_i128(m_b as i128, q as u32)?;
            acc = acc.checked_add(c.checked_mul(fa)?.checked_mul(fb)?)?;
        }
        Some(acc)
    }

    fn scaled_big(&self, m_a: i64, m_b: i64) -> BigInt {
        let mut acc = BigInt::zero();
        for (q, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let fa = falling_factorial(m_a, self.n - q as u32);
            if fa.is_zero() {
                continue;
            }
            acc += c * fa * falling_factorial(m_b, q as u32);
        }
        acc
    }

    /// The integer `d^n g(m_a, m_b | n)`.
    pub fn scaled(&self, m_a: i64, m_b: i64) -> BigInt {
        match self.scaled_i128(m_a, m_b) {
            Some(v) => BigInt::from(v),
            None => self.scaled_big(m_a, m_b),
        }
    }

    pub fn eval(&self, m_a: i64, m_b: i64) -> BigRational {
        BigRational::new(self.scaled(m_a, m_b), self.den_pow.clone())
    }

    pub fn is_zero(&self, m_a: i64, m_b: i64) -> bool {
        match self.scaled_i128(m_a, m_b) {
            Some(v) => v == 0,
            None => self.scaled_big(m_a, m_b).is_zero(),
        }
    }

    /// Nearest double to the exact value.
    pub fn eval_f64(&self, m_a: i64, m_b: i64) -> f64 {
        match (self.scaled_i128(m_a, m_b), self.den_pow.to_f64()) {
            (Some(v), Some(d)) if v.unsigned_abs() < (1u128 << 100) => v as f64 / d,
            _ => rational_to_f64(&self.eval(m_a, m_b)),
        }
    }
}

fn falling_factorial_f64(x: i64, q: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..q as i64 {
        acc *= (x - i) as f64;
    }
    acc
}

/// The bare g-polynomial sum (the Kronecker delta on total photon number is
/// the caller's business). Exact for `ExactT`, floating point for `Angle`.
pub fn g_poly(m_a: i64, m_b: i64, n: u32, bs: &BeamSplitter) -> RealValue {
    match bs {
        BeamSplitter::ExactT(t) => RealValue::Exact(GPolynomial::new(n, t).eval(m_a, m_b)),
        BeamSplitter::Angle(_) => RealValue::Float(g_poly_f64(m_a, m_b, n, bs.transmittance(), bs.reflectance())),
    }
}

fn g_poly_f64(m_a: i64, m_b: i64, n: u32, t: f64, r: f64) -> f64 {
    let mut acc = 0.0;
    let mut binom = 1.0;
    for q in 0..=n {
        if q > 0 {
            binom = binom * (n - q + 1) as f64 / q as f64;
        }
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        let fa = falling_factorial_f64(m_a, n - q);
        if fa == 0.0 {
            continue;
        }
        let fb = falling_factorial_f64(m_b, q);
        acc += sign * binom * fa * libm::pow(t, (n - q) as f64) * fb * libm::pow(r, q as f64);
    }
    acc
}

/// Evaluates amplitudes `f^{(n,m)}_p` for one beam-splitter setting.
///
/// For exact settings the g-polynomials of orders `0..=n_max` are built once
/// up front; higher orders are built per call.
#[derive(Clone, Debug)]
pub struct AmplitudeEvaluator {
    bs: BeamSplitter,
    c: f64,
    s: f64,
    t: f64,
    r: f64,
    gpolys: Vec<GPolynomial>,
}

impl AmplitudeEvaluator {
    pub fn new(bs: &BeamSplitter) -> Self {
        Self::with_orders(bs, 0)
    }

    /// Evaluator with cached g-polynomials for `n <= n_max`.
    pub fn with_orders(bs: &BeamSplitter, n_max: u32) -> Self {
        let gpolys = match bs {
            BeamSplitter::ExactT(t) => (0..=n_max).map(|n| GPolynomial::new(n, t)).collect(),
            BeamSplitter::Angle(_) => Vec::new(),
        };
        AmplitudeEvaluator {
            bs: bs.clone(),
            c: bs.cos_half(),
            s: bs.sin_half(),
            t: bs.transmittance(),
            r: bs.reflectance(),
            gpolys,
        }
    }

    pub fn setting(&self) -> &BeamSplitter {
        &self.bs
    }

    fn g_f64(&self, m_a: i64, m_b: i64, n: u32) -> f64 {
        match &self.bs {
            BeamSplitter::ExactT(t) => match self.gpolys.get(n as usize) {
                Some(gp) => gp.eval_f64(m_a, m_b),
                None => GPolynomial::new(n, t).eval_f64(m_a, m_b),
            },
            BeamSplitter::Angle(_) => g_poly_f64(m_a, m_b, n, self.t, self.r),
        }
    }

    /// `f^{(n,m)}_p`; zero when `p > n + m`.
    pub fn f(&self, n: u32, m: u32, p: u32) -> f64 {
        if p > n + m {
            return 0.0;
        }
        if self.c > 0.0 && self.s > 0.0 && m >= p && p >= n {
            self.compact(n, m, p)
        } else {
            self.double_sum(n, m, p)
        }
    }

    /// Amplitude for detecting `(m_a, m_b)` given `n` photons in mode `a`:
    /// `f^{(n, m_a+m_b-n)}_{m_a}`, zero if `m_a + m_b < n`.
    pub fn detection_amplitude(&self, n: u32, m_a: u32, m_b: u32) -> f64 {
        if m_a + m_b < n {
            return 0.0;
        }
        self.f(n, m_a + m_b - n, m_a)
    }

    /// Compact form: prefactor, trig powers with non-negative exponents, g.
    pub fn compact(&self, n: u32, m: u32, p: u32) -> f64 {
        debug_assert!(m >= p && p >= n);
        let g = self.g_f64(p as i64, (m + n - p) as i64, n);
        if g == 0.0 {
            return 0.0;
        }
        let sign = if (p + n) % 2 == 0 { 1.0 } else { -1.0 };
        let pref = libm::sqrt(factorial_ratio(&[m, 0], &[n, p, n + m - p]));
        sign * pref * libm::pow(self.c, (m - p) as f64) * libm::pow(self.s, (p - n) as f64) * g
    }

    /// Fully expanded double sum; no negative powers anywhere.
    pub fn double_sum(&self, n: u32, m: u32, p: u32) -> f64 {
        let (c, s) = (self.c, self.s);
        let norm = libm::sqrt(factorial_ratio(&[p, n + m - p], &[n, m]));
        let q_lo = p.saturating_sub(m);
        let q_hi = p.min(n);
        let mut acc = 0.0;
        for q in q_lo..=q_hi {
            let qp = p - q;
            let exp_c = m + q - qp;
            let exp_s = n - q + qp;
            let comb = binomial_f64(n, q) * binomial_f64(m, qp) * norm;
            let sign = if qp % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * comb * libm::pow(c, exp_c as f64) * libm::pow(s, exp_s as f64);
        }
        acc
    }
}

fn binomial_f64(n: u32, k: u32) -> f64 {
    match binomial_u128(n as u64, k as i64) {
        Some(b) => b as f64,
        None => factorial_ratio(&[n], &[k, n - k]),
    }
}

/// Beam-splitter amplitude `f^{(n,m)}_p`.
pub fn bs_coefficient(n: u32, m: u32, p: u32, bs: &BeamSplitter) -> Result<f64> {
    if p > n + m {
        return Err(domain!("output index p={p} outside [0, {}]", n + m));
    }
    Ok(AmplitudeEvaluator::new(bs).f(n, m, p))
}

/// Output amplitudes of `|n, m⟩`, indexed by `p` in `0..=n+m`.
pub fn transform_fock_pair(n: u32, m: u32, bs: &BeamSplitter) -> Vec<f64> {
    let ev = AmplitudeEvaluator::new(bs);
    (0..=n + m).map(|p| ev.f(n, m, p)).collect()
}

/// `m! / (n! p! (n+m-p)!)`, the square of the amplitude prefactor.
fn prefactor_sq(n: u32, m: u32, p: u32) -> BigRational {
    use crate::numerics::factorial;
    BigRational::new(
        factorial(m as u64),
        factorial(n as u64) * factorial(p as u64) * factorial((n + m - p) as u64),
    )
}

/// Exact probability `|f^{(n, m_a+m_b-n)}_{m_a}|²` at rational `T`.
///
/// Every square root appears squared, so the result is rational. Zero when
/// `m_a + m_b < n`.
pub fn bs_prob_exact(n: u32, m_a: u32, m_b: u32, t: &BigRational) -> BigRational {
    if m_a + m_b < n {
        return BigRational::zero();
    }
    let r = BigRational::one() - t;
    if t.is_zero() || r.is_zero() {
        return bs_prob_exact_double_sum(n, m_a, m_b, t);
    }
    let g = GPolynomial::new(n, t).eval(m_a as i64, m_b as i64);
    if g.is_zero() {
        return g;
    }
    let m = m_a + m_b - n;
    prefactor_sq(n, m, m_a)
        * rational_pow(t, m_b as i64 - n as i64)
        * rational_pow(&r, m_a as i64 - n as i64)
        * &g
        * &g
}

/// Exact `|f|²` from the expanded double sum, factoring the common odd
/// powers of `cos(θ/2)` and `sin(θ/2)` out before squaring.
pub fn bs_prob_exact_double_sum(n: u32, m_a: u32, m_b: u32, t: &BigRational) -> BigRational {
    if m_a + m_b < n {
        return BigRational::zero();
    }
    let m = m_a + m_b - n;
    let p = m_a;
    let r = BigRational::one() - t;
    // all exponents of cos share the parity of m - p, those of sin of n + p
    let par_c = (m + p) % 2;
    let par_s = (n + p) % 2;
    let q_lo = p.saturating_sub(m);
    let q_hi = p.min(n);
    let mut inner = BigRational::zero();
    for q in q_lo..=q_hi {
        let qp = p - q;
        let exp_c = m + q - qp;
        let exp_s = n - q + qp;
        let mut term = BigRational::from_integer(binomial(n as u64, q as i64) * binomial(m as u64, qp as i64))
            * rational_pow(t, ((exp_c - par_c) / 2) as i64)
            * rational_pow(&r, ((exp_s - par_s) / 2) as i64);
        if qp % 2 == 1 {
            term = -term;
        }
        inner += term;
    }
    let norm = BigRational::new(
        crate::numerics::factorial(p as u64) * crate::numerics::factorial((n + m - p) as u64),
        crate::numerics::factorial(n as u64) * crate::numerics::factorial(m as u64),
    );
    norm * rational_pow(t, par_c as i64) * rational_pow(&r, par_s as i64) * &inner * &inner
}

/// Residual `ρ` with `g(m', m' | n) = (T - R) ρ` for odd `n`.
///
/// Each pair of terms `q`, `n-q` is combined into `(TR)^q (T^{n-2q} - R^{n-2q})`
/// and `T^k - R^k = (T - R) Σ_{j=1}^{k} T^{k-j} R^{j-1}`.
pub fn cos_factor_residual(m_prime: i64, n: u32, bs: &BeamSplitter) -> Result<RealValue> {
    if n % 2 == 0 {
        return Err(domain!("cos θ factorization needs odd n, got {n}"));
    }
    let half = (n - 1) / 2;
    match bs {
        BeamSplitter::ExactT(t) => {
            let r = BigRational::one() - t;
            let mut acc = BigRational::zero();
            for q in 0..=half {
                let mut coef = BigRational::from_integer(
                    binomial(n as u64, q as i64) * falling_factorial(m_prime, n - q) * falling_factorial(m_prime, q),
                );
                if coef.is_zero() {
                    continue;
                }
                if q % 2 == 1 {
                    coef = -coef;
                }
                let k = n - 2 * q;
                let mut geo = BigRational::zero();
                for j in 1..=k {
                    geo += rational_pow(t, (k - j) as i64) * rational_pow(&r, (j - 1) as i64);
                }
                acc += coef * rational_pow(&(t * &r), q as i64) * geo;
            }
            Ok(RealValue::Exact(acc))
        }
        BeamSplitter::Angle(_) => {
            let (t, r) = (bs.transmittance(), bs.reflectance());
            let mut acc = 0.0;
            for q in 0..=half {
                let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                let coef = sign
                    * binomial_u128(n as u64, q as i64).map_or(f64::NAN, |b| b as f64)
                    * falling_factorial_f64(m_prime, n - q)
                    * falling_factorial_f64(m_prime, q);
                let k = n - 2 * q;
                let geo: f64 = (1..=k)
                    .map(|j| libm::pow(t, (k - j) as f64) * libm::pow(r, (j - 1) as f64))
                    .sum();
                acc += coef * libm::pow(t * r, q as f64) * geo;
            }
            Ok(RealValue::Float(acc))
        }
    }
}

/// `T - R` for the setting (`cos θ`), exact when possible.
pub fn cos_theta(bs: &BeamSplitter) -> RealValue {
    match bs {
        BeamSplitter::ExactT(t) => RealValue::Exact(t + t - BigRational::one()),
        BeamSplitter::Angle(theta) => RealValue::Float(libm::cos(*theta)),
    }
}
