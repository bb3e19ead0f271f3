//! Lossy number-resolving detection and SPDC heralding.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::joint::JointDistribution;
use crate::states::{Cutoff, EPS_NORM, MAX_AUTO_CUTOFF};

/// Detector efficiencies and the bound on latent photon numbers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossConfig {
    pub eta_a: f64,
    pub eta_b: f64,
    pub source_max: usize,
}

impl LossConfig {
    pub fn new(eta_a: f64, eta_b: f64, source_max: usize) -> Result<Self> {
        check_eta(eta_a)?;
        check_eta(eta_b)?;
        Ok(LossConfig {
            eta_a,
            eta_b,
            source_max,
        })
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain!("efficiency {eta} outside [0, 1]"));
    }
    Ok(())
}

/// `B[m][M] = C(M,m) η^m (1-η)^{M-m}` for `m, M <= size`, built with
/// `B(m,M) = η B(m-1,M-1) + (1-η) B(m,M-1)`.
fn bernoulli_kernel(eta: f64, size: usize) -> Vec<f64> {
    let side = size + 1;
    let mut k = vec![0.0; side * side];
    k[0] = 1.0;
    for big in 1..=size {
        for m in 0..=big {
            let stay = if m <= big - 1 { k[m * side + big - 1] } else { 0.0 };
            let click = if m > 0 { k[(m - 1) * side + big - 1] } else { 0.0 };
            k[m * side + big] = eta * click + (1.0 - eta) * stay;
        }
    }
    k
}

/// `P̃(m_a,m_b) = Σ_{M_a,M_b} B_a(m_a,M_a) B_b(m_b,M_b) P(M_a,M_b)`.
pub fn lossy_distribution(p: &JointDistribution, loss: &LossConfig) -> Result<JointDistribution> {
    check_eta(loss.eta_a)?;
    check_eta(loss.eta_b)?;
    let g = p.grid_max();
    if loss.source_max < g {
        return Err(domain!("source_max {} is below the grid size {g}", loss.source_max));
    }
    let side = g + 1;
    let ka = bernoulli_kernel(loss.eta_a, g);
    let kb = bernoulli_kernel(loss.eta_b, g);
    // tmp = P B_bᵀ, then out = B_a tmp
    let mut tmp = vec![0.0; side * side];
    for big_a in 0..side {
        let row = p.row(big_a);
        for m_b in 0..side {
            let mut acc = 0.0;
            for big_b in m_b..side {
                acc += kb[m_b * side + big_b] * row[big_b];
            }
            tmp[big_a * side + m_b] = acc;
        }
    }
    let mut out = vec![0.0; side * side];
    for m_a in 0..side {
        for big_a in m_a..side {
            let w = ka[m_a * side + big_a];
            if w == 0.0 {
                continue;
            }
            for m_b in 0..side {
                out[m_a * side + m_b] += w * tmp[big_a * side + m_b];
            }
        }
    }
    JointDistribution::from_grid(
        out,
        g,
        p.bs().clone(),
        alloc::format!("{} (eta_a={}, eta_b={})", p.input_label(), loss.eta_a, loss.eta_b),
        p.input_mass(),
    )
}

/// Two-mode squeezed vacuum pair source, `p_n = tanh^{2n}(r) / cosh²(r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezedSource {
    r: f64,
    cutoff: usize,
}

impl SqueezedSource {
    /// The tail beyond `N` is `tanh^{2(N+1)}(r)`.
    pub fn new(r: f64, cutoff: Cutoff) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(domain!("squeezing parameter {r} must be finite and >= 0"));
        }
        let lambda = libm::tanh(r) * libm::tanh(r);
        let tail = |n: usize| libm::pow(lambda, n as f64 + 1.0);
        let cutoff = match cutoff {
            Cutoff::Auto => {
                if lambda == 0.0 {
                    0
                } else {
                    let mut n = (libm::log(EPS_NORM) / libm::log(lambda)) as usize;
                    while n > 0 && tail(n - 1) < EPS_NORM {
                        n -= 1;
                    }
                    while tail(n) >= EPS_NORM && n <= MAX_AUTO_CUTOFF {
                        n += 1;
                    }
                    if n > MAX_AUTO_CUTOFF {
                        return Err(crate::Error::Truncation {
                            cutoff: MAX_AUTO_CUTOFF,
                            tail: tail(MAX_AUTO_CUTOFF),
                            tolerance: EPS_NORM,
                        });
                    }
                    n
                }
            }
            Cutoff::Fixed(n) => {
                if tail(n) >= EPS_NORM {
                    return Err(crate::Error::Truncation {
                        cutoff: n,
                        tail: tail(n),
                        tolerance: EPS_NORM,
                    });
                }
                n
            }
            Cutoff::Truncate(n) => n,
        };
        Ok(SqueezedSource { r, cutoff })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `tanh²(r)`.
    pub fn lambda(&self) -> f64 {
        let t = libm::tanh(self.r);
        t * t
    }

    /// Pair weight mass discarded beyond the cutoff.
    pub fn tail(&self) -> f64 {
        libm::pow(self.lambda(), self.cutoff as f64 + 1.0)
    }
}

/// `p_n = tanh^{2n}(r) / cosh²(r)`.
pub fn tmss_prob(n: usize, source: &SqueezedSource) -> f64 {
    let ch = libm::cosh(source.r);
    libm::pow(source.lambda(), n as f64) / (ch * ch)
}

/// `C(n,t) η^t (1-η)^{n-t}`, the chance of `t` clicks from `n` photons.
pub fn click_prob(n: usize, t: usize, eta: f64) -> f64 {
    if t > n {
        return 0.0;
    }
    if eta == 0.0 {
        return if t == 0 { 1.0 } else { 0.0 };
    }
    if eta == 1.0 {
        return if t == n { 1.0 } else { 0.0 };
    }
    let ln_binom = crate::numerics::ln_factorial(n as u64)
        - crate::numerics::ln_factorial(t as u64)
        - crate::numerics::ln_factorial((n - t) as u64);
    libm::exp(ln_binom + t as f64 * libm::log(eta) + (n - t) as f64 * libm::log1p(-eta))
}

/// `P_D(t) = Σ_{n'=t}^{cutoff} C(n',t) η^t (1-η)^{n'-t} p_{n'}`.
///
/// Terms are generated by their ratio `(n'+1)/(n'+1-t) (1-η) tanh²(r)`.
pub fn spdc_detection_prob(t: usize, eta: f64, source: &SqueezedSource) -> Result<f64> {
    check_eta(eta)?;
    if t > source.cutoff {
        return Err(domain!("t={t} exceeds the source cutoff {}", source.cutoff));
    }
    let lambda = source.lambda();
    let mut term = click_prob(t, t, eta) * tmss_prob(t, source);
    let mut acc = term;
    for n in t..source.cutoff {
        term *= (n + 1) as f64 / (n + 1 - t) as f64 * (1.0 - eta) * lambda;
        if term == 0.0 {
            break;
        }
        acc += term;
    }
    Ok(acc)
}

/// Bayes posterior `P(n'|t) = P_D(t|n') p_{n'} / P_D(t)`.
///
/// Zero for `n' < t`. At `η = 0` only `t = 0` is possible and the posterior
/// is the prior renormalized over the retained photon numbers.
pub fn herald_posterior(n_prime: usize, t: usize, eta: f64, source: &SqueezedSource) -> Result<f64> {
    check_eta(eta)?;
    if t > source.cutoff {
        return Err(domain!("t={t} exceeds the source cutoff {}", source.cutoff));
    }
    if eta == 0.0 && t > 0 {
        return Err(domain!("no clicks are possible at η = 0, got t={t}"));
    }
    if n_prime < t || n_prime > source.cutoff {
        return Ok(0.0);
    }
    let denom = spdc_detection_prob(t, eta, source)?;
    if denom == 0.0 {
        return Err(domain!("detection of t={t} has zero probability"));
    }
    Ok(click_prob(n_prime, t, eta) * tmss_prob(n_prime, source) / denom)
}

/// `10 log₁₀(e^{-2r})`.
pub fn squeezing_db(r: f64) -> f64 {
    -20.0 * r / core::f64::consts::LN_10
}
