//! Single-mode input states in the Fock basis.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Default normalization tolerance `ε_norm`.
pub const EPS_NORM: f64 = 1e-10;

/// Tolerance for Hermiticity of density matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Upper limit on automatically chosen cutoffs.
pub const MAX_AUTO_CUTOFF: usize = 100_000;

/// How a constructor picks the largest photon number it keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Cutoff {
    /// Smallest cutoff whose discarded tail mass is below [`EPS_NORM`].
    #[default]
    Auto,
    /// Given cutoff; a tail mass of [`EPS_NORM`] or more is an error.
    Fixed(usize),
    /// Given cutoff; any tail is kept as a reported deficit.
    Truncate(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// Result of [`PureState::validate`] / [`MixedState::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateReport {
    /// `1 - Σ|c_n|²` or `1 - tr ρ`.
    pub deficit: f64,
    /// `max |ρ_{mm'} - conj(ρ_{m'm})|`; zero for pure states.
    pub hermiticity_residual: f64,
    pub parity: Parity,
}

impl StateReport {
    pub fn is_valid(&self, eps: f64) -> bool {
        self.deficit < eps && self.deficit > -eps && self.hermiticity_residual <= HERMITIAN_TOL
    }
}

fn parity_of(weights: impl Iterator<Item = (usize, bool)>) -> Parity {
    let (mut even, mut odd) = (false, false);
    for (n, nonzero) in weights {
        if nonzero {
            if n % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
    }
    match (even, odd) {
        (_, false) => Parity::Even,
        (false, true) => Parity::Odd,
        (true, true) => Parity::Mixed,
    }
}

/// `Σ_n c_n |n⟩` for `n = 0..=cutoff`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    label: String,
}

impl PureState {
    /// Checks `Σ|c_n|² <= 1 + ε_norm` and `>= 1 - ε_norm`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        Self::from_amplitudes_with(amplitudes, label, EPS_NORM)
    }

    pub fn from_amplitudes_with(amplitudes: Vec<Complex64>, label: impl Into<String>, eps: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(domain!("state needs at least one amplitude"));
        }
        if amplitudes.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(domain!("non-finite amplitude"));
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if norm > 1.0 + eps {
            return Err(Error::Overnormalized(norm));
        }
        if norm < 1.0 - eps {
            return Err(Error::Truncation {
                cutoff: amplitudes.len() - 1,
                tail: 1.0 - norm,
                tolerance: eps,
            });
        }
        Ok(PureState {
            amplitudes,
            label: label.into(),
        })
    }

    fn unchecked(amplitudes: Vec<Complex64>, label: String) -> Self {
        PureState { amplitudes, label }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `c_n`, zero beyond the cutoff.
    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amplitudes.get(n).copied().unwrap_or_default()
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn parity(&self) -> Parity {
        parity_of(self.amplitudes.iter().enumerate().map(|(n, c)| (n, *c != Complex64::default())))
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amplitudes.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum()
    }

    /// Photon number when the state is a single Fock state.
    pub fn as_fock(&self) -> Option<usize> {
        let mut it = self.amplitudes.iter().enumerate().filter(|(_, c)| **c != Complex64::default());
        let (n, c) = it.next()?;
        (it.next().is_none() && (c.norm_sqr() - 1.0).abs() <= EPS_NORM).then_some(n)
    }

    pub fn validate(&self) -> StateReport {
        StateReport {
            deficit: 1.0 - self.norm_sqr(),
            hermiticity_residual: 0.0,
            parity: self.parity(),
        }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_mixed(&self) -> MixedState {
        let dim = self.amplitudes.len();
        let mut rho = vec![Complex64::default(); dim * dim];
        for (i, ci) in self.amplitudes.iter().enumerate() {
            for (j, cj) in self.amplitudes.iter().enumerate() {
                rho[i * dim + j] = ci * cj.conj();
            }
        }
        MixedState {
            dim,
            rho,
            label: self.label.clone(),
        }
    }
}

/// Density matrix `ρ_{m,m'}` for `m, m' = 0..=cutoff`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    dim: usize,
    rho: Vec<Complex64>,
    label: String,
}

impl MixedState {
    /// Checks Hermiticity and `1 - ε_norm <= tr ρ <= 1 + ε_norm`.
    pub fn from_matrix(dim: usize, rho: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        Self::from_matrix_with(dim, rho, label, EPS_NORM)
    }

    pub fn from_matrix_with(dim: usize, rho: Vec<Complex64>, label: impl Into<String>, eps: f64) -> Result<Self> {
        if dim == 0 || rho.len() != dim * dim {
            return Err(domain!("density matrix has {} entries, expected {dim}²", rho.len()));
        }
        if rho.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(domain!("non-finite density-matrix entry"));
        }
        let state = MixedState {
            dim,
            rho,
            label: label.into(),
        };
        let residual = state.hermiticity_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian(residual));
        }
        let trace = state.trace();
        if trace > 1.0 + eps {
            return Err(Error::Overnormalized(trace));
        }
        if trace < 1.0 - eps {
            return Err(Error::Truncation {
                cutoff: dim - 1,
                tail: 1.0 - trace,
                tolerance: eps,
            });
        }
        if (0..dim).any(|m| state.get(m, m).re < -HERMITIAN_TOL) {
            return Err(domain!("density matrix has a negative diagonal entry"));
        }
        Ok(state)
    }

    /// Diagonal state `Σ p_m |m⟩⟨m|`.
    pub fn from_diagonal(weights: &[f64], label: impl Into<String>) -> Result<Self> {
        let dim = weights.len();
        let mut rho = vec![Complex64::default(); dim * dim];
        for (m, w) in weights.iter().enumerate() {
            rho[m * dim + m] = Complex64::new(*w, 0.0);
        }
        Self::from_matrix(dim, rho, label)
    }

    fn diagonal_unchecked(weights: &[f64], label: String) -> Self {
        let dim = weights.len();
        let mut rho = vec![Complex64::default(); dim * dim];
        for (m, w) in weights.iter().enumerate() {
            rho[m * dim + m] = Complex64::new(*w, 0.0);
        }
        MixedState { dim, rho, label }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> usize {
        self.dim - 1
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `ρ_{m,m'}`, zero outside the stored block.
    pub fn get(&self, m: usize, m_prime: usize) -> Complex64 {
        if m < self.dim && m_prime < self.dim {
            self.rho[m * self.dim + m_prime]
        } else {
            Complex64::default()
        }
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.rho
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|m| self.get(m, m).re).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|m| self.get(m, m).re).sum()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for m in 0..self.dim {
            for mp in m..self.dim {
                worst = worst.max((self.get(m, mp) - self.get(mp, m).conj()).norm());
            }
        }
        worst
    }

    pub fn parity(&self) -> Parity {
        parity_of((0..self.dim).map(|m| (m, self.get(m, m).re != 0.0)))
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim).map(|m| m as f64 * self.get(m, m).re).sum()
    }

    pub fn validate(&self) -> StateReport {
        StateReport {
            deficit: 1.0 - self.trace(),
            hermiticity_residual: self.hermiticity_residual(),
            parity: self.parity(),
        }
    }
}

/// Either kind of single-mode state.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(MixedState),
}

impl State {
    pub fn cutoff(&self) -> usize {
        match self {
            State::Pure(s) => s.cutoff(),
            State::Mixed(s) => s.cutoff(),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            State::Pure(s) => s.label(),
            State::Mixed(s) => s.label(),
        }
    }

    pub fn validate(&self) -> StateReport {
        match self {
            State::Pure(s) => s.validate(),
            State::Mixed(s) => s.validate(),
        }
    }

    pub fn to_mixed(&self) -> MixedState {
        match self {
            State::Pure(s) => s.to_mixed(),
            State::Mixed(s) => s.clone(),
        }
    }

    /// Total probability carried (norm or trace).
    pub fn mass(&self) -> f64 {
        1.0 - self.validate().deficit
    }
}

impl From<PureState> for State {
    fn from(s: PureState) -> Self {
        State::Pure(s)
    }
}

impl From<MixedState> for State {
    fn from(s: MixedState) -> Self {
        State::Mixed(s)
    }
}

/// Keeps generating terms until the tail drops below `EPS_NORM` (`Auto`),
/// or up to a given cutoff. `next(n)` yields the `n`-th amplitude.
fn build_pure(
    cutoff: Cutoff,
    label: String,
    mut next: impl FnMut(usize) -> Complex64,
) -> Result<PureState> {
    let mut amps = Vec::new();
    let mut mass = 0.0;
    match cutoff {
        Cutoff::Auto => loop {
            let n = amps.len();
            let c = next(n);
            mass += c.norm_sqr();
            amps.push(c);
            if 1.0 - mass < EPS_NORM {
                break;
            }
            if n >= MAX_AUTO_CUTOFF {
                return Err(Error::Truncation {
                    cutoff: n,
                    tail: 1.0 - mass,
                    tolerance: EPS_NORM,
                });
            }
        },
        Cutoff::Fixed(n_max) | Cutoff::Truncate(n_max) => {
            for n in 0..=n_max {
                let c = next(n);
                mass += c.norm_sqr();
                amps.push(c);
            }
            if matches!(cutoff, Cutoff::Fixed(_)) && 1.0 - mass >= EPS_NORM {
                return Err(Error::Truncation {
                    cutoff: n_max,
                    tail: 1.0 - mass,
                    tolerance: EPS_NORM,
                });
            }
        }
    }
    Ok(PureState::unchecked(amps, label))
}

/// `|n⟩` padded with zeros up to `cutoff`.
pub fn fock(n: usize, cutoff: usize) -> Result<PureState> {
    if n > cutoff {
        return Err(domain!("Fock state |{n}⟩ does not fit below cutoff {cutoff}"));
    }
    let mut amps = vec![Complex64::default(); cutoff + 1];
    amps[n] = Complex64::new(1.0, 0.0);
    Ok(PureState::unchecked(amps, format!("fock:{n}")))
}

/// Normalized `Σ w_k |n_k⟩`; the cutoff is the largest `n_k`.
pub fn superposition(terms: &[(usize, Complex64)]) -> Result<PureState> {
    let cutoff = terms.iter().map(|(n, _)| *n).max().ok_or_else(|| domain!("empty superposition"))?;
    let mut amps = vec![Complex64::default(); cutoff + 1];
    for (n, w) in terms {
        amps[*n] += w;
    }
    let norm = libm::sqrt(amps.iter().map(|c| c.norm_sqr()).sum::<f64>());
    if norm == 0.0 || !norm.is_finite() {
        return Err(domain!("superposition has zero norm"));
    }
    for c in &mut amps {
        *c /= norm;
    }
    let support: Vec<String> = terms.iter().map(|(n, _)| format!("{n}")).collect();
    Ok(PureState::unchecked(amps, format!("superposition:{}", support.join(","))))
}

/// `c_m = e^{-|β|²/2} β^m / √(m!)`.
pub fn coherent(beta: Complex64, cutoff: Cutoff) -> Result<PureState> {
    if !beta.re.is_finite() || !beta.im.is_finite() {
        return Err(domain!("non-finite coherent amplitude"));
    }
    let mut c = Complex64::new(libm::exp(-beta.norm_sqr() / 2.0), 0.0);
    build_pure(cutoff, format!("coherent:beta={beta}"), |m| {
        if m > 0 {
            c = c * beta / libm::sqrt(m as f64);
        }
        c
    })
}

/// Bose-Einstein `ρ_{mm} = n̄^m / (1+n̄)^{m+1}`; the tail beyond `N` is
/// `(n̄/(1+n̄))^{N+1}`.
pub fn thermal(nbar: f64, cutoff: Cutoff) -> Result<MixedState> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(domain!("thermal mean photon number {nbar} must be finite and >= 0"));
    }
    let x = nbar / (1.0 + nbar);
    let tail = |n_max: usize| libm::pow(x, n_max as f64 + 1.0);
    let n_max = match cutoff {
        Cutoff::Auto => {
            if x == 0.0 {
                0
            } else {
                let mut n = (libm::log(EPS_NORM) / libm::log(x)) as usize;
                while n > 0 && tail(n - 1) < EPS_NORM {
                    n -= 1;
                }
                while tail(n) >= EPS_NORM {
                    n += 1;
                }
                if n > MAX_AUTO_CUTOFF {
                    return Err(Error::Truncation {
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
                return Err(Error::Truncation {
                    cutoff: n,
                    tail: tail(n),
                    tolerance: EPS_NORM,
                });
            }
            n
        }
        Cutoff::Truncate(n) => n,
    };
    let mut weights = Vec::with_capacity(n_max + 1);
    let mut w = 1.0 / (1.0 + nbar);
    for _ in 0..=n_max {
        weights.push(w);
        w *= x;
    }
    Ok(MixedState::diagonal_unchecked(&weights, format!("thermal:nbar={nbar}")))
}

/// Odd cat `(|α⟩ - |-α⟩)/N` with `N = (2 - 2e^{-2|α|²})^{1/2}`.
pub fn odd_cat(alpha: Complex64, cutoff: Cutoff) -> Result<PureState> {
    let a2 = alpha.norm_sqr();
    if a2 == 0.0 || !a2.is_finite() {
        return Err(domain!("odd cat state needs 0 < |α| < ∞"));
    }
    let norm = libm::sqrt(-2.0 * libm::expm1(-2.0 * a2));
    // c runs through e^{-|α|²/2} α^n/√(n!) for every n
    let mut c = Complex64::new(libm::exp(-a2 / 2.0), 0.0);
    let scale = 2.0 / norm;
    build_pure(cutoff, format!("oddcat:alpha={alpha}"), |n| {
        if n > 0 {
            c = c * alpha / libm::sqrt(n as f64);
        }
        if n % 2 == 1 {
            c * scale
        } else {
            Complex64::default()
        }
    })
}

/// Single-mode squeezed vacuum with
/// `c_{2n} = e^{inφ} tanh^n(r) √((2n)!) / (n! 2^n) / √(cosh r)`.
pub fn smss(r: f64, phi: f64, cutoff: Cutoff) -> Result<PureState> {
    squeezed_family(r, phi, cutoff, false)
}

/// `a†|ξ⟩ / cosh r`, supported on odd photon numbers:
/// `c_{2n+1} = √(2n+1) c^{(ξ)}_{2n} / cosh r`. The norm is exact since
/// `⟨ξ|a a†|ξ⟩ = cosh² r`.
pub fn photon_added_smss(r: f64, phi: f64, cutoff: Cutoff) -> Result<PureState> {
    squeezed_family(r, phi, cutoff, true)
}

fn squeezed_family(r: f64, phi: f64, cutoff: Cutoff, added: bool) -> Result<PureState> {
    if !(r >= 0.0) || !r.is_finite() || !phi.is_finite() {
        return Err(domain!("squeezing needs finite r >= 0 and finite φ, got r={r}, φ={phi}"));
    }
    let t = libm::tanh(r);
    let ch = libm::cosh(r);
    let step = Complex64::from_polar(t, phi);
    let mut c = Complex64::new(1.0 / libm::sqrt(ch), 0.0);
    let label = if added {
        format!("pasmss:r={r}")
    } else {
        format!("smss:r={r}")
    };
    let offset = usize::from(added);
    build_pure(cutoff, label, |k| {
        if k < offset || (k - offset) % 2 == 1 {
            return Complex64::default();
        }
        let two_n = k - offset;
        if two_n > 0 {
            let n = (two_n / 2) as f64;
            c = c * step * libm::sqrt((2.0 * n - 1.0) / (2.0 * n));
        }
        if added {
            c * libm::sqrt(two_n as f64 + 1.0) / ch
        } else {
            c
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn fock_states() {
        let vac = fock(0, 5).unwrap();
        assert_eq!(vac.parity(), Parity::Even);
        assert_eq!(vac.cutoff(), 5);
        assert_eq!(fock(1, 5).unwrap().parity(), Parity::Odd);
        assert_eq!(fock(3, 10).unwrap().parity(), Parity::Odd);
        for k in 0..6 {
            assert_eq!(fock(2 * k, 12).unwrap().parity(), Parity::Even);
        }
        assert!(fock(6, 5).is_err());
        let report = fock(1, 5).unwrap().validate();
        assert_eq!(report.deficit, 0.0);
        assert_eq!(report.parity, Parity::Odd);
        assert_eq!(fock(4, 9).unwrap().as_fock(), Some(4));
    }

    #[test]
    fn coherent_examples() {
        let vac = coherent(re(0.0), Cutoff::Auto).unwrap();
        assert_eq!(vac.as_fock(), Some(0));
        let s = coherent(re(3.0), Cutoff::Fixed(40)).unwrap();
        assert!((s.mean_photon_number() - 9.0).abs() < 1e-6);
        let s = coherent(re(libm::sqrt(3.0)), Cutoff::Fixed(25)).unwrap();
        assert!((s.mean_photon_number() - 3.0).abs() < 1e-6);
        assert!(coherent(re(3.0), Cutoff::Fixed(10)).is_err());
        let short = coherent(re(3.0), Cutoff::Truncate(10)).unwrap();
        let report = short.validate();
        assert!(report.deficit > 0.1, "{report:?}");
    }

    /// Poisson tail mass oracle: `1 - Σ_{k<=N} e^{-μ} μ^k/k!`.
    fn poisson_tail(mu: f64, n: usize) -> f64 {
        let mut p = libm::exp(-mu);
        let mut acc = p;
        for k in 1..=n {
            p *= mu / k as f64;
            acc += p;
        }
        1.0 - acc
    }

    #[test]
    fn coherent_poisson_statistics() {
        for beta in [0.5, 1.0, 2.0, 3.0] {
            let s = coherent(Complex64::from_polar(beta, 0.7), Cutoff::Auto).unwrap();
            let mu = beta * beta;
            let mean = s.mean_photon_number();
            let second: f64 = s.amplitudes().iter().enumerate().map(|(n, c)| (n * n) as f64 * c.norm_sqr()).sum();
            assert!((mean - mu).abs() < 1e-8);
            assert!((second - mean * mean - mu).abs() < 1e-7);
            assert!(s.validate().deficit < EPS_NORM);
            let t = coherent(re(beta), Cutoff::Truncate(4)).unwrap();
            assert!((t.validate().deficit - poisson_tail(mu, 4)).abs() < 1e-14);
        }
    }

    #[test]
    fn thermal_examples() {
        let vac = thermal(0.0, Cutoff::Auto).unwrap();
        assert_eq!(vac.dim(), 1);
        assert_eq!(vac.get(0, 0), re(1.0));
        let t = thermal(1.0, Cutoff::Truncate(30)).unwrap();
        assert_eq!(t.get(0, 0), re(0.5));
        let t9 = thermal(9.0, Cutoff::Fixed(250)).unwrap();
        assert!((t9.mean_photon_number() - 9.0).abs() < 1e-4);
        let auto = thermal(9.0, Cutoff::Auto).unwrap();
        assert!(auto.validate().deficit < EPS_NORM);
        assert!(thermal(9.0, Cutoff::Fixed(auto.cutoff() - 1)).is_err());
        assert_eq!(thermal(9.0, Cutoff::Truncate(120)).unwrap().validate().hermiticity_residual, 0.0);
        let tail = 1.0 - thermal(9.0, Cutoff::Truncate(120)).unwrap().trace();
        assert!((tail - libm::pow(0.9, 121.0)).abs() < 1e-14);
        assert!(thermal(-1.0, Cutoff::Auto).is_err());
    }

    #[test]
    fn odd_cat_examples() {
        for alpha in [Complex64::new(2.0, 0.0), Complex64::new(0.3, 0.4), Complex64::from_polar(1.5, 2.0)] {
            let s = odd_cat(alpha, Cutoff::Auto).unwrap();
            assert_eq!(s.parity(), Parity::Odd);
            assert!(s.amplitudes().iter().step_by(2).all(|c| *c == Complex64::default()));
            assert!(s.validate().deficit.abs() < EPS_NORM);
        }
        let s = odd_cat(re(2.0), Cutoff::Fixed(25)).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        let a = 0.01;
        let s = odd_cat(re(a), Cutoff::Auto).unwrap();
        let ratio = s.amplitude(3).norm_sqr() / s.amplitude(1).norm_sqr();
        assert!((ratio / (libm::pow(a, 4.0) / 6.0) - 1.0).abs() < 1e-10);
        assert!(odd_cat(re(0.0), Cutoff::Auto).is_err());
    }

    #[test]
    fn squeezed_examples() {
        let s = photon_added_smss(0.0, 0.0, Cutoff::Auto).unwrap();
        assert_eq!(s.as_fock(), Some(1));
        for r in [0.1, 0.5, 1.0] {
            let s = photon_added_smss(r, 0.3, Cutoff::Auto).unwrap();
            assert_eq!(s.parity(), Parity::Odd);
            assert!(s.validate().deficit.abs() < EPS_NORM);
            let v = smss(r, 0.3, Cutoff::Auto).unwrap();
            assert_eq!(v.parity(), Parity::Even);
            assert!(v.validate().deficit.abs() < EPS_NORM);
            let sinh = libm::sinh(r);
            assert!((v.mean_photon_number() - sinh * sinh).abs() < 1e-8);
        }
        let s = photon_added_smss(0.5, 0.0, Cutoff::Fixed(40)).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        assert!(photon_added_smss(-0.1, 0.0, Cutoff::Auto).is_err());
    }

    #[test]
    fn photon_added_norm_matches_direct_renormalization() {
        // apply a† to the squeezed vacuum and normalize numerically
        for r in [0.2, 0.5, 0.9] {
            let v = smss(r, 0.0, Cutoff::Fixed(200)).unwrap();
            let mut added: Vec<Complex64> = vec![Complex64::default(); v.cutoff() + 2];
            for (n, c) in v.amplitudes().iter().enumerate() {
                added[n + 1] = c * libm::sqrt(n as f64 + 1.0);
            }
            let norm = libm::sqrt(added.iter().map(|c| c.norm_sqr()).sum::<f64>());
            let s = photon_added_smss(r, 0.0, Cutoff::Fixed(201)).unwrap();
            for (n, c) in added.iter().enumerate() {
                assert!((c / norm - s.amplitude(n)).norm() < 1e-14);
            }
            assert!((norm - libm::cosh(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn superposition_and_custom() {
        let s = superposition(&[(1, re(1.0)), (3, re(1.0))]).unwrap();
        assert_eq!(s.parity(), Parity::Odd);
        assert!((s.amplitude(1).re - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(superposition(&[(0, re(1.0)), (1, re(1.0))]).unwrap().parity(), Parity::Mixed);
        assert!(superposition(&[]).is_err());
        assert!(PureState::from_amplitudes(vec![re(1.0), re(1.0)], "x").is_err());
        assert!(PureState::from_amplitudes(vec![re(0.5)], "x").is_err());
        let bad = vec![re(0.5), Complex64::new(0.0, 0.1), Complex64::new(0.0, 0.2), re(0.5)];
        assert!(matches!(MixedState::from_matrix(2, bad, "x"), Err(Error::NotHermitian(_))));
        let ok = MixedState::from_matrix(2, vec![re(0.5), re(0.1), re(0.1), re(0.5)], "x").unwrap();
        assert_eq!(ok.parity(), Parity::Mixed);
        let rho = s.to_mixed();
        assert!(rho.validate().is_valid(EPS_NORM));
        assert!((rho.get(1, 3).re - 0.5).abs() < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn constructors_validate(beta in 0.0f64..4.0, phase in 0.0f64..6.3, nbar in 0.0f64..10.0, r in 0.0f64..1.2) {
            let c = coherent(Complex64::from_polar(beta, phase), Cutoff::Auto).unwrap();
            proptest::prop_assert!(c.validate().deficit < EPS_NORM);
            let t = thermal(nbar, Cutoff::Auto).unwrap();
            proptest::prop_assert!(t.validate().deficit < EPS_NORM);
            if beta > 0.0 {
                let o = odd_cat(Complex64::from_polar(beta, phase), Cutoff::Auto).unwrap();
                proptest::prop_assert!(o.validate().deficit.abs() < EPS_NORM);
                proptest::prop_assert_eq!(o.parity(), Parity::Odd);
            }
            let p = photon_added_smss(r, phase, Cutoff::Auto).unwrap();
            proptest::prop_assert!(p.validate().deficit.abs() < EPS_NORM);
            proptest::prop_assert_eq!(p.parity(), Parity::Odd);
        }
    }
}
