//! Collective two-level atoms through the Schwinger map
//! `|J, M⟩ <-> |J+M, J-M⟩`: rotation elements are beam-splitter amplitudes,
//! `d^J_{M',M}(θ) = f^{(J+M, J-M)}_{J+M'}(θ)`.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::bs::{AmplitudeEvaluator, BeamSplitter, FockPair};
use crate::error::{domain, Result};
use crate::states::EPS_NORM;

/// A half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Half(i64);

impl Half {
    pub const ZERO: Half = Half(0);

    pub const fn from_twice(twice: i64) -> Self {
        Half(twice)
    }

    pub const fn integer(n: i64) -> Self {
        Half(2 * n)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

fn check_jm(j: Half, m: Half) -> Result<()> {
    if j.0 < 0 {
        return Err(domain!("J = {j} is negative"));
    }
    if m.0.abs() > j.0 {
        return Err(domain!("|M| = |{m}| exceeds J = {j}"));
    }
    if (j.0 - m.0) % 2 != 0 {
        return Err(domain!("J - M = {j} - {m} is not an integer"));
    }
    Ok(())
}

/// `(n, m) = (J + M, J - M)`.
pub fn jm_to_fock(j: Half, m: Half) -> Result<FockPair> {
    check_jm(j, m)?;
    Ok(FockPair {
        n: ((j.0 + m.0) / 2) as u32,
        m: ((j.0 - m.0) / 2) as u32,
    })
}

/// `d^J_{M',M}(θ)` as the amplitude `f^{(J+M, J-M)}_{J+M'}(θ)`.
pub fn wigner_d(j: Half, m_prime: Half, m: Half, theta: f64) -> Result<f64> {
    check_jm(j, m)?;
    check_jm(j, m_prime)?;
    let bs = BeamSplitter::angle(theta)?;
    let pair = jm_to_fock(j, m)?;
    let p = ((j.0 + m_prime.0) / 2) as u32;
    Ok(AmplitudeEvaluator::new(&bs).f(pair.n, pair.m, p))
}

/// `Σ_M c_M |J, M⟩`, amplitudes indexed by `M = -J, -J+1, ..., J`.
#[derive(Clone, Debug, PartialEq)]
pub struct AngularState {
    j: Half,
    amplitudes: Vec<Complex64>,
}

impl AngularState {
    pub fn new(j: Half, amplitudes: Vec<Complex64>) -> Result<Self> {
        if j.0 < 0 {
            return Err(domain!("J = {j} is negative"));
        }
        if amplitudes.len() as i64 != j.0 + 1 {
            return Err(domain!("J = {j} needs {} amplitudes, got {}", j.0 + 1, amplitudes.len()));
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > EPS_NORM {
            return Err(domain!("angular state norm {norm} differs from 1"));
        }
        Ok(AngularState { j, amplitudes })
    }

    /// `|J, M⟩`.
    pub fn basis(j: Half, m: Half) -> Result<Self> {
        check_jm(j, m)?;
        let mut amplitudes = alloc::vec![Complex64::default(); (j.0 + 1) as usize];
        amplitudes[((m.0 + j.0) / 2) as usize] = Complex64::new(1.0, 0.0);
        Ok(AngularState { j, amplitudes })
    }

    pub fn j(&self) -> Half {
        self.j
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `c_M`.
    pub fn amplitude(&self, m: Half) -> Complex64 {
        let idx = (m.0 + self.j.0) / 2;
        self.amplitudes.get(idx as usize).copied().unwrap_or_default()
    }

    /// Values of `M` from `-J` to `J`.
    pub fn ms(&self) -> impl Iterator<Item = Half> {
        let j = self.j.0;
        (0..=j).map(move |i| Half(-j + 2 * i))
    }
}

/// `P(M') = |Σ_M c_M d^J_{M',M}(θ)|²` for `M' = -J..=J`.
pub fn atomic_distribution(state: &AngularState, theta: f64) -> Result<Vec<f64>> {
    let ev = AmplitudeEvaluator::new(&BeamSplitter::angle(theta)?);
    let two_j = state.j.0 as u32;
    Ok((0..=two_j)
        .map(|p| {
            state
                .amplitudes
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != Complex64::default())
                .map(|(i, c)| {
                    // i = J + M = n, J - M = 2J - i
                    c * ev.f(i as u32, two_j - i as u32, p)
                })
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect())
}

/// `P(M' = 0)`, defined only for integer `J`.
pub fn central_probability(state: &AngularState, theta: f64) -> Result<Option<f64>> {
    if !state.j.is_integer() {
        return Ok(None);
    }
    let dist = atomic_distribution(state, theta)?;
    Ok(Some(dist[(state.j.0 / 2) as usize]))
}

/// One row of [`cnl_sweep`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub j: Half,
    pub p_center: Option<f64>,
}

/// `P(M'=0)` for one state per atom number; the atomic zeros at `θ = π/2`
/// are spread over different `J` rather than forming one line.
pub fn cnl_sweep(states: &[AngularState], theta: f64) -> Result<Vec<SweepRow>> {
    states
        .iter()
        .map(|s| {
            Ok(SweepRow {
                j: s.j,
                p_center: central_probability(s, theta)?,
            })
        })
        .collect()
}

/// Equal-weight superposition of the `|J, M⟩` with `J + M` odd; `None` for
/// `J = 0`, which has no such component.
pub fn odd_support_state(j: Half) -> Option<AngularState> {
    let count = (0..=j.0).filter(|i| i % 2 == 1).count();
    if count == 0 {
        return None;
    }
    let w = 1.0 / libm::sqrt(count as f64);
    let amplitudes = (0..=j.0)
        .map(|i| Complex64::new(if i % 2 == 1 { w } else { 0.0 }, 0.0))
        .collect();
    Some(AngularState { j, amplitudes })
}
