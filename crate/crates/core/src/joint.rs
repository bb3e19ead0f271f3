//! Output joint photon-number distributions `P(m_a, m_b)`.
//!
//! A detection of `(m_a, m_b)` fixes the total `M = m_a + m_b`; an input
//! component `|n, M-n⟩` contributes through `f^{(n, M-n)}_{m_a}`. Every path
//! below is the general trace formula restricted to a particular input
//! structure.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use crate::bs::{bs_prob_exact, AmplitudeEvaluator, BeamSplitter};
use crate::error::{domain, Error, Result};
use crate::states::{MixedState, PureState, State, EPS_NORM, HERMITIAN_TOL};

/// Rounding noise below which a negative entry is reported as zero.
const NEGATIVE_NOISE: f64 = 1e-12;

/// `P[m_a][m_b]` for `0 <= m_a, m_b <= grid_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    grid: Vec<f64>,
    grid_max: usize,
    bs: BeamSplitter,
    input_label: String,
    total_mass: f64,
    input_mass: f64,
}

impl JointDistribution {
    /// Wraps a row-major grid of side `grid_max + 1`.
    pub fn from_grid(
        grid: Vec<f64>,
        grid_max: usize,
        bs: BeamSplitter,
        input_label: impl Into<String>,
        input_mass: f64,
    ) -> Result<Self> {
        let side = grid_max + 1;
        if grid.len() != side * side {
            return Err(domain!("grid has {} entries, expected {side}²", grid.len()));
        }
        let total_mass = grid.iter().sum();
        Ok(JointDistribution {
            grid,
            grid_max,
            bs,
            input_label: input_label.into(),
            total_mass,
            input_mass,
        })
    }

    pub fn grid_max(&self) -> usize {
        self.grid_max
    }

    pub fn side(&self) -> usize {
        self.grid_max + 1
    }

    pub fn get(&self, m_a: usize, m_b: usize) -> f64 {
        if m_a > self.grid_max || m_b > self.grid_max {
            return 0.0;
        }
        self.grid[m_a * self.side() + m_b]
    }

    pub fn row(&self, m_a: usize) -> &[f64] {
        let side = self.side();
        &self.grid[m_a * side..(m_a + 1) * side]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.grid.chunks(self.side())
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..=self.grid_max).map(|m| self.get(m, m)).collect()
    }

    pub fn bs(&self) -> &BeamSplitter {
        &self.bs
    }

    pub fn input_label(&self) -> &str {
        &self.input_label
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Mass carried by the (possibly truncated) input state.
    pub fn input_mass(&self) -> f64 {
        self.input_mass
    }

    /// `Σ (m_a + m_b) P(m_a, m_b)`.
    pub fn mean_total_photons(&self) -> f64 {
        let side = self.side();
        self.grid
            .iter()
            .enumerate()
            .map(|(i, p)| ((i / side) + (i % side)) as f64 * p)
            .sum()
    }
}

/// Four-index input `ρ_{(n,m),(n',m')}` over `n < dim_a`, `m < dim_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable {
    dim_a: usize,
    dim_b: usize,
    rho: Vec<Complex64>,
}

impl CoefficientTable {
    /// `rho` is row-major over the composite index `n * dim_b + m`.
    pub fn new(dim_a: usize, dim_b: usize, rho: Vec<Complex64>) -> Result<Self> {
        let d = dim_a * dim_b;
        if d == 0 || rho.len() != d * d {
            return Err(domain!("coefficient table has {} entries, expected {d}²", rho.len()));
        }
        let table = CoefficientTable { dim_a, dim_b, rho };
        let mut residual = 0.0f64;
        for i in 0..d {
            for j in i..d {
                residual = residual.max((table.rho[i * d + j] - table.rho[j * d + i].conj()).norm());
            }
        }
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian(residual));
        }
        Ok(table)
    }

    /// `ρ_a ⊗ ρ_b`.
    pub fn product(a: &MixedState, b: &MixedState) -> Self {
        let (da, db) = (a.dim(), b.dim());
        let d = da * db;
        let mut rho = vec![Complex64::zero(); d * d];
        for n in 0..da {
            for np in 0..da {
                let ra = a.get(n, np);
                if ra.is_zero() {
                    continue;
                }
                for m in 0..db {
                    for mp in 0..db {
                        rho[(n * db + m) * d + np * db + mp] = ra * b.get(m, mp);
                    }
                }
            }
        }
        CoefficientTable { dim_a: da, dim_b: db, rho }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    /// `ρ_{(n,m),(n',m')}`, zero outside the table.
    pub fn get(&self, n: usize, m: usize, n_prime: usize, m_prime: usize) -> Complex64 {
        if n >= self.dim_a || n_prime >= self.dim_a || m >= self.dim_b || m_prime >= self.dim_b {
            return Complex64::zero();
        }
        let d = self.dim_a * self.dim_b;
        self.rho[(n * self.dim_b + m) * d + n_prime * self.dim_b + m_prime]
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim_a * self.dim_b;
        (0..d).map(|i| self.rho[i * d + i].re).sum()
    }
}

/// Input of the general trace formula.
#[derive(Clone, Debug, PartialEq)]
pub enum GeneralInput {
    Product(MixedState, MixedState),
    Table(CoefficientTable),
}

impl GeneralInput {
    fn trace(&self) -> f64 {
        match self {
            GeneralInput::Product(a, b) => a.trace() * b.trace(),
            GeneralInput::Table(t) => t.trace(),
        }
    }

    fn max_photons(&self) -> usize {
        match self {
            GeneralInput::Product(a, b) => a.cutoff() + b.cutoff(),
            GeneralInput::Table(t) => t.dim_a + t.dim_b - 2,
        }
    }

    fn dim_a(&self) -> usize {
        match self {
            GeneralInput::Product(a, _) => a.dim(),
            GeneralInput::Table(t) => t.dim_a,
        }
    }

    /// `ρ_{(n, M-n), (n', M-n')}`.
    fn block(&self, n: usize, np: usize, total: usize) -> Complex64 {
        if n > total || np > total {
            return Complex64::zero();
        }
        match self {
            GeneralInput::Product(a, b) => a.get(n, np) * b.get(total - n, total - np),
            GeneralInput::Table(t) => t.get(n, total - n, np, total - np),
        }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    FsFs { n: usize, m: usize },
    FsPure { n: usize, d: Vec<Complex64> },
    FsMixed { n: usize, diag: Vec<f64> },
    PurePure { c: Vec<Complex64>, d: Vec<Complex64> },
    PureMixed { c: Vec<Complex64>, rho: MixedState },
    General(GeneralInput),
}

/// A prepared joint-distribution computation.
///
/// Rows are independent; [`JointPlan::row`] takes `&self`, so a plan can be
/// shared by several workers and the rows reassembled with
/// [`JointPlan::assemble`].
#[derive(Clone, Debug)]
pub struct JointPlan {
    kind: Kind,
    ev: AmplitudeEvaluator,
    grid_max: usize,
    label: String,
    input_mass: f64,
    max_photons: usize,
}

impl JointPlan {
    fn new(kind: Kind, bs: &BeamSplitter, grid_max: usize, label: String, input_mass: f64) -> Self {
        let (n_max, max_photons) = match &kind {
            Kind::FsFs { n, m } => (*n, n + m),
            Kind::FsPure { n, d } => (*n, n + d.len() - 1),
            Kind::FsMixed { n, diag } => (*n, n + diag.len() - 1),
            Kind::PurePure { c, d } => (c.len() - 1, c.len() + d.len() - 2),
            Kind::PureMixed { c, rho } => (c.len() - 1, c.len() - 1 + rho.cutoff()),
            Kind::General(g) => (g.dim_a() - 1, g.max_photons()),
        };
        let orders = n_max.min(grid_max * 2) as u32;
        JointPlan {
            kind,
            ev: AmplitudeEvaluator::with_orders(bs, orders),
            grid_max,
            label,
            input_mass,
            max_photons,
        }
    }

    pub fn fs_fs(n: usize, m: usize, bs: &BeamSplitter, grid_max: usize) -> Result<Self> {
        if grid_max < n + m {
            return Err(domain!("grid_max {grid_max} is below the total photon number {}", n + m));
        }
        let label = alloc::format!("fock:{n} x fock:{m}");
        Ok(Self::new(Kind::FsFs { n, m }, bs, grid_max, label, 1.0))
    }

    pub fn fs_pure(n: usize, phi_b: &PureState, bs: &BeamSplitter, grid_max: usize) -> Self {
        let label = alloc::format!("fock:{n} x {}", phi_b.label());
        let kind = Kind::FsPure {
            n,
            d: phi_b.amplitudes().to_vec(),
        };
        Self::new(kind, bs, grid_max, label, phi_b.norm_sqr())
    }

    pub fn fs_mixed(n: usize, rho_b: &MixedState, bs: &BeamSplitter, grid_max: usize) -> Self {
        let label = alloc::format!("fock:{n} x {}", rho_b.label());
        let kind = Kind::FsMixed {
            n,
            diag: rho_b.diagonal(),
        };
        Self::new(kind, bs, grid_max, label, rho_b.trace())
    }

    pub fn pure_pure(psi_a: &PureState, phi_b: &PureState, bs: &BeamSplitter, grid_max: usize) -> Self {
        let label = alloc::format!("{} x {}", psi_a.label(), phi_b.label());
        let kind = Kind::PurePure {
            c: psi_a.amplitudes().to_vec(),
            d: phi_b.amplitudes().to_vec(),
        };
        Self::new(kind, bs, grid_max, label, psi_a.norm_sqr() * phi_b.norm_sqr())
    }

    pub fn pure_mixed(psi_a: &PureState, rho_b: &MixedState, bs: &BeamSplitter, grid_max: usize) -> Result<Self> {
        let residual = rho_b.hermiticity_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian(residual));
        }
        let label = alloc::format!("{} x {}", psi_a.label(), rho_b.label());
        let kind = Kind::PureMixed {
            c: psi_a.amplitudes().to_vec(),
            rho: rho_b.clone(),
        };
        Ok(Self::new(kind, bs, grid_max, label, psi_a.norm_sqr() * rho_b.trace()))
    }

    pub fn general(input: GeneralInput, bs: &BeamSplitter, grid_max: usize) -> Self {
        let label = match &input {
            GeneralInput::Product(a, b) => alloc::format!("{} x {}", a.label(), b.label()),
            GeneralInput::Table(_) => String::from("table"),
        };
        let mass = input.trace();
        Self::new(Kind::General(input), bs, grid_max, label, mass)
    }

    /// Picks the most specific path for a pair of states: Fock states in
    /// mode `a` use the single-amplitude formulas.
    pub fn for_states(a: &State, b: &State, bs: &BeamSplitter, grid_max: usize) -> Result<Self> {
        Ok(match (a, b) {
            (State::Pure(pa), State::Pure(pb)) => match (pa.as_fock(), pb.as_fock()) {
                (Some(n), Some(m)) if grid_max >= n + m => Self::fs_fs(n, m, bs, grid_max)?,
                (Some(n), _) => Self::fs_pure(n, pb, bs, grid_max),
                _ => Self::pure_pure(pa, pb, bs, grid_max),
            },
            (State::Pure(pa), State::Mixed(mb)) => match pa.as_fock() {
                Some(n) => Self::fs_mixed(n, mb, bs, grid_max),
                None => Self::pure_mixed(pa, mb, bs, grid_max)?,
            },
            (State::Mixed(ma), _) => Self::general(GeneralInput::Product(ma.clone(), b.to_mixed()), bs, grid_max),
        })
    }

    pub fn grid_max(&self) -> usize {
        self.grid_max
    }

    /// Largest total photon number present in the input.
    pub fn max_photons(&self) -> usize {
        self.max_photons
    }

    pub fn bs(&self) -> &BeamSplitter {
        self.ev.setting()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `P(m_a, m_b)`.
    pub fn entry(&self, m_a: usize, m_b: usize) -> f64 {
        let total = m_a + m_b;
        let f = |n: usize| self.ev.detection_amplitude(n as u32, m_a as u32, m_b as u32);
        let value = match &self.kind {
            Kind::FsFs { n, m } => {
                if total != n + m {
                    return 0.0;
                }
                let a = f(*n);
                a * a
            }
            Kind::FsPure { n, d } => {
                if total < *n {
                    return 0.0;
                }
                let w = d.get(total - n).map_or(0.0, |c| c.norm_sqr());
                if w == 0.0 {
                    return 0.0;
                }
                let a = f(*n);
                w * a * a
            }
            Kind::FsMixed { n, diag } => {
                if total < *n {
                    return 0.0;
                }
                let w = diag.get(total - n).copied().unwrap_or(0.0);
                if w == 0.0 {
                    return 0.0;
                }
                let a = f(*n);
                w * a * a
            }
            Kind::PurePure { c, d } => {
                let mut amp = Complex64::zero();
                for (n, cn) in c.iter().enumerate().take(total + 1) {
                    let dm = d.get(total - n).copied().unwrap_or_default();
                    if cn.is_zero() || dm.is_zero() {
                        continue;
                    }
                    amp += cn * dm * f(n);
                }
                amp.norm_sqr()
            }
            Kind::PureMixed { c, rho } => {
                let v: Vec<(usize, Complex64)> = c
                    .iter()
                    .enumerate()
                    .take(total + 1)
                    .filter(|(n, cn)| !cn.is_zero() && total - n <= rho.cutoff())
                    .map(|(n, cn)| (n, cn * f(n)))
                    .collect();
                let mut acc = Complex64::zero();
                for (n, vn) in &v {
                    for (np, vnp) in &v {
                        acc += vn * rho.get(total - n, total - np) * vnp.conj();
                    }
                }
                acc.re
            }
            Kind::General(input) => {
                let n_top = total.min(input.dim_a() - 1);
                let amps: Vec<f64> = (0..=n_top).map(f).collect();
                let mut acc = Complex64::zero();
                for (n, fa) in amps.iter().enumerate() {
                    if *fa == 0.0 {
                        continue;
                    }
                    for (np, fb) in amps.iter().enumerate() {
                        if *fb == 0.0 {
                            continue;
                        }
                        acc += input.block(n, np, total) * (fa * fb);
                    }
                }
                acc.re
            }
        };
        if value < 0.0 && value > -NEGATIVE_NOISE {
            0.0
        } else {
            value
        }
    }

    pub fn row(&self, m_a: usize) -> Vec<f64> {
        (0..=self.grid_max).map(|m_b| self.entry(m_a, m_b)).collect()
    }

    /// Builds the distribution from rows `0..=grid_max` in order.
    pub fn assemble(&self, rows: Vec<Vec<f64>>) -> Result<JointDistribution> {
        if rows.len() != self.grid_max + 1 {
            return Err(domain!("expected {} rows, got {}", self.grid_max + 1, rows.len()));
        }
        let grid: Vec<f64> = rows.into_iter().flatten().collect();
        JointDistribution::from_grid(grid, self.grid_max, self.bs().clone(), self.label.clone(), self.input_mass)
    }

    pub fn compute(&self) -> JointDistribution {
        let rows = (0..=self.grid_max).map(|m_a| self.row(m_a)).collect();
        self.assemble(rows).expect("row count matches grid")
    }

    /// Photon numbers `n` of the `a`-mode components that can reach
    /// `(m_a, m_b)`.
    fn contributing_orders(&self, total: usize) -> Vec<usize> {
        match &self.kind {
            Kind::FsFs { n, m } => {
                if total == n + m {
                    vec![*n]
                } else {
                    vec![]
                }
            }
            Kind::FsPure { n, d } => {
                let live = total >= *n && d.get(total - n).is_some_and(|c| !c.is_zero());
                if live {
                    vec![*n]
                } else {
                    vec![]
                }
            }
            Kind::FsMixed { n, diag } => {
                let live = total >= *n && diag.get(total - n).is_some_and(|w| *w != 0.0);
                if live {
                    vec![*n]
                } else {
                    vec![]
                }
            }
            Kind::PurePure { c, d } => (0..c.len().min(total + 1))
                .filter(|&n| !c[n].is_zero() && d.get(total - n).is_some_and(|x| !x.is_zero()))
                .collect(),
            Kind::PureMixed { c, rho } => (0..c.len().min(total + 1))
                .filter(|&n| !c[n].is_zero() && total - n <= rho.cutoff())
                .collect(),
            Kind::General(input) => (0..input.dim_a().min(total + 1))
                .filter(|&n| !input.block(n, n, total).is_zero())
                .collect(),
        }
    }

    /// `true` when `P(m_a, m_b)` is certified to be exactly zero: the
    /// transmittance is rational and every contributing amplitude
    /// `f^{(n, M-n)}_{m_a}` has exact square zero, which annihilates the
    /// entry whatever the state weights are.
    pub fn certify_zero(&self, m_a: usize, m_b: usize) -> bool {
        let Some(t) = self.bs().exact_t() else {
            return false;
        };
        self.contributing_orders(m_a + m_b)
            .into_iter()
            .all(|n| bs_prob_exact(n as u32, m_a as u32, m_b as u32, t).is_zero())
    }
}

/// Default grid bound: every photon number the input can carry.
pub fn default_grid_max(a: &State, b: &State) -> usize {
    a.cutoff() + b.cutoff()
}

/// Two Fock inputs: `P = |f^{(n, m_a+m_b-n)}_{m_a}|²` on the anti-diagonal `n+m`.
pub fn joint_fs_fs(n: usize, m: usize, bs: &BeamSplitter, grid_max: usize) -> Result<JointDistribution> {
    Ok(JointPlan::fs_fs(n, m, bs, grid_max)?.compute())
}

/// `P = |d_{m_a+m_b-n}|² |f|²`.
pub fn joint_fs_pure(n: usize, phi_b: &PureState, bs: &BeamSplitter, grid_max: usize) -> JointDistribution {
    JointPlan::fs_pure(n, phi_b, bs, grid_max).compute()
}

/// `P = ρ_{M-n, M-n} |f|²`.
pub fn joint_fs_mixed(n: usize, rho_b: &MixedState, bs: &BeamSplitter, grid_max: usize) -> JointDistribution {
    JointPlan::fs_mixed(n, rho_b, bs, grid_max).compute()
}

/// `P = |Σ_n c_n d_{M-n} f^{(n, M-n)}_{m_a}|²`.
pub fn joint_pure_pure(psi_a: &PureState, phi_b: &PureState, bs: &BeamSplitter, grid_max: usize) -> JointDistribution {
    JointPlan::pure_pure(psi_a, phi_b, bs, grid_max).compute()
}

/// `P = Σ_{n,n'} c_n c*_{n'} ρ_{M-n, M-n'} f_n f_{n'}`.
pub fn joint_pure_mixed(
    psi_a: &PureState,
    rho_b: &MixedState,
    bs: &BeamSplitter,
    grid_max: usize,
) -> Result<JointDistribution> {
    Ok(JointPlan::pure_mixed(psi_a, rho_b, bs, grid_max)?.compute())
}

/// Full trace formula over `ρ_{(n,m),(n',m')}`.
///
/// The returned distribution's `input_mass` records the input trace; a
/// trace below `1 - ε_norm` shows up there.
pub fn joint_general(input: GeneralInput, bs: &BeamSplitter, grid_max: usize) -> JointDistribution {
    JointPlan::general(input, bs, grid_max).compute()
}

/// `true` if the input trace falls short of one by more than `ε_norm`.
pub fn has_trace_deficit(dist: &JointDistribution) -> bool {
    dist.input_mass() < 1.0 - EPS_NORM
}
