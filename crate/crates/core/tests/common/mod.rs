//! Independent oracles shared by the integration suites.

#![allow(dead_code)]

use homlab_core::bs::BeamSplitter;
use homlab_core::joint::{GeneralInput, JointDistribution, JointPlan};
use homlab_core::numerics::ratio;
use homlab_core::states::{fock, MixedState, PureState};
use homlab_core::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `f^{(n,m)}_p` by multiplying out `(c a† + s b†)^n (c b† - s a†)^m` and
/// reading off the coefficient of `a†^p b†^{n+m-p}`.
pub fn expanded_amplitude(n: u32, m: u32, p: u32, c: f64, s: f64) -> f64 {
    // poly[i] is the coefficient of a†^i b†^{deg-i}
    let mut poly = vec![1.0];
    for factor in core::iter::repeat((c, s)).take(n as usize).chain(core::iter::repeat((-s, c)).take(m as usize)) {
        let (on_a, on_b) = factor;
        let mut next = vec![0.0; poly.len() + 1];
        for (i, v) in poly.iter().enumerate() {
            next[i + 1] += on_a * v;
            next[i] += on_b * v;
        }
        poly = next;
    }
    let total = n + m;
    if p > total {
        return 0.0;
    }
    poly[p as usize] * (factorial(p) * factorial(total - p) / (factorial(n) * factorial(m))).sqrt()
}

type Matrix = Vec<Vec<f64>>;

fn matmul(x: &Matrix, y: &Matrix) -> Matrix {
    let d = x.len();
    let mut out = vec![vec![0.0; d]; d];
    for i in 0..d {
        for k in 0..d {
            if x[i][k] == 0.0 {
                continue;
            }
            for j in 0..d {
                out[i][j] += x[i][k] * y[k][j];
            }
        }
    }
    out
}

/// `exp(θ (J₋ - J₊) / 2)` in the basis `|J, M⟩`, index `J + M`, by scaling
/// and squaring a Taylor series.
pub fn rotation_matrix(two_j: usize, theta: f64) -> Matrix {
    let d = two_j + 1;
    let mut gen = vec![vec![0.0; d]; d];
    for i in 0..two_j {
        // ⟨i+1| J₊ |i⟩ = √((J-M)(J+M+1))
        let s = (((two_j - i) * (i + 1)) as f64).sqrt();
        gen[i + 1][i] -= theta / 2.0 * s;
        gen[i][i + 1] += theta / 2.0 * s;
    }
    let norm: f64 = gen.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale /= 2.0;
        squarings += 1;
    }
    for row in &mut gen {
        for x in row.iter_mut() {
            *x *= scale;
        }
    }
    let mut result: Matrix = (0..d).map(|i| (0..d).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let mut term = result.clone();
    for k in 1..=30 {
        term = matmul(&term, &gen);
        for row in &mut term {
            for x in row.iter_mut() {
                *x /= k as f64;
            }
        }
        for i in 0..d {
            for j in 0..d {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_pure(rng: &mut ChaCha8Rng, cutoff: usize) -> PureState {
    let mut amps: Vec<Complex64> = (0..=cutoff).map(|_| random_complex(rng)).collect();
    let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in &mut amps {
        *c /= norm;
    }
    PureState::from_amplitudes(amps, "random").unwrap()
}

/// `G G† / tr(G G†)` for a random complex `G`.
pub fn random_mixed(rng: &mut ChaCha8Rng, cutoff: usize) -> MixedState {
    let d = cutoff + 1;
    let g: Vec<Complex64> = (0..d * d).map(|_| random_complex(rng)).collect();
    let mut rho = vec![Complex64::default(); d * d];
    for i in 0..d {
        for j in 0..d {
            rho[i * d + j] = (0..d).map(|k| g[i * d + k] * g[j * d + k].conj()).sum();
        }
    }
    let trace: f64 = (0..d).map(|i| rho[i * d + i].re).sum();
    for x in &mut rho {
        *x /= trace;
    }
    MixedState::from_matrix(d, rho, "random").unwrap()
}

/// Either an angle setting or an exact rational one.
pub fn random_bs(rng: &mut ChaCha8Rng) -> BeamSplitter {
    if rng.gen_bool(0.5) {
        BeamSplitter::angle(rng.gen_range(0.0..core::f64::consts::PI)).unwrap()
    } else {
        let den = rng.gen_range(2..=9);
        BeamSplitter::exact(ratio(rng.gen_range(1..den), den)).unwrap()
    }
}

pub fn max_abs_diff(x: &JointDistribution, y: &JointDistribution) -> f64 {
    x.grid().iter().zip(y.grid()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Largest deviation of each specialised path from the general trace formula
/// over one random draw, in the order Fock/Fock, Fock/pure, Fock/mixed,
/// pure/pure, pure/mixed.
pub fn specialised_vs_general(rng: &mut ChaCha8Rng) -> [f64; 5] {
    let bs = random_bs(rng);
    let (na, nb) = (rng.gen_range(0..=4), rng.gen_range(0..=4));
    let grid = na + nb;
    let n = rng.gen_range(0..=na);
    let m = rng.gen_range(0..=nb);
    let fock_a = fock(n, na).unwrap();
    let fock_b = fock(m, nb).unwrap();
    let psi = random_pure(rng, na);
    let phi = random_pure(rng, nb);
    let rho = random_mixed(rng, nb);
    let general = |a: &MixedState, b: &MixedState| {
        JointPlan::general(GeneralInput::Product(a.clone(), b.clone()), &bs, grid).compute()
    };
    [
        max_abs_diff(
            &JointPlan::fs_fs(n, m, &bs, grid).unwrap().compute(),
            &general(&fock_a.to_mixed(), &fock_b.to_mixed()),
        ),
        max_abs_diff(&JointPlan::fs_pure(n, &phi, &bs, grid).compute(), &general(&fock_a.to_mixed(), &phi.to_mixed())),
        max_abs_diff(&JointPlan::fs_mixed(n, &rho, &bs, grid).compute(), &general(&fock_a.to_mixed(), &rho)),
        max_abs_diff(&JointPlan::pure_pure(&psi, &phi, &bs, grid).compute(), &general(&psi.to_mixed(), &phi.to_mixed())),
        max_abs_diff(&JointPlan::pure_mixed(&psi, &rho, &bs, grid).unwrap().compute(), &general(&psi.to_mixed(), &rho)),
    ]
}
