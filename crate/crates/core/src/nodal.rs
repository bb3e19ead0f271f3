//! Nodal structure of the joint distribution: central nodal line scans,
//! exact integer zeros of the g-polynomial and polynomial families
//! `(m_a(k), m_b(k))` that annihilate it identically.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::bs::GPolynomial;
use crate::error::{domain, Result};
use crate::joint::JointDistribution;
use crate::numerics::{isqrt, BigRational};

/// One diagonal entry of a CNL scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CnlEntry {
    pub m: usize,
    pub p: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CnlReport {
    pub tol: f64,
    pub entries: Vec<CnlEntry>,
    /// Every diagonal entry is below `tol`.
    pub verdict: bool,
}

impl CnlReport {
    pub fn max_diagonal(&self) -> f64 {
        self.entries.iter().map(|e| e.p.abs()).fold(0.0, f64::max)
    }
}

/// Checks `|P(m, m)| < tol` along the diagonal.
pub fn cnl_scan(dist: &JointDistribution, tol: f64) -> CnlReport {
    let entries: Vec<CnlEntry> = dist
        .diagonal()
        .into_iter()
        .enumerate()
        .map(|(m, p)| CnlEntry { m, p, pass: p.abs() < tol })
        .collect();
    let verdict = entries.iter().all(|e| e.pass);
    CnlReport { tol, entries, verdict }
}

/// An integer zero of `g(·, · | n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntegerZero {
    pub m_a: i64,
    pub m_b: i64,
    /// `m_a + m_b >= n`, i.e. reachable from `|n, m⟩` with `m >= 0`.
    pub physical: bool,
}

/// All zeros of `g(·, · | n)` at transmittance `t` in `[0, m_max]²`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSet {
    pub n: u32,
    pub t: BigRational,
    pub m_max: u64,
    pub zeros: Vec<IntegerZero>,
}

impl ZeroSet {
    pub fn contains(&self, m_a: i64, m_b: i64) -> bool {
        self.zeros.iter().any(|z| z.m_a == m_a && z.m_b == m_b)
    }

    pub fn pairs(&self) -> Vec<(i64, i64)> {
        self.zeros.iter().map(|z| (z.m_a, z.m_b)).collect()
    }

    /// `true` if `(m_a, m_b) -> (m_b, m_a)` maps the set to itself.
    pub fn is_swap_symmetric(&self) -> bool {
        self.zeros.iter().all(|z| self.contains(z.m_b, z.m_a))
    }
}

/// Zeros with `m_a` in `rows` and `0 <= m_b <= m_max`, in scan order.
pub fn bfs_zeros_rows(gp: &GPolynomial, rows: RangeInclusive<u64>, m_max: u64) -> Vec<IntegerZero> {
    let n = gp.n() as i64;
    let mut out = Vec::new();
    for m_a in rows {
        for m_b in 0..=m_max {
            let (a, b) = (m_a as i64, m_b as i64);
            if gp.is_zero(a, b) {
                out.push(IntegerZero {
                    m_a: a,
                    m_b: b,
                    physical: a + b >= n,
                });
            }
        }
    }
    out
}

/// Exhaustive exact scan of `0 <= m_a, m_b <= m_max`.
pub fn bfs_zeros(n: u32, t: &BigRational, m_max: u64) -> ZeroSet {
    let gp = GPolynomial::new(n, t);
    ZeroSet {
        n,
        t: t.clone(),
        m_max,
        zeros: bfs_zeros_rows(&gp, 0..=m_max, m_max),
    }
}

/// Integer polynomial in `k`, lowest power first.
type Poly = Vec<BigInt>;

fn poly_trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_add_assign(acc: &mut Poly, p: &Poly) {
    if acc.len() < p.len() {
        acc.resize(p.len(), BigInt::zero());
    }
    for (a, c) in acc.iter_mut().zip(p) {
        *a += c;
    }
}

fn poly_mul(p: &Poly, q: &Poly) -> Poly {
    let mut out = vec![BigInt::zero(); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// `(P)_j = P (P-1) ... (P-j+1)` as a polynomial.
fn poly_falling(p: &Poly, j: u32) -> Poly {
    let mut acc: Poly = vec![BigInt::one()];
    for i in 0..j {
        let mut factor = p.clone();
        factor[0] -= i;
        acc = poly_mul(&acc, &factor);
    }
    acc
}

fn eval_i64(coeffs: &[i64], k: i64) -> Option<i64> {
    let mut acc: i64 = 0;
    for c in coeffs.iter().rev() {
        acc = acc.checked_mul(k)?.checked_add(*c)?;
    }
    Some(acc)
}

fn degree(coeffs: &[i64]) -> usize {
    coeffs.iter().rposition(|c| *c != 0).unwrap_or(0)
}

/// `p(k + c)`.
fn shift(p: &[i64], c: i64) -> Vec<i64> {
    let mut out = vec![0i128; p.len()];
    for (i, coef) in p.iter().enumerate() {
        // coef (k + c)^i = coef Σ_j C(i,j) c^{i-j} k^j
        let mut binom: i128 = 1;
        for j in 0..=i {
            if j > 0 {
                binom = binom * (i - j + 1) as i128 / j as i128;
            }
            out[j] += *coef as i128 * binom * (c as i128).pow((i - j) as u32);
        }
    }
    out.into_iter().map(|x| x as i64).collect()
}

/// `p(-k)`.
fn reflect(p: &[i64]) -> Vec<i64> {
    p.iter().enumerate().map(|(i, c)| if i % 2 == 0 { *c } else { -c }).collect()
}

/// A polynomial family `(m_a(k), m_b(k))`, coefficients lowest power first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParametricSolution {
    pub n: u32,
    pub t: BigRational,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

/// Integer interval with optional open ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KInterval {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl KInterval {
    pub fn contains(&self, k: i64) -> bool {
        self.lo.is_none_or(|lo| k >= lo) && self.hi.is_none_or(|hi| k <= hi)
    }
}

/// Integers `k` with `m_a(k) >= 0` and `m_b(k) >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KDomain {
    pub intervals: Vec<KInterval>,
}

impl KDomain {
    pub fn contains(&self, k: i64) -> bool {
        self.intervals.iter().any(|i| i.contains(k))
    }
}

impl ParametricSolution {
    pub fn new(n: u32, t: BigRational, a: Vec<i64>, b: Vec<i64>) -> Self {
        ParametricSolution { n, t, a, b }
    }

    pub fn m_a(&self, k: i64) -> Option<i64> {
        eval_i64(&self.a, k)
    }

    pub fn m_b(&self, k: i64) -> Option<i64> {
        eval_i64(&self.b, k)
    }

    /// Larger of the two polynomial degrees.
    pub fn degree(&self) -> usize {
        degree(&self.a).max(degree(&self.b))
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    /// Representative of the family under `k -> ±k + c`.
    ///
    /// The first non-constant polynomial (`m_a`, else `m_b`) of degree `e`
    /// and leading coefficient `L` is shifted so that its `k^{e-1}`
    /// coefficient lies in `[0, e|L|)`. Of the two orientations the one
    /// with positive `L` is kept, and if both qualify the lexicographically
    /// smaller `(a, b)`.
    pub fn canonical(&self) -> Self {
        let len = self.a.len().max(self.b.len()).max(degree(&self.a).max(degree(&self.b)) + 1);
        let pad = |p: &[i64]| {
            let mut v = p.to_vec();
            v.resize(len, 0);
            v.truncate(len);
            v
        };
        let (a, b) = (pad(&self.a), pad(&self.b));
        let orient = |a: Vec<i64>, b: Vec<i64>| -> (Vec<i64>, Vec<i64>) {
            let pivot = if degree(&a) > 0 {
                &a
            } else if degree(&b) > 0 {
                &b
            } else {
                return (a, b);
            };
            let e = degree(pivot);
            let step = e as i64 * pivot[e];
            let sub = pivot[e - 1];
            let c = if step > 0 {
                -sub.div_euclid(step)
            } else {
                sub.div_euclid(-step)
            };
            (shift(&a, c), shift(&b, c))
        };
        let first = orient(a.clone(), b.clone());
        let second = orient(reflect(&a), reflect(&b));
        let key = |(a, b): &(Vec<i64>, Vec<i64>)| {
            let pivot = if degree(a) > 0 { a } else { b };
            let mut v = vec![i64::from(pivot[degree(pivot)] < 0)];
            v.extend_from_slice(a);
            v.extend_from_slice(b);
            v
        };
        let (a, b) = if key(&second) < key(&first) { second } else { first };
        ParametricSolution {
            n: self.n,
            t: self.t.clone(),
            a,
            b,
        }
    }

    /// Integer `k` where both polynomials are non-negative.
    pub fn valid_domain(&self) -> KDomain {
        // beyond the Cauchy bound no polynomial changes sign
        let bound = [&self.a, &self.b]
            .iter()
            .filter(|p| degree(p) > 0)
            .map(|p| {
                let d = degree(p);
                let lead = p[d].unsigned_abs();
                let worst = p[..d].iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
                1 + worst.div_ceil(lead) as i64
            })
            .max()
            .unwrap_or(0);
        let lo = -bound - 1;
        let hi = bound + 1;
        let ok = |k: i64| {
            matches!((self.m_a(k), self.m_b(k)), (Some(x), Some(y)) if x >= 0 && y >= 0)
        };
        let mut intervals = Vec::new();
        let mut start: Option<i64> = None;
        for k in lo..=hi {
            match (ok(k), start) {
                (true, None) => start = Some(k),
                (false, Some(s)) => {
                    intervals.push(KInterval {
                        lo: Some(s),
                        hi: Some(k - 1),
                    });
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            intervals.push(KInterval { lo: Some(s), hi: None });
        }
        if let Some(first) = intervals.first_mut() {
            if first.lo == Some(lo) {
                first.lo = None;
            }
        }
        KDomain { intervals }
    }
}

/// Outcome of [`verify_parametric`].
#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    /// Both certificates agree that the family is a zero.
    pub valid: bool,
    /// Every coefficient of the expanded polynomial in `k` vanishes.
    pub expansion_zero: bool,
    /// The polynomial vanishes at `D + 1` distinct integers, `D` its degree bound.
    pub evaluation_zero: bool,
    /// Lowest power of `k` with a nonzero coefficient, and that coefficient.
    pub first_nonzero: Option<(usize, BigRational)>,
    /// The expanded `g(m_a(k), m_b(k) | n)`, lowest power first.
    pub polynomial: Vec<BigRational>,
}

/// Expands `g(m_a(k), m_b(k) | n)` exactly and checks it against pointwise
/// evaluation.
pub fn verify_parametric(sol: &ParametricSolution) -> Verification {
    let gp = GPolynomial::new(sol.n, &sol.t);
    let to_poly = |c: &[i64]| -> Poly { poly_trim(c.iter().map(|x| BigInt::from(*x)).collect()) };
    let (pa, pb) = (to_poly(&sol.a), to_poly(&sol.b));
    let n = sol.n;
    let mut acc: Poly = vec![BigInt::zero()];
    for (q, coef) in gp.coefficients().iter().enumerate() {
        if coef.is_zero() {
            continue;
        }
        let q = q as u32;
        let term = poly_mul(&poly_falling(&pa, n - q), &poly_falling(&pb, q));
        let scaled: Poly = term.into_iter().map(|c| c * coef).collect();
        poly_add_assign(&mut acc, &scaled);
    }
    let acc = poly_trim(acc);
    let scale = gp.scale();
    let polynomial: Vec<BigRational> = acc.iter().map(|c| BigRational::new(c.clone(), scale.clone())).collect();
    let first_nonzero = polynomial.iter().position(|c| !c.is_zero()).map(|i| (i, polynomial[i].clone()));
    let expansion_zero = first_nonzero.is_none();

    let bound = sol.degree() * n as usize;
    let evaluation_zero = (0..=bound as i64).all(|k| {
        let (x, y) = (eval_big(&pa, k), eval_big(&pb, k));
        match (i64::try_from(&x), i64::try_from(&y)) {
            (Ok(x), Ok(y)) => gp.is_zero(x, y),
            _ => eval_scaled_big(&gp, &x, &y).is_zero(),
        }
    });
    Verification {
        valid: expansion_zero && evaluation_zero,
        expansion_zero,
        evaluation_zero,
        first_nonzero,
        polynomial,
    }
}

fn eval_big(p: &Poly, k: i64) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * k + c)
}

fn eval_scaled_big(gp: &GPolynomial, x: &BigInt, y: &BigInt) -> BigInt {
    let n = gp.n();
    gp.coefficients()
        .iter()
        .enumerate()
        .map(|(q, c)| {
            c * crate::numerics::falling_factorial_big(x, n - q as u32)
                * crate::numerics::falling_factorial_big(y, q as u32)
        })
        .sum()
}

/// Search space of [`search_parametric`].
#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpec {
    pub n: u32,
    pub t: BigRational,
    pub degree: usize,
    pub range: RangeInclusive<i64>,
}

impl SearchSpec {
    pub fn new(n: u32, t: BigRational, degree: usize, range: RangeInclusive<i64>) -> Result<Self> {
        if !(1..=3).contains(&degree) {
            return Err(domain!("search degree must be 1, 2 or 3, got {degree}"));
        }
        if range.is_empty() {
            return Err(domain!("empty coefficient range"));
        }
        let reach = range.start().unsigned_abs().max(range.end().unsigned_abs());
        if reach > 1_000_000 {
            return Err(domain!("coefficient range too wide"));
        }
        Ok(SearchSpec { n, t, degree, range })
    }

    /// Values of the leading `a` coefficient; each is one independent
    /// partition of the search.
    pub fn partitions(&self) -> Vec<i64> {
        self.range.clone().collect()
    }
}

/// Integer roots `y` of `g(x, y) = 0` with `|y| <= bound`, memoized by `x`.
struct RootCache<'a> {
    gp: &'a GPolynomial,
    bound: i64,
    roots: BTreeMap<i64, Vec<i64>>,
}

impl<'a> RootCache<'a> {
    fn get(&mut self, x: i64) -> &[i64] {
        let (gp, bound) = (self.gp, self.bound);
        self.roots
            .entry(x)
            .or_insert_with(|| (-bound..=bound).filter(|&y| gp.is_zero(x, y)).collect())
    }
}

/// Families in one partition (`a_degree = lead`), canonicalized, sorted and
/// deduplicated.
///
/// Pruning: `(a_0, b_0)` is a zero of g; for each choice of the `a`
/// coefficients the values `m_b(±1)` (and `m_b(2)` for cubics) must be
/// integer roots of `g(m_a(k), ·)`, which fixes the `b` coefficients by a
/// linear solve. Survivors are certified by [`verify_parametric`].
/// Constant families are isolated zeros and are left out.
pub fn search_parametric_partition(spec: &SearchSpec, lead: i64) -> Vec<ParametricSolution> {
    let gp = GPolynomial::new(spec.n, &spec.t);
    let d = spec.degree;
    let (lo, hi) = (*spec.range.start(), *spec.range.end());
    let reach = lo.abs().max(hi.abs());
    let in_range = |c: i64| (lo..=hi).contains(&c);
    // |m(k)| <= reach Σ |k|^i; k = 2 is the widest evaluation point used
    let bound = reach * ((1i64 << (d + 1)) - 1);
    let mut cache = RootCache {
        gp: &gp,
        bound,
        roots: BTreeMap::new(),
    };

    let mut z0: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for a0 in lo..=hi {
        let bs: Vec<i64> = (lo..=hi).filter(|&b0| gp.is_zero(a0, b0)).collect();
        if !bs.is_empty() {
            z0.insert(a0, bs);
        }
    }

    let mut found = Vec::new();
    let middle = d - 1;
    let width = (hi - lo + 1) as u64;
    let combos = width.pow(middle as u32);
    for (&a0, b0s) in &z0 {
        for idx in 0..combos {
            let mut a = vec![0i64; d + 1];
            a[0] = a0;
            a[d] = lead;
            let mut rest = idx;
            for slot in a.iter_mut().take(d).skip(1) {
                *slot = lo + (rest % width) as i64;
                rest /= width;
            }
            let x1 = eval_i64(&a, 1).unwrap();
            let xm1 = eval_i64(&a, -1).unwrap();
            let r1 = cache.get(x1).to_vec();
            if r1.is_empty() {
                continue;
            }
            let rm1 = cache.get(xm1).to_vec();
            if rm1.is_empty() {
                continue;
            }
            let r2 = if d == 3 {
                let x2 = eval_i64(&a, 2).unwrap();
                let r = cache.get(x2).to_vec();
                if r.is_empty() {
                    continue;
                }
                r
            } else {
                Vec::new()
            };
            for &b0 in b0s {
                for &y1 in &r1 {
                    for &ym1 in &rm1 {
                        if (y1 - ym1) % 2 != 0 {
                            continue;
                        }
                        let u = (y1 - ym1) / 2;
                        let v = (y1 + ym1) / 2;
                        let mut candidates: Vec<Vec<i64>> = Vec::new();
                        match d {
                            1 => {
                                if v == b0 {
                                    candidates.push(vec![b0, u]);
                                }
                            }
                            2 => candidates.push(vec![b0, u, v - b0]),
                            _ => {
                                let b2 = v - b0;
                                for &y2 in &r2 {
                                    let w = y2 - b0 - 4 * b2;
                                    if (w - 2 * u) % 6 != 0 {
                                        continue;
                                    }
                                    let b3 = (w - 2 * u) / 6;
                                    candidates.push(vec![b0, u - b3, b2, b3]);
                                }
                            }
                        }
                        for b in candidates {
                            if !b.iter().all(|c| in_range(*c)) {
                                continue;
                            }
                            let sol = ParametricSolution::new(spec.n, spec.t.clone(), a.clone(), b);
                            if sol.is_constant() || !quick_check(&gp, &sol) {
                                continue;
                            }
                            if verify_parametric(&sol).valid {
                                found.push(sol.canonical());
                            }
                        }
                    }
                }
            }
        }
    }
    finalize(found)
}

/// Pointwise test at a few more integers before the full certificate.
fn quick_check(gp: &GPolynomial, sol: &ParametricSolution) -> bool {
    [2i64, -2, 3, -3, 4].iter().all(|&k| match (sol.m_a(k), sol.m_b(k)) {
        (Some(x), Some(y)) => gp.is_zero(x, y),
        _ => true,
    })
}

/// Sorts and deduplicates canonical families.
pub fn finalize(mut found: Vec<ParametricSolution>) -> Vec<ParametricSolution> {
    found.sort();
    found.dedup();
    found
}

/// All non-constant families with coefficients in `range`.
pub fn search_parametric(spec: &SearchSpec) -> Vec<ParametricSolution> {
    let all = spec
        .partitions()
        .into_iter()
        .flat_map(|lead| search_parametric_partition(spec, lead))
        .collect();
    finalize(all)
}

/// Integer branch points of the `n = 2`, `θ = π/2` level sets:
/// `m_b^{(±)} = m_a + (1 ± √(1 + 8 m_a + k)) / 2`, returned as
/// `(m_b^{(+)}, m_b^{(-)})` when both are non-negative integers.
pub fn extremal_branch_points(m_a: i64, k: i64) -> Option<(i64, i64)> {
    let disc = 1i128 + 8 * m_a as i128 + k as i128;
    if disc < 0 {
        return None;
    }
    let s = isqrt(disc as u128) as i128;
    if s * s != disc || s % 2 == 0 {
        return None;
    }
    let plus = m_a as i128 + (1 + s) / 2;
    let minus = m_a as i128 + (1 - s) / 2;
    if minus < 0 {
        return None;
    }
    Some((i64::try_from(plus).ok()?, i64::try_from(minus).ok()?))
}

/// A known annihilating family, grouped by `(n, T)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyRow {
    pub group: &'static str,
    pub n: u32,
    pub t_num: i64,
    pub t_den: i64,
    pub a: [i64; 3],
    pub b: [i64; 3],
}

impl FamilyRow {
    pub fn solution(&self) -> ParametricSolution {
        ParametricSolution::new(
            self.n,
            crate::numerics::ratio(self.t_num, self.t_den),
            self.a.to_vec(),
            self.b.to_vec(),
        )
    }
}

const fn row(group: &'static str, n: u32, t_num: i64, t_den: i64, a: [i64; 3], b: [i64; 3]) -> FamilyRow {
    FamilyRow {
        group,
        n,
        t_num,
        t_den,
        a,
        b,
    }
}

/// Families for `n = 2, 3` at `T = 1/2` and `n = 2` at `T = 3/4`.
pub const KNOWN_FAMILIES: &[FamilyRow] = &[
    row("I", 2, 1, 2, [0, -1, 2], [1, -3, 2]),
    row("I", 2, 1, 2, [0, 1, 2], [1, 3, 2]),
    row("I", 2, 1, 2, [0, 2, 8], [1, 6, 8]),
    row("I", 2, 1, 2, [3, -5, 2], [1, -3, 2]),
    row("I", 2, 1, 2, [1, 3, 2], [3, 5, 2]),
    row("I", 2, 1, 2, [1, 6, 8], [3, 10, 8]),
    row("I", 2, 1, 2, [3, 5, 2], [6, 7, 2]),
    row("I", 2, 1, 2, [6, 7, 2], [10, 9, 2]),
    row("II", 3, 1, 2, [0, 1, 0], [0, 1, 0]),
    row("II", 3, 1, 2, [2, 7, 6], [7, 13, 6]),
    row("II", 3, 1, 2, [1, 5, 6], [5, 11, 6]),
    row("III", 2, 3, 4, [0, 1, 12], [0, -9, 36]),
    row("III", 2, 3, 4, [0, 1, 12], [1, 15, 36]),
    row("III", 2, 3, 4, [1, 7, 12], [0, 9, 36]),
    row("III", 2, 3, 4, [1, 7, 12], [7, 33, 36]),
    row("III", 2, 3, 4, [6, 17, 12], [10, 39, 36]),
    row("III", 2, 3, 4, [11, 23, 12], [22, 57, 36]),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bs::{g_poly, BeamSplitter};
    use crate::joint::{joint_fs_mixed, joint_fs_pure};
    use crate::numerics::ratio;
    use crate::states::{coherent, fock, thermal, Cutoff};
    use num_complex::Complex64;

    fn sol(n: u32, t: (i64, i64), a: &[i64], b: &[i64]) -> ParametricSolution {
        ParametricSolution::new(n, ratio(t.0, t.1), a.to_vec(), b.to_vec())
    }

    #[test]
    fn cnl_scan_examples() {
        let bal = BeamSplitter::balanced();
        let b = coherent(Complex64::new(3.0, 0.0), Cutoff::Auto).unwrap();
        assert!(cnl_scan(&joint_fs_pure(1, &b, &bal, 40), 1e-14).verdict);
        let th = thermal(9.0, Cutoff::Auto).unwrap();
        assert!(!cnl_scan(&joint_fs_mixed(2, &th, &bal, 40), 1e-14).verdict);
        let vac = joint_fs_pure(0, &fock(0, 0).unwrap(), &bal, 3);
        let report = cnl_scan(&vac, 1e-14);
        assert!(!report.verdict);
        assert_eq!(report.entries[0].p, 1.0);
    }

    #[test]
    fn bfs_examples() {
        let z = bfs_zeros(3, &ratio(3, 4), 200);
        let positive: Vec<(i64, i64)> = z.pairs().into_iter().filter(|(a, _)| *a >= 1).collect();
        assert_eq!(positive, vec![(1, 0), (1, 1), (1, 11), (2, 0), (3, 1), (11, 55), (70, 162)]);
        let zero_row: Vec<(i64, i64)> = z.pairs().into_iter().filter(|(a, _)| *a == 0).collect();
        assert_eq!(zero_row, vec![(0, 0), (0, 1), (0, 2)]);
        assert!(!z.zeros.iter().find(|z| (z.m_a, z.m_b) == (1, 0)).unwrap().physical);
        assert!(z.zeros.iter().find(|z| (z.m_a, z.m_b) == (70, 162)).unwrap().physical);

        let z = bfs_zeros(1, &ratio(1, 2), 10);
        assert_eq!(z.pairs(), (0..=10).map(|m| (m, m)).collect::<Vec<_>>());

        let z = bfs_zeros(2, &ratio(1, 2), 10);
        for p in [(1, 0), (0, 1), (3, 1), (1, 3), (3, 6), (6, 3)] {
            assert!(z.contains(p.0, p.1), "{p:?}");
        }
    }

    #[test]
    fn bfs_swap_symmetry() {
        for n in 1..=5 {
            assert!(bfs_zeros(n, &ratio(1, 2), 60).is_swap_symmetric(), "n={n}");
        }
        assert!(!bfs_zeros(3, &ratio(3, 4), 60).is_swap_symmetric());
        assert!(!bfs_zeros(2, &ratio(3, 4), 60).is_swap_symmetric());
    }

    #[test]
    fn verify_examples() {
        assert!(verify_parametric(&sol(2, (1, 2), &[0, -1, 2], &[1, -3, 2])).valid);
        assert!(verify_parametric(&sol(3, (1, 2), &[0, 1], &[0, 1])).valid);
        assert!(verify_parametric(&sol(2, (3, 4), &[0, 1, 12], &[0, -9, 36])).valid);
        let bad = verify_parametric(&sol(1, (1, 2), &[0, 1], &[1, 1]));
        assert!(!bad.valid && !bad.expansion_zero && !bad.evaluation_zero);
        assert_eq!(bad.first_nonzero, Some((0, ratio(-1, 2))));
        assert_eq!(bad.polynomial, vec![ratio(-1, 2)]);
    }

    #[test]
    fn expansion_matches_pointwise_values() {
        let s = sol(3, (2, 5), &[1, -2, 3], &[4, 0, -1]);
        let v = verify_parametric(&s);
        let bs = BeamSplitter::ExactT(ratio(2, 5));
        for k in -6..=6i64 {
            let value = v
                .polynomial
                .iter()
                .rev()
                .fold(BigRational::zero(), |acc, c| acc * BigRational::from_integer(k.into()) + c);
            let direct = g_poly(s.m_a(k).unwrap(), s.m_b(k).unwrap(), 3, &bs);
            assert_eq!(crate::numerics::RealValue::Exact(value), direct);
        }
    }

    #[test]
    fn known_families_verify() {
        for row in KNOWN_FAMILIES {
            let v = verify_parametric(&row.solution());
            assert!(v.valid, "{row:?}");
        }
    }

    #[test]
    fn near_miss_family_fails() {
        // (8k² + k, 8k² + 6k + 1) is off by k in m_a; the family with m_b - m_a = 4k + 1
        // is (8k² + 2k, 8k² + 6k + 1)
        let near = verify_parametric(&sol(2, (1, 2), &[0, 1, 8], &[1, 6, 8]));
        assert!(!near.valid);
        assert_eq!(near.polynomial, vec![BigRational::zero(), ratio(3, 4), ratio(9, 4)]);
        assert!(verify_parametric(&sol(2, (1, 2), &[0, 2, 8], &[1, 6, 8])).valid);
    }

    #[test]
    fn canonical_forms() {
        let r1 = sol(2, (1, 2), &[0, -1, 2], &[1, -3, 2]).canonical();
        let r2 = sol(2, (1, 2), &[0, 1, 2], &[1, 3, 2]).canonical();
        assert_eq!(r1, r2);
        assert_eq!((r1.a.as_slice(), r1.b.as_slice()), (&[0, 1, 2][..], &[1, 3, 2][..]));
        let s = sol(3, (1, 2), &[5, 1, 0], &[5, 1, 0]).canonical();
        assert_eq!((s.a.as_slice(), s.b.as_slice()), (&[0, 1, 0][..], &[0, 1, 0][..]));
        // canonical form is a fixed point and is shift invariant
        for row in KNOWN_FAMILIES {
            let c = row.solution().canonical();
            assert_eq!(c.canonical(), c);
            let shifted = ParametricSolution::new(row.n, c.t.clone(), shift(&c.a, 7), shift(&c.b, 7));
            assert_eq!(shifted.canonical(), c);
            let flipped = ParametricSolution::new(row.n, c.t.clone(), reflect(&c.a), reflect(&c.b));
            assert_eq!(flipped.canonical(), c);
            assert!(verify_parametric(&c).valid);
        }
    }

    #[test]
    fn search_examples() {
        let spec = SearchSpec::new(2, ratio(1, 2), 2, -5..=5).unwrap();
        let found = search_parametric(&spec);
        for row in &KNOWN_FAMILIES[..2] {
            assert!(found.contains(&row.solution().canonical()), "{row:?}");
        }
        assert!(found.iter().all(|s| verify_parametric(s).valid && !s.is_constant()));

        let spec = SearchSpec::new(1, ratio(1, 2), 2, 0..=2).unwrap();
        let found = search_parametric(&spec);
        assert!(found.contains(&sol(1, (1, 2), &[0, 1, 0], &[0, 1, 0]).canonical()));

        let spec = SearchSpec::new(3, ratio(3, 4), 2, -4..=4).unwrap();
        assert!(search_parametric(&spec).is_empty());
        assert!(SearchSpec::new(3, ratio(3, 4), 4, -4..=4).is_err());
    }

    #[test]
    fn search_partition_merge_is_order_independent() {
        let spec = SearchSpec::new(2, ratio(1, 2), 2, -4..=4).unwrap();
        let mut parts: Vec<Vec<ParametricSolution>> =
            spec.partitions().into_iter().map(|l| search_parametric_partition(&spec, l)).collect();
        parts.reverse();
        let merged = finalize(parts.into_iter().flatten().collect());
        assert_eq!(merged, search_parametric(&spec));
    }

    #[test]
    fn families_lie_in_the_exhaustive_scan() {
        let scans: Vec<(u32, (i64, i64), ZeroSet)> = [(2u32, (1i64, 2i64)), (3, (1, 2)), (2, (3, 4))]
            .iter()
            .map(|&(n, t)| (n, t, bfs_zeros(n, &ratio(t.0, t.1), 150)))
            .collect();
        for row in KNOWN_FAMILIES {
            let s = row.solution();
            let scan = &scans.iter().find(|(n, t, _)| *n == row.n && *t == (row.t_num, row.t_den)).unwrap().2;
            let domain = s.valid_domain();
            for k in -20..=20 {
                if !domain.contains(k) {
                    continue;
                }
                let (x, y) = (s.m_a(k).unwrap(), s.m_b(k).unwrap());
                if x <= 150 && y <= 150 {
                    assert!(scan.contains(x, y), "{row:?} k={k}");
                }
            }
        }
    }

    #[test]
    fn valid_domains() {
        let d = sol(3, (1, 2), &[0, 1], &[0, 1]).valid_domain();
        assert_eq!(d.intervals, vec![KInterval { lo: Some(0), hi: None }]);
        let d = sol(2, (1, 2), &[0, -1, 2], &[1, -3, 2]).valid_domain();
        assert_eq!(d.intervals, vec![KInterval { lo: None, hi: None }]);
        let d = sol(2, (3, 4), &[0, 1, 12], &[0, -9, 36]).valid_domain();
        assert!(d.contains(0) && d.contains(-3) && d.contains(5));
        let d = sol(2, (1, 2), &[4, 0, -1], &[1]).valid_domain();
        assert_eq!(d.intervals, vec![KInterval { lo: Some(-2), hi: Some(2) }]);
    }

    #[test]
    fn branch_points() {
        assert_eq!(extremal_branch_points(1, 0), Some((3, 0)));
        assert_eq!(extremal_branch_points(1, 1), None);
        assert_eq!(extremal_branch_points(3, 0), Some((6, 1)));
        assert_eq!(extremal_branch_points(0, -5), None);
        // both points are zeros of g(·,·|2) at T = 1/2 when k = 0
        let bal = BeamSplitter::balanced();
        for m_a in 0..200i64 {
            if let Some((p, m)) = extremal_branch_points(m_a, 0) {
                assert!(g_poly(m_a, p, 2, &bal).is_zero());
                assert!(g_poly(m_a, m, 2, &bal).is_zero());
            }
        }
    }
}
