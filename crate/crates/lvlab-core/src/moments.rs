//! Discrete moments of R over rationals n₁/n₂, level sets of ⌊t₁−t₂⌋, the gcd split and energy bounds.

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::dirichlet::r_eval;
use crate::error::{LabError, Result};
use crate::scalar::{cis, Kahan, KahanC, Real};

/// Ceiling on |W|·(distinct fractions) evaluations.
pub const MOMENT_BUDGET: f64 = 2e9;
pub const LEVEL_SET_LIMIT: usize = 10_000;
/// Per-d partial sums are kept for d up to this value.
pub const PER_D_LIMIT: u64 = 64;

fn check_budget(points: usize, m: u64) -> Result<()> {
    let pairs = (m as f64) * (m as f64);
    if pairs * (points.max(1) as f64) > MOMENT_BUDGET {
        return Err(LabError::BudgetExceeded(format!("{pairs:e} pairs against |W| = {points}")));
    }
    Ok(())
}

fn abs_pow<F: Real>(z: F, p: u32) -> F {
    z.powi(p as i32)
}

fn check_power(p: u32) -> Result<()> {
    if !(2..=4).contains(&p) {
        return Err(LabError::DomainError(format!("moment power {p} not in 2..=4")));
    }
    Ok(())
}

/// |R(a/b)| for coprime a, b.
fn r_abs<F: Real>(points: &[F], a: u64, b: u64) -> F {
    r_eval(points, F::count(a as usize) / F::count(b as usize)).map(|z| z.norm()).unwrap_or(F::zero())
}

/// |R| at every reduced fraction n₁/n₂ with M < n₁, n₂ ≤ 2M.
fn fraction_table<F: Real>(points: &[F], m: u64) -> HashMap<(u64, u64), F> {
    let mut keys: Vec<(u64, u64)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for a in m + 1..=2 * m {
        for b in m + 1..=2 * m {
            let g = a.gcd(&b);
            let k = (a / g, b / g);
            if seen.insert(k) {
                keys.push(k);
            }
        }
    }
    let vals: Vec<F> = keys.par_iter().map(|&(a, b)| r_abs(points, a, b)).collect();
    keys.into_iter().zip(vals).collect()
}

/// Σ_{M<n₁,n₂≤2M} |R(n₁/n₂)|^p with one R evaluation per reduced fraction.
pub fn discrete_moment<F: Real>(points: &[F], m: u64, p: u32) -> Result<F> {
    check_power(p)?;
    check_budget(points.len(), m)?;
    if m == 0 {
        return Ok(F::zero());
    }
    let table = fraction_table(points, m);
    let rows: Vec<F> = (m + 1..=2 * m)
        .into_par_iter()
        .map(|a| {
            let mut acc = Kahan::new();
            for b in m + 1..=2 * m {
                let g = a.gcd(&b);
                acc.add(abs_pow(table[&(a / g, b / g)], p));
            }
            acc.value()
        })
        .collect();
    Ok(crate::scalar::ksum(rows))
}

/// Same sum with R evaluated afresh for every pair.
pub fn discrete_moment_direct<F: Real>(points: &[F], m: u64, p: u32) -> Result<F> {
    check_power(p)?;
    check_budget(points.len(), m)?;
    let mut acc = Kahan::new();
    for a in m + 1..=2 * m {
        for b in m + 1..=2 * m {
            let lv = F::count(a as usize).ln() - F::count(b as usize).ln();
            let mut r = KahanC::new();
            for &t in points {
                r.add(cis(t * lv));
            }
            acc.add(abs_pow(r.value().norm(), p));
        }
    }
    Ok(acc.value())
}

/// Counts r(u) = #{(t₁,t₂) : ⌊t₁−t₂⌋ = u} grouped into dyadic classes r ∈ (B, 2B].
#[derive(Clone, Debug, Serialize)]
pub struct LevelSetSummary {
    pub points: usize,
    /// u ↦ r(u), all nonzero counts.
    pub counts: BTreeMap<i64, u64>,
    pub levels: Vec<LevelSet>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelSet {
    pub b: f64,
    pub members: Vec<i64>,
    /// Σ_{u∈U_B} r(u).
    pub mass: u64,
    /// Σ_{u∈U_B} r(u)².
    pub square_mass: u64,
}

impl LevelSetSummary {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Checks Σr = |W|², B|U_B| ≤ Σ_{U_B} r ≤ |W|² and Σ_{U_B} r² ≤ E.
    pub fn check(&self, energy: u64) -> bool {
        let w2 = (self.points * self.points) as u64;
        self.total() == w2
            && self.levels.iter().all(|l| {
                let lower = l.b * l.members.len() as f64;
                lower <= l.mass as f64 && l.mass <= w2 && l.square_mass <= energy
            })
    }
}

/// Exact level sets from the multiset of ⌊t₁ − t₂⌋.
pub fn level_sets<F: Real>(points: &[F]) -> Result<LevelSetSummary> {
    if points.len() > LEVEL_SET_LIMIT {
        return Err(LabError::SizeLimit(format!("|W| = {} above {LEVEL_SET_LIMIT}", points.len())));
    }
    let mut diffs: Vec<i64> = Vec::with_capacity(points.len() * points.len());
    for &a in points {
        for &b in points {
            diffs.push((a - b).floor().to_i64().ok_or_else(|| LabError::Overflow("difference out of range".into()))?);
        }
    }
    diffs.sort_unstable();
    let mut counts = BTreeMap::new();
    for chunk in diffs.chunk_by(|a, b| a == b) {
        counts.insert(chunk[0], chunk.len() as u64);
    }
    let mut grouped: BTreeMap<i32, Vec<i64>> = BTreeMap::new();
    for (&u, &r) in &counts {
        // r ∈ (B, 2B] with B = 2^j, j ≥ −1
        let j = (r as f64).log2().ceil() as i32 - 1;
        grouped.entry(j).or_default().push(u);
    }
    let levels = grouped
        .into_iter()
        .map(|(j, members)| {
            let mass = members.iter().map(|u| counts[u]).sum();
            let square_mass = members.iter().map(|u| counts[u] * counts[u]).sum();
            LevelSet { b: 2f64.powi(j), members, mass, square_mass }
        })
        .collect();
    Ok(LevelSetSummary { points: points.len(), counts, levels })
}

/// Pairs split by d = gcd(n₁, n₂) at the threshold D.
#[derive(Clone, Debug, Serialize)]
pub struct GcdSplit {
    pub threshold: f64,
    pub small_sum: f64,
    pub large_sum: f64,
    pub total: f64,
    /// (d, Σ over pairs with gcd exactly d) for d ≤ 64.
    pub per_d: Vec<(u64, f64)>,
}

impl GcdSplit {
    pub fn partition_error(&self) -> f64 {
        (self.small_sum + self.large_sum - self.total).abs() / self.total.abs().max(f64::MIN_POSITIVE)
    }
}

/// Σ_{N<n₁,n₂≤2N} |R(n₁/n₂)|^p split into gcd ≤ D and gcd > D.
pub fn gcd_split_moment<F: Real>(points: &[F], n: u64, d: F, p: u32) -> Result<GcdSplit> {
    check_power(p)?;
    check_budget(points.len(), n)?;
    let table = fraction_table(points, n);
    let rows: Vec<(F, F, Vec<F>)> = (n + 1..=2 * n)
        .into_par_iter()
        .map(|a| {
            let mut small = Kahan::new();
            let mut large = Kahan::new();
            let mut per = vec![Kahan::new(); PER_D_LIMIT as usize];
            for b in n + 1..=2 * n {
                let g = a.gcd(&b);
                let v = abs_pow(table[&(a / g, b / g)], p);
                if F::count(g as usize) <= d {
                    small.add(v);
                } else {
                    large.add(v);
                }
                if g <= PER_D_LIMIT {
                    per[(g - 1) as usize].add(v);
                }
            }
            (small.value(), large.value(), per.into_iter().map(|k| k.value()).collect())
        })
        .collect();
    let mut small = Kahan::new();
    let mut large = Kahan::new();
    let mut per = vec![Kahan::<F>::new(); PER_D_LIMIT as usize];
    for (s, l, pd) in &rows {
        small.add(*s);
        large.add(*l);
        for (acc, v) in per.iter_mut().zip(pd) {
            acc.add(*v);
        }
    }
    let total = discrete_moment(points, n, p)?;
    Ok(GcdSplit {
        threshold: d.to_f64_lossy(),
        small_sum: small.value().to_f64_lossy(),
        large_sum: large.value().to_f64_lossy(),
        total: total.to_f64_lossy(),
        per_d: per
            .into_iter()
            .enumerate()
            .map(|(i, k)| ((i + 1) as u64, k.value().to_f64_lossy()))
            .filter(|(_, v)| *v != 0.0)
            .collect(),
    })
}

/// Σ_{t₁,t₂∈W} |Σ_{M<n≤2M} aₙ n^{i(t₁−t₂)}|², with `coeffs[k]` the coefficient of n = M+1+k.
pub fn hb_sum<F: Real>(points: &[F], coeffs: &[num_complex::Complex<F>], m: u64) -> Result<F> {
    if coeffs.len() as u64 != m {
        return Err(LabError::DomainError(format!("expected {m} coefficients, got {}", coeffs.len())));
    }
    if coeffs.iter().any(|c| c.norm() > F::one() + F::epsilon() * F::lit(8.0)) {
        return Err(LabError::DomainError("coefficients must satisfy |a_n| <= 1".into()));
    }
    let k = points.len() as f64;
    if k * k * m as f64 > MOMENT_BUDGET {
        return Err(LabError::BudgetExceeded(format!("{:e} terms", k * k * m as f64)));
    }
    let logs: Vec<F> = (m + 1..=2 * m).map(|x| F::count(x as usize).ln()).collect();
    let inner = |d: F| {
        let mut acc = KahanC::new();
        for (c, l) in coeffs.iter().zip(&logs) {
            acc.add(*c * cis(d * *l));
        }
        acc.value().norm_sqr()
    };
    let diag = F::count(points.len()) * inner(F::zero());
    let off: Vec<F> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = Kahan::new();
            for j in i + 1..points.len() {
                acc.add(inner(points[i] - points[j]));
            }
            acc.value()
        })
        .collect();
    Ok(diag + F::lit(2.0) * crate::scalar::ksum(off))
}

/// |W|²M + |W|M² + |W|^{5/4}T^{1/2}M.
pub fn hb_rhs<F: Real>(w: F, m: F, t: F) -> F {
    w * w * m + w * m * m + w.powf(F::lit(1.25)) * t.sqrt() * m
}

fn check_sigma<F: Real>(sigma: F) -> Result<()> {
    if !(sigma >= F::lit(0.5) && sigma < F::one()) {
        return Err(LabError::DomainError(format!("sigma = {} outside [1/2, 1)", sigma.to_f64_lossy())));
    }
    Ok(())
}

/// |W|³N^{1−2σ} + |W|²N^{2−2σ}.
pub fn energy_rhs_basic<F: Real>(w: F, n: F, sigma: F) -> Result<F> {
    check_sigma(sigma)?;
    let two = F::lit(2.0);
    Ok(w.powi(3) * n.powf(F::one() - two * sigma) + w * w * n.powf(two - two * sigma))
}

/// |W|N^{4−4σ} + |W|^{21/8}T^{1/4}N^{1−2σ} + |W|³N^{1−2σ}.
pub fn energy_rhs_refined<F: Real>(w: F, n: F, t: F, sigma: F) -> Result<F> {
    check_sigma(sigma)?;
    let four = F::lit(4.0);
    let lead = n.powf(F::one() - F::lit(2.0) * sigma);
    Ok(w * n.powf(four - four * sigma) + w.powf(F::lit(21.0 / 8.0)) * t.powf(F::lit(0.25)) * lead + w.powi(3) * lead)
}

/// E(W) / (N^{−2σ}·Σ|R(n₁/n₂)|³).
pub fn energy1_ratio<F: Real>(points: &[F], energy: u64, n: u64, sigma: F) -> Result<F> {
    let m3 = discrete_moment(points, n, 3)?;
    let scale = F::count(n as usize).powf(-F::lit(2.0) * sigma);
    Ok(F::count(energy as usize) / (scale * m3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::additive_energy;
    use num_complex::Complex;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(seed: u64, m: usize, t: f64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out: Vec<f64> = Vec::new();
        while out.len() < m {
            let x = rng.gen::<f64>() * t;
            if out.iter().all(|y| (x - y).abs() >= 1.0) {
                out.push(x);
            }
        }
        out
    }

    #[test]
    fn single_point_moment() {
        for p in 2..=4 {
            assert!((discrete_moment(&[0.0f64], 8, p).unwrap() - 64.0).abs() < 1e-9);
        }
        assert!(discrete_moment(&[0.0f64], 8, 5).is_err());
        assert!(matches!(discrete_moment(&[0.0f64; 10], 100_000, 2), Err(LabError::BudgetExceeded(_))));
    }

    #[test]
    fn cached_matches_direct() {
        for m in [4u64, 8, 16] {
            let w = random_points(m, 6, 200.0);
            for p in 2..=4 {
                let a = discrete_moment(&w, m, p).unwrap();
                let b = discrete_moment_direct(&w, m, p).unwrap();
                assert!((a - b).abs() <= 1e-9 * b, "{m} {p}");
            }
        }
    }

    #[test]
    fn level_set_example() {
        let s = level_sets(&[0.0f64, 10.0, 20.0]).unwrap();
        let want: BTreeMap<i64, u64> = [(-20, 1), (-10, 2), (0, 3), (10, 2), (20, 1)].into_iter().collect();
        assert_eq!(s.counts, want);
        assert_eq!(s.total(), 9);
        let one = level_sets(&[4.5f64]).unwrap();
        assert_eq!(one.counts.into_iter().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn level_set_classes() {
        let s = level_sets(&[0.0f64, 10.0, 20.0]).unwrap();
        let bs: Vec<(f64, Vec<i64>)> = s.levels.iter().map(|l| (l.b, l.members.clone())).collect();
        assert_eq!(bs, vec![(0.5, vec![-20, 20]), (1.0, vec![-10, 10]), (2.0, vec![0])]);
    }

    #[test]
    fn gcd_partition() {
        let w = random_points(2, 5, 300.0);
        let g = gcd_split_moment(&w, 32, 4.0f64, 3).unwrap();
        assert!(g.partition_error() < 1e-9);
        let per: f64 = g.per_d.iter().map(|x| x.1).sum();
        assert!((per - g.total).abs() < 1e-9 * g.total);
        let all_small = gcd_split_moment(&w, 32, 1e9f64, 3).unwrap();
        assert_eq!(all_small.large_sum, 0.0);
        let edge = gcd_split_moment(&w, 1, 2.0f64, 3).unwrap();
        assert_eq!(edge.large_sum, 0.0);
    }

    #[test]
    fn heath_brown_examples() {
        let ones = vec![Complex::new(1.0f64, 0.0); 10];
        assert!((hb_sum(&[3.0f64], &ones, 10).unwrap() - 100.0).abs() < 1e-9);
        let zeros = vec![Complex::new(0.0f64, 0.0); 10];
        assert_eq!(hb_sum(&random_points(1, 5, 100.0), &zeros, 10).unwrap(), 0.0);
        assert!(hb_sum(&[0.0f64], &[Complex::new(2.0, 0.0)], 1).is_err());
        let w = random_points(4, 12, 400.0);
        let v = hb_sum(&w, &ones, 10).unwrap();
        assert!(v <= 10.0 * hb_rhs(12.0, 10.0, 400.0));
    }

    #[test]
    fn energy_formulas() {
        let b = energy_rhs_basic(10.0f64, 100.0, 0.5).unwrap();
        assert!((b - (1000.0 + 100.0 * 100.0)).abs() < 1e-9);
        assert!(energy_rhs_basic(10.0f64, 100.0, 1.0).is_err());
        let (n, t, s) = (1e4f64, 1e6f64, 0.75f64);
        let w = t * n.powf(1.0 - 2.0 * s);
        let r = energy_rhs_refined(w, n, t, s).unwrap();
        let lead = w * n.powf(4.0 - 4.0 * s);
        assert!((lead / ((n / t).powi(2) * w.powi(3)) - 1.0).abs() < 1e-9);
        let random = w.powi(3) * n.powf(1.0 - 2.0 * s);
        assert!((random / (w.powi(4) / t) - 1.0).abs() < 1e-9);
        let middle = w.powf(21.0 / 8.0) * t.powf(0.25) * n.powf(1.0 - 2.0 * s);
        assert!((r - lead - random - middle).abs() < 1e-9 * r);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn level_set_invariants(seed in 0u64..10_000, m in 1usize..30) {
            let w = random_points(seed, m, 80.0);
            let s = level_sets(&w).unwrap();
            prop_assert_eq!(s.total(), (m * m) as u64);
            let e = additive_energy(&w, 1.0).unwrap();
            prop_assert!(s.check(e));
        }
    }
}
