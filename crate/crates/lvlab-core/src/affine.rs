//! The affine-sum functional J(f), its bounds, one smoothing step and two test profiles.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::scalar::{Kahan, Real};
use crate::weights::{bump, bump_mass};

pub const GRID_LO: f64 = 0.25;
pub const GRID_HI: f64 = 4.0;
/// |m₃| ≤ M3_SPREAD·M3.
pub const M3_SPREAD: f64 = 2.0;
/// Largest M accepted by [`j_value`].
pub const MAX_SCALE: f64 = 64.0;
const MAX_U_POINTS: usize = 40_000_000;
const PLACEMENT_ATTEMPTS: usize = 10_000;

/// Nonnegative samples of f on a uniform grid over [1/4, 4].
#[derive(Clone, Debug)]
pub struct DensityProfile<F> {
    t: F,
    h: F,
    samples: Vec<F>,
    l1: F,
    l2_sq: F,
    sup: F,
    tags: Vec<(String, String)>,
}

fn trapezoid<F: Real>(vals: impl Iterator<Item = F>, h: F) -> F {
    let mut acc = Kahan::new();
    let mut first = None;
    let mut last = F::zero();
    for v in vals {
        if first.is_none() {
            first = Some(v);
        }
        acc.add(v);
        last = v;
    }
    match first {
        None => F::zero(),
        Some(f) => (acc.value() - (f + last) / F::lit(2.0)) * h,
    }
}

impl<F: Real> DensityProfile<F> {
    /// Grid size for scale T: spacing at most 1/(8T).
    pub fn grid_len(t: F) -> usize {
        let span = F::lit(GRID_HI - GRID_LO);
        (span * F::lit(8.0) * t).ceil().to_usize().unwrap_or(1).max(1) + 1
    }

    pub fn zeros(t: F) -> Result<Self> {
        Self::from_samples(t, vec![F::zero(); Self::grid_len(t)])
    }

    pub fn from_fn(t: F, f: impl Fn(F) -> F) -> Result<Self> {
        let n = Self::grid_len(t);
        let h = F::lit(GRID_HI - GRID_LO) / F::count(n - 1);
        Self::from_samples(t, (0..n).map(|i| f(F::lit(GRID_LO) + h * F::count(i))).collect())
    }

    pub fn from_samples(t: F, samples: Vec<F>) -> Result<Self> {
        if !(t >= F::one()) {
            return Err(LabError::DomainError("profile scale T must be >= 1".into()));
        }
        if samples.len() < 2 {
            return Err(LabError::DomainError("profile needs at least two samples".into()));
        }
        if let Some(bad) = samples.iter().find(|v| !(v.is_finite() && **v >= F::zero())) {
            return Err(LabError::DomainError(format!("profile sample {} not finite and nonnegative", bad.to_f64_lossy())));
        }
        let h = F::lit(GRID_HI - GRID_LO) / F::count(samples.len() - 1);
        let l1 = trapezoid(samples.iter().copied(), h);
        let l2_sq = trapezoid(samples.iter().map(|v| *v * *v), h);
        let sup = samples.iter().copied().fold(F::zero(), F::max);
        Ok(Self { t, h, samples, l1, l2_sq, sup, tags: Vec::new() })
    }

    pub fn with_tag(mut self, key: &str, value: impl ToString) -> Self {
        self.tags.push((key.to_string(), value.to_string()));
        self
    }

    pub fn scale(&self) -> F {
        self.t
    }

    pub fn spacing(&self) -> F {
        self.h
    }

    pub fn samples(&self) -> &[F] {
        &self.samples
    }

    pub fn tags(&self) -> &[(String, String)] {
        &self.tags
    }

    pub fn l1(&self) -> F {
        self.l1
    }

    pub fn l2_sq(&self) -> F {
        self.l2_sq
    }

    pub fn sup(&self) -> F {
        self.sup
    }

    pub fn node(&self, i: usize) -> F {
        F::lit(GRID_LO) + self.h * F::count(i)
    }

    /// Linear interpolation; zero off the grid.
    #[inline]
    pub fn eval(&self, x: F) -> F {
        let pos = (x - F::lit(GRID_LO)) / self.h;
        if !(pos >= F::zero()) {
            return F::zero();
        }
        let i = match pos.floor().to_usize() {
            Some(i) => i,
            None => return F::zero(),
        };
        let last = self.samples.len() - 1;
        if i > last {
            return F::zero();
        }
        if i == last {
            return if pos == F::count(last) { self.samples[last] } else { F::zero() };
        }
        let a = pos - F::count(i);
        self.samples[i] * (F::one() - a) + self.samples[i + 1] * a
    }

    /// Interval outside which f vanishes, or None for f ≡ 0.
    pub fn support(&self) -> Option<(F, F)> {
        let first = self.samples.iter().position(|v| *v > F::zero())?;
        let last = self.samples.iter().rposition(|v| *v > F::zero())?;
        let lo = first.saturating_sub(1);
        let hi = (last + 1).min(self.samples.len() - 1);
        Some((self.node(lo), self.node(hi)))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("T={:e} n={}", self.t.to_f64_lossy(), self.samples.len());
        for (k, v) in &self.tags {
            let _ = write!(s, " {k}={v}");
        }
        s.push('\n');
        for v in &self.samples {
            let _ = writeln!(s, "{:e}", v.to_f64_lossy());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| LabError::Parse("empty input".into()))?;
        let kv = crate::textio::header_pairs(header)?;
        let t: f64 = crate::textio::field(&kv, "T")?;
        let n: usize = crate::textio::field(&kv, "n")?;
        let samples = lines
            .map(|l| l.trim().parse::<f64>().map(F::lit).map_err(|_| LabError::Parse(format!("bad sample: {l}"))))
            .collect::<Result<Vec<F>>>()?;
        if samples.len() != n {
            return Err(LabError::Parse(format!("header says {n} samples, found {}", samples.len())));
        }
        let mut p = Self::from_samples(F::lit(t), samples)?;
        p.tags = kv.into_iter().filter(|(k, _)| k != "T" && k != "n").collect();
        Ok(p)
    }
}

/// Integers in (M, 2M].
fn dyadic_range<F: Real>(m: F) -> std::ops::RangeInclusive<i64> {
    let lo = m.floor().to_i64().unwrap_or(0) + 1;
    let hi = (F::lit(2.0) * m).floor().to_i64().unwrap_or(0);
    lo..=hi
}

fn m1_values<F: Real>(m1: F) -> Vec<i64> {
    dyadic_range(m1).flat_map(|m| [-m, m]).collect()
}

fn m3_bound<F: Real>(m3: F) -> i64 {
    (F::lit(M3_SPREAD) * m3).floor().to_i64().unwrap_or(0)
}

/// Σ_{|m₁|∈(M1,2M1], m₂∈(M2,2M2], |m₃|≤2·M3} f((m₁u+m₃)/m₂).
pub fn j_inner<F: Real>(f: &DensityProfile<F>, u: F, m1: F, m2: F, m3: F) -> F {
    let c3 = m3_bound(m3);
    let mut acc = Kahan::new();
    for a in m1_values(m1) {
        for b in dyadic_range(m2) {
            for c in -c3..=c3 {
                acc.add(f.eval((F::lit(a as f64) * u + F::lit(c as f64)) / F::lit(b as f64)));
            }
        }
    }
    acc.value()
}

/// Dyadic scales 2^j ≤ M with j ≥ −1.
pub fn dyadic_scales<F: Real>(m: F) -> Vec<F> {
    let mut out = Vec::new();
    let mut s = F::lit(0.5);
    while s <= m {
        out.push(s);
        s = s * F::lit(2.0);
    }
    out
}

/// ∫_ℝ j_inner(f, u, M1, M2, M3)² du on a grid fine enough to resolve every pulled-back cell.
pub fn j_integral<F: Real>(f: &DensityProfile<F>, m1: F, m2: F, m3: F) -> Result<F> {
    let Some((a, b)) = f.support() else {
        return Ok(F::zero());
    };
    let ones = m1_values(m1);
    let twos: Vec<i64> = dyadic_range(m2).collect();
    let c3 = m3_bound(m3);
    if ones.is_empty() || twos.is_empty() {
        return Ok(F::zero());
    }
    let max1 = ones.iter().map(|x| x.abs()).max().unwrap_or(1) as f64;
    let min2 = twos[0] as f64;
    let hu = f.spacing() * F::lit((min2 / max1).min(1.0));
    let preimage = |m1: i64, m2: i64, m3: i64| {
        let (p, q) = (
            (F::lit(m2 as f64) * a - F::lit(m3 as f64)) / F::lit(m1 as f64),
            (F::lit(m2 as f64) * b - F::lit(m3 as f64)) / F::lit(m1 as f64),
        );
        (p.min(q), p.max(q))
    };
    let mut lo = F::infinity();
    let mut hi = F::neg_infinity();
    for &x in &ones {
        for &y in &twos {
            for z in [-c3, c3] {
                let (p, q) = preimage(x, y, z);
                lo = lo.min(p);
                hi = hi.max(q);
            }
        }
    }
    let count = ((hi - lo) / hu).ceil().to_usize().unwrap_or(usize::MAX).saturating_add(1);
    if count > MAX_U_POINTS {
        return Err(LabError::BudgetExceeded(format!("u-grid of {count} points")));
    }
    let mut acc = vec![F::zero(); count];
    for &x in &ones {
        let fx = F::lit(x as f64);
        for &y in &twos {
            let fy = F::lit(y as f64);
            for z in -c3..=c3 {
                let fz = F::lit(z as f64);
                let (p, q) = preimage(x, y, z);
                let i0 = ((p - lo) / hu).floor().to_usize().unwrap_or(0);
                let i1 = ((q - lo) / hu).ceil().to_usize().unwrap_or(0).min(count - 1);
                for (i, slot) in acc.iter_mut().enumerate().take(i1 + 1).skip(i0) {
                    let u = lo + hu * F::count(i);
                    *slot = *slot + f.eval((fx * u + fz) / fy);
                }
            }
        }
    }
    Ok(trapezoid(acc.into_iter().map(|v| v * v), hu))
}

/// Maximizing dyadic triple and the value of J(f).
#[derive(Clone, Copy, Debug)]
pub struct JValue<F> {
    pub value: F,
    pub argmax: (F, F, F),
}

/// J(f) = sup over dyadic M1, M2, M3 ≤ M of [`j_integral`].
pub fn j_value<F: Real>(f: &DensityProfile<F>, m: F) -> Result<F> {
    j_value_detail(f, m).map(|j| j.value)
}

pub fn j_value_detail<F: Real>(f: &DensityProfile<F>, m: F) -> Result<JValue<F>> {
    if m > F::lit(MAX_SCALE) {
        return Err(LabError::BudgetExceeded(format!("M = {} above {MAX_SCALE}", m.to_f64_lossy())));
    }
    let scales = dyadic_scales(m);
    let mut triples: Vec<(F, F, F)> = Vec::new();
    for &a in &scales {
        for &b in &scales {
            for &c in &scales {
                triples.push((a, b, c));
            }
        }
    }
    let vals = triples
        .par_iter()
        .map(|&(a, b, c)| j_integral(f, a, b, c))
        .collect::<Result<Vec<F>>>()?;
    let mut best = JValue { value: F::zero(), argmax: (F::zero(), F::zero(), F::zero()) };
    for (v, t) in vals.into_iter().zip(triples) {
        if v > best.value {
            best = JValue { value: v, argmax: t };
        }
    }
    Ok(best)
}

/// M⁶‖f‖₁² + M⁴‖f‖₂².
pub fn propsumaff_bound<F: Real>(f: &DensityProfile<F>, m: F) -> F {
    m.powi(6) * f.l1() * f.l1() + m.powi(4) * f.l2_sq()
}

/// max over dyadic triples of |A|·Σ_A (m₂/|m₁|)·‖f‖₂², the Cauchy–Schwarz ceiling for each integral.
pub fn cauchy_schwarz_bound<F: Real>(f: &DensityProfile<F>, m: F) -> F {
    let scales = dyadic_scales(m);
    let mut best = F::zero();
    for &a in &scales {
        let ones = m1_values(a);
        for &b in &scales {
            let twos: Vec<i64> = dyadic_range(b).collect();
            for &c in &scales {
                let width = F::count((2 * m3_bound(c) + 1) as usize);
                let size = F::count(ones.len() * twos.len()) * width;
                let mut stretch = Kahan::new();
                for x in &ones {
                    for y in &twos {
                        stretch.add(F::lit(*y as f64 / x.unsigned_abs() as f64) * width);
                    }
                }
                best = best.max(size * stretch.value());
            }
        }
    }
    best * f.l2_sq()
}

/// f̃(u) = T∫ψ(T(u−u'))f(u')du' with ψ the cell bump.
pub fn smooth_f<F: Real>(f: &DensityProfile<F>) -> Result<DensityProfile<F>> {
    let t = f.scale();
    let h = f.spacing();
    let reach = (F::one() / (t * h)).ceil().to_usize().unwrap_or(0);
    let kernel: Vec<F> = (0..=2 * reach)
        .map(|k| {
            let off = F::count(k) - F::count(reach);
            t * bump(t * h * off) * h
        })
        .collect();
    let src = f.samples();
    let n = src.len();
    let out: Vec<F> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = Kahan::new();
            for (k, w) in kernel.iter().enumerate() {
                let j = i as isize + k as isize - reach as isize;
                if j >= 0 && (j as usize) < n && *w > F::zero() {
                    acc.add(*w * src[j as usize]);
                }
            }
            acc.value()
        })
        .collect();
    DensityProfile::from_samples(t, out)
}

/// The J iteration's right side M⁶‖f‖₁² + (M⁴‖f‖₂²)^{1/2}·J(f̃)^{1/2}.
pub fn jiteration_rhs<F: Real>(f: &DensityProfile<F>, m: F) -> Result<F> {
    let tilde = smooth_f(f)?;
    let jt = j_value(&tilde, m)?;
    Ok(m.powi(6) * f.l1() * f.l1() + (m.powi(4) * f.l2_sq()).sqrt() * jt.sqrt())
}

fn cells<F: Real>(t: F, centres: &[F]) -> Result<DensityProfile<F>> {
    let n = DensityProfile::<F>::grid_len(t);
    let h = F::lit(GRID_HI - GRID_LO) / F::count(n - 1);
    let mut samples = vec![F::zero(); n];
    let reach = (F::one() / (t * h)).ceil().to_usize().unwrap_or(0) + 1;
    for &c in centres {
        let mid = ((c - F::lit(GRID_LO)) / h).round().to_usize().unwrap_or(0);
        for (i, slot) in samples.iter_mut().enumerate().take((mid + reach + 1).min(n)).skip(mid.saturating_sub(reach)) {
            let x = F::lit(GRID_LO) + h * F::count(i);
            *slot = *slot + bump(t * (x - c));
        }
    }
    DensityProfile::from_samples(t, samples)
}

/// `count` disjoint 1/T-cells with uniform centres in [1/2, 2].
pub fn fixture_random_intervals<F: Real>(t: F, count: usize, seed: u64) -> Result<DensityProfile<F>> {
    if F::count(count) / t > F::one() {
        return Err(LabError::DomainError("count/T must be at most 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gap = F::lit(2.0) / t;
    let lo = F::lit(0.5) + F::one() / t;
    let span = F::lit(1.5) - F::lit(2.0) / t;
    let mut centres: Vec<F> = Vec::with_capacity(count);
    let mut attempts = 0;
    while centres.len() < count {
        attempts += 1;
        if attempts > PLACEMENT_ATTEMPTS {
            return Err(LabError::PlacementFailure(format!("placed {} of {count} cells", centres.len())));
        }
        let c = lo + span * F::lit(rng.gen::<f64>());
        if centres.iter().all(|d| (c - *d).abs() > gap) {
            centres.push(c);
        }
    }
    Ok(cells(t, &centres)?.with_tag("fixture", "random").with_tag("count", count).with_tag("seed", seed))
}

/// Distinct r/s ∈ [1/2, 2] with r, s ∈ (B, 2B].
pub fn farey_points(b: u64) -> Vec<Ratio<i64>> {
    let lo = Ratio::new(1, 2);
    let hi = Ratio::from_integer(2);
    let mut set = BTreeSet::new();
    for r in b + 1..=2 * b {
        for s in b + 1..=2 * b {
            let q = Ratio::new(r as i64, s as i64);
            if q >= lo && q <= hi {
                set.insert(q);
            }
        }
    }
    set.into_iter().collect()
}

/// 1/T-cells centred at every fraction from [`farey_points`].
pub fn fixture_farey<F: Real>(b: u64, t: F) -> Result<DensityProfile<F>> {
    if F::count((b * b) as usize) > t {
        return Err(LabError::DomainError("need B^2 <= T".into()));
    }
    let centres: Vec<F> = farey_points(b).iter().map(|q| F::lit(*q.numer() as f64 / *q.denom() as f64)).collect();
    Ok(cells(t, &centres)?.with_tag("fixture", "farey").with_tag("B", b))
}

/// Mass of one cell: ∫ψ / T.
pub fn cell_mass<F: Real>(t: F) -> F {
    bump_mass::<F>() / t
}
