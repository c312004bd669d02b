//! Poisson-dual decomposition of tr(G³) into I_m terms and the S₁/S₂/S₃ classes.

use std::collections::HashMap;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::dirichlet::{r_eval, r_smoothed, PointSet, SmoothingSpec};
use crate::error::{LabError, Result};
use crate::fourier::HTransform;
use crate::quadrature::GaussLegendre;
use crate::scalar::{Kahan, KahanC, Real};
use crate::spectral::{build_gram, matmul, trace_gram_cubed_complex};
use crate::weights::SmoothWeight;

/// Default ceiling on the split's work estimate.
pub const SPLIT_BUDGET: f64 = 1e9;

/// Largest |W| accepted by the I_m routines.
pub const MAX_POINTS: usize = 256;

/// Zero pattern of a frequency triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TripleClass {
    Zero,
    OneNonzero,
    TwoNonzero,
    ThreeNonzero,
}

/// m = (m₁, m₂, m₃).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TripleIndex {
    pub m: [i64; 3],
}

impl TripleIndex {
    pub fn new(m1: i64, m2: i64, m3: i64) -> Self {
        Self { m: [m1, m2, m3] }
    }

    pub fn class(&self) -> TripleClass {
        match self.m.iter().filter(|x| **x != 0).count() {
            0 => TripleClass::Zero,
            1 => TripleClass::OneNonzero,
            2 => TripleClass::TwoNonzero,
            _ => TripleClass::ThreeNonzero,
        }
    }

    /// The six permutations of m.
    pub fn permutations(&self) -> [TripleIndex; 6] {
        let [a, b, c] = self.m;
        [
            Self::new(a, b, c),
            Self::new(a, c, b),
            Self::new(b, a, c),
            Self::new(b, c, a),
            Self::new(c, a, b),
            Self::new(c, b, a),
        ]
    }
}

/// Truncation radius M* = ⌈T^{1+ε}/N⌉.
pub fn truncation_radius(t_length: f64, n: u64, eps: f64) -> i64 {
    (t_length.max(1.0).powf(1.0 + eps) / n as f64).ceil().max(1.0) as i64
}

/// The matrices A(m)[j,k] = ĥ_{t_j−t_k}(mN) for m in a symmetric range.
pub struct HatTables<F> {
    radius: i64,
    mats: Vec<Vec<Complex<F>>>,
}

impl<F: Real> HatTables<F> {
    /// Builds A(m) for |m| ≤ radius; ĥ values shared through a cache on (t-difference, m).
    pub fn build(points: &[F], n: u64, radius: i64) -> Result<Self> {
        Self::build_for(points, n, &(-radius..=radius).collect::<Vec<_>>(), radius)
    }

    fn build_for(points: &[F], n: u64, ms: &[i64], radius: i64) -> Result<Self> {
        let dim = points.len();
        if dim > MAX_POINTS {
            return Err(LabError::BudgetExceeded(format!("|W| = {dim} above {MAX_POINTS}")));
        }
        let engine = HTransform::<F>::new();
        let nf = F::count(n as usize);
        let mut keys: Vec<(F, i64)> = Vec::new();
        let mut seen: HashMap<(u64, i64), usize> = HashMap::new();
        let mut slots: Vec<Vec<usize>> = Vec::with_capacity(ms.len());
        for &m in ms {
            let mut slot = Vec::with_capacity(dim * dim);
            for j in 0..dim {
                for k in 0..dim {
                    let d = points[j] - points[k];
                    let key = (d.to_f64_lossy().to_bits(), m);
                    let idx = *seen.entry(key).or_insert_with(|| {
                        keys.push((d, m));
                        keys.len() - 1
                    });
                    slot.push(idx);
                }
            }
            slots.push(slot);
        }
        let values: Vec<Complex<F>> = keys
            .par_iter()
            .map(|(d, m)| engine.eval(*d, F::lit(*m as f64) * nf))
            .collect::<Result<Vec<_>>>()?;
        let mut mats = vec![Vec::new(); (2 * radius + 1) as usize];
        for (m, slot) in ms.iter().zip(slots) {
            mats[(m + radius) as usize] = slot.into_iter().map(|i| values[i]).collect();
        }
        Ok(Self { radius, mats })
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn matrix(&self, m: i64) -> &[Complex<F>] {
        &self.mats[(m + self.radius) as usize]
    }
}

fn trace_product<F: Real>(b: &[Complex<F>], c: &[Complex<F>], dim: usize) -> Complex<F> {
    let mut acc = KahanC::new();
    for j in 0..dim {
        for k in 0..dim {
            acc.add(b[j * dim + k] * c[k * dim + j]);
        }
    }
    acc.value()
}

/// I_m = N³·tr(A(m₁)A(m₂)A(m₃)).
pub fn compute_i_m<F: Real>(points: &[F], n: u64, m: TripleIndex) -> Result<Complex<F>> {
    let radius = m.m.iter().map(|x| x.abs()).max().unwrap_or(0);
    let mut ms: Vec<i64> = m.m.to_vec();
    ms.sort_unstable();
    ms.dedup();
    let tables = HatTables::build_for(points, n, &ms, radius)?;
    let dim = points.len();
    let ab = matmul(tables.matrix(m.m[0]), tables.matrix(m.m[1]), dim);
    let n3 = F::count(n as usize).powi(3);
    Ok(trace_product(&ab, tables.matrix(m.m[2]), dim) * n3)
}

/// Real and imaginary parts for reports.
#[derive(Clone, Copy, Debug, Default, Serialize, PartialEq)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl ComplexValue {
    pub fn of<F: Real>(z: Complex<F>) -> Self {
        Self { re: z.re.to_f64_lossy(), im: z.im.to_f64_lossy() }
    }

    pub fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Both routes to tr(G³) and the class split of the dual sum.
#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    pub n: u64,
    pub points: usize,
    pub t_length: f64,
    pub eps: f64,
    pub m_star: i64,
    pub trace3_exact: f64,
    pub trace3_imag: f64,
    /// N³|W|‖w‖⁶.
    pub main_term: f64,
    /// The full m = 0 term N³ Σ_{t₁,t₂,t₃} ĥ(0)ĥ(0)ĥ(0).
    pub i0: ComplexValue,
    /// i0 − main_term: off-diagonal t-differences at m = 0.
    pub i0_offdiag: ComplexValue,
    pub s1: ComplexValue,
    pub s2: ComplexValue,
    pub s3: ComplexValue,
    /// |trace3_exact − main_term − S₁ − S₂ − S₃|.
    pub residual: f64,
    pub relative_residual: f64,
    /// |trace3_exact − I₀ − S₁ − S₂ − S₃|.
    pub identity_residual: f64,
    pub identity_relative: f64,
    /// |S₁| / main_term.
    pub s1_ratio: f64,
    /// First-shell estimate of the skipped tail |m| = M*+1.
    pub tail_probe: f64,
}

/// Work estimate for [`s_split`]: triple traces plus quadrature nodes.
pub fn split_work(points: usize, n: u64, t_length: f64, m_star: i64) -> f64 {
    let side = (2 * m_star + 1) as f64;
    let w = points as f64;
    let xi = m_star as f64 * n as f64;
    let panels = HTransform::<f64>::initial_panels(t_length, xi) as f64;
    side.powi(3) * w.powi(3) + side * w * w * 32.0 * panels
}

/// Sums I_m over 0 < max|mᵢ| ≤ M* by zero pattern and compares with the Gram route.
pub fn s_split<F: Real>(w: &PointSet<F>, n: u64, eps: f64) -> Result<TraceReport> {
    s_split_with_budget(w, n, eps, SPLIT_BUDGET)
}

pub fn s_split_with_budget<F: Real>(w: &PointSet<F>, n: u64, eps: f64, budget: f64) -> Result<TraceReport> {
    let points = w.points();
    let dim = points.len();
    let t_length = w.ambient_length().to_f64_lossy();
    let m_star = truncation_radius(t_length, n, eps);
    let work = split_work(dim, n, t_length, m_star);
    if work > budget {
        return Err(LabError::BudgetExceeded(format!("split work {work:e} above {budget:e}")));
    }
    if dim > MAX_POINTS {
        return Err(LabError::BudgetExceeded(format!("|W| = {dim} above {MAX_POINTS}")));
    }
    let weight = SmoothWeight::<F>::new();
    let nf = F::count(n as usize);
    let n3 = nf.powi(3);
    let main = n3 * F::count(dim) * weight.l2_pow6();
    if dim == 0 {
        return Ok(TraceReport {
            n,
            points: 0,
            t_length,
            eps,
            m_star,
            trace3_exact: 0.0,
            trace3_imag: 0.0,
            main_term: 0.0,
            i0: ComplexValue::default(),
            i0_offdiag: ComplexValue::default(),
            s1: ComplexValue::default(),
            s2: ComplexValue::default(),
            s3: ComplexValue::default(),
            residual: 0.0,
            relative_residual: 0.0,
            identity_residual: 0.0,
            identity_relative: 0.0,
            s1_ratio: 0.0,
            tail_probe: 0.0,
        });
    }
    let gram = build_gram(points, n)?;
    let exact = trace_gram_cubed_complex(&gram);

    let tables = HatTables::build(points, n, m_star + 1)?;
    let range: Vec<i64> = (-m_star..=m_star).collect();
    let pairs: Vec<(i64, i64)> = range.iter().flat_map(|&a| range.iter().map(move |&b| (a, b))).collect();
    let per_pair: Vec<[Complex<F>; 4]> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let ab = matmul(tables.matrix(a), tables.matrix(b), dim);
            let mut buckets = [KahanC::new(); 4];
            for &c in &range {
                let t = TripleIndex::new(a, b, c);
                let v = trace_product(&ab, tables.matrix(c), dim) * n3;
                let slot = match t.class() {
                    TripleClass::Zero => 0,
                    TripleClass::OneNonzero => 1,
                    TripleClass::TwoNonzero => 2,
                    TripleClass::ThreeNonzero => 3,
                };
                buckets[slot].add(v);
            }
            [buckets[0].value(), buckets[1].value(), buckets[2].value(), buckets[3].value()]
        })
        .collect();
    let mut totals = [KahanC::<F>::new(); 4];
    for b in &per_pair {
        for (t, v) in totals.iter_mut().zip(b) {
            t.add(*v);
        }
    }
    let [i0, s1, s2, s3] = totals.map(|t| t.value());
    let main_c = Complex::new(main, F::zero());
    let residual = (exact - main_c - s1 - s2 - s3).re.abs();
    let identity = (exact - i0 - s1 - s2 - s3).re.abs();

    let shell = m_star + 1;
    let a0 = tables.matrix(0);
    let mut probe = Kahan::new();
    for c in [shell, -shell] {
        let ab = matmul(a0, a0, dim);
        probe.add(trace_product(&ab, tables.matrix(c), dim).norm() * n3);
    }
    let exact_re = exact.re.to_f64_lossy();
    let scale = exact_re.abs().max(f64::MIN_POSITIVE);
    Ok(TraceReport {
        n,
        points: dim,
        t_length,
        eps,
        m_star,
        trace3_exact: exact_re,
        trace3_imag: exact.im.to_f64_lossy(),
        main_term: main.to_f64_lossy(),
        i0: ComplexValue::of(i0),
        i0_offdiag: ComplexValue::of(i0 - main_c),
        s1: ComplexValue::of(s1),
        s2: ComplexValue::of(s2),
        s3: ComplexValue::of(s3),
        residual: residual.to_f64_lossy(),
        relative_residual: residual.to_f64_lossy() / scale,
        identity_residual: identity.to_f64_lossy(),
        identity_relative: identity.to_f64_lossy() / scale,
        s1_ratio: s1.norm().to_f64_lossy() / main.to_f64_lossy(),
        tail_probe: F::lit(3.0).to_f64_lossy() * probe.value().to_f64_lossy(),
    })
}

/// N³ ∬_{strip} |R(v₁)R(v₂/v₁)R(v₂)| over {|m₁v₁+m₂v₂+m₃| ≤ c/N} ∩ [1/2,2]².
pub fn key_cancel_rhs<F: Real>(points: &[F], n: u64, m: TripleIndex, c: F) -> Result<F> {
    if m.m.contains(&0) {
        return Err(LabError::DomainError("key cancellation needs all m_i nonzero".into()));
    }
    let [m1, m2, m3] = m.m.map(|x| F::lit(x as f64));
    let nf = F::count(n as usize);
    let half = F::lit(0.5);
    let two = F::lit(2.0);
    let hw = c / (nf * m2.abs());
    // v₂ centre as a function of v₁ is linear: centre(v₁) = −(m₁v₁ + m₃)/m₂
    let centre = |v1: F| -(m1 * v1 + m3) / m2;
    let (ca, cb) = (centre(half), centre(two));
    let (clo, chi) = if ca <= cb { (ca, cb) } else { (cb, ca) };
    if chi < half - hw || clo > two + hw {
        return Ok(F::zero());
    }
    // v₁ range where the centre lies within [1/2 − hw, 2 + hw]
    let slope = -m1 / m2;
    let inv = |c: F| (c + m3 / m2) / slope;
    let (e1, e2) = (inv(half - hw), inv(two + hw));
    let a1 = e1.min(e2).max(half);
    let b1 = e1.max(e2).min(two);
    if a1 >= b1 {
        return Ok(F::zero());
    }
    let scale = {
        let lo = points.iter().copied().fold(F::infinity(), F::min);
        let hi = points.iter().copied().fold(F::neg_infinity(), F::max);
        if points.is_empty() {
            F::one()
        } else {
            hi - lo + F::one()
        }
    };
    let rule = GaussLegendre::<F>::gl16();
    let inner_width = two * hw;
    let inner_panels = {
        let transverse = inner_width * F::lit(8.0) * nf * m2.abs() / F::lit(16.0);
        let along = inner_width * scale / F::lit(2.0);
        transverse.max(along).ceil().to_usize().unwrap_or(1).max(1)
    };
    let inner = |v1: F| -> F {
        let lo = (centre(v1) - hw).max(half);
        let hi = (centre(v1) + hw).min(two);
        if lo >= hi {
            return F::zero();
        }
        let r1 = r_eval(points, v1).map(|z| z.norm()).unwrap_or(F::zero());
        if r1 == F::zero() {
            return F::zero();
        }
        let panels = ((hi - lo) / inner_width * F::count(inner_panels)).ceil().to_usize().unwrap_or(1).max(1);
        rule.composite_real(
            |v2| {
                let a = r_eval(points, v2 / v1).map(|z| z.norm()).unwrap_or(F::zero());
                let b = r_eval(points, v2).map(|z| z.norm()).unwrap_or(F::zero());
                a * b
            },
            lo,
            hi,
            panels,
        ) * r1
    };
    let mut panels = ((b1 - a1) * scale / F::lit(2.0)).ceil().to_usize().unwrap_or(1).max(2);
    let eval = |p: usize| -> F {
        let h = (b1 - a1) / F::count(p);
        let parts: Vec<F> = (0..p)
            .into_par_iter()
            .map(|i| {
                let a = a1 + h * F::count(i);
                rule.composite_real(&inner, a, a + h, 1)
            })
            .collect();
        crate::scalar::ksum(parts)
    };
    let mut prev = eval(panels);
    loop {
        panels *= 2;
        if panels > crate::quadrature::MAX_PANELS {
            return Err(LabError::AccuracyNotReached("strip quadrature did not settle".into()));
        }
        let next = eval(panels);
        if (next - prev).abs() <= F::lit(1e-3) * next.abs() + F::lit(1e-14) {
            return Ok(next * nf.powi(3));
        }
        prev = next;
    }
}

/// Window and exponent for the approximate functional equation check.
#[derive(Clone, Copy, Debug)]
pub struct AfeConfig {
    pub eps: f64,
    /// Half-width U of the u-integral.
    pub window: f64,
}

impl Default for AfeConfig {
    fn default() -> Self {
        Self { eps: 0.1, window: 1.0 }
    }
}

/// (|Σ_{0<|m|≤M*} ĥ_t(mN)|, |t|^{−1/2} ∫_{|u|≤U} |Σ_{1≤m≤⌊2|t|/N⌋} m^{−i(t+u)}| du),
/// with M* = ⌈(2|t|)^{1+ε}/N⌉.
pub fn afe_check<F: Real>(t: F, n: u64, cfg: AfeConfig) -> Result<(F, F)> {
    let at = t.abs();
    let t_len = F::lit(2.0) * at;
    let floor = F::lit(4.0).max(t_len.powf(F::lit(cfg.eps)));
    if at < floor {
        return Err(LabError::DomainError(format!("|t| = {} below max(4, T^eps)", at.to_f64_lossy())));
    }
    let nf = F::count(n as usize);
    let m_star = (t_len.powf(F::one() + F::lit(cfg.eps)) / nf).ceil().to_i64().unwrap_or(1).max(1);
    let engine = HTransform::<F>::new();
    let ms: Vec<i64> = (-m_star..=m_star).filter(|m| *m != 0).collect();
    let vals = ms
        .par_iter()
        .map(|&m| engine.eval(t, F::lit(m as f64) * nf))
        .collect::<Result<Vec<_>>>()?;
    let lhs = crate::scalar::ksum_c(vals).norm();
    let k = (t_len / nf).floor().to_usize().unwrap_or(0);
    if k == 0 {
        return Ok((lhs, F::zero()));
    }
    let logs: Vec<F> = (1..=k).map(|m| F::count(m).ln()).collect();
    let u = F::lit(cfg.window);
    let panels = ((u * F::lit(2.0)) * logs[k - 1].max(F::one()) * F::lit(2.0)).ceil().to_usize().unwrap_or(1).max(8);
    let rule = GaussLegendre::<F>::gl16();
    let integral = crate::quadrature::adaptive_real(
        &rule,
        |x| {
            let s = t + x;
            let mut acc = KahanC::new();
            for l in &logs {
                acc.add(crate::scalar::cis(-s * *l));
            }
            acc.value().norm()
        },
        -u,
        u,
        panels,
        crate::quadrature::Refinement::new(1e-8, 1e-12),
    )?;
    Ok((lhs, integral / at.sqrt()))
}

fn r_tilde<F: Real>(points: &[F], x: F, spec: &SmoothingSpec<F>, n: u64) -> Result<F> {
    match r_smoothed(points, x, spec, n) {
        Ok(v) => Ok(v),
        Err(LabError::DomainError(_)) => Ok(F::zero()),
        Err(e) => Err(e),
    }
}

/// Ĩ_m = ∫_{1/2}^{2} |R(v₁)|·R̃((m₁v₁+m₃)/(m₂v₁))·R̃((m₁v₁+m₃)/m₂) dv₁.
pub fn compute_itilde<F: Real>(
    points: &[F],
    n: u64,
    m: TripleIndex,
    spec: &SmoothingSpec<F>,
    m1_scale: u64,
    m_scale: u64,
) -> Result<F> {
    let [m1, m2, m3] = m.m;
    if !(m1.unsigned_abs() > m1_scale && m1.unsigned_abs() <= 2 * m1_scale) {
        return Err(LabError::DomainError("|m1| must lie in (M1, 2M1]".into()));
    }
    let band = |x: i64| 4 * x.unsigned_abs() >= m_scale && x.unsigned_abs() <= 4 * m_scale;
    if m2 == 0 || !band(m2) || !band(m3) {
        return Err(LabError::DomainError("|m2|, |m3| must be comparable to M".into()));
    }
    if points.is_empty() {
        return Ok(F::zero());
    }
    let (f1, f2, f3) = (F::lit(m1 as f64), F::lit(m2 as f64), F::lit(m3 as f64));
    let nm = F::count(n as usize) * F::count(m_scale as usize);
    let scale = {
        let lo = points.iter().copied().fold(F::infinity(), F::min);
        let hi = points.iter().copied().fold(F::neg_infinity(), F::max);
        hi - lo + F::one()
    };
    let width = (F::lit(2.0) / nm).min(F::lit(0.5) / scale);
    let panels = (F::lit(1.5) / width).ceil().to_usize().unwrap_or(1).max(1);
    let rule = GaussLegendre::<F>::gl16();
    let h = F::lit(1.5) / F::count(panels);
    let parts = (0..panels)
        .into_par_iter()
        .map(|p| {
            let a = F::lit(0.5) + h * F::count(p);
            let half = h / F::lit(2.0);
            let mid = a + half;
            let mut acc = Kahan::new();
            for (x, wgt) in rule.nodes.iter().zip(&rule.weights) {
                let v1 = mid + half * *x;
                let num = f1 * v1 + f3;
                let b = r_tilde(points, num / f2, spec, n)?;
                if b == F::zero() {
                    continue;
                }
                let a_ = r_tilde(points, num / (f2 * v1), spec, n)?;
                if a_ == F::zero() {
                    continue;
                }
                let r = r_eval(points, v1)?.norm();
                acc.add(*wgt * r * a_ * b);
            }
            Ok(acc.value() * half)
        })
        .collect::<Result<Vec<F>>>()?;
    Ok(crate::scalar::ksum(parts))
}
