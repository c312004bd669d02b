//! Gram matrix of the large-values matrix, its traces and top singular value.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::scalar::{cis, Kahan, KahanC, Real};
use crate::weights::eval_weight;

/// Default ceiling on |W|·N for a Gram build.
pub const GRAM_BUDGET: f64 = 1e9;

const MAX_ITER: usize = 500;
const RESTARTS: usize = 5;
const RESTART_SEED: u64 = 0x5eed_0001;

/// Dense Hermitian matrix G[a,b] = Σ_n w(n/N)² n^{i(t_a−t_b)}.
#[derive(Clone, Debug)]
pub struct GramMatrix<F> {
    dim: usize,
    data: Vec<Complex<F>>,
}

impl<F: Real> GramMatrix<F> {
    /// Wraps a row-major square matrix.
    pub fn from_rows(dim: usize, data: Vec<Complex<F>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(LabError::DomainError("matrix data has the wrong length".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> Complex<F> {
        self.data[a * self.dim + b]
    }

    pub fn data(&self) -> &[Complex<F>] {
        &self.data
    }

    /// max |G[a,b] − conj(G[b,a])|.
    pub fn hermitian_residual(&self) -> F {
        let mut worst = F::zero();
        for a in 0..self.dim {
            for b in 0..self.dim {
                worst = worst.max((self.get(a, b) - self.get(b, a).conj()).norm());
            }
        }
        worst
    }

    fn matvec(&self, x: &[Complex<F>]) -> Vec<Complex<F>> {
        (0..self.dim)
            .map(|a| {
                let row = &self.data[a * self.dim..(a + 1) * self.dim];
                let mut acc = KahanC::new();
                for (g, v) in row.iter().zip(x) {
                    acc.add(*g * *v);
                }
                acc.value()
            })
            .collect()
    }
}

/// Row-major product of two square matrices.
pub fn matmul<F: Real>(a: &[Complex<F>], b: &[Complex<F>], dim: usize) -> Vec<Complex<F>> {
    let mut out = vec![Complex::new(F::zero(), F::zero()); dim * dim];
    out.par_chunks_mut(dim.max(1)).enumerate().for_each(|(i, row)| {
        for (j, slot) in row.iter_mut().enumerate() {
            let mut acc = KahanC::new();
            for k in 0..dim {
                acc.add(a[i * dim + k] * b[k * dim + j]);
            }
            *slot = acc.value();
        }
    });
    out
}

/// Direct O(|W|²N) Gram build; upper triangle computed, lower mirrored.
pub fn build_gram<F: Real>(points: &[F], n: u64) -> Result<GramMatrix<F>> {
    build_gram_with_budget(points, n, GRAM_BUDGET)
}

pub fn build_gram_with_budget<F: Real>(points: &[F], n: u64, budget: f64) -> Result<GramMatrix<F>> {
    let m = points.len();
    if (m as f64) * (n as f64) > budget {
        return Err(LabError::BudgetExceeded(format!("|W|·N = {} above {budget:e}", m as f64 * n as f64)));
    }
    let nf = F::count(n as usize);
    let terms: Vec<(F, F)> = (n..=2 * n)
        .filter_map(|k| {
            let kf = F::count(k as usize);
            let w = eval_weight(kf / nf);
            (w != F::zero()).then(|| (w * w, kf.ln()))
        })
        .collect();
    let diag = {
        let mut k = Kahan::new();
        for (w2, _) in &terms {
            k.add(*w2);
        }
        k.value()
    };
    let rows: Vec<Vec<Complex<F>>> = (0..m)
        .into_par_iter()
        .map(|a| {
            (a + 1..m)
                .map(|b| {
                    let d = points[a] - points[b];
                    let mut acc = KahanC::new();
                    for (w2, l) in &terms {
                        acc.add(cis(d * *l) * *w2);
                    }
                    acc.value()
                })
                .collect()
        })
        .collect();
    let mut data = vec![Complex::new(F::zero(), F::zero()); m * m];
    for a in 0..m {
        data[a * m + a] = Complex::new(diag, F::zero());
        for (off, v) in rows[a].iter().enumerate() {
            let b = a + 1 + off;
            data[a * m + b] = *v;
            data[b * m + a] = v.conj();
        }
    }
    Ok(GramMatrix { dim: m, data })
}

/// tr(G).
pub fn trace_gram<F: Real>(g: &GramMatrix<F>) -> F {
    let mut k = Kahan::new();
    for a in 0..g.dim {
        k.add(g.get(a, a).re);
    }
    k.value()
}

/// tr(G³) as a complex number; the imaginary part is the rounding residue.
pub fn trace_gram_cubed_complex<F: Real>(g: &GramMatrix<F>) -> Complex<F> {
    let d = g.dim;
    let g2 = matmul(&g.data, &g.data, d);
    let mut acc = KahanC::new();
    for a in 0..d {
        for b in 0..d {
            acc.add(g2[a * d + b] * g.get(b, a));
        }
    }
    acc.value()
}

/// tr(G³).
pub fn trace_gram_cubed<F: Real>(g: &GramMatrix<F>) -> F {
    trace_gram_cubed_complex(g).re
}

fn normalize<F: Real>(x: &mut [Complex<F>]) -> F {
    let norm = x.iter().map(|v| v.norm_sqr()).fold(F::zero(), |a, b| a + b).sqrt();
    if norm > F::zero() {
        for v in x.iter_mut() {
            *v = *v / norm;
        }
    }
    norm
}

fn rayleigh<F: Real>(g: &GramMatrix<F>, x: &[Complex<F>]) -> F {
    let y = g.matvec(x);
    let mut acc = Kahan::new();
    for (a, b) in x.iter().zip(&y) {
        acc.add((a.conj() * *b).re);
    }
    acc.value()
}

/// Power iteration from `x`; returns (eigenvalue estimate, converged).
fn power<F: Real>(g: &GramMatrix<F>, mut x: Vec<Complex<F>>, shift: Option<F>) -> (F, bool) {
    normalize(&mut x);
    let mut prev = F::nan();
    for _ in 0..MAX_ITER {
        let mut y = g.matvec(&x);
        if let Some(s) = shift {
            for (yi, xi) in y.iter_mut().zip(&x) {
                *yi = *xi * s - *yi;
            }
        }
        let mut acc = Kahan::new();
        for (a, b) in x.iter().zip(&y) {
            acc.add((a.conj() * *b).re);
        }
        let lambda = acc.value();
        if normalize(&mut y) == F::zero() {
            return (F::zero(), true);
        }
        x = y;
        if (lambda - prev).abs() < F::lit(1e-12) * lambda.abs() {
            let final_lambda = match shift {
                None => rayleigh(g, &x),
                Some(_) => lambda,
            };
            return (final_lambda, true);
        }
        prev = lambda;
    }
    let last = match shift {
        None => rayleigh(g, &x),
        Some(_) => prev,
    };
    (last, false)
}

/// Top eigenvalue of G by power iteration with seeded restarts on non-convergence.
pub fn top_eigenvalue<F: Real>(g: &GramMatrix<F>) -> F {
    let d = g.dim;
    if d == 0 {
        return F::zero();
    }
    let ones = vec![Complex::new(F::one(), F::zero()); d];
    let (mut best, converged) = power(g, ones, None);
    if !converged {
        let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
        for _ in 0..RESTARTS {
            let x: Vec<Complex<F>> = (0..d)
                .map(|_| Complex::new(F::lit(rng.gen::<f64>() - 0.5), F::lit(rng.gen::<f64>() - 0.5)))
                .collect();
            let (l, _) = power(g, x, None);
            best = best.max(l);
        }
    }
    best
}

/// Smallest-eigenvalue estimate by iterating on λ_max·I − G.
pub fn bottom_eigenvalue_estimate<F: Real>(g: &GramMatrix<F>, top: F) -> F {
    let d = g.dim;
    if d == 0 {
        return F::zero();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED ^ 0xff);
    let x: Vec<Complex<F>> = (0..d)
        .map(|_| Complex::new(F::lit(rng.gen::<f64>() - 0.5), F::lit(rng.gen::<f64>() - 0.5)))
        .collect();
    let (mu, _) = power(g, x, Some(top));
    top - mu
}

/// Top singular value of M_W: square root of the top eigenvalue of G, after a PSD guard.
pub fn top_singular<F: Real>(g: &GramMatrix<F>) -> Result<F> {
    let top = top_eigenvalue(g);
    let floor = bottom_eigenvalue_estimate(g, top);
    let tr = trace_gram(g);
    if floor < -F::lit(1e-8) * tr.abs().max(F::one()) {
        return Err(LabError::DomainError(format!("matrix not PSD: eigenvalue {}", floor.to_f64_lossy())));
    }
    Ok(top.max(F::zero()).sqrt())
}

/// 2(max(tr₃ − tr₁³/m², 0))^{1/6} + 2(tr₁/m)^{1/2}.
pub fn trace_sv_bound<F: Real>(trace1: F, trace3: F, m: usize) -> F {
    let mf = F::count(m.max(1));
    let rad = (trace3 - trace1.powi(3) / (mf * mf)).max(F::zero());
    F::lit(2.0) * rad.powf(F::one() / F::lit(6.0)) + F::lit(2.0) * (trace1 / mf).max(F::zero()).sqrt()
}

/// (max xᵢ, 2(Σx⁶ − (Σx²)³/k²)^{1/6} + 2(Σx²/k)^{1/2}).
pub fn real_power_inequality<F: Real>(xs: &[F]) -> (F, F) {
    let lhs = xs.iter().copied().fold(F::zero(), F::max);
    let s2 = crate::scalar::ksum(xs.iter().map(|x| x.powi(2)));
    let s6 = crate::scalar::ksum(xs.iter().map(|x| x.powi(6)));
    (lhs, trace_sv_bound(s2, s6, xs.len()))
}

/// N^{1−2σ}·s₁².
pub fn spectral_count_bound<F: Real>(n: u64, sigma: F, s1: F) -> F {
    F::count(n as usize).powf(F::one() - F::lit(2.0) * sigma) * s1 * s1
}

/// Gram-side summary of one large-values configuration.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSummary {
    pub s1: f64,
    pub trace1: f64,
    pub trace3: f64,
    pub trace3_imag: f64,
    pub hermitian_residual: f64,
    pub sv_bound: f64,
}

pub fn summarize<F: Real>(g: &GramMatrix<F>) -> Result<SpectrumSummary> {
    let t3 = trace_gram_cubed_complex(g);
    let t1 = trace_gram(g);
    let s1 = top_singular(g)?;
    Ok(SpectrumSummary {
        s1: s1.to_f64_lossy(),
        trace1: t1.to_f64_lossy(),
        trace3: t3.re.to_f64_lossy(),
        trace3_imag: t3.im.to_f64_lossy(),
        hermitian_residual: g.hermitian_residual().to_f64_lossy(),
        sv_bound: trace_sv_bound(t1, t3.re, g.dim()).to_f64_lossy(),
    })
}
