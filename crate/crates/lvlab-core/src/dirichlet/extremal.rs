use num_complex::Complex;

use crate::dirichlet::{extract_large_values, DirichletPolynomial, PointSet};
use crate::error::{LabError, Result};
use crate::scalar::{cis, Real};
use crate::weights::eval_weight;

/// Block construction with J peaks at prescribed ordinates.
#[derive(Clone, Debug)]
pub struct Extremal<F> {
    pub poly: DirichletPolynomial<F>,
    pub witnesses: PointSet<F>,
    /// H = N^σ.
    pub height: F,
    pub blocks: usize,
    pub spacing: F,
}

/// D(t) = Σ_{j≤J} Σ_h w(h/H) (N+(j−1)⌊N/J⌋+h)^{i(t_j−t)} with H = N^σ, J = ⌊εN^{1−σ}⌋,
/// t_j = N + (j−½)·N^{1−σ}/ε. Returns the polynomial in the convention Σ b_n n^{it}.
pub fn extremal_construction<F: Real>(n: u64, sigma: F, eps: F) -> Result<Extremal<F>> {
    if n < 2 || !n.is_power_of_two() {
        return Err(LabError::DomainError("N must be a power of two".into()));
    }
    if !(sigma > F::lit(0.5) && sigma < F::one()) {
        return Err(LabError::DomainError("sigma must lie in (1/2, 1)".into()));
    }
    if !(eps > F::zero() && eps <= F::lit(0.5)) {
        return Err(LabError::DomainError("eps must lie in (0, 1/2]".into()));
    }
    let nf = F::count(n as usize);
    let height = nf.powf(sigma);
    let raw_j = eps * nf.powf(F::one() - sigma);
    let blocks = (raw_j * (F::one() + F::lit(1e-12))).floor().to_usize().unwrap_or(0);
    if blocks < 2 {
        return Err(LabError::DegenerateRange(format!("J = {blocks} < 2")));
    }
    let spacing = nf.powf(F::one() - sigma) / eps;
    let offset = n / blocks as u64;
    let origin = nf;
    let mut coeffs = vec![Complex::new(F::zero(), F::zero()); n as usize];
    let mut witnesses = Vec::with_capacity(blocks);
    let h_lo = height.floor().to_u64().unwrap_or(0);
    let h_hi = (F::lit(2.0) * height).ceil().to_u64().unwrap_or(0);
    for j in 0..blocks {
        let tj = origin + spacing * (F::count(j) + F::lit(0.5));
        witnesses.push(tj);
        let base = n + j as u64 * offset;
        for h in h_lo..=h_hi {
            let w = eval_weight(F::count(h as usize) / height);
            if w == F::zero() {
                continue;
            }
            let m = base + h;
            if m <= n || m > 2 * n {
                return Err(LabError::DegenerateRange(format!("block {j} leaves (N, 2N]")));
            }
            let slot = &mut coeffs[(m - n - 1) as usize];
            if slot.re != F::zero() || slot.im != F::zero() {
                return Err(LabError::DegenerateRange("blocks overlap".into()));
            }
            *slot = cis(-tj * F::count(m as usize).ln()) * w;
        }
    }
    let poly = DirichletPolynomial::with_bound(n, coeffs, F::one())?;
    let length = spacing * F::count(blocks);
    let witnesses = PointSet::new(witnesses, spacing * F::lit(0.999), origin, length)?;
    Ok(Extremal { poly, witnesses, height, blocks, spacing })
}

/// Grid scan at spacing `step` over [a, b], then greedy extraction at threshold V with separation δ.
pub fn scan_large_values<F: Real>(
    poly: &DirichletPolynomial<F>,
    a: F,
    b: F,
    step: F,
    threshold: F,
    delta: F,
) -> PointSet<F> {
    let count = ((b - a) / step).floor().to_usize().unwrap_or(0) + 1;
    let ts: Vec<F> = (0..count).map(|i| a + step * F::count(i)).collect();
    let vals = poly.abs_many(&ts);
    let pairs: Vec<(F, F)> = ts.into_iter().zip(vals).collect();
    extract_large_values(&pairs, threshold, delta)
}

/// Summary of one extremal run.
#[derive(Clone, Debug)]
pub struct ExtremalCount<F> {
    pub n: u64,
    pub blocks: usize,
    pub count: usize,
    /// min_j |D(t_j)| / H.
    pub min_witness_ratio: F,
    /// count / N^{2−2σ}.
    pub normalized: F,
}

/// Builds the construction and counts 1-separated ordinates in [N−50, 2N+50] with |D| ≥ factor·N^σ.
pub fn extremal_count<F: Real>(n: u64, sigma: F, eps: F, factor: F) -> Result<(Extremal<F>, ExtremalCount<F>)> {
    let ex = extremal_construction(n, sigma, eps)?;
    let nf = F::count(n as usize);
    let pad = F::lit(50.0);
    let found = scan_large_values(&ex.poly, nf - pad, nf + nf + pad, F::lit(0.25), factor * ex.height, F::one());
    let min_witness_ratio = ex
        .witnesses
        .points()
        .iter()
        .map(|&t| ex.poly.eval_raw(t).norm() / ex.height)
        .fold(F::infinity(), F::min);
    let normalized = F::count(found.len()) / nf.powf(F::lit(2.0) - F::lit(2.0) * sigma);
    let summary = ExtremalCount { n, blocks: ex.blocks, count: found.len(), min_witness_ratio, normalized };
    Ok((ex, summary))
}
