//! ζ on the critical line by Euler–Maclaurin, the Hardy Z function and a sign-change zero scan.

use std::fmt::Write as _;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::scalar::{Kahan, KahanC, Real};

pub const MAX_HEIGHT: f64 = 1e4;
pub const SCAN_STEP: f64 = 0.05;
pub const BISECT_TOL: f64 = 1e-10;
pub const TAIL_TOL: f64 = 1e-10;
const MAX_CORRECTIONS: usize = 40;

/// B_{2k}/(2k)! for k = 1..=count, from 2ζ(2k)/(2π)^{2k}.
fn bernoulli_over_factorial<F: Real>(count: usize) -> Vec<F> {
    let two_pi = F::TAU();
    (1..=count)
        .map(|k| {
            let p = 2 * k as i32;
            if k == 1 {
                return F::one() / F::lit(12.0);
            }
            if k == 2 {
                return -F::one() / F::lit(720.0);
            }
            let mut z = Kahan::new();
            for n in (1..=100).rev() {
                z.add(F::count(n).powi(-p));
            }
            // midpoint tail of Σ_{n>100} n^{-2k}
            z.add(F::lit(100.5).powi(1 - p) / F::count(p as usize - 1));
            let sign = if k % 2 == 1 { F::one() } else { -F::one() };
            sign * F::lit(2.0) * z.value() / two_pi.powi(p)
        })
        .collect()
}

/// Euler–Maclaurin parameters for height t: summation length and correction count.
pub fn em_parameters(t: f64) -> (usize, usize) {
    ((0.25 * t.abs()).ceil() as usize + 20, MAX_CORRECTIONS)
}

/// ζ(σ + it) for σ ≥ 1/2, |t| ≤ 10⁴, with the remainder bounded by [`TAIL_TOL`].
pub fn zeta<F: Real>(s: Complex<F>) -> Result<Complex<F>> {
    if s.im.abs() > F::lit(MAX_HEIGHT) || s.re < F::lit(0.5) {
        return Err(LabError::DomainError(format!("s = {} + {}i outside the supported strip", s.re.to_f64_lossy(), s.im.to_f64_lossy())));
    }
    let one = Complex::new(F::one(), F::zero());
    if (s - one).norm() < F::lit(1e-12) {
        return Err(LabError::DomainError("pole at s = 1".into()));
    }
    let (n, corrections) = em_parameters(s.im.to_f64_lossy());
    let coeffs = bernoulli_over_factorial::<F>(corrections + 1);
    let pow = |m: usize| -> Complex<F> { (-s * F::count(m).ln()).exp() };
    let mut acc = KahanC::new();
    for m in 1..n {
        acc.add(pow(m));
    }
    let nf = F::count(n);
    let n_s = pow(n);
    acc.add(n_s * nf / (s - one));
    acc.add(n_s / F::lit(2.0));
    // term_k = B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}
    let mut rising = s;
    let mut npow = n_s / nf;
    for k in 0..corrections {
        acc.add(rising * npow * coeffs[k]);
        let j = F::count(2 * k + 1);
        rising = rising * (s + j) * (s + j + F::one());
        npow = npow / (nf * nf);
    }
    let next = (rising * npow * coeffs[corrections]).norm();
    let m = F::count(corrections);
    let tail = next * (s + F::lit(2.0) * m + F::one()).norm() / (s.re + F::lit(2.0) * m + F::one());
    if !(tail <= F::lit(TAIL_TOL)) {
        return Err(LabError::AccuracyNotReached(format!("Euler-Maclaurin remainder {:e}", tail.to_f64_lossy())));
    }
    Ok(acc.value())
}

/// lnΓ(z) for Re z > 0: shift to |z| ≥ 10 then Stirling.
pub fn ln_gamma<F: Real>(z: Complex<F>) -> Complex<F> {
    let stirling = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let mut shift = KahanC::new();
    let mut w = z;
    while w.norm() < F::lit(10.0) {
        shift.add(w.ln());
        w = w + F::one();
    }
    let half = F::lit(0.5);
    let mut acc = KahanC::new();
    acc.add((w - half) * w.ln() - w);
    acc.add(Complex::new(half * F::TAU().ln(), F::zero()));
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut p = inv;
    for c in stirling {
        acc.add(p * F::lit(c));
        p = p * inv2;
    }
    acc.value() - shift.value()
}

/// θ(t) = Im lnΓ(1/4 + it/2) − (t/2) ln π.
pub fn theta<F: Real>(t: F) -> F {
    let z = Complex::new(F::lit(0.25), t / F::lit(2.0));
    ln_gamma(z).im - t / F::lit(2.0) * F::PI().ln()
}

/// e^{iθ(t)} ζ(1/2 + it) before discarding the imaginary part.
pub fn hardy_z_complex<F: Real>(t: F) -> Result<Complex<F>> {
    if !(t > F::zero() && t <= F::lit(MAX_HEIGHT)) {
        return Err(LabError::DomainError(format!("t = {} outside (0, 1e4]", t.to_f64_lossy())));
    }
    let z = zeta(Complex::new(F::lit(0.5), t))?;
    Ok(crate::scalar::cis(theta(t)) * z)
}

/// Hardy's Z(t), real on the critical line.
pub fn hardy_z<F: Real>(t: F) -> Result<F> {
    hardy_z_complex(t).map(|z| z.re)
}

/// Main term of the zero count: (T/2π) log(T/2πe) + 7/8.
pub fn riemann_von_mangoldt(t: f64) -> f64 {
    let x = t / std::f64::consts::TAU;
    x * (x / std::f64::consts::E).ln() + 0.875
}

/// Ordinates of critical-line zeros up to a height.
#[derive(Clone, Debug)]
pub struct ZeroList<F> {
    pub ordinates: Vec<F>,
    pub residuals: Vec<F>,
    pub height_limit: F,
}

impl<F: Real> ZeroList<F> {
    pub fn empty(height: F) -> Self {
        Self { ordinates: Vec::new(), residuals: Vec::new(), height_limit: height }
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// Zeros at or below `height`.
    pub fn truncated(&self, height: F) -> Self {
        let k = self.ordinates.partition_point(|g| *g <= height);
        Self {
            ordinates: self.ordinates[..k].to_vec(),
            residuals: self.residuals[..k].to_vec(),
            height_limit: height.min(self.height_limit),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("height={:e} count={}\n", self.height_limit.to_f64_lossy(), self.len());
        for (g, r) in self.ordinates.iter().zip(&self.residuals) {
            let _ = writeln!(s, "{:.12} {:e}", g.to_f64_lossy(), r.to_f64_lossy());
        }
        s
    }
}

fn bisect<F: Real>(mut a: F, mut b: F, mut za: F) -> Result<(F, F)> {
    let tol = F::lit(BISECT_TOL);
    while b - a > tol {
        let m = (a + b) / F::lit(2.0);
        let zm = hardy_z(m)?;
        if zm == F::zero() {
            return Ok((m, F::zero()));
        }
        if (zm > F::zero()) == (za > F::zero()) {
            a = m;
            za = zm;
        } else {
            b = m;
        }
    }
    let g = (a + b) / F::lit(2.0);
    Ok((g, hardy_z(g)?.abs()))
}

/// Sign changes of Z on a 0.05 grid from t = 1, each refined by bisection to 10⁻¹⁰.
pub fn find_zeros<F: Real>(height: F) -> Result<ZeroList<F>> {
    if height > F::lit(MAX_HEIGHT) {
        return Err(LabError::DomainError(format!("height {} above 1e4", height.to_f64_lossy())));
    }
    let start = F::one();
    if height <= start {
        return Ok(ZeroList::empty(height));
    }
    let step = F::lit(SCAN_STEP);
    let steps = ((height - start) / step).ceil().to_usize().unwrap_or(0);
    let grid: Vec<F> = (0..=steps).map(|i| (start + step * F::count(i)).min(height)).collect();
    let values = grid.par_iter().map(|t| hardy_z(*t)).collect::<Result<Vec<F>>>()?;
    let brackets: Vec<usize> = (0..steps).filter(|&i| (values[i] > F::zero()) != (values[i + 1] > F::zero())).collect();
    let found = brackets
        .par_iter()
        .map(|&i| {
            if values[i] == F::zero() {
                Ok((grid[i], F::zero()))
            } else {
                bisect(grid[i], grid[i + 1], values[i])
            }
        })
        .collect::<Result<Vec<(F, F)>>>()?;
    let list = ZeroList {
        ordinates: found.iter().map(|p| p.0).collect(),
        residuals: found.iter().map(|p| p.1).collect(),
        height_limit: height,
    };
    let expect = riemann_von_mangoldt(height.to_f64_lossy());
    if (list.len() as f64 - expect).abs() > 2.0 {
        return Err(LabError::MissedZeroSuspected(format!("{} zeros below {} against main term {expect:.2}", list.len(), height.to_f64_lossy())));
    }
    Ok(list)
}
