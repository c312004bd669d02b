use std::fmt::Write as _;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::scalar::{cis, KahanC, Real};
use crate::weights::eval_weight;

/// D(t) = Σ_{N<n≤2N} b_n n^{it}.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletPolynomial<F> {
    n: u64,
    coeffs: Vec<Complex<F>>,
    bound: F,
}

impl<F: Real> DirichletPolynomial<F> {
    /// Coefficients for n = N+1, ..., 2N; the bound is the largest modulus.
    pub fn new(n: u64, coeffs: Vec<Complex<F>>) -> Result<Self> {
        let bound = coeffs.iter().fold(F::zero(), |m, c| m.max(c.norm()));
        Self::with_bound(n, coeffs, bound)
    }

    /// As [`new`](Self::new) with an explicit coefficient bound that every |b_n| must respect.
    pub fn with_bound(n: u64, coeffs: Vec<Complex<F>>, bound: F) -> Result<Self> {
        if n == 0 {
            return Err(LabError::DomainError("N must be positive".into()));
        }
        if coeffs.len() as u64 != n {
            return Err(LabError::DomainError(format!("expected {n} coefficients, got {}", coeffs.len())));
        }
        let slack = F::one() + F::epsilon() * F::lit(8.0);
        if let Some(c) = coeffs.iter().find(|c| c.norm() > bound * slack) {
            return Err(LabError::DomainError(format!("|b_n| = {} exceeds bound {}", c.norm(), bound)));
        }
        Ok(Self { n, coeffs, bound })
    }

    pub fn from_fn(n: u64, f: impl Fn(u64) -> Complex<F>) -> Result<Self> {
        Self::new(n, (n + 1..=2 * n).map(f).collect())
    }

    pub fn ones(n: u64) -> Result<Self> {
        Self::from_fn(n, |_| Complex::new(F::one(), F::zero()))
    }

    pub fn zeros(n: u64) -> Result<Self> {
        Self::from_fn(n, |_| Complex::new(F::zero(), F::zero()))
    }

    pub fn length(&self) -> u64 {
        self.n
    }

    pub fn bound(&self) -> F {
        self.bound
    }

    /// b_n for n ∈ (N, 2N].
    pub fn coeff(&self, n: u64) -> Option<Complex<F>> {
        if n > self.n && n <= 2 * self.n {
            Some(self.coeffs[(n - self.n - 1) as usize])
        } else {
            None
        }
    }

    /// (n, b_n) over the nonzero coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (u64, Complex<F>)> + '_ {
        let base = self.n + 1;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.re != F::zero() || c.im != F::zero())
            .map(move |(i, c)| (base + i as u64, *c))
    }

    /// Direct compensated evaluation of D(t).
    pub fn eval_raw(&self, t: F) -> Complex<F> {
        let mut acc = KahanC::new();
        for (n, b) in self.terms() {
            acc.add(b * cis(t * F::count(n as usize).ln()));
        }
        acc.value()
    }

    /// D_N(t) = Σ w(n/N) b_n n^{it}.
    pub fn eval_smoothed(&self, t: F) -> Complex<F> {
        let nn = F::count(self.n as usize);
        let mut acc = KahanC::new();
        for (n, b) in self.terms() {
            let nf = F::count(n as usize);
            let w = eval_weight(nf / nn);
            if w != F::zero() {
                acc.add(b * cis(t * nf.ln()) * w);
            }
        }
        acc.value()
    }

    /// |D(t)| on many ordinates, evaluated in parallel.
    pub fn abs_many(&self, ts: &[F]) -> Vec<F> {
        let terms: Vec<(F, Complex<F>)> =
            self.terms().map(|(n, b)| (F::count(n as usize).ln(), b)).collect();
        ts.par_iter()
            .map(|&t| {
                let mut acc = KahanC::new();
                for (l, b) in &terms {
                    acc.add(*b * cis(t * *l));
                }
                acc.value().norm()
            })
            .collect()
    }

    /// Header `N=<int> bound=<float>` followed by `n re im` rows.
    pub fn to_text(&self) -> String {
        let mut s = format!("N={} bound={:e}\n", self.n, self.bound.to_f64_lossy());
        for (i, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(s, "{} {:e} {:e}", self.n + 1 + i as u64, c.re.to_f64_lossy(), c.im.to_f64_lossy());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| LabError::Parse("empty input".into()))?;
        let kv = crate::textio::header_pairs(header)?;
        let n: u64 = crate::textio::field(&kv, "N")?;
        let bound: f64 = crate::textio::field(&kv, "bound")?;
        let mut coeffs = vec![Complex::new(F::zero(), F::zero()); n as usize];
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(LabError::Parse(format!("bad row: {line}")));
            }
            let idx: u64 = parts[0].parse().map_err(|_| LabError::Parse(format!("bad index: {line}")))?;
            let re: f64 = parts[1].parse().map_err(|_| LabError::Parse(format!("bad value: {line}")))?;
            let im: f64 = parts[2].parse().map_err(|_| LabError::Parse(format!("bad value: {line}")))?;
            if idx <= n || idx > 2 * n {
                return Err(LabError::Parse(format!("index {idx} outside ({n}, {}]", 2 * n)));
            }
            coeffs[(idx - n - 1) as usize] = Complex::new(F::lit(re), F::lit(im));
        }
        Self::with_bound(n, coeffs, F::lit(bound))
    }
}
