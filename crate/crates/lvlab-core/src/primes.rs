//! Sieve tables, short-interval prime sums, the windowed explicit formula and zero-detector coefficients.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dirichlet::DirichletPolynomial;
use crate::error::{LabError, Result};
use crate::scalar::{Kahan, KahanC, Real};
use crate::zeta::ZeroList;

/// Largest table sieve.
pub const TABLE_LIMIT: u64 = 50_000_000;
/// Largest right endpoint for the window sieves.
pub const WINDOW_LIMIT: u64 = 1_000_000_000;
pub const WINDOW_LENGTH_LIMIT: u64 = 100_000_000;
pub const DETECTOR_LIMIT: u64 = 10_000_000;

/// Primes up to `limit` by the plain sieve of Eratosthenes.
pub fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// μ(n), Λ(n) and primality for 1 ≤ n ≤ X.
#[derive(Clone, Debug)]
pub struct SieveTables {
    limit: u64,
    mu: Vec<i8>,
    /// p when n = p^k, else 0.
    base: Vec<u32>,
}

impl SieveTables {
    pub fn new(limit: u64) -> Result<Self> {
        if limit > TABLE_LIMIT {
            return Err(LabError::BudgetExceeded(format!("table sieve to {limit} above {TABLE_LIMIT}")));
        }
        let n = limit as usize;
        let mut mu = vec![1i8; n + 1];
        let mut base = vec![0u32; n + 1];
        let mut composite = vec![false; n + 1];
        if n >= 1 {
            mu[0] = 0;
        } else {
            mu.clear();
            base.clear();
        }
        for p in 2..=n {
            if composite[p] {
                continue;
            }
            let mut j = p;
            while j <= n {
                if j > p {
                    composite[j] = true;
                }
                mu[j] = -mu[j];
                j += p;
            }
            let sq = p.saturating_mul(p);
            let mut j = sq;
            while j <= n {
                mu[j] = 0;
                j += sq;
            }
            let mut pk = p;
            loop {
                base[pk] = p as u32;
                match pk.checked_mul(p) {
                    Some(next) if next <= n => pk = next,
                    _ => break,
                }
            }
        }
        Ok(Self { limit, mu, base })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn check(&self, n: u64) -> Result<usize> {
        if n == 0 || n > self.limit {
            return Err(LabError::DomainError(format!("n = {n} outside 1..={}", self.limit)));
        }
        Ok(n as usize)
    }

    pub fn mu(&self, n: u64) -> Result<i8> {
        Ok(self.mu[self.check(n)?])
    }

    pub fn lambda<F: Real>(&self, n: u64) -> Result<F> {
        let b = self.base[self.check(n)?];
        Ok(if b == 0 { F::zero() } else { F::count(b as usize).ln() })
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        let i = self.check(n)?;
        Ok(self.base[i] as usize == i)
    }

    /// ψ(x) = Σ_{n≤x} Λ(n).
    pub fn psi<F: Real>(&self, x: u64) -> Result<F> {
        let x = x.min(self.limit);
        let mut acc = Kahan::new();
        for n in 2..=x {
            let b = self.base[n as usize];
            if b != 0 {
                acc.add(F::count(b as usize).ln());
            }
        }
        Ok(acc.value())
    }

    /// π(x).
    pub fn pi(&self, x: u64) -> u64 {
        (2..=x.min(self.limit)).filter(|&n| self.base[n as usize] as u64 == n).count() as u64
    }
}

/// Sieves (x, x+y]; returns p^k → p for each n in the window (0 when not a prime power).
fn window_bases(x: u64, y: u64, primes: &[u64]) -> Result<Vec<u64>> {
    if y > WINDOW_LENGTH_LIMIT {
        return Err(LabError::BudgetExceeded(format!("window length {y} above {WINDOW_LENGTH_LIMIT}")));
    }
    let hi = x.checked_add(y).filter(|h| *h <= WINDOW_LIMIT).ok_or_else(|| LabError::BudgetExceeded(format!("window end above {WINDOW_LIMIT}")))?;
    let lo = x + 1;
    let len = y as usize;
    let mut base = vec![0u64; len];
    let mut composite = vec![false; len];
    for &p in primes {
        if p * p > hi {
            break;
        }
        let first = lo.div_ceil(p).max(2) * p;
        let mut m = first;
        while m <= hi {
            composite[(m - lo) as usize] = true;
            m += p;
        }
        let mut pk = p;
        while pk <= hi {
            if pk >= lo {
                base[(pk - lo) as usize] = p;
            }
            match pk.checked_mul(p) {
                Some(v) => pk = v,
                None => break,
            }
        }
    }
    for i in 0..len {
        let n = lo + i as u64;
        if n >= 2 && !composite[i] {
            base[i] = n;
        }
    }
    Ok(base)
}

fn sieving_primes(hi: u64) -> Vec<u64> {
    small_primes((hi as f64).sqrt() as u64 + 2)
}

/// Σ_{x<n≤x+y} Λ(n).
pub fn psi_window<F: Real>(x: u64, y: u64) -> Result<F> {
    let primes = sieving_primes(x.saturating_add(y));
    psi_window_with(x, y, &primes)
}

fn psi_window_with<F: Real>(x: u64, y: u64, primes: &[u64]) -> Result<F> {
    let bases = window_bases(x, y, primes)?;
    let mut acc = Kahan::new();
    for b in bases {
        if b != 0 {
            acc.add(F::lit((b as f64).ln()));
        }
    }
    Ok(acc.value())
}

/// #{primes in (x, x+y]}.
pub fn pi_window(x: u64, y: u64) -> Result<u64> {
    let primes = sieving_primes(x.saturating_add(y));
    let lo = x + 1;
    Ok(window_bases(x, y, &primes)?.iter().enumerate().filter(|(i, b)| **b == lo + *i as u64).count() as u64)
}

/// y − Σ_{γ} 2·Re(((x+y)^ρ − x^ρ)/ρ) with ρ = 1/2 + iγ.
pub fn explicit_window<F: Real>(x: F, y: F, zeros: &ZeroList<F>) -> F {
    let (lx, lxy) = (x.ln(), (x + y).ln());
    let parts: Vec<Complex<F>> = zeros
        .ordinates
        .par_chunks(256)
        .map(|chunk| {
            let mut acc = KahanC::new();
            for &g in chunk {
                let rho = Complex::new(F::lit(0.5), g);
                let a = (rho * lxy).exp();
                let b = (rho * lx).exp();
                acc.add((a - b) / rho);
            }
            acc.value()
        })
        .collect();
    y - F::lit(2.0) * crate::scalar::ksum_c(parts).re
}

/// |explicit − ψ-window| / (x(log x)³/T).
pub fn explicit_error_ratio<F: Real>(x: u64, y: u64, zeros: &ZeroList<F>) -> Result<F> {
    let exact: F = psi_window(x, y)?;
    let approx = explicit_window(F::count(x as usize), F::count(y as usize), zeros);
    let xf = F::count(x as usize);
    let scale = xf * xf.ln().powi(3) / zeros.height_limit;
    Ok((approx - exact).abs() / scale)
}

/// 2T^{1/100}.
pub fn detector_threshold<F: Real>(t: F) -> F {
    F::lit(2.0) * t.powf(F::lit(0.01))
}

/// b_n = (Σ_{d|n, d ≤ 2T^{1/100}} μ(d))·exp(−n/√T) for n = 1..=limit; entry n−1 holds b_n.
pub fn detector_coeffs<F: Real>(t: F, limit: u64) -> Result<Vec<F>> {
    if limit > DETECTOR_LIMIT {
        return Err(LabError::BudgetExceeded(format!("detector length {limit} above {DETECTOR_LIMIT}")));
    }
    let dmax = detector_threshold(t).floor().to_u64().unwrap_or(0).min(limit);
    let tables = SieveTables::new(dmax.max(1))?;
    let mut sums = vec![0i64; limit as usize];
    for d in 1..=dmax {
        let m = tables.mu(d)? as i64;
        if m == 0 {
            continue;
        }
        let mut n = d;
        while n <= limit {
            sums[(n - 1) as usize] += m;
            n += d;
        }
    }
    let root = t.sqrt();
    Ok(sums
        .into_iter()
        .enumerate()
        .map(|(i, s)| F::lit(s as f64) * (-F::count(i + 1) / root).exp())
        .collect())
}

/// The detector restricted to (N, 2N], with its coefficient bound.
pub fn detector_polynomial<F: Real>(t: F, n: u64) -> Result<DirichletPolynomial<F>> {
    let b = detector_coeffs(t, 2 * n)?;
    let coeffs: Vec<Complex<F>> = b[n as usize..].iter().map(|v| Complex::new(*v, F::zero())).collect();
    let bound = coeffs.iter().map(|c| c.norm()).fold(F::zero(), F::max).max(F::min_positive_value());
    DirichletPolynomial::with_bound(n, coeffs, bound)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanRow {
    pub x: u64,
    pub y: u64,
    pub count: u64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Primes in (x, x+y] against y/log x with tolerance y·exp(−(log x)^{1/4}).
pub fn corollary1_scan(x: u64, y: u64) -> Result<ScanRow> {
    if x < 10_000_000 {
        return Err(LabError::DomainError(format!("x = {x} below 1e7")));
    }
    let count = if y == 0 { 0 } else { pi_window(x, y)? };
    let lx = (x as f64).ln();
    let target = y as f64 / lx;
    let tolerance = y as f64 * (-lx.powf(0.25)).exp();
    Ok(ScanRow { x, y, count, target, tolerance, pass: (count as f64 - target).abs() <= tolerance })
}

/// Fraction of random x ∈ [X, 2X] with |ψ(x+y) − ψ(x) − y| > y/4.
pub fn almost_all_scan(big_x: u64, y: u64, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(LabError::DomainError("almost-all scan needs samples > 0".into()));
    }
    if big_x > 100_000_000 {
        return Err(LabError::BudgetExceeded(format!("X = {big_x} above 1e8")));
    }
    let primes = sieving_primes(2 * big_x + y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<u64> = (0..samples).map(|_| rng.gen_range(big_x..=2 * big_x)).collect();
    let bad = xs
        .par_iter()
        .map(|&x| psi_window_with::<f64>(x, y, &primes).map(|v| (v - y as f64).abs() > y as f64 / 4.0))
        .collect::<Result<Vec<bool>>>()?;
    Ok(bad.iter().filter(|b| **b).count() as f64 / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_integer::Integer;

    fn ln_big(n: &BigUint) -> f64 {
        let bits = n.bits();
        if bits <= 60 {
            return (n.iter_u64_digits().next().unwrap_or(0) as f64).ln();
        }
        let shift = bits - 60;
        let top: BigUint = n >> shift;
        (top.iter_u64_digits().next().unwrap() as f64).ln() + shift as f64 * std::f64::consts::LN_2
    }

    #[test]
    fn definitions() {
        let s = SieveTables::new(100).unwrap();
        assert!((s.lambda::<f64>(8).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(s.lambda::<f64>(12).unwrap(), 0.0);
        assert_eq!(s.mu(6).unwrap(), 1);
        assert_eq!(s.mu(4).unwrap(), 0);
        assert_eq!(s.mu(1).unwrap(), 1);
        assert_eq!(s.mu(30).unwrap(), -1);
        assert!(s.is_prime(97).unwrap() && !s.is_prime(91).unwrap());
        assert!(s.mu(0).is_err() && s.mu(101).is_err());
    }

    #[test]
    fn mobius_sums() {
        let s = SieveTables::new(20_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let n: u64 = rng.gen_range(1..=20_000);
            let total: i64 = (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| s.mu(d).unwrap() as i64).sum();
            assert_eq!(total, (n == 1) as i64, "{n}");
        }
    }

    #[test]
    fn psi_is_log_lcm() {
        let s = SieveTables::new(10_000).unwrap();
        let mut l = BigUint::from(1u32);
        for x in 1..=10_000u64 {
            l = l.lcm(&BigUint::from(x));
            if x % 997 == 0 || x == 100 || x == 10_000 {
                let psi: f64 = s.psi(x).unwrap();
                assert!((psi - ln_big(&l)).abs() <= 1e-9 * psi.max(1.0), "{x}");
            }
        }
    }

    #[test]
    fn pi_million() {
        let s = SieveTables::new(1_000_000).unwrap();
        assert_eq!(s.pi(1_000_000), 78_498);
        assert_eq!(small_primes(1_000_000).len(), 78_498);
        assert_eq!(pi_window(0, 1_000_000).unwrap(), 78_498);
    }

    #[test]
    fn windows_match_tables() {
        let s = SieveTables::new(200_000).unwrap();
        for &(x, y) in &[(0u64, 1000u64), (1000, 5000), (99_000, 1000), (150_000, 49_999)] {
            let a: f64 = psi_window(x, y).unwrap();
            let b: f64 = s.psi::<f64>(x + y).unwrap() - s.psi::<f64>(x).unwrap();
            assert!((a - b).abs() < 1e-7, "{x} {y}");
            assert_eq!(pi_window(x, y).unwrap(), s.pi(x + y) - s.pi(x));
        }
        assert!(psi_window::<f64>(WINDOW_LIMIT, 10).is_err());
    }

    #[test]
    fn detector_examples() {
        let t = 1e6f64;
        let b = detector_coeffs(t, 1000).unwrap();
        assert!((b[0] - (-1.0 / t.sqrt()).exp()).abs() < 1e-15);
        // threshold 2·1e6^{0.01} ≈ 2.29: only d ∈ {1, 2}
        assert!((b[6] - (-7.0 / t.sqrt()).exp()).abs() < 1e-15);
        let big = 1e300f64;
        let c = detector_coeffs(big, 10).unwrap();
        assert_eq!(c[5], 0.0);
        let tables = SieveTables::new(1000).unwrap();
        for n in 1..=1000u64 {
            let divisors = (1..=n).filter(|d| n % d == 0).count() as f64;
            assert!(b[(n - 1) as usize].abs() <= divisors * (-(n as f64) / t.sqrt()).exp());
            let _ = tables.mu(n).unwrap();
        }
        assert!(detector_coeffs(t, DETECTOR_LIMIT + 1).is_err());
        let p = detector_polynomial(t, 64).unwrap();
        assert_eq!(p.length(), 64);
    }

    #[test]
    fn corollary_examples() {
        let r = corollary1_scan(10_000_000, 0).unwrap();
        assert_eq!((r.count, r.target, r.pass), (0, 0.0, true));
        let y = (1e7f64).powf(0.7).ceil() as u64;
        assert!(corollary1_scan(10_000_000, y).unwrap().pass);
        assert!(corollary1_scan(1000, 10).is_err());
    }

    #[test]
    fn almost_all_examples() {
        assert!(almost_all_scan(1_000_000, 10, 0, 1).is_err());
        let y = (1e6f64).powf(0.9) as u64;
        assert_eq!(almost_all_scan(1_000_000, y, 20, 2).unwrap(), 0.0);
        let y = (1e6f64).powf(0.4) as u64;
        let f = almost_all_scan(1_000_000, y, 1000, 3).unwrap();
        assert!(f <= 0.25, "{f}");
    }

    #[test]
    fn empty_zero_list() {
        let z = ZeroList::<f64>::empty(100.0);
        assert_eq!(explicit_window(1e4, 1e3, &z), 1e3);
    }
}
