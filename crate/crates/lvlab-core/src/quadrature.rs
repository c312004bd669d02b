//! Composite Gauss–Legendre rules with panel doubling.

use num_complex::Complex;

use crate::error::{LabError, Result};
use crate::scalar::{Kahan, KahanC, Real};

/// Hard ceiling on the number of panels any adaptive rule may use.
pub const MAX_PANELS: usize = 1_000_000;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre<F> {
    pub nodes: Vec<F>,
    pub weights: Vec<F>,
}

impl<F: Real> GaussLegendre<F> {
    /// Rule of the given order, nodes found by Newton iteration on P_n.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self {
            nodes: nodes.into_iter().map(F::lit).collect(),
            weights: weights.into_iter().map(F::lit).collect(),
        }
    }

    /// The order-16 rule used throughout.
    pub fn gl16() -> Self {
        Self::new(16)
    }

    /// Composite rule over `[a, b]` split into `panels` equal panels, real integrand.
    pub fn composite_real(&self, f: impl Fn(F) -> F, a: F, b: F, panels: usize) -> F {
        let h = (b - a) / F::count(panels);
        let half = h / F::lit(2.0);
        let mut acc = Kahan::new();
        for p in 0..panels {
            let mid = a + h * (F::count(p) + F::lit(0.5));
            let mut panel = Kahan::new();
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                panel.add(*w * f(mid + half * *x));
            }
            acc.add(panel.value() * half);
        }
        acc.value()
    }

    /// Composite rule over `[a, b]`, complex integrand.
    pub fn composite_complex(&self, f: impl Fn(F) -> Complex<F>, a: F, b: F, panels: usize) -> Complex<F> {
        let h = (b - a) / F::count(panels);
        let half = h / F::lit(2.0);
        let mut acc = KahanC::new();
        for p in 0..panels {
            let mid = a + h * (F::count(p) + F::lit(0.5));
            let mut panel = KahanC::new();
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                panel.add(f(mid + half * *x) * *w);
            }
            acc.add(panel.value() * half);
        }
        acc.value()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Doubling controls: stop when successive estimates agree to `rel·|I| + abs`.
#[derive(Clone, Copy, Debug)]
pub struct Refinement<F> {
    pub rel: F,
    pub abs: F,
    pub max_panels: usize,
}

impl<F: Real> Refinement<F> {
    pub fn new(rel: f64, abs: f64) -> Self {
        Self { rel: F::lit(rel), abs: F::lit(abs), max_panels: MAX_PANELS }
    }
}

/// Panel doubling on a complex integrand, starting from `start` panels.
pub fn adaptive_complex<F: Real>(
    rule: &GaussLegendre<F>,
    f: impl Fn(F) -> Complex<F>,
    a: F,
    b: F,
    start: usize,
    ctl: Refinement<F>,
) -> Result<Complex<F>> {
    let mut panels = start.max(1);
    if panels > ctl.max_panels {
        return Err(LabError::AccuracyNotReached(format!("{panels} panels requested")));
    }
    let mut prev = rule.composite_complex(&f, a, b, panels);
    loop {
        panels *= 2;
        if panels > ctl.max_panels {
            return Err(LabError::AccuracyNotReached(format!("refinement exceeded {} panels", ctl.max_panels)));
        }
        let next = rule.composite_complex(&f, a, b, panels);
        if (next - prev).norm() <= ctl.rel * next.norm() + ctl.abs {
            return Ok(next);
        }
        prev = next;
    }
}

/// Panel doubling on a real integrand.
pub fn adaptive_real<F: Real>(
    rule: &GaussLegendre<F>,
    f: impl Fn(F) -> F,
    a: F,
    b: F,
    start: usize,
    ctl: Refinement<F>,
) -> Result<F> {
    let mut panels = start.max(1);
    if panels > ctl.max_panels {
        return Err(LabError::AccuracyNotReached(format!("{panels} panels requested")));
    }
    let mut prev = rule.composite_real(&f, a, b, panels);
    loop {
        panels *= 2;
        if panels > ctl.max_panels {
            return Err(LabError::AccuracyNotReached(format!("refinement exceeded {} panels", ctl.max_panels)));
        }
        let next = rule.composite_real(&f, a, b, panels);
        if (next - prev).abs() <= ctl.rel * next.abs() + ctl.abs {
            return Ok(next);
        }
        prev = next;
    }
}
