//! h_t(u) = w(u)² u^{it} and its Fourier transform ĥ_t(ξ) = ∫ e(−ξu) h_t(u) du.

use num_complex::Complex;

use crate::error::{LabError, Result};
use crate::quadrature::{adaptive_complex, GaussLegendre, Refinement};
use crate::scalar::{cis, Real};
use crate::weights::eval_weight;

/// Largest |t| or |ξ| accepted by the quadrature.
pub const ENVELOPE: f64 = 1e6;

/// h_t(u).
pub fn eval_h<F: Real>(t: F, u: F) -> Complex<F> {
    let w = eval_weight(u);
    if w == F::zero() {
        return Complex::new(F::zero(), F::zero());
    }
    cis(t * u.ln()) * (w * w)
}

/// Quadrature engine for ĥ_t(ξ); holds the Gauss–Legendre rule.
#[derive(Clone, Debug)]
pub struct HTransform<F> {
    rule: GaussLegendre<F>,
    ctl: Refinement<F>,
}

impl<F: Real> Default for HTransform<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Real> HTransform<F> {
    pub fn new() -> Self {
        let rel = (F::epsilon() * F::lit(100.0)).max(F::lit(1e-10));
        let abs = (F::epsilon() * F::lit(10.0)).max(F::lit(1e-15));
        Self { rule: GaussLegendre::gl16(), ctl: Refinement { rel, abs, max_panels: crate::quadrature::MAX_PANELS } }
    }

    /// Initial panel count from the width rule ¼·min(1, 2π/(1+|t|+2π|ξ|)).
    pub fn initial_panels(t: F, xi: F) -> usize {
        let tau = F::TAU();
        let width = F::one().min(tau / (F::one() + t.abs() + tau * xi.abs()));
        (F::one() / width).ceil().to_usize().unwrap_or(usize::MAX)
    }

    /// ĥ_t(ξ).
    pub fn eval(&self, t: F, xi: F) -> Result<Complex<F>> {
        let env = F::lit(ENVELOPE);
        if !(t.abs() <= env && xi.abs() <= env) {
            return Err(LabError::AccuracyNotReached(format!(
                "|t|={} or |xi|={} outside the quadrature envelope",
                t.to_f64_lossy(),
                xi.to_f64_lossy()
            )));
        }
        let tau = F::TAU();
        let f = |u: F| {
            let w = eval_weight(u);
            if w == F::zero() {
                Complex::new(F::zero(), F::zero())
            } else {
                cis(t * u.ln() - tau * xi * u) * (w * w)
            }
        };
        let start = Self::initial_panels(t, xi);
        adaptive_complex(&self.rule, f, F::one(), F::lit(2.0), start, self.ctl)
    }

    /// |ĥ_t(ξ)| / min((1+|t|)^j/|ξ|^j, (1+|ξ|)^j/|t|^j), dropping a branch whose denominator vanishes.
    pub fn decay_ratio(&self, t: F, xi: F, j: i32) -> Result<F> {
        if t == F::zero() && xi == F::zero() {
            return Err(LabError::DivisionDomain("t = 0 and xi = 0".into()));
        }
        let v = self.eval(t, xi)?.norm();
        let one = F::one();
        let a = if xi != F::zero() { ((one + t.abs()) / xi.abs()).powi(j) } else { F::infinity() };
        let b = if t != F::zero() { ((one + xi.abs()) / t.abs()).powi(j) } else { F::infinity() };
        Ok(v / a.min(b))
    }
}

/// ĥ_t(ξ) with a fresh engine.
pub fn fourier_h<F: Real>(t: F, xi: F) -> Result<Complex<F>> {
    HTransform::new().eval(t, xi)
}

/// Decay monitor with a fresh engine.
pub fn decay_ratio<F: Real>(t: F, xi: F, j: i32) -> Result<F> {
    HTransform::new().decay_ratio(t, xi, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::SmoothWeight;
    use proptest::prelude::*;

    #[test]
    fn eval_h_examples() {
        assert_eq!(eval_h(0.0f64, 1.5), Complex::new(1.0, 0.0));
        assert_eq!(eval_h(7.0f64, 0.5), Complex::new(0.0, 0.0));
        assert!((eval_h(10.0f64, 1.5).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_frequency_is_l2_norm() {
        let v = fourier_h(0.0f64, 0.0).unwrap();
        let w = SmoothWeight::<f64>::new();
        assert!(v.im.abs() < 1e-15);
        assert!(v.re >= 0.6 && v.re <= 1.0);
        assert!((v.re - w.l2_sq()).abs() < 1e-12);
    }

    #[test]
    fn high_frequency_small() {
        let e = HTransform::<f64>::new();
        let v = e.eval(0.0, 200.0).unwrap();
        assert!(v.norm() <= 1e-6);
        let rule = GaussLegendre::gl16();
        let p = 2 * HTransform::<f64>::initial_panels(0.0, 200.0) * 64;
        let dense = rule.composite_complex(
            |u| cis(-std::f64::consts::TAU * 200.0 * u) * eval_weight(u).powi(2),
            1.0,
            2.0,
            p,
        );
        assert!((v - dense).norm() < 1e-12);
    }

    #[test]
    fn decay_ratio_examples() {
        let e = HTransform::<f64>::new();
        let r = e.decay_ratio(0.5, 100.0, 2).unwrap();
        assert!(r.is_finite() && r > 0.0);
        let r = e.decay_ratio(1000.0, 0.5, 2).unwrap();
        assert!(r <= 1e3);
        assert!(matches!(e.decay_ratio(0.0, 0.0, 1), Err(LabError::DivisionDomain(_))));
    }

    #[test]
    fn outside_envelope() {
        assert!(matches!(fourier_h(2e6f64, 0.0), Err(LabError::AccuracyNotReached(_))));
    }

    #[test]
    fn decay_sweep_bounded() {
        let e = HTransform::<f64>::new();
        for &t in &[0.0, 3.0, 40.0] {
            let mut worst = 0.0f64;
            let lo = 10.0 * t + 10.0;
            let mut xi: f64 = lo;
            while xi <= 1e4 {
                let v = e.eval(t, xi).unwrap().norm();
                worst = worst.max(v * xi * xi / (1.0 + t).powi(2));
                xi *= 1.7;
            }
            assert!(worst < 1.0, "t={t} worst={worst}");
        }
    }

    #[test]
    fn f32_transform() {
        let v = fourier_h(0.0f32, 0.0).unwrap();
        assert!((v.re - SmoothWeight::<f32>::new().l2_sq()).abs() < 1e-4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn conjugate_symmetry(t in -300.0f64..300.0, xi in -60.0f64..60.0) {
            let e = HTransform::<f64>::new();
            let a = e.eval(-t, xi).unwrap();
            let b = e.eval(t, -xi).unwrap().conj();
            prop_assert!((a - b).norm() <= 1e-9);
        }

        #[test]
        fn triangle_inequality(t in -500.0f64..500.0, xi in -100.0f64..100.0) {
            let e = HTransform::<f64>::new();
            let w = SmoothWeight::<f64>::new();
            prop_assert!(e.eval(t, xi).unwrap().norm() <= w.l2_sq() + 1e-9);
        }
    }
}
