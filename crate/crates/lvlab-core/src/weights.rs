//! The fixed smooth weight `w` and the bump kernels built from the same profile.

use crate::quadrature::{adaptive_real, GaussLegendre, Refinement};
use crate::scalar::Real;

/// `exp(-1/x)` for `x > 0`, zero otherwise.
#[inline]
fn g<F: Real>(x: F) -> F {
    if x <= F::zero() {
        F::zero()
    } else {
        (-x.recip()).exp()
    }
}

/// C∞ smoothstep: 0 for `x <= 0`, 1 for `x >= 1`.
#[inline]
pub fn smoothstep<F: Real>(x: F) -> F {
    if x <= F::zero() {
        F::zero()
    } else if x >= F::one() {
        F::one()
    } else {
        let a = g(x);
        let b = g(F::one() - x);
        a / (a + b)
    }
}

/// The weight: supported on [1, 2], identically 1 on [6/5, 9/5].
#[derive(Clone, Debug)]
pub struct SmoothWeight<F> {
    l1: F,
    l2_sq: F,
}

impl<F: Real> Default for SmoothWeight<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Real> SmoothWeight<F> {
    pub const LEFT: f64 = 1.0;
    pub const PLATEAU: (f64, f64) = (1.2, 1.8);
    pub const RIGHT: f64 = 2.0;

    pub fn new() -> Self {
        let rule = GaussLegendre::gl16();
        let ctl = Refinement::new(1e-14, 1e-16);
        let s2 = adaptive_real(&rule, |x| smoothstep(x).powi(2), F::zero(), F::one(), 8, ctl)
            .expect("smoothstep square integrates");
        let fifth = F::lit(0.2);
        let plateau = F::lit(0.6);
        Self { l1: plateau + fifth, l2_sq: plateau + F::lit(2.0) * fifth * s2 }
    }

    /// w(u).
    #[inline]
    pub fn eval(&self, u: F) -> F {
        eval_weight(u)
    }

    /// ∫ w.
    pub fn l1(&self) -> F {
        self.l1
    }

    /// ‖w‖²_{L²} = ∫ w².
    pub fn l2_sq(&self) -> F {
        self.l2_sq
    }

    /// ‖w‖⁶_{L²}.
    pub fn l2_pow6(&self) -> F {
        self.l2_sq.powi(3)
    }
}

/// w(u) without the cached norms.
#[inline]
pub fn eval_weight<F: Real>(u: F) -> F {
    let one = F::one();
    let two = F::lit(2.0);
    if !(u > one && u < two) {
        return F::zero();
    }
    if u >= F::lit(1.2) && u <= F::lit(1.8) {
        return one;
    }
    let five = F::lit(5.0);
    if u < F::lit(1.2) {
        smoothstep(five * (u - one))
    } else {
        smoothstep(five * (two - u))
    }
}

/// Inner smoothing kernel: supported on |x| ≤ 2, equal to 1 on |x| ≤ 1.
#[inline]
pub fn kernel_inner<F: Real>(x: F) -> F {
    smoothstep(F::lit(2.0) - x.abs())
}

/// Outer smoothing kernel: supported on [1/2, 4], equal to 1 on [1, 2].
#[inline]
pub fn kernel_outer<F: Real>(x: F) -> F {
    let half = F::lit(0.5);
    let two = F::lit(2.0);
    if x <= half || x >= F::lit(4.0) {
        F::zero()
    } else if x < F::one() {
        smoothstep(two * (x - half))
    } else if x <= two {
        F::one()
    } else {
        smoothstep((F::lit(4.0) - x) / two)
    }
}

/// Cell bump: supported on |x| ≤ 1, equal to 1 on |x| ≤ 1/2.
#[inline]
pub fn bump<F: Real>(x: F) -> F {
    smoothstep(F::lit(2.0) * (F::one() - x.abs()))
}

/// ∫ kernel_inner = 3.
pub fn kernel_inner_mass<F: Real>() -> F {
    F::lit(3.0)
}

/// ∫ bump = 3/2.
pub fn bump_mass<F: Real>() -> F {
    F::lit(1.5)
}
