use num_complex::Complex;

use crate::dirichlet::DirichletPolynomial;
use crate::error::{LabError, Result};
use crate::quadrature::{adaptive_real, GaussLegendre, Refinement};
use crate::scalar::{cis, KahanC, Real};
use crate::weights::{kernel_inner, kernel_outer};

/// R(v) = Σ_{t∈W} |v|^{it}.
pub fn r_eval<F: Real>(points: &[F], v: F) -> Result<Complex<F>> {
    if v == F::zero() {
        return Err(LabError::DomainError("R(v) needs v != 0".into()));
    }
    Ok(r_eval_unchecked(points, v.abs().ln()))
}

/// R at a point given by its logarithm.
#[inline]
pub(crate) fn r_eval_unchecked<F: Real>(points: &[F], log_v: F) -> Complex<F> {
    let mut acc = KahanC::new();
    for &t in points {
        acc.add(cis(t * log_v));
    }
    acc.value()
}

#[inline]
pub(crate) fn r_abs2<F: Real>(points: &[F], v: F) -> F {
    if v <= F::zero() {
        return F::zero();
    }
    r_eval_unchecked(points, v.ln()).norm_sqr()
}

/// Scale of the two-kernel smoothing of |R|.
#[derive(Clone, Copy, Debug)]
pub struct SmoothingSpec<F> {
    m: F,
}

impl<F: Real> SmoothingSpec<F> {
    pub fn new(m: F) -> Result<Self> {
        if !(m >= F::one()) {
            return Err(LabError::DomainError("smoothing scale M must be >= 1".into()));
        }
        Ok(Self { m })
    }

    pub fn scale(&self) -> F {
        self.m
    }

    pub fn inner(&self, x: F) -> F {
        kernel_inner(x)
    }

    pub fn outer(&self, x: F) -> F {
        kernel_outer(x)
    }
}

fn spread<F: Real>(points: &[F]) -> F {
    match (points.iter().copied().reduce(F::min), points.iter().copied().reduce(F::max)) {
        (Some(a), Some(b)) => b - a,
        _ => F::zero(),
    }
}

/// R̃(u) = (∫ NM ψ̃₁(NM(u−u')) ψ̃₂(u') |R(u')|² du')^{1/2}.
pub fn r_smoothed<F: Real>(points: &[F], u: F, spec: &SmoothingSpec<F>, n: u64) -> Result<F> {
    let nm = F::count(n as usize) * spec.m;
    let reach = F::lit(2.0) / nm;
    if !(u >= F::lit(0.5) - reach && u <= F::lit(4.0) + reach) {
        return Err(LabError::DomainError(format!("u = {} outside the smoothing support", u.to_f64_lossy())));
    }
    if points.is_empty() {
        return Ok(F::zero());
    }
    let a = (u - reach).max(F::lit(0.5));
    let b = (u + reach).min(F::lit(4.0));
    if a >= b {
        return Ok(F::zero());
    }
    let width = F::one().min(F::lit(0.25) / nm).min(F::lit(0.5) / (spread(points) + F::one()));
    let start = ((b - a) / width).ceil().to_usize().unwrap_or(1).max(1);
    let rule = GaussLegendre::gl16();
    let f = |x: F| {
        let k = kernel_inner(nm * (u - x)) * kernel_outer(x);
        if k == F::zero() {
            F::zero()
        } else {
            nm * k * r_abs2(points, x)
        }
    };
    let v = adaptive_real(&rule, f, a, b, start, Refinement::new(1e-10, 1e-14))?;
    Ok(v.max(F::zero()).sqrt())
}

/// ∫_{1/2}^{2} |R(v)|^p dv.
pub fn moment<F: Real>(points: &[F], p: i32) -> Result<F> {
    if points.is_empty() {
        return Ok(F::zero());
    }
    let scale = spread(points) + F::one();
    let start = (F::lit(1.5) * scale / F::lit(2.0)).ceil().to_usize().unwrap_or(1).max(4);
    let rule = GaussLegendre::gl16();
    let half = p / 2;
    adaptive_real(
        &rule,
        |v| r_abs2(points, v).powi(half),
        F::lit(0.5),
        F::lit(2.0),
        start,
        Refinement::new(1e-9, 1e-13),
    )
}

pub fn moment_l2<F: Real>(points: &[F]) -> Result<F> {
    moment(points, 2)
}

pub fn moment_l4<F: Real>(points: &[F]) -> Result<F> {
    moment(points, 4)
}

/// |R(v)| / (T·∫_{|v'−v|≤c/T} |R|), with T the spread of W (at least 1).
pub fn local_constancy_r<F: Real>(points: &[F], v: F, c: F) -> Result<F> {
    let t = spread(points).max(F::one());
    let r = c / t;
    let lo = v - r;
    if lo <= F::zero() {
        return Err(LabError::DomainError("window reaches v <= 0".into()));
    }
    let rule = GaussLegendre::gl16();
    let start = (F::lit(2.0) * c).ceil().to_usize().unwrap_or(1).max(4);
    let integral = adaptive_real(
        &rule,
        |x| r_eval_unchecked(points, x.ln()).norm(),
        lo,
        v + r,
        start,
        Refinement::new(1e-7, 1e-12),
    )?;
    Ok(r_eval(points, v)?.norm() / (t * integral))
}

/// |D(t)| / ∫_{|u−t|≤c} |D(u)| du.
pub fn local_constancy_d<F: Real>(poly: &DirichletPolynomial<F>, t: F, c: F) -> Result<F> {
    let rule = GaussLegendre::gl16();
    let top = F::count((2 * poly.length()) as usize).ln();
    let start = (F::lit(2.0) * c * top).ceil().to_usize().unwrap_or(1).max(4);
    let integral = adaptive_real(
        &rule,
        |x| poly.eval_raw(x).norm(),
        t - c,
        t + c,
        start,
        Refinement::new(1e-7, 1e-12),
    )?;
    Ok(poly.eval_raw(t).norm() / integral)
}
