//! Scalar traits shared by the floating-point and exact layers.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{Float, FloatConst, FromPrimitive, NumCast, Signed, ToPrimitive};

/// Floating-point scalar used by every numerical module.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumCast + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    /// Converts an integer count into the scalar type.
    #[inline]
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// Lossy conversion back to `f64` for reporting.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact field used by the exponent calculus.
pub trait Exact:
    Clone + Ord + Debug + Display + Signed + num_traits::Num + Send + Sync + 'static
{
    /// The rational `num/den`; `den` must be nonzero.
    fn frac(num: i64, den: i64) -> Self;

    /// The integer `n`.
    fn int(n: i64) -> Self {
        Self::frac(n, 1)
    }

    /// Nearest `f64`, for reporting only.
    fn approx(&self) -> f64;

    /// Smallest integer not below `self`.
    fn ceil_int(&self) -> i64;

    /// Whether the reduced denominator is at most `bound`.
    fn denom_at_most(&self, bound: i64) -> bool;
}

macro_rules! exact_ratio {
    ($t:ty) => {
        impl Exact for Ratio<$t> {
            fn frac(num: i64, den: i64) -> Self {
                Ratio::new(num as $t, den as $t)
            }
            fn approx(&self) -> f64 {
                self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN)
            }
            fn ceil_int(&self) -> i64 {
                self.ceil().to_integer() as i64
            }
            fn denom_at_most(&self, bound: i64) -> bool {
                *self.denom() <= bound as $t
            }
        }
    };
}

exact_ratio!(i64);
exact_ratio!(i128);

impl Exact for Ratio<BigInt> {
    fn frac(num: i64, den: i64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn ceil_int(&self) -> i64 {
        self.ceil().to_integer().to_i64().expect("ceiling fits in i64")
    }
    fn denom_at_most(&self, bound: i64) -> bool {
        *self.denom() <= BigInt::from(bound)
    }
}

/// Kahan–Babuška (Neumaier) compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan<F> {
    sum: F,
    comp: F,
}

impl<F: Real> Kahan<F> {
    pub fn new() -> Self {
        Self { sum: F::zero(), comp: F::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> F {
        self.sum + self.comp
    }
}

/// Compensated accumulator for complex values (independent real and imaginary parts).
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanC<F> {
    re: Kahan<F>,
    im: Kahan<F>,
}

impl<F: Real> KahanC<F> {
    pub fn new() -> Self {
        Self { re: Kahan::new(), im: Kahan::new() }
    }

    #[inline]
    pub fn add(&mut self, z: Complex<F>) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex<F> {
        Complex::new(self.re.value(), self.im.value())
    }
}

/// Compensated sum of a real sequence.
pub fn ksum<F: Real, I: IntoIterator<Item = F>>(xs: I) -> F {
    let mut k = Kahan::new();
    for x in xs {
        k.add(x);
    }
    k.value()
}

/// Compensated sum of a complex sequence.
pub fn ksum_c<F: Real, I: IntoIterator<Item = Complex<F>>>(zs: I) -> Complex<F> {
    let mut k = KahanC::new();
    for z in zs {
        k.add(z);
    }
    k.value()
}

/// `exp(i x)`.
#[inline]
pub fn cis<F: Real>(x: F) -> Complex<F> {
    let (s, c) = x.sin_cos();
    Complex::new(c, s)
}
