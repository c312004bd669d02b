//! Numerical laboratory for large values of Dirichlet polynomials.

pub mod affine;
pub mod dirichlet;
pub mod error;
pub mod exponents;
pub mod fourier;
pub mod moments;
pub mod poisson;
pub mod primes;
pub mod quadrature;
pub mod scalar;
pub mod spectral;
mod textio;
pub mod weights;
pub mod zeta;

pub use error::{LabError, Result};

pub type Weight = weights::SmoothWeight<f64>;
pub type Polynomial = dirichlet::DirichletPolynomial<f64>;
pub type Points = dirichlet::PointSet<f64>;
pub type Gram = spectral::GramMatrix<f64>;
pub type Profile = affine::DensityProfile<f64>;
pub type Zeros = zeta::ZeroList<f64>;
pub type Rational = num_rational::BigRational;
pub type Regime = exponents::RegimePoint<Rational>;
