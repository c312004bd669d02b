//! Dirichlet polynomials, separated point sets, additive energy and the R functions.

mod energy;
mod extremal;
mod pointset;
mod polynomial;
mod rfunc;

pub use energy::{additive_energy, energy_bruteforce, BRUTE_LIMIT, PAIR_BUDGET};
pub use extremal::{extremal_construction, extremal_count, scan_large_values, Extremal, ExtremalCount};
pub use pointset::{extract_large_values, PointSet};
pub use polynomial::DirichletPolynomial;
pub use rfunc::{
    local_constancy_d, local_constancy_r, moment, moment_l2, moment_l4, r_eval, r_smoothed, SmoothingSpec,
};
