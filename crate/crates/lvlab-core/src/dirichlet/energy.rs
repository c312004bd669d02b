use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::scalar::Real;

/// Most pairwise sums the fast counter will hold in memory.
pub const PAIR_BUDGET: usize = 50_000_000;

/// Largest set accepted by the quartic enumeration.
pub const BRUTE_LIMIT: usize = 60;

/// Ordered quadruples with |(w₁+w₂) − (w₃+w₄)| ≤ slack, by sorting the |W|² pair sums.
pub fn additive_energy<F: Real>(points: &[F], slack: F) -> Result<u64> {
    let m = points.len();
    if m > 100_000 {
        return Err(LabError::SizeLimit(format!("|W| = {m} above 1e5")));
    }
    if m.checked_mul(m).is_none_or(|p| p > PAIR_BUDGET) {
        return Err(LabError::Overflow(format!("{m}² pair sums exceed the memory budget")));
    }
    let mut sums: Vec<F> = Vec::with_capacity(m * m);
    for &a in points {
        for &b in points {
            sums.push(a + b);
        }
    }
    sums.par_sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite sums"));
    let n = sums.len();
    let chunk = 1 << 16;
    let total: u64 = (0..n.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let end = (start + chunk).min(n);
            let s = &sums;
            let mut lo = s.partition_point(|x| s[start] - *x > slack);
            let mut hi = start;
            let mut acc = 0u64;
            for i in start..end {
                while s[i] - s[lo] > slack {
                    lo += 1;
                }
                if hi < i {
                    hi = i;
                }
                while hi + 1 < n && s[hi + 1] - s[i] <= slack {
                    hi += 1;
                }
                acc += (hi - lo + 1) as u64;
            }
            acc
        })
        .collect::<Vec<u64>>()
        .into_iter()
        .sum();
    Ok(total)
}

/// Direct O(|W|⁴) count, the oracle for [`additive_energy`].
pub fn energy_bruteforce<F: Real>(points: &[F], slack: F) -> Result<u64> {
    if points.len() > BRUTE_LIMIT {
        return Err(LabError::SizeLimit(format!("|W| = {} above {BRUTE_LIMIT}", points.len())));
    }
    let mut count = 0u64;
    for &a in points {
        for &b in points {
            let s1 = a + b;
            for &c in points {
                for &d in points {
                    if (s1 - (c + d)).abs() <= slack {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(additive_energy(&[3.5f64], 1.0).unwrap(), 1);
        assert_eq!(additive_energy(&[0.0f64, 1.0], 1.0).unwrap(), 14);
        assert_eq!(additive_energy(&[0.0f64, 10.0, 20.0], 1.0).unwrap(), 19);
        assert_eq!(energy_bruteforce(&[0.0f64, 1.0], 1.0).unwrap(), 14);
        assert_eq!(energy_bruteforce::<f64>(&[], 1.0).unwrap(), 0);
        assert_eq!(additive_energy::<f64>(&[], 1.0).unwrap(), 0);
    }

    #[test]
    fn brute_size_limit() {
        let w: Vec<f64> = (0..61).map(|i| i as f64 * 2.0).collect();
        assert!(matches!(energy_bruteforce(&w, 1.0), Err(LabError::SizeLimit(_))));
    }

    #[test]
    fn overflow_guard() {
        let w: Vec<f64> = (0..8000).map(|i| i as f64).collect();
        assert!(matches!(additive_energy(&w, 1.0), Err(LabError::Overflow(_))));
    }

    proptest! {
        #[test]
        fn fast_equals_brute(gaps in proptest::collection::vec(1.0f64..4.0, 0..30)) {
            let mut t = 0.0;
            let w: Vec<f64> = gaps.iter().map(|g| { t += g; t }).collect();
            prop_assert_eq!(additive_energy(&w, 1.0).unwrap(), energy_bruteforce(&w, 1.0).unwrap());
        }

        #[test]
        fn energy_between_square_and_cube(gaps in proptest::collection::vec(1.0f64..3.0, 1..40)) {
            let mut t = 0.0;
            let w: Vec<f64> = gaps.iter().map(|g| { t += g; t }).collect();
            let e = additive_energy(&w, 1.0).unwrap();
            let m = w.len() as u64;
            prop_assert!(e >= m * m);
            prop_assert!(e <= 3 * m * m * m);
        }
    }
}
