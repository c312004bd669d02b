use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};
use crate::scalar::Real;

/// A δ-separated set of ordinates inside [T₀, T₀+T].
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet<F> {
    points: Vec<F>,
    delta: F,
    origin: F,
    length: F,
}

impl<F: Real> PointSet<F> {
    pub fn new(mut points: Vec<F>, delta: F, origin: F, length: F) -> Result<Self> {
        if !(delta > F::zero()) || !(length >= F::zero()) {
            return Err(LabError::DomainError("separation must be positive and length nonnegative".into()));
        }
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite ordinates"));
        for w in points.windows(2) {
            if w[1] - w[0] < delta {
                return Err(LabError::DomainError(format!(
                    "points {} and {} closer than {}",
                    w[0].to_f64_lossy(),
                    w[1].to_f64_lossy(),
                    delta.to_f64_lossy()
                )));
            }
        }
        if let (Some(first), Some(last)) = (points.first(), points.last()) {
            if *first < origin || *last > origin + length {
                return Err(LabError::DomainError("points outside [T0, T0+T]".into()));
            }
        }
        Ok(Self { points, delta, origin, length })
    }

    /// Uses the hull of the points as the ambient interval.
    pub fn from_points(mut points: Vec<F>, delta: F) -> Result<Self> {
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite ordinates"));
        let origin = points.first().copied().unwrap_or(F::zero());
        let length = points.last().map(|l| *l - origin).unwrap_or(F::zero());
        Self::new(points, delta, origin, length)
    }

    /// `count` uniform draws in [0, length] kept when δ-separated from earlier draws.
    pub fn random(count: usize, delta: F, length: F, seed: u64) -> Result<Self> {
        if F::count(count) * delta * F::lit(2.0) > length + delta {
            return Err(LabError::DomainError(format!("{count} points at separation {} do not fit", delta.to_f64_lossy())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts: Vec<F> = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while pts.len() < count {
            attempts += 1;
            if attempts > 10_000 * (count + 1) {
                return Err(LabError::PlacementFailure(format!("placed {} of {count}", pts.len())));
            }
            let x = F::lit(rng.gen::<f64>()) * length;
            if pts.iter().all(|p| (*p - x).abs() >= delta) {
                pts.push(x);
            }
        }
        Self::new(pts, delta, F::zero(), length)
    }

    pub fn empty(delta: F) -> Self {
        Self { points: Vec::new(), delta, origin: F::zero(), length: F::zero() }
    }

    pub fn points(&self) -> &[F] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn separation(&self) -> F {
        self.delta
    }

    pub fn origin(&self) -> F {
        self.origin
    }

    pub fn ambient_length(&self) -> F {
        self.length
    }

    /// max − min of the points (0 when fewer than two).
    pub fn span(&self) -> F {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => *b - *a,
            _ => F::zero(),
        }
    }

    /// Header `T0=<float> T=<float> delta=<float>` then one ordinate per line.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "T0={:e} T={:e} delta={:e}\n",
            self.origin.to_f64_lossy(),
            self.length.to_f64_lossy(),
            self.delta.to_f64_lossy()
        );
        for p in &self.points {
            let _ = writeln!(s, "{:e}", p.to_f64_lossy());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| LabError::Parse("empty input".into()))?;
        let kv = crate::textio::header_pairs(header)?;
        let origin: f64 = crate::textio::field(&kv, "T0")?;
        let length: f64 = crate::textio::field(&kv, "T")?;
        let delta: f64 = crate::textio::field(&kv, "delta")?;
        let points = lines
            .map(|l| l.trim().parse::<f64>().map(F::lit).map_err(|_| LabError::Parse(format!("bad ordinate: {l}"))))
            .collect::<Result<Vec<F>>>()?;
        Self::new(points, F::lit(delta), F::lit(origin), F::lit(length))
    }
}

/// Greedy smallest-first selection of δ-separated ordinates with |D| ≥ V.
/// `values` must be sorted by ordinate; the ambient interval is the sampled range.
pub fn extract_large_values<F: Real>(values: &[(F, F)], threshold: F, delta: F) -> PointSet<F> {
    let mut picked: Vec<F> = Vec::new();
    for &(t, v) in values {
        if v >= threshold && picked.last().is_none_or(|last| t - *last >= delta) {
            picked.push(t);
        }
    }
    let origin = values.first().map(|p| p.0).unwrap_or(F::zero());
    let length = values.last().map(|p| p.0 - origin).unwrap_or(F::zero());
    PointSet { points: picked, delta, origin, length }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_examples() {
        let v = [(0.0, 5.0), (0.5, 5.0), (1.0, 5.0)];
        assert_eq!(extract_large_values(&v, 1.0, 1.0).points(), &[0.0, 1.0]);
        assert!(extract_large_values(&v, 10.0, 1.0).is_empty());
        let v = [(0.0, 5.0), (2.0, 5.0), (4.0, 5.0)];
        assert_eq!(extract_large_values(&v, 1.0, 1.0).len(), 3);
    }

    #[test]
    fn separation_checked() {
        assert!(PointSet::from_points(vec![0.0, 0.5], 1.0).is_err());
        assert!(PointSet::new(vec![3.0], 1.0, 0.0, 2.0).is_err());
        let p = PointSet::from_points(vec![4.0, 0.0, 2.0], 1.0).unwrap();
        assert_eq!(p.points(), &[0.0, 2.0, 4.0]);
        assert_eq!(p.span(), 4.0);
    }

    #[test]
    fn text_round_trip() {
        let p = PointSet::new(vec![1.0, 2.5, 7.25], 1.0, 0.0, 10.0).unwrap();
        let back = PointSet::<f64>::from_text(&p.to_text()).unwrap();
        assert_eq!(back, p);
    }
}
