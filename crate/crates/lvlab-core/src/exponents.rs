//! Exponent algebra over exact rationals. Every value is the exponent of T with N = T^n.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::scalar::Exact;

pub const MAX_DENOMINATOR: i64 = 1_000_000;

fn q<Q: Exact>(num: i64, den: i64) -> Q {
    Q::frac(num, den)
}

fn max_of<Q: Exact>(xs: impl IntoIterator<Item = Q>) -> Q {
    xs.into_iter().max().expect("nonempty")
}

/// (σ, n) with N = T^n and an optional power k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegimePoint<Q> {
    pub sigma: Q,
    pub n: Q,
    pub k: Option<u32>,
}

impl<Q: Exact> RegimePoint<Q> {
    pub fn new(sigma: Q, n: Q) -> Result<Self> {
        if !(sigma > q(1, 2) && sigma < Q::one()) {
            return Err(LabError::DomainError(format!("sigma = {sigma} outside (1/2, 1)")));
        }
        if !(n > Q::zero() && n <= Q::one()) {
            return Err(LabError::DomainError(format!("n = {n} outside (0, 1]")));
        }
        if !(sigma.denom_at_most(MAX_DENOMINATOR) && n.denom_at_most(MAX_DENOMINATOR)) {
            return Err(LabError::DomainError("denominators above 10^6".into()));
        }
        Ok(Self { sigma, n, k: None })
    }

    pub fn with_k(mut self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(LabError::DomainError("k must be positive".into()));
        }
        self.k = Some(k);
        Ok(self)
    }

    /// Exponent of V = N^σ.
    pub fn v_exponent(&self) -> Q {
        self.n.clone() * self.sigma.clone()
    }
}

/// max(2n(1−σ), 1 + n·min(1−2σ, 4−6σ)) for any σ, n.
pub fn classical<Q: Exact>(sigma: &Q, n: &Q) -> Q {
    let one = Q::one();
    let a = q::<Q>(2, 1) * n.clone() * (one.clone() - sigma.clone());
    let m = (one.clone() - q::<Q>(2, 1) * sigma.clone()).min(q::<Q>(4, 1) - q::<Q>(6, 1) * sigma.clone());
    a.max(one + n.clone() * m)
}

/// Mean-value plus Huxley large values estimate.
pub fn classical_exponent<Q: Exact>(p: &RegimePoint<Q>) -> Q {
    classical(&p.sigma, &p.n)
}

/// max(2n(1−σ), n(18/5−4σ), 1+n(12/5−4σ)).
pub fn thm1_exponent<Q: Exact>(p: &RegimePoint<Q>) -> Q {
    let (s, n) = (p.sigma.clone(), p.n.clone());
    let four = q::<Q>(4, 1);
    max_of([
        q::<Q>(2, 1) * n.clone() * (Q::one() - s.clone()),
        n.clone() * (q::<Q>(18, 5) - four.clone() * s.clone()),
        Q::one() + n * (q::<Q>(12, 5) - four * s),
    ])
}

/// The eight terms whose maximum bounds |W| for a given k.
pub fn fullbound_terms<Q: Exact>(p: &RegimePoint<Q>, k: u32) -> Result<[Q; 8]> {
    if k == 0 {
        return Err(LabError::DomainError("k must be positive".into()));
    }
    let (s, n) = (p.sigma.clone(), p.n.clone());
    let one = Q::one();
    let k = k as i64;
    let c = |a: i64| q::<Q>(a, 1);
    let five_six = c(5) - c(6) * s.clone();
    Ok([
        c(2) * n.clone() * (one.clone() - s.clone()),
        n.clone() * five_six.clone(),
        q::<Q>(k, k + 1) * (one.clone() + n.clone() * (c(4) - c(6) * s.clone())),
        q::<Q>(4 * k, 4 * k + 3) * n.clone() * five_six + q::<Q>(2, 4 * k + 3),
        q::<Q>(4, 3) + n.clone() * (c(2) - c(4) * s.clone()),
        q::<Q>(1, 2) + n.clone() * (c(3) - c(4) * s.clone()),
        one + n.clone() * (q::<Q>(9, 2) - c(7) * s.clone()),
        q::<Q>(18, 19) + n * (c(72) - c(112) * s) / c(19),
    ])
}

pub fn fullbound_exponent<Q: Exact>(p: &RegimePoint<Q>) -> Result<Q> {
    let k = p.k.ok_or_else(|| LabError::DomainError("fullbound needs k".into()))?;
    Ok(max_of(fullbound_terms(p, k)?))
}

/// Minimum of the full bound over k in `ks`, and every k attaining it.
pub fn fullbound_best_k<Q: Exact>(p: &RegimePoint<Q>, ks: impl IntoIterator<Item = u32>) -> Result<(Q, Vec<u32>)> {
    let mut best: Option<Q> = None;
    let mut arg = Vec::new();
    for k in ks {
        let v = max_of(fullbound_terms(p, k)?);
        match &best {
            Some(b) if v > *b => {}
            Some(b) if v == *b => arg.push(k),
            _ => {
                best = Some(v);
                arg = vec![k];
            }
        }
    }
    best.map(|b| (b, arg)).ok_or_else(|| LabError::DomainError("empty k range".into()))
}

fn check_big_n<Q: Exact>(p: &RegimePoint<Q>) -> Result<()> {
    if !(p.n >= q(5, 6) && p.n <= Q::one() && p.sigma >= q(7, 10)) {
        return Err(LabError::DomainError(format!("(sigma, n) = ({}, {}) outside n in [5/6, 1], sigma >= 7/10", p.sigma, p.n)));
    }
    Ok(())
}

/// max(2n(1−σ), 1/2+n(3−4σ), (30σ−21)/5 + n(46−60σ)/5).
pub fn big_n_exponent<Q: Exact>(p: &RegimePoint<Q>) -> Result<Q> {
    check_big_n(p)?;
    let (s, n) = (p.sigma.clone(), p.n.clone());
    let c = |a: i64| q::<Q>(a, 1);
    Ok(max_of([
        c(2) * n.clone() * (Q::one() - s.clone()),
        q::<Q>(1, 2) + n.clone() * (c(3) - c(4) * s.clone()),
        (c(30) * s.clone() - c(21)) / c(5) + n * (c(46) - c(60) * s) / c(5),
    ]))
}

/// max(2n(1−σ), 1+n(10−16σ)/3, 1+n(18−24σ)).
pub fn jutila_exponent<Q: Exact>(p: &RegimePoint<Q>) -> Result<Q> {
    check_big_n(p)?;
    let (s, n) = (p.sigma.clone(), p.n.clone());
    let c = |a: i64| q::<Q>(a, 1);
    Ok(max_of([
        c(2) * n.clone() * (Q::one() - s.clone()),
        Q::one() + n.clone() * (c(10) - c(16) * s.clone()) / c(3),
        Q::one() + n * (c(18) - c(24) * s),
    ]))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KWindow<Q> {
    pub lower: Q,
    pub upper: Q,
    /// The closed form, independent of upper − lower.
    pub length: Q,
}

/// Admissible k range for n ∈ [5/6, 1), σ ∈ (7/10, 39/50].
pub fn k_window<Q: Exact>(p: &RegimePoint<Q>) -> Result<KWindow<Q>> {
    let (s, n) = (p.sigma.clone(), p.n.clone());
    let c = |a: i64| q::<Q>(a, 1);
    if !(n >= q(5, 6) && n < Q::one()) {
        return Err(LabError::DomainError(format!("n = {n} outside [5/6, 1)")));
    }
    if !(s > q(7, 10) && s <= q(39, 50)) {
        return Err(LabError::DomainError(format!("sigma = {s} outside (7/10, 39/50]")));
    }
    let one_n = Q::one() - n.clone();
    let ten_s = c(10) * s.clone() - c(7);
    let thirteen = c(13) - c(15) * s.clone();
    let lower = (c(73) - c(138) * n.clone() - c(90) * s.clone() + c(180) * n.clone() * s.clone())
        / (c(12) * one_n.clone() * ten_s.clone());
    let upper = (c(-21) + c(46) * n.clone() + c(30) * s.clone() - c(60) * n.clone() * s.clone())
        / (c(2) * one_n.clone() * thirteen.clone());
    let length = Q::one()
        + c(5) * (c(6) * n - c(5)) * (c(-41) + c(123) * s.clone() - c(90) * s.clone() * s)
            / (c(12) * one_n * ten_s * thirteen);
    Ok(KWindow { lower, upper, length })
}

/// Smallest k with N^k ≥ T^{10/(6+10σ)}, required to satisfy N^k ≤ T^{15/(6+10σ)}; N = T^n.
pub fn kdef_select<Q: Exact>(sigma: &Q, n: &Q) -> Result<u32> {
    if !(*n > Q::zero()) {
        return Err(LabError::DomainError(format!("n = {n} must be positive")));
    }
    let denom = q::<Q>(6, 1) + q::<Q>(10, 1) * sigma.clone();
    let lower = q::<Q>(10, 1) / denom.clone();
    let upper = q::<Q>(15, 1) / denom;
    let k = (lower / n.clone()).ceil_int().max(1);
    if Q::int(k) * n.clone() > upper {
        return Err(LabError::NoValidK(format!("k = {k} overshoots at sigma = {sigma}, n = {n}")));
    }
    u32::try_from(k).map_err(|_| LabError::NoValidK(format!("k = {k} too large")))
}

fn check_alpha<Q: Exact>(sigma: &Q) -> Result<()> {
    if !(*sigma > q(1, 2) && *sigma < q(9, 10)) {
        return Err(LabError::DomainError(format!("sigma = {sigma} outside (1/2, 9/10)")));
    }
    Ok(())
}

/// α = 15(1−σ)/((3+5σ)(18/5−4σ)).
pub fn alpha<Q: Exact>(sigma: &Q) -> Result<Q> {
    check_alpha(sigma)?;
    let s = sigma.clone();
    let c = |a: i64| q::<Q>(a, 1);
    Ok(c(15) * (Q::one() - s.clone()) / ((c(3) + c(5) * s.clone()) * (q::<Q>(18, 5) - c(4) * s)))
}

/// (1+(1−2σ)α, (129−195σ+50σ²)/(2(3+5σ)(9−10σ)), 15(1−σ)/(3+5σ) − (250(σ−3/4)²+3/8)/(2(3+5σ)(9−10σ))).
pub fn wbound2_identity<Q: Exact>(sigma: &Q) -> Result<(Q, Q, Q)> {
    let a = alpha(sigma)?;
    let s = sigma.clone();
    let c = |x: i64| q::<Q>(x, 1);
    let lhs = Q::one() + (Q::one() - c(2) * s.clone()) * a;
    let den = c(2) * (c(3) + c(5) * s.clone()) * (c(9) - c(10) * s.clone());
    let rhs1 = (c(129) - c(195) * s.clone() + c(50) * s.clone() * s.clone()) / den.clone();
    let shift = s.clone() - q::<Q>(3, 4);
    let rhs2 = c(15) * (Q::one() - s.clone()) / (c(3) + c(5) * s)
        - (c(250) * shift.clone() * shift + q::<Q>(3, 8)) / den;
    Ok((lhs, rhs1, rhs2))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroDensity<Q> {
    pub ingham: Q,
    pub huxley: Q,
    pub new: Q,
    pub envelope: Q,
}

impl<Q: Exact> ZeroDensity<Q> {
    /// The constant A in T^{A(1−σ)} for each curve.
    pub fn normalized(&self, sigma: &Q) -> ZeroDensity<Q> {
        let d = Q::one() - sigma.clone();
        ZeroDensity {
            ingham: self.ingham.clone() / d.clone(),
            huxley: self.huxley.clone() / d.clone(),
            new: self.new.clone() / d.clone(),
            envelope: self.envelope.clone() / d,
        }
    }
}

/// 3(1−σ)/(2−σ), 3(1−σ)/(3σ−1), 15(1−σ)/(3+5σ) and their minimum.
pub fn zero_density_curves<Q: Exact>(sigma: &Q) -> Result<ZeroDensity<Q>> {
    if !(*sigma > q(1, 2) && *sigma < Q::one()) {
        return Err(LabError::DomainError(format!("sigma = {sigma} outside (1/2, 1)")));
    }
    let s = sigma.clone();
    let c = |a: i64| q::<Q>(a, 1);
    let d = Q::one() - s.clone();
    let ingham = c(3) * d.clone() / (c(2) - s.clone());
    let huxley = c(3) * d.clone() / (c(3) * s.clone() - Q::one());
    let new = c(15) * d / (c(3) + c(5) * s);
    let envelope = ingham.clone().min(huxley.clone()).min(new.clone());
    Ok(ZeroDensity { ingham, huxley, new, envelope })
}

/// Largest envelope constant A over the grid, with its σ.
pub fn envelope_sup<Q: Exact>(grid: impl IntoIterator<Item = Q>) -> Result<(Q, Q)> {
    let mut best: Option<(Q, Q)> = None;
    for s in grid {
        let a = zero_density_curves(&s)?.normalized(&s).envelope;
        if best.as_ref().is_none_or(|(_, b)| a > *b) {
            best = Some((s, a));
        }
    }
    best.ok_or_else(|| LabError::DomainError("empty grid".into()))
}

/// 1 − y < 13/30.
pub fn prime_exponent_gate<Q: Exact>(y_exp: &Q) -> bool {
    Q::one() - y_exp.clone() < q(13, 30)
}

/// One row of the exponent table.
#[derive(Clone, Debug, Serialize)]
pub struct BoundsRow {
    pub sigma: String,
    pub n: String,
    pub k: u32,
    pub classical: String,
    pub thm1: String,
    pub fullbound: String,
    pub big_n: String,
    pub jutila: String,
    pub zd_curves: String,
}

/// Table row at (σ, n, k); the two large-N columns are empty outside their domain.
pub fn bounds_row<Q: Exact>(p: &RegimePoint<Q>, k: u32) -> Result<BoundsRow> {
    let zd = zero_density_curves(&p.sigma)?;
    Ok(BoundsRow {
        sigma: p.sigma.to_string(),
        n: p.n.to_string(),
        k,
        classical: classical_exponent(p).to_string(),
        thm1: thm1_exponent(p).to_string(),
        fullbound: max_of(fullbound_terms(p, k)?).to_string(),
        big_n: big_n_exponent(p).map(|v| v.to_string()).unwrap_or_default(),
        jutila: jutila_exponent(p).map(|v| v.to_string()).unwrap_or_default(),
        zd_curves: format!("{};{};{};{}", zd.ingham, zd.huxley, zd.new, zd.envelope),
    })
}
