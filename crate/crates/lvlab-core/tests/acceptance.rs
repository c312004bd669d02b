use std::collections::BTreeMap;
use std::time::Instant;

use lvlab_core::affine::{fixture_farey, fixture_random_intervals, farey_points, j_value, propsumaff_bound};
use lvlab_core::dirichlet::{additive_energy, energy_bruteforce, extremal_count, moment_l2, moment_l4, PointSet};
use lvlab_core::exponents::{
    classical_exponent, envelope_sup, fullbound_best_k, k_window, thm1_exponent, wbound2_identity, zero_density_curves,
    RegimePoint,
};
use lvlab_core::moments::{
    discrete_moment, discrete_moment_direct, energy1_ratio, gcd_split_moment, hb_rhs, hb_sum, level_sets,
};
use lvlab_core::poisson::{afe_check, compute_i_m, key_cancel_rhs, s_split, AfeConfig, TripleIndex};
use lvlab_core::primes::{corollary1_scan, explicit_window, psi_window, SieveTables};
use lvlab_core::spectral::{build_gram, summarize, trace_gram, trace_sv_bound};
use lvlab_core::weights::SmoothWeight;
use lvlab_core::zeta::{find_zeros, hardy_z};
use lvlab_core::{Rational, Result};
use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Frozen after the first calibration run on (B=8, T=4096, M=4).
const JF_CONSTANT: f64 = 5.0;

const MONITOR_BASELINE: &str = include_str!("monitor_baseline.txt");

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn r(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

fn pt(s: Rational, n: Rational) -> Result<RegimePoint<Rational>> {
    RegimePoint::new(s, n)
}

fn criterion_1() -> Result<Outcome> {
    let n = 64u64;
    let t = (n as f64).powf(1.2);
    let mut worst = 0.0f64;
    let mut worst_identity = 0.0f64;
    let mut slowest = 0.0f64;
    let mut gram_ok = true;
    for seed in 1..=5 {
        let start = Instant::now();
        let w = PointSet::random(8, 2.0, t, seed)?;
        let rep = s_split(&w, n, 0.1)?;
        slowest = slowest.max(start.elapsed().as_secs_f64());
        worst = worst.max(rep.relative_residual);
        worst_identity = worst_identity.max(rep.identity_relative);
        let s = summarize(&build_gram(w.points(), n)?)?;
        gram_ok &= s.s1 <= s.sv_bound * (1.0 + 1e-9);
    }
    outcome(
        worst <= 1e-6 && slowest <= 60.0 && gram_ok,
        format!(
            "max relative residual {worst:.3e} (with full m=0 term {worst_identity:.3e}), slowest seed {slowest:.1}s"
        ),
    )
}

fn random_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(rows, cols, |_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn criterion_2() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = f64::INFINITY;
    for i in 0..1000 {
        let rows = rng.gen_range(1..=12);
        let cols = rng.gen_range(1..=12);
        let a = if i % 10 == 0 {
            // equal singular values
            let k = rows.min(cols);
            let mut e = DMatrix::<Complex<f64>>::zeros(rows, cols);
            for j in 0..k {
                e[(j, j)] = Complex::new(1.5, 0.0);
            }
            e
        } else {
            random_complex(&mut rng, rows, cols)
        };
        let g = &a * a.adjoint();
        let g3 = &g * &g * &g;
        let t1 = g.trace().re;
        let t3 = g3.trace().re;
        let s1 = a.clone().singular_values().max();
        let bound = trace_sv_bound(t1, t3, rows);
        worst = worst.min((bound - s1) / bound.max(f64::MIN_POSITIVE));
    }
    let mut gram_worst = f64::INFINITY;
    for seed in 0..5 {
        let w = PointSet::random(12, 2.0, 300.0, seed)?;
        let s = summarize(&build_gram(w.points(), 128)?)?;
        gram_worst = gram_worst.min((s.sv_bound - s.s1) / s.sv_bound);
    }
    outcome(
        worst >= -1e-9 && gram_worst >= -1e-9,
        format!("min relative margin {worst:.3e} on 1000 matrices, {gram_worst:.3e} on Gram matrices"),
    )
}

fn criterion_3() -> Result<Outcome> {
    let weight = SmoothWeight::<f64>::new();
    let mut worst = 0.0f64;
    for (k, &n) in [1u64 << 10, 1 << 12].iter().enumerate() {
        let t = (n as f64).powf(1.2);
        let sep = t.powf(0.1);
        let w = PointSet::random(24, sep, t, 30 + k as u64)?;
        let g = build_gram(w.points(), n)?;
        let target = n as f64 * w.len() as f64 * weight.l2_sq();
        worst = worst.max((trace_gram(&g) - target).abs() / target);
    }
    outcome(worst <= 1e-6, format!("max relative error {worst:.3e}"))
}

fn criterion_4() -> Result<Outcome> {
    let n = 64u64;
    let t = (n as f64).powf(1.2);
    let mut worst = 0.0f64;
    for seed in 1..=5 {
        let w = PointSet::random(8, 2.0, t, seed)?;
        worst = worst.max(s_split(&w, n, 0.1)?.s1_ratio);
    }
    outcome(worst <= 1e-6, format!("max |S1|/main {worst:.3e}"))
}

fn criterion_5() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    for i in 0..100 {
        let size = rng.gen_range(0..=50);
        let pts: Vec<f64> = if i % 2 == 0 {
            (0..size).map(|_| rng.gen_range(0..80) as f64 / 2.0).collect()
        } else {
            (0..size).map(|_| rng.gen_range(0.0..60.0)).collect()
        };
        if additive_energy(&pts, 1.0)? != energy_bruteforce(&pts, 1.0)? {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches on 100 sets"))
}

fn criterion_6() -> Result<Outcome> {
    let start = Instant::now();
    let sigma = 0.6f64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for e in 10..=14 {
        let (_, c) = extremal_count(1u64 << e, sigma, 0.15, 0.3)?;
        xs.push(((1u64 << e) as f64).ln());
        ys.push((c.count as f64).ln());
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let secs = start.elapsed().as_secs_f64();
    outcome(
        (slope - (2.0 - 2.0 * sigma)).abs() <= 0.15 && secs <= 300.0,
        format!("slope {slope:.4} against 0.8, {secs:.1}s"),
    )
}

fn criterion_7() -> Result<Outcome> {
    let start = Instant::now();
    let mut fails = Vec::new();
    let p = pt(r(3, 4), r(4, 5))?;
    if classical_exponent(&p) != r(3, 5) {
        fails.push("classical");
    }
    if thm1_exponent(&p) != r(13, 25) {
        fails.push("thm1");
    }
    let a = zero_density_curves(&r(7, 10))?;
    let b = zero_density_curves(&r(4, 5))?;
    if !(a.ingham == r(9, 13) && a.new == r(9, 13) && b.huxley == r(3, 7) && b.new == r(3, 7)) {
        fails.push("curve meetings");
    }
    let grid: Vec<Rational> = (1..500).map(|i| r(500 + i, 1000)).collect();
    let (at, sup) = envelope_sup(grid.clone())?;
    if (at.clone(), sup.clone()) != (r(7, 10), r(30, 13)) {
        fails.push("envelope sup");
    }
    let literal = grid.iter().map(|s| r(15, 1) / (r(3, 1) + r(5, 1) * s.clone())).max().expect("grid");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let den = rng.gen_range(10..=5000i64);
        let num = rng.gen_range(den / 2 + 1..=(9 * den - 1) / 10);
        let s = r(num, den);
        if s <= r(1, 2) || s >= r(9, 10) {
            continue;
        }
        let (l, x, y) = wbound2_identity(&s)?;
        if l != x || x != y {
            fails.push("wbound2");
            break;
        }
    }
    'grid: for i in 0..10 {
        let s = r(701, 1000) + (r(39, 50) - r(701, 1000)) * r(i, 9);
        for j in 0..10 {
            let n = r(5, 6) + (r(999, 1000) - r(5, 6)) * r(j, 9);
            if k_window(&pt(s.clone(), n)?)?.length < r(1, 1) {
                fails.push("k window");
                break 'grid;
            }
        }
    }
    let (best, ks) = fullbound_best_k(&pt(r(3, 4), r(5, 6))?, 1..=12)?;
    if best != r(1, 2) || !ks.contains(&4) {
        fails.push("fullbound k");
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > 1.0 {
        fails.push("runtime");
    }
    outcome(
        fails.is_empty(),
        format!(
            "envelope sup {sup} at {at}; unclipped 15/(3+5s) sup {literal} near s=1/2; minimizing k {ks:?}; {secs:.3}s{}",
            if fails.is_empty() { String::new() } else { format!("; failed: {}", fails.join(", ")) }
        ),
    )
}

fn criterion_8() -> Result<Outcome> {
    let start = Instant::now();
    let (b, t, m) = (8u64, 4096.0f64, 4.0f64);
    let farey = fixture_farey(b, t)?;
    let random = fixture_random_intervals(t, farey_points(b).len(), 0)?;
    let jf = j_value(&farey, m)?;
    let jr = j_value(&random, m)?;
    let (bf, br) = (propsumaff_bound(&farey, m), propsumaff_bound(&random, m));
    let (qf, qr) = (jf / bf, jr / br);
    let cap = JF_CONSTANT * t.powf(0.2);
    let secs = start.elapsed().as_secs_f64();
    let same_mass = (farey.l1() - random.l1()).abs() <= 1e-9 * farey.l1();
    outcome(
        qf >= 10.0 * qr && qf <= cap && qr <= cap && same_mass && secs <= 120.0,
        format!(
            "farey J/bound {qf:.3}, random {qr:.3}, separation {:.2}x (needs 10x), C*T^0.2 = {cap:.2}, {secs:.1}s",
            qf / qr
        ),
    )
}

fn criterion_9() -> Result<Outcome> {
    let mut fails = Vec::new();
    for seed in 0..10 {
        let w = PointSet::random(40, 1.0, 200.0, 90 + seed)?;
        let e = additive_energy(w.points(), 1.0)?;
        if !level_sets(w.points())?.check(e) {
            fails.push(format!("level sets seed {seed}"));
        }
    }
    let w = PointSet::random(10, 2.0, 120.0, 9)?;
    for (n, d) in [(16u64, 3.0f64), (40, 5.0), (64, 64.0)] {
        let split = gcd_split_moment(w.points(), n, d, 2)?;
        let per_small: f64 = split.per_d.iter().filter(|(g, _)| (*g as f64) <= d).map(|(_, v)| v).sum();
        if split.partition_error() > 1e-12 || (per_small - split.small_sum).abs() > 1e-9 * split.total {
            fails.push(format!("gcd split N={n}"));
        }
    }
    let mut worst = 0.0f64;
    for m in 1..=16u64 {
        for p in 2..=4u32 {
            let a: f64 = discrete_moment(w.points(), m, p)?;
            let b: f64 = discrete_moment_direct(w.points(), m, p)?;
            worst = worst.max((a - b).abs() / b.abs().max(1.0));
        }
    }
    if worst > 1e-9 {
        fails.push("discrete moments".into());
    }
    outcome(fails.is_empty(), format!("moment cache error {worst:.2e}{}", if fails.is_empty() { String::new() } else { format!("; failed: {}", fails.join(", ")) }))
}

fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 60 {
        return (n.iter_u64_digits().next().unwrap_or(1) as f64).ln();
    }
    let shift = bits - 60;
    let top: BigUint = n >> shift;
    (top.iter_u64_digits().next().expect("nonzero") as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

fn odd_sieve_count(limit: usize) -> u64 {
    let mut is = vec![true; limit / 2 + 1];
    let mut count = u64::from(limit >= 2);
    let mut i = 3;
    while i <= limit {
        if is[i / 2] {
            count += 1;
            let mut j = i * i;
            while j <= limit {
                is[j / 2] = false;
                j += 2 * i;
            }
        }
        i += 2;
    }
    count
}

fn bisect_first_zero() -> Result<f64> {
    let (mut a, mut b) = (14.0f64, 14.3f64);
    let fa = hardy_z(a)?;
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        if (hardy_z(mid)? > 0.0) == (fa > 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

fn criterion_10() -> Result<Outcome> {
    let start = Instant::now();
    let mut fails = Vec::new();
    let zeros = find_zeros(1000.0f64)?;
    let low = zeros.truncated(100.0);
    let g1 = bisect_first_zero()?;
    let d1 = (low.ordinates[0] - g1).abs();
    if low.len() != 29 || d1 > 1e-5 {
        fails.push("zeros below 100");
    }
    let tables = SieveTables::new(10_000)?;
    let mut lcm = BigUint::from(1u32);
    let mut psi = 0.0f64;
    let mut psi_err = 0.0f64;
    for x in 1..=10_000u64 {
        lcm = lcm.lcm(&BigUint::from(x));
        psi += tables.lambda::<f64>(x)?;
        psi_err = psi_err.max((psi - ln_big(&lcm)).abs() / psi.max(1.0));
    }
    if psi_err > 1e-12 {
        fails.push("psi");
    }
    let pi = SieveTables::new(1_000_000)?.pi(1_000_000);
    if pi != odd_sieve_count(1_000_000) {
        fails.push("pi(1e6)");
    }
    let x = 100_000_000u64;
    let y = (x as f64).powf(17.0 / 30.0).ceil() as u64;
    let scan = corollary1_scan(x, y)?;
    if !scan.pass {
        fails.push("short interval scan");
    }
    let exact: f64 = psi_window(10_000, 1000)?;
    let approx = explicit_window(1e4, 1e3, &zeros);
    let err = (approx - exact).abs();
    if err > (0.1 * 1000.0f64).max(50.0) {
        fails.push("explicit window");
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > 600.0 {
        fails.push("runtime");
    }
    outcome(
        fails.is_empty(),
        format!(
            "{} zeros below 100, gamma1 offset {d1:.1e}, pi(1e6) = {pi}, scan count {} target {:.1} tol {:.1}, explicit error {err:.2}, {secs:.1}s{}",
            low.len(),
            scan.count,
            scan.target,
            scan.tolerance,
            if fails.is_empty() { String::new() } else { format!("; failed: {}", fails.join(", ")) }
        ),
    )
}

fn monitors() -> Result<BTreeMap<&'static str, f64>> {
    let mut out = BTreeMap::new();
    let mut rl2 = 0.0f64;
    let mut rl4 = 0.0f64;
    for seed in 0..5 {
        let w = PointSet::random(16, 2.0, 200.0, 110 + seed)?;
        let e = additive_energy(w.points(), 1.0)? as f64;
        rl2 = rl2.max(moment_l2(w.points())? / w.len() as f64);
        rl4 = rl4.max(moment_l4(w.points())? / e);
    }
    out.insert("rl2", rl2);
    out.insert("rl4", rl4);

    let m = 64u64;
    let w = PointSet::random(20, 2.0, 500.0, 111)?;
    let ones = vec![Complex::new(1.0, 0.0); m as usize];
    out.insert("heath_brown", hb_sum(w.points(), &ones, m)? / hb_rhs(w.len() as f64, m as f64, 500.0));

    let n = 64u64;
    let w = PointSet::random(16, 2.0, (n as f64).powf(1.2), 112)?;
    let e = additive_energy(w.points(), 1.0)?;
    out.insert("energy1", energy1_ratio(w.points(), e, n, 0.75)?);

    let pts: Vec<f64> = (0..8).map(|i| 137.0 * i as f64 + 50.0 * ((i * i) as f64).sin() ).collect();
    let tri = TripleIndex::new(-1, 3, -2);
    out.insert("key_cancel", compute_i_m(&pts, 32, tri)?.norm() / key_cancel_rhs(&pts, 32, tri, 4.0)?);

    let (l, rr) = afe_check(500.0f64, 32, AfeConfig::default())?;
    out.insert("afe", l / rr);
    Ok(out)
}

fn criterion_11() -> Result<Outcome> {
    let values = monitors()?;
    let baseline: BTreeMap<&str, f64> = MONITOR_BASELINE
        .lines()
        .filter_map(|line| {
            let mut it = line.split_whitespace();
            Some((it.next()?, it.next()?.parse().ok()?))
        })
        .collect();
    let mut drift = Vec::new();
    let mut parts = Vec::new();
    for (k, v) in &values {
        parts.push(format!("{k}={v:.4e}"));
        match baseline.get(k) {
            Some(b) if *b > 0.0 && *v > 0.0 && (v / b).max(b / v) <= 10.0 => {}
            _ => drift.push(*k),
        }
    }
    outcome(
        drift.is_empty(),
        format!("{}{}", parts.join(" "), if drift.is_empty() { String::new() } else { format!("; drifted: {}", drift.join(", ")) }),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 11] = [
        ("cubic trace identity", criterion_1),
        ("singular value trace inequality", criterion_2),
        ("trace of G", criterion_3),
        ("S1 negligibility", criterion_4),
        ("energy oracle", criterion_5),
        ("extremal scaling", criterion_6),
        ("exponent calculus", criterion_7),
        ("J(f) fixtures", criterion_8),
        ("level sets and moments", criterion_9),
        ("zeros and primes", criterion_10),
        ("monitors", criterion_11),
    ];
    let only: Option<usize> = std::env::var("LVLAB_CRITERION").ok().and_then(|v| v.parse().ok());
    let strict = std::env::var("LVLAB_STRICT").is_ok_and(|v| v == "1");
    let mut passed = 0;
    let mut run = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.is_some_and(|o| o != id) {
            continue;
        }
        run += 1;
        let start = Instant::now();
        let res = f().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
        passed += res.pass as usize;
        println!(
            "criterion {id:>2} {}: {name}: {} [{:.1}s]",
            if res.pass { "PASS" } else { "FAIL" },
            res.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {passed}/{run} PASS");
    if strict && passed < run {
        std::process::exit(1);
    }
}
