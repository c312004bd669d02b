use std::fmt::Write as _;

use lvlab_core::affine::{farey_points, fixture_farey, fixture_random_intervals, j_value_detail, propsumaff_bound};
use lvlab_core::dirichlet::{additive_energy, energy_bruteforce, extremal_count, PointSet, BRUTE_LIMIT};
use lvlab_core::exponents::{bounds_row, fullbound_best_k, RegimePoint};
use lvlab_core::moments::{energy1_ratio, energy_rhs_basic, level_sets};
use lvlab_core::poisson::{s_split_with_budget, truncation_radius};
use lvlab_core::primes::corollary1_scan;
use lvlab_core::zeta::{find_zeros, riemann_von_mangoldt};
use lvlab_core::{Profile, Rational};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::failure::Failure;

/// A rendered artifact and the hard assertions that did not hold.
pub struct Emitted {
    pub body: String,
    pub failed: Vec<String>,
}

pub enum Format {
    Csv,
    Json,
}

fn provenance(format: Format, command: &str, args: &str, cfg: &RunConfig, body: Value) -> String {
    let tool = format!("dirichlet-lv-lab {}", env!("CARGO_PKG_VERSION"));
    match format {
        Format::Csv => {
            let mut s = String::new();
            let _ = writeln!(s, "# tool: {tool}");
            let _ = writeln!(s, "# command: {command} {args}");
            let _ = writeln!(s, "# config: {}", cfg.echo());
            let _ = writeln!(s, "# seed: {}", cfg.seed);
            s
        }
        Format::Json => {
            let doc = json!({
                "provenance": {
                    "tool": tool,
                    "command": command,
                    "args": args,
                    "config": cfg.echo(),
                    "seed": cfg.seed,
                },
                "report": body,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
            s.push('\n');
            s
        }
    }
}

fn parse_rationals(list: &str) -> Result<Vec<Rational>, Failure> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Rational>().map_err(|_| Failure::Usage(format!("not a rational: {s}"))))
        .collect()
}

pub fn bounds_table(cfg: &RunConfig, sigma: &str, n: &str, k: Option<u32>) -> Result<Emitted, Failure> {
    let sigmas = parse_rationals(sigma)?;
    let ns = parse_rationals(n)?;
    let args = format!("sigma={sigma} n={n} k={}", k.map_or("auto".to_string(), |k| k.to_string()));
    let mut body = provenance(Format::Csv, "bounds-table", &args, cfg, Value::Null);
    body.push_str("sigma,n,k,classical,thm1,fullbound,big_n,jutila,zd_curves\n");
    for s in &sigmas {
        for x in &ns {
            let p = RegimePoint::new(s.clone(), x.clone()).map_err(|e| Failure::Usage(e.to_string()))?;
            let k = match k {
                Some(k) => k,
                None => fullbound_best_k(&p, 1..=12)?.1[0],
            };
            let r = bounds_row(&p, k)?;
            let _ = writeln!(
                body,
                "{},{},{},{},{},{},{},{},{}",
                r.sigma, r.n, r.k, r.classical, r.thm1, r.fullbound, r.big_n, r.jutila, r.zd_curves
            );
        }
    }
    Ok(Emitted { body, failed: Vec::new() })
}

pub fn trace_verify(cfg: &RunConfig, n: u64, points: usize, delta: f64) -> Result<Emitted, Failure> {
    if n > cfg.max_n {
        return Err(Failure::Budget(format!("N = {n} above max_n = {}", cfg.max_n)));
    }
    let t = (n as f64).powf(1.2);
    let m_star = truncation_radius(t, n, cfg.eps);
    let bytes = 16.0 * (points * points) as f64 * (2 * m_star + 3) as f64;
    if bytes > cfg.memory_budget {
        return Err(Failure::Budget(format!("tables need {bytes:e} bytes")));
    }
    let w = PointSet::random(points, delta, t, cfg.seed)?;
    let rep = s_split_with_budget(&w, n, cfg.eps, cfg.work_budget)?;
    let reconstructed = rep.i0.re + rep.s1.re + rep.s2.re + rep.s3.re;
    let mut failed = Vec::new();
    if !(rep.identity_relative <= cfg.trace_tolerance) {
        failed.push(format!("trace identity residual {:e} above {:e}", rep.identity_relative, cfg.trace_tolerance));
    }
    let mut report = serde_json::to_value(&rep).expect("report serializes");
    report["reconstructed"] = json!(reconstructed);
    report["ordinates"] = json!(w.points());
    let args = format!("n={n} points={points} delta={delta}");
    Ok(Emitted { body: provenance(Format::Json, "trace-verify", &args, cfg, report), failed })
}

pub fn construct_extremal(cfg: &RunConfig, n: u64, sigma: f64, block_eps: f64, factor: f64) -> Result<Emitted, Failure> {
    let (ex, c) = extremal_count(n, sigma, block_eps, factor)?;
    let mut failed = Vec::new();
    if c.min_witness_ratio < factor {
        failed.push(format!("witness ratio {} below {factor}", c.min_witness_ratio));
    }
    let report = json!({
        "n": n,
        "sigma": sigma,
        "blocks": c.blocks,
        "height": ex.height,
        "spacing": ex.spacing,
        "count": c.count,
        "min_witness_ratio": c.min_witness_ratio,
        "normalized": c.normalized,
        "witnesses": ex.witnesses.points(),
    });
    let args = format!("n={n} sigma={sigma} block_eps={block_eps} factor={factor}");
    Ok(Emitted { body: provenance(Format::Json, "construct-extremal", &args, cfg, report), failed })
}

fn jf_entry(f: &Profile, m: f64) -> Result<(Value, f64), Failure> {
    let j = j_value_detail(f, m)?;
    let bound = propsumaff_bound(f, m);
    let ratio = j.value / bound;
    let v = json!({
        "l1": f.l1(),
        "l2_sq": f.l2_sq(),
        "j": j.value,
        "argmax": j.argmax,
        "bound": bound,
        "ratio": ratio,
    });
    Ok((v, ratio))
}

pub fn jf_bench(cfg: &RunConfig, b: u64, t: f64, m: f64, c: f64) -> Result<Emitted, Failure> {
    let farey: Profile = fixture_farey(b, t)?;
    let random: Profile = fixture_random_intervals(t, farey_points(b).len(), cfg.seed)?;
    let (fv, fr) = jf_entry(&farey, m)?;
    let (rv, rr) = jf_entry(&random, m)?;
    let cap = c * t.powf(0.2);
    let mut failed = Vec::new();
    for (name, ratio) in [("farey", fr), ("random", rr)] {
        if ratio > cap {
            failed.push(format!("{name} J/bound {ratio} above C*T^0.2 = {cap}"));
        }
    }
    let report = json!({
        "farey": fv,
        "random": rv,
        "separation": fr / rr,
        "constant": c,
        "cap": cap,
    });
    let args = format!("b={b} t={t} m={m} c={c}");
    Ok(Emitted { body: provenance(Format::Json, "jf-bench", &args, cfg, report), failed })
}

pub fn energy_report(
    cfg: &RunConfig,
    points: usize,
    length: f64,
    delta: f64,
    n: u64,
    sigma: f64,
) -> Result<Emitted, Failure> {
    let w = PointSet::random(points, delta, length, cfg.seed)?;
    let e = additive_energy(w.points(), 1.0)?;
    let mut failed = Vec::new();
    let brute = if w.len() <= BRUTE_LIMIT {
        let b = energy_bruteforce(w.points(), 1.0)?;
        if b != e {
            failed.push(format!("fast energy {e} differs from brute force {b}"));
        }
        Some(b)
    } else {
        None
    };
    let levels = level_sets(w.points())?;
    if !levels.check(e) {
        failed.push("level-set inequalities".into());
    }
    let size = w.len() as f64;
    let report = json!({
        "points": w.len(),
        "energy": e,
        "energy_bruteforce": brute,
        "levels": levels.levels.iter().map(|l| json!({"b": l.b, "size": l.members.len(), "mass": l.mass, "square_mass": l.square_mass})).collect::<Vec<_>>(),
        "basic_rhs": energy_rhs_basic(size, n as f64, sigma)?,
        "energy1_ratio": energy1_ratio(w.points(), e, n, sigma)?,
    });
    let args = format!("points={points} length={length} delta={delta} n={n} sigma={sigma}");
    Ok(Emitted { body: provenance(Format::Json, "energy-report", &args, cfg, report), failed })
}

pub fn primes_check(cfg: &RunConfig, x: f64, y_exp: Option<f64>, y: Option<u64>) -> Result<Emitted, Failure> {
    if !(x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64) {
        return Err(Failure::Usage(format!("x = {x} is not a nonnegative integer")));
    }
    let xi = x as u64;
    let y = match (y, y_exp) {
        (Some(y), None) => y,
        (None, Some(e)) if (0.0..=1.0).contains(&e) => x.powf(e).ceil() as u64,
        (None, Some(e)) => return Err(Failure::Usage(format!("y exponent {e} outside [0, 1]"))),
        _ => return Err(Failure::Usage("give exactly one of --y and --y-exp".into())),
    };
    if 2.0 * y as f64 > cfg.memory_budget {
        return Err(Failure::Budget(format!("window of {y} above the memory budget")));
    }
    let row = corollary1_scan(xi, y)?;
    let mut failed = Vec::new();
    if !row.pass {
        failed.push(format!("count {} against target {} beyond tolerance {}", row.count, row.target, row.tolerance));
    }
    let args = format!("x={xi} y={y}");
    let mut body = provenance(Format::Csv, "primes-check", &args, cfg, Value::Null);
    body.push_str("x,y,count,target,tolerance,pass\n");
    let _ = writeln!(body, "{},{},{},{},{},{}", row.x, row.y, row.count, row.target, row.tolerance, row.pass);
    Ok(Emitted { body, failed })
}

pub fn zeros(cfg: &RunConfig, height: f64) -> Result<Emitted, Failure> {
    let list = find_zeros(height)?;
    let mut failed = Vec::new();
    let expected = riemann_von_mangoldt(height);
    if (list.len() as f64 - expected).abs() > 2.0 {
        failed.push(format!("{} zeros against N(T) = {expected:.2}", list.len()));
    }
    let args = format!("height={height}");
    let mut body = provenance(Format::Csv, "zeros", &args, cfg, Value::Null);
    let _ = writeln!(
        body,
        "# {} sign changes of Z account for N(T) = {expected:.2}; no zeros off the line, so N(sigma, T) = 0 for sigma >= 0.7 at this height",
        list.len()
    );
    body.push_str("index,ordinate,residual\n");
    for (i, (g, r)) in list.ordinates.iter().zip(&list.residuals).enumerate() {
        let _ = writeln!(body, "{},{:.12},{:e}", i + 1, g, r);
    }
    Ok(Emitted { body, failed })
}
