use lvlab_core::primes::{explicit_window, psi_window};
use lvlab_core::zeta::{find_zeros, riemann_von_mangoldt};

#[test]
fn zero_counts() {
    let zeros = find_zeros(1000.0f64).unwrap();
    assert_eq!(zeros.truncated(100.0).len(), 29);
    assert_eq!(zeros.truncated(500.0).len(), 269);
    assert_eq!(zeros.len(), 649);
    for h in [100.0, 500.0, 1000.0] {
        let k = zeros.truncated(h).len() as f64;
        assert!((k - riemann_von_mangoldt(h)).abs() < 2.0, "{h}");
    }
    assert!(zeros.residuals.iter().all(|r| *r < 1e-8));
    assert!(zeros.ordinates.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn explicit_formula_improves_with_height() {
    let zeros = find_zeros(1000.0f64).unwrap();
    let (x, y) = (1e4, 1e3);
    let exact: f64 = psi_window(10_000, 1000).unwrap();
    let errs: Vec<f64> = [50.0, 200.0, 1000.0]
        .iter()
        .map(|h| (explicit_window(x, y, &zeros.truncated(*h)) - exact).abs())
        .collect();
    assert!(errs[2] <= errs[0], "{errs:?}");
    assert!(errs[2] <= 0.1 * y);
}
