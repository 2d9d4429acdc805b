//! Bracketing on a logarithmic grid followed by bisection.

/// Sign-change brackets of `f` found by sampling `points` log-spaced abscissae
/// in `[lo, hi]`. Exact zeros on the grid produce a degenerate bracket.
pub fn log_scan_brackets<F>(f: F, lo: f64, hi: f64, points: usize) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    assert!(lo > 0.0 && hi > lo && points >= 2);
    let step = (hi / lo).ln() / (points - 1) as f64;
    let grid: Vec<f64> = (0..points)
        .map(|i| if i + 1 == points { hi } else { lo * (step * i as f64).exp() })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut brackets = Vec::new();
    for i in 0..points - 1 {
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            brackets.push((grid[i], grid[i]));
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            brackets.push((grid[i], grid[i + 1]));
        }
    }
    if values[points - 1] == 0.0 {
        brackets.push((hi, hi));
    }
    brackets
}

/// Bisection on a sign-change bracket until `hi - lo <= rel_tol * lo`.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if lo == hi {
        return lo;
    }
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    while hi - lo > rel_tol * lo.abs() {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_square_root() {
        let r = bisect(|x| x * x - 2.0, 1.0, 2.0, 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn scan_finds_all_sign_changes() {
        // roots at 3, 30, 300
        let f = |x: f64| (x - 3.0) * (x - 30.0) * (x - 300.0);
        let b = log_scan_brackets(f, 1.0, 1e3, 100);
        assert_eq!(b.len(), 3);
        for ((lo, hi), root) in b.into_iter().zip([3.0, 30.0, 300.0]) {
            assert!(lo <= root && root <= hi);
            assert!((bisect(f, lo, hi, 1e-12) / root - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn scan_without_sign_change_is_empty() {
        assert!(log_scan_brackets(|x| x + 1.0, 1.0, 10.0, 50).is_empty());
    }
}
