//! Small numerical helpers shared across modules.

/// Inverse golden ratio, `(sqrt(5) - 1) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
///
/// Returns `(argmax, max)`. The interval is shrunk until its width falls
/// below `xtol` (absolute). The caller is responsible for unimodality; on a
/// non-unimodal function this still returns a valid function value at some
/// interior point, just not necessarily the global maximum.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > xtol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

/// Golden-section minimization on `[lo, hi]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    let (x, neg) = golden_max(|t| -f(t), lo, hi, xtol);
    (x, -neg)
}

/// `x^e`, using the exact integer-power path when `e` is a small integer.
///
/// The reaction terms are evaluated millions of times in marches and sweeps;
/// `powi` is much cheaper than `powf` and exact for the common integer
/// exponent sets.
#[inline]
pub fn fpow(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        return 1.0;
    }
    let ei = e as i32;
    if ei as f64 == e && ei.abs() <= 16 {
        x.powi(ei)
    } else {
        x.powf(e)
    }
}

/// Logarithmically spaced grid from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (la, lb) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (la + (lb - la) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
