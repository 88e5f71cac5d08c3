//! Scalar maximization on an interval: uniform grid pre-scan followed by
//! golden-section refinement of the best bracket.

use rayon::prelude::*;

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (√5 − 1)/2

/// Location and value of a maximum.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `xtol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64) -> Maximum {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > xtol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // the midpoint may be marginally worse than an interior probe
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold(Maximum { x, value: fx }, |best, (x, v)| {
            if v > best.value {
                Maximum { x, value: v }
            } else {
                best
            }
        })
}

/// Points `lo + i·(hi − lo)/n` for `i in 0..n` (the right end excluded).
pub fn grid_points(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    let step = (hi - lo) / n as f64;
    (0..n).map(move |i| lo + i as f64 * step)
}

/// Argmax of `f` over `grid_points(lo, hi, n)`. Ties resolve to the lowest index,
/// independent of how the scan is parallelized.
pub fn grid_argmax<F: Fn(f64) -> f64 + Sync>(f: F, lo: f64, hi: f64, n: usize) -> (usize, Maximum) {
    assert!(n > 0, "empty grid");
    let step = (hi - lo) / n as f64;
    let (i, value) = (0..n).into_par_iter().map(|i| (i, f(lo + i as f64 * step))).reduce(
        || (usize::MAX, f64::NEG_INFINITY),
        |a, b| {
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                b
            } else {
                a
            }
        },
    );
    (
        i,
        Maximum {
            x: lo + i as f64 * step,
            value,
        },
    )
}

/// Grid pre-scan with `n` points on `[lo, hi)`, then golden-section inside the
/// two cells around the best grid point.
pub fn bracketed_max<F: Fn(f64) -> f64 + Sync>(f: F, lo: f64, hi: f64, n: usize, xtol: f64) -> Maximum {
    let (i, coarse) = grid_argmax(&f, lo, hi, n);
    let step = (hi - lo) / n as f64;
    let a = (lo + (i as f64 - 1.0) * step).max(lo);
    let b = (lo + (i as f64 + 1.0) * step).min(hi);
    let fine = golden_section_max(&f, a, b, xtol);
    if fine.value >= coarse.value {
        fine
    } else {
        coarse
    }
}
