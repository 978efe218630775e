//! Tracy–Widom β = 1 distribution function, interpolated from a tabulation of
//! the Fredholm determinant on a uniform grid (see `scripts/gen_tw1_table.py`).

use super::tw1_table::TW1_CDF;
pub use super::tw1_table::{TW1_S_MAX, TW1_S_MIN};

const STEP: f64 = (TW1_S_MAX - TW1_S_MIN) / (TW1_CDF.len() - 1) as f64;

fn secant(i: usize) -> f64 {
    (TW1_CDF[i + 1] - TW1_CDF[i]) / STEP
}

// Fritsch–Carlson slope at knot i.
fn knot_slope(i: usize) -> f64 {
    let last = TW1_CDF.len() - 1;
    if i == 0 {
        return secant(0);
    }
    if i == last {
        return secant(last - 1);
    }
    let (a, b) = (secant(i - 1), secant(i));
    if a <= 0.0 || b <= 0.0 {
        0.0
    } else {
        // Harmonic mean keeps the interpolant monotone on a uniform grid.
        2.0 * a * b / (a + b)
    }
}

/// F₁(s): 0 below the table, 1 above it, monotone cubic Hermite inside.
pub fn tw1_cdf(s: f64) -> f64 {
    if s.is_nan() {
        return f64::NAN;
    }
    if s <= TW1_S_MIN {
        return if s == TW1_S_MIN { TW1_CDF[0] } else { 0.0 };
    }
    if s >= TW1_S_MAX {
        return 1.0;
    }
    let pos = (s - TW1_S_MIN) / STEP;
    let i = (pos as usize).min(TW1_CDF.len() - 2);
    let t = pos - i as f64;
    let (y0, y1) = (TW1_CDF[i], TW1_CDF[i + 1]);
    let (d0, d1) = (knot_slope(i) * STEP, knot_slope(i + 1) * STEP);
    let t2 = t * t;
    let t3 = t2 * t;
    let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * d1;
    v.clamp(0.0, 1.0)
}

/// Inverse of [`tw1_cdf`] by bisection; `p` must lie in (0, 1).
pub fn tw1_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (TW1_S_MIN, TW1_S_MAX);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if tw1_cdf(mid) < p {
            lo = mid;
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
    fn tails() {
        assert!(tw1_cdf(-10.0) < 1e-6);
        assert!(tw1_cdf(-50.0) == 0.0);
        assert!(tw1_cdf(8.0) > 1.0 - 1e-6);
        assert!(tw1_cdf(30.0) == 1.0);
    }

    #[test]
    fn known_values() {
        // F1(0) and the F1 mean/median region, from the Fredholm determinant.
        assert!((tw1_cdf(0.0) - 0.831_908).abs() < 1e-5);
        let median = tw1_quantile(0.5);
        assert!((median - (-1.2686)).abs() < 1e-3, "median {median}");
    }

    #[test]
    fn monotone_on_fine_grid() {
        let mut prev = 0.0;
        let mut s = -11.0;
        while s < 9.0 {
            let v = tw1_cdf(s);
            assert!(v >= prev, "not monotone at {s}");
            prev = v;
            s += 0.0031;
        }
    }
}
