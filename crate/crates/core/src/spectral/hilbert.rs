//! Hilbert transform of a truncated power-law density `ρ(x) = C x^α` on `[0, R]`.

use core::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::quad;

const LEVELS: usize = 6;

/// `(1/π) PV ∫_0^R C x^α / (x - λ) dx` for `0 < λ < R`, `α > -1`, `α` not an integer.
///
/// The principal value is the limit of symmetric excisions `|x - λ| > ε`; the
/// excised integral is odd in `ε`, so a Richardson table in `ε, ε³, ε⁵, …`
/// removes the bias.
pub fn hilbert_power_law(alpha: f64, c: f64, lambda: f64, r: f64) -> Result<f64> {
    if libm::trunc(alpha) == alpha {
        return Err(domain("power-law exponent must not be an integer"));
    }
    principal_value(alpha, c, lambda, r)
}

fn principal_value(alpha: f64, c: f64, lambda: f64, r: f64) -> Result<f64> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(domain("power-law exponent must exceed -1"));
    }
    if !(lambda > 0.0 && lambda < r) || !r.is_finite() {
        return Err(domain("need 0 < lambda < R"));
    }
    if !c.is_finite() {
        return Err(domain("amplitude must be finite"));
    }
    let eps0 = 0.25 * lambda.min(r - lambda);
    let mut table = [[0.0f64; LEVELS]; LEVELS];
    for i in 0..LEVELS {
        let eps = eps0 / (1u64 << i) as f64;
        table[i][0] = excised(alpha, lambda, r, eps)?;
        for j in 1..=i {
            // Error terms go as ε^(2j-1).
            let factor = (1u64 << (2 * j - 1)) as f64;
            table[i][j] = (factor * table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
        }
    }
    Ok(c * table[LEVELS - 1][LEVELS - 1] / PI)
}

/// Leading term `-C λ^α cot(πα)` of [`hilbert_power_law`] as `R → ∞`, for `-1 < α < 0`.
///
/// For `α >= 0` the truncation terms do not vanish and this is only the
/// `λ`-dependent singular part.
pub fn hilbert_power_law_leading(alpha: f64, c: f64, lambda: f64) -> f64 {
    -c * libm::pow(lambda, alpha) / libm::tan(PI * alpha)
}

// ∫ over [0, λ-ε] ∪ [λ+ε, R] of x^α/(x-λ).
fn excised(alpha: f64, lambda: f64, r: f64, eps: f64) -> Result<f64> {
    let left_end = lambda - eps;
    // x = a y^q with q(α+1) = 2 makes the integrand smooth at the origin.
    let q = 2.0 / (alpha + 1.0);
    let left = quad::integrate(
        |y| {
            if y <= 0.0 {
                return 0.0;
            }
            let x = left_end * libm::pow(y, q);
            let jac = left_end * q * libm::pow(y, q - 1.0);
            libm::pow(x, alpha) * jac / (x - lambda)
        },
        0.0,
        1.0,
        1e-14,
        1e-13,
        2000,
    );
    let right = quad::integrate(
        |x| libm::pow(x, alpha) / (x - lambda),
        lambda + eps,
        r,
        1e-14,
        1e-13,
        2000,
    );
    let tol = 1e-9 * (left.value.abs() + right.value.abs()).max(1.0);
    if left.abs_error > tol || right.abs_error > tol {
        return Err(Error::Integration {
            step: 0,
            bisections: left.intervals.max(right.intervals),
            reason: "principal-value quadrature did not converge".into(),
        });
    }
    Ok(left.value + right.value)
}
