//! Cancellation-safe pieces of the exponential relaxation kernel.

/// Below this argument the remainder `x - 1 + e^-x` is summed as a series.
pub const REMAINDER_SERIES_CUTOFF: f64 = 1.0;

/// Terms of the remainder series kept below the cutoff; the first dropped
/// term is below `2^-53` times the sum for `x < 1`.
const SERIES_TERMS: usize = 20;

/// `1 - e^-x`, accurate for tiny `x`.
#[inline]
pub fn one_minus_exp_neg(x: f64) -> f64 {
    -libm::expm1(-x)
}

/// `x - 1 + e^-x`, the second-order remainder of the exponential.
///
/// Behaves like `x^2 / 2` near zero and like `x - 1` for large `x`.
#[inline]
pub fn exp_remainder(x: f64) -> f64 {
    if x < REMAINDER_SERIES_CUTOFF {
        series(x)
    } else {
        // x - 1 is exact near 1; no cancellation with the positive e^-x
        (x - 1.0) + libm::exp(-x)
    }
}

/// `x^2/2 (1 - x/3 (1 - x/4 (1 - x/5 (...))))`
fn series(x: f64) -> f64 {
    let mut acc = 0.0;
    for n in (3..SERIES_TERMS + 3).rev() {
        acc = 1.0 - x * acc / n as f64;
    }
    0.5 * x * x * acc
}
