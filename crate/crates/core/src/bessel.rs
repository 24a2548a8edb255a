//! Integer-order Bessel functions of the first kind, from scratch.
//!
//! The series propagator needs J_n(x) for orders up to a few hundred and
//! |x| = 2γz up to about a hundred. Upward recurrence is unstable once
//! n > x, so values come from Miller's downward recurrence seeded above the
//! highest requested order and normalized with J_0 + 2·sum J_{2k} = 1.
//! Small arguments (|x| < 2) use the power series directly, where it
//! converges in a handful of terms.

use crate::error::{Error, Result};

/// Sanity bound on |n|; far beyond anything the propagator asks for.
pub const MAX_ORDER: i64 = 1_000_000;

/// Downward-recurrence margin above max(order, argument). The first
/// neglected order sits at least 40 beyond the turning point, where J has
/// already decayed below 1e-17 for the argument range of interest.
const START_MARGIN: usize = 40;

/// When recurrence values exceed this, the whole running state is rescaled
/// to avoid overflow (values grow monotonically on the way down).
const RESCALE_LIMIT: f64 = 1e250;
const RESCALE_FACTOR: f64 = 1e-250;

/// J_n(x) for integer n (possibly negative) and finite real x.
///
/// Negative order and negative argument reduce by the exact parity
/// identities J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x); the
/// sign flip is exact, so those identities hold bit-for-bit.
pub fn bessel_j(n: i64, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite {
            context: "Bessel argument",
        });
    }
    if n.abs() > MAX_ORDER {
        return Err(Error::OrderOutOfRange {
            order: n,
            max: MAX_ORDER,
        });
    }
    let order = n.unsigned_abs() as usize;
    let odd = order % 2 == 1;
    let mut sign = 1.0;
    if n < 0 && odd {
        sign = -sign;
    }
    if x < 0.0 && odd {
        sign = -sign;
    }
    let ax = x.abs();
    let value = if ax < 2.0 {
        power_series(order, ax)
    } else {
        miller(order, ax)
    };
    Ok(sign * value)
}

/// J_0(x) .. J_{n_max}(x) in one pass, argument sign handled per order.
pub fn bessel_j_sequence(n_max: usize, x: f64) -> Result<Vec<f64>> {
    if !x.is_finite() {
        return Err(Error::NonFinite {
            context: "Bessel argument",
        });
    }
    if n_max as u64 > MAX_ORDER as u64 {
        return Err(Error::OrderOutOfRange {
            order: n_max as i64,
            max: MAX_ORDER,
        });
    }
    let ax = x.abs();
    let mut out = if ax < 2.0 {
        (0..=n_max).map(|n| power_series(n, ax)).collect()
    } else {
        miller_sequence(n_max, ax)
    };
    if x < 0.0 {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    Ok(out)
}

/// Ascending series sum_k (-1)^k (x/2)^{n+2k} / (k! (n+k)!), for 0 <= x < 2.
/// Terms fall at least geometrically, so a short loop reaches full
/// precision; on this range J_n has no zeros, so there is no cancellation.
fn power_series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0_f64;
    for i in 1..=n {
        term *= half / i as f64;
        if term == 0.0 {
            // underflowed the leading factor; the true value is below the
            // smallest positive double
            return 0.0;
        }
    }
    let mut sum = term;
    let neg_quarter_sq = -half * half;
    let mut k = 1.0_f64;
    while term.abs() > 1e-20 * sum.abs().max(1e-290) && k < 80.0 {
        term *= neg_quarter_sq / (k * (n as f64 + k));
        sum += term;
        k += 1.0;
    }
    sum
}

/// Shared downward-recurrence driver, x >= 2.
///
/// Runs J_{k-1} = (2k/x) J_k - J_{k+1} from a tiny seed at
/// `start = max(n_max, ceil(x)) + START_MARGIN` down to 0, storing scaled
/// values for every requested order. Because stored values and the
/// normalization sum live in different rescale epochs, each entry remembers
/// the epoch it was written in and is brought to the final epoch at the end;
/// that keeps the pass O(start) even when rescaling fires thousands of
/// times for very high orders.
fn miller_core(n_max: usize, x: f64) -> (Vec<f64>, Vec<u32>, f64, u32) {
    let start = n_max.max(x.ceil() as usize) + START_MARGIN;
    let mut out = vec![0.0_f64; n_max + 1];
    let mut written_epoch = vec![0_u32; n_max + 1];
    let mut epoch = 0_u32;

    let mut j_above = 0.0_f64; // J at order k+1, current epoch scale
    let mut j_here = 1.0e-30_f64; // J at order k
    let mut norm = if start.is_multiple_of(2) {
        2.0 * j_here
    } else {
        0.0
    };

    let mut k = start;
    while k > 0 {
        let j_below = (2.0 * k as f64 / x) * j_here - j_above;
        j_above = j_here;
        j_here = j_below;
        k -= 1;

        if k <= n_max {
            out[k] = j_here;
            written_epoch[k] = epoch;
        }
        if k == 0 {
            norm += j_here;
        } else if k.is_multiple_of(2) {
            norm += 2.0 * j_here;
        }
        if j_here.abs() > RESCALE_LIMIT {
            j_here *= RESCALE_FACTOR;
            j_above *= RESCALE_FACTOR;
            norm *= RESCALE_FACTOR;
            epoch += 1;
        }
    }
    (out, written_epoch, norm, epoch)
}

fn miller(order: usize, x: f64) -> f64 {
    let (out, epochs, norm, final_epoch) = miller_core(order, x);
    rescaled(out[order], epochs[order], norm, final_epoch)
}

fn miller_sequence(n_max: usize, x: f64) -> Vec<f64> {
    let (out, epochs, norm, final_epoch) = miller_core(n_max, x);
    out.iter()
        .zip(&epochs)
        .map(|(&v, &e)| rescaled(v, e, norm, final_epoch))
        .collect()
}

fn rescaled(value: f64, written_epoch: u32, norm: f64, final_epoch: u32) -> f64 {
    let lag = final_epoch - written_epoch;
    if lag == 0 {
        value / norm
    } else {
        // entries written before a rescale carry an older, larger scale;
        // powi underflows to zero exactly when the true value does
        value * RESCALE_FACTOR.powi(lag as i32) / norm
    }
}
