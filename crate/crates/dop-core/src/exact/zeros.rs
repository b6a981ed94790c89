use alloc::vec::Vec;

#[allow(unused_imports)]
use crate::prelude::*;
use super::RecurrenceTable;
use crate::dd::Dd;

/// Number of zeros of `P_n` strictly greater than `x`, from the sign
/// changes of the Sturm sequence `P_0(x), …, P_n(x)`.
///
/// The sequence is evaluated in double-double with the tabulated coefficients
/// taken as exact. On saturated regions zeros sit exponentially close to
/// nodes and `f64` cannot tell on which side.
pub fn zeros_above(t: &RecurrenceTable, n: usize, x: f64) -> usize {
    assert!(n <= t.n_max);
    if x == f64::NEG_INFINITY {
        return n;
    }
    if x == f64::INFINITY {
        return 0;
    }
    let xd = Dd::from(x);
    let (mut p0, mut p1) = (Dd::from(0.0), Dd::from(1.0));
    let mut last = 1.0f64;
    let mut count = 0;
    for k in 0..n {
        let p2 = (xd - Dd::from(t.beta[k])) * p1 - Dd::from(t.gamma2[k]) * p0;
        if p2.hi != 0.0 {
            if p2.hi.signum() != last {
                count += 1;
            }
            last = p2.hi.signum();
        }
        (p0, p1) = (p1, p2);
        let m = p0.hi.abs().max(p1.hi.abs());
        if m > 1e150 || (m < 1e-150 && m > 0.0) {
            let s = Dd::from(1.0 / m);
            (p0, p1) = (p0 * s, p1 * s);
        }
    }
    count
}

/// Zeros of `P_n` in `(a, b]`; a zero exactly at a node goes to the
/// interval on its left.
pub fn count_zeros(t: &RecurrenceTable, n: usize, a: f64, b: f64) -> usize {
    if b <= a {
        return 0;
    }
    zeros_above(t, n, a) - zeros_above(t, n, b)
}

/// Abscissa resolution of zero counting: a zero this close to a node is a tie at the node.
pub const NODE_RESOLUTION: f64 = 1e-12;

/// Zeros of `P_n` resolved inside the open cell `(a, b)`: zeros within `tol`
/// of either end are ties at that node and are not counted.
pub fn count_zeros_open(t: &RecurrenceTable, n: usize, a: f64, b: f64, tol: f64) -> usize {
    count_zeros(t, n, a + tol, b - tol)
}

/// Zeros of `P_n` within `tol` of `x`.
pub fn zeros_at(t: &RecurrenceTable, n: usize, x: f64, tol: f64) -> usize {
    count_zeros(t, n, x - tol, x + tol)
}

/// All zeros of `P_n`, ascending, by bisection on the Sturm count to `tol`.
pub fn locate_zeros(t: &RecurrenceTable, n: usize, tol: f64) -> Vec<f64> {
    let mut bound: f64 = 0.0;
    for k in 0..n {
        let off = t.gamma2[k].sqrt() + if k + 1 < n { t.gamma2[k + 1].sqrt() } else { 0.0 };
        bound = bound.max(t.beta[k].abs() + off);
    }
    let bound = bound + 1.0;
    (0..n)
        .map(|j| {
            // smallest x with exactly n-1-j zeros above it
            let (mut lo, mut hi) = (-bound, bound);
            while hi - lo > tol {
                let m = 0.5 * (lo + hi);
                if m <= lo || m >= hi {
                    break;
                }
                if zeros_above(t, n, m) > n - 1 - j {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}
