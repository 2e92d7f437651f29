//! Bessel functions of the first kind, orders 0, 1 and 2.
//!
//! Power series for |x| <= 8, Miller's backward recurrence (normalized by
//! J0 + 2 sum J_2k = 1) beyond that.

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 8.0;
pub const MAX_ARGUMENT: f64 = 1e4;

/// J_n(x) for n in {0, 1, 2} and |x| < 1e4.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if order > 2 {
        return Err(Error::Domain(format!("Bessel order {order} not supported (0, 1 or 2)")));
    }
    if !x.is_finite() || x.abs() >= MAX_ARGUMENT {
        return Err(Error::Domain(format!("Bessel argument {x} outside |x| < {MAX_ARGUMENT}")));
    }
    let [j0, j1, j2] = bessel_j012(x);
    Ok([j0, j1, j2][order as usize])
}

/// (J0, J1, J2) at x. Caller guarantees |x| < 1e4.
pub fn bessel_j012(x: f64) -> [f64; 3] {
    let ax = x.abs();
    let [j0, j1, j2] = if ax <= SERIES_LIMIT { series(ax) } else { miller(ax) };
    // J0, J2 even; J1 odd.
    [j0, if x < 0.0 { -j1 } else { j1 }, j2]
}

pub fn j0(x: f64) -> f64 {
    bessel_j012(x)[0]
}

pub fn j1(x: f64) -> f64 {
    bessel_j012(x)[1]
}

pub fn j2(x: f64) -> f64 {
    bessel_j012(x)[2]
}

fn series(x: f64) -> [f64; 3] {
    let q = -0.25 * x * x;
    let mut out = [0.0; 3];
    for (n, slot) in out.iter_mut().enumerate() {
        // First term (x/2)^n / n!
        let mut term = match n {
            0 => 1.0,
            1 => 0.5 * x,
            _ => 0.125 * x * x,
        };
        let mut sum = term;
        for k in 1..200 {
            term *= q / (k as f64 * (k + n) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        *slot = sum;
    }
    out
}

fn miller(x: f64) -> [f64; 3] {
    let start = (x + 20.0 + 10.0 * x.cbrt()).ceil() as usize;
    let m = start + start % 2;
    let mut next = 0.0_f64; // J_{k+1}
    let mut cur = 1e-280_f64; // J_k
    let mut norm = 0.0;
    let (mut j1, mut j2) = (0.0, 0.0);
    // Walk k = m, m-1, ..., 1 producing J_{k-1}.
    for k in (1..=m).rev() {
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        match k - 1 {
            2 => j2 = cur,
            1 => j1 = cur,
            _ => {}
        }
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            j1 *= s;
            j2 *= s;
        }
    }
    let j0 = cur;
    norm += j0;
    [j0 / norm, j1 / norm, j2 / norm]
}
