//! Dormand-Prince 5(4) integrator with PI step-size control and
//! 4th-order continuous extension for dense sampling.

use crate::error::{Error, Result};

/// Step-control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    /// Upper bound on the step size; unbounded when `None`.
    pub h_max: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            h_init: None,
            h_max: None,
            max_steps: 50_000_000,
        }
    }
}

/// States sampled at the requested times.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Set when the stop predicate fired before the last sample.
    pub stopped_at: Option<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

struct Work {
    k: [Vec<f64>; 7],
    ytmp: Vec<f64>,
    ynew: Vec<f64>,
    cont: [Vec<f64>; 5],
}

impl Work {
    fn new(n: usize) -> Self {
        let v = || vec![0.0; n];
        Self {
            k: [v(), v(), v(), v(), v(), v(), v()],
            ytmp: v(),
            ynew: v(),
            cont: [v(), v(), v(), v(), v()],
        }
    }
}

fn norm2(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Integrates `dy/dt = rhs(t, y)` from `t0`, returning the state at each
/// entry of `samples` (sorted, all `>= t0`). The integration is restarted
/// at every breakpoint so that kinks in the right-hand side land on step
/// boundaries. `stop` is checked after each accepted step; when it returns
/// true the integration ends and only the samples reached so far are
/// returned.
pub fn integrate_dense<F, S>(
    mut rhs: F,
    t0: f64,
    y0: &[f64],
    samples: &[f64],
    breakpoints: &[f64],
    opts: &OdeOptions,
    mut stop: S,
) -> Result<DenseSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    S: FnMut(f64, &[f64]) -> bool,
{
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidParams("tolerances must be positive".into()));
    }
    if samples.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("sample times must be sorted".into()));
    }
    if samples.first().is_some_and(|&t| t < t0) {
        return Err(Error::Domain(format!("sample time before start t0 = {t0:e}")));
    }
    let n = y0.len();
    let mut out = DenseSolution {
        times: Vec::with_capacity(samples.len()),
        states: Vec::with_capacity(samples.len()),
        stopped_at: None,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let Some(&t_end) = samples.last() else {
        return Ok(out);
    };

    let mut next_sample = 0;
    while next_sample < samples.len() && samples[next_sample] == t0 {
        out.times.push(t0);
        out.states.push(y0.to_vec());
        next_sample += 1;
    }
    if next_sample == samples.len() {
        return Ok(out);
    }

    let mut segment_ends: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&b| b > t0 && b < t_end)
        .collect();
    segment_ends.sort_by(f64::total_cmp);
    segment_ends.dedup();
    segment_ends.push(t_end);

    let mut w = Work::new(n);
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut h_prev: Option<f64> = opts.h_init;
    let mut steps = 0usize;

    for &seg_end in &segment_ends {
        rhs(t, &y, &mut w.k[0]);
        let mut h = match h_prev {
            Some(h) => h,
            None => initial_step(&mut rhs, t, &y, &w.k[0].clone(), seg_end - t, opts),
        };
        if let Some(hm) = opts.h_max {
            h = h.min(hm);
        }
        let mut fac_old: f64 = 1e-4;
        let mut last = false;

        while !last {
            if steps >= opts.max_steps {
                return Err(Error::Stiffness { t, state_norm: norm2(&y) });
            }
            let h_min = 16.0 * f64::EPSILON * t.abs().max(seg_end.abs());
            if h < h_min {
                return Err(Error::Stiffness { t, state_norm: norm2(&y) });
            }
            if t + 1.01 * h >= seg_end {
                h = seg_end - t;
                last = true;
            }

            // Stages 2..7 (stage 1 is FSAL in k[0]).
            let [k1, k2, k3, k4, k5, k6, k7] = &mut w.k;
            for i in 0..n {
                w.ytmp[i] = y[i] + h * A21 * k1[i];
            }
            rhs(t + C2 * h, &w.ytmp, k2);
            for i in 0..n {
                w.ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            rhs(t + C3 * h, &w.ytmp, k3);
            for i in 0..n {
                w.ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            rhs(t + C4 * h, &w.ytmp, k4);
            for i in 0..n {
                w.ytmp[i] =
                    y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            rhs(t + C5 * h, &w.ytmp, k5);
            for i in 0..n {
                w.ytmp[i] = y[i]
                    + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            let t_new = if last { seg_end } else { t + h };
            rhs(t_new, &w.ytmp, k6);
            for i in 0..n {
                w.ynew[i] = y[i]
                    + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            rhs(t_new, &w.ynew, k7);
            steps += 1;

            let mut err = 0.0;
            for i in 0..n {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let sc = opts.atol + opts.rtol * y[i].abs().max(w.ynew[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = (err / n.max(1) as f64).sqrt();
            if !err.is_finite() {
                if w.ynew.iter().any(|v| !v.is_finite()) && h <= h_min * 2.0 {
                    return Err(Error::NonFinite { t });
                }
                h *= FAC_MIN;
                last = false;
                out.rejected_steps += 1;
                continue;
            }

            let fac11 = err.powf(0.2 - BETA * 0.75);
            if err <= 1.0 {
                // Accepted: build the continuous extension before advancing.
                for i in 0..n {
                    let ydiff = w.ynew[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    w.cont[0][i] = y[i];
                    w.cont[1][i] = ydiff;
                    w.cont[2][i] = bspl;
                    w.cont[3][i] = ydiff - h * k7[i] - bspl;
                    w.cont[4][i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                            + D7 * k7[i]);
                }
                while next_sample < samples.len() && samples[next_sample] <= t_new {
                    let ts = samples[next_sample];
                    let state = if ts == t_new {
                        w.ynew.clone()
                    } else {
                        let th = (ts - t) / h;
                        let th1 = 1.0 - th;
                        (0..n)
                            .map(|i| {
                                w.cont[0][i]
                                    + th * (w.cont[1][i]
                                        + th1
                                            * (w.cont[2][i]
                                                + th * (w.cont[3][i] + th1 * w.cont[4][i])))
                            })
                            .collect()
                    };
                    out.times.push(ts);
                    out.states.push(state);
                    next_sample += 1;
                }
                let k7c = std::mem::take(k7);
                *k7 = std::mem::replace(k1, k7c);
                std::mem::swap(&mut y, &mut w.ynew);
                t = t_new;
                out.accepted_steps += 1;

                if w.k[0].iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite { t });
                }
                if stop(t, &y) {
                    out.stopped_at = Some(t);
                    return Ok(out);
                }

                let mut fac = fac11 / fac_old.powf(BETA);
                fac = (1.0 / FAC_MAX).max((1.0 / FAC_MIN).min(fac / SAFETY));
                fac_old = err.max(1e-4);
                h /= fac;
                if let Some(hm) = opts.h_max {
                    h = h.min(hm);
                }
            } else {
                h /= (1.0 / FAC_MIN).min(fac11 / SAFETY);
                last = false;
                out.rejected_steps += 1;
            }
        }
        h_prev = Some(h);
    }
    Ok(out)
}

fn initial_step<F>(rhs: &mut F, t: f64, y: &[f64], f0: &[f64], span: f64, opts: &OdeOptions) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len().max(1) as f64;
    let sc: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.abs()).collect();
    let d0 = (y.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (f0.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n).sqrt();
    let mut h0 = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 * span } else { 0.01 * d0 / d1 };
    h0 = h0.min(span);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(v, f)| v + h0 * f).collect();
    let mut f1 = vec![0.0; y.len()];
    rhs(t + h0, &y1, &mut f1);
    let d2 = (f1
        .iter()
        .zip(f0)
        .zip(&sc)
        .map(|((a, b), s)| ((a - b) / s).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6 * span)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}
